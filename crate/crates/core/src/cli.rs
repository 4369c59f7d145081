//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage errors, 1 for runtime failures.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::block::{analyze_frame, BlockSize, Channel};
use crate::io::{self, fmt_real, RawVideoSpec};
use crate::jnd::{BitDepth, MaskingParams};
use crate::parallel;
use crate::qp::{Model, OffsetMode, QpConfig, EVALUATION_QPS};
use crate::sim::{self, rate_delta_percent, SimConfig, SimReport};
use crate::synth::{self, ClipKind};

#[derive(Debug, Parser)]
#[command(name = "scpaq", version, about = "JND-based perceptual quantization for 4:4:4 video")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export threshold curves as mu,threshold tables.
    Curves(CurvesArgs),
    /// Write per-frame QP maps for a raw clip.
    Analyze(AnalyzeArgs),
    /// Run the coding simulator and compare against uniform quantization.
    Simulate(SimulateArgs),
    /// Per-channel PSNR between two raw clips.
    Psnr(PsnrArgs),
    /// Generate a synthetic raw clip.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    None,
    Idsq,
    Scpaq,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::None => Model::None,
            ModelArg::Idsq => Model::Idsq,
            ModelArg::Scpaq => Model::Scpaq,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComponentArg {
    Y,
    Cb,
    Cr,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OffsetArg {
    Literal,
    Delta,
}

#[derive(Debug, Args)]
pub struct VideoArgs {
    /// Raw planar 4:4:4 input file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    #[arg(long, default_value_t = 8, value_parser = parse_bit_depth)]
    pub bit_depth: u32,
    /// Frames to read (0 = all).
    #[arg(long, default_value_t = 0)]
    pub frames: usize,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 16, value_parser = parse_block_size)]
    pub block_size: usize,
    /// Base QP; repeat for a sweep.
    #[arg(long = "qp", value_parser = clap::value_parser!(i32).range(0..=51))]
    pub qps: Vec<i32>,
    #[arg(long, value_enum, default_value_t = ModelArg::Scpaq)]
    pub model: ModelArg,
    /// Masking parameter overrides, e.g. "g=4,k=2,scale_breakpoints=true".
    #[arg(long)]
    pub params: Option<String>,
    #[arg(long, value_enum, default_value_t = OffsetArg::Delta)]
    pub offset_mode: OffsetArg,
}

impl ModelArgs {
    fn qps(&self) -> Vec<i32> {
        if self.qps.is_empty() {
            EVALUATION_QPS.to_vec()
        } else {
            self.qps.clone()
        }
    }
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, default_value_t = 8, value_parser = parse_bit_depth)]
    pub bit_depth: u32,
    #[arg(long, value_enum, default_value_t = ComponentArg::All)]
    pub component: ComponentArg,
    /// Increment between tabulated mean values.
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long)]
    pub params: Option<String>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub video: VideoArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub video: VideoArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Quantizer rounding offset in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PsnrArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    #[arg(long, default_value_t = 8, value_parser = parse_bit_depth)]
    pub bit_depth: u32,
    #[arg(long, default_value_t = 0)]
    pub frames: usize,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// flat, flat:V, flat:Y,CB,CR, gradient or dark-bright.
    #[arg(long, default_value = "dark-bright")]
    pub kind: String,
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    #[arg(long, default_value_t = 256)]
    pub height: usize,
    #[arg(long, default_value_t = 8, value_parser = parse_bit_depth)]
    pub bit_depth: u32,
    #[arg(long, default_value_t = 10)]
    pub frames: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output raw file.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_bit_depth(s: &str) -> Result<u32, String> {
    let v: u32 = s.parse().map_err(|_| format!("'{s}' is not an integer"))?;
    BitDepth::new(v).map(BitDepth::bits).map_err(|e| e.to_string())
}

fn parse_block_size(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("'{s}' is not an integer"))?;
    BlockSize::new(v).map(BlockSize::get).map_err(|e| e.to_string())
}

fn masking_params(overrides: Option<&str>) -> anyhow::Result<MaskingParams> {
    let base = MaskingParams::default();
    Ok(match overrides {
        Some(spec) => base.with_overrides(spec)?,
        None => base,
    })
}

fn read_clip(v: &VideoArgs) -> anyhow::Result<Vec<crate::block::VideoFrame>> {
    let spec = RawVideoSpec::new(&v.input, v.width, v.height, BitDepth::new(v.bit_depth)?)?.with_frame_count(v.frames);
    let frames = io::read_yuv(&spec)?;
    if frames.is_empty() {
        bail!("{}: no frames", v.input.display());
    }
    Ok(frames)
}

fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn curves(args: &CurvesArgs) -> anyhow::Result<()> {
    let params = masking_params(args.params.as_deref())?;
    let bd = BitDepth::new(args.bit_depth)?;
    ensure_dir(&args.out)?;
    let channels: &[Channel] = match args.component {
        ComponentArg::Y => &[Channel::Y],
        ComponentArg::Cb => &[Channel::Cb],
        ComponentArg::Cr => &[Channel::Cr],
        ComponentArg::All => &Channel::ALL,
    };
    for &ch in channels {
        let path = args.out.join(format!("curve_{}_b{}.csv", ch.name(), bd.bits()));
        io::write_curve(ch, bd, &params, args.step, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn analyze(args: &AnalyzeArgs) -> anyhow::Result<()> {
    let params = masking_params(args.model.params.as_deref())?;
    let frames = read_clip(&args.video)?;
    let block_size = BlockSize::new(args.model.block_size)?;
    ensure_dir(&args.out)?;
    for qp in args.model.qps() {
        let cfg = QpConfig { offset_mode: offset_mode(args.model.offset_mode), ..QpConfig::new(qp)? };
        for (i, frame) in frames.iter().enumerate() {
            let map = analyze_frame(frame, i, block_size, &params, &cfg, args.model.model.into())
                .with_context(|| format!("{}: frame {i}", args.video.input.display()))?;
            let path = args.out.join(format!("qpmap_qp{qp}_f{i:04}.json"));
            io::write_qpmap(&map, &path)?;
        }
        println!("qp {qp}: wrote {} QP maps to {}", frames.len(), args.out.display());
    }
    Ok(())
}

fn offset_mode(arg: OffsetArg) -> OffsetMode {
    match arg {
        OffsetArg::Literal => OffsetMode::Literal,
        OffsetArg::Delta => OffsetMode::Delta,
    }
}

/// Summary rows of a QP sweep: the model against uniform quantization.
pub fn summary_table(rows: &[(SimReport, SimReport)]) -> String {
    let mut out = String::from(
        "qp,model,bits_y,bits_cb,bits_cr,bits_total,baseline_y,baseline_cb,baseline_cr,baseline_total,\
         delta_y_pct,delta_cb_pct,delta_cr_pct,delta_total_pct,psnr_y,psnr_cb,psnr_cr,\
         jnd_violation_y,jnd_violation_cb,jnd_violation_cr\n",
    );
    for (model, base) in rows {
        let bits = |r: &SimReport, ch: Channel| r.channel(ch).estimated_bits;
        let _ = write!(out, "{},{}", model.base_qp, model.model);
        for ch in Channel::ALL {
            let _ = write!(out, ",{}", bits(model, ch));
        }
        let _ = write!(out, ",{}", model.total_bits);
        for ch in Channel::ALL {
            let _ = write!(out, ",{}", bits(base, ch));
        }
        let _ = write!(out, ",{}", base.total_bits);
        for ch in Channel::ALL {
            let _ = write!(out, ",{}", fmt_real(rate_delta_percent(bits(model, ch), bits(base, ch))));
        }
        let _ = write!(out, ",{}", fmt_real(rate_delta_percent(model.total_bits, base.total_bits)));
        for ch in Channel::ALL {
            let _ = write!(out, ",{}", fmt_real(model.channel(ch).psnr_db));
        }
        for ch in Channel::ALL {
            let _ = write!(out, ",{}", fmt_real(model.channel(ch).jnd_violation_fraction));
        }
        out.push('\n');
    }
    out
}

fn simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let params = masking_params(args.model.params.as_deref())?;
    let frames = read_clip(&args.video)?;
    let bd = frames[0].bit_depth();
    let model: Model = args.model.model.into();
    ensure_dir(&args.out)?;
    let mut rows = Vec::new();
    for qp in args.model.qps() {
        let mut cfg = SimConfig::new(qp, bd, model)?;
        cfg.block_size = BlockSize::new(args.model.block_size)?;
        cfg.rounding_offset = args.theta;
        cfg.qp.offset_mode = offset_mode(args.model.offset_mode);
        let report = sim::simulate(&frames, &cfg, &params).with_context(|| format!("simulating at QP {qp}"))?;
        let baseline = if model == Model::None {
            report.clone()
        } else {
            sim::simulate(&frames, &SimConfig { model: Model::None, ..cfg }, &params)
                .with_context(|| format!("baseline at QP {qp}"))?
        };
        io::write_report(&report, args.out.join(format!("report_{model}_qp{qp}.json")))?;
        rows.push((report, baseline));
    }
    let table = summary_table(&rows);
    let path = args.out.join(format!("summary_{model}.csv"));
    std::fs::write(&path, &table).with_context(|| format!("writing {}", path.display()))?;
    print!("{table}");
    Ok(())
}

fn psnr(args: &PsnrArgs) -> anyhow::Result<()> {
    let bd = BitDepth::new(args.bit_depth)?;
    let load = |path: &Path| -> anyhow::Result<_> {
        let spec = RawVideoSpec::new(path, args.width, args.height, bd)?.with_frame_count(args.frames);
        Ok(io::read_yuv(&spec)?)
    };
    let reference = load(&args.reference)?;
    let test = load(&args.test)?;
    if reference.len() != test.len() {
        bail!("{} has {} frames, {} has {}", args.reference.display(), reference.len(), args.test.display(), test.len());
    }
    for ch in Channel::ALL {
        let mut total = 0u64;
        let mut samples = 0u64;
        for (i, (r, t)) in reference.iter().zip(&test).enumerate() {
            total += sim::sse(r.plane(ch), t.plane(ch)).with_context(|| format!("frame {i}"))?;
            samples += r.plane(ch).data().len() as u64;
        }
        println!("{ch}: {} dB", fmt_real(sim::psnr_from_sse(total, samples, bd)));
    }
    Ok(())
}

fn generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let kind: ClipKind = args.kind.parse()?;
    let bd = BitDepth::new(args.bit_depth)?;
    let frames = synth::generate_clip(kind, args.width, args.height, args.frames, bd, args.seed)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    io::write_yuv(&frames, &args.out)?;
    println!("{}: {} frames of {kind}, {}x{} at {} bits", args.out.display(), frames.len(), args.width, args.height, bd.bits());
    Ok(())
}

pub fn execute(cli: &Cli) -> anyhow::Result<()> {
    let threads = parallel::threads_from_env()?;
    parallel::run_with_threads(threads, || match &cli.command {
        Command::Curves(a) => curves(a),
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Psnr(a) => psnr(a),
        Command::Generate(a) => generate(a),
    })?
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
