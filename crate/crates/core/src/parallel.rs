//! Worker-count control.
//!
//! Analysis and simulation use rayon internally; results are assembled in
//! block order, so the worker count only changes wall time.

use crate::error::{Error, Result};

/// Environment variable capping the worker count; `0` or unset means automatic.
pub const THREADS_ENV: &str = "SCPAQ_THREADS";

pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got '{v}'"))),
        Err(_) => Ok(0),
    }
}

/// Runs `f` inside a dedicated pool of `threads` workers (0 = rayon default).
pub fn run_with_threads<R, F>(threads: usize, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_runs_closure() {
        assert_eq!(run_with_threads(2, rayon::current_num_threads).unwrap(), 2);
        assert_eq!(run_with_threads(1, || 7).unwrap(), 7);
    }
}
