//! Separable orthonormal type-II DCT on square blocks.

use std::f64::consts::PI;

/// Precomputed `n x n` DCT-II basis.
#[derive(Debug, Clone)]
pub struct Dct2 {
    n: usize,
    // basis[k * n + i] = alpha(k) * cos(pi * (2i + 1) * k / 2n)
    basis: Vec<f64>,
}

impl Dct2 {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "transform size must be positive");
        let nf = n as f64;
        let mut basis = vec![0.0; n * n];
        for k in 0..n {
            let alpha = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            for i in 0..n {
                basis[k * n + i] = alpha * (PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf)).cos();
            }
        }
        Dct2 { n, basis }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Row-major `n x n` samples to coefficients, `B · X · Bᵀ`.
    pub fn forward(&self, block: &[f64]) -> Vec<f64> {
        assert_eq!(block.len(), self.n * self.n);
        let rows = self.transform_rows(block, false);
        self.transform_cols(&rows, false)
    }

    /// Coefficients back to samples, `Bᵀ · C · B`.
    pub fn inverse(&self, coefs: &[f64]) -> Vec<f64> {
        assert_eq!(coefs.len(), self.n * self.n);
        let cols = self.transform_cols(coefs, true);
        self.transform_rows(&cols, true)
    }

    fn basis_at(&self, k: usize, i: usize, inverse: bool) -> f64 {
        if inverse {
            self.basis[i * self.n + k]
        } else {
            self.basis[k * self.n + i]
        }
    }

    fn transform_rows(&self, input: &[f64], inverse: bool) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for r in 0..n {
            let row = &input[r * n..(r + 1) * n];
            for k in 0..n {
                out[r * n + k] = row.iter().enumerate().map(|(i, &v)| self.basis_at(k, i, inverse) * v).sum();
            }
        }
        out
    }

    fn transform_cols(&self, input: &[f64], inverse: bool) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for c in 0..n {
            for k in 0..n {
                out[k * n + c] = (0..n).map(|i| self.basis_at(k, i, inverse) * input[i * n + c]).sum();
            }
        }
        out
    }
}
