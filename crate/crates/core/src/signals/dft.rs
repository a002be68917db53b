use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CMatrix, ComplexVec, FirFilter};
use crate::error::{Error, Result};

/// Unnormalized DFT matrix, `F_{jk} = exp(-2 pi i jk / r)`, so `F F^* = r I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DftMatrix {
    dim: usize,
}

impl DftMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        twiddle(self.dim, j * k)
    }

    pub fn to_dense(&self) -> CMatrix {
        DMatrix::from_fn(self.dim, self.dim, |j, k| self.entry(j, k))
    }

    /// `F^{-1} = F^* / r`.
    pub fn inverse_dense(&self) -> CMatrix {
        let r = self.dim as f64;
        DMatrix::from_fn(self.dim, self.dim, |j, k| self.entry(k, j).conj() / r)
    }

    /// Column `i` of `F^{-1}`, i.e. `F^{-1} e_i`; has Euclidean norm `1/sqrt(r)`.
    pub fn inverse_column(&self, i: usize) -> ComplexVec {
        let r = self.dim as f64;
        ComplexVec::from_vec_unchecked(
            (0..self.dim)
                .map(|j| twiddle(self.dim, i * j).conj() / r)
                .collect(),
        )
    }

    pub fn apply(&self, x: &ComplexVec) -> Result<ComplexVec> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                context: "DFT input",
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(ComplexVec::from_vec_unchecked(dft(x.as_slice())))
    }
}

pub fn dft_matrix(r: usize) -> Result<DftMatrix> {
    if r == 0 {
        return Err(Error::invalid("r", "DFT dimension must be positive"));
    }
    Ok(DftMatrix { dim: r })
}

/// `exp(-2 pi i m / n)` with the exponent reduced mod `n` first.
fn twiddle(n: usize, m: usize) -> Complex64 {
    let (s, c) = (-TAU * (m % n) as f64 / n as f64).sin_cos();
    Complex64::new(c, s)
}

fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n).map(|m| twiddle(n, m)).collect()
}

/// Unnormalized forward DFT, O(n^2).
pub fn dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let w = twiddles(n);
    (0..n)
        .map(|k| (0..n).map(|j| x[j] * w[(j * k) % n]).sum())
        .collect()
}

/// Inverse of [`dft`]: `x_j = (1/n) sum_k X_k exp(2 pi i jk / n)`.
pub fn idft(spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spectrum.len();
    let w = twiddles(n);
    let scale = 1.0 / n as f64;
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| spectrum[k] * w[(j * k) % n].conj())
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

/// `H(omega) = sum_k g_k exp(-j omega k)`, evaluated by Horner's rule.
pub fn freq_response(g: &FirFilter, omega: f64) -> Complex64 {
    eval_taps(g.taps(), omega)
}

pub(crate) fn eval_taps(taps: &[Complex64], omega: f64) -> Complex64 {
    let (s, c) = (-omega).sin_cos();
    let z = Complex64::new(c, s);
    taps.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &g| acc * z + g)
}

/// `||F g||_inf`, which never exceeds `||H(g)||_inf`.
pub fn dft_norm_lower_bound(g: &FirFilter) -> f64 {
    dft(g.taps()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
