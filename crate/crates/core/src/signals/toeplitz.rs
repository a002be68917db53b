use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{CMatrix, ComplexVec, FirFilter};
use crate::error::{Error, Result};

/// Upper-left `L x L` section of the lower-triangular Toeplitz operator of `g`.
#[derive(Clone, Debug)]
pub struct ToeplitzSection {
    source: FirFilter,
    dim: usize,
}

impl ToeplitzSection {
    pub fn new(source: FirFilter, dim: usize) -> Result<Self> {
        if dim < source.len() {
            return Err(Error::invalid(
                "dim",
                format!(
                    "section dimension {dim} is shorter than the {} taps",
                    source.len()
                ),
            ));
        }
        Ok(Self { source, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> &FirFilter {
        &self.source
    }

    pub fn apply(&self, u: &ComplexVec) -> Result<ComplexVec> {
        convolve_truncated(&self.source, u, self.dim)
    }

    pub fn to_dense(&self) -> CMatrix {
        let g = self.source.taps();
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            if i >= j && i - j < g.len() {
                g[i - j]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// `y_i = sum_{k <= min(i, r-1)} g_k u_{i-k}`, the noiseless response `T(g) u`.
pub fn convolve_truncated(g: &FirFilter, u: &ComplexVec, dim: usize) -> Result<ComplexVec> {
    if u.len() != dim {
        return Err(Error::Dimension {
            context: "convolve_truncated input",
            expected: dim,
            got: u.len(),
        });
    }
    if dim < g.len() {
        return Err(Error::invalid(
            "dim",
            format!(
                "section dimension {dim} is shorter than the {} taps",
                g.len()
            ),
        ));
    }
    Ok(ComplexVec::from_vec_unchecked(convolve_slices(
        g.taps(),
        u.as_slice(),
    )))
}

/// Truncated linear convolution of two slices, output length `u.len()`.
/// Taps beyond the output length are ignored.
pub(crate) fn convolve_slices(g: &[Complex64], u: &[Complex64]) -> Vec<Complex64> {
    (0..u.len())
        .map(|i| {
            let kmax = i.min(g.len().saturating_sub(1));
            (0..=kmax).map(|k| g[k] * u[i - k]).sum()
        })
        .collect()
}

/// Dense `T(g)` of dimension `L`.
pub fn toeplitz_matrix(g: &FirFilter, dim: usize) -> Result<CMatrix> {
    Ok(ToeplitzSection::new(g.clone(), dim)?.to_dense())
}

/// `T(v)` for a vector treated as a filter of length `dim` (zero padded).
pub(crate) fn toeplitz_of_vec(v: &[Complex64], dim: usize) -> CMatrix {
    DMatrix::from_fn(dim, dim, |i, j| {
        if i >= j && i - j < v.len() {
            v[i - j]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
