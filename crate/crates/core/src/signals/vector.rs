use std::ops::Index;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite complex vector. Serialized as a list of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct ComplexVec(Vec<Complex64>);

impl ComplexVec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if let Some(index) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    /// Standard basis vector `e_index` of length `len`.
    pub fn basis(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        debug_assert!(entries.iter().all(|z| z.is_finite()));
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm1(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * alpha).collect())
    }

    /// Conjugate-linear in `self`: `sum conj(self_i) * other_i`.
    pub fn inner(&self, other: &ComplexVec) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Rescales to unit Euclidean norm; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm2();
        (n > 0.0).then(|| self.scaled(Complex64::new(1.0 / n, 0.0)))
    }
}

impl Index<usize> for ComplexVec {
    type Output = Complex64;

    fn index(&self, index: usize) -> &Complex64 {
        &self.0[index]
    }
}

impl TryFrom<Vec<Complex64>> for ComplexVec {
    type Error = Error;

    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ComplexVec> for Vec<Complex64> {
    fn from(v: ComplexVec) -> Self {
        v.0
    }
}

/// Causal FIR filter `H(g) = sum_k g_k z^{-k}` with at least one tap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexVec", into = "ComplexVec")]
pub struct FirFilter {
    coeffs: ComplexVec,
}

impl FirFilter {
    pub fn new(coeffs: ComplexVec) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("coeffs", "filter needs at least one tap"));
        }
        Ok(Self { coeffs })
    }

    pub fn from_complex(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(ComplexVec::new(coeffs)?)
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(ComplexVec::from_real(coeffs)?)
    }

    /// Number of taps `r`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &ComplexVec {
        &self.coeffs
    }

    pub fn taps(&self) -> &[Complex64] {
        self.coeffs.as_slice()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.is_real()
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.scaled(alpha),
        }
    }

    /// The filter `H(g) - c`, i.e. `c` subtracted from the zeroth tap.
    pub fn shifted(&self, c: f64) -> Self {
        let mut taps = self.coeffs.clone().into_vec();
        taps[0] -= c;
        Self {
            coeffs: ComplexVec::from_vec_unchecked(taps),
        }
    }
}

impl TryFrom<ComplexVec> for FirFilter {
    type Error = Error;

    fn try_from(v: ComplexVec) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FirFilter> for ComplexVec {
    fn from(g: FirFilter) -> Self {
        g.coeffs
    }
}

/// Reverses sample order: entry `i` of the output is entry `L - 1 - i`.
pub fn time_reverse(x: &ComplexVec) -> ComplexVec {
    ComplexVec(x.0.iter().rev().copied().collect())
}

/// Conjugated time reversal. For real signals this is [`time_reverse`]; for
/// complex signals, feeding it back through `T(g)` and conjugate-reversing
/// again applies the adjoint `T(g)^*`.
pub fn adjoint_reverse(x: &ComplexVec) -> ComplexVec {
    ComplexVec(x.0.iter().rev().map(|z| z.conj()).collect())
}
