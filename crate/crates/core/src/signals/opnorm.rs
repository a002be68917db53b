use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use super::CMatrix;
use crate::error::{Error, Result};
use crate::rng;

pub const OPNORM_MAX_ITERATIONS: usize = 200_000;
const OPNORM_TOL: f64 = 1e-12;

/// Largest singular value of `m`, by power iteration on `m^* m`.
///
/// The start vector comes from a fixed seed, so the result is a pure
/// function of `m`. Stops once the Rayleigh quotient changes by less than
/// `1e-12` relative and the eigen-residual is below `1e-7` relative.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    if let Some(index) = m.iter().position(|z| !z.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let cols = m.ncols();
    if cols == 0 || m.nrows() == 0 {
        return Ok(0.0);
    }
    let gram = m.adjoint() * m;

    let mut start = rng::stream(&[0x6f70_6e6f_726d, cols as u64]);
    let mut v = DVector::from_fn(cols, |_, _| {
        Complex64::new(start.gen::<f64>() - 0.5, start.gen::<f64>() - 0.5)
    });
    v /= Complex64::new(v.norm(), 0.0);

    let mut lambda = 0.0_f64;
    for _ in 0..OPNORM_MAX_ITERATIONS {
        let w = &gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next = v.dotc(&w).re;
        let residual = (&w - &v * Complex64::new(next, 0.0)).norm();
        let settled = (next - lambda).abs() <= OPNORM_TOL * next.abs();
        lambda = next;
        v = w / Complex64::new(norm, 0.0);
        if settled && residual <= 1e-7 * lambda.abs() {
            return Ok(lambda.max(0.0).sqrt());
        }
    }
    Err(Error::NoConvergence {
        iterations: OPNORM_MAX_ITERATIONS,
    })
}
