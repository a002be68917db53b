use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{random_unit, scale, EstimateTrace, EstimatorConfig, InputSchedule, Method};
use crate::error::{Error, Result};
use crate::oracle::QueryOracle;
use crate::rng;
use crate::signals::{hinf_norm, ComplexVec, Field, FirFilter};

/// Relative threshold on `|R_ii|` below which the stacked design is treated
/// as rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct LeastSquaresFit {
    pub filter: FirFilter,
    pub rank: usize,
    pub rank_deficient: bool,
}

/// Fits `m` taps minimizing `sum_t ||y_t - U_t g||^2`, where `U_t` is the
/// `L x m` truncated-convolution matrix of `u_t`.
///
/// Solved by Householder QR of the stacked design; a rank-deficient design
/// falls back to the minimum-norm SVD solution.
pub fn least_squares_fir(
    inputs: &[ComplexVec],
    outputs: &[ComplexVec],
    m: usize,
) -> Result<LeastSquaresFit> {
    if inputs.is_empty() {
        return Err(Error::EmptyData(
            "least squares needs at least one experiment",
        ));
    }
    if inputs.len() != outputs.len() {
        return Err(Error::Dimension {
            context: "least squares outputs",
            expected: inputs.len(),
            got: outputs.len(),
        });
    }
    let dim = inputs[0].len();
    if m == 0 || m > dim {
        return Err(Error::invalid(
            "model_order",
            format!("must lie in 1..={dim}, got {m}"),
        ));
    }
    for (u, y) in inputs.iter().zip(outputs) {
        if u.len() != dim || y.len() != dim {
            return Err(Error::Dimension {
                context: "least squares experiment",
                expected: dim,
                got: if u.len() != dim { u.len() } else { y.len() },
            });
        }
    }

    let rows = inputs.len() * dim;
    let mut design = DMatrix::<Complex64>::zeros(rows, m);
    let mut rhs = DVector::<Complex64>::zeros(rows);
    for (t, (u, y)) in inputs.iter().zip(outputs).enumerate() {
        let base = t * dim;
        for i in 0..dim {
            rhs[base + i] = y[i];
            for k in 0..m.min(i + 1) {
                design[(base + i, k)] = u[i - k];
            }
        }
    }

    let qr = design.clone().qr();
    let r = qr.r();
    let diag_max = (0..m).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    let rank = (0..m)
        .filter(|&i| r[(i, i)].norm() > RANK_TOL * diag_max)
        .count();

    let coeffs = if rank == m && diag_max > 0.0 {
        let qtb = qr.q().adjoint() * &rhs;
        r.solve_upper_triangular(&qtb)
            .ok_or(Error::Singular { eigenvalue: 0.0 })?
    } else {
        let svd = design.svd(true, true);
        let s_max = svd.singular_values.max();
        svd.solve(&rhs, RANK_TOL * s_max.max(f64::MIN_POSITIVE))
            .map_err(|e| Error::invalid("design", e.to_string()))?
    };

    Ok(LeastSquaresFit {
        filter: FirFilter::from_complex(coeffs.iter().copied().collect())?,
        rank,
        rank_deficient: rank < m,
    })
}

/// Passive plugin estimator: `N` experiments with the configured schedule,
/// a least-squares FIR fit, and the fitted model's peak gain.
pub fn plugin_estimate<O: QueryOracle + ?Sized>(
    oracle: &mut O,
    cfg: &EstimatorConfig,
) -> Result<EstimateTrace> {
    let dim = oracle.dim();
    let cap = oracle.input_cap();
    let field = oracle.noise().field;
    let rounds = oracle.remaining();
    if rounds == 0 {
        return Err(Error::BudgetExceeded { budget: 0 });
    }
    let m = cfg.model_order.unwrap_or(dim);
    if m > dim {
        return Err(Error::invalid(
            "model_order",
            format!("{m} exceeds the data length {dim}"),
        ));
    }

    let mut inputs = Vec::with_capacity(rounds);
    let mut outputs = Vec::with_capacity(rounds);
    for t in 0..rounds {
        let u = match &cfg.input_schedule {
            InputSchedule::Impulse => scale(&ComplexVec::basis(dim, 0), cap),
            InputSchedule::UnitRandom => {
                let mut stream = rng::stream(&[cfg.seed, 0x706c_7567, t as u64]);
                scale(&random_unit(&mut stream, dim, field), cap)
            }
            InputSchedule::Custom(list) => {
                if list.is_empty() {
                    return Err(Error::EmptyData("custom input schedule"));
                }
                list[t % list.len()].clone()
            }
        };
        let y = oracle.query(&u)?;
        inputs.push(u);
        outputs.push(y);
    }

    let fit = least_squares_fir(&inputs, &outputs, m)?;
    let model = match field {
        Field::Real => {
            FirFilter::from_real(&fit.filter.taps().iter().map(|z| z.re).collect::<Vec<_>>())?
        }
        Field::Complex => fit.filter,
    };
    let estimate = hinf_norm(&model, cfg.hinf_tol)?.value;
    let mut flags = Vec::new();
    if fit.rank_deficient {
        flags.push(format!("rank_deficient:{}", fit.rank));
    }
    EstimateTrace::from_rounds(Method::Plugin, vec![estimate], rounds, flags)
}
