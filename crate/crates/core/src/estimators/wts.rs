//! Weighted Thompson sampling over DFT bins.
//!
//! Each bin `k` carries a complex Gaussian posterior for `H(omega_k)`. The
//! input spectrum puts power on bins in proportion to the posterior
//! probability that the bin holds the peak, estimated from `n_s` joint draws.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{EstimateTrace, EstimatorConfig, Method};
use crate::error::{Error, Result};
use crate::oracle::QueryOracle;
use crate::rng;
use crate::signals::{dft, idft, ComplexVec, Field};

/// Bins whose power share falls below `BIN_FLOOR / K` skip the `Y/U` update.
const BIN_FLOOR: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhaseRule {
    Zero,
    /// Uniform random phases drawn from the given seed.
    Random(u64),
}

#[derive(Clone, Debug)]
pub struct WtsOutcome {
    pub trace: EstimateTrace,
    /// Power profile after the last update.
    pub profile: Vec<f64>,
    /// Bin attaining the final estimate.
    pub best_bin: usize,
    pub bin_frequencies: Vec<f64>,
}

/// DFT index of bin `j` out of `bins` on a length-`dim` grid.
fn bin_index(j: usize, bins: usize, dim: usize, field: Field) -> usize {
    match field {
        Field::Complex => j * dim / bins,
        Field::Real if bins == 1 => 0,
        Field::Real => j * (dim / 2) / (bins - 1),
    }
}

pub(crate) fn max_bins(dim: usize, field: Field) -> usize {
    match field {
        Field::Complex => dim,
        Field::Real => dim / 2 + 1,
    }
}

/// Builds an input whose DFT magnitudes satisfy `|U_k|^2 ∝ p_k`, scaled to
/// `||u||_2 = cap`. In real mode a non-DC, non-Nyquist bin splits its power
/// evenly with its mirror so the signal stays real.
pub fn power_profile_to_input(
    profile: &[f64],
    dim: usize,
    field: Field,
    phases: PhaseRule,
    cap: f64,
) -> Result<ComplexVec> {
    let bins = profile.len();
    if bins == 0 || bins > max_bins(dim, field) {
        return Err(Error::invalid(
            "bins",
            format!("need 1..={} bins for length {dim}", max_bins(dim, field)),
        ));
    }
    if profile.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::invalid(
            "profile",
            "entries must be finite and non-negative",
        ));
    }
    if profile.iter().sum::<f64>() <= 0.0 {
        return Err(Error::invalid("profile", "total power must be positive"));
    }

    let mut phase_rng = match phases {
        PhaseRule::Zero => None,
        PhaseRule::Random(seed) => Some(rng::stream(&[seed, 0x7068_6173_65])),
    };
    let mut spectrum = vec![Complex64::new(0.0, 0.0); dim];
    for (j, &p) in profile.iter().enumerate() {
        let phase = match phase_rng.as_mut() {
            Some(r) => TAU * rand::Rng::gen::<f64>(r),
            None => 0.0,
        };
        if p == 0.0 {
            continue;
        }
        let k = bin_index(j, bins, dim, field);
        let mirrored = field == Field::Real && k != 0 && 2 * k != dim;
        if mirrored {
            let z = Complex64::from_polar((p / 2.0).sqrt(), phase);
            spectrum[k] = z;
            spectrum[dim - k] = z.conj();
        } else if field == Field::Real {
            // DC and Nyquist coefficients must be real.
            let sign = if phase.cos() < 0.0 { -1.0 } else { 1.0 };
            spectrum[k] = Complex64::new(sign * p.sqrt(), 0.0);
        } else {
            spectrum[k] = Complex64::from_polar(p.sqrt(), phase);
        }
    }

    let mut u = idft(&spectrum);
    if field == Field::Real {
        for z in &mut u {
            z.im = 0.0;
        }
    }
    let u = ComplexVec::new(u)?;
    let norm = u.norm2();
    Ok(u.scaled(Complex64::new(cap / norm, 0.0)))
}

/// Posterior `(m, v)` of one bin given accumulated power `P = sum_l p^l` and
/// `S = sum_l p^l X^l`: `m = lambda^2 S / (s^2 + lambda^2 P)` and
/// `v = lambda^2 / (1 + lambda^2 P / s^2)`. With `s = 0` the mean is `S / P`
/// and the variance 0; `P` must then be positive.
pub fn bin_posterior(
    power: f64,
    weighted_obs: Complex64,
    prior_std: f64,
    noise_std: f64,
) -> (Complex64, f64) {
    let lambda2 = prior_std * prior_std;
    let s2 = noise_std * noise_std;
    if s2 > 0.0 {
        (
            weighted_obs * lambda2 / (s2 + lambda2 * power),
            lambda2 / (1.0 + lambda2 / s2 * power),
        )
    } else {
        (weighted_obs / power, 0.0)
    }
}

pub fn wts_estimate<O: QueryOracle + ?Sized>(
    oracle: &mut O,
    cfg: &EstimatorConfig,
) -> Result<EstimateTrace> {
    wts_run(oracle, cfg).map(|o| o.trace)
}

pub fn wts_run<O: QueryOracle + ?Sized>(
    oracle: &mut O,
    cfg: &EstimatorConfig,
) -> Result<WtsOutcome> {
    let dim = oracle.dim();
    let cap = oracle.input_cap();
    let noise = oracle.noise();
    let field = noise.field;
    let rounds = oracle.remaining();
    if rounds == 0 {
        return Err(Error::BudgetExceeded { budget: 0 });
    }
    let prefix = cfg.cyclic_prefix.unwrap_or(0);
    if prefix >= dim {
        return Err(Error::invalid(
            "cyclic_prefix",
            format!("prefix {prefix} leaves no samples of the length-{dim} window"),
        ));
    }
    // DFT grid length after the prefix is dropped.
    let n = dim - prefix;
    let bins = cfg.bins.unwrap_or_else(|| max_bins(n, field));
    if bins == 0 || bins > max_bins(n, field) {
        return Err(Error::invalid(
            "bins",
            format!("need 1..={} bins for a length-{n} grid", max_bins(n, field)),
        ));
    }
    let indices: Vec<usize> = (0..bins).map(|j| bin_index(j, bins, n, field)).collect();
    let lambda2 = cfg.prior_std * cfg.prior_std;
    // Observations Y_k / U_k are normalized by the input energy, so the
    // effective noise level is sigma / M.
    let noise_var = (noise.sigma / cap).powi(2);
    let floor = BIN_FLOOR / bins as f64;

    let mut profile = vec![1.0 / bins as f64; bins];
    let mut power_sum = vec![0.0_f64; bins];
    let mut weighted_obs = vec![Complex64::new(0.0, 0.0); bins];
    let mut mean = vec![Complex64::new(0.0, 0.0); bins];
    let mut var = vec![lambda2; bins];
    let mut estimates = Vec::with_capacity(rounds);
    let mut best_bin = 0;

    for t in 0..rounds {
        let phases = if cfg.random_phases {
            PhaseRule::Random(rng::derive_seed(&[cfg.seed, t as u64]))
        } else {
            PhaseRule::Zero
        };
        let period = power_profile_to_input(&profile, n, field, phases, cap)?;
        let u = with_prefix(&period, prefix, cap)?;
        let y = oracle.query(&u)?;
        let u_hat = dft(&u.as_slice()[prefix..]);
        let y_hat = dft(&y.as_slice()[prefix..]);
        let energy = n as f64 * cap * cap;

        for (j, &k) in indices.iter().enumerate() {
            if profile[j] < floor {
                continue;
            }
            let u_k = u_hat[k];
            let w = u_k.norm_sqr() / energy;
            if w <= 0.0 {
                continue;
            }
            power_sum[j] += w;
            weighted_obs[j] += y_hat[k] / u_k * w;
        }

        for j in 0..bins {
            if noise_var > 0.0 || power_sum[j] > 0.0 {
                (mean[j], var[j]) = bin_posterior(
                    power_sum[j],
                    weighted_obs[j],
                    cfg.prior_std,
                    noise_var.sqrt(),
                );
            }
        }

        let mut draws = rng::stream(&[cfg.seed, 0x6472_6177, t as u64]);
        let mut counts = vec![0usize; bins];
        for _ in 0..cfg.posterior_samples {
            let mut arg = 0;
            let mut top = f64::NEG_INFINITY;
            for j in 0..bins {
                let s = mean[j] + rng::complex_normal(&mut draws, var[j].sqrt());
                let mag = s.norm_sqr();
                if mag > top {
                    top = mag;
                    arg = j;
                }
            }
            counts[arg] += 1;
        }
        for j in 0..bins {
            profile[j] = counts[j] as f64 / cfg.posterior_samples as f64;
        }

        let (arg, value) = (0..bins)
            .filter(|&j| power_sum[j] > 0.0)
            .map(|j| (j, (weighted_obs[j] / power_sum[j]).norm()))
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        best_bin = arg;
        estimates.push(value.max(0.0));
    }

    let flags = if prefix > 0 {
        vec![format!("cyclic_prefix:{prefix}")]
    } else {
        Vec::new()
    };
    let trace = EstimateTrace::from_rounds(Method::Wts, estimates, rounds, flags)?;
    Ok(WtsOutcome {
        trace,
        profile,
        best_bin,
        bin_frequencies: indices.iter().map(|&k| TAU * k as f64 / n as f64).collect(),
    })
}

/// `[s_{n-c}, ..., s_{n-1}, s_0, ..., s_{n-1}]` rescaled to norm `cap`.
fn with_prefix(period: &ComplexVec, prefix: usize, cap: f64) -> Result<ComplexVec> {
    if prefix == 0 {
        return Ok(period.clone());
    }
    let s = period.as_slice();
    let n = s.len();
    let mut u = Vec::with_capacity(n + prefix);
    for i in 0..prefix {
        u.push(s[(n - prefix % n + i) % n]);
    }
    u.extend_from_slice(s);
    let u = ComplexVec::new(u)?;
    let norm = u.norm2();
    Ok(u.scaled(Complex64::new(cap / norm, 0.0)))
}
