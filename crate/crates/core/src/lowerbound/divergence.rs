use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DivergenceMethod, DivergenceReport, FinitePrior, PriorKind};
use crate::error::{Error, Result};
use crate::rng;
use crate::signals::{convolve_truncated, ComplexVec, FirFilter};

/// Largest exponent accepted by [`g_kernel`] before reporting overflow.
const MAX_EXPONENT: f64 = 700.0;
const MC_BLOCK: usize = 512;

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid("sigma", "must be positive and finite"));
    }
    Ok(())
}

/// Noiseless responses `T(theta) u_t` for every input.
fn responses(theta: &FirFilter, inputs: &[ComplexVec]) -> Result<Vec<ComplexVec>> {
    inputs
        .iter()
        .map(|u| convolve_truncated(theta, u, u.len()))
        .collect()
}

fn energy(rows: &[ComplexVec]) -> f64 {
    rows.iter().map(|y| y.norm2().powi(2)).sum()
}

fn real_inner(a: &[ComplexVec], b: &[ComplexVec]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner(y).re).sum()
}

/// `KL(P_theta || P_0) = (1 / 2 sigma^2) sum_t ||T(theta) u_t||^2` for a
/// fixed input schedule under complex noise with per-part variance `sigma^2`.
pub fn kl_active_closed_form(inputs: &[ComplexVec], theta: &FirFilter, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(energy(&responses(theta, inputs)?) / (2.0 * sigma * sigma))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KlMixtureReport {
    /// Divergence from the zero-filter law, with KL bounded by convexity.
    pub report: DivergenceReport,
    /// `KL(P_theta || P_0)` for each prior member.
    pub per_member: Vec<f64>,
    /// `tau^2 N M^2 / (2 sigma^2 r)` for the active hard prior. It holds for
    /// any schedule with `||u_t|| <= M`, adaptive or not.
    pub closed_bound: Option<f64>,
}

/// Upper bound on `KL(E_theta P_theta || P_0)` by the prior average of the
/// member divergences.
pub fn kl_mixture_upper(
    inputs: &[ComplexVec],
    prior: &FinitePrior,
    sigma: f64,
    input_cap: f64,
) -> Result<KlMixtureReport> {
    check_sigma(sigma)?;
    if inputs.is_empty() {
        return Err(Error::EmptyData("input schedule"));
    }
    let per_member = prior
        .support()
        .iter()
        .map(|theta| kl_active_closed_form(inputs, theta, sigma))
        .collect::<Result<Vec<_>>>()?;
    let kl = per_member.iter().sum::<f64>() / per_member.len() as f64;
    let closed_bound = match prior.kind() {
        PriorKind::ActiveHard { tau } => Some(
            tau * tau * inputs.len() as f64 * input_cap * input_cap
                / (2.0 * sigma * sigma * prior.taps() as f64),
        ),
        _ => None,
    };
    Ok(KlMixtureReport {
        report: DivergenceReport::new(Some(kl), None, DivergenceMethod::Enumeration, None),
        per_member,
        closed_bound,
    })
}

/// `(1 / sigma^2) sum_t Re <T(theta1) u_t, T(theta2) u_t>`.
pub fn log_g_kernel(
    theta1: &FirFilter,
    theta2: &FirFilter,
    inputs: &[ComplexVec],
    sigma: f64,
) -> Result<f64> {
    check_sigma(sigma)?;
    let a = responses(theta1, inputs)?;
    let b = responses(theta2, inputs)?;
    Ok(real_inner(&a, &b) / (sigma * sigma))
}

/// `E_0[(dP_theta1 / dP_0)(dP_theta2 / dP_0)]`, the chi-square kernel.
pub fn g_kernel(
    theta1: &FirFilter,
    theta2: &FirFilter,
    inputs: &[ComplexVec],
    sigma: f64,
) -> Result<f64> {
    let exponent = log_g_kernel(theta1, theta2, inputs, sigma)?;
    if exponent > MAX_EXPONENT {
        return Err(Error::Overflow { exponent });
    }
    Ok(exponent.exp())
}

/// `chi^2(E_theta P_theta || P_0) = E_{theta, theta'} G(theta, theta') - 1`
/// by full enumeration of pairs.
pub fn chi_sq_mixture(
    inputs: &[ComplexVec],
    prior: &FinitePrior,
    sigma: f64,
) -> Result<DivergenceReport> {
    check_sigma(sigma)?;
    if inputs.is_empty() {
        return Err(Error::EmptyData("input schedule"));
    }
    let means = prior
        .support()
        .iter()
        .map(|theta| responses(theta, inputs))
        .collect::<Result<Vec<_>>>()?;
    let k = means.len();
    let mut total = 0.0;
    for i in 0..k {
        for j in i..k {
            let exponent = real_inner(&means[i], &means[j]) / (sigma * sigma);
            if exponent > MAX_EXPONENT {
                return Err(Error::Overflow { exponent });
            }
            total += if i == j { 1.0 } else { 2.0 } * exponent.exp();
        }
    }
    let chi = (total / (k * k) as f64 - 1.0).max(0.0);
    Ok(DivergenceReport::new(
        None,
        Some(chi),
        DivergenceMethod::Enumeration,
        None,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
}

struct Mixture {
    means: Vec<Vec<Complex64>>,
}

impl Mixture {
    fn new(prior: &FinitePrior, inputs: &[ComplexVec]) -> Result<Self> {
        let means = prior
            .support()
            .iter()
            .map(|theta| {
                responses(theta, inputs)
                    .map(|rows| rows.into_iter().flat_map(|r| r.into_vec()).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { means })
    }

    /// Log density up to the shared Gaussian normalizer.
    fn log_density(&self, x: &[Complex64], sigma: f64) -> f64 {
        let logs: Vec<f64> = self
            .means
            .iter()
            .map(|m| {
                let d: f64 = x.iter().zip(m).map(|(a, b)| (a - b).norm_sqr()).sum();
                -d / (2.0 * sigma * sigma)
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
            - (self.means.len() as f64).ln()
    }

    fn sample<R: Rng>(&self, rng: &mut R, sigma: f64) -> Vec<Complex64> {
        let m = &self.means[rng.gen_range(0..self.means.len())];
        m.iter()
            .map(|&c| c + rng::complex_normal(rng, sigma))
            .collect()
    }
}

/// Monte Carlo `(1/2)(E_P1[(1 - p2/p1)_+] + E_P2[(1 - p1/p2)_+])`, which is
/// the total variation between the two mixture laws.
pub fn estimate_tv_mc(
    prior1: &FinitePrior,
    prior2: &FinitePrior,
    inputs: &[ComplexVec],
    sigma: f64,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_sigma(sigma)?;
    if inputs.is_empty() {
        return Err(Error::EmptyData("input schedule"));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let mix = [Mixture::new(prior1, inputs)?, Mixture::new(prior2, inputs)?];
    let blocks = samples.div_ceil(MC_BLOCK);

    let side = |s: usize| -> (f64, f64) {
        let (own, other) = (&mix[s], &mix[1 - s]);
        let (sum, sq) = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = rng::stream(&[seed, s as u64, b as u64]);
                let n = MC_BLOCK.min(samples - b * MC_BLOCK);
                let mut acc = (0.0, 0.0);
                for _ in 0..n {
                    let x = own.sample(&mut rng, sigma);
                    let ratio = (other.log_density(&x, sigma) - own.log_density(&x, sigma)).exp();
                    let v = (1.0 - ratio).max(0.0);
                    acc.0 += v;
                    acc.1 += v * v;
                }
                acc
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        let n = samples as f64;
        let mean = sum / n;
        (mean, (sq / n - mean * mean).max(0.0) / n)
    };
    let (m1, v1) = side(0);
    let (m2, v2) = side(1);
    Ok(McEstimate {
        value: 0.5 * (m1 + m2),
        std_err: 0.5 * (v1 + v2).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowerbound::active_hard_prior;

    fn impulses(dim: usize, n: usize, amp: f64) -> Vec<ComplexVec> {
        vec![ComplexVec::basis(dim, 0).scaled(Complex64::new(amp, 0.0)); n]
    }

    #[test]
    fn kl_of_scalar_plant() {
        let theta = FirFilter::from_real(&[0.5]).unwrap();
        let kl = kl_active_closed_form(&impulses(1, 4, 2.0), &theta, 1.0).unwrap();
        // 4 queries, |theta u|^2 = 1 each
        assert!((kl - 2.0).abs() < 1e-14);
    }

    #[test]
    fn active_mixture_meets_closed_bound() {
        let (r, n, tau) = (8, 128, 0.25);
        let prior = active_hard_prior(r, tau).unwrap();
        let rep = kl_mixture_upper(&impulses(r, n, 1.0), &prior, 1.0, 1.0).unwrap();
        let bound = rep.closed_bound.unwrap();
        assert!((bound - 0.5).abs() < 1e-14);
        // ||F^{-1} e_i||^2 = 1/r, so impulse inputs attain the bound
        assert!((rep.report.kl.unwrap() - bound).abs() < 1e-12);
        assert!((rep.report.tv_upper - 0.5).abs() < 1e-12);
    }

    #[test]
    fn g_kernel_identities() {
        let a = FirFilter::from_real(&[0.3, -0.2]).unwrap();
        let zero = FirFilter::from_real(&[0.0, 0.0]).unwrap();
        let inputs = impulses(3, 5, 1.0);
        assert_eq!(g_kernel(&a, &zero, &inputs, 0.7).unwrap(), 1.0);
        let kl = kl_active_closed_form(&inputs, &a, 0.7).unwrap();
        // G(theta, theta) = exp(2 KL)
        assert!((g_kernel(&a, &a, &inputs, 0.7).unwrap() - (2.0 * kl).exp()).abs() < 1e-12);
        let big = FirFilter::from_real(&[100.0]).unwrap();
        assert!(matches!(
            g_kernel(&big, &big, &impulses(1, 1, 1.0), 1.0),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn chi_sq_of_single_point() {
        let theta = FirFilter::from_real(&[0.5]).unwrap();
        let prior = FinitePrior::new(vec![theta]).unwrap();
        let rep = chi_sq_mixture(&impulses(1, 2, 1.0), &prior, 1.0).unwrap();
        assert!((rep.chi_sq.unwrap() - (0.5f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn tv_between_identical_priors_is_zero() {
        let prior = active_hard_prior(2, 0.5).unwrap();
        let est = estimate_tv_mc(&prior, &prior, &impulses(2, 2, 1.0), 1.0, 300, 3).unwrap();
        assert_eq!(est.value, 0.0);
    }
}
