use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{active_hard_prior, DivergenceMethod, DivergenceReport, FinitePrior};
use crate::error::{Error, Result};
use crate::estimators::{estimate, grid_mab_estimate, EstimatorConfig, Method};
use crate::oracle::{FreqQuerySession, NoiseModel, QuerySession};
use crate::rng;
use crate::signals::hinf_norm;

/// Two-prior risk certificate: any estimator has
/// `max_i E_{P_i} |h_hat - ||theta||_inf| >= (c / 2)(1 - TV)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeCamCertificate {
    /// Largest norm under the lower-norm prior.
    pub low_max: f64,
    /// Smallest norm under the higher-norm prior.
    pub high_min: f64,
    /// Half the norm gap between the priors.
    pub separation: f64,
    pub tv_upper: f64,
    pub divergence: DivergenceReport,
    pub risk_lower: f64,
}

pub fn le_cam_certificate(
    prior1: &FinitePrior,
    prior2: &FinitePrior,
    divergence: DivergenceReport,
) -> Result<LeCamCertificate> {
    let n1 = prior1.member_norms()?;
    let n2 = prior2.member_norms()?;
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let (low_max, high_min) = if min(&n2) - max(&n1) >= min(&n1) - max(&n2) {
        (max(&n1), min(&n2))
    } else {
        (max(&n2), min(&n1))
    };
    let gap = high_min - low_max;
    if !(gap > 0.0) {
        return Err(Error::NotSeparated { gap });
    }
    let separation = gap / 2.0;
    Ok(LeCamCertificate {
        low_max,
        high_min,
        separation,
        tv_upper: divergence.tv_upper,
        divergence,
        risk_lower: separation / 2.0 * (1.0 - divergence.tv_upper),
    })
}

/// `tau = (sigma / M) sqrt(r / N)`, which caps the active KL at `1/2`.
pub fn active_pinsker_tau(sigma: f64, input_cap: f64, r: usize, budget: usize) -> Result<f64> {
    if !(sigma > 0.0) || !(input_cap > 0.0) || r == 0 || budget == 0 {
        return Err(Error::invalid(
            "certificate",
            "need sigma > 0, M > 0, r >= 1 and N >= 1",
        ));
    }
    Ok(sigma / input_cap * (r as f64 / budget as f64).sqrt())
}

/// `tau^2 N M^2 / (2 sigma^2 r)`.
pub fn active_kl_bound(tau: f64, budget: usize, input_cap: f64, sigma: f64, r: usize) -> f64 {
    tau * tau * budget as f64 * input_cap * input_cap / (2.0 * sigma * sigma * r as f64)
}

/// Certificate for the zero filter against the active hard prior at the
/// Pinsker-calibrated `tau`.
pub fn active_certificate(
    r: usize,
    budget: usize,
    sigma: f64,
    input_cap: f64,
) -> Result<LeCamCertificate> {
    let tau = active_pinsker_tau(sigma, input_cap, r, budget)?;
    let kl = active_kl_bound(tau, budget, input_cap, sigma, r);
    le_cam_certificate(
        &FinitePrior::zero(r)?,
        &active_hard_prior(r, tau)?,
        DivergenceReport::new(Some(kl), None, DivergenceMethod::ClosedForm, None),
    )
}

/// `tau^2 = sigma^2 r log(0.211 r) / (2N)`. Needs `r >= 5` so the log is positive.
pub fn passive_tau(sigma: f64, r: usize, budget: usize) -> Result<f64> {
    if r < 5 {
        return Err(Error::invalid(
            "r",
            format!("passive tau needs r >= 5, got {r}"),
        ));
    }
    if !(sigma > 0.0) || budget == 0 {
        return Err(Error::invalid("passive_tau", "need sigma > 0 and N >= 1"));
    }
    let r = r as f64;
    Ok((sigma * sigma * r * (0.211 * r).ln() / (2.0 * budget as f64)).sqrt())
}

/// Smallest `N` for which the passive chi-square argument goes through:
/// `(2 / log 1.1) r^2 log^2(0.211 r) M^4 / gamma^2`.
pub fn passive_sample_requirement(r: usize, input_cap: f64, gamma: f64) -> Result<f64> {
    if r < 5 {
        return Err(Error::invalid(
            "r",
            format!("passive bound needs r >= 5, got {r}"),
        ));
    }
    if !(gamma > 0.0) {
        return Err(Error::invalid("gamma", "must be positive"));
    }
    let r = r as f64;
    let log = (0.211 * r).ln();
    Ok(2.0 / 1.1f64.ln() * r * r * log * log * input_cap.powi(4) / (gamma * gamma))
}

/// Oracle settings shared by every Bayes-risk trial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionParams {
    pub dim: usize,
    pub input_cap: f64,
    pub budget: usize,
    pub noise: NoiseModel,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

fn one_trial(
    cfg: &EstimatorConfig,
    prior: &FinitePrior,
    params: &SessionParams,
    seed: u64,
    trial: u64,
) -> Result<f64> {
    let idx = rng::stream(&[seed, trial, 0]).gen_range(0..prior.len());
    let theta = prior.support()[idx].clone();
    let truth = hinf_norm(&theta, super::MEMBER_HINF_TOL)?.value;
    let cfg = cfg.clone().with_seed(rng::derive_seed(&[seed, trial, 2]));
    let session_seed = rng::derive_seed(&[seed, trial, 1]);
    let trace = if cfg.variant == Method::GridMab {
        let mut s = FreqQuerySession::new(theta, params.budget, params.noise.sigma, session_seed)?;
        grid_mab_estimate(&mut s, &cfg)?
    } else {
        let mut s = QuerySession::new(
            theta,
            params.dim,
            params.input_cap,
            params.budget,
            params.noise,
            session_seed,
        )?;
        estimate(&mut s, &cfg)?
    };
    Ok((trace.final_estimate - truth).abs())
}

/// Monte Carlo `E_theta E |h_hat - ||theta||_inf|` with `theta` drawn from the
/// prior. Trials are seeded independently, so the result does not depend on
/// the thread count.
pub fn empirical_bayes_risk(
    cfg: &EstimatorConfig,
    prior: &FinitePrior,
    params: &SessionParams,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    let losses = (0..trials as u64)
        .into_par_iter()
        .map(|t| one_trial(cfg, prior, params, seed, t))
        .collect::<Result<Vec<_>>>()?;
    let n = trials as f64;
    let mean = losses.iter().sum::<f64>() / n;
    let var = if trials > 1 {
        losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(RiskEstimate {
        mean,
        std_err: (var / n).sqrt(),
        trials,
    })
}

/// Average of the Bayes risks under the two priors, a lower bound on the
/// worst of the two.
pub fn two_point_bayes_risk(
    cfg: &EstimatorConfig,
    prior1: &FinitePrior,
    prior2: &FinitePrior,
    params: &SessionParams,
    trials: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    let a = empirical_bayes_risk(cfg, prior1, params, trials, rng::derive_seed(&[seed, 1]))?;
    let b = empirical_bayes_risk(cfg, prior2, params, trials, rng::derive_seed(&[seed, 2]))?;
    Ok(RiskEstimate {
        mean: 0.5 * (a.mean + b.mean),
        std_err: 0.5 * (a.std_err.powi(2) + b.std_err.powi(2)).sqrt(),
        trials,
    })
}
