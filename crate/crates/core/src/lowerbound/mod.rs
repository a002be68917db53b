//! Numerical counterparts of the two-prior (Le Cam) lower-bound arguments:
//! hard priors, divergences between the induced output laws, and risk
//! certificates that concrete estimators can be checked against.

mod divergence;
mod lecam;
mod priors;

pub use divergence::{
    chi_sq_mixture, estimate_tv_mc, g_kernel, kl_active_closed_form, kl_mixture_upper,
    log_g_kernel, KlMixtureReport, McEstimate,
};
pub use lecam::{
    active_certificate, active_kl_bound, active_pinsker_tau, empirical_bayes_risk,
    le_cam_certificate, passive_sample_requirement, passive_tau, two_point_bayes_risk,
    LeCamCertificate, RiskEstimate, SessionParams,
};
pub use priors::{
    active_hard_prior, admissible_index_set, passive_hard_prior, psd_inv_sqrt, psd_sqrt,
    session_covariance, CovarianceReport, IndexSet, InputDistribution,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signals::{hinf_norm, FirFilter};

/// Tolerance used when evaluating member norms for separations.
pub(crate) const MEMBER_HINF_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PriorKind {
    Custom,
    /// `{tau F^{-1} e_i : i = 1..r}`.
    ActiveHard {
        tau: f64,
    },
    /// `{tau Sigma^{-1/2} F^{-1} e_i : i in I}`.
    PassiveHard {
        tau: f64,
        input_cap: f64,
    },
}

/// Uniform distribution over a finite set of filters of equal length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinitePrior {
    support: Vec<FirFilter>,
    kind: PriorKind,
}

impl FinitePrior {
    pub fn new(support: Vec<FirFilter>) -> Result<Self> {
        Self::with_kind(support, PriorKind::Custom)
    }

    pub(crate) fn with_kind(support: Vec<FirFilter>, kind: PriorKind) -> Result<Self> {
        let first = support
            .first()
            .ok_or(Error::EmptyData("prior support"))?
            .len();
        if let Some(bad) = support.iter().find(|g| g.len() != first) {
            return Err(Error::Dimension {
                context: "prior support member",
                expected: first,
                got: bad.len(),
            });
        }
        Ok(Self { support, kind })
    }

    /// The point mass at the zero filter of length `r`.
    pub fn zero(r: usize) -> Result<Self> {
        Self::new(vec![FirFilter::from_real(&vec![0.0; r])?])
    }

    pub fn support(&self) -> &[FirFilter] {
        &self.support
    }

    pub fn kind(&self) -> PriorKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Filter length shared by all members.
    pub fn taps(&self) -> usize {
        self.support[0].len()
    }

    pub fn member_norms(&self) -> Result<Vec<f64>> {
        self.support
            .iter()
            .map(|g| hinf_norm(g, MEMBER_HINF_TOL).map(|h| h.value))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceMethod {
    ClosedForm,
    Enumeration,
    MonteCarlo,
}

/// KL and/or chi-square divergence with the total-variation bound they imply:
/// `TV <= sqrt(KL / 2)` and `TV <= sqrt(chi^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub kl: Option<f64>,
    pub chi_sq: Option<f64>,
    pub tv_upper: f64,
    pub method: DivergenceMethod,
    pub mc_std_err: Option<f64>,
}

impl DivergenceReport {
    pub fn new(
        kl: Option<f64>,
        chi_sq: Option<f64>,
        method: DivergenceMethod,
        mc_std_err: Option<f64>,
    ) -> Self {
        let from_kl = kl.map(|k| (k.max(0.0) / 2.0).sqrt());
        let from_chi = chi_sq.map(|c| c.max(0.0).sqrt());
        let tv_upper = [from_kl, from_chi]
            .into_iter()
            .flatten()
            .fold(1.0, f64::min);
        Self {
            kl,
            chi_sq,
            tv_upper,
            method,
            mc_std_err,
        }
    }
}
