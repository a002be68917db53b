//! Norm estimators that interact with the plant only through a query oracle.

mod grid_mab;
mod plugin;
mod power;
mod sector;
mod wts;

pub use grid_mab::{grid_mab_estimate, grid_mab_run, moss_index, GridMabOutcome};
pub use plugin::{least_squares_fir, plugin_estimate, LeastSquaresFit};
pub use power::{power_method_a, power_method_b};
pub use sector::{sector_test, SectorVerdict};
pub use wts::{
    bin_posterior, power_profile_to_input, wts_estimate, wts_run, PhaseRule, WtsOutcome,
};

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::QueryOracle;
use crate::rng;
use crate::signals::{ComplexVec, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Plugin,
    PowerA,
    PowerB,
    Wts,
    GridMab,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Plugin => "plugin",
            Method::PowerA => "power_a",
            Method::PowerB => "power_b",
            Method::Wts => "wts",
            Method::GridMab => "grid_mab",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        [
            Method::Plugin,
            Method::PowerA,
            Method::PowerB,
            Method::Wts,
            Method::GridMab,
        ]
        .into_iter()
        .find(|m| m.name() == name)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inputs used by the plugin estimator. All are scaled to norm `M` except
/// `Custom`, which is used verbatim (cycled if shorter than the budget).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSchedule {
    /// `M e_1` every round.
    Impulse,
    /// Independent uniform draws from the sphere of radius `M`.
    #[default]
    UnitRandom,
    Custom(Vec<ComplexVec>),
}

fn default_prior_std() -> f64 {
    1.0
}

fn default_posterior_samples() -> usize {
    32
}

fn default_hinf_tol() -> f64 {
    1e-9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub variant: Method,
    /// Label used in records; defaults to the variant name.
    #[serde(default)]
    pub name: Option<String>,
    /// Plugin fit order `m`; defaults to the data length.
    #[serde(default)]
    pub model_order: Option<usize>,
    /// WTS bin count `K`; defaults to `floor(L/2) + 1` (real) or `L` (complex).
    #[serde(default)]
    pub bins: Option<usize>,
    /// WTS cyclic prefix length `c`: the input repeats its last `c` samples
    /// up front and the first `c` outputs are dropped, so the remaining
    /// `L - c` samples are in steady state when `c >= r - 1`. `None` uses the
    /// full window and absorbs the start-up transient into the estimate.
    #[serde(default)]
    pub cyclic_prefix: Option<usize>,
    /// WTS prior standard deviation `lambda`.
    #[serde(default = "default_prior_std")]
    pub prior_std: f64,
    /// WTS posterior draws per round.
    #[serde(default = "default_posterior_samples")]
    pub posterior_samples: usize,
    /// Grid bandit arm count.
    #[serde(default)]
    pub grid_arms: Option<usize>,
    #[serde(default)]
    pub input_schedule: InputSchedule,
    /// WTS: random rather than zero DFT phases.
    #[serde(default)]
    pub random_phases: bool,
    /// Grid bandit: phase of the peak response when known a priori.
    #[serde(default)]
    pub known_phase: Option<f64>,
    /// Seed for the estimator's own randomness.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_hinf_tol")]
    pub hinf_tol: f64,
}

impl EstimatorConfig {
    pub fn new(variant: Method) -> Self {
        Self {
            variant,
            name: None,
            model_order: None,
            bins: None,
            cyclic_prefix: None,
            prior_std: default_prior_std(),
            posterior_samples: default_posterior_samples(),
            grid_arms: None,
            input_schedule: InputSchedule::default(),
            random_phases: false,
            known_phase: None,
            seed: 0,
            hinf_tol: default_hinf_tol(),
        }
    }

    pub fn plugin(model_order: usize) -> Self {
        Self {
            model_order: Some(model_order),
            ..Self::new(Method::Plugin)
        }
    }

    pub fn power_a() -> Self {
        Self::new(Method::PowerA)
    }

    pub fn power_b() -> Self {
        Self::new(Method::PowerB)
    }

    pub fn wts() -> Self {
        Self::new(Method::Wts)
    }

    pub fn grid_mab(arms: usize) -> Self {
        Self {
            grid_arms: Some(arms),
            ..Self::new(Method::GridMab)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_schedule(mut self, schedule: InputSchedule) -> Self {
        self.input_schedule = schedule;
        self
    }

    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.variant.name().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if self.model_order == Some(0) {
            return Err(Error::invalid("model_order", "must be at least 1"));
        }
        if self.bins == Some(0) {
            return Err(Error::invalid("bins", "must be at least 1"));
        }
        if !(self.prior_std > 0.0) {
            return Err(Error::invalid("prior_std", "must be positive"));
        }
        if self.posterior_samples == 0 {
            return Err(Error::invalid("posterior_samples", "must be at least 1"));
        }
        if self.grid_arms == Some(0) {
            return Err(Error::invalid("grid_arms", "must be at least 1"));
        }
        if !(self.hinf_tol > 0.0) {
            return Err(Error::invalid("hinf_tol", "must be positive"));
        }
        Ok(())
    }
}

/// Estimates produced over a run; `final_estimate` is the last entry of
/// `per_round`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateTrace {
    pub variant: Method,
    #[serde(rename = "final")]
    pub final_estimate: f64,
    pub per_round: Vec<f64>,
    pub queries_used: usize,
    pub flags: Vec<String>,
}

impl EstimateTrace {
    fn from_rounds(
        variant: Method,
        per_round: Vec<f64>,
        queries_used: usize,
        flags: Vec<String>,
    ) -> Result<Self> {
        let final_estimate = *per_round
            .last()
            .ok_or(Error::EmptyData("no estimate was produced"))?;
        Ok(Self {
            variant,
            final_estimate,
            per_round,
            queries_used,
            flags,
        })
    }
}

/// Runs a time-domain estimator over the oracle's remaining budget.
pub fn estimate<O: QueryOracle + ?Sized>(
    oracle: &mut O,
    cfg: &EstimatorConfig,
) -> Result<EstimateTrace> {
    cfg.validate()?;
    match cfg.variant {
        Method::Plugin => plugin_estimate(oracle, cfg),
        Method::PowerA => power_method_a(oracle, cfg),
        Method::PowerB => power_method_b(oracle, cfg),
        Method::Wts => wts_estimate(oracle, cfg),
        Method::GridMab => Err(Error::invalid(
            "variant",
            "grid_mab queries frequencies; use grid_mab_estimate with a FreqQuerySession",
        )),
    }
}

/// Uniform draw from the unit sphere in `C^dim` (or `R^dim` in real mode).
pub(crate) fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize, field: Field) -> ComplexVec {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| match field {
                Field::Complex => rng::complex_normal(rng, 1.0),
                Field::Real => Complex64::new(rng::real_normal(rng, 1.0), 0.0),
            })
            .collect();
        if let Some(u) = ComplexVec::from_vec_unchecked(v).normalized() {
            return u;
        }
    }
}

pub(crate) fn scale(v: &ComplexVec, alpha: f64) -> ComplexVec {
    v.scaled(Complex64::new(alpha, 0.0))
}
