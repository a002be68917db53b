//! The budgeted stochastic query model.
//!
//! Estimators receive a `&mut impl QueryOracle` and nothing else: the plant
//! coefficients are unreachable through that surface.

mod frequency;
mod replay;
mod session;

pub use frequency::{sinusoid_response, FreqQuerySession};
pub use replay::ReplayOracle;
pub use session::{read_transcript_jsonl, QuerySession, TranscriptEntry, INPUT_CAP_SLACK};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::signals::{ComplexVec, Field};

/// Output noise. In complex mode the real and imaginary parts each carry
/// independent `N(0, sigma^2)` noise, so `E|eta_i|^2 = 2 sigma^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub field: Field,
}

impl NoiseModel {
    pub fn complex(sigma: f64) -> Self {
        Self {
            sigma,
            field: Field::Complex,
        }
    }

    pub fn real(sigma: f64) -> Self {
        Self {
            sigma,
            field: Field::Real,
        }
    }
}

/// What an estimator may see of a time-domain session.
pub trait QueryOracle {
    /// Input/output data length `L`.
    fn dim(&self) -> usize;
    /// Euclidean cap `M` on each input.
    fn input_cap(&self) -> f64;
    fn used(&self) -> usize;
    fn remaining(&self) -> usize;
    /// Noise level and field, provided as side information.
    fn noise(&self) -> NoiseModel;
    fn query(&mut self, u: &ComplexVec) -> Result<ComplexVec>;
}
