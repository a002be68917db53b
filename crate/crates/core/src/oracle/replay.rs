use super::{NoiseModel, QueryOracle, TranscriptEntry};
use crate::error::{Error, Result};
use crate::signals::ComplexVec;

const REPLAY_MATCH_TOL: f64 = 1e-9;

/// Serves recorded outputs back to an estimator, checking that each input
/// matches the one in the transcript.
#[derive(Debug, Clone)]
pub struct ReplayOracle {
    entries: Vec<TranscriptEntry>,
    dim: usize,
    input_cap: f64,
    noise: NoiseModel,
    used: usize,
}

impl ReplayOracle {
    /// `input_cap` defaults to the largest recorded input norm.
    pub fn new(
        entries: Vec<TranscriptEntry>,
        noise: NoiseModel,
        input_cap: Option<f64>,
    ) -> Result<Self> {
        let first = entries.first().ok_or(Error::EmptyData("transcript"))?;
        let dim = first.u.len();
        for e in &entries {
            if e.u.len() != dim || e.y.len() != dim {
                return Err(Error::Dimension {
                    context: "transcript entry",
                    expected: dim,
                    got: e.u.len().max(e.y.len()),
                });
            }
        }
        let recorded_cap = entries.iter().map(|e| e.u.norm2()).fold(0.0, f64::max);
        let input_cap = input_cap.unwrap_or(recorded_cap);
        Ok(Self {
            entries,
            dim,
            input_cap,
            noise,
            used: 0,
        })
    }
}

impl QueryOracle for ReplayOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn input_cap(&self) -> f64 {
        self.input_cap
    }

    fn used(&self) -> usize {
        self.used
    }

    fn remaining(&self) -> usize {
        self.entries.len() - self.used
    }

    fn noise(&self) -> NoiseModel {
        self.noise
    }

    fn query(&mut self, u: &ComplexVec) -> Result<ComplexVec> {
        let entry = self.entries.get(self.used).ok_or(Error::BudgetExceeded {
            budget: self.entries.len(),
        })?;
        if u.len() != self.dim {
            return Err(Error::Dimension {
                context: "replayed query input",
                expected: self.dim,
                got: u.len(),
            });
        }
        let drift = u
            .iter()
            .zip(entry.u.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if drift > REPLAY_MATCH_TOL * (1.0 + entry.u.norm_inf()) {
            return Err(Error::ReplayDivergence {
                t: self.used,
                reason: format!("input differs from the recording by {drift:e}"),
            });
        }
        self.used += 1;
        Ok(entry.y.clone())
    }
}
