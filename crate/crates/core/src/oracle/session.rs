use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{NoiseModel, QueryOracle};
use crate::error::{Error, Result};
use crate::rng;
use crate::signals::{convolve_truncated, ComplexVec, Field, FirFilter};

/// Relative slack on the input-norm cap, for unit inputs built in floating point.
pub const INPUT_CAP_SLACK: f64 = 1e-12;

/// One accepted query, as exported for audit and replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub t: usize,
    pub u: ComplexVec,
    pub y: ComplexVec,
}

/// Budgeted oracle for `y = T(g) u + noise`.
///
/// The plant is private and there is no accessor for it; estimators only see
/// the [`QueryOracle`] surface.
///
/// ```compile_fail
/// use hinf_core::oracle::{NoiseModel, QuerySession};
/// use hinf_core::signals::FirFilter;
/// let g = FirFilter::from_real(&[1.0]).unwrap();
/// let s = QuerySession::new(g, 1, 1.0, 1, NoiseModel::complex(0.0), 0).unwrap();
/// let _peek = s.plant;
/// ```
#[derive(Debug, Clone)]
pub struct QuerySession {
    plant: FirFilter,
    dim: usize,
    input_cap: f64,
    budget: usize,
    used: usize,
    noise: NoiseModel,
    seed: u64,
    transcript: Vec<TranscriptEntry>,
}

impl QuerySession {
    pub fn new(
        plant: FirFilter,
        dim: usize,
        input_cap: f64,
        budget: usize,
        noise: NoiseModel,
        seed: u64,
    ) -> Result<Self> {
        if dim < plant.len() {
            return Err(Error::invalid(
                "dim",
                format!("data length {dim} is shorter than the {} taps", plant.len()),
            ));
        }
        if !(input_cap > 0.0) || !input_cap.is_finite() {
            return Err(Error::invalid("input_cap", "must be positive and finite"));
        }
        if budget == 0 {
            return Err(Error::invalid("budget", "need at least one query"));
        }
        if !(noise.sigma >= 0.0) || !noise.sigma.is_finite() {
            return Err(Error::invalid("sigma", "must be non-negative and finite"));
        }
        if noise.field == Field::Real && !plant.is_real() {
            return Err(Error::invalid(
                "plant",
                "real-valued session needs real taps",
            ));
        }
        Ok(Self {
            plant,
            dim,
            input_cap,
            budget,
            used: 0,
            noise,
            seed,
            transcript: Vec::new(),
        })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    /// `M / sigma`; infinite for a noiseless session.
    pub fn snr(&self) -> f64 {
        if self.noise.sigma > 0.0 {
            self.input_cap / self.noise.sigma
        } else {
            f64::INFINITY
        }
    }

    /// Writes the transcript as JSON lines, one `{t, u, y}` record per query.
    pub fn write_transcript_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for entry in &self.transcript {
            serde_json::to_writer(&mut out, entry)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    fn draw_noise(&self, t: usize) -> Vec<Complex64> {
        let mut stream = rng::stream(&[self.seed, t as u64]);
        let sigma = self.noise.sigma;
        (0..self.dim)
            .map(|_| match self.noise.field {
                Field::Complex => rng::complex_normal(&mut stream, sigma),
                Field::Real => Complex64::new(rng::real_normal(&mut stream, sigma), 0.0),
            })
            .collect()
    }
}

impl QueryOracle for QuerySession {
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
        self.budget - self.used
    }

    fn noise(&self) -> NoiseModel {
        self.noise
    }

    fn query(&mut self, u: &ComplexVec) -> Result<ComplexVec> {
        if self.used >= self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        if u.len() != self.dim {
            return Err(Error::Dimension {
                context: "query input",
                expected: self.dim,
                got: u.len(),
            });
        }
        let norm = u.norm2();
        if norm > self.input_cap * (1.0 + INPUT_CAP_SLACK) {
            return Err(Error::InputTooLarge {
                norm,
                cap: self.input_cap,
            });
        }
        if self.noise.field == Field::Real && !u.is_real() {
            return Err(Error::ComplexInput);
        }

        let t = self.used;
        let mean = convolve_truncated(&self.plant, u, self.dim)?;
        let y: Vec<Complex64> = mean
            .iter()
            .zip(self.draw_noise(t))
            .map(|(m, e)| m + e)
            .collect();
        let y = ComplexVec::new(y)?;
        self.used += 1;
        self.transcript.push(TranscriptEntry {
            t,
            u: u.clone(),
            y: y.clone(),
        });
        Ok(y)
    }
}

/// Parses a JSON-lines transcript written by [`QuerySession::write_transcript_jsonl`].
pub fn read_transcript_jsonl<R: BufRead>(input: R) -> Result<Vec<TranscriptEntry>> {
    let mut entries = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        entries.push(serde_json::from_str(&line)?);
    }
    Ok(entries)
}
