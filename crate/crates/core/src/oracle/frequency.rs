use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng;
use crate::signals::{convolve_truncated, freq_response, ComplexVec, FirFilter};

/// Frequency-domain oracle: query `omega`, observe `H(omega)` plus complex
/// Gaussian noise with per-part standard deviation `sigma`.
#[derive(Debug, Clone)]
pub struct FreqQuerySession {
    plant: FirFilter,
    budget: usize,
    used: usize,
    sigma: f64,
    seed: u64,
}

impl FreqQuerySession {
    pub fn new(plant: FirFilter, budget: usize, sigma: f64, seed: u64) -> Result<Self> {
        if budget == 0 {
            return Err(Error::invalid("budget", "need at least one query"));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("sigma", "must be non-negative and finite"));
        }
        Ok(Self {
            plant,
            budget,
            used: 0,
            sigma,
            seed,
        })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.used
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn query_frequency(&mut self, omega: f64) -> Result<Complex64> {
        if self.used >= self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        if !omega.is_finite() {
            return Err(Error::invalid("omega", "frequency must be finite"));
        }
        let mut stream = rng::stream(&[self.seed, 0x66_7265_71, self.used as u64]);
        self.used += 1;
        Ok(freq_response(&self.plant, omega) + rng::complex_normal(&mut stream, self.sigma))
    }
}

/// Recovers `H(omega)` from a time-domain query on the `2r x 2r` section:
/// a unit-norm complex sinusoid reaches steady state after `r - 1` samples,
/// where `y_n / u_n = H(omega)` exactly.
pub fn sinusoid_response(g: &FirFilter, omega: f64) -> Result<Complex64> {
    let r = g.len();
    let dim = 2 * r;
    let amp = 1.0 / (dim as f64).sqrt();
    let u: Vec<Complex64> = (0..dim)
        .map(|n| Complex64::from_polar(amp, omega * n as f64))
        .collect();
    let u = ComplexVec::new(u)?;
    let y = convolve_truncated(g, &u, dim)?;
    let steady = (r - 1)..dim;
    let count = steady.len() as f64;
    Ok(steady.map(|n| y[n] / u[n]).sum::<Complex64>() / count)
}
