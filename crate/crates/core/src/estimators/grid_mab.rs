use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use super::{EstimateTrace, EstimatorConfig, Method};
use crate::error::{Error, Result};
use crate::oracle::FreqQuerySession;
use crate::rng;

/// MOSS index: `mean + sqrt(max(0, ln(horizon / (arms * pulls))) / pulls)`.
pub fn moss_index(mean: f64, pulls: usize, horizon: usize, arms: usize) -> f64 {
    let n = pulls.max(1) as f64;
    let log_term = (horizon as f64 / (arms as f64 * n)).ln().max(0.0);
    mean + (log_term / n).sqrt()
}

#[derive(Clone, Debug)]
pub struct GridMabOutcome {
    pub trace: EstimateTrace,
    /// Phase-1 pull counts per arm; they sum to `N/2`.
    pub pulls: Vec<usize>,
    pub chosen_arm: usize,
}

#[derive(Clone, Copy, Default)]
struct ArmStats {
    pulls: usize,
    sum: Complex64,
}

impl ArmStats {
    fn mean_reward(&self, known_phase: Option<f64>) -> f64 {
        let avg = self.sum / self.pulls.max(1) as f64;
        match known_phase {
            Some(phi) => (Complex64::from_polar(1.0, -phi) * avg).re,
            None => avg.norm(),
        }
    }
}

pub fn grid_mab_estimate(
    session: &mut FreqQuerySession,
    cfg: &EstimatorConfig,
) -> Result<EstimateTrace> {
    grid_mab_run(session, cfg).map(|o| o.trace)
}

/// Three phases over the grid `2 pi k / K`: MOSS for `N/2` rounds, draw an arm
/// with probability proportional to its pull count, then spend the other
/// `N/2` queries on that arm and return the magnitude of their mean.
pub fn grid_mab_run(
    session: &mut FreqQuerySession,
    cfg: &EstimatorConfig,
) -> Result<GridMabOutcome> {
    let arms = cfg
        .grid_arms
        .ok_or_else(|| Error::invalid("grid_arms", "grid bandit needs an arm count"))?;
    let budget = session.remaining();
    if arms == 0 || budget < 2 * arms || !budget.is_multiple_of(2) {
        return Err(Error::invalid(
            "budget",
            format!(
                "need an even budget of at least {} for {arms} arms, got {budget}",
                2 * arms
            ),
        ));
    }
    let half = budget / 2;
    let freq = |k: usize| TAU * k as f64 / arms as f64;
    // MOSS assumes unit-scale noise; rewards are measured in units of sigma.
    let scale = if session.sigma() > 0.0 {
        session.sigma()
    } else {
        1.0
    };

    let mut stats = vec![ArmStats::default(); arms];
    for t in 0..half {
        let arm = if t < arms {
            t
        } else {
            (0..arms)
                .map(|k| {
                    let mean = stats[k].mean_reward(cfg.known_phase) / scale;
                    (k, moss_index(mean, stats[k].pulls, half, arms))
                })
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, x| if x.1 > acc.1 { x } else { acc },
                )
                .0
        };
        let y = session.query_frequency(freq(arm))?;
        stats[arm].pulls += 1;
        stats[arm].sum += y;
    }

    let pulls: Vec<usize> = stats.iter().map(|s| s.pulls).collect();
    let mut pick = rng::stream(&[cfg.seed, 0x6172_6d]);
    let mut ticket = pick.gen_range(0..half);
    let chosen_arm = pulls
        .iter()
        .position(|&p| {
            if ticket < p {
                true
            } else {
                ticket -= p;
                false
            }
        })
        .unwrap_or(arms - 1);

    let mut sum = Complex64::new(0.0, 0.0);
    let mut running = Vec::with_capacity(half);
    for i in 0..half {
        sum += session.query_frequency(freq(chosen_arm))?;
        running.push((sum / (i + 1) as f64).norm());
    }

    let trace = EstimateTrace::from_rounds(
        Method::GridMab,
        running,
        budget,
        vec![format!("arm:{chosen_arm}")],
    )?;
    Ok(GridMabOutcome {
        trace,
        pulls,
        chosen_arm,
    })
}
