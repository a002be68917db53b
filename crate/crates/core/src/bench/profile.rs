use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::suite::{format_sig, RunRecord};
use crate::error::{Error, Result};

/// Slack on `d <= tau` for gaps computed by floating-point subtraction.
const TAU_SLACK: f64 = 1e-12;

/// Fraction of instances on which a method is within `tau` of the best.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub method: String,
    /// `(tau, fraction)` pairs in grid order.
    pub points: Vec<(f64, f64)>,
}

impl ProfileCurve {
    /// Value at the largest grid point not exceeding `tau`; 0 left of the grid.
    pub fn at(&self, tau: f64) -> f64 {
        self.points
            .iter()
            .take_while(|(t, _)| *t <= tau + TAU_SLACK)
            .last()
            .map_or(0.0, |p| p.1)
    }
}

/// `n` evenly spaced points on `[0, max]`.
pub fn tau_grid(max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect(),
    }
}

/// The default grid: 101 points on `[0, 0.5]`.
pub fn default_tau_grid() -> Vec<f64> {
    tau_grid(0.5, 101)
}

/// Performance profiles over instances `(plant_id, noise_id)`.
///
/// With `d_{m,i} = e_{m,i} - min_m' e_{m',i}`, the curve of `m` at `tau` is
/// the fraction of instances with `d_{m,i} <= tau`. Failed runs (NaN error)
/// never count as within `tau`. Every method must cover the same instances.
pub fn performance_profile(records: &[RunRecord], taus: &[f64]) -> Result<Vec<ProfileCurve>> {
    if records.is_empty() {
        return Err(Error::EmptyData("records"));
    }
    let mut table: BTreeMap<&str, BTreeMap<(usize, usize), f64>> = BTreeMap::new();
    for r in records {
        table
            .entry(r.method.as_str())
            .or_default()
            .insert((r.plant_id, r.noise_id), r.rel_error);
    }
    let instances: BTreeSet<(usize, usize)> =
        records.iter().map(|r| (r.plant_id, r.noise_id)).collect();
    let missing: Vec<String> = table
        .iter()
        .flat_map(|(m, rows)| {
            instances
                .iter()
                .filter(|i| !rows.contains_key(i))
                .map(move |(p, n)| format!("{m}@({p},{n})"))
        })
        .collect();
    if !missing.is_empty() {
        return Err(Error::CoverageMismatch { missing });
    }

    let best: BTreeMap<(usize, usize), f64> = instances
        .iter()
        .map(|i| {
            let b = table
                .values()
                .map(|rows| rows[i])
                .filter(|e| !e.is_nan())
                .fold(f64::INFINITY, f64::min);
            (*i, b)
        })
        .collect();
    let n = instances.len() as f64;
    Ok(table
        .iter()
        .map(|(m, rows)| {
            let gaps: Vec<f64> = instances
                .iter()
                .map(|i| {
                    let e = rows[i];
                    if e.is_nan() {
                        f64::INFINITY
                    } else {
                        e - best[i]
                    }
                })
                .collect();
            let points = taus
                .iter()
                .map(|&t| {
                    (
                        t,
                        gaps.iter().filter(|&&d| d <= t + TAU_SLACK).count() as f64 / n,
                    )
                })
                .collect();
            ProfileCurve {
                method: m.to_string(),
                points,
            }
        })
        .collect())
}

/// Plot-ready CSV with columns `method,tau,fraction`.
pub fn write_profile_csv<W: Write>(out: W, curves: &[ProfileCurve]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "tau", "fraction"])?;
    for c in curves {
        for &(t, f) in &c.points {
            w.write_record([c.method.clone(), format_sig(t), format_sig(f)])?;
        }
    }
    w.flush()?;
    Ok(())
}
