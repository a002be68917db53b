//! Peak gain `||H(g)||_inf = max_omega |H(omega)|` with a certified error bound.
//!
//! `p(omega) = |H(omega)|^2` is a real trigonometric polynomial of degree
//! `n = r - 1`, so Bernstein's inequality gives `|p''| <= n^2 max p`. At the
//! maximizer `p' = 0`, hence any sample within distance `d` of it satisfies
//! `p >= max p * (1 - n^2 d^2 / 2)`. A coarse grid of `P` points localizes
//! the peak to the bins passing that test; each surviving bin is resampled
//! finely enough that the same inequality certifies `tol`, and the best
//! sample is polished by golden-section search.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dft::eval_taps;
use super::FirFilter;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HinfResult {
    pub value: f64,
    /// Size of the coarse uniform grid on `[0, 2 pi)`.
    pub grid_points: usize,
    pub argmax_freq: f64,
    /// Certified bound on `||H||_inf - value`.
    pub error_bound: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct HinfOptions {
    pub tol: f64,
    /// Coarse grid size; `None` picks `max(4096, next_pow2(64 r))`.
    pub grid_points: Option<usize>,
    /// Cap on fine samples per surviving coarse bin.
    pub max_local_points: usize,
}

impl HinfOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            grid_points: None,
            max_local_points: 1 << 22,
        }
    }
}

pub fn hinf_norm(g: &FirFilter, tol: f64) -> Result<HinfResult> {
    hinf_norm_with(g, &HinfOptions::with_tol(tol))
}

pub fn hinf_norm_with(g: &FirFilter, opts: &HinfOptions) -> Result<HinfResult> {
    let tol = opts.tol;
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::invalid(
            "tol",
            "tolerance must be positive and finite",
        ));
    }
    let taps = g.taps();
    let r = taps.len();
    let n = (r - 1) as f64;
    let grid = match opts.grid_points {
        Some(p) if p < 2 * r + 1 => {
            return Err(Error::invalid(
                "grid_points",
                format!("need at least {} grid points for {r} taps", 2 * r + 1),
            ))
        }
        Some(p) => p,
        None => (64 * r).next_power_of_two().max(4096),
    };

    if r == 1 {
        return Ok(HinfResult {
            value: taps[0].norm(),
            grid_points: grid,
            argmax_freq: 0.0,
            error_bound: 0.0,
        });
    }

    let rounding = 64.0 * f64::EPSILON * g.coeffs().norm1();
    if tol < rounding {
        return Err(Error::ToleranceUnreachable {
            requested: tol,
            achievable: rounding,
        });
    }

    // Real taps give |H(-w)| = |H(w)|, so half the circle suffices.
    let upper_index = if g.is_real() { grid / 2 } else { grid - 1 };
    let power: Vec<f64> = (0..=upper_index)
        .map(|k| eval_taps(taps, TAU * k as f64 / grid as f64).norm_sqr())
        .collect();
    let (best_k, grid_max2) = power
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (k, p)| if p > acc.1 { (k, p) } else { acc });

    if grid_max2 == 0.0 {
        // p vanishes on more than 2n + 1 points, so it is identically zero.
        return Ok(HinfResult {
            value: 0.0,
            grid_points: grid,
            argmax_freq: 0.0,
            error_bound: 0.0,
        });
    }

    let half_spacing = PI / grid as f64;
    let coarse_slack = 1.0 - n * n * half_spacing * half_spacing / 2.0;
    let peak_upper = (grid_max2 / coarse_slack).sqrt();

    // Fine spacing h certifies tol: sqrt(p_max) * ((1 - n^2 h^2 / 8)^{-1/2} - 1) <= tol.
    let q = tol / peak_upper;
    let h_target = (8.0 * (1.0 - (1.0 + q).powi(-2))).sqrt() / n;
    let width = 2.0 * half_spacing;
    let steps = (width / h_target).ceil().max(1.0);
    if steps > opts.max_local_points as f64 {
        let h = width / opts.max_local_points as f64;
        let achievable = peak_upper * ((1.0 - n * n * h * h / 8.0).powf(-0.5) - 1.0);
        return Err(Error::ToleranceUnreachable {
            requested: tol,
            achievable,
        });
    }
    let steps = steps as usize;
    let h = width / steps as f64;
    let fine_slack = 1.0 - n * n * h * h / 8.0;

    let mut best = (grid_max2, TAU * best_k as f64 / grid as f64);
    let mut certified2 = 0.0_f64;
    for (k, &p) in power.iter().enumerate() {
        if p < grid_max2 * coarse_slack {
            continue;
        }
        let lo = TAU * k as f64 / grid as f64 - half_spacing;
        let mut local_max = p;
        for s in 0..=steps {
            let w = lo + s as f64 * h;
            let v = eval_taps(taps, w).norm_sqr();
            if v > local_max {
                local_max = v;
            }
            if v > best.0 {
                best = (v, w);
            }
        }
        certified2 = certified2.max(local_max / fine_slack);
    }

    let (polished_w, polished_v) =
        golden_section_max(|w| eval_taps(taps, w).norm(), best.1 - h, best.1 + h);
    let (value, argmax) = if polished_v > best.0.sqrt() {
        (polished_v, polished_w)
    } else {
        (best.0.sqrt(), best.1)
    };
    let error_bound = (certified2.sqrt() - value).max(0.0);

    Ok(HinfResult {
        value,
        grid_points: grid,
        argmax_freq: argmax.rem_euclid(TAU),
        error_bound,
    })
}

/// Maximizes `f` on `[lo, hi]`; returns `(argmax, max)`.
pub(crate) fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximum of `|H|` over the uniform grid `2 pi k / P`, with its frequency.
pub fn grid_max(g: &FirFilter, points: usize) -> (f64, f64) {
    (0..points)
        .map(|k| {
            let w = TAU * k as f64 / points as f64;
            (freq_abs(g.taps(), w), w)
        })
        .fold((0.0, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc })
}

/// Sup-norm error of nearest-grid-point reconstruction of `|H|` on a
/// `P`-point grid, measured at the bin midpoints where it peaks. Scales as
/// `O(r / P)` with constant `pi * max |d|H|/d omega| / r`.
pub fn grid_sup_gap(g: &FirFilter, points: usize) -> f64 {
    let taps = g.taps();
    let step = TAU / points as f64;
    let nodes: Vec<f64> = (0..points)
        .map(|k| freq_abs(taps, k as f64 * step))
        .collect();
    (0..points)
        .map(|k| {
            let mid = freq_abs(taps, (k as f64 + 0.5) * step);
            let left = nodes[k];
            let right = nodes[(k + 1) % points];
            (mid - left).abs().min((mid - right).abs())
        })
        .fold(0.0, f64::max)
}

fn freq_abs(taps: &[Complex64], w: f64) -> f64 {
    eval_taps(taps, w).norm()
}
