//! Test-side helpers and independent reference computations.
#![allow(dead_code)]

use hinf_core::signals::{CMatrix, ComplexVec, FirFilter};
use hinf_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cnormal(r: &mut ChaCha8Rng, sigma: f64) -> Complex64 {
    let n = rand_distr::StandardNormal;
    Complex64::new(sigma * r.sample::<f64, _>(n), sigma * r.sample::<f64, _>(n))
}

pub fn random_taps(r: &mut ChaCha8Rng, len: usize, complex: bool) -> Vec<Complex64> {
    (0..len)
        .map(|_| {
            let z = cnormal(r, 1.0);
            if complex {
                z
            } else {
                Complex64::new(z.re, 0.0)
            }
        })
        .collect()
}

pub fn random_filter(r: &mut ChaCha8Rng, len: usize, complex: bool) -> FirFilter {
    FirFilter::from_complex(random_taps(r, len, complex)).unwrap()
}

pub fn random_vec(r: &mut ChaCha8Rng, len: usize, complex: bool) -> ComplexVec {
    ComplexVec::new(random_taps(r, len, complex)).unwrap()
}

pub fn scaled_to(v: &ComplexVec, norm: f64) -> ComplexVec {
    v.scaled(Complex64::new(norm / v.norm2(), 0.0))
}

/// `y_i = sum_{k <= i} g_k u_{i-k}` for `i < u.len()`.
pub fn conv(g: &[Complex64], u: &[Complex64]) -> Vec<Complex64> {
    (0..u.len())
        .map(|i| (0..g.len().min(i + 1)).map(|k| g[k] * u[i - k]).sum())
        .collect()
}

/// `|sum_k g_k e^{-i w k}|` by direct summation.
pub fn response_abs(g: &[Complex64], w: f64) -> f64 {
    g.iter()
        .enumerate()
        .map(|(k, c)| c * Complex64::from_polar(1.0, -w * k as f64))
        .sum::<Complex64>()
        .norm()
}

pub fn brute_hinf(g: &[Complex64], points: usize) -> f64 {
    (0..points)
        .map(|k| response_abs(g, std::f64::consts::TAU * k as f64 / points as f64))
        .fold(0.0, f64::max)
}

/// Singular values via one-sided Jacobi on the real `2n x 2n` embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of the complex matrix
/// with every value doubled.
pub fn jacobi_singular_values(m: &CMatrix) -> Vec<f64> {
    let (rows, cols) = m.shape();
    let (n_r, n_c) = (2 * rows, 2 * cols);
    let mut a = vec![vec![0.0f64; n_r]; n_c];
    for i in 0..rows {
        for j in 0..cols {
            let z = m[(i, j)];
            a[j][i] = z.re;
            a[j][i + rows] = z.im;
            a[j + cols][i] = -z.im;
            a[j + cols][i + rows] = z.re;
        }
    }
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n_c {
            for q in p + 1..n_c {
                let alpha: f64 = a[p].iter().map(|x| x * x).sum();
                let beta: f64 = a[q].iter().map(|x| x * x).sum();
                let gamma: f64 = a[p].iter().zip(&a[q]).map(|(x, y)| x * y).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (head, tail) = a.split_at_mut(q);
                for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    (*x, *y) = (c * *x - s * *y, s * *x + c * *y);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv.into_iter().step_by(2).collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
