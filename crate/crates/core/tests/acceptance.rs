//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the report is always printed; exits non-zero on any failure.

use std::f64::consts::TAU;
use std::time::Instant;

use hinf_core::bench::{
    performance_profile, run_suite, write_records_csv, ProfileCurve, SuiteConfig,
};
use hinf_core::estimators::{estimate, grid_mab_estimate, EstimatorConfig};
use hinf_core::lowerbound::{
    active_certificate, active_hard_prior, chi_sq_mixture, estimate_tv_mc, kl_active_closed_form,
    kl_mixture_upper, two_point_bayes_risk, FinitePrior, SessionParams,
};
use hinf_core::oracle::{FreqQuerySession, NoiseModel, QuerySession};
use hinf_core::signals::{
    dft_matrix, dft_norm_lower_bound, grid_sup_gap, hinf_norm, operator_norm, toeplitz_matrix,
    CMatrix, ComplexVec, FirFilter,
};
use hinf_core::{bench::random_plant, bench::PlantSpec, Complex64};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cnormal(r: &mut ChaCha8Rng, sigma: f64) -> Complex64 {
    let n = rand_distr::StandardNormal;
    Complex64::new(sigma * r.sample::<f64, _>(n), sigma * r.sample::<f64, _>(n))
}

fn random_filter(r: &mut ChaCha8Rng, len: usize, complex: bool) -> FirFilter {
    let taps = (0..len)
        .map(|_| {
            let z = cnormal(r, 1.0);
            if complex {
                z
            } else {
                Complex64::new(z.re, 0.0)
            }
        })
        .collect();
    FirFilter::from_complex(taps).unwrap()
}

fn random_vec(r: &mut ChaCha8Rng, len: usize) -> ComplexVec {
    ComplexVec::new((0..len).map(|_| cnormal(r, 1.0)).collect()).unwrap()
}

fn unit_vec(r: &mut ChaCha8Rng, len: usize, norm: f64) -> ComplexVec {
    let v = random_vec(r, len);
    let s = norm / v.norm2();
    v.scaled(Complex64::new(s, 0.0))
}

/// Direct truncated convolution, independent of the library kernel.
fn conv(g: &[Complex64], u: &[Complex64]) -> Vec<Complex64> {
    (0..u.len())
        .map(|i| (0..g.len().min(i + 1)).map(|k| g[k] * u[i - k]).sum())
        .collect()
}

fn max_abs<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<Complex64, R, C>>(
    m: &nalgebra::Matrix<Complex64, R, C, S>,
) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// 1. Exact identities.
fn identities() -> Outcome {
    let mut worst_diag = 0.0f64;
    for r in [2usize, 4, 8, 16, 32] {
        let f = dft_matrix(r).unwrap();
        let mut acc = CMatrix::zeros(r, r);
        for i in 0..r {
            let t = toeplitz_matrix(&FirFilter::new(f.inverse_column(i)).unwrap(), r).unwrap();
            acc += t.adjoint() * t;
        }
        let want = CMatrix::from_diagonal(&DVector::from_fn(r, |a, _| {
            Complex64::new((r - a) as f64 / r as f64, 0.0)
        }));
        worst_diag = worst_diag.max(max_abs(&(acc - want)));
        let fd = f.to_dense();
        let ffh = &fd * fd.adjoint() - CMatrix::identity(r, r) * Complex64::new(r as f64, 0.0);
        if max_abs(&ffh) > 1e-10 * r as f64 {
            return Err(format!("F F* != rI at r={r}: {:e}", max_abs(&ffh)));
        }
    }
    let mut g = rng(11);
    let mut comm = 0.0f64;
    for _ in 0..200 {
        let n = g.gen_range(1..=20);
        let (u, v) = (random_vec(&mut g, n), random_vec(&mut g, n));
        let tu = toeplitz_matrix(&FirFilter::new(u.clone()).unwrap(), n).unwrap();
        let tv = toeplitz_matrix(&FirFilter::new(v.clone()).unwrap(), n).unwrap();
        let a = tu * DVector::from_column_slice(v.as_slice());
        let b = tv * DVector::from_column_slice(u.as_slice());
        comm = comm.max(max_abs(&(a - b)));
    }
    let mut violations = 0;
    for _ in 0..200 {
        let n = g.gen_range(1..=24);
        let complex = g.gen_bool(0.5);
        let f = random_filter(&mut g, n, complex);
        let h = hinf_norm(&f, 1e-10).unwrap().value;
        if h < dft_norm_lower_bound(&f) - 1e-12 * f.coeffs().norm1() {
            violations += 1;
        }
    }
    check(
        worst_diag <= 1e-10 && comm <= 1e-10 && violations == 0,
        format!("diag err {worst_diag:.1e}, commutation err {comm:.1e}, DFT-bound violations {violations}"),
    )
}

// 2. Certified norm against a 10^6-point sweep, and grid discretization error.
fn hinf_oracle() -> Outcome {
    let mut g = rng(22);
    let filters: Vec<FirFilter> = (0..50)
        .map(|i| {
            let n = g.gen_range(1..=12);
            random_filter(&mut g, n, i % 2 == 1)
        })
        .collect();
    let sweep = 1_000_000usize;
    let worst = filters
        .par_iter()
        .map(|f| {
            let brute = (0..sweep)
                .map(|j| {
                    let w = TAU * j as f64 / sweep as f64;
                    f.taps()
                        .iter()
                        .enumerate()
                        .map(|(k, c)| c * Complex64::from_polar(1.0, -w * k as f64))
                        .sum::<Complex64>()
                        .norm()
                })
                .fold(0.0, f64::max);
            (hinf_norm(f, 1e-10).unwrap().value - brute).abs()
        })
        .reduce(|| 0.0, f64::max);

    let gap_filters: Vec<FirFilter> = (0..10).map(|_| random_filter(&mut g, 8, true)).collect();
    let consts: Vec<f64> = [512usize, 1024, 2048, 4096, 8192]
        .iter()
        .map(|&p| {
            let worst_gap = gap_filters
                .iter()
                .map(|f| grid_sup_gap(f, p) / f.coeffs().norm1())
                .fold(0.0, f64::max);
            worst_gap * p as f64 / 8.0
        })
        .collect();
    let stable = consts.windows(2).all(|w| (w[1] / w[0] - 1.0).abs() <= 0.2);
    check(
        worst <= 1e-8 && stable,
        format!("max |hinf - sweep| {worst:.1e}; fitted C per doubling {consts:.4?}"),
    )
}

// 3. Closed-form KL and enumerated chi-square against Monte Carlo.
fn divergence_mc() -> Outcome {
    let mut g = rng(33);
    let samples = 100_000usize;
    let mut worst_z = 0.0f64;
    for inst in 0..10 {
        let r = g.gen_range(1..=4);
        let n = g.gen_range(1..=8);
        let dim = r + g.gen_range(0..=2);
        let sigma = 1.0;
        let inputs: Vec<ComplexVec> = (0..n).map(|_| unit_vec(&mut g, dim, 1.0)).collect();
        let k = g.gen_range(1..=4);
        let scale = 0.8 / (n as f64).sqrt();
        let members: Vec<FirFilter> = (0..k)
            .map(|_| {
                let f = random_filter(&mut g, r, true);
                let s = scale / f.coeffs().norm2();
                f.scaled(Complex64::new(s, 0.0))
            })
            .collect();
        let means: Vec<Vec<Complex64>> = members
            .iter()
            .map(|m| {
                inputs
                    .iter()
                    .flat_map(|u| conv(m.taps(), u.as_slice()))
                    .collect()
            })
            .collect();

        // KL(P_theta || P_0) = E_theta[log p_theta / p_0].
        let mu = &means[0];
        let mut mc = rng(1000 + inst);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..samples {
            let mut llr = 0.0;
            for m in mu {
                let x = m + cnormal(&mut mc, sigma);
                llr += (x.norm_sqr() - (x - m).norm_sqr()) / (2.0 * sigma * sigma);
            }
            s1 += llr;
            s2 += llr * llr;
        }
        let ns = samples as f64;
        let (mean, se) = (s1 / ns, ((s2 / ns - (s1 / ns).powi(2)) / ns).sqrt());
        let kl = kl_active_closed_form(&inputs, &members[0], sigma).unwrap();
        worst_z = worst_z.max((kl - mean).abs() / se);

        // chi^2 = E_0[(d mix / d P_0)^2] - 1.
        let prior = FinitePrior::new(members.clone()).unwrap();
        let chi = chi_sq_mixture(&inputs, &prior, sigma)
            .unwrap()
            .chi_sq
            .unwrap();
        let (mut c1, mut c2) = (0.0, 0.0);
        for _ in 0..samples {
            let x: Vec<Complex64> = (0..mu.len()).map(|_| cnormal(&mut mc, sigma)).collect();
            let lr = means
                .iter()
                .map(|m| {
                    let e: f64 = x
                        .iter()
                        .zip(m)
                        .map(|(a, b)| 2.0 * (b.conj() * a).re - b.norm_sqr())
                        .sum();
                    (e / (2.0 * sigma * sigma)).exp()
                })
                .sum::<f64>()
                / k as f64;
            let v = lr * lr;
            c1 += v;
            c2 += v * v;
        }
        let (cm, cse) = (c1 / ns - 1.0, ((c2 / ns - (c1 / ns).powi(2)) / ns).sqrt());
        worst_z = worst_z.max((chi - cm).abs() / cse);
    }
    check(
        worst_z <= 4.0,
        format!("worst deviation {worst_z:.2} standard errors over 10 instances"),
    )
}

// 4. Le Cam certificate, end to end.
fn le_cam() -> Outcome {
    let (r, n, sigma, m) = (8usize, 128usize, 1.0, 1.0);
    let cert = active_certificate(r, n, sigma, m).unwrap();
    let tau = (sigma / m) * (r as f64 / n as f64).sqrt();
    let bound = tau * tau * n as f64 * m * m / (2.0 * sigma * sigma * r as f64);
    let mut g = rng(44);
    let inputs: Vec<ComplexVec> = (0..n).map(|_| unit_vec(&mut g, r, m)).collect();
    let prior = active_hard_prior(r, tau).unwrap();
    let kl = kl_mixture_upper(&inputs, &prior, sigma, m)
        .unwrap()
        .report
        .kl
        .unwrap();
    let tv = estimate_tv_mc(
        &FinitePrior::zero(r).unwrap(),
        &prior,
        &inputs,
        sigma,
        20_000,
        7,
    )
    .unwrap();
    let params = SessionParams {
        dim: r,
        input_cap: m,
        budget: n,
        noise: NoiseModel::complex(sigma),
    };
    let risk = two_point_bayes_risk(
        &EstimatorConfig::plugin(r),
        &FinitePrior::zero(r).unwrap(),
        &prior,
        &params,
        400,
        8,
    )
    .unwrap();
    check(
        (tau - 0.25).abs() < 1e-15
            && (bound - 0.5).abs() < 1e-15
            && kl <= bound + 1e-10
            && tv.value <= 0.5 + 3.0 * tv.std_err
            && risk.mean >= cert.risk_lower - 2.0 * risk.std_err,
        format!(
            "KL {kl:.4} <= {bound}; TV {:.4} +/- {:.4}; plugin Bayes risk {:.4} +/- {:.4} vs certified {:.5}",
            tv.value, tv.std_err, risk.mean, risk.std_err, cert.risk_lower
        ),
    )
}

// 5. Noiseless estimator sanity.
fn estimator_sanity() -> Outcome {
    let dim = 16;
    let mut plugin_err = 0.0f64;
    let mut power_err = [0.0f64; 2];
    let mut iters = [0usize; 2];
    for p in 0..20u64 {
        let plant = random_plant(&PlantSpec {
            r: 10,
            decay: 1.0,
            seed: 500 + p,
        })
        .unwrap();
        let truth = hinf_norm(&plant, 1e-12).unwrap().value;
        let mut s =
            QuerySession::new(plant.clone(), dim, 1.0, 4, NoiseModel::real(0.0), p).unwrap();
        let est = estimate(&mut s, &EstimatorConfig::plugin(10).with_seed(p)).unwrap();
        plugin_err = plugin_err.max((est.final_estimate - truth).abs());

        let target = operator_norm(&toeplitz_matrix(&plant, dim).unwrap()).unwrap();
        for (i, (cfg, budget)) in [
            (EstimatorConfig::power_a(), 100),
            (EstimatorConfig::power_b(), 200),
        ]
        .into_iter()
        .enumerate()
        {
            let mut s =
                QuerySession::new(plant.clone(), dim, 1.0, budget, NoiseModel::real(0.0), p)
                    .unwrap();
            let tr = estimate(&mut s, &cfg.with_seed(p)).unwrap();
            power_err[i] = power_err[i].max((tr.final_estimate - target).abs());
            let settled = tr
                .per_round
                .iter()
                .rposition(|e| (e - target).abs() > 1e-6)
                .map_or(1, |k| k + 2);
            iters[i] = iters[i].max(settled);
        }
    }
    check(
        plugin_err <= 1e-6 && power_err.iter().all(|&e| e <= 1e-6),
        format!(
            "plugin err {plugin_err:.1e}; power A err {:.1e} (settled by iteration {}); power B err {:.1e} (settled by iteration {})",
            power_err[0], iters[0], power_err[1], iters[1]
        ),
    )
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

// 6. Risk-versus-budget slopes.
fn scaling_laws() -> Outcome {
    let r = 10;
    let plant = random_plant(&PlantSpec {
        r,
        decay: 1.0,
        seed: 606,
    })
    .unwrap();
    let truth = hinf_norm(&plant, 1e-12).unwrap().value;
    let budgets = [100usize, 400, 1600, 6400];
    let plugin_risk: Vec<f64> = budgets
        .iter()
        .map(|&n| {
            (0..200u64)
                .into_par_iter()
                .map(|t| {
                    let mut s =
                        QuerySession::new(plant.clone(), r, 1.0, n, NoiseModel::real(0.1), t)
                            .unwrap();
                    let e = estimate(&mut s, &EstimatorConfig::plugin(r).with_seed(t + 1)).unwrap();
                    (e.final_estimate - truth).abs()
                })
                .sum::<f64>()
                / 200.0
        })
        .collect();
    let ps = slope(&budgets.map(|n| n as f64), &plugin_risk);

    // On-grid hard instances tau_N F^{-1} e_i with tau_N = sqrt(r / N).
    let (k, sigma) = (8usize, 1.0);
    let f = dft_matrix(k).unwrap();
    let mab_budgets = [500usize, 2000, 8000];
    let mab_risk: Vec<f64> = mab_budgets
        .iter()
        .map(|&n| {
            let tau = (k as f64 / n as f64).sqrt();
            (0..200u64)
                .into_par_iter()
                .map(|t| {
                    let i = (t as usize) % k;
                    let theta =
                        FirFilter::new(f.inverse_column(i).scaled(Complex64::new(tau, 0.0)))
                            .unwrap();
                    let mut s = FreqQuerySession::new(theta, n, sigma, t).unwrap();
                    let e =
                        grid_mab_estimate(&mut s, &EstimatorConfig::grid_mab(k).with_seed(t + 7))
                            .unwrap();
                    (e.final_estimate - tau).abs()
                })
                .sum::<f64>()
                / 200.0
        })
        .collect();
    let ms = slope(&mab_budgets.map(|n| n as f64), &mab_risk);
    check(
        (ps + 0.5).abs() <= 0.1 && (ms + 0.5).abs() <= 0.1,
        format!("plugin slope {ps:.3} (risks {plugin_risk:.4?}); grid bandit slope {ms:.3} (risks {mab_risk:.4?})"),
    )
}

fn curve<'a>(curves: &'a [ProfileCurve], m: &str) -> &'a ProfileCurve {
    curves
        .iter()
        .find(|c| c.method == m)
        .expect("method present")
}

// 7. Reference protocol: four suites and their performance profiles.
fn experiment_reproduction() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    for (snr, decay) in [(20.0, 0.75), (10.0, 0.75), (20.0, 1.0), (10.0, 1.0)] {
        let cfg = SuiteConfig {
            master_seed: 2024,
            ..SuiteConfig::paper_default(snr, decay)
        };
        let recs = run_suite(&cfg).unwrap();
        let taus = hinf_core::bench::default_tau_grid();
        let curves = performance_profile(&recs, &taus).unwrap();
        let valid = recs.len() == 4000
            && curves.iter().all(|c| {
                c.points.windows(2).all(|w| w[0].1 <= w[1].1)
                    && c.points.iter().all(|p| (0.0..=1.0).contains(&p.1))
            })
            && curves.iter().any(|c| c.points[0].1 > 0.0);
        let (pl, wt) = (curve(&curves, "plugin"), curve(&curves, "wts"));
        let sup = pl
            .points
            .iter()
            .zip(&wt.points)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0, f64::max);
        let cond = if decay < 1.0 {
            sup < 0.15
        } else {
            wt.at(0.05) <= pl.at(0.05)
        };
        ok &= valid && cond;
        lines.push(format!(
            "snr {snr} decay {decay}: valid {valid}, sup|plugin-wts| {sup:.3}, at 0.05 plugin {:.3} wts {:.3}",
            pl.at(0.05),
            wt.at(0.05)
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 1200.0;
    check(ok, format!("{} ({secs:.0} s)", lines.join("; ")))
}

// 8. Byte-identical records across thread counts.
fn determinism() -> Outcome {
    let base = SuiteConfig {
        n_plants: 20,
        n_noise_per_plant: 3,
        master_seed: 99,
        ..SuiteConfig::paper_default(10.0, 0.75)
    };
    let csv = |parallelism| {
        let recs = run_suite(&SuiteConfig {
            parallelism,
            ..base.clone()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &recs, false).unwrap();
        buf
    };
    let (a, b) = (csv(1), csv(8));
    check(
        a == b,
        format!(
            "{} bytes at parallelism 1 vs 8, identical {}",
            a.len(),
            a == b
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 identities", identities),
        ("2 H-infinity oracle", hinf_oracle),
        ("3 divergence cross-checks", divergence_mc),
        ("4 Le Cam certificate", le_cam),
        ("5 estimator sanity", estimator_sanity),
        ("6 scaling laws", scaling_laws),
        ("7 experiment reproduction", experiment_reproduction),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} criterion {name} [{:.1}s]: {detail}",
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
