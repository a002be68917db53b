mod common;

use common::*;
use hinf_core::estimators::{
    bin_posterior, estimate, grid_mab_run, least_squares_fir, moss_index, power_profile_to_input,
    wts_run, EstimatorConfig, InputSchedule, Method, PhaseRule,
};
use hinf_core::oracle::{FreqQuerySession, NoiseModel, QueryOracle, QuerySession};
use hinf_core::signals::{
    adjoint_reverse, convolve_truncated, dft, dft_matrix, hinf_norm, operator_norm,
    toeplitz_matrix, ComplexVec, Field, FirFilter,
};
use hinf_core::Complex64;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn session(g: &FirFilter, dim: usize, budget: usize, noise: NoiseModel, seed: u64) -> QuerySession {
    QuerySession::new(g.clone(), dim, 1.0, budget, noise, seed).unwrap()
}

#[test]
fn least_squares_matches_normal_equations() {
    let mut g = rng(60);
    let (dim, m, n) = (8, 3, 5);
    let inputs: Vec<ComplexVec> = (0..n).map(|_| random_vec(&mut g, dim, true)).collect();
    let outputs: Vec<ComplexVec> = (0..n).map(|_| random_vec(&mut g, dim, true)).collect();
    let fit = least_squares_fir(&inputs, &outputs, m).unwrap();

    let mut a = DMatrix::<Complex64>::zeros(n * dim, m);
    let mut b = DVector::<Complex64>::zeros(n * dim);
    for t in 0..n {
        for k in 0..m {
            let mut e = vec![Complex64::new(0.0, 0.0); m];
            e[k] = Complex64::new(1.0, 0.0);
            let col = conv(&e, inputs[t].as_slice());
            for i in 0..dim {
                a[(t * dim + i, k)] = col[i];
            }
        }
        for i in 0..dim {
            b[t * dim + i] = outputs[t][i];
        }
    }
    let normal = (a.adjoint() * &a).lu().solve(&(a.adjoint() * &b)).unwrap();
    assert!(max_abs_diff(fit.filter.taps(), normal.as_slice()) < 1e-9);
    assert!(!fit.rank_deficient);
}

#[test]
fn least_squares_impulse_and_duplicates() {
    let mut g = rng(61);
    let plant = random_filter(&mut g, 6, true);
    let e1 = ComplexVec::basis(10, 0);
    let y = convolve_truncated(&plant, &e1, 10).unwrap();
    let fit = least_squares_fir(std::slice::from_ref(&e1), std::slice::from_ref(&y), 4).unwrap();
    assert!(max_abs_diff(fit.filter.taps(), &plant.taps()[..4]) < 1e-12);

    let u = random_vec(&mut g, 10, true);
    let yu = random_vec(&mut g, 10, true);
    let once = least_squares_fir(std::slice::from_ref(&u), std::slice::from_ref(&yu), 5).unwrap();
    let twice = least_squares_fir(&[u.clone(), u], &[yu.clone(), yu], 5).unwrap();
    assert!(max_abs_diff(once.filter.taps(), twice.filter.taps()) < 1e-10);
    assert!(least_squares_fir(&[], &[], 1).is_err());
}

#[test]
fn noiseless_plugin_is_exact_for_full_rank_schedules() {
    let mut g = rng(62);
    for trial in 0..10 {
        let complex = trial % 2 == 1;
        let plant = random_filter(&mut g, 6, complex);
        let truth = hinf_norm(&plant, 1e-10).unwrap().value;
        let noise = if complex {
            NoiseModel::complex(0.0)
        } else {
            NoiseModel::real(0.0)
        };
        for schedule in [InputSchedule::Impulse, InputSchedule::UnitRandom] {
            let cfg = EstimatorConfig::plugin(6)
                .with_schedule(schedule)
                .with_seed(trial);
            let mut s = session(&plant, 12, 3, noise, 0);
            let tr = estimate(&mut s, &cfg).unwrap();
            assert!((tr.final_estimate - truth).abs() < 1e-8);
        }
    }
}

#[test]
fn plugin_on_zero_plant_shrinks_with_budget() {
    let zero = FirFilter::from_real(&[0.0; 4]).unwrap();
    let mut medians = Vec::new();
    for n in [50usize, 200, 800] {
        let mut est: Vec<f64> = (0..50)
            .map(|t| {
                let mut s = session(&zero, 8, n, NoiseModel::complex(0.5), 1000 + t);
                let tr = estimate(&mut s, &EstimatorConfig::plugin(4).with_seed(t)).unwrap();
                assert!(tr.final_estimate >= 0.0);
                tr.final_estimate
            })
            .collect();
        medians.push(median(&mut est));
    }
    assert!(
        medians[0] > medians[1] && medians[1] > medians[2],
        "{medians:?}"
    );
}

#[test]
fn reversal_trick_applies_the_adjoint() {
    let mut g = rng(63);
    for complex in [false, true] {
        let plant = random_filter(&mut g, 5, complex);
        let y = random_vec(&mut g, 8, complex);
        let via_reversal =
            adjoint_reverse(&convolve_truncated(&plant, &adjoint_reverse(&y), 8).unwrap());
        let dense = toeplitz_matrix(&plant, 8).unwrap().adjoint()
            * DVector::from_column_slice(y.as_slice());
        assert!(max_abs_diff(via_reversal.as_slice(), dense.as_slice()) < 1e-12);
    }
}

#[test]
fn power_methods_on_a_symmetric_plant() {
    let plant = FirFilter::from_real(&[1.0, 0.6, 0.2, 0.6, 1.0]).unwrap();
    let dim = 5;
    let want = operator_norm(&toeplitz_matrix(&plant, dim).unwrap()).unwrap();
    for cfg in [EstimatorConfig::power_a(), EstimatorConfig::power_b()] {
        let mut s = session(&plant, dim, 2000, NoiseModel::real(0.0), 0);
        let tr = estimate(&mut s, &cfg.with_seed(4)).unwrap();
        assert!(
            (tr.final_estimate - want).abs() < 1e-6,
            "{:?}: {} vs {want}",
            tr.variant,
            tr.final_estimate
        );
    }
}

#[test]
fn power_methods_on_a_positive_scalar_plant_increase_to_the_gain() {
    let c = 1.7;
    let plant = FirFilter::from_real(&[c]).unwrap();
    for cfg in [EstimatorConfig::power_a(), EstimatorConfig::power_b()] {
        let mut s = session(&plant, 6, 40, NoiseModel::complex(0.0), 0);
        let tr = estimate(&mut s, &cfg).unwrap();
        for w in tr.per_round.windows(2) {
            assert!(w[1] >= w[0] - 1e-10);
        }
        assert!((tr.final_estimate - c).abs() < 1e-10);
    }
}

#[test]
fn power_method_a_approaches_the_peak_gain_from_below_as_length_grows() {
    let plant = FirFilter::from_real(&[1.0, 0.5, 0.25]).unwrap();
    let truth = hinf_norm(&plant, 1e-12).unwrap().value;
    let mut gaps = Vec::new();
    for dim in [10usize, 20, 40, 80] {
        let want = operator_norm(&toeplitz_matrix(&plant, dim).unwrap()).unwrap();
        let mut s = session(&plant, dim, 1000, NoiseModel::real(0.0), 0);
        let tr = estimate(&mut s, &EstimatorConfig::power_a().with_seed(1)).unwrap();
        assert!(tr.final_estimate <= want + 1e-9);
        gaps.push(truth - tr.final_estimate);
    }
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
}

#[test]
fn wts_single_bin_on_a_scalar_plant() {
    for c in [0.3, -2.0] {
        let plant = FirFilter::from_real(&[c]).unwrap();
        let mut cfg = EstimatorConfig::wts();
        cfg.bins = Some(1);
        let mut s = session(&plant, 8, 10, NoiseModel::real(0.0), 0);
        let tr = estimate(&mut s, &cfg).unwrap();
        assert!((tr.final_estimate - c.abs()).abs() < 1e-10);
    }
}

#[test]
fn wts_concentrates_on_the_peak_bin() {
    let r = 8;
    let peak = 3;
    let plant = FirFilter::new(dft_matrix(r).unwrap().inverse_column(peak)).unwrap();
    let hits = (0..20u64)
        .filter(|&t| {
            let mut s = session(&plant, r, 200, NoiseModel::complex(0.05), 300 + t);
            wts_run(&mut s, &EstimatorConfig::wts().with_seed(t))
                .unwrap()
                .best_bin
                == peak
        })
        .count();
    assert!(hits >= 18, "{hits}/20");
}

#[test]
fn power_profile_inputs() {
    let (dim, cap) = (16, 2.0);
    let mut point = vec![0.0; dim];
    point[5] = 1.0;
    let u = power_profile_to_input(&point, dim, Field::Complex, PhaseRule::Zero, cap).unwrap();
    assert!((u.norm2() - cap).abs() < 1e-12);
    let spec = dft(u.as_slice());
    for (k, z) in spec.iter().enumerate() {
        if k != 5 {
            assert!(z.norm() < 1e-12);
        }
    }
    let amp = u[0].norm();
    assert!(u.iter().all(|z| (z.norm() - amp).abs() < 1e-12));

    for phases in [PhaseRule::Zero, PhaseRule::Random(9)] {
        let flat = power_profile_to_input(&[1.0; 9], dim, Field::Real, phases, cap).unwrap();
        assert!(flat.is_real());
        assert!((flat.norm2() - cap).abs() < 1e-12);
        let mags: Vec<f64> = dft(flat.as_slice()).iter().map(|z| z.norm()).collect();
        // Interior bins split their power with the mirror bin.
        for k in 1..8 {
            assert!((mags[k] - mags[1]).abs() < 1e-10);
        }
        assert!((mags[0] * mags[0] - 2.0 * mags[1] * mags[1]).abs() < 1e-10);
        let energy: f64 = mags.iter().map(|m| m * m).sum();
        assert!((energy - dim as f64 * cap * cap).abs() < 1e-9);
    }
}

#[test]
fn grid_bandit_single_arm_is_a_sample_mean_at_dc() {
    let plant = FirFilter::from_real(&[0.8, -0.3, 0.5]).unwrap();
    let (n, sigma, seed) = (40, 0.4, 17);
    let mut s = FreqQuerySession::new(plant.clone(), n, sigma, seed).unwrap();
    let out = grid_mab_run(&mut s, &EstimatorConfig::grid_mab(1)).unwrap();
    let mut twin = FreqQuerySession::new(plant, n, sigma, seed).unwrap();
    let ys: Vec<Complex64> = (0..n).map(|_| twin.query_frequency(0.0).unwrap()).collect();
    let mean = ys[n / 2..].iter().sum::<Complex64>() / (n / 2) as f64;
    assert!((out.trace.final_estimate - mean.norm()).abs() < 1e-12);
    assert_eq!(out.pulls, vec![n / 2]);
    assert!(grid_mab_run(
        &mut FreqQuerySession::new(FirFilter::from_real(&[1.0]).unwrap(), 6, 0.1, 0).unwrap(),
        &EstimatorConfig::grid_mab(4)
    )
    .is_err());
}

#[test]
fn grid_bandit_finds_the_peak_arm() {
    let k = 8;
    let peak = 5;
    let n = 2000;
    let plant = FirFilter::new(dft_matrix(k).unwrap().inverse_column(peak)).unwrap();
    let mut hits = 0;
    for t in 0..40u64 {
        let mut s = FreqQuerySession::new(plant.clone(), n, 1.0, 500 + t).unwrap();
        let out = grid_mab_run(&mut s, &EstimatorConfig::grid_mab(k).with_seed(t)).unwrap();
        assert_eq!(out.pulls.iter().sum::<usize>(), n / 2);
        assert!(out.pulls[out.chosen_arm] > 0);
        if out.chosen_arm == peak {
            hits += 1;
            assert!((out.trace.final_estimate - 1.0).abs() < 3.0 / ((n / 2) as f64).sqrt());
        }
    }
    assert!(hits as f64 / 40.0 > 0.8, "{hits}/40");
}

#[test]
fn time_domain_entry_point_rejects_the_grid_bandit() {
    let plant = FirFilter::from_real(&[1.0]).unwrap();
    let mut s = session(&plant, 2, 4, NoiseModel::real(0.0), 0);
    assert!(estimate(&mut s, &EstimatorConfig::new(Method::GridMab)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn estimators_respect_budget_and_sign(
        seed in any::<u64>(),
        r in 1usize..6,
        extra in 0usize..6,
        budget in 2usize..30,
        sigma in 0.0..1.0f64,
        complex in any::<bool>(),
        which in 0usize..4,
    ) {
        let mut g = rng(seed);
        let plant = random_filter(&mut g, r, complex);
        let dim = r + extra;
        let noise = if complex { NoiseModel::complex(sigma) } else { NoiseModel::real(sigma) };
        let cfg = [
            EstimatorConfig::plugin(r),
            EstimatorConfig::power_a(),
            EstimatorConfig::power_b(),
            EstimatorConfig::wts(),
        ][which].clone().with_seed(seed);
        let mut s = QuerySession::new(plant, dim, 1.0, budget, noise, seed).unwrap();
        let tr = estimate(&mut s, &cfg).unwrap();
        prop_assert_eq!(tr.queries_used, s.used());
        prop_assert!(s.used() <= budget);
        if cfg.variant == Method::PowerB {
            prop_assert!(s.used() <= 2 * (budget / 2));
        }
        prop_assert!(tr.per_round.iter().all(|h| *h >= 0.0 && h.is_finite()));
        prop_assert_eq!(Some(&tr.final_estimate), tr.per_round.last());
    }

    #[test]
    fn grid_bandit_respects_budget(seed in any::<u64>(), arms in 1usize..8, half in 8usize..40) {
        let n = 2 * half.max(arms);
        let mut g = rng(seed);
        let plant = random_filter(&mut g, 4, true);
        let mut s = FreqQuerySession::new(plant, n, 0.3, seed).unwrap();
        let out = grid_mab_run(&mut s, &EstimatorConfig::grid_mab(arms).with_seed(seed)).unwrap();
        prop_assert_eq!(s.used(), n);
        prop_assert_eq!(out.pulls.iter().sum::<usize>(), n / 2);
        prop_assert!(out.pulls[out.chosen_arm] > 0);
        prop_assert!(out.trace.final_estimate >= 0.0);
    }

    #[test]
    fn moss_bonus_shrinks_with_pulls_and_grows_with_horizon(
        mean in -2.0..2.0f64, pulls in 1usize..500, horizon in 1usize..10_000, arms in 1usize..20,
    ) {
        let here = moss_index(mean, pulls, horizon, arms);
        prop_assert!(here >= mean);
        prop_assert!(moss_index(mean, pulls + 1, horizon, arms) <= here + 1e-15);
        prop_assert!(moss_index(mean, pulls, horizon + 1, arms) >= here - 1e-15);
    }

    #[test]
    fn posterior_variance_falls_with_power(
        p in 0.0..50.0f64, dp in 1e-3..10.0f64, lambda in 0.1..3.0f64, s in 0.01..2.0f64,
        xr in -3.0..3.0f64, xi in -3.0..3.0f64,
    ) {
        let x = Complex64::new(xr, xi);
        let (_, v1) = bin_posterior(p, x * p, lambda, s);
        let (_, v2) = bin_posterior(p + dp, x * (p + dp), lambda, s);
        prop_assert!(v2 < v1);
        let (m_big, _) = bin_posterior(1e12, x * 1e12, lambda, s);
        prop_assert!((m_big - x).norm() < 1e-6 * (1.0 + x.norm()));
    }
}

#[test]
fn moss_closed_forms() {
    assert_eq!(moss_index(0.4, 10, 100, 10), 0.4);
    let e = std::f64::consts::E;
    let b = moss_index(0.0, 1, 0, 1);
    assert_eq!(b, 0.0);
    assert!(
        (moss_index(0.0, 1, (4.0 * e).round() as usize, 4)
            - (((4.0 * e).round() / 4.0).ln()).sqrt())
        .abs()
            < 1e-12
    );
}

#[test]
fn noiseless_posterior_mean_is_the_weighted_average() {
    let (m, v) = bin_posterior(4.0, Complex64::new(2.0, -4.0), 1.0, 0.0);
    assert_eq!(m, Complex64::new(0.5, -1.0));
    assert_eq!(v, 0.0);
}
