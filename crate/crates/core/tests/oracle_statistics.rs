use qmicro_core::dos::density_of_states;
use qmicro_core::oracle::{
    empirical_dos, empirical_microcanonical, empirical_off_diagonal, sample_pure_states,
};
use qmicro_core::spectrum::build_uniform_ladder;
use qmicro_core::thermo::{energy_uncertainty, microcanonical_weights};
use qmicro_core::Spectrum;

#[test]
fn coordinates_have_dirichlet_moments() {
    let dim = 4usize;
    let count = 200_000u64;
    let batch = sample_pure_states(dim, count, 2024).unwrap();
    let n = count as f64;
    let d = dim as f64;
    let mean = 1.0 / d;
    let var = (d - 1.0) / (d * d * (d + 1.0));
    for k in 0..dim {
        let m = batch.rows().map(|r| r[k]).sum::<f64>() / n;
        assert!((m - mean).abs() <= 5.0 * (var / n).sqrt(), "coordinate {k}: {m}");
    }

    // Off-diagonal covariance of a flat Dirichlet: −1/(d²(d+1)).
    let cov = -1.0 / (d * d * (d + 1.0));
    for (i, j) in [(0, 1), (1, 3), (2, 3)] {
        let prods: Vec<f64> = batch.rows().map(|r| (r[i] - mean) * (r[j] - mean)).collect();
        let c = prods.iter().sum::<f64>() / n;
        let spread = prods.iter().map(|x| (x - c).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((c - cov).abs() <= 5.0 * (spread / n).sqrt(), "cov({i},{j}) = {c}, want {cov}");
    }
}

/// Two-sided Kolmogorov–Smirnov statistic against U(0, 1).
fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

#[test]
fn two_level_amplitude_is_uniform() {
    let count = 100_000u64;
    let batch = sample_pure_states(2, count, 99).unwrap();
    let d = ks_uniform(batch.rows().map(|r| r[0]).collect());
    // Asymptotic critical value at α = 0.001.
    let critical = 1.9495 / (count as f64).sqrt();
    assert!(d < critical, "KS statistic {d} ≥ {critical}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let s = Spectrum::from_pairs(&[(0.0, 1), (1.0, 2), (2.0, 1), (3.0, 1)]).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                (
                    sample_pure_states(5, 50_000, 5).unwrap(),
                    empirical_microcanonical(&s, 1.2, 0.05, 100_000, 5).unwrap(),
                )
            })
    };
    let (a, x) = run(1);
    let (b, y) = run(4);
    assert_eq!(a, b);
    assert_eq!(x, y);
}

#[test]
fn chi_square_calibration_over_seeds() {
    let s = Spectrum::from_pairs(&[(0.0, 1), (1.0, 2), (2.0, 1), (3.0, 1)]).unwrap();
    let passes = (0..100u64)
        .filter(|&seed| empirical_dos(&s, 10_000, 20, seed).unwrap().p_value > 0.001)
        .count();
    assert!(passes >= 99, "only {passes} of 100 seeds pass");
}

#[test]
fn window_shrink_converges() {
    let s = build_uniform_ladder(2, 1.0).unwrap();
    let d = density_of_states(&s).unwrap();
    let e = 0.6;
    let exact = microcanonical_weights(&d, e).unwrap();
    let mut previous: Option<(f64, f64)> = None;
    for (window, count) in [(0.4, 400_000u64), (0.1, 1_600_000), (0.025, 6_400_000)] {
        let est = empirical_microcanonical(&s, e, window, count, 17).unwrap();
        let (err, se) = est
            .weights
            .iter()
            .zip(&est.weight_standard_errors)
            .zip(&exact)
            .map(|((w, se), x)| ((w - x).abs(), *se))
            .fold((0.0f64, 0.0f64), |acc, (a, b)| (acc.0.max(a), acc.1.max(b)));
        if let Some((prev, prev_se)) = previous {
            assert!(err <= prev + 3.0 * (se + prev_se), "window {window}: {err} after {prev}");
        }
        previous = Some((err, se));
    }
    let (err, se) = previous.unwrap();
    assert!(err <= 3.0 * se, "final error {err}, standard error {se}");
}

#[test]
fn two_level_midpoint() {
    let s = build_uniform_ladder(1, 1.0).unwrap();
    let d = density_of_states(&s).unwrap();
    let est = empirical_microcanonical(&s, 0.5, 0.02, 200_000, 3).unwrap();
    for (w, se) in est.weights.iter().zip(&est.weight_standard_errors) {
        assert!((w - 0.5).abs() <= 3.0 * se, "{w} ± {se}");
    }
    let dh = energy_uncertainty(&d, 0.5).unwrap();
    assert!((est.energy_uncertainty - dh).abs() <= 3.0 * est.energy_uncertainty_standard_error);
}

#[test]
fn off_diagonal_elements_vanish() {
    let s = build_uniform_ladder(2, 1.0).unwrap();
    let est = empirical_off_diagonal(&s, 0.8, 0.1, 400_000, 11).unwrap();
    assert!(est.max_modulus <= 4.0 * est.standard_error, "{est:?}");
    // Sanity: the diagonal of the same window is far from zero.
    assert!(est.standard_error < 0.01);
}
