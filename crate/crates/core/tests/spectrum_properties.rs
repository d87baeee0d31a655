mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qmicro_core::spectrum::{
    build_ising_chain, eigenvalues_of_hermitian, from_eigenvalues, mean_energy, parse_spectrum,
    spectrum_to_json,
};
use qmicro_core::{HermitianMatrix, Spectrum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn same_levels(a: &Spectrum, b: &Spectrum, tol: f64) -> bool {
    a.levels().len() == b.levels().len()
        && a.levels().iter().zip(b.levels()).all(|(x, y)| {
            x.multiplicity == y.multiplicity && (x.energy - y.energy).abs() <= tol
        })
}

/// `U diag(λ) U†` for a Haar-ish unitary from Gram–Schmidt on Gaussian columns.
fn conjugated(values: &[f64], rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let d = values.len();
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for _ in 0..d {
        let mut v: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for u in &cols {
            let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= dot * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            entries[i * d + k] =
                (0..d).map(|m| cols[m][i] * values[m] * cols[m][k].conj()).sum();
        }
    }
    // Symmetrise away rounding so the Hermiticity check sees exact conjugates.
    for i in 0..d {
        entries[i * d + i] = Complex64::new(entries[i * d + i].re, 0.0);
        for k in i + 1..d {
            let avg = 0.5 * (entries[i * d + k] + entries[k * d + i].conj());
            entries[i * d + k] = avg;
            entries[k * d + i] = avg.conj();
        }
    }
    HermitianMatrix::new(d, entries).unwrap()
}

proptest! {
    #[test]
    fn from_eigenvalues_is_idempotent(s in common::spectrum_full_precision(12, 4)) {
        let again = from_eigenvalues(&s.eigenvalues(), 0.0).unwrap();
        prop_assert_eq!(again, s);
    }

    #[test]
    fn ising_matches_closed_form(j in -3.0f64..3.0, b in -3.0f64..3.0) {
        prop_assume!(j.abs() > 1e-3 && b.abs() > 1e-3 && (j - b).abs() > 1e-3 && (j + b).abs() > 1e-3);
        let s = build_ising_chain(j, b).unwrap();
        let mut expected = vec![
            (-3.0 * j - 3.0 * b, 1),
            (j - b, 3),
            (j + b, 3),
            (-3.0 * j + 3.0 * b, 1),
        ];
        expected.sort_by(|x, y| x.0.total_cmp(&y.0));
        let expected = Spectrum::from_pairs(&expected).unwrap();
        prop_assert!(same_levels(&s, &expected, 1e-12 * (j.abs() + b.abs())), "{s:?}");
    }

    #[test]
    fn diagonal_round_trip(s in common::spectrum_full_precision(12, 4)) {
        let h = HermitianMatrix::diagonal(&s.eigenvalues()).unwrap();
        let back = eigenvalues_of_hermitian(&h, 1e-12).unwrap();
        prop_assert!(same_levels(&back, &s, 0.0));
    }

    #[test]
    fn mean_energy_is_permutation_invariant_and_shifts(
        s in common::spectrum_full_precision(12, 4),
        c in -10.0f64..10.0,
        seed in any::<u64>(),
    ) {
        let mut values = s.eigenvalues();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..values.len()).rev() {
            values.swap(i, rng.random_range(0..=i));
        }
        let direct = values.iter().sum::<f64>() / values.len() as f64;
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!((mean_energy(&s) - direct).abs() <= 1e-14 * scale.max(1.0));
        let shifted = s.affine(1.0, c).unwrap();
        prop_assert!((mean_energy(&shifted) - mean_energy(&s) - c).abs() <= 1e-13 * (scale + c.abs()).max(1.0));
    }
}

#[test]
fn ising_degenerate_parameters_merge() {
    let s = build_ising_chain(0.7, 0.0).unwrap();
    assert!(same_levels(&s, &Spectrum::from_pairs(&[(-3.0 * 0.7, 2), (0.7, 6)]).unwrap(), 1e-15));
    let s = build_ising_chain(0.5, 0.5).unwrap();
    assert_eq!(s.levels().iter().map(|l| l.multiplicity).collect::<Vec<_>>(), vec![1, 4, 3]);
}

#[test]
fn unitary_conjugation_recovers_the_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for dim in [2usize, 3, 5, 8, 16] {
        let values: Vec<f64> = (0..dim).map(|k| (k as f64 * 0.37).sin() * 2.0 + k as f64 * 0.5).collect();
        let h = conjugated(&values, &mut rng);
        let s = eigenvalues_of_hermitian(&h, 1e-9).unwrap();
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues().iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-10, "dim {dim}: {a} vs {b}");
        }
    }
    // A degenerate multiplet survives conjugation.
    let h = conjugated(&[0.0, 1.0, 1.0, 1.0, 2.5], &mut rng);
    let s = eigenvalues_of_hermitian(&h, 1e-9).unwrap();
    assert_eq!(s.levels().iter().map(|l| l.multiplicity).collect::<Vec<_>>(), vec![1, 3, 1]);
}

#[test]
fn spectrum_text_and_json_agree() {
    let text = "# two-level with a triplet\n0.0 1\n1.5 3\n";
    let s = parse_spectrum(text).unwrap();
    let json = spectrum_to_json(&s).to_string();
    assert_eq!(parse_spectrum(&json).unwrap(), s);
}
