#![allow(dead_code)]

use num_traits::{One, Zero};
use proptest::prelude::*;
use qmicro_core::{Rational, Scalar, Spectrum};

/// Spacing of the random energy grid. Energies with short dyadic expansions
/// keep exact arithmetic cheap.
pub const GRID: f64 = 1.0 / 1024.0;

/// Distinct levels on a `GRID` lattice with gaps in `[0.2, 2]` and
/// multiplicities summing to at most `max_dim`.
pub fn spectrum(max_dim: usize, max_mult: usize) -> impl Strategy<Value = Spectrum> {
    levels(max_dim, max_mult, (-3072i64..3072).prop_map(|k| k as f64 * GRID).boxed(), (205i64..2048).prop_map(|k| k as f64 * GRID).boxed())
}

/// As [`spectrum`] but with arbitrary floating-point energies.
pub fn spectrum_full_precision(max_dim: usize, max_mult: usize) -> impl Strategy<Value = Spectrum> {
    levels(max_dim, max_mult, (-3.0f64..3.0).boxed(), (0.2f64..2.0).boxed())
}

fn levels(
    max_dim: usize,
    max_mult: usize,
    start: BoxedStrategy<f64>,
    gap: BoxedStrategy<f64>,
) -> impl Strategy<Value = Spectrum> {
    (2..=max_dim.min(8))
        .prop_flat_map(move |m| {
            (
                start.clone(),
                prop::collection::vec(gap.clone(), m - 1),
                prop::collection::vec(1..=max_mult, m),
            )
        })
        .prop_filter_map("too many states", move |(start, gaps, mut mults)| {
            while mults.iter().sum::<usize>() > max_dim {
                let i = mults.iter().position(|&k| k > 1)?;
                mults[i] -= 1;
            }
            let mut e = start;
            let mut pairs = vec![(e, mults[0])];
            for (g, &k) in gaps.iter().zip(&mults[1..]) {
                e += g;
                pairs.push((e, k));
            }
            Spectrum::from_pairs(&pairs).ok()
        })
}

pub fn nondegenerate(max_dim: usize) -> impl Strategy<Value = Spectrum> {
    spectrum(max_dim, 1)
}

/// The nondegenerate closed form: `(−π)^n/(n−1)! Σ_k (E_k − E)^{n−1}
/// 1{E_k > E} / Π_{l≠k}(E_l − E_k)`.
pub fn direct_sum(energies: &[f64], e: f64) -> f64 {
    let n = energies.len() - 1;
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let prefactor = (-std::f64::consts::PI).powi(n as i32) / fact;
    let mut sum = 0.0;
    for (k, &ek) in energies.iter().enumerate() {
        if ek <= e {
            continue;
        }
        let mut term = (ek - e).powi(n as i32 - 1);
        for (l, &el) in energies.iter().enumerate() {
            if l != k {
                term /= el - ek;
            }
        }
        sum += term;
    }
    prefactor * sum
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

pub fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * Rational::from_i64(k as i64))
}

/// Ascending coefficients in `t` of the unit-ladder density `Ω/(π^n/n!)` on
/// `[j, j+1]`, from the alternating sum over levels above `E = j + t`.
pub fn ladder_piece(n: usize, j: usize) -> Vec<Rational> {
    let mut coeffs = vec![Rational::zero(); n];
    for k in j + 1..=n {
        // (−1)^{n+k} n / (k!(n−k)!) · (k − j − t)^{n−1}
        let sign = if (n + k) % 2 == 0 { 1 } else { -1 };
        let weight =
            Rational::from_i64(sign * n as i64) / (factorial(k) * factorial(n - k));
        let a = Rational::from_i64((k - j) as i64);
        for (p, c) in coeffs.iter_mut().enumerate() {
            // binomial(n−1, p) a^{n−1−p} (−t)^p
            let b = factorial(n - 1) / (factorial(p) * factorial(n - 1 - p));
            let mut term = weight.clone() * b;
            for _ in 0..n - 1 - p {
                term = term * a.clone();
            }
            if p % 2 == 1 {
                term = -term;
            }
            *c = c.clone() + term;
        }
    }
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    coeffs
}
