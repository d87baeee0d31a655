//! Finite-system critical points at the knots of `Ω`.
//!
//! At a knot `E_c` the two adjacent pieces give two Taylor expansions of the
//! density. Dividing each by its derivative yields one-sided series for
//! `T(E)`; reverting those gives `E(T)` about `T_c`, and the first order at
//! which the two sides disagree is the order of the transition.

use serde::{Deserialize, Serialize};

use super::accessible_range;
use super::series::{divide, reverse};
use crate::dos::DensityOfStates;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    #[serde(rename = "E_c")]
    pub e_c: f64,
    /// Left limit of the temperature.
    #[serde(rename = "T_c")]
    pub t_c: f64,
    #[serde(rename = "T_minus")]
    pub t_minus: f64,
    #[serde(rename = "T_plus")]
    pub t_plus: f64,
    #[serde(rename = "C_minus")]
    pub c_minus: f64,
    #[serde(rename = "C_plus")]
    pub c_plus: f64,
    /// Smallest `k` with `d^k E / dT^k` different on the two sides; `0`
    /// means the temperature itself jumps.
    pub discontinuity_order: Option<usize>,
    pub multiplicity: usize,
    /// Continuity order of `Ω` at the knot.
    pub continuity_order: i32,
}

struct SideSeries<S> {
    /// `T(E_c + h)` coefficients.
    temperature: Vec<S>,
    /// `E(T_c + τ) − E_c` coefficients, when `dT/dE ≠ 0`.
    energy: Option<Vec<S>>,
}

fn side_series<S: Scalar>(density: &[S], len: usize) -> Option<SideSeries<S>> {
    let slope: Vec<S> = density
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.clone() * S::from_usize(k))
        .collect();
    if slope.first().is_none_or(|s| s.is_zero()) {
        return None;
    }
    let temperature = divide(density, &slope, len);
    let energy = match temperature.get(1) {
        Some(a1) if !a1.is_zero() => Some(reverse(&temperature, len)),
        _ => None,
    };
    Some(SideSeries { temperature, energy })
}

/// Critical points at interior knots strictly below the top of the
/// accessible range.
pub fn critical_points<S: Scalar>(d: &DensityOfStates<S>) -> Vec<CriticalPoint> {
    let range = accessible_range(d);
    if range.frozen {
        return Vec::new();
    }
    let density = d.density();
    let knots = density.knots();
    let n = d.n();
    let len = n + 2;
    let smoothness = d.smoothness_report();
    let span = d.e_max() - d.e_min();
    let e_scale = span / n as f64;

    let mut out = Vec::new();
    for j in 1..knots.len() - 1 {
        let e_c = knots[j].to_f64();
        if e_c >= range.e_star {
            break;
        }
        let left_coeffs = &density.mirrored()[j - 1];
        let pad = |c: &[S]| {
            let mut v = c.to_vec();
            v.resize(len + 1, S::zero());
            v
        };
        let left = side_series(&pad(left_coeffs.coeffs()), len);
        let right = side_series(&pad(density.pieces()[j].coeffs()), len);
        let (Some(left), Some(right)) = (left, right) else {
            continue;
        };

        let t_minus = left.temperature[0].clone();
        let t_plus = right.temperature[0].clone();
        let t_scale = t_minus.to_f64().abs();
        let heat = |s: &SideSeries<S>| match &s.energy {
            Some(e) => e[1].to_f64(),
            None => f64::INFINITY,
        };

        let order = if !t_minus.approx_eq(&t_plus, t_scale) {
            Some(0)
        } else {
            match (&left.energy, &right.energy) {
                (Some(l), Some(r)) => (1..len).find(|&k| {
                    let scale = e_scale / t_scale.powi(k as i32);
                    !l[k].approx_eq(&r[k], scale)
                }),
                _ => (1..len).find(|&k| {
                    let scale = t_scale / e_scale.powi(k as i32);
                    !left.temperature[k].approx_eq(&right.temperature[k], scale)
                }),
            }
        };

        let entry = &smoothness[j - 1];
        out.push(CriticalPoint {
            e_c,
            t_c: t_minus.to_f64(),
            t_minus: t_minus.to_f64(),
            t_plus: t_plus.to_f64(),
            c_minus: heat(&left),
            c_plus: heat(&right),
            discontinuity_order: order,
            multiplicity: entry.multiplicity,
            continuity_order: entry.continuity_order,
        });
    }
    out
}
