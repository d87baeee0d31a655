//! Energy exchange between two weakly coupled systems.
//!
//! The exchanged energy `ε` maximises `S₁(E₁ + ε) + S₂(E₂ − ε)`. Its
//! derivative `1/T₁ − 1/T₂` is available analytically and, by
//! log-concavity of both densities, decreases in `ε`, so the maximiser is
//! its unique sign change on the feasible interval.

use serde::{Deserialize, Serialize};

use super::accessible_range;
use crate::dos::DensityOfStates;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    /// Temperatures agree at an interior maximum.
    Interior,
    /// The maximum sits on the edge of the feasible interval.
    Boundary,
    /// `1/T` jumps across zero at a knot of one density, so the maximum is a
    /// kink and the temperatures differ.
    Knot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub epsilon_star: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    pub kind: EquilibriumKind,
}

impl Equilibrium {
    pub fn t_common(&self) -> f64 {
        0.5 * (self.t1 + self.t2)
    }
}

/// `Ω′/Ω` (inverse temperature); `+∞` where `Ω` vanishes.
fn beta<S: Scalar>(d: &DensityOfStates<S>, e: f64) -> f64 {
    let x = S::from_f64(e);
    let m = d.density_exact(&x, 0, None);
    if !(m > S::zero()) {
        return f64::INFINITY;
    }
    (d.density_exact(&x, 1, None) / m).to_f64()
}

const REL_TEMPERATURE_TOL: f64 = 1e-8;

pub fn equilibrate<S1: Scalar, S2: Scalar>(
    d1: &DensityOfStates<S1>,
    e1: f64,
    d2: &DensityOfStates<S2>,
    e2: f64,
) -> Result<Equilibrium> {
    let r1 = accessible_range(d1);
    let r2 = accessible_range(d2);
    for (r, e, name) in [(&r1, e1, "first"), (&r2, e2, "second")] {
        if r.frozen {
            return Err(Error::Frozen(format!("{name} system: Ω is maximal at E_min")));
        }
        if !r.contains(e) {
            return Err(Error::Domain(format!(
                "{name} energy {e} is outside the accessible range [{}, {}]",
                r.e_min, r.e_star
            )));
        }
    }
    let lo = (r1.e_min - e1).max(e2 - r2.e_star);
    let hi = (r1.e_star - e1).min(e2 - r2.e_min);
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "no feasible energy exchange: interval [{lo}, {hi}] is empty"
        )));
    }

    let g = |eps: f64| beta(d1, e1 + eps) - beta(d2, e2 - eps);
    let (mut a, mut b) = (lo, hi);
    loop {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let v = g(mid);
        if v == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if v > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }

    let temps = |eps: f64| {
        let t1 = 1.0 / beta(d1, e1 + eps);
        let t2 = 1.0 / beta(d2, e2 - eps);
        (t1, t2)
    };
    let mismatch = |(t1, t2): (f64, f64)| {
        let scale = t1.abs().max(t2.abs());
        if scale.is_finite() && scale > 0.0 {
            (t1 - t2).abs() / scale
        } else {
            f64::INFINITY
        }
    };
    let (eps, (t1, t2)) = [a, b]
        .into_iter()
        .map(|eps| (eps, temps(eps)))
        .min_by(|x, y| mismatch(x.1).total_cmp(&mismatch(y.1)))
        .expect("two candidates");

    let ulps = 4.0 * f64::EPSILON * (lo.abs() + hi.abs()).max(f64::MIN_POSITIVE);
    let kind = if mismatch((t1, t2)) <= REL_TEMPERATURE_TOL {
        EquilibriumKind::Interior
    } else if (eps - lo).abs() <= ulps || (hi - eps).abs() <= ulps {
        EquilibriumKind::Boundary
    } else {
        EquilibriumKind::Knot
    };
    Ok(Equilibrium { epsilon_star: eps, t1, t2, kind })
}
