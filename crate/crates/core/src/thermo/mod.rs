//! Thermodynamics of the microcanonical state (`k_B = 1`).
//!
//! With `S = ln Ω` and `T dS = dE`, temperature and specific heat follow from
//! the density of states and its first two derivatives:
//!
//! ```text
//! T = Ω / Ω′        C = dE/dT = Ω′² / (Ω′² − Ω Ω″)
//! ```
//!
//! Both are ratios, so they are computed on the normalised density and are
//! exact in the rational backing. At a knot every quantity has two one-sided
//! limits; point queries take a [`Side`] that defaults to the left.

use serde::{Deserialize, Serialize};

use crate::dos::DensityOfStates;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

mod critical;
mod curve;
mod equilibrate;
mod series;
mod weights;

pub use crate::dos::Side;
pub use critical::{critical_points, CriticalPoint};
pub use curve::{fit_power_law, fmt17, thermo_curve, EnergyGrid, PowerLawFit, ThermoCurve, ThermoRow};
pub use equilibrate::{equilibrate, Equilibrium, EquilibriumKind};
pub use weights::{microcanonical_weights, microcanonical_weights_exact};

/// Options for scalar thermodynamic queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PointOptions {
    pub side: Side,
    /// Permit energies where `Ω′ < 0` (negative temperature).
    pub negative_branch: bool,
}

impl PointOptions {
    pub fn side(side: Side) -> Self {
        PointOptions { side, ..Default::default() }
    }

    pub fn negative() -> Self {
        PointOptions { negative_branch: true, ..Default::default() }
    }
}

/// `M, M′, M″` of the normalised density at `e`, one-sided.
pub(crate) fn jet<S: Scalar>(d: &DensityOfStates<S>, e: &S, side: Side) -> (S, S, S) {
    (
        d.density_exact(e, 0, Some(side)),
        d.density_exact(e, 1, Some(side)),
        d.density_exact(e, 2, Some(side)),
    )
}

fn check_open_support<S: Scalar>(d: &DensityOfStates<S>, e: f64) -> Result<()> {
    if !(e > d.e_min() && e < d.e_max()) {
        return Err(Error::Domain(format!(
            "E = {e} is outside the open support ({}, {})",
            d.e_min(),
            d.e_max()
        )));
    }
    Ok(())
}

/// `S(E) = ln Ω(E)`.
pub fn entropy<S: Scalar>(d: &DensityOfStates<S>, e: f64) -> Result<f64> {
    check_open_support(d, e)?;
    let m = d.density_exact(&S::from_f64(e), 0, None).to_f64();
    if !(m > 0.0) {
        return Err(Error::Domain(format!("Ω({e}) = {m} is not positive")));
    }
    Ok(d.volume().ln() + m.ln())
}

/// Temperature `Ω / Ω′` in the backing arithmetic.
pub fn temperature_exact<S: Scalar>(d: &DensityOfStates<S>, e: &S, opts: PointOptions) -> Result<S> {
    let ef = e.to_f64();
    check_open_support(d, ef)?;
    let m = d.density_exact(e, 0, Some(opts.side));
    let dm = d.density_exact(e, 1, Some(opts.side));
    if dm.is_zero() {
        return Err(Error::InfiniteTemperature(ef));
    }
    if dm < S::zero() && !opts.negative_branch {
        return Err(Error::Domain(format!(
            "E = {ef} lies on the negative-temperature branch (Ω′ < 0)"
        )));
    }
    Ok(m / dm)
}

pub fn temperature<S: Scalar>(d: &DensityOfStates<S>, e: f64, opts: PointOptions) -> Result<f64> {
    temperature_exact(d, &S::from_f64(e), opts).map(|t| t.to_f64())
}

/// `C = Ω′² / (Ω′² − ΩΩ″)` in units of `k_B`.
pub fn specific_heat_exact<S: Scalar>(d: &DensityOfStates<S>, e: &S, opts: PointOptions) -> Result<S> {
    let ef = e.to_f64();
    check_open_support(d, ef)?;
    let (m, dm, d2m) = jet(d, e, opts.side);
    if dm.is_zero() {
        return Err(Error::InfiniteTemperature(ef));
    }
    if dm < S::zero() && !opts.negative_branch {
        return Err(Error::Domain(format!(
            "E = {ef} lies on the negative-temperature branch (Ω′ < 0)"
        )));
    }
    let dm2 = dm.clone() * dm;
    let denom = dm2.clone() - m * d2m;
    if denom.is_zero() {
        return Err(Error::DivergentHeat(ef));
    }
    Ok(dm2 / denom)
}

pub fn specific_heat<S: Scalar>(d: &DensityOfStates<S>, e: f64, opts: PointOptions) -> Result<f64> {
    specific_heat_exact(d, &S::from_f64(e), opts).map(|c| c.to_f64())
}

/// `[E_min, E_star]`, where `E_star` is the smallest maximiser of `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessibleRange {
    pub e_min: f64,
    pub e_star: f64,
    pub e_max: f64,
    /// `Ω` is maximal at `E_min`: no positive finite temperature exists.
    pub frozen: bool,
}

impl AccessibleRange {
    pub fn contains(&self, e: f64) -> bool {
        e >= self.e_min && e <= self.e_star
    }
}

/// Locates the mode of `Ω` by walking the pieces and isolating the sign
/// change of `Ω′`. `Ω` is log-concave, so the first sign change is the only
/// one.
pub fn accessible_range<S: Scalar>(d: &DensityOfStates<S>) -> AccessibleRange {
    let e_star = mode(d);
    AccessibleRange {
        e_min: d.e_min(),
        e_star,
        e_max: d.e_max(),
        frozen: e_star <= d.e_min(),
    }
}

/// Sign of `p′` just to the right of local coordinate `t`: the first
/// non-negligible derivative decides.
fn slope_sign_right<S: Scalar>(p: &crate::poly::Polynomial<S>, t: &S, scale: f64, inv_len: f64) -> i8 {
    let mut q = p.derivative();
    let mut k = 1;
    while !q.is_zero() {
        let v = q.eval(t);
        if !v.approx_eq(&S::zero(), scale * inv_len.powi(k)) {
            return if v > S::zero() { 1 } else { -1 };
        }
        q = q.derivative();
        k += 1;
    }
    0
}

/// Sign of `p′` just to the left of local coordinate `t`.
fn slope_sign_left<S: Scalar>(p: &crate::poly::Polynomial<S>, t: &S, scale: f64, inv_len: f64) -> i8 {
    let mut q = p.derivative();
    let mut k = 1;
    // Approaching from the left flips the sign of odd-order terms.
    let mut flip = false;
    while !q.is_zero() {
        let v = q.eval(t);
        if !v.approx_eq(&S::zero(), scale * inv_len.powi(k)) {
            let s = if v > S::zero() { 1 } else { -1 };
            return if flip { -s } else { s };
        }
        q = q.derivative();
        k += 1;
        flip = !flip;
    }
    0
}

fn mode<S: Scalar>(d: &DensityOfStates<S>) -> f64 {
    let density = d.density();
    let knots = density.knots();
    let scale = d.peak_estimate();
    let inv_len = d.n() as f64 / (d.e_max() - d.e_min());
    for (j, piece) in density.pieces().iter().enumerate() {
        let start = S::zero();
        if slope_sign_right(piece, &start, scale, inv_len) <= 0 {
            return knots[j].to_f64();
        }
        let width = density.width(j);
        if slope_sign_left(piece, &width, scale, inv_len) > 0 {
            continue;
        }
        // Root of Ω′ in (knot_j, knot_{j+1}]: bisect on doubles with signs
        // evaluated in the backing arithmetic.
        let dp = piece.derivative();
        let origin = &knots[j];
        let mut lo = knots[j].to_f64();
        let mut hi = knots[j + 1].to_f64();
        loop {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = dp.eval(&(S::from_f64(mid) - origin.clone()));
            if v > S::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return hi;
    }
    d.e_max()
}

/// `ΔH` from `(ΔH)² = (n+1)/Ω(E) ∫_{E_min}^{E} (H̄ − u) Ω(u) du`.
///
/// Because the full-range integral vanishes, the complementary integral over
/// `[E, E_max]` is used above `H̄`, which avoids cancellation near the top of
/// the spectrum.
pub fn energy_uncertainty<S: Scalar>(d: &DensityOfStates<S>, e: f64) -> Result<f64> {
    if !(e >= d.e_min() && e <= d.e_max()) {
        return Err(Error::Domain(format!(
            "E = {e} is outside [{}, {}]",
            d.e_min(),
            d.e_max()
        )));
    }
    if e == d.e_min() || e == d.e_max() {
        return Ok(0.0);
    }
    let x = S::from_f64(e);
    let m = d.density_exact(&x, 0, None);
    if !(m > S::zero()) {
        return Err(Error::Domain(format!("Ω({e}) is not positive")));
    }
    let mean = d.mean_energy_exact();
    let lo = d.e_min_exact();
    let hi = d.e_max_exact();
    let integral = if x <= mean {
        mean.clone() * d.integrate_moment_exact(&lo, &x, 0) - d.integrate_moment_exact(&lo, &x, 1)
    } else {
        d.integrate_moment_exact(&x, &hi, 1) - mean * d.integrate_moment_exact(&x, &hi, 0)
    };
    let radicand = (S::from_usize(d.spectrum().dimension()) * integral / m).to_f64();
    let span = d.e_max() - d.e_min();
    if radicand < -1e-12 * span * span {
        return Err(Error::InternalConsistency(format!(
            "negative (ΔH)² = {radicand} at E = {e}"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// `min(1, Var / (N x² ⟨H⟩²))`: Chebyshev bound on the relative deviation of
/// the total energy of `N` independent constituents.
pub fn chebyshev_bound(count: u64, x: f64, mean: f64, variance: f64) -> Result<f64> {
    if count == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("x must be positive, got {x}")));
    }
    if mean == 0.0 || !mean.is_finite() {
        return Err(Error::InvalidArgument(
            "relative deviation undefined for zero mean energy".into(),
        ));
    }
    if !(variance >= 0.0) {
        return Err(Error::InvalidArgument(format!("variance must be >= 0, got {variance}")));
    }
    Ok((variance / (count as f64 * x * x * mean * mean)).min(1.0))
}
