//! Diagonal of the microcanonical density matrix in the energy eigenbasis.
//!
//! The weight of eigenstate `k` is the conditional mean of its simplex
//! coordinate given `Σ p_j E_j = E`. Multiplying the flat Dirichlet density
//! by `p_k` gives, up to `1/(n+1)`, the Dirichlet density with that
//! coordinate's parameter raised to two, whose linear image is the B-spline
//! with `E_k` repeated once more. Hence
//!
//! ```text
//! w_k(E) = [E_1, …, E_{n+1}, E_k] (· − E)_+^n  /  (n · [E_1, …, E_{n+1}] (· − E)_+^{n−1})
//! ```

use crate::divdiff::{residue_weights, truncated_power_jet};
use crate::dos::DensityOfStates;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::spectrum::Spectrum;

/// One weight per eigenstate (levels expanded by multiplicity, ascending),
/// in backing arithmetic. Near the edges of the support the float backing
/// loses digits to cancellation; [`microcanonical_weights`] avoids this.
pub fn microcanonical_weights_exact<S: Scalar>(d: &DensityOfStates<S>, e: &S) -> Result<Vec<S>> {
    if !(*e > d.e_min_exact() && *e < d.e_max_exact()) {
        return Err(Error::Domain(format!(
            "E = {} is outside the open support ({}, {})",
            e.to_f64(),
            d.e_min(),
            d.e_max()
        )));
    }
    weights_at(d.spectrum(), e)
}

fn weights_at<S: Scalar>(spectrum: &Spectrum, e: &S) -> Result<Vec<S>> {
    let n = spectrum.n();
    let points: Vec<(S, usize)> =
        spectrum.levels().iter().map(|l| (S::from_f64(l.energy), l.multiplicity)).collect();
    let denominator = S::from_usize(n) * truncated_power_dd(&points, e, n - 1);
    if !(denominator > S::zero()) {
        return Err(Error::Domain(format!("Ω({}) is not positive", e.to_f64())));
    }

    let mut weights = Vec::with_capacity(spectrum.dimension());
    for (k, level) in spectrum.levels().iter().enumerate() {
        let mut extended = points.clone();
        extended[k].1 += 1;
        let w = truncated_power_dd(&extended, e, n) / denominator.clone();
        weights.extend(std::iter::repeat_n(w, level.multiplicity));
    }
    Ok(weights)
}

/// `[nodes] (· − e)_+^power` through residue weights; only nodes above `e`
/// contribute.
fn truncated_power_dd<S: Scalar>(points: &[(S, usize)], e: &S, power: usize) -> S {
    let residues = residue_weights(points);
    let jet = truncated_power_jet(e.clone(), power);
    points
        .iter()
        .zip(&residues)
        .filter(|((z, _), _)| z > e)
        .fold(S::zero(), |acc, ((z, d), w)| {
            (0..*d).fold(acc, |acc, r| acc + w[r].clone() * jet(z, d - 1 - r))
        })
}

/// Weights rounded to `f64`, always evaluated in exact arithmetic.
pub fn microcanonical_weights<S: Scalar>(d: &DensityOfStates<S>, e: f64) -> Result<Vec<f64>> {
    if !(e > d.e_min() && e < d.e_max()) {
        return Err(Error::Domain(format!(
            "E = {e} is outside the open support ({}, {})",
            d.e_min(),
            d.e_max()
        )));
    }
    Ok(weights_at(d.spectrum(), &Rational::from_f64(e))?.iter().map(Scalar::to_f64).collect())
}
