//! The microcanonical density of states `Ω(E)` as an exact piecewise
//! polynomial.
//!
//! Under the uniform (unitarily invariant) measure on the projective state
//! space of an `(n+1)`-level system, the squared amplitudes `p_k` in the
//! energy eigenbasis are uniform on the probability simplex, and
//! `⟨Ĥ⟩ = Σ p_k E_k`. The density of that linear statistic is the normalised
//! B-spline
//!
//! ```text
//! M(E) = n · [E_1, …, E_{n+1}] (· − E)_+^{n−1}
//! ```
//!
//! taken over the eigenvalues counted with multiplicity, and
//! `Ω(E) = (π^n / n!) · M(E)`. Repeated eigenvalues become repeated nodes of
//! the divided difference, so degenerate and nondegenerate spectra share one
//! code path.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::divdiff::residue_weights;
use crate::error::{Error, Result};
use crate::poly::{PiecewisePolynomial, Polynomial};
use crate::scalar::{binomial, factorial_f64, Backing, Rational, Scalar};
use crate::spectrum::{Level, Spectrum};
use crate::SCHEMA_VERSION;

/// Which one-sided limit to take at a knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Approach from lower energy (cooling towards the knot from above is the
    /// other side).
    #[default]
    Left,
    Right,
}

/// `π^n / n!`, the volume of complex projective `n`-space.
pub fn phase_space_volume(n: usize) -> f64 {
    std::f64::consts::PI.powi(n as i32) / factorial_f64(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOfStates<S = f64> {
    spectrum: Spectrum,
    /// Probability density of `⟨Ĥ⟩`; integrates to one.
    density: PiecewisePolynomial<S>,
    volume: f64,
}

/// Float-backed construction.
pub fn density_of_states(s: &Spectrum) -> Result<DensityOfStates<f64>> {
    DensityOfStates::build(s)
}

/// Exact rational construction.
pub fn density_of_states_exact(s: &Spectrum) -> Result<DensityOfStates<Rational>> {
    DensityOfStates::build(s)
}

impl<S: Scalar> DensityOfStates<S> {
    pub fn build(spectrum: &Spectrum) -> Result<Self> {
        let dimension = spectrum.dimension();
        if dimension < 2 {
            return Err(Error::InvalidArgument("need n + 1 >= 2".into()));
        }
        if spectrum.distinct() < 2 {
            return Err(Error::DegenerateSpectrum(dimension));
        }
        let n = spectrum.n();
        // Every f64 is a dyadic rational, so the pieces are always built
        // exactly; the float backing rounds the finished coefficients.
        // Divided differences of truncated powers in floating point lose
        // most of their digits once n is around ten.
        let points: Vec<(Rational, usize)> = spectrum
            .levels()
            .iter()
            .map(|l| (Rational::from_f64(l.energy), l.multiplicity))
            .collect();
        let knots: Vec<Rational> = points.iter().map(|p| p.0.clone()).collect();
        let weights = residue_weights(&points);
        let origin = knots[0].clone();

        // With x = E − E_min, level j contributes on every piece to its left
        //   n Σ_q w_j[δ_j−1−q] C(n−1, q) (c_j − x)^{n−1−q},  c_j = z_j − E_min,
        // the jet of (u − E)^{n−1} at u = z_j against its residue weights.
        let contribution = |j: usize| -> Polynomial<Rational> {
            let (z, dj) = &points[j];
            let c = z.clone() - origin.clone();
            let mut total = Polynomial::zero();
            for q in 0..*dj {
                let scale = Rational::from_usize(n)
                    * binomial::<Rational>(n - 1, q)
                    * weights[j][dj - 1 - q].clone();
                let reflected = Polynomial::shifted_power(&-c.clone(), n - 1 - q);
                // (c − x)^k = (−1)^k (x − c)^k
                let sign = if (n - 1 - q) % 2 == 1 { -scale } else { scale };
                let term = Polynomial::new(reflected.coeffs().iter().map(|v| v.clone() * sign.clone()).collect());
                total = total.add(&term);
            }
            total
        };
        let mut suffix = Polynomial::zero();
        let mut global = vec![Polynomial::zero(); knots.len() - 1];
        for j in (1..knots.len()).rev() {
            suffix = suffix.add(&contribution(j));
            global[j - 1] = suffix.clone();
        }
        let pieces: Vec<Polynomial<Rational>> = global
            .iter()
            .enumerate()
            .map(|(i, g)| g.taylor_shift(&(knots[i].clone() - origin.clone())))
            .collect();
        let mirrored: Vec<Polynomial<Rational>> = global
            .iter()
            .enumerate()
            .map(|(i, g)| g.taylor_shift(&(knots[i + 1].clone() - origin.clone())))
            .collect();

        let exact = PiecewisePolynomial::with_mirrored(knots, pieces, mirrored);
        let last = exact.knots().len() - 1;
        let total = exact.integrate_moment(&exact.knots()[0], &exact.knots()[last], 0);
        if !(total > Rational::zero()) {
            return Err(Error::InternalConsistency(format!(
                "density integrates to {:?}",
                total.to_f64()
            )));
        }
        let round = |polys: &[Polynomial<Rational>]| -> Vec<Polynomial<S>> {
            polys
                .iter()
                .map(|p| Polynomial::new(p.coeffs().iter().map(|c| S::from_rational(&(c / &total))).collect()))
                .collect()
        };
        let knots = exact.knots().iter().map(S::from_rational).collect();
        let density = PiecewisePolynomial::with_mirrored(knots, round(exact.pieces()), round(exact.mirrored()));

        Ok(DensityOfStates {
            spectrum: spectrum.clone(),
            density,
            volume: phase_space_volume(n),
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// The normalised density `M = Ω / volume` of the energy expectation.
    pub fn density(&self) -> &PiecewisePolynomial<S> {
        &self.density
    }

    /// `π^n / n!`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    pub fn backing(&self) -> Backing {
        S::BACKING
    }

    pub fn e_min(&self) -> f64 {
        self.spectrum.e_min()
    }

    pub fn e_max(&self) -> f64 {
        self.spectrum.e_max()
    }

    pub fn e_min_exact(&self) -> S {
        self.density.knots()[0].clone()
    }

    pub fn e_max_exact(&self) -> S {
        self.density.knots()[self.density.knots().len() - 1].clone()
    }

    /// `tr Ĥ / (n + 1)` in the backing arithmetic.
    pub fn mean_energy_exact(&self) -> S {
        let total = self
            .spectrum
            .levels()
            .iter()
            .fold(S::zero(), |acc, l| acc + S::from_usize(l.multiplicity) * S::from_f64(l.energy));
        total / S::from_usize(self.spectrum.dimension())
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order + 1 > self.n() {
            return Err(Error::InvalidArgument(format!(
                "derivative order {order} exceeds n - 1 = {}",
                self.n() as i64 - 1
            )));
        }
        Ok(())
    }

    /// `d^order Ω / dE^order`, right-continuous at interior knots.
    pub fn evaluate(&self, e: f64, order: usize) -> Result<f64> {
        self.check_order(order)?;
        Ok(self.volume * self.density.eval_derivative(&S::from_f64(e), order).to_f64())
    }

    pub fn evaluate_left(&self, e: f64, order: usize) -> Result<f64> {
        self.check_order(order)?;
        Ok(self.volume * self.density.eval_left(&S::from_f64(e), order).to_f64())
    }

    pub fn evaluate_right(&self, e: f64, order: usize) -> Result<f64> {
        self.check_order(order)?;
        Ok(self.volume * self.density.eval_right(&S::from_f64(e), order).to_f64())
    }

    /// Derivative of the normalised density `M`, in backing arithmetic.
    /// `side` selects a one-sided limit; `None` means the right-continuous
    /// value.
    pub fn density_exact(&self, e: &S, order: usize, side: Option<Side>) -> S {
        match side {
            None => self.density.eval_derivative(e, order),
            Some(Side::Left) => self.density.eval_left(e, order),
            Some(Side::Right) => self.density.eval_right(e, order),
        }
    }

    /// `∫_a^b u^power Ω(u) du`, limits clamped to the support.
    pub fn integrate_moment(&self, a: f64, b: f64, power: usize) -> Result<f64> {
        if !(a <= b) {
            return Err(Error::InvalidArgument(format!("integration limits reversed: {a} > {b}")));
        }
        if power > 2 {
            return Err(Error::InvalidArgument(format!("moment power {power} > 2")));
        }
        Ok(self.volume * self.integrate_moment_exact(&S::from_f64(a), &S::from_f64(b), power).to_f64())
    }

    /// `∫_a^b u^power M(u) du` in backing arithmetic, any power.
    pub fn integrate_moment_exact(&self, a: &S, b: &S, power: usize) -> S {
        self.density.integrate_moment(a, b, power)
    }

    /// Continuity order and next-derivative jump at each interior knot,
    /// from adjacent piece coefficients.
    pub fn smoothness_report(&self) -> Vec<SmoothnessEntry> {
        let knots = self.density.knots();
        let n = self.n();
        let span = (self.e_max() - self.e_min()).max(f64::MIN_POSITIVE);
        let peak = self.peak_estimate();
        (1..knots.len() - 1)
            .map(|j| {
                let at = &knots[j];
                let mut continuity: i32 = n as i32 - 1;
                let mut jump = 0.0;
                for order in 0..n {
                    let left = self.density.eval_piece(j - 1, at, order);
                    let right = self.density.eval_piece(j, at, order);
                    let scale = peak * (n as f64 / span).powi(order as i32);
                    if !left.approx_eq(&right, scale) {
                        continuity = order as i32 - 1;
                        jump = self.volume * (right - left).to_f64();
                        break;
                    }
                }
                SmoothnessEntry {
                    knot: self.spectrum.levels()[j].energy,
                    multiplicity: self.spectrum.levels()[j].multiplicity,
                    continuity_order: continuity,
                    jump,
                }
            })
            .collect()
    }

    /// Largest of `|M|` at knots and piece midpoints.
    pub(crate) fn peak_estimate(&self) -> f64 {
        let knots = self.density.knots();
        let two = S::from_i64(2);
        (0..knots.len() - 1)
            .flat_map(|j| {
                let mid = (knots[j].clone() + knots[j + 1].clone()) / two.clone();
                [
                    self.density.eval_piece(j, &knots[j], 0),
                    self.density.eval_piece(j, &mid, 0),
                    self.density.eval_piece(j, &knots[j + 1], 0),
                ]
            })
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = DosDocument {
            schema_version: SCHEMA_VERSION,
            kind: DOS_KIND.to_string(),
            backing: S::BACKING,
            levels: self
                .spectrum
                .levels()
                .iter()
                .map(|l| (l.energy, l.multiplicity))
                .collect(),
            knots: self.density.knots().iter().map(Scalar::encode).collect(),
            pieces: self
                .density
                .pieces()
                .iter()
                .map(|p| p.coeffs().iter().map(Scalar::encode).collect())
                .collect(),
            mirrored: self
                .density
                .mirrored()
                .iter()
                .map(|p| p.coeffs().iter().map(Scalar::encode).collect())
                .collect(),
            normalization: self.volume,
        };
        serde_json::to_value(doc).expect("serializable")
    }

    /// Reloads a document written by [`to_json`](Self::to_json) with the
    /// same backing. Coefficients are restored bit for bit.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: DosDocument = serde_json::from_value(value.clone())?;
        if doc.kind != DOS_KIND {
            return Err(Error::Parse(format!("expected kind {DOS_KIND:?}, got {:?}", doc.kind)));
        }
        if doc.backing != S::BACKING {
            return Err(Error::Parse(format!(
                "document backing is {}, requested {}",
                doc.backing,
                S::BACKING
            )));
        }
        let spectrum = Spectrum::new(
            doc.levels
                .iter()
                .map(|&(energy, multiplicity)| Level { energy, multiplicity })
                .collect(),
        )?;
        let knots = doc.knots.iter().map(|k| S::decode(k)).collect::<Result<Vec<_>>>()?;
        if knots.len() != spectrum.distinct()
            || knots.iter().zip(spectrum.levels()).any(|(k, l)| k.to_f64() != l.energy)
        {
            return Err(Error::Parse("knots do not match levels".into()));
        }
        if doc.pieces.len() + 1 != knots.len() {
            return Err(Error::Parse("piece count must be knot count - 1".into()));
        }
        if doc.mirrored.len() != doc.pieces.len() {
            return Err(Error::Parse("one mirrored piece per piece required".into()));
        }
        let decode = |polys: &[Vec<String>]| {
            polys
                .iter()
                .map(|p| p.iter().map(|c| S::decode(c)).collect::<Result<Vec<_>>>().map(Polynomial::new))
                .collect::<Result<Vec<_>>>()
        };
        let pieces = decode(&doc.pieces)?;
        let mirrored = decode(&doc.mirrored)?;
        let volume = phase_space_volume(spectrum.n());
        Ok(DensityOfStates {
            spectrum,
            density: PiecewisePolynomial::with_mirrored(knots, pieces, mirrored),
            volume,
        })
    }
}

pub const DOS_KIND: &str = "density_of_states";

#[derive(Debug, Serialize, Deserialize)]
struct DosDocument {
    schema_version: u32,
    kind: String,
    backing: Backing,
    levels: Vec<(f64, usize)>,
    knots: Vec<String>,
    pieces: Vec<Vec<String>>,
    /// The same pieces expanded about their right knots.
    mirrored: Vec<Vec<String>>,
    normalization: f64,
}

/// Reads the `backing` field of a serialized density of states.
pub fn document_backing(value: &serde_json::Value) -> Result<Backing> {
    let backing = value
        .get("backing")
        .ok_or_else(|| Error::Parse("missing backing".into()))?;
    Ok(serde_json::from_value(backing.clone())?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessEntry {
    pub knot: f64,
    pub multiplicity: usize,
    /// Largest `c` with derivatives `0..=c` continuous; `-1` for a jump in
    /// the value itself.
    pub continuity_order: i32,
    /// Jump (right minus left) of derivative `c + 1` of `Ω`.
    pub jump: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::build_uniform_ladder;
    use std::f64::consts::PI;

    fn ladder(n: usize) -> Spectrum {
        build_uniform_ladder(n, 1.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn two_level_is_constant_pi() {
        let d = density_of_states(&ladder(1)).unwrap();
        for e in [0.0, 0.3, 0.999] {
            assert!(close(d.evaluate(e, 0).unwrap(), PI, 1e-15));
        }
        assert_eq!(d.evaluate(1.5, 0).unwrap(), 0.0);
        assert!(close(d.integrate_moment(0.0, 0.5, 0).unwrap(), PI / 2.0, 1e-15));
    }

    #[test]
    fn three_level_tent() {
        let d = density_of_states_exact(&ladder(2)).unwrap();
        assert!(close(d.evaluate(0.5, 0).unwrap(), PI * PI / 4.0, 1e-15));
        assert!(close(d.evaluate_left(1.0, 0).unwrap(), PI * PI / 2.0, 1e-15));
        assert!(close(d.evaluate_right(1.0, 0).unwrap(), PI * PI / 2.0, 1e-15));
        assert!(close(d.evaluate(1.5, 0).unwrap(), PI * PI / 4.0, 1e-15));
        // M = E on [0,1], 2 − E on [1,2].
        let pieces = d.density().pieces();
        assert_eq!(pieces[0].coeffs(), &[Rational::from_i64(0), Rational::from_i64(1)]);
        assert_eq!(pieces[1].coeffs(), &[Rational::from_i64(1), Rational::from_i64(-1)]);
    }

    #[test]
    fn four_level_values() {
        let d = density_of_states_exact(&ladder(3)).unwrap();
        let pi3 = PI.powi(3);
        assert!(close(d.evaluate(1.5, 0).unwrap(), pi3 / 8.0, 1e-15));
        // First piece (π³/2)·E²/6, so Ω″ = π³/6.
        assert!(close(d.evaluate(0.5, 0).unwrap(), pi3 / 12.0 * 0.25, 1e-15));
        assert!(close(d.evaluate(0.5, 2).unwrap(), pi3 / 6.0, 1e-15));
        assert_eq!(d.evaluate(-1.0, 0).unwrap(), 0.0);
        assert!(matches!(d.evaluate(0.5, 3), Err(Error::InvalidArgument(_))));
        assert!(close(d.integrate_moment(-5.0, 5.0, 0).unwrap(), pi3 / 6.0, 1e-15));
        assert!(close(d.integrate_moment(-5.0, 5.0, 1).unwrap(), pi3 / 6.0 * 1.5, 1e-15));
        assert!(d.integrate_moment(1.0, 0.0, 0).is_err());
        assert!(d.integrate_moment(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn degenerate_ground_pair() {
        let s = Spectrum::from_pairs(&[(0.0, 2), (1.0, 1)]).unwrap();
        let d = density_of_states_exact(&s).unwrap();
        // Ω = π²(1 − E).
        assert_eq!(
            d.density().pieces()[0].coeffs(),
            &[Rational::from_i64(2), Rational::from_i64(-2)]
        );
        assert!(close(d.evaluate(0.25, 0).unwrap(), PI * PI * 0.75, 1e-15));
    }

    #[test]
    fn all_levels_equal_is_rejected() {
        let s = Spectrum::from_pairs(&[(0.0, 3)]).unwrap();
        assert_eq!(density_of_states(&s).unwrap_err(), Error::DegenerateSpectrum(3));
    }

    #[test]
    fn smoothness_examples() {
        let d = density_of_states_exact(&ladder(3)).unwrap();
        let report = d.smoothness_report();
        assert_eq!(report.len(), 2);
        assert!(report.iter().all(|r| r.continuity_order == 1 && r.jump != 0.0));

        let d = density_of_states_exact(&ladder(2)).unwrap();
        let report = d.smoothness_report();
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].continuity_order, 0);
        assert!(close(report[0].jump, -PI * PI, 1e-15));

        let s = Spectrum::from_pairs(&[(0.0, 1), (1.0, 2), (2.0, 1), (3.0, 1)]).unwrap();
        let report = density_of_states_exact(&s).unwrap().smoothness_report();
        let orders: Vec<(f64, i32)> = report.iter().map(|r| (r.knot, r.continuity_order)).collect();
        assert_eq!(orders, vec![(1.0, 1), (2.0, 2)]);
        let report = density_of_states(&s).unwrap().smoothness_report();
        let orders: Vec<i32> = report.iter().map(|r| r.continuity_order).collect();
        assert_eq!(orders, vec![1, 2]);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let s = Spectrum::from_pairs(&[(-0.3, 1), (0.1, 2), (0.7, 1), (2.25, 3)]).unwrap();
        let d = density_of_states_exact(&s).unwrap();
        let text = d.to_json().to_string();
        let back = DensityOfStates::<Rational>::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, d);

        let f = density_of_states(&s).unwrap();
        let text = f.to_json().to_string();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(document_backing(&value).unwrap(), Backing::Float);
        assert_eq!(DensityOfStates::<f64>::from_json(&value).unwrap(), f);
        assert!(DensityOfStates::<Rational>::from_json(&value).is_err());
    }
}
