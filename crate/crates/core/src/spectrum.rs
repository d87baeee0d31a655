//! Finite quantum spectra: distinct energy levels with multiplicities.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod jacobi;

/// Largest matrix accepted by [`eigenvalues_of_hermitian`].
pub const DEFAULT_MATRIX_CAP: usize = 64;

/// Default merge tolerance relative to the spectral range.
pub const DEFAULT_RELATIVE_MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
}

/// Sorted distinct eigenvalues with multiplicities.
///
/// Invariants: energies finite and strictly increasing, multiplicities at
/// least one, total dimension at least two.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    levels: Vec<Level>,
    dimension: usize,
}

impl Spectrum {
    pub fn new(levels: Vec<Level>) -> Result<Self> {
        if levels.iter().any(|l| !l.energy.is_finite()) {
            return Err(Error::InvalidArgument("energies must be finite".into()));
        }
        if levels.iter().any(|l| l.multiplicity == 0) {
            return Err(Error::InvalidArgument("multiplicities must be positive".into()));
        }
        if levels.windows(2).any(|w| w[0].energy >= w[1].energy) {
            return Err(Error::InvalidArgument(
                "level energies must be strictly increasing".into(),
            ));
        }
        let dimension: usize = levels.iter().map(|l| l.multiplicity).sum();
        if dimension < 2 {
            return Err(Error::InvalidArgument(format!(
                "Hilbert space dimension must be at least 2, got {dimension}"
            )));
        }
        Ok(Spectrum { levels, dimension })
    }

    /// Builds from `(energy, multiplicity)` pairs.
    pub fn from_pairs(pairs: &[(f64, usize)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(energy, multiplicity)| Level { energy, multiplicity })
                .collect(),
        )
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Total Hilbert-space dimension `n + 1`.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `n`, the complex dimension of the projective state space.
    pub fn n(&self) -> usize {
        self.dimension - 1
    }

    /// Number of distinct levels.
    pub fn distinct(&self) -> usize {
        self.levels.len()
    }

    pub fn e_min(&self) -> f64 {
        self.levels[0].energy
    }

    pub fn e_max(&self) -> f64 {
        self.levels[self.levels.len() - 1].energy
    }

    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.levels
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.energy, l.multiplicity))
            .collect()
    }

    /// `tr Ĥ / (n + 1)`.
    pub fn mean_energy(&self) -> f64 {
        // Accumulate offsets from the ground level so that shifting the
        // spectrum shifts the mean without extra rounding.
        let e0 = self.e_min();
        let offset: f64 = self
            .levels
            .iter()
            .map(|l| l.multiplicity as f64 * (l.energy - e0))
            .sum();
        e0 + offset / self.dimension as f64
    }

    /// Applies `E ↦ aE + b`. Negative `a` reverses the level order.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if a == 0.0 {
            return Err(Error::InvalidArgument("affine scale must be nonzero".into()));
        }
        let mut levels: Vec<Level> = self
            .levels
            .iter()
            .map(|l| Level {
                energy: a * l.energy + b,
                multiplicity: l.multiplicity,
            })
            .collect();
        if a < 0.0 {
            levels.reverse();
        }
        Self::new(levels)
    }
}

/// `E_k = ε (k − 1)` for `k = 1..=n+1`, all nondegenerate.
pub fn build_uniform_ladder(n: usize, epsilon: f64) -> Result<Spectrum> {
    if n < 1 {
        return Err(Error::InvalidArgument("ladder needs n >= 1".into()));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ladder spacing must be positive, got {epsilon}"
        )));
    }
    Spectrum::new(
        (0..=n)
            .map(|k| Level {
                energy: epsilon * k as f64,
                multiplicity: 1,
            })
            .collect(),
    )
}

/// Spectrum of the cyclic three-spin chain `Ĥ = −J Σ σᶻₖσᶻₖ₊₁ − B Σ σᶻₖ`
/// (site 4 ≡ site 1), obtained by enumerating the eight `σᶻ` configurations.
pub fn build_ising_chain(j: f64, b: f64) -> Result<Spectrum> {
    if !j.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument("J and B must be finite".into()));
    }
    let energies: Vec<f64> = (0..8u32)
        .map(|bits| {
            let s: [f64; 3] = std::array::from_fn(|k| if bits >> k & 1 == 1 { -1.0 } else { 1.0 });
            let bond: f64 = (0..3).map(|k| s[k] * s[(k + 1) % 3]).sum();
            let field: f64 = s.iter().sum();
            -j * bond - b * field
        })
        .collect();
    let scale = 3.0 * (j.abs() + b.abs());
    from_eigenvalues(&energies, 1e-12 * scale)
}

/// Sorts `values` and merges runs whose consecutive gaps are at most
/// `tolerance` into single levels placed at the run's mean.
pub fn from_eigenvalues(values: &[f64], tolerance: f64) -> Result<Spectrum> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 eigenvalues, got {}",
            values.len()
        )));
    }
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidArgument("merge tolerance must be >= 0".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("eigenvalues must be finite".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut levels = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tolerance {
            let group = &sorted[start..i];
            let base = group[0];
            let offset: f64 = group.iter().map(|v| v - base).sum();
            levels.push(Level {
                energy: base + offset / group.len() as f64,
                multiplicity: group.len(),
            });
            start = i;
        }
    }
    Spectrum::new(levels)
}

/// Merge tolerance used when the caller does not supply one.
pub fn default_merge_tolerance(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi > lo {
        DEFAULT_RELATIVE_MERGE_TOL * (hi - lo)
    } else {
        0.0
    }
}

pub fn mean_energy(s: &Spectrum) -> f64 {
    s.mean_energy()
}

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dimension: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Checks Hermiticity to `1e-12` relative to the largest entry.
    pub fn new(dimension: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        if entries.len() != dimension * dimension {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries, got {}",
                dimension * dimension,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = 1e-12 * scale;
        for i in 0..dimension {
            for k in i..dimension {
                let a = entries[i * dimension + k];
                let b = entries[k * dimension + i];
                if (a - b.conj()).norm() > tol {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not Hermitian at ({i}, {k})"
                    )));
                }
            }
        }
        Ok(HermitianMatrix { dimension, entries })
    }

    pub fn from_real(dimension: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            dimension,
            entries.iter().map(|&re| Complex64::new(re, 0.0)).collect(),
        )
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let d = values.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for (i, &v) in values.iter().enumerate() {
            entries[i * d + i] = Complex64::new(v, 0.0);
        }
        Self::new(d, entries)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entry(&self, i: usize, k: usize) -> Complex64 {
        self.entries[i * self.dimension + k]
    }
}

/// Eigenvalues of `h` by cyclic Jacobi rotations, merged as in
/// [`from_eigenvalues`].
pub fn eigenvalues_of_hermitian(h: &HermitianMatrix, multiplicity_tolerance: f64) -> Result<Spectrum> {
    eigenvalues_of_hermitian_capped(h, multiplicity_tolerance, DEFAULT_MATRIX_CAP)
}

pub fn eigenvalues_of_hermitian_capped(
    h: &HermitianMatrix,
    multiplicity_tolerance: f64,
    cap: usize,
) -> Result<Spectrum> {
    if h.dimension > cap {
        return Err(Error::Unsupported(format!(
            "matrix dimension {} exceeds cap {cap}",
            h.dimension
        )));
    }
    let values = jacobi::hermitian_eigenvalues(h);
    from_eigenvalues(&values, multiplicity_tolerance)
}

/// Parses the spectrum file format: either a JSON object
/// `{"levels": [[energy, multiplicity], ...]}` or text lines of
/// `energy multiplicity` with `#` comments.
pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        #[derive(Deserialize)]
        struct File {
            levels: Vec<(f64, usize)>,
        }
        let file: File = serde_json::from_str(text)?;
        return Spectrum::from_pairs(&file.levels);
    }
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: expected `energy multiplicity`", lineno + 1));
        if fields.len() != 2 {
            return Err(bad());
        }
        let energy: f64 = fields[0].parse().map_err(|_| bad())?;
        let mult: usize = fields[1].parse().map_err(|_| bad())?;
        pairs.push((energy, mult));
    }
    Spectrum::from_pairs(&pairs)
}

/// JSON form of the spectrum file format.
pub fn spectrum_to_json(s: &Spectrum) -> serde_json::Value {
    let levels: Vec<(f64, usize)> = s.levels.iter().map(|l| (l.energy, l.multiplicity)).collect();
    serde_json::json!({ "levels": levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(s: &Spectrum) -> Vec<(f64, usize)> {
        s.levels().iter().map(|l| (l.energy, l.multiplicity)).collect()
    }

    #[test]
    fn ladder_examples() {
        assert_eq!(
            pairs(&build_uniform_ladder(3, 1.0).unwrap()),
            vec![(0.0, 1), (1.0, 1), (2.0, 1), (3.0, 1)]
        );
        assert_eq!(pairs(&build_uniform_ladder(1, 1.0).unwrap()), vec![(0.0, 1), (1.0, 1)]);
        let half = build_uniform_ladder(5, 0.5).unwrap();
        assert_eq!(half.eigenvalues(), vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5]);
        assert!(build_uniform_ladder(0, 1.0).is_err());
        assert!(build_uniform_ladder(3, 0.0).is_err());
        assert!(build_uniform_ladder(3, -1.0).is_err());
    }

    #[test]
    fn ising_examples() {
        assert_eq!(
            pairs(&build_ising_chain(0.25, 1.0).unwrap()),
            vec![(-3.75, 1), (-0.75, 3), (1.25, 3), (2.25, 1)]
        );
        assert_eq!(pairs(&build_ising_chain(0.0, 0.0).unwrap()), vec![(0.0, 8)]);
        // (+++) and (−−−) give −3J; every other configuration has one
        // broken pair of bonds and gives +J.
        assert_eq!(pairs(&build_ising_chain(1.0, 0.0).unwrap()), vec![(-3.0, 2), (1.0, 6)]);
    }

    #[test]
    fn eigenvalue_merging() {
        let s = from_eigenvalues(&[0.0, 1.0, 1.0, 2.0, 3.0], 0.0).unwrap();
        assert_eq!(pairs(&s), vec![(0.0, 1), (1.0, 2), (2.0, 1), (3.0, 1)]);
        let s = from_eigenvalues(&[3.0, 0.0, 1.0, 2.0], 0.0).unwrap();
        assert_eq!(s.eigenvalues(), vec![0.0, 1.0, 2.0, 3.0]);
        let s = from_eigenvalues(&[0.0, 1e-13, 1.0], 1e-9).unwrap();
        assert_eq!(pairs(&s), vec![(5e-14, 2), (1.0, 1)]);
        assert!(from_eigenvalues(&[1.0], 0.0).is_err());
        assert!(from_eigenvalues(&[1.0, f64::NAN], 0.0).is_err());
    }

    #[test]
    fn exact_duplicates_keep_their_value() {
        let s = from_eigenvalues(&[0.1, 0.1, 0.1, 0.7], 1e-12).unwrap();
        assert_eq!(pairs(&s), vec![(0.1, 3), (0.7, 1)]);
    }

    #[test]
    fn mean_energy_examples() {
        assert_eq!(build_uniform_ladder(3, 1.0).unwrap().mean_energy(), 1.5);
        let s = Spectrum::from_pairs(&[(0.0, 2), (1.0, 1)]).unwrap();
        assert!((s.mean_energy() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(build_ising_chain(0.25, 1.0).unwrap().mean_energy(), 0.0);
    }

    #[test]
    fn invalid_spectra() {
        assert!(Spectrum::from_pairs(&[(0.0, 1)]).is_err());
        assert!(Spectrum::from_pairs(&[(1.0, 1), (0.0, 1)]).is_err());
        assert!(Spectrum::from_pairs(&[(0.0, 1), (0.0, 1)]).is_err());
        assert!(Spectrum::from_pairs(&[(0.0, 0), (1.0, 2)]).is_err());
        assert!(Spectrum::from_pairs(&[(0.0, 2)]).is_ok());
    }

    #[test]
    fn hermitian_examples() {
        let s = eigenvalues_of_hermitian(&HermitianMatrix::diagonal(&[0.0, 1.0, 2.0, 3.0]).unwrap(), 0.0)
            .unwrap();
        assert_eq!(s.eigenvalues(), vec![0.0, 1.0, 2.0, 3.0]);

        let x = HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = eigenvalues_of_hermitian(&x, 1e-12).unwrap();
        let ev = s.eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);

        // Pauli-y: complex off-diagonals.
        let y = HermitianMatrix::new(
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let ev = eigenvalues_of_hermitian(&y, 1e-12).unwrap().eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ising_matrix_matches_builder() {
        let energies: Vec<f64> = (0..8u32)
            .map(|bits| {
                let s: Vec<f64> = (0..3).map(|k| if bits >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
                -0.25 * (s[0] * s[1] + s[1] * s[2] + s[2] * s[0]) - (s[0] + s[1] + s[2])
            })
            .collect();
        let h = HermitianMatrix::diagonal(&energies).unwrap();
        let s = eigenvalues_of_hermitian(&h, 1e-12).unwrap();
        assert_eq!(s, build_ising_chain(0.25, 1.0).unwrap());
    }

    #[test]
    fn non_hermitian_and_oversized_rejected() {
        assert!(matches!(
            HermitianMatrix::from_real(2, &[0.0, 1.0, 2.0, 0.0]),
            Err(Error::InvalidArgument(_))
        ));
        let complex_diag = HermitianMatrix::new(
            2,
            vec![
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(complex_diag.is_err());
        let big = HermitianMatrix::diagonal(&(0..65).map(f64::from).collect::<Vec<_>>()).unwrap();
        assert!(matches!(eigenvalues_of_hermitian(&big, 0.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn parse_text_and_json() {
        let text = "# ladder\n0 1\n1 2  # doubly degenerate\n\n2 1\n";
        assert_eq!(pairs(&parse_spectrum(text).unwrap()), vec![(0.0, 1), (1.0, 2), (2.0, 1)]);
        let json = r#"{"levels": [[0, 1], [1.5, 3]]}"#;
        assert_eq!(pairs(&parse_spectrum(json).unwrap()), vec![(0.0, 1), (1.5, 3)]);
        assert!(parse_spectrum("0 1 2\n").is_err());
        assert!(parse_spectrum("0 x\n").is_err());
        let s = build_ising_chain(0.25, 1.0).unwrap();
        assert_eq!(parse_spectrum(&spectrum_to_json(&s).to_string()).unwrap(), s);
    }
}
