//! Monte Carlo ground truth from uniformly distributed pure states.
//!
//! Under the unitarily invariant measure the squared amplitudes of a state in
//! the energy eigenbasis are uniform on the simplex (flat Dirichlet), so rows
//! are drawn as normalised exponential spacings. Work is split into fixed
//! chunks, each with its own ChaCha8 stream indexed by the chunk number, and
//! reduced in chunk order; results depend only on `(seed, count)`, never on
//! the number of worker threads.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dos::DensityOfStates;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::spectrum::Spectrum;
use crate::thermo::fmt17;
use crate::SCHEMA_VERSION;

pub const GENERATOR: &str = "ChaCha8 (rand_chacha), one stream per 16384-sample chunk";
const CHUNK: u64 = 1 << 14;

pub const MIN_DOS_SAMPLES: u64 = 10_000;
pub const MIN_WINDOW_SAMPLES: u64 = 1_000;

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn simplex_row<R: Rng>(rng: &mut R, row: &mut [f64]) {
    let mut total = 0.0;
    for x in row.iter_mut() {
        *x = rng.sample::<f64, _>(Exp1);
        total += *x;
    }
    for x in row.iter_mut() {
        *x /= total;
    }
}

/// Runs `f` over every chunk of rows in parallel; results come back in chunk
/// order.
fn map_chunks<T, F>(n_plus_1: usize, count: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64], usize) -> T + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let rows = CHUNK.min(count - c * CHUNK) as usize;
            let mut rng = chunk_rng(seed, c);
            let mut buf = vec![0.0; rows * n_plus_1];
            for row in buf.chunks_mut(n_plus_1) {
                simplex_row(&mut rng, row);
            }
            f(&buf, rows)
        })
        .collect()
}

/// `count × (n+1)` squared-amplitude rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub n_plus_1: usize,
    pub count: u64,
    pub seed: u64,
    /// Row-major.
    pub simplex_points: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.simplex_points[i * self.n_plus_1..(i + 1) * self.n_plus_1]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.simplex_points.chunks(self.n_plus_1)
    }
}

pub fn sample_pure_states(n_plus_1: usize, count: u64, seed: u64) -> Result<SampleBatch> {
    if n_plus_1 < 2 {
        return Err(Error::InvalidArgument("need n + 1 >= 2".into()));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let simplex_points = map_chunks(n_plus_1, count, seed, |rows, _| rows.to_vec()).concat();
    Ok(SampleBatch { n_plus_1, count, seed, simplex_points })
}

fn energy(row: &[f64], energies: &[f64]) -> f64 {
    row.iter().zip(energies).map(|(p, e)| p * e).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DosHistogram {
    pub bins: Vec<HistogramBin>,
    pub count: u64,
    pub seed: u64,
    pub generator: String,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Bins actually used in the test after pooling sparse neighbours.
    pub pooled_bins: usize,
}

impl DosHistogram {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "bin_left,bin_right,observed,expected")?;
        for b in &self.bins {
            writeln!(out, "{},{},{},{}", fmt17(b.left), fmt17(b.right), b.observed, fmt17(b.expected))?;
        }
        Ok(())
    }

    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "count": self.count,
            "generator": self.generator,
            "chi_square": self.chi_square,
            "degrees_of_freedom": self.degrees_of_freedom,
            "p_value": self.p_value,
        })
    }
}

/// Minimum expected count per pooled bin.
const MIN_EXPECTED: f64 = 5.0;

/// Pearson statistic after merging neighbouring bins until each expects at
/// least five counts. Returns `(χ², dof, pooled bins)`.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> (f64, usize, usize) {
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&ob, &ex) in observed.iter().zip(expected) {
        o += ob as f64;
        e += ex;
        if e >= MIN_EXPECTED {
            pooled.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => pooled.push((o, e)),
        }
    }
    let stat = pooled
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    (stat, pooled.len().saturating_sub(1), pooled.len())
}

pub fn chi_square_p_value(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    if !stat.is_finite() {
        return 0.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    dist.sf(stat)
}

/// Histogram of `⟨Ĥ⟩` over uniformly sampled states against the exact
/// per-bin probability mass of the density of states.
pub fn empirical_dos(s: &Spectrum, count: u64, bins: usize, seed: u64) -> Result<DosHistogram> {
    if bins < 10 {
        return Err(Error::InvalidArgument(format!("need at least 10 bins, got {bins}")));
    }
    if count < MIN_DOS_SAMPLES {
        return Err(Error::InsufficientStatistics { achieved: count, required: MIN_DOS_SAMPLES });
    }
    let d = DensityOfStates::<Rational>::build(s)?;
    let energies = s.eigenvalues();
    let (lo, hi) = (s.e_min(), s.e_max());
    let width = (hi - lo) / bins as f64;

    let partial = map_chunks(s.dimension(), count, seed, |rows, _| {
        let mut hist = vec![0u64; bins];
        for row in rows.chunks(energies.len()) {
            let h = energy(row, &energies);
            let idx = (((h - lo) / width).floor().max(0.0) as usize).min(bins - 1);
            hist[idx] += 1;
        }
        hist
    });
    let mut observed = vec![0u64; bins];
    for hist in partial {
        for (acc, v) in observed.iter_mut().zip(hist) {
            *acc += v;
        }
    }

    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + i as f64 * width })
        .collect();
    let expected: Vec<f64> = edges
        .windows(2)
        .map(|w| {
            let mass = d.integrate_moment_exact(&Rational::from_f64(w[0]), &Rational::from_f64(w[1]), 0);
            count as f64 * mass.to_f64()
        })
        .collect();

    let (chi2, dof, pooled) = chi_square(&observed, &expected);
    Ok(DosHistogram {
        bins: edges
            .windows(2)
            .zip(observed.iter().zip(&expected))
            .map(|(w, (&o, &e))| HistogramBin { left: w[0], right: w[1], observed: o, expected: e })
            .collect(),
        count,
        seed,
        generator: GENERATOR.into(),
        chi_square: chi2,
        degrees_of_freedom: dof,
        p_value: chi_square_p_value(chi2, dof),
        pooled_bins: pooled,
    })
}

/// Conditional statistics on the energy window `|⟨Ĥ⟩ − E| ≤ window / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicrocanonicalEstimate {
    pub energy: f64,
    pub window: f64,
    pub count: u64,
    pub retained: u64,
    /// Conditional means of `p_k`, one per eigenstate.
    pub weights: Vec<f64>,
    pub weight_standard_errors: Vec<f64>,
    /// `ΔH` of the window-averaged state: mean quantum variance
    /// `Σ p_k E_k² − (Σ p_k E_k)²` plus `window_variance`.
    pub energy_uncertainty: f64,
    pub energy_uncertainty_standard_error: f64,
    /// Variance of `⟨Ĥ⟩` inside the window, reported separately.
    pub window_variance: f64,
}

#[derive(Clone)]
struct WindowSums {
    retained: u64,
    p: Vec<f64>,
    p2: Vec<f64>,
    /// Per-sample `⟨Ĥ²⟩` and `⟨Ĥ⟩` with their second moments.
    z: f64,
    z2: f64,
    zh: f64,
    h: f64,
    h2: f64,
}

impl WindowSums {
    fn new(dim: usize) -> Self {
        WindowSums { retained: 0, p: vec![0.0; dim], p2: vec![0.0; dim], z: 0.0, z2: 0.0, zh: 0.0, h: 0.0, h2: 0.0 }
    }

    fn merge(&mut self, other: &WindowSums) {
        self.retained += other.retained;
        for (a, b) in self.p.iter_mut().zip(&other.p) {
            *a += b;
        }
        for (a, b) in self.p2.iter_mut().zip(&other.p2) {
            *a += b;
        }
        self.z += other.z;
        self.z2 += other.z2;
        self.zh += other.zh;
        self.h += other.h;
        self.h2 += other.h2;
    }
}

pub fn empirical_microcanonical(
    s: &Spectrum,
    e: f64,
    window: f64,
    count: u64,
    seed: u64,
) -> Result<MicrocanonicalEstimate> {
    if !(window > 0.0) {
        return Err(Error::InvalidArgument(format!("window must be positive, got {window}")));
    }
    let energies = s.eigenvalues();
    let dim = energies.len();
    let half = 0.5 * window;
    let partial = map_chunks(dim, count, seed, |rows, _| {
        let mut sums = WindowSums::new(dim);
        for row in rows.chunks(dim) {
            let h = energy(row, &energies);
            if (h - e).abs() > half {
                continue;
            }
            let z: f64 = row.iter().zip(&energies).map(|(p, x)| p * x * x).sum();
            sums.retained += 1;
            for (k, &p) in row.iter().enumerate() {
                sums.p[k] += p;
                sums.p2[k] += p * p;
            }
            sums.z += z;
            sums.z2 += z * z;
            sums.zh += z * h;
            sums.h += h;
            sums.h2 += h * h;
        }
        sums
    });
    let mut total = WindowSums::new(dim);
    for p in &partial {
        total.merge(p);
    }
    if total.retained < MIN_WINDOW_SAMPLES {
        return Err(Error::InsufficientStatistics {
            achieved: total.retained,
            required: MIN_WINDOW_SAMPLES,
        });
    }
    let n = total.retained as f64;
    let mean_se = |sum: f64, sum2: f64| {
        let mean = sum / n;
        let var = (sum2 / n - mean * mean).max(0.0) * n / (n - 1.0);
        (mean, (var / n).sqrt())
    };
    let (weights, weight_standard_errors): (Vec<f64>, Vec<f64>) =
        total.p.iter().zip(&total.p2).map(|(&a, &b)| mean_se(a, b)).unzip();
    // Variance of the window-averaged state, ⟨z⟩ − ⟨h⟩², with a delta-method
    // standard error from the influence function z − 2⟨h⟩h.
    let (zmean, hmean) = (total.z / n, total.h / n);
    let var_z = total.z2 / n - zmean * zmean;
    let var_h = total.h2 / n - hmean * hmean;
    let cov_zh = total.zh / n - zmean * hmean;
    let influence = (var_z - 4.0 * hmean * cov_zh + 4.0 * hmean * hmean * var_h).max(0.0);
    let variance_se = (influence / (n - 1.0)).sqrt();
    let dh = (zmean - hmean * hmean).max(0.0).sqrt();
    Ok(MicrocanonicalEstimate {
        energy: e,
        window,
        count,
        retained: total.retained,
        weights,
        weight_standard_errors,
        energy_uncertainty: dh,
        energy_uncertainty_standard_error: if dh > 0.0 { variance_se / (2.0 * dh) } else { variance_se.sqrt() },
        window_variance: var_h.max(0.0),
    })
}

/// Largest modulus of a conditional off-diagonal element `E[ψ_j ψ̄_k]` on
/// the energy window, with its standard error. Amplitudes are drawn as
/// complex Gaussians, which carries the phases the simplex sampler drops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffDiagonalEstimate {
    pub retained: u64,
    pub max_modulus: f64,
    pub standard_error: f64,
}

pub fn empirical_off_diagonal(
    s: &Spectrum,
    e: f64,
    window: f64,
    count: u64,
    seed: u64,
) -> Result<OffDiagonalEstimate> {
    let energies = s.eigenvalues();
    let dim = energies.len();
    let pairs = dim * (dim - 1) / 2;
    let chunks = count.div_ceil(CHUNK);
    let partial: Vec<(u64, Vec<(f64, f64)>, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let rows = CHUNK.min(count - c * CHUNK);
            let mut rng = chunk_rng(seed ^ 0x9e37_79b9_7f4a_7c15, c);
            let mut sums = vec![(0.0, 0.0); pairs];
            let mut sq = 0.0;
            let mut kept = 0;
            let mut amp = vec![(0.0f64, 0.0f64); dim];
            for _ in 0..rows {
                let mut norm = 0.0;
                for a in amp.iter_mut() {
                    *a = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                    norm += a.0 * a.0 + a.1 * a.1;
                }
                let h: f64 = amp.iter().zip(&energies).map(|(a, x)| (a.0 * a.0 + a.1 * a.1) * x).sum::<f64>() / norm;
                if (h - e).abs() > 0.5 * window {
                    continue;
                }
                kept += 1;
                let mut idx = 0;
                for j in 0..dim {
                    for k in j + 1..dim {
                        // ψ_j ψ̄_k / ‖ψ‖²
                        let re = (amp[j].0 * amp[k].0 + amp[j].1 * amp[k].1) / norm;
                        let im = (amp[j].1 * amp[k].0 - amp[j].0 * amp[k].1) / norm;
                        sums[idx].0 += re;
                        sums[idx].1 += im;
                        sq += re * re + im * im;
                        idx += 1;
                    }
                }
            }
            (kept, sums, sq)
        })
        .collect();
    let mut kept = 0u64;
    let mut sums = vec![(0.0, 0.0); pairs];
    let mut sq = 0.0;
    for (k, s, q) in partial {
        kept += k;
        sq += q;
        for (a, b) in sums.iter_mut().zip(s) {
            a.0 += b.0;
            a.1 += b.1;
        }
    }
    if kept < MIN_WINDOW_SAMPLES {
        return Err(Error::InsufficientStatistics { achieved: kept, required: MIN_WINDOW_SAMPLES });
    }
    let n = kept as f64;
    let max_modulus = sums
        .iter()
        .map(|(re, im)| (re * re + im * im).sqrt() / n)
        .fold(0.0, f64::max);
    // Pooled second moment per element.
    let standard_error = (sq / (n * pairs.max(1) as f64) / n).sqrt();
    Ok(OffDiagonalEstimate { retained: kept, max_modulus, standard_error })
}
