//! Cyclic Jacobi diagonalization of a complex Hermitian matrix through its
//! real symmetric embedding `[[A, −B], [B, A]]` for `H = A + iB`.
//!
//! Each eigenvalue of `H` appears twice in the embedding, so the sorted
//! embedded spectrum is paired back down.

use super::HermitianMatrix;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_RATIO: f64 = 1e-14;

pub(super) fn hermitian_eigenvalues(h: &HermitianMatrix) -> Vec<f64> {
    let n = h.dimension();
    let dim = 2 * n;
    let mut m = vec![0.0; dim * dim];
    for i in 0..n {
        for k in 0..n {
            let z = h.entry(i, k);
            m[i * dim + k] = z.re;
            m[(i + n) * dim + k + n] = z.re;
            m[i * dim + k + n] = -z.im;
            m[(i + n) * dim + k] = z.im;
        }
    }
    let mut ev = symmetric_eigenvalues(&mut m, dim);
    ev.sort_by(f64::total_cmp);
    ev.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
}

fn off_norm(m: &[f64], dim: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..dim {
        for k in 0..dim {
            if i != k {
                acc += m[i * dim + k] * m[i * dim + k];
            }
        }
    }
    acc.sqrt()
}

/// Destroys `m`; returns the diagonal after convergence.
fn symmetric_eigenvalues(m: &mut [f64], dim: usize) -> Vec<f64> {
    let initial = off_norm(m, dim);
    let target = OFF_DIAGONAL_RATIO * initial;
    for _ in 0..MAX_SWEEPS {
        if off_norm(m, dim) <= target {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = m[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * dim + p];
                let aqq = m[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = m[k * dim + p];
                    let akq = m[k * dim + q];
                    m[k * dim + p] = c * akp - s * akq;
                    m[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = m[p * dim + k];
                    let aqk = m[q * dim + k];
                    m[p * dim + k] = c * apk - s * aqk;
                    m[q * dim + k] = s * apk + c * aqk;
                }
                m[p * dim + q] = 0.0;
                m[q * dim + p] = 0.0;
            }
        }
    }
    (0..dim).map(|i| m[i * dim + i]).collect()
}
