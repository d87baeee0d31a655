//! Confluent divided differences.
//!
//! For nondecreasing nodes `x_0 ≤ … ≤ x_N` the table is filled by the usual
//! recurrence, except that a block of equal nodes uses Taylor coefficients
//! `f^(k)(x) / k!` instead of a difference quotient. Repeated nodes therefore
//! realise derivatives with respect to the node.

use crate::scalar::{binomial, Scalar};

/// `[x_0, …, x_N] f`, where `jet(x, k)` returns `f^(k)(x) / k!`.
///
/// `nodes` must be sorted ascending.
pub fn divided_difference<S, F>(nodes: &[S], jet: F) -> S
where
    S: Scalar,
    F: Fn(&S, usize) -> S,
{
    assert!(!nodes.is_empty(), "divided difference of no nodes");
    debug_assert!(nodes.windows(2).all(|w| w[0] <= w[1]), "nodes must be sorted");
    let mut table: Vec<S> = nodes.iter().map(|x| jet(x, 0)).collect();
    let n = nodes.len();
    for order in 1..n {
        for i in 0..n - order {
            let lo = &nodes[i];
            let hi = &nodes[i + order];
            table[i] = if lo == hi {
                jet(lo, order)
            } else {
                (table[i + 1].clone() - table[i].clone()) / (hi.clone() - lo.clone())
            };
        }
    }
    table.swap_remove(0)
}

/// Residue weights of the divided difference over distinct `points`
/// repeated `multiplicity` times.
///
/// `weights[j][r]` is the `r`-th Taylor coefficient at `z_j` of
/// `Π_{l≠j} (u − z_l)^{−δ_l}`, so that
///
/// ```text
/// [nodes] f = Σ_j Σ_{r<δ_j} weights[j][r] · f^(δ_j−1−r)(z_j) / (δ_j−1−r)!
/// ```
///
/// for any `f` that is smooth at every node.
pub fn residue_weights<S: Scalar>(points: &[(S, usize)]) -> Vec<Vec<S>> {
    points
        .iter()
        .enumerate()
        .map(|(j, (zj, dj))| {
            let len = *dj;
            let mut series = vec![S::zero(); len];
            series[0] = S::one();
            for (l, (zl, dl)) in points.iter().enumerate() {
                if l == j {
                    continue;
                }
                // (d + h)^{−δ} = d^{−δ} Σ_r (−1)^r C(δ+r−1, r) (h/d)^r
                let d = zj.clone() - zl.clone();
                let inv = S::one() / d;
                let mut factor = Vec::with_capacity(len);
                let mut lead = S::one();
                for _ in 0..*dl {
                    lead = lead * inv.clone();
                }
                let mut power = lead;
                for r in 0..len {
                    let c = binomial::<S>(dl + r - 1, r) * power.clone();
                    factor.push(if r % 2 == 1 { -c } else { c });
                    power = power * inv.clone();
                }
                let mut next = vec![S::zero(); len];
                for (a, x) in series.iter().enumerate() {
                    for (b, y) in factor.iter().enumerate().take(len - a) {
                        next[a + b] = next[a + b].clone() + x.clone() * y.clone();
                    }
                }
                series = next;
            }
            series
        })
        .collect()
}

/// Jet of the truncated power `u ↦ (u − at)_+^power`, evaluated in `u`.
///
/// Nodes at or below `at` see the zero branch. That is exact at `u = at`
/// for every derivative order below `power`, which is all the confluent
/// table needs as long as no node block there has multiplicity above
/// `power`.
pub fn truncated_power_jet<S: Scalar>(at: S, power: usize) -> impl Fn(&S, usize) -> S {
    move |u: &S, order: usize| {
        if *u <= at || order > power {
            return S::zero();
        }
        let base = u.clone() - at.clone();
        let mut value = binomial::<S>(power, order);
        for _ in 0..power - order {
            value = value * base.clone();
        }
        value
    }
}
