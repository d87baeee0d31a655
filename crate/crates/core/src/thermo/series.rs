//! Truncated power series over a [`Scalar`]: division and reversion.

use crate::scalar::Scalar;

/// `a / b` to `len` terms. Requires `b[0] ≠ 0`.
pub(crate) fn divide<S: Scalar>(a: &[S], b: &[S], len: usize) -> Vec<S> {
    let at = |v: &[S], i: usize| v.get(i).cloned().unwrap_or_else(S::zero);
    let mut q: Vec<S> = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = at(a, k);
        for i in 0..k {
            acc = acc - q[i].clone() * at(b, k - i);
        }
        q.push(acc / b[0].clone());
    }
    q
}

fn multiply<S: Scalar>(a: &[S], b: &[S], len: usize) -> Vec<S> {
    let mut out = vec![S::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (k, y) in b.iter().enumerate().take(len - i) {
            out[i + k] = out[i + k].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Compositional inverse of `f(h) = Σ_{k≥1} f_k h^k` (the constant term is
/// ignored) to `len` terms. Requires `f[1] ≠ 0`.
pub(crate) fn reverse<S: Scalar>(f: &[S], len: usize) -> Vec<S> {
    let mut g = vec![S::zero(); len];
    if len < 2 {
        return g;
    }
    g[1] = S::one() / f[1].clone();
    for k in 2..len {
        // Coefficient of τ^k in f(g(τ)) with g_k still zero; g_k then
        // cancels it through the linear term f_1 g_k.
        let mut composed = vec![S::zero(); k + 1];
        let mut power = g[..=k].to_vec();
        for fi in f.iter().take(k + 1).skip(1) {
            for (c, p) in composed.iter_mut().zip(&power) {
                *c = c.clone() + fi.clone() * p.clone();
            }
            power = multiply(&power, &g[..=k], k + 1);
        }
        g[k] = -composed[k].clone() / f[1].clone();
    }
    g
}
