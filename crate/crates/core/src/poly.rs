//! Dense univariate polynomials and piecewise polynomials in a local shifted
//! basis.

use crate::scalar::{binomial, Scalar};

/// Coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(S::zero());
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![S::zero()] }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_usize(k))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(S::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.clone() / S::from_usize(k + 1)),
        );
        Self::new(coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in other.coeffs.iter().enumerate() {
                out[i + k] = out[i + k].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// Re-expands about `a`: returns `q` with `q(t) = p(a + t)`.
    pub fn taylor_shift(&self, a: &S) -> Self {
        // Repeated synthetic division by (x − a).
        let mut c = self.coeffs.clone();
        let len = c.len();
        for i in 0..len.saturating_sub(1) {
            for j in (i..len - 1).rev() {
                let carry = a.clone() * c[j + 1].clone();
                c[j] = c[j].clone() + carry;
            }
        }
        Self::new(c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[S], i: usize| v.get(i).cloned().unwrap_or_else(S::zero);
        Self::new((0..len).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    /// `(c + t)^p` expanded in `t`.
    pub fn shifted_power(c: &S, power: usize) -> Self {
        let mut coeffs = Vec::with_capacity(power + 1);
        let mut cpow = vec![S::one()];
        for _ in 0..power {
            let last = cpow.last().unwrap().clone();
            cpow.push(last * c.clone());
        }
        for r in 0..=power {
            coeffs.push(binomial::<S>(power, r) * cpow[power - r].clone());
        }
        Self::new(coeffs)
    }
}

/// Piecewise polynomial on strictly increasing knots. Piece `j` is stored in
/// powers of `(x − knots[j])`, is right-continuous at interior knots, and the
/// function vanishes outside `[knots[0], knots[last]]`.
///
/// Each piece is also kept in powers of `(x − knots[j+1])`, and evaluation
/// uses whichever expansion is centred at the nearer knot. In floating point
/// this keeps values that vanish to high order at a knot accurate there.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial<S> {
    knots: Vec<S>,
    pieces: Vec<Polynomial<S>>,
    mirrored: Vec<Polynomial<S>>,
}

impl<S: Scalar> PiecewisePolynomial<S> {
    /// Panics if the piece count does not match or knots are not increasing.
    pub fn new(knots: Vec<S>, pieces: Vec<Polynomial<S>>) -> Self {
        Self::check(&knots, &pieces);
        let mirrored = pieces
            .iter()
            .enumerate()
            .map(|(j, p)| p.taylor_shift(&(knots[j + 1].clone() - knots[j].clone())))
            .collect();
        PiecewisePolynomial { knots, pieces, mirrored }
    }

    /// Like [`new`](Self::new), with the right-knot expansions supplied.
    pub fn with_mirrored(knots: Vec<S>, pieces: Vec<Polynomial<S>>, mirrored: Vec<Polynomial<S>>) -> Self {
        Self::check(&knots, &pieces);
        assert_eq!(mirrored.len(), pieces.len(), "one mirrored piece per piece");
        PiecewisePolynomial { knots, pieces, mirrored }
    }

    fn check(knots: &[S], pieces: &[Polynomial<S>]) {
        assert!(knots.len() >= 2, "need at least two knots");
        assert_eq!(pieces.len() + 1, knots.len(), "pieces = knots - 1");
        assert!(knots.windows(2).all(|w| w[0] < w[1]), "knots must increase");
    }

    pub fn knots(&self) -> &[S] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Polynomial<S>] {
        &self.pieces
    }

    /// Piece `j` in powers of `(x − knots[j+1])`.
    pub fn mirrored(&self) -> &[Polynomial<S>] {
        &self.mirrored
    }

    pub fn width(&self, piece: usize) -> S {
        self.knots[piece + 1].clone() - self.knots[piece].clone()
    }

    /// Index of the piece used for `x` under right-continuity, or `None`
    /// outside the support. The last knot belongs to the last piece.
    pub fn locate(&self, x: &S) -> Option<usize> {
        let last = self.knots.len() - 1;
        if *x < self.knots[0] || *x > self.knots[last] {
            return None;
        }
        // First knot strictly greater than x.
        let upper = self.knots.partition_point(|k| k <= x);
        Some(upper.saturating_sub(1).min(last - 1))
    }

    /// `order`-th derivative of the active polynomial piece.
    pub fn eval_derivative(&self, x: &S, order: usize) -> S {
        match self.locate(x) {
            Some(j) => self.eval_piece(j, x, order),
            None => S::zero(),
        }
    }

    pub fn eval(&self, x: &S) -> S {
        self.eval_derivative(x, 0)
    }

    /// Evaluates piece `j` (extended polynomially) at global `x`.
    pub fn eval_piece(&self, j: usize, x: &S, order: usize) -> S {
        let left = x.clone() - self.knots[j].clone();
        let right = x.clone() - self.knots[j + 1].clone();
        let (poly, t) = if right.abs_val() < left.abs_val() {
            (&self.mirrored[j], right)
        } else {
            (&self.pieces[j], left)
        };
        if order == 0 {
            poly.eval(&t)
        } else {
            poly.nth_derivative(order).eval(&t)
        }
    }

    /// Limit from the left; zero at or below the first knot.
    pub fn eval_left(&self, x: &S, order: usize) -> S {
        let last = self.knots.len() - 1;
        if *x <= self.knots[0] || *x > self.knots[last] {
            return S::zero();
        }
        let j = self.knots.partition_point(|k| k < x) - 1;
        self.eval_piece(j, x, order)
    }

    /// Limit from the right; zero at or above the last knot.
    pub fn eval_right(&self, x: &S, order: usize) -> S {
        let last = self.knots.len() - 1;
        if *x < self.knots[0] || *x >= self.knots[last] {
            return S::zero();
        }
        let j = self.knots.partition_point(|k| k <= x) - 1;
        self.eval_piece(j, x, order)
    }

    /// Exact `∫_a^b x^power f(x) dx` with limits clamped to the support.
    pub fn integrate_moment(&self, a: &S, b: &S, power: usize) -> S {
        let last = self.knots.len() - 1;
        let lo = if *a > self.knots[0] { a.clone() } else { self.knots[0].clone() };
        let hi = if *b < self.knots[last] { b.clone() } else { self.knots[last].clone() };
        if lo >= hi {
            return S::zero();
        }
        let mut total = S::zero();
        for (j, piece) in self.pieces.iter().enumerate() {
            let left = &self.knots[j];
            let right = &self.knots[j + 1];
            if *right <= lo || *left >= hi {
                continue;
            }
            let from = if lo > *left { lo.clone() } else { left.clone() };
            let to = if hi < *right { hi.clone() } else { right.clone() };
            // Expand about the knot nearer the segment, so a segment ending
            // at a high-order zero is integrated without cancellation.
            let nearer_right = (right.clone() - to.clone()) < (from.clone() - left.clone());
            let (poly, origin) = if nearer_right { (&self.mirrored[j], right) } else { (piece, left) };
            let integrand = if power == 0 {
                poly.clone()
            } else {
                poly.mul(&Polynomial::shifted_power(origin, power))
            };
            let anti = integrand.antiderivative();
            total = total + anti.eval(&(to - origin.clone())) - anti.eval(&(from - origin.clone()));
        }
        total
    }
}
