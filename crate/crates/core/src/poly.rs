//! Exact multivariate polynomials.
//!
//! Every surface in the crate is described by polynomial data, so this module
//! is the only source of derivatives: partials are formal, and numeric values
//! come from evaluating the differentiated polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::scalar::Scalar;

/// Exponent tuple, one entry per variable.
pub type Exponents = Vec<u32>;

/// Sparse polynomial with a canonical (lexicographic) term order.
///
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct Poly<T> {
    nvars: usize,
    terms: BTreeMap<Exponents, T>,
}

/// One `{coeff, exps}` record of the JSON polynomial literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermLiteral {
    pub coeff: f64,
    pub exps: Vec<u32>,
}

impl<T: Scalar> Poly<T> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: nvars,
            });
        }
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Ok(Self::monomial(exps, T::one()))
    }

    pub fn monomial(exps: Exponents, c: T) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs; repeated
    /// exponent tuples are summed.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, Exponents)>,
    {
        let mut p = Self::zero(nvars);
        for (c, exps) in terms {
            check_len(nvars, exps.len())?;
            p.add_term(exps, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Exponents, c: T) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(existing) => {
                let sum = *existing + c;
                if sum.is_zero() {
                    self.terms.remove(&exps);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &T)> {
        self.terms.iter()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: T) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(T) -> U) -> Poly<U> {
        let mut out = Poly::zero(self.nvars);
        for (e, &a) in &self.terms {
            out.add_term(e.clone(), f(a));
        }
        out
    }

    /// Evaluates `Σ c_α x^α` term by term in canonical order.
    pub fn eval(&self, x: &[T]) -> Result<T> {
        check_len(self.nvars, x.len())?;
        let mut acc = T::zero();
        for (e, &c) in &self.terms {
            let mut m = c;
            for (&xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    m = m * pow(xi, k);
                }
            }
            acc = acc + m;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Result<Self> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: var,
                limit: self.nvars,
            });
        }
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] = k - 1;
            out.add_term(e2, c * T::from_count(k));
        }
        Ok(out)
    }

    /// Substitutes `subs[i]` for variable `i`. All substitutes must share one
    /// variable count, which becomes the variable count of the result.
    pub fn compose(&self, subs: &[Poly<T>]) -> Result<Self> {
        check_len(self.nvars, subs.len())?;
        let m = match subs.first() {
            Some(s) => s.nvars,
            None => return Ok(self.clone()),
        };
        for s in subs {
            check_len(m, s.nvars)?;
        }
        // powers[i][k] = subs[i]^k, filled lazily
        let mut powers: Vec<Vec<Poly<T>>> = subs
            .iter()
            .map(|_| vec![Poly::constant(m, T::one())])
            .collect();
        let mut out = Poly::zero(m);
        for (e, &c) in &self.terms {
            let mut term = Poly::constant(m, c);
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k {
                    let next = powers[i].last().expect("seeded") * &subs[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][k];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Value, gradient and Hessian by repeated formal differentiation.
    pub fn jet2(&self, x: &[T]) -> Result<Jet2<T>> {
        DerivativeTable::new(self).jet2(x)
    }
}

impl Poly<f64> {
    pub fn from_literals(nvars: usize, lits: &[TermLiteral]) -> Result<Self> {
        Self::from_terms(nvars, lits.iter().map(|l| (l.coeff, l.exps.clone())))
    }

    pub fn to_literals(&self) -> Vec<TermLiteral> {
        self.terms
            .iter()
            .map(|(e, &c)| TermLiteral {
                coeff: c,
                exps: e.clone(),
            })
            .collect()
    }
}

fn pow<T: Scalar>(x: T, mut k: u32) -> T {
    let mut base = x;
    let mut acc = T::one();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base;
        }
        k >>= 1;
        if k > 0 {
            base = base * base;
        }
    }
    acc
}

impl<T: Scalar> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c:?}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "·v{i}")?,
                    _ => write!(f, "·v{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;

    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;

    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl<T: Scalar> Neg for &Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        self.scale(-T::one())
    }
}

/// Value, gradient and Hessian of a scalar function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2<T> {
    pub value: T,
    pub gradient: Vec<T>,
    pub hessian: Vec<Vec<T>>,
}

/// Precomputed first and second partials of a polynomial, so repeated jets
/// cost only evaluations.
#[derive(Clone)]
pub struct DerivativeTable<T> {
    poly: Poly<T>,
    grad: Vec<Poly<T>>,
    // upper triangle, hess[i][j - i] = ∂_i ∂_j
    hess: Vec<Vec<Poly<T>>>,
}

impl<T: Scalar> fmt::Debug for DerivativeTable<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DerivativeTable").field("poly", &self.poly).finish_non_exhaustive()
    }
}

impl<T: Scalar> DerivativeTable<T> {
    pub fn new(p: &Poly<T>) -> Self {
        let n = p.nvars;
        let grad: Vec<Poly<T>> = (0..n).map(|i| p.diff(i).expect("in range")).collect();
        let hess = (0..n)
            .map(|i| (i..n).map(|j| grad[i].diff(j).expect("in range")).collect())
            .collect();
        Self {
            poly: p.clone(),
            grad,
            hess,
        }
    }

    pub fn poly(&self) -> &Poly<T> {
        &self.poly
    }

    pub fn value(&self, x: &[T]) -> Result<T> {
        self.poly.eval(x)
    }

    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        check_len(self.poly.nvars, x.len())?;
        self.grad.iter().map(|g| g.eval(x)).collect()
    }

    pub fn jet2(&self, x: &[T]) -> Result<Jet2<T>> {
        let n = self.poly.nvars;
        check_len(n, x.len())?;
        let value = self.poly.eval(x)?;
        let gradient = self.gradient(x)?;
        let mut hessian = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = self.hess[i][j - i].eval(x)?;
                hessian[i][j] = v;
                hessian[j][i] = v;
            }
        }
        Ok(Jet2 {
            value,
            gradient,
            hessian,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;
    use proptest::prelude::*;

    fn p2(terms: &[(f64, [u32; 2])]) -> Poly<f64> {
        Poly::from_terms(2, terms.iter().map(|(c, e)| (*c, e.to_vec()))).unwrap()
    }

    #[test]
    fn constant_evaluates_to_itself() {
        let p = Poly::constant(3, 5.0);
        assert_eq!(p.eval(&[1.0, -2.0, 7.5]).unwrap(), 5.0);
    }

    #[test]
    fn simple_eval() {
        // x1^2 - x2 at (2, 1)
        let p = p2(&[(1.0, [2, 0]), (-1.0, [0, 1])]);
        assert_eq!(p.eval(&[2.0, 1.0]).unwrap(), 3.0);
        assert!(p.eval(&[2.0]).is_err());
    }

    #[test]
    fn derivatives_of_square() {
        let p = p2(&[(1.0, [2, 0])]);
        assert_eq!(p.diff(0).unwrap(), p2(&[(2.0, [1, 0])]));
        assert!(p.diff(1).unwrap().is_zero());
        assert!(matches!(p.diff(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = p2(&[(1.0, [1, 1]), (-1.0, [1, 1])]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn saddle_hessian_is_constant() {
        // ½x1² − ½y1² in H², variables (x1, x2, y1, y2)
        let u = Poly::from_terms(
            4,
            vec![(0.5, vec![2, 0, 0, 0]), (-0.5, vec![0, 0, 2, 0])],
        )
        .unwrap();
        for x in [[0.0; 4], [0.3, -1.0, 2.0, 0.7]] {
            let j = u.jet2(&x).unwrap();
            let mut expected = vec![vec![0.0; 4]; 4];
            expected[0][0] = 1.0;
            expected[2][2] = -1.0;
            assert_eq!(j.hessian, expected);
        }
    }

    #[test]
    fn linear_poly_has_zero_hessian() {
        let p = p2(&[(3.0, [1, 0]), (-2.0, [0, 1]), (1.0, [0, 0])]);
        let j = p.jet2(&[0.4, 0.9]).unwrap();
        assert!(j.hessian.iter().flatten().all(|&h| h == 0.0));
        assert_eq!(j.gradient, vec![3.0, -2.0]);
    }

    #[test]
    fn compose_substitutes() {
        // p(a, b) = a*b, a = x + 1, b = x - 1  =>  x^2 - 1
        let p = p2(&[(1.0, [1, 1])]);
        let x = Poly::var(1, 0).unwrap();
        let one = Poly::constant(1, 1.0);
        let q = p.compose(&[&x + &one, &x - &one]).unwrap();
        let expected = Poly::from_terms(1, vec![(1.0, vec![2]), (-1.0, vec![0])]).unwrap();
        assert_eq!(q, expected);
    }

    #[test]
    fn exact_rational_differentiation() {
        let half = Rational64::new(1, 2);
        let p = Poly::monomial(vec![3, 1], half);
        let d = p.diff(0).unwrap();
        assert_eq!(d, Poly::monomial(vec![2, 1], Rational64::new(3, 2)));
    }

    #[test]
    fn literal_round_trip() {
        let p = p2(&[(1.5, [2, 1]), (-0.25, [0, 3])]);
        let back = Poly::from_literals(2, &p.to_literals()).unwrap();
        assert_eq!(p, back);
        let bad = [TermLiteral {
            coeff: 1.0,
            exps: vec![1],
        }];
        assert!(Poly::from_literals(2, &bad).is_err());
    }

    fn naive_eval(p: &Poly<f64>, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (e, c) in p.terms() {
            let mut m = *c;
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    m *= xi;
                }
            }
            s += m;
        }
        s
    }

    fn arb_poly(nvars: usize) -> impl Strategy<Value = Poly<f64>> {
        prop::collection::vec(
            (-2.0..2.0f64, prop::collection::vec(0u32..=3, nvars)),
            0..8,
        )
        .prop_map(move |ts| Poly::from_terms(nvars, ts).unwrap())
    }

    proptest! {
        #[test]
        fn eval_matches_naive(p in arb_poly(3), x in prop::collection::vec(-1.5..1.5f64, 3)) {
            let a = p.eval(&x).unwrap();
            let b = naive_eval(&p, &x);
            prop_assert!((a - b).abs() <= 1e-13 * (1.0 + b.abs()));
        }

        #[test]
        fn eval_is_additive(p in arb_poly(3), q in arb_poly(3), x in prop::collection::vec(-1.5..1.5f64, 3)) {
            let lhs = (&p + &q).eval(&x).unwrap();
            let rhs = p.eval(&x).unwrap() + q.eval(&x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + rhs.abs()));
        }

        #[test]
        fn diff_is_linear(p in arb_poly(3), q in arb_poly(3), c in -3.0..3.0f64, var in 0usize..3) {
            let lhs = (&p.scale(c) + &q).diff(var).unwrap();
            let rhs = &p.diff(var).unwrap().scale(c) + &q.diff(var).unwrap();
            let x = [0.3, -0.7, 1.1];
            prop_assert!((lhs.eval(&x).unwrap() - rhs.eval(&x).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn mixed_partials_commute(p in arb_poly(3), i in 0usize..3, j in 0usize..3) {
            let a = p.diff(i).unwrap().diff(j).unwrap();
            let b = p.diff(j).unwrap().diff(i).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn diff_matches_central_difference(p in arb_poly(3), x in prop::collection::vec(-1.0..1.0f64, 3), var in 0usize..3) {
            let h = 1e-5;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[var] += h;
            xm[var] -= h;
            let fd = (naive_eval(&p, &xp) - naive_eval(&p, &xm)) / (2.0 * h);
            let exact = p.diff(var).unwrap().eval(&x).unwrap();
            prop_assert!((fd - exact).abs() < 1e-6);
        }

        #[test]
        fn hessian_matches_finite_differences(p in arb_poly(3), x in prop::collection::vec(-1.0..1.0f64, 3)) {
            let jet = p.jet2(&x).unwrap();
            let h = 1e-4;
            for i in 0..3 {
                for j in 0..3 {
                    let f = |di: f64, dj: f64| {
                        let mut y = x.clone();
                        y[i] += di;
                        y[j] += dj;
                        naive_eval(&p, &y)
                    };
                    let fd = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
                    prop_assert!((fd - jet.hessian[i][j]).abs() < 1e-5, "{} vs {}", fd, jet.hessian[i][j]);
                }
            }
        }
    }
}
