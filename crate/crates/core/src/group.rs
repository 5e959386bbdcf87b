//! The Heisenberg group `H^n` in exponential coordinates.
//!
//! Points are `(x̄, ȳ, t)` with `x̄, ȳ ∈ R^n`. The group law is
//! `(z, t)·(z', t') = (z + z', t + t' + Q(z, z'))` with
//! `Q((x̄,ȳ),(x̄',ȳ')) = Σ (x'_j y_j − x_j y'_j)`.
//!
//! Ambient coordinates are flattened as `[x_1..x_n, y_1..y_n, t]`; horizontal
//! vectors as `[a_1..a_n, b_1..b_n]` over the frame `X_1..X_n, Y_1..Y_n`.
//! All indices in the API are zero-based.

use num_complex::Complex64;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{check_len, Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;

/// The `n` of `H^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            Err(Error::ZeroDimension)
        } else {
            Ok(Self(n))
        }
    }

    pub fn n(self) -> usize {
        self.0
    }

    /// `2n + 1`
    pub fn ambient(self) -> usize {
        2 * self.0 + 1
    }

    /// `2n`
    pub fn horizontal_rank(self) -> usize {
        2 * self.0
    }
}

/// A point of `H^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T> {
    z: Vec<T>,
    t: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: &[T], y: &[T], t: T) -> Result<Self> {
        check_len(x.len(), y.len())?;
        if x.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let mut z = x.to_vec();
        z.extend_from_slice(y);
        Ok(Self { z, t })
    }

    /// From the flattened `[x̄, ȳ, t]` layout.
    pub fn from_coords(c: &[T]) -> Result<Self> {
        if c.len() < 3 || c.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: 2 * (c.len().max(3) / 2) + 1,
                found: c.len(),
            });
        }
        let (z, t) = c.split_at(c.len() - 1);
        Ok(Self {
            z: z.to_vec(),
            t: t[0],
        })
    }

    pub(crate) fn from_parts(z: Vec<T>, t: T) -> Self {
        debug_assert!(!z.is_empty() && z.len().is_multiple_of(2));
        Self { z, t }
    }

    pub fn origin(n: usize) -> Self {
        Self {
            z: vec![T::zero(); 2 * n],
            t: T::zero(),
        }
    }

    pub fn n(&self) -> usize {
        self.z.len() / 2
    }

    pub fn x(&self) -> &[T] {
        &self.z[..self.n()]
    }

    pub fn y(&self) -> &[T] {
        &self.z[self.n()..]
    }

    /// Horizontal coordinates `(x̄, ȳ)`.
    pub fn z(&self) -> &[T] {
        &self.z
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn coords(&self) -> Vec<T> {
        let mut c = self.z.clone();
        c.push(self.t);
        c
    }
}

/// Serialized as the flat coordinate list `[x̄, ȳ, t]`.
impl<T: Serialize> Serialize for Point<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.z.len() + 1))?;
        for v in &self.z {
            seq.serialize_element(v)?;
        }
        seq.serialize_element(&self.t)?;
        seq.end()
    }
}

/// A horizontal vector, coefficients over `X_1..X_n, Y_1..Y_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HVec<T> {
    c: Vec<T>,
}

impl<T: Scalar> HVec<T> {
    pub fn new(a: &[T], b: &[T]) -> Result<Self> {
        check_len(a.len(), b.len())?;
        if a.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let mut c = a.to_vec();
        c.extend_from_slice(b);
        Ok(Self { c })
    }

    pub fn from_components(c: &[T]) -> Result<Self> {
        if c.is_empty() || !c.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: 2 * (c.len() / 2).max(1),
                found: c.len(),
            });
        }
        Ok(Self { c: c.to_vec() })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            c: vec![T::zero(); 2 * n],
        }
    }

    /// The frame vector `Z_i` (`X_{i+1}` for `i < n`, `Y_{i-n+1}` otherwise).
    pub fn basis(n: usize, i: usize) -> Result<Self> {
        if i >= 2 * n {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: 2 * n,
            });
        }
        let mut v = Self::zero(n);
        v.c[i] = T::one();
        Ok(v)
    }

    pub fn n(&self) -> usize {
        self.c.len() / 2
    }

    pub fn components(&self) -> &[T] {
        &self.c
    }

    pub fn a(&self) -> &[T] {
        &self.c[..self.n()]
    }

    pub fn b(&self) -> &[T] {
        &self.c[self.n()..]
    }

    pub fn dot(&self, other: &Self) -> Result<T> {
        check_len(self.c.len(), other.c.len())?;
        Ok(self
            .c
            .iter()
            .zip(&other.c)
            .fold(T::zero(), |acc, (&u, &v)| acc + u * v))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            c: self.c.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_len(self.c.len(), other.c.len())?;
        Ok(Self {
            c: self.c.iter().zip(&other.c).map(|(&u, &v)| u + v).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-T::one()))
    }

    /// The group element `(v, 0)`.
    pub fn to_point(&self) -> Point<T> {
        Point::from_parts(self.c.clone(), T::zero())
    }
}

impl HVec<f64> {
    pub fn norm(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `Q(z, z') = Σ (x'_j y_j − x_j y'_j)`.
pub fn symplectic_q<T: Scalar>(z: &[T], zp: &[T]) -> Result<T> {
    check_len(z.len(), zp.len())?;
    if z.is_empty() || !z.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch {
            expected: 2 * (z.len() / 2).max(1),
            found: z.len(),
        });
    }
    let n = z.len() / 2;
    let mut q = T::zero();
    for j in 0..n {
        q = q + zp[j] * z[n + j] - z[j] * zp[n + j];
    }
    Ok(q)
}

pub fn group_mul<T: Scalar>(p: &Point<T>, q: &Point<T>) -> Result<Point<T>> {
    check_len(p.z.len(), q.z.len())?;
    let z = p.z.iter().zip(&q.z).map(|(&a, &b)| a + b).collect();
    let t = p.t + q.t + symplectic_q(&p.z, &q.z)?;
    Ok(Point { z, t })
}

pub fn group_inv<T: Scalar>(p: &Point<T>) -> Point<T> {
    Point {
        z: p.z.iter().map(|&v| -v).collect(),
        t: -p.t,
    }
}

/// Intrinsic dilation `δ_λ(z, t) = (λz, λ²t)`.
pub fn dilate<T: Scalar>(lambda: T, p: &Point<T>) -> Result<Point<T>> {
    if lambda <= T::zero() {
        return Err(Error::NonPositiveDilation(
            lambda.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(Point {
        z: p.z.iter().map(|&v| lambda * v).collect(),
        t: lambda * lambda * p.t,
    })
}

/// Left translation `τ_q(p) = q·p`.
pub fn left_translate<T: Scalar>(q: &Point<T>, p: &Point<T>) -> Result<Point<T>> {
    group_mul(q, p)
}

/// Point reached from `p` along the horizontal line with direction `v`
/// after time `s`: `p·δ_s(v) = p·(s v, 0)`.
pub fn horizontal_line_point<T: Scalar>(p: &Point<T>, v: &HVec<T>, s: T) -> Result<Point<T>> {
    group_mul(p, &v.scale(s).to_point())
}

/// Complex structure `J(X_i) = Y_i`, `J(Y_i) = −X_i`.
pub fn j_apply<T: Scalar>(v: &HVec<T>) -> HVec<T> {
    let n = v.n();
    let mut c = Vec::with_capacity(2 * n);
    c.extend(v.b().iter().map(|&b| -b));
    c.extend_from_slice(v.a());
    HVec { c }
}

/// Euclidean components of the frame field `Z_i` at `p`, for `i` in `0..=2n`:
/// `X_j = ∂_{x_j} + y_j ∂_t`, `Y_j = ∂_{y_j} − x_j ∂_t`, `Z_{2n} = T = ∂_t`.
pub fn frame_vector<T: Scalar>(i: usize, p: &Point<T>) -> Result<Vec<T>> {
    let n = p.n();
    if i > 2 * n {
        return Err(Error::IndexOutOfRange {
            index: i,
            limit: 2 * n + 1,
        });
    }
    let mut v = vec![T::zero(); 2 * n + 1];
    v[i] = T::one();
    if i < n {
        v[2 * n] = p.y()[i];
    } else if i < 2 * n {
        v[2 * n] = -p.x()[i - n];
    }
    Ok(v)
}

/// Coefficient of `∂_t` in the frame field `Z_i` at the ambient coordinates
/// `c` (`y_i` for `X_i`, `−x_i` for `Y_i`).
pub(crate) fn frame_t_coeff(n: usize, i: usize, c: &[f64]) -> f64 {
    if i < n {
        c[n + i]
    } else {
        -c[i - n]
    }
}

/// Applies the frame field `Z_i` (`i` in `0..=2n`) to a polynomial in the
/// ambient variables `[x̄, ȳ, t]`, exactly.
pub fn frame_apply<T: Scalar>(n: usize, i: usize, f: &Poly<T>) -> Result<Poly<T>> {
    let m = 2 * n + 1;
    check_len(m, f.nvars())?;
    if i >= m {
        return Err(Error::IndexOutOfRange { index: i, limit: m });
    }
    let d = f.diff(i)?;
    if i == 2 * n {
        return Ok(d);
    }
    let dt = f.diff(2 * n)?;
    let coeff = if i < n {
        Poly::var(m, n + i)?
    } else {
        -&Poly::var(m, i - n)?
    };
    Ok(&d + &(&coeff * &dt))
}

/// `[Z_i, Z_j] f = Z_i(Z_j f) − Z_j(Z_i f)`.
pub fn frame_commutator_apply<T: Scalar>(
    n: usize,
    i: usize,
    j: usize,
    f: &Poly<T>,
) -> Result<Poly<T>> {
    let a = frame_apply(n, i, &frame_apply(n, j, f)?)?;
    let b = frame_apply(n, j, &frame_apply(n, i, f)?)?;
    Ok(&a - &b)
}

/// Orthogonal map `R = [[A, B], [−B, A]]` of `R^{2n}`, commuting with `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRotation {
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

impl BlockRotation {
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        check_len(n, b.len())?;
        for row in a.iter().chain(&b) {
            check_len(n, row.len())?;
        }
        let r = Self { a, b };
        let m = r.matrix();
        let scale = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        let mut defect: f64 = 0.0;
        for i in 0..2 * n {
            for j in 0..2 * n {
                let dot: f64 = (0..2 * n).map(|k| m[k][i] * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((dot - target).abs());
            }
        }
        if !(defect <= Self::TOLERANCE * scale.max(1.0)) {
            return Err(Error::NotBlockRotation { defect });
        }
        Ok(r)
    }

    pub fn identity(n: usize) -> Result<Self> {
        let a = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(a, vec![vec![0.0; n]; n])
    }

    /// Haar-ish random element, from Gram-Schmidt on a random complex matrix:
    /// a unitary `U = A + iB` yields an orthogonal `[[A, B], [−B, A]]`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        while cols.len() < n {
            let mut v: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
                .collect();
            for u in &cols {
                let proj: Complex64 = u.iter().zip(&v).map(|(ui, vi)| ui.conj() * vi).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                continue;
            }
            v.iter_mut().for_each(|c| *c /= norm);
            cols.push(v);
        }
        let a = (0..n).map(|i| (0..n).map(|j| cols[j][i].re).collect()).collect();
        let b = (0..n).map(|i| (0..n).map(|j| cols[j][i].im).collect()).collect();
        Self::new(a, b)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// The full `2n × 2n` matrix.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut m = vec![vec![0.0; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = self.a[i][j];
                m[i][n + j] = self.b[i][j];
                m[n + i][j] = -self.b[i][j];
                m[n + i][n + j] = self.a[i][j];
            }
        }
        m
    }

    /// `R^T`, which is again a block rotation.
    pub fn transpose(&self) -> Self {
        let n = self.n();
        let tr = |m: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
        };
        // [[A,B],[-B,A]]^T = [[A^T, -B^T],[B^T, A^T]]
        let bt = tr(&self.b)
            .into_iter()
            .map(|row| row.into_iter().map(|v| -v).collect())
            .collect();
        Self { a: tr(&self.a), b: bt }
    }

    pub fn apply(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_len(2 * self.n(), z.len())?;
        Ok(self
            .matrix()
            .iter()
            .map(|row| row.iter().zip(z).map(|(m, v)| m * v).sum())
            .collect())
    }

    pub fn apply_hvec(&self, v: &HVec<f64>) -> Result<HVec<f64>> {
        HVec::from_components(&self.apply(v.components())?)
    }
}

/// `φ_R(x̄, ȳ, t) = (R(x̄, ȳ), t)`.
pub fn pseudoherm_transform(r: &BlockRotation, p: &Point<f64>) -> Result<Point<f64>> {
    Ok(Point::from_parts(r.apply(p.z())?, p.t()))
}

/// Box-Muller standard normal sample.
pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
