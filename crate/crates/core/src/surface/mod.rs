//! Hypersurfaces of `H^n`: representations, normals, characteristic points
//! and horizontal tangent bases.
//!
//! Every representation reduces to an ambient defining function `f` with
//! `S = {f = 0}` locally, and all differential data is read off its 2-jet:
//!
//! * t-graph `t = u(x̄, ȳ)`: `f = u − t`, so `∇f = (Du, −1)`;
//! * intrinsic `Y_1`-graph of `φ`: `f = y_1 − φ(x̄, ỹ, t + x_1 y_1)`;
//! * implicit level set: `f` itself;
//! * the `H^1` helicoid `(r cos θ, r sin θ, θ)`: `f = x sin t − y cos t`.
//!
//! Transformed copies (left translations, dilations, pseudohermitian maps)
//! pull `f` back through the inverse affine map, exactly for polynomials.

mod intrinsic;
pub mod schema;

use std::sync::Arc;

pub use intrinsic::{project_pi, GraphGradient, IntrinsicGraph};
pub(crate) use intrinsic::{graph_gradient as intrinsic_gradient, normal_from_gradient as intrinsic_normal};

use crate::error::{check_len, Error, Result};
use crate::group::{frame_t_coeff, frame_vector, group_inv, BlockRotation, Dimension, HVec, Point};
use crate::linalg::{dot, norm, pivoted_gram_schmidt};
use crate::poly::{DerivativeTable, Jet2, Poly};

/// Default `|N^H|` threshold below which a point counts as characteristic.
pub const CHAR_TOL: f64 = 1e-8;

/// Default absolute residual for "p lies on S".
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Closed axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_len(lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(Error::InvalidBox("zero-dimensional box".into()));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite()) || l > h {
                return Err(Error::InvalidBox(format!("axis {i}: [{l}, {h}] is empty")));
            }
        }
        Ok(Self { lo, hi })
    }

    /// `[-r, r]^dim`
    pub fn cube(dim: usize, r: f64) -> Self {
        Self {
            lo: vec![-r; dim],
            hi: vec![r; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lo.len()
            && x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }
}

/// Affine map `c ↦ A c + b` of the ambient coordinates `[x̄, ȳ, t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl AffineMap {
    fn identity(m: usize) -> Self {
        let a = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { a, b: vec![0.0; m] }
    }

    /// `p ↦ q·p`
    pub fn left_translation(q: &Point<f64>) -> Self {
        let n = q.n();
        let m = 2 * n + 1;
        let mut map = Self::identity(m);
        map.b = q.coords();
        // t' = t + t_q + Q(z_q, z) = t + t_q + Σ (x_j y_{q,j} − x_{q,j} y_j)
        for j in 0..n {
            map.a[2 * n][j] = q.y()[j];
            map.a[2 * n][n + j] = -q.x()[j];
        }
        map
    }

    /// `δ_λ`
    pub fn dilation(n: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::NonPositiveDilation(lambda));
        }
        let m = 2 * n + 1;
        let mut map = Self::identity(m);
        for i in 0..2 * n {
            map.a[i][i] = lambda;
        }
        map.a[2 * n][2 * n] = lambda * lambda;
        Ok(map)
    }

    /// `φ_R`
    pub fn rotation(r: &BlockRotation) -> Self {
        let n = r.n();
        let mut map = Self::identity(2 * n + 1);
        for (i, row) in r.matrix().into_iter().enumerate() {
            map.a[i][..2 * n].copy_from_slice(&row);
        }
        map
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| dot(row, c) + bi)
            .collect()
    }

    pub fn apply_point(&self, p: &Point<f64>) -> Point<f64> {
        Point::from_coords(&self.apply(&p.coords())).expect("odd length preserved")
    }

    /// Linear part applied to a horizontal vector, returned as an ambient
    /// vector of length `2n + 1`.
    pub fn linear(&self, v: &[f64]) -> Vec<f64> {
        self.a.iter().map(|row| dot(row, v)).collect()
    }

    /// Coordinate polynomials of the map, for exact pullbacks.
    pub fn coordinate_polys(&self) -> Vec<Poly<f64>> {
        let m = self.dim();
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, &bi)| {
                let mut p = Poly::constant(m, bi);
                for (j, &aij) in row.iter().enumerate() {
                    p = &p + &Poly::var(m, j).expect("in range").scale(aij);
                }
                p
            })
            .collect()
    }
}

/// Ambient defining function with 2-jets.
#[derive(Debug, Clone)]
enum DefiningFn {
    Poly(Arc<DerivativeTable<f64>>),
    Helicoid,
    Pullback { base: Box<DefiningFn>, map: AffineMap },
}

impl DefiningFn {
    fn value(&self, c: &[f64]) -> Result<f64> {
        match self {
            DefiningFn::Poly(t) => t.value(c),
            DefiningFn::Helicoid => {
                check_len(3, c.len())?;
                Ok(c[0] * c[2].sin() - c[1] * c[2].cos())
            }
            DefiningFn::Pullback { base, map } => {
                check_len(map.dim(), c.len())?;
                base.value(&map.apply(c))
            }
        }
    }

    fn jet2(&self, c: &[f64]) -> Result<Jet2<f64>> {
        match self {
            DefiningFn::Poly(t) => t.jet2(c),
            DefiningFn::Helicoid => {
                check_len(3, c.len())?;
                let (x, y, t) = (c[0], c[1], c[2]);
                let (s, co) = t.sin_cos();
                Ok(Jet2 {
                    value: x * s - y * co,
                    gradient: vec![s, -co, x * co + y * s],
                    hessian: vec![
                        vec![0.0, 0.0, co],
                        vec![0.0, 0.0, s],
                        vec![co, s, -x * s + y * co],
                    ],
                })
            }
            DefiningFn::Pullback { base, map } => {
                check_len(map.dim(), c.len())?;
                let inner = base.jet2(&map.apply(c))?;
                let m = c.len();
                let a = &map.a;
                let gradient = (0..m)
                    .map(|j| (0..m).map(|i| a[i][j] * inner.gradient[i]).sum())
                    .collect();
                let ha: Vec<Vec<f64>> = (0..m)
                    .map(|i| (0..m).map(|j| (0..m).map(|k| inner.hessian[i][k] * a[k][j]).sum()).collect())
                    .collect();
                let hessian = (0..m)
                    .map(|i| (0..m).map(|j| (0..m).map(|k| a[k][i] * ha[k][j]).sum()).collect())
                    .collect();
                Ok(Jet2 {
                    value: inner.value,
                    gradient,
                    hessian,
                })
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum SurfaceKind {
    /// `t = u(x̄, ȳ)`
    TGraph { u: Poly<f64> },
    IntrinsicY1(IntrinsicGraph),
    /// `f = 0`, optionally restricted to a box.
    Implicit { f: Poly<f64>, region: Option<BoxDomain> },
    /// `(r cos θ, r sin θ, θ)` in `H^1`.
    Helicoid,
    /// Image of `base` under an affine automorphism; `inverse` maps back.
    Transformed {
        base: Box<Surface>,
        forward: AffineMap,
        inverse: AffineMap,
    },
}

#[derive(Debug, Clone)]
pub struct Surface {
    dim: Dimension,
    kind: SurfaceKind,
    defining: DefiningFn,
}

/// Everything pointwise about `S` at `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePointData {
    pub p: Point<f64>,
    /// Euclidean unit normal.
    pub normal: Vec<f64>,
    /// `N^H`, unnormalized.
    pub nh: HVec<f64>,
    /// `ν^H`, absent at characteristic points.
    pub nu_h: Option<HVec<f64>>,
    /// `Td^H = N_{2n+1} / |N^H|`, absent at characteristic points.
    pub td_h: Option<f64>,
    pub characteristic: bool,
}

/// Horizontal derivatives of the defining function at a point:
/// `g[k] = Z_k f` and `zg[h][k] = Z_h Z_k f`.
#[derive(Debug, Clone)]
pub(crate) struct HorizontalJet {
    pub g: Vec<f64>,
    pub zg: Vec<Vec<f64>>,
    pub grad_norm: f64,
    pub dt: f64,
}

impl Surface {
    pub fn t_graph(n: usize, u: Poly<f64>) -> Result<Self> {
        let dim = Dimension::new(n)?;
        check_len(2 * n, u.nvars())?;
        let m = 2 * n + 1;
        let lifted = u.compose(&(0..2 * n).map(|i| Poly::var(m, i)).collect::<Result<Vec<_>>>()?)?;
        let f = &lifted - &Poly::var(m, 2 * n)?;
        Ok(Self {
            dim,
            kind: SurfaceKind::TGraph { u },
            defining: DefiningFn::Poly(Arc::new(DerivativeTable::new(&f))),
        })
    }

    pub fn intrinsic_y1(n: usize, phi: Poly<f64>, domain: BoxDomain) -> Result<Self> {
        let dim = Dimension::new(n)?;
        let graph = IntrinsicGraph::new(n, phi, domain)?;
        let f = graph.defining_poly();
        Ok(Self {
            dim,
            kind: SurfaceKind::IntrinsicY1(graph),
            defining: DefiningFn::Poly(Arc::new(DerivativeTable::new(&f))),
        })
    }

    /// Level set `{f = 0}`. Rejects `f` with identically vanishing gradient;
    /// pointwise regularity is checked on every query.
    pub fn implicit(n: usize, f: Poly<f64>, region: Option<BoxDomain>) -> Result<Self> {
        let dim = Dimension::new(n)?;
        check_len(2 * n + 1, f.nvars())?;
        if let Some(r) = &region {
            check_len(2 * n + 1, r.dim())?;
        }
        let table = DerivativeTable::new(&f);
        if (0..2 * n + 1).all(|i| f.diff(i).map(|d| d.is_zero()).unwrap_or(true)) {
            return Err(Error::DegenerateGradient(0.0));
        }
        Ok(Self {
            dim,
            kind: SurfaceKind::Implicit { f, region },
            defining: DefiningFn::Poly(Arc::new(table)),
        })
    }

    pub fn helicoid() -> Self {
        Self {
            dim: Dimension::new(1).expect("n = 1"),
            kind: SurfaceKind::Helicoid,
            defining: DefiningFn::Helicoid,
        }
    }

    /// `⟨(x̄, ȳ), (ā, b̄)⟩ = c`
    pub fn vertical_hyperplane(a: &[f64], b: &[f64], c: f64) -> Result<Self> {
        check_len(a.len(), b.len())?;
        let n = a.len();
        if a.iter().chain(b).all(|v| *v == 0.0) {
            return Err(Error::InvalidParameter("(a, b) must be nonzero".into()));
        }
        let m = 2 * n + 1;
        let mut terms: Vec<(f64, Vec<u32>)> = Vec::new();
        for (i, &coef) in a.iter().chain(b).enumerate() {
            let mut e = vec![0; m];
            e[i] = 1;
            terms.push((coef, e));
        }
        terms.push((-c, vec![0; m]));
        Self::implicit(n, Poly::from_terms(m, terms)?, None)
    }

    /// `Σ a_j x_j + Σ b_j y_j + c t + d = 0`
    pub fn hyperplane(a: &[f64], b: &[f64], c: f64, d: f64) -> Result<Self> {
        check_len(a.len(), b.len())?;
        let n = a.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let m = 2 * n + 1;
        let mut terms: Vec<(f64, Vec<u32>)> = Vec::new();
        for (i, &coef) in a.iter().chain(b).chain(std::iter::once(&c)).enumerate() {
            let mut e = vec![0; m];
            e[i] = 1;
            terms.push((coef, e));
        }
        terms.push((d, vec![0; m]));
        Self::implicit(n, Poly::from_terms(m, terms)?, None)
    }

    /// `H_0 = {t = 0}`
    pub fn h0(n: usize) -> Result<Self> {
        Self::hyperplane(&vec![0.0; n], &vec![0.0; n], 1.0, 0.0)
    }

    /// The minimal, non-ruled t-graph `u = ½x_1² − ½y_1²`.
    pub fn saddle(n: usize) -> Result<Self> {
        Dimension::new(n)?;
        let mut ex = vec![0; 2 * n];
        ex[0] = 2;
        let mut ey = vec![0; 2 * n];
        ey[n] = 2;
        let u = Poly::from_terms(2 * n, vec![(0.5, ex), (-0.5, ey)])?;
        Self::t_graph(n, u)
    }

    pub fn n(&self) -> usize {
        self.dim.n()
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    /// Ambient defining polynomial, when the surface has one.
    pub fn defining_poly(&self) -> Option<&Poly<f64>> {
        match &self.defining {
            DefiningFn::Poly(t) => Some(t.poly()),
            _ => None,
        }
    }

    pub fn intrinsic_graph(&self) -> Option<&IntrinsicGraph> {
        match &self.kind {
            SurfaceKind::IntrinsicY1(g) => Some(g),
            _ => None,
        }
    }

    fn check_dim(&self, p: &Point<f64>) -> Result<()> {
        check_len(self.n(), p.n())
    }

    /// How far `p` is from satisfying the representation's defining relation:
    /// `|u(z) − t|`, `|f(p)|`, `|y_1 − φ(Π(p))|`, or for the helicoid the
    /// distance from `(x, y)` to the line at angle `t` (the `θ = t` recovery
    /// residual). Infinite outside a representation's domain box.
    pub fn membership_residual(&self, p: &Point<f64>) -> f64 {
        if self.check_dim(p).is_err() {
            return f64::INFINITY;
        }
        match &self.kind {
            SurfaceKind::TGraph { .. } | SurfaceKind::Helicoid => self
                .defining
                .value(&p.coords())
                .map(f64::abs)
                .unwrap_or(f64::INFINITY),
            SurfaceKind::Implicit { f, region } => {
                let c = p.coords();
                if region.as_ref().is_some_and(|r| !r.contains(&c)) {
                    return f64::INFINITY;
                }
                f.eval(&c).map(f64::abs).unwrap_or(f64::INFINITY)
            }
            SurfaceKind::IntrinsicY1(g) => match g.phi_value(&project_pi(p)) {
                Ok(alpha) => (p.y()[0] - alpha).abs(),
                Err(_) => f64::INFINITY,
            },
            SurfaceKind::Transformed { base, inverse, .. } => {
                base.membership_residual(&inverse.apply_point(p))
            }
        }
    }

    /// Value of the ambient defining function, no domain checks.
    pub fn defining_value(&self, p: &Point<f64>) -> Result<f64> {
        self.check_dim(p)?;
        self.defining.value(&p.coords())
    }

    /// 2-jet of the ambient defining function, no domain checks.
    pub fn defining_jet(&self, p: &Point<f64>) -> Result<Jet2<f64>> {
        self.check_dim(p)?;
        self.defining.jet2(&p.coords())
    }

    pub fn check_on_surface(&self, p: &Point<f64>) -> Result<()> {
        self.check_dim(p)?;
        let residual = self.membership_residual(p);
        if residual.is_infinite() {
            return Err(Error::OutOfDomain(p.coords()));
        }
        if !(residual < MEMBERSHIP_TOL) {
            return Err(Error::NotOnSurface { residual });
        }
        Ok(())
    }

    /// Euclidean unit normal. Orientation follows `∇f`, so for t-graphs it
    /// is `(Du, −1)/√(1 + |Du|²)`.
    pub fn euclidean_normal(&self, p: &Point<f64>) -> Result<Vec<f64>> {
        self.check_on_surface(p)?;
        self.normal_unchecked(p)
    }

    fn normal_unchecked(&self, p: &Point<f64>) -> Result<Vec<f64>> {
        let v = match &self.kind {
            SurfaceKind::Helicoid => {
                // ∂_r × ∂_θ of (r cos θ, r sin θ, θ) at θ = t
                let (x, y, t) = (p.x()[0], p.y()[0], p.t());
                let (s, c) = t.sin_cos();
                let r = x * c + y * s;
                let dr = [c, s, 0.0];
                let dth = [-r * s, r * c, 1.0];
                vec![
                    dr[1] * dth[2] - dr[2] * dth[1],
                    dr[2] * dth[0] - dr[0] * dth[2],
                    dr[0] * dth[1] - dr[1] * dth[0],
                ]
            }
            _ => self.defining.jet2(&p.coords())?.gradient,
        };
        let nv = norm(&v);
        if !(nv > 1e-10) {
            return Err(Error::DegenerateGradient(nv));
        }
        Ok(v.into_iter().map(|c| c / nv).collect())
    }

    /// `N^H = Σ ⟨N, Z_k⟩ Z_k` over the horizontal frame.
    pub fn horizontal_normal_raw(&self, p: &Point<f64>) -> Result<HVec<f64>> {
        self.check_on_surface(p)?;
        self.nh_unchecked(p)
    }

    fn nh_unchecked(&self, p: &Point<f64>) -> Result<HVec<f64>> {
        let normal = self.normal_unchecked(p)?;
        let c: Vec<f64> = (0..2 * self.n())
            .map(|k| frame_vector(k, p).map(|z| dot(&normal, &z)))
            .collect::<Result<_>>()?;
        HVec::from_components(&c)
    }

    pub fn is_characteristic(&self, p: &Point<f64>, tol: f64) -> Result<bool> {
        Ok(self.horizontal_normal_raw(p)?.norm() <= tol)
    }

    /// `|N^H|` without the on-surface precondition; used at ray endpoints
    /// that sit on `S` only to the scan tolerance.
    pub fn nh_norm_unchecked(&self, p: &Point<f64>) -> Result<f64> {
        self.check_dim(p)?;
        Ok(self.nh_unchecked(p)?.norm())
    }

    pub fn point_data(&self, p: &Point<f64>, tol: f64) -> Result<SurfacePointData> {
        self.check_on_surface(p)?;
        let normal = self.normal_unchecked(p)?;
        let nh = self.nh_unchecked(p)?;
        let len = nh.norm();
        let characteristic = len <= tol;
        let (nu_h, td_h) = if characteristic {
            (None, None)
        } else {
            (Some(nh.scale(1.0 / len)), Some(normal[2 * self.n()] / len))
        };
        Ok(SurfacePointData {
            p: p.clone(),
            normal,
            nh,
            nu_h,
            td_h,
            characteristic,
        })
    }

    /// Unit horizontal normal; errors at characteristic points.
    pub fn horizontal_normal(&self, p: &Point<f64>) -> Result<HVec<f64>> {
        let nh = self.horizontal_normal_raw(p)?;
        let len = nh.norm();
        if len <= CHAR_TOL {
            return Err(Error::Characteristic(len));
        }
        Ok(nh.scale(1.0 / len))
    }

    /// Orthonormal basis of `HT_pS`, by pivoted Gram-Schmidt on the
    /// projections `Z_i − ⟨Z_i, ν^H⟩ν^H`.
    pub fn horizontal_tangent_basis(&self, p: &Point<f64>) -> Result<Vec<HVec<f64>>> {
        let nu = self.horizontal_normal(p)?;
        Ok(tangent_basis_from_normal(&nu))
    }

    /// Horizontal first and second derivatives of `f` at `p`.
    pub(crate) fn horizontal_jet(&self, p: &Point<f64>) -> Result<HorizontalJet> {
        let n = self.n();
        let c = p.coords();
        let jet = self.defining.jet2(&c)?;
        let grad_norm = norm(&jet.gradient);
        if !(grad_norm > 1e-10) {
            return Err(Error::DegenerateGradient(grad_norm));
        }
        let ti = 2 * n;
        let dt = jet.gradient[ti];
        let hx = &jet.hessian;
        let g: Vec<f64> = (0..2 * n)
            .map(|k| jet.gradient[k] + frame_t_coeff(n, k, &c) * dt)
            .collect();
        // Z_h(∂_k f + c_k ∂_t f) = ∂_h∂_k f + c_h ∂_t∂_k f + (Z_h c_k) ∂_t f
        //                          + c_k (∂_h∂_t f + c_h ∂_t∂_t f)
        let mut zg = vec![vec![0.0; 2 * n]; 2 * n];
        for h in 0..2 * n {
            let ch = frame_t_coeff(n, h, &c);
            for k in 0..2 * n {
                let ck = frame_t_coeff(n, k, &c);
                let zh_ck = if k < n && h == n + k {
                    1.0
                } else if k >= n && h == k - n {
                    -1.0
                } else {
                    0.0
                };
                zg[h][k] = hx[h][k]
                    + ch * hx[ti][k]
                    + zh_ck * dt
                    + ck * (hx[h][ti] + ch * hx[ti][ti]);
            }
        }
        Ok(HorizontalJet {
            g,
            zg,
            grad_norm,
            dt,
        })
    }

    /// Point of `S` at chart parameters (2n of them): `(z, u(z))` for
    /// t-graphs, `Ψ(q)` for intrinsic graphs, `(z, t(z))` for level sets that
    /// are affine in `t`, `(r, θ)` for the helicoid.
    pub fn chart_point(&self, params: &[f64]) -> Result<Point<f64>> {
        let n = self.n();
        check_len(2 * n, params.len())?;
        match &self.kind {
            SurfaceKind::TGraph { u } => {
                Ok(Point::from_parts(params.to_vec(), u.eval(params)?))
            }
            SurfaceKind::IntrinsicY1(g) => g.lift_psi(params),
            SurfaceKind::Implicit { f, region } => {
                let p = solve_affine_in_t(f, params)?;
                if region.as_ref().is_some_and(|r| !r.contains(&p.coords())) {
                    return Err(Error::OutOfDomain(p.coords()));
                }
                Ok(p)
            }
            SurfaceKind::Helicoid => {
                let (r, th) = (params[0], params[1]);
                Point::from_coords(&[r * th.cos(), r * th.sin(), th])
            }
            SurfaceKind::Transformed { base, forward, .. } => {
                Ok(forward.apply_point(&base.chart_point(params)?))
            }
        }
    }

    fn transformed(&self, forward: AffineMap, inverse: AffineMap) -> Result<Self> {
        let n = self.n();
        if let Some(f) = self.defining_poly() {
            let pulled = f.compose(&inverse.coordinate_polys())?;
            return Self::implicit(n, pulled, None);
        }
        let defining = DefiningFn::Pullback {
            base: Box::new(self.defining.clone()),
            map: inverse.clone(),
        };
        Ok(Self {
            dim: self.dim,
            kind: SurfaceKind::Transformed {
                base: Box::new(self.clone()),
                forward,
                inverse,
            },
            defining,
        })
    }

    /// `τ_q(S)`
    pub fn left_translated(&self, q: &Point<f64>) -> Result<Self> {
        check_len(self.n(), q.n())?;
        self.transformed(
            AffineMap::left_translation(q),
            AffineMap::left_translation(&group_inv(q)),
        )
    }

    /// `δ_λ(S)`
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        let n = self.n();
        self.transformed(AffineMap::dilation(n, lambda)?, AffineMap::dilation(n, 1.0 / lambda)?)
    }

    /// `φ_R(S)`
    pub fn rotated(&self, r: &BlockRotation) -> Result<Self> {
        check_len(self.n(), r.n())?;
        self.transformed(AffineMap::rotation(r), AffineMap::rotation(&r.transpose()))
    }
}

/// Pivoted Gram-Schmidt tangent basis for a unit horizontal normal.
pub fn tangent_basis_from_normal(nu: &HVec<f64>) -> Vec<HVec<f64>> {
    let m = nu.components().len();
    let nu_c = nu.components();
    let candidates: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut v: Vec<f64> = nu_c.iter().map(|&x| -nu_c[i] * x).collect();
            v[i] += 1.0;
            v
        })
        .collect();
    pivoted_gram_schmidt(&candidates, m - 1, 1e-9)
        .into_iter()
        .map(|v| HVec::from_components(&v).expect("even length"))
        .collect()
}

fn solve_affine_in_t(f: &Poly<f64>, z: &[f64]) -> Result<Point<f64>> {
    let m = f.nvars();
    let ti = m - 1;
    if f.degree_in(ti) != 1 {
        return Err(Error::Unsupported(
            "level set is not affine in t; no chart available".into(),
        ));
    }
    let mut c = z.to_vec();
    c.push(0.0);
    let f0 = f.eval(&c)?;
    let f1 = f.diff(ti)?.eval(&c)?;
    if f1.abs() < 1e-12 {
        return Err(Error::DegenerateGradient(f1.abs()));
    }
    Ok(Point::from_parts(z.to_vec(), -f0 / f1))
}

#[cfg(test)]
mod tests;
