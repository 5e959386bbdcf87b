//! Intrinsic `Y_1`-graphs.
//!
//! Parameters are `q = (ξ_1..ξ_n, η_2..η_n, τ) ∈ R^{2n}` and the graph of
//! `φ` is parametrized by `Ψ(q) = (ξ̄, φ(q), η̃, τ − ξ_1 φ(q))`.

use crate::error::{check_len, Error, Result};
use crate::group::{HVec, Point};
use crate::poly::{DerivativeTable, Jet2, Poly};

use super::BoxDomain;

/// `Π(x̄, ȳ, t) = (x̄, ỹ, t + x_1 y_1)`.
pub fn project_pi(p: &Point<f64>) -> Vec<f64> {
    let n = p.n();
    let mut q = Vec::with_capacity(2 * n);
    q.extend_from_slice(p.x());
    q.extend_from_slice(&p.y()[1..]);
    q.push(p.t() + p.x()[0] * p.y()[0]);
    q
}

/// First-order data of `φ` at a parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphGradient {
    /// `φ(q)`
    pub alpha: f64,
    /// Euclidean gradient `Dφ(q)`, ordered like `q`.
    pub d_phi: Vec<f64>,
    /// `∇^φφ = (W^φφ, X̃_2φ..X̃_nφ, Ỹ_2φ..Ỹ_nφ)`.
    pub nabla_phi: Vec<f64>,
    /// `W = 1 + |∇^φφ|²`
    pub w: f64,
}

impl GraphGradient {
    /// `W^φφ = φ_{ξ_1} + 2φ φ_τ`
    pub fn w_phi(&self) -> f64 {
        self.nabla_phi[0]
    }

    /// `X̃_jφ = φ_{ξ_j} + η_j φ_τ`, `j` in `1..n` (zero-based).
    pub fn x_tilde(&self, j: usize) -> f64 {
        self.nabla_phi[j]
    }

    /// `Ỹ_jφ = φ_{η_j} − ξ_j φ_τ`, `j` in `1..n` (zero-based).
    pub fn y_tilde(&self, j: usize) -> f64 {
        let n = (self.nabla_phi.len() + 1) / 2;
        self.nabla_phi[n - 1 + j]
    }

    pub fn phi_tau(&self) -> f64 {
        *self.d_phi.last().expect("nonempty")
    }
}

#[derive(Debug, Clone)]
pub struct IntrinsicGraph {
    n: usize,
    phi: Poly<f64>,
    domain: BoxDomain,
    table: DerivativeTable<f64>,
}

impl IntrinsicGraph {
    pub fn new(n: usize, phi: Poly<f64>, domain: BoxDomain) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        check_len(2 * n, phi.nvars())?;
        check_len(2 * n, domain.dim())?;
        let table = DerivativeTable::new(&phi);
        Ok(Self {
            n,
            phi,
            domain,
            table,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi(&self) -> &Poly<f64> {
        &self.phi
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub(crate) fn check_domain(&self, q: &[f64]) -> Result<()> {
        check_len(2 * self.n, q.len())?;
        if self.domain.contains(q) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(q.to_vec()))
        }
    }

    pub fn phi_value(&self, q: &[f64]) -> Result<f64> {
        self.check_domain(q)?;
        self.table.value(q)
    }

    pub fn phi_jet(&self, q: &[f64]) -> Result<Jet2<f64>> {
        self.check_domain(q)?;
        self.table.jet2(q)
    }

    /// `Ψ(q)`
    pub fn lift_psi(&self, q: &[f64]) -> Result<Point<f64>> {
        let alpha = self.phi_value(q)?;
        Ok(psi_with_value(self.n, q, alpha))
    }

    pub fn gradient(&self, q: &[f64]) -> Result<GraphGradient> {
        self.check_domain(q)?;
        let alpha = self.table.value(q)?;
        let d_phi = self.table.gradient(q)?;
        Ok(graph_gradient(self.n, q, alpha, d_phi))
    }

    /// The global frame `E_1..E_n, F_2..F_n` of the horizontal tangent bundle
    /// at `Ψ(q)`, as `Z`-frame coefficients.
    pub fn frames(&self, q: &[f64]) -> Result<Vec<HVec<f64>>> {
        let g = self.gradient(q)?;
        let n = self.n;
        let mut out = Vec::with_capacity(2 * n - 1);
        for j in 0..n {
            let mut c = vec![0.0; 2 * n];
            c[j] = 1.0;
            c[n] = if j == 0 { g.w_phi() } else { g.x_tilde(j) };
            out.push(HVec::from_components(&c)?);
        }
        for j in 1..n {
            let mut c = vec![0.0; 2 * n];
            c[n + j] = 1.0;
            c[n] = g.y_tilde(j);
            out.push(HVec::from_components(&c)?);
        }
        Ok(out)
    }

    /// `ν^H = W^{-1/2}(W^φφ X_1 + Σ X̃_jφ X_j − Y_1 + Σ Ỹ_jφ Y_j)`.
    pub fn normal(&self, q: &[f64]) -> Result<HVec<f64>> {
        let g = self.gradient(q)?;
        Ok(normal_from_gradient(self.n, &g))
    }

    /// The equivalent ambient defining polynomial
    /// `f = y_1 − φ(x̄, ỹ, t + x_1 y_1)`, whose zero set is the graph.
    pub fn defining_poly(&self) -> Poly<f64> {
        let n = self.n;
        let m = 2 * n + 1;
        let var = |i| Poly::var(m, i).expect("in range");
        let mut subs = Vec::with_capacity(2 * n);
        for j in 0..n {
            subs.push(var(j));
        }
        for j in 1..n {
            subs.push(var(n + j));
        }
        subs.push(&var(2 * n) + &(&var(0) * &var(n)));
        let composed = self.phi.compose(&subs).expect("matching arity");
        &var(n) - &composed
    }
}

pub(crate) fn psi_with_value(n: usize, q: &[f64], alpha: f64) -> Point<f64> {
    let mut z = Vec::with_capacity(2 * n);
    z.extend_from_slice(&q[..n]);
    z.push(alpha);
    z.extend_from_slice(&q[n..2 * n - 1]);
    let t = q[2 * n - 1] - q[0] * alpha;
    Point::from_parts(z, t)
}

pub(crate) fn graph_gradient(n: usize, q: &[f64], alpha: f64, d_phi: Vec<f64>) -> GraphGradient {
    let phi_tau = d_phi[2 * n - 1];
    let mut nabla_phi = Vec::with_capacity(2 * n - 1);
    nabla_phi.push(d_phi[0] + 2.0 * alpha * phi_tau);
    for j in 1..n {
        // η_j sits at q[n + j - 1]
        nabla_phi.push(d_phi[j] + q[n + j - 1] * phi_tau);
    }
    for j in 1..n {
        nabla_phi.push(d_phi[n + j - 1] - q[j] * phi_tau);
    }
    let w = 1.0 + nabla_phi.iter().map(|v| v * v).sum::<f64>();
    GraphGradient {
        alpha,
        d_phi,
        nabla_phi,
        w,
    }
}

pub(crate) fn normal_from_gradient(n: usize, g: &GraphGradient) -> HVec<f64> {
    let s = 1.0 / g.w.sqrt();
    let mut c = vec![0.0; 2 * n];
    c[0] = g.w_phi() * s;
    for j in 1..n {
        c[j] = g.x_tilde(j) * s;
        c[n + j] = g.y_tilde(j) * s;
    }
    c[n] = -s;
    HVec::from_components(&c).expect("even length")
}
