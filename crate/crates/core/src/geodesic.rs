//! Geodesics of intrinsic `Y_1`-graphs.
//!
//! A horizontal curve `Γ = Ψ(γ)` on the graph of `φ` is a geodesic iff
//! `γ = (ξ̄, η̃, τ)` solves
//!
//! ```text
//! ξ̈_1 = −W⁻¹ W^φφ M,   ξ̈_j = −W⁻¹ X̃_jφ M,   η̈_j = −W⁻¹ Ỹ_jφ M,
//! τ̇ = 2α ξ̇_1 + Σ η_j ξ̇_j − Σ ξ_j η̇_j,
//! ```
//!
//! with `α = φ(γ)` and `M = 2 φ_τ α̇ ξ̇_1 + ⟨D²φ γ̇, γ̇⟩`. The state carries the
//! velocities `Ξ = ξ̇`, `H = η̇̃` next to the positions, `4n − 1` reals in all.

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::group::{group_mul, HVec, Point};
use crate::linalg::{bilinear, dot};
use crate::surface::{project_pi, IntrinsicGraph, Surface, MEMBERSHIP_TOL};

/// Tangency tolerance for initial directions.
pub const TANGENT_TOL: f64 = 1e-9;

pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicState {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub tau: f64,
    pub xi_dot: Vec<f64>,
    pub eta_dot: Vec<f64>,
}

impl GeodesicState {
    pub fn n(&self) -> usize {
        self.xi.len()
    }

    /// `(ξ̄, η̃, τ)`
    pub fn position(&self) -> Vec<f64> {
        let mut q = Vec::with_capacity(2 * self.n());
        q.extend_from_slice(&self.xi);
        q.extend_from_slice(&self.eta);
        q.push(self.tau);
        q
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.position();
        v.extend_from_slice(&self.xi_dot);
        v.extend_from_slice(&self.eta_dot);
        v
    }

    pub fn from_vec(n: usize, v: &[f64]) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        check_len(4 * n - 1, v.len())?;
        Ok(Self {
            xi: v[..n].to_vec(),
            eta: v[n..2 * n - 1].to_vec(),
            tau: v[2 * n - 1],
            xi_dot: v[2 * n..3 * n].to_vec(),
            eta_dot: v[3 * n..].to_vec(),
        })
    }

    /// Same position, opposite velocity.
    pub fn reversed(&self) -> Self {
        Self {
            xi_dot: self.xi_dot.iter().map(|v| -v).collect(),
            eta_dot: self.eta_dot.iter().map(|v| -v).collect(),
            ..self.clone()
        }
    }

    fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub states: Vec<(f64, GeodesicState)>,
    pub step: f64,
    /// Set when integration stopped early because the curve left the
    /// domain box; holds the last `s` reached inside.
    pub domain_exit: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &GeodesicState {
        &self.states.last().expect("nonempty").1
    }
}

/// `τ̇` from the horizontality constraint.
fn tau_dot(state: &GeodesicState, alpha: f64) -> f64 {
    let n = state.n();
    let mut v = 2.0 * alpha * state.xi_dot[0];
    for j in 1..n {
        v += state.eta[j - 1] * state.xi_dot[j] - state.xi[j] * state.eta_dot[j - 1];
    }
    v
}

/// `γ̇ = (Ξ, H, τ̇)`
fn velocity(state: &GeodesicState, alpha: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * state.n());
    v.extend_from_slice(&state.xi_dot);
    v.extend_from_slice(&state.eta_dot);
    v.push(tau_dot(state, alpha));
    v
}

/// `M = 2 φ_τ α̇ ξ̇_1 + γ̇ᵀ D²φ γ̇` with `α̇ = ⟨γ̇, Dφ⟩`; `vel` is the full
/// `(ξ̇̄, η̇̃, τ̇)`.
pub fn m_term(graph: &IntrinsicGraph, q: &[f64], vel: &[f64]) -> Result<f64> {
    check_len(q.len(), vel.len())?;
    let jet = graph.phi_jet(q)?;
    let alpha_dot = dot(vel, &jet.gradient);
    let phi_tau = *jet.gradient.last().expect("nonempty");
    Ok(2.0 * phi_tau * alpha_dot * vel[0] + bilinear(vel, &jet.hessian, vel))
}

/// Pointwise quantities along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPointData {
    pub alpha: f64,
    pub alpha_dot: f64,
    pub w: f64,
    pub m: f64,
    /// `ν^H` at `Ψ(γ)`.
    pub normal: HVec<f64>,
    /// `(Ξ, α̇, H)`, the frame coefficients of `Γ̇`.
    pub frame_velocity: HVec<f64>,
    pub derivative: GeodesicState,
}

pub fn point_data(graph: &IntrinsicGraph, state: &GeodesicState) -> Result<GeodesicPointData> {
    let n = graph.n();
    check_len(n, state.n())?;
    let q = state.position();
    let jet = graph.phi_jet(&q)?;
    let alpha = jet.value;
    let vel = velocity(state, alpha);
    let alpha_dot = dot(&vel, &jet.gradient);
    let phi_tau = jet.gradient[2 * n - 1];
    let m = 2.0 * phi_tau * alpha_dot * vel[0] + bilinear(&vel, &jet.hessian, &vel);
    let g = crate::surface::intrinsic_gradient(n, &q, alpha, jet.gradient);
    let k = m / g.w;
    let derivative = GeodesicState {
        xi: state.xi_dot.clone(),
        eta: state.eta_dot.clone(),
        tau: vel[2 * n - 1],
        xi_dot: (0..n)
            .map(|j| -k * if j == 0 { g.w_phi() } else { g.x_tilde(j) })
            .collect(),
        eta_dot: (1..n).map(|j| -k * g.y_tilde(j)).collect(),
    };
    let mut b = vec![alpha_dot];
    b.extend_from_slice(&state.eta_dot);
    Ok(GeodesicPointData {
        alpha,
        alpha_dot,
        w: g.w,
        m,
        normal: crate::surface::intrinsic_normal(n, &g),
        frame_velocity: HVec::new(&state.xi_dot, &b)?,
        derivative,
    })
}

/// Right-hand side of the first-order system.
pub fn geodesic_rhs(graph: &IntrinsicGraph, state: &GeodesicState) -> Result<GeodesicState> {
    Ok(point_data(graph, state)?.derivative)
}

/// Initial state for `Γ(0) = p`, `Γ̇(0) = w`. `w` must be tangent, and then
/// `⟨γ̇(0), Dφ⟩` reproduces its `Y_1` component.
pub fn initial_state(graph: &IntrinsicGraph, p: &Point<f64>, w: &HVec<f64>) -> Result<GeodesicState> {
    let n = graph.n();
    check_len(n, p.n())?;
    check_len(n, w.n())?;
    let q = project_pi(p);
    let residual = (p.y()[0] - graph.phi_value(&q)?).abs();
    if !(residual < MEMBERSHIP_TOL) {
        return Err(Error::NotOnSurface { residual });
    }
    let nu = graph.normal(&q)?;
    let normal_part = w.dot(&nu)?;
    if normal_part.abs() >= TANGENT_TOL {
        return Err(Error::NotTangent(normal_part));
    }
    let state = GeodesicState {
        xi: q[..n].to_vec(),
        eta: q[n..2 * n - 1].to_vec(),
        tau: q[2 * n - 1],
        xi_dot: w.a().to_vec(),
        eta_dot: w.b()[1..].to_vec(),
    };
    let data = point_data(graph, &state)?;
    let gap = data.alpha_dot - w.b()[0];
    if gap.abs() >= TANGENT_TOL {
        return Err(Error::NotTangent(gap));
    }
    Ok(state)
}

/// Chart-checked entry point: geodesics need an intrinsic `Y_1`-graph.
pub fn require_chart(s: &Surface) -> Result<&IntrinsicGraph> {
    s.intrinsic_graph().ok_or_else(|| {
        Error::Unsupported(
            "geodesics are integrated in an intrinsic Y1-graph chart; describe the surface as kind \
             intrinsic-y1 over a box containing the start point"
                .into(),
        )
    })
}

fn axpy_state(n: usize, base: &[f64], h: f64, d: &[f64]) -> Result<GeodesicState> {
    let v: Vec<f64> = base.iter().zip(d).map(|(b, k)| b + h * k).collect();
    GeodesicState::from_vec(n, &v)
}

enum Stage {
    Ok(GeodesicState),
    Exit,
}

fn rk4_step(graph: &IntrinsicGraph, state: &GeodesicState, h: f64) -> Result<Stage> {
    let n = graph.n();
    let eval = |s: &GeodesicState| -> Result<Option<Vec<f64>>> {
        if graph.check_domain(&s.position()).is_err() {
            return Ok(None);
        }
        Ok(Some(geodesic_rhs(graph, s)?.to_vec()))
    };
    let y = state.to_vec();
    let Some(k1) = eval(state)? else { return Ok(Stage::Exit) };
    let Some(k2) = eval(&axpy_state(n, &y, 0.5 * h, &k1)?)? else { return Ok(Stage::Exit) };
    let Some(k3) = eval(&axpy_state(n, &y, 0.5 * h, &k2)?)? else { return Ok(Stage::Exit) };
    let Some(k4) = eval(&axpy_state(n, &y, h, &k3)?)? else { return Ok(Stage::Exit) };
    let next: Vec<f64> = (0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    let next = GeodesicState::from_vec(n, &next)?;
    if !next.is_finite() {
        return Err(Error::NonFinite("geodesic state".into()));
    }
    if graph.check_domain(&next.position()).is_err() {
        return Ok(Stage::Exit);
    }
    Ok(Stage::Ok(next))
}

/// Fixed-step classical Runge-Kutta over `s ∈ [0, step · n_steps]`.
pub fn integrate(graph: &IntrinsicGraph, state0: &GeodesicState, step: f64, n_steps: usize) -> Result<Trajectory> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    check_len(graph.n(), state0.n())?;
    graph.check_domain(&state0.position())?;
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push((0.0, state0.clone()));
    let mut current = state0.clone();
    for i in 1..=n_steps {
        match rk4_step(graph, &current, step)? {
            Stage::Ok(next) => {
                states.push((i as f64 * step, next.clone()));
                current = next;
            }
            Stage::Exit => {
                return Ok(Trajectory {
                    step,
                    domain_exit: Some((i - 1) as f64 * step),
                    states,
                });
            }
        }
    }
    Ok(Trajectory {
        states,
        step,
        domain_exit: None,
    })
}

/// A sample of the lifted curve `Γ = Ψ(γ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftedSample {
    pub s: f64,
    pub point: Point<f64>,
    /// Frame coefficients of `Γ̇`.
    pub velocity: HVec<f64>,
    pub speed: f64,
    /// `|y_1 − φ(Π(Γ))|`
    pub on_surface_residual: f64,
    /// `T` component of `Γ̇` recomputed from Euclidean coordinates.
    pub horizontality_residual: f64,
}

pub fn lift_trajectory(graph: &IntrinsicGraph, traj: &Trajectory) -> Result<Vec<LiftedSample>> {
    traj.states
        .iter()
        .map(|(s, state)| {
            let data = point_data(graph, state)?;
            let q = state.position();
            let point = graph.lift_psi(&q)?;
            let n = graph.n();
            // Euclidean velocity of Ψ(γ): (Ξ, α̇, H, τ̇ − Ξ_1 α − ξ_1 α̇)
            let v = data.frame_velocity.components();
            let t_dot = data.derivative.tau - state.xi_dot[0] * data.alpha - state.xi[0] * data.alpha_dot;
            let (x, y) = (point.x(), point.y());
            let horizontal_t: f64 = (0..n).map(|j| v[j] * y[j] - v[n + j] * x[j]).sum();
            let on_surface_residual = (y[0] - graph.phi_value(&project_pi(&point))?).abs();
            Ok(LiftedSample {
                s: *s,
                speed: data.frame_velocity.norm(),
                velocity: data.frame_velocity,
                point,
                on_surface_residual,
                horizontality_residual: (t_dot - horizontal_t).abs(),
            })
        })
        .collect()
}

/// True iff the frame velocity is constant and every point equals
/// `Γ(s_0)·δ_{s−s_0}(v̄)` for the mean velocity `v̄`, both within `tol`.
pub fn is_horizontal_line(curve: &[LiftedSample], tol: f64) -> Result<bool> {
    if curve.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: curve.len(),
        });
    }
    let m = curve[0].velocity.components().len();
    let count = curve.len() as f64;
    let mean: Vec<f64> = (0..m)
        .map(|i| curve.iter().map(|c| c.velocity.components()[i]).sum::<f64>() / count)
        .collect();
    for c in curve {
        if c.velocity.components().iter().zip(&mean).any(|(v, m)| (v - m).abs() >= tol) {
            return Ok(false);
        }
    }
    let start = &curve[0];
    let v = HVec::from_components(&mean)?;
    for c in curve {
        let ds = c.s - start.s;
        let expected = group_mul(&start.point, &v.scale(ds).to_point())?;
        let gap = expected
            .coords()
            .iter()
            .zip(c.point.coords())
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        if gap >= tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Along-trajectory checks of the reduction: the normal acceleration
/// `⟨Γ̈, ν^H⟩` (central differences of the frame velocity) against
/// `−W^{−1/2} M`, and the second difference of `α = φ(γ)` against `W⁻¹ M`.
/// Returns the two maximal gaps over interior samples.
pub fn reduction_residuals(graph: &IntrinsicGraph, traj: &Trajectory) -> Result<(f64, f64)> {
    let data: Vec<GeodesicPointData> = traj
        .states
        .iter()
        .map(|(_, st)| point_data(graph, st))
        .collect::<Result<_>>()?;
    if data.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: data.len(),
        });
    }
    let h = traj.step;
    let (mut normal_gap, mut alpha_gap) = (0.0f64, 0.0f64);
    for i in 1..data.len() - 1 {
        let (prev, cur, next) = (&data[i - 1], &data[i], &data[i + 1]);
        let accel: Vec<f64> = next
            .frame_velocity
            .components()
            .iter()
            .zip(prev.frame_velocity.components())
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        let lhs = dot(&accel, cur.normal.components());
        normal_gap = normal_gap.max((lhs + cur.m / cur.w.sqrt()).abs());
        let alpha_dd = (next.alpha - 2.0 * cur.alpha + prev.alpha) / (h * h);
        alpha_gap = alpha_gap.max((alpha_dd - cur.m / cur.w).abs());
    }
    Ok((normal_gap, alpha_gap))
}
