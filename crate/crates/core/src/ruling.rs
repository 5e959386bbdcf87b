//! Ruling checks: does the horizontal ray `s ↦ p·δ_s(w)` stay on `S`, and if
//! it leaves, is the last point on `S` characteristic?
//!
//! Every verdict is bounded by a finite horizon; "stays" means "stays up to
//! `s_max`".

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{dilate, group_mul, pseudoherm_transform, BlockRotation, HVec, Point};
use crate::linalg::norm;
use crate::sampling::sphere_points;
use crate::surface::{Surface, CHAR_TOL, MEMBERSHIP_TOL};

pub const DEFAULT_HORIZON: f64 = 10.0;
pub const DEFAULT_RAY_STEP: f64 = 1e-2;

/// Residuals below this are treated as equal when comparing scans of
/// transformed surfaces.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayOptions {
    pub s_max: f64,
    pub step: f64,
    /// Bound on the normalized residual `|f(p·δ_s(w))| / |∇f(p)|`.
    pub tol: f64,
    /// `|N^H|` threshold for classifying the exit point.
    pub char_tol: f64,
}

impl Default for RayOptions {
    fn default() -> Self {
        Self {
            s_max: DEFAULT_HORIZON,
            step: DEFAULT_RAY_STEP,
            tol: MEMBERSHIP_TOL,
            char_tol: CHAR_TOL,
        }
    }
}

impl RayOptions {
    fn validate(&self) -> Result<()> {
        if !(self.s_max > 0.0 && self.s_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon must be positive, got {}", self.s_max)));
        }
        if !(self.step > 0.0 && self.step <= self.s_max) {
            return Err(Error::InvalidParameter(format!("step must lie in (0, horizon], got {}", self.step)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayVerdict {
    pub stays_within_horizon: bool,
    /// First `s` with residual above tolerance, located to `step · 1e−3`.
    pub exit_s: Option<f64>,
    /// Whether the last on-surface point is characteristic.
    pub endpoint_characteristic: Option<bool>,
    /// `|N^H|` at the last on-surface point.
    pub endpoint_nh: Option<f64>,
    pub max_residual_before_exit: f64,
    /// Set when the ray left the surface's domain box at this `s` before
    /// leaving the surface; the scan is then bounded by it.
    pub domain_exit_s: Option<f64>,
}

impl RayVerdict {
    /// Consistent with a ruling: stays, or leaves at a characteristic point.
    pub fn is_ruled(&self) -> bool {
        self.stays_within_horizon || self.endpoint_characteristic == Some(true)
    }

    /// The classification compared across transformed scans.
    pub fn class(&self) -> (bool, Option<bool>) {
        (self.stays_within_horizon, self.endpoint_characteristic)
    }
}

/// `p·δ_s(w) = p·(s w, 0)`
pub fn ray_point(p: &Point<f64>, w: &HVec<f64>, s: f64) -> Result<Point<f64>> {
    group_mul(p, &w.scale(s).to_point())
}

fn check_direction(surface: &Surface, p: &Point<f64>, w: &HVec<f64>) -> Result<()> {
    let len = w.norm();
    if (len - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnit(len));
    }
    let nu = surface.horizontal_normal(p)?;
    let normal_part = w.dot(&nu)?;
    if normal_part.abs() >= 1e-9 {
        return Err(Error::NotTangent(normal_part));
    }
    Ok(())
}

pub fn ray_scan(surface: &Surface, p: &Point<f64>, w: &HVec<f64>, opts: &RayOptions) -> Result<RayVerdict> {
    opts.validate()?;
    check_direction(surface, p, w)?;
    let scale = norm(&surface.defining_jet(p)?.gradient);
    let residual = |s: f64| -> Result<f64> { Ok(surface.membership_residual(&ray_point(p, w, s)?) / scale) };
    let steps = (opts.s_max / opts.step).ceil() as usize;
    let mut max_res = residual(0.0)?;
    let mut last_ok = 0.0;
    for i in 1..=steps {
        let s = (i as f64 * opts.step).min(opts.s_max);
        let r = residual(s)?;
        if r.is_infinite() {
            return Ok(RayVerdict {
                stays_within_horizon: true,
                exit_s: None,
                endpoint_characteristic: None,
                endpoint_nh: None,
                max_residual_before_exit: max_res,
                domain_exit_s: Some(s),
            });
        }
        if r > opts.tol {
            let (mut lo, mut hi) = (last_ok, s);
            while hi - lo > opts.step * 1e-3 {
                let mid = 0.5 * (lo + hi);
                let rm = residual(mid)?;
                if rm > opts.tol {
                    hi = mid;
                } else {
                    max_res = max_res.max(rm);
                    lo = mid;
                }
            }
            let nh = surface.nh_norm_unchecked(&ray_point(p, w, lo)?)?;
            return Ok(RayVerdict {
                stays_within_horizon: false,
                exit_s: Some(hi),
                endpoint_characteristic: Some(nh <= opts.char_tol),
                endpoint_nh: Some(nh),
                max_residual_before_exit: max_res,
                domain_exit_s: None,
            });
        }
        max_res = max_res.max(r);
        last_ok = s;
    }
    Ok(RayVerdict {
        stays_within_horizon: true,
        exit_s: None,
        endpoint_characteristic: None,
        endpoint_nh: None,
        max_residual_before_exit: max_res,
        domain_exit_s: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionReport {
    pub index: usize,
    pub direction: HVec<f64>,
    pub forward: RayVerdict,
    pub backward: RayVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalRulingReport {
    pub point: Point<f64>,
    pub locally_ruled: bool,
    /// Every ray stays or leaves at a characteristic point.
    pub ruled: bool,
    pub max_residual: f64,
    pub directions: Vec<DirectionReport>,
}

/// Unit tangent directions `Σ c_i e_i` for sphere points `c` in the
/// orthonormal tangent basis.
pub fn tangent_directions(surface: &Surface, p: &Point<f64>, n_dirs: usize) -> Result<Vec<HVec<f64>>> {
    let basis = surface.horizontal_tangent_basis(p)?;
    let m = 2 * surface.n();
    sphere_points(basis.len(), n_dirs)?
        .into_iter()
        .map(|c| {
            let mut v = vec![0.0; m];
            for (ci, e) in c.iter().zip(&basis) {
                crate::linalg::axpy(&mut v, *ci, e.components());
            }
            HVec::from_components(&v)
        })
        .collect()
}

/// Scans `±w` with horizon `opts.s_max` for `n_dirs` deterministic directions.
pub fn local_ruling_check(surface: &Surface, p: &Point<f64>, n_dirs: usize, opts: &RayOptions) -> Result<LocalRulingReport> {
    let dirs = tangent_directions(surface, p, n_dirs)?;
    let directions = dirs
        .into_iter()
        .enumerate()
        .map(|(index, w)| {
            Ok(DirectionReport {
                index,
                forward: ray_scan(surface, p, &w, opts)?,
                backward: ray_scan(surface, p, &w.scale(-1.0), opts)?,
                direction: w,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(p, directions))
}

/// Builds the report from per-direction results computed elsewhere (e.g. in
/// parallel); order is by `index`.
pub fn summarize(p: &Point<f64>, mut directions: Vec<DirectionReport>) -> LocalRulingReport {
    directions.sort_by_key(|d| d.index);
    let rays = || directions.iter().flat_map(|d| [&d.forward, &d.backward]);
    let locally_ruled = rays().all(|r| r.stays_within_horizon);
    let ruled = rays().all(RayVerdict::is_ruled);
    let max_residual = rays().fold(0.0f64, |a, r| a.max(r.max_residual_before_exit));
    LocalRulingReport {
        point: p.clone(),
        locally_ruled,
        ruled,
        max_residual,
        directions,
    }
}

/// A transformation `T` of `H^n` together with how it acts on rays.
#[derive(Debug, Clone)]
pub enum Transform {
    Translation(Point<f64>),
    Dilation(f64),
    Rotation(BlockRotation),
}

impl Transform {
    pub fn random<R: Rng + ?Sized>(kind: usize, n: usize, rng: &mut R) -> Result<Self> {
        Ok(match kind % 3 {
            0 => {
                let c: Vec<f64> = (0..2 * n + 1).map(|_| rng.gen_range(-2.0..2.0)).collect();
                Transform::Translation(Point::from_coords(&c)?)
            }
            1 => Transform::Dilation(rng.gen_range(0.5..2.0)),
            _ => Transform::Rotation(BlockRotation::random(n, rng)?),
        })
    }

    pub fn surface(&self, s: &Surface) -> Result<Surface> {
        match self {
            Transform::Translation(q) => s.left_translated(q),
            Transform::Dilation(l) => s.dilated(*l),
            Transform::Rotation(r) => s.rotated(r),
        }
    }

    pub fn point(&self, p: &Point<f64>) -> Result<Point<f64>> {
        match self {
            Transform::Translation(q) => group_mul(q, p),
            Transform::Dilation(l) => dilate(*l, p),
            Transform::Rotation(r) => pseudoherm_transform(r, p),
        }
    }

    /// Unit direction of the image ray; left translations preserve frame
    /// coefficients, `δ_λ` rescales only the ray parameter.
    pub fn direction(&self, w: &HVec<f64>) -> Result<HVec<f64>> {
        match self {
            Transform::Translation(_) | Transform::Dilation(_) => Ok(w.clone()),
            Transform::Rotation(r) => r.apply_hvec(w),
        }
    }

    /// Ray parameter rescaling: `T(p·δ_s(w)) = T(p)·δ_{κ s}(dT w)`.
    pub fn parameter_scale(&self) -> f64 {
        match self {
            Transform::Dilation(l) => *l,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceCase {
    pub transform: String,
    pub verdict: RayVerdict,
    pub class_preserved: bool,
    /// Exit parameter over the base exit parameter, after undoing the
    /// reparametrization. Informational: the residual is normalized by the
    /// Euclidean gradient, which transformations do not preserve.
    pub exit_ratio: Option<f64>,
    /// Normalized residual ratio, both sides floored at [`RESIDUAL_FLOOR`].
    pub residual_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub base: RayVerdict,
    pub cases: Vec<InvarianceCase>,
}

impl InvarianceReport {
    pub fn all_preserved(&self, residual_factor: f64) -> bool {
        self.cases.iter().all(|c| {
            c.class_preserved
                && c.residual_ratio <= residual_factor
                && c.residual_ratio >= 1.0 / residual_factor
        })
    }
}

/// Compares `ray_scan(S, p, w)` with `ray_scan(T(S), T(p), dT(w))` for each
/// transform.
pub fn invariance_suite(
    surface: &Surface,
    p: &Point<f64>,
    w: &HVec<f64>,
    transforms: &[Transform],
    opts: &RayOptions,
) -> Result<InvarianceReport> {
    let base = ray_scan(surface, p, w, opts)?;
    let cases = transforms
        .iter()
        .map(|t| {
            let k = t.parameter_scale();
            let scaled = RayOptions {
                s_max: opts.s_max * k,
                step: opts.step * k,
                ..*opts
            };
            let image = t.surface(surface)?;
            let verdict = ray_scan(&image, &t.point(p)?, &t.direction(w)?, &scaled)?;
            let exit_ratio = match (base.exit_s, verdict.exit_s) {
                (Some(a), Some(b)) => Some(b / k / a),
                _ => None,
            };
            let residual_ratio = verdict.max_residual_before_exit.max(RESIDUAL_FLOOR)
                / base.max_residual_before_exit.max(RESIDUAL_FLOOR);
            Ok(InvarianceCase {
                transform: format!("{t:?}"),
                class_preserved: verdict.class() == base.class(),
                exit_ratio,
                residual_ratio,
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InvarianceReport { base, cases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(c: &[f64]) -> Point<f64> {
        Point::from_coords(c).unwrap()
    }

    #[test]
    fn vertical_hyperplane_rays_stay() {
        let s = Surface::vertical_hyperplane(&[1.0, 0.5], &[-0.3, 2.0], 1.0).unwrap();
        let p = pt(&[1.0, 0.0, 0.0, 0.0, 4.0]);
        let rep = local_ruling_check(&s, &p, 12, &RayOptions::default()).unwrap();
        assert!(rep.locally_ruled && rep.ruled);
        assert!(rep.max_residual < 1e-12);
    }

    #[test]
    fn h0_is_ruled_away_from_origin() {
        let s = Surface::h0(2).unwrap();
        let rep = local_ruling_check(&s, &pt(&[1.0, 0.0, 0.0, 0.0, 0.0]), 16, &RayOptions::default()).unwrap();
        assert!(rep.locally_ruled);
        assert_eq!(rep.max_residual, 0.0);
    }

    #[test]
    fn helicoid_ruling_direction() {
        let s = Surface::helicoid();
        let (r, th) = (0.8, 1.1);
        let p = s.chart_point(&[r, th]).unwrap();
        let w = HVec::new(&[th.cos()], &[th.sin()]).unwrap();
        let v = ray_scan(&s, &p, &w, &RayOptions::default()).unwrap();
        assert!(v.stays_within_horizon);
        assert!(v.max_residual_before_exit < 1e-10);
    }

    #[test]
    fn saddle_ray_leaves_at_a_regular_point() {
        let s = Surface::saddle(2).unwrap();
        let p = s.chart_point(&[0.6, 0.5, -0.4, 0.2]).unwrap();
        let dirs = tangent_directions(&s, &p, 8).unwrap();
        let exits: Vec<RayVerdict> = dirs
            .iter()
            .map(|w| ray_scan(&s, &p, w, &RayOptions::default()).unwrap())
            .filter(|v| !v.stays_within_horizon)
            .collect();
        assert!(!exits.is_empty());
        assert!(exits.iter().all(|v| v.endpoint_characteristic == Some(false) && v.endpoint_nh.unwrap() > 0.1));
    }

    #[test]
    fn direction_checks() {
        let s = Surface::h0(1).unwrap();
        let p = pt(&[1.0, 0.0, 0.0]);
        let nu = s.horizontal_normal(&p).unwrap();
        assert!(matches!(ray_scan(&s, &p, &nu, &RayOptions::default()), Err(Error::NotTangent(_))));
        let w = HVec::new(&[2.0], &[0.0]).unwrap();
        assert!(matches!(ray_scan(&s, &p, &w, &RayOptions::default()), Err(Error::NotUnit(_))));
        assert!(matches!(
            ray_scan(&s, &Point::origin(1), &HVec::new(&[1.0], &[0.0]).unwrap(), &RayOptions::default()),
            Err(Error::Characteristic(_))
        ));
    }

    #[test]
    fn domain_boxes_bound_the_scan() {
        let phi = crate::poly::Poly::zero(2);
        let s = Surface::intrinsic_y1(1, phi, crate::surface::BoxDomain::cube(2, 1.0)).unwrap();
        let v = ray_scan(&s, &Point::origin(1), &HVec::new(&[1.0], &[0.0]).unwrap(), &RayOptions::default()).unwrap();
        assert!(v.stays_within_horizon);
        assert!((v.domain_exit_s.unwrap() - 1.01).abs() < 1e-9);
    }

    #[test]
    fn verdicts_survive_transformations() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let s = Surface::saddle(2).unwrap();
        let p = s.chart_point(&[0.6, 0.5, -0.4, 0.2]).unwrap();
        // along a tangent ray the saddle residual is ½(a_1² − b_1²)s², so pick
        // the direction that leaves fastest
        let w = tangent_directions(&s, &p, 8)
            .unwrap()
            .into_iter()
            .max_by(|u, v| {
                let k = |w: &HVec<f64>| (w.a()[0].powi(2) - w.b()[0].powi(2)).abs();
                k(u).total_cmp(&k(v))
            })
            .unwrap();
        let ts: Vec<Transform> = (0..6).map(|k| Transform::random(k, 2, &mut rng).unwrap()).collect();
        let rep = invariance_suite(&s, &p, &w, &ts, &RayOptions::default()).unwrap();
        assert!(!rep.base.stays_within_horizon);
        assert!(rep.all_preserved(10.0), "{rep:#?}");

        let h = Surface::helicoid();
        let p = h.chart_point(&[0.5, 0.3]).unwrap();
        let w = HVec::new(&[0.3f64.cos()], &[0.3f64.sin()]).unwrap();
        let ts: Vec<Transform> = (0..6).map(|k| Transform::random(k, 1, &mut rng).unwrap()).collect();
        let rep = invariance_suite(&h, &p, &w, &ts, &RayOptions::default()).unwrap();
        assert!(rep.base.stays_within_horizon);
        assert!(rep.all_preserved(10.0), "{rep:#?}");
    }
}
