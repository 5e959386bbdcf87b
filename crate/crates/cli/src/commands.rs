use std::fmt::Write as _;

use heisenberg::curvature::{curvature_sample, CurvatureSample};
use heisenberg::geodesic::{
    initial_state, integrate, lift_trajectory, require_chart, GeodesicState, LiftedSample, DEFAULT_STEP,
};
use heisenberg::ruling::{
    ray_scan, summarize, tangent_directions, DirectionReport, LocalRulingReport, RayOptions, RayVerdict,
    DEFAULT_HORIZON, DEFAULT_RAY_STEP,
};
use heisenberg::sampling::grid;
use heisenberg::surface::schema::SurfaceSpec;
use heisenberg::surface::{CHAR_TOL, MEMBERSHIP_TOL};
use heisenberg::verify::{self, CriterionReport};
use heisenberg::{HVec, Point};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{positive, Format, PointSpec, RunConfig};
use crate::Failure;

pub const DEFAULT_HTG_TOL: f64 = 1e-4;
pub const DEFAULT_DIRECTIONS: usize = 16;
pub const DEFAULT_GEODESIC_HORIZON: f64 = 1.0;

fn compute<E: std::fmt::Display>(context: &str) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Compute(format!("{context}: {e}"))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

/// Shortest round-trip form, exponent notation for very small or large values.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn coord_header(n: usize) -> String {
    let mut h: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    h.extend((1..=n).map(|j| format!("y{j}")));
    h.push("t".into());
    h.join(",")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct CurvatureReport<'a> {
    surface: &'a SurfaceSpec,
    tol_char: f64,
    tol_htg: f64,
    rows: Vec<CurvatureSample>,
}

pub fn curvature(cfg: &RunConfig, format: Format) -> Result<String, Failure> {
    let s = cfg.build_surface(crate::config::Command::Curvature)?;
    let tol_char = positive("tol_char", cfg.tol_char.unwrap_or(CHAR_TOL))?;
    let tol_member = positive("tol_member", cfg.tol_member.unwrap_or(MEMBERSHIP_TOL))?;
    let tol_htg = positive("tol_htg", cfg.tol_htg.unwrap_or(DEFAULT_HTG_TOL))?;
    let points: Vec<Point> = match (&cfg.grid, &cfg.points) {
        (Some(g), None) => {
            let params = grid(&g.lo, &g.hi, g.resolution).map_err(|e| Failure::Usage(format!("grid: {e}")))?;
            params
                .iter()
                .map(|z| {
                    PointSpec {
                        chart: Some(z.clone()),
                        ..Default::default()
                    }
                    .point("grid", &s, tol_member)
                })
                .collect::<Result<_, _>>()?
        }
        (None, Some(list)) => list
            .iter()
            .enumerate()
            .map(|(i, ps)| {
                let key = format!("points[{i}]");
                ps.reject(&key, &["direction", "frame_weights"])?;
                ps.point(&key, &s, tol_member)
            })
            .collect::<Result<_, _>>()?,
        _ => return Err(Failure::Usage("curvature needs exactly one of grid, points".into())),
    };
    let rows = points
        .par_iter()
        .map(|p| curvature_sample(&s, p, tol_char, tol_htg).map_err(compute(&format!("point {:?}", p.coords()))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(match format {
        Format::Json => json(&CurvatureReport {
            surface: cfg.surface.as_ref().expect("built above"),
            tol_char,
            tol_htg,
            rows,
        }),
        Format::Csv => {
            let mut out = format!("{},{}\n", coord_header(s.n()), CurvatureSample::CSV_HEADER);
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    join(&r.p),
                    r.characteristic,
                    opt(r.td_h),
                    opt(r.mean_curvature),
                    opt(r.norm_h_sq),
                    opt(r.norm_tilde_h_sq),
                    r.htg.map(|b| b.to_string()).unwrap_or_default()
                )
                .expect("string write");
            }
            out
        }
    })
}

#[derive(Serialize)]
struct GeodesicRow<'a> {
    state: &'a GeodesicState,
    #[serde(flatten)]
    lifted: &'a LiftedSample,
}

#[derive(Serialize)]
struct GeodesicReport<'a> {
    step: f64,
    domain_exit: Option<f64>,
    samples: Vec<GeodesicRow<'a>>,
}

pub struct GeodesicOutput {
    pub text: String,
    pub domain_exit: Option<f64>,
}

pub fn geodesic(cfg: &RunConfig, format: Format) -> Result<GeodesicOutput, Failure> {
    let s = cfg.build_surface(crate::config::Command::Geodesic)?;
    let g = require_chart(&s).map_err(|e| Failure::Usage(e.to_string()))?;
    let n = s.n();
    let tol_member = positive("tol_member", cfg.tol_member.unwrap_or(MEMBERSHIP_TOL))?;
    let step = positive("step", cfg.step.unwrap_or(DEFAULT_STEP))?;
    let horizon = positive("horizon", cfg.horizon.unwrap_or(DEFAULT_GEODESIC_HORIZON))?;
    let start = cfg
        .start
        .as_ref()
        .ok_or_else(|| Failure::Usage("start is required for command geodesic".into()))?;
    let p = start.point("start", &s, tol_member)?;
    let w = match (&start.direction, &start.frame_weights) {
        (Some(_), None) => start.unit_direction("start", n)?,
        (None, Some(c)) => {
            let frames = g
                .frames(&heisenberg::surface::project_pi(&p))
                .map_err(|e| Failure::Usage(format!("start: {e}")))?;
            if c.len() != frames.len() {
                return Err(Failure::Usage(format!(
                    "start.frame_weights must have {} entries",
                    frames.len()
                )));
            }
            let mut v = vec![0.0; 2 * n];
            for (ci, f) in c.iter().zip(&frames) {
                for (vk, fk) in v.iter_mut().zip(f.components()) {
                    *vk += ci * fk;
                }
            }
            PointSpec {
                direction: Some(v),
                ..Default::default()
            }
            .unit_direction("start.frame_weights", n)?
        }
        _ => return Err(Failure::Usage("start needs exactly one of direction, frame_weights".into())),
    };
    let st0 = initial_state(g, &p, &w).map_err(|e| Failure::Usage(format!("start: {e}")))?;
    let n_steps = (horizon / step).round() as usize;
    if n_steps == 0 {
        return Err(Failure::Usage("horizon must be at least one step".into()));
    }
    let traj = integrate(g, &st0, step, n_steps).map_err(compute("integration"))?;
    let lifted = lift_trajectory(g, &traj).map_err(compute("lift"))?;
    let text = match format {
        Format::Json => json(&GeodesicReport {
            step,
            domain_exit: traj.domain_exit,
            samples: traj
                .states
                .iter()
                .zip(&lifted)
                .map(|((_, state), lifted)| GeodesicRow { state, lifted })
                .collect(),
        }),
        Format::Csv => {
            let mut h = vec!["s".to_string()];
            h.extend((1..=n).map(|j| format!("xi{j}")));
            h.extend((2..=n).map(|j| format!("eta{j}")));
            h.push("tau".into());
            h.push(coord_header(n));
            h.extend(["speed", "on_surface_residual", "horizontality_residual"].map(String::from));
            let mut out = h.join(",");
            out.push('\n');
            for ((sv, state), c) in traj.states.iter().zip(&lifted) {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    num(*sv),
                    join(&state.position()),
                    join(&c.point.coords()),
                    num(c.speed),
                    num(c.on_surface_residual),
                    num(c.horizontality_residual)
                )
                .expect("string write");
            }
            out
        }
    };
    Ok(GeodesicOutput {
        text,
        domain_exit: traj.domain_exit,
    })
}

#[derive(Serialize)]
struct RayReport {
    point: Point,
    direction: HVec,
    verdict: RayVerdict,
}

#[derive(Serialize)]
struct Witness {
    point: Point,
    direction: HVec,
    exit_s: Option<f64>,
    endpoint_nh: Option<f64>,
}

#[derive(Serialize)]
struct RulingSummary {
    locally_ruled: bool,
    ruled: bool,
    max_residual: f64,
    horizon_bounded: bool,
}

#[derive(Serialize)]
struct RulingReport<'a> {
    surface: &'a SurfaceSpec,
    options: RayOptions,
    directions_per_point: usize,
    points: Vec<LocalRulingReport>,
    rays: Vec<RayReport>,
    summary: RulingSummary,
    witnesses: Vec<Witness>,
}

pub fn ruling(cfg: &RunConfig, format: Format) -> Result<String, Failure> {
    if format == Format::Csv {
        return Err(Failure::Usage("ruling reports are JSON only; use --format json".into()));
    }
    let s = cfg.build_surface(crate::config::Command::Ruling)?;
    let tol_member = positive("tol_member", cfg.tol_member.unwrap_or(MEMBERSHIP_TOL))?;
    let opts = RayOptions {
        s_max: positive("horizon", cfg.horizon.unwrap_or(DEFAULT_HORIZON))?,
        step: positive("step", cfg.step.unwrap_or(DEFAULT_RAY_STEP))?,
        tol: tol_member,
        char_tol: positive("tol_char", cfg.tol_char.unwrap_or(CHAR_TOL))?,
    };
    if opts.step > opts.s_max {
        return Err(Failure::Usage("step must not exceed horizon".into()));
    }
    let n_dirs = cfg.directions.unwrap_or(DEFAULT_DIRECTIONS);
    if n_dirs == 0 {
        return Err(Failure::Usage("directions must be positive".into()));
    }
    let points = cfg
        .points
        .iter()
        .flatten()
        .enumerate()
        .map(|(i, ps)| {
            let key = format!("points[{i}]");
            ps.reject(&key, &["direction", "frame_weights"])?;
            ps.point(&key, &s, tol_member)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rays = cfg
        .rays
        .iter()
        .flatten()
        .enumerate()
        .map(|(i, ps)| {
            let key = format!("rays[{i}]");
            ps.reject(&key, &["frame_weights"])?;
            Ok((ps.point(&key, &s, tol_member)?, ps.unit_direction(&key, s.n())?))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    if points.is_empty() && rays.is_empty() {
        return Err(Failure::Usage("ruling needs points or rays".into()));
    }
    let point_reports = points
        .par_iter()
        .map(|p| {
            let dirs = tangent_directions(&s, p, n_dirs).map_err(|e| Failure::Usage(format!("point {:?}: {e}", p.coords())))?;
            let reports = dirs
                .into_par_iter()
                .enumerate()
                .map(|(index, w)| {
                    Ok(DirectionReport {
                        index,
                        forward: ray_scan(&s, p, &w, &opts)?,
                        backward: ray_scan(&s, p, &w.scale(-1.0), &opts)?,
                        direction: w,
                    })
                })
                .collect::<heisenberg::Result<Vec<_>>>()
                .map_err(compute(&format!("point {:?}", p.coords())))?;
            Ok(summarize(p, reports))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let ray_reports = rays
        .par_iter()
        .enumerate()
        .map(|(i, (p, w))| {
            ray_scan(&s, p, w, &opts)
                .map(|verdict| RayReport {
                    point: p.clone(),
                    direction: w.clone(),
                    verdict,
                })
                .map_err(|e| Failure::Usage(format!("rays[{i}]: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut witnesses = Vec::new();
    let mut note = |p: &Point, w: &HVec, v: &RayVerdict| {
        if v.endpoint_characteristic == Some(false) {
            witnesses.push(Witness {
                point: p.clone(),
                direction: w.clone(),
                exit_s: v.exit_s,
                endpoint_nh: v.endpoint_nh,
            });
        }
    };
    for r in &point_reports {
        for d in &r.directions {
            note(&r.point, &d.direction, &d.forward);
            note(&r.point, &d.direction.scale(-1.0), &d.backward);
        }
    }
    for r in &ray_reports {
        note(&r.point, &r.direction, &r.verdict);
    }
    let all = || {
        point_reports
            .iter()
            .flat_map(|r| r.directions.iter().flat_map(|d| [&d.forward, &d.backward]))
            .chain(ray_reports.iter().map(|r| &r.verdict))
    };
    let summary = RulingSummary {
        locally_ruled: all().all(|v| v.stays_within_horizon),
        ruled: all().all(RayVerdict::is_ruled),
        max_residual: all().fold(0.0f64, |a, v| a.max(v.max_residual_before_exit)),
        horizon_bounded: true,
    };
    Ok(json(&RulingReport {
        surface: cfg.surface.as_ref().expect("built above"),
        options: opts,
        directions_per_point: n_dirs,
        points: point_reports,
        rays: ray_reports,
        summary,
        witnesses,
    }))
}

#[derive(Serialize)]
struct VerifyLine<'a> {
    id: u32,
    title: &'a str,
    passed: bool,
    detail: &'a str,
}

pub fn verify(format: Format, corrupt_law: bool) -> (String, bool) {
    let reports: Vec<CriterionReport> = if corrupt_law {
        verify::run_all_with(crate::skewed_law)
    } else {
        verify::run_all()
    };
    let ok = reports.iter().all(|r| r.passed);
    let text = match format {
        Format::Csv => {
            let mut s = String::new();
            for r in &reports {
                writeln!(s, "{r}").expect("string write");
            }
            let passed = reports.iter().filter(|r| r.passed).count();
            writeln!(s, "{passed}/{} criteria passed", reports.len()).expect("string write");
            s
        }
        Format::Json => json(
            &reports
                .iter()
                .map(|r| VerifyLine {
                    id: r.id,
                    title: r.title,
                    passed: r.passed,
                    detail: &r.detail,
                })
                .collect::<Vec<_>>(),
        ),
    };
    (text, ok)
}
