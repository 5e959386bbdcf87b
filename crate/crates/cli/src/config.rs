use std::path::Path;

use heisenberg::surface::schema::SurfaceSpec;
use heisenberg::{HVec, Point, Surface};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Curvature,
    Geodesic,
    Ruling,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Curvature => "curvature",
            Command::Geodesic => "geodesic",
            Command::Ruling => "ruling",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: usize,
}

/// A point given by chart parameters or by its `2n+1` coordinates, with an
/// optional horizontal direction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub surface: Option<SurfaceSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub points: Option<Vec<PointSpec>>,
    #[serde(default)]
    pub start: Option<PointSpec>,
    #[serde(default)]
    pub rays: Option<Vec<PointSpec>>,
    #[serde(default)]
    pub directions: Option<usize>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub tol_char: Option<f64>,
    #[serde(default)]
    pub tol_member: Option<f64>,
    #[serde(default)]
    pub tol_htg: Option<f64>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub format: Option<Format>,
}

pub fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

impl RunConfig {
    /// Rejects keys the command does not read.
    pub fn check_keys(&self, cmd: Command) -> Result<(), Failure> {
        let present = [
            ("surface", self.surface.is_some()),
            ("grid", self.grid.is_some()),
            ("points", self.points.is_some()),
            ("start", self.start.is_some()),
            ("rays", self.rays.is_some()),
            ("directions", self.directions.is_some()),
            ("step", self.step.is_some()),
            ("horizon", self.horizon.is_some()),
            ("tol_char", self.tol_char.is_some()),
            ("tol_member", self.tol_member.is_some()),
            ("tol_htg", self.tol_htg.is_some()),
        ];
        let allowed: &[&str] = match cmd {
            Command::Curvature => &["surface", "grid", "points", "tol_char", "tol_member", "tol_htg"],
            Command::Geodesic => &["surface", "start", "step", "horizon", "tol_member"],
            Command::Ruling => &[
                "surface",
                "points",
                "rays",
                "directions",
                "step",
                "horizon",
                "tol_char",
                "tol_member",
            ],
            Command::Verify => &[],
        };
        for (key, set) in present {
            if set && !allowed.contains(&key) {
                return Err(Failure::Usage(format!("{key} is not used by command {}", cmd.name())));
            }
        }
        Ok(())
    }

    pub fn build_surface(&self, cmd: Command) -> Result<Surface, Failure> {
        let spec = self
            .surface
            .as_ref()
            .ok_or_else(|| Failure::Usage(format!("surface is required for command {}", cmd.name())))?;
        spec.build().map_err(|e| Failure::Usage(e.to_string()))
    }
}

pub fn positive(key: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Usage(format!("{key} must be positive and finite, got {v}")))
    }
}

impl PointSpec {
    /// The point, checked against the surface with `tol_member`.
    pub fn point(&self, key: &str, s: &Surface, tol_member: f64) -> Result<Point, Failure> {
        let p = match (&self.chart, &self.coords) {
            (Some(c), None) => s.chart_point(c).map_err(|e| Failure::Usage(format!("{key}.chart: {e}")))?,
            (None, Some(c)) => Point::from_coords(c).map_err(|e| Failure::Usage(format!("{key}.coords: {e}")))?,
            _ => return Err(Failure::Usage(format!("{key} needs exactly one of chart, coords"))),
        };
        if p.n() != s.n() {
            return Err(Failure::Usage(format!("{key}.coords: expected {} coordinates", 2 * s.n() + 1)));
        }
        let residual = s.membership_residual(&p);
        if !(residual <= tol_member) {
            return Err(Failure::Usage(format!(
                "{key} is not on the surface (residual {residual:e})"
            )));
        }
        Ok(p)
    }

    /// Unit direction from `direction` (normalized).
    pub fn unit_direction(&self, key: &str, n: usize) -> Result<HVec, Failure> {
        let d = self
            .direction
            .as_ref()
            .ok_or_else(|| Failure::Usage(format!("{key}.direction is required")))?;
        let v = HVec::from_components(d).map_err(|e| Failure::Usage(format!("{key}.direction: {e}")))?;
        if v.n() != n {
            return Err(Failure::Usage(format!("{key}.direction must have {} components", 2 * n)));
        }
        let len = v.norm();
        if !(len > 0.0 && len.is_finite()) {
            return Err(Failure::Usage(format!("{key}.direction must be nonzero")));
        }
        Ok(v.scale(1.0 / len))
    }

    pub fn reject(&self, key: &str, fields: &[&str]) -> Result<(), Failure> {
        for f in fields {
            let set = match *f {
                "direction" => self.direction.is_some(),
                "frame_weights" => self.frame_weights.is_some(),
                _ => false,
            };
            if set {
                return Err(Failure::Usage(format!("{key}.{f} is not used here")));
            }
        }
        Ok(())
    }
}
