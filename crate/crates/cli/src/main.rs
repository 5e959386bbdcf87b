use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use heisenberg::group::{group_mul, symplectic_q, Point};

mod commands;
mod config;

use config::{Command, Format, RunConfig};

/// Curvature grids, geodesics and ruling scans for hypersurfaces of the
/// Heisenberg group.
#[derive(Debug, Parser)]
#[command(name = "heis", version)]
struct Cli {
    /// curvature, geodesic, ruling or verify; may instead come from the config
    #[arg(value_enum)]
    command: Option<Command>,

    /// JSON run configuration
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file (default: stdout)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Worker threads (default: machine parallelism)
    #[arg(long, value_name = "N")]
    workers: Option<usize>,

    /// |N^H| threshold for characteristic points
    #[arg(long, value_name = "TOL")]
    tol_char: Option<f64>,

    /// Membership tolerance for points and rays
    #[arg(long, value_name = "TOL")]
    tol_member: Option<f64>,

    #[arg(long)]
    step: Option<f64>,

    #[arg(long)]
    horizon: Option<f64>,

    #[arg(long, hide = true)]
    corrupt_group_law: bool,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(String),
}

pub(crate) fn skewed_law(p: &Point<f64>, q: &Point<f64>) -> heisenberg::Result<Point<f64>> {
    let r = group_mul(p, q)?;
    let e = symplectic_q(p.z(), q.z())?;
    let mut c = r.coords();
    *c.last_mut().expect("nonempty") += e * e;
    Point::from_coords(&c)
}

fn usage(reason: &str) -> Failure {
    Failure::Usage(format!(
        "{reason}\n\n{}\n\nFor more information, try '--help'.",
        Cli::command().render_usage()
    ))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => config::load(path)?,
        None => RunConfig::default(),
    };
    let cmd = match (cli.command, cfg.command) {
        (Some(a), Some(b)) if a != b => {
            return Err(Failure::Usage(format!(
                "command {} conflicts with config command {}",
                a.name(),
                b.name()
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(usage("no command given")),
    };
    if cmd != Command::Verify && cli.config.is_none() {
        return Err(usage(&format!("command {} needs --config PATH", cmd.name())));
    }
    cfg.tol_char = cli.tol_char.or(cfg.tol_char);
    cfg.tol_member = cli.tol_member.or(cfg.tol_member);
    cfg.step = cli.step.or(cfg.step);
    cfg.horizon = cli.horizon.or(cfg.horizon);
    cfg.check_keys(cmd)?;
    let format = cli.format.or(cfg.format).unwrap_or(match cmd {
        Command::Ruling => Format::Json,
        _ => Format::Csv,
    });
    let out = cli.out.clone().or(cfg.output.as_ref().map(PathBuf::from));

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::Usage("--workers must be positive".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::Compute(format!("worker pool: {e}")))?;

    let (text, ok) = pool.install(|| -> Result<(String, bool), Failure> {
        Ok(match cmd {
            Command::Curvature => (commands::curvature(&cfg, format)?, true),
            Command::Geodesic => {
                let g = commands::geodesic(&cfg, format)?;
                if let Some(s) = g.domain_exit {
                    eprintln!("note: trajectory left the domain box; last valid s = {s}");
                }
                (g.text, true)
            }
            Command::Ruling => (commands::ruling(&cfg, format)?, true),
            Command::Verify => commands::verify(format, cli.corrupt_group_law),
        })
    })?;

    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Compute(format!("stdout: {e}")))?,
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
