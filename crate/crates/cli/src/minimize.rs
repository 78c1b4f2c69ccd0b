//! `varimin minimize`: constrained descent of a curvature energy.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use varimin::descent::{check_feasible, minimize_with, StopReason, MONITORS_HEADER, TRACE_HEADER};
use varimin::energy::{check_gradient, enclosed_volume, sphericity, GRADIENT_TOL};
use varimin::mesh::io::write_mesh;
use varimin::Error;

use crate::config::RunConfig;
use crate::exit::{CliError, ExitCode};
use crate::manifest::Recorder;

#[derive(Args, Debug)]
pub struct MinimizeArgs {
    /// Run config (JSON, schema 1).
    pub config: PathBuf,
    #[arg(long, short, default_value = "varimin-run")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct GradientSummary {
    samples: usize,
    max_rel_error: f64,
    within_tolerance: bool,
}

#[derive(Serialize)]
struct Summary {
    final_energy: f64,
    final_mass: f64,
    final_diameter: f64,
    bounds_ok: bool,
    iterations: usize,
    initial_energy: f64,
    energy_monotone: bool,
    stop: StopReason,
    sphericity: Option<f64>,
    enclosed_volume: Option<f64>,
    final_hausdorff: f64,
    final_weak_measure: f64,
    projections: usize,
    flips: usize,
    gradient_check: Option<GradientSummary>,
}

const GRADIENT_SAMPLES: usize = 16;

struct Streams {
    trace: BufWriter<File>,
    monitors: BufWriter<File>,
    error: Option<std::io::Error>,
}

impl Streams {
    fn open(trace: &Path, monitors: &Path) -> Result<Self, CliError> {
        let open = |p: &Path| File::create(p).map(BufWriter::new).map_err(|e| CliError::io(p, e));
        let mut s = Self {
            trace: open(trace)?,
            monitors: open(monitors)?,
            error: None,
        };
        s.line(TRACE_HEADER.to_string(), MONITORS_HEADER.to_string());
        Ok(s)
    }

    /// Appends and flushes one row per file, so an interrupted run keeps
    /// its trace.
    fn line(&mut self, trace: String, monitors: String) {
        if self.error.is_some() {
            return;
        }
        let r = writeln!(self.trace, "{trace}")
            .and_then(|_| self.trace.flush())
            .and_then(|_| writeln!(self.monitors, "{monitors}"))
            .and_then(|_| self.monitors.flush());
        if let Err(e) = r {
            self.error = Some(e);
        }
    }
}

pub fn run(args: &MinimizeArgs) -> Result<ExitCode, CliError> {
    let cfg = RunConfig::load(&args.config)?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let (mesh, mesh_path) = cfg.mesh.load(base)?;
    let spec = cfg.energy;
    check_feasible(&mesh, &spec, &cfg.subset).map_err(|e| CliError::from_input("initial mesh", e))?;

    let mut rec = Recorder::new(&args.out, "minimize", cfg.seed)?;
    rec.config(&args.config);
    if let Some(p) = &mesh_path {
        rec.input(p);
    }

    let gradient_check = if cfg.gradient_check {
        match check_gradient(&mesh, &spec, GRADIENT_SAMPLES, cfg.seed) {
            Ok(g) => {
                if g.max_rel_error > GRADIENT_TOL {
                    eprintln!(
                        "warning: gradient check relative error {:e} exceeds {GRADIENT_TOL:e}",
                        g.max_rel_error
                    );
                }
                Some(GradientSummary {
                    samples: g.vertices.len(),
                    max_rel_error: g.max_rel_error,
                    within_tolerance: g.max_rel_error <= GRADIENT_TOL,
                })
            }
            Err(e @ Error::GradientCheck { .. }) => return Err(CliError::from_run("gradient check", e)),
            Err(e) => return Err(CliError::from_input("gradient check", e)),
        }
    } else {
        None
    };

    let trace_path = rec.output("trace.csv");
    let monitors_path = rec.output("monitors.csv");
    let mut streams = Streams::open(&trace_path, &monitors_path)?;
    let outcome = minimize_with(&mesh, &spec, &cfg.subset, &cfg.options(), |r| {
        streams.line(r.trace_row(), r.monitors_row())
    });
    if let Some(e) = streams.error.take() {
        return Err(CliError::aborted(format!("writing trace: {e}")));
    }
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            // the streamed trace stays on disk
            rec.finish()?;
            return Err(CliError::from_run("minimize", e));
        }
    };

    let final_path = rec.output("final.off");
    write_mesh(&outcome.mesh, &final_path).map_err(|e| CliError::from_run(final_path.display(), e))?;

    let trace = &outcome.trace;
    let last = trace.last();
    let closed = outcome.mesh.boundary_vertices().iter().all(|&b| !b);
    let summary = Summary {
        final_energy: last.energy,
        final_mass: last.mass,
        final_diameter: last.diameter,
        bounds_ok: trace.monitors_ok(),
        iterations: last.iter,
        initial_energy: trace.records[0].energy,
        energy_monotone: trace.energy_monotone(),
        stop: trace.stop.clone(),
        sphericity: closed.then(|| sphericity(&outcome.mesh).ok()).flatten(),
        enclosed_volume: closed.then(|| enclosed_volume(&outcome.mesh).ok()).flatten(),
        final_hausdorff: last.convergence.hausdorff,
        final_weak_measure: last.convergence.weak_measure,
        projections: trace.records.iter().map(|r| r.projections).sum(),
        flips: trace.records.iter().map(|r| r.flips).sum(),
        gradient_check,
    };
    let path = rec.output("summary.json");
    crate::write_json(&path, &summary)?;
    rec.finish()?;
    crate::print_json(&summary);

    if let StopReason::Aborted(why) = &trace.stop {
        eprintln!("run aborted: {why}");
        return Ok(ExitCode::Aborted);
    }
    if !summary.bounds_ok {
        eprintln!("non-degeneracy monitor fired");
        return Ok(ExitCode::BoundFailure);
    }
    Ok(ExitCode::Success)
}
