//! `varimin check`: certify the monotonicity and curvature bounds on a mesh.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use varimin::first_variation::{mean_curvature_mesh, CurvatureField};
use varimin::monotonicity::{
    check_bounds, check_fundamental, check_local_monotonicity, resolution_floor, write_reports_csv, BoundOptions,
    BoundReport, BoundStatus,
};
use varimin::{varifold_from_mesh, Metric, QuadratureRule};

use crate::config::{read_json, read_mesh};
use crate::exit::{CliError, ExitCode};
use crate::manifest::{Recorder, SCHEMA};

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Closed or open triangle mesh (.off or .obj) in R^3.
    pub mesh: PathBuf,
    /// Exponents to certify.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub p: Vec<f64>,
    /// Sweep file: `{"schema": 1, "cases": [{"sigma", "rho", "p", "center"?}],
    /// "fundamental_radii"?: [..]}`.
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    /// Linking radius for the connectivity hypothesis.
    #[arg(long)]
    pub link_radius: Option<f64>,
    /// Replace the curvature field by zero (negative control).
    #[arg(long)]
    pub zero_h: bool,
    #[arg(long, short, default_value = "varimin-check")]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    schema: u32,
    #[serde(default)]
    cases: Vec<SweepEntry>,
    #[serde(default)]
    fundamental_radii: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepEntry {
    sigma: f64,
    rho: f64,
    p: f64,
    #[serde(default)]
    center: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct Row {
    p: f64,
    #[serde(flatten)]
    report: BoundReport,
}

/// Number of support points at which the fundamental inequality is tested.
const FUNDAMENTAL_CENTERS: usize = 16;

pub fn run(args: &CheckArgs) -> Result<ExitCode, CliError> {
    if args.p.is_empty() {
        return Err(CliError::input("--p needs at least one exponent"));
    }
    let sweep: Option<SweepFile> = match &args.sweep {
        Some(path) => {
            let s: SweepFile = read_json(path)?;
            if s.schema != SCHEMA {
                return Err(CliError::input(format!(
                    "{}: unsupported schema {}",
                    path.display(),
                    s.schema
                )));
            }
            Some(s)
        }
        None => None,
    };
    let mesh = read_mesh(&args.mesh)?;
    let mut rec = Recorder::new(&args.out, "check", 0)?;
    rec.input(&args.mesh);
    if let Some(s) = &args.sweep {
        rec.config(s);
    }
    let v = varifold_from_mesh(&mesh, QuadratureRule::Vertex, None)
        .map_err(|e| CliError::from_input(args.mesh.display(), e))?;
    let mut field = mean_curvature_mesh(&v).map_err(|e| CliError::from_input("mesh estimator", e))?;
    if args.zero_h {
        let zeros = CurvatureField::zeros(&v);
        field = CurvatureField {
            near_boundary: field.near_boundary,
            ..zeros
        };
    }
    let input = |e| CliError::from_input("check", e);
    let opts = BoundOptions {
        link_radius: args.link_radius,
    };

    let mut rows: Vec<Row> = Vec::new();
    for &p in &args.p {
        for report in check_bounds(&v, &field, p, &opts).map_err(input)? {
            rows.push(Row { p, report });
        }
    }

    // fundamental inequality at evenly spaced mesh vertices
    let floor = resolution_floor(&v);
    let diameter = v.support_diameter(Metric::Euclidean).map_err(input)?;
    let radii = match sweep.as_ref().and_then(|s| s.fundamental_radii.clone()) {
        Some(r) => r,
        None => vec![2.0 * floor, diameter / 4.0]
            .into_iter()
            .filter(|&r| r > floor)
            .collect(),
    };
    let verts = mesh.vertices();
    let stride = (verts.len() / FUNDAMENTAL_CENTERS).max(1);
    for &p in &args.p {
        for x0 in verts.iter().step_by(stride) {
            for &rho in &radii {
                let report = check_fundamental(&v, &field, x0, rho, p).map_err(input)?;
                rows.push(Row { p, report });
            }
        }
    }

    if let Some(s) = &sweep {
        for c in &s.cases {
            let x0 = match &c.center {
                Some(x) => DVector::from_column_slice(x),
                None => verts[0].clone(),
            };
            if x0.len() != v.s() {
                return Err(CliError::input(format!(
                    "sweep center {:?} has the wrong dimension",
                    c.center
                )));
            }
            let report = check_local_monotonicity(&v, &field, &x0, c.sigma, c.rho, c.p).map_err(input)?;
            rows.push(Row { p: c.p, report });
        }
    }

    let path = rec.output("bounds.csv");
    let reports: Vec<BoundReport> = rows.iter().map(|r| r.report.clone()).collect();
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    write_reports_csv(&reports, BufWriter::new(file)).map_err(|e| CliError::from_run("bounds.csv", e))?;
    let path = rec.output("bounds.json");
    crate::write_json(&path, &rows)?;
    rec.finish()?;

    println!(
        "{:<8} {:>6} {:>24} {:>24} {:>24}  status",
        "lemma", "p", "lhs", "rhs", "margin"
    );
    for r in &rows {
        println!(
            "{:<8} {:>6} {:>24.16e} {:>24.16e} {:>24.16e}  {}",
            r.report.lemma.tag(),
            r.p,
            r.report.lhs,
            r.report.rhs,
            r.report.margin,
            r.report.status.as_str()
        );
    }
    let violated = rows
        .iter()
        .filter(|r| r.report.status == BoundStatus::HypothesisViolated)
        .count();
    if violated > 0 {
        eprintln!("warning: {violated} bound(s) not evaluated because their hypotheses fail");
    }
    let failed = rows.iter().filter(|r| r.report.failed()).count();
    if failed > 0 {
        eprintln!("{failed} bound(s) failed");
        Ok(ExitCode::BoundFailure)
    } else {
        Ok(ExitCode::Success)
    }
}
