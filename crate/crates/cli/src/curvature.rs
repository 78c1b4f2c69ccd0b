//! `varimin curvature`: weak mean curvature (and optionally B and A) of a
//! mesh-backed varifold.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use varimin::curvature_tensor::{recover_b, TestScalarDictionary};
use varimin::first_variation::{lp_norm, mean_curvature_kernel, mean_curvature_mesh, Component, CurvatureField};
use varimin::{varifold_from_mesh, AmbientManifold, DiscreteVarifold, QuadratureRule};

use crate::config::{parse_ambient, read_mesh};
use crate::exit::CliError;
use crate::manifest::Recorder;
use crate::{print_json, write_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Mesh,
    Kernel,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Centroid,
    Vertex,
    Degree2,
}

impl From<Rule> for QuadratureRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Centroid => QuadratureRule::Centroid,
            Rule::Vertex => QuadratureRule::Vertex,
            Rule::Degree2 => QuadratureRule::Degree2,
        }
    }
}

#[derive(Args, Debug)]
pub struct CurvatureArgs {
    /// Mesh file (.off or .obj).
    pub mesh: PathBuf,
    /// Ambient: euclidean<S>, sphere<n>[:<r>], or a JSON config file.
    #[arg(long, default_value = "euclidean3")]
    pub ambient: String,
    /// Exponent of the reported ∫|H|^p.
    #[arg(long, default_value_t = 3.0)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = Estimator::Mesh)]
    pub estimator: Estimator,
    /// Kernel radius; defaults to 5 × the median atom spacing.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Quadrature rule placing atoms on each simplex.
    #[arg(long, value_enum, default_value_t = Rule::Centroid)]
    pub rule: Rule,
    /// Also recover the curvature tensors B and A.
    #[arg(long)]
    pub tensor: bool,
    /// Neighbourhood radius of the tensor fit; defaults to 8 × the median
    /// atom spacing.
    #[arg(long)]
    pub tensor_eps: Option<f64>,
    /// Output directory.
    #[arg(long, short, default_value = "varimin-curvature")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Stats {
    min: f64,
    max: f64,
    mean: f64,
}

fn stats(vals: impl Iterator<Item = f64>) -> Option<Stats> {
    let v: Vec<f64> = vals.collect();
    if v.is_empty() {
        return None;
    }
    Some(Stats {
        min: v.iter().copied().fold(f64::INFINITY, f64::min),
        max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean: v.iter().sum::<f64>() / v.len() as f64,
    })
}

#[derive(Serialize)]
struct CrossCheck {
    compared: usize,
    /// `|H_mesh - H_kernel| / |H_mesh|`.
    max_deviation: f64,
    mean_deviation: f64,
    /// `||H_mesh| - |H_kernel|| / |H_mesh|`.
    max_norm_deviation: f64,
}

#[derive(Serialize)]
struct TensorSummary {
    eps: f64,
    usable: usize,
    flagged: usize,
    trace_max_deviation: Option<f64>,
    a_norm: Option<Stats>,
    b_norm: Option<Stats>,
    a_asymmetry: f64,
}

#[derive(Serialize)]
struct Summary {
    atoms: usize,
    mass: f64,
    estimator: Estimator,
    eps: Option<f64>,
    p: f64,
    lp: f64,
    lp_relative: f64,
    unset: usize,
    near_boundary: usize,
    h_norm: Option<Stats>,
    h_relative_norm: Option<Stats>,
    residual_max: f64,
    cross_check: Option<CrossCheck>,
    tensor: Option<TensorSummary>,
}

/// Atoms used for curvature assertions: set and away from the boundary.
fn interior(field: &CurvatureField) -> Vec<usize> {
    (0..field.len())
        .filter(|&i| field.h[i].is_some() && !field.near_boundary[i])
        .collect()
}

fn attach(v: DiscreteVarifold, ambient: AmbientManifold) -> Result<DiscreteVarifold, CliError> {
    if ambient.is_euclidean() {
        v.with_ambient(ambient)
    } else {
        v.conform_to_ambient(ambient)
    }
    .map_err(|e| CliError::from_input("ambient", e))
}

pub fn run(args: &CurvatureArgs) -> Result<(), CliError> {
    if !(args.p >= 1.0) {
        return Err(CliError::input(format!("--p must be at least 1, got {}", args.p)));
    }
    for (name, e) in [("--eps", args.eps), ("--tensor-eps", args.tensor_eps)] {
        if matches!(e, Some(e) if !(e > 0.0)) {
            return Err(CliError::input(format!("{name} must be positive")));
        }
    }
    let cfg = parse_ambient(&args.ambient)?;
    let mesh = read_mesh(&args.mesh)?;
    let mut rec = Recorder::new(&args.out, "curvature", 0)?;
    rec.input(&args.mesh);
    let v =
        varifold_from_mesh(&mesh, args.rule.into(), None).map_err(|e| CliError::from_input(args.mesh.display(), e))?;
    let v = attach(v, cfg.ambient)?;
    let spacing = v.median_spacing();
    let eps = args.eps.unwrap_or(5.0 * spacing);
    let run_err = |e| CliError::from_run("curvature", e);

    let mesh_field = match args.estimator {
        Estimator::Mesh | Estimator::Both => {
            Some(mean_curvature_mesh(&v).map_err(|e| CliError::from_input("mesh estimator", e))?)
        }
        Estimator::Kernel => None,
    };
    let kernel_field = match args.estimator {
        Estimator::Kernel | Estimator::Both => Some(mean_curvature_kernel(&v, eps).map_err(run_err)?),
        Estimator::Mesh => None,
    };
    let cross_check = match (&mesh_field, &kernel_field) {
        (Some(a), Some(b)) => {
            let pairs: Vec<(f64, f64)> = interior(a)
                .into_iter()
                .filter(|&i| !b.near_boundary[i])
                .filter_map(|i| {
                    let (ha, hb) = (a.h[i].as_ref()?, b.h[i].as_ref()?);
                    let scale = ha.norm().max(f64::MIN_POSITIVE);
                    Some(((ha - hb).norm() / scale, (ha.norm() - hb.norm()).abs() / scale))
                })
                .collect();
            let devs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            Some(CrossCheck {
                max_norm_deviation: pairs.iter().map(|p| p.1).fold(0.0, f64::max),
                compared: devs.len(),
                max_deviation: devs.iter().copied().fold(0.0, f64::max),
                mean_deviation: if devs.is_empty() {
                    0.0
                } else {
                    devs.iter().sum::<f64>() / devs.len() as f64
                },
            })
        }
        _ => None,
    };
    let field = mesh_field.or(kernel_field).expect("one estimator ran");

    let path = rec.output("curvature.jsonl");
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    field.write_jsonl(BufWriter::new(file)).map_err(run_err)?;

    let tensor = if args.tensor {
        let teps = args.tensor_eps.unwrap_or(8.0 * spacing);
        let t = recover_b(&v, &TestScalarDictionary::standard(v.s(), teps)).map_err(run_err)?;
        let path = rec.output("tensor.jsonl");
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        t.write_jsonl(BufWriter::new(file)).map_err(run_err)?;
        let usable = t.usable();
        let trace = t.trace_h();
        let (an, bn) = (t.a_norms(), t.b_norms());
        let trace_dev = usable
            .iter()
            .filter(|&&i| !field.near_boundary[i])
            .filter_map(|&i| {
                let h = field.h[i].as_ref()?;
                Some((trace[i].as_ref()? - h).norm() / h.norm().max(f64::MIN_POSITIVE))
            })
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
        Some(TensorSummary {
            eps: teps,
            flagged: t.flagged.iter().filter(|&&f| f).count(),
            trace_max_deviation: trace_dev,
            a_norm: stats(usable.iter().map(|&i| an[i])),
            b_norm: stats(usable.iter().map(|&i| bn[i])),
            a_asymmetry: t.a_asymmetry(),
            usable: usable.len(),
        })
    } else {
        None
    };

    let inner = interior(&field);
    let summary = Summary {
        atoms: v.len(),
        mass: v.mass(),
        estimator: args.estimator,
        eps: (args.estimator != Estimator::Mesh).then_some(eps),
        p: args.p,
        lp: lp_norm(&field, &v, args.p, Component::Euclidean, true).map_err(run_err)?,
        lp_relative: lp_norm(&field, &v, args.p, Component::Relative, true).map_err(run_err)?,
        unset: field.unset_count(),
        near_boundary: field.near_boundary.iter().filter(|&&b| b).count(),
        h_norm: stats(inner.iter().map(|&i| field.h[i].as_ref().unwrap().norm())),
        h_relative_norm: stats(inner.iter().filter_map(|&i| field.h_n[i].as_ref().map(|h| h.norm()))),
        residual_max: inner.iter().map(|&i| field.residual[i]).fold(0.0, f64::max),
        cross_check,
        tensor,
    };
    let path = rec.output("summary.json");
    write_json(&path, &summary)?;
    rec.finish()?;
    print_json(&summary);
    Ok(())
}
