//! Config files (schema 1) and ambient shorthands.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use varimin::descent::MinimizeOptions;
use varimin::energy::EnergySpec;
use varimin::mesh::{io, shapes, SimplicialMesh};
use varimin::{AmbientConfig, AmbientManifold, CompactSubset};

use crate::exit::CliError;
use crate::manifest::SCHEMA;

/// `euclidean<S>`, `sphere<n>` or `sphere<n>:<r>`, or a path to a JSON
/// file holding `{"schema": 1, "ambient": …, "subset": …}`.
pub fn parse_ambient(arg: &str) -> Result<AmbientConfig, CliError> {
    let bad = || CliError::input(format!("unrecognized ambient '{arg}'"));
    if let Some(rest) = arg.strip_prefix("euclidean") {
        let s: usize = rest.parse().map_err(|_| bad())?;
        return checked(AmbientConfig {
            ambient: AmbientManifold::euclidean(s),
            subset: None,
        });
    }
    if let Some(rest) = arg.strip_prefix("sphere") {
        let (n, r) = match rest.split_once(':') {
            Some((n, r)) => (n, r.parse::<f64>().map_err(|_| bad())?),
            None => (rest, 1.0),
        };
        let n: usize = n.parse().map_err(|_| bad())?;
        return checked(AmbientConfig {
            ambient: AmbientManifold::sphere(n, r),
            subset: None,
        });
    }
    let path = Path::new(arg);
    if path.exists() {
        let file: AmbientFile = read_json(path)?;
        check_schema(path, file.schema)?;
        return checked(AmbientConfig {
            ambient: file.ambient,
            subset: file.subset,
        });
    }
    Err(bad())
}

fn checked(cfg: AmbientConfig) -> Result<AmbientConfig, CliError> {
    cfg.ambient.validate().map_err(|e| CliError::from_input("ambient", e))?;
    if let Some(s) = &cfg.subset {
        s.validate().map_err(|e| CliError::from_input("subset", e))?;
    }
    Ok(cfg)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AmbientFile {
    schema: u32,
    ambient: AmbientManifold,
    #[serde(default)]
    subset: Option<CompactSubset>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn check_schema(path: &Path, schema: u32) -> Result<(), CliError> {
    if schema != SCHEMA {
        return Err(CliError::input(format!(
            "{}: unsupported schema {schema} (expected {SCHEMA})",
            path.display()
        )));
    }
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<SimplicialMesh, CliError> {
    if !path.exists() {
        return Err(CliError::input(format!("{}: no such file", path.display())));
    }
    io::read_mesh(path).map_err(|e| CliError::from_input(path.display(), e))
}

/// Initial mesh of a run: a file (relative to the config) or a generated
/// shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeshSource {
    Path(PathBuf),
    Shape(ShapeSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Icosphere {
        refinement: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    Ellipsoid {
        refinement: usize,
        axes: [f64; 3],
    },
    Torus {
        #[serde(rename = "R")]
        major: f64,
        #[serde(rename = "r")]
        minor: f64,
        nu: usize,
        nv: usize,
    },
}

fn one() -> f64 {
    1.0
}

const MAX_REFINEMENT: usize = 7;

impl MeshSource {
    pub fn load(&self, base: &Path) -> Result<(SimplicialMesh, Option<PathBuf>), CliError> {
        match self {
            Self::Path(p) => {
                let path = if p.is_absolute() { p.clone() } else { base.join(p) };
                Ok((read_mesh(&path)?, Some(path)))
            }
            Self::Shape(s) => {
                let mesh = match *s {
                    ShapeSpec::Icosphere { refinement, radius } if refinement <= MAX_REFINEMENT && radius > 0.0 => {
                        shapes::icosphere(refinement, radius)
                    }
                    ShapeSpec::Ellipsoid { refinement, axes }
                        if refinement <= MAX_REFINEMENT && axes.iter().all(|&a| a > 0.0) =>
                    {
                        shapes::ellipsoid(refinement, axes)
                    }
                    ShapeSpec::Torus { major, minor, nu, nv } if major > minor && minor > 0.0 && nu >= 3 && nv >= 3 => {
                        shapes::torus(major, minor, nu, nv)
                    }
                    _ => return Err(CliError::input(format!("invalid shape parameters {s:?}"))),
                };
                Ok((mesh, None))
            }
        }
    }
}

/// Run config of `minimize`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub energy: EnergySpec,
    #[serde(default = "euclidean3")]
    pub ambient: AmbientManifold,
    pub subset: CompactSubset,
    pub mesh: MeshSource,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    /// Finite-difference check of the energy gradient on the initial mesh.
    #[serde(default = "yes")]
    pub gradient_check: bool,
    /// Remaining descent settings; `max_iter` and `tol` above take
    /// precedence.
    #[serde(default)]
    pub options: Option<MinimizeOptions>,
}

fn euclidean3() -> AmbientManifold {
    AmbientManifold::euclidean(3)
}

fn default_max_iter() -> usize {
    MinimizeOptions::default().max_iter
}

fn default_tol() -> f64 {
    MinimizeOptions::default().tol
}

fn yes() -> bool {
    true
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let value: serde_json::Value = read_json(path)?;
        let schema = value.get("schema").and_then(|s| s.as_u64());
        if schema != Some(SCHEMA as u64) {
            return Err(CliError::input(format!(
                "{}: \"schema\": {SCHEMA} is required, found {}",
                path.display(),
                value.get("schema").map_or("none".to_string(), |s| s.to_string())
            )));
        }
        let cfg: Self =
            serde_json::from_value(value).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        if cfg.ambient != AmbientManifold::euclidean(3) {
            return Err(CliError::input(
                "minimization runs in the euclidean ambient R^3 (ambient kind euclidean, S = 3)",
            ));
        }
        if !(cfg.tol >= 0.0) {
            return Err(CliError::input(format!("tol must be nonnegative, got {}", cfg.tol)));
        }
        cfg.energy.validate(2).map_err(|e| CliError::from_input("energy", e))?;
        cfg.subset.validate().map_err(|e| CliError::from_input("subset", e))?;
        Ok(cfg)
    }

    pub fn options(&self) -> MinimizeOptions {
        MinimizeOptions {
            max_iter: self.max_iter,
            tol: self.tol,
            ..self.options.unwrap_or_default()
        }
    }
}
