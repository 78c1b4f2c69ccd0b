//! Shipped example shapes and the standard local-monotonicity sweep.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::Result;
use crate::first_variation::{mean_curvature_mesh, CurvatureField};
use crate::mesh::{shapes, SimplicialMesh};
use crate::monotonicity::{check_local_monotonicity, BoundReport};
use crate::varifold::{varifold_from_mesh, DiscreteVarifold, QuadratureRule};

#[derive(Clone, Debug)]
pub struct Shape {
    pub name: &'static str,
    pub mesh: SimplicialMesh,
}

impl Shape {
    /// Vertex-rule varifold with the mesh estimator's curvature.
    pub fn sampled(&self) -> Result<(DiscreteVarifold, CurvatureField)> {
        let v = varifold_from_mesh(&self.mesh, QuadratureRule::Vertex, None)?;
        let h = mean_curvature_mesh(&v)?;
        Ok((v, h))
    }

    /// First mesh vertex, which lies on the support.
    pub fn anchor(&self) -> DVector<f64> {
        self.mesh.vertices()[0].clone()
    }
}

/// Closed surfaces in R³ used for certification: the sphere family
/// r ∈ {0.5, 1, 2}, the (1, 1, 0.5) ellipsoid and a (1, 0.4) torus.
pub fn shipped_shapes() -> Vec<Shape> {
    vec![
        Shape {
            name: "sphere-0.5",
            mesh: shapes::icosphere(4, 0.5),
        },
        Shape {
            name: "sphere-1",
            mesh: shapes::icosphere(4, 1.0),
        },
        Shape {
            name: "sphere-2",
            mesh: shapes::icosphere(4, 2.0),
        },
        Shape {
            name: "ellipsoid",
            mesh: shapes::ellipsoid(4, [1.0, 1.0, 0.5]),
        },
        Shape {
            name: "torus",
            mesh: shapes::torus(1.0, 0.4, 96, 32),
        },
    ]
}

pub fn shipped_shape(name: &str) -> Option<Shape> {
    shipped_shapes().into_iter().find(|s| s.name == name)
}

pub const SWEEP_SHAPES: [&str; 3] = ["sphere-1", "ellipsoid", "torus"];
pub const SWEEP_RADII: [(f64, f64); 4] = [(0.15, 0.3), (0.2, 0.4), (0.25, 0.5), (0.3, 0.6)];
pub const SWEEP_EXPONENTS: [f64; 5] = [2.5, 3.0, 4.0, 5.0, 6.0];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCase {
    pub shape: &'static str,
    pub center: DVector<f64>,
    pub sigma: f64,
    pub rho: f64,
    pub p: f64,
}

/// Shapes × (σ, ρ) × p, centred at each shape's anchor vertex.
pub fn local_sweep_cases() -> Vec<SweepCase> {
    let mut out = Vec::new();
    for name in SWEEP_SHAPES {
        let center = shipped_shape(name).expect("sweep shape is shipped").anchor();
        for (sigma, rho) in SWEEP_RADII {
            for p in SWEEP_EXPONENTS {
                out.push(SweepCase {
                    shape: name,
                    center: center.clone(),
                    sigma,
                    rho,
                    p,
                });
            }
        }
    }
    out
}

pub fn run_local_sweep() -> Result<Vec<(SweepCase, BoundReport)>> {
    let sampled: Vec<(&str, (DiscreteVarifold, CurvatureField))> = SWEEP_SHAPES
        .par_iter()
        .map(|&name| Ok((name, shipped_shape(name).unwrap().sampled()?)))
        .collect::<Result<_>>()?;
    local_sweep_cases()
        .into_par_iter()
        .map(|case| {
            let (v, h) = &sampled.iter().find(|(n, _)| *n == case.shape).unwrap().1;
            let r = check_local_monotonicity(v, h, &case.center, case.sigma, case.rho, case.p)?;
            Ok((case, r))
        })
        .collect()
}
