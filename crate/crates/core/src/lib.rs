//! Discrete integral varifolds in R^S: weak mean curvature and generalized
//! second fundamental form recovery, monotonicity and curvature bounds with
//! explicit constants, and constrained curvature-energy minimization.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::type_complexity
)]

pub mod ambient;
pub mod catalog;
pub mod curvature_tensor;
pub mod descent;
pub mod energy;
pub mod error;
pub mod first_variation;
pub mod linalg;
pub mod mesh;
pub mod monotonicity;
pub mod spatial;
pub mod varifold;

pub use ambient::{AmbientConfig, AmbientManifold, CompactSubset};
pub use error::{Error, Result};
pub use linalg::{PlaneProjector, Point, Tensor3};
pub use mesh::SimplicialMesh;
pub use varifold::{varifold_from_mesh, DiscreteVarifold, Metric, QuadratureRule, VarifoldAtom};
