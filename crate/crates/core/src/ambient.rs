//! Analytic ambient manifolds N̄ ⊂ R^S and compact subsets N ⊂⊂ N̄.
//!
//! `Q(x)` is the orthogonal projector onto `T_x N̄` and `dq(x)` its
//! derivative, stored as a [`Tensor3`] with `get(i, j, k) = ∂Q_ij/∂x_k`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{PlaneProjector, Tensor3};

/// Points farther than this from the manifold are rejected.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;
/// Largest entry of `P Q - P` accepted as "P ⊂ T_x N̄".
pub const BUNDLE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AmbientManifold {
    /// All of R^S.
    Euclidean {
        #[serde(rename = "S")]
        dim: usize,
    },
    /// Round sphere S^n of radius `r` in R^{n+1}.
    Sphere {
        n: usize,
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// `base × R^s`, coordinates ordered (base, extra).
    Product { base: Box<AmbientManifold>, s: usize },
}

impl AmbientManifold {
    pub fn euclidean(dim: usize) -> Self {
        Self::Euclidean { dim }
    }

    pub fn sphere(n: usize, r: f64) -> Self {
        Self::Sphere { n, r, center: None }
    }

    pub fn product(base: AmbientManifold, s: usize) -> Self {
        Self::Product {
            base: Box::new(base),
            s,
        }
    }

    /// Rejects non-positive radii and mismatched centers.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Euclidean { dim } if *dim == 0 => Err(Error::InvalidArgument("euclidean ambient needs S ≥ 1".into())),
            Self::Sphere { n, r, center } => {
                if *n == 0 || !(*r > 0.0) || !r.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "sphere needs n ≥ 1 and r > 0, got n = {n}, r = {r}"
                    )));
                }
                if let Some(c) = center {
                    if c.len() != n + 1 {
                        return Err(Error::DimensionMismatch(format!(
                            "sphere center has {} coordinates, expected {}",
                            c.len(),
                            n + 1
                        )));
                    }
                }
                Ok(())
            }
            Self::Product { base, .. } => base.validate(),
            _ => Ok(()),
        }
    }

    /// Intrinsic dimension n.
    pub fn dim(&self) -> usize {
        match self {
            Self::Euclidean { dim } => *dim,
            Self::Sphere { n, .. } => *n,
            Self::Product { base, s } => base.dim() + s,
        }
    }

    /// Embedding dimension S.
    pub fn embedding_dim(&self) -> usize {
        match self {
            Self::Euclidean { dim } => *dim,
            Self::Sphere { n, .. } => n + 1,
            Self::Product { base, s } => base.embedding_dim() + s,
        }
    }

    pub fn is_euclidean(&self) -> bool {
        match self {
            Self::Euclidean { .. } => true,
            Self::Product { base, .. } => base.is_euclidean(),
            Self::Sphere { .. } => false,
        }
    }

    /// Largest principal curvature of N̄ in R^S (0 for flat ambients).
    pub fn curvature_bound(&self) -> f64 {
        match self {
            Self::Euclidean { .. } => 0.0,
            Self::Sphere { r, .. } => 1.0 / r,
            Self::Product { base, .. } => base.curvature_bound(),
        }
    }

    fn check_len(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.embedding_dim() {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} for an ambient in R^{}",
                x.len(),
                self.embedding_dim()
            )));
        }
        Ok(())
    }

    fn sphere_offset(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Sphere { center: Some(c), .. } => x - DVector::from_column_slice(c),
            _ => x.clone(),
        }
    }

    /// Euclidean distance from `x` to N̄.
    pub fn distance(&self, x: &DVector<f64>) -> f64 {
        match self {
            Self::Euclidean { .. } => 0.0,
            Self::Sphere { r, .. } => (self.sphere_offset(x).norm() - r).abs(),
            Self::Product { base, .. } => {
                let sb = base.embedding_dim();
                base.distance(&x.rows(0, sb).into_owned())
            }
        }
    }

    /// Closest point of N̄ (the sphere center maps to an arbitrary pole).
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Euclidean { .. } => x.clone(),
            Self::Sphere { r, .. } => {
                let u = self.sphere_offset(x);
                let n = u.norm();
                let dir = if n > 0.0 {
                    u / n
                } else {
                    let mut e = DVector::zeros(x.len());
                    e[0] = 1.0;
                    e
                };
                x - self.sphere_offset(x) + dir * *r
            }
            Self::Product { base, .. } => {
                let sb = base.embedding_dim();
                let mut out = x.clone();
                let pb = base.project(&x.rows(0, sb).into_owned());
                out.rows_mut(0, sb).copy_from(&pb);
                out
            }
        }
    }

    fn ensure_on(&self, x: &DVector<f64>) -> Result<()> {
        self.check_len(x)?;
        let d = self.distance(x);
        if d > ON_MANIFOLD_TOL {
            return Err(Error::OffManifold {
                distance: d,
                tolerance: ON_MANIFOLD_TOL,
            });
        }
        Ok(())
    }

    /// Q(x) without the on-manifold check; the sphere formula
    /// `I - u uᵀ/|u|²` is used off the sphere too.
    pub fn tangent_projector_unchecked(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let s = self.embedding_dim();
        match self {
            Self::Euclidean { .. } => DMatrix::identity(s, s),
            Self::Sphere { .. } => {
                let u = self.sphere_offset(x);
                let n2 = u.norm_squared();
                let mut q = DMatrix::identity(s, s);
                q.ger(-1.0 / n2, &u, &u, 1.0);
                q
            }
            Self::Product { base, .. } => {
                let sb = base.embedding_dim();
                let mut q = DMatrix::identity(s, s);
                let qb = base.tangent_projector_unchecked(&x.rows(0, sb).into_owned());
                q.view_mut((0, 0), (sb, sb)).copy_from(&qb);
                q
            }
        }
    }

    /// Q(x) for `x` on N̄ within [`ON_MANIFOLD_TOL`].
    pub fn tangent_projector(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.ensure_on(x)?;
        Ok(self.tangent_projector_unchecked(x))
    }

    /// ∂Q/∂x without the on-manifold check.
    pub fn dq_unchecked(&self, x: &DVector<f64>) -> Tensor3 {
        let s = self.embedding_dim();
        match self {
            Self::Euclidean { .. } => Tensor3::zeros(s),
            Self::Sphere { .. } => {
                let u = self.sphere_offset(x);
                let n2 = u.norm_squared();
                let n4 = n2 * n2;
                let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                Tensor3::from_fn(s, |i, j, k| {
                    -(d(i, k) * u[j] + u[i] * d(j, k)) / n2 + 2.0 * u[i] * u[j] * u[k] / n4
                })
            }
            Self::Product { base, .. } => {
                let sb = base.embedding_dim();
                let tb = base.dq_unchecked(&x.rows(0, sb).into_owned());
                Tensor3::from_fn(s, |i, j, k| {
                    if i < sb && j < sb && k < sb {
                        tb.get(i, j, k)
                    } else {
                        0.0
                    }
                })
            }
        }
    }

    /// ∂Q_ij/∂x_k at `x` on N̄.
    pub fn dq(&self, x: &DVector<f64>) -> Result<Tensor3> {
        self.ensure_on(x)?;
        Ok(self.dq_unchecked(x))
    }

    /// Unit normals spanning the orthogonal complement of `T_x N̄`.
    pub fn normals(&self, x: &DVector<f64>) -> Vec<DVector<f64>> {
        match self {
            Self::Euclidean { .. } => Vec::new(),
            Self::Sphere { .. } => {
                let u = self.sphere_offset(x);
                vec![u.normalize()]
            }
            Self::Product { base, s } => {
                let sb = base.embedding_dim();
                base.normals(&x.rows(0, sb).into_owned())
                    .into_iter()
                    .map(|nb| {
                        let mut v = DVector::zeros(sb + s);
                        v.rows_mut(0, sb).copy_from(&nb);
                        v
                    })
                    .collect()
            }
        }
    }

    /// `c_i = Σ_jk P_jk ∂Q_ij/∂x_k` with no checks.
    pub fn curvature_correction_unchecked(&self, x: &DVector<f64>, p: &DMatrix<f64>) -> DVector<f64> {
        let s = self.embedding_dim();
        if self.is_euclidean() {
            return DVector::zeros(s);
        }
        let dq = self.dq_unchecked(x);
        DVector::from_fn(s, |i, _| {
            let mut acc = 0.0;
            for j in 0..s {
                for k in 0..s {
                    acc += p[(j, k)] * dq.get(i, j, k);
                }
            }
            acc
        })
    }

    /// Ambient curvature correction of the plane `p` at `x`; orthogonal to
    /// `T_x N̄`. Requires `P Q(x) = P`.
    pub fn curvature_correction(&self, x: &DVector<f64>, p: &PlaneProjector) -> Result<DVector<f64>> {
        let q = self.tangent_projector(x)?;
        let defect = bundle_defect(p.matrix(), &q);
        if defect > BUNDLE_TOL {
            return Err(Error::BundleConstraint { defect });
        }
        Ok(self.curvature_correction_unchecked(x, p.matrix()))
    }

    /// Intrinsic distance between two points of N̄ (inputs are projected).
    pub fn geodesic_distance(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        match self {
            Self::Euclidean { .. } => (x - y).norm(),
            Self::Sphere { r, .. } => {
                let u = self.sphere_offset(x);
                let v = self.sphere_offset(y);
                let c = (u.dot(&v) / (u.norm() * v.norm())).clamp(-1.0, 1.0);
                r * c.acos()
            }
            Self::Product { base, .. } => {
                let sb = base.embedding_dim();
                let db = base.geodesic_distance(&x.rows(0, sb).into_owned(), &y.rows(0, sb).into_owned());
                let n = x.len() - sb;
                let de = (x.rows(sb, n) - y.rows(sb, n)).norm();
                db.hypot(de)
            }
        }
    }
}

/// Largest entry of `P Q - P`.
pub fn bundle_defect(p: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    (p * q - p).amax()
}

/// Compact subset N of an ambient manifold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CompactSubset {
    /// Closed euclidean ball `|x - c| ≤ R` intersected with N̄.
    Ball {
        #[serde(rename = "R")]
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// `R_in ≤ |x - c| ≤ R_out`.
    Shell {
        #[serde(rename = "R_in")]
        inner: f64,
        #[serde(rename = "R_out")]
        outer: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// `{(x, y) : x ∈ core, |y| ≤ r}` inside `core × R^s`; `core` must be
    /// compact (a sphere).
    Tube {
        core: AmbientManifold,
        #[serde(rename = "r")]
        radius: f64,
    },
}

impl CompactSubset {
    pub fn ball(radius: f64) -> Self {
        Self::Ball { radius, center: None }
    }

    pub fn shell(inner: f64, outer: f64) -> Self {
        Self::Shell {
            inner,
            outer,
            center: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Ball { radius, .. } if !(*radius > 0.0) => {
                Err(Error::InvalidArgument(format!("ball radius {radius} must be positive")))
            }
            Self::Shell { inner, outer, .. } if !(*inner >= 0.0 && outer > inner) => Err(Error::InvalidArgument(
                format!("shell needs 0 ≤ R_in < R_out, got {inner}, {outer}"),
            )),
            Self::Tube { core, radius } => {
                core.validate()?;
                if !(*radius > 0.0) {
                    return Err(Error::InvalidArgument(format!("tube radius {radius} must be positive")));
                }
                if core.is_euclidean() {
                    return Err(Error::InvalidArgument("tube core must be compact".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether the subset has nonempty interior in N̄ (by construction of
    /// each kind, after validation).
    pub fn has_interior(&self) -> bool {
        self.validate().is_ok()
    }

    fn offset(center: &Option<Vec<f64>>, x: &DVector<f64>) -> DVector<f64> {
        match center {
            Some(c) => x - DVector::from_column_slice(c),
            None => x.clone(),
        }
    }

    /// Membership with slack `tol`.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        match self {
            Self::Ball { radius, center } => Self::offset(center, x).norm() <= radius + tol,
            Self::Shell { inner, outer, center } => {
                let r = Self::offset(center, x).norm();
                r >= inner - tol && r <= outer + tol
            }
            Self::Tube { core, radius } => {
                let sb = core.embedding_dim();
                if x.len() < sb {
                    return false;
                }
                let n = x.len() - sb;
                core.distance(&x.rows(0, sb).into_owned()) <= tol && x.rows(sb, n).norm() <= radius + tol
            }
        }
    }

    /// Closest point of N to `x`; identity on N.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Ball { radius, center } => {
                let u = Self::offset(center, x);
                let r = u.norm();
                if r <= *radius {
                    x.clone()
                } else {
                    x - &u + u * (radius / r)
                }
            }
            Self::Shell { inner, outer, center } => {
                let u = Self::offset(center, x);
                let r = u.norm();
                if r >= *inner && r <= *outer {
                    return x.clone();
                }
                let target = if r > *outer { *outer } else { *inner };
                let dir = if r > 0.0 {
                    &u / r
                } else {
                    let mut e = DVector::zeros(x.len());
                    e[0] = 1.0;
                    e
                };
                x - &u + dir * target
            }
            Self::Tube { core, radius } => {
                let sb = core.embedding_dim();
                let n = x.len() - sb;
                let mut out = x.clone();
                let pb = core.project(&x.rows(0, sb).into_owned());
                out.rows_mut(0, sb).copy_from(&pb);
                let y = x.rows(sb, n).into_owned();
                let ny = y.norm();
                if ny > *radius {
                    out.rows_mut(sb, n).copy_from(&(y * (radius / ny)));
                }
                out
            }
        }
    }

    /// A point of ∂N near `x` (radial for balls and shells).
    pub fn project_to_boundary(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Ball { radius, center } => {
                let u = Self::offset(center, x);
                let r = u.norm();
                if r == 0.0 {
                    let mut e = x.clone();
                    e[0] += radius;
                    return e;
                }
                x - &u + u * (radius / r)
            }
            Self::Shell { inner, outer, center } => {
                let u = Self::offset(center, x);
                let r = u.norm().max(f64::MIN_POSITIVE);
                let target = if (r - inner).abs() < (r - outer).abs() {
                    *inner
                } else {
                    *outer
                };
                x - &u + &u * (target / r)
            }
            Self::Tube { core, radius } => {
                let sb = core.embedding_dim();
                let n = x.len() - sb;
                let mut out = self.project(x);
                let y = x.rows(sb, n).into_owned();
                let ny = y.norm();
                let dir = if ny > 0.0 {
                    y / ny
                } else {
                    let mut e = DVector::zeros(n);
                    e[0] = 1.0;
                    e
                };
                out.rows_mut(sb, n).copy_from(&(dir * *radius));
                out
            }
        }
    }
}

/// Run-config block `{"ambient": …, "subset": …}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientConfig {
    pub ambient: AmbientManifold,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<CompactSubset>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(c: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(c)
    }

    fn random_on(amb: &AmbientManifold, rng: &mut ChaCha8Rng) -> DVector<f64> {
        let s = amb.embedding_dim();
        let x = DVector::from_fn(s, |_, _| rng.random_range(-2.0..2.0));
        amb.project(&x)
    }

    fn catalog() -> Vec<AmbientManifold> {
        vec![
            AmbientManifold::euclidean(3),
            AmbientManifold::sphere(2, 1.0),
            AmbientManifold::sphere(3, 2.5),
            AmbientManifold::Sphere {
                n: 2,
                r: 0.7,
                center: Some(vec![0.3, -1.0, 2.0]),
            },
            AmbientManifold::product(AmbientManifold::sphere(2, 1.5), 1),
        ]
    }

    #[test]
    fn sphere_projector_examples() {
        let s = AmbientManifold::sphere(2, 1.0);
        let q = s.tangent_projector(&v(&[1.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(q, DMatrix::from_diagonal(&v(&[0.0, 1.0, 1.0])), epsilon = 1e-15);
        let s2 = AmbientManifold::sphere(2, 2.0);
        let q = s2.tangent_projector(&v(&[0.0, 0.0, 2.0])).unwrap();
        assert_relative_eq!(q, DMatrix::from_diagonal(&v(&[1.0, 1.0, 0.0])), epsilon = 1e-15);
    }

    #[test]
    fn off_manifold_is_rejected_with_distance() {
        let s = AmbientManifold::sphere(2, 1.0);
        match s.tangent_projector(&v(&[1.1, 0.0, 0.0])) {
            Err(Error::OffManifold { distance, .. }) => assert_relative_eq!(distance, 0.1, epsilon = 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pinned_sphere_derivatives() {
        let s = AmbientManifold::sphere(2, 1.0);
        let dq = s.dq(&v(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(dq.get(0, 0, 0), 0.0);
        assert_eq!(dq.get(0, 1, 1), -1.0);
    }

    #[test]
    fn projector_laws_and_fd_derivative_over_catalog() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for amb in catalog() {
            let s = amb.embedding_dim();
            for _ in 0..100 {
                let x = random_on(&amb, &mut rng);
                let q = amb.tangent_projector(&x).unwrap();
                assert!((&q - q.transpose()).amax() < 1e-12);
                assert!((&q * &q - &q).amax() < 1e-10);
                assert!((q.trace() - amb.dim() as f64).abs() < 1e-10);
                for nu in amb.normals(&x) {
                    assert!((&q * nu).amax() < 1e-10);
                }
                let dq = amb.dq(&x).unwrap();
                let h = 1e-5;
                for k in 0..s {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[k] += h;
                    xm[k] -= h;
                    let fd = (amb.tangent_projector_unchecked(&xp) - amb.tangent_projector_unchecked(&xm)) / (2.0 * h);
                    for i in 0..s {
                        for j in 0..s {
                            assert!((fd[(i, j)] - dq.get(i, j, k)).abs() < 1e-6);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn correction_is_normal_with_norm_m_over_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, r) in [(2usize, 1.0), (3, 2.0), (4, 0.5)] {
            let amb = AmbientManifold::sphere(n, r);
            for _ in 0..20 {
                let x = random_on(&amb, &mut rng);
                let q = amb.tangent_projector(&x).unwrap();
                for m in 1..n {
                    let span: Vec<DVector<f64>> = (0..m)
                        .map(|_| &q * DVector::from_fn(n + 1, |_, _| rng.random_range(-1.0..1.0)))
                        .collect();
                    let p = PlaneProjector::from_spanning(&span).unwrap();
                    let c = amb.curvature_correction(&x, &p).unwrap();
                    assert!((&q * &c).amax() < 1e-8);
                    assert_relative_eq!(c.norm(), m as f64 / r, epsilon = 1e-10);
                    assert_relative_eq!(c, &x * (-(m as f64) / (r * r)), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn great_circle_correction_is_minus_x() {
        let amb = AmbientManifold::sphere(2, 1.0);
        let p = PlaneProjector::from_spanning(&[v(&[0.0, 1.0, 0.0])]).unwrap();
        let c = amb.curvature_correction(&v(&[1.0, 0.0, 0.0]), &p).unwrap();
        assert_relative_eq!(c, v(&[-1.0, 0.0, 0.0]), epsilon = 1e-15);
    }

    #[test]
    fn bundle_violation_is_rejected() {
        let amb = AmbientManifold::sphere(2, 1.0);
        let p = PlaneProjector::from_spanning(&[v(&[1.0, 1.0, 0.0])]).unwrap();
        assert!(matches!(
            amb.curvature_correction(&v(&[1.0, 0.0, 0.0]), &p),
            Err(Error::BundleConstraint { .. })
        ));
    }

    #[test]
    fn euclidean_correction_vanishes() {
        let amb = AmbientManifold::euclidean(3);
        let p = PlaneProjector::from_spanning(&[v(&[1.0, 2.0, 0.0])]).unwrap();
        assert_eq!(
            amb.curvature_correction(&v(&[4.0, 1.0, 0.0]), &p).unwrap(),
            DVector::zeros(3)
        );
    }

    #[test]
    fn subset_projection_examples() {
        let b = CompactSubset::ball(1.0);
        assert_eq!(b.project(&v(&[3.0, 0.0, 0.0])), v(&[1.0, 0.0, 0.0]));
        let inside = v(&[0.2, 0.1, -0.3]);
        assert_eq!(b.project(&inside), inside);
        let sh = CompactSubset::shell(1.0, 2.0);
        assert_eq!(sh.project(&v(&[0.5, 0.0, 0.0])), v(&[1.0, 0.0, 0.0]));
    }

    #[test]
    fn boundary_projection_is_contained() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let subsets = [
            CompactSubset::ball(1.5),
            CompactSubset::shell(0.5, 2.0),
            CompactSubset::Tube {
                core: AmbientManifold::sphere(2, 1.0),
                radius: 0.3,
            },
        ];
        for sub in &subsets {
            for _ in 0..50 {
                let s = if matches!(sub, CompactSubset::Tube { .. }) {
                    4
                } else {
                    3
                };
                let x = DVector::from_fn(s, |_, _| rng.random_range(-3.0..3.0));
                assert!(sub.contains(&sub.project_to_boundary(&x), 1e-10));
                let p = sub.project(&x);
                assert!(sub.contains(&p, 1e-10));
                assert!((sub.project(&p) - &p).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn geodesic_dominates_euclidean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for amb in catalog() {
            for _ in 0..30 {
                let x = random_on(&amb, &mut rng);
                let y = random_on(&amb, &mut rng);
                assert!(amb.geodesic_distance(&x, &y) >= (&x - &y).norm() - 1e-12);
            }
        }
        let s = AmbientManifold::sphere(2, 1.0);
        assert_relative_eq!(
            s.geodesic_distance(&v(&[1.0, 0.0, 0.0]), &v(&[-1.0, 0.0, 0.0])),
            std::f64::consts::PI
        );
    }

    #[test]
    fn config_json_shape() {
        let cfg: AmbientConfig = serde_json::from_str(
            r#"{"ambient": {"kind": "sphere", "n": 2, "r": 1.0}, "subset": {"kind": "ball", "R": 2.0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.ambient, AmbientManifold::sphere(2, 1.0));
        assert_eq!(cfg.subset, Some(CompactSubset::ball(2.0)));
        let e: AmbientManifold = serde_json::from_str(r#"{"kind": "euclidean", "S": 3}"#).unwrap();
        assert_eq!(e.embedding_dim(), 3);
    }
}
