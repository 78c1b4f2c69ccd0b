//! First variation δV(X) and weak mean curvature recovery.
//!
//! Two estimators are provided: a mesh estimator (area gradient over the
//! mixed Voronoi area, i.e. the cotangent formula; length gradient for
//! polylines) and a kernel estimator that tests the weak identity
//! `δV(X) = -∫ H·X dV` against a localized quartic bump.

use std::io::Write;

use nalgebra::{DMatrix, DVector, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::SimplicialMesh;
use crate::varifold::DiscreteVarifold;

/// C¹ profile equal to 1 on `[0, 0]` and 0 on `[1, ∞)`: `1 - 3t² + 2t³`.
fn smoothstep_down(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        (1.0, 0.0)
    } else if t >= 1.0 {
        (0.0, 0.0)
    } else {
        (1.0 - 3.0 * t * t + 2.0 * t * t * t, -6.0 * t + 6.0 * t * t)
    }
}

/// Quartic bump `(1 - t²)²` on `[0, 1)` and its derivative in t.
pub fn quartic_bump(t: f64) -> (f64, f64) {
    if t >= 1.0 {
        (0.0, 0.0)
    } else {
        let a = 1.0 - t * t;
        (a * a, -4.0 * t * a)
    }
}

/// One monomial `coef · Π x_j^{powers_j}` in component `component`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyTerm {
    pub component: usize,
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// Test vector fields X ∈ C¹_c with closed-form Jacobians.
#[derive(Clone, Debug, PartialEq)]
pub enum TestVectorField {
    /// `X(x) = A x + b`.
    Affine { a: DMatrix<f64>, b: DVector<f64> },
    /// `X(x) = (x - c) ψ(|x - c|)` with ψ ≡ 1 on `[0, inner]`, ψ ≡ 0 beyond
    /// `outer`, cubic in between.
    RadialBump {
        center: DVector<f64>,
        inner: f64,
        outer: f64,
    },
    /// `X(x) = e · (1 - |x - c|²/ε²)²` on the ε-ball.
    DirectionalBump {
        center: DVector<f64>,
        radius: f64,
        direction: DVector<f64>,
    },
    /// Coordinate polynomial of total degree ≤ 3.
    Polynomial { dim: usize, terms: Vec<PolyTerm> },
}

impl TestVectorField {
    /// `x - x0`, whose P-divergence is m everywhere.
    pub fn position(x0: &DVector<f64>) -> Self {
        let s = x0.len();
        Self::Affine {
            a: DMatrix::identity(s, s),
            b: -x0,
        }
    }

    pub fn constant(b: DVector<f64>) -> Self {
        let s = b.len();
        Self::Affine {
            a: DMatrix::zeros(s, s),
            b,
        }
    }

    pub fn polynomial(dim: usize, terms: Vec<PolyTerm>) -> Result<Self> {
        for t in &terms {
            if t.component >= dim || t.powers.len() != dim {
                return Err(Error::DimensionMismatch("polynomial term outside R^S".into()));
            }
            if t.powers.iter().sum::<u32>() > 3 {
                return Err(Error::InvalidArgument("polynomial degree exceeds 3".into()));
            }
        }
        Ok(Self::Polynomial { dim, terms })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Affine { b, .. } => b.len(),
            Self::RadialBump { center, .. } => center.len(),
            Self::DirectionalBump { center, .. } => center.len(),
            Self::Polynomial { dim, .. } => *dim,
        }
    }

    pub fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Affine { a, b } => a * x + b,
            Self::RadialBump { center, inner, outer } => {
                let u = x - center;
                let r = u.norm();
                let (psi, _) = smoothstep_down((r - inner) / (outer - inner));
                u * psi
            }
            Self::DirectionalBump {
                center,
                radius,
                direction,
            } => {
                let t = (x - center).norm() / radius;
                direction * quartic_bump(t).0
            }
            Self::Polynomial { dim, terms } => {
                let mut out = DVector::zeros(*dim);
                for t in terms {
                    out[t.component] += t.coef * monomial(x, &t.powers);
                }
                out
            }
        }
    }

    /// `J_ij = ∂X_i/∂x_j`.
    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let s = self.dim();
        match self {
            Self::Affine { a, .. } => a.clone(),
            Self::RadialBump { center, inner, outer } => {
                let u = x - center;
                let r = u.norm();
                let w = outer - inner;
                let (psi, dpsi) = smoothstep_down((r - inner) / w);
                let mut j = DMatrix::identity(s, s) * psi;
                if r > 0.0 && dpsi != 0.0 {
                    j.ger(dpsi / (w * r), &u, &u, 1.0);
                }
                j
            }
            Self::DirectionalBump {
                center,
                radius,
                direction,
            } => {
                let u = x - center;
                let r2 = u.norm_squared() / (radius * radius);
                if r2 >= 1.0 {
                    return DMatrix::zeros(s, s);
                }
                // ∇(1 - |u|²/ε²)² = -4 (1 - |u|²/ε²) u / ε²
                let g = &u * (-4.0 * (1.0 - r2) / (radius * radius));
                direction * g.transpose()
            }
            Self::Polynomial { terms, .. } => {
                let mut j = DMatrix::zeros(s, s);
                for t in terms {
                    for k in 0..s {
                        if t.powers[k] == 0 {
                            continue;
                        }
                        let mut pw = t.powers.clone();
                        pw[k] -= 1;
                        j[(t.component, k)] += t.coef * t.powers[k] as f64 * monomial(x, &pw);
                    }
                }
                j
            }
        }
    }

    /// Outer support radius for the compactly supported kinds.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Self::RadialBump { outer, .. } => Some(*outer),
            Self::DirectionalBump { radius, .. } => Some(*radius),
            _ => None,
        }
    }
}

fn monomial(x: &DVector<f64>, powers: &[u32]) -> f64 {
    powers.iter().enumerate().map(|(k, &e)| x[k].powi(e as i32)).product()
}

/// δV(X) = Σ w · Σ_ij P_ij ∂X_i/∂x_j.
pub fn first_variation(v: &DiscreteVarifold, field: &TestVectorField) -> f64 {
    let terms: Vec<f64> = v
        .atoms()
        .par_iter()
        .map(|a| {
            let j = field.jacobian(&a.x);
            a.w * a.p.matrix().component_mul(&j).sum()
        })
        .collect();
    terms.iter().sum()
}

/// Which vector of a [`CurvatureField`] to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    /// H^{R^S}.
    Euclidean,
    /// H^N.
    Relative,
}

/// Per-atom mean curvature vectors aligned with the atom order.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureField {
    /// H^{R^S}; `None` for flagged atoms.
    pub h: Vec<Option<DVector<f64>>>,
    /// H^N = H - ambient correction (equal to H without an ambient).
    pub h_n: Vec<Option<DVector<f64>>>,
    /// Estimator residual: tangential part |P H| for the mesh estimator,
    /// normalized kernel asymmetry for the kernel estimator.
    pub residual: Vec<f64>,
    /// Atoms touching an open mesh boundary.
    pub near_boundary: Vec<bool>,
}

#[derive(Serialize)]
struct FieldRecord<'a> {
    #[serde(rename = "H")]
    h: Option<&'a [f64]>,
    #[serde(rename = "H_N")]
    h_n: Option<&'a [f64]>,
    residual: f64,
}

impl CurvatureField {
    /// Field with the given H and H_N = H.
    pub fn from_h(h: Vec<Option<DVector<f64>>>) -> Self {
        let n = h.len();
        Self {
            h_n: h.clone(),
            h,
            residual: vec![0.0; n],
            near_boundary: vec![false; n],
        }
    }

    /// Zero field for every atom of `v`.
    pub fn zeros(v: &DiscreteVarifold) -> Self {
        Self::from_h(vec![Some(DVector::zeros(v.s())); v.len()])
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn unset_count(&self) -> usize {
        self.h.iter().filter(|h| h.is_none()).count()
    }

    pub fn get(&self, component: Component) -> &[Option<DVector<f64>>] {
        match component {
            Component::Euclidean => &self.h,
            Component::Relative => &self.h_n,
        }
    }

    /// Indices with a value and away from any boundary.
    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.h.len())
            .filter(|&i| self.h[i].is_some() && !self.near_boundary[i])
            .collect()
    }

    /// |H| per atom (NaN when unset).
    pub fn norms(&self, component: Component) -> Vec<f64> {
        self.get(component)
            .iter()
            .map(|h| h.as_ref().map_or(f64::NAN, |h| h.norm()))
            .collect()
    }

    /// Same field with every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let f = |v: &Vec<Option<DVector<f64>>>| v.iter().map(|h| h.as_ref().map(|h| h * factor)).collect();
        Self {
            h: f(&self.h),
            h_n: f(&self.h_n),
            residual: self.residual.clone(),
            near_boundary: self.near_boundary.clone(),
        }
    }

    /// JSON lines `{"H": [..] | null, "H_N": [..] | null, "residual": r}`.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.h.len() {
            let rec = FieldRecord {
                h: self.h[i].as_ref().map(|v| v.as_slice()),
                h_n: self.h_n[i].as_ref().map(|v| v.as_slice()),
                residual: self.residual[i],
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Per-vertex mean curvature vectors and dual areas of a mesh.
///
/// For triangle meshes in R³, `H_i = -∇_i Area / A_i` with the mixed
/// Voronoi area `A_i`; for polylines in any R^S, `H_i = -∇_i Length / L_i`
/// with `L_i` half the incident length.
pub fn vertex_mean_curvature(mesh: &SimplicialMesh) -> Result<(Vec<DVector<f64>>, Vec<f64>)> {
    let bad = mesh.non_manifold_facets();
    if !bad.is_empty() {
        return Err(Error::NonManifold { edges: bad });
    }
    match mesh.intrinsic_dim() {
        1 => Ok(polyline_curvature(mesh)),
        2 if mesh.ambient_dim() == 3 => Ok(triangle_curvature(mesh)),
        m => Err(Error::InvalidArgument(format!(
            "mesh estimator supports curves and surfaces in R^3, got m = {m}, S = {}",
            mesh.ambient_dim()
        ))),
    }
}

fn polyline_curvature(mesh: &SimplicialMesh) -> (Vec<DVector<f64>>, Vec<f64>) {
    let n = mesh.num_vertices();
    let s = mesh.ambient_dim();
    let mut grad = vec![DVector::zeros(s); n];
    let mut len = vec![0.0; n];
    for f in mesh.simplices() {
        let d = &mesh.vertices()[f[0]] - &mesh.vertices()[f[1]];
        let l = d.norm();
        grad[f[0]] += &d / l;
        grad[f[1]] -= &d / l;
        len[f[0]] += 0.5 * l;
        len[f[1]] += 0.5 * l;
    }
    let h = grad.iter().zip(&len).map(|(g, l)| -g / *l).collect();
    (h, len)
}

/// Mixed Voronoi area contributions of one triangle to its three corners.
pub fn mixed_areas(p: &[Vector3<f64>; 3]) -> [f64; 3] {
    let area = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
    let cot = |a: usize| {
        let u = p[(a + 1) % 3] - p[a];
        let v = p[(a + 2) % 3] - p[a];
        u.dot(&v) / u.cross(&v).norm()
    };
    let dots: [f64; 3] = std::array::from_fn(|a| (p[(a + 1) % 3] - p[a]).dot(&(p[(a + 2) % 3] - p[a])));
    let mut out = [0.0; 3];
    if let Some(obtuse) = (0..3).find(|&a| dots[a] < 0.0) {
        for (a, o) in out.iter_mut().enumerate() {
            *o = if a == obtuse { 0.5 * area } else { 0.25 * area };
        }
    } else {
        for a in 0..3 {
            let b = (a + 1) % 3;
            let c = (a + 2) % 3;
            // Voronoi region of a: edges ab (opposite c) and ac (opposite b)
            out[a] = ((p[b] - p[a]).norm_squared() * cot(c) + (p[c] - p[a]).norm_squared() * cot(b)) / 8.0;
        }
    }
    out
}

/// `∇_{x_a} area` of triangle `p` for each corner.
pub fn area_gradients(p: &[Vector3<f64>; 3]) -> [Vector3<f64>; 3] {
    let n = (p[1] - p[0]).cross(&(p[2] - p[0]));
    let nn = n.norm();
    let uh = n / nn;
    std::array::from_fn(|a| 0.5 * (p[(a + 1) % 3] - p[(a + 2) % 3]).cross(&uh))
}

fn triangle_curvature(mesh: &SimplicialMesh) -> (Vec<DVector<f64>>, Vec<f64>) {
    let pos = mesh.positions3().expect("S = 3");
    let n = pos.len();
    let mut grad = vec![Vector3::zeros(); n];
    let mut area = vec![0.0; n];
    for f in mesh.simplices() {
        let p = [pos[f[0]], pos[f[1]], pos[f[2]]];
        let g = area_gradients(&p);
        let a = mixed_areas(&p);
        for k in 0..3 {
            grad[f[k]] += g[k];
            area[f[k]] += a[k];
        }
    }
    let h = grad
        .iter()
        .zip(&area)
        .map(|(g, a)| DVector::from_column_slice((-g / *a).as_slice()))
        .collect();
    (h, area)
}

fn correction_fill(v: &DiscreteVarifold, h: &[Option<DVector<f64>>]) -> Vec<Option<DVector<f64>>> {
    match v.ambient() {
        Some(amb) if !amb.is_euclidean() => h
            .par_iter()
            .zip(v.atoms().par_iter())
            .map(|(h, a)| {
                h.as_ref()
                    .map(|h| h - amb.curvature_correction_unchecked(&a.x, a.p.matrix()))
            })
            .collect(),
        _ => h.to_vec(),
    }
}

/// Mesh estimator: per-vertex curvature interpolated barycentrically to
/// atoms. Needs mesh provenance (triangles in R³ or polylines).
pub fn mean_curvature_mesh(v: &DiscreteVarifold) -> Result<CurvatureField> {
    let prov = v
        .provenance()
        .ok_or_else(|| Error::InvalidArgument("mesh estimator needs a mesh-backed varifold".into()))?;
    let (hv, _) = vertex_mean_curvature(&prov.mesh)?;
    let boundary = prov.mesh.boundary_vertices();
    let s = v.s();
    let (h, (residual, near)): (Vec<_>, (Vec<_>, Vec<_>)) = v
        .atoms()
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let f = &prov.mesh.simplices()[prov.simplex[i]];
            let mut hx = DVector::zeros(s);
            for (b, &vi) in prov.barycentric[i].iter().zip(f) {
                if *b != 0.0 {
                    hx.axpy(*b, &hv[vi], 1.0);
                }
            }
            let res = a.p.apply(&hx).norm();
            let nb = f.iter().any(|&vi| boundary[vi]);
            (Some(hx), (res, nb))
        })
        .unzip();
    let h_n = correction_fill(v, &h);
    Ok(CurvatureField {
        h,
        h_n,
        residual,
        near_boundary: near,
    })
}

/// Kernel estimator: the normal part of `-Σ w P∇ρ_ε / Σ w ρ_ε` (weak
/// mean curvature of an integral varifold is perpendicular to its
/// tangent planes). Atoms whose ε-neighbourhood holds fewer than m + 1
/// other points are left unset. The residual is the discarded tangential
/// part `|P_0 H|·ε`, a dimensionless measure of neighbourhood asymmetry.
pub fn mean_curvature_kernel(v: &DiscreteVarifold, eps: f64) -> Result<CurvatureField> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("kernel radius {eps} must be positive")));
    }
    let m = v.m();
    let s = v.s();
    let boundary: Vec<bool> = match v.provenance() {
        Some(prov) => {
            let b = prov.mesh.boundary_vertices();
            let verts = prov.mesh.vertices();
            let bpts: Vec<&DVector<f64>> = (0..b.len()).filter(|&i| b[i]).map(|i| &verts[i]).collect();
            v.atoms()
                .par_iter()
                .map(|a| bpts.iter().any(|q| (*q - &a.x).norm() < eps))
                .collect()
        }
        None => vec![false; v.len()],
    };
    let (h, residual): (Vec<_>, Vec<_>) = v
        .atoms()
        .par_iter()
        .map(|a0| {
            let nb = v.atoms_within(&a0.x, eps);
            let others = nb.iter().filter(|&&j| v.atoms()[j].x != a0.x).count();
            if others < m + 1 {
                return (None, f64::NAN);
            }
            let mut num = DVector::zeros(s);
            let mut den = 0.0;
            for &j in &nb {
                let a = &v.atoms()[j];
                let u = &a.x - &a0.x;
                let t2 = u.norm_squared() / (eps * eps);
                let q = 1.0 - t2;
                den += a.w * q * q;
                let g = &u * (-4.0 * q / (eps * eps));
                num += a.p.apply(&g) * a.w;
            }
            if den <= 0.0 {
                return (None, f64::NAN);
            }
            let raw = -num / den;
            let res = a0.p.apply(&raw).norm() * eps;
            (Some(a0.p.apply_normal(&raw)), res)
        })
        .unzip();
    let h_n = correction_fill(v, &h);
    Ok(CurvatureField {
        h,
        h_n,
        residual,
        near_boundary: boundary,
    })
}

/// `H^N = H - Σ P_jk ∂Q_ij/∂x_k` atomwise; needs an attached ambient.
pub fn relative_mean_curvature(v: &DiscreteVarifold, field: &CurvatureField) -> Result<CurvatureField> {
    let amb = v.ambient().ok_or(Error::NoAmbient)?;
    if field.len() != v.len() {
        return Err(Error::DimensionMismatch("field and varifold differ in length".into()));
    }
    let h_n: Result<Vec<Option<DVector<f64>>>> = field
        .h
        .par_iter()
        .zip(v.atoms().par_iter())
        .map(|(h, a)| match h {
            Some(h) => Ok(Some(h - amb.curvature_correction(&a.x, &a.p)?)),
            None => Ok(None),
        })
        .collect();
    Ok(CurvatureField {
        h_n: h_n?,
        ..field.clone()
    })
}

/// `|Q(x) H^N|` per atom: tangency of H^N to N̄, reported as a diagnostic.
pub fn relative_tangency(v: &DiscreteVarifold, field: &CurvatureField) -> Result<Vec<f64>> {
    let amb = v.ambient().ok_or(Error::NoAmbient)?;
    Ok(field
        .h_n
        .iter()
        .zip(v.atoms())
        .map(|(h, a)| {
            h.as_ref()
                .map_or(f64::NAN, |h| (amb.tangent_projector_unchecked(&a.x) * h).norm())
        })
        .collect())
}

/// `∫ |H|^p dμ = Σ w |H|^p` (the integral, not its p-th root). Unset atoms
/// are an error unless `skip_unset`.
pub fn lp_norm(
    field: &CurvatureField,
    v: &DiscreteVarifold,
    p: f64,
    component: Component,
    skip_unset: bool,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent {p} must be at least 1")));
    }
    let vals = field.get(component);
    if vals.len() != v.len() {
        return Err(Error::DimensionMismatch("field and varifold differ in length".into()));
    }
    let unset = vals.iter().filter(|h| h.is_none()).count();
    if unset > 0 && !skip_unset {
        return Err(Error::UnsetCurvature { count: unset });
    }
    let terms: Vec<f64> = vals
        .iter()
        .zip(v.atoms())
        .map(|(h, a)| h.as_ref().map_or(0.0, |h| a.w * h.norm().powf(p)))
        .collect();
    Ok(terms.iter().sum())
}

/// `δV(X) + Σ w H·X`, which vanishes when H is the weak mean curvature.
pub fn weak_defect(v: &DiscreteVarifold, field: &CurvatureField, x: &TestVectorField) -> Result<f64> {
    let unset = field.unset_count();
    if unset > 0 {
        return Err(Error::UnsetCurvature { count: unset });
    }
    let dv = first_variation(v, x);
    let terms: Vec<f64> = v
        .atoms()
        .par_iter()
        .zip(field.h.par_iter())
        .map(|(a, h)| a.w * h.as_ref().unwrap().dot(&x.value(&a.x)))
        .collect();
    Ok(dv + terms.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::AmbientManifold;
    use crate::mesh::shapes;
    use crate::varifold::{varifold_from_mesh, QuadratureRule};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn sphere(k: usize, rule: QuadratureRule) -> DiscreteVarifold {
        varifold_from_mesh(&shapes::icosphere(k, 1.0), rule, None).unwrap()
    }

    fn fields(s: usize) -> Vec<TestVectorField> {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = |rng: &mut ChaCha8Rng| DVector::from_fn(s, |_, _| rng.random_range(-1.0..1.0));
        vec![
            TestVectorField::Affine {
                a: DMatrix::from_fn(s, s, |_, _| rng.random_range(-1.0..1.0)),
                b: r(&mut rng),
            },
            TestVectorField::RadialBump {
                center: r(&mut rng) * 0.3,
                inner: 0.4,
                outer: 1.3,
            },
            TestVectorField::DirectionalBump {
                center: r(&mut rng) * 0.5,
                radius: 0.8,
                direction: r(&mut rng),
            },
            TestVectorField::polynomial(
                s,
                vec![
                    PolyTerm {
                        component: 0,
                        coef: 1.5,
                        powers: {
                            let mut p = vec![0; s];
                            p[0] = 1;
                            p[s - 1] = 2;
                            p
                        },
                    },
                    PolyTerm {
                        component: s - 1,
                        coef: -0.7,
                        powers: {
                            let mut p = vec![0; s];
                            p[1] = 2;
                            p
                        },
                    },
                ],
            )
            .unwrap(),
        ]
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for s in [2, 3, 4] {
            for f in fields(s) {
                for _ in 0..20 {
                    let x = DVector::from_fn(s, |_, _| rng.random_range(-1.0..1.0));
                    let j = f.jacobian(&x);
                    let h = 1e-6;
                    for k in 0..s {
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[k] += h;
                        xm[k] -= h;
                        let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
                        for i in 0..s {
                            assert!((fd[i] - j[(i, k)]).abs() < 1e-7, "{f:?} at {x}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bumps_vanish_outside_support() {
        for f in fields(3) {
            if let (
                Some(r),
                TestVectorField::RadialBump { center, .. } | TestVectorField::DirectionalBump { center, .. },
            ) = (f.support_radius(), &f)
            {
                let mut x = center.clone();
                x[0] += r * 1.0000001;
                assert_eq!(f.value(&x).norm(), 0.0);
                assert_eq!(f.jacobian(&x).norm(), 0.0);
            }
        }
    }

    #[test]
    fn position_field_gives_m_times_mass() {
        let v = sphere(2, QuadratureRule::Centroid);
        let x0 = DVector::from_vec(vec![0.3, -2.0, 1.0]);
        let dv = first_variation(&v, &TestVectorField::position(&x0));
        assert_relative_eq!(dv, 2.0 * v.mass(), max_relative = 1e-13);
        let c = TestVectorField::constant(DVector::from_vec(vec![1.0, 2.0, 3.0]));
        assert_eq!(first_variation(&v, &c), 0.0);
    }

    #[test]
    fn bump_radial_field_on_sphere() {
        let v = sphere(4, QuadratureRule::Centroid);
        let x = TestVectorField::RadialBump {
            center: DVector::zeros(3),
            inner: 1.1,
            outer: 1.5,
        };
        let dv = first_variation(&v, &x);
        assert!((dv - 8.0 * PI).abs() / (8.0 * PI) < 5e-3);
    }

    #[test]
    fn mesh_estimator_on_sphere_and_flat() {
        let v = sphere(4, QuadratureRule::Centroid);
        let f = mean_curvature_mesh(&v).unwrap();
        for (h, a) in f.h.iter().zip(v.atoms()) {
            let h = h.as_ref().unwrap();
            assert!((h.norm() - 2.0).abs() < 0.04);
            assert!(h.dot(&a.x) < 0.0);
        }
        let flat = varifold_from_mesh(&shapes::flat_grid(10, 0.1), QuadratureRule::Centroid, None).unwrap();
        let f = mean_curvature_mesh(&flat).unwrap();
        for i in f.interior_indices() {
            assert!(f.h[i].as_ref().unwrap().norm() < 1e-8);
        }
        assert!(f.near_boundary.iter().any(|&b| b));
    }

    #[test]
    fn polyline_circle_curvature() {
        let v = varifold_from_mesh(&shapes::unit_circle_r2(400), QuadratureRule::Vertex, None).unwrap();
        let f = mean_curvature_mesh(&v).unwrap();
        for (h, a) in f.h.iter().zip(v.atoms()) {
            assert_relative_eq!(h.as_ref().unwrap(), &(-&a.x), epsilon = 1e-4);
        }
    }

    #[test]
    fn non_manifold_mesh_is_rejected() {
        let p = |x: f64, y: f64, z: f64| DVector::from_vec(vec![x, y, z]);
        let m = SimplicialMesh::new(
            vec![
                p(0.0, 0.0, 0.0),
                p(1.0, 0.0, 0.0),
                p(0.0, 1.0, 0.0),
                p(0.0, -1.0, 0.0),
                p(0.0, 0.0, 1.0),
            ],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]],
        )
        .unwrap();
        let v = varifold_from_mesh(&m, QuadratureRule::Centroid, None).unwrap();
        match mean_curvature_mesh(&v) {
            Err(Error::NonManifold { edges }) => assert_eq!(edges, vec![(0, 1)]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kernel_estimator_on_sphere_and_flat() {
        let v = sphere(4, QuadratureRule::Centroid);
        let f = mean_curvature_kernel(&v, 0.15).unwrap();
        for h in &f.h {
            assert!((h.as_ref().unwrap().norm() - 2.0).abs() < 0.1);
        }
        let eps = 0.25;
        let flat = varifold_from_mesh(&shapes::flat_grid(30, 0.05), QuadratureRule::Vertex, None).unwrap();
        let f = mean_curvature_kernel(&flat, eps).unwrap();
        for i in f.interior_indices() {
            assert!(f.h[i].as_ref().unwrap().norm() < 1e-3 / eps);
        }
    }

    #[test]
    fn isolated_atom_is_flagged() {
        let v = sphere(1, QuadratureRule::Centroid);
        let f = mean_curvature_kernel(&v, 1e-3).unwrap();
        assert_eq!(f.unset_count(), v.len());
        assert!(matches!(
            lp_norm(&f, &v, 2.0, Component::Euclidean, false),
            Err(Error::UnsetCurvature { .. })
        ));
        assert_eq!(lp_norm(&f, &v, 2.0, Component::Euclidean, true).unwrap(), 0.0);
    }

    #[test]
    fn lp_norms_on_unit_sphere() {
        let v = sphere(4, QuadratureRule::Centroid);
        let f = mean_curvature_mesh(&v).unwrap();
        let e3 = lp_norm(&f, &v, 3.0, Component::Euclidean, false).unwrap();
        assert!((e3 - 32.0 * PI).abs() / (32.0 * PI) < 0.05);
        let e2 = lp_norm(&f, &v, 2.0, Component::Euclidean, false).unwrap();
        assert!((e2 - 16.0 * PI).abs() / (16.0 * PI) < 0.04);
        assert_eq!(
            lp_norm(&CurvatureField::zeros(&v), &v, 3.0, Component::Euclidean, false).unwrap(),
            0.0
        );
    }

    #[test]
    fn relative_curvature_of_great_and_latitude_circles() {
        let amb = AmbientManifold::sphere(2, 1.0);
        let g = varifold_from_mesh(&shapes::latitude_circle(256, 0.0), QuadratureRule::Vertex, None)
            .unwrap()
            .conform_to_ambient(amb.clone())
            .unwrap();
        let f = relative_mean_curvature(&g, &mean_curvature_mesh(&g).unwrap()).unwrap();
        for (h, hn) in f.h.iter().zip(&f.h_n) {
            assert!((h.as_ref().unwrap().norm() - 1.0).abs() < 0.05);
            assert!(hn.as_ref().unwrap().norm() < 0.05);
        }
        let theta: f64 = 0.5;
        let l = varifold_from_mesh(&shapes::latitude_circle(256, theta), QuadratureRule::Vertex, None)
            .unwrap()
            .conform_to_ambient(amb)
            .unwrap();
        let f = relative_mean_curvature(&l, &mean_curvature_mesh(&l).unwrap()).unwrap();
        for hn in &f.h_n {
            assert!((hn.as_ref().unwrap().norm() - theta.tan()).abs() / theta.tan() < 0.05);
        }
        let e = varifold_from_mesh(&shapes::unit_circle_r2(10), QuadratureRule::Vertex, None).unwrap();
        assert!(matches!(
            relative_mean_curvature(&e, &CurvatureField::zeros(&e)),
            Err(Error::NoAmbient)
        ));
    }

    #[test]
    fn defect_shrinks_under_refinement() {
        let x = TestVectorField::DirectionalBump {
            center: DVector::from_vec(vec![0.2, 0.1, 0.9]),
            radius: 0.9,
            direction: DVector::from_vec(vec![0.3, -1.0, 0.5]),
        };
        let d: Vec<f64> = (2..5)
            .map(|k| {
                let v = sphere(k, QuadratureRule::Degree2);
                weak_defect(&v, &mean_curvature_mesh(&v).unwrap(), &x).unwrap().abs()
            })
            .collect();
        assert!(d[1] < 0.5 * d[0] && d[2] < 0.5 * d[1], "{d:?}");
    }
}
