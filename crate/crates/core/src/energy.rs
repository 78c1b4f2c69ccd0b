//! Curvature energies `∫ F(x, P, q) dV` with q = H^N or A, and their
//! discrete mesh counterparts with analytic shape gradients.

use std::f64::consts::PI;

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature_tensor::CurvatureTensorField;
use crate::error::{Error, Result};
use crate::first_variation::{area_gradients, CurvatureField};
use crate::mesh::SimplicialMesh;
use crate::varifold::DiscreteVarifold;

/// Which curvature the integrand sees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Form {
    /// q = H^N, the mean curvature relative to the ambient.
    #[serde(rename = "H")]
    Mean,
    /// q = A, the second fundamental form.
    #[serde(rename = "A")]
    SecondFundamental,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Integrand {
    /// `C |q|^p`.
    #[default]
    Power,
    /// `C [(|q|² + δ²)^{p/2} - δ^p]`: smooth at q = 0 and still bounded
    /// below by `C |q|^p` for p ≥ 2.
    HuberPower { delta: f64 },
}

/// `F(x, P, q) = F(|q|)`, bounded below by `C |q|^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySpec {
    pub form: Form,
    pub p: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(default)]
    pub integrand: Integrand,
}

impl EnergySpec {
    pub fn power(form: Form, p: f64, c: f64) -> Self {
        Self {
            form,
            p,
            c,
            integrand: Integrand::Power,
        }
    }

    /// Checks p > m and samples the structural conditions on F:
    /// nonnegativity, F = 0 only at q = 0, convexity along random segments,
    /// superlinear growth and the lower bound `F ≥ C|q|^p`.
    pub fn validate(&self, m: usize) -> Result<()> {
        if !(self.p > m as f64) || !self.p.is_finite() {
            return Err(Error::ExponentTooSmall { p: self.p, m });
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "constant C = {} must be positive",
                self.c
            )));
        }
        if let Integrand::HuberPower { delta } = self.integrand {
            if !(delta > 0.0) || !delta.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "smoothing δ = {delta} must be positive"
                )));
            }
        }
        let bad = |what: &str| Err(Error::InvalidArgument(format!("integrand violates {what}")));
        if self.value_sq(0.0) != 0.0 {
            return bad("F(0) = 0");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let rand_q = |rng: &mut ChaCha8Rng| -> Vector3<f64> {
            let scale = 10f64.powf(rng.random_range(-3.0..3.0));
            Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ) * scale
        };
        for _ in 0..256 {
            let q1 = rand_q(&mut rng);
            let q2 = rand_q(&mut rng);
            let f1 = self.value(q1.norm());
            let f2 = self.value(q2.norm());
            if !(f1 > 0.0 && f2 > 0.0) {
                return bad("F(q) > 0 for q ≠ 0");
            }
            if f1 < self.c * q1.norm().powf(self.p) * (1.0 - 1e-12) {
                return bad(&format!("F ≥ C|q|^p (p = {})", self.p));
            }
            let lam: f64 = rng.random_range(0.0..1.0);
            let mid = self.value((q1 * lam + q2 * (1.0 - lam)).norm());
            let chord = lam * f1 + (1.0 - lam) * f2;
            if mid > chord * (1.0 + 1e-12) + 1e-300 {
                return bad("convexity");
            }
        }
        // F(t)/t must grow without bound
        let ratios: Vec<f64> = [1.0, 1e2, 1e4].iter().map(|&t| self.value(t) / t).collect();
        if !(ratios[1] > 10.0 * ratios[0] && ratios[2] > 10.0 * ratios[1]) {
            return bad("superlinear growth");
        }
        Ok(())
    }

    /// F as a function of |q|.
    pub fn value(&self, q: f64) -> f64 {
        self.value_sq(q * q)
    }

    /// F as a function of t = |q|².
    pub fn value_sq(&self, t: f64) -> f64 {
        let h = 0.5 * self.p;
        match self.integrand {
            Integrand::Power => self.c * t.powf(h),
            Integrand::HuberPower { delta } => {
                let d2 = delta * delta;
                self.c * ((t + d2).powf(h) - d2.powf(h))
            }
        }
    }

    /// dF/dt with t = |q|².
    pub fn derivative_sq(&self, t: f64) -> f64 {
        let h = 0.5 * self.p;
        match self.integrand {
            Integrand::Power => {
                if t == 0.0 {
                    if h > 1.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    self.c * h * t.powf(h - 1.0)
                }
            }
            Integrand::HuberPower { delta } => self.c * h * (t + delta * delta).powf(h - 1.0),
        }
    }
}

/// Curvature data matching an [`EnergySpec`] form.
#[derive(Clone, Copy, Debug)]
pub enum EnergyField<'a> {
    Mean(&'a CurvatureField),
    SecondFundamental(&'a CurvatureTensorField),
}

fn field_norms(v: &DiscreteVarifold, field: EnergyField<'_>, spec: &EnergySpec) -> Result<Vec<Option<f64>>> {
    let norms: Vec<Option<f64>> = match (spec.form, field) {
        (Form::Mean, EnergyField::Mean(f)) => f.h_n.iter().map(|h| h.as_ref().map(|h| h.norm())).collect(),
        (Form::SecondFundamental, EnergyField::SecondFundamental(f)) => {
            f.a.iter().map(|a| a.as_ref().map(|a| a.norm())).collect()
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "field does not match the {:?} energy form",
                spec.form
            )))
        }
    };
    if norms.len() != v.len() {
        return Err(Error::DimensionMismatch("field and varifold differ in length".into()));
    }
    Ok(norms)
}

/// `Σ w F(|q|)` over all atoms; unset atoms are an error.
pub fn energy(v: &DiscreteVarifold, field: EnergyField<'_>, spec: &EnergySpec) -> Result<f64> {
    spec.validate(v.m())?;
    let norms = field_norms(v, field, spec)?;
    let unset = norms.iter().filter(|q| q.is_none()).count();
    if unset > 0 {
        return Err(Error::UnsetCurvature { count: unset });
    }
    Ok(norms
        .iter()
        .zip(v.atoms())
        .map(|(q, a)| a.w * spec.value(q.unwrap()))
        .sum())
}

/// `|V| / ∫F dV`; infinite when the energy vanishes on a nonzero varifold.
pub fn isoperimetric_ratio(v: &DiscreteVarifold, field: EnergyField<'_>, spec: &EnergySpec) -> Result<f64> {
    let e = energy(v, field, spec)?;
    let mass = v.mass();
    Ok(if e > 0.0 {
        mass / e
    } else if mass > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    })
}

/// Per-vertex discrete curvature of a closed or bounded triangle mesh.
#[derive(Clone, Debug)]
pub struct MeshCurvature {
    /// Mixed Voronoi vertex areas.
    pub area: Vec<f64>,
    /// Area gradients ∇_i Area, so that H_i = -G_i / A_i.
    pub grad: Vec<Vector3<f64>>,
    /// Angle defect 2π - Σθ (π - Σθ on the boundary).
    pub defect: Vec<f64>,
    pub boundary: Vec<bool>,
}

fn triangle_data(mesh: &SimplicialMesh) -> Result<(Vec<Vector3<f64>>, Vec<[usize; 3]>)> {
    match (mesh.positions3(), mesh.triangles()) {
        (Some(p), Some(f)) => Ok((p, f)),
        _ => Err(Error::InvalidMesh("energy descent needs a triangle mesh in R^3".into())),
    }
}

/// Mixed Voronoi areas of the three corners and their derivatives,
/// `d[k][j] = ∂A_k/∂x_j`. Acute triangles use the circumcentric Voronoi
/// split, obtuse ones give half the area to the obtuse corner.
fn mixed_area_derivatives(p: &[Vector3<f64>; 3]) -> ([f64; 3], [[Vector3<f64>; 3]; 3]) {
    let area = 0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
    let ga = area_gradients(p);
    let dots: [f64; 3] = std::array::from_fn(|a| (p[(a + 1) % 3] - p[a]).dot(&(p[(a + 2) % 3] - p[a])));
    let mut vals = [0.0; 3];
    let mut d = [[Vector3::zeros(); 3]; 3];
    if let Some(obtuse) = (0..3).find(|&a| dots[a] < 0.0) {
        for k in 0..3 {
            let f = if k == obtuse { 0.5 } else { 0.25 };
            vals[k] = f * area;
            d[k] = ga.map(|g| g * f);
        }
        return (vals, d);
    }
    // cot of the angle at v and its gradient
    let cot = |v: usize| -> (f64, [Vector3<f64>; 3]) {
        let (x, y) = ((v + 1) % 3, (v + 2) % 3);
        let u = p[x] - p[v];
        let w = p[y] - p[v];
        let dd = u.dot(&w);
        let nn = 2.0 * area;
        let mut g = [Vector3::zeros(); 3];
        g[x] = w / nn;
        g[y] = u / nn;
        g[v] = -(u + w) / nn;
        for j in 0..3 {
            g[j] -= ga[j] * (2.0 * dd / (nn * nn));
        }
        (dd / nn, g)
    };
    let cots = [cot(0), cot(1), cot(2)];
    for a in 0..3 {
        let b = (a + 1) % 3;
        let c = (a + 2) % 3;
        let lab = (p[b] - p[a]).norm_squared();
        let lac = (p[c] - p[a]).norm_squared();
        vals[a] = (lab * cots[c].0 + lac * cots[b].0) / 8.0;
        for j in 0..3 {
            d[a][j] = (cots[c].1[j] * lab + cots[b].1[j] * lac) / 8.0;
        }
        d[a][a] += ((p[a] - p[b]) * cots[c].0 + (p[a] - p[c]) * cots[b].0) / 4.0;
        d[a][b] += (p[b] - p[a]) * (cots[c].0 / 4.0);
        d[a][c] += (p[c] - p[a]) * (cots[b].0 / 4.0);
    }
    (vals, d)
}

fn corner_angles(p: &[Vector3<f64>; 3]) -> [f64; 3] {
    let ang = |a: usize, b: usize, c: usize| (p[b] - p[a]).angle(&(p[c] - p[a]));
    [ang(0, 1, 2), ang(1, 2, 0), ang(2, 0, 1)]
}

pub fn mesh_curvature(mesh: &SimplicialMesh) -> Result<MeshCurvature> {
    let (pos, faces) = triangle_data(mesh)?;
    let nm = mesh.non_manifold_facets();
    if !nm.is_empty() {
        return Err(Error::NonManifold { edges: nm });
    }
    let n = pos.len();
    let per_face: Vec<([Vector3<f64>; 3], [f64; 3], [f64; 3])> = faces
        .par_iter()
        .map(|f| {
            let p = [pos[f[0]], pos[f[1]], pos[f[2]]];
            (area_gradients(&p), mixed_area_derivatives(&p).0, corner_angles(&p))
        })
        .collect();
    let boundary = mesh.boundary_vertices();
    let mut area = vec![0.0; n];
    let mut grad = vec![Vector3::zeros(); n];
    let mut angle_sum = vec![0.0; n];
    for (f, (g, a, th)) in faces.iter().zip(&per_face) {
        for k in 0..3 {
            area[f[k]] += a[k];
            grad[f[k]] += g[k];
            angle_sum[f[k]] += th[k];
        }
    }
    let defect = (0..n)
        .map(|i| if boundary[i] { PI } else { 2.0 * PI } - angle_sum[i])
        .collect();
    Ok(MeshCurvature {
        area,
        grad,
        defect,
        boundary,
    })
}

impl MeshCurvature {
    /// |q|² per vertex: |H|² for the mean form, max(0, |H|² - 2K) for the
    /// second fundamental form. Isolated vertices get 0.
    pub fn q_squared(&self, form: Form) -> Vec<f64> {
        (0..self.area.len())
            .map(|i| {
                let a = self.area[i];
                if a <= 0.0 {
                    return 0.0;
                }
                let h2 = self.grad[i].norm_squared() / (a * a);
                match form {
                    Form::Mean => h2,
                    Form::SecondFundamental => (h2 - 2.0 * self.defect[i] / a).max(0.0),
                }
            })
            .collect()
    }

    /// Mean curvature vectors H_i = -G_i / A_i.
    pub fn mean_curvature(&self) -> Vec<Vector3<f64>> {
        self.grad
            .iter()
            .zip(&self.area)
            .map(|(g, &a)| if a > 0.0 { -g / a } else { Vector3::zeros() })
            .collect()
    }
}

/// Discrete energy `Σ_i A_i F(q_i)` over interior vertices.
pub fn mesh_energy(mesh: &SimplicialMesh, spec: &EnergySpec) -> Result<f64> {
    let curv = mesh_curvature(mesh)?;
    Ok(energy_from_curvature(&curv, spec))
}

fn energy_from_curvature(curv: &MeshCurvature, spec: &EnergySpec) -> f64 {
    let q2 = curv.q_squared(spec.form);
    (0..q2.len())
        .filter(|&i| !curv.boundary[i])
        .map(|i| curv.area[i] * spec.value_sq(q2[i]))
        .sum()
}

/// `∫|q|^p` of the discrete mesh curvature over interior vertices.
pub fn mesh_lp(mesh: &SimplicialMesh, form: Form, p: f64) -> Result<f64> {
    let curv = mesh_curvature(mesh)?;
    let q2 = curv.q_squared(form);
    Ok((0..q2.len())
        .filter(|&i| !curv.boundary[i])
        .map(|i| curv.area[i] * q2[i].powf(0.5 * p))
        .sum())
}

/// Gradient of `D_U area` (U = (u_a, u_b, u_c) held fixed) with respect to
/// the three corners, i.e. `Σ_i Hess(area)_{ij} u_i` for each j.
fn area_hessian_apply(p: &[Vector3<f64>; 3], u: &[Vector3<f64>; 3]) -> [Vector3<f64>; 3] {
    let e1 = p[1] - p[0];
    let e2 = p[2] - p[0];
    let n = e1.cross(&e2);
    let nn = n.norm();
    if nn == 0.0 {
        return [Vector3::zeros(); 3];
    }
    let nh = n / nn;
    let du1 = u[1] - u[0];
    let du2 = u[2] - u[0];
    let nu = du1.cross(&e2) + e1.cross(&du2);
    let w = (nu - nh * nh.dot(&nu)) / nn;
    let g1 = 0.5 * (e2.cross(&w) + du2.cross(&nh));
    let g2 = 0.5 * (w.cross(&e1) + nh.cross(&du1));
    [-g1 - g2, g1, g2]
}

/// ∂θ_k/∂x_j for the three corner angles of a triangle.
fn angle_gradients(p: &[Vector3<f64>; 3]) -> [[Vector3<f64>; 3]; 3] {
    let mut out = [[Vector3::zeros(); 3]; 3];
    let n = (p[1] - p[0]).cross(&(p[2] - p[0]));
    let nn = n.norm();
    if nn == 0.0 {
        return out;
    }
    let nh = n / nn;
    for k in 0..3 {
        let (a, b, c) = (k, (k + 1) % 3, (k + 2) % 3);
        let u = p[b] - p[a];
        let v = p[c] - p[a];
        // the orientation of (a, b, c) is that of the face for every k
        let db = -nh.cross(&u) / u.norm_squared();
        let dc = -v.cross(&nh) / v.norm_squared();
        out[k][b] = db;
        out[k][c] = dc;
        out[k][a] = -db - dc;
    }
    out
}

/// Energy and its gradient with respect to every vertex position.
/// Boundary vertices carry no energy and get a zero gradient (pinned).
pub fn mesh_energy_gradient(mesh: &SimplicialMesh, spec: &EnergySpec) -> Result<(f64, Vec<Vector3<f64>>)> {
    let (pos, faces) = triangle_data(mesh)?;
    let curv = mesh_curvature(mesh)?;
    let n = pos.len();
    let q2 = curv.q_squared(spec.form);
    let e = energy_from_curvature(&curv, spec);

    // d(A Φ(t)) = α dA + u·dG + γ dD per vertex
    let mut alpha = vec![0.0; n];
    let mut u = vec![Vector3::zeros(); n];
    let mut gamma = vec![0.0; n];
    for i in 0..n {
        let a = curv.area[i];
        if curv.boundary[i] || a <= 0.0 {
            continue;
        }
        let t = q2[i];
        let clamped = spec.form == Form::SecondFundamental && t <= 0.0;
        if clamped {
            continue;
        }
        let phi = spec.value_sq(t);
        let dphi = spec.derivative_sq(t);
        if !dphi.is_finite() {
            return Err(Error::InvalidArgument(
                "integrand is not differentiable at q = 0".into(),
            ));
        }
        let g2 = curv.grad[i].norm_squared();
        u[i] = curv.grad[i] * (2.0 * dphi / a);
        alpha[i] = match spec.form {
            Form::Mean => phi - 2.0 * dphi * g2 / (a * a),
            Form::SecondFundamental => {
                gamma[i] = -2.0 * dphi;
                phi - 2.0 * dphi * g2 / (a * a) + 2.0 * dphi * curv.defect[i] / a
            }
        };
    }

    let contrib: Vec<[Vector3<f64>; 3]> = faces
        .par_iter()
        .map(|f| {
            let p = [pos[f[0]], pos[f[1]], pos[f[2]]];
            let (_, da) = mixed_area_derivatives(&p);
            let hu = area_hessian_apply(&p, &[u[f[0]], u[f[1]], u[f[2]]]);
            let mut out = hu;
            for k in 0..3 {
                for j in 0..3 {
                    out[j] += da[k][j] * alpha[f[k]];
                }
            }
            if spec.form == Form::SecondFundamental {
                // D_i = const - Σ θ_i
                let th = angle_gradients(&p);
                for k in 0..3 {
                    let gk = gamma[f[k]];
                    if gk != 0.0 {
                        for j in 0..3 {
                            out[j] -= th[k][j] * gk;
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut grad = vec![Vector3::zeros(); n];
    for (f, c) in faces.iter().zip(&contrib) {
        for j in 0..3 {
            grad[f[j]] += c[j];
        }
    }
    for i in 0..n {
        if curv.boundary[i] {
            grad[i] = Vector3::zeros();
        }
    }
    Ok((e, grad))
}

/// Shape gradient of the discrete energy. The optional `check` runs the
/// finite-difference validation of [`check_gradient`] first.
pub fn shape_gradient(mesh: &SimplicialMesh, spec: &EnergySpec) -> Result<Vec<Vector3<f64>>> {
    spec.validate(mesh.intrinsic_dim())?;
    Ok(mesh_energy_gradient(mesh, spec)?.1)
}

/// Largest relative disagreement found by [`check_gradient`].
#[derive(Clone, Debug, PartialEq)]
pub struct GradientCheck {
    pub max_rel_error: f64,
    pub vertices: Vec<usize>,
}

/// Relative error that counts as a pass.
pub const GRADIENT_TOL: f64 = 1e-4;
/// Relative error above which the gradient is declared wrong.
pub const GRADIENT_HARD_LIMIT: f64 = 1e-3;

/// Compares the analytic gradient with central differences (step 1e-6 ×
/// bounding diagonal) at `samples` random interior vertices. The error
/// per vertex is `|g_fd - g| / max(|g|, 1e-3 max_j |g_j|)`. Errors above
/// [`GRADIENT_HARD_LIMIT`] are returned as [`Error::GradientCheck`].
pub fn check_gradient(mesh: &SimplicialMesh, spec: &EnergySpec, samples: usize, seed: u64) -> Result<GradientCheck> {
    spec.validate(mesh.intrinsic_dim())?;
    let (_, grad) = mesh_energy_gradient(mesh, spec)?;
    let boundary = mesh.boundary_vertices();
    let interior: Vec<usize> = (0..mesh.num_vertices()).filter(|&i| !boundary[i]).collect();
    if interior.is_empty() {
        return Err(Error::InvalidMesh("no interior vertices to check".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices: Vec<usize> = (0..samples)
        .map(|_| interior[rng.random_range(0..interior.len())])
        .collect();
    let h = 1e-6 * mesh.bounding_diagonal();
    let gmax = grad.iter().map(|g| g.norm()).fold(0.0, f64::max);
    let errors: Result<Vec<f64>> = vertices
        .par_iter()
        .map(|&i| {
            let mut fd = Vector3::zeros();
            for c in 0..3 {
                let shifted = |s: f64| -> Result<f64> {
                    let mut verts = mesh.vertices().to_vec();
                    verts[i][c] += s;
                    mesh_energy(&mesh.with_vertices(verts)?, spec)
                };
                fd[c] = (shifted(h)? - shifted(-h)?) / (2.0 * h);
            }
            let denom = grad[i].norm().max(1e-3 * gmax).max(f64::MIN_POSITIVE);
            Ok((fd - grad[i]).norm() / denom)
        })
        .collect();
    let max_rel_error = errors?.into_iter().fold(0.0, f64::max);
    if max_rel_error > GRADIENT_HARD_LIMIT {
        return Err(Error::GradientCheck {
            rel_error: max_rel_error,
            limit: GRADIENT_HARD_LIMIT,
        });
    }
    Ok(GradientCheck {
        max_rel_error,
        vertices,
    })
}

/// Signed enclosed volume of a closed oriented triangle mesh.
pub fn enclosed_volume(mesh: &SimplicialMesh) -> Result<f64> {
    let (p, faces) = triangle_data(mesh)?;
    Ok(faces.iter().map(|f| p[f[0]].dot(&p[f[1]].cross(&p[f[2]])) / 6.0).sum())
}

/// `6√π V / A^{3/2}`, equal to 1 exactly for a round sphere.
pub fn sphericity(mesh: &SimplicialMesh) -> Result<f64> {
    let vol = enclosed_volume(mesh)?.abs();
    let area = mesh.total_volume();
    Ok(6.0 * PI.sqrt() * vol / area.powf(1.5))
}

/// Mesh positions as column vectors.
pub fn to_dvectors(p: &[Vector3<f64>]) -> Vec<DVector<f64>> {
    p.iter().map(|v| DVector::from_column_slice(v.as_slice())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature_tensor::analytic_sphere_field;
    use crate::first_variation::mean_curvature_mesh;
    use crate::mesh::shapes;
    use crate::varifold::{varifold_from_mesh, QuadratureRule};

    fn perturbed(mesh: &SimplicialMesh, amp: f64, seed: u64) -> SimplicialMesh {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let verts = mesh
            .vertices()
            .iter()
            .map(|x| x.map(|c| c + amp * rng.random_range(-1.0..1.0)))
            .collect();
        mesh.with_vertices(verts).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(EnergySpec::power(Form::Mean, 3.0, 1.0).validate(2).is_ok());
        assert!(matches!(
            EnergySpec::power(Form::Mean, 2.0, 1.0).validate(2),
            Err(Error::ExponentTooSmall { .. })
        ));
        assert!(EnergySpec::power(Form::Mean, 3.0, 0.0).validate(2).is_err());
        let huber = EnergySpec {
            integrand: Integrand::HuberPower { delta: 0.1 },
            ..EnergySpec::power(Form::Mean, 3.0, 1.0)
        };
        assert!(huber.validate(2).is_ok());
        let json = r#"{"form": "H", "p": 3.0, "C": 1.0}"#;
        let parsed: EnergySpec = serde_json::from_str(json).unwrap();
        assert_eq!(parsed, EnergySpec::power(Form::Mean, 3.0, 1.0));
    }

    #[test]
    fn sphere_energies() {
        let mesh = shapes::icosphere(4, 1.0);
        let v = varifold_from_mesh(&mesh, QuadratureRule::Vertex, None).unwrap();
        let h = mean_curvature_mesh(&v).unwrap();
        let spec = EnergySpec::power(Form::Mean, 3.0, 1.0);
        let e = energy(&v, EnergyField::Mean(&h), &spec).unwrap();
        assert!((e / (32.0 * PI) - 1.0).abs() < 0.05, "{e}");
        let a = analytic_sphere_field(&v, &DVector::zeros(3), 1.0);
        let spec_a = EnergySpec::power(Form::SecondFundamental, 3.0, 1.0);
        let ea = energy(&v, EnergyField::SecondFundamental(&a), &spec_a).unwrap();
        assert!((ea / (2f64.powf(1.5) * 4.0 * PI) - 1.0).abs() < 0.08, "{ea}");
        assert!(energy(&v, EnergyField::Mean(&h), &spec_a).is_err());
        let z = CurvatureField::zeros(&v);
        assert_eq!(energy(&v, EnergyField::Mean(&z), &spec).unwrap(), 0.0);
        assert_eq!(
            isoperimetric_ratio(&v, EnergyField::Mean(&z), &spec).unwrap(),
            f64::INFINITY
        );

        let me = mesh_energy(&mesh, &spec).unwrap();
        assert!((me / (32.0 * PI) - 1.0).abs() < 0.02, "{me}");
        let ma = mesh_energy(&mesh, &spec_a).unwrap();
        assert!((ma / (2f64.powf(1.5) * 4.0 * PI) - 1.0).abs() < 0.05, "{ma}");
    }

    #[test]
    fn energy_scaling_and_weight_linearity() {
        let spec = EnergySpec::power(Form::Mean, 3.0, 1.0);
        let base = mesh_energy(&shapes::icosphere(3, 1.0), &spec).unwrap();
        for lam in [0.5, 2.0] {
            let e = mesh_energy(&shapes::icosphere(3, lam), &spec).unwrap();
            assert!((e / (lam.powf(-1.0) * base) - 1.0).abs() < 0.01);
        }
        let v = varifold_from_mesh(&shapes::icosphere(3, 1.0), QuadratureRule::Vertex, None).unwrap();
        let h = mean_curvature_mesh(&v).unwrap();
        let e1 = energy(&v, EnergyField::Mean(&h), &spec).unwrap();
        let v3 = v.scale_weights(3.0).unwrap();
        let e3 = energy(&v3, EnergyField::Mean(&h), &spec).unwrap();
        assert!((e3 / e1 - 3.0).abs() < 1e-12);
        let r1 = isoperimetric_ratio(&v, EnergyField::Mean(&h), &spec).unwrap();
        let r3 = isoperimetric_ratio(&v3, EnergyField::Mean(&h), &spec).unwrap();
        assert!((r1 / r3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let meshes = [
            perturbed(&shapes::icosphere(2, 1.0), 0.03, 1),
            perturbed(&shapes::ellipsoid(2, [1.0, 0.8, 0.5]), 0.02, 2),
            perturbed(&shapes::torus(2.0, 0.7, 24, 12), 0.02, 3),
        ];
        let specs = [
            EnergySpec::power(Form::Mean, 3.0, 1.0),
            EnergySpec::power(Form::Mean, 2.5, 2.0),
            EnergySpec {
                integrand: Integrand::HuberPower { delta: 0.3 },
                ..EnergySpec::power(Form::Mean, 4.0, 1.0)
            },
            EnergySpec::power(Form::SecondFundamental, 3.0, 1.0),
        ];
        for (k, mesh) in meshes.iter().enumerate() {
            for spec in &specs {
                let chk = check_gradient(mesh, spec, 12, k as u64).unwrap();
                assert!(chk.max_rel_error < GRADIENT_TOL, "{spec:?} {}", chk.max_rel_error);
            }
        }
    }

    #[test]
    fn inflation_lowers_energy() {
        let mesh = shapes::icosphere(3, 0.5);
        let spec = EnergySpec::power(Form::Mean, 3.0, 1.0);
        let g = shape_gradient(&mesh, &spec).unwrap();
        let pos = mesh.positions3().unwrap();
        let radial: Vec<f64> = pos.iter().zip(&g).map(|(x, gi)| gi.dot(x) / x.norm()).collect();
        // dE/dr < 0 everywhere: descent pushes outward
        assert!(radial.iter().all(|&r| r < 0.0));
    }

    #[test]
    fn flat_patch_is_critical() {
        let mesh = shapes::flat_grid(9, 0.1);
        let spec = EnergySpec::power(Form::Mean, 3.0, 1.0);
        let g = shape_gradient(&mesh, &spec).unwrap();
        assert!(g.iter().all(|g| g.norm() < 1e-12));
    }

    #[test]
    fn sphericity_of_shapes() {
        let s = sphericity(&shapes::icosphere(4, 2.0)).unwrap();
        assert!(s > 0.99 && s <= 1.0);
        let e = sphericity(&shapes::ellipsoid(4, [1.0, 1.0, 0.5])).unwrap();
        assert!(e < 0.95);
        assert!((enclosed_volume(&shapes::icosphere(5, 1.0)).unwrap() - 4.0 * PI / 3.0).abs() < 0.01);
    }
}
