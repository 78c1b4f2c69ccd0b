//! Constrained minimization of the discrete curvature energy over vertex
//! positions, with non-degeneracy and convergence monitors.

use std::collections::BTreeSet;
use std::io::Write;

use nalgebra::{DVector, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientManifold, CompactSubset};
use crate::curvature_tensor::TestScalarDictionary;
use crate::energy::{mesh_energy, mesh_energy_gradient, mesh_lp, to_dvectors, EnergySpec, Form};
use crate::error::{Error, Result};
use crate::first_variation::CurvatureField;
use crate::mesh::remesh::{delaunay_flips, min_quality, FlipOptions};
use crate::mesh::SimplicialMesh;
use crate::monotonicity::{diameter_lower_constant, mass_lower_constant};
use crate::varifold::{varifold_from_mesh, DiscreteVarifold, Metric, QuadratureRule};

/// Constants of the uniform lower bounds on diameter and mass.
///
/// The curvature of N enters through `C_N = sup |P_jk ∂Q_ij/∂x_k|` (m/r
/// for a sphere of radius r, 0 in R^S). Bounding |H^{R^S}| by
/// `|H^N| + C_N` (mean form) or `2S|A| + C_N` (second fundamental form) and
/// using `(a + b)^p ≤ 2^{p-1}(a^p + b^p)` gives
/// `∫|H^{R^S}|^p ≤ C_{N,p} (|V| + ∫|q|^p)` with
/// `C_{N,p} = 2^{p-1} max(1, C_N^p)` or `2^{p-1} max((2S)^p, C_N^p)`.
/// Feeding that into the lower diameter and mass bounds gives
/// `d ≥ 1 / (C_i (|V| + ∫|q|^p)^{1/(p-m)})` with `C_i = C₅ C_{N,p}^{1/(p-m)}` and
/// `C_ii |V| (|V| + ∫|q|^p)^{m/(p-m)} ≥ 1` with `C_ii = C₆ C_{N,p}^{m/(p-m)}`;
/// `constant` is the larger of the two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonDegeneracyConstants {
    pub p: f64,
    pub m: usize,
    pub c_ambient: f64,
    pub c_np: f64,
    pub c_diameter: f64,
    pub c_mass: f64,
    pub constant: f64,
}

impl NonDegeneracyConstants {
    pub fn new(form: Form, p: f64, m: usize, s: usize, ambient: &AmbientManifold) -> Result<Self> {
        let c_ambient = m as f64 * ambient.curvature_bound();
        let base = match form {
            Form::Mean => 1.0f64,
            Form::SecondFundamental => (2.0 * s as f64).powf(p),
        };
        let c_np = 2f64.powf(p - 1.0) * base.max(c_ambient.powf(p));
        let mf = m as f64;
        let c_diameter = diameter_lower_constant(p, m)? * c_np.powf(1.0 / (p - mf));
        let c_mass = mass_lower_constant(p, m)? * c_np.powf(mf / (p - mf));
        Ok(Self {
            p,
            m,
            c_ambient,
            c_np,
            c_diameter,
            c_mass,
            constant: c_diameter.max(c_mass),
        })
    }
}

/// Lower bounds at one iterate and whether they hold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorRecord {
    pub diameter_lower: f64,
    pub mass_lower: f64,
    pub diameter_ok: bool,
    pub mass_ok: bool,
}

impl MonitorRecord {
    pub fn ok(&self) -> bool {
        self.diameter_ok && self.mass_ok
    }
}

/// Evaluates both uniform lower bounds with the single tracked constant.
/// A failure means the discretization or the curvature estimate is broken,
/// since the bounds are theorems.
pub fn nondegeneracy_monitor(mass: f64, diameter: f64, lp: f64, consts: &NonDegeneracyConstants) -> MonitorRecord {
    let mf = consts.m as f64;
    let total = mass + lp;
    let e = consts.p - mf;
    let diameter_lower = 1.0 / (consts.constant * total.powf(1.0 / e));
    let mass_lower = 1.0 / (consts.constant * total.powf(mf / e));
    MonitorRecord {
        diameter_lower,
        mass_lower,
        diameter_ok: diameter >= diameter_lower,
        mass_ok: mass >= mass_lower,
    }
}

/// Scalar and vector test functions for the weak-convergence surrogate.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakDictionary {
    pub dict: TestScalarDictionary,
    pub centers: Vec<DVector<f64>>,
}

impl WeakDictionary {
    /// Bumps of radius `scale` at the origin and at `±scale e_i`, each
    /// with the standard Grassmannian polynomials.
    pub fn shipped(s: usize, scale: f64) -> Self {
        let mut centers = vec![DVector::zeros(s)];
        for i in 0..s {
            for sign in [1.0, -1.0] {
                let mut c = DVector::zeros(s);
                c[i] = sign * scale;
                centers.push(c);
            }
        }
        Self {
            dict: TestScalarDictionary::standard(s, scale),
            centers,
        }
    }

    fn integrals(&self, v: &DiscreteVarifold, field: Option<&CurvatureField>) -> Vec<f64> {
        let s = v.s();
        let per_center: Vec<Vec<f64>> = self
            .centers
            .par_iter()
            .map(|c| {
                let width = if field.is_some() { s } else { 1 };
                let mut acc = vec![0.0; self.dict.len() * width];
                for k in v.atoms_within(c, self.dict.eps) {
                    let a = &v.atoms()[k];
                    let eta = self.dict.bump(&a.x, c).0;
                    for (t, term) in self.dict.terms.iter().enumerate() {
                        let phi = a.w * eta * term.eval(a.p.matrix());
                        match field.and_then(|f| f.h[k].as_ref()) {
                            Some(h) => {
                                for i in 0..s {
                                    acc[t * s + i] += phi * h[i];
                                }
                            }
                            None if field.is_none() => acc[t] += phi,
                            None => {}
                        }
                    }
                }
                acc
            })
            .collect();
        per_center.concat()
    }
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &DiscreteVarifold, b: &DiscreteVarifold) -> f64 {
    let one_way = |from: &DiscreteVarifold, to: &DiscreteVarifold| -> f64 {
        let tree = to.index();
        from.atoms()
            .par_iter()
            .map(|at| tree.nearest(at.x.as_slice()).map_or(f64::INFINITY, |(_, d)| d))
            .collect::<Vec<f64>>()
            .into_iter()
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub hausdorff: f64,
    /// `max |∫φ dV_k - ∫φ dV_{k+1}|` over the dictionary.
    pub weak_measure: f64,
    /// `max |∫⟨f_k, φ e_i⟩ dV_k - ∫⟨f_{k+1}, φ e_i⟩ dV_{k+1}|`, when fields
    /// are supplied.
    pub weak_pair: Option<f64>,
}

pub fn convergence_monitor(
    vk: &DiscreteVarifold,
    vk1: &DiscreteVarifold,
    fields: Option<(&CurvatureField, &CurvatureField)>,
    dict: &WeakDictionary,
) -> Result<ConvergenceRecord> {
    if vk.s() != vk1.s() || vk.m() != vk1.m() {
        return Err(Error::DimensionMismatch("varifolds differ in S or m".into()));
    }
    let max_diff = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let weak_measure = max_diff(dict.integrals(vk, None), dict.integrals(vk1, None));
    let weak_pair = match fields {
        Some((fk, fk1)) => {
            if fk.len() != vk.len() || fk1.len() != vk1.len() {
                return Err(Error::DimensionMismatch("field and varifold differ in length".into()));
            }
            Some(max_diff(dict.integrals(vk, Some(fk)), dict.integrals(vk1, Some(fk1))))
        }
        None => None,
    };
    Ok(ConvergenceRecord {
        hausdorff: hausdorff(vk, vk1),
        weak_measure,
        weak_pair,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    /// Stop when the sup-norm of the feasible gradient falls below
    /// `tol × energy / diameter`.
    pub tol: f64,
    /// Stop when the relative energy decrease stays below this for
    /// `patience` consecutive steps.
    pub ftol: f64,
    pub patience: usize,
    /// Smoothing weight of the `(I + τL)^{-2}` preconditioner (L is the
    /// graph Laplacian).
    pub tau: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
    /// Delaunay edge flips after each step, kept only when they lower the
    /// energy and change the mass by less than 0.1%.
    pub remesh: bool,
    /// Abort when the worst triangle quality 2r/R drops below this.
    pub min_quality: f64,
    /// Radius of the weak-convergence test bumps; defaults to the support
    /// radius of the initial mesh.
    pub dictionary_scale: Option<f64>,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            tol: 1e-6,
            ftol: 1e-12,
            patience: 25,
            tau: 4.0,
            armijo: 1e-4,
            max_backtracks: 40,
            remesh: true,
            min_quality: 0.05,
            dictionary_scale: None,
        }
    }
}

/// One accepted iterate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub energy: f64,
    pub mass: f64,
    pub diameter: f64,
    /// `∫|q|^p` entering the lower bounds.
    pub lp: f64,
    pub monitor: MonitorRecord,
    pub convergence: ConvergenceRecord,
    pub step: f64,
    pub grad_norm: f64,
    pub projections: usize,
    pub flips: usize,
    pub quality: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    /// Energy decrease stayed below `ftol`.
    Stalled,
    /// Line search found no decrease.
    LineSearchFailed,
    MaxIterations,
    Aborted(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentTrace {
    pub constants: NonDegeneracyConstants,
    pub records: Vec<TraceRecord>,
    pub stop: StopReason,
}

impl DescentTrace {
    pub fn monitors_ok(&self) -> bool {
        self.records.iter().all(|r| r.monitor.ok())
    }

    pub fn energy_monotone(&self) -> bool {
        self.records.windows(2).all(|w| w[1].energy <= w[0].energy)
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("trace holds the initial state")
    }

    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{TRACE_HEADER}")?;
        for r in &self.records {
            writeln!(out, "{}", r.trace_row())?;
        }
        Ok(())
    }

    pub fn write_monitors_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{MONITORS_HEADER}")?;
        for r in &self.records {
            writeln!(out, "{}", r.monitors_row())?;
        }
        Ok(())
    }
}

pub const TRACE_HEADER: &str = "iter,energy,mass,diameter,step,grad_norm,projections,flips,quality";
pub const MONITORS_HEADER: &str = "iter,lp,diameter_lower,mass_lower,diameter_ok,mass_ok,hausdorff,weak_measure";

impl TraceRecord {
    pub fn trace_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e}",
            self.iter,
            self.energy,
            self.mass,
            self.diameter,
            self.step,
            self.grad_norm,
            self.projections,
            self.flips,
            self.quality
        )
    }

    pub fn monitors_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{:.16e}",
            self.iter,
            self.lp,
            self.monitor.diameter_lower,
            self.monitor.mass_lower,
            self.monitor.diameter_ok,
            self.monitor.mass_ok,
            self.convergence.hausdorff,
            self.convergence.weak_measure
        )
    }
}

#[derive(Clone, Debug)]
pub struct MinimizeOutcome {
    pub trace: DescentTrace,
    pub mesh: SimplicialMesh,
}

impl MinimizeOutcome {
    pub fn aborted(&self) -> bool {
        matches!(self.trace.stop, StopReason::Aborted(_))
    }
}

fn adjacency(n: usize, faces: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut sets = vec![BTreeSet::new(); n];
    for f in faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            sets[a].insert(b);
            sets[b].insert(a);
        }
    }
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Solves `(I + τL) x = b` by conjugate gradients (L = graph Laplacian).
fn smooth_solve(adj: &[Vec<usize>], tau: f64, b: &[f64]) -> Vec<f64> {
    let apply = |x: &[f64]| -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let lx: f64 = adj[i].iter().map(|&j| x[i] - x[j]).sum();
                x[i] + tau * lx
            })
            .collect()
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; b.len()];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let stop = 1e-24 * rr;
    for _ in 0..1000 {
        if rr <= stop || rr == 0.0 {
            break;
        }
        let ap = apply(&p);
        let alpha = rr / dot(&p, &ap);
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..p.len() {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    x
}

fn vertex_normals(pos: &[Vector3<f64>], faces: &[[usize; 3]]) -> Vec<Vector3<f64>> {
    let mut n = vec![Vector3::zeros(); pos.len()];
    for f in faces {
        let fn_ = (pos[f[1]] - pos[f[0]]).cross(&(pos[f[2]] - pos[f[0]]));
        for &v in f {
            n[v] += fn_;
        }
    }
    n.into_iter()
        .map(|v| {
            let l = v.norm();
            if l > 0.0 {
                v / l
            } else {
                v
            }
        })
        .collect()
}

fn normal_gradient(
    pos: &[Vector3<f64>],
    faces: &[[usize; 3]],
    boundary: &[bool],
    grad: &[Vector3<f64>],
) -> (Vec<Vector3<f64>>, Vec<Vector3<f64>>) {
    let normals = vertex_normals(pos, faces);
    let ng = (0..pos.len())
        .map(|i| {
            if boundary[i] {
                Vector3::zeros()
            } else {
                normals[i] * normals[i].dot(&grad[i])
            }
        })
        .collect();
    (normals, ng)
}

/// Sup-norm of the normal gradient after removing the components the
/// constraint blocks, measured by projecting a tiny descent step.
fn feasible_norm(subset: &CompactSubset, pos: &[Vector3<f64>], ng: &[Vector3<f64>], diameter: f64) -> f64 {
    let gmax = ng.iter().map(|g| g.norm()).fold(0.0, f64::max);
    if gmax == 0.0 {
        return 0.0;
    }
    let probe = 1e-6 * diameter / gmax;
    (0..pos.len())
        .map(|i| {
            let x = DVector::from_column_slice(pos[i].as_slice());
            let t = DVector::from_column_slice((pos[i] - ng[i] * probe).as_slice());
            (subset.project(&t) - x).norm() / probe
        })
        .fold(0.0, f64::max)
}

fn mesh_from(template: &SimplicialMesh, pos: &[Vector3<f64>]) -> Result<SimplicialMesh> {
    template.with_vertices(to_dvectors(pos))
}

fn project_all(subset: &CompactSubset, pos: &[Vector3<f64>]) -> (Vec<Vector3<f64>>, usize) {
    let mut count = 0;
    let out = pos
        .iter()
        .map(|x| {
            let d = DVector::from_column_slice(x.as_slice());
            let p = subset.project(&d);
            if p != d {
                count += 1;
            }
            Vector3::new(p[0], p[1], p[2])
        })
        .collect();
    (out, count)
}

struct Observation {
    varifold: DiscreteVarifold,
    mass: f64,
    diameter: f64,
    lp: f64,
}

fn observe(mesh: &SimplicialMesh, spec: &EnergySpec) -> Result<Observation> {
    let varifold = varifold_from_mesh(mesh, QuadratureRule::Vertex, None)?.without_provenance();
    let diameter = varifold.support_diameter(Metric::Euclidean)?;
    Ok(Observation {
        mass: mesh.total_volume(),
        diameter,
        lp: mesh_lp(mesh, spec.form, spec.p)?,
        varifold,
    })
}

/// Checks the run preconditions: closed-or-bounded triangle mesh in R³,
/// valid energy and a compact subset of R³ with interior containing the
/// initial vertices.
pub fn check_feasible(mesh: &SimplicialMesh, spec: &EnergySpec, subset: &CompactSubset) -> Result<()> {
    if mesh.intrinsic_dim() != 2 || mesh.ambient_dim() != 3 {
        return Err(Error::InvalidMesh("minimization runs on triangle meshes in R^3".into()));
    }
    spec.validate(2)?;
    subset.validate()?;
    if matches!(subset, CompactSubset::Tube { .. }) {
        return Err(Error::InvalidArgument(
            "minimization supports ball and shell subsets of R^3".into(),
        ));
    }
    if !subset.has_interior() {
        return Err(Error::InvalidArgument("subset has empty interior".into()));
    }
    if let Some((i, _)) = mesh
        .vertices()
        .iter()
        .enumerate()
        .find(|(_, x)| !subset.contains(x, 1e-12))
    {
        return Err(Error::InvalidArgument(format!(
            "initial vertex {i} lies outside the constraint set"
        )));
    }
    let nm = mesh.non_manifold_facets();
    if !nm.is_empty() {
        return Err(Error::NonManifold { edges: nm });
    }
    Ok(())
}

pub fn minimize(
    mesh0: &SimplicialMesh,
    spec: &EnergySpec,
    subset: &CompactSubset,
    opts: &MinimizeOptions,
) -> Result<MinimizeOutcome> {
    minimize_with(mesh0, spec, subset, opts, |_| {})
}

/// Projected, preconditioned line-search descent. Every accepted step
/// lowers the energy; `on_step` sees each record as it is appended.
///
/// The direction is `-N M^{-2} N g` with N the per-vertex normal projector
/// and `M = I + τL`, which is a descent direction because `M^{-2}` is
/// positive definite. Trial points are projected onto the subset and
/// accepted under the Armijo condition measured on the projected step.
pub fn minimize_with(
    mesh0: &SimplicialMesh,
    spec: &EnergySpec,
    subset: &CompactSubset,
    opts: &MinimizeOptions,
    mut on_step: impl FnMut(&TraceRecord),
) -> Result<MinimizeOutcome> {
    check_feasible(mesh0, spec, subset)?;
    let constants = NonDegeneracyConstants::new(spec.form, spec.p, 2, 3, &AmbientManifold::euclidean(3))?;
    let mut mesh = mesh0.clone();
    let mut pos = mesh.positions3().unwrap();
    let mut faces = mesh.triangles().unwrap();
    let mut adj = adjacency(pos.len(), &faces);
    let boundary = mesh.boundary_vertices();

    let mut obs = observe(&mesh, spec)?;
    let scale = opts.dictionary_scale.unwrap_or(0.5 * obs.diameter);
    let dict = WeakDictionary::shipped(3, scale);
    let (mut energy, mut grad) = mesh_energy_gradient(&mesh, spec)?;
    let grad_norm = feasible_norm(
        subset,
        &pos,
        &normal_gradient(&pos, &faces, &boundary, &grad).1,
        obs.diameter,
    );
    let mut records = vec![TraceRecord {
        iter: 0,
        energy,
        mass: obs.mass,
        diameter: obs.diameter,
        lp: obs.lp,
        monitor: nondegeneracy_monitor(obs.mass, obs.diameter, obs.lp, &constants),
        convergence: ConvergenceRecord {
            hausdorff: 0.0,
            weak_measure: 0.0,
            weak_pair: None,
        },
        step: 0.0,
        grad_norm,
        projections: 0,
        flips: 0,
        quality: min_quality(&mesh),
    }];
    on_step(&records[0]);

    let mut step: f64 = 1.0;
    let mut quiet = 0;
    let mut stop = StopReason::MaxIterations;
    for iter in 1..=opts.max_iter {
        let grad_norm = records.last().unwrap().grad_norm;
        if grad_norm < opts.tol * energy / obs.diameter {
            stop = StopReason::Converged;
            break;
        }
        let (normals, ng) = normal_gradient(&pos, &faces, &boundary, &grad);

        let mut dir = vec![Vector3::zeros(); pos.len()];
        for c in 0..3 {
            let b: Vec<f64> = ng.iter().map(|g| g[c]).collect();
            let y = smooth_solve(&adj, opts.tau, &smooth_solve(&adj, opts.tau, &b));
            for i in 0..pos.len() {
                dir[i][c] = y[i];
            }
        }
        for i in 0..pos.len() {
            dir[i] = if boundary[i] {
                Vector3::zeros()
            } else {
                -normals[i] * normals[i].dot(&dir[i])
            };
        }
        let dmax = dir.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if dmax == 0.0 {
            stop = StopReason::Converged;
            break;
        }
        // never move a vertex by more than a quarter of the mean edge
        let cap = 0.25 * mesh.mean_edge_length() / dmax;
        step = (2.0 * step).min(cap);

        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let trial: Vec<Vector3<f64>> = pos.iter().zip(&dir).map(|(x, d)| x + d * step).collect();
            let (trial, projections) = project_all(subset, &trial);
            let trial_mesh = mesh_from(&mesh, &trial)?;
            let descent: f64 = (0..pos.len()).map(|i| grad[i].dot(&(trial[i] - pos[i]))).sum();
            if descent < 0.0 {
                if let Ok(e) = mesh_energy(&trial_mesh, spec) {
                    if e.is_finite() && e <= energy + opts.armijo * descent {
                        accepted = Some((trial, trial_mesh, e, projections));
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        let Some((new_pos, mut new_mesh, mut new_energy, projections)) = accepted else {
            stop = StopReason::LineSearchFailed;
            break;
        };

        let mut flips = 0;
        if opts.remesh {
            if let Ok((flipped, log)) = delaunay_flips(&new_mesh, &FlipOptions::default()) {
                if log.flips > 0 {
                    let before = new_mesh.total_volume();
                    let mass_change = (flipped.total_volume() - before).abs() / before;
                    if let (Ok(e), true) = (mesh_energy(&flipped, spec), mass_change < 1e-3) {
                        if e <= new_energy {
                            new_mesh = flipped;
                            new_energy = e;
                            flips = log.flips;
                        }
                    }
                }
            }
        }
        let quality = min_quality(&new_mesh);
        let prev = std::mem::replace(&mut obs, observe(&new_mesh, spec)?);
        let convergence = convergence_monitor(&prev.varifold, &obs.varifold, None, &dict)?;
        let rel = (energy - new_energy) / energy.abs().max(f64::MIN_POSITIVE);
        mesh = new_mesh;
        pos = new_pos;
        if flips > 0 {
            faces = mesh.triangles().unwrap();
            adj = adjacency(pos.len(), &faces);
        }
        let (e, g) = mesh_energy_gradient(&mesh, spec)?;
        energy = e;
        grad = g;
        records.push(TraceRecord {
            iter,
            energy,
            mass: obs.mass,
            diameter: obs.diameter,
            lp: obs.lp,
            monitor: nondegeneracy_monitor(obs.mass, obs.diameter, obs.lp, &constants),
            convergence,
            step,
            grad_norm: feasible_norm(
                subset,
                &pos,
                &normal_gradient(&pos, &faces, &boundary, &grad).1,
                obs.diameter,
            ),
            projections,
            flips,
            quality,
        });
        on_step(records.last().unwrap());

        if quality < opts.min_quality {
            stop = StopReason::Aborted(format!(
                "triangle quality {quality:.3e} fell below {:.3e}",
                opts.min_quality
            ));
            break;
        }
        quiet = if rel < opts.ftol { quiet + 1 } else { 0 };
        if quiet >= opts.patience {
            stop = StopReason::Stalled;
            break;
        }
    }
    Ok(MinimizeOutcome {
        trace: DescentTrace {
            constants,
            records,
            stop,
        },
        mesh,
    })
}
