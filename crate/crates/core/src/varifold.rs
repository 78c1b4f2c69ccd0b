//! Discrete integral varifolds: finite families of weighted atoms `(x, P, w)`.

use std::io::{BufRead, Write};
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{bundle_defect, AmbientManifold, BUNDLE_TOL, ON_MANIFOLD_TOL};
use crate::error::{Error, Result};
use crate::linalg::PlaneProjector;
use crate::mesh::SimplicialMesh;
use crate::spatial::KdTree;

/// Placement of atoms inside each simplex. All rules put total weight
/// `multiplicity × volume` on the simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureRule {
    /// One atom at the barycenter.
    Centroid,
    /// One atom per vertex, equal weights.
    Vertex,
    /// The symmetric m+1 point rule exact for quadratics.
    Degree2,
}

impl QuadratureRule {
    /// Barycentric coordinates of the nodes; weights are equal.
    pub fn nodes(self, m: usize) -> Vec<Vec<f64>> {
        let k = m + 1;
        match self {
            Self::Centroid => vec![vec![1.0 / k as f64; k]],
            Self::Vertex => (0..k)
                .map(|a| (0..k).map(|b| if a == b { 1.0 } else { 0.0 }).collect())
                .collect(),
            Self::Degree2 => {
                let mf = m as f64;
                let b = (mf + 2.0 - (mf + 2.0).sqrt()) / ((mf + 1.0) * (mf + 2.0));
                let a = 1.0 - mf * b;
                (0..k)
                    .map(|i| (0..k).map(|j| if i == j { a } else { b }).collect())
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarifoldAtom {
    pub x: DVector<f64>,
    pub p: PlaneProjector,
    pub w: f64,
}

/// Where each atom came from in a source mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshProvenance {
    pub mesh: SimplicialMesh,
    pub rule: QuadratureRule,
    pub multiplicity: Vec<u32>,
    /// Per atom: owning simplex.
    pub simplex: Vec<usize>,
    /// Per atom: barycentric coordinates within its simplex.
    pub barycentric: Vec<Vec<f64>>,
}

/// Distance used by [`DiscreteVarifold::support_diameter`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    Geodesic,
}

#[derive(Clone, Debug)]
pub struct DiscreteVarifold {
    atoms: Vec<VarifoldAtom>,
    m: usize,
    s: usize,
    ambient: Option<AmbientManifold>,
    provenance: Option<Arc<MeshProvenance>>,
    index: OnceLock<Arc<KdTree>>,
}

impl PartialEq for DiscreteVarifold {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && self.m == other.m && self.ambient == other.ambient
    }
}

impl DiscreteVarifold {
    pub fn new(atoms: Vec<VarifoldAtom>, m: usize) -> Result<Self> {
        let s = atoms
            .first()
            .map(|a| a.x.len())
            .ok_or_else(|| Error::InvalidVarifold("no atoms".into()))?;
        if m == 0 || m >= s {
            return Err(Error::InvalidVarifold(format!("need 1 ≤ m < S, got m = {m}, S = {s}")));
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.x.len() != s || a.p.ambient_dim() != s {
                return Err(Error::DimensionMismatch(format!("atom {i} is not in R^{s}")));
            }
            if a.p.rank() != m {
                return Err(Error::InvalidVarifold(format!(
                    "atom {i} has a rank-{} plane, expected {m}",
                    a.p.rank()
                )));
            }
            if !(a.w > 0.0 && a.w.is_finite()) {
                return Err(Error::InvalidVarifold(format!("atom {i} has weight {}", a.w)));
            }
            if a.x.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidVarifold(format!("atom {i} has a non-finite point")));
            }
        }
        Ok(Self {
            atoms,
            m,
            s,
            ambient: None,
            provenance: None,
            index: OnceLock::new(),
        })
    }

    pub fn atoms(&self) -> &[VarifoldAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Intrinsic dimension m.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Embedding dimension S.
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn ambient(&self) -> Option<&AmbientManifold> {
        self.ambient.as_ref()
    }

    pub fn provenance(&self) -> Option<&MeshProvenance> {
        self.provenance.as_deref()
    }

    /// Ambient or R^S when none is attached.
    pub fn ambient_or_euclidean(&self) -> AmbientManifold {
        self.ambient.clone().unwrap_or(AmbientManifold::euclidean(self.s))
    }

    fn check_ambient_dim(&self, ambient: &AmbientManifold) -> Result<()> {
        ambient.validate()?;
        if ambient.embedding_dim() != self.s {
            return Err(Error::DimensionMismatch(format!(
                "ambient lives in R^{}, varifold in R^{}",
                ambient.embedding_dim(),
                self.s
            )));
        }
        if ambient.dim() < self.m {
            return Err(Error::DimensionMismatch(format!(
                "ambient dimension {} below varifold dimension {}",
                ambient.dim(),
                self.m
            )));
        }
        Ok(())
    }

    /// Attaches an ambient after checking every atom lies on it and its
    /// plane is tangent to it.
    pub fn with_ambient(mut self, ambient: AmbientManifold) -> Result<Self> {
        self.check_ambient_dim(&ambient)?;
        for a in &self.atoms {
            let d = ambient.distance(&a.x);
            if d > ON_MANIFOLD_TOL {
                return Err(Error::OffManifold {
                    distance: d,
                    tolerance: ON_MANIFOLD_TOL,
                });
            }
            let q = ambient.tangent_projector_unchecked(&a.x);
            let defect = bundle_defect(a.p.matrix(), &q);
            if defect > BUNDLE_TOL {
                return Err(Error::BundleConstraint { defect });
            }
        }
        self.ambient = Some(ambient);
        Ok(self)
    }

    /// Attaches an ambient, first moving every atom to its closest point on
    /// N̄ and replacing its plane by the nearest m-plane inside `T_x N̄`.
    /// Weights and mesh provenance are kept.
    pub fn conform_to_ambient(mut self, ambient: AmbientManifold) -> Result<Self> {
        self.check_ambient_dim(&ambient)?;
        let m = self.m;
        let atoms: Result<Vec<VarifoldAtom>> = self
            .atoms
            .par_iter()
            .map(|a| {
                let x = ambient.project(&a.x);
                let q = ambient.tangent_projector_unchecked(&x);
                let p = if bundle_defect(a.p.matrix(), &q) <= 1e-14 {
                    a.p.clone()
                } else {
                    PlaneProjector::nearest(&(&q * a.p.matrix() * &q), m)?
                };
                Ok(VarifoldAtom { x, p, w: a.w })
            })
            .collect();
        self.atoms = atoms?;
        self.index = OnceLock::new();
        self.ambient = Some(ambient);
        Ok(self)
    }

    pub fn without_ambient(mut self) -> Self {
        self.ambient = None;
        self
    }

    fn with_provenance(mut self, prov: MeshProvenance) -> Self {
        self.provenance = Some(Arc::new(prov));
        self
    }

    /// Drops the source-mesh link (e.g. after editing atoms).
    pub fn without_provenance(mut self) -> Self {
        self.provenance = None;
        self
    }

    /// Total mass Σ w.
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// Shared spatial index over atom points (built on first use).
    pub fn index(&self) -> &KdTree {
        self.index
            .get_or_init(|| Arc::new(KdTree::build(self.s, self.atoms.iter().map(|a| a.x.as_slice()))))
    }

    /// Indices of atoms with `|x - x0| < radius`, ascending.
    pub fn atoms_within(&self, x0: &DVector<f64>, radius: f64) -> Vec<usize> {
        self.index().within(x0.as_slice(), radius)
    }

    /// μ(B_ρ(x0)) over the open ball.
    pub fn ball_mass(&self, x0: &DVector<f64>, rho: f64) -> f64 {
        self.atoms_within(x0, rho).into_iter().map(|i| self.atoms[i].w).sum()
    }

    /// Distinct atom points (exact duplicates removed), in first-seen order.
    pub fn distinct_points(&self) -> Vec<DVector<f64>> {
        let mut keyed: Vec<(Vec<u64>, usize)> = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.x.iter().map(|c| c.to_bits()).collect(), i))
            .collect();
        keyed.sort();
        keyed.dedup_by(|a, b| a.0 == b.0);
        let mut idx: Vec<usize> = keyed.into_iter().map(|(_, i)| i).collect();
        idx.sort_unstable();
        idx.into_iter().map(|i| self.atoms[i].x.clone()).collect()
    }

    /// Largest pairwise distance between atom points.
    pub fn support_diameter(&self, metric: Metric) -> Result<f64> {
        let amb = match metric {
            Metric::Euclidean => None,
            Metric::Geodesic => Some(self.ambient.as_ref().ok_or(Error::NoAmbient)?),
        };
        let pts = self.distinct_points();
        let best: Vec<f64> = (0..pts.len())
            .into_par_iter()
            .map(|i| {
                let mut d = 0.0f64;
                for j in (i + 1)..pts.len() {
                    let e = match amb {
                        None => (&pts[i] - &pts[j]).norm(),
                        Some(a) => a.geodesic_distance(&pts[i], &pts[j]),
                    };
                    d = d.max(e);
                }
                d
            })
            .collect();
        Ok(best.into_iter().fold(0.0, f64::max))
    }

    /// Distance from each atom to its nearest atom at a different point.
    pub fn nearest_distances(&self) -> Vec<f64> {
        let tree = self.index();
        self.atoms
            .par_iter()
            .map(|a| {
                tree.nearest_beyond(a.x.as_slice(), 0.0)
                    .map(|(_, d)| d)
                    .unwrap_or(f64::INFINITY)
            })
            .collect()
    }

    /// Median nearest-neighbour spacing (coincident atoms ignored).
    pub fn median_spacing(&self) -> f64 {
        let mut d: Vec<f64> = self.nearest_distances().into_iter().filter(|d| d.is_finite()).collect();
        if d.is_empty() {
            return 0.0;
        }
        d.sort_by(f64::total_cmp);
        d[d.len() / 2]
    }

    /// Twice the largest nearest-neighbour spacing: links every atom of a
    /// quasi-uniform sample to its neighbours.
    pub fn default_link_radius(&self) -> f64 {
        2.0 * self
            .nearest_distances()
            .into_iter()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }

    /// Sub-varifold on the given atom indices (provenance dropped).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut out = Self::new(indices.iter().map(|&i| self.atoms[i].clone()).collect(), self.m)?;
        out.ambient = self.ambient.clone();
        Ok(out)
    }

    /// Atom index groups of the graph joining atoms closer than
    /// `link_radius`, ordered by smallest member.
    pub fn component_indices(&self, link_radius: f64) -> Vec<Vec<usize>> {
        let n = self.atoms.len();
        let neighbours: Vec<Vec<usize>> = self
            .atoms
            .par_iter()
            .map(|a| self.atoms_within(&a.x, link_radius))
            .collect();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (i, nb) in neighbours.iter().enumerate() {
            for &j in nb {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Splits into connected pieces; see [`Self::component_indices`].
    pub fn connected_components(&self, link_radius: f64) -> Result<Vec<Self>> {
        if !(link_radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "link radius {link_radius} must be positive"
            )));
        }
        self.component_indices(link_radius)
            .iter()
            .map(|g| self.subset(g))
            .collect()
    }

    /// Atom-list concatenation V₁ ⊎ V₂.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if other.m != self.m || other.s != self.s {
            return Err(Error::DimensionMismatch("varifolds differ in m or S".into()));
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let mut out = Self::new(atoms, self.m)?;
        if self.ambient == other.ambient {
            out.ambient = self.ambient.clone();
        }
        Ok(out)
    }

    /// Multiplies every weight by `lambda` (θ → λθ).
    pub fn scale_weights(&self, lambda: f64) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| VarifoldAtom {
                w: a.w * lambda,
                ..a.clone()
            })
            .collect();
        let mut out = Self::new(atoms, self.m)?;
        out.ambient = self.ambient.clone();
        out.provenance = self.provenance.clone();
        Ok(out)
    }

    /// Rigid motion `x → R x + t`, `P → R P Rᵀ`. The mesh provenance moves
    /// along; the ambient is dropped (it is not transformed).
    pub fn transformed(&self, rotation: &DMatrix<f64>, shift: &DVector<f64>) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| VarifoldAtom {
                x: rotation * &a.x + shift,
                p: a.p.rotated(rotation),
                w: a.w,
            })
            .collect();
        let mut out = Self::new(atoms, self.m)?;
        if let Some(prov) = &self.provenance {
            let mut prov = (**prov).clone();
            prov.mesh = prov.mesh.map_vertices(|v| rotation * v + shift)?;
            out.provenance = Some(Arc::new(prov));
        }
        Ok(out)
    }

    /// Dilation `x → λ x` with weights scaled by λ^m (the push-forward of
    /// the surface measure).
    pub fn dilated(&self, lambda: f64) -> Result<Self> {
        let f = lambda.powi(self.m as i32);
        let atoms = self
            .atoms
            .iter()
            .map(|a| VarifoldAtom {
                x: &a.x * lambda,
                p: a.p.clone(),
                w: a.w * f,
            })
            .collect();
        let mut out = Self::new(atoms, self.m)?;
        if let Some(prov) = &self.provenance {
            let mut prov = (**prov).clone();
            prov.mesh = prov.mesh.map_vertices(|v| v * lambda)?;
            out.provenance = Some(Arc::new(prov));
        }
        Ok(out)
    }

    /// Writes one JSON object per atom: `{"x": [..], "P": [..S² row-major..], "w": ..}`.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for a in &self.atoms {
            let s = self.s;
            let rec = AtomRecord {
                x: a.x.iter().copied().collect(),
                p: PEntries::Flat((0..s * s).map(|k| a.p.get(k / s, k % s)).collect()),
                w: a.w,
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Reads the JSON-lines atom format; `P` may be flat or nested. The
    /// dimension m is the (rounded) trace of the first plane.
    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut m = None;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: AtomRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            let s = rec.x.len();
            let flat = match rec.p {
                PEntries::Flat(v) => v,
                PEntries::Nested(rows) => rows.into_iter().flatten().collect(),
            };
            if flat.len() != s * s {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("P has {} entries, expected {}", flat.len(), s * s),
                });
            }
            let mat = DMatrix::from_row_slice(s, s, &flat);
            let rank = *m.get_or_insert(mat.trace().round().max(0.0) as usize);
            let p = PlaneProjector::from_matrix(mat, rank).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            atoms.push(VarifoldAtom {
                x: DVector::from_vec(rec.x),
                p,
                w: rec.w,
            });
        }
        Self::new(atoms, m.unwrap_or(0))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PEntries {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

#[derive(Serialize, Deserialize)]
struct AtomRecord {
    x: Vec<f64>,
    #[serde(rename = "P")]
    p: PEntries,
    w: f64,
}

/// Samples the rectifiable varifold of a mesh: one atom per quadrature
/// node per simplex, plane = the simplex's tangent plane, weights summing
/// to `multiplicity × volume` on each simplex. `multiplicity = None` means
/// θ ≡ 1.
pub fn varifold_from_mesh(
    mesh: &SimplicialMesh,
    rule: QuadratureRule,
    multiplicity: Option<&[u32]>,
) -> Result<DiscreteVarifold> {
    let nf = mesh.num_simplices();
    let mult: Vec<u32> = match multiplicity {
        Some(m) if m.len() != nf => {
            return Err(Error::InvalidArgument(format!(
                "{} multiplicities for {nf} simplices",
                m.len()
            )))
        }
        Some(m) => {
            if let Some(i) = m.iter().position(|&k| k == 0) {
                return Err(Error::InvalidArgument(format!("simplex {i} has multiplicity 0")));
            }
            m.to_vec()
        }
        None => vec![1; nf],
    };
    let m = mesh.intrinsic_dim();
    let nodes = rule.nodes(m);
    let per_simplex: Result<Vec<Vec<(VarifoldAtom, usize, Vec<f64>)>>> = (0..nf)
        .into_par_iter()
        .map(|idx| {
            let e = mesh.edge_matrix(idx);
            let cols: Vec<DVector<f64>> = e.column_iter().map(|c| c.into_owned()).collect();
            let p = PlaneProjector::from_spanning(&cols)?;
            let w = mult[idx] as f64 * mesh.simplex_volume(idx) / nodes.len() as f64;
            let f = &mesh.simplices()[idx];
            Ok(nodes
                .iter()
                .map(|bary| {
                    let mut x = DVector::zeros(mesh.ambient_dim());
                    for (b, &v) in bary.iter().zip(f) {
                        if *b != 0.0 {
                            x.axpy(*b, &mesh.vertices()[v], 1.0);
                        }
                    }
                    (VarifoldAtom { x, p: p.clone(), w }, idx, bary.clone())
                })
                .collect())
        })
        .collect();
    let mut atoms = Vec::with_capacity(nf * nodes.len());
    let mut simplex = Vec::with_capacity(atoms.capacity());
    let mut barycentric = Vec::with_capacity(atoms.capacity());
    for group in per_simplex? {
        for (a, idx, b) in group {
            atoms.push(a);
            simplex.push(idx);
            barycentric.push(b);
        }
    }
    Ok(DiscreteVarifold::new(atoms, m)?.with_provenance(MeshProvenance {
        mesh: mesh.clone(),
        rule,
        multiplicity: mult,
        simplex,
        barycentric,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit_square() -> SimplicialMesh {
        let v = |a: f64, b: f64| DVector::from_vec(vec![a, b, 0.0]);
        SimplicialMesh::new(
            vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)],
            vec![vec![0, 1, 2], vec![0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn unit_square_mass_and_multiplicity() {
        let m = unit_square();
        let v = varifold_from_mesh(&m, QuadratureRule::Centroid, None).unwrap();
        assert_relative_eq!(v.mass(), 1.0, epsilon = 1e-15);
        let v3 = varifold_from_mesh(&m, QuadratureRule::Centroid, Some(&[3, 3])).unwrap();
        assert_relative_eq!(v3.mass(), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_multiplicity_is_rejected() {
        assert!(varifold_from_mesh(&unit_square(), QuadratureRule::Vertex, Some(&[1, 0])).is_err());
    }

    #[test]
    fn icosphere_mass_close_to_4pi() {
        let v = varifold_from_mesh(&shapes::icosphere(4, 1.0), QuadratureRule::Centroid, None).unwrap();
        assert!((v.mass() - 4.0 * PI).abs() / (4.0 * PI) < 2e-3);
    }

    #[test]
    fn quadrature_rules_agree_on_mass() {
        let mesh = shapes::torus(2.0, 0.7, 20, 10);
        let masses: Vec<f64> = [
            QuadratureRule::Centroid,
            QuadratureRule::Vertex,
            QuadratureRule::Degree2,
        ]
        .iter()
        .map(|&r| varifold_from_mesh(&mesh, r, None).unwrap().mass())
        .collect();
        for m in &masses {
            assert!((m - masses[0]).abs() / masses[0] < 1e-12);
        }
    }

    #[test]
    fn degree2_nodes_reproduce_quadratic_moments() {
        for m in 1..4 {
            let nodes = QuadratureRule::Degree2.nodes(m);
            // mean of λ_0² over the simplex is 2 / ((m+1)(m+2))
            let mean: f64 = nodes.iter().map(|b| b[0] * b[0]).sum::<f64>() / nodes.len() as f64;
            assert_relative_eq!(mean, 2.0 / ((m + 1) as f64 * (m + 2) as f64), epsilon = 1e-14);
        }
    }

    #[test]
    fn ball_mass_exhausts_and_is_open() {
        let v = varifold_from_mesh(&shapes::icosphere(2, 1.0), QuadratureRule::Centroid, None).unwrap();
        let o = DVector::zeros(3);
        assert_relative_eq!(v.ball_mass(&o, 10.0), v.mass(), epsilon = 1e-12);
        let x0 = v.atoms()[0].x.clone();
        assert!(v.ball_mass(&x0, 0.0) == 0.0);
    }

    #[test]
    fn sphere_diameter_and_great_circle_geodesic() {
        let v = varifold_from_mesh(&shapes::icosphere(3, 1.0), QuadratureRule::Vertex, None).unwrap();
        let d = v.support_diameter(Metric::Euclidean).unwrap();
        assert!((d - 2.0).abs() < 0.02);
        assert!(matches!(v.support_diameter(Metric::Geodesic), Err(Error::NoAmbient)));
        let c = varifold_from_mesh(&shapes::latitude_circle(200, 0.0), QuadratureRule::Vertex, None)
            .unwrap()
            .with_ambient(AmbientManifold::sphere(2, 1.0));
        // chords are not tangent: strict attach fails, conforming works
        assert!(c.is_err());
        let c = varifold_from_mesh(&shapes::latitude_circle(200, 0.0), QuadratureRule::Vertex, None)
            .unwrap()
            .conform_to_ambient(AmbientManifold::sphere(2, 1.0))
            .unwrap();
        let g = c.support_diameter(Metric::Geodesic).unwrap();
        assert!((g - PI).abs() / PI < 0.01);
        assert!(g >= c.support_diameter(Metric::Euclidean).unwrap());
    }

    #[test]
    fn components_of_two_spheres_and_three_triangles() {
        let a = shapes::icosphere(2, 1.0);
        let b = shapes::translated(&a, &DVector::from_vec(vec![10.0, 0.0, 0.0]));
        let v = varifold_from_mesh(&a.disjoint_union(&b).unwrap(), QuadratureRule::Centroid, None).unwrap();
        let cs = v.connected_components(0.5).unwrap();
        assert_eq!(cs.len(), 2);
        assert_relative_eq!(cs[0].mass(), cs[1].mass(), epsilon = 1e-12);

        let one = varifold_from_mesh(&a, QuadratureRule::Centroid, None).unwrap();
        assert_eq!(one.connected_components(a.max_edge_length()).unwrap().len(), 1);

        let tri = |dx: f64| {
            let p = |x: f64, y: f64| DVector::from_vec(vec![x + dx, y, 0.0]);
            SimplicialMesh::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)], vec![vec![0, 1, 2]]).unwrap()
        };
        let m = tri(0.0)
            .disjoint_union(&tri(5.0))
            .unwrap()
            .disjoint_union(&tri(10.0))
            .unwrap();
        let v = varifold_from_mesh(&m, QuadratureRule::Degree2, None).unwrap();
        let cs = v.connected_components(2.0).unwrap();
        assert_eq!(cs.len(), 3);
        for c in cs {
            assert_relative_eq!(c.mass(), 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn jsonl_roundtrip_and_nested_input() {
        let v = varifold_from_mesh(&shapes::icosphere(1, 1.0), QuadratureRule::Centroid, None).unwrap();
        let mut buf = Vec::new();
        v.write_jsonl(&mut buf).unwrap();
        let back = DiscreteVarifold::read_jsonl(&buf[..]).unwrap();
        assert_eq!(back.len(), v.len());
        assert_eq!(back.atoms()[3].x, v.atoms()[3].x);
        assert_eq!(back.m(), 2);
        let nested = r#"{"x": [0, 0], "P": [[1, 0], [0, 0]], "w": 0.5}"#;
        let n = DiscreteVarifold::read_jsonl(nested.as_bytes()).unwrap();
        assert_eq!(n.m(), 1);
    }
}
