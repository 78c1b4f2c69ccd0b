//! Simplicial meshes: the discretization carrier for rectifiable sets.

pub mod io;
pub mod remesh;
pub mod shapes;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};

/// Simplices whose m-volume falls below this multiple of `scale^m` are
/// rejected, where `scale` is the bounding-box diagonal.
pub const DEGENERACY_RATIO: f64 = 1e-14;

/// A pure simplicial m-complex embedded in R^S.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialMesh {
    vertices: Vec<DVector<f64>>,
    simplices: Vec<Vec<usize>>,
    orientation: Vec<bool>,
}

impl SimplicialMesh {
    pub fn new(vertices: Vec<DVector<f64>>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let orientation = vec![true; simplices.len()];
        Self::with_orientation(vertices, simplices, orientation)
    }

    pub fn with_orientation(
        vertices: Vec<DVector<f64>>,
        simplices: Vec<Vec<usize>>,
        orientation: Vec<bool>,
    ) -> Result<Self> {
        let mesh = Self {
            vertices,
            simplices,
            orientation,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Triangle mesh in R^3 from plain arrays.
    pub fn from_triangles(vertices: &[Vector3<f64>], faces: &[[usize; 3]]) -> Result<Self> {
        Self::new(
            vertices
                .iter()
                .map(|v| DVector::from_column_slice(v.as_slice()))
                .collect(),
            faces.iter().map(|f| f.to_vec()).collect(),
        )
    }

    fn validate(&self) -> Result<()> {
        let s = self
            .vertices
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::InvalidMesh("mesh has no vertices".into()))?;
        if s == 0 || self.vertices.iter().any(|v| v.len() != s) {
            return Err(Error::InvalidMesh("vertices have inconsistent dimension".into()));
        }
        if self.vertices.iter().any(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        let k = self
            .simplices
            .first()
            .map(|f| f.len())
            .ok_or_else(|| Error::InvalidMesh("mesh has no simplices".into()))?;
        if k < 2 {
            return Err(Error::InvalidMesh("simplices need at least two vertices".into()));
        }
        let m = k - 1;
        if m >= s {
            return Err(Error::InvalidMesh(format!(
                "intrinsic dimension {m} must be below embedding dimension {s}"
            )));
        }
        if self.orientation.len() != self.simplices.len() {
            return Err(Error::InvalidMesh("orientation flags do not match simplices".into()));
        }
        for (idx, f) in self.simplices.iter().enumerate() {
            if f.len() != k {
                return Err(Error::InvalidMesh(format!(
                    "simplex {idx} has {} vertices, expected {k}",
                    f.len()
                )));
            }
            for (a, &v) in f.iter().enumerate() {
                if v >= self.vertices.len() {
                    return Err(Error::InvalidMesh(format!(
                        "simplex {idx} references vertex {v} of {}",
                        self.vertices.len()
                    )));
                }
                if f[..a].contains(&v) {
                    return Err(Error::DegenerateSimplex {
                        index: idx,
                        volume: 0.0,
                        threshold: 0.0,
                    });
                }
            }
        }
        let scale = self.bounding_diagonal().max(f64::MIN_POSITIVE);
        let threshold = DEGENERACY_RATIO * scale.powi(m as i32);
        for idx in 0..self.simplices.len() {
            let volume = self.simplex_volume(idx);
            if !(volume > threshold) {
                return Err(Error::DegenerateSimplex {
                    index: idx,
                    volume,
                    threshold,
                });
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn orientation(&self) -> &[bool] {
        &self.orientation
    }

    /// Intrinsic dimension m.
    pub fn intrinsic_dim(&self) -> usize {
        self.simplices[0].len() - 1
    }

    /// Embedding dimension S.
    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    pub fn bounding_diagonal(&self) -> f64 {
        let s = self.vertices[0].len();
        let mut lo = vec![f64::INFINITY; s];
        let mut hi = vec![f64::NEG_INFINITY; s];
        for v in &self.vertices {
            for a in 0..s {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        lo.iter().zip(&hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt()
    }

    /// Edge vectors `v_a - v_0` of a simplex, as columns.
    pub fn edge_matrix(&self, idx: usize) -> DMatrix<f64> {
        let f = &self.simplices[idx];
        let v0 = &self.vertices[f[0]];
        let s = v0.len();
        DMatrix::from_fn(s, f.len() - 1, |r, c| self.vertices[f[c + 1]][r] - v0[r])
    }

    /// m-dimensional volume of simplex `idx`.
    pub fn simplex_volume(&self, idx: usize) -> f64 {
        let e = self.edge_matrix(idx);
        let gram = e.transpose() * &e;
        let m = e.ncols();
        let det = gram.determinant().max(0.0);
        det.sqrt() / factorial(m)
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.simplices.len()).map(|i| self.simplex_volume(i)).sum()
    }

    /// Same connectivity, new vertex positions (re-validated).
    pub fn with_vertices(&self, vertices: Vec<DVector<f64>>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::InvalidMesh("vertex count changed".into()));
        }
        Self::with_orientation(vertices, self.simplices.clone(), self.orientation.clone())
    }

    /// Applies `f` to every vertex.
    pub fn map_vertices(&self, f: impl Fn(&DVector<f64>) -> DVector<f64>) -> Result<Self> {
        self.with_vertices(self.vertices.iter().map(f).collect())
    }

    /// Disjoint union (vertex indices of `other` are shifted).
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        let shift = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().cloned());
        let mut simplices = self.simplices.clone();
        simplices.extend(other.simplices.iter().map(|f| f.iter().map(|v| v + shift).collect()));
        let mut orientation = self.orientation.clone();
        orientation.extend_from_slice(&other.orientation);
        Self::with_orientation(vertices, simplices, orientation)
    }

    /// Faces as fixed triangles; `None` unless m = 2.
    pub fn triangles(&self) -> Option<Vec<[usize; 3]>> {
        (self.intrinsic_dim() == 2).then(|| {
            self.simplices
                .iter()
                .zip(&self.orientation)
                .map(|(f, &o)| if o { [f[0], f[1], f[2]] } else { [f[0], f[2], f[1]] })
                .collect()
        })
    }

    /// Vertex positions as 3-vectors; `None` unless S = 3.
    pub fn positions3(&self) -> Option<Vec<Vector3<f64>>> {
        (self.ambient_dim() == 3).then(|| self.vertices.iter().map(|v| Vector3::new(v[0], v[1], v[2])).collect())
    }

    /// Map from each (m-1)-face, keyed by its sorted vertex tuple, to the
    /// simplices containing it.
    pub fn facet_incidence(&self) -> BTreeMap<Vec<usize>, Vec<usize>> {
        let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (idx, f) in self.simplices.iter().enumerate() {
            for skip in 0..f.len() {
                let mut key: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|&(a, _)| a != skip)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                map.entry(key).or_default().push(idx);
            }
        }
        map
    }

    /// Facets shared by more than two simplices. For m = 2 these are the
    /// non-manifold edges; for m = 1, vertices of valence above two are
    /// reported as `(v, v)`.
    pub fn non_manifold_facets(&self) -> Vec<(usize, usize)> {
        self.facet_incidence()
            .into_iter()
            .filter(|(_, fs)| fs.len() > 2)
            .map(|(k, _)| (k[0], *k.last().unwrap()))
            .collect()
    }

    /// Vertices lying on a facet that belongs to exactly one simplex.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut flags = vec![false; self.vertices.len()];
        for (k, fs) in self.facet_incidence() {
            if fs.len() == 1 {
                for v in k {
                    flags[v] = true;
                }
            }
        }
        flags
    }

    /// Undirected edges (sorted pairs), each once.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = std::collections::BTreeSet::new();
        for f in &self.simplices {
            for a in 0..f.len() {
                for b in (a + 1)..f.len() {
                    set.insert((f[a].min(f[b]), f[a].max(f[b])));
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges()
            .iter()
            .map(|&(a, b)| (&self.vertices[a] - &self.vertices[b]).norm())
            .fold(0.0, f64::max)
    }

    pub fn mean_edge_length(&self) -> f64 {
        let e = self.edges();
        e.iter()
            .map(|&(a, b)| (&self.vertices[a] - &self.vertices[b]).norm())
            .sum::<f64>()
            / e.len() as f64
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}
