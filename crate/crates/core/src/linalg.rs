//! Small dense linear-algebra pieces shared across the crate: rank-m
//! orthogonal projectors and rank-3 tensors over R^S.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = DVector<f64>;

const SYMMETRY_TOL: f64 = 1e-12;
const IDEMPOTENCE_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

/// Orthogonal projection of R^S onto an m-dimensional subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneProjector {
    matrix: DMatrix<f64>,
    rank: usize,
}

impl PlaneProjector {
    /// Builds the projector onto the span of `vectors` (which must be
    /// linearly independent).
    pub fn from_spanning(vectors: &[DVector<f64>]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidProjector("no spanning vectors".into()))?;
        let s = first.len();
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
        let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for v in vectors {
            if v.len() != s {
                return Err(Error::DimensionMismatch(format!(
                    "spanning vector of length {} in R^{s}",
                    v.len()
                )));
            }
            // two passes of modified Gram-Schmidt
            let mut u = v.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dot(&u);
                    u.axpy(-c, b, 1.0);
                }
            }
            let n = u.norm();
            if n <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidProjector(
                    "spanning vectors are linearly dependent".into(),
                ));
            }
            basis.push(u / n);
        }
        let mut matrix = DMatrix::zeros(s, s);
        for b in &basis {
            matrix.ger(1.0, b, b, 1.0);
        }
        symmetrize(&mut matrix);
        Ok(Self {
            matrix,
            rank: basis.len(),
        })
    }

    /// Wraps a matrix after checking symmetry, idempotence and trace.
    pub fn from_matrix(matrix: DMatrix<f64>, rank: usize) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c {
            return Err(Error::InvalidProjector(format!("{r}x{c} matrix is not square")));
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidProjector(format!("asymmetry {asym:e}")));
        }
        let idem = (&matrix * &matrix - &matrix).amax();
        if idem > IDEMPOTENCE_TOL {
            return Err(Error::InvalidProjector(format!("P^2 - P defect {idem:e}")));
        }
        let tr = matrix.trace();
        if (tr - rank as f64).abs() > TRACE_TOL {
            return Err(Error::InvalidProjector(format!("trace {tr} but rank {rank}")));
        }
        Ok(Self { matrix, rank })
    }

    /// Projects `matrix` (assumed close to a rank-`rank` projector) onto
    /// the nearest orthogonal projector via its top eigenvectors.
    pub fn nearest(matrix: &DMatrix<f64>, rank: usize) -> Result<Self> {
        let mut sym = matrix.clone();
        symmetrize(&mut sym);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let vecs: Vec<DVector<f64>> = order[..rank]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        Self::from_spanning(&vecs)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Intrinsic dimension m.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Embedding dimension S.
    pub fn ambient_dim(&self) -> usize {
        self.matrix.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    /// `(I - P) v`.
    pub fn apply_normal(&self, v: &DVector<f64>) -> DVector<f64> {
        v - &self.matrix * v
    }

    /// Conjugates by an orthogonal matrix: `R P R^T`.
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Self {
        let mut matrix = rotation * &self.matrix * rotation.transpose();
        symmetrize(&mut matrix);
        Self {
            matrix,
            rank: self.rank,
        }
    }

    /// Largest entrywise violation of symmetry, idempotence and trace.
    pub fn law_defects(&self) -> (f64, f64, f64) {
        let m = &self.matrix;
        (
            (m - m.transpose()).amax(),
            (m * m - m).amax(),
            (m.trace() - self.rank as f64).abs(),
        )
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let a = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = a;
            m[(j, i)] = a;
        }
    }
}

/// Dense S x S x S array, row-major in (i, j, k).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    s: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(s: usize) -> Self {
        Self {
            s,
            data: vec![0.0; s * s * s],
        }
    }

    pub fn from_flat(s: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != s * s * s {
            return Err(Error::DimensionMismatch(format!(
                "flat tensor of length {} for S = {s}",
                data.len()
            )));
        }
        Ok(Self { s, data })
    }

    pub fn from_fn(s: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(s);
        for i in 0..s {
            for j in 0..s {
                for k in 0..s {
                    t.data[(i * s + j) * s + k] = f(i, j, k);
                }
            }
        }
        t
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.s
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.s + j) * self.s + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.s + j) * self.s + k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.data[(i * self.s + j) * self.s + k] += v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Vector `v_i = sum_j T_{j i j}`.
    pub fn trace_first_last(&self) -> DVector<f64> {
        let s = self.s;
        DVector::from_fn(s, |i, _| (0..s).map(|j| self.get(j, i, j)).sum())
    }

    /// Transform under an orthogonal change of coordinates
    /// `T'_{abc} = R_ai R_bj R_ck T_ijk`.
    pub fn rotated(&self, r: &DMatrix<f64>) -> Self {
        let s = self.s;
        let mut a = Self::zeros(s);
        // contract one index at a time
        for x in 0..s {
            for j in 0..s {
                for k in 0..s {
                    let v: f64 = (0..s).map(|i| r[(x, i)] * self.get(i, j, k)).sum();
                    a.set(x, j, k, v);
                }
            }
        }
        let mut b = Self::zeros(s);
        for x in 0..s {
            for y in 0..s {
                for k in 0..s {
                    let v: f64 = (0..s).map(|j| r[(y, j)] * a.get(x, j, k)).sum();
                    b.set(x, y, k, v);
                }
            }
        }
        let mut c = Self::zeros(s);
        for x in 0..s {
            for y in 0..s {
                for z in 0..s {
                    let v: f64 = (0..s).map(|k| r[(z, k)] * b.get(x, y, k)).sum();
                    c.set(x, y, z, v);
                }
            }
        }
        c
    }
}

/// Volume of the unit m-ball.
pub fn unit_ball_volume(m: usize) -> f64 {
    use std::f64::consts::PI;
    // omega_m = pi^{m/2} / Gamma(m/2 + 1), via the two-step recurrence
    match m {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(m - 2) * 2.0 * PI / m as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn projector_from_spanning_obeys_laws() {
        let p = PlaneProjector::from_spanning(&[
            DVector::from_vec(vec![1.0, 1.0, 0.0]),
            DVector::from_vec(vec![0.0, 2.0, 1.0]),
        ])
        .unwrap();
        let (sym, idem, tr) = p.law_defects();
        assert!(sym < 1e-12 && idem < 1e-10 && tr < 1e-10);
        assert_eq!(p.rank(), 2);
        assert!(PlaneProjector::from_matrix(p.matrix().clone(), 2).is_ok());
    }

    #[test]
    fn dependent_span_is_rejected() {
        let v = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(PlaneProjector::from_spanning(&[v.clone(), v * 2.0]).is_err());
    }

    #[test]
    fn from_matrix_rejects_non_projector() {
        let m = DMatrix::from_diagonal_element(3, 3, 0.5);
        assert!(PlaneProjector::from_matrix(m, 2).is_err());
    }

    #[test]
    fn nearest_recovers_perturbed_projector() {
        let p = PlaneProjector::from_spanning(&[DVector::from_vec(vec![0.0, 1.0, 0.0])]).unwrap();
        let mut m = p.matrix().clone();
        m[(0, 1)] += 1e-6;
        let q = PlaneProjector::nearest(&m, 1).unwrap();
        assert!((q.matrix() - p.matrix()).amax() < 1e-5);
    }

    #[test]
    fn unit_ball_volumes() {
        use std::f64::consts::PI;
        assert_relative_eq!(unit_ball_volume(1), 2.0);
        assert_relative_eq!(unit_ball_volume(2), PI);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, epsilon = 1e-14);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn tensor_trace_and_rotation() {
        let t = Tensor3::from_fn(3, |i, j, k| (i + 2 * j + 3 * k) as f64);
        let tr = t.trace_first_last();
        assert_relative_eq!(tr[0], (0..3).map(|j| (j + 3 * j) as f64).sum::<f64>());
        let id = DMatrix::identity(3, 3);
        assert_eq!(t.rotated(&id), t);
    }
}
