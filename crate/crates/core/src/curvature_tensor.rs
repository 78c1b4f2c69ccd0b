//! Generalized curvature B and second fundamental form A.
//!
//! B satisfies, for every test function φ(x, P) and every i,
//!
//! ```text
//! 0 = ∫ [ P_ij D_j φ + B_ijk D*_jk φ + B_jij φ ] dV
//! ```
//!
//! where `D_j` differentiates in x and `D*_jk` in the matrix entry `P_jk`.
//! [`recover_b`] fits a locally constant B to this identity over a finite
//! dictionary of test functions `φ = η_ε(x - x0) q(P)`.
//!
//! Tensors are stored as [`Tensor3`]; for A the entry `get(i, j, k)` is
//! `A^k_ij`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::AmbientManifold;
use crate::error::{Error, Result};
use crate::linalg::Tensor3;
use crate::varifold::DiscreteVarifold;

/// Condition numbers above this flag an atom.
pub const MAX_CONDITION: f64 = 1e12;
/// Largest embedding dimension accepted by [`recover_b`].
pub const MAX_RECOVERY_DIM: usize = 6;

/// Polynomial factor q(P) of a dictionary function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QTerm {
    One,
    /// `P_ab`.
    Linear(usize, usize),
    /// `P_ab P_cd`.
    Quadratic((usize, usize), (usize, usize)),
}

impl QTerm {
    pub fn eval(&self, p: &DMatrix<f64>) -> f64 {
        match *self {
            Self::One => 1.0,
            Self::Linear(a, b) => p[(a, b)],
            Self::Quadratic((a, b), (c, d)) => p[(a, b)] * p[(c, d)],
        }
    }

    /// Nonzero entries `(j, k, ∂q/∂P_jk)`.
    pub fn gradient(&self, p: &DMatrix<f64>) -> Vec<(usize, usize, f64)> {
        match *self {
            Self::One => Vec::new(),
            Self::Linear(a, b) => vec![(a, b, 1.0)],
            Self::Quadratic((a, b), (c, d)) => {
                if (a, b) == (c, d) {
                    vec![(a, b, 2.0 * p[(a, b)])]
                } else {
                    vec![(a, b, p[(c, d)]), (c, d, p[(a, b)])]
                }
            }
        }
    }
}

/// Test functions `φ(x, P) = η_ε(x - x0) q(P)` with the quartic bump
/// `η_ε(y) = (1 - |y|²/ε²)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestScalarDictionary {
    pub eps: f64,
    pub s: usize,
    pub terms: Vec<QTerm>,
}

impl TestScalarDictionary {
    /// `1`, every entry `P_ab`, then products `P_ab P_cd` with
    /// `(a,b) ≤ (c,d)` in row-major order, truncated at `3 S²` terms.
    pub fn standard(s: usize, eps: f64) -> Self {
        let target = 3 * s * s;
        let mut terms = vec![QTerm::One];
        for a in 0..s {
            for b in 0..s {
                terms.push(QTerm::Linear(a, b));
            }
        }
        'outer: for e1 in 0..s * s {
            for e2 in e1..s * s {
                if terms.len() >= target {
                    break 'outer;
                }
                terms.push(QTerm::Quadratic((e1 / s, e1 % s), (e2 / s, e2 % s)));
            }
        }
        Self { eps, s, terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(η, ∇η)` at `x` for center `x0`.
    pub fn bump(&self, x: &DVector<f64>, x0: &DVector<f64>) -> (f64, DVector<f64>) {
        let u = x - x0;
        let t2 = u.norm_squared() / (self.eps * self.eps);
        if t2 >= 1.0 {
            return (0.0, DVector::zeros(x.len()));
        }
        let q = 1.0 - t2;
        (q * q, u * (-4.0 * q / (self.eps * self.eps)))
    }

    /// φ for term `t`.
    pub fn phi(&self, t: usize, x: &DVector<f64>, p: &DMatrix<f64>, x0: &DVector<f64>) -> f64 {
        self.bump(x, x0).0 * self.terms[t].eval(p)
    }

    /// `D_j φ` for term `t`.
    pub fn d_phi(&self, t: usize, x: &DVector<f64>, p: &DMatrix<f64>, x0: &DVector<f64>) -> DVector<f64> {
        self.bump(x, x0).1 * self.terms[t].eval(p)
    }

    /// `D*_jk φ` for term `t`, as an S×S matrix.
    pub fn d_star_phi(&self, t: usize, x: &DVector<f64>, p: &DMatrix<f64>, x0: &DVector<f64>) -> DMatrix<f64> {
        let eta = self.bump(x, x0).0;
        let mut out = DMatrix::zeros(self.s, self.s);
        for (j, k, g) in self.terms[t].gradient(p) {
            out[(j, k)] += eta * g;
        }
        out
    }
}

/// Per-atom B and A with fit diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensorField {
    pub b: Vec<Option<Tensor3>>,
    pub a: Vec<Option<Tensor3>>,
    /// Normalized least-squares residual (1/length); 0 for algebraic fields.
    pub residual: Vec<f64>,
    /// Condition number of the local system (1 for algebraic fields).
    pub condition: Vec<f64>,
    /// Rank-deficient or under-populated neighbourhoods.
    pub flagged: Vec<bool>,
}

#[derive(Serialize)]
struct TensorRecord<'a> {
    #[serde(rename = "B")]
    b: Option<&'a [f64]>,
    #[serde(rename = "A")]
    a: Option<&'a [f64]>,
    residual: f64,
}

impl CurvatureTensorField {
    fn algebraic(b: Vec<Option<Tensor3>>, a: Vec<Option<Tensor3>>) -> Self {
        let n = b.len();
        Self {
            b,
            a,
            residual: vec![0.0; n],
            condition: vec![1.0; n],
            flagged: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// `H_i = Σ_j B_jij` per atom.
    pub fn trace_h(&self) -> Vec<Option<DVector<f64>>> {
        self.b
            .iter()
            .map(|b| b.as_ref().map(|b| b.trace_first_last()))
            .collect()
    }

    /// |A| per atom (NaN when unset).
    pub fn a_norms(&self) -> Vec<f64> {
        self.a
            .iter()
            .map(|a| a.as_ref().map_or(f64::NAN, |a| a.norm()))
            .collect()
    }

    /// |B| per atom (NaN when unset).
    pub fn b_norms(&self) -> Vec<f64> {
        self.b
            .iter()
            .map(|b| b.as_ref().map_or(f64::NAN, |b| b.norm()))
            .collect()
    }

    /// Indices with both tensors set and not flagged.
    pub fn usable(&self) -> Vec<usize> {
        (0..self.b.len())
            .filter(|&i| !self.flagged[i] && self.b[i].is_some() && self.a[i].is_some())
            .collect()
    }

    /// Largest `|A^k_ij - A^k_ji|` relative to |A| over usable atoms.
    pub fn a_asymmetry(&self) -> f64 {
        self.usable()
            .iter()
            .map(|&n| {
                let a = self.a[n].as_ref().unwrap();
                let s = a.dim();
                let t = Tensor3::from_fn(s, |i, j, k| a.get(j, i, k));
                a.max_abs_diff(&t) / a.norm().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    /// JSON lines `{"B": [S³], "A": [S³], "residual": r}`, row-major.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.b.len() {
            let rec = TensorRecord {
                b: self.b[i].as_ref().map(|t| t.as_slice()),
                a: self.a[i].as_ref().map(|t| t.as_slice()),
                residual: self.residual[i],
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// `A^k_ij = P_lj B_ikl - P_lj P_iq ∂Q_kl/∂x_q` at one atom.
pub fn a_from_b_atom(b: &Tensor3, p: &DMatrix<f64>, dq: &Tensor3) -> Tensor3 {
    let s = b.dim();
    // G_jk = P_lj B_ikl for fixed i; correction C_ijk = P_lj (P_iq ∂_q Q_kl)
    let mut a = Tensor3::zeros(s);
    for i in 0..s {
        // M_kl = Σ_q P_iq ∂Q_kl/∂x_q
        let mut mkl = DMatrix::zeros(s, s);
        for k in 0..s {
            for l in 0..s {
                let mut acc = 0.0;
                for q in 0..s {
                    acc += p[(i, q)] * dq.get(k, l, q);
                }
                mkl[(k, l)] = acc;
            }
        }
        for j in 0..s {
            for k in 0..s {
                let mut acc = 0.0;
                for l in 0..s {
                    acc += p[(l, j)] * (b.get(i, k, l) - mkl[(k, l)]);
                }
                a.set(i, j, k, acc);
            }
        }
    }
    a
}

/// `B_ijk = A^k_ij + A^j_ik + P_jl P_iq ∂Q_lk/∂x_q + P_kl P_iq ∂Q_lj/∂x_q`.
pub fn b_from_a_atom(a: &Tensor3, p: &DMatrix<f64>, dq: &Tensor3) -> Tensor3 {
    let s = a.dim();
    let mut b = Tensor3::zeros(s);
    for i in 0..s {
        // N_lk = Σ_q P_iq ∂Q_lk/∂x_q
        let mut nlk = DMatrix::zeros(s, s);
        for l in 0..s {
            for k in 0..s {
                let mut acc = 0.0;
                for q in 0..s {
                    acc += p[(i, q)] * dq.get(l, k, q);
                }
                nlk[(l, k)] = acc;
            }
        }
        // T_jk = Σ_l P_jl N_lk
        let t = p * &nlk;
        for j in 0..s {
            for k in 0..s {
                b.set(i, j, k, a.get(i, j, k) + a.get(i, k, j) + t[(j, k)] + t[(k, j)]);
            }
        }
    }
    b
}

fn ambient_of(v: &DiscreteVarifold, ambient: Option<&AmbientManifold>) -> Result<AmbientManifold> {
    let amb = ambient.cloned().unwrap_or_else(|| v.ambient_or_euclidean());
    if amb.embedding_dim() != v.s() {
        return Err(Error::DimensionMismatch("ambient and varifold differ in S".into()));
    }
    Ok(amb)
}

/// Applies [`a_from_b_atom`] atomwise. `ambient = None` uses the
/// varifold's ambient (R^S when none is attached).
pub fn a_from_b(
    b: &[Option<Tensor3>],
    v: &DiscreteVarifold,
    ambient: Option<&AmbientManifold>,
) -> Result<Vec<Option<Tensor3>>> {
    let amb = ambient_of(v, ambient)?;
    if b.len() != v.len() {
        return Err(Error::DimensionMismatch(
            "tensor field and varifold differ in length".into(),
        ));
    }
    Ok(b.par_iter()
        .zip(v.atoms().par_iter())
        .map(|(b, at)| {
            b.as_ref()
                .map(|b| a_from_b_atom(b, at.p.matrix(), &amb.dq_unchecked(&at.x)))
        })
        .collect())
}

/// Applies [`b_from_a_atom`] atomwise and returns the full field.
pub fn b_from_a(
    a: &[Option<Tensor3>],
    v: &DiscreteVarifold,
    ambient: Option<&AmbientManifold>,
) -> Result<CurvatureTensorField> {
    let amb = ambient_of(v, ambient)?;
    if a.len() != v.len() {
        return Err(Error::DimensionMismatch(
            "tensor field and varifold differ in length".into(),
        ));
    }
    let b = a
        .par_iter()
        .zip(v.atoms().par_iter())
        .map(|(a, at)| {
            a.as_ref()
                .map(|a| b_from_a_atom(a, at.p.matrix(), &amb.dq_unchecked(&at.x)))
        })
        .collect();
    Ok(CurvatureTensorField::algebraic(b, a.to_vec()))
}

/// Builds B from a given field and derives A with the varifold's ambient.
pub fn field_from_b(b: Vec<Option<Tensor3>>, v: &DiscreteVarifold) -> Result<CurvatureTensorField> {
    let a = a_from_b(&b, v, None)?;
    Ok(CurvatureTensorField::algebraic(b, a))
}

/// Exact tensors of the round sphere `|x - c| = r` viewed as a
/// hypersurface of R^S, evaluated at the radial projection of `x`:
/// `A^k_ij = -n_k P_ij / r`, `B_ijk = -(P_ij n_k + n_j P_ik) / r`.
pub fn sphere_tensors(x: &DVector<f64>, center: &DVector<f64>, r: f64) -> (Tensor3, Tensor3) {
    let s = x.len();
    let n = (x - center).normalize();
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let p = |a: usize, b: usize| d(a, b) - n[a] * n[b];
    let a = Tensor3::from_fn(s, |i, j, k| -n[k] * p(i, j) / r);
    let b = Tensor3::from_fn(s, |i, j, k| -(p(i, j) * n[k] + n[j] * p(i, k)) / r);
    (b, a)
}

/// [`sphere_tensors`] at every atom.
pub fn analytic_sphere_field(v: &DiscreteVarifold, center: &DVector<f64>, r: f64) -> CurvatureTensorField {
    let (b, a): (Vec<_>, Vec<_>) = v
        .atoms()
        .par_iter()
        .map(|at| {
            let (b, a) = sphere_tensors(&at.x, center, r);
            (Some(b), Some(a))
        })
        .unzip();
    CurvatureTensorField::algebraic(b, a)
}

struct LocalSystem {
    /// Rows (term, i) × S³ columns, normalized by Σ w η.
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
}

fn local_system(
    v: &DiscreteVarifold,
    dict: &TestScalarDictionary,
    x0: &DVector<f64>,
    nb: &[usize],
) -> Option<LocalSystem> {
    let s = v.s();
    let nq = dict.len();
    let s3 = s * s * s;
    let mut s_eta = 0.0;
    let mut s_q = vec![0.0; nq];
    let mut s_dstar = vec![DMatrix::<f64>::zeros(s, s); nq];
    let mut rhs = DVector::zeros(nq * s);
    for &n in nb {
        let at = &v.atoms()[n];
        let (eta, grad) = dict.bump(&at.x, x0);
        if eta == 0.0 {
            continue;
        }
        let p = at.p.matrix();
        let pg = p * &grad;
        s_eta += at.w * eta;
        for (t, term) in dict.terms.iter().enumerate() {
            let q = term.eval(p);
            s_q[t] += at.w * eta * q;
            for (j, k, g) in term.gradient(p) {
                s_dstar[t][(j, k)] += at.w * eta * g;
            }
            for i in 0..s {
                rhs[t * s + i] -= at.w * pg[i] * q;
            }
        }
    }
    if s_eta <= 0.0 {
        return None;
    }
    let mut matrix = DMatrix::zeros(nq * s, s3);
    for t in 0..nq {
        for i in 0..s {
            let row = t * s + i;
            for j in 0..s {
                for k in 0..s {
                    matrix[(row, (i * s + j) * s + k)] += s_dstar[t][(j, k)] / s_eta;
                }
                // B_jij φ
                matrix[(row, (j * s + i) * s + j)] += s_q[t] / s_eta;
            }
        }
    }
    rhs /= s_eta;
    Some(LocalSystem { matrix, rhs })
}

/// Least-squares B per atom on its ε-neighbourhood (`ε = dict.eps`),
/// followed by A from the varifold's ambient. Atoms with fewer than S³
/// neighbours are left unset; ill-conditioned systems keep the
/// minimal-norm solution and are flagged.
pub fn recover_b(v: &DiscreteVarifold, dict: &TestScalarDictionary) -> Result<CurvatureTensorField> {
    let s = v.s();
    if s > MAX_RECOVERY_DIM {
        return Err(Error::InvalidArgument(format!(
            "B recovery has S³ unknowns per atom; S = {s} exceeds the limit {MAX_RECOVERY_DIM}"
        )));
    }
    if dict.s != s {
        return Err(Error::DimensionMismatch("dictionary and varifold differ in S".into()));
    }
    if !(dict.eps > 0.0) {
        return Err(Error::InvalidArgument("dictionary radius must be positive".into()));
    }
    let s3 = s * s * s;
    let results: Vec<(Option<Tensor3>, f64, f64, bool)> = v
        .atoms()
        .par_iter()
        .map(|a0| {
            let nb = v.atoms_within(&a0.x, dict.eps);
            if nb.len() < s3 {
                return (None, f64::NAN, f64::INFINITY, true);
            }
            let Some(sys) = local_system(v, dict, &a0.x, &nb) else {
                return (None, f64::NAN, f64::INFINITY, true);
            };
            let svd = sys.matrix.clone().svd(true, true);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.min();
            let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
            let sol = svd.solve(&sys.rhs, smax * 1e-14).unwrap_or_else(|_| DVector::zeros(s3));
            let res = (&sys.matrix * &sol - &sys.rhs).norm() / (sys.rhs.len() as f64).sqrt();
            let b = Tensor3::from_flat(s, sol.as_slice().to_vec()).expect("S³ entries");
            (Some(b), res, cond, !(cond <= MAX_CONDITION))
        })
        .collect();
    let mut b = Vec::with_capacity(results.len());
    let mut residual = Vec::with_capacity(results.len());
    let mut condition = Vec::with_capacity(results.len());
    let mut flagged = Vec::with_capacity(results.len());
    for (bb, r, c, f) in results {
        b.push(bb);
        residual.push(r);
        condition.push(c);
        flagged.push(f);
    }
    let a = a_from_b(&b, v, None)?;
    Ok(CurvatureTensorField {
        b,
        a,
        residual,
        condition,
        flagged,
    })
}

/// Root-mean-square of the weak-identity residual over the given centers,
/// all dictionary terms and all components i, each normalized by
/// `Σ w η` (units 1/length). Uses the per-atom B (not a local constant).
pub fn vc_residual(
    v: &DiscreteVarifold,
    b: &[Tensor3],
    dict: &TestScalarDictionary,
    centers: &[DVector<f64>],
) -> Result<f64> {
    let s = v.s();
    if b.len() != v.len() {
        return Err(Error::DimensionMismatch(
            "tensor field and varifold differ in length".into(),
        ));
    }
    if centers.is_empty() {
        return Err(Error::InvalidArgument("no residual centers".into()));
    }
    let per_center: Vec<(f64, usize)> = centers
        .par_iter()
        .map(|x0| {
            let nb = v.atoms_within(x0, dict.eps);
            let mut s_eta = 0.0;
            let mut acc = vec![0.0; dict.len() * s];
            for &n in &nb {
                let at = &v.atoms()[n];
                let (eta, grad) = dict.bump(&at.x, x0);
                if eta == 0.0 {
                    continue;
                }
                s_eta += at.w * eta;
                let p = at.p.matrix();
                let pg = p * &grad;
                let bt = &b[n];
                let h = bt.trace_first_last();
                for (t, term) in dict.terms.iter().enumerate() {
                    let q = term.eval(p);
                    let gq = term.gradient(p);
                    for i in 0..s {
                        let mut val = pg[i] * q + h[i] * eta * q;
                        for &(j, k, g) in &gq {
                            val += bt.get(i, j, k) * eta * g;
                        }
                        acc[t * s + i] += at.w * val;
                    }
                }
            }
            if s_eta <= 0.0 {
                return (0.0, 0);
            }
            let ss: f64 = acc.iter().map(|r| (r / s_eta).powi(2)).sum();
            (ss, acc.len())
        })
        .collect();
    let (sum, count) = per_center
        .iter()
        .fold((0.0, 0usize), |(a, c), &(s2, n)| (a + s2, c + n));
    if count == 0 {
        return Err(Error::InvalidArgument("no atoms near any residual center".into()));
    }
    Ok((sum / count as f64).sqrt())
}
