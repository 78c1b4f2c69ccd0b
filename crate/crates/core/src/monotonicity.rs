//! Monotonicity quantities, density estimates and the diameter/mass bounds
//! for varifolds with mean curvature in L^p, p > m, with every constant
//! tracked explicitly.

use std::fmt;
use std::io::Write;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::first_variation::{lp_norm, Component, CurvatureField};
use crate::linalg::unit_ball_volume;
use crate::varifold::{DiscreteVarifold, Metric};

/// Shape of the radial cutoff φ: both equal 1 on `t ≤ start`, vanish on
/// `t ≥ 1` and are C¹ with φ' ≤ 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffProfile {
    /// `(1 - s²)²` in the transition variable s.
    Quartic,
    /// `1 - 3s² + 2s³`.
    Cubic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub profile: CutoffProfile,
    /// Start of the transition, in [1/2, 1). Values near 1 sharpen φ
    /// towards the indicator of (-∞, 1].
    pub start: f64,
}

impl Cutoff {
    pub fn quartic() -> Self {
        Self {
            profile: CutoffProfile::Quartic,
            start: 0.5,
        }
    }

    pub fn cubic() -> Self {
        Self {
            profile: CutoffProfile::Cubic,
            start: 0.5,
        }
    }

    pub fn sharpened(self, start: f64) -> Result<Self> {
        if !(0.5..1.0).contains(&start) {
            return Err(Error::InvalidArgument(format!(
                "cutoff transition start {start} must lie in [0.5, 1)"
            )));
        }
        Ok(Self { start, ..self })
    }

    /// (φ(t), φ'(t)).
    pub fn eval(&self, t: f64) -> (f64, f64) {
        if t <= self.start {
            return (1.0, 0.0);
        }
        if t >= 1.0 {
            return (0.0, 0.0);
        }
        let width = 1.0 - self.start;
        let s = (t - self.start) / width;
        let (f, df) = match self.profile {
            CutoffProfile::Quartic => {
                let q = 1.0 - s * s;
                (q * q, -4.0 * s * q)
            }
            CutoffProfile::Cubic => (1.0 - 3.0 * s * s + 2.0 * s * s * s, -6.0 * s + 6.0 * s * s),
        };
        (f, df / width)
    }
}

impl Default for Cutoff {
    fn default() -> Self {
        Self::quartic()
    }
}

/// I, L, J of the monotonicity identity sampled at increasing radii, with
/// their exact ρ-derivatives for the discrete measure.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneProfile {
    pub center: DVector<f64>,
    pub cutoff: Cutoff,
    pub m: usize,
    pub radii: Vec<f64>,
    /// `I(ρ) = Σ w φ(r/ρ)`.
    pub i: Vec<f64>,
    /// `L(ρ) = Σ w φ(r/ρ) (x - x0)·H`.
    pub l: Vec<f64>,
    /// `J(ρ) = Σ w φ(r/ρ) |D^⊥ r|²`.
    pub j: Vec<f64>,
    pub di: Vec<f64>,
    pub dj: Vec<f64>,
}

impl MonotoneProfile {
    /// `d/dρ[ρ^{-m} I] - ρ^{-m} J' - ρ^{-m-1} L` at each radius. Zero when H
    /// is the exact weak mean curvature of the discrete measure.
    pub fn residuals(&self) -> Vec<f64> {
        let m = self.m as i32;
        (0..self.radii.len())
            .map(|k| {
                let r = self.radii[k];
                let lhs = -(m as f64) * r.powi(-m - 1) * self.i[k] + r.powi(-m) * self.di[k];
                lhs - r.powi(-m) * self.dj[k] - r.powi(-m - 1) * self.l[k]
            })
            .collect()
    }

    /// Largest residual relative to the scale `m ρ^{-m-1} I(ρ)`.
    pub fn relative_residual(&self) -> f64 {
        let m = self.m as i32;
        self.residuals()
            .iter()
            .enumerate()
            .map(|(k, res)| {
                let scale = self.m as f64 * self.radii[k].powi(-m - 1) * self.i[k];
                if scale > 0.0 {
                    res.abs() / scale
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }

    /// `ρ^{-m} I(ρ)` at each radius.
    pub fn density_ratios(&self) -> Vec<f64> {
        self.radii
            .iter()
            .zip(&self.i)
            .map(|(r, i)| i / r.powi(self.m as i32))
            .collect()
    }
}

/// Three times the median atom spacing: smallest radius at which ball
/// masses are meaningful.
pub fn resolution_floor(v: &DiscreteVarifold) -> f64 {
    3.0 * v.median_spacing()
}

fn require_support(v: &DiscreteVarifold, x0: &DVector<f64>) -> Result<()> {
    if x0.len() != v.s() {
        return Err(Error::DimensionMismatch(format!(
            "center has {} coordinates, varifold lives in R^{}",
            x0.len(),
            v.s()
        )));
    }
    let tol = 2.0 * v.median_spacing();
    let (_, dist) = v
        .index()
        .nearest(x0.as_slice())
        .ok_or_else(|| Error::InvalidVarifold("empty varifold".into()))?;
    if dist > tol {
        return Err(Error::InvalidArgument(format!(
            "center is {dist:e} from the support (tolerance {tol:e})"
        )));
    }
    Ok(())
}

fn require_exponent(p: f64, m: usize) -> Result<()> {
    if !(p > m as f64) || !p.is_finite() {
        return Err(Error::ExponentTooSmall { p, m });
    }
    Ok(())
}

fn check_field(v: &DiscreteVarifold, field: &CurvatureField) -> Result<()> {
    if field.len() != v.len() {
        return Err(Error::DimensionMismatch("field and varifold differ in length".into()));
    }
    Ok(())
}

pub fn monotone_profile(
    v: &DiscreteVarifold,
    field: &CurvatureField,
    x0: &DVector<f64>,
    radii: &[f64],
    cutoff: Cutoff,
) -> Result<MonotoneProfile> {
    check_field(v, field)?;
    require_support(v, x0)?;
    if radii.is_empty() || radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    let rmax = *radii.last().unwrap();
    let nb = v.atoms_within(x0, rmax);
    let unset = nb.iter().filter(|&&k| field.h[k].is_none()).count();
    if unset > 0 {
        return Err(Error::UnsetCurvature { count: unset });
    }
    let samples: Vec<[f64; 5]> = radii
        .par_iter()
        .map(|&rho| {
            let mut acc = [0.0; 5];
            for &k in &nb {
                let a = &v.atoms()[k];
                let d = &a.x - x0;
                let r = d.norm();
                let (phi, dphi) = cutoff.eval(r / rho);
                if phi == 0.0 && dphi == 0.0 {
                    continue;
                }
                let perp2 = if r > 0.0 {
                    a.p.apply_normal(&d).norm_squared() / (r * r)
                } else {
                    0.0
                };
                // ∂ρ φ(r/ρ) = -φ'(r/ρ) r / ρ²
                let dphi_rho = -dphi * r / (rho * rho);
                let h = field.h[k].as_ref().unwrap();
                acc[0] += a.w * phi;
                acc[1] += a.w * phi * d.dot(h);
                acc[2] += a.w * phi * perp2;
                acc[3] += a.w * dphi_rho;
                acc[4] += a.w * dphi_rho * perp2;
            }
            acc
        })
        .collect();
    Ok(MonotoneProfile {
        center: x0.clone(),
        cutoff,
        m: v.m(),
        radii: radii.to_vec(),
        i: samples.iter().map(|s| s[0]).collect(),
        l: samples.iter().map(|s| s[1]).collect(),
        j: samples.iter().map(|s| s[2]).collect(),
        di: samples.iter().map(|s| s[3]).collect(),
        dj: samples.iter().map(|s| s[4]).collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    /// Extrapolated density at ρ → 0.
    pub theta: f64,
    pub radii: Vec<f64>,
    /// `μ(B_ρ) / (ω_m ρ^m)` per radius.
    pub ratios: Vec<f64>,
}

/// Fits `μ(B_ρ)/(ω_m ρ^m) ≈ θ + cρ` over a decreasing radius sequence and
/// returns the intercept.
pub fn density_estimate(v: &DiscreteVarifold, x0: &DVector<f64>, radii: &[f64]) -> Result<DensityEstimate> {
    require_support(v, x0)?;
    if radii.len() < 2 || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "density needs at least two strictly decreasing radii".into(),
        ));
    }
    let floor = resolution_floor(v);
    if let Some(r) = radii.iter().find(|&&r| r < floor) {
        return Err(Error::InvalidArgument(format!(
            "radius {r:e} is below the resolution floor {floor:e}"
        )));
    }
    let wm = unit_ball_volume(v.m());
    let ratios: Vec<f64> = radii
        .iter()
        .map(|&r| v.ball_mass(x0, r) / (wm * r.powi(v.m() as i32)))
        .collect();
    let n = radii.len() as f64;
    let mx = radii.iter().sum::<f64>() / n;
    let my = ratios.iter().sum::<f64>() / n;
    let sxx: f64 = radii.iter().map(|r| (r - mx).powi(2)).sum();
    let sxy: f64 = radii.iter().zip(&ratios).map(|(r, y)| (r - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(DensityEstimate {
        theta: my - slope * mx,
        radii: radii.to_vec(),
        ratios,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lemma {
    /// |V| ≤ (d/m)^p ∫|H|^p.
    #[serde(rename = "A<dH")]
    MassByDiameter,
    /// d ≤ C (∫|H|^p)^{(m-1)/p} |V|^{1-(m-1)/p}, connected support.
    #[serde(rename = "d<AH")]
    DiameterUpper,
    /// d ≥ 1 / (C (∫|H|^p)^{1/(p-m)}).
    #[serde(rename = "d>H")]
    DiameterLower,
    /// |V| ≥ 1 / (C (∫|H|^p)^{m/(p-m)}).
    #[serde(rename = "A>H")]
    MassLower,
    #[serde(rename = "FundIn")]
    Fundamental,
    #[serde(rename = "LocMF")]
    LocalMonotonicity,
}

impl Lemma {
    pub fn tag(self) -> &'static str {
        match self {
            Self::MassByDiameter => "A<dH",
            Self::DiameterUpper => "d<AH",
            Self::DiameterLower => "d>H",
            Self::MassLower => "A>H",
            Self::Fundamental => "FundIn",
            Self::LocalMonotonicity => "LocMF",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Pass,
    Fail,
    /// The bound is vacuous for this input (e.g. ∫|H|^p = 0).
    Inapplicable,
    /// An input hypothesis of the bound does not hold.
    HypothesisViolated,
}

impl BoundStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Inapplicable => "inapplicable",
            Self::HypothesisViolated => "hypothesis-violated",
        }
    }
}

/// One evaluated inequality `lhs ≤ rhs`; `margin = rhs / lhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lemma: Lemma,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub margin: f64,
    pub status: BoundStatus,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl BoundReport {
    fn evaluate(lemma: Lemma, lhs: f64, rhs: f64, constant: f64) -> Self {
        let margin = if lhs > 0.0 {
            rhs / lhs
        } else if rhs >= 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        let status = if margin >= 1.0 && margin.is_finite() || margin == f64::INFINITY {
            BoundStatus::Pass
        } else {
            BoundStatus::Fail
        };
        Self {
            lemma,
            lhs,
            rhs,
            constant,
            margin,
            status,
            note: String::new(),
        }
    }

    fn unevaluated(lemma: Lemma, constant: f64, status: BoundStatus, note: String) -> Self {
        Self {
            lemma,
            lhs: f64::NAN,
            rhs: f64::NAN,
            constant,
            margin: f64::NAN,
            status,
            note,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == BoundStatus::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == BoundStatus::Fail
    }
}

/// CSV with header `lemma,lhs,rhs,constant,margin,pass`; the last column
/// holds the status string.
pub fn write_reports_csv<W: Write>(reports: &[BoundReport], mut out: W) -> Result<()> {
    writeln!(out, "lemma,lhs,rhs,constant,margin,pass")?;
    for r in reports {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.lemma,
            r.lhs,
            r.rhs,
            r.constant,
            r.margin,
            r.status.as_str()
        )?;
    }
    Ok(())
}

/// `p²/(p - m)`, the constant of the local monotonicity inequality.
pub fn monotonicity_constant(p: f64, m: usize) -> Result<f64> {
    require_exponent(p, m)?;
    Ok(p * p / (p - m as f64))
}

/// `C_{p,m} = (2^{p-1}/ω_m) max(1, (p²/(p-m))^p)`: letting σ → 0 in the
/// local inequality gives `[ω_m θ]^{1/p} ≤ a^{1/p} + K b^{1/p}`; concavity
/// of t^{1/p} then bounds the right side by `2^{p-1}(a + K^p b)` and θ ≥ 1
/// on the support.
pub fn fundamental_constant(p: f64, m: usize) -> Result<f64> {
    let k = monotonicity_constant(p, m)?;
    Ok(2f64.powf(p - 1.0) / unit_ball_volume(m) * k.powf(p).max(1.0))
}

/// Constant of the upper diameter bound. Summing the fundamental
/// inequality over N ≥ d/(2ρ) disjoint balls of radius ρ/2 gives
/// `d ≤ C [2^{m+1} |V| ρ^{1-m} + 2^{1+m-p} ρ^{p-m+1} ∫|H|^p]`, and the choice
/// `ρ = (m/2)(|V|/∫|H|^p)^{1/p}` (admissible by the mass-diameter bound)
/// balances both terms to the stated powers.
pub fn diameter_upper_constant(p: f64, m: usize) -> Result<f64> {
    let c = fundamental_constant(p, m)?;
    let mf = m as f64;
    let h = mf / 2.0;
    Ok(c * (2f64.powf(mf + 1.0) * h.powf(1.0 - mf) + 2f64.powf(1.0 + mf - p) * h.powf(p - mf + 1.0)))
}

/// Constant of the lower diameter bound: the fundamental inequality at
/// ρ = d with `|V| ≤ d^p m^{-p} ∫|H|^p` gives
/// `1 ≤ C (1 + m^{-p}) d^{p-m} ∫|H|^p`.
pub fn diameter_lower_constant(p: f64, m: usize) -> Result<f64> {
    let c = fundamental_constant(p, m)?;
    let mf = m as f64;
    Ok((c * (1.0 + mf.powf(-p))).powf(1.0 / (p - mf)))
}

/// Constant of the lower mass bound: inverting the upper diameter bound
/// gives `|V| ≥ (d / (C₄ E^{(m-1)/p}))^{p/(p-m+1)}`; inserting the lower
/// diameter bound collapses the exponent of E to m/(p-m), leaving
/// `(C₄ C₅)^{p/(p-m+1)}`.
pub fn mass_lower_constant(p: f64, m: usize) -> Result<f64> {
    let c4 = diameter_upper_constant(p, m)?;
    let c5 = diameter_lower_constant(p, m)?;
    Ok((c4 * c5).powf(p / (p - m as f64 + 1.0)))
}

fn ball_lp(v: &DiscreteVarifold, field: &CurvatureField, x0: &DVector<f64>, rho: f64, p: f64) -> Result<f64> {
    let idx = v.atoms_within(x0, rho);
    let mut sum = 0.0;
    let mut unset = 0;
    for k in idx {
        match &field.h[k] {
            Some(h) => sum += v.atoms()[k].w * h.norm().powf(p),
            None => unset += 1,
        }
    }
    if unset > 0 {
        return Err(Error::UnsetCurvature { count: unset });
    }
    Ok(sum)
}

/// `[σ^{-m}μ(B_σ)]^{1/p} ≤ [ρ^{-m}μ(B_ρ)]^{1/p} + K ρ^{1-m/p}(∫_{B_ρ}|H|^p)^{1/p}
/// - K σ^{1-m/p}(∫_{B_σ}|H|^p)^{1/p}` with `K = p²/(p-m)`.
pub fn check_local_monotonicity(
    v: &DiscreteVarifold,
    field: &CurvatureField,
    x0: &DVector<f64>,
    sigma: f64,
    rho: f64,
    p: f64,
) -> Result<BoundReport> {
    check_field(v, field)?;
    let m = v.m();
    let k = monotonicity_constant(p, m)?;
    if !(sigma > 0.0 && sigma < rho) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < σ < ρ, got σ = {sigma}, ρ = {rho}"
        )));
    }
    require_support(v, x0)?;
    let mi = m as i32;
    let e = 1.0 / p;
    let lhs = (v.ball_mass(x0, sigma) / sigma.powi(mi)).powf(e);
    let h_rho = ball_lp(v, field, x0, rho, p)?.powf(e);
    let h_sigma = ball_lp(v, field, x0, sigma, p)?.powf(e);
    let rhs = (v.ball_mass(x0, rho) / rho.powi(mi)).powf(e) + k * rho.powf(1.0 - m as f64 / p) * h_rho
        - k * sigma.powf(1.0 - m as f64 / p) * h_sigma;
    Ok(BoundReport::evaluate(Lemma::LocalMonotonicity, lhs, rhs, k))
}

/// Local monotonicity over many `(center, σ, ρ, p)` tuples, in parallel.
pub fn local_monotonicity_sweep(
    v: &DiscreteVarifold,
    field: &CurvatureField,
    cases: &[(DVector<f64>, f64, f64, f64)],
) -> Result<Vec<BoundReport>> {
    cases
        .par_iter()
        .map(|(x0, s, r, p)| check_local_monotonicity(v, field, x0, *s, *r, *p))
        .collect()
}

/// `1 ≤ C_{p,m} [μ(B_ρ)/ρ^m + ρ^{p-m} ∫_{B_ρ}|H|^p]` at a support point.
pub fn check_fundamental(
    v: &DiscreteVarifold,
    field: &CurvatureField,
    x0: &DVector<f64>,
    rho: f64,
    p: f64,
) -> Result<BoundReport> {
    check_field(v, field)?;
    let m = v.m();
    let c = fundamental_constant(p, m)?;
    require_support(v, x0)?;
    let floor = resolution_floor(v);
    if !(rho > floor) {
        return Err(Error::InvalidArgument(format!(
            "radius {rho:e} is not above the resolution floor {floor:e}"
        )));
    }
    let bracket = v.ball_mass(x0, rho) / rho.powi(m as i32) + rho.powf(p - m as f64) * ball_lp(v, field, x0, rho, p)?;
    Ok(BoundReport::evaluate(Lemma::Fundamental, 1.0, c * bracket, c))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundOptions {
    /// Linking radius for the connectivity hypothesis; defaults to
    /// [`DiscreteVarifold::default_link_radius`].
    pub link_radius: Option<f64>,
}

fn has_boundary(field: &CurvatureField) -> bool {
    field.near_boundary.iter().any(|&b| b)
}

/// Upper diameter bound alone; errors when the support is disconnected.
pub fn check_diameter_upper(
    v: &DiscreteVarifold,
    field: &CurvatureField,
    p: f64,
    opts: &BoundOptions,
) -> Result<BoundReport> {
    let reports = check_bounds(v, field, p, opts)?;
    let r = reports.into_iter().find(|r| r.lemma == Lemma::DiameterUpper).unwrap();
    if r.status == BoundStatus::HypothesisViolated {
        return Err(Error::Hypothesis {
            lemma: "d<AH",
            hypothesis: r.note,
        });
    }
    Ok(r)
}

/// The four global bounds, in the order A<dH, d<AH, d>H, A>H.
///
/// Atoms flagged `near_boundary` mean the first variation has a boundary
/// part not represented by H; the bounds that need a closed varifold are
/// then reported as hypothesis violations. A vanishing ∫|H|^p makes the
/// lower bounds vacuous.
pub fn check_bounds(
    v: &DiscreteVarifold,
    field: &CurvatureField,
    p: f64,
    opts: &BoundOptions,
) -> Result<Vec<BoundReport>> {
    check_field(v, field)?;
    let m = v.m();
    let mf = m as f64;
    require_exponent(p, m)?;
    let c4 = diameter_upper_constant(p, m)?;
    let c5 = diameter_lower_constant(p, m)?;
    let c6 = mass_lower_constant(p, m)?;
    let mass = v.mass();
    let d = v.support_diameter(Metric::Euclidean)?;
    let e = lp_norm(field, v, p, Component::Euclidean, false)?;
    let boundary = has_boundary(field);
    // curvature away from the boundary, made scale free; vanishing means
    // the lower bounds are vacuous
    let e_interior: f64 = v
        .atoms()
        .iter()
        .zip(&field.h)
        .zip(&field.near_boundary)
        .filter(|(_, &b)| !b)
        .map(|((a, h), _)| a.w * h.as_ref().map_or(0.0, |h| h.norm().powf(p)))
        .sum();
    let vacuous = e_interior * mass.powf((p - mf) / mf) <= 1e-12;
    let boundary_note = || "support has a boundary; the first variation is not given by H alone".to_string();
    let mut out = Vec::with_capacity(4);

    // |V| ≤ (d/m)^p E
    out.push(if boundary {
        BoundReport::unevaluated(
            Lemma::MassByDiameter,
            1.0,
            BoundStatus::HypothesisViolated,
            boundary_note(),
        )
    } else {
        BoundReport::evaluate(Lemma::MassByDiameter, mass, (d / mf).powf(p) * e, 1.0)
    });

    let link = opts.link_radius.unwrap_or_else(|| v.default_link_radius());
    let components = v.component_indices(link).len();
    out.push(if components > 1 {
        BoundReport::unevaluated(
            Lemma::DiameterUpper,
            c4,
            BoundStatus::HypothesisViolated,
            format!("support is not connected ({components} components at link radius {link:e})"),
        )
    } else if boundary {
        BoundReport::unevaluated(
            Lemma::DiameterUpper,
            c4,
            BoundStatus::HypothesisViolated,
            boundary_note(),
        )
    } else if vacuous {
        BoundReport::unevaluated(Lemma::DiameterUpper, c4, BoundStatus::Inapplicable, "∫|H|^p = 0".into())
    } else {
        let rhs = c4 * e.powf((mf - 1.0) / p) * mass.powf(1.0 - (mf - 1.0) / p);
        BoundReport::evaluate(Lemma::DiameterUpper, d, rhs, c4)
    });

    if vacuous {
        for (lemma, c) in [(Lemma::DiameterLower, c5), (Lemma::MassLower, c6)] {
            out.push(BoundReport::unevaluated(
                lemma,
                c,
                BoundStatus::Inapplicable,
                "∫|H|^p = 0".into(),
            ));
        }
    } else {
        let d_low = 1.0 / (c5 * e.powf(1.0 / (p - mf)));
        let mut r = BoundReport::evaluate(Lemma::DiameterLower, d_low, d, c5);
        if boundary {
            r.status = BoundStatus::HypothesisViolated;
            r.note = boundary_note();
        }
        out.push(r);
        let m_low = 1.0 / (c6 * e.powf(mf / (p - mf)));
        let mut r = BoundReport::evaluate(Lemma::MassLower, m_low, mass, c6);
        if boundary {
            r.status = BoundStatus::HypothesisViolated;
            r.note = boundary_note();
        }
        out.push(r);
    }
    Ok(out)
}
