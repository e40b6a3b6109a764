//! Closed-form results for the cluster prepared in the +x product state.
//!
//! All formulas here are functions of two time-dependent quantities,
//! `A = e^{−i(J_z−J)t/2}` and `B = cos(J_0 t)`, plus the phases generated by
//! the fields. They double as fast paths and as independent targets for the
//! numerical pipeline in [`crate::measures`].

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::linalg::{self, herm_eig, ComplexMatrix, C64};
use crate::measures::{self, ConcurrenceResult, DensityMatrix, MeasureError};
use crate::model::ClusterParams;

/// Residual allowed when matching a numerical eigenvalue to the cubic.
pub const CUBIC_RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Absolute tolerance on `t` when matching extremum times.
pub const EXTREMUM_TIME_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("negative discriminant {0:e} in the quadratic for ω²")]
    NegativeDiscriminant(f64),
    #[error("eigenvalue {eigenvalue} fits neither the cubic (residual {residual:e}) nor zero")]
    ResidualTooLarge { eigenvalue: f64, residual: f64 },
    #[error("degenerate coupling: {0} vanishes")]
    DegenerateCoupling(&'static str),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

pub type Result<T> = std::result::Result<T, ClosedFormError>;

/// `A`, `B` and the data needed to rebuild the field phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormTerms {
    pub a_phase: C64,
    pub b_cos: f64,
    pub t: f64,
    pub params: ClusterParams,
}

impl ClosedFormTerms {
    pub fn new(params: &ClusterParams, t: f64) -> Self {
        Self {
            a_phase: C64::from_polar(1.0, -params.anisotropy() * t / 2.0),
            b_cos: (params.j0 * t).cos(),
            t,
            params: *params,
        }
    }

    /// `cos((J_z − J)t) = (A² + A*²)/2`, minus one, computed as `−2 (Im A)²`.
    fn cos_anisotropy_minus_one(&self) -> f64 {
        -2.0 * self.a_phase.im * self.a_phase.im
    }
}

/// Reduced state of the central pair.
pub fn rho_ab_closed(terms: &ClosedFormTerms) -> Result<DensityMatrix> {
    let a = terms.a_phase;
    let b = terms.b_cos;
    let field = |k: f64| C64::from_polar(1.0, -k * terms.params.hp * terms.t);
    let edge = (1.0 + b) / 8.0;
    let quarter = C64::new(0.25, 0.0);

    let top = field(1.0) * a * edge;
    let side = field(1.0) * a.conj() * edge;
    let corner = field(2.0) * (b * b / 4.0);
    #[rustfmt::skip]
    let entries = vec![
        quarter,      top,          top,          corner,
        top.conj(),   quarter,      quarter,      side,
        top.conj(),   quarter,      quarter,      side,
        corner.conj(), side.conj(), side.conj(),  quarter,
    ];
    let mat = ComplexMatrix::from_vec(4, 4, entries).expect("4x4");
    Ok(DensityMatrix::new(mat, measures::DENSITY_TOLERANCE)?)
}

/// The four ω of the central pair from the characteristic equations of `ρρ̃`.
///
/// Besides `ω = 0` and `ω = |1 − B²|/4`, the remaining pair solves
/// `ω⁴ + pω² + q = 0`. With `c = cos((J_z−J)t)` the discriminant factors as
/// `p² − 4q = (1+B)²/256 · F₁F₂` where
/// `F₁ = 2(c−1) − (1−B)²` and `F₂ = 2(c−1)(1+B)² − (1−B)²(B² + 2B + 5)`,
/// both non-positive; evaluating the factors avoids the cancellation in
/// `p² − 4q` near `B = ±1`. The small root is taken as `q / ω²_large`.
pub fn omegas_ab_closed(terms: &ClosedFormTerms) -> Result<[f64; 4]> {
    let b = terms.b_cos;
    let cm1 = terms.cos_anisotropy_minus_one();
    let one_minus_b = 1.0 - b;
    let one_plus_b = 1.0 + b;

    let f1 = 2.0 * cm1 - one_minus_b * one_minus_b;
    let f2 = 2.0 * cm1 * one_plus_b * one_plus_b - one_minus_b * one_minus_b * (b * b + 2.0 * b + 5.0);
    let mut disc = one_plus_b * one_plus_b * f1 * f2 / 256.0;
    if disc < 0.0 {
        if disc < -1e-10 {
            return Err(ClosedFormError::NegativeDiscriminant(disc));
        }
        disc = 0.0;
    }
    // −p = [(1−B)²(B² + 2B + 3) − 2(c−1)(1+B)²] / 16 ≥ 0
    let minus_p = (one_minus_b * one_minus_b * (b * b + 2.0 * b + 3.0) - 2.0 * cm1 * one_plus_b * one_plus_b) / 16.0;
    let q = one_minus_b.powi(4) / 256.0;
    let large = (minus_p + disc.sqrt()) / 2.0;
    let small = if large > 0.0 { q / large } else { 0.0 };

    Ok([
        0.0,
        (1.0 - b * b).abs() / 4.0,
        large.max(0.0).sqrt(),
        small.max(0.0).sqrt(),
    ])
}

/// Central-pair concurrence from the closed-form ω.
pub fn concurrence_ab_closed(terms: &ClosedFormTerms) -> Result<f64> {
    Ok(ConcurrenceResult::from_omegas(omegas_ab_closed(terms)?).value)
}

/// Coefficients, highest degree first, of the cubic in `μ = 1/4 − λ` whose
/// roots are the eigenvalues of the central-pair state outside the singlet.
pub fn cubic_coefficients(b: f64) -> [f64; 4] {
    [
        1.0,
        0.25,
        -(b.powi(4) + (1.0 + b) * (1.0 + b)) / 16.0,
        b * b * (1.0 + 2.0 * b) / 64.0,
    ]
}

/// `|cubic(1/4 − λ)|`.
pub fn cubic_residual(b: f64, lambda: f64) -> f64 {
    linalg::poly_residual(&cubic_coefficients(b), 0.25 - lambda)
}

/// Eigenvalues of the central-pair state, each checked against the cubic.
pub fn rho_ab_spectrum_checked(terms: &ClosedFormTerms) -> Result<Vec<f64>> {
    let rho = rho_ab_closed(terms)?;
    let eig = herm_eig(rho.matrix(), rho.tolerance()).map_err(MeasureError::from)?;
    for &lambda in &eig.eigenvalues {
        let residual = cubic_residual(terms.b_cos, lambda);
        if residual > CUBIC_RESIDUAL_TOLERANCE && lambda.abs() > CUBIC_RESIDUAL_TOLERANCE {
            return Err(ClosedFormError::ResidualTooLarge {
                eigenvalue: lambda,
                residual,
            });
        }
    }
    eig.eigenvalues
        .into_iter()
        .map(|l| linalg::clamp_psd(l).map_err(|e| MeasureError::from(e).into()))
        .collect()
}

/// Entropy of the central pair (equivalently of the side pair).
pub fn entropy_ab12_closed(terms: &ClosedFormTerms, log_base: f64) -> Result<f64> {
    if !(log_base.is_finite() && log_base > 1.0) {
        return Err(MeasureError::InvalidBase(log_base).into());
    }
    let spectrum = rho_ab_spectrum_checked(terms)?;
    Ok(measures::entropy_of_spectrum(&spectrum, log_base))
}

/// Spectrum `(1 ± cos((J_z−J)t/2)·cos²(J_0t/2))/2` of one central spin.
pub fn lambda_pm_spin_a(p: &ClusterParams, t: f64) -> (f64, f64) {
    let x = (p.anisotropy() * t / 2.0).cos() * (p.j0 * t / 2.0).cos().powi(2);
    ((1.0 + x) / 2.0, (1.0 - x) / 2.0)
}

/// Spectrum `(1 ± cos²(J_0t/2))/2` of one side spin.
pub fn lambda_pm_spin_1(p: &ClusterParams, t: f64) -> (f64, f64) {
    let x = (p.j0 * t / 2.0).cos().powi(2);
    ((1.0 + x) / 2.0, (1.0 - x) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremumPrediction {
    pub kind: ExtremumKind,
    /// Sorted, de-duplicated times.
    pub times: Vec<f64>,
    pub n_range: RangeInclusive<u32>,
}

/// `true` if `freq·t ≡ offset (mod 2π)` with `t` matched to within `EXTREMUM_TIME_TOLERANCE`.
fn congruent(t: f64, freq: f64, offset: f64) -> bool {
    if freq == 0.0 {
        return false;
    }
    let period = 2.0 * PI / freq.abs();
    let shifted = t - offset / freq.abs();
    let k = (shifted / period).round();
    (shifted - k * period).abs() <= EXTREMUM_TIME_TOLERANCE
}

/// Whether `t` is a vanishing point of the central-pair concurrence.
pub fn is_concurrence_zero_time(p: &ClusterParams, t: f64) -> bool {
    congruent(t, p.anisotropy(), 0.0) || congruent(t, p.j0, PI)
}

/// Times at which the central-pair concurrence vanishes (`Min`) or peaks (`Max`).
///
/// Minima: `(J_z−J)t = 2nπ` and `J_0t = (2n+1)π`. Maxima: `(J_z−J)t = (2n+1)π`
/// and `J_0t = 2nπ`, dropping any time that is also a minimum. Both branches
/// use `n = 0..=n_max`; the `J_0` branch is absent when `J_0 = 0`.
pub fn predict_extrema(p: &ClusterParams, kind: ExtremumKind, n_max: u32) -> Result<ExtremumPrediction> {
    let w = p.anisotropy().abs();
    if w == 0.0 {
        return Err(ClosedFormError::DegenerateCoupling("Jz - J"));
    }
    let w0 = p.j0.abs();
    let (anis_offset, j0_offset) = match kind {
        ExtremumKind::Min => (0.0, PI),
        ExtremumKind::Max => (PI, 0.0),
    };
    let mut times = Vec::new();
    for n in 0..=n_max {
        let base = 2.0 * PI * n as f64;
        times.push((base + anis_offset) / w);
        if w0 > 0.0 {
            times.push((base + j0_offset) / w0);
        }
    }
    if kind == ExtremumKind::Max {
        times.retain(|&t| !is_concurrence_zero_time(p, t));
    }
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= EXTREMUM_TIME_TOLERANCE);
    Ok(ExtremumPrediction {
        kind,
        times,
        n_range: 0..=n_max,
    })
}
