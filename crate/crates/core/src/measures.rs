//! Entanglement quantifiers for reduced states of the cluster.

use std::fmt;

use thiserror::Error;

use crate::linalg::{self, herm_eig, ComplexMatrix, LinalgError, C64};
use crate::model::{Site, StateVector};

/// Default tolerance for density-matrix validation.
pub const DENSITY_TOLERANCE: f64 = 1e-10;
/// Normalization tolerance for pure two-qubit amplitudes.
pub const PURE_NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("two-qubit measure applied to a {0}-dimensional state")]
    NotTwoQubit(usize),
    #[error("negative spectrum: eigenvalue {0:e}")]
    NegativeSpectrum(f64),
    #[error("pure-state amplitudes have norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("logarithm base {0} must exceed 1")]
    InvalidBase(f64),
    #[error("concurrence {0} lies outside [0, 1]")]
    OutOfRange(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, MeasureError>;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    tol: f64,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(MeasureError::InvalidDensity(format!(
                "{}x{} is not square",
                mat.rows(),
                mat.cols()
            )));
        }
        let defect = mat.hermitian_defect();
        if defect > tol {
            return Err(MeasureError::InvalidDensity(format!(
                "Hermitian defect {defect:e} exceeds {tol:e}"
            )));
        }
        let tr = mat.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(MeasureError::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let lowest = herm_eig(&mat, tol)?.eigenvalues[0];
        if lowest < -tol {
            return Err(MeasureError::NegativeSpectrum(lowest));
        }
        Ok(Self { mat, tol })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Eigenvalues ascending, with the PSD clamp applied.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        herm_eig(&self.mat, self.tol)?
            .eigenvalues
            .into_iter()
            .map(|l| linalg::clamp_psd(l).map_err(MeasureError::from))
            .collect()
    }
}

/// A split of the four sites into a kept and a traced-out set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    kept: Vec<Site>,
    traced: Vec<Site>,
}

impl Bipartition {
    pub fn keep(sites: &[Site]) -> Result<Self> {
        let mut kept = sites.to_vec();
        kept.sort();
        kept.dedup();
        if kept.len() != sites.len() {
            return Err(MeasureError::InvalidBipartition(format!("duplicate site in {sites:?}")));
        }
        if kept.is_empty() || kept.len() == Site::ALL.len() {
            return Err(MeasureError::InvalidBipartition(
                "both halves must be non-empty".into(),
            ));
        }
        let traced = Site::ALL.iter().copied().filter(|s| !kept.contains(s)).collect();
        Ok(Self { kept, traced })
    }

    pub fn central_pair() -> Self {
        Self::keep(&[Site::A, Site::B]).expect("valid")
    }

    pub fn side_pair() -> Self {
        Self::keep(&[Site::One, Site::Two]).expect("valid")
    }

    pub fn single(site: Site) -> Self {
        Self::keep(&[site]).expect("valid")
    }

    pub fn kept(&self) -> &[Site] {
        &self.kept
    }

    pub fn traced(&self) -> &[Site] {
        &self.traced
    }

    /// The same split with the roles of the halves exchanged.
    pub fn complement(&self) -> Self {
        Self {
            kept: self.traced.clone(),
            traced: self.kept.clone(),
        }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &[Site]| s.iter().map(|x| x.label()).collect::<String>();
        write!(f, "{}|{}", join(&self.kept), join(&self.traced))
    }
}

/// Reduced state of the kept sites.
pub fn reduce(state: &StateVector, bp: &Bipartition) -> Result<DensityMatrix> {
    let traced: Vec<usize> = bp.traced.iter().map(|s| s.position()).collect();
    let rho = linalg::partial_trace(&state.projector(), &[2, 2, 2, 2], &traced)?;
    DensityMatrix::new(rho, DENSITY_TOLERANCE)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// Square roots of the spectrum of `ρρ̃`, descending.
    pub omegas: [f64; 4],
}

impl ConcurrenceResult {
    pub fn from_omegas(mut omegas: [f64; 4]) -> Self {
        omegas.sort_by(|a, b| b.total_cmp(a));
        let value = (omegas[0] - omegas[1] - omegas[2] - omegas[3]).max(0.0);
        Self { value, omegas }
    }
}

/// `σ^y ⊗ σ^y`.
pub fn spin_flip_operator() -> ComplexMatrix {
    linalg::kron(&linalg::pauli::y(), &linalg::pauli::y())
}

/// `ρ̃ = (σ^y⊗σ^y) ρ* (σ^y⊗σ^y)`.
pub fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    let yy = spin_flip_operator();
    &(&yy * &rho.conj()) * &yy
}

/// Wootters concurrence of a two-qubit mixed state.
///
/// The ω are the eigenvalues of `R = sqrt(√ρ ρ̃ √ρ)`. Since
/// `√ρ ρ̃ √ρ = M M†` with `M = √ρ (σ^y⊗σ^y) √ρ*`, they are the singular values of
/// `M`, read off as the non-negative half of the spectrum of the Hermitian
/// dilation `[[0, M], [M†, 0]]`. This avoids taking square roots of
/// near-zero eigenvalues of `√ρ ρ̃ √ρ`.
pub fn concurrence_mixed(rho: &DensityMatrix) -> Result<ConcurrenceResult> {
    if rho.dim() != 4 {
        return Err(MeasureError::NotTwoQubit(rho.dim()));
    }
    let sqrt_rho = linalg::psd_sqrt(rho.matrix(), rho.tolerance())?;
    let m = &(&sqrt_rho * &spin_flip_operator()) * &sqrt_rho.conj();

    let mut dilation = ComplexMatrix::zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            dilation[(i, 4 + j)] = m[(i, j)];
            dilation[(4 + j, i)] = m[(i, j)].conj();
        }
    }
    let eig = herm_eig(&dilation, 1e-12)?;
    let mut omegas = [0.0; 4];
    for (k, w) in omegas.iter_mut().enumerate() {
        *w = eig.eigenvalues[7 - k].max(0.0);
    }
    Ok(ConcurrenceResult::from_omegas(omegas))
}

/// `2|ad − bc|` for `a|↑↑⟩ + b|↑↓⟩ + c|↓↑⟩ + d|↓↓⟩`.
pub fn concurrence_pure(amps: [C64; 4]) -> Result<f64> {
    let norm = linalg::vec_norm(&amps);
    if (norm - 1.0).abs() > PURE_NORM_TOLERANCE {
        return Err(MeasureError::NotNormalized(norm));
    }
    let [a, b, c, d] = amps;
    Ok(2.0 * (a * d - b * c).norm())
}

/// `−Σ λ log_base λ` over the clamped spectrum.
pub fn vn_entropy(rho: &DensityMatrix, log_base: f64) -> Result<f64> {
    if !(log_base.is_finite() && log_base > 1.0) {
        return Err(MeasureError::InvalidBase(log_base));
    }
    Ok(entropy_of_spectrum(&rho.spectrum()?, log_base))
}

/// Shannon entropy of a probability vector; `0·log 0 = 0`.
pub fn entropy_of_spectrum(probs: &[f64], log_base: f64) -> f64 {
    let s: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    (s / log_base.ln()).max(0.0)
}

/// Entanglement of formation of a two-qubit state with concurrence `c`, in bits.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(MeasureError::OutOfRange(c));
    }
    let r = (1.0 - c * c).max(0.0).sqrt();
    Ok(entropy_of_spectrum(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0], 2.0))
}

/// Two-qubit entanglement of formation via the concurrence.
pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence_mixed(rho)?.value;
    eof_from_concurrence(c.min(1.0))
}
