//! The four-spin diamond cluster.
//!
//! Sites are ordered `(1, 2, a, b)`; `1` and `2` are the side spins, `a` and
//! `b` the central pair. A basis state `|s1 s2 sa sb⟩` has index
//! `8·s1 + 4·s2 + 2·sa + sb` with spin up mapped to 0. Spin operators are
//! `S^i = σ^i / 2` and ħ = 1, so every coupling is a frequency.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, kron, pauli, ComplexMatrix, HermitianEigen, LinalgError, C64};

/// Full Hilbert-space dimension.
pub const DIM: usize = 16;
/// Tolerance on the norm of a [`StateVector`].
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter {name} is not finite: {value}")]
    NonFiniteParameter { name: &'static str, value: f64 },
    #[error("state vector must have {DIM} amplitudes, got {0}")]
    WrongLength(usize),
    #[error("state vector norm {0} differs from 1")]
    NotNormalized(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Couplings and fields of the cluster Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterParams {
    /// XY exchange `J` between `a` and `b`.
    pub j: f64,
    /// Ising exchange `J_z` between `a` and `b`.
    pub jz: f64,
    /// Ising coupling `J_0` between the central and the side spins.
    pub j0: f64,
    /// Field on the side spins.
    pub h: f64,
    /// Field `h′` on the central spins.
    pub hp: f64,
}

impl ClusterParams {
    pub fn new(j: f64, jz: f64, j0: f64, h: f64, hp: f64) -> Result<Self, ModelError> {
        let p = Self { j, jz, j0, h, hp };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("j", self.j),
            ("jz", self.jz),
            ("j0", self.j0),
            ("h", self.h),
            ("hp", self.hp),
        ] {
            if !value.is_finite() {
                return Err(ModelError::NonFiniteParameter { name, value });
            }
        }
        Ok(())
    }

    /// `J_z − J`, the frequency that drives the central-pair entanglement.
    pub fn anisotropy(&self) -> f64 {
        self.jz - self.j
    }

    pub fn with_fields(self, h: f64, hp: f64) -> Self {
        Self { h, hp, ..self }
    }
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            j: 0.0,
            jz: 1.0,
            j0: 0.0,
            h: 0.0,
            hp: 0.0,
        }
    }
}

/// One of the four lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Site {
    One,
    Two,
    A,
    B,
}

impl Site {
    pub const ALL: [Site; 4] = [Site::One, Site::Two, Site::A, Site::B];

    /// Position in the tensor-product order (0 is most significant).
    pub fn position(self) -> usize {
        match self {
            Site::One => 0,
            Site::Two => 1,
            Site::A => 2,
            Site::B => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Site::One => "1",
            Site::Two => "2",
            Site::A => "a",
            Site::B => "b",
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn bit(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// Basis index of `|s1 s2 sa sb⟩`.
pub fn basis_index(s1: Spin, s2: Spin, sa: Spin, sb: Spin) -> usize {
    8 * s1.bit() + 4 * s2.bit() + 2 * sa.bit() + sb.bit()
}

/// Normalized 16-component state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<C64>);

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self, ModelError> {
        if amps.len() != DIM {
            return Err(ModelError::WrongLength(amps.len()));
        }
        let norm = linalg::vec_norm(&amps);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(ModelError::NotNormalized(norm));
        }
        Ok(Self(amps))
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amps: Vec<C64>) -> Result<Self, ModelError> {
        let norm = linalg::vec_norm(&amps);
        if norm == 0.0 || !norm.is_finite() {
            return Err(ModelError::NotNormalized(norm));
        }
        Self::new(amps.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); DIM];
        amps[index] = C64::new(1.0, 0.0);
        Self(amps)
    }

    pub fn amps(&self) -> &[C64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        linalg::vec_norm(&self.0)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        linalg::max_abs_diff(&self.0, &other.0)
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.0, &self.0)
    }

    // Propagated states keep unit norm up to round-off; skip the check.
    pub(crate) fn from_raw(amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), DIM);
        Self(amps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `S^axis` acting on `site` in the full 16-dimensional space.
pub fn spin_operator(site: Site, axis: Axis) -> ComplexMatrix {
    let single = match axis {
        Axis::X => pauli::x(),
        Axis::Y => pauli::y(),
        Axis::Z => pauli::z(),
    }
    .scale(C64::new(0.5, 0.0));
    let id = ComplexMatrix::identity(2);
    Site::ALL
        .iter()
        .map(|&s| if s == site { single.clone() } else { id.clone() })
        .reduce(|acc, m| kron(&acc, &m))
        .expect("four sites")
}

/// The three mutually commuting pieces of the Hamiltonian.
#[derive(Debug, Clone)]
pub struct HamiltonianTerms {
    /// XXZ exchange between `a` and `b` plus the field `h′` on them.
    pub central: ComplexMatrix,
    /// Field `h` on the side spins.
    pub side: ComplexMatrix,
    /// Ising coupling `J_0 (S_a^z + S_b^z)(S_1^z + S_2^z)`.
    pub interaction: ComplexMatrix,
}

impl HamiltonianTerms {
    pub fn total(&self) -> ComplexMatrix {
        &(&self.central + &self.side) + &self.interaction
    }

    /// Largest entry of the three pairwise commutators.
    pub fn max_commutator(&self) -> f64 {
        let pairs = [
            (&self.central, &self.side),
            (&self.central, &self.interaction),
            (&self.side, &self.interaction),
        ];
        pairs
            .iter()
            .map(|(x, y)| x.commutator(y).expect("square").max_abs())
            .fold(0.0, f64::max)
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn hamiltonian_terms(p: &ClusterParams) -> HamiltonianTerms {
    let op = spin_operator;
    let xx = &op(Site::A, Axis::X) * &op(Site::B, Axis::X);
    let yy = &op(Site::A, Axis::Y) * &op(Site::B, Axis::Y);
    let zz = &op(Site::A, Axis::Z) * &op(Site::B, Axis::Z);
    let sz_central = &op(Site::A, Axis::Z) + &op(Site::B, Axis::Z);
    let sz_side = &op(Site::One, Axis::Z) + &op(Site::Two, Axis::Z);

    let central = &(&(&xx + &yy).scale(real(p.j)) + &zz.scale(real(p.jz))) + &sz_central.scale(real(p.hp));
    let side = sz_side.scale(real(p.h));
    let interaction = (&sz_central * &sz_side).scale(real(p.j0));
    HamiltonianTerms {
        central,
        side,
        interaction,
    }
}

/// The 16×16 cluster Hamiltonian assembled from single-site operators.
pub fn build_hamiltonian(p: &ClusterParams) -> ComplexMatrix {
    hamiltonian_terms(p).total()
}

/// Energies and eigenstates of the cluster, in closed form.
#[derive(Debug, Clone)]
pub struct EigenTable {
    entries: Vec<(f64, StateVector)>,
}

impl EigenTable {
    /// Wraps arbitrary `(energy, state)` pairs; used for fault-injection fixtures.
    pub fn from_entries(entries: Vec<(f64, StateVector)>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[(f64, StateVector)] {
        &self.entries
    }

    pub fn energies(&self) -> Vec<f64> {
        self.entries.iter().map(|(e, _)| *e).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns a copy with energy `index` (0-based) shifted by `delta`.
    pub fn with_energy_offset(&self, index: usize, delta: f64) -> Self {
        let mut entries = self.entries.clone();
        entries[index].0 += delta;
        Self { entries }
    }

    /// `max_n ‖Hψ_n − E_nψ_n‖_max` against a numerical Hamiltonian.
    pub fn max_residual(&self, h: &ComplexMatrix) -> f64 {
        self.entries
            .iter()
            .map(|(e, psi)| {
                let hpsi = h.matvec(psi.amps()).expect("dimension 16");
                hpsi.iter()
                    .zip(psi.amps())
                    .map(|(a, b)| (a - b * e).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `max |⟨ψ_m|ψ_n⟩ − δ_mn|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, (_, a)) in self.entries.iter().enumerate() {
            for (n, (_, b)) in self.entries.iter().enumerate() {
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }
}

/// Closed-form energies `E_1 … E_16`.
pub fn analytic_energies(p: &ClusterParams) -> [f64; DIM] {
    let ClusterParams { j, jz, j0, h, hp } = *p;
    // side-spin sector: (field energy, magnetization S_1^z + S_2^z)
    let sectors = [(h, 1.0), (0.0, 0.0), (0.0, 0.0), (-h, -1.0)];
    let mut out = [0.0; DIM];
    for (k, &(field, m)) in sectors.iter().enumerate() {
        out[4 * k] = field + jz / 4.0 + hp + j0 * m;
        out[4 * k + 1] = field + j / 2.0 - jz / 4.0;
        out[4 * k + 2] = field - j / 2.0 - jz / 4.0;
        out[4 * k + 3] = field + jz / 4.0 - hp - j0 * m;
    }
    out
}

/// The sixteen product-form eigenstates: side spins in `|↑↑⟩,|↑↓⟩,|↓↑⟩,|↓↓⟩`
/// times central `|↑↑⟩`, triplet, singlet, `|↓↓⟩`.
pub fn analytic_eigensystem(p: &ClusterParams) -> EigenTable {
    let energies = analytic_energies(p);
    let s = FRAC_1_SQRT_2;
    let central: [&[(usize, f64)]; 4] = [
        &[(0, 1.0)],
        &[(1, s), (2, s)],
        &[(1, s), (2, -s)],
        &[(3, 1.0)],
    ];
    let mut entries = Vec::with_capacity(DIM);
    for side in 0..4 {
        for (k, comps) in central.iter().enumerate() {
            let mut amps = vec![C64::new(0.0, 0.0); DIM];
            for &(idx, val) in comps.iter() {
                amps[4 * side + idx] = real(val);
            }
            entries.push((energies[4 * side + k], StateVector::from_raw(amps)));
        }
    }
    EigenTable { entries }
}

/// Every spin polarized along +x: all amplitudes 1/4.
pub fn initial_plus_x() -> StateVector {
    StateVector::from_raw(vec![real(0.25); DIM])
}

/// Expansion coefficients `C_n = ⟨ψ_n|v⟩`.
pub fn decompose(v: &StateVector, table: &EigenTable) -> Vec<C64> {
    table.entries.iter().map(|(_, psi)| psi.inner(v)).collect()
}

/// `Σ_n C_n e^{-iE_n t} ψ_n` for precomputed coefficients.
pub fn evolve_coefficients(coeffs: &[C64], table: &EigenTable, t: f64) -> StateVector {
    let mut amps = vec![C64::new(0.0, 0.0); DIM];
    for (c, (e, psi)) in coeffs.iter().zip(&table.entries) {
        if *c == C64::new(0.0, 0.0) {
            continue;
        }
        let w = c * C64::from_polar(1.0, -e * t);
        for (a, b) in amps.iter_mut().zip(psi.amps()) {
            *a += w * b;
        }
    }
    StateVector::from_raw(amps)
}

pub fn evolve_with_table(v: &StateVector, table: &EigenTable, t: f64) -> StateVector {
    evolve_coefficients(&decompose(v, table), table, t)
}

/// Time evolution through the closed-form eigensystem.
pub fn evolve_analytic(v: &StateVector, p: &ClusterParams, t: f64) -> StateVector {
    evolve_with_table(v, &analytic_eigensystem(p), t)
}

/// Time evolution through a numerical eigendecomposition of the assembled Hamiltonian.
pub fn evolve_oracle(v: &StateVector, p: &ClusterParams, t: f64) -> Result<StateVector, ModelError> {
    let h = build_hamiltonian(p);
    Ok(StateVector::from_raw(linalg::herm_expm_apply(&h, t, v.amps())?))
}

/// Reusable numerical propagator for many times at fixed parameters.
#[derive(Debug, Clone)]
pub struct OraclePropagator {
    eig: HermitianEigen,
}

impl OraclePropagator {
    pub fn new(p: &ClusterParams) -> Result<Self, ModelError> {
        let h = build_hamiltonian(p);
        let eig = linalg::herm_eig(&h, 1e-12 * h.max_abs().max(1.0))?;
        Ok(Self { eig })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn evolve(&self, v: &StateVector, t: f64) -> StateVector {
        StateVector::from_raw(linalg::apply_spectral_propagator(&self.eig, t, v.amps()))
    }
}

/// Permutation of the basis induced by swapping two sites.
pub fn site_swap(x: Site, y: Site) -> ComplexMatrix {
    let (px, py) = (3 - x.position(), 3 - y.position());
    let mut m = ComplexMatrix::zeros(DIM, DIM);
    for idx in 0..DIM {
        let bx = (idx >> px) & 1;
        let by = (idx >> py) & 1;
        let swapped = (idx & !(1 << px) & !(1 << py)) | (by << px) | (bx << py);
        m[(swapped, idx)] = real(1.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    fn sample_params(rng: &mut ChaCha8Rng) -> ClusterParams {
        let mut u = || rng.random_range(-10.0..10.0);
        ClusterParams::new(u(), u(), u(), u(), u()).unwrap()
    }

    fn reference() -> ClusterParams {
        ClusterParams::new(1.0, 2.0, 0.5, 0.3, 0.2).unwrap()
    }

    #[test]
    fn zero_params_give_zero_matrix() {
        let h = build_hamiltonian(&ClusterParams::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap());
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn all_up_diagonal_entry() {
        let p = reference();
        let h = build_hamiltonian(&p);
        let idx = basis_index(Spin::Up, Spin::Up, Spin::Up, Spin::Up);
        let e1 = p.h + p.jz / 4.0 + p.hp + p.j0;
        assert!((h[(idx, idx)].re - e1).abs() < 1e-15);
        assert_eq!(analytic_energies(&p)[0], e1);
    }

    #[test]
    fn tabulated_energies() {
        let p = reference();
        let e = analytic_energies(&p);
        let (j, jz, j0, h, hp) = (p.j, p.jz, p.j0, p.h, p.hp);
        let expected = [
            h + jz / 4.0 + hp + j0,
            h + j / 2.0 - jz / 4.0,
            h - j / 2.0 - jz / 4.0,
            h + jz / 4.0 - hp - j0,
            jz / 4.0 + hp,
            j / 2.0 - jz / 4.0,
            -j / 2.0 - jz / 4.0,
            jz / 4.0 - hp,
            jz / 4.0 + hp,
            j / 2.0 - jz / 4.0,
            -j / 2.0 - jz / 4.0,
            jz / 4.0 - hp,
            -h + jz / 4.0 + hp - j0,
            -h + j / 2.0 - jz / 4.0,
            -h - j / 2.0 - jz / 4.0,
            -h + jz / 4.0 - hp + j0,
        ];
        for (a, b) in e.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(e[6], -j / 2.0 - jz / 4.0);
    }

    #[test]
    fn numeric_spectrum_matches_table() {
        let p = reference();
        let h = build_hamiltonian(&p);
        let eig = linalg::herm_eig(&h, 1e-12).unwrap();
        let mut analytic = analytic_energies(&p).to_vec();
        analytic.sort_by(f64::total_cmp);
        for (a, b) in eig.eigenvalues.iter().zip(&analytic) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn singlet_state_amplitudes() {
        let table = analytic_eigensystem(&reference());
        let psi3 = table.entries()[2].1.amps();
        assert!((psi3[1].re - FRAC_1_SQRT_2).abs() < 1e-16);
        assert!((psi3[2].re + FRAC_1_SQRT_2).abs() < 1e-16);
        assert_eq!(psi3.iter().filter(|z| z.norm() > 0.0).count(), 2);
        // index 1 is |↑↑↑↓⟩, index 2 is |↑↑↓↑⟩
        assert_eq!(basis_index(Spin::Up, Spin::Up, Spin::Up, Spin::Down), 1);
        assert_eq!(basis_index(Spin::Up, Spin::Up, Spin::Down, Spin::Up), 2);
    }

    #[test]
    fn table_is_orthonormal_eigenbasis() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let p = sample_params(&mut rng);
            let table = analytic_eigensystem(&p);
            assert!(table.orthonormality_defect() < 1e-12);
            assert!(table.max_residual(&build_hamiltonian(&p)) <= 1e-10);
        }
    }

    #[test]
    fn hamiltonian_terms_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let terms = hamiltonian_terms(&sample_params(&mut rng));
            assert!(terms.max_commutator() <= 1e-12);
            assert!(terms.total().hermitian_defect() == 0.0);
        }
    }

    #[test]
    fn exchange_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = sample_params(&mut rng);
        let h = build_hamiltonian(&p);
        for (x, y) in [(Site::A, Site::B), (Site::One, Site::Two)] {
            let perm = site_swap(x, y);
            let conj = &(&perm * &h) * &perm.adjoint();
            assert!((&conj - &h).max_abs() <= 1e-12);
        }
        // a different swap is not a symmetry
        let perm = site_swap(Site::One, Site::A);
        let conj = &(&perm * &h) * &perm.adjoint();
        assert!((&conj - &h).max_abs() > 1e-3);
    }

    #[test]
    fn plus_x_state() {
        let v = initial_plus_x();
        assert_eq!(v.amps()[0], real(0.25));
        assert!((v.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn plus_x_decomposition() {
        let c = decompose(&initial_plus_x(), &analytic_eigensystem(&reference()));
        for (n, coeff) in c.iter().enumerate() {
            let expected = match n % 4 {
                0 | 3 => 0.25,
                1 => SQRT_2 / 4.0,
                _ => 0.0,
            };
            assert!((coeff - real(expected)).norm() < 1e-15, "C_{} = {coeff}", n + 1);
        }
        let total: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decompose_eigenstate() {
        let table = analytic_eigensystem(&reference());
        let c = decompose(&table.entries()[4].1, &table);
        for (n, z) in c.iter().enumerate() {
            let expected = if n == 4 { 1.0 } else { 0.0 };
            assert!((z - real(expected)).norm() < 1e-15);
        }
    }

    #[test]
    fn decompose_resynthesizes_random_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let amps = (0..DIM)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let v = StateVector::normalized(amps).unwrap();
        let table = analytic_eigensystem(&sample_params(&mut rng));
        let back = evolve_with_table(&v, &table, 0.0);
        assert!(back.max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn state_vector_validation() {
        assert!(matches!(StateVector::new(vec![real(1.0)]), Err(ModelError::WrongLength(1))));
        assert!(matches!(
            StateVector::new(vec![real(1.0); DIM]),
            Err(ModelError::NotNormalized(_))
        ));
        assert!(ClusterParams::new(f64::NAN, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    /// Direct evaluation of the central-pair decomposition
    /// `ψ(t) = ½(ξ1⊗|↑↑⟩ + ξ2⊗(|↑↓⟩+|↓↑⟩) + ξ3⊗|↓↓⟩)` with the phase table of each ξ.
    fn xi_expansion(p: &ClusterParams, t: f64) -> Vec<C64> {
        let ClusterParams { j, jz, j0, h, hp } = *p;
        let ph = |w: f64| C64::from_polar(0.5, -w * t);
        let xi = |m: f64, field: f64| {
            [
                ph(jz / 4.0 + j0 * m + field + hp),
                ph(j / 2.0 - jz / 4.0 + field),
                ph(j / 2.0 - jz / 4.0 + field),
                ph(jz / 4.0 - j0 * m + field - hp),
            ]
        };
        let sectors = [xi(1.0, h), xi(0.0, 0.0), xi(0.0, 0.0), xi(-1.0, -h)];
        let mut amps = vec![C64::new(0.0, 0.0); DIM];
        for (side, x) in sectors.iter().enumerate() {
            for k in 0..4 {
                amps[4 * side + k] = x[k] * 0.5;
            }
        }
        amps
    }

    #[test]
    fn analytic_evolution_matches_xi_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..20 {
            let p = sample_params(&mut rng);
            let t = rng.random_range(0.0..50.0);
            let out = evolve_analytic(&initial_plus_x(), &p, t);
            assert!(linalg::max_abs_diff(out.amps(), &xi_expansion(&p, t)) < 1e-12);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let p = reference();
        let v = initial_plus_x();
        assert!(evolve_analytic(&v, &p, 0.0).max_abs_diff(&v) < 1e-15);
        assert!(evolve_oracle(&v, &p, 0.0).unwrap().max_abs_diff(&v) < 1e-14);
    }

    #[test]
    fn stationary_state_picks_up_phase() {
        let p = reference();
        let table = analytic_eigensystem(&p);
        let (e1, psi1) = &table.entries()[0];
        let t = 3.3;
        for out in [evolve_analytic(psi1, &p, t), evolve_oracle(psi1, &p, t).unwrap()] {
            let overlap = psi1.inner(&out);
            assert!((overlap - C64::from_polar(1.0, -e1 * t)).norm() < 1e-12);
        }
    }

    #[test]
    fn analytic_agrees_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let v = initial_plus_x();
        for _ in 0..100 {
            let p = sample_params(&mut rng);
            let t = rng.random_range(0.0..50.0);
            let a = evolve_analytic(&v, &p, t);
            let o = evolve_oracle(&v, &p, t).unwrap();
            assert!(a.max_abs_diff(&o) <= 1e-10);
        }
    }

    #[test]
    fn group_property_and_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let p = sample_params(&mut rng);
            let (t1, t2) = (rng.random_range(0.0..20.0), rng.random_range(0.0..20.0));
            let v = initial_plus_x();
            let once = evolve_analytic(&v, &p, t1 + t2);
            let twice = evolve_analytic(&evolve_analytic(&v, &p, t1), &p, t2);
            assert!(once.max_abs_diff(&twice) <= 1e-12);
            assert!((once.norm() - 1.0).abs() <= 1e-12);

            let table = analytic_eigensystem(&p);
            for (_, psi) in table.entries() {
                let out = evolve_analytic(psi, &p, t1);
                assert!((psi.inner(&out).norm() - 1.0).abs() <= 1e-12);
            }
        }
    }
}
