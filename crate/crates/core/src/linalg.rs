//! Small dense complex linear algebra.
//!
//! Everything here is sized for the diamond cluster: matrices of dimension at
//! most 16 (the full Hilbert space) and usually 2 or 4 (reduced states). The
//! eigensolver is a cyclic complex Jacobi method, which is unconditionally
//! stable for Hermitian input and accurate to a few ulps of the matrix norm at
//! these sizes.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Off-diagonal Frobenius norm (relative to `max(1, ‖A‖_F)`) at which Jacobi stops.
pub const JACOBI_TOLERANCE: f64 = 1e-14;
/// Sweep cap for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Largest dimension the solver accepts.
pub const MAX_DIM: usize = 16;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as round-off and clamped to zero.
pub const PSD_CLAMP: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |m - m^H| = {defect:e} exceeds tolerance {tol:e}")]
    NonHermitian { defect: f64, tol: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigenvalue {0:e} is below the PSD clamp threshold")]
    NegativeSpectrum(f64),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real entries, row-major.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |m_ij - conj(m_ji)|`; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`; the left factor indexes the most significant digit.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let x = a[(ia, ja)];
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    out[(ia * b.rows + ib, ja * b.cols + jb)] = x * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Eigenvalues ascending with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V·diag(f(λ))·V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    /// `‖M − VΛV†‖_max` against the original matrix.
    pub fn reconstruction_residual(&self, m: &ComplexMatrix) -> f64 {
        (&self.map_spectrum(|x| x) - m).max_abs()
    }

    /// `‖V†V − I‖_max`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.eigenvalues.len();
        (&(&self.eigenvectors.adjoint() * &self.eigenvectors) - &ComplexMatrix::identity(n)).max_abs()
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary and
/// then applies the real symmetric Jacobi rotation, so the combined 2×2 block is
/// `[[c, s], [-s·e^{-iφ}, c·e^{-iφ}]]` with `φ = arg a_pq`.
pub fn herm_eig(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    if n > MAX_DIM {
        return Err(LinalgError::DimensionMismatch(format!(
            "dimension {n} exceeds the supported maximum {MAX_DIM}"
        )));
    }
    let defect = m.hermitian_defect();
    if defect.is_nan() || defect > tol {
        return Err(LinalgError::NonHermitian { defect, tol });
    }

    // Symmetrize so round-off in the input cannot bias the rotations.
    let mut a = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_TOLERANCE * a.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, k)] = v[(i, src)];
        }
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let n = a.rows;
    let phase = apq / g; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();

    // A ← A·U (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ph_conj * s;
        a[(k, q)] = akp * s + akq * ph_conj * c;
    }
    // A ← U†·A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V ← V·U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * ph_conj * s;
        v[(k, q)] = vkp * s + vkq * ph_conj * c;
    }
}

/// Applies the PSD clamp policy to one eigenvalue.
pub fn clamp_psd(lambda: f64) -> Result<f64> {
    if lambda >= 0.0 {
        Ok(lambda)
    } else if lambda >= -PSD_CLAMP {
        Ok(0.0)
    } else {
        Err(LinalgError::NegativeSpectrum(lambda))
    }
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn psd_sqrt(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(m, tol)?;
    for &l in &eig.eigenvalues {
        clamp_psd(l)?;
    }
    Ok(eig.map_spectrum(|l| l.max(0.0).sqrt()))
}

/// Traces out `traced_sites` of a density matrix over sites with dimensions `site_dims`.
///
/// Site 0 is the most significant digit of the basis index. The kept sites
/// stay in their original relative order.
pub fn partial_trace(
    rho: &ComplexMatrix,
    site_dims: &[usize],
    traced_sites: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = site_dims.iter().product();
    if !rho.is_square() || rho.rows != total || site_dims.is_empty() {
        return Err(LinalgError::DimensionMismatch(format!(
            "{}x{} matrix over sites {site_dims:?}",
            rho.rows, rho.cols
        )));
    }
    let nsites = site_dims.len();
    let mut traced = vec![false; nsites];
    for &s in traced_sites {
        if s >= nsites || traced[s] {
            return Err(LinalgError::DimensionMismatch(format!(
                "invalid traced site list {traced_sites:?} for {nsites} sites"
            )));
        }
        traced[s] = true;
    }

    // stride of each site in the full index
    let mut strides = vec![1usize; nsites];
    for s in (0..nsites.saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * site_dims[s + 1];
    }
    let kept: Vec<usize> = (0..nsites).filter(|&s| !traced[s]).collect();
    let gone: Vec<usize> = (0..nsites).filter(|&s| traced[s]).collect();
    let kept_dim: usize = kept.iter().map(|&s| site_dims[s]).product();
    let env_dim: usize = gone.iter().map(|&s| site_dims[s]).product();

    let offset = |sites: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for &s in sites.iter().rev() {
            off += (idx % site_dims[s]) * strides[s];
            idx /= site_dims[s];
        }
        off
    };
    let kept_offsets: Vec<usize> = (0..kept_dim).map(|i| offset(&kept, i)).collect();
    let env_offsets: Vec<usize> = (0..env_dim).map(|e| offset(&gone, e)).collect();

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for (i, &oi) in kept_offsets.iter().enumerate() {
        for (j, &oj) in kept_offsets.iter().enumerate() {
            out[(i, j)] = env_offsets.iter().map(|&e| rho[(oi + e, oj + e)]).sum();
        }
    }
    Ok(out)
}

/// `e^{-iMt}·v` through the eigendecomposition of Hermitian `m`.
pub fn herm_expm_apply(m: &ComplexMatrix, t: f64, v: &[C64]) -> Result<Vec<C64>> {
    if v.len() != m.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "vector of length {} against a {}x{} generator",
            v.len(),
            m.rows,
            m.cols
        )));
    }
    let eig = herm_eig(m, 1e-12 * m.max_abs().max(1.0))?;
    Ok(apply_spectral_propagator(&eig, t, v))
}

/// `V·diag(e^{-iλt})·V†·v` for a precomputed decomposition.
pub fn apply_spectral_propagator(eig: &HermitianEigen, t: f64, v: &[C64]) -> Vec<C64> {
    let vecs = &eig.eigenvectors;
    let n = eig.eigenvalues.len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let overlap: C64 = (0..n).map(|i| vecs[(i, k)].conj() * v[i]).sum();
        let coeff = overlap * C64::from_polar(1.0, -lambda * t);
        for i in 0..n {
            out[i] += coeff * vecs[(i, k)];
        }
    }
    out
}

/// Polynomial value by Horner's rule; `coeffs` run from the highest degree down.
pub fn poly_residual(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c).abs()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `max_i |u_i − v_i|`.
pub fn max_abs_diff(u: &[C64], v: &[C64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Pauli matrices as 2×2 complex matrices.
pub mod pauli {
    use super::{ComplexMatrix, C64};

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        let i = C64::new(0.0, 1.0);
        ComplexMatrix::from_vec(2, 2, vec![C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(n: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        let mut it = entries.iter().cycle();
        for i in 0..n {
            let &(d, _) = it.next().unwrap();
            m[(i, i)] = c(d, 0.0);
            for j in (i + 1)..n {
                let &(re, im) = it.next().unwrap();
                m[(i, j)] = c(re, im);
                m[(j, i)] = c(re, -im);
            }
        }
        m
    }

    #[test]
    fn identity_spectrum() {
        let eig = herm_eig(&ComplexMatrix::identity(2), 1e-12).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
        assert!(eig.orthonormality_defect() < 1e-15);
    }

    #[test]
    fn pauli_z_spectrum_ascending() {
        let eig = herm_eig(&pauli::z(), 1e-12).unwrap();
        assert_eq!(eig.eigenvalues, vec![-1.0, 1.0]);
        assert!(eig.reconstruction_residual(&pauli::z()) < 1e-15);
    }

    #[test]
    fn pauli_y_spectrum() {
        let eig = herm_eig(&pauli::y(), 1e-12).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(eig.reconstruction_residual(&pauli::y()) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            herm_eig(&m, 1e-12),
            Err(LinalgError::NonHermitian { .. })
        ));
    }

    #[test]
    fn rejects_oversized_and_non_square() {
        assert!(matches!(
            herm_eig(&ComplexMatrix::identity(17), 1e-12),
            Err(LinalgError::DimensionMismatch(_))
        ));
        assert!(matches!(
            herm_eig(&ComplexMatrix::zeros(2, 3), 1e-12),
            Err(LinalgError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn kron_of_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_sz_identity_corner() {
        let sz = pauli::z().scale(c(0.5, 0.0));
        let m = kron(&sz, &ComplexMatrix::identity(2));
        assert_eq!(m[(0, 0)], c(0.5, 0.0));
        assert_eq!(m[(2, 2)], c(-0.5, 0.0));
    }

    #[test]
    fn kron_sx_sx_flip_flop_element() {
        // ⟨↑↓|S^x⊗S^x|↓↑⟩ with |↑↓⟩ = index 1, |↓↑⟩ = index 2
        let sx = pauli::x().scale(c(0.5, 0.0));
        let m = kron(&sx, &sx);
        assert_eq!(m[(1, 2)], c(0.25, 0.0));
        assert_eq!(m[(0, 3)], c(0.25, 0.0));
        assert_eq!(m[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn partial_trace_product_state() {
        // |↑↑⟩⟨↑↑| over two qubits, trace site b (index 1)
        let mut rho = ComplexMatrix::zeros(4, 4);
        rho[(0, 0)] = c(1.0, 0.0);
        let r = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(r, expected);
    }

    #[test]
    fn partial_trace_keeps_relative_order() {
        // ρ = A ⊗ B ⊗ C; tracing the middle site leaves tr(B)·A ⊗ C
        let a = ComplexMatrix::from_vec(2, 2, vec![c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]).unwrap();
        let b = ComplexMatrix::from_real(2, 2, &[0.4, 0.0, 0.0, 0.6]).unwrap();
        let cc = ComplexMatrix::from_vec(2, 2, vec![c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.5, 0.0)]).unwrap();
        let rho = kron(&kron(&a, &b), &cc);
        let r = partial_trace(&rho, &[2, 2, 2], &[1]).unwrap();
        assert!((&r - &kron(&a, &cc)).max_abs() < 1e-15);
        let r0 = partial_trace(&rho, &[2, 2, 2], &[0, 2]).unwrap();
        assert!((&r0 - &b).max_abs() < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = ComplexMatrix::identity(4);
        assert!(partial_trace(&rho, &[2, 2, 2], &[0]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[2]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[0, 0]).is_err());
    }

    #[test]
    fn expm_at_zero_is_identity() {
        let m = random_hermitian(4, &[(0.3, 0.1), (-1.2, 0.4), (0.5, -0.7)]);
        let v = vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        let out = herm_expm_apply(&m, 0.0, &v).unwrap();
        assert!(max_abs_diff(&out, &v) < 1e-14);
    }

    #[test]
    fn expm_stationary_phase() {
        let d = [0.3, -1.1, 2.5, 0.0];
        let m = ComplexMatrix::from_diag(&d);
        let v = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = herm_expm_apply(&m, 1.7, &v).unwrap();
        let expected = C64::from_polar(1.0, 1.1 * 1.7);
        assert!((out[1] - expected).norm() < 1e-14);
    }

    #[test]
    fn poly_residual_horner() {
        assert_eq!(poly_residual(&[1.0, 0.0], 0.0), 0.0);
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let p = [1.0, 0.0, -7.0, 6.0];
        for root in [1.0, 2.0, -3.0] {
            assert!(poly_residual(&p, root) < 1e-14);
        }
        assert_eq!(poly_residual(&p, 0.0), 6.0);
    }

    fn hermitian_strategy() -> impl Strategy<Value = ComplexMatrix> {
        (1usize..=16, proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 136))
            .prop_map(|(n, entries)| random_hermitian(n, &entries))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eig_reconstructs(m in hermitian_strategy()) {
            let eig = herm_eig(&m, 1e-12).unwrap();
            prop_assert!(eig.reconstruction_residual(&m) <= 1e-10);
            prop_assert!(eig.orthonormality_defect() <= 1e-10);
            prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn partial_trace_preserves_trace_and_psd(
            amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
            mask in 1u8..15,
        ) {
            let v: Vec<C64> = amps.iter().map(|&(a, b)| c(a, b)).collect();
            let rho = ComplexMatrix::outer(&v, &v);
            let traced: Vec<usize> = (0..4).filter(|s| mask & (1 << s) != 0).collect();
            let r = partial_trace(&rho, &[2, 2, 2, 2], &traced).unwrap();
            prop_assert!((r.trace() - rho.trace()).norm() <= 1e-12);
            prop_assert!(r.hermitian_defect() <= 1e-14);
            let eig = herm_eig(&r, 1e-12).unwrap();
            prop_assert!(eig.eigenvalues[0] >= -1e-10);
        }

        #[test]
        fn expm_preserves_norm(m in hermitian_strategy(), t in 0.0f64..1000.0) {
            let n = m.rows();
            let v: Vec<C64> = (0..n).map(|i| c(1.0, i as f64 * 0.1)).collect();
            let norm = vec_norm(&v);
            let out = herm_expm_apply(&m, t, &v).unwrap();
            prop_assert!((vec_norm(&out) - norm).abs() <= 1e-12 * norm);
        }

        #[test]
        fn kron_is_associative(
            a in proptest::collection::vec(-3i32..3, 4),
            b in proptest::collection::vec(-3i32..3, 4),
            d in proptest::collection::vec(-3i32..3, 4),
        ) {
            let to_m = |x: &[i32]| ComplexMatrix::from_real(2, 2, &x.iter().map(|&v| v as f64).collect::<Vec<_>>()).unwrap();
            let (a, b, d) = (to_m(&a), to_m(&b), to_m(&d));
            prop_assert_eq!(kron(&kron(&a, &b), &d), kron(&a, &kron(&b, &d)));
        }
    }
}
