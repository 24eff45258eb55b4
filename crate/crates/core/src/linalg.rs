//! Dense complex linear algebra and the trace-formula probability extraction.
//!
//! Matrices are row-major `Vec`-backed and sized for desk-scale dimensions
//! (`N ≲ 64`); there is no BLAS backend and no sparsity. The module provides
//! the basis projectors `P_i`, the unitarity residual `‖M†M − I‖_F`, the
//! probability extraction `p_{ij} = Tr(P_i Σ̃ P_j Σ̃†)` in both a literal
//! projector-sandwich form and the `|Σ̃_{ij}|²` short cut, and the transported
//! projectors `P_j' = Σ P_j Σᵀ` built from a real square-root matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::Float;

use crate::modality::ProbabilityMatrix;

/// Errors from matrix construction and the operations in this module.
#[derive(Clone, Debug, PartialEq)]
pub enum LinalgError {
    NotSquare { n_rows: usize, n_cols: usize },
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    BadEntryCount { expected: usize, got: usize },
    NonFinite { row: usize, col: usize },
    IndexOutOfRange { index: usize, dimension: usize },
    ZeroDimension,
    RowNotUnitNorm { row: usize, sum: f64 },
    ColumnNotUnitNorm { col: usize, sum: f64 },
    NotHermitian { max_asymmetry: f64 },
    Singular,
    NotPositiveDefinite,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSquare { n_rows, n_cols } => {
                write!(f, "matrix is {n_rows}x{n_cols}, expected square")
            }
            Self::ShapeMismatch { left, right } => write!(
                f,
                "shape mismatch: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Self::BadEntryCount { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            Self::NonFinite { row, col } => write!(f, "non-finite entry at ({row}, {col})"),
            Self::IndexOutOfRange { index, dimension } => {
                write!(f, "index {index} out of range for dimension {dimension}")
            }
            Self::ZeroDimension => write!(f, "dimension must be at least 1"),
            Self::RowNotUnitNorm { row, sum } => {
                write!(f, "row {row} of squared entries sums to {sum}, expected 1")
            }
            Self::ColumnNotUnitNorm { col, sum } => write!(
                f,
                "column {col} of squared entries sums to {sum}, expected 1"
            ),
            Self::NotHermitian { max_asymmetry } => {
                write!(f, "matrix is not Hermitian (asymmetry {max_asymmetry:e})")
            }
            Self::Singular => write!(f, "linear system is singular to working precision"),
            Self::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting shape mismatches and
    /// non-finite values.
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if n_rows == 0 || n_cols == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        if entries.len() != n_rows * n_cols {
            return Err(LinalgError::BadEntryCount {
                expected: n_rows * n_cols,
                got: entries.len(),
            });
        }
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(LinalgError::NonFinite {
                    row: k / n_cols,
                    col: k % n_cols,
                });
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn from_fn(
        n_rows: usize,
        n_cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                entries.push(f(i, j));
            }
        }
        Self {
            n_rows,
            n_cols,
            entries,
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: vec![Complex64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    fn require_square(&self) -> Result<usize, LinalgError> {
        if self.is_square() {
            Ok(self.n_rows)
        } else {
            Err(LinalgError::NotSquare {
                n_rows: self.n_rows,
                n_cols: self.n_cols,
            })
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.n_cols != rhs.n_rows {
            return Err(LinalgError::ShapeMismatch {
                left: (self.n_rows, self.n_cols),
                right: (rhs.n_rows, rhs.n_cols),
            });
        }
        let mut out = Self::zeros(self.n_rows, rhs.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.n_cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.n_rows.min(self.n_cols);
        (0..n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if (self.n_rows, self.n_cols) != (rhs.n_rows, rhs.n_cols) {
            return Err(LinalgError::ShapeMismatch {
                left: (self.n_rows, self.n_cols),
                right: (rhs.n_rows, rhs.n_cols),
            });
        }
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Inverse by Gaussian elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        let n = self.require_square()?;
        let scale = self.entries.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if scale == 0.0 {
            return Err(LinalgError::Singular);
        }
        let mut m = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r1, &r2| {
                    m[(r1, col)]
                        .norm()
                        .partial_cmp(&m[(r2, col)].norm())
                        .expect("finite entries")
                })
                .expect("non-empty range");
            if m[(pivot_row, col)].norm() <= 1e-13 * scale {
                return Err(LinalgError::Singular);
            }
            if pivot_row != col {
                for k in 0..n {
                    let tmp = m[(col, k)];
                    m[(col, k)] = m[(pivot_row, k)];
                    m[(pivot_row, k)] = tmp;
                    let tmp = inv[(col, k)];
                    inv[(col, k)] = inv[(pivot_row, k)];
                    inv[(pivot_row, k)] = tmp;
                }
            }
            let pivot = m[(col, col)];
            for k in 0..n {
                m[(col, k)] /= pivot;
                inv[(col, k)] /= pivot;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = m[(row, col)];
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let m_col_k = m[(col, k)];
                    m[(row, k)] -= factor * m_col_k;
                    let i_col_k = inv[(col, k)];
                    inv[(row, k)] -= factor * i_col_k;
                }
            }
        }
        Ok(inv)
    }

    /// Largest entrywise distance to `rhs`; useful as a test metric.
    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64, LinalgError> {
        if (self.n_rows, self.n_cols) != (rhs.n_rows, rhs.n_cols) {
            return Err(LinalgError::ShapeMismatch {
                left: (self.n_rows, self.n_cols),
                right: (rhs.n_rows, rhs.n_cols),
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.n_cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.n_cols + j]
    }
}

/// Dense real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<f64>,
}

impl RealMatrix {
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<f64>) -> Result<Self, LinalgError> {
        if n_rows == 0 || n_cols == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        if entries.len() != n_rows * n_cols {
            return Err(LinalgError::BadEntryCount {
                expected: n_rows * n_cols,
                got: entries.len(),
            });
        }
        for (k, x) in entries.iter().enumerate() {
            if !x.is_finite() {
                return Err(LinalgError::NonFinite {
                    row: k / n_cols,
                    col: k % n_cols,
                });
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                entries.push(f(i, j));
            }
        }
        Self {
            n_rows,
            n_cols,
            entries,
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n_rows, self.n_cols, |i, j| {
            Complex64::new(self[(i, j)], 0.0)
        })
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.n_cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.n_cols + j]
    }
}

/// Rank-1 basis projector `P_i = |e_i⟩⟨e_i|` of a given dimension.
///
/// The materialized matrix has a single 1 at `(i, i)`; the family satisfies
/// `P_i P_j = δ_{ij} P_i` exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Projector {
    dimension: usize,
    index: usize,
}

impl Projector {
    pub fn new(dimension: usize, index: usize) -> Result<Self, LinalgError> {
        if dimension == 0 {
            return Err(LinalgError::ZeroDimension);
        }
        if index >= dimension {
            return Err(LinalgError::IndexOutOfRange { index, dimension });
        }
        Ok(Self { dimension, index })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dimension, self.dimension);
        m[(self.index, self.index)] = Complex64::new(1.0, 0.0);
        m
    }
}

/// Frobenius norm of `M†M − I`; zero exactly when `M` is unitary.
pub fn unitarity_residual(m: &ComplexMatrix) -> Result<f64, LinalgError> {
    let n = m.require_square()?;
    let gram = m.adjoint().mul(m)?;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut g = gram[(i, j)];
            if i == j {
                g -= Complex64::new(1.0, 0.0);
            }
            sum += g.norm_sqr();
        }
    }
    Ok(sum.sqrt())
}

/// Transition probability `p_{ij} = |Σ̃_{ij}|²` (fast path).
///
/// Equal to the trace formula [`extract_probability_trace`] to machine
/// precision; the test suites assert the two paths agree.
pub fn extract_probability(
    sigma_tilde: &ComplexMatrix,
    i: usize,
    j: usize,
) -> Result<f64, LinalgError> {
    let n = sigma_tilde.require_square()?;
    if i >= n {
        return Err(LinalgError::IndexOutOfRange {
            index: i,
            dimension: n,
        });
    }
    if j >= n {
        return Err(LinalgError::IndexOutOfRange {
            index: j,
            dimension: n,
        });
    }
    Ok(sigma_tilde[(i, j)].norm_sqr())
}

/// Transition probability evaluated literally as `Tr(P_i Σ̃ P_j Σ̃†)` with
/// materialized projectors and dense products (reference path).
pub fn extract_probability_trace(
    sigma_tilde: &ComplexMatrix,
    i: usize,
    j: usize,
) -> Result<f64, LinalgError> {
    let n = sigma_tilde.require_square()?;
    let p_i = Projector::new(n, i)?.matrix();
    let p_j = Projector::new(n, j)?.matrix();
    let product = p_i
        .mul(sigma_tilde)?
        .mul(&p_j)?
        .mul(&sigma_tilde.adjoint())?;
    Ok(product.trace().re)
}

/// All transition probabilities `|Σ̃_{ij}|²` of a square matrix.
///
/// When `Σ̃` is unitary the result is bistochastic: every row and column sums
/// to 1 up to round-off.
pub fn transition_probability_matrix(
    sigma_tilde: &ComplexMatrix,
) -> Result<ProbabilityMatrix, LinalgError> {
    let n = sigma_tilde.require_square()?;
    let entries = (0..n * n)
        .map(|k| sigma_tilde.entries()[k].norm_sqr())
        .collect();
    Ok(ProbabilityMatrix::new_unchecked(n, entries))
}

/// Tolerance on the squared row/column sums of a square-root matrix accepted
/// by [`transported_projector`].
pub const TRANSPORT_NORM_TOL: f64 = 1e-9;

/// Transported projector `P_j' = Σ P_j Σᵀ` for a real square-root matrix `Σ`.
///
/// `P_j'` has unit trace and is idempotent because the columns of `Σ` are
/// unit vectors, but distinct `P_j'` are generically *not* orthogonal to each
/// other: the off-diagonal entries of `ΣᵀΣ` do not vanish.
pub fn transported_projector(sigma: &RealMatrix, j: usize) -> Result<ComplexMatrix, LinalgError> {
    if !sigma.is_square() {
        return Err(LinalgError::NotSquare {
            n_rows: sigma.n_rows(),
            n_cols: sigma.n_cols(),
        });
    }
    let n = sigma.n_rows();
    if j >= n {
        return Err(LinalgError::IndexOutOfRange {
            index: j,
            dimension: n,
        });
    }
    for i in 0..n {
        let sum: f64 = (0..n).map(|k| sigma[(i, k)] * sigma[(i, k)]).sum();
        if (sum - 1.0).abs() > TRANSPORT_NORM_TOL {
            return Err(LinalgError::RowNotUnitNorm { row: i, sum });
        }
    }
    for k in 0..n {
        let sum: f64 = (0..n).map(|i| sigma[(i, k)] * sigma[(i, k)]).sum();
        if (sum - 1.0).abs() > TRANSPORT_NORM_TOL {
            return Err(LinalgError::ColumnNotUnitNorm { col: k, sum });
        }
    }
    let s = sigma.to_complex();
    s.mul(&Projector::new(n, j)?.matrix())?.mul(&s.transpose())
}

/// Closest unitary to a nonsingular square matrix in Frobenius norm (the
/// unitary polar factor), by the Newton iteration `X ← (X + X^{-†}) / 2`.
pub fn nearest_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    m.require_square()?;
    let mut x = m.clone();
    for _ in 0..40 {
        let correction = x.inverse()?.adjoint();
        let mut next = x.clone();
        for (a, b) in next.entries.iter_mut().zip(correction.entries()) {
            *a = 0.5 * (*a + b);
        }
        let delta = next.max_abs_diff(&x).expect("same shape");
        x = next;
        if delta < 1e-14 {
            break;
        }
    }
    Ok(x)
}

/// Eigenvalues of a Hermitian matrix in ascending order, by cyclic complex
/// Jacobi rotations.
///
/// The input must be Hermitian to within `1e-8` of its norm; the working copy
/// is symmetrized exactly before iterating.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let n = a.require_square()?;
    let scale = a.frobenius_norm().max(1.0);
    let mut max_asym: f64 = 0.0;
    for i in 0..n {
        max_asym = max_asym.max(a[(i, i)].im.abs());
        for j in (i + 1)..n {
            max_asym = max_asym.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    if max_asym > 1e-8 * scale {
        return Err(LinalgError::NotHermitian {
            max_asymmetry: max_asym,
        });
    }

    let mut w = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(a[(i, i)].re, 0.0)
        } else if i < j {
            a[(i, j)]
        } else {
            a[(j, i)].conj()
        }
    });

    let stop = 1e-15 * scale;
    for _sweep in 0..100 {
        let mut off_sq = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off_sq += w[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off_sq).sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                let m = apq.norm();
                if m <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / m;
                let alpha = w[(p, p)].re;
                let gamma = w[(q, q)].re;
                // tan(2θ) = 2m / (α − γ); pick the smaller-angle root.
                let tau = (alpha - gamma) / (2.0 * m);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let new_pp = alpha * c * c + 2.0 * m * s * c + gamma * s * s;
                let new_qq = alpha * s * s - 2.0 * m * s * c + gamma * c * c;
                w[(p, p)] = Complex64::new(new_pp, 0.0);
                w[(q, q)] = Complex64::new(new_qq, 0.0);
                w[(p, q)] = Complex64::new(0.0, 0.0);
                w[(q, p)] = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = if k < p { w[(k, p)] } else { w[(p, k)].conj() };
                    let akq = if k < q { w[(k, q)] } else { w[(q, k)].conj() };
                    let new_kp = akp * c + akq * s * phase.conj();
                    let new_kq = -akp * s * phase + akq * c;
                    if k < p {
                        w[(k, p)] = new_kp;
                    } else {
                        w[(p, k)] = new_kp.conj();
                    }
                    if k < q {
                        w[(k, q)] = new_kq;
                    } else {
                        w[(q, k)] = new_kq.conj();
                    }
                }
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(eig)
}

/// Solves the square system `a x = rhs` by Gaussian elimination with partial
/// pivoting.
pub fn solve_linear(a: &RealMatrix, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            n_rows: a.n_rows(),
            n_cols: a.n_cols(),
        });
    }
    let n = a.n_rows();
    if rhs.len() != n {
        return Err(LinalgError::BadEntryCount {
            expected: n,
            got: rhs.len(),
        });
    }
    let scale = a.entries().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(LinalgError::Singular);
    }
    let mut m = a.clone();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                m[(r1, col)]
                    .abs()
                    .partial_cmp(&m[(r2, col)].abs())
                    .expect("finite entries")
            })
            .expect("non-empty range");
        if m[(pivot_row, col)].abs() <= 1e-13 * scale {
            return Err(LinalgError::Singular);
        }
        if pivot_row != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(pivot_row, k)];
                m[(pivot_row, k)] = tmp;
            }
            b.swap(col, pivot_row);
        }
        let pivot = m[(col, col)];
        for row in (col + 1)..n {
            let factor = m[(row, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            m[(row, col)] = 0.0;
            for k in (col + 1)..n {
                m[(row, k)] -= factor * m[(col, k)];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= m[(row, k)] * x[k];
        }
        x[row] = acc / m[(row, row)];
    }
    Ok(x)
}

/// Solves `a x = rhs` for symmetric positive definite `a` by Cholesky
/// factorization; fails with [`LinalgError::NotPositiveDefinite`] when a
/// pivot is not strictly positive.
pub fn solve_spd(a: &RealMatrix, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            n_rows: a.n_rows(),
            n_cols: a.n_cols(),
        });
    }
    let n = a.n_rows();
    if rhs.len() != n {
        return Err(LinalgError::BadEntryCount {
            expected: n,
            got: rhs.len(),
        });
    }
    // Lower-triangular factor stored in place.
    let mut l = a.clone();
    for j in 0..n {
        let mut d = l[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite);
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut v = l[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / djj;
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut acc = rhs[i];
        for k in 0..i {
            acc -= l[(i, k)] * y[k];
        }
        y[i] = acc / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for k in (i + 1)..n {
            acc -= l[(k, i)] * x[k];
        }
        x[i] = acc / l[(i, i)];
    }
    Ok(x)
}

/// Numerical rank by row echelon reduction with partial pivoting; pivots are
/// counted while they exceed `rel_tol` times the largest input entry.
pub fn numerical_rank(a: &RealMatrix, rel_tol: f64) -> usize {
    let scale = a.entries().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    let threshold = rel_tol * scale;
    let mut m = a.clone();
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot_row = (rank..rows)
            .max_by(|&r1, &r2| {
                m[(r1, col)]
                    .abs()
                    .partial_cmp(&m[(r2, col)].abs())
                    .expect("finite entries")
            })
            .expect("non-empty range");
        if m[(pivot_row, col)].abs() <= threshold {
            continue;
        }
        if pivot_row != rank {
            for k in 0..cols {
                let tmp = m[(rank, k)];
                m[(rank, k)] = m[(pivot_row, k)];
                m[(pivot_row, k)] = tmp;
            }
        }
        let pivot = m[(rank, col)];
        for row in (rank + 1)..rows {
            let factor = m[(row, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..cols {
                m[(row, k)] -= factor * m[(rank, k)];
            }
        }
        rank += 1;
    }
    rank
}
