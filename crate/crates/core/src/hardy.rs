//! State-space counting relations and fiducial-set tomography.
//!
//! A classical theory needs `K = N` probabilities to pin down a state over
//! `N` exclusive outcomes; quantum theory needs `K = N²`, the number of real
//! parameters of a self-adjoint `N×N` matrix. Both capacities are
//! multiplicative over composite systems (`N = N_A N_B`, `K = K_A K_B`),
//! which forces the power law `K(N) = N^r`.
//!
//! The `K = N²` case is made concrete here: a fiducial set of `N²` rank-1
//! projectors (the basis states plus pairwise real and imaginary
//! superpositions) is informationally complete, so the probabilities of a
//! state against the set determine its density matrix by a linear solve
//! against the frame Gram matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::linalg::{self, ComplexMatrix, RealMatrix};

/// Which probability theory sets the capacity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoryKind {
    Classical,
    Quantum,
}

#[derive(Clone, Debug, PartialEq)]
pub enum HardyError {
    ZeroDimension,
    Overflow,
    DimensionMismatch { expected: usize, got: usize },
    SingularFrame,
    NotHermitian { max_asymmetry: f64 },
    TraceNotOne { trace: f64 },
    NotPositive { min_eigenvalue: f64 },
    SupportViolation { outside_mass: f64 },
    EmptySupport,
    DuplicateSupportIndex { index: usize },
    SupportIndexOutOfRange { index: usize, dimension: usize },
}

impl fmt::Display for HardyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroDimension => write!(f, "dimension must be at least 1"),
            Self::Overflow => write!(f, "capacity overflows the machine word"),
            Self::DimensionMismatch { expected, got } => {
                write!(f, "expected dimension {expected}, got {got}")
            }
            Self::SingularFrame => write!(f, "fiducial frame matrix is singular"),
            Self::NotHermitian { max_asymmetry } => {
                write!(f, "matrix is not self-adjoint (asymmetry {max_asymmetry:e})")
            }
            Self::TraceNotOne { trace } => write!(f, "trace is {trace}, expected 1"),
            Self::NotPositive { min_eigenvalue } => {
                write!(f, "matrix has negative eigenvalue {min_eigenvalue:e}")
            }
            Self::SupportViolation { outside_mass } => {
                write!(f, "mass {outside_mass:e} lies outside the support subset")
            }
            Self::EmptySupport => write!(f, "support subset must be nonempty"),
            Self::DuplicateSupportIndex { index } => {
                write!(f, "support index {index} is repeated")
            }
            Self::SupportIndexOutOfRange { index, dimension } => {
                write!(f, "support index {index} out of range for dimension {dimension}")
            }
        }
    }
}

impl core::error::Error for HardyError {}

/// Number of probabilities needed to determine an arbitrary state:
/// `K = N` classically, `K = N²` quantum mechanically.
pub fn capacity(kind: TheoryKind, n: usize) -> Result<usize, HardyError> {
    if n == 0 {
        return Err(HardyError::ZeroDimension);
    }
    match kind {
        TheoryKind::Classical => Ok(n),
        TheoryKind::Quantum => n.checked_mul(n).ok_or(HardyError::Overflow),
    }
}

/// `(N, K)` of a composite system built from subsystems of dimensions
/// `n_a` and `n_b`: `N = N_A N_B` and `K = K_A K_B`. Consistency demands
/// `K(N_A N_B) = K(N_A) K(N_B)`, which holds exactly for both kinds.
pub fn composite_counts(
    n_a: usize,
    n_b: usize,
    kind: TheoryKind,
) -> Result<(usize, usize), HardyError> {
    let n = n_a.checked_mul(n_b).ok_or(HardyError::Overflow)?;
    if n == 0 {
        return Err(HardyError::ZeroDimension);
    }
    let k = capacity(kind, n_a)?
        .checked_mul(capacity(kind, n_b)?)
        .ok_or(HardyError::Overflow)?;
    Ok((n, k))
}

/// Why no consistent power law `K = N^r` could be inferred.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PowerLawFailure {
    EmptyInput,
    LengthMismatch { ns: usize, ks: usize },
    DimensionTooSmall { n: usize },
    NoExponent { n: usize, k: usize },
    Inconsistent { n: usize, k: usize, exponent: u32 },
}

impl fmt::Display for PowerLawFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyInput => write!(f, "no (n, k) pairs supplied"),
            Self::LengthMismatch { ns, ks } => {
                write!(f, "{ns} dimensions but {ks} capacities")
            }
            Self::DimensionTooSmall { n } => write!(f, "dimension {n} must be at least 2"),
            Self::NoExponent { n, k } => write!(f, "{k} is not an integer power of {n}"),
            Self::Inconsistent { n, k, exponent } => {
                write!(f, "pair ({n}, {k}) violates k = n^{exponent}")
            }
        }
    }
}

/// Infers the integer `r` with `k = n^r` for every pair, in exact integer
/// arithmetic; inconsistent data is a failure value naming the first
/// violating pair, not a panic.
pub fn infer_power(ns: &[usize], ks: &[usize]) -> Result<u32, PowerLawFailure> {
    if ns.len() != ks.len() {
        return Err(PowerLawFailure::LengthMismatch {
            ns: ns.len(),
            ks: ks.len(),
        });
    }
    if ns.is_empty() {
        return Err(PowerLawFailure::EmptyInput);
    }
    for &n in ns {
        if n < 2 {
            return Err(PowerLawFailure::DimensionTooSmall { n });
        }
    }
    let exponent_of = |n: usize, k: usize| -> Option<u32> {
        let (n, k) = (n as u128, k as u128);
        let mut power = 1u128;
        let mut r = 0u32;
        loop {
            if power == k {
                return Some(r);
            }
            if power > k {
                return None;
            }
            power = power.checked_mul(n)?;
            r += 1;
        }
    };
    let r = exponent_of(ns[0], ks[0]).ok_or(PowerLawFailure::NoExponent {
        n: ns[0],
        k: ks[0],
    })?;
    for (&n, &k) in ns.iter().zip(ks).skip(1) {
        let expected = (n as u128).checked_pow(r);
        if expected != Some(k as u128) {
            return Err(PowerLawFailure::Inconsistent {
                n,
                k,
                exponent: r,
            });
        }
    }
    Ok(r)
}

/// Tolerances on density-matrix invariants.
const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGENVALUE_TOL: f64 = 1e-10;
/// Mass allowed outside the subset in [`restrict_support`].
pub const SUPPORT_MASS_TOL: f64 = 1e-10;

/// Validated density matrix: self-adjoint, unit trace, positive
/// semidefinite (up to the stated tolerances).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self, HardyError> {
        if !mat.is_square() {
            return Err(HardyError::DimensionMismatch {
                expected: mat.n_rows(),
                got: mat.n_cols(),
            });
        }
        let n = mat.n_rows();
        let mut max_asym: f64 = 0.0;
        for i in 0..n {
            max_asym = max_asym.max(mat[(i, i)].im.abs());
            for j in (i + 1)..n {
                max_asym = max_asym.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if max_asym > HERMITICITY_TOL {
            return Err(HardyError::NotHermitian {
                max_asymmetry: max_asym,
            });
        }
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(HardyError::TraceNotOne { trace });
        }
        let eigenvalues =
            linalg::hermitian_eigenvalues(&mat).expect("hermiticity verified above");
        if eigenvalues[0] < -EIGENVALUE_TOL {
            return Err(HardyError::NotPositive {
                min_eigenvalue: eigenvalues[0],
            });
        }
        Ok(Self { mat })
    }

    /// Pure-state projector `|ψ⟩⟨ψ|` from a state vector (normalized here).
    pub fn pure(state: &[Complex64]) -> Result<Self, HardyError> {
        if state.is_empty() {
            return Err(HardyError::ZeroDimension);
        }
        let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(HardyError::NotPositive {
                min_eigenvalue: f64::NEG_INFINITY,
            });
        }
        let n = state.len();
        let mat = ComplexMatrix::from_fn(n, n, |i, j| {
            (state[i] / norm) * (state[j] / norm).conj()
        });
        Self::new(mat)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self, HardyError> {
        if n == 0 {
            return Err(HardyError::ZeroDimension);
        }
        Self::new(ComplexMatrix::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { 1.0 / n as f64 } else { 0.0 }, 0.0)
        }))
    }

    pub fn dimension(&self) -> usize {
        self.mat.n_rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }
}

/// Informationally complete set of `K = N²` rank-1 projectors with its frame
/// Gram matrix `M_{kl} = Tr(Π_k Π_l)`.
#[derive(Clone, Debug)]
pub struct FiducialSet {
    dimension: usize,
    projectors: Vec<ComplexMatrix>,
    frame: RealMatrix,
    frame_condition: f64,
}

impl FiducialSet {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `K = N²`.
    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn frame(&self) -> &RealMatrix {
        &self.frame
    }

    /// Spectral condition number of the frame matrix, recorded at
    /// construction.
    pub fn frame_condition(&self) -> f64 {
        self.frame_condition
    }
}

fn projector_onto(state: &[Complex64]) -> ComplexMatrix {
    let n = state.len();
    ComplexMatrix::from_fn(n, n, |i, j| state[i] * state[j].conj())
}

/// Builds the standard fiducial set at dimension `n`: the `n` basis
/// projectors `|e_i⟩⟨e_i|`, and for each pair `i < j` the projectors onto
/// `(e_i + e_j)/√2` and `(e_i + i·e_j)/√2` — `n²` projectors in total. The
/// frame matrix is verified invertible and its condition number recorded.
pub fn build_fiducial_set(n: usize) -> Result<FiducialSet, HardyError> {
    if n == 0 {
        return Err(HardyError::ZeroDimension);
    }
    let mut projectors = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[i] = Complex64::new(1.0, 0.0);
        projectors.push(projector_onto(&e));
    }
    let half_sqrt = core::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut real_sup = vec![Complex64::new(0.0, 0.0); n];
            real_sup[i] = Complex64::new(half_sqrt, 0.0);
            real_sup[j] = Complex64::new(half_sqrt, 0.0);
            projectors.push(projector_onto(&real_sup));

            let mut imag_sup = vec![Complex64::new(0.0, 0.0); n];
            imag_sup[i] = Complex64::new(half_sqrt, 0.0);
            imag_sup[j] = Complex64::new(0.0, half_sqrt);
            projectors.push(projector_onto(&imag_sup));
        }
    }
    debug_assert_eq!(projectors.len(), n * n);

    let k = projectors.len();
    let mut frame = RealMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let overlap = projectors[a]
                .mul(&projectors[b])
                .expect("matching dimensions")
                .trace()
                .re;
            frame[(a, b)] = overlap;
            frame[(b, a)] = overlap;
        }
    }
    let eigenvalues =
        linalg::hermitian_eigenvalues(&frame.to_complex()).expect("symmetric by construction");
    let (min, max) = (eigenvalues[0], eigenvalues[k - 1]);
    if !(min > 1e-12 * max.max(1.0)) {
        // Cannot happen for this construction; guarded anyway.
        return Err(HardyError::SingularFrame);
    }
    Ok(FiducialSet {
        dimension: n,
        projectors,
        frame,
        frame_condition: max / min,
    })
}

/// Outcome probabilities `p_k = Tr(ρ Π_k)` of a state against a fiducial
/// set; each lies in `[0, 1]` up to round-off.
pub fn probabilities_of(rho: &DensityMatrix, f: &FiducialSet) -> Result<Vec<f64>, HardyError> {
    if rho.dimension() != f.dimension() {
        return Err(HardyError::DimensionMismatch {
            expected: f.dimension(),
            got: rho.dimension(),
        });
    }
    Ok(f.projectors()
        .iter()
        .map(|p| rho.matrix().mul(p).expect("matching dimensions").trace().re)
        .collect())
}

/// Result of a tomographic reconstruction, before physicality is enforced.
///
/// Inconsistent probability vectors (finite-sample noise, say) yield a
/// well-defined self-adjoint matrix with diagnostics attached rather than an
/// error; [`Reconstruction::into_density_matrix`] performs the strict check.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub rho: ComplexMatrix,
    pub trace: f64,
    pub min_eigenvalue: f64,
}

impl Reconstruction {
    /// True when the reconstruction is a physical state within tolerance.
    pub fn is_physical(&self) -> bool {
        (self.trace - 1.0).abs() <= 1e-9 && self.min_eigenvalue >= -EIGENVALUE_TOL
    }

    pub fn into_density_matrix(self) -> Result<DensityMatrix, HardyError> {
        DensityMatrix::new(self.rho)
    }
}

/// Reconstructs the density matrix whose fiducial probabilities are `p`:
/// expands `ρ = Σ_l c_l Π_l` and solves the frame system `M c = p`.
pub fn tomography_reconstruct(p: &[f64], f: &FiducialSet) -> Result<Reconstruction, HardyError> {
    let k = f.len();
    if p.len() != k {
        return Err(HardyError::DimensionMismatch {
            expected: k,
            got: p.len(),
        });
    }
    let coeffs = linalg::solve_linear(f.frame(), p).map_err(|_| HardyError::SingularFrame)?;
    let n = f.dimension();
    let mut rho = ComplexMatrix::zeros(n, n);
    for (c, proj) in coeffs.iter().zip(f.projectors()) {
        for i in 0..n {
            for j in 0..n {
                rho[(i, j)] += c * proj[(i, j)];
            }
        }
    }
    // Exact Hermitian symmetrization; the expansion already is, up to
    // round-off in the summation order.
    for i in 0..n {
        rho[(i, i)] = Complex64::new(rho[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (rho[(i, j)] + rho[(j, i)].conj());
            rho[(i, j)] = avg;
            rho[(j, i)] = avg.conj();
        }
    }
    let trace = rho.trace().re;
    let min_eigenvalue =
        linalg::hermitian_eigenvalues(&rho).expect("symmetrized above")[0];
    Ok(Reconstruction {
        rho,
        trace,
        min_eigenvalue,
    })
}

/// Restricts a state to a support subset of size `M`, returning the
/// renormalized `M×M` principal submatrix.
///
/// The state must actually live on the subset: if the trace over the
/// complement exceeds [`SUPPORT_MASS_TOL`] the restriction is refused.
/// Probabilities of observables supported on the subset are unchanged.
pub fn restrict_support(
    rho: &DensityMatrix,
    support: &[usize],
) -> Result<DensityMatrix, HardyError> {
    if support.is_empty() {
        return Err(HardyError::EmptySupport);
    }
    let n = rho.dimension();
    let mut indices = support.to_vec();
    indices.sort_unstable();
    for (k, &idx) in indices.iter().enumerate() {
        if idx >= n {
            return Err(HardyError::SupportIndexOutOfRange {
                index: idx,
                dimension: n,
            });
        }
        if k > 0 && indices[k - 1] == idx {
            return Err(HardyError::DuplicateSupportIndex { index: idx });
        }
    }
    let outside_mass: f64 = (0..n)
        .filter(|i| !indices.contains(i))
        .map(|i| rho.matrix()[(i, i)].re)
        .sum();
    if outside_mass.abs() > SUPPORT_MASS_TOL {
        return Err(HardyError::SupportViolation { outside_mass });
    }
    let m = indices.len();
    let sub = ComplexMatrix::from_fn(m, m, |a, b| rho.matrix()[(indices[a], indices[b])]);
    let trace = sub.trace().re;
    let renormalized = ComplexMatrix::from_fn(m, m, |a, b| sub[(a, b)] / trace);
    DensityMatrix::new(renormalized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256;
    use crate::sample;

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity(TheoryKind::Classical, 5).unwrap(), 5);
        assert_eq!(capacity(TheoryKind::Quantum, 2).unwrap(), 4);
        assert_eq!(capacity(TheoryKind::Quantum, 1).unwrap(), 1);
        assert!(capacity(TheoryKind::Quantum, 0).is_err());
    }

    #[test]
    fn composite_counts_examples() {
        assert_eq!(
            composite_counts(2, 3, TheoryKind::Quantum).unwrap(),
            (6, 36)
        );
        assert_eq!(capacity(TheoryKind::Quantum, 6).unwrap(), 36);
        assert_eq!(
            composite_counts(2, 3, TheoryKind::Classical).unwrap(),
            (6, 6)
        );
        for n in 1..=6 {
            for kind in [TheoryKind::Classical, TheoryKind::Quantum] {
                assert_eq!(
                    composite_counts(1, n, kind).unwrap(),
                    (n, capacity(kind, n).unwrap())
                );
            }
        }
    }

    #[test]
    fn multiplicativity_grid_is_exact() {
        for kind in [TheoryKind::Classical, TheoryKind::Quantum] {
            for n_a in 1..=6usize {
                for n_b in 1..=6usize {
                    let (n, k) = composite_counts(n_a, n_b, kind).unwrap();
                    assert_eq!(n, n_a * n_b);
                    assert_eq!(k, capacity(kind, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn infer_power_examples() {
        assert_eq!(infer_power(&[2, 3, 4], &[4, 9, 16]).unwrap(), 2);
        assert_eq!(infer_power(&[2, 3], &[2, 3]).unwrap(), 1);
        assert_eq!(
            infer_power(&[2, 3], &[4, 8]).unwrap_err(),
            PowerLawFailure::Inconsistent {
                n: 3,
                k: 8,
                exponent: 2
            }
        );
        assert_eq!(
            infer_power(&[2], &[3]).unwrap_err(),
            PowerLawFailure::NoExponent { n: 2, k: 3 }
        );
        assert!(matches!(
            infer_power(&[1, 2], &[1, 2]).unwrap_err(),
            PowerLawFailure::DimensionTooSmall { n: 1 }
        ));
        assert!(infer_power(&[], &[]).is_err());
        assert!(infer_power(&[2, 3], &[4]).is_err());
    }

    #[test]
    fn quantum_capacity_counts_self_adjoint_parameters() {
        // A self-adjoint N×N matrix has N diagonal reals plus two reals per
        // off-diagonal pair.
        for n in 1..=8usize {
            let parameter_count = n + 2 * (n * (n - 1) / 2);
            assert_eq!(capacity(TheoryKind::Quantum, n).unwrap(), parameter_count);
        }
    }

    #[test]
    fn fiducial_set_sizes_and_conditioning() {
        for n in [1usize, 2, 3, 4, 5] {
            let f = build_fiducial_set(n).unwrap();
            assert_eq!(f.len(), n * n);
            assert!(f.frame_condition().is_finite());
            assert!(f.frame_condition() >= 1.0);
            for p in f.projectors() {
                assert!((p.trace().re - 1.0).abs() < 1e-12);
                let idempotency = p.mul(p).unwrap().max_abs_diff(p).unwrap();
                assert!(idempotency < 1e-12);
            }
        }
    }

    #[test]
    fn worked_two_dimensional_probabilities() {
        let f = build_fiducial_set(2).unwrap();
        let e0 = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let p = probabilities_of(&e0, &f).unwrap();
        let expected = [1.0, 0.0, 0.5, 0.5];
        for (got, want) in p.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-14);
        }

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        for v in probabilities_of(&mixed, &f).unwrap() {
            assert!((v - 0.5).abs() < 1e-14);
        }

        let e1 = DensityMatrix::pure(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap();
        let p = probabilities_of(&e1, &f).unwrap();
        let expected = [0.0, 1.0, 0.5, 0.5];
        for (got, want) in p.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn reconstruction_of_worked_example() {
        let f = build_fiducial_set(2).unwrap();
        let rec = tomography_reconstruct(&[1.0, 0.0, 0.5, 0.5], &f).unwrap();
        assert!(rec.is_physical());
        assert!((rec.rho[(0, 0)].re - 1.0).abs() < 1e-10);
        assert!(rec.rho[(0, 1)].norm() < 1e-10);
        assert!(rec.rho[(1, 1)].norm() < 1e-10);

        let rec = tomography_reconstruct(&[0.5, 0.5, 0.5, 0.5], &f).unwrap();
        assert!((rec.rho[(0, 0)].re - 0.5).abs() < 1e-10);
        assert!((rec.rho[(1, 1)].re - 0.5).abs() < 1e-10);
        assert!(rec.rho[(0, 1)].norm() < 1e-10);
    }

    #[test]
    fn tomography_round_trip_on_random_states() {
        let mut rng = Xoshiro256::seed_from(61);
        for n in [2usize, 3, 4] {
            let f = build_fiducial_set(n).unwrap();
            for _ in 0..50 {
                let rho = sample::random_density(n, 3, &mut rng);
                let p = probabilities_of(&rho, &f).unwrap();
                let rec = tomography_reconstruct(&p, &f).unwrap();
                let err = rec.rho.max_abs_diff(rho.matrix()).unwrap();
                assert!(err < 1e-8, "n = {n}: round-trip error {err:e}");
            }
        }
    }

    #[test]
    fn inconsistent_probabilities_yield_diagnostics_not_errors() {
        let f = build_fiducial_set(2).unwrap();
        // Nothing bistochastic about this vector; it demands an unphysical ρ.
        let rec = tomography_reconstruct(&[1.0, 1.0, 0.0, 0.5], &f).unwrap();
        assert!(!rec.is_physical());
        assert!(rec.min_eigenvalue < -1e-3);
        assert!(rec.clone().into_density_matrix().is_err());
    }

    #[test]
    fn tomography_rejects_wrong_length() {
        let f = build_fiducial_set(2).unwrap();
        assert!(matches!(
            tomography_reconstruct(&[1.0, 0.0], &f),
            Err(HardyError::DimensionMismatch { expected: 4, got: 2 })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        // Non-Hermitian.
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = Complex64::new(0.3, 0.0);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(HardyError::NotHermitian { .. })
        ));
        // Wrong trace.
        let m = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(HardyError::TraceNotOne { .. })
        ));
        // Indefinite.
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                Complex64::new(1.5, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(-0.5, 0.0),
            ],
        )
        .unwrap();
        assert!(matches!(
            DensityMatrix::new(m),
            Err(HardyError::NotPositive { .. })
        ));
    }

    #[test]
    fn restrict_support_examples() {
        // |e_0⟩⟨e_0| in n = 3 restricted to {0, 1}.
        let e0 = DensityMatrix::pure(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        let sub = restrict_support(&e0, &[0, 1]).unwrap();
        assert_eq!(sub.dimension(), 2);
        assert!((sub.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(sub.matrix()[(1, 1)].norm() < 1e-14);

        // diag(1/2, 1/2, 0) restricted to {0, 1}.
        let block = DensityMatrix::new(ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j && i < 2 {
                Complex64::new(0.5, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
        .unwrap();
        let sub = restrict_support(&block, &[0, 1]).unwrap();
        assert!((sub.matrix()[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((sub.matrix()[(1, 1)].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn restrict_support_recovers_embedded_superposition() {
        // (e_0 + i e_1)/√2 embedded in n = 4.
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let psi = [
            Complex64::new(s, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let rho = DensityMatrix::pure(&psi).unwrap();
        let sub = restrict_support(&rho, &[0, 1]).unwrap();
        let expected = DensityMatrix::pure(&psi[..2]).unwrap();
        assert!(sub.matrix().max_abs_diff(expected.matrix()).unwrap() < 1e-12);

        // Probabilities of an observable on the subset are unchanged: use
        // the fiducial projectors of the 2-d subspace as observables.
        let f = build_fiducial_set(2).unwrap();
        for proj in f.projectors() {
            let embedded = ComplexMatrix::from_fn(4, 4, |i, j| {
                if i < 2 && j < 2 {
                    proj[(i, j)]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let before = rho.matrix().mul(&embedded).unwrap().trace().re;
            let after = sub.matrix().mul(proj).unwrap().trace().re;
            assert!((before - after).abs() < 1e-10);
        }
    }

    #[test]
    fn restrict_support_rejects_leaking_mass() {
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(
            restrict_support(&mixed, &[0, 1]),
            Err(HardyError::SupportViolation { .. })
        ));
        let e0 = DensityMatrix::pure(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        assert!(restrict_support(&e0, &[]).is_err());
        assert!(restrict_support(&e0, &[0, 0]).is_err());
        assert!(restrict_support(&e0, &[0, 5]).is_err());
    }

    #[test]
    fn frame_conditioning_bounds_reconstruction_error() {
        // Perturb the probability vector and verify the reconstruction moves
        // by no more than condition number × perturbation (in max norm,
        // against the frame's 2-norm conditioning this is generous).
        let mut rng = Xoshiro256::seed_from(71);
        for n in [2usize, 3, 4, 5] {
            let f = build_fiducial_set(n).unwrap();
            let rho = sample::random_density(n, 2, &mut rng);
            let p = probabilities_of(&rho, &f).unwrap();
            let mut p_noisy = p.clone();
            for v in &mut p_noisy {
                *v += 1e-6 * (rng.next_f64() - 0.5);
            }
            let clean = tomography_reconstruct(&p, &f).unwrap();
            let noisy = tomography_reconstruct(&p_noisy, &f).unwrap();
            let moved = clean.rho.max_abs_diff(&noisy.rho).unwrap();
            assert!(
                moved <= f.frame_condition() * 1e-6,
                "n = {n}: moved {moved:e}, cond {:.2}",
                f.frame_condition()
            );
        }
    }
}
