//! Deterministic random generators for test fixtures and demos.
//!
//! Haar-distributed unitaries come from QR-orthonormalization of a complex
//! Ginibre matrix (Gram-Schmidt with positive real diagonal, which preserves
//! the Haar measure). Bistochastic matrices are sampled over the Birkhoff
//! polytope as Dirichlet(1)-weighted convex combinations of uniformly random
//! permutation matrices — unlike Haar-derived matrices, this reaches the
//! non-unistochastic regions of the polytope.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::hardy::DensityMatrix;
use crate::linalg::ComplexMatrix;
use crate::modality::ProbabilityMatrix;
use crate::rng::Xoshiro256;

/// Haar-random `n×n` unitary.
pub fn haar_unitary(n: usize, rng: &mut Xoshiro256) -> ComplexMatrix {
    assert!(n >= 1, "dimension must be at least 1");
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.next_gaussian(), rng.next_gaussian())
    });
    // Modified Gram-Schmidt on columns, with one re-orthogonalization pass.
    let mut q = g;
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    dot += q[(i, k)].conj() * q[(i, j)];
                }
                for i in 0..n {
                    let qik = q[(i, k)];
                    q[(i, j)] -= dot * qik;
                }
            }
        }
        let norm: f64 = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            q[(i, j)] /= norm;
        }
    }
    q
}

/// Uniformly random permutation of `0..n` (Fisher-Yates).
pub fn random_permutation(n: usize, rng: &mut Xoshiro256) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.next_index(i + 1);
        perm.swap(i, j);
    }
    perm
}

/// Random bistochastic matrix: a convex combination of `num_perms` uniformly
/// chosen permutation matrices with Dirichlet(1) weights.
pub fn random_bistochastic(n: usize, num_perms: usize, rng: &mut Xoshiro256) -> ProbabilityMatrix {
    assert!(n >= 1 && num_perms >= 1);
    // Dirichlet(1) = normalized standard exponentials.
    let mut weights: Vec<f64> = (0..num_perms)
        .map(|_| -(1.0 - rng.next_f64()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut entries = vec![0.0; n * n];
    for &w in &weights {
        let perm = random_permutation(n, rng);
        for (i, &j) in perm.iter().enumerate() {
            entries[i * n + j] += w;
        }
    }
    ProbabilityMatrix::new_unchecked(n, entries)
}

/// Random normalized pure state with Gaussian amplitudes.
pub fn random_pure_state(n: usize, rng: &mut Xoshiro256) -> Vec<Complex64> {
    assert!(n >= 1);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.next_gaussian(), rng.next_gaussian()))
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Random density matrix: a Dirichlet(1)-weighted mixture of `components`
/// Haar-random pure states.
pub fn random_density(n: usize, components: usize, rng: &mut Xoshiro256) -> DensityMatrix {
    assert!(n >= 1 && components >= 1);
    let mut weights: Vec<f64> = (0..components)
        .map(|_| -(1.0 - rng.next_f64()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut rho = ComplexMatrix::zeros(n, n);
    for &w in &weights {
        let psi = random_pure_state(n, rng);
        for i in 0..n {
            for j in 0..n {
                rho[(i, j)] += w * psi[i] * psi[j].conj();
            }
        }
    }
    DensityMatrix::new(rho).expect("mixture of pure states is a valid density matrix")
}
