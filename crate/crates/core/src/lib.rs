//! Numerical core for reconstructing quantum transition probabilities from
//! modality data.
//!
//! The library is organized around one question: given the `N×N` matrix `Π`
//! of transition probabilities between two maximal measurement settings, can
//! the entrywise square-root matrix be completed with phases into a unitary
//! `Σ̃ = (e^{iφ_{ij}} √p_{ij})`, so that every probability is recovered as
//! `p_{ij} = Tr(P_i Σ̃ P_j Σ̃†)`?
//!
//! - [`linalg`] — dense complex matrices, basis projectors, unitarity
//!   residuals, and the trace-formula probability extraction.
//! - [`modality`] — modality sets, bistochastic validation of probability
//!   matrices, and the `(N-1)²` independent-parameter count.
//! - [`phase`] — the phase-completion solver: closed form at `N = 2`, an
//!   analytic unistochasticity certificate at `N = 3`, and a damped
//!   least-squares multistart optimizer for general `N`.
//! - [`knob`] — continuous groups of apparatus transformations with unitary
//!   (projective) representations: 3-d rotations acting on a two-outcome
//!   system, and the commutative torus group of the classical limit.
//! - [`hardy`] — state-space counting relations (`K = N` classical,
//!   `K = N²` quantum) and informationally complete tomography over a
//!   fiducial projector set.
//! - [`sample`] — deterministic generators for Haar-random unitaries,
//!   Birkhoff-polytope bistochastic matrices, and random density matrices.
//!
//! All computation is `f64`; the crate is `no_std` (with `alloc`) and every
//! operation is a pure function of its inputs, safe to call concurrently.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod hardy;
pub mod knob;
pub mod linalg;
pub mod modality;
pub mod phase;
pub mod rng;
pub mod sample;

pub use linalg::{ComplexMatrix, LinalgError, Projector, RealMatrix};
pub use modality::{ModalitySet, ProbabilityMatrix, ValidationError};
pub use phase::{PhaseMatrix, SolveReport, SolveStatus, SolverConfig};
