//! Continuous groups of measurement-apparatus transformations and their
//! unitary representations.
//!
//! Two concrete groups exhibit the dichotomy the probability structure hangs
//! on. Three-dimensional rotations (a Stern-Gerlach magnet being reoriented)
//! do not commute, and their two-outcome representation is the SU(2) double
//! cover — a *projective* representation, defined up to a global phase, as
//! Wigner's theorem permits. The torus group of per-outcome phase shifts is
//! commutative; its representations are diagonal, every transition matrix
//! collapses to the identity, and classical probability over the `N`
//! exclusive outcomes is recovered.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::linalg::{self, ComplexMatrix};
use crate::modality::ProbabilityMatrix;
use crate::phase::wrap_angle;

#[derive(Clone, Debug, PartialEq)]
pub enum KnobError {
    GroupMismatch {
        expected: &'static str,
        got: &'static str,
    },
    PhaseCount {
        expected: usize,
        got: usize,
    },
    ZeroAxis,
    NonFinite,
    ZeroDimension,
}

impl fmt::Display for KnobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GroupMismatch { expected, got } => {
                write!(f, "expected a {expected} transformation, got {got}")
            }
            Self::PhaseCount { expected, got } => {
                write!(f, "expected {expected} phases, got {got}")
            }
            Self::ZeroAxis => write!(f, "rotation axis must be nonzero"),
            Self::NonFinite => write!(f, "parameters must be finite"),
            Self::ZeroDimension => write!(f, "dimension must be at least 1"),
        }
    }
}

impl core::error::Error for KnobError {}

/// Canonical axis-angle rotation: unit axis, angle in `[0, π]`, the identity
/// pinned to angle 0 about `ẑ`, and the axis sign fixed at the angle-π
/// boundary (where `±axis` describe the same rotation).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisAngle {
    axis: [f64; 3],
    angle: f64,
}

impl AxisAngle {
    pub fn identity() -> Self {
        Self {
            axis: [0.0, 0.0, 1.0],
            angle: 0.0,
        }
    }

    /// Normalizes the axis and canonicalizes the angle.
    pub fn new(axis: [f64; 3], angle: f64) -> Result<Self, KnobError> {
        if !angle.is_finite() || axis.iter().any(|c| !c.is_finite()) {
            return Err(KnobError::NonFinite);
        }
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if norm < 1e-12 {
            return Err(KnobError::ZeroAxis);
        }
        let unit = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
        Ok(Self::canonical(unit, wrap_angle(angle)))
    }

    fn canonical(mut axis: [f64; 3], mut angle: f64) -> Self {
        if angle < 0.0 {
            angle = -angle;
            axis = [-axis[0], -axis[1], -axis[2]];
        }
        if angle == 0.0 {
            return Self::identity();
        }
        if (angle - core::f64::consts::PI).abs() < 1e-12 {
            // ±axis give the same half-turn; fix the representative.
            for c in axis {
                if c.abs() > 1e-12 {
                    if c < 0.0 {
                        axis = [-axis[0], -axis[1], -axis[2]];
                    }
                    break;
                }
            }
        }
        Self { axis, angle }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Unit quaternion `(w, v) = (cos(θ/2), sin(θ/2) n̂)`.
    fn quaternion(&self) -> [f64; 4] {
        let (s, c) = (0.5 * self.angle).sin_cos();
        [c, s * self.axis[0], s * self.axis[1], s * self.axis[2]]
    }

    fn from_quaternion(q: [f64; 4]) -> Self {
        let q = if q[0] < 0.0 {
            [-q[0], -q[1], -q[2], -q[3]]
        } else {
            q
        };
        let vec_norm = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if vec_norm < 1e-12 {
            return Self::identity();
        }
        let angle = 2.0 * vec_norm.atan2(q[0]);
        Self::canonical(
            [q[1] / vec_norm, q[2] / vec_norm, q[3] / vec_norm],
            angle,
        )
    }

    fn quaternion_product(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    }

    /// Rotation composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_quaternion(Self::quaternion_product(
            self.quaternion(),
            other.quaternion(),
        ))
    }

    pub fn inverse(&self) -> Self {
        Self::canonical(
            [-self.axis[0], -self.axis[1], -self.axis[2]],
            self.angle,
        )
    }

    /// Angle of the relative rotation `self ∘ other⁻¹`, a metric on SO(3).
    pub fn distance(&self, other: &Self) -> f64 {
        let qa = self.quaternion();
        let qb = other.quaternion();
        let dot: f64 = (0..4).map(|k| qa[k] * qb[k]).sum();
        2.0 * dot.abs().min(1.0).acos()
    }
}

/// One element of a knob-transformation group.
#[derive(Clone, Debug, PartialEq)]
pub enum KnobTransformation {
    /// 3-d rotation, for the non-commutative Stern-Gerlach group.
    Rotation(AxisAngle),
    /// Per-outcome phase shifts, for the commutative torus group.
    Phases(Vec<f64>),
}

impl KnobTransformation {
    fn kind(&self) -> &'static str {
        match self {
            Self::Rotation(_) => "rotation",
            Self::Phases(_) => "phase vector",
        }
    }
}

/// A knob-transformation group together with its unitary representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KnobGroup {
    /// 3-d rotations represented on a two-outcome system by SU(2),
    /// `U = exp(−i θ (n̂·σ)/2)`.
    SpinHalf,
    /// Phase shifts represented by `diag(e^{iφ_1}, …, e^{iφ_N})`.
    Torus { dimension: usize },
}

impl KnobGroup {
    /// Dimension of the unitary representation.
    pub fn dimension(&self) -> usize {
        match self {
            Self::SpinHalf => 2,
            Self::Torus { dimension } => *dimension,
        }
    }

    pub fn identity(&self) -> KnobTransformation {
        match self {
            Self::SpinHalf => KnobTransformation::Rotation(AxisAngle::identity()),
            Self::Torus { dimension } => KnobTransformation::Phases(vec![0.0; *dimension]),
        }
    }

    fn check_member<'a>(&self, g: &'a KnobTransformation) -> Result<&'a KnobTransformation, KnobError> {
        match (self, g) {
            (Self::SpinHalf, KnobTransformation::Rotation(_)) => Ok(g),
            (Self::Torus { dimension }, KnobTransformation::Phases(phases)) => {
                if phases.len() != *dimension {
                    return Err(KnobError::PhaseCount {
                        expected: *dimension,
                        got: phases.len(),
                    });
                }
                if phases.iter().any(|p| !p.is_finite()) {
                    return Err(KnobError::NonFinite);
                }
                Ok(g)
            }
            (Self::SpinHalf, other) => Err(KnobError::GroupMismatch {
                expected: "rotation",
                got: other.kind(),
            }),
            (Self::Torus { .. }, other) => Err(KnobError::GroupMismatch {
                expected: "phase vector",
                got: other.kind(),
            }),
        }
    }

    /// Group law in payload space: rotation composition for SpinHalf, phase
    /// addition mod 2π for the torus.
    pub fn compose(
        &self,
        g1: &KnobTransformation,
        g2: &KnobTransformation,
    ) -> Result<KnobTransformation, KnobError> {
        self.check_member(g1)?;
        self.check_member(g2)?;
        Ok(match (g1, g2) {
            (KnobTransformation::Rotation(a), KnobTransformation::Rotation(b)) => {
                KnobTransformation::Rotation(a.compose(b))
            }
            (KnobTransformation::Phases(a), KnobTransformation::Phases(b)) => {
                KnobTransformation::Phases(
                    a.iter().zip(b).map(|(x, y)| wrap_angle(x + y)).collect(),
                )
            }
            _ => unreachable!("membership checked above"),
        })
    }

    pub fn inverse(&self, g: &KnobTransformation) -> Result<KnobTransformation, KnobError> {
        self.check_member(g)?;
        Ok(match g {
            KnobTransformation::Rotation(r) => KnobTransformation::Rotation(r.inverse()),
            KnobTransformation::Phases(p) => {
                KnobTransformation::Phases(p.iter().map(|x| wrap_angle(-x)).collect())
            }
        })
    }

    /// The unitary representing `g`; its unitarity residual is below 1e-12
    /// by construction.
    pub fn represent(&self, g: &KnobTransformation) -> Result<ComplexMatrix, KnobError> {
        self.check_member(g)?;
        Ok(match g {
            KnobTransformation::Rotation(r) => {
                let (s, c) = (0.5 * r.angle()).sin_cos();
                let [nx, ny, nz] = r.axis();
                ComplexMatrix::new(
                    2,
                    2,
                    vec![
                        Complex64::new(c, -nz * s),
                        Complex64::new(-ny * s, -nx * s),
                        Complex64::new(ny * s, -nx * s),
                        Complex64::new(c, nz * s),
                    ],
                )
                .expect("finite entries")
            }
            KnobTransformation::Phases(phases) => {
                let n = phases.len();
                let mut m = ComplexMatrix::zeros(n, n);
                for (k, &phi) in phases.iter().enumerate() {
                    let (s, c) = phi.sin_cos();
                    m[(k, k)] = Complex64::new(c, s);
                }
                m
            }
        })
    }
}

/// Projective defect of the pair `(g1, g2)`: the distance
/// `min_{|c|=1} ‖U(g1)U(g2) − c·U(g1∘g2)‖_F` together with the minimizing
/// phase `c`, computed in closed form as the phase of
/// `Tr(U(g1∘g2)† U(g1)U(g2))`.
pub fn projective_defect(
    group: &KnobGroup,
    g1: &KnobTransformation,
    g2: &KnobTransformation,
) -> Result<(f64, Complex64), KnobError> {
    let u1 = group.represent(g1)?;
    let u2 = group.represent(g2)?;
    let uc = group.represent(&group.compose(g1, g2)?)?;
    let prod = u1.mul(&u2).expect("matching dimensions");
    let overlap = uc.adjoint().mul(&prod).expect("matching dimensions").trace();
    if overlap.norm() > 1e-9 {
        let c = overlap / overlap.norm();
        let defect = defect_for(&prod, &uc, c);
        Ok((defect, c))
    } else {
        // Degenerate overlap: scan the unit circle for the best phase.
        let mut best = (f64::INFINITY, Complex64::new(1.0, 0.0));
        for k in 0..360 {
            let theta = core::f64::consts::TAU * k as f64 / 360.0;
            let c = Complex64::new(theta.cos(), theta.sin());
            let d = defect_for(&prod, &uc, c);
            if d < best.0 {
                best = (d, c);
            }
        }
        Ok(best)
    }
}

fn defect_for(prod: &ComplexMatrix, uc: &ComplexMatrix, c: Complex64) -> f64 {
    let n = uc.n_rows();
    let scaled = ComplexMatrix::from_fn(n, n, |i, j| c * uc[(i, j)]);
    prod.sub(&scaled).expect("matching dimensions").frobenius_norm()
}

/// True when `U(g1)U(g2)` equals `U(g1∘g2)` up to a global phase, within
/// `tol` in Frobenius norm.
pub fn projective_homomorphism_check(
    group: &KnobGroup,
    g1: &KnobTransformation,
    g2: &KnobTransformation,
    tol: f64,
) -> Result<bool, KnobError> {
    let (defect, _) = projective_defect(group, g1, g2)?;
    Ok(defect < tol)
}

/// Transition probabilities of a commutative (torus) knob transformation:
/// `diag(e^{iφ_k})` commutes with every projector, so the result is the
/// identity matrix — classical probability needs no phase structure.
pub fn commutative_limit_probabilities(phases: &[f64]) -> Result<ProbabilityMatrix, KnobError> {
    if phases.is_empty() {
        return Err(KnobError::ZeroDimension);
    }
    let group = KnobGroup::Torus {
        dimension: phases.len(),
    };
    let u = group.represent(&KnobTransformation::Phases(phases.to_vec()))?;
    Ok(linalg::transition_probability_matrix(&u).expect("square by construction"))
}

/// Transition probabilities between Stern-Gerlach orientations differing by
/// a rotation of `theta` about `ŷ`:
/// `[[cos²(θ/2), sin²(θ/2)], [sin²(θ/2), cos²(θ/2)]]`.
pub fn stern_gerlach_transition(theta: f64) -> Result<ProbabilityMatrix, KnobError> {
    let rotation = AxisAngle::new([0.0, 1.0, 0.0], theta)?;
    let u = KnobGroup::SpinHalf.represent(&KnobTransformation::Rotation(rotation))?;
    Ok(linalg::transition_probability_matrix(&u).expect("square by construction"))
}
