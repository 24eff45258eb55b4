//! Phase completion: find phases `φ_{ij}` making `Σ̃ = (e^{iφ_{ij}} √p_{ij})`
//! unitary, or report that none exist.
//!
//! Multiplying `Σ̃` by unit-modulus diagonal matrices on either side changes
//! no probability, so phases are always reduced to a gauge-fixed canonical
//! form with zero first row and first column; the `(N−1)²` interior phases
//! are the solver's variables, matching the independent-parameter count of a
//! bistochastic matrix.
//!
//! Feasibility is decided honestly:
//! - `N = 2` has a closed form (always feasible),
//! - `N = 3` has an analytic certificate ([`certify_n3`]): phases closing the
//!   link triangles of every row and column pair exist iff the matrix is
//!   unistochastic, so a failed triangle proves infeasibility,
//! - for `N ≥ 4` a failed optimization is reported as *inconclusive*, never
//!   as infeasible — a multistart miss is not a proof.
//!
//! The optimizer is damped least squares on the residual map formed by the
//! off-diagonal entries of `Σ̃†Σ̃ − I`, with analytic Jacobian and seeded
//! uniform random restarts. Every start draws from its own seed-derived
//! stream, so the report is a pure function of `(Π, config)` regardless of
//! how starts are scheduled; ties are broken by `(residual, start index)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::linalg::{self, ComplexMatrix, RealMatrix};
use crate::modality::ProbabilityMatrix;
use crate::rng::Xoshiro256;

/// Analytic certificate tolerance for the `N = 3` triangle test: a link gap
/// must exceed this before the matrix is declared non-unistochastic, which
/// keeps the certificate from ever contradicting a solver result at the
/// default feasibility tolerance (the unitarity residual is bounded below by
/// `√2 ×` gap).
pub const CERTIFICATE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum PhaseError {
    NotSquare { n_rows: usize, n_cols: usize },
    Dimension { expected: usize, got: usize },
    Config { reason: &'static str },
}

impl fmt::Display for PhaseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotSquare { n_rows, n_cols } => {
                write!(f, "phase array is {n_rows}x{n_cols}, expected square")
            }
            Self::Dimension { expected, got } => {
                write!(f, "expected dimension {expected}, got {got}")
            }
            Self::Config { reason } => write!(f, "invalid solver config: {reason}"),
        }
    }
}

impl core::error::Error for PhaseError {}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let tau = core::f64::consts::TAU;
    let mut y = x % tau;
    if y <= -PI {
        y += tau;
    } else if y > PI {
        y -= tau;
    }
    y
}

/// Gauge-fixed `N×N` phase matrix: first row and column identically zero,
/// all values in `(-π, π]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMatrix {
    dimension: usize,
    phi: Vec<f64>,
}

impl PhaseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            dimension: n,
            phi: vec![0.0; n * n],
        }
    }

    pub(crate) fn from_canonical(dimension: usize, phi: Vec<f64>) -> Self {
        debug_assert_eq!(phi.len(), dimension * dimension);
        Self { dimension, phi }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.phi[i * self.dimension + j]
    }

    /// Row-major phases in radians.
    pub fn entries(&self) -> &[f64] {
        &self.phi
    }
}

/// Quotients a raw phase array by the left/right diagonal gauge freedom:
/// `φ'_{ij} = φ_{ij} − φ_{i0} − φ_{0j} + φ_{00}`, wrapped into `(-π, π]`.
///
/// The first row and column of the result are exactly zero and the
/// transition probabilities of any `Σ̃` built from the phases are unchanged.
/// Applying `gauge_fix` twice equals applying it once.
pub fn gauge_fix(raw: &RealMatrix) -> Result<PhaseMatrix, PhaseError> {
    if !raw.is_square() {
        return Err(PhaseError::NotSquare {
            n_rows: raw.n_rows(),
            n_cols: raw.n_cols(),
        });
    }
    let n = raw.n_rows();
    let mut phi = vec![0.0; n * n];
    for i in 1..n {
        for j in 1..n {
            phi[i * n + j] = wrap_angle(raw[(i, j)] - raw[(i, 0)] - raw[(0, j)] + raw[(0, 0)]);
        }
    }
    Ok(PhaseMatrix {
        dimension: n,
        phi,
    })
}

/// Entrywise square roots of a validated probability matrix. Every row and
/// column is a unit vector up to the validation tolerance. Entries within
/// tolerance below zero are clamped before the root.
pub fn sqrt_matrix(pi: &ProbabilityMatrix) -> RealMatrix {
    let n = pi.dimension();
    RealMatrix::from_fn(n, n, |i, j| pi.get(i, j).max(0.0).sqrt())
}

/// `Σ̃_{ij} = σ_{ij} e^{iφ_{ij}}`; the modulus of each entry is `σ_{ij}`.
pub fn apply_phases(sigma: &RealMatrix, phi: &PhaseMatrix) -> Result<ComplexMatrix, PhaseError> {
    if !sigma.is_square() {
        return Err(PhaseError::NotSquare {
            n_rows: sigma.n_rows(),
            n_cols: sigma.n_cols(),
        });
    }
    if sigma.n_rows() != phi.dimension() {
        return Err(PhaseError::Dimension {
            expected: sigma.n_rows(),
            got: phi.dimension(),
        });
    }
    let n = sigma.n_rows();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let (s, c) = phi.get(i, j).sin_cos();
        Complex64::new(sigma[(i, j)] * c, sigma[(i, j)] * s)
    }))
}

/// Reduces a complex square matrix to its gauge-canonical representative:
/// same entry moduli, phases gauge-fixed to zero first row and column.
pub fn canonicalize_gauge(m: &ComplexMatrix) -> Result<ComplexMatrix, PhaseError> {
    if !m.is_square() {
        return Err(PhaseError::NotSquare {
            n_rows: m.n_rows(),
            n_cols: m.n_cols(),
        });
    }
    let n = m.n_rows();
    let moduli = RealMatrix::from_fn(n, n, |i, j| m[(i, j)].norm());
    let raw = RealMatrix::from_fn(n, n, |i, j| m[(i, j)].im.atan2(m[(i, j)].re));
    apply_phases(&moduli, &gauge_fix(&raw)?)
}

/// Solver outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Phases achieving a unitarity residual below tolerance were found.
    Feasible,
    /// An analytic certificate rules a phase completion out (`N = 3` only).
    Infeasible,
    /// No completion was found, but none was ruled out.
    Inconclusive,
}

/// Which index pairs a failed triangle certificate refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairAxis {
    Rows,
    Columns,
}

/// Witness of non-unistochasticity at `N = 3`: for the given pair of rows
/// (or columns), the largest link magnitude `L_k = √(p_{ik} p_{jk})` exceeds
/// the sum of the other two by `gap`, so no phases can close the triangle
/// and the corresponding rows of `Σ̃` can never be orthogonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfeasibilityCertificate {
    pub axis: PairAxis,
    pub pair: (usize, usize),
    pub gap: f64,
}

/// Outcome envelope of [`solve_phases`].
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Gauge-fixed phases; present exactly when the status is feasible.
    pub phases: Option<PhaseMatrix>,
    /// Best unitarity residual achieved.
    pub residual: f64,
    pub starts_used: usize,
    pub iterations_total: usize,
    pub seed: u64,
    /// Present exactly when the status is infeasible.
    pub certificate: Option<InfeasibilityCertificate>,
}

/// Configuration for [`solve_phases`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Feasibility tolerance on the unitarity residual.
    pub tol: f64,
    /// Iteration cap per start.
    pub max_iter: usize,
    /// Number of starts: the zero-phase start plus seeded random restarts.
    pub starts: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
            starts: 32,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), PhaseError> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(PhaseError::Config {
                reason: "tolerance must be positive and finite",
            });
        }
        if self.starts == 0 {
            return Err(PhaseError::Config {
                reason: "at least one start is required",
            });
        }
        if self.max_iter == 0 {
            return Err(PhaseError::Config {
                reason: "at least one iteration per start is required",
            });
        }
        Ok(())
    }
}

/// Closed-form phase completion at `N = 2`.
///
/// Bistochasticity forces `Π = [[p, 1−p], [1−p, p]]`, and
/// `Σ̃ = [[√p, √(1−p)], [√(1−p), −√p]]` is unitary for every `p`: the rows
/// are orthogonal because the two cross terms cancel. The canonical phases
/// are `φ_{11} = π` with zeros elsewhere; when `p ∈ {0, 1}` the off-diagonal
/// cross terms vanish and the all-zero phases are returned instead (so the
/// identity matrix completes to the identity).
pub fn solve_phases_closed_form_n2(pi: &ProbabilityMatrix) -> Result<SolveReport, PhaseError> {
    if pi.dimension() != 2 {
        return Err(PhaseError::Dimension {
            expected: 2,
            got: pi.dimension(),
        });
    }
    let p = pi.get(0, 0);
    let q = pi.get(0, 1);
    let mut phases = PhaseMatrix::zeros(2);
    if p * q > 0.0 {
        phases.phi[3] = PI;
    }
    let sigma_tilde = apply_phases(&sqrt_matrix(pi), &phases)?;
    let residual = linalg::unitarity_residual(&sigma_tilde).expect("square by construction");
    Ok(SolveReport {
        status: SolveStatus::Feasible,
        phases: Some(phases),
        residual,
        starts_used: 0,
        iterations_total: 0,
        seed: 0,
        certificate: None,
    })
}

/// Verdict of the `N = 3` analytic certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum N3Verdict {
    Feasible,
    Infeasible(InfeasibilityCertificate),
}

impl N3Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible)
    }
}

/// Decides unistochasticity of a 3×3 bistochastic matrix.
///
/// For each pair of rows (and of columns), the three link magnitudes
/// `L_k = √(p_{ik} p_{jk})` must be able to close a triangle after phase
/// rotation: `max_k L_k ≤ Σ_{others} L_k`. A violated pair is returned as an
/// [`InfeasibilityCertificate`]; otherwise phases exist and the matrix is
/// unistochastic. The solver-agreement suites validate this criterion
/// against multistart optimization on ≥ 10⁴ Birkhoff-sampled matrices.
pub fn certify_n3(pi: &ProbabilityMatrix) -> Result<N3Verdict, PhaseError> {
    if pi.dimension() != 3 {
        return Err(PhaseError::Dimension {
            expected: 3,
            got: pi.dimension(),
        });
    }
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        for axis in [PairAxis::Rows, PairAxis::Columns] {
            let link = |k: usize| -> f64 {
                match axis {
                    PairAxis::Rows => (pi.get(i, k).max(0.0) * pi.get(j, k).max(0.0)).sqrt(),
                    PairAxis::Columns => (pi.get(k, i).max(0.0) * pi.get(k, j).max(0.0)).sqrt(),
                }
            };
            let links = [link(0), link(1), link(2)];
            let total: f64 = links.iter().sum();
            let max = links.iter().fold(0.0f64, |m, &x| m.max(x));
            let gap = max - (total - max);
            if gap > CERTIFICATE_TOL {
                return Ok(N3Verdict::Infeasible(InfeasibilityCertificate {
                    axis,
                    pair: (i, j),
                    gap,
                }));
            }
        }
    }
    Ok(N3Verdict::Feasible)
}

// ---------------------------------------------------------------------------
// Least-squares residual map over the gauge-fixed interior phases.
// ---------------------------------------------------------------------------

/// Off-diagonal residual map of `Σ̃†Σ̃ − I` over the `(N−1)²` interior
/// phases. The diagonal entries depend only on the column norms of `σ` and
/// enter the objective as a constant.
struct ResidualMap<'a> {
    n: usize,
    sigma: &'a RealMatrix,
    /// Σ_a (‖σ col a‖² − 1)², the phase-independent part of the objective.
    diag_const_sq: f64,
}

impl<'a> ResidualMap<'a> {
    fn new(sigma: &'a RealMatrix) -> Self {
        let n = sigma.n_rows();
        let mut diag_const_sq = 0.0;
        for a in 0..n {
            let norm_sq: f64 = (0..n).map(|k| sigma[(k, a)] * sigma[(k, a)]).sum();
            diag_const_sq += (norm_sq - 1.0) * (norm_sq - 1.0);
        }
        Self {
            n,
            sigma,
            diag_const_sq,
        }
    }

    fn n_params(&self) -> usize {
        (self.n - 1) * (self.n - 1)
    }

    fn n_residuals(&self) -> usize {
        self.n * (self.n - 1)
    }

    /// Unit phasors `e^{iφ_{kj}}` for the full (gauge-fixed) phase grid.
    fn phasors(&self, interior: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let mut e = vec![Complex64::new(1.0, 0.0); n * n];
        for i in 1..n {
            for j in 1..n {
                let (s, c) = interior[(i - 1) * (n - 1) + (j - 1)].sin_cos();
                e[i * n + j] = Complex64::new(c, s);
            }
        }
        e
    }

    /// Gram off-diagonals `G_{ab} = Σ_k σ_{ka} σ_{kb} e^{i(φ_{kb} − φ_{ka})}`
    /// for all pairs `a < b`, plus the per-term phasor products needed by the
    /// Jacobian.
    fn gram_offdiag(&self, phasors: &[Complex64], a: usize, b: usize) -> (Complex64, Vec<Complex64>) {
        let n = self.n;
        let mut g = Complex64::new(0.0, 0.0);
        let mut terms = Vec::with_capacity(n);
        for k in 0..n {
            let t = self.sigma[(k, a)] * self.sigma[(k, b)]
                * (phasors[k * n + b] * phasors[k * n + a].conj());
            terms.push(t);
            g += t;
        }
        (g, terms)
    }

    /// Full objective `f(φ) = ‖Σ̃†Σ̃ − I‖²_F`.
    fn objective(&self, interior: &[f64]) -> f64 {
        let phasors = self.phasors(interior);
        let mut f = self.diag_const_sq;
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                let (g, _) = self.gram_offdiag(&phasors, a, b);
                f += 2.0 * g.norm_sqr();
            }
        }
        f
    }

    /// Weighted residual vector (`‖r‖² =` phase-dependent part of the
    /// objective) and its Jacobian with respect to the interior phases.
    fn residual_and_jacobian(&self, interior: &[f64]) -> (Vec<f64>, RealMatrix) {
        let n = self.n;
        let sqrt2 = 2.0f64.sqrt();
        let phasors = self.phasors(interior);
        let mut r = Vec::with_capacity(self.n_residuals());
        let mut jac = RealMatrix::zeros(self.n_residuals(), self.n_params().max(1));
        let mut row = 0;
        for a in 0..n {
            for b in (a + 1)..n {
                let (g, terms) = self.gram_offdiag(&phasors, a, b);
                r.push(sqrt2 * g.re);
                r.push(sqrt2 * g.im);
                // ∂G_ab/∂φ_{pb} = i T_p and ∂G_ab/∂φ_{pa} = −i T_p.
                for p in 1..n {
                    let t = terms[p];
                    if b >= 1 {
                        let col = (p - 1) * (n - 1) + (b - 1);
                        jac[(row, col)] += sqrt2 * -t.im;
                        jac[(row + 1, col)] += sqrt2 * t.re;
                    }
                    if a >= 1 {
                        let col = (p - 1) * (n - 1) + (a - 1);
                        jac[(row, col)] -= sqrt2 * -t.im;
                        jac[(row + 1, col)] -= sqrt2 * t.re;
                    }
                }
                row += 2;
            }
        }
        (r, jac)
    }
}

/// Objective `f(φ) = ‖Σ̃(φ)†Σ̃(φ) − I‖²_F` over the `(N−1)²` gauge-fixed
/// interior phases (row-major over `i, j ≥ 1`).
pub fn unitarity_objective(sigma: &RealMatrix, interior: &[f64]) -> Result<f64, PhaseError> {
    let map = residual_map_checked(sigma, interior)?;
    Ok(map.objective(interior))
}

/// Analytic gradient of [`unitarity_objective`] with respect to the interior
/// phases.
pub fn unitarity_objective_gradient(
    sigma: &RealMatrix,
    interior: &[f64],
) -> Result<Vec<f64>, PhaseError> {
    let map = residual_map_checked(sigma, interior)?;
    let (r, jac) = map.residual_and_jacobian(interior);
    let k = map.n_params();
    let mut grad = vec![0.0; k];
    for (row, r_val) in r.iter().enumerate() {
        for (col, g) in grad.iter_mut().enumerate() {
            *g += 2.0 * jac[(row, col)] * r_val;
        }
    }
    Ok(grad)
}

fn residual_map_checked<'a>(
    sigma: &'a RealMatrix,
    interior: &[f64],
) -> Result<ResidualMap<'a>, PhaseError> {
    if !sigma.is_square() {
        return Err(PhaseError::NotSquare {
            n_rows: sigma.n_rows(),
            n_cols: sigma.n_cols(),
        });
    }
    let n = sigma.n_rows();
    let expected = (n - 1) * (n - 1);
    if interior.len() != expected {
        return Err(PhaseError::Dimension {
            expected,
            got: interior.len(),
        });
    }
    Ok(ResidualMap::new(sigma))
}

/// One damped least-squares descent from `start`; returns the final phases
/// and the number of outer iterations consumed.
///
/// Damping acts on the scaled normal equations `(JᵀJ + λ diag JᵀJ) δ = −Jᵀr`
/// and is adapted by the gain ratio between actual and predicted reduction
/// (Nielsen's schedule), starting at `λ = 1e-3`.
fn lm_minimize(
    map: &ResidualMap<'_>,
    mut phi: Vec<f64>,
    cfg: &SolverConfig,
) -> (Vec<f64>, usize) {
    let k = map.n_params();
    let mut f = map.objective(&phi);
    // Converge well below the feasibility tolerance so the authoritative
    // residual check cannot flip the verdict.
    let target = (0.5 * cfg.tol) * (0.5 * cfg.tol);
    let mut lambda = 1e-3;
    let mut nu = 2.0;
    let mut iters = 0;

    if k == 0 {
        return (phi, 0);
    }

    'outer: for _ in 0..cfg.max_iter {
        if f <= target {
            break;
        }
        iters += 1;
        let (r, jac) = map.residual_and_jacobian(&phi);
        let mut grad = vec![0.0; k];
        for (row, r_val) in r.iter().enumerate() {
            for col in 0..k {
                grad[col] += jac[(row, col)] * r_val;
            }
        }
        let grad_inf = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_inf <= 1e-14 * (1.0 + f) {
            break;
        }
        let mut jtj = RealMatrix::zeros(k, k);
        for row in 0..r.len() {
            for c1 in 0..k {
                let v = jac[(row, c1)];
                if v == 0.0 {
                    continue;
                }
                for c2 in c1..k {
                    jtj[(c1, c2)] += v * jac[(row, c2)];
                }
            }
        }
        for c1 in 0..k {
            for c2 in 0..c1 {
                jtj[(c1, c2)] = jtj[(c2, c1)];
            }
        }
        let scale: Vec<f64> = (0..k).map(|c| jtj[(c, c)].max(1e-12)).collect();
        loop {
            let mut damped = jtj.clone();
            for c in 0..k {
                damped[(c, c)] += lambda * scale[c];
            }
            let neg_grad: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = match linalg::solve_spd(&damped, &neg_grad) {
                Ok(s) => s,
                Err(_) => {
                    lambda *= nu;
                    nu *= 2.0;
                    if lambda > 1e15 {
                        break 'outer;
                    }
                    continue;
                }
            };
            let phi_new: Vec<f64> = phi.iter().zip(&step).map(|(p, d)| p + d).collect();
            let f_new = map.objective(&phi_new);
            // Predicted reduction of the quadratic model, for the gain ratio.
            let predicted: f64 = step
                .iter()
                .zip(&grad)
                .zip(&scale)
                .map(|((d, g), s)| d * (lambda * s * d - g))
                .sum();
            if f_new < f && predicted > 0.0 {
                let rho = (f - f_new) / predicted;
                let shrink = (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                lambda = (lambda * shrink).max(1e-14);
                nu = 2.0;
                let step_inf = step.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                let decrease = f - f_new;
                phi = phi_new;
                f = f_new;
                if step_inf < 1e-13 || decrease <= 1e-16 * f {
                    break 'outer;
                }
                break;
            }
            lambda *= nu;
            nu *= 2.0;
            if lambda > 1e15 {
                break 'outer;
            }
        }
    }
    (phi, iters)
}

/// Projection onto the fixed-moduli set: keep each entry's phase, restore
/// its modulus to `σ_{ij}`.
fn moduli_projection(z: &ComplexMatrix, sigma: &RealMatrix) -> ComplexMatrix {
    let n = sigma.n_rows();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let v = z[(i, j)];
        let norm = v.norm();
        if norm == 0.0 || sigma[(i, j)] == 0.0 {
            Complex64::new(sigma[(i, j)], 0.0)
        } else {
            v * (sigma[(i, j)] / norm)
        }
    })
}

/// Reflection-based warm start (relaxed averaged alternating reflections
/// between the unitary manifold and the fixed-moduli torus): walks a random
/// phase start into the basin of a completion far more reliably than a raw
/// descent, leaving the damped least-squares polish to converge at machine
/// precision. Returns gauge-fixed interior phases and the sweeps consumed.
fn reflection_warm_start(
    sigma: &RealMatrix,
    interior: Vec<f64>,
    cap: usize,
) -> (Vec<f64>, usize) {
    const BETA: f64 = 0.9;
    let n = sigma.n_rows();
    let mut z = ComplexMatrix::from_fn(n, n, |i, j| {
        let (s, c) = if i >= 1 && j >= 1 {
            interior[(i - 1) * (n - 1) + (j - 1)].sin_cos()
        } else {
            (0.0, 1.0)
        };
        Complex64::new(sigma[(i, j)] * c, sigma[(i, j)] * s)
    });
    let mut sweeps = 0;
    let mut best = z.clone();
    let mut best_gap = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..cap {
        let shadow = moduli_projection(&z, sigma);
        let reflected = ComplexMatrix::from_fn(n, n, |i, j| 2.0 * shadow[(i, j)] - z[(i, j)]);
        let unitary = match linalg::nearest_unitary(&reflected) {
            Ok(u) => u,
            Err(_) => break,
        };
        sweeps += 1;
        // Shadow-to-manifold distance monitors feasibility of this sweep.
        let gap = unitary.max_abs_diff(&shadow).expect("same shape");
        if gap < best_gap {
            best_gap = gap;
            best = shadow.clone();
            stalled = 0;
        } else {
            stalled += 1;
        }
        if best_gap < 1e-8 || stalled >= 150 {
            break;
        }
        z = ComplexMatrix::from_fn(n, n, |i, j| {
            BETA * (z[(i, j)] + unitary[(i, j)] - shadow[(i, j)])
                + (1.0 - BETA) * shadow[(i, j)]
        });
    }
    let raw = RealMatrix::from_fn(n, n, |i, j| best[(i, j)].im.atan2(best[(i, j)].re));
    let fixed = gauge_fix(&raw).expect("square by construction");
    let mut out = vec![0.0; (n - 1) * (n - 1)];
    for i in 1..n {
        for j in 1..n {
            out[(i - 1) * (n - 1) + (j - 1)] = fixed.get(i, j);
        }
    }
    (out, sweeps)
}

/// One multistart unit: warm start, descent, and a few basin-hopping
/// perturbation rounds, all against the start's own deterministic stream.
///
/// Start 0 is the zero-phase matrix (the plain square-root matrix), which
/// already solves classical-like inputs exactly and is polished without
/// hopping. Every other start draws uniform phases, is walked toward a
/// completion by alternating projections, polished by damped least squares,
/// and — while the iteration budget lasts — perturbed and re-polished to
/// escape shallow local minima. Returns the best phases of the start and the
/// iterations consumed.
fn run_start(
    map: &ResidualMap<'_>,
    sigma: &RealMatrix,
    start_idx: usize,
    cfg: &SolverConfig,
) -> (Vec<f64>, usize) {
    let k = map.n_params();
    let target = (0.5 * cfg.tol) * (0.5 * cfg.tol);
    if start_idx == 0 {
        return lm_minimize(map, vec![0.0; k], cfg);
    }
    let mut rng = Xoshiro256::stream_for(cfg.seed, start_idx as u64);
    let uniform: Vec<f64> = (0..k).map(|_| rng.uniform_open_closed(-PI, PI)).collect();
    let (warmed, sweeps) = reflection_warm_start(sigma, uniform, cfg.max_iter.min(600));
    let mut iterations = sweeps;
    let (mut best_phi, used) = lm_minimize(map, warmed, cfg);
    iterations += used;
    let mut best_f = map.objective(&best_phi);
    let mut budget = cfg.max_iter.saturating_sub(used);
    while best_f > target && budget > 0 {
        let hop: Vec<f64> = best_phi
            .iter()
            .map(|p| p + 0.5 * rng.next_gaussian())
            .collect();
        let (rewalked, sweeps) = reflection_warm_start(sigma, hop, budget.min(60));
        budget = budget.saturating_sub(sweeps.max(1));
        iterations += sweeps;
        let hop_cfg = SolverConfig {
            max_iter: budget.max(1),
            ..*cfg
        };
        let (phi, used) = lm_minimize(map, rewalked, &hop_cfg);
        iterations += used;
        budget = budget.saturating_sub(used.max(1));
        let f = map.objective(&phi);
        if f < best_f {
            best_f = f;
            best_phi = phi;
        }
    }
    (best_phi, iterations)
}

/// Canonical phase matrix from interior phases: gauge-fixed, wrapped, and
/// with the unobservable phases at zero entries of `σ` set to zero.
fn canonical_phases(sigma: &RealMatrix, interior: &[f64]) -> PhaseMatrix {
    let n = sigma.n_rows();
    let mut phi = vec![0.0; n * n];
    for i in 1..n {
        for j in 1..n {
            if sigma[(i, j)] != 0.0 {
                phi[i * n + j] = wrap_angle(interior[(i - 1) * (n - 1) + (j - 1)]);
            }
        }
    }
    PhaseMatrix::from_canonical(n, phi)
}

/// Finds phases making `Σ̃ = (e^{iφ_{ij}} √p_{ij})` unitary, or reports the
/// failure mode.
///
/// Minimizes `‖Σ̃(φ)†Σ̃(φ) − I‖²_F` over the gauge-fixed interior phases by
/// damped least squares with analytic Jacobian. The first start is the zero
/// phase matrix (the plain square-root matrix); the remaining starts draw
/// uniform phases from seed-derived streams. Starts stop early once the
/// feasibility tolerance is met. At `N = 3` the analytic certificate decides
/// between infeasible and inconclusive when the optimizer fails.
pub fn solve_phases(pi: &ProbabilityMatrix, cfg: &SolverConfig) -> Result<SolveReport, PhaseError> {
    cfg.validate()?;
    let n = pi.dimension();
    let sigma = sqrt_matrix(pi);
    let map = ResidualMap::new(&sigma);
    let k = map.n_params();

    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut iterations_total = 0;
    let mut starts_used = 0;

    for start_idx in 0..cfg.starts {
        starts_used += 1;
        let (phi, iters) = run_start(&map, &sigma, start_idx, cfg);
        iterations_total += iters;
        let candidate = canonical_phases(&sigma, &phi);
        let sigma_tilde = apply_phases(&sigma, &candidate)?;
        let residual = linalg::unitarity_residual(&sigma_tilde).expect("square by construction");
        let improved = match &best {
            None => true,
            Some((best_res, _, _)) => residual < *best_res,
        };
        if improved {
            best = Some((residual, start_idx, phi));
        }
        if residual < cfg.tol {
            break;
        }
    }

    let (residual, _, phi) = best.expect("at least one start ran");
    let feasible = residual < cfg.tol;
    let certificate = if n == 3 && !feasible {
        match certify_n3(pi)? {
            N3Verdict::Infeasible(cert) => Some(cert),
            N3Verdict::Feasible => None,
        }
    } else {
        None
    };
    let status = if feasible {
        SolveStatus::Feasible
    } else if certificate.is_some() {
        SolveStatus::Infeasible
    } else {
        SolveStatus::Inconclusive
    };
    Ok(SolveReport {
        status,
        phases: if feasible {
            Some(canonical_phases(&sigma, &phi))
        } else {
            None
        },
        residual,
        starts_used,
        iterations_total,
        seed: cfg.seed,
        certificate,
    })
}
