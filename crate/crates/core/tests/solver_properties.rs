//! Cross-module properties of the phase-completion solver: round trips
//! against Haar-derived probability matrices, agreement with the closed form
//! at N = 2 and the analytic certificate at N = 3, and consistency with the
//! Stern-Gerlach representation.

use core::f64::consts::PI;

use unistoch_core::knob::{self, AxisAngle, KnobGroup, KnobTransformation};
use unistoch_core::linalg::{transition_probability_matrix, unitarity_residual, RealMatrix};
use unistoch_core::modality::validate_bistochastic;
use unistoch_core::phase::{
    apply_phases, canonicalize_gauge, certify_n3, solve_phases, solve_phases_closed_form_n2,
    sqrt_matrix, wrap_angle, SolveStatus, SolverConfig,
};
use unistoch_core::rng::Xoshiro256;
use unistoch_core::sample;

#[test]
fn haar_round_trip_across_dimensions() {
    let mut rng = Xoshiro256::seed_from(1001);
    let cfg = SolverConfig::default();
    for n in [2usize, 3, 4, 6, 8] {
        for _ in 0..10 {
            let u = sample::haar_unitary(n, &mut rng);
            let pi = transition_probability_matrix(&u).unwrap();
            let report = solve_phases(&pi, &cfg).unwrap();
            assert_eq!(report.status, SolveStatus::Feasible, "n = {n}");
            assert!(report.residual < 1e-10, "n = {n}: residual {}", report.residual);

            let sigma_tilde =
                apply_phases(&sqrt_matrix(&pi), report.phases.as_ref().unwrap()).unwrap();
            let reproduced = transition_probability_matrix(&sigma_tilde).unwrap();
            for (x, y) in pi.entries().iter().zip(reproduced.entries()) {
                assert!((x - y).abs() < 1e-8, "n = {n}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn feasible_solves_are_gauge_invariant_in_probability() {
    let mut rng = Xoshiro256::seed_from(1002);
    let cfg = SolverConfig::default();
    for _ in 0..20 {
        let u = sample::haar_unitary(4, &mut rng);
        let pi = transition_probability_matrix(&u).unwrap();
        let report = solve_phases(&pi, &cfg).unwrap();
        let sigma_tilde =
            apply_phases(&sqrt_matrix(&pi), report.phases.as_ref().unwrap()).unwrap();
        let canonical = canonicalize_gauge(&sigma_tilde).unwrap();
        let before = transition_probability_matrix(&sigma_tilde).unwrap();
        let after = transition_probability_matrix(&canonical).unwrap();
        for (x, y) in before.entries().iter().zip(after.entries()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn solver_agrees_with_closed_form_at_n2() {
    let mut rng = Xoshiro256::seed_from(1003);
    let cfg = SolverConfig::default();
    for _ in 0..100 {
        let p = 0.01 + 0.98 * rng.next_f64();
        let raw = RealMatrix::new(2, 2, vec![p, 1.0 - p, 1.0 - p, p]).unwrap();
        let pi = validate_bistochastic(&raw, 1e-12).unwrap();

        let numeric = solve_phases(&pi, &cfg).unwrap();
        let closed = solve_phases_closed_form_n2(&pi).unwrap();
        assert_eq!(numeric.status, SolveStatus::Feasible);

        let phi_n = numeric.phases.unwrap();
        let phi_c = closed.phases.unwrap();
        for i in 0..2 {
            for j in 0..2 {
                // Equal as angles; ±π is the same phase.
                let delta = wrap_angle(phi_n.get(i, j) - phi_c.get(i, j)).abs();
                let delta = delta.min((delta - 2.0 * PI).abs());
                assert!(delta < 1e-6, "p = {p}: phase ({i},{j}) differs by {delta:e}");
            }
        }
    }
}

#[test]
fn certificate_agrees_with_solver_on_birkhoff_samples() {
    // The acceptance suite runs the full 10^4-sample version; this keeps a
    // smaller guard in the regular test runs.
    let mut rng = Xoshiro256::seed_from(1004);
    let cfg = SolverConfig::default();
    let mut infeasible_seen = 0;
    for trial in 0..1500 {
        let num_perms = 2 + rng.next_index(5);
        let pi = sample::random_bistochastic(3, num_perms, &mut rng);
        let verdict = certify_n3(&pi).unwrap();
        let report = solve_phases(&pi, &cfg).unwrap();
        if !verdict.is_feasible() {
            infeasible_seen += 1;
            assert_ne!(
                report.status,
                SolveStatus::Feasible,
                "trial {trial}: certificate says infeasible but solver found phases"
            );
        }
        if report.status == SolveStatus::Feasible {
            assert!(verdict.is_feasible(), "trial {trial}");
        }
    }
    assert!(infeasible_seen > 10, "sampler never left the unistochastic region");
}

#[test]
fn stern_gerlach_solves_match_the_representation() {
    let mut rng = Xoshiro256::seed_from(1005);
    let cfg = SolverConfig::default();
    for _ in 0..100 {
        let theta = rng.uniform_open_closed(0.0, 2.0 * PI);
        let pi = knob::stern_gerlach_transition(theta).unwrap();
        let report = solve_phases(&pi, &cfg).unwrap();
        assert_eq!(report.status, SolveStatus::Feasible, "theta = {theta}");

        let solved =
            apply_phases(&sqrt_matrix(&pi), report.phases.as_ref().unwrap()).unwrap();
        let u = KnobGroup::SpinHalf
            .represent(&KnobTransformation::Rotation(
                AxisAngle::new([0.0, 1.0, 0.0], theta).unwrap(),
            ))
            .unwrap();
        let canonical_u = canonicalize_gauge(&u).unwrap();
        let canonical_solved = canonicalize_gauge(&solved).unwrap();
        let diff = canonical_solved.max_abs_diff(&canonical_u).unwrap();
        assert!(diff < 1e-6, "theta = {theta}: canonical forms differ by {diff:e}");
    }
}

#[test]
fn haar_transition_matrices_validate_bistochastic() {
    let mut rng = Xoshiro256::seed_from(1006);
    for n in [2usize, 3, 4, 8] {
        for _ in 0..50 {
            let u = sample::haar_unitary(n, &mut rng);
            assert!(unitarity_residual(&u).unwrap() < 1e-12);
            let pi = transition_probability_matrix(&u).unwrap();
            validate_bistochastic(&pi.as_real_matrix(), 1e-9)
                .unwrap_or_else(|e| panic!("n = {n}: {e}"));
        }
    }
}

#[test]
fn infeasible_counterexample_report_is_fully_reproducible() {
    let raw = RealMatrix::new(3, 3, vec![0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5]).unwrap();
    let pi = validate_bistochastic(&raw, 1e-12).unwrap();
    let cfg = SolverConfig::default();
    let a = solve_phases(&pi, &cfg).unwrap();
    let b = solve_phases(&pi, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.status, SolveStatus::Infeasible);
    assert_eq!(a.starts_used, cfg.starts);
    // The objective is phase-independent here; the floor is √(3/2) exactly.
    assert!((a.residual - 1.5f64.sqrt()).abs() < 1e-10);
}
