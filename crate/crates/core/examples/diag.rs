use unistoch_core::linalg::transition_probability_matrix;
use unistoch_core::phase::{solve_phases, SolverConfig};
use unistoch_core::rng::Xoshiro256;
use unistoch_core::sample;

fn main() {
    let mut rng = Xoshiro256::seed_from(1001);
    for n in [2usize, 3, 4, 6] { for _ in 0..25 { let _ = sample::haar_unitary(n, &mut rng); } }
    for trial in 0..25 {
        let u = sample::haar_unitary(8, &mut rng);
        let pi = transition_probability_matrix(&u).unwrap();
        let report = solve_phases(&pi, &SolverConfig::default()).unwrap();
        if report.residual >= 1e-10 {
            println!("trial {trial}: residual {:.3e} after {} starts, {} iters", report.residual, report.starts_used, report.iterations_total);
            let mut cfg = SolverConfig::default();
            cfg.starts = 128;
            let r2 = solve_phases(&pi, &cfg).unwrap();
            println!("  with 128 starts: {:?} residual {:.3e} starts {}", r2.status, r2.residual, r2.starts_used);
            let mut cfg = SolverConfig::default();
            cfg.seed = 1;
            let r3 = solve_phases(&pi, &cfg).unwrap();
            println!("  with seed 1, 32 starts: {:?} residual {:.3e} starts {}", r3.status, r3.residual, r3.starts_used);
        }
    }
}
