//! Head-to-head comparison of the four feasibility solvers on one shared
//! rank-one instance (n = 15, m = 100, tolerance 1e-5).
//!
//!     cargo run --release --example solver_benchmark

use psd_sensing::harness::run_solver_bench;

fn main() -> psd_sensing::Result<()> {
    let outcome = run_solver_bench(1, 1e-5, Some("bench.dat".as_ref()))?;

    println!(
        "{:<10} {:>10} {:>6} {:>10} {:>12}  status",
        "solver", "iterations", "eigs", "seconds", "residual"
    );
    for r in &outcome.records {
        println!(
            "{:<10} {:>10} {:>6} {:>10.4} {:>12.3e}  {}",
            r.label,
            r.report.iterations,
            r.report.eig_decompositions,
            r.report.wall_time,
            r.report.final_residual(),
            r.report.termination
        );
    }
    println!();
    println!("dual projection needed the fewest iterations: {}", outcome.lbfgs_fewest_iterations);
    println!("rank-1 factored descent needed the fewest eigs: {}", outcome.fgd_r1_fewest_eigs);
    println!("wrote bench.dat");
    Ok(())
}
