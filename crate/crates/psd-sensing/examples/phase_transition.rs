//! Failure-rate grid for planted rank-one recovery: sweep the measurement
//! count as a multiple of the dimension and watch the success boundary.
//!
//!     cargo run --release --example phase_transition

use psd_sensing::harness::{run_phase_transition, ExperimentGrid};
use psd_sensing::SolverKind;

fn main() -> psd_sensing::Result<()> {
    let grid = ExperimentGrid {
        n_values: vec![12, 16, 20],
        m_values: (2..=8).collect(), // multiples of n
        m_is_multiple_of_n: true,
        trials: 10,
        success_eps: 1e-3,
        master_seed: 7,
        solver: SolverKind::Lbfgs,
        ..ExperimentGrid::default()
    };
    let cells = run_phase_transition(&grid, 1, Some("phase-transition.dat".as_ref()))?;

    println!("n      m   failure rate");
    for c in &cells {
        let bar = "#".repeat((c.err * 20.0).round() as usize);
        println!("{:<4} {:>5}   {:<5.2} {bar}", c.n, c.m, c.err);
    }
    println!("\nwrote phase-transition.dat (columns: m n err)");
    Ok(())
}
