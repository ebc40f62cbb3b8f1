//! Recovery under bounded measurement noise. The solver only asks for
//! membership in the l1 noise ball, and the recovery error tracks the noise
//! level while staying nearly flat in the measurement count.
//!
//!     cargo run --release --example noisy_recovery

use psd_sensing::harness::{run_noisy_sweep, ExperimentGrid};

fn main() -> psd_sensing::Result<()> {
    let grid = ExperimentGrid {
        n_values: vec![20], // rank-3 planted truth
        m_values: vec![120, 160, 200],
        m_is_multiple_of_n: false,
        trials: 10,
        master_seed: 11,
        noise_eps_values: vec![0.0, 1e-4, 1e-3, 1e-2],
        ..ExperimentGrid::default()
    };
    let cells = run_noisy_sweep(&grid, Some("noisy-sweep.dat".as_ref()))?;

    println!("m      noise    mean error");
    for c in &cells {
        println!("{:<6} {:<8} {:e}", c.m, c.noise.unwrap_or(0.0), c.err);
    }
    println!("\nwrote noisy-sweep.dat (columns: m noise err)");
    Ok(())
}
