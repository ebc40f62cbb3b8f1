//! Solve a single feasibility instance end to end with each solver, via the
//! same file formats the CLI uses: write an ensemble and a measurement set to
//! disk, read them back, solve, and compare reconstructions.
//!
//!     cargo run --release --example solve_one_instance

use psd_sensing::harness::{planted_diag, run_solver};
use psd_sensing::sensing::{sample_ensemble, Distribution, MeasurementSet, NoiseModel, SensingEnsemble};
use psd_sensing::spectral::SymMatrix;
use psd_sensing::{SolverConfig, SolverKind};

fn main() -> psd_sensing::Result<()> {
    let (n, m, rank) = (12, 72, 1);
    let x0 = planted_diag(n, rank);

    let dir = std::env::temp_dir();
    let e_path = dir.join("instance-ensemble.txt");
    let b_path = dir.join("instance-measurements.txt");
    sample_ensemble(n, m, 21, Distribution::UnitSphere).to_path(&e_path)?;

    {
        let z = SensingEnsemble::from_path(&e_path)?;
        z.measure(&x0, &NoiseModel::None, 0)?.to_path(&b_path)?;
    }

    // round trip through the files, then solve with all four methods
    let z = SensingEnsemble::from_path(&e_path)?;
    let ms = MeasurementSet::from_path(&b_path)?;
    println!("{:<10} {:>10} {:>12} {:>12}  status", "solver", "iterations", "residual", "error");
    for kind in [
        SolverKind::Lbfgs,
        SolverKind::Nesterov,
        SolverKind::DouglasRachford,
        SolverKind::Fgd,
    ] {
        let cfg = SolverConfig {
            stepsize: if kind == SolverKind::Fgd { 0.4 } else { 0.1 },
            ..SolverConfig::default()
        };
        let anchor = SymMatrix::zeros(n);
        let (x, report) = run_solver(kind, &z, &ms.b, &anchor, rank, &cfg)?;
        println!(
            "{:<10} {:>10} {:>12.3e} {:>12.3e}  {}",
            kind.to_string(),
            report.iterations,
            report.final_residual(),
            x.sub(&x0).frobenius_norm(),
            report.termination
        );
    }
    Ok(())
}
