//! Thin command-line front end over the library's experiment harness. The
//! runnable programs in `examples/` are the richer entry points; this binary
//! exists for scripted runs and piping data tables to plotting tools.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use psd_sensing::harness::{
    default_test_image, demo_phase_retrieval, run_fullrank_sweep, run_noisy_sweep,
    run_phase_transition, run_solver, run_solver_bench, write_pgm, write_vector, ExperimentGrid,
};
use psd_sensing::sensing::{MeasurementSet, SensingEnsemble};
use psd_sensing::spectral::SymMatrix;
use psd_sensing::{Error, Result, SolverConfig, SolverKind, Termination};

#[derive(Parser)]
#[command(name = "psd-sensing", about = "Rank-one PSD matrix sensing experiments")]
struct Cli {
    /// Worker threads for Monte-Carlo trials (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value = "lbfgs")]
    solver: SolverKind,
    /// Feasibility tolerance on the l2 residual.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Recovery threshold for success/failure counting.
    #[arg(long, default_value_t = 1e-3)]
    success_eps: f64,
    /// Output data file; omit to print to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Failure-rate grid over (n, m) for planted rank-r recovery.
    PhaseTransition {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        /// Dimensions, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "20")]
        n: Vec<usize>,
        /// Measurement counts, comma separated; multipliers of n unless
        /// --absolute-m.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8,9,10")]
        m: Vec<usize>,
        #[arg(long)]
        absolute_m: bool,
    },
    /// Mean recovery error over (m, noise level) at fixed n, rank 3.
    NoisySweep {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "300,400,500")]
        m: Vec<usize>,
        /// Uniform noise half-widths, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0,0.001,0.01")]
        noise: Vec<f64>,
    },
    /// Mean recovery error for the full-rank decaying-spectrum matrix.
    Fullrank {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, value_delimiter = ',', default_value = "20,30,40,50")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8,9,10")]
        m: Vec<usize>,
        #[arg(long)]
        absolute_m: bool,
    },
    /// Four-solver benchmark on one shared rank-one instance.
    Bench {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Phase-retrieval demo: recover a test image with and without the PSD
    /// constraint; writes flat vectors and PGM images under the out prefix.
    RetrieveDemo {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Signal length; must be a perfect square.
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Measurement count (default 10n).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Output path prefix for <prefix>-{truth,psd,nopsd}.{txt,pgm}.
        #[arg(long, default_value = "retrieve")]
        out: PathBuf,
    },
    /// One-shot solve: read an ensemble and a measurement file, print the
    /// solver report.
    Solve {
        #[arg(long)]
        ensemble: PathBuf,
        #[arg(long)]
        measurements: PathBuf,
        #[arg(long, default_value = "lbfgs")]
        solver: SolverKind,
        /// Factor rank for fgd.
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
    },
}

fn grid_from(common: &CommonOpts, n: Vec<usize>, m: Vec<usize>, absolute_m: bool) -> ExperimentGrid {
    ExperimentGrid {
        n_values: n,
        m_values: m,
        m_is_multiple_of_n: !absolute_m,
        trials: common.trials,
        success_eps: common.success_eps,
        master_seed: common.seed,
        solver: common.solver,
        noise_eps_values: Vec::new(),
        feas_tol: common.tol,
        max_iters: common.max_iters,
    }
}

fn print_cells(cells: &[psd_sensing::harness::CellResult], with_noise: bool) {
    if with_noise {
        println!("m noise err");
        for c in cells {
            println!("{} {} {}", c.m, c.noise.unwrap_or(0.0), c.err);
        }
    } else {
        println!("m n err");
        for c in cells {
            println!("{} {} {}", c.m, c.n, c.err);
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    }

    match cli.command {
        Command::PhaseTransition {
            common,
            rank,
            n,
            m,
            absolute_m,
        } => {
            let grid = grid_from(&common, n, m, absolute_m);
            let cells = run_phase_transition(&grid, rank, common.out.as_deref())?;
            if common.out.is_none() {
                print_cells(&cells, false);
            }
        }
        Command::NoisySweep {
            common,
            n,
            m,
            noise,
        } => {
            let mut grid = grid_from(&common, vec![n], m, true);
            grid.m_is_multiple_of_n = false;
            grid.noise_eps_values = noise;
            let cells = run_noisy_sweep(&grid, common.out.as_deref())?;
            if common.out.is_none() {
                print_cells(&cells, true);
            }
        }
        Command::Fullrank {
            common,
            n,
            m,
            absolute_m,
        } => {
            let grid = grid_from(&common, n, m, absolute_m);
            let cells = run_fullrank_sweep(&grid, common.out.as_deref())?;
            if common.out.is_none() {
                print_cells(&cells, false);
            }
        }
        Command::Bench { seed, tol, out } => {
            let outcome = run_solver_bench(seed, tol, out.as_deref())?;
            println!("solver iterations eigs seconds residual status");
            for r in &outcome.records {
                println!(
                    "{} {} {} {:.6} {:e} {}",
                    r.label,
                    r.report.iterations,
                    r.report.eig_decompositions,
                    r.report.wall_time,
                    r.report.final_residual(),
                    r.report.termination
                );
            }
        }
        Command::RetrieveDemo {
            seed,
            n,
            m,
            tol,
            out,
        } => {
            let side = (n as f64).sqrt().round() as usize;
            if side * side != n {
                return Err(Error::Domain(format!(
                    "signal length {n} is not a perfect square"
                )));
            }
            let x0 = default_test_image(side);
            let m = m.unwrap_or(10 * n);
            let cfg = SolverConfig {
                feas_tol: tol,
                ..SolverConfig::default()
            };
            let outcome = demo_phase_retrieval(&x0, m, seed, &cfg)?;
            let stem = |tag: &str, ext: &str| {
                let mut p = out.clone().into_os_string();
                p.push(format!("-{tag}.{ext}"));
                PathBuf::from(p)
            };
            write_vector(&x0, stem("truth", "txt"))?;
            write_pgm(&x0, stem("truth", "pgm"))?;
            write_vector(&outcome.x_psd, stem("psd", "txt"))?;
            write_pgm(&outcome.x_psd, stem("psd", "pgm"))?;
            write_vector(&outcome.x_nopsd, stem("nopsd", "txt"))?;
            write_pgm(&outcome.x_nopsd, stem("nopsd", "pgm"))?;
            println!("psd relative error: {:e}", outcome.err_psd);
            println!("no-psd relative error: {:e}", outcome.err_nopsd);
        }
        Command::Solve {
            ensemble,
            measurements,
            solver,
            rank,
            tol,
            max_iters,
        } => {
            let z = SensingEnsemble::from_path(&ensemble)?;
            let ms = MeasurementSet::from_path(&measurements)?;
            let cfg = SolverConfig {
                feas_tol: tol,
                max_iters,
                l1_budget: (ms.noise_l1 > 0.0).then_some(ms.noise_l1),
                ..SolverConfig::default()
            };
            let anchor = SymMatrix::zeros(z.dim());
            let (x, report) = run_solver(solver, &z, &ms.b, &anchor, rank, &cfg)?;
            println!("termination: {}", report.termination);
            println!("iterations: {}", report.iterations);
            println!("eig decompositions: {}", report.eig_decompositions);
            println!("l2 residual: {:e}", report.final_residual());
            println!("l1 residual: {:e}", report.residual_l1);
            println!("trace: {}", x.trace());
            println!("seconds: {:.6}", report.wall_time);
            if report.termination == Termination::NumericalFailure {
                return Err(Error::NumericalFailure(
                    "solver stopped without reaching feasibility".into(),
                ));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
