//! Experiment drivers and artifact output: Monte-Carlo recovery grids, the
//! solver benchmark, the phase-retrieval demo, and plot-ready data tables.

mod experiments;
mod retrieval;
mod table;

pub use experiments::{
    effective_rank, planted_diag, run_fullrank_sweep, run_noisy_sweep, run_phase_transition,
    run_solver, run_solver_bench, BenchOutcome, BenchRecord, CellResult, ExperimentGrid,
};
pub use retrieval::{
    default_test_image, demo_phase_retrieval, read_vector, signed_relative_error, write_pgm,
    write_vector, RetrievalOutcome,
};
pub use table::{read_dat, write_dat, DataTable};
