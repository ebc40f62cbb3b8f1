//! Rank-one PSD matrix sensing as a pure feasibility problem.
//!
//! A symmetric matrix X₀ ⪰ 0 is observed through m quadratic forms
//! bᵢ = zᵢᵀX₀zᵢ (plus optional noise), and recovery means finding any point
//! of the feasible set {X ⪰ 0 : ‖𝒵(X) − b‖ small} — no rank penalty, no
//! regularizer. The crate provides:
//!
//! - [`spectral`]: dense symmetric eigendecomposition, PSD projection, rank
//!   truncation, square roots;
//! - [`sensing`]: ensembles of sensing vectors, the measurement map and its
//!   adjoint, noise models, the covariance coordinate transform, and the
//!   phase-retrieval lifting;
//! - [`solvers`]: four feasibility solvers — dual-space L-BFGS projection,
//!   Nesterov projected gradient, Douglas-Rachford splitting, and factored
//!   gradient descent;
//! - [`diagnostics`]: empirical boundedness ratios, covariance spectrum
//!   checks, the trace band of the transformed feasible set, and an evaluable
//!   recovery error bound;
//! - [`harness`]: Monte-Carlo experiment drivers (phase transitions, noise
//!   sweeps, full-rank recovery, solver benchmark), the phase-retrieval demo,
//!   and deterministic data-table output.
//!
//! Everything downstream of a seed is deterministic; Monte-Carlo trials use
//! independently derived seed streams so parallel execution does not change
//! results. Start with the runnable programs in `examples/`.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod rng;
pub mod sensing;
pub mod solvers;
pub mod spectral;

pub use error::{Error, Result};
pub use sensing::{
    build_transform, sample_ensemble, Distribution, MeasurementSet, NoiseModel, SensingEnsemble,
    TransformContext,
};
pub use solvers::{SolverConfig, SolverKind, SolverReport, Termination};
pub use spectral::SymMatrix;
