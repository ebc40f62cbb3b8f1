//! Feasibility-finding solvers: dual-space L-BFGS projection, Nesterov
//! projected gradient, Douglas-Rachford splitting, and factored gradient
//! descent, plus the shared affine projection and Wolfe line search.
//!
//! All solvers stop when the ℓ₂ feasibility residual ‖𝒵(X) − b‖₂ drops below
//! `feas_tol`, when an optional ℓ₁ noise budget is met, or at `max_iters`.

mod affine;
mod dual;
mod fgd;
mod line_search;
mod nesterov;

pub use affine::{affine_project, douglas_rachford, AffineProjector};
pub use dual::{dual_theta, lbfgs_dual_project, DualState};
pub use fgd::fgd;
pub use line_search::wolfe_line_search;
pub use nesterov::nesterov_feasibility;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Shared solver configuration.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// ℓ₂ feasibility tolerance on ‖𝒵(X) − b‖₂.
    pub feas_tol: f64,
    /// Fixed stepsize for the gradient methods (ignored by L-BFGS and DR).
    pub stepsize: f64,
    pub lbfgs_memory: usize,
    pub wolfe_c1: f64,
    pub wolfe_c2: f64,
    /// Factor rank for FGD.
    pub rank: Option<usize>,
    /// Optional early stop once ‖𝒵(X) − b‖₁ is within this budget (the noisy
    /// feasibility membership test).
    pub l1_budget: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 10_000,
            feas_tol: 1e-5,
            stepsize: 0.1,
            lbfgs_memory: 10,
            wolfe_c1: 1e-4,
            wolfe_c2: 0.9,
            rank: None,
            l1_budget: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.feas_tol <= 0.0 {
            return Err(Error::Domain("feas_tol must be positive".into()));
        }
        if self.stepsize <= 0.0 {
            return Err(Error::Domain("stepsize must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Domain("max_iters must be positive".into()));
        }
        if self.lbfgs_memory == 0 {
            return Err(Error::Domain("lbfgs_memory must be positive".into()));
        }
        if !(0.0 < self.wolfe_c1 && self.wolfe_c1 < self.wolfe_c2 && self.wolfe_c2 < 1.0) {
            return Err(Error::Domain(format!(
                "Wolfe constants must satisfy 0 < c1 < c2 < 1, got c1 = {}, c2 = {}",
                self.wolfe_c1, self.wolfe_c2
            )));
        }
        if let Some(r) = self.rank {
            if r == 0 {
                return Err(Error::Domain("rank must be positive".into()));
            }
        }
        Ok(())
    }

    pub(crate) fn is_feasible(&self, l2: f64, l1: f64) -> bool {
        l2 <= self.feas_tol || self.l1_budget.map_or(false, |budget| l1 <= budget)
    }
}

/// Why a solver run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    IterLimit,
    NumericalFailure,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::Converged => write!(f, "converged"),
            Termination::IterLimit => write!(f, "iter-limit"),
            Termination::NumericalFailure => write!(f, "numerical-failure"),
        }
    }
}

/// Per-run record: iteration count, residual trace, timing, and the number of
/// spectral factorizations performed.
#[derive(Clone, Debug)]
pub struct SolverReport {
    pub iterations: usize,
    /// ‖𝒵(X_k) − b‖₂ per iteration, including the initial point.
    pub residual_history: Vec<f64>,
    pub wall_time: f64,
    pub termination: Termination,
    pub eig_decompositions: usize,
    /// Final ℓ₁ residual ‖𝒵(X) − b‖₁ (the noisy-case membership quantity).
    pub residual_l1: f64,
}

impl SolverReport {
    pub fn final_residual(&self) -> f64 {
        *self
            .residual_history
            .last()
            .expect("residual history is never empty")
    }
}

/// Solver selector used by the harness and CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Lbfgs,
    Nesterov,
    DouglasRachford,
    Fgd,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverKind::Lbfgs => write!(f, "lbfgs"),
            SolverKind::Nesterov => write!(f, "nesterov"),
            SolverKind::DouglasRachford => write!(f, "dr"),
            SolverKind::Fgd => write!(f, "fgd"),
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lbfgs" => Ok(SolverKind::Lbfgs),
            "nesterov" => Ok(SolverKind::Nesterov),
            "dr" => Ok(SolverKind::DouglasRachford),
            "fgd" => Ok(SolverKind::Fgd),
            other => Err(Error::Domain(format!(
                "unknown solver '{other}' (expected lbfgs, nesterov, dr, or fgd)"
            ))),
        }
    }
}
