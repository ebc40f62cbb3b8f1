//! Factored gradient descent: optimize a tall factor U with X = UUᵀ, so
//! PSDness and rank are enforced by construction and no spectral
//! factorizations are needed after the initialization.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sensing::SensingEnsemble;
use crate::solvers::{SolverConfig, SolverReport, Termination};
use crate::spectral::{eigh, SymMatrix};

/// Factored gradient descent with rank-r factor, spectral initialization
/// U₀U₀ᵀ ≈ best rank-r PSD approximation of 𝒵ᵀ(b), and iteration
/// U_k = (I − η∇f(X_{k−1}))U_{k−1}.
///
/// The initialization is rescaled by the positive scalar s minimizing
/// ‖s²·𝒵(U₀U₀ᵀ) − b‖₂. Exactly one spectral factorization is performed, at
/// initialization.
pub fn fgd(
    ensemble: &SensingEnsemble,
    b: &DVector<f64>,
    rank: usize,
    cfg: &SolverConfig,
) -> Result<(SymMatrix, SolverReport)> {
    cfg.validate()?;
    let n = ensemble.dim();
    if rank < 1 || rank > n {
        return Err(Error::Domain(format!(
            "fgd: rank {rank} out of range [1, {n}]"
        )));
    }
    if b.len() != ensemble.num_measurements() {
        return Err(Error::DimensionMismatch {
            context: "fgd",
            expected: ensemble.num_measurements(),
            found: b.len(),
        });
    }
    let start = Instant::now();
    let eta = cfg.stepsize;

    // spectral initialization: factor of the top-r clamped eigenpairs of Z^T(b)
    let anchor = ensemble.adjoint(b)?;
    let eig = eigh(&anchor)?;
    let eigs = 1usize;
    let mut u = DMatrix::zeros(n, rank);
    for j in 0..rank {
        let l = eig.eigenvalues[j].max(0.0);
        u.set_column(j, &(eig.eigenvectors.column(j) * l.sqrt()));
    }
    // one-dimensional scale fit: s^2 = <Z(U0 U0^T), b> / ||Z(U0 U0^T)||^2
    let x_init = SymMatrix::from_dense(&u * u.transpose())?;
    let v = ensemble.apply(&x_init)?;
    let denom = v.dot(&v);
    if denom > 0.0 {
        let s_sq = v.dot(b) / denom;
        if s_sq > 0.0 {
            u *= s_sq.sqrt();
        }
    }

    let mut x = SymMatrix::from_dense(&u * u.transpose())?;
    let mut res_vec = ensemble.apply(&x)? - b;
    let r0 = res_vec.norm();
    let mut history = vec![r0];
    let mut termination = Termination::IterLimit;
    let mut iterations = 0usize;
    let l1 = |v: &DVector<f64>| v.iter().map(|t| t.abs()).sum::<f64>();

    if cfg.is_feasible(r0, l1(&res_vec)) {
        termination = Termination::Converged;
    } else {
        for _ in 0..cfg.max_iters {
            let grad = ensemble.adjoint(&res_vec)?;
            u = &u - eta * (grad.matrix() * &u);
            x = SymMatrix::from_dense(&u * u.transpose())?;
            iterations += 1;

            res_vec = ensemble.apply(&x)? - b;
            let res = res_vec.norm();
            history.push(res);
            if cfg.is_feasible(res, l1(&res_vec)) {
                termination = Termination::Converged;
                break;
            }
            if res > 1e6 * r0.max(f64::MIN_POSITIVE) || !res.is_finite() {
                termination = Termination::NumericalFailure;
                break;
            }
        }
    }

    let report = SolverReport {
        iterations,
        residual_history: history,
        wall_time: start.elapsed().as_secs_f64(),
        termination,
        eig_decompositions: eigs,
        residual_l1: l1(&res_vec),
    };
    Ok((x, report))
}
