//! Dual-space projection onto the intersection of the PSD cone and the
//! affine measurement set.
//!
//! For an anchor C, the Frobenius-nearest feasible PSD matrix is found by
//! maximizing the concave dual θ(y), whose value, primal reconstruction, and
//! gradient all have closed forms built from one PSD projection per
//! evaluation.

use std::cell::RefCell;
use std::collections::VecDeque;
use std::time::Instant;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::sensing::SensingEnsemble;
use crate::solvers::line_search::wolfe_line_search;
use crate::solvers::{SolverConfig, SolverReport, Termination};
use crate::spectral::{psd_project, SymMatrix};

/// Dual iterate: the multiplier y, its primal reconstruction X(y), the dual
/// value θ(y), and the ascent gradient ∇θ(y) = b − 𝒵(X(y)).
#[derive(Clone, Debug)]
pub struct DualState {
    pub y: DVector<f64>,
    pub x_of_y: SymMatrix,
    pub theta: f64,
    pub grad: DVector<f64>,
}

impl DualState {
    /// ℓ₂ feasibility residual of the reconstruction; equals ‖∇θ(y)‖₂.
    pub fn residual_l2(&self) -> f64 {
        self.grad.norm()
    }

    pub fn residual_l1(&self) -> f64 {
        self.grad.iter().map(|v| v.abs()).sum()
    }
}

/// Evaluate the dual at `y`:
///
/// X(y) = P_psd(C + 𝒵ᵀy), θ(y) = yᵀb + ½(‖C‖_F² − ‖X(y)‖_F²),
/// ∇θ(y) = b − 𝒵(X(y)).
pub fn dual_theta(
    anchor: &SymMatrix,
    ensemble: &SensingEnsemble,
    b: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<DualState> {
    if anchor.dim() != ensemble.dim() {
        return Err(Error::DimensionMismatch {
            context: "dual_theta anchor",
            expected: ensemble.dim(),
            found: anchor.dim(),
        });
    }
    if b.len() != ensemble.num_measurements() {
        return Err(Error::DimensionMismatch {
            context: "dual_theta measurements",
            expected: ensemble.num_measurements(),
            found: b.len(),
        });
    }
    let x = psd_project(&anchor.add(&ensemble.adjoint(y)?))?;
    let theta = y.dot(b)
        + 0.5 * (anchor.frobenius_norm().powi(2) - x.frobenius_norm().powi(2));
    let grad = b - ensemble.apply(&x)?;
    Ok(DualState {
        y: y.clone(),
        x_of_y: x,
        theta,
        grad,
    })
}

/// Project the anchor C onto {X ⪰ 0 : 𝒵(X) = b} by limited-memory
/// quasi-Newton ascent on θ with strong-Wolfe line search, starting from
/// y = 0.
pub fn lbfgs_dual_project(
    anchor: &SymMatrix,
    ensemble: &SensingEnsemble,
    b: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<(SymMatrix, SolverReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let m = ensemble.num_measurements();

    // every dual evaluation performs exactly one spectral factorization
    let eig_count = RefCell::new(0usize);
    let eval = |y: &DVector<f64>| -> Result<DualState> {
        *eig_count.borrow_mut() += 1;
        dual_theta(anchor, ensemble, b, y)
    };

    let mut state = eval(&DVector::zeros(m))?;
    let mut history = vec![state.residual_l2()];
    // curvature pairs in minimization form: (s, u) with u = -(grad_new - grad)
    let mut pairs: VecDeque<(DVector<f64>, DVector<f64>)> = VecDeque::new();
    // residual the caller actually cares about: the l1 one when membership is
    // an l1 ball, the l2 one otherwise
    let score = |st: &DualState| match cfg.l1_budget {
        Some(_) => st.residual_l1(),
        None => st.residual_l2(),
    };
    let mut best: Option<DualState> = None;
    // Noisy measurements can make exact feasibility unattainable, leaving
    // the dual unbounded; the ascent then wanders indefinitely with no
    // residual progress. When the caller passes an l1 budget (the noisy
    // membership test), cut the run once the best residual has gone a long
    // window without improving by at least 1%. Without a budget the dual is
    // proper and slow ill-conditioned runs are allowed their full budget.
    const STALL_LIMIT: usize = 500;
    let stall_enabled = cfg.l1_budget.is_some();
    // A healthy iteration costs one or two dual evaluations; near a kink the
    // quasi-Newton and fallback searches can burn dozens apiece without
    // moving. Budget the real cost (spectral factorizations) so a degenerate
    // run cannot take orders of magnitude longer than a healthy one.
    let max_evals = 4 * cfg.max_iters;
    let mut stall_ref = score(&state);
    let mut since_improve = 0usize;
    let mut termination = Termination::IterLimit;
    let mut iterations = 0usize;

    for _ in 0..cfg.max_iters {
        if cfg.is_feasible(state.residual_l2(), state.residual_l1()) {
            termination = Termination::Converged;
            break;
        }
        if *eig_count.borrow() >= max_evals {
            break;
        }

        // direction attempts: the quasi-Newton direction first, then (after
        // clearing the memory) steepest ascent if its line search fails
        let mut attempt_dirs: Vec<DVector<f64>> = Vec::with_capacity(2);
        if !pairs.is_empty() {
            let qn = lbfgs_direction(&pairs, &state.grad);
            let slope = qn.dot(&state.grad);
            if slope > 1e-14 * qn.norm() * state.grad.norm() {
                attempt_dirs.push(qn);
            }
        }
        attempt_dirs.push(state.grad.clone());

        let mut accepted: Option<DualState> = None;
        for (attempt, dir) in attempt_dirs.iter().enumerate() {
            if attempt > 0 {
                // quasi-Newton model broke down near a kink
                pairs.clear();
            }
            let cache: RefCell<Option<DualState>> = RefCell::new(None);
            let eval_failure: RefCell<Option<Error>> = RefCell::new(None);
            let ensure = |t: f64| {
                let held = cache
                    .borrow()
                    .as_ref()
                    .map(|st| st.y == &state.y + t * dir)
                    .unwrap_or(false);
                if !held {
                    match eval(&(&state.y + t * dir)) {
                        Ok(st) => *cache.borrow_mut() = Some(st),
                        Err(e) => {
                            *eval_failure.borrow_mut() = Some(e);
                            *cache.borrow_mut() = None;
                        }
                    }
                }
            };
            let phi = |t: f64| {
                if t == 0.0 {
                    return state.theta;
                }
                ensure(t);
                cache.borrow().as_ref().map(|st| st.theta).unwrap_or(f64::NAN)
            };
            let dphi = |t: f64| {
                if t == 0.0 {
                    return state.grad.dot(dir);
                }
                ensure(t);
                cache
                    .borrow()
                    .as_ref()
                    .map(|st| st.grad.dot(dir))
                    .unwrap_or(f64::NAN)
            };

            let step = wolfe_line_search(phi, dphi, cfg.wolfe_c1, cfg.wolfe_c2, 1.0);
            if let Some(e) = eval_failure.into_inner() {
                return Err(e);
            }
            match step {
                Ok(t) => {
                    let cached = cache.into_inner();
                    accepted = Some(match cached {
                        Some(st) if st.y == &state.y + t * dir => st,
                        _ => eval(&(&state.y + t * dir))?,
                    });
                    break;
                }
                Err(Error::LineSearchFailure(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        let accepted = match accepted {
            Some(st) => st,
            None => {
                // no ascent possible along any attempted direction
                termination = Termination::NumericalFailure;
                break;
            }
        };

        let s = &accepted.y - &state.y;
        let u = -(&accepted.grad - &state.grad);
        if s.dot(&u) > 1e-14 * s.norm() * u.norm() {
            if pairs.len() == cfg.lbfgs_memory {
                pairs.pop_front();
            }
            pairs.push_back((s, u));
        }

        let sc = score(&accepted);
        if best.as_ref().map(|st| sc < score(st)).unwrap_or(true) {
            best = Some(accepted.clone());
        }
        if sc < 0.99 * stall_ref {
            stall_ref = sc;
            since_improve = 0;
        } else {
            since_improve += 1;
        }
        state = accepted;
        iterations += 1;
        history.push(state.residual_l2());
        if stall_enabled && since_improve >= STALL_LIMIT {
            termination = Termination::NumericalFailure;
            break;
        }
    }

    if termination == Termination::IterLimit
        && cfg.is_feasible(state.residual_l2(), state.residual_l1())
    {
        termination = Termination::Converged;
    }
    // on any non-converged stop, hand back the best iterate seen rather
    // than wherever the ascent happened to end up
    if termination != Termination::Converged {
        if let Some(st) = best {
            if score(&st) < score(&state) {
                state = st;
            }
        }
    }

    let report = SolverReport {
        iterations,
        residual_history: history,
        wall_time: start.elapsed().as_secs_f64(),
        termination,
        eig_decompositions: eig_count.into_inner(),
        residual_l1: state.residual_l1(),
    };
    Ok((state.x_of_y, report))
}

/// Two-loop recursion. `pairs` are minimization-form curvature pairs for
/// f = −θ; returns an ascent direction for θ.
fn lbfgs_direction(
    pairs: &VecDeque<(DVector<f64>, DVector<f64>)>,
    grad_ascent: &DVector<f64>,
) -> DVector<f64> {
    // gradient of f = -theta
    let mut q = -grad_ascent.clone();
    if pairs.is_empty() {
        return -q;
    }
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, u) in pairs.iter().rev() {
        let rho = 1.0 / s.dot(u);
        let alpha = rho * s.dot(&q);
        q -= alpha * u;
        alphas.push((alpha, rho));
    }
    let (s_last, u_last) = pairs.back().expect("nonempty");
    q *= s_last.dot(u_last) / u_last.dot(u_last);
    for ((s, u), (alpha, rho)) in pairs.iter().zip(alphas.iter().rev()) {
        let beta = rho * u.dot(&q);
        q += (alpha - beta) * s;
    }
    // descent direction for f is -q; ascent direction for theta is +q... the
    // two-loop output approximates H∇f, and -H∇f = H∇θ since H ⪰ 0.
    -q
}
