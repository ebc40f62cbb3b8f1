//! Runtime diagnostics for the sensing model: empirical two-sided
//! boundedness ratios of the induced asymmetric map, covariance spectrum
//! conditions, the trace band of the transformed feasible set, the recovery
//! error bound as an evaluable function, and the decaying-spectrum test
//! matrix.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::sensing::{SensingEnsemble, TransformContext};
use crate::spectral::{self, SymMatrix};

/// Empirical min/max of the ratio ‖𝒵′(X)‖₁/(⌊m/2⌋·‖X‖_F) over random
/// symmetric rank-r matrices. An estimate, never a certificate: the
/// underlying property quantifies over all rank-r matrices.
#[derive(Clone, Debug)]
pub struct SrubEstimate {
    pub rank: usize,
    pub trials: usize,
    pub ratios: Vec<f64>,
    pub c1_hat: f64,
    pub c2_hat: f64,
}

/// Inputs for the recovery error bound right-hand side.
#[derive(Clone, Debug)]
pub struct BoundInputs {
    pub c1: f64,
    pub c2: f64,
    /// effective rank
    pub r: usize,
    /// ‖[X₀]₋₍ₙ₋ᵣ₎‖_*
    pub tail_norm: f64,
    /// ‖η‖₁
    pub noise_l1: f64,
    pub m: usize,
}

/// Covariance spectrum condition report.
#[derive(Clone, Copy, Debug)]
pub struct SigmaConditionReport {
    pub ratio: f64,
    pub min: f64,
    pub pass_ratio: bool,
    pub pass_min: bool,
}

/// Trace band report for the transformed feasible set.
#[derive(Clone, Copy, Debug)]
pub struct TraceFlatnessReport {
    pub trace: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

/// Sample a random symmetric rank-r matrix as GGᵀ − HHᵀ with n×⌈r/2⌉
/// Gaussian factors, truncated to the r largest-magnitude eigenvalues and
/// normalized to unit Frobenius norm.
fn random_rank_r_unit(n: usize, r: usize, rng: &mut impl Rng) -> Result<SymMatrix> {
    let cols = r.div_ceil(2);
    let g = DMatrix::from_fn(n, cols, |_, _| rng.sample::<f64, _>(StandardNormal));
    let h = DMatrix::from_fn(n, cols, |_, _| rng.sample::<f64, _>(StandardNormal));
    let raw = SymMatrix::from_dense(&g * g.transpose() - &h * h.transpose())?;
    let eig = spectral::eigh(&raw)?;
    // keep the r eigenvalues of largest magnitude
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .abs()
            .partial_cmp(&eig.eigenvalues[i].abs())
            .expect("finite")
    });
    let keep: std::collections::HashSet<usize> = order[..r].iter().copied().collect();
    let truncated = eig.map_rebuild(|i, l| if keep.contains(&i) { l } else { 0.0 });
    let norm = truncated.frobenius_norm();
    if norm == 0.0 {
        // all-zero draw is measure zero; resample
        return random_rank_r_unit(n, r, rng);
    }
    Ok(truncated.scale(1.0 / norm))
}

/// Estimate the two-sided boundedness constants of the induced asymmetric
/// map over `trials` random rank-r matrices. Deterministic per seed.
pub fn srub_estimate(
    ensemble: &SensingEnsemble,
    r: usize,
    trials: usize,
    seed: u64,
) -> Result<SrubEstimate> {
    let n = ensemble.dim();
    if r < 1 || r > n {
        return Err(Error::Domain(format!(
            "srub_estimate: rank {r} out of range [1, {n}]"
        )));
    }
    if trials < 1 {
        return Err(Error::Domain("srub_estimate: trials must be >= 1".into()));
    }
    let half = (ensemble.num_measurements() / 2) as f64;
    let mut ratios = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = stream_rng(seed, t as u64);
        let x = random_rank_r_unit(n, r, &mut rng)?;
        let out = ensemble.induced_asymmetric_apply(&x)?;
        let l1: f64 = out.iter().map(|v| v.abs()).sum();
        ratios.push(l1 / half);
    }
    let c1_hat = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let c2_hat = ratios.iter().cloned().fold(0.0f64, f64::max);
    Ok(SrubEstimate {
        rank: r,
        trials,
        ratios,
        c1_hat,
        c2_hat,
    })
}

/// Ratio of the ratio bound: √2.
const SIGMA_RATIO_BOUND: f64 = std::f64::consts::SQRT_2;

/// Check the covariance spectrum conditions: σ_max/σ_min ≤ √2 and
/// σ_min ≥ 2√2 − 2 on the trace-normalized covariance n·Σ/tr(Σ).
///
/// The normalization makes the σ_min condition scale-free: an ensemble whose
/// second moment is a multiple of the identity scores σ_min ≈ 1 regardless of
/// how the sensing vectors are normalized (unit-sphere vectors give
/// tr(Σ) = 1, so the raw σ_min is ~1/n and would fail any fixed absolute
/// bound). The ratio is scale-invariant either way.
pub fn sigma_condition_check(ctx: &TransformContext) -> SigmaConditionReport {
    let ratio = ctx.sigma_max / ctx.sigma_min;
    let min_bound = 2.0 * std::f64::consts::SQRT_2 - 2.0;
    let n = ctx.sigma.dim() as f64;
    let scale = ctx.sigma.trace() / n;
    let min_normalized = ctx.sigma_min / scale;
    SigmaConditionReport {
        ratio,
        min: min_normalized,
        pass_ratio: ratio <= SIGMA_RATIO_BOUND,
        pass_min: min_normalized >= min_bound,
    }
}

/// Check that trace(Y) lies in the band [(Σb − ‖η‖₁)/m, (Σb + ‖η‖₁)/m]. For
/// PSD Y the trace equals the nuclear norm, so this is the nuclear-norm band
/// of the transformed feasible set.
pub fn trace_flatness_check(
    y: &SymMatrix,
    b: &DVector<f64>,
    noise_l1: f64,
    m: usize,
) -> TraceFlatnessReport {
    let sum_b: f64 = b.iter().sum();
    let lo = (sum_b - noise_l1) / m as f64;
    let hi = (sum_b + noise_l1) / m as f64;
    let trace = y.trace();
    let tol = 1e-8 * hi.abs().max(1.0);
    TraceFlatnessReport {
        trace,
        lo,
        hi,
        pass: lo - tol <= trace && trace <= hi + tol,
    }
}

/// Recovery error bound right-hand side: c1·tail_norm/√r + c2·noise_l1/m.
pub fn error_bound_rhs(inputs: &BoundInputs) -> Result<f64> {
    if inputs.r < 1 {
        return Err(Error::Domain("error_bound_rhs: r must be >= 1".into()));
    }
    if inputs.c1 < 0.0 || inputs.c2 < 0.0 || inputs.tail_norm < 0.0 || inputs.noise_l1 < 0.0 {
        return Err(Error::Domain(
            "error_bound_rhs: inputs must be nonnegative".into(),
        ));
    }
    Ok(inputs.c1 * inputs.tail_norm / (inputs.r as f64).sqrt()
        + inputs.c2 * inputs.noise_l1 / inputs.m as f64)
}

/// Strictly positive definite diagonal matrix with eigenvalues
/// λᵢ = i^{−3/2} − (i+1)^{−3/2}; its nuclear norm telescopes to
/// 1 − (n+1)^{−3/2}.
pub fn decaying_spectrum_matrix(n: usize) -> SymMatrix {
    assert!(n >= 1);
    let diag: Vec<f64> = (1..=n)
        .map(|i| {
            let i = i as f64;
            i.powf(-1.5) - (i + 1.0).powf(-1.5)
        })
        .collect();
    SymMatrix::from_diagonal(&diag)
}

/// Frobenius distance ‖X − X₀‖_F.
pub fn recovery_error(x: &SymMatrix, x0: &SymMatrix) -> Result<f64> {
    if x.dim() != x0.dim() {
        return Err(Error::DimensionMismatch {
            context: "recovery_error",
            expected: x0.dim(),
            found: x.dim(),
        });
    }
    Ok(x.sub(x0).frobenius_norm())
}
