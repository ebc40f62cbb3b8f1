//! Phase-retrieval demonstration: lift intensity measurements of a signal to
//! a rank-one matrix problem and compare recovery with and without the PSD
//! constraint.

use std::io::Write;
use std::path::Path;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::sensing::{sample_ensemble, Distribution};
use crate::solvers::{affine_project, lbfgs_dual_project, SolverConfig, SolverReport};
use crate::spectral::{top_eigenvector, SymMatrix};

/// Results of the demo: recovered signals from both variants with their
/// sign-invariant relative errors.
#[derive(Clone, Debug)]
pub struct RetrievalOutcome {
    pub x_psd: DVector<f64>,
    pub x_nopsd: DVector<f64>,
    pub err_psd: f64,
    pub err_nopsd: f64,
    pub psd_report: SolverReport,
}

/// min over s ∈ {±1} of ‖s·x̂ − x₀‖₂ / ‖x₀‖₂. The global sign is not
/// observable from intensity measurements.
pub fn signed_relative_error(xhat: &DVector<f64>, x0: &DVector<f64>) -> f64 {
    let denom = x0.norm();
    let plus = (xhat - x0).norm();
    let minus = (-xhat - x0).norm();
    plus.min(minus) / denom
}

fn extract_signal(x: &SymMatrix) -> Result<DVector<f64>> {
    let (lambda, u) = top_eigenvector(x)?;
    Ok(u * lambda.max(0.0).sqrt())
}

/// Minimum-Frobenius-norm symmetric matrix consistent with the measurements.
///
/// With more measurements than degrees of freedom the Gram matrix is singular
/// even though the system stays consistent, so the fast Cholesky projector is
/// tried first and a rank-revealing SVD solve of the normal equations is the
/// fallback.
fn min_norm_solution(
    ensemble: &crate::sensing::SensingEnsemble,
    b: &DVector<f64>,
) -> Result<SymMatrix> {
    match affine_project(&SymMatrix::zeros(ensemble.dim()), ensemble, b) {
        Ok(x) => Ok(x),
        Err(Error::IllPosedProjection { .. }) => {
            let inner = ensemble.vectors() * ensemble.vectors().transpose();
            let gram = inner.component_mul(&inner);
            let svd = gram.svd(true, true);
            let eps = svd.singular_values.max() * 1e-12;
            let lambda = svd
                .solve(b, eps)
                .map_err(|e| Error::NumericalFailure(format!("redundant-system solve: {e}")))?;
            let lambda = DVector::from_column_slice(lambda.as_slice());
            ensemble.adjoint(&lambda)
        }
        Err(e) => Err(e),
    }
}

/// Run the demo on a signal x₀ with m intensity measurements bᵢ = ⟨zᵢ, x₀⟩².
///
/// The unconstrained variant takes the minimum-Frobenius-norm symmetric
/// matrix consistent with the measurements (the affine projection of zero);
/// the constrained variant additionally enforces PSDness via the dual
/// projection from the zero anchor. Both recover a signal estimate as the
/// scaled top eigenvector.
pub fn demo_phase_retrieval(
    x0: &DVector<f64>,
    m: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<RetrievalOutcome> {
    let n = x0.len();
    if n < 1 {
        return Err(Error::Domain("signal must be nonempty".into()));
    }
    if x0.norm() == 0.0 {
        return Err(Error::Domain("signal must be nonzero".into()));
    }
    let ensemble = sample_ensemble(n, m, seed, Distribution::UnitSphere);
    let b = ensemble.phase_retrieval_measure(x0)?.b;

    let x_flat = min_norm_solution(&ensemble, &b)?;
    let (x_cone, psd_report) =
        lbfgs_dual_project(&SymMatrix::zeros(n), &ensemble, &b, cfg)?;

    let x_nopsd = extract_signal(&x_flat)?;
    let x_psd = extract_signal(&x_cone)?;
    Ok(RetrievalOutcome {
        err_psd: signed_relative_error(&x_psd, x0),
        err_nopsd: signed_relative_error(&x_nopsd, x0),
        x_psd,
        x_nopsd,
        psd_report,
    })
}

/// Deterministic side×side test image: a bright Gaussian blob off-center on a
/// diagonal gradient, flattened row-major to [0, 1] values.
pub fn default_test_image(side: usize) -> DVector<f64> {
    assert!(side >= 1);
    let s = side as f64;
    let (cx, cy) = (0.35 * s, 0.6 * s);
    let width = 0.18 * s;
    DVector::from_fn(side * side, |k, _| {
        let (i, j) = ((k / side) as f64, (k % side) as f64);
        let gradient = 0.15 + 0.3 * (i + j) / (2.0 * s);
        let d2 = (i - cx).powi(2) + (j - cy).powi(2);
        gradient + 0.55 * (-d2 / (2.0 * width * width)).exp()
    })
}

/// Flat text vector, one value per line, round-trip precision.
pub fn write_vector<P: AsRef<Path>>(v: &DVector<f64>, path: P) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    for x in v.iter() {
        writeln!(file, "{x}").map_err(io_err)?;
    }
    Ok(())
}

pub fn read_vector<P: AsRef<Path>>(path: P) -> Result<DVector<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut vals = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        vals.push(line.parse::<f64>().map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: format!("bad value '{line}': {e}"),
        })?);
    }
    if vals.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: "empty vector file".into(),
        });
    }
    Ok(DVector::from_vec(vals))
}

/// Render a flattened square signal as an ASCII portable graymap (P2),
/// rescaled to the full 0–255 range. The length must be a perfect square.
pub fn write_pgm<P: AsRef<Path>>(v: &DVector<f64>, path: P) -> Result<()> {
    let path = path.as_ref();
    let n = v.len();
    let side = (n as f64).sqrt().round() as usize;
    if side * side != n {
        return Err(Error::Domain(format!(
            "image rendering needs a perfect-square length, got {n}"
        )));
    }
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    writeln!(file, "P2\n{side} {side}\n255").map_err(io_err)?;
    for i in 0..side {
        let row: Vec<String> = (0..side)
            .map(|j| {
                let g = ((v[i * side + j] - lo) / span * 255.0).round() as u32;
                g.min(255).to_string()
            })
            .collect();
        writeln!(file, "{}", row.join(" ")).map_err(io_err)?;
    }
    Ok(())
}
