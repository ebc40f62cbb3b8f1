//! Projection onto the affine measurement set {X : 𝒵(X) = b} and the
//! Douglas-Rachford splitting built from it.

use std::time::Instant;

use nalgebra::{Cholesky, DVector, Dyn, OMatrix};

use crate::error::{Error, Result};
use crate::sensing::SensingEnsemble;
use crate::solvers::{SolverConfig, SolverReport, Termination};
use crate::spectral::{psd_project, SymMatrix};

const GRAM_COND_LIMIT: f64 = 1e12;

/// Frobenius projector onto {X : 𝒵(X) = b}, with the Gram matrix
/// G_ij = (zᵢᵀzⱼ)² factored once and reused across projections.
pub struct AffineProjector<'a> {
    ensemble: &'a SensingEnsemble,
    b: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    cond_estimate: f64,
}

impl<'a> AffineProjector<'a> {
    pub fn new(ensemble: &'a SensingEnsemble, b: &DVector<f64>) -> Result<Self> {
        let m = ensemble.num_measurements();
        if b.len() != m {
            return Err(Error::DimensionMismatch {
                context: "AffineProjector::new",
                expected: m,
                found: b.len(),
            });
        }
        // G = (Z Z^T) ∘ (Z Z^T): pairwise squared inner products of the dyads
        let inner = ensemble.vectors() * ensemble.vectors().transpose();
        let gram = inner.component_mul(&inner);
        let chol = Cholesky::new(gram).ok_or(Error::IllPosedProjection {
            cond_estimate: f64::INFINITY,
        })?;
        let cond_estimate = cholesky_cond_estimate(&chol);
        if cond_estimate > GRAM_COND_LIMIT {
            return Err(Error::IllPosedProjection { cond_estimate });
        }
        Ok(AffineProjector {
            ensemble,
            b: b.clone(),
            chol,
            cond_estimate,
        })
    }

    pub fn cond_estimate(&self) -> f64 {
        self.cond_estimate
    }

    /// Frobenius-nearest matrix to X satisfying the measurements:
    /// X − 𝒵ᵀ(G⁻¹(𝒵(X) − b)), with one pass of iterative refinement.
    pub fn project(&self, x: &SymMatrix) -> Result<SymMatrix> {
        let mut out = self.correct(x)?;
        out = self.correct(&out)?;
        Ok(out)
    }

    fn correct(&self, x: &SymMatrix) -> Result<SymMatrix> {
        let residual = self.ensemble.apply(x)? - &self.b;
        let lambda = self.chol.solve(&residual);
        Ok(x.sub(&self.ensemble.adjoint(&lambda)?))
    }
}

fn cholesky_cond_estimate(chol: &Cholesky<f64, Dyn>) -> f64 {
    let l: &OMatrix<f64, Dyn, Dyn> = chol.l_dirty();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..l.nrows() {
        let d = l[(i, i)].abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        (hi / lo).powi(2)
    }
}

/// One-shot affine projection; factors the Gram matrix on every call. Use
/// [`AffineProjector`] when projecting repeatedly against the same ensemble.
pub fn affine_project(
    x: &SymMatrix,
    ensemble: &SensingEnsemble,
    b: &DVector<f64>,
) -> Result<SymMatrix> {
    AffineProjector::new(ensemble, b)?.project(x)
}

/// Douglas-Rachford splitting between the affine measurement set and the PSD
/// cone, from X₀ = Y₀ = 0. The returned matrix is exactly PSD (the last step
/// is a PSD projection).
pub fn douglas_rachford(
    ensemble: &SensingEnsemble,
    b: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<(SymMatrix, SolverReport)> {
    cfg.validate()?;
    let start = Instant::now();
    let n = ensemble.dim();
    let projector = AffineProjector::new(ensemble, b)?;

    let mut x = SymMatrix::zeros(n);
    let mut y = SymMatrix::zeros(n);
    let mut eigs = 0usize;
    let r0 = b.norm();
    let mut history = vec![r0];
    let mut res_vec = -b.clone();
    let mut termination = Termination::IterLimit;
    let mut iterations = 0usize;

    let l1 = |v: &DVector<f64>| v.iter().map(|t| t.abs()).sum::<f64>();

    if cfg.is_feasible(r0, l1(&res_vec)) {
        termination = Termination::Converged;
    } else {
        for _ in 0..cfg.max_iters {
            let reflected = x.scale(2.0).sub(&y);
            y = projector.project(&reflected)?.sub(&x).add(&y);
            x = psd_project(&y)?;
            eigs += 1;
            iterations += 1;

            res_vec = ensemble.apply(&x)? - b;
            let res = res_vec.norm();
            history.push(res);
            if cfg.is_feasible(res, l1(&res_vec)) {
                termination = Termination::Converged;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::sensing::{sample_ensemble, Distribution};
    use nalgebra::DMatrix;
    use rand::Rng;

    fn random_sym(n: usize, rng: &mut impl Rng) -> SymMatrix {
        SymMatrix::from_upper_fn(n, |_, _| rng.gen_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn feasible_point_is_unchanged() {
        let mut rng = stream_rng(1, 0);
        let z = sample_ensemble(4, 6, 2, Distribution::UnitSphere);
        let x = random_sym(4, &mut rng);
        let b = z.apply(&x).unwrap();
        let p = affine_project(&x, &z, &b).unwrap();
        assert!(p.sub(&x).frobenius_norm() <= 1e-12 * x.frobenius_norm().max(1.0));
    }

    #[test]
    fn projection_is_idempotent_and_feasible() {
        let mut rng = stream_rng(3, 0);
        let z = sample_ensemble(5, 8, 4, Distribution::UnitSphere);
        let x0 = random_sym(5, &mut rng);
        let b = z.apply(&x0).unwrap();
        let x = random_sym(5, &mut rng);
        let p1 = affine_project(&x, &z, &b).unwrap();
        let p2 = affine_project(&p1, &z, &b).unwrap();
        assert!(p2.sub(&p1).frobenius_norm() <= 1e-10 * p1.frobenius_norm().max(1.0));
        let res = z.apply(&p1).unwrap() - &b;
        assert!(res.amax() <= 1e-10 * b.amax().max(1.0));
    }

    #[test]
    fn matches_dense_least_squares_oracle() {
        // n = 3, m = 4: solve the projection over the 6-dimensional symmetric
        // coordinate space (off-diagonals weighted by sqrt 2) with dense
        // normal equations.
        let n = 3;
        let m = 4;
        let z = sample_ensemble(n, m, 5, Distribution::UnitSphere);
        let mut rng = stream_rng(6, 0);
        let x = random_sym(n, &mut rng);
        let target = random_sym(n, &mut rng);
        let b = z.apply(&target).unwrap();

        // coordinates: (00, 11, 22, 01, 02, 12)
        let pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
        let embed = |s: &SymMatrix| {
            DVector::from_fn(6, |k, _| {
                let (i, j) = pairs[k];
                let w = if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
                w * s.get(i, j)
            })
        };
        let mut a = DMatrix::zeros(m, 6);
        for row in 0..m {
            let zi = z.vector(row);
            let dyad = SymMatrix::dyad(&zi);
            // <z z^T, X>_F in the weighted coordinates
            a.set_row(row, &embed(&dyad).transpose());
        }
        // min ||v - v_x|| s.t. A v = b  =>  v = v_x - A^T (A A^T)^{-1} (A v_x - b)
        let vx = embed(&x);
        let aat = &a * a.transpose();
        let lambda = Cholesky::new(aat).unwrap().solve(&(&a * &vx - &b));
        let v = vx - a.transpose() * lambda;

        let p = affine_project(&x, &z, &b).unwrap();
        let pv = embed(&p);
        assert!(
            (&pv - &v).norm() <= 1e-8 * v.norm().max(1.0),
            "oracle disagreement: {:e}",
            (&pv - &v).norm()
        );
    }

    #[test]
    fn degenerate_gram_is_rejected() {
        // duplicated sensing vector makes the Gram matrix singular
        let row = [0.6f64, 0.8];
        let vectors = DMatrix::from_row_slice(2, 2, &[row[0], row[1], row[0], row[1]]);
        let z = SensingEnsemble::from_vectors(vectors, 0, Distribution::UnitSphere).unwrap();
        let b = DVector::from_vec(vec![1.0, 2.0]);
        assert!(matches!(
            affine_project(&SymMatrix::zeros(2), &z, &b),
            Err(Error::IllPosedProjection { .. })
        ));
    }

    #[test]
    fn zero_measurements_converge_immediately() {
        let z = sample_ensemble(4, 8, 7, Distribution::UnitSphere);
        let b = DVector::zeros(8);
        let (x, report) = douglas_rachford(&z, &b, &SolverConfig::default()).unwrap();
        assert_eq!(report.iterations, 0);
        assert_eq!(report.termination, Termination::Converged);
        assert_eq!(x.frobenius_norm(), 0.0);
    }

    #[test]
    fn output_is_psd_and_near_feasible() {
        // m must stay below n(n+1)/2 = 21 or the Gram matrix is singular
        let z = sample_ensemble(6, 20, 8, Distribution::UnitSphere);
        let x0 = SymMatrix::from_diagonal(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let b = z.apply(&x0).unwrap();
        let (x, report) = douglas_rachford(&z, &b, &SolverConfig::default()).unwrap();
        assert_eq!(report.termination, Termination::Converged);
        assert!(report.final_residual() <= 1e-5);
        assert!(x.min_eigenvalue().unwrap() >= -1e-10);
        assert_eq!(report.residual_history.len(), report.iterations + 1);
    }
}
