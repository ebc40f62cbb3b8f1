//! Dense symmetric linear algebra primitives: eigendecomposition, PSD
//! projection, rank truncation, tail nuclear norm, symmetric square root.
//!
//! Everything here operates on [`SymMatrix`], a dense real symmetric matrix.
//! All functions are pure; there is no shared state.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative clamp threshold for near-zero eigenvalues, stated once and reused
/// by every PSD check in the crate.
pub const EIG_CLAMP_REL: f64 = 1e-10;

/// Dense real symmetric n×n matrix.
///
/// Symmetry is enforced by construction: every constructor symmetrizes or
/// fills both triangles from the same source.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

impl SymMatrix {
    /// Symmetrize an arbitrary square matrix as (A + Aᵀ)/2.
    pub fn from_dense(a: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                context: "SymMatrix::from_dense",
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        if a.nrows() == 0 {
            return Err(Error::Domain("SymMatrix dimension must be >= 1".into()));
        }
        let sym = (&a + a.transpose()) * 0.5;
        Ok(SymMatrix { data: sym })
    }

    /// Build from entries of the upper triangle: `f(i, j)` with `i <= j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("SymMatrix dimension must be >= 1".into()));
        }
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Ok(SymMatrix { data })
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix {
            data: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    /// Rank-one dyad v·vᵀ.
    pub fn dyad(v: &DVector<f64>) -> Self {
        SymMatrix { data: v * v.transpose() }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Frobenius inner product ⟨A, B⟩_F.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        self.data.dot(&other.data)
    }

    pub fn scale(&self, alpha: f64) -> SymMatrix {
        SymMatrix {
            data: &self.data * alpha,
        }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix {
            data: &self.data + &other.data,
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix {
            data: &self.data - &other.data,
        }
    }

    /// Congruence transform MᵀAM for an arbitrary square M of matching size.
    pub fn congruence(&self, m: &DMatrix<f64>) -> Result<SymMatrix> {
        if m.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "SymMatrix::congruence",
                expected: self.dim(),
                found: m.nrows(),
            });
        }
        // Symmetrize to scrub roundoff from the two multiplications.
        SymMatrix::from_dense(m.transpose() * &self.data * m)
    }

    /// Operator norm ‖A‖₂ = max |λᵢ|.
    pub fn operator_norm(&self) -> Result<f64> {
        let eig = eigh(self)?;
        Ok(eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs())))
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = eigh(self)?;
        Ok(eig.eigenvalues[self.dim() - 1])
    }
}

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending,
/// eigenvectors column-orthonormal.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    /// Reassemble U·diag(f(λ))·Uᵀ.
    pub fn map_rebuild(&self, mut f: impl FnMut(usize, f64) -> f64) -> SymMatrix {
        let n = self.eigenvalues.len();
        let mapped = DVector::from_fn(n, |i, _| f(i, self.eigenvalues[i]));
        let scaled = &self.eigenvectors * DMatrix::from_diagonal(&mapped);
        let rebuilt = scaled * self.eigenvectors.transpose();
        // reassembly of a symmetric form; symmetrize away roundoff
        SymMatrix::from_dense(rebuilt).expect("square by construction")
    }
}

/// Full symmetric eigendecomposition with eigenvalues sorted descending.
pub fn eigh(a: &SymMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let max_iters = 1000 * n.max(16);
    let eig = a
        .data
        .clone()
        .try_symmetric_eigen(f64::EPSILON, max_iters)
        .ok_or_else(|| {
            Error::EigFailure(format!(
                "symmetric QR did not converge in {max_iters} iterations (n = {n}, \
                 ||A||_F = {:.3e})",
                a.frobenius_norm()
            ))
        })?;
    // sort eigenpairs descending
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .expect("eigenvalues are finite")
    });
    let eigenvalues = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Frobenius-nearest PSD matrix: clamp negative eigenvalues at zero.
pub fn psd_project(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = eigh(a)?;
    Ok(eig.map_rebuild(|_, l| l.max(0.0)))
}

/// Sum of the `p` smallest singular values (absolute eigenvalues for
/// symmetric input).
pub fn tail_nuclear_norm(a: &SymMatrix, p: usize) -> Result<f64> {
    let n = a.dim();
    if p > n {
        return Err(Error::Domain(format!(
            "tail_nuclear_norm: p = {p} exceeds dimension {n}"
        )));
    }
    let eig = eigh(a)?;
    let mut sv: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
    sv.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    Ok(sv[..p].iter().sum())
}

/// Best PSD approximation of rank at most `r`: keep the `r` largest
/// eigenvalues clamped at zero from below, zero out the rest.
pub fn best_rank_r_psd(a: &SymMatrix, r: usize) -> Result<SymMatrix> {
    let n = a.dim();
    if r < 1 || r > n {
        return Err(Error::Domain(format!(
            "best_rank_r_psd: rank {r} out of range [1, {n}]"
        )));
    }
    let eig = eigh(a)?;
    Ok(eig.map_rebuild(|i, l| if i < r { l.max(0.0) } else { 0.0 }))
}

/// Symmetric (spectral) square root of a PSD matrix.
///
/// Eigenvalues slightly below zero (within `EIG_CLAMP_REL`·‖A‖₂) are clamped;
/// anything further below signals a not-PSD error.
pub fn sym_sqrt(a: &SymMatrix) -> Result<SymMatrix> {
    let eig = eigh(a)?;
    let op_norm = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    let threshold = -EIG_CLAMP_REL * op_norm;
    let min_eig = eig.eigenvalues[a.dim() - 1];
    if min_eig < threshold {
        return Err(Error::NotPsd {
            min_eig,
            threshold,
        });
    }
    Ok(eig.map_rebuild(|_, l| l.max(0.0).sqrt()))
}

/// Top eigenpair with the sign convention that the first nonzero coordinate
/// of the eigenvector is nonnegative.
pub fn top_eigenvector(a: &SymMatrix) -> Result<(f64, DVector<f64>)> {
    let eig = eigh(a)?;
    let mut v = eig.eigenvectors.column(0).clone_owned();
    let scale = v.amax();
    if let Some(lead) = v.iter().find(|x| x.abs() > 1e-12 * scale.max(1e-300)) {
        if *lead < 0.0 {
            v = -v;
        }
    }
    Ok((eig.eigenvalues[0], v))
}
