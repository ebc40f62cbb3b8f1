//! Rank-one sensing ensembles and the maps built on top of them: the
//! quadratic-form sensing map, its adjoint, noisy measurement generation, the
//! covariance/square-root coordinate transform, and the induced asymmetric
//! map obtained from half-differences of consecutive measurements.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::spectral::{self, SymMatrix, EIG_CLAMP_REL};

/// Law of the sensing vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distribution {
    /// Standard Gaussians normalized to the unit sphere (the default).
    UnitSphere,
    /// Unnormalized standard Gaussians.
    Gaussian,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::UnitSphere => write!(f, "unit-sphere"),
            Distribution::Gaussian => write!(f, "gaussian"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit-sphere" => Ok(Distribution::UnitSphere),
            "gaussian" => Ok(Distribution::Gaussian),
            other => Err(Error::Domain(format!(
                "unknown distribution tag '{other}' (expected unit-sphere or gaussian)"
            ))),
        }
    }
}

/// A set of `m` sensing vectors of dimension `n`, stored as rows, together
/// with the seed that generated them.
#[derive(Clone, Debug, PartialEq)]
pub struct SensingEnsemble {
    n: usize,
    m: usize,
    /// m×n; row i is zᵢᵀ.
    vectors: DMatrix<f64>,
    pub seed: u64,
    pub distribution: Distribution,
}

/// Noise applied when taking measurements.
#[derive(Clone, Debug)]
pub enum NoiseModel {
    None,
    /// i.i.d. uniform on [−ε, +ε]; the declared ℓ₁ budget is m·ε.
    Uniform(f64),
    Explicit(DVector<f64>),
}

/// Measurement vector with its declared ℓ₁ noise budget.
#[derive(Clone, Debug)]
pub struct MeasurementSet {
    pub b: DVector<f64>,
    pub noise_l1: f64,
    pub eta: Option<DVector<f64>>,
}

impl MeasurementSet {
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.len() == 0
    }

    /// Text serialization: header line `m noise_l1`, then one measurement per
    /// line, full round-trip precision.
    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.len(), self.noise_l1)?;
        for v in self.b.iter() {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }

    pub fn to_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let mut file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_to(&mut file).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            message,
        };
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| parse_err("empty measurement file".into()))?
            .map_err(|e| parse_err(e.to_string()))?;
        let mut fields = header.split_whitespace();
        let m: usize = fields
            .next()
            .ok_or_else(|| parse_err("missing m in header".into()))?
            .parse()
            .map_err(|e| parse_err(format!("bad m: {e}")))?;
        let noise_l1: f64 = fields
            .next()
            .ok_or_else(|| parse_err("missing noise_l1 in header".into()))?
            .parse()
            .map_err(|e| parse_err(format!("bad noise_l1: {e}")))?;
        let mut b = Vec::with_capacity(m);
        for line in lines {
            let line = line.map_err(|e| parse_err(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            b.push(
                line.parse::<f64>()
                    .map_err(|e| parse_err(format!("bad measurement '{line}': {e}")))?,
            );
        }
        if b.len() != m {
            return Err(parse_err(format!(
                "expected {m} measurements, found {}",
                b.len()
            )));
        }
        Ok(MeasurementSet {
            b: DVector::from_vec(b),
            noise_l1,
            eta: None,
        })
    }
}

/// Draw a sensing ensemble. Deterministic for a fixed seed.
pub fn sample_ensemble(
    n: usize,
    m: usize,
    seed: u64,
    distribution: Distribution,
) -> SensingEnsemble {
    assert!(n >= 1 && m >= 1, "ensemble dimensions must be >= 1");
    let mut rng = stream_rng(seed, 0);
    let mut vectors = DMatrix::zeros(m, n);
    for i in 0..m {
        let mut norm_sq = 0.0;
        for j in 0..n {
            let g: f64 = rng.sample(StandardNormal);
            vectors[(i, j)] = g;
            norm_sq += g * g;
        }
        if distribution == Distribution::UnitSphere {
            let inv = 1.0 / norm_sq.sqrt();
            for j in 0..n {
                vectors[(i, j)] *= inv;
            }
        }
    }
    SensingEnsemble {
        n,
        m,
        vectors,
        seed,
        distribution,
    }
}

impl SensingEnsemble {
    /// Build from explicit row vectors (used for synthetic instances and
    /// deserialization). Unit norms are checked for the unit-sphere tag.
    pub fn from_vectors(
        vectors: DMatrix<f64>,
        seed: u64,
        distribution: Distribution,
    ) -> Result<Self> {
        let (m, n) = vectors.shape();
        if m < 1 || n < 1 {
            return Err(Error::Domain("ensemble must have m, n >= 1".into()));
        }
        if distribution == Distribution::UnitSphere {
            for i in 0..m {
                let norm = vectors.row(i).norm();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::Domain(format!(
                        "unit-sphere ensemble row {i} has norm {norm}, expected 1"
                    )));
                }
            }
        }
        Ok(SensingEnsemble {
            n,
            m,
            vectors,
            seed,
            distribution,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn num_measurements(&self) -> usize {
        self.m
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.row(i).transpose()
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Apply the sensing map: output[i] = zᵢᵀ X zᵢ.
    pub fn apply(&self, x: &SymMatrix) -> Result<DVector<f64>> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch {
                context: "SensingEnsemble::apply",
                expected: self.n,
                found: x.dim(),
            });
        }
        let zx = &self.vectors * x.matrix();
        Ok(DVector::from_fn(self.m, |i, _| {
            zx.row(i).dot(&self.vectors.row(i))
        }))
    }

    /// Adjoint of the sensing map: Σᵢ yᵢ zᵢzᵢᵀ.
    pub fn adjoint(&self, y: &DVector<f64>) -> Result<SymMatrix> {
        if y.len() != self.m {
            return Err(Error::DimensionMismatch {
                context: "SensingEnsemble::adjoint",
                expected: self.m,
                found: y.len(),
            });
        }
        let mut scaled = self.vectors.clone();
        for i in 0..self.m {
            scaled.row_mut(i).scale_mut(y[i]);
        }
        SymMatrix::from_dense(self.vectors.transpose() * scaled)
    }

    /// Measure X₀ under the given noise model; `seed` drives the uniform
    /// noise draw only.
    pub fn measure(
        &self,
        x0: &SymMatrix,
        noise: &NoiseModel,
        seed: u64,
    ) -> Result<MeasurementSet> {
        let clean = self.apply(x0)?;
        match noise {
            NoiseModel::None => Ok(MeasurementSet {
                b: clean,
                noise_l1: 0.0,
                eta: None,
            }),
            NoiseModel::Uniform(eps) => {
                if *eps < 0.0 {
                    return Err(Error::Domain(format!(
                        "uniform noise level must be nonnegative, got {eps}"
                    )));
                }
                let mut rng = stream_rng(seed, 1);
                let eta =
                    DVector::from_fn(self.m, |_, _| (rng.gen::<f64>() * 2.0 - 1.0) * eps);
                Ok(MeasurementSet {
                    b: &clean + &eta,
                    // declared budget is the bound m*eps, not the realized l1
                    noise_l1: self.m as f64 * eps,
                    eta: Some(eta),
                })
            }
            NoiseModel::Explicit(eta) => {
                if eta.len() != self.m {
                    return Err(Error::DimensionMismatch {
                        context: "SensingEnsemble::measure explicit noise",
                        expected: self.m,
                        found: eta.len(),
                    });
                }
                Ok(MeasurementSet {
                    b: &clean + eta,
                    noise_l1: eta.iter().map(|v| v.abs()).sum(),
                    eta: Some(eta.clone()),
                })
            }
        }
    }

    /// Empirical second moment Σ = (1/m) Σᵢ zᵢzᵢᵀ.
    pub fn covariance_sigma(&self) -> SymMatrix {
        let ones = DVector::from_element(self.m, 1.0);
        self.adjoint(&ones)
            .expect("ones vector has matching length")
            .scale(1.0 / self.m as f64)
    }

    /// Half-differences of consecutive measurement pairs; an odd trailing
    /// measurement is dropped.
    pub fn induced_asymmetric_apply(&self, x: &SymMatrix) -> Result<DVector<f64>> {
        if self.m < 2 {
            return Err(Error::Domain(
                "induced asymmetric map needs at least 2 measurements".into(),
            ));
        }
        let raw = self.apply(x)?;
        let half = self.m / 2;
        Ok(DVector::from_fn(half, |i, _| {
            0.5 * (raw[2 * i] - raw[2 * i + 1])
        }))
    }

    /// Intensity measurements bᵢ = ⟨x₀, zᵢ⟩² of the lifted rank-one matrix.
    pub fn phase_retrieval_measure(&self, x0: &DVector<f64>) -> Result<MeasurementSet> {
        if x0.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "phase_retrieval_measure",
                expected: self.n,
                found: x0.len(),
            });
        }
        let proj = &self.vectors * x0;
        Ok(MeasurementSet {
            b: proj.map(|v| v * v),
            noise_l1: 0.0,
            eta: None,
        })
    }

    /// Text serialization: header `n m seed distribution`, then m rows of n
    /// space-separated values.
    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{} {} {} {}", self.n, self.m, self.seed, self.distribution)?;
        for i in 0..self.m {
            let row: Vec<String> = (0..self.n)
                .map(|j| format!("{}", self.vectors[(i, j)]))
                .collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }

    pub fn to_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let path = path.as_ref();
        let mut file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_to(&mut file).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            message,
        };
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| parse_err("empty ensemble file".into()))?
            .map_err(|e| parse_err(e.to_string()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(format!(
                "header must be 'n m seed distribution', got '{header}'"
            )));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|e| parse_err(format!("bad n: {e}")))?;
        let m: usize = fields[1]
            .parse()
            .map_err(|e| parse_err(format!("bad m: {e}")))?;
        let seed: u64 = fields[2]
            .parse()
            .map_err(|e| parse_err(format!("bad seed: {e}")))?;
        let distribution: Distribution = fields[3].parse()?;
        let mut vectors = DMatrix::zeros(m, n);
        let mut row = 0usize;
        for line in lines {
            let line = line.map_err(|e| parse_err(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if row >= m {
                return Err(parse_err(format!("more than {m} vector rows")));
            }
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != n {
                return Err(parse_err(format!(
                    "row {row} has {} values, expected {n}",
                    vals.len()
                )));
            }
            for (j, v) in vals.iter().enumerate() {
                vectors[(row, j)] = v
                    .parse()
                    .map_err(|e| parse_err(format!("bad value '{v}': {e}")))?;
            }
            row += 1;
        }
        if row != m {
            return Err(parse_err(format!("expected {m} vector rows, found {row}")));
        }
        SensingEnsemble::from_vectors(vectors, seed, distribution)
    }
}

/// The Σ/V change of coordinates associated with an ensemble.
#[derive(Clone, Debug)]
pub struct TransformContext {
    pub sigma: SymMatrix,
    pub v: SymMatrix,
    pub v_inv: SymMatrix,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Build the coordinate transform for an ensemble: V is the symmetric square
/// root of Σ. Fails when Σ is (numerically) singular, e.g. when m < n.
pub fn build_transform(ensemble: &SensingEnsemble) -> Result<TransformContext> {
    let sigma = ensemble.covariance_sigma();
    let eig = spectral::eigh(&sigma)?;
    let n = sigma.dim();
    let sigma_max = eig.eigenvalues[0];
    let sigma_min = eig.eigenvalues[n - 1];
    if sigma_min <= EIG_CLAMP_REL * sigma_max {
        return Err(Error::RankDeficient(format!(
            "covariance is singular (min eigenvalue {sigma_min:e}, max {sigma_max:e}); \
             m = {} measurements for n = {n}",
            ensemble.num_measurements()
        )));
    }
    let v = eig.map_rebuild(|_, l| l.sqrt());
    let v_inv = eig.map_rebuild(|_, l| 1.0 / l.sqrt());
    Ok(TransformContext {
        sigma,
        v,
        v_inv,
        sigma_min,
        sigma_max,
    })
}

impl TransformContext {
    fn check_dim(&self, x: &SymMatrix, context: &'static str) -> Result<()> {
        if x.dim() != self.v.dim() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.v.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// g(X) = VᵀXV. Preserves PSDness (congruence with symmetric V).
    pub fn g_forward(&self, x: &SymMatrix) -> Result<SymMatrix> {
        self.check_dim(x, "TransformContext::g_forward")?;
        x.congruence(self.v.matrix())
    }

    /// g⁻¹(Y) = V⁻ᵀYV⁻¹.
    pub fn g_inverse(&self, y: &SymMatrix) -> Result<SymMatrix> {
        self.check_dim(y, "TransformContext::g_inverse")?;
        y.congruence(self.v_inv.matrix())
    }

    /// Transformed sensing map: output[i] = (V⁻¹zᵢ)ᵀ Y (V⁻¹zᵢ).
    pub fn transformed_apply(
        &self,
        ensemble: &SensingEnsemble,
        y: &SymMatrix,
    ) -> Result<DVector<f64>> {
        self.check_dim(y, "TransformContext::transformed_apply")?;
        if ensemble.dim() != self.v.dim() {
            return Err(Error::DimensionMismatch {
                context: "TransformContext::transformed_apply ensemble",
                expected: self.v.dim(),
                found: ensemble.dim(),
            });
        }
        // row i of Z V^{-1} is (V^{-1} z_i)^T since V^{-1} is symmetric
        let w = ensemble.vectors() * self.v_inv.matrix();
        let wy = &w * y.matrix();
        Ok(DVector::from_fn(ensemble.num_measurements(), |i, _| {
            wy.row(i).dot(&w.row(i))
        }))
    }
}
