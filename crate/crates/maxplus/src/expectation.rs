//! Expectations of matrix functionals of the product chain.
//!
//! Computes `E[f(A_m)]` for the functionals the growth-rate bounds consume,
//! where `A_m = A(1) (x) ... (x) A(m)` is a product of i.i.d. draws. Two
//! methods are provided: Monte Carlo with entrywise standard errors, and
//! exact weighted enumeration over the joint support of discrete models.
//!
//! Monte Carlo is deterministic for a fixed seed regardless of worker
//! count: sample `i` is drawn from the substream `(seed, i)`, per-sample
//! results are accumulated in index order within fixed-size chunks, and
//! chunk sums are combined in chunk order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::MaxPlusMatrix;
use crate::model::MatrixModel;
use crate::seed::SeedSpec;

/// Matrix- or scalar-valued functional of the chain `A_m`.
#[derive(Debug, Clone, PartialEq)]
pub enum Functional {
    /// `E[A_m]`: entrywise means (n-by-n).
    EntryMeans { m: u32 },
    /// `E[A_m^-]`: entrywise means of the conjugate (n-by-n).
    ConjMeans { m: u32 },
    /// `E[(A_m (x) 0)^-]`: means of the conjugated row-maxima vector (1-by-n).
    RowMaxConjMeans { m: u32 },
    /// `E||A_m||` (scalar).
    NormMean { m: u32 },
    /// `E||v (x) A_m||` for a fixed finite row vector `v` (scalar).
    VecProductNormMean { v: MaxPlusMatrix, m: u32 },
}

impl Functional {
    pub fn m(&self) -> u32 {
        match self {
            Self::EntryMeans { m }
            | Self::ConjMeans { m }
            | Self::RowMaxConjMeans { m }
            | Self::NormMean { m }
            | Self::VecProductNormMean { m, .. } => *m,
        }
    }

    /// Stable identifier used in report provenance records.
    pub fn id(&self) -> String {
        match self {
            Self::EntryMeans { m } => format!("entry_means(m={m})"),
            Self::ConjMeans { m } => format!("conj_means(m={m})"),
            Self::RowMaxConjMeans { m } => format!("rowmax_conj_means(m={m})"),
            Self::NormMean { m } => format!("norm_mean(m={m})"),
            Self::VecProductNormMean { m, .. } => format!("vec_product_norm_mean(m={m})"),
        }
    }

    /// Substream slot, distinct per functional kind and chain length, so
    /// estimates of different functionals never share samples.
    pub(crate) fn stream_slot(&self) -> u64 {
        let (kind, m) = match self {
            Self::EntryMeans { m } => (1u64, *m),
            Self::ConjMeans { m } => (2, *m),
            Self::RowMaxConjMeans { m } => (3, *m),
            Self::NormMean { m } => (4, *m),
            Self::VecProductNormMean { m, .. } => (5, *m),
        };
        (kind << 32) | u64::from(m)
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.m() < 1 {
            return Err(Error::Precondition("chain length m must be >= 1".into()));
        }
        if let Self::VecProductNormMean { v, .. } = self {
            if v.shape() != (1, n) {
                return Err(Error::Dimension(format!(
                    "vector must be 1x{n}, got {}x{}",
                    v.rows(),
                    v.cols()
                )));
            }
            if !v.is_finite() {
                return Err(Error::Precondition(
                    "vector in vec_product_norm_mean must be finite".into(),
                ));
            }
        }
        Ok(())
    }

    /// Output dimensions: `None` for scalar functionals.
    fn output_dims(&self, n: usize) -> Option<(usize, usize)> {
        match self {
            Self::EntryMeans { .. } | Self::ConjMeans { .. } => Some((n, n)),
            Self::RowMaxConjMeans { .. } => Some((1, n)),
            Self::NormMean { .. } | Self::VecProductNormMean { .. } => None,
        }
    }

    /// Evaluates the functional on one realized chain into `out`
    /// (row-major; length 1 for scalars).
    fn eval_into(&self, chain: &MaxPlusMatrix, out: &mut [f64]) {
        let n = chain.rows();
        match self {
            Self::EntryMeans { .. } => {
                for (dst, e) in out.iter_mut().zip(chain.entries()) {
                    *dst = e.as_f64();
                }
            }
            Self::ConjMeans { .. } => {
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = chain.get(j, i).inverse().as_f64();
                    }
                }
            }
            Self::RowMaxConjMeans { .. } => {
                for i in 0..n {
                    let mut best = f64::NEG_INFINITY;
                    for j in 0..chain.cols() {
                        best = best.max(chain.get(i, j).as_f64());
                    }
                    out[i] = -best;
                }
            }
            Self::NormMean { .. } => out[0] = chain.norm().as_f64(),
            Self::VecProductNormMean { v, .. } => {
                let mut best = f64::NEG_INFINITY;
                for k in 0..n {
                    let vk = v.get(0, k).as_f64();
                    for j in 0..chain.cols() {
                        best = best.max(vk + chain.get(k, j).as_f64());
                    }
                }
                out[0] = best;
            }
        }
    }
}

/// Provenance of an expectation value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    MonteCarlo,
    ExactEnumeration,
    FixtureConstant,
}

/// Scalar or matrix payload of a [`MeanEstimate`].
#[derive(Debug, Clone, PartialEq)]
pub enum EstimateValue {
    Scalar(f64),
    Matrix(MaxPlusMatrix),
}

impl Serialize for EstimateValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Scalar(x) => serializer.serialize_f64(*x),
            Self::Matrix(m) => m.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for EstimateValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Scalar(f64),
            Matrix(MaxPlusMatrix),
        }
        Ok(match Raw::deserialize(deserializer)? {
            Raw::Scalar(x) => Self::Scalar(x),
            Raw::Matrix(m) => Self::Matrix(m),
        })
    }
}

/// An expectation result with matching-shape standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub value: EstimateValue,
    /// Row-major standard errors matching `value` (length 1 for scalars);
    /// all zero for exact and fixture methods.
    pub stderr: Vec<f64>,
    pub n_samples: u64,
    pub method: EstimateMethod,
}

impl MeanEstimate {
    pub fn scalar(&self) -> Result<f64> {
        match &self.value {
            EstimateValue::Scalar(x) => Ok(*x),
            EstimateValue::Matrix(_) => Err(Error::Domain(
                "expected a scalar estimate, got a matrix".into(),
            )),
        }
    }

    pub fn matrix(&self) -> Result<&MaxPlusMatrix> {
        match &self.value {
            EstimateValue::Matrix(m) => Ok(m),
            EstimateValue::Scalar(_) => Err(Error::Domain(
                "expected a matrix estimate, got a scalar".into(),
            )),
        }
    }

    pub fn stderr_scalar(&self) -> f64 {
        self.stderr.first().copied().unwrap_or(0.0)
    }

    pub fn stderr_at(&self, i: usize, j: usize) -> f64 {
        let cols = match &self.value {
            EstimateValue::Matrix(m) => m.cols(),
            EstimateValue::Scalar(_) => 1,
        };
        self.stderr[i * cols + j]
    }

    pub fn max_stderr(&self) -> f64 {
        self.stderr.iter().copied().fold(0.0, f64::max)
    }
}

fn package(
    f: &Functional,
    n: usize,
    means: Vec<f64>,
    stderr: Vec<f64>,
    n_samples: u64,
    method: EstimateMethod,
) -> MeanEstimate {
    let value = match f.output_dims(n) {
        None => EstimateValue::Scalar(means[0]),
        Some((r, c)) => EstimateValue::Matrix(
            MaxPlusMatrix::new(
                r,
                c,
                means
                    .into_iter()
                    .map(crate::scalar::MaxPlusScalar::finite)
                    .collect(),
            )
            .expect("accumulator matches output dims"),
        ),
    };
    MeanEstimate {
        value,
        stderr,
        n_samples,
        method,
    }
}

const CHUNK: u64 = 8192;

struct ChunkSums {
    sums: Vec<f64>,
    sq_sums: Vec<f64>,
    // entry sums tracked alongside norms for the mean-dominance check
    entry_sums: Vec<f64>,
}

/// Monte Carlo estimate of `E[f(A_m)]` over `n_samples` independent chains.
///
/// Deterministic for a fixed `(seed, stream_path)` and independent of the
/// rayon worker count. Standard errors use the unbiased sample variance.
pub fn mc_mean(
    model: &MatrixModel,
    f: &Functional,
    n_samples: u64,
    stream: &SeedSpec,
) -> Result<MeanEstimate> {
    if n_samples < 2 {
        return Err(Error::Precondition("n_samples must be >= 2".into()));
    }
    f.validate(model.n())?;
    let n = model.n();
    let width = f.output_dims(n).map(|(r, c)| r * c).unwrap_or(1);
    let track_entries = matches!(f, Functional::NormMean { .. });
    let m = f.m();

    let n_chunks = n_samples.div_ceil(CHUNK);
    let partials: Vec<ChunkSums> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n_samples);
            let mut sums = vec![0.0; width];
            let mut sq_sums = vec![0.0; width];
            let mut entry_sums = vec![0.0; if track_entries { n * n } else { 0 }];
            let mut buf = vec![0.0; width];
            for i in lo..hi {
                let mut rng = stream.child(i).rng();
                let chain = model.chain_with(&mut rng, m);
                f.eval_into(&chain, &mut buf);
                for (k, v) in buf.iter().enumerate() {
                    sums[k] += v;
                    sq_sums[k] += v * v;
                }
                if track_entries {
                    for (dst, e) in entry_sums.iter_mut().zip(chain.entries()) {
                        *dst += e.as_f64();
                    }
                }
            }
            ChunkSums {
                sums,
                sq_sums,
                entry_sums,
            }
        })
        .collect();

    let mut sums = vec![0.0; width];
    let mut sq_sums = vec![0.0; width];
    let mut entry_sums = vec![0.0; if track_entries { n * n } else { 0 }];
    for chunk in &partials {
        for k in 0..width {
            sums[k] += chunk.sums[k];
            sq_sums[k] += chunk.sq_sums[k];
        }
        for (dst, v) in entry_sums.iter_mut().zip(&chunk.entry_sums) {
            *dst += v;
        }
    }

    let count = n_samples as f64;
    let means: Vec<f64> = sums.iter().map(|s| s / count).collect();
    let stderr: Vec<f64> = sums
        .iter()
        .zip(&sq_sums)
        .map(|(s, sq)| {
            let var = ((sq - s * s / count) / (count - 1.0)).max(0.0);
            (var / count).sqrt()
        })
        .collect();

    if track_entries {
        // mean of norms dominates the norm of the mean matrix on any
        // common sample set; anything else signals an accumulator bug
        let norm_mean = means[0];
        let mean_matrix_norm = entry_sums
            .iter()
            .map(|s| s / count)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            norm_mean >= mean_matrix_norm - 1e-9 * (1.0 + mean_matrix_norm.abs()),
            "mean norm {norm_mean} fell below norm of mean matrix {mean_matrix_norm}"
        );
    }

    Ok(package(
        f,
        n,
        means,
        stderr,
        n_samples,
        EstimateMethod::MonteCarlo,
    ))
}

/// Exact `E[f(A_m)]` by weighted enumeration of the joint support of a
/// discrete model.
///
/// The joint support of the chain spans `m * n^2` independent entry draws;
/// `cap` bounds the number of joint outcomes visited. Non-discrete models
/// and budgets above `cap` are errors, never silent fallbacks.
pub fn exact_mean(model: &MatrixModel, f: &Functional, cap: u64) -> Result<MeanEstimate> {
    f.validate(model.n())?;
    let n = model.n();
    let m = f.m() as usize;
    let supports = model.entry_supports()?;

    let mut count: u128 = 1;
    for step_pos in 0..m * n * n {
        let size = supports[step_pos % (n * n)].len() as u128;
        count = count.saturating_mul(size);
    }
    if count > u128::from(cap) {
        return Err(Error::BudgetExceeded { count, cap });
    }

    let width = f.output_dims(n).map(|(r, c)| r * c).unwrap_or(1);
    let positions = m * n * n;
    let mut indices = vec![0usize; positions];
    let mut sums = vec![0.0; width];
    let mut buf = vec![0.0; width];
    let mut total_weight = 0.0;

    loop {
        let mut weight = 1.0;
        let mut factors: Vec<MaxPlusMatrix> = Vec::with_capacity(m);
        for step in 0..m {
            let entries = (0..n * n)
                .map(|pos| {
                    let atom = &supports[pos][indices[step * n * n + pos]];
                    weight *= atom.prob;
                    crate::scalar::MaxPlusScalar::finite(atom.value)
                })
                .collect();
            factors.push(MaxPlusMatrix::new(n, n, entries).expect("n x n factor"));
        }
        let mut chain = factors[0].clone();
        for factor in &factors[1..] {
            chain = chain.otimes(factor).expect("square factors");
        }
        f.eval_into(&chain, &mut buf);
        for (dst, v) in sums.iter_mut().zip(&buf) {
            *dst += weight * v;
        }
        total_weight += weight;

        // odometer over the joint support
        let mut pos = 0;
        loop {
            if pos == positions {
                let means: Vec<f64> = sums.iter().map(|s| s / total_weight).collect();
                return Ok(package(
                    f,
                    n,
                    means,
                    vec![0.0; width],
                    count as u64,
                    EstimateMethod::ExactEnumeration,
                ));
            }
            indices[pos] += 1;
            if indices[pos] < supports[pos % (n * n)].len() {
                break;
            }
            indices[pos] = 0;
            pos += 1;
        }
    }
}

/// Provider of the expectations a bound formula consumes.
pub trait ExpectationSource {
    fn estimate(&self, f: &Functional) -> Result<MeanEstimate>;
    fn method(&self) -> EstimateMethod;
}

/// Monte Carlo source; each functional is estimated on its own substream,
/// so distinct functionals never share samples.
pub struct MonteCarloSource<'a> {
    pub model: &'a MatrixModel,
    pub n_samples: u64,
    pub seed: SeedSpec,
}

impl ExpectationSource for MonteCarloSource<'_> {
    fn estimate(&self, f: &Functional) -> Result<MeanEstimate> {
        mc_mean(self.model, f, self.n_samples, &self.seed.child(f.stream_slot()))
    }

    fn method(&self) -> EstimateMethod {
        EstimateMethod::MonteCarlo
    }
}

/// Exact-enumeration source for discrete models.
pub struct ExactSource<'a> {
    pub model: &'a MatrixModel,
    pub cap: u64,
}

impl ExpectationSource for ExactSource<'_> {
    fn estimate(&self, f: &Functional) -> Result<MeanEstimate> {
        exact_mean(self.model, f, self.cap)
    }

    fn method(&self) -> EstimateMethod {
        EstimateMethod::ExactEnumeration
    }
}
