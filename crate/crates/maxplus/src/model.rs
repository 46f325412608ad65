//! Random transition-matrix models.
//!
//! A [`MatrixModel`] assigns an independent distribution to each entry of an
//! n-by-n random matrix; successive samples are i.i.d. Every admissible
//! distribution is finite with probability 1 (no mass on `eps`), which the
//! expectation bounds rely on.
//!
//! Model files are JSON documents:
//!
//! ```json
//! {"n": 2, "entries": "all", "dist": "exponential", "mean": 1.0}
//! ```
//!
//! `entries` is either the shorthand `"all"` — one distribution, given by
//! the remaining top-level keys, shared by every entry — or an n-by-n array
//! of distribution objects. Distribution objects are tagged by `dist`:
//! `{"dist": "exponential", "mean": m}`, `{"dist": "uniform", "lo": a, "hi": b}`,
//! `{"dist": "discrete", "atoms": [{"value": v, "prob": p}, ...]}`,
//! `{"dist": "constant", "value": c}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::MaxPlusMatrix;
use crate::scalar::MaxPlusScalar;
use crate::seed::SeedSpec;

/// One weighted outcome of a discrete distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// Distribution of a single matrix entry. All variants are finite w.p. 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "lowercase")]
pub enum DistributionSpec {
    /// Exponential with the given mean (so the expected value equals `mean`).
    Exponential { mean: f64 },
    /// Uniform on `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// Finitely supported distribution; probabilities must sum to 1.
    Discrete { atoms: Vec<Atom> },
    /// Point mass.
    Constant { value: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { mean } => {
                if !mean.is_finite() || *mean <= 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "exponential mean must be positive and finite, got {mean}"
                    )));
                }
            }
            Self::Uniform { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                    return Err(Error::InvalidModel(format!(
                        "uniform bounds must be finite with lo < hi, got [{lo}, {hi})"
                    )));
                }
            }
            Self::Discrete { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::InvalidModel(
                        "discrete distribution needs at least one atom".into(),
                    ));
                }
                let mut total = 0.0;
                for atom in atoms {
                    if !atom.value.is_finite() {
                        return Err(Error::InvalidModel(format!(
                            "discrete atom value must be finite (mass on eps is unsupported), got {}",
                            atom.value
                        )));
                    }
                    if !atom.prob.is_finite() || atom.prob <= 0.0 {
                        return Err(Error::InvalidModel(format!(
                            "atom probability must be positive, got {}",
                            atom.prob
                        )));
                    }
                    total += atom.prob;
                }
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidModel(format!(
                        "atom probabilities must sum to 1 within 1e-12, got {total}"
                    )));
                }
            }
            Self::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::InvalidModel(format!(
                        "constant value must be finite (mass on eps is unsupported), got {value}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Analytic mean.
    pub fn mean(&self) -> f64 {
        match self {
            Self::Exponential { mean } => *mean,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Discrete { atoms } => atoms.iter().map(|a| a.prob * a.value).sum(),
            Self::Constant { value } => *value,
        }
    }

    /// Analytic variance.
    pub fn variance(&self) -> f64 {
        match self {
            Self::Exponential { mean } => mean * mean,
            Self::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            Self::Discrete { atoms } => {
                let mu = self.mean();
                atoms
                    .iter()
                    .map(|a| a.prob * (a.value - mu) * (a.value - mu))
                    .sum()
            }
            Self::Constant { .. } => 0.0,
        }
    }

    /// Draws one variate. Exponential sampling uses the inverse CDF
    /// `-mean * ln(1 - u)` so the parameterization is exact.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Exponential { mean } => -mean * (1.0 - rng.gen::<f64>()).ln(),
            Self::Uniform { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
            Self::Discrete { atoms } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for atom in atoms {
                    acc += atom.prob;
                    if u < acc {
                        return atom.value;
                    }
                }
                // u can only reach here through rounding of the running sum
                atoms.last().expect("validated nonempty").value
            }
            Self::Constant { value } => *value,
        }
    }

    fn support_atoms(&self) -> Option<Vec<Atom>> {
        match self {
            Self::Discrete { atoms } => Some(atoms.clone()),
            Self::Constant { value } => Some(vec![Atom {
                value: *value,
                prob: 1.0,
            }]),
            _ => None,
        }
    }
}

/// Per-entry distribution grid for an i.i.d. sequence of random n-by-n
/// transition matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixModel {
    n: usize,
    entry_dists: Vec<DistributionSpec>,
}

impl MatrixModel {
    /// Builds a model from a row-major grid of n^2 entry distributions.
    pub fn new(n: usize, entry_dists: Vec<DistributionSpec>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("state dimension must be positive".into()));
        }
        if entry_dists.len() != n * n {
            return Err(Error::InvalidModel(format!(
                "expected {} entry distributions for n = {n}, got {}",
                n * n,
                entry_dists.len()
            )));
        }
        for dist in &entry_dists {
            dist.validate()?;
        }
        Ok(Self { n, entry_dists })
    }

    /// Builds a model with one distribution shared by every entry.
    pub fn iid(n: usize, dist: DistributionSpec) -> Result<Self> {
        Self::new(n, vec![dist; n * n])
    }

    /// The built-in 2x2 test system: i.i.d. exponential entries of mean 1.
    pub fn paper_test() -> Self {
        Self::iid(2, DistributionSpec::Exponential { mean: 1.0 }).expect("valid builtin model")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, i: usize, j: usize) -> &DistributionSpec {
        &self.entry_dists[i * self.n + j]
    }

    /// True when every entry distribution has finite support, so exact
    /// enumeration applies.
    pub fn is_discrete(&self) -> bool {
        self.entry_dists
            .iter()
            .all(|d| matches!(d, DistributionSpec::Discrete { .. } | DistributionSpec::Constant { .. }))
    }

    /// Finite supports of all n^2 entry distributions, row-major.
    pub(crate) fn entry_supports(&self) -> Result<Vec<Vec<Atom>>> {
        self.entry_dists
            .iter()
            .map(|d| {
                d.support_atoms().ok_or_else(|| {
                    Error::UnsupportedModel(
                        "exact enumeration needs discrete or constant entries".into(),
                    )
                })
            })
            .collect()
    }

    /// Parses a model JSON document (see the module docs for the schema).
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("model JSON: {e}")))?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("model JSON must be an object".into()))?;
        let n = obj
            .get("n")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Parse("model JSON needs a positive integer \"n\"".into()))?
            as usize;
        let entries = obj
            .get("entries")
            .ok_or_else(|| Error::Parse("model JSON needs an \"entries\" field".into()))?;
        match entries {
            serde_json::Value::String(tag) if tag == "all" => {
                // shared distribution given by the remaining top-level keys
                let mut rest = obj.clone();
                rest.remove("n");
                rest.remove("entries");
                let dist: DistributionSpec =
                    serde_json::from_value(serde_json::Value::Object(rest))
                        .map_err(|e| Error::Parse(format!("entry distribution: {e}")))?;
                Self::iid(n, dist)
            }
            serde_json::Value::Array(rows) => {
                if rows.len() != n {
                    return Err(Error::Parse(format!(
                        "entries array has {} rows, expected {n}",
                        rows.len()
                    )));
                }
                let mut dists = Vec::with_capacity(n * n);
                for (i, row) in rows.iter().enumerate() {
                    let row = row.as_array().ok_or_else(|| {
                        Error::Parse(format!("entries row {i} must be an array"))
                    })?;
                    if row.len() != n {
                        return Err(Error::Parse(format!(
                            "entries row {i} has {} cells, expected {n}",
                            row.len()
                        )));
                    }
                    for cell in row {
                        let dist: DistributionSpec = serde_json::from_value(cell.clone())
                            .map_err(|e| Error::Parse(format!("entry distribution: {e}")))?;
                        dists.push(dist);
                    }
                }
                Self::new(n, dists)
            }
            _ => Err(Error::Parse(
                "\"entries\" must be \"all\" or an n-by-n array".into(),
            )),
        }
    }

    /// Serializes to the expanded (array) form of the model schema.
    pub fn to_json_value(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| serde_json::to_value(self.dist(i, j)).expect("serializable dist"))
                    .collect()
            })
            .collect();
        serde_json::json!({ "n": self.n, "entries": rows })
    }

    /// One draw of the random matrix on the given stream.
    pub fn sample(&self, stream: &SeedSpec) -> MaxPlusMatrix {
        self.sample_with(&mut stream.rng())
    }

    /// The product `A(1) (x) ... (x) A(m)` of `m` fresh draws on the given
    /// stream, multiplied left to right.
    pub fn sample_chain(&self, m: u32, stream: &SeedSpec) -> Result<MaxPlusMatrix> {
        if m < 1 {
            return Err(Error::Precondition("chain length m must be >= 1".into()));
        }
        Ok(self.chain_with(&mut stream.rng(), m))
    }

    pub(crate) fn chain_with<R: Rng>(&self, rng: &mut R, m: u32) -> MaxPlusMatrix {
        let mut acc = self.sample_with(rng);
        for _ in 1..m {
            let next = self.sample_with(rng);
            acc = acc.otimes(&next).expect("square factors");
        }
        acc
    }
}

/// Source of i.i.d. random transition matrices for the state recursion.
///
/// [`MatrixModel`] is the distributional implementation; [`FixedMatrix`]
/// provides deterministic systems (which may contain `eps` entries, e.g.
/// the identity or an event-graph matrix) that a distribution grid cannot
/// express.
pub trait TransitionSampler {
    fn dim(&self) -> usize;
    fn sample_with<R: Rng>(&self, rng: &mut R) -> MaxPlusMatrix;
}

impl TransitionSampler for MatrixModel {
    fn dim(&self) -> usize {
        self.n
    }

    fn sample_with<R: Rng>(&self, rng: &mut R) -> MaxPlusMatrix {
        let entries = self
            .entry_dists
            .iter()
            .map(|d| MaxPlusScalar::finite(d.draw(rng)))
            .collect();
        MaxPlusMatrix::new(self.n, self.n, entries).expect("grid matches n x n")
    }
}

/// Point mass at one square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedMatrix(MaxPlusMatrix);

impl FixedMatrix {
    pub fn new(matrix: MaxPlusMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "transition matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self(matrix))
    }

    pub fn matrix(&self) -> &MaxPlusMatrix {
        &self.0
    }
}

impl TransitionSampler for FixedMatrix {
    fn dim(&self) -> usize {
        self.0.rows()
    }

    fn sample_with<R: Rng>(&self, _rng: &mut R) -> MaxPlusMatrix {
        self.0.clone()
    }
}
