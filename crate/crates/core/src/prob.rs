//! Categorical distributions and the handful of operations the agents need
//! on them.
//!
//! Every probability that enters a logarithm goes through [`safe_ln`], which
//! floors its argument at [`LOG_FLOOR`]. Learned likelihoods and preferences
//! can contain exact zeros, and the posterior and risk computations would
//! otherwise produce `-inf`.
//!
//! Matrices follow the column-conditional convention: column `j` of a
//! [`StochasticMatrix`] is the distribution conditioned on index `j`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest probability fed to a logarithm.
pub const LOG_FLOOR: f64 = 1e-16;

/// Tolerance used when validating that a vector or column sums to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Natural log with the argument floored at [`LOG_FLOOR`].
#[inline]
pub fn safe_ln(p: f64) -> f64 {
    p.max(LOG_FLOOR).ln()
}

/// A normalized probability vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Categorical(Vec<f64>);

impl Categorical {
    /// Validates `p` as a probability vector.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        validate_probabilities(&p)?;
        Ok(Categorical(p))
    }

    /// Divides nonnegative weights by their sum.
    pub fn normalize(mut weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "weight {i} is {}",
                weights[i]
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Categorical(weights))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over zero outcomes");
        Categorical(vec![1.0 / n as f64; n])
    }

    pub fn delta(n: usize, index: usize) -> Self {
        assert!(index < n, "delta index {index} out of range for {n}");
        let mut p = vec![0.0; n];
        p[index] = 1.0;
        Categorical(p)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest probability; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }

    /// Caller guarantees the vector is already normalized.
    pub(crate) fn from_normalized(p: Vec<f64>) -> Self {
        debug_assert!(validate_probabilities(&p).is_ok(), "{p:?}");
        Categorical(p)
    }
}

impl std::ops::Index<usize> for Categorical {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A single active index in a vector of dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OneHot {
    index: usize,
    dim: usize,
}

impl OneHot {
    pub fn new(index: usize, dim: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        Ok(OneHot { index, dim })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        v[self.index] = 1.0;
        v
    }
}

/// Column-stochastic matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    /// Builds a matrix from row-major data, checking every column.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        let m = StochasticMatrix { rows, cols, data };
        for c in 0..cols {
            validate_probabilities(&m.column(c))
                .map_err(|e| Error::InvalidDistribution(format!("column {c}: {e}")))?;
        }
        Ok(m)
    }

    pub fn from_columns(columns: &[Categorical]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Categorical::len);
        if cols == 0 || rows == 0 {
            return Err(Error::InvalidDistribution("empty matrix".into()));
        }
        let mut data = vec![0.0; rows * cols];
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    actual: col.len(),
                });
            }
            for (r, &p) in col.probs().iter().enumerate() {
                data[r * cols + c] = p;
            }
        }
        Ok(StochasticMatrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        StochasticMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        StochasticMatrix {
            rows,
            cols,
            data: vec![1.0 / rows as f64; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    /// Replaces one column; all other entries are left untouched.
    pub fn set_column(&mut self, col: usize, values: &Categorical) -> Result<()> {
        if col >= self.cols {
            return Err(Error::IndexOutOfRange {
                index: col,
                dim: self.cols,
            });
        }
        if values.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: values.len(),
            });
        }
        for (r, &p) in values.probs().iter().enumerate() {
            self.data[r * self.cols + col] = p;
        }
        Ok(())
    }

    /// `M · v`. The result is a distribution whenever `v` is one.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
            .collect()
    }

    /// `Mᵀ · v`, i.e. one weighted sum per column.
    pub fn transpose_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "transpose_mul_vec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (row, &x) in self.data.chunks_exact(self.cols).zip(v) {
            for (o, m) in out.iter_mut().zip(row) {
                *o += m * x;
            }
        }
        out
    }

    /// Largest deviation of any column sum from one.
    pub fn max_column_sum_error(&self) -> f64 {
        (0..self.cols)
            .map(|c| ((0..self.rows).map(|r| self.get(r, c)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn validate_probabilities(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty probability vector".into()));
    }
    if let Some(i) = p.iter().position(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "entry {i} is {}",
            p[i]
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("sums to {total}")));
    }
    Ok(())
}

/// Lowest index of the maximum.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Lowest index of the minimum.
pub fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// `exp(scores / temperature)`, normalized.
pub fn softmax(scores: &[f64], temperature: f64) -> Result<Categorical> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::InvalidTemperature(temperature));
    }
    if scores.is_empty() {
        return Err(Error::InvalidDistribution("empty score vector".into()));
    }
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::NonFiniteScore { index });
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = scores
        .iter()
        .map(|s| ((s - max) / temperature).exp())
        .collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Ok(Categorical::from_normalized(p))
}

/// Shannon entropy in nats, with `0 · ln 0 = 0`.
pub fn entropy(d: &Categorical) -> f64 {
    entropy_of(d.probs())
}

fn entropy_of(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// Entropy of every column.
pub fn column_entropies(m: &StochasticMatrix) -> Vec<f64> {
    let mut h = vec![0.0; m.cols()];
    for row in m.row_major().chunks_exact(m.cols()) {
        for (acc, &p) in h.iter_mut().zip(row) {
            if p > 0.0 {
                *acc -= p * p.ln();
            }
        }
    }
    h
}

/// `KL(p ‖ q)` in nats. Entries with `p = 0` contribute nothing; `q` goes
/// through the log floor.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * (pi.ln() - safe_ln(qi)))
        .sum()
}

/// Jensen-Shannon divergence in nats; lies in `[0, ln 2]`.
pub fn js_divergence(p: &Categorical, q: &Categorical) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    let m: Vec<f64> = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let js = 0.5 * (kl_divergence(p.probs(), &m) + kl_divergence(q.probs(), &m));
    Ok(js.max(0.0))
}

/// Draws an index by inverting the cumulative distribution with one uniform
/// variate.
pub fn sample<R: Rng + ?Sized>(d: &Categorical, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (i, &p) in d.probs().iter().enumerate() {
        if p > 0.0 {
            cumulative += p;
            last_positive = i;
            if u < cumulative {
                return i;
            }
        }
    }
    // u landed in the rounding gap above the final cumulative sum
    last_positive
}
