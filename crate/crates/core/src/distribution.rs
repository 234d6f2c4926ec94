//! Dense real matrices, categorical laws, and row-stochastic matrices.

use crate::error::{Error, Result};
use crate::logspace::log_normalize;

/// Tolerance on the unit sum of a probability vector supplied at construction.
pub const CONSTRUCTION_TOLERANCE: f64 = 1e-12;

/// Tolerance on the unit sum of quantities derived by inference.
pub const DERIVED_TOLERANCE: f64 = 1e-10;

/// Row-major dense matrix of finite reals or log-values.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "ragged matrix: row of length {} where {cols} expected",
                bad.len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// Probability vector validated on construction; caches its logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct Categorical {
    probs: Vec<f64>,
    log_probs: Vec<f64>,
}

impl Categorical {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {p} is not a finite nonnegative number"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > CONSTRUCTION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}, not 1"
            )));
        }
        let log_probs = probs.iter().map(|p| p.ln()).collect();
        Ok(Self { probs, log_probs })
    }

    pub fn uniform(size: usize) -> Self {
        Self::new(vec![1.0 / size as f64; size]).expect("uniform law is valid")
    }

    pub fn point_mass(size: usize, at: usize) -> Self {
        let mut probs = vec![0.0; size];
        probs[at] = 1.0;
        Self::new(probs).expect("point mass is valid")
    }

    /// Normalizes unnormalized log-weights. `None` when every weight is zero.
    pub fn from_log_weights(log_weights: &[f64]) -> Option<Self> {
        let log_probs = log_normalize(log_weights)?;
        let mut probs: Vec<f64> = log_probs.iter().map(|l| l.exp()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let log_probs = probs.iter().map(|p| p.ln()).collect();
        Some(Self { probs, log_probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_probs(&self) -> &[f64] {
        &self.log_probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn log_prob(&self, i: usize) -> f64 {
        self.log_probs[i]
    }

    /// Index of the most probable outcome, smallest index on ties.
    pub fn mode(&self) -> usize {
        crate::logspace::argmax_first(&self.probs)
    }
}

/// Matrix whose rows are each a [`Categorical`].
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    probs: Matrix,
    log_probs: Matrix,
}

impl StochasticMatrix {
    pub fn new(probs: Matrix) -> Result<Self> {
        if probs.rows() == 0 || probs.cols() == 0 {
            return Err(Error::InvalidDistribution("empty stochastic matrix".into()));
        }
        for i in 0..probs.rows() {
            Categorical::new(probs.row(i).to_vec()).map_err(|e| match e {
                Error::InvalidDistribution(m) => {
                    Error::InvalidDistribution(format!("row {i}: {m}"))
                }
                other => other,
            })?;
        }
        let log_probs = probs.map(f64::ln);
        Ok(Self { probs, log_probs })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn from_categoricals(rows: &[Categorical]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = rows.iter().map(|c| c.probs().to_vec()).collect();
        Self::from_rows(&rows)
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        Self::new(Matrix::filled(rows, cols, 1.0 / cols as f64)).expect("uniform rows are valid")
    }

    pub fn identity(size: usize) -> Self {
        Self::new(Matrix::from_fn(size, size, |i, j| if i == j { 1.0 } else { 0.0 }))
            .expect("identity rows are valid")
    }

    pub fn rows(&self) -> usize {
        self.probs.rows()
    }

    pub fn cols(&self) -> usize {
        self.probs.cols()
    }

    #[inline]
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.probs.get(i, j)
    }

    #[inline]
    pub fn log_prob(&self, i: usize, j: usize) -> f64 {
        self.log_probs.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.probs.row(i)
    }

    pub fn log_row(&self, i: usize) -> &[f64] {
        self.log_probs.row(i)
    }

    pub fn probs(&self) -> &Matrix {
        &self.probs
    }

    pub fn log_probs(&self) -> &Matrix {
        &self.log_probs
    }
}

/// Per-step parameters, either shared by every position or given per position.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule<T> {
    Stationary(T),
    PerPosition(Vec<T>),
}

impl<T> Schedule<T> {
    /// Parameters at step `n`. Panics when `n` is past a per-position schedule.
    pub fn at(&self, n: usize) -> &T {
        match self {
            Schedule::Stationary(t) => t,
            Schedule::PerPosition(v) => &v[n],
        }
    }

    pub fn is_stationary(&self) -> bool {
        matches!(self, Schedule::Stationary(_))
    }

    /// Number of stored entries (1 for stationary).
    pub fn stored(&self) -> usize {
        match self {
            Schedule::Stationary(_) => 1,
            Schedule::PerPosition(v) => v.len(),
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        match self {
            Schedule::Stationary(t) => std::slice::from_ref(t).iter(),
            Schedule::PerPosition(v) => v.iter(),
        }
    }
}

/// Probabilities in `[0, 1]` exponentiated from a row of log-weights,
/// renormalized to absorb rounding. The pre-renormalization error must be
/// below [`CONSTRUCTION_TOLERANCE`].
pub(crate) fn exp_row_checked(log_row: &[f64]) -> Result<Vec<f64>> {
    let mut probs: Vec<f64> = log_row.iter().map(|l| l.exp()).collect();
    let total: f64 = probs.iter().sum();
    if !total.is_finite() || (total - 1.0).abs() >= CONSTRUCTION_TOLERANCE {
        return Err(Error::Numeric(format!(
            "row sums to {total} before renormalization"
        )));
    }
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(probs)
}
