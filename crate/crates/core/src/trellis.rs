//! Log-space forward, backward and max-product recursions over a chain
//! described by an initial log-weight vector, per-step transition kernels and
//! per-position local log-factors.
//!
//! The generative decoders plug in log p(x₁) + log p(y₁|x₁) and
//! log p(yₙ|xₙ); the discriminative ones plug in log p(x₁|y₁) and
//! log p(xₙ|yₙ) − log p(xₙ). The recursions are otherwise identical.

use crate::distribution::{Categorical, StochasticMatrix};
use crate::error::{Error, Result};
use crate::logspace::{argmax_first, log_sum_exp_iter};

/// Per-position log values over the label set (α, β or Viterbi δ), with
/// backpointers for Viterbi tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TrellisTable {
    log_values: Vec<Vec<f64>>,
    backpointers: Option<Vec<Vec<usize>>>,
}

impl TrellisTable {
    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    /// Log values at the zero-based position `n`.
    pub fn at(&self, n: usize) -> &[f64] {
        &self.log_values[n]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.log_values
    }

    /// `backpointers()[n][x]` is the best predecessor of label `x` at
    /// position `n` (entry 0 is unused and all zeros).
    pub fn backpointers(&self) -> Option<&[Vec<usize>]> {
        self.backpointers.as_deref()
    }
}

pub(crate) struct LocalChain<'a> {
    /// Log-weights at position 0, local factor included.
    pub first: Vec<f64>,
    /// `transitions[n]` links position `n` to `n + 1`.
    pub transitions: Vec<&'a StochasticMatrix>,
    /// `local[n - 1]` is the log-factor at position `n >= 1`.
    pub local: Vec<Vec<f64>>,
}

impl LocalChain<'_> {
    fn len(&self) -> usize {
        self.local.len() + 1
    }

    fn labels(&self) -> usize {
        self.first.len()
    }

    pub fn forward(&self) -> TrellisTable {
        let l = self.labels();
        let mut cols = Vec::with_capacity(self.len());
        cols.push(self.first.clone());
        for n in 1..self.len() {
            let prev: &Vec<f64> = &cols[n - 1];
            let t = self.transitions[n - 1];
            let local = &self.local[n - 1];
            let next: Vec<f64> = (0..l)
                .map(|x| log_sum_exp_iter((0..l).map(|p| prev[p] + t.log_prob(p, x))) + local[x])
                .collect();
            cols.push(next);
        }
        TrellisTable {
            log_values: cols,
            backpointers: None,
        }
    }

    pub fn backward(&self) -> TrellisTable {
        let l = self.labels();
        let len = self.len();
        let mut cols = vec![vec![0.0; l]; len];
        for n in (0..len - 1).rev() {
            let t = self.transitions[n];
            let local = &self.local[n];
            let next = cols[n + 1].clone();
            for (x, b) in cols[n].iter_mut().enumerate() {
                *b = log_sum_exp_iter((0..l).map(|s| t.log_prob(x, s) + local[s] + next[s]));
            }
        }
        TrellisTable {
            log_values: cols,
            backpointers: None,
        }
    }

    /// Max-product table; ties resolve to the smallest predecessor index.
    pub fn viterbi(&self) -> TrellisTable {
        let l = self.labels();
        let mut cols = Vec::with_capacity(self.len());
        let mut back = Vec::with_capacity(self.len());
        cols.push(self.first.clone());
        back.push(vec![0; l]);
        let mut candidates = vec![0.0; l];
        for n in 1..self.len() {
            let prev = &cols[n - 1];
            let t = self.transitions[n - 1];
            let local = &self.local[n - 1];
            let mut col = Vec::with_capacity(l);
            let mut bp = Vec::with_capacity(l);
            for x in 0..l {
                for (p, c) in candidates.iter_mut().enumerate() {
                    *c = prev[p] + t.log_prob(p, x);
                }
                let best = argmax_first(&candidates);
                bp.push(best);
                col.push(candidates[best] + local[x]);
            }
            cols.push(col);
            back.push(bp);
        }
        TrellisTable {
            log_values: cols,
            backpointers: Some(back),
        }
    }
}

/// Normalizes αₙ + βₙ at every position.
pub(crate) fn marginals(alpha: &TrellisTable, beta: &TrellisTable) -> Result<Vec<Categorical>> {
    alpha
        .columns()
        .iter()
        .zip(beta.columns())
        .enumerate()
        .map(|(n, (a, b))| {
            let w: Vec<f64> = a.iter().zip(b).map(|(a, b)| a + b).collect();
            Categorical::from_log_weights(&w).ok_or(Error::ImpossibleEvidence { position: n })
        })
        .collect()
}

/// Backtracks a Viterbi table, returning the path and its final score.
pub(crate) fn backtrack(table: &TrellisTable) -> Result<(Vec<usize>, f64)> {
    if let Some(position) = table
        .columns()
        .iter()
        .position(|c| c.iter().all(|&v| v == f64::NEG_INFINITY))
    {
        return Err(Error::ImpossibleEvidence { position });
    }
    let back = table.backpointers().expect("viterbi table carries backpointers");
    let len = table.len();
    let last = table.at(len - 1);
    let mut state = argmax_first(last);
    let score = last[state];
    let mut path = vec![0; len];
    path[len - 1] = state;
    for n in (1..len).rev() {
        state = back[n][state];
        path[n - 1] = state;
    }
    Ok((path, score))
}

/// MPM path: per-position mode, smallest index on ties.
pub(crate) fn modes(marginals: &[Categorical]) -> Vec<usize> {
    marginals.iter().map(Categorical::mode).collect()
}
