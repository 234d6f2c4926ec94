//! Linear-chain conditional random fields.

use crate::alphabet::Alphabet;
use crate::distribution::Matrix;
use crate::error::{Error, Result};
use crate::logspace::log_sum_exp_iter;
use crate::sequence::{check_indices, check_nonempty};

/// p(x | y) ∝ exp[Σₙ Vₙ(xₙ, xₙ₊₁) + Σₙ Uₙ(xₙ, yₙ)] over a fixed length N.
///
/// `pairwise[n]` is the |Λ|×|Λ| matrix Vₙ for the zero-based step `n`;
/// `unary[n]` is the |Λ|×|Ω| matrix Uₙ at position `n`. Entries are
/// unconstrained finite scores.
#[derive(Debug, Clone, PartialEq)]
pub struct LcCrfModel {
    labels: Alphabet,
    observations: Alphabet,
    pairwise: Vec<Matrix>,
    unary: Vec<Matrix>,
}

impl LcCrfModel {
    pub fn new(
        labels: Alphabet,
        observations: Alphabet,
        pairwise: Vec<Matrix>,
        unary: Vec<Matrix>,
    ) -> Result<Self> {
        let l = labels.len();
        let o = observations.len();
        if l == 0 || o == 0 {
            return Err(Error::Dimension("alphabets must be nonempty".into()));
        }
        if unary.is_empty() || pairwise.len() + 1 != unary.len() {
            return Err(Error::Dimension(format!(
                "{} pairwise matrices for {} unary matrices",
                pairwise.len(),
                unary.len()
            )));
        }
        for (n, v) in pairwise.iter().enumerate() {
            if v.shape() != (l, l) {
                return Err(Error::Dimension(format!(
                    "pairwise potential {n} is {:?}, expected ({l}, {l})",
                    v.shape()
                )));
            }
            if !v.all_finite() {
                return Err(Error::InvalidPotential(format!(
                    "pairwise potential {n} has a non-finite entry"
                )));
            }
        }
        for (n, u) in unary.iter().enumerate() {
            if u.shape() != (l, o) {
                return Err(Error::Dimension(format!(
                    "unary potential {n} is {:?}, expected ({l}, {o})",
                    u.shape()
                )));
            }
            if !u.all_finite() {
                return Err(Error::InvalidPotential(format!(
                    "unary potential {n} has a non-finite entry"
                )));
            }
        }
        Ok(Self {
            labels,
            observations,
            pairwise,
            unary,
        })
    }

    pub fn labels(&self) -> &Alphabet {
        &self.labels
    }

    pub fn observations(&self) -> &Alphabet {
        &self.observations
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }

    pub fn length(&self) -> usize {
        self.unary.len()
    }

    /// Vₙ for the zero-based step `n`.
    pub fn pairwise(&self, n: usize) -> &Matrix {
        &self.pairwise[n]
    }

    /// Uₙ at the zero-based position `n`.
    pub fn unary(&self, n: usize) -> &Matrix {
        &self.unary[n]
    }

    pub fn pairwise_all(&self) -> &[Matrix] {
        &self.pairwise
    }

    pub fn unary_all(&self) -> &[Matrix] {
        &self.unary
    }

    pub fn check_observations(&self, y: &[usize]) -> Result<()> {
        check_nonempty(y)?;
        if y.len() != self.length() {
            return Err(Error::Dimension(format!(
                "sequence of length {} for a CRF of length {}",
                y.len(),
                self.length()
            )));
        }
        check_indices(y, self.num_observations(), "observation")
    }

    fn check_pair(&self, x: &[usize], y: &[usize]) -> Result<()> {
        if x.len() != y.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} observations",
                x.len(),
                y.len()
            )));
        }
        self.check_observations(y)?;
        check_indices(x, self.num_labels(), "label")
    }

    /// Σₙ Vₙ(xₙ, xₙ₊₁) + Σₙ Uₙ(xₙ, yₙ).
    pub fn unnormalized_log_score(&self, x: &[usize], y: &[usize]) -> Result<f64> {
        self.check_pair(x, y)?;
        let unary: f64 = (0..x.len()).map(|n| self.unary[n].get(x[n], y[n])).sum();
        let pairwise: f64 = (0..x.len() - 1)
            .map(|n| self.pairwise[n].get(x[n], x[n + 1]))
            .sum();
        Ok(pairwise + unary)
    }

    /// log κ(y) by a log-space forward pass.
    pub fn log_partition(&self, y: &[usize]) -> Result<f64> {
        self.check_observations(y)?;
        let l = self.num_labels();
        let mut alpha: Vec<f64> = (0..l).map(|x| self.unary[0].get(x, y[0])).collect();
        for n in 1..y.len() {
            let v = &self.pairwise[n - 1];
            let u = &self.unary[n];
            alpha = (0..l)
                .map(|next| {
                    log_sum_exp_iter((0..l).map(|prev| alpha[prev] + v.get(prev, next)))
                        + u.get(next, y[n])
                })
                .collect();
        }
        Ok(log_sum_exp_iter(alpha))
    }

    /// log p(x | y) = score − log κ(y).
    pub fn posterior_log_prob(&self, x: &[usize], y: &[usize]) -> Result<f64> {
        Ok(self.unnormalized_log_score(x, y)? - self.log_partition(y)?)
    }
}

pub fn crf_unnormalized_log_score(crf: &LcCrfModel, x: &[usize], y: &[usize]) -> Result<f64> {
    crf.unnormalized_log_score(x, y)
}

pub fn crf_log_partition(crf: &LcCrfModel, y: &[usize]) -> Result<f64> {
    crf.log_partition(y)
}

pub fn crf_posterior_log_prob(crf: &LcCrfModel, x: &[usize], y: &[usize]) -> Result<f64> {
    crf.posterior_log_prob(x, y)
}
