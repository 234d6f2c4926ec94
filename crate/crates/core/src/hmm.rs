//! Discrete hidden Markov models and evaluation of their joint law.

use crate::alphabet::Alphabet;
use crate::distribution::{Categorical, Schedule, StochasticMatrix};
use crate::error::{Error, Result};
use crate::sequence::{check_indices, check_nonempty};

/// Hidden Markov model over labels Λ and observations Ω:
///
/// p(x, y) = p(x₁) p(y₁|x₁) ∏ p(xₙ₊₁|xₙ) p(yₙ₊₁|xₙ₊₁)
///
/// Transitions are indexed by the step `n` (from position `n` to `n + 1`)
/// and emissions by the position `n`, both zero-based. A stationary model
/// reuses one matrix of each kind and accepts sequences of any length; a
/// per-position model fixes the length.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    labels: Alphabet,
    observations: Alphabet,
    initial: Categorical,
    transitions: Schedule<StochasticMatrix>,
    emissions: Schedule<StochasticMatrix>,
}

impl HmmModel {
    pub fn stationary(
        labels: Alphabet,
        observations: Alphabet,
        initial: Categorical,
        transition: StochasticMatrix,
        emission: StochasticMatrix,
    ) -> Result<Self> {
        let model = Self {
            labels,
            observations,
            initial,
            transitions: Schedule::Stationary(transition),
            emissions: Schedule::Stationary(emission),
        };
        model.validate()?;
        Ok(model)
    }

    /// `transitions.len()` must be `emissions.len() - 1`.
    pub fn per_position(
        labels: Alphabet,
        observations: Alphabet,
        initial: Categorical,
        transitions: Vec<StochasticMatrix>,
        emissions: Vec<StochasticMatrix>,
    ) -> Result<Self> {
        if emissions.is_empty() || transitions.len() + 1 != emissions.len() {
            return Err(Error::Dimension(format!(
                "{} transition matrices for {} emission matrices",
                transitions.len(),
                emissions.len()
            )));
        }
        let model = Self {
            labels,
            observations,
            initial,
            transitions: Schedule::PerPosition(transitions),
            emissions: Schedule::PerPosition(emissions),
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let l = self.labels.len();
        let o = self.observations.len();
        if l == 0 || o == 0 {
            return Err(Error::Dimension("alphabets must be nonempty".into()));
        }
        if self.initial.len() != l {
            return Err(Error::Dimension(format!(
                "initial law has {} entries for {l} labels",
                self.initial.len()
            )));
        }
        for t in self.transitions.iter() {
            if t.rows() != l || t.cols() != l {
                return Err(Error::Dimension(format!(
                    "transition matrix is {}x{}, expected {l}x{l}",
                    t.rows(),
                    t.cols()
                )));
            }
        }
        for e in self.emissions.iter() {
            if e.rows() != l || e.cols() != o {
                return Err(Error::Dimension(format!(
                    "emission matrix is {}x{}, expected {l}x{o}",
                    e.rows(),
                    e.cols()
                )));
            }
        }
        Ok(())
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

    /// Fixed length of a per-position model; `None` when stationary.
    pub fn length(&self) -> Option<usize> {
        match &self.emissions {
            Schedule::Stationary(_) => None,
            Schedule::PerPosition(v) => Some(v.len()),
        }
    }

    pub fn is_stationary(&self) -> bool {
        self.length().is_none()
    }

    pub fn initial(&self) -> &Categorical {
        &self.initial
    }

    /// p(xₙ₊₁ | xₙ) for the zero-based step `n`.
    pub fn transition_at(&self, n: usize) -> &StochasticMatrix {
        self.transitions.at(n)
    }

    /// p(yₙ | xₙ) at the zero-based position `n`.
    pub fn emission_at(&self, n: usize) -> &StochasticMatrix {
        self.emissions.at(n)
    }

    pub fn transitions(&self) -> &Schedule<StochasticMatrix> {
        &self.transitions
    }

    pub fn emissions(&self) -> &Schedule<StochasticMatrix> {
        &self.emissions
    }

    /// Checks that `y` is a nonempty in-range observation sequence this
    /// model can score.
    pub fn check_observations(&self, y: &[usize]) -> Result<()> {
        check_nonempty(y)?;
        if let Some(n) = self.length() {
            if y.len() != n {
                return Err(Error::Dimension(format!(
                    "sequence of length {} for a model of length {n}",
                    y.len()
                )));
            }
        }
        check_indices(y, self.num_observations(), "observation")
    }

    /// log p(x, y); negative infinity when some factor is zero.
    pub fn joint_log_prob(&self, x: &[usize], y: &[usize]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} observations",
                x.len(),
                y.len()
            )));
        }
        self.check_observations(y)?;
        check_indices(x, self.num_labels(), "label")?;
        let mut score = self.initial.log_prob(x[0]) + self.emission_at(0).log_prob(x[0], y[0]);
        for n in 1..x.len() {
            score += self.transition_at(n - 1).log_prob(x[n - 1], x[n])
                + self.emission_at(n).log_prob(x[n], y[n]);
        }
        Ok(score)
    }
}

/// log p(x, y) under `model`.
pub fn hmm_joint_log_prob(model: &HmmModel, x: &[usize], y: &[usize]) -> Result<f64> {
    model.joint_log_prob(x, y)
}
