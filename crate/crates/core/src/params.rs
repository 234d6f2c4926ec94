//! Parameters consumed by the discriminative decoders.

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::distribution::{Categorical, Schedule, StochasticMatrix, DERIVED_TOLERANCE};
use crate::error::{Error, Result};
use crate::sequence::{check_indices, check_nonempty};

/// Whether the prior marginals are the propagation of the initial law
/// through the transitions, or were estimated independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Consistency {
    ChainConsistent,
    Raw,
}

/// p(xₙ), p(xₙ₊₁|xₙ) and p(xₙ|yₙ): everything the discriminative
/// forward-backward and Viterbi recursions read. No emission law p(yₙ|xₙ)
/// is stored.
///
/// `label_given_obs` matrices are |Ω|×|Λ|: row `y` is the law of the label
/// given observation `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminativeParams {
    labels: Alphabet,
    observations: Alphabet,
    prior_marginals: Schedule<Categorical>,
    transitions: Schedule<StochasticMatrix>,
    label_given_obs: Schedule<StochasticMatrix>,
    consistency: Consistency,
}

impl DiscriminativeParams {
    pub fn stationary(
        labels: Alphabet,
        observations: Alphabet,
        prior: Categorical,
        transition: StochasticMatrix,
        label_given_obs: StochasticMatrix,
        consistency: Consistency,
    ) -> Result<Self> {
        let p = Self {
            labels,
            observations,
            prior_marginals: Schedule::Stationary(prior),
            transitions: Schedule::Stationary(transition),
            label_given_obs: Schedule::Stationary(label_given_obs),
            consistency,
        };
        p.validate()?;
        Ok(p)
    }

    /// One prior and one label-given-observation law per position, one
    /// transition per step.
    pub fn per_position(
        labels: Alphabet,
        observations: Alphabet,
        priors: Vec<Categorical>,
        transitions: Vec<StochasticMatrix>,
        label_given_obs: Vec<StochasticMatrix>,
        consistency: Consistency,
    ) -> Result<Self> {
        let n = priors.len();
        if n == 0 || label_given_obs.len() != n || transitions.len() + 1 != n {
            return Err(Error::Dimension(format!(
                "{} priors, {} transitions, {} label-given-observation matrices",
                n,
                transitions.len(),
                label_given_obs.len()
            )));
        }
        let p = Self {
            labels,
            observations,
            prior_marginals: Schedule::PerPosition(priors),
            transitions: Schedule::PerPosition(transitions),
            label_given_obs: Schedule::PerPosition(label_given_obs),
            consistency,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let l = self.labels.len();
        let o = self.observations.len();
        if l == 0 || o == 0 {
            return Err(Error::Dimension("alphabets must be nonempty".into()));
        }
        if self.prior_marginals.iter().any(|p| p.len() != l) {
            return Err(Error::Dimension(format!("prior marginal not over {l} labels")));
        }
        if self.transitions.iter().any(|t| t.rows() != l || t.cols() != l) {
            return Err(Error::Dimension(format!("transition matrix not {l}x{l}")));
        }
        if self
            .label_given_obs
            .iter()
            .any(|m| m.rows() != o || m.cols() != l)
        {
            return Err(Error::Dimension(format!(
                "label-given-observation matrix not {o}x{l}"
            )));
        }
        if self.consistency == Consistency::ChainConsistent {
            self.check_chain_consistency()?;
        }
        Ok(())
    }

    /// p(xₙ₊₁) = Σ p(xₙ₊₁|xₙ) p(xₙ) for every step within 1e-10.
    fn check_chain_consistency(&self) -> Result<()> {
        let steps = match &self.prior_marginals {
            Schedule::Stationary(_) => 1,
            Schedule::PerPosition(v) => v.len() - 1,
        };
        let l = self.labels.len();
        for n in 0..steps {
            let prev = self.prior_marginals.at(n);
            let next = match &self.prior_marginals {
                Schedule::Stationary(p) => p,
                Schedule::PerPosition(v) => &v[n + 1],
            };
            let t = self.transitions.at(n);
            for j in 0..l {
                let propagated: f64 = (0..l).map(|i| prev.prob(i) * t.prob(i, j)).sum();
                if (propagated - next.prob(j)).abs() > DERIVED_TOLERANCE {
                    return Err(Error::InvalidDistribution(format!(
                        "prior marginal at position {} is not the propagation of position {n} \
                         (label {j}: {} vs {propagated})",
                        n + 1,
                        next.prob(j)
                    )));
                }
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

    pub fn consistency(&self) -> Consistency {
        self.consistency
    }

    pub fn length(&self) -> Option<usize> {
        match &self.prior_marginals {
            Schedule::Stationary(_) => None,
            Schedule::PerPosition(v) => Some(v.len()),
        }
    }

    pub fn is_stationary(&self) -> bool {
        self.length().is_none()
    }

    /// p(xₙ) at the zero-based position `n`.
    pub fn prior_at(&self, n: usize) -> &Categorical {
        self.prior_marginals.at(n)
    }

    pub fn transition_at(&self, n: usize) -> &StochasticMatrix {
        self.transitions.at(n)
    }

    /// |Ω|×|Λ| matrix of p(xₙ | yₙ) at position `n`.
    pub fn label_given_obs_at(&self, n: usize) -> &StochasticMatrix {
        self.label_given_obs.at(n)
    }

    pub fn prior_marginals(&self) -> &Schedule<Categorical> {
        &self.prior_marginals
    }

    pub fn transitions(&self) -> &Schedule<StochasticMatrix> {
        &self.transitions
    }

    pub fn label_given_obs(&self) -> &Schedule<StochasticMatrix> {
        &self.label_given_obs
    }

    pub fn check_observations(&self, y: &[usize]) -> Result<()> {
        check_nonempty(y)?;
        if let Some(n) = self.length() {
            if y.len() != n {
                return Err(Error::Dimension(format!(
                    "sequence of length {} for parameters of length {n}",
                    y.len()
                )));
            }
        }
        check_indices(y, self.num_observations(), "observation")
    }

    /// The recursions divide by p(xₙ) at positions 1..len (zero-based); each
    /// of those priors must be strictly positive.
    pub fn check_priors(&self, len: usize) -> Result<()> {
        for n in 1..len {
            if let Some(label) = self.prior_at(n).probs().iter().position(|&p| p <= 0.0) {
                return Err(Error::DegeneratePrior { position: n, label });
            }
            if self.is_stationary() {
                break;
            }
        }
        Ok(())
    }
}
