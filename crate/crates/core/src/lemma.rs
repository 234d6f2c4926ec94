//! Markov chains induced by a chain of positive pairwise potentials.
//!
//! If p(w₁, …, w_N) ∝ φ₁(w₁, w₂) ⋯ φ_{N−1}(w_{N−1}, w_N) with every φₙ > 0,
//! then W is a Markov chain with
//!
//! ```text
//! β_N(w) = 1,   βₙ(w) = Σ_{w'} φₙ(w, w') βₙ₊₁(w')
//! p(w₁) = β₁(w₁) / Σ β₁,   p(wₙ₊₁ | wₙ) = φₙ(wₙ, wₙ₊₁) βₙ₊₁(wₙ₊₁) / βₙ(wₙ)
//! ```
//!
//! Potentials are held as logarithms and every quantity is computed in log
//! space.

use crate::alphabet::Alphabet;
use crate::distribution::{exp_row_checked, Categorical, Matrix, StochasticMatrix};
use crate::error::{Error, Result};
use crate::logspace::log_sum_exp_iter;

/// Strictly positive pairwise potentials over a state alphabet Δ, stored
/// as finite log-potentials. A chain of length N holds N − 1 matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialChain {
    states: Alphabet,
    log_potentials: Vec<Matrix>,
}

impl PotentialChain {
    pub fn new(states: Alphabet, log_potentials: Vec<Matrix>) -> Result<Self> {
        let d = states.len();
        if d == 0 {
            return Err(Error::Dimension("state alphabet must be nonempty".into()));
        }
        for (n, m) in log_potentials.iter().enumerate() {
            if m.shape() != (d, d) {
                return Err(Error::Dimension(format!(
                    "potential {n} is {:?}, expected ({d}, {d})",
                    m.shape()
                )));
            }
            if !m.all_finite() {
                return Err(Error::InvalidPotential(format!(
                    "potential {n} has a zero or non-finite entry"
                )));
            }
        }
        Ok(Self {
            states,
            log_potentials,
        })
    }

    /// Converts linear potentials; every entry must be strictly positive.
    pub fn from_linear(states: Alphabet, potentials: Vec<Matrix>) -> Result<Self> {
        let logs = potentials.iter().map(|m| m.map(f64::ln)).collect();
        Self::new(states, logs)
    }

    pub fn states(&self) -> &Alphabet {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Chain length N (one more than the number of potentials).
    pub fn length(&self) -> usize {
        self.log_potentials.len() + 1
    }

    pub fn log_potential(&self, n: usize) -> &Matrix {
        &self.log_potentials[n]
    }

    pub fn log_potentials(&self) -> &[Matrix] {
        &self.log_potentials
    }
}

/// Initial law and per-step transition kernels of a Markov chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    pub initial: Categorical,
    pub transitions: Vec<StochasticMatrix>,
}

impl MarkovChain {
    /// log p(w) of a full path.
    pub fn log_prob(&self, path: &[usize]) -> f64 {
        let mut lp = self.initial.log_prob(path[0]);
        for (n, w) in path.windows(2).enumerate() {
            lp += self.transitions[n].log_prob(w[0], w[1]);
        }
        lp
    }
}

/// log βₙ for every position n, `result[N - 1]` being all zeros.
pub fn lemma_backward(chain: &PotentialChain) -> Vec<Vec<f64>> {
    let d = chain.num_states();
    let len = chain.length();
    let mut beta = vec![vec![0.0; d]; len];
    for n in (0..len - 1).rev() {
        let phi = &chain.log_potentials[n];
        let (head, tail) = beta.split_at_mut(n + 1);
        let next = &tail[0];
        for (w, b) in head[n].iter_mut().enumerate() {
            *b = log_sum_exp_iter((0..d).map(|v| phi.get(w, v) + next[v]));
        }
    }
    beta
}

/// The Markov chain whose law is proportional to the potential product.
pub fn markov_from_potentials(chain: &PotentialChain) -> Result<MarkovChain> {
    let d = chain.num_states();
    let beta = lemma_backward(chain);
    let initial = Categorical::new(exp_row_checked(&normalize_logs(&beta[0]))?)?;
    let mut transitions = Vec::with_capacity(chain.length() - 1);
    for (n, phi) in chain.log_potentials.iter().enumerate() {
        let mut rows = Vec::with_capacity(d);
        for w in 0..d {
            let log_row: Vec<f64> = (0..d)
                .map(|v| phi.get(w, v) + beta[n + 1][v] - beta[n][w])
                .collect();
            rows.push(exp_row_checked(&log_row)?);
        }
        transitions.push(StochasticMatrix::from_rows(&rows)?);
    }
    Ok(MarkovChain {
        initial,
        transitions,
    })
}

fn normalize_logs(xs: &[f64]) -> Vec<f64> {
    let total = log_sum_exp_iter(xs.iter().copied());
    xs.iter().map(|x| x - total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(d: usize, mats: Vec<Vec<Vec<f64>>>) -> PotentialChain {
        let mats = mats
            .iter()
            .map(|m| Matrix::from_rows(m).unwrap())
            .collect();
        PotentialChain::from_linear(Alphabet::numbered("w", d), mats).unwrap()
    }

    #[test]
    fn constant_potentials() {
        let c = chain(3, vec![vec![vec![1.0; 3]; 3]]);
        let beta = lemma_backward(&c);
        for w in 0..3 {
            assert!((beta[0][w] - 3f64.ln()).abs() < 1e-15);
            assert_eq!(beta[1][w], 0.0);
        }
        let m = markov_from_potentials(&c).unwrap();
        for p in m.initial.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        for w in 0..3 {
            for v in 0..3 {
                assert!((m.transitions[0].prob(w, v) - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn diagonal_two() {
        let c = chain(2, vec![vec![vec![2.0, 1.0], vec![1.0, 2.0]]]);
        let beta = lemma_backward(&c);
        assert!((beta[0][0].exp() - 3.0).abs() < 1e-14);
        assert!((beta[0][1].exp() - 3.0).abs() < 1e-14);
        let m = markov_from_potentials(&c).unwrap();
        assert!((m.transitions[0].prob(0, 0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn singleton_state() {
        let c = chain(1, vec![vec![vec![5.0]], vec![vec![0.1]]]);
        let m = markov_from_potentials(&c).unwrap();
        assert_eq!(m.initial.probs(), &[1.0]);
        for t in &m.transitions {
            assert_eq!(t.prob(0, 0), 1.0);
        }
    }

    #[test]
    fn single_position_chain_is_uniform() {
        let c = PotentialChain::new(Alphabet::numbered("w", 4), vec![]).unwrap();
        assert_eq!(c.length(), 1);
        let m = markov_from_potentials(&c).unwrap();
        assert!(m.transitions.is_empty());
        assert!((m.initial.prob(2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_potential_rejected() {
        let r = PotentialChain::from_linear(
            Alphabet::numbered("w", 2),
            vec![Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap()],
        );
        assert!(matches!(r, Err(Error::InvalidPotential(_))));
    }
}
