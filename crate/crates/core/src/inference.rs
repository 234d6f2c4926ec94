//! Generative forward-backward (MPM) and Viterbi (MAP) decoding for HMMs.

use crate::distribution::Categorical;
use crate::error::Result;
use crate::hmm::HmmModel;
use crate::trellis::{backtrack, marginals, modes, LocalChain, TrellisTable};

fn chain<'a>(model: &'a HmmModel, y: &[usize]) -> Result<LocalChain<'a>> {
    model.check_observations(y)?;
    let l = model.num_labels();
    let e0 = model.emission_at(0);
    let first = (0..l)
        .map(|x| model.initial().log_prob(x) + e0.log_prob(x, y[0]))
        .collect();
    let transitions = (0..y.len() - 1).map(|n| model.transition_at(n)).collect();
    let local = (1..y.len())
        .map(|n| {
            let e = model.emission_at(n);
            (0..l).map(|x| e.log_prob(x, y[n])).collect()
        })
        .collect();
    Ok(LocalChain {
        first,
        transitions,
        local,
    })
}

/// log αₙ(x) = log p(xₙ = x, y₁:ₙ).
pub fn forward(model: &HmmModel, y: &[usize]) -> Result<TrellisTable> {
    Ok(chain(model, y)?.forward())
}

/// log βₙ(x) = log p(yₙ₊₁:N | xₙ = x).
pub fn backward(model: &HmmModel, y: &[usize]) -> Result<TrellisTable> {
    Ok(chain(model, y)?.backward())
}

/// p(xₙ | y) at every position.
pub fn posterior_marginals(model: &HmmModel, y: &[usize]) -> Result<Vec<Categorical>> {
    let c = chain(model, y)?;
    marginals(&c.forward(), &c.backward())
}

/// Maximum of posterior marginals, smallest label index on ties.
pub fn mpm_decode(model: &HmmModel, y: &[usize]) -> Result<Vec<usize>> {
    Ok(modes(&posterior_marginals(model, y)?))
}

/// Viterbi path and its log p(x, y).
pub fn map_decode(model: &HmmModel, y: &[usize]) -> Result<(Vec<usize>, f64)> {
    backtrack(&chain(model, y)?.viterbi())
}

/// log p(y), from the final forward column.
pub fn log_evidence(model: &HmmModel, y: &[usize]) -> Result<f64> {
    let alpha = forward(model, y)?;
    Ok(crate::logspace::log_sum_exp(alpha.at(alpha.len() - 1)))
}
