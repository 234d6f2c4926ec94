//! MPM and MAP decoding of an HMM from p(xₙ), p(xₙ₊₁|xₙ) and p(xₙ|yₙ) only.
//!
//! Writing p(yₙ|xₙ) = p(yₙ) p(xₙ|yₙ) / p(xₙ) in the joint law factors out
//! ∏ p(yₙ), which does not depend on x. The forward-backward and Viterbi
//! recursions therefore run unchanged with the local factor
//! p(xₙ|yₙ) / p(xₙ) in place of the emission and with α₁ = p(x₁|y₁). The
//! resulting α and β are not probabilities, but the normalized products
//! αₙβₙ are exactly p(xₙ | y), and the Viterbi argmax is the same path.

use crate::distribution::{Categorical, StochasticMatrix};
use crate::error::{Error, Result};
use crate::hmm::HmmModel;
use crate::params::{Consistency, DiscriminativeParams};
use crate::trellis::{backtrack, marginals, modes, LocalChain, TrellisTable};

/// Discriminative parameters of `model` over sequences of length `len`
/// (which must equal the model length for per-position models).
///
/// Priors are propagated through the transitions and p(x|y) is the Bayes
/// inversion of the emissions against that prior. Observations with zero
/// marginal probability at a position get the prior as their label law.
pub fn derive_disc_params(model: &HmmModel, len: usize) -> Result<DiscriminativeParams> {
    if len == 0 {
        return Err(Error::Dimension("length must be positive".into()));
    }
    if let Some(n) = model.length() {
        if n != len {
            return Err(Error::Dimension(format!(
                "length {len} requested from a model of length {n}"
            )));
        }
    }
    let l = model.num_labels();
    let mut priors = Vec::with_capacity(len);
    priors.push(model.initial().clone());
    for n in 1..len {
        let prev = &priors[n - 1];
        let t = model.transition_at(n - 1);
        let mut next: Vec<f64> = (0..l)
            .map(|x| (0..l).map(|p| prev.prob(p) * t.prob(p, x)).sum())
            .collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        if let Some(label) = next.iter().position(|&v| v <= 0.0) {
            return Err(Error::DegeneratePrior { position: n, label });
        }
        priors.push(Categorical::new(next)?);
    }

    let label_given_obs = (0..len)
        .map(|n| invert_emission(model.emission_at(n), &priors[n]))
        .collect::<Result<Vec<_>>>()?;

    let transitions = (0..len - 1).map(|n| model.transition_at(n).clone()).collect();
    DiscriminativeParams::per_position(
        model.labels().clone(),
        model.observations().clone(),
        priors,
        transitions,
        label_given_obs,
        Consistency::ChainConsistent,
    )
}

/// p(x|y) obtained by inverting `emission` against a single `prior`:
/// p(x|y) ∝ p(y|x) p(x). Rows of unreachable observations take the prior.
pub fn invert_emission(emission: &StochasticMatrix, prior: &Categorical) -> Result<StochasticMatrix> {
    let rows: Vec<Vec<f64>> = (0..emission.cols())
        .map(|y| {
            let w: Vec<f64> = (0..emission.rows())
                .map(|x| emission.log_prob(x, y) + prior.log_prob(x))
                .collect();
            Categorical::from_log_weights(&w)
                .unwrap_or_else(|| prior.clone())
                .probs()
                .to_vec()
        })
        .collect();
    StochasticMatrix::from_rows(&rows)
}

fn chain<'a>(params: &'a DiscriminativeParams, y: &[usize], log_scale: f64) -> Result<LocalChain<'a>> {
    params.check_observations(y)?;
    params.check_priors(y.len())?;
    let l = params.num_labels();
    let g0 = params.label_given_obs_at(0);
    let first = (0..l).map(|x| g0.log_prob(y[0], x) + log_scale).collect();
    let transitions = (0..y.len() - 1).map(|n| params.transition_at(n)).collect();
    let local = (1..y.len())
        .map(|n| {
            let g = params.label_given_obs_at(n);
            let prior = params.prior_at(n);
            (0..l)
                .map(|x| g.log_prob(y[n], x) - prior.log_prob(x) + log_scale)
                .collect()
        })
        .collect();
    Ok(LocalChain {
        first,
        transitions,
        local,
    })
}

fn log_scale(scale: f64) -> Result<f64> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Numeric(format!("scale {scale} must be positive and finite")));
    }
    Ok(scale.ln())
}

/// Log discriminative forward table: α₁ᴰ = p(x₁|y₁),
/// αₙ₊₁ᴰ(x') = Σₓ p(x'|x) p(x'|yₙ₊₁)/p(x') αₙᴰ(x).
pub fn disc_forward(params: &DiscriminativeParams, y: &[usize]) -> Result<TrellisTable> {
    Ok(chain(params, y, 0.0)?.forward())
}

/// Log discriminative backward table: β_Nᴰ = 1,
/// βₙᴰ(x) = Σ_{x'} p(x'|x) p(x'|yₙ₊₁)/p(x') βₙ₊₁ᴰ(x').
pub fn disc_backward(params: &DiscriminativeParams, y: &[usize]) -> Result<TrellisTable> {
    Ok(chain(params, y, 0.0)?.backward())
}

pub fn disc_posterior_marginals(params: &DiscriminativeParams, y: &[usize]) -> Result<Vec<Categorical>> {
    disc_posterior_marginals_scaled(params, y, 1.0)
}

/// Marginals with every local factor multiplied by `scale`; the result does
/// not depend on it.
pub fn disc_posterior_marginals_scaled(
    params: &DiscriminativeParams,
    y: &[usize],
    scale: f64,
) -> Result<Vec<Categorical>> {
    let c = chain(params, y, log_scale(scale)?)?;
    marginals(&c.forward(), &c.backward())
}

pub fn disc_mpm_decode(params: &DiscriminativeParams, y: &[usize]) -> Result<Vec<usize>> {
    Ok(modes(&disc_posterior_marginals(params, y)?))
}

/// Discriminative Viterbi path and its log score. The score is not a
/// probability: it differs from log p(x, y) by Σ log p(yₙ).
pub fn disc_viterbi(params: &DiscriminativeParams, y: &[usize]) -> Result<(Vec<usize>, f64)> {
    disc_viterbi_scaled(params, y, 1.0)
}

pub fn disc_viterbi_scaled(
    params: &DiscriminativeParams,
    y: &[usize],
    scale: f64,
) -> Result<(Vec<usize>, f64)> {
    backtrack(&chain(params, y, log_scale(scale)?)?.viterbi())
}
