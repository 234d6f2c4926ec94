//! Exhaustive-enumeration reference implementations.
//!
//! Everything here works in linear space with plain products and sums over
//! every configuration, and reads model parameters only through their
//! probability (or raw potential) accessors. None of the log-space
//! recursions are used. Instances are bounded by a configuration cap.

use std::collections::BTreeMap;

use crate::crf::LcCrfModel;
use crate::error::{Error, Result};
use crate::hmm::HmmModel;
use crate::lemma::PotentialChain;
use crate::params::DiscriminativeParams;

pub const DEFAULT_CAP: u128 = 1_000_000;

/// Relative tolerance under which two path probabilities count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Every sequence of length `len` over `0..size`, in lexicographic order.
pub fn sequences(size: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (size as u128).pow(len as u32);
    (0..total).map(move |mut k| {
        let mut s = vec![0; len];
        for slot in s.iter_mut().rev() {
            *slot = (k % size as u128) as usize;
            k /= size as u128;
        }
        s
    })
}

fn check_cap(size: u128, cap: u128) -> Result<()> {
    if size > cap {
        return Err(Error::TooLarge { size, cap });
    }
    Ok(())
}

fn count(base: usize, len: usize) -> u128 {
    (base as u128).saturating_pow(len as u32)
}

fn model_len(model: &HmmModel, len: usize) -> Result<()> {
    match model.length() {
        Some(n) if n != len => Err(Error::Dimension(format!(
            "length {len} requested from a model of length {n}"
        ))),
        _ if len == 0 => Err(Error::Dimension("length must be positive".into())),
        _ => Ok(()),
    }
}

/// p(x, y) as a direct product of probabilities.
pub fn joint_prob(model: &HmmModel, x: &[usize], y: &[usize]) -> f64 {
    let mut p = model.initial().prob(x[0]) * model.emission_at(0).prob(x[0], y[0]);
    for n in 1..x.len() {
        p *= model.transition_at(n - 1).prob(x[n - 1], x[n]) * model.emission_at(n).prob(x[n], y[n]);
    }
    p
}

/// p(x, y) for every pair of sequences of length `len`.
pub fn enumerate_joint(
    model: &HmmModel,
    len: usize,
    cap: u128,
) -> Result<BTreeMap<(Vec<usize>, Vec<usize>), f64>> {
    model_len(model, len)?;
    let l = model.num_labels();
    let o = model.num_observations();
    check_cap(count(l, len).saturating_mul(count(o, len)), cap)?;
    let mut out = BTreeMap::new();
    for y in sequences(o, len) {
        for x in sequences(l, len) {
            let p = joint_prob(model, &x, &y);
            out.insert((x, y.clone()), p);
        }
    }
    Ok(out)
}

/// p(y) by summing the joint over every label sequence.
pub fn hmm_evidence(model: &HmmModel, y: &[usize], cap: u128) -> Result<f64> {
    model.check_observations(y)?;
    let l = model.num_labels();
    check_cap(count(l, y.len()), cap)?;
    Ok(sequences(l, y.len()).map(|x| joint_prob(model, &x, y)).sum())
}

/// p(x | y) for every label sequence x.
pub fn enumerate_hmm_posterior(
    model: &HmmModel,
    y: &[usize],
    cap: u128,
) -> Result<BTreeMap<Vec<usize>, f64>> {
    model.check_observations(y)?;
    let l = model.num_labels();
    check_cap(count(l, y.len()), cap)?;
    let joint: BTreeMap<Vec<usize>, f64> = sequences(l, y.len())
        .map(|x| {
            let p = joint_prob(model, &x, y);
            (x, p)
        })
        .collect();
    normalize(joint)
}

/// Σₙ Vₙ(xₙ, xₙ₊₁) + Σₙ Uₙ(xₙ, yₙ), summed term by term.
pub fn crf_score(crf: &LcCrfModel, x: &[usize], y: &[usize]) -> f64 {
    let mut s = 0.0;
    for n in 0..x.len() {
        s += crf.unary(n).get(x[n], y[n]);
        if n + 1 < x.len() {
            s += crf.pairwise(n).get(x[n], x[n + 1]);
        }
    }
    s
}

/// κ(y) = Σₓ exp(score(x, y)).
pub fn crf_partition(crf: &LcCrfModel, y: &[usize], cap: u128) -> Result<f64> {
    crf.check_observations(y)?;
    let l = crf.num_labels();
    check_cap(count(l, y.len()), cap)?;
    Ok(sequences(l, y.len()).map(|x| crf_score(crf, &x, y).exp()).sum())
}

/// p(x | y) for every label sequence x.
pub fn enumerate_crf_posterior(
    crf: &LcCrfModel,
    y: &[usize],
    cap: u128,
) -> Result<BTreeMap<Vec<usize>, f64>> {
    crf.check_observations(y)?;
    let l = crf.num_labels();
    check_cap(count(l, y.len()), cap)?;
    let weights: BTreeMap<Vec<usize>, f64> = sequences(l, y.len())
        .map(|x| {
            let w = crf_score(crf, &x, y).exp();
            (x, w)
        })
        .collect();
    normalize(weights)
}

fn normalize(weights: BTreeMap<Vec<usize>, f64>) -> Result<BTreeMap<Vec<usize>, f64>> {
    let total: f64 = weights.values().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::ImpossibleEvidence { position: 0 });
    }
    Ok(weights.into_iter().map(|(x, w)| (x, w / total)).collect())
}

/// Per-position marginals of a posterior given as a map over full paths.
pub fn oracle_marginals(
    posterior: &BTreeMap<Vec<usize>, f64>,
    num_labels: usize,
) -> Vec<Vec<f64>> {
    let len = posterior.keys().next().map_or(0, Vec::len);
    let mut m = vec![vec![0.0; num_labels]; len];
    for (x, p) in posterior {
        for (n, &xn) in x.iter().enumerate() {
            m[n][xn] += p;
        }
    }
    m
}

/// Maximizers of a path weight map.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleMap {
    pub best: f64,
    /// Every path within [`TIE_TOLERANCE`] (relative) of `best`.
    pub paths: Vec<Vec<usize>>,
    /// Largest weight among the remaining paths; 0 when all paths tie.
    pub runner_up: f64,
}

impl OracleMap {
    pub fn is_unique(&self) -> bool {
        self.paths.len() == 1
    }

    /// Unique maximizer whose weight exceeds every other path by `margin`
    /// relative to the best.
    pub fn is_unique_by(&self, margin: f64) -> bool {
        self.is_unique() && self.best - self.runner_up > margin * self.best
    }
}

pub fn oracle_map(weights: &BTreeMap<Vec<usize>, f64>) -> OracleMap {
    let best = weights.values().copied().fold(0.0, f64::max);
    let threshold = best * (1.0 - TIE_TOLERANCE);
    let mut paths = Vec::new();
    let mut runner_up: f64 = 0.0;
    for (x, &w) in weights {
        if w >= threshold && best > 0.0 {
            paths.push(x.clone());
        } else {
            runner_up = runner_up.max(w);
        }
    }
    OracleMap {
        best,
        paths,
        runner_up,
    }
}

/// p(x₁:N | y) marginals under an HMM.
pub fn hmm_marginals(model: &HmmModel, y: &[usize], cap: u128) -> Result<Vec<Vec<f64>>> {
    Ok(oracle_marginals(
        &enumerate_hmm_posterior(model, y, cap)?,
        model.num_labels(),
    ))
}

/// MAP paths under an HMM; weights are joint probabilities p(x, y).
pub fn hmm_map(model: &HmmModel, y: &[usize], cap: u128) -> Result<OracleMap> {
    model.check_observations(y)?;
    let l = model.num_labels();
    check_cap(count(l, y.len()), cap)?;
    let joint: BTreeMap<Vec<usize>, f64> = sequences(l, y.len())
        .map(|x| {
            let p = joint_prob(model, &x, y);
            (x, p)
        })
        .collect();
    Ok(oracle_map(&joint))
}

/// Discriminative path weight p(x₁|y₁) ∏ₙ p(xₙ|xₙ₋₁) p(xₙ|yₙ) / p(xₙ),
/// proportional to p(x | y).
pub fn disc_path_weight(params: &DiscriminativeParams, x: &[usize], y: &[usize]) -> f64 {
    let mut w = params.label_given_obs_at(0).prob(y[0], x[0]);
    for n in 1..x.len() {
        w *= params.transition_at(n - 1).prob(x[n - 1], x[n]) * params.label_given_obs_at(n).prob(y[n], x[n])
            / params.prior_at(n).prob(x[n]);
    }
    w
}

/// MAP paths under discriminative parameters.
pub fn disc_map(params: &DiscriminativeParams, y: &[usize], cap: u128) -> Result<OracleMap> {
    params.check_observations(y)?;
    params.check_priors(y.len())?;
    let l = params.num_labels();
    check_cap(count(l, y.len()), cap)?;
    let weights: BTreeMap<Vec<usize>, f64> = sequences(l, y.len())
        .map(|x| {
            let w = disc_path_weight(params, &x, y);
            (x, w)
        })
        .collect();
    Ok(oracle_map(&weights))
}

/// ∏ φₙ(wₙ, wₙ₊₁) in linear space.
pub fn potential_product(chain: &PotentialChain, path: &[usize]) -> f64 {
    path.windows(2)
        .enumerate()
        .map(|(n, w)| chain.log_potential(n).get(w[0], w[1]).exp())
        .product()
}

/// βₙ(w) = Σ over every suffix (wₙ₊₁, …, w_N) of ∏_{m ≥ n} φₘ.
pub fn potential_suffix_sums(chain: &PotentialChain, cap: u128) -> Result<Vec<Vec<f64>>> {
    let d = chain.num_states();
    let len = chain.length();
    check_cap(count(d, len), cap)?;
    let mut out = vec![vec![0.0; d]; len];
    for (n, row) in out.iter_mut().enumerate() {
        for (w, slot) in row.iter_mut().enumerate() {
            *slot = sequences(d, len - n - 1)
                .map(|suffix| {
                    let mut path = vec![w];
                    path.extend(suffix);
                    path.windows(2)
                        .enumerate()
                        .map(|(k, p)| chain.log_potential(n + k).get(p[0], p[1]).exp())
                        .product::<f64>()
                })
                .sum();
        }
    }
    Ok(out)
}

/// Normalized potential product over every path of the chain.
pub fn enumerate_potential_law(
    chain: &PotentialChain,
    cap: u128,
) -> Result<BTreeMap<Vec<usize>, f64>> {
    let d = chain.num_states();
    check_cap(count(d, chain.length()), cap)?;
    let weights = sequences(d, chain.length())
        .map(|w| {
            let p = potential_product(chain, &w);
            (w, p)
        })
        .collect();
    normalize(weights)
}

/// γₙ(x, y) by brute-force summation over suffixes of the pair chain:
/// Σ over (xₙ₊₁, yₙ₊₁, …, x_N, y_N) of exp[Σ_{m ≥ n} Vₘ(xₘ, xₘ₊₁) + Uₘ₊₁(xₘ₊₁, yₘ₊₁)],
/// with U₁(x, y) added at the first position.
pub fn crf_gamma(crf: &LcCrfModel, cap: u128) -> Result<Vec<Vec<Vec<f64>>>> {
    let l = crf.num_labels();
    let o = crf.num_observations();
    let len = crf.length();
    check_cap(count(l * o, len), cap)?;
    let mut out = vec![vec![vec![0.0; o]; l]; len];
    for n in 0..len {
        let tail = len - n - 1;
        for x in 0..l {
            for y in 0..o {
                let mut total = 0.0;
                for xs in sequences(l, tail) {
                    for ys in sequences(o, tail) {
                        let mut s = 0.0;
                        let mut prev = x;
                        for k in 0..tail {
                            s += crf.pairwise(n + k).get(prev, xs[k]) + crf.unary(n + k + 1).get(xs[k], ys[k]);
                            prev = xs[k];
                        }
                        total += s.exp();
                    }
                }
                if n == 0 {
                    total *= crf.unary(0).get(x, y).exp();
                }
                out[n][x][y] = total;
            }
        }
    }
    Ok(out)
}
