//! Construction of the hidden Markov model whose posterior is a given
//! linear-chain CRF.
//!
//! The pair chain Zₙ = (Xₙ, Yₙ) with potentials
//! φ₁ = exp[V₁ + U₁ + U₂] and φₙ = exp[Vₙ + Uₙ₊₁] is Markov, and its
//! transition factorizes into a label transition times an emission:
//!
//! ```text
//! γ_N = 1
//! γₙ(x, y)  = Σ_{x', y'} exp[Vₙ(x, x') + Uₙ₊₁(x', y')] γₙ₊₁(x', y')        n = N−1..2
//! γ₁(x, y)  = Σ_{x', y'} exp[V₁(x, x') + U₁(x, y) + U₂(x', y')] γ₂(x', y')
//! ψₙ₊₁(x')  = Σ_{y'} exp[Uₙ₊₁(x', y')] γₙ₊₁(x', y')
//!
//! q(x₁)        = Σ_y γ₁(x₁, y) / Σ_{x, y} γ₁(x, y)
//! q(y₁ | x₁)   = γ₁(x₁, y₁) / Σ_y γ₁(x₁, y)
//! q(x' | x)    ∝ ψₙ₊₁(x') exp[Vₙ(x, x')]
//! q(y' | x')   = exp[Uₙ₊₁(x', y')] γₙ₊₁(x', y') / ψₙ₊₁(x')
//! ```
//!
//! A single-position CRF has no predecessor to absorb U₁, so there
//! γ₁ = exp U₁.

use crate::crf::LcCrfModel;
use crate::distribution::{exp_row_checked, Categorical, Matrix, StochasticMatrix};
use crate::error::{Error, Result};
use crate::hmm::HmmModel;
use crate::logspace::{log_sum_exp, log_sum_exp_iter};

/// log γₙ(xₙ, yₙ) as one |Λ|×|Ω| matrix per position.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaTable {
    log_gamma: Vec<Matrix>,
}

impl GammaTable {
    pub fn at(&self, n: usize) -> &Matrix {
        &self.log_gamma[n]
    }

    pub fn len(&self) -> usize {
        self.log_gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_gamma.is_empty()
    }
}

/// Runs the γ backward recursion in log space.
pub fn gamma_backward(crf: &LcCrfModel) -> GammaTable {
    let l = crf.num_labels();
    let o = crf.num_observations();
    let len = crf.length();
    let mut log_gamma = vec![Matrix::filled(l, o, 0.0); len];
    if len == 1 {
        log_gamma[0] = crf.unary(0).clone();
        return GammaTable { log_gamma };
    }
    for n in (0..len - 1).rev() {
        let v = crf.pairwise(n);
        let u_next = crf.unary(n + 1);
        let g_next = &log_gamma[n + 1];
        // Σ over (x', y') does not depend on yₙ, so compute it once per x.
        let suffix: Vec<f64> = (0..l)
            .map(|x| {
                log_sum_exp_iter((0..l).flat_map(|xn| {
                    (0..o).map(move |yn| v.get(x, xn) + u_next.get(xn, yn) + g_next.get(xn, yn))
                }))
            })
            .collect();
        let unary_here = (n == 0).then(|| crf.unary(0));
        log_gamma[n] = Matrix::from_fn(l, o, |x, y| {
            suffix[x] + unary_here.map_or(0.0, |u| u.get(x, y))
        });
    }
    GammaTable { log_gamma }
}

/// log ψ(xₙ₊₁) for the zero-based step `step` (target position `step + 1`).
pub fn psi(gamma: &GammaTable, crf: &LcCrfModel, step: usize) -> Result<Vec<f64>> {
    let target = step + 1;
    if target >= crf.length() || gamma.len() != crf.length() {
        return Err(Error::Index {
            what: "step",
            index: step,
            size: crf.length().saturating_sub(1),
        });
    }
    let u = crf.unary(target);
    let g = gamma.at(target);
    Ok((0..crf.num_labels())
        .map(|x| log_sum_exp_iter((0..crf.num_observations()).map(|y| u.get(x, y) + g.get(x, y))))
        .collect())
}

/// The per-position HMM whose posterior p(x | y) equals the CRF's for every y.
pub fn convert_crf_to_hmm(crf: &LcCrfModel) -> Result<HmmModel> {
    let l = crf.num_labels();
    let o = crf.num_observations();
    let gamma = gamma_backward(crf);

    let g1 = gamma.at(0);
    let row_totals: Vec<f64> = (0..l).map(|x| log_sum_exp(g1.row(x))).collect();
    let total = log_sum_exp(&row_totals);
    let initial = Categorical::new(exp_row_checked(
        &row_totals.iter().map(|r| r - total).collect::<Vec<_>>(),
    )?)?;
    let mut emissions = Vec::with_capacity(crf.length());
    emissions.push(stochastic_from_log(l, |x| {
        g1.row(x).iter().map(|g| g - row_totals[x]).collect()
    })?);

    let mut transitions = Vec::with_capacity(crf.length() - 1);
    for step in 0..crf.length() - 1 {
        let log_psi = psi(&gamma, crf, step)?;
        let v = crf.pairwise(step);
        transitions.push(stochastic_from_log(l, |x| {
            let weights: Vec<f64> = (0..l).map(|xn| log_psi[xn] + v.get(x, xn)).collect();
            let norm = log_sum_exp(&weights);
            weights.iter().map(|w| w - norm).collect()
        })?);
        let u = crf.unary(step + 1);
        let g = gamma.at(step + 1);
        emissions.push(stochastic_from_log(l, |x| {
            (0..o)
                .map(|y| u.get(x, y) + g.get(x, y) - log_psi[x])
                .collect()
        })?);
    }

    HmmModel::per_position(
        crf.labels().clone(),
        crf.observations().clone(),
        initial,
        transitions,
        emissions,
    )
}

fn stochastic_from_log(rows: usize, log_row: impl Fn(usize) -> Vec<f64>) -> Result<StochasticMatrix> {
    let rows: Vec<Vec<f64>> = (0..rows)
        .map(|i| exp_row_checked(&log_row(i)))
        .collect::<Result<_>>()?;
    StochasticMatrix::from_rows(&rows)
}

/// The CRF with Vₙ = log p(xₙ₊₁|xₙ), Uₙ = log p(yₙ|xₙ) and U₁ augmented by
/// log p(x₁); its posterior is the HMM's. `len` fixes the length of a
/// stationary model. Every HMM probability must be positive so the
/// potentials are finite.
pub fn hmm_to_crf(model: &HmmModel, len: usize) -> Result<LcCrfModel> {
    if let Some(n) = model.length() {
        if n != len {
            return Err(Error::Dimension(format!(
                "length {len} requested from a model of length {n}"
            )));
        }
    }
    if len == 0 {
        return Err(Error::Dimension("length must be positive".into()));
    }
    let pairwise = (0..len - 1)
        .map(|n| model.transition_at(n).log_probs().clone())
        .collect();
    let mut unary: Vec<Matrix> = (0..len)
        .map(|n| model.emission_at(n).log_probs().clone())
        .collect();
    let u1 = &unary[0];
    unary[0] = Matrix::from_fn(u1.rows(), u1.cols(), |x, y| {
        u1.get(x, y) + model.initial().log_prob(x)
    });
    LcCrfModel::new(
        model.labels().clone(),
        model.observations().clone(),
        pairwise,
        unary,
    )
}
