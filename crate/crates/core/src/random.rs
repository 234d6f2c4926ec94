//! Seeded random models for property suites and `chainlab verify`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::crf::LcCrfModel;
use crate::distribution::{Categorical, Matrix, StochasticMatrix};
use crate::hmm::HmmModel;
use crate::lemma::PotentialChain;

pub type SuiteRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly positive law: raw weights drawn from `[0.05, 1)` then normalized.
pub fn categorical<R: Rng>(rng: &mut R, size: usize) -> Categorical {
    let w: Vec<f64> = (0..size).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    Categorical::new(w.into_iter().map(|v| v / total).collect()).expect("normalized weights")
}

pub fn stochastic<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> StochasticMatrix {
    let rows: Vec<Categorical> = (0..rows).map(|_| categorical(rng, cols)).collect();
    StochasticMatrix::from_categoricals(&rows).expect("rows are categorical")
}

/// Strictly positive HMM; `length = None` gives a stationary model.
pub fn hmm<R: Rng>(rng: &mut R, labels: usize, observations: usize, length: Option<usize>) -> HmmModel {
    let l = Alphabet::numbered("L", labels);
    let o = Alphabet::numbered("o", observations);
    let initial = categorical(rng, labels);
    match length {
        None => {
            let t = stochastic(rng, labels, labels);
            let e = stochastic(rng, labels, observations);
            HmmModel::stationary(l, o, initial, t, e).expect("consistent shapes")
        }
        Some(n) => {
            let t = (0..n - 1).map(|_| stochastic(rng, labels, labels)).collect();
            let e = (0..n).map(|_| stochastic(rng, labels, observations)).collect();
            HmmModel::per_position(l, o, initial, t, e).expect("consistent shapes")
        }
    }
}

fn uniform_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-bound..=bound))
}

/// CRF with potentials i.i.d. uniform on `[-bound, bound]`.
pub fn crf<R: Rng>(rng: &mut R, labels: usize, observations: usize, length: usize, bound: f64) -> LcCrfModel {
    let pairwise = (0..length - 1)
        .map(|_| uniform_matrix(rng, labels, labels, bound))
        .collect();
    let unary = (0..length)
        .map(|_| uniform_matrix(rng, labels, observations, bound))
        .collect();
    LcCrfModel::new(
        Alphabet::numbered("L", labels),
        Alphabet::numbered("o", observations),
        pairwise,
        unary,
    )
    .expect("consistent shapes")
}

/// Potential chain with log-potentials i.i.d. uniform on `[-bound, bound]`.
pub fn potential_chain<R: Rng>(rng: &mut R, states: usize, length: usize, bound: f64) -> PotentialChain {
    let logs = (0..length - 1)
        .map(|_| uniform_matrix(rng, states, states, bound))
        .collect();
    PotentialChain::new(Alphabet::numbered("w", states), logs).expect("finite potentials")
}

/// Uniformly drawn observation sequence.
pub fn observations<R: Rng>(rng: &mut R, size: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| rng.gen_range(0..size)).collect()
}
