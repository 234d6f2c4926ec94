//! Certification of the fast paths against the enumeration oracle.
//!
//! Each check tracks the largest deviation seen over its cases and passes
//! when that stays under the check's tolerance. NaN deviations always fail.

use rand::Rng;
use serde::Serialize;

use crate::crf::LcCrfModel;
use crate::discriminative::{
    derive_disc_params, disc_backward, disc_forward, disc_mpm_decode, disc_posterior_marginals,
    disc_posterior_marginals_scaled, disc_viterbi, disc_viterbi_scaled,
};
use crate::equivalence::convert_crf_to_hmm;
use crate::error::{Error, Result};
use crate::hmm::HmmModel;
use crate::inference::{backward, forward, map_decode, mpm_decode, posterior_marginals};
use crate::io::Model;
use crate::lemma::{markov_from_potentials, PotentialChain};
use crate::logspace::log_sum_exp_iter;
use crate::oracle;
use crate::params::DiscriminativeParams;
use crate::random;

pub const MARGINAL_TOLERANCE: f64 = 1e-10;
pub const CONSTANCY_TOLERANCE: f64 = 1e-9;
pub const EVIDENCE_TOLERANCE: f64 = 1e-10;
pub const SCORE_TOLERANCE: f64 = 1e-10;
pub const POSTERIOR_TOLERANCE: f64 = 1e-10;
pub const PROPORTIONALITY_TOLERANCE: f64 = 1e-10;

/// Observation sequences are enumerated exhaustively up to this many.
pub const EXHAUSTIVE_LIMIT: u128 = 4096;
/// Sample size when exhaustive enumeration is over the limit.
pub const SAMPLED_SEQUENCES: usize = 50;

/// Scales applied to the discriminative local factor in the invariance check.
pub const SCALES: [f64; 3] = [1e-6, 1.0, 1e6];

/// Relative score margin above which a MAP path counts as unique.
pub const UNIQUE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_owned(),
            cases: 0,
            max_deviation: 0.0,
            tolerance,
            passed: true,
        }
    }

    pub fn record(&mut self, deviation: f64) {
        self.cases += 1;
        if deviation.is_nan() {
            self.max_deviation = f64::INFINITY;
        } else {
            self.max_deviation = self.max_deviation.max(deviation);
        }
        self.passed = self.max_deviation < self.tolerance
            || (self.tolerance == 0.0 && self.max_deviation == 0.0);
    }

    fn merge(&mut self, other: &Check) {
        self.cases += other.cases;
        self.max_deviation = self.max_deviation.max(other.max_deviation);
        self.passed = self.passed && other.passed;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Accumulates checks by name, in first-seen order.
#[derive(Debug, Default)]
pub struct Checks {
    checks: Vec<Check>,
}

impl Checks {
    fn get(&mut self, name: &str, tolerance: f64) -> &mut Check {
        if let Some(i) = self.checks.iter().position(|c| c.name == name) {
            return &mut self.checks[i];
        }
        self.checks.push(Check::new(name, tolerance));
        self.checks.last_mut().expect("just pushed")
    }

    fn record(&mut self, name: &str, tolerance: f64, deviation: f64) {
        self.get(name, tolerance).record(deviation);
    }

    fn add(&mut self, check: Check) {
        match self.checks.iter_mut().find(|c| c.name == check.name) {
            Some(c) => c.merge(&check),
            None => self.checks.push(check),
        }
    }

    pub fn into_report(self, seed: u64) -> Report {
        let passed = self.checks.iter().all(|c| c.passed);
        Report {
            seed,
            checks: self.checks,
            passed,
        }
    }
}

/// Every observation sequence of length `len` when there are at most
/// [`EXHAUSTIVE_LIMIT`], otherwise [`SAMPLED_SEQUENCES`] uniform draws.
pub fn observation_cases<R: Rng>(rng: &mut R, num_obs: usize, len: usize) -> Vec<Vec<usize>> {
    if (num_obs as u128).saturating_pow(len as u32) <= EXHAUSTIVE_LIMIT {
        oracle::sequences(num_obs, len).collect()
    } else {
        (0..SAMPLED_SEQUENCES)
            .map(|_| random::observations(rng, num_obs, len))
            .collect()
    }
}

fn max_abs_diff(a: &[crate::Categorical], b: &[crate::Categorical]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(p, q)| p.probs().iter().zip(q.probs()).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

fn max_abs_diff_rows(a: &[crate::Categorical], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(p, q)| p.probs().iter().zip(q).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// Relative spread of Σₓ exp(αₙ + βₙ) over positions n.
fn column_constancy(alpha: &crate::TrellisTable, beta: &crate::TrellisTable) -> (f64, f64) {
    let sums: Vec<f64> = alpha
        .columns()
        .iter()
        .zip(beta.columns())
        .map(|(a, b)| log_sum_exp_iter(a.iter().zip(b).map(|(x, y)| x + y)))
        .collect();
    let reference = sums[0];
    let spread = sums
        .iter()
        .map(|s| (s - reference).exp_m1().abs())
        .fold(0.0, f64::max);
    (reference, spread)
}

/// Generative vs discriminative vs oracle on one HMM and sequence length.
pub fn check_hmm_sequence(model: &HmmModel, y: &[usize], cap: u128, checks: &mut Checks) -> Result<()> {
    let len = y.len();
    let params = derive_disc_params(model, len)?;
    let evidence = oracle::hmm_evidence(model, y, cap)?;

    let alpha = forward(model, y)?;
    let beta = backward(model, y)?;
    let (log_evidence, spread) = column_constancy(&alpha, &beta);
    checks.record("forward-backward-constancy", CONSTANCY_TOLERANCE, spread);
    checks.record(
        "forward-backward-evidence",
        EVIDENCE_TOLERANCE,
        (log_evidence.exp() - evidence).abs() / evidence,
    );

    let gen = posterior_marginals(model, y)?;
    let disc = disc_posterior_marginals(&params, y)?;
    let truth = oracle::hmm_marginals(model, y, cap)?;
    checks.record("marginals-vs-oracle", MARGINAL_TOLERANCE, max_abs_diff_rows(&gen, &truth));
    checks.record("discriminative-marginals", MARGINAL_TOLERANCE, max_abs_diff(&disc, &gen));

    let (_, dspread) = column_constancy(&disc_forward(&params, y)?, &disc_backward(&params, y)?);
    checks.record("discriminative-constancy", CONSTANCY_TOLERANCE, dspread);

    let gen_mpm = mpm_decode(model, y)?;
    let disc_mpm = disc_mpm_decode(&params, y)?;
    checks.record("mpm-identity", 0.0, (gen_mpm != disc_mpm) as u8 as f64);

    let (gen_path, gen_score) = map_decode(model, y)?;
    let (disc_path, _) = disc_viterbi(&params, y)?;
    let best = oracle::hmm_map(model, y, cap)?;
    checks.record(
        "map-vs-oracle",
        SCORE_TOLERANCE,
        (gen_score - best.best.ln()).abs().max(
            (model.joint_log_prob(&gen_path, y)? - gen_score).abs(),
        ),
    );
    checks.record(
        "discriminative-viterbi-score",
        SCORE_TOLERANCE,
        (model.joint_log_prob(&disc_path, y)? - gen_score).abs(),
    );
    if best.is_unique_by(UNIQUE_MARGIN) {
        checks.record("discriminative-viterbi-path", 0.0, (gen_path != disc_path) as u8 as f64);
    }

    check_scale_invariance(&params, y, &best, checks)
}

/// Whether every position has a mode ahead of the runner-up by more than
/// [`UNIQUE_MARGIN`].
fn modes_unique(marginals: &[crate::Categorical]) -> bool {
    marginals.iter().all(|m| {
        let mut p = m.probs().to_vec();
        p.sort_by(|a, b| b.total_cmp(a));
        p.len() < 2 || p[0] - p[1] > UNIQUE_MARGIN
    })
}

/// Marginals and decoded sequences under every scale in [`SCALES`]. Decoded
/// sequences are only compared when the decoder's maximizer is unique by
/// [`UNIQUE_MARGIN`]; `map` is the oracle maximizer of the path weights.
pub fn check_scale_invariance(
    params: &DiscriminativeParams,
    y: &[usize],
    map: &oracle::OracleMap,
    checks: &mut Checks,
) -> Result<()> {
    let base = disc_posterior_marginals(params, y)?;
    let base_mpm: Vec<usize> = base.iter().map(crate::Categorical::mode).collect();
    let mpm_unique = modes_unique(&base);
    let (base_path, _) = disc_viterbi(params, y)?;
    let map_unique = map.is_unique_by(UNIQUE_MARGIN);
    for &c in &SCALES {
        let scaled = disc_posterior_marginals_scaled(params, y, c)?;
        checks.record("scale-invariance-marginals", MARGINAL_TOLERANCE, max_abs_diff(&scaled, &base));
        if mpm_unique {
            let mpm: Vec<usize> = scaled.iter().map(crate::Categorical::mode).collect();
            checks.record("scale-invariance-mpm", 0.0, (mpm != base_mpm) as u8 as f64);
        }
        if map_unique {
            let (path, _) = disc_viterbi_scaled(params, y, c)?;
            checks.record("scale-invariance-viterbi", 0.0, (path != base_path) as u8 as f64);
        }
    }
    Ok(())
}

/// CRF posterior against the posterior of its converted HMM, both by
/// enumeration, over every observation sequence.
pub fn check_crf(crf: &LcCrfModel, cap: u128, checks: &mut Checks) -> Result<()> {
    let hmm = convert_crf_to_hmm(crf)?;
    for y in oracle::sequences(crf.num_observations(), crf.length()) {
        let want = oracle::enumerate_crf_posterior(crf, &y, cap)?;
        let got = oracle::enumerate_hmm_posterior(&hmm, &y, cap)?;
        let dev = want
            .iter()
            .map(|(x, p)| (p - got.get(x).copied().unwrap_or(f64::NAN)).abs())
            .fold(0.0, f64::max);
        checks.record("crf-to-hmm-posterior", POSTERIOR_TOLERANCE, dev);
        let z = oracle::crf_partition(crf, &y, cap)?;
        checks.record(
            "crf-log-partition",
            POSTERIOR_TOLERANCE,
            (crf.log_partition(&y)? - z.ln()).abs(),
        );
    }
    Ok(())
}

/// Induced chain law vs the potential product on every path.
pub fn check_potential_chain(chain: &PotentialChain, cap: u128, checks: &mut Checks) -> Result<()> {
    let size = (chain.num_states() as u128).saturating_pow(chain.length() as u32);
    if size > cap {
        return Err(Error::TooLarge { size, cap });
    }
    let markov = markov_from_potentials(chain)?;
    let ratios: Vec<f64> = oracle::sequences(chain.num_states(), chain.length())
        .map(|w| markov.log_prob(&w) - oracle::potential_product(chain, &w).ln())
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / ratios.len() as f64;
    checks.record("lemma-proportionality", PROPORTIONALITY_TOLERANCE, var.sqrt());
    Ok(())
}

/// Checks that need no generative model: forward-backward constancy and
/// scale invariance of the discriminative recursions.
pub fn check_disc(params: &DiscriminativeParams, y: &[usize], cap: u128, checks: &mut Checks) -> Result<()> {
    let (_, spread) = column_constancy(&disc_forward(params, y)?, &disc_backward(params, y)?);
    checks.record("discriminative-constancy", CONSTANCY_TOLERANCE, spread);
    check_scale_invariance(params, y, &oracle::disc_map(params, y, cap)?, checks)
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub hmm_models: usize,
    pub crf_models: usize,
    pub chain_models: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub max_labels: usize,
    pub max_observations: usize,
    pub max_states: usize,
    pub potential_bound: f64,
    pub cap: u128,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            hmm_models: 200,
            crf_models: 100,
            chain_models: 100,
            min_len: 2,
            max_len: 5,
            max_labels: 3,
            max_observations: 3,
            max_states: 4,
            potential_bound: 2.0,
            cap: oracle::DEFAULT_CAP,
        }
    }
}

/// One randomly sized, strictly positive HMM per index; even indices are
/// per-position, odd ones stationary.
pub fn random_hmm_suite(config: &SuiteConfig) -> Vec<HmmModel> {
    let mut rng = random::seeded(config.seed);
    (0..config.hmm_models)
        .map(|i| {
            let len = rng.gen_range(config.min_len..=config.max_len);
            let l = rng.gen_range(1..=config.max_labels);
            let o = rng.gen_range(1..=config.max_observations);
            let fixed = (i % 2 == 0).then_some(len);
            let mut m = random::hmm(&mut rng, l, o, fixed);
            if fixed.is_none() {
                // remember the length through a per-position copy
                m = per_position_copy(&m, len);
            }
            m
        })
        .collect()
}

/// Per-position copy of a stationary model over `len` positions.
pub fn per_position_copy(model: &HmmModel, len: usize) -> HmmModel {
    HmmModel::per_position(
        model.labels().clone(),
        model.observations().clone(),
        model.initial().clone(),
        (0..len - 1).map(|n| model.transition_at(n).clone()).collect(),
        (0..len).map(|n| model.emission_at(n).clone()).collect(),
    )
    .expect("copy of a valid model")
}

pub fn random_crf_suite(config: &SuiteConfig) -> Vec<LcCrfModel> {
    let mut rng = random::seeded(config.seed.wrapping_add(1));
    (0..config.crf_models)
        .map(|_| {
            let len = rng.gen_range(config.min_len..=config.max_len);
            let l = rng.gen_range(1..=config.max_labels);
            let o = rng.gen_range(1..=config.max_observations);
            random::crf(&mut rng, l, o, len, config.potential_bound)
        })
        .collect()
}

pub fn random_chain_suite(config: &SuiteConfig) -> Vec<PotentialChain> {
    let mut rng = random::seeded(config.seed.wrapping_add(2));
    (0..config.chain_models)
        .map(|_| {
            let len = rng.gen_range(1..=config.max_len);
            let d = rng.gen_range(1..=config.max_states);
            random::potential_chain(&mut rng, d, len, config.potential_bound)
        })
        .collect()
}

/// Runs every check over seeded random suites.
pub fn run_random_suite(config: &SuiteConfig) -> Result<Report> {
    let mut checks = Checks::default();
    let mut rng = random::seeded(config.seed.wrapping_add(3));
    for model in random_hmm_suite(config) {
        let len = model.length().expect("suite models are per-position");
        for y in observation_cases(&mut rng, model.num_observations(), len) {
            check_hmm_sequence(&model, &y, config.cap, &mut checks)?;
        }
    }
    for crf in random_crf_suite(config) {
        check_crf(&crf, config.cap, &mut checks)?;
    }
    for chain in random_chain_suite(config) {
        check_potential_chain(&chain, config.cap, &mut checks)?;
    }
    Ok(checks.into_report(config.seed))
}

/// Checks a single model. Stationary models are checked at every length
/// from 1 to `max_len`.
pub fn verify_model(model: &Model, max_len: usize, seed: u64, cap: u128) -> Result<Report> {
    let longest = |len: Option<usize>| len.unwrap_or(max_len) as u32;
    let size = match model {
        Model::Hmm(m) => (m.num_labels() as u128).saturating_pow(longest(m.length())),
        Model::Disc(p) => (p.num_labels() as u128).saturating_pow(longest(p.length())),
        Model::Crf(c) => (c.num_labels() as u128).saturating_pow(c.length() as u32),
        Model::PotentialChain(c) => (c.num_states() as u128).saturating_pow(c.length() as u32),
    };
    if size > cap {
        return Err(Error::TooLarge { size, cap });
    }
    let mut checks = Checks::default();
    let mut rng = random::seeded(seed);
    match model {
        Model::Hmm(m) => {
            let lens: Vec<usize> = m.length().map_or_else(|| (1..=max_len).collect(), |n| vec![n]);
            for len in lens {
                for y in observation_cases(&mut rng, m.num_observations(), len) {
                    check_hmm_sequence(m, &y, cap, &mut checks)?;
                }
            }
        }
        Model::Crf(c) => check_crf(c, cap, &mut checks)?,
        Model::Disc(p) => {
            let lens: Vec<usize> = p.length().map_or_else(|| (1..=max_len).collect(), |n| vec![n]);
            for len in lens {
                for y in observation_cases(&mut rng, p.num_observations(), len) {
                    check_disc(p, &y, cap, &mut checks)?;
                }
            }
        }
        Model::PotentialChain(c) => check_potential_chain(c, cap, &mut checks)?,
    }
    Ok(checks.into_report(seed))
}

/// Merges several reports into one.
pub fn merge_reports(seed: u64, reports: impl IntoIterator<Item = Report>) -> Report {
    let mut checks = Checks::default();
    for r in reports {
        for c in r.checks {
            checks.add(c);
        }
    }
    checks.into_report(seed)
}
