//! Tagged-corpus I/O and supervised estimation by smoothed counting.
//!
//! Corpus files hold one `token<TAB>TAG` pair per line, a blank line between
//! sequences, and `#`-prefixed comment lines.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::alphabet::Alphabet;
use crate::distribution::{Categorical, StochasticMatrix};
use crate::error::{Error, Result};
use crate::hmm::HmmModel;
use crate::params::{Consistency, DiscriminativeParams};
use crate::sequence::{LabeledSequence, TaggedCorpus};

/// Observation symbol standing for every token unseen in training.
pub const UNKNOWN_TOKEN: &str = "<unk>";

pub const DEFAULT_SMOOTHING: f64 = 0.1;

/// Splits text into sequences of `(line number, fields)`; blank lines end a
/// sequence, comment lines are dropped.
fn blocks(text: &str) -> Vec<Vec<(usize, Vec<&str>)>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            continue;
        }
        current.push((i + 1, line.split('\t').collect()));
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Parses a tagged corpus. Alphabets are induced from the data and sorted
/// unless `alphabets` (labels, observations) is given, in which case every
/// symbol must already belong to them.
pub fn parse_corpus(text: &str, alphabets: Option<(&Alphabet, &Alphabet)>) -> Result<TaggedCorpus> {
    let mut pairs: Vec<Vec<(usize, &str, &str)>> = Vec::new();
    for block in blocks(text) {
        let mut seq = Vec::with_capacity(block.len());
        for (line, fields) in block {
            match fields.as_slice() {
                [token, tag] if !token.is_empty() && !tag.is_empty() => seq.push((line, *token, *tag)),
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: "expected `token<TAB>TAG`".into(),
                    })
                }
            }
        }
        pairs.push(seq);
    }

    let (labels, observations) = match alphabets {
        Some((l, o)) => (l.clone(), o.clone()),
        None => {
            let tags: BTreeSet<&str> = pairs.iter().flatten().map(|p| p.2).collect();
            let tokens: BTreeSet<&str> = pairs.iter().flatten().map(|p| p.1).collect();
            (Alphabet::new(tags)?, Alphabet::new(tokens)?)
        }
    };

    let lookup = |alphabet: &Alphabet, symbol: &str, line: usize| {
        alphabet.index_of(symbol).ok_or_else(|| Error::Vocabulary {
            line,
            symbol: symbol.to_owned(),
        })
    };
    let mut sequences = Vec::with_capacity(pairs.len());
    for seq in pairs {
        let mut obs = Vec::with_capacity(seq.len());
        let mut tags = Vec::with_capacity(seq.len());
        for (line, token, tag) in seq {
            obs.push(lookup(&observations, token, line)?);
            tags.push(lookup(&labels, tag, line)?);
        }
        sequences.push(LabeledSequence::new(obs, Some(tags))?);
    }
    TaggedCorpus::new(labels, observations, sequences)
}

pub fn load_corpus(path: &Path, alphabets: Option<(&Alphabet, &Alphabet)>) -> Result<TaggedCorpus> {
    parse_corpus(&std::fs::read_to_string(path)?, alphabets)
}

/// Serializes a labeled corpus in the TSV format.
pub fn format_corpus(corpus: &TaggedCorpus) -> Result<String> {
    let mut out = String::new();
    for (i, seq) in corpus.sequences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let labels = seq
            .labels
            .as_ref()
            .ok_or_else(|| Error::Estimation("cannot write an unlabeled sequence".into()))?;
        for (&y, &x) in seq.observations.iter().zip(labels) {
            let token = corpus.observations.symbol(y).expect("checked on construction");
            let tag = corpus.labels.symbol(x).expect("checked on construction");
            writeln!(out, "{token}\t{tag}").expect("writing to a String");
        }
    }
    Ok(out)
}

pub fn save_corpus(path: &Path, corpus: &TaggedCorpus) -> Result<()> {
    std::fs::write(path, format_corpus(corpus)?)?;
    Ok(())
}

/// Token sequences for tagging: one token per line (anything after a tab is
/// ignored), blank lines between sequences, `#` comments dropped.
pub fn parse_tokens(text: &str) -> Vec<Vec<String>> {
    blocks(text)
        .into_iter()
        .map(|b| b.into_iter().map(|(_, f)| f[0].to_owned()).collect())
        .collect()
}

/// Maps tokens to observation indices, sending unseen tokens to
/// [`UNKNOWN_TOKEN`] when the alphabet has it.
pub fn encode_tokens(observations: &Alphabet, tokens: &[String]) -> Result<Vec<usize>> {
    let unk = observations.index_of(UNKNOWN_TOKEN);
    tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            observations
                .index_of(t)
                .or(unk)
                .ok_or_else(|| Error::Vocabulary {
                    line: i + 1,
                    symbol: t.clone(),
                })
        })
        .collect()
}

struct Counts {
    initial: Vec<f64>,
    unigram: Vec<f64>,
    bigram: Vec<Vec<f64>>,
    /// label × observation (observation alphabet includes the unknown token).
    emission: Vec<Vec<f64>>,
}

fn check_smoothing(k: f64) -> Result<()> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::Estimation(format!("smoothing {k} must be finite and nonnegative")));
    }
    Ok(())
}

/// The corpus observation alphabet with the unknown token appended.
fn observation_alphabet(corpus: &TaggedCorpus) -> Alphabet {
    let mut o = corpus.observations.clone();
    o.intern(UNKNOWN_TOKEN);
    o
}

fn count(corpus: &TaggedCorpus, num_obs: usize) -> Result<Counts> {
    let l = corpus.labels.len();
    if corpus.is_empty() || corpus.token_count() == 0 || l == 0 {
        return Err(Error::Estimation("empty corpus".into()));
    }
    let mut c = Counts {
        initial: vec![0.0; l],
        unigram: vec![0.0; l],
        bigram: vec![vec![0.0; l]; l],
        emission: vec![vec![0.0; num_obs]; l],
    };
    for seq in &corpus.sequences {
        let labels = seq
            .labels
            .as_ref()
            .ok_or_else(|| Error::Estimation("corpus sequence without labels".into()))?;
        if labels.is_empty() {
            continue;
        }
        c.initial[labels[0]] += 1.0;
        for (&x, &y) in labels.iter().zip(&seq.observations) {
            c.unigram[x] += 1.0;
            c.emission[x][y] += 1.0;
        }
        for w in labels.windows(2) {
            c.bigram[w[0]][w[1]] += 1.0;
        }
    }
    Ok(c)
}

/// Add-k relative frequencies; a row with no mass at all becomes uniform.
fn smoothed(counts: &[f64], k: f64) -> Vec<f64> {
    let total: f64 = counts.iter().sum::<f64>() + k * counts.len() as f64;
    if total <= 0.0 {
        return vec![1.0 / counts.len() as f64; counts.len()];
    }
    counts.iter().map(|c| (c + k) / total).collect()
}

fn renormalized(v: Vec<f64>) -> Result<Categorical> {
    let s: f64 = v.iter().sum();
    Categorical::new(v.into_iter().map(|p| p / s).collect())
}

fn matrix(rows: &[Vec<f64>], k: f64) -> Result<StochasticMatrix> {
    let rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| renormalized(smoothed(r, k)).map(|c| c.probs().to_vec()))
        .collect::<Result<_>>()?;
    StochasticMatrix::from_rows(&rows)
}

/// Stationary HMM with add-k smoothed initial, transition and emission laws.
/// The observation alphabet gains [`UNKNOWN_TOKEN`].
pub fn fit_hmm(corpus: &TaggedCorpus, k: f64) -> Result<HmmModel> {
    check_smoothing(k)?;
    let observations = observation_alphabet(corpus);
    let c = count(corpus, observations.len())?;
    HmmModel::stationary(
        corpus.labels.clone(),
        observations,
        renormalized(smoothed(&c.initial, k))?,
        matrix(&c.bigram, k)?,
        matrix(&c.emission, k)?,
    )
}

/// Stationary raw-flagged discriminative parameters: p(x) is the smoothed
/// label unigram used at every position, p(x'|x) as in [`fit_hmm`], and
/// p(x|y) the smoothed label frequency given each token. The unknown token's
/// label law is p(x).
///
/// With `k = 0` a label absent from the corpus gets p(x) = 0, which the
/// decoders reject for sequences longer than one token.
pub fn fit_disc_params(corpus: &TaggedCorpus, k: f64) -> Result<DiscriminativeParams> {
    check_smoothing(k)?;
    let observations = observation_alphabet(corpus);
    let o = observations.len();
    let l = corpus.labels.len();
    let c = count(corpus, o)?;
    let prior = renormalized(smoothed(&c.unigram, k))?;
    let unk = observations.index_of(UNKNOWN_TOKEN).expect("interned above");
    let by_token: Vec<Vec<f64>> = (0..o)
        .map(|y| (0..l).map(|x| c.emission[x][y]).collect())
        .collect();
    let rows: Vec<Vec<f64>> = by_token
        .iter()
        .enumerate()
        .map(|(y, counts)| {
            if y == unk && counts.iter().all(|&c| c == 0.0) {
                Ok(prior.probs().to_vec())
            } else {
                renormalized(smoothed(counts, k)).map(|c| c.probs().to_vec())
            }
        })
        .collect::<Result<_>>()?;
    DiscriminativeParams::stationary(
        corpus.labels.clone(),
        observations,
        prior,
        matrix(&c.bigram, k)?,
        StochasticMatrix::from_rows(&rows)?,
        Consistency::Raw,
    )
}

/// Labels whose prior is zero; non-empty only when fitting with `k = 0`.
pub fn zero_prior_labels(params: &DiscriminativeParams) -> Vec<usize> {
    params
        .prior_at(0)
        .probs()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p == 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Fraction of tokens whose predicted label equals the gold label.
pub fn evaluate_accuracy(gold: &TaggedCorpus, predicted: &[Vec<usize>]) -> Result<f64> {
    if gold.sequences.len() != predicted.len() {
        return Err(Error::Dimension(format!(
            "{} gold sequences, {} predicted",
            gold.sequences.len(),
            predicted.len()
        )));
    }
    let mut correct = 0usize;
    let mut total = 0usize;
    for (i, (g, p)) in gold.sequences.iter().zip(predicted).enumerate() {
        let labels = g
            .labels
            .as_ref()
            .ok_or_else(|| Error::Estimation(format!("gold sequence {i} has no labels")))?;
        if labels.len() != p.len() {
            return Err(Error::Dimension(format!(
                "sequence {i}: {} gold labels, {} predicted",
                labels.len(),
                p.len()
            )));
        }
        correct += labels.iter().zip(p).filter(|(a, b)| a == b).count();
        total += labels.len();
    }
    if total == 0 {
        return Err(Error::Dimension("no tokens to evaluate".into()));
    }
    Ok(correct as f64 / total as f64)
}
