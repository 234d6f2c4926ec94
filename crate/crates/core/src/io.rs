//! Versioned JSON documents for every model family.
//!
//! Each document carries a `"format"` tag. Alphabets are string arrays and
//! matrices are row-major arrays of arrays. Probabilities are stored in
//! linear space; CRF and potential-chain entries are log-domain scores.
//!
//! | format                 | fields                                                                                  |
//! |------------------------|-----------------------------------------------------------------------------------------|
//! | `chainlab-hmm-v1`      | labels, observations, length (null = stationary), initial, transitions, emissions       |
//! | `chainlab-crf-v1`      | labels, observations, pairwise (N−1 matrices), unary (N matrices)                        |
//! | `chainlab-disc-v1`     | labels, observations, length, consistency, prior_marginals, transitions, label_given_obs |
//! | `chainlab-potchain-v1` | states, log_potentials (N−1 matrices)                                                   |
//!
//! A stationary document (`"length": null`) stores exactly one matrix in
//! each per-step list; a per-position one stores one per step or position.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::crf::LcCrfModel;
use crate::distribution::{Categorical, Matrix, Schedule, StochasticMatrix};
use crate::error::{Error, Result};
use crate::hmm::HmmModel;
use crate::lemma::PotentialChain;
use crate::params::{Consistency, DiscriminativeParams};

type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HmmDocument {
    pub labels: Alphabet,
    pub observations: Alphabet,
    pub length: Option<usize>,
    pub initial: Vec<f64>,
    pub transitions: Vec<Rows>,
    pub emissions: Vec<Rows>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrfDocument {
    pub labels: Alphabet,
    pub observations: Alphabet,
    pub pairwise: Vec<Rows>,
    pub unary: Vec<Rows>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscDocument {
    pub labels: Alphabet,
    pub observations: Alphabet,
    pub length: Option<usize>,
    pub consistency: Consistency,
    pub prior_marginals: Vec<Vec<f64>>,
    pub transitions: Vec<Rows>,
    pub label_given_obs: Vec<Rows>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialChainDocument {
    pub states: Alphabet,
    pub log_potentials: Vec<Rows>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "format")]
pub enum ModelDocument {
    #[serde(rename = "chainlab-hmm-v1")]
    Hmm(HmmDocument),
    #[serde(rename = "chainlab-crf-v1")]
    Crf(CrfDocument),
    #[serde(rename = "chainlab-disc-v1")]
    Disc(DiscDocument),
    #[serde(rename = "chainlab-potchain-v1")]
    PotentialChain(PotentialChainDocument),
}

/// Any model the crate can read or write.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Hmm(HmmModel),
    Crf(LcCrfModel),
    Disc(DiscriminativeParams),
    PotentialChain(PotentialChain),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Hmm(_) => "hmm",
            Model::Crf(_) => "crf",
            Model::Disc(_) => "disc",
            Model::PotentialChain(_) => "potchain",
        }
    }
}

fn stochastic_list(rows: &[Rows]) -> Result<Vec<StochasticMatrix>> {
    rows.iter().map(|r| StochasticMatrix::from_rows(r)).collect()
}

fn matrix_list(rows: &[Rows]) -> Result<Vec<Matrix>> {
    rows.iter().map(|r| Matrix::from_rows(r)).collect()
}

fn single<T>(mut v: Vec<T>, what: &str) -> Result<T> {
    if v.len() != 1 {
        return Err(Error::Format(format!(
            "stationary model needs exactly one {what} matrix, found {}",
            v.len()
        )));
    }
    Ok(v.remove(0))
}

fn schedule_rows(s: &Schedule<StochasticMatrix>) -> Vec<Rows> {
    s.iter().map(|m| m.probs().to_rows()).collect()
}

impl TryFrom<ModelDocument> for Model {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        Ok(match doc {
            ModelDocument::Hmm(d) => {
                let initial = Categorical::new(d.initial)?;
                let transitions = stochastic_list(&d.transitions)?;
                let emissions = stochastic_list(&d.emissions)?;
                Model::Hmm(match d.length {
                    None => HmmModel::stationary(
                        d.labels,
                        d.observations,
                        initial,
                        single(transitions, "transition")?,
                        single(emissions, "emission")?,
                    )?,
                    Some(n) => {
                        if emissions.len() != n {
                            return Err(Error::Format(format!(
                                "length {n} but {} emission matrices",
                                emissions.len()
                            )));
                        }
                        HmmModel::per_position(d.labels, d.observations, initial, transitions, emissions)?
                    }
                })
            }
            ModelDocument::Crf(d) => Model::Crf(LcCrfModel::new(
                d.labels,
                d.observations,
                matrix_list(&d.pairwise)?,
                matrix_list(&d.unary)?,
            )?),
            ModelDocument::Disc(d) => {
                let priors = d
                    .prior_marginals
                    .into_iter()
                    .map(Categorical::new)
                    .collect::<Result<Vec<_>>>()?;
                let transitions = stochastic_list(&d.transitions)?;
                let given = stochastic_list(&d.label_given_obs)?;
                Model::Disc(match d.length {
                    None => DiscriminativeParams::stationary(
                        d.labels,
                        d.observations,
                        single(priors, "prior")?,
                        single(transitions, "transition")?,
                        single(given, "label_given_obs")?,
                        d.consistency,
                    )?,
                    Some(n) => {
                        if priors.len() != n {
                            return Err(Error::Format(format!(
                                "length {n} but {} prior marginals",
                                priors.len()
                            )));
                        }
                        DiscriminativeParams::per_position(
                            d.labels,
                            d.observations,
                            priors,
                            transitions,
                            given,
                            d.consistency,
                        )?
                    }
                })
            }
            ModelDocument::PotentialChain(d) => {
                Model::PotentialChain(PotentialChain::new(d.states, matrix_list(&d.log_potentials)?)?)
            }
        })
    }
}

impl From<&Model> for ModelDocument {
    fn from(model: &Model) -> Self {
        match model {
            Model::Hmm(m) => ModelDocument::Hmm(HmmDocument {
                labels: m.labels().clone(),
                observations: m.observations().clone(),
                length: m.length(),
                initial: m.initial().probs().to_vec(),
                transitions: schedule_rows(m.transitions()),
                emissions: schedule_rows(m.emissions()),
            }),
            Model::Crf(c) => ModelDocument::Crf(CrfDocument {
                labels: c.labels().clone(),
                observations: c.observations().clone(),
                pairwise: c.pairwise_all().iter().map(Matrix::to_rows).collect(),
                unary: c.unary_all().iter().map(Matrix::to_rows).collect(),
            }),
            Model::Disc(p) => ModelDocument::Disc(DiscDocument {
                labels: p.labels().clone(),
                observations: p.observations().clone(),
                length: p.length(),
                consistency: p.consistency(),
                prior_marginals: p.prior_marginals().iter().map(|c| c.probs().to_vec()).collect(),
                transitions: schedule_rows(p.transitions()),
                label_given_obs: schedule_rows(p.label_given_obs()),
            }),
            Model::PotentialChain(c) => ModelDocument::PotentialChain(PotentialChainDocument {
                states: c.states().clone(),
                log_potentials: c.log_potentials().iter().map(Matrix::to_rows).collect(),
            }),
        }
    }
}

pub fn model_from_json(text: &str) -> Result<Model> {
    let doc: ModelDocument = serde_json::from_str(text)?;
    Model::try_from(doc)
}

pub fn model_to_json(model: &Model) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&ModelDocument::from(model))?;
    s.push('\n');
    Ok(s)
}

pub fn load_model(path: &Path) -> Result<Model> {
    model_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_model(path: &Path, model: &Model) -> Result<()> {
    std::fs::write(path, model_to_json(model)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_hmm_document() {
        let text = r#"{
            "format": "chainlab-hmm-v1",
            "labels": ["A", "B"],
            "observations": ["x", "y", "z"],
            "length": null,
            "initial": [0.25, 0.75],
            "transitions": [[[0.5, 0.5], [0.1, 0.9]]],
            "emissions": [[[0.2, 0.3, 0.5], [1.0, 0.0, 0.0]]]
        }"#;
        let Model::Hmm(h) = model_from_json(text).unwrap() else {
            panic!("expected an HMM")
        };
        assert!(h.is_stationary());
        assert_eq!(h.emission_at(17).prob(1, 0), 1.0);
        assert_eq!(h.emission_at(3).log_prob(1, 2), f64::NEG_INFINITY);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            model_from_json(r#"{"format": "chainlab-hmm-v9"}"#),
            Err(Error::Json(_))
        ));
        let bad_row = r#"{"format": "chainlab-hmm-v1", "labels": ["A"], "observations": ["x"],
            "length": null, "initial": [1.0], "transitions": [[[0.9]]], "emissions": [[[1.0]]]}"#;
        assert!(matches!(model_from_json(bad_row), Err(Error::InvalidDistribution(_))));
        let two = r#"{"format": "chainlab-hmm-v1", "labels": ["A"], "observations": ["x"],
            "length": null, "initial": [1.0], "transitions": [[[1.0]], [[1.0]]], "emissions": [[[1.0]]]}"#;
        assert!(matches!(model_from_json(two), Err(Error::Format(_))));
    }

    #[test]
    fn crf_and_potchain_round_trip() {
        let crf = LcCrfModel::new(
            Alphabet::numbered("L", 2),
            Alphabet::numbered("o", 1),
            vec![Matrix::from_rows(&[vec![0.1, -0.2], vec![1.0 / 3.0, 2.5]]).unwrap()],
            vec![Matrix::filled(2, 1, -0.7); 2],
        )
        .unwrap();
        let m = Model::Crf(crf);
        let back = model_from_json(&model_to_json(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(model_to_json(&m).unwrap().contains("\"chainlab-crf-v1\""));

        let pc = Model::PotentialChain(
            PotentialChain::new(Alphabet::numbered("w", 1), vec![Matrix::filled(1, 1, 0.3)]).unwrap(),
        );
        assert_eq!(model_from_json(&model_to_json(&pc).unwrap()).unwrap(), pc);
    }
}
