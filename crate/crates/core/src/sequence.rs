use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

/// Observation indices with optional aligned label indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSequence {
    pub observations: Vec<usize>,
    pub labels: Option<Vec<usize>>,
}

impl LabeledSequence {
    pub fn new(observations: Vec<usize>, labels: Option<Vec<usize>>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != observations.len() {
                return Err(Error::Dimension(format!(
                    "{} labels for {} observations",
                    l.len(),
                    observations.len()
                )));
            }
        }
        Ok(Self {
            observations,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Aligned sequences together with the alphabets their indices refer to.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TaggedCorpus {
    pub labels: Alphabet,
    pub observations: Alphabet,
    pub sequences: Vec<LabeledSequence>,
}

impl TaggedCorpus {
    pub fn new(
        labels: Alphabet,
        observations: Alphabet,
        sequences: Vec<LabeledSequence>,
    ) -> Result<Self> {
        for s in &sequences {
            check_indices(&s.observations, observations.len(), "observation")?;
            if let Some(l) = &s.labels {
                check_indices(l, labels.len(), "label")?;
            }
        }
        Ok(Self {
            labels,
            observations,
            sequences,
        })
    }

    pub fn token_count(&self) -> usize {
        self.sequences.iter().map(LabeledSequence::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }
}

pub(crate) fn check_indices(xs: &[usize], size: usize, what: &'static str) -> Result<()> {
    match xs.iter().find(|&&i| i >= size) {
        Some(&index) => Err(Error::Index { what, index, size }),
        None => Ok(()),
    }
}

pub(crate) fn check_nonempty(y: &[usize]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::Dimension("empty observation sequence".into()));
    }
    Ok(())
}
