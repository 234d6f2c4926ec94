//! Exact inference for discrete hidden Markov models and linear-chain
//! conditional random fields.
//!
//! Besides the classic forward-backward and Viterbi decoders, the crate
//! provides:
//!
//! * [`equivalence::convert_crf_to_hmm`], which builds, for any linear-chain
//!   CRF, an HMM whose posterior p(x | y) is exactly the CRF's;
//! * [`discriminative`] decoders that compute the same MPM and MAP
//!   classifiers as the generative ones from p(xₙ), p(xₙ₊₁|xₙ) and p(xₙ|yₙ)
//!   alone, without any emission law p(yₙ|xₙ);
//! * an [`oracle`] of brute-force enumerations used to certify all of the
//!   above on small instances.
//!
//! ```
//! use chainlab::{Alphabet, Categorical, HmmModel, StochasticMatrix};
//! use chainlab::discriminative::{derive_disc_params, disc_mpm_decode};
//! use chainlab::inference::mpm_decode;
//!
//! let hmm = HmmModel::stationary(
//!     Alphabet::new(["N", "V"]).unwrap(),
//!     Alphabet::new(["dogs", "run"]).unwrap(),
//!     Categorical::new(vec![0.7, 0.3]).unwrap(),
//!     StochasticMatrix::from_rows(&[vec![0.3, 0.7], vec![0.8, 0.2]]).unwrap(),
//!     StochasticMatrix::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap(),
//! )
//! .unwrap();
//! let y = [0, 1, 0];
//! let params = derive_disc_params(&hmm, y.len()).unwrap();
//! assert_eq!(mpm_decode(&hmm, &y).unwrap(), disc_mpm_decode(&params, &y).unwrap());
//! ```

pub mod alphabet;
pub mod corpus;
pub mod crf;
pub mod discriminative;
pub mod distribution;
pub mod equivalence;
pub mod error;
pub mod hmm;
pub mod inference;
pub mod io;
pub mod lemma;
pub mod logspace;
pub mod oracle;
pub mod params;
pub mod random;
pub mod sequence;
pub mod trellis;
pub mod verify;

pub use alphabet::Alphabet;
pub use crf::LcCrfModel;
pub use distribution::{Categorical, Matrix, Schedule, StochasticMatrix};
pub use error::{Error, Result};
pub use hmm::HmmModel;
pub use params::{Consistency, DiscriminativeParams};
pub use sequence::{LabeledSequence, TaggedCorpus};
pub use trellis::TrellisTable;
