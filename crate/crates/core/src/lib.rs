//! Cross-language information retrieval built on statistical translation
//! models estimated from parallel web text.
//!
//! The crate is organised along the processing pipeline:
//!
//! * [`miner`] finds candidate parallel page pairs in a mirrored site tree.
//! * [`textprep`] turns pages into sentences and normalized index terms.
//! * [`aligner`] aligns sentences and extracts 1-1 training couples.
//! * [`tm`] trains IBM Model 1 tables by EM, prunes them and projects
//!   query models across languages.
//! * [`retrieval`] ranks documents with smoothed unigram language models
//!   (monolingual, QT, DT, SYN and the baseline variants).
//! * [`eval`] computes MAP and the rank-based significance tests.
//!
//! [`synth`] generates the deterministic synthetic bitext and test
//! collection used by the acceptance suite and the benchmarks.

pub mod aligner;
pub mod config;
pub mod error;
pub mod eval;
pub mod miner;
pub mod retrieval;
pub mod synth;
pub mod textprep;
pub mod tm;

pub use error::{Error, Result};
pub use eval::{EvalReport, Qrels};
pub use retrieval::{Index, RankedRun, RetrievalParams};
pub use tm::{QueryModel, TranslationModel};
