//! Cue phrase selection for dialogue act tagging.
//!
//! Phrases are ranked by how well they predict dialogue acts, pruned with a
//! lexical filter, and used as features by a transformation-based tagger.
//! The crate is `no_std` and only needs `alloc`; file formats and the
//! command-line driver live in the `dacue` crate.

#![no_std]

extern crate alloc;

pub mod corpus;
pub mod counts;
pub mod error;
pub mod filter;
pub mod metrics;
pub mod tbl;

pub use corpus::{Act, ClusterLexicon, Corpus, Dialogue, Utterance};
pub use counts::{Phrase, PhraseTable};
pub use error::{Error, Result};
pub use filter::FilterMode;
pub use metrics::{Metric, RankedPhrase};
pub use tbl::{Rule, TaggerModel, TrainConfig};
