//! Accuracy, cutoff/filter sweeps, significance tests and synthetic corpora.

mod stats;
mod sweep;
mod synth;

use std::fmt;
use std::str::FromStr;

use dacue_core::corpus::{Act, Corpus};
use dacue_core::filter::FilterMode;
use dacue_core::metrics::Metric;

pub use dacue_core::tbl::accuracy;
pub use stats::{welch_t_test, WelchReport, ALPHA};
pub use sweep::{run_sweep, significance, take_cutoff, train_and_score, SweepConfig};
pub use synth::{act_name, cue_tokens, gen_synthetic, noise_token, SynthConfig, FILLER};

use crate::error::{Error, Result};

/// A phrase-selection method: one of the metrics, or a baseline set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Every extracted phrase.
    All,
    /// An externally supplied phrase list.
    Lit,
    Metric(Metric),
}

impl Method {
    pub fn every_metric() -> impl Iterator<Item = Method> {
        Metric::ALL.into_iter().map(Method::Metric)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::All => f.write_str("all"),
            Method::Lit => f.write_str("lit"),
            Method::Metric(m) => m.fmt(f),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Method::All),
            "lit" => Ok(Method::Lit),
            other => Ok(Method::Metric(other.parse()?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Filtering {
    None,
    Basic,
    Modified,
}

impl Filtering {
    pub fn mode(self) -> Option<FilterMode> {
        match self {
            Filtering::None => None,
            Filtering::Basic => Some(FilterMode::Basic),
            Filtering::Modified => Some(FilterMode::Modified),
        }
    }
}

impl fmt::Display for Filtering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode() {
            None => f.write_str("none"),
            Some(mode) => mode.fmt(f),
        }
    }
}

impl FromStr for Filtering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(Filtering::None);
        }
        Ok(match s.parse::<FilterMode>()? {
            FilterMode::Basic => Filtering::Basic,
            FilterMode::Modified => Filtering::Modified,
        })
    }
}

/// One cell of an experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub method: Method,
    pub filter: Filtering,
    pub cutoff_percent: f64,
    /// Size of the phrase set the tagger was trained with.
    pub phrase_count: usize,
    /// Held-out accuracy.
    pub accuracy: f64,
    /// Held-out accuracy of each dialogue, in corpus order.
    pub per_dialogue: Vec<f64>,
}

/// A result compared against a baseline on per-dialogue accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct Significance {
    pub method: Method,
    pub filter: Filtering,
    pub cutoff_percent: f64,
    pub baseline: Method,
    /// The test outcome, or why it could not be computed.
    pub test: std::result::Result<WelchReport, String>,
}

/// Accuracy of each dialogue; `predicted` is in corpus order.
pub fn per_dialogue_accuracy(corpus: &Corpus, predicted: &[Act]) -> Result<Vec<f64>> {
    if predicted.len() != corpus.len() {
        return Err(dacue_core::Error::LengthMismatch {
            predicted: predicted.len(),
            gold: corpus.len(),
        }
        .into());
    }
    let mut offset = 0;
    Ok(corpus
        .dialogues()
        .iter()
        .map(|d| {
            let n = d.utterances.len();
            let correct = d
                .utterances
                .iter()
                .zip(&predicted[offset..offset + n])
                .filter(|(u, p)| u.act == **p)
                .count();
            offset += n;
            correct as f64 / n as f64
        })
        .collect())
}
