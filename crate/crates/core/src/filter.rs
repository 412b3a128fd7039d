//! Lexical filtering of ranked phrase lists.
//!
//! A phrase is redundant when one of its proper contiguous subphrases is
//! ranked higher: every utterance containing the longer phrase also contains
//! the shorter one. The modified filter additionally requires both phrases to
//! have been selected for the same dialogue act, so that e.g. "hi i" (Init)
//! survives under "hi" (Greet).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::Act;
use crate::counts::Phrase;
use crate::error::{Error, Result};
use crate::metrics::RankedPhrase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FilterMode {
    Basic,
    Modified,
}

impl FilterMode {
    pub fn name(self) -> &'static str {
        match self {
            FilterMode::Basic => "basic",
            FilterMode::Modified => "modified",
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "basic" => Ok(FilterMode::Basic),
            "modified" => Ok(FilterMode::Modified),
            _ => Err(Error::UnknownFilterMode(s.to_string())),
        }
    }
}

/// All contiguous token runs strictly shorter than `phrase`.
pub fn proper_subphrases(phrase: &Phrase) -> BTreeSet<Phrase> {
    let tokens = phrase.tokens();
    (1..tokens.len())
        .flat_map(|n| tokens.windows(n))
        .map(|w| Phrase::new(w.iter().cloned()).expect("subrun of a valid phrase"))
        .collect()
}

/// Why a phrase was dropped: the first higher-ranked subphrase that blocks it.
#[derive(Debug, Clone, PartialEq)]
pub struct Removal {
    pub removed: Phrase,
    pub removed_rank: usize,
    pub removed_act: Option<Act>,
    pub blocker: Phrase,
    pub blocker_rank: usize,
    pub blocker_act: Option<Act>,
}

pub fn lexical_filter(ranked: &[RankedPhrase], mode: FilterMode) -> Result<Vec<RankedPhrase>> {
    lexical_filter_audited(ranked, mode).map(|(kept, _)| kept)
}

/// Filters and also reports each removal. A blocker only has to appear
/// higher in the input; it need not survive the filter itself.
pub fn lexical_filter_audited(
    ranked: &[RankedPhrase],
    mode: FilterMode,
) -> Result<(Vec<RankedPhrase>, Vec<Removal>)> {
    let mut position: BTreeMap<&Phrase, usize> = BTreeMap::new();
    for (i, entry) in ranked.iter().enumerate() {
        if mode == FilterMode::Modified && entry.selected_act.is_none() {
            return Err(Error::MissingSelectedAct(entry.phrase.to_string()));
        }
        if position.insert(&entry.phrase, i).is_some() {
            return Err(Error::DuplicatePhrase(entry.phrase.to_string()));
        }
    }

    let mut kept = Vec::new();
    let mut removals = Vec::new();
    for (i, entry) in ranked.iter().enumerate() {
        let blocker = proper_subphrases(&entry.phrase)
            .iter()
            .filter_map(|sub| position.get(sub).copied())
            .filter(|&j| j < i)
            .filter(|&j| mode == FilterMode::Basic || ranked[j].selected_act == entry.selected_act)
            .min();
        match blocker {
            None => {
                let mut survivor = entry.clone();
                survivor.rank = kept.len() + 1;
                kept.push(survivor);
            }
            Some(j) => removals.push(Removal {
                removed: entry.phrase.clone(),
                removed_rank: entry.rank,
                removed_act: entry.selected_act.clone(),
                blocker: ranked[j].phrase.clone(),
                blocker_rank: ranked[j].rank,
                blocker_act: ranked[j].selected_act.clone(),
            }),
        }
    }
    Ok((kept, removals))
}

/// Keeps entries whose frequency lies within the given bounds (inclusive)
/// and renumbers them.
pub fn frequency_band(ranked: &[RankedPhrase], min: Option<u32>, max: Option<u32>) -> Vec<RankedPhrase> {
    ranked
        .iter()
        .filter(|r| min.is_none_or(|m| r.freq >= m) && max.is_none_or(|m| r.freq <= m))
        .cloned()
        .enumerate()
        .map(|(i, mut r)| {
            r.rank = i + 1;
            r
        })
        .collect()
}
