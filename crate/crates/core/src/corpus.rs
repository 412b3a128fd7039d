//! Dialogue-act-tagged corpora: utterances, tokenization, semantic
//! clustering and dialogue-level train/held-out splits.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Label reserved for "no preceding utterance" in model files.
pub(crate) const BOD_LABEL: &str = "BOD";

/// A dialogue act label such as `Greet` or `Suggest`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Act(String);

impl Act {
    /// Labels must be non-empty and free of whitespace, `=` and `"`, and
    /// may not be the reserved beginning-of-dialogue marker `BOD`.
    pub fn new(label: &str) -> Result<Self> {
        let bad = label.is_empty()
            || label == BOD_LABEL
            || label
                .chars()
                .any(|c| c.is_whitespace() || c == '=' || c == '"');
        if bad {
            return Err(Error::InvalidAct(label.to_owned()));
        }
        Ok(Act(label.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Act {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub dialogue_id: String,
    pub turn_index: usize,
    pub speaker: String,
    pub act: Act,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialogue {
    pub id: String,
    pub utterances: Vec<Utterance>,
}

/// An ordered collection of dialogues. Dialogue order and turn order are
/// significant: the tagger reads the preceding utterance's tag.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    dialogues: Vec<Dialogue>,
    acts: Vec<Act>,
}

impl Corpus {
    /// Builds a corpus from dialogues that are already grouped and ordered.
    pub fn new(dialogues: Vec<Dialogue>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for dialogue in &dialogues {
            if !seen.insert(dialogue.id.as_str()) {
                return Err(Error::DuplicateTurn {
                    dialogue_id: dialogue.id.clone(),
                    turn_index: 0,
                });
            }
            for (position, utt) in dialogue.utterances.iter().enumerate() {
                check_utterance(utt)?;
                if utt.dialogue_id != dialogue.id || utt.turn_index != position {
                    return Err(Error::NonContiguousTurn {
                        dialogue_id: dialogue.id.clone(),
                        expected: position,
                        found: utt.turn_index,
                    });
                }
            }
        }
        let acts = dialogues
            .iter()
            .flat_map(|d| d.utterances.iter().map(|u| u.act.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(Corpus { dialogues, acts })
    }

    /// Groups utterances into dialogues by first appearance. Within a
    /// dialogue the utterances must arrive in turn order starting at 0.
    pub fn from_utterances<I>(utterances: I) -> Result<Self>
    where
        I: IntoIterator<Item = Utterance>,
    {
        let mut dialogues: Vec<Dialogue> = Vec::new();
        let mut slots: BTreeMap<String, usize> = BTreeMap::new();
        for utt in utterances {
            push_utterance(&mut dialogues, &mut slots, utt)?;
        }
        Corpus::new(dialogues)
    }

    pub fn dialogues(&self) -> &[Dialogue] {
        &self.dialogues
    }

    /// All utterances in corpus order (dialogue by dialogue, ascending turn).
    pub fn utterances(&self) -> impl Iterator<Item = &Utterance> + '_ {
        self.dialogues.iter().flat_map(|d| d.utterances.iter())
    }

    pub fn len(&self) -> usize {
        self.dialogues.iter().map(|d| d.utterances.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The distinct gold acts, in sorted order.
    pub fn act_inventory(&self) -> &[Act] {
        &self.acts
    }

    /// Gold acts in corpus order.
    pub fn gold_tags(&self) -> Vec<Act> {
        self.utterances().map(|u| u.act.clone()).collect()
    }

    /// Returns a copy with every utterance's tokens passed through the lexicon.
    pub fn clustered(&self, lexicon: &ClusterLexicon) -> Corpus {
        let dialogues = self
            .dialogues
            .iter()
            .map(|d| Dialogue {
                id: d.id.clone(),
                utterances: d
                    .utterances
                    .iter()
                    .map(|u| Utterance {
                        tokens: lexicon.apply(&u.tokens),
                        ..u.clone()
                    })
                    .collect(),
            })
            .collect();
        Corpus {
            dialogues,
            acts: self.acts.clone(),
        }
    }

    /// Returns a copy with the gold acts replaced by `tags` (corpus order).
    pub fn relabeled(&self, tags: &[Act]) -> Result<Corpus> {
        if tags.len() != self.len() {
            return Err(Error::LengthMismatch {
                predicted: tags.len(),
                gold: self.len(),
            });
        }
        let mut tags = tags.iter();
        let dialogues = self
            .dialogues
            .iter()
            .map(|d| Dialogue {
                id: d.id.clone(),
                utterances: d
                    .utterances
                    .iter()
                    .zip(tags.by_ref())
                    .map(|(u, t)| Utterance {
                        act: t.clone(),
                        ..u.clone()
                    })
                    .collect(),
            })
            .collect();
        Corpus::new(dialogues)
    }
}

fn check_utterance(utt: &Utterance) -> Result<()> {
    if utt.tokens.is_empty() {
        return Err(Error::EmptyUtterance {
            dialogue_id: utt.dialogue_id.clone(),
            turn_index: utt.turn_index,
        });
    }
    Ok(())
}

/// Appends one utterance to the dialogue it belongs to, creating the dialogue
/// on first sight. Shared by [`Corpus::from_utterances`] and line-by-line
/// readers that want to report the failing line themselves.
pub fn push_utterance(
    dialogues: &mut Vec<Dialogue>,
    slots: &mut BTreeMap<String, usize>,
    utt: Utterance,
) -> Result<()> {
    check_utterance(&utt)?;
    let slot = match slots.get(&utt.dialogue_id) {
        Some(&slot) => slot,
        None => {
            slots.insert(utt.dialogue_id.clone(), dialogues.len());
            dialogues.push(Dialogue {
                id: utt.dialogue_id.clone(),
                utterances: Vec::new(),
            });
            dialogues.len() - 1
        }
    };
    let dialogue = &mut dialogues[slot];
    let expected = dialogue.utterances.len();
    if utt.turn_index < expected {
        return Err(Error::DuplicateTurn {
            dialogue_id: utt.dialogue_id,
            turn_index: utt.turn_index,
        });
    }
    if utt.turn_index != expected {
        return Err(Error::NonContiguousTurn {
            dialogue_id: utt.dialogue_id,
            expected,
            found: utt.turn_index,
        });
    }
    dialogue.utterances.push(utt);
    Ok(())
}

const STRIPPED: &[char] = &['.', ',', '!', '?', ';', ':', '"', '(', ')'];

/// Lowercases, splits on whitespace and strips surrounding punctuation.
/// Internal apostrophes, colons and periods survive (`i'd`, `2:00`).
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|word| word.trim_matches(STRIPPED).to_lowercase())
        .filter(|token| !token.is_empty())
        .collect()
}

pub const WEEKDAY: &str = "$weekday$";
pub const MONTH: &str = "$month$";
pub const NUMBER: &str = "$number$";
pub const ORDINAL: &str = "$ordinal-number$";
pub const PROPER_NAME: &str = "$proper-name$";

const WEEKDAYS: &[&str] = &[
    "monday",
    "tuesday",
    "wednesday",
    "thursday",
    "friday",
    "saturday",
    "sunday",
];

// "may" is left out: in dialogue it is far more often the modal verb.
const MONTHS: &[&str] = &[
    "january",
    "february",
    "march",
    "april",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
];

const ORDINAL_WORDS: &[&str] = &[
    "first",
    "second",
    "third",
    "fourth",
    "fifth",
    "sixth",
    "seventh",
    "eighth",
    "ninth",
    "tenth",
    "eleventh",
    "twelfth",
    "thirteenth",
    "fourteenth",
    "fifteenth",
    "sixteenth",
    "seventeenth",
    "eighteenth",
    "nineteenth",
    "twentieth",
    "twenty-first",
    "twenty-second",
    "twenty-third",
    "twenty-fourth",
    "twenty-fifth",
    "twenty-sixth",
    "twenty-seventh",
    "twenty-eighth",
    "twenty-ninth",
    "thirtieth",
    "thirty-first",
];

/// Digits, optionally with one internal `:` or `.` (`3`, `3:00`, `1.5`).
pub fn is_numeral(token: &str) -> bool {
    let mut separators = 0;
    let bytes = token.as_bytes();
    if bytes.is_empty() || !bytes[0].is_ascii_digit() || !bytes[bytes.len() - 1].is_ascii_digit()
    {
        return false;
    }
    for &b in bytes {
        match b {
            b'0'..=b'9' => {}
            b':' | b'.' => separators += 1,
            _ => return false,
        }
    }
    separators <= 1
}

/// Digits followed by `st`, `nd`, `rd` or `th`, or a spelled-out ordinal
/// from "first" to "thirty-first".
pub fn is_ordinal(token: &str) -> bool {
    if ORDINAL_WORDS.contains(&token) {
        return true;
    }
    let digits = token.bytes().take_while(u8::is_ascii_digit).count();
    digits > 0 && matches!(&token[digits..], "st" | "nd" | "rd" | "th")
}

/// Maps surface tokens onto cluster labels like `$weekday$`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLexicon {
    surfaces: BTreeMap<String, String>,
    matchers: bool,
}

impl Default for ClusterLexicon {
    fn default() -> Self {
        Self::new()
    }
}

impl ClusterLexicon {
    /// An empty lexicon with the numeral and ordinal matchers enabled.
    pub fn new() -> Self {
        ClusterLexicon {
            surfaces: BTreeMap::new(),
            matchers: true,
        }
    }

    /// An empty lexicon that only rewrites listed surface tokens.
    pub fn without_matchers() -> Self {
        ClusterLexicon {
            surfaces: BTreeMap::new(),
            matchers: false,
        }
    }

    /// Weekday and month names plus the numeral and ordinal matchers.
    pub fn scheduling() -> Self {
        let mut lexicon = Self::new();
        for day in WEEKDAYS {
            lexicon.insert(WEEKDAY, day).expect("builtin weekday");
        }
        for month in MONTHS {
            lexicon.insert(MONTH, month).expect("builtin month");
        }
        lexicon
    }

    pub fn insert(&mut self, label: &str, surface: &str) -> Result<()> {
        if label.len() < 2 || !label.starts_with('$') || !label.ends_with('$') {
            return Err(Error::InvalidClusterLabel(label.to_owned()));
        }
        let surface = surface.trim().to_lowercase();
        if surface.is_empty()
            || surface.starts_with('$')
            || surface.chars().any(char::is_whitespace)
        {
            return Err(Error::InvalidPhrase(surface));
        }
        match self.surfaces.get(&surface) {
            Some(existing) if existing != label => Err(Error::ClusterConflict {
                surface,
                first: existing.clone(),
                second: label.to_owned(),
            }),
            Some(_) => Ok(()),
            None => {
                self.surfaces.insert(surface, label.to_owned());
                Ok(())
            }
        }
    }

    pub fn matchers_enabled(&self) -> bool {
        self.matchers
    }

    /// (label, surface) pairs in surface order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.surfaces
            .iter()
            .map(|(surface, label)| (label.as_str(), surface.as_str()))
    }

    pub fn cluster_of(&self, token: &str) -> Option<&str> {
        if let Some(label) = self.surfaces.get(token) {
            return Some(label);
        }
        if self.matchers {
            if is_numeral(token) {
                return Some(NUMBER);
            }
            if is_ordinal(token) {
                return Some(ORDINAL);
            }
        }
        None
    }

    pub fn apply(&self, tokens: &[String]) -> Vec<String> {
        tokens
            .iter()
            .map(|t| match self.cluster_of(t) {
                Some(label) => label.to_string(),
                None => t.clone(),
            })
            .collect()
    }
}

pub fn apply_clusters(tokens: &[String], lexicon: &ClusterLexicon) -> Vec<String> {
    lexicon.apply(tokens)
}

/// Splits at dialogue granularity. The held-out side receives
/// `round(dialogues * heldout_fraction)` dialogues chosen by a seeded
/// shuffle; both sides keep the original dialogue order.
pub fn split_corpus(corpus: &Corpus, heldout_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    if !(heldout_fraction > 0.0 && heldout_fraction < 1.0) {
        return Err(Error::InvalidFraction(heldout_fraction));
    }
    let n = corpus.dialogues.len();
    let heldout = libm::round(n as f64 * heldout_fraction) as usize;
    if heldout == 0 || heldout >= n {
        return Err(Error::DegenerateSplit {
            dialogues: n,
            heldout,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut is_heldout = alloc::vec![false; n];
    for &i in &order[..heldout] {
        is_heldout[i] = true;
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (dialogue, held) in corpus.dialogues.iter().zip(is_heldout) {
        if held {
            test.push(dialogue.clone());
        } else {
            train.push(dialogue.clone());
        }
    }
    Ok((Corpus::new(train)?, Corpus::new(test)?))
}
