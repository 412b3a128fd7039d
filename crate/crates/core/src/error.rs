use alloc::string::String;
use core::fmt;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An utterance has no tokens left after tokenization.
    EmptyUtterance { dialogue_id: String, turn_index: usize },
    /// The same (dialogue, turn) pair was supplied twice.
    DuplicateTurn { dialogue_id: String, turn_index: usize },
    /// Turn indices within a dialogue must run 0..n-1 without gaps.
    NonContiguousTurn {
        dialogue_id: String,
        expected: usize,
        found: usize,
    },
    /// A dialogue act label is empty or contains characters the file formats reserve.
    InvalidAct(String),
    /// A phrase must have at least one token and no token may be empty or contain whitespace.
    InvalidPhrase(String),
    InvalidClusterLabel(String),
    /// A surface token was assigned to two different cluster labels.
    ClusterConflict {
        surface: String,
        first: String,
        second: String,
    },
    EmptyCorpus,
    EmptyPhraseSet,
    /// The split would leave one side without dialogues.
    DegenerateSplit { dialogues: usize, heldout: usize },
    InvalidFraction(f64),
    InvalidPercent(f64),
    /// A phrase was looked up that the table has never seen.
    UnknownPhrase(String),
    UnknownAct(String),
    DuplicatePhrase(String),
    /// The modified lexical filter needs a selected act on every entry.
    MissingSelectedAct(String),
    InvalidRule(String),
    UnknownMetric(String),
    UnknownFilterMode(String),
    InvalidThreshold,
    LengthMismatch { predicted: usize, gold: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyUtterance {
                dialogue_id,
                turn_index,
            } => write!(
                f,
                "utterance {dialogue_id}/{turn_index} has no tokens after tokenization"
            ),
            Error::DuplicateTurn {
                dialogue_id,
                turn_index,
            } => write!(f, "duplicate turn {turn_index} in dialogue {dialogue_id}"),
            Error::NonContiguousTurn {
                dialogue_id,
                expected,
                found,
            } => write!(
                f,
                "dialogue {dialogue_id}: expected turn {expected}, found turn {found}"
            ),
            Error::InvalidAct(act) => write!(f, "invalid dialogue act label {act:?}"),
            Error::InvalidPhrase(p) => write!(f, "invalid phrase {p:?}"),
            Error::InvalidClusterLabel(l) => {
                write!(f, "cluster label {l:?} must begin and end with '$'")
            }
            Error::ClusterConflict {
                surface,
                first,
                second,
            } => write!(
                f,
                "surface token {surface:?} assigned to both {first} and {second}"
            ),
            Error::EmptyCorpus => f.write_str("corpus has no utterances"),
            Error::EmptyPhraseSet => f.write_str("phrase set is empty"),
            Error::DegenerateSplit { dialogues, heldout } => write!(
                f,
                "splitting {dialogues} dialogues with {heldout} held out leaves a side empty"
            ),
            Error::InvalidFraction(x) => write!(f, "held-out fraction {x} is not in (0,1)"),
            Error::InvalidPercent(x) => write!(f, "cutoff percent {x} is not in (0,100]"),
            Error::UnknownPhrase(p) => write!(f, "phrase {p:?} is not in the table"),
            Error::UnknownAct(a) => write!(f, "dialogue act {a:?} is not in the inventory"),
            Error::DuplicatePhrase(p) => write!(f, "phrase {p:?} appears twice in the ranking"),
            Error::MissingSelectedAct(p) => {
                write!(f, "phrase {p:?} has no selected dialogue act")
            }
            Error::InvalidRule(r) => write!(f, "invalid rule: {r}"),
            Error::UnknownMetric(m) => write!(f, "unknown metric {m:?}"),
            Error::UnknownFilterMode(m) => write!(f, "unknown filter mode {m:?}"),
            Error::InvalidThreshold => f.write_str("rule gain threshold must be at least 1"),
            Error::LengthMismatch { predicted, gold } => write!(
                f,
                "{predicted} predicted tags for {gold} gold tags"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
