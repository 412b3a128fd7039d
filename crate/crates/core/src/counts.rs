//! Candidate phrase extraction and utterance-level cooccurrence counts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::corpus::{Act, Corpus, Utterance};
use crate::error::{Error, Result};

/// A contiguous token sequence. Ordering is lexicographic on the
/// space-joined text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Phrase(Vec<String>);

impl Phrase {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let valid = !tokens.is_empty()
            && tokens
                .iter()
                .all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace));
        if !valid {
            return Err(Error::InvalidPhrase(tokens.join(" ")));
        }
        Ok(Phrase(tokens))
    }

    /// Parses space-separated tokens, e.g. `"see you"`.
    pub fn parse(text: &str) -> Result<Self> {
        Phrase::new(text.split_whitespace())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn joined_bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().enumerate().flat_map(|(i, t)| {
            let sep: &[u8] = if i == 0 { b"" } else { b" " };
            sep.iter().chain(t.as_bytes()).copied()
        })
    }
}

impl Ord for Phrase {
    fn cmp(&self, other: &Self) -> Ordering {
        self.joined_bytes().cmp(other.joined_bytes())
    }
}

impl PartialOrd for Phrase {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(t)?;
        }
        Ok(())
    }
}

/// True iff `needle` occurs as a contiguous run inside `haystack`.
pub fn contains_tokens(haystack: &[String], needle: &[String]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

pub fn contains(utterance: &Utterance, phrase: &Phrase) -> bool {
    contains_tokens(&utterance.tokens, phrase.tokens())
}

/// Every contiguous n-gram of length `1..=max_len` in the corpus.
pub fn extract_phrases(corpus: &Corpus, max_len: usize) -> BTreeSet<Phrase> {
    let mut phrases = BTreeSet::new();
    for utt in corpus.utterances() {
        for n in 1..=max_len.min(utt.tokens.len()) {
            for window in utt.tokens.windows(n) {
                phrases.insert(Phrase(window.to_vec()));
            }
        }
    }
    phrases
}

/// Identifies a phrase row inside a [`PhraseTable`].
pub type PhraseId = usize;

/// Utterance-level counts: `#(p&d)` is the number of utterances labeled `d`
/// that contain `p` at least once.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseTable {
    utterances: u32,
    acts: Vec<Act>,
    act_count: Vec<u32>,
    phrases: Vec<Phrase>,
    index: BTreeMap<Phrase, PhraseId>,
    // row-major, phrases x acts
    joint: Vec<u32>,
    phrase_count: Vec<u32>,
}

impl PhraseTable {
    pub fn build<'a, I>(corpus: &Corpus, phrases: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Phrase>,
    {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let candidates: Vec<Phrase> = phrases
            .into_iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if candidates.is_empty() {
            return Err(Error::EmptyPhraseSet);
        }
        let acts = corpus.act_inventory().to_vec();
        let act_ids: BTreeMap<&Act, usize> = acts.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let width = acts.len();
        let max_len = candidates.iter().map(Phrase::len).max().unwrap_or(1);
        let lookup: BTreeMap<&[String], usize> = candidates
            .iter()
            .enumerate()
            .map(|(i, p)| (p.tokens(), i))
            .collect();

        let mut joint = vec![0u32; candidates.len() * width];
        let mut act_count = vec![0u32; width];
        // last utterance that counted each candidate, for presence counting
        let mut stamp = vec![usize::MAX; candidates.len()];
        for (u, utt) in corpus.utterances().enumerate() {
            let d = act_ids[&utt.act];
            act_count[d] += 1;
            for n in 1..=max_len.min(utt.tokens.len()) {
                for window in utt.tokens.windows(n) {
                    if let Some(&p) = lookup.get(window) {
                        if stamp[p] != u {
                            stamp[p] = u;
                            joint[p * width + d] += 1;
                        }
                    }
                }
            }
        }

        let mut table = PhraseTable {
            utterances: act_count.iter().sum(),
            acts,
            act_count,
            phrases: Vec::new(),
            index: BTreeMap::new(),
            joint: Vec::new(),
            phrase_count: Vec::new(),
        };
        for (p, phrase) in candidates.into_iter().enumerate() {
            let row = &joint[p * width..(p + 1) * width];
            let total: u32 = row.iter().sum();
            if total == 0 {
                continue;
            }
            table.index.insert(phrase.clone(), table.phrases.len());
            table.phrases.push(phrase);
            table.joint.extend_from_slice(row);
            table.phrase_count.push(total);
        }
        Ok(table)
    }

    /// `U`, the number of utterances.
    pub fn total(&self) -> u32 {
        self.utterances
    }

    pub fn acts(&self) -> &[Act] {
        &self.acts
    }

    pub fn act_id(&self, act: &Act) -> Option<usize> {
        self.acts.iter().position(|a| a == act)
    }

    pub fn num_acts(&self) -> usize {
        self.acts.len()
    }

    /// Stored phrases in sorted order; ids index into this slice.
    pub fn phrases(&self) -> &[Phrase] {
        &self.phrases
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn id(&self, phrase: &Phrase) -> Option<PhraseId> {
        self.index.get(phrase).copied()
    }

    pub fn require(&self, phrase: &Phrase) -> Result<PhraseId> {
        self.id(phrase)
            .ok_or_else(|| Error::UnknownPhrase(phrase.to_string()))
    }

    pub fn phrase(&self, id: PhraseId) -> &Phrase {
        &self.phrases[id]
    }

    /// `#(d)`
    pub fn act_count(&self, d: usize) -> u32 {
        self.act_count[d]
    }

    /// `#(p&d)`
    pub fn joint(&self, p: PhraseId, d: usize) -> u32 {
        self.joint[p * self.acts.len() + d]
    }

    /// The `#(p&d)` row over all acts.
    pub fn row(&self, p: PhraseId) -> &[u32] {
        let w = self.acts.len();
        &self.joint[p * w..(p + 1) * w]
    }

    /// `#(p)`
    pub fn phrase_count(&self, p: PhraseId) -> u32 {
        self.phrase_count[p]
    }

    /// `#(p̄)`, utterances not containing `p`.
    pub fn absent_count(&self, p: PhraseId) -> u32 {
        self.utterances - self.phrase_count[p]
    }

    /// `#(p̄&d)`
    pub fn absent_joint(&self, p: PhraseId, d: usize) -> u32 {
        self.act_count[d] - self.joint(p, d)
    }

    /// P(p|d)
    pub fn p_phrase_given_act(&self, p: PhraseId, d: usize) -> f64 {
        self.joint(p, d) as f64 / self.act_count[d] as f64
    }

    /// P(p̄|d)
    pub fn p_absent_given_act(&self, p: PhraseId, d: usize) -> f64 {
        self.absent_joint(p, d) as f64 / self.act_count[d] as f64
    }

    /// P(d|p)
    pub fn p_act_given_phrase(&self, p: PhraseId, d: usize) -> f64 {
        self.joint(p, d) as f64 / self.phrase_count[p] as f64
    }

    /// P(p)
    pub fn p_phrase(&self, p: PhraseId) -> f64 {
        self.phrase_count[p] as f64 / self.utterances as f64
    }

    /// P(p̄)
    pub fn p_absent(&self, p: PhraseId) -> f64 {
        self.absent_count(p) as f64 / self.utterances as f64
    }

    /// P(d)
    pub fn p_act(&self, d: usize) -> f64 {
        self.act_count[d] as f64 / self.utterances as f64
    }

    /// P(d&p)
    pub fn p_joint(&self, p: PhraseId, d: usize) -> f64 {
        self.joint(p, d) as f64 / self.utterances as f64
    }

    /// P(d&p̄)
    pub fn p_absent_joint(&self, p: PhraseId, d: usize) -> f64 {
        self.absent_joint(p, d) as f64 / self.utterances as f64
    }

    /// Nonzero (phrase, act, count) cells in phrase-then-act order.
    pub fn cells(&self) -> impl Iterator<Item = (&Phrase, &Act, u32)> + '_ {
        self.phrases.iter().enumerate().flat_map(move |(p, phrase)| {
            self.acts
                .iter()
                .enumerate()
                .filter_map(move |(d, act)| {
                    let c = self.joint(p, d);
                    (c > 0).then_some((phrase, act, c))
                })
        })
    }
}

pub fn build_table<'a, I>(corpus: &Corpus, phrases: I) -> Result<PhraseTable>
where
    I: IntoIterator<Item = &'a Phrase>,
{
    PhraseTable::build(corpus, phrases)
}
