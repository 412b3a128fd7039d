//! Transformation-based dialogue act tagger.
//!
//! Tagging starts from the majority training act and applies an ordered list
//! of rewrite rules. A rule fires on an utterance whose current tag is
//! `from` and whose features satisfy every present condition: a phrase it
//! contains, the (preliminary) tag of the preceding utterance, and whether
//! the speaker changed.
//!
//! Under [`UpdateMode::Sweep`] each rule is applied left to right through a
//! dialogue, so the preceding tag seen by turn `k` may already have been
//! rewritten by the same rule at turn `k - 1`. [`UpdateMode::Simultaneous`]
//! reads the preceding tag from the state before the rule was applied.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use sha2::{Digest, Sha256};

use crate::corpus::{Act, Corpus, BOD_LABEL};
use crate::counts::{contains_tokens, Phrase};
use crate::error::{Error, Result};

/// Tag of the utterance before the current one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrevTag {
    /// Beginning of dialogue: the utterance is turn 0.
    Bod,
    Act(Act),
}

impl fmt::Display for PrevTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrevTag::Bod => f.write_str(BOD_LABEL),
            PrevTag::Act(a) => a.fmt(f),
        }
    }
}

impl FromStr for PrevTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == BOD_LABEL {
            Ok(PrevTag::Bod)
        } else {
            Act::new(s).map(PrevTag::Act)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub from: Act,
    pub phrase: Option<Phrase>,
    pub prev: Option<PrevTag>,
    pub cos: Option<bool>,
    pub to: Act,
}

impl Rule {
    pub fn new(
        from: Act,
        phrase: Option<Phrase>,
        prev: Option<PrevTag>,
        cos: Option<bool>,
        to: Act,
    ) -> Result<Self> {
        let rule = Rule {
            from,
            phrase,
            prev,
            cos,
            to,
        };
        if rule.conditions() == 0 {
            return Err(Error::InvalidRule(format!("{rule}: no condition besides from")));
        }
        if rule.from == rule.to {
            return Err(Error::InvalidRule(format!("{rule}: from equals to")));
        }
        Ok(rule)
    }

    /// Number of conditions besides the current tag.
    pub fn conditions(&self) -> usize {
        self.phrase.is_some() as usize + self.prev.is_some() as usize + self.cos.is_some() as usize
    }

    fn acts(&self) -> impl Iterator<Item = &Act> {
        let prev = match &self.prev {
            Some(PrevTag::Act(a)) => Some(a),
            _ => None,
        };
        [Some(&self.from), prev, Some(&self.to)].into_iter().flatten()
    }
}

/// `from=<act> [phrase="<tokens>"] [prev=<act|BOD>] [cos=<t|f>] to=<act>`.
/// Inside the phrase, `"` and `\` are backslash-escaped.
impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "from={}", self.from)?;
        if let Some(phrase) = &self.phrase {
            f.write_str(" phrase=\"")?;
            for c in phrase.to_string().chars() {
                if c == '"' || c == '\\' {
                    f.write_str("\\")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("\"")?;
        }
        if let Some(prev) = &self.prev {
            write!(f, " prev={prev}")?;
        }
        if let Some(cos) = self.cos {
            write!(f, " cos={}", if cos { 't' } else { 'f' })?;
        }
        write!(f, " to={}", self.to)
    }
}

/// Condition sets a rule may use; every template also conditions on the
/// current tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Template {
    Phrase,
    Prev,
    Cos,
    PhrasePrev,
    PhraseCos,
    PrevCos,
}

impl Template {
    pub const ALL: [Template; 6] = [
        Template::Phrase,
        Template::Prev,
        Template::Cos,
        Template::PhrasePrev,
        Template::PhraseCos,
        Template::PrevCos,
    ];

    fn uses(self) -> (bool, bool, bool) {
        match self {
            Template::Phrase => (true, false, false),
            Template::Prev => (false, true, false),
            Template::Cos => (false, false, true),
            Template::PhrasePrev => (true, true, false),
            Template::PhraseCos => (true, false, true),
            Template::PrevCos => (false, true, true),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateMode {
    #[default]
    Sweep,
    Simultaneous,
}

impl UpdateMode {
    pub fn name(self) -> &'static str {
        match self {
            UpdateMode::Sweep => "sweep",
            UpdateMode::Simultaneous => "simultaneous",
        }
    }
}

impl FromStr for UpdateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(UpdateMode::Sweep),
            "simultaneous" => Ok(UpdateMode::Simultaneous),
            _ => Err(Error::InvalidRule(format!("unknown update mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Training stops once the best candidate's net gain drops below this.
    pub threshold: u32,
    pub templates: Vec<Template>,
    pub update: UpdateMode,
    pub max_rules: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            threshold: 2,
            templates: Template::ALL.to_vec(),
            update: UpdateMode::Sweep,
            max_rules: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnedRule {
    pub rule: Rule,
    pub gain: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub net_gain: u32,
    pub correct_after: usize,
    pub accuracy_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    pub default_tag: Act,
    /// Act inventory of the training corpus, sorted.
    pub acts: Vec<Act>,
    pub rules: Vec<LearnedRule>,
    pub update: UpdateMode,
    /// Size of the phrase set the model was trained with.
    pub phrase_count: usize,
    /// SHA-256 (hex) of the sorted phrase set, one phrase per line.
    pub phrase_digest: String,
    pub train_size: usize,
    /// Correct training tags under the default tag alone.
    pub initial_correct: usize,
}

impl TaggerModel {
    /// Checks that every rule is well formed and only mentions inventory acts.
    pub fn validate(&self) -> Result<()> {
        let known: BTreeSet<&Act> = self.acts.iter().collect();
        if !known.contains(&self.default_tag) {
            return Err(Error::UnknownAct(self.default_tag.to_string()));
        }
        for learned in &self.rules {
            let r = &learned.rule;
            Rule::new(r.from.clone(), r.phrase.clone(), r.prev.clone(), r.cos, r.to.clone())?;
            if let Some(act) = r.acts().find(|a| !known.contains(a)) {
                return Err(Error::UnknownAct(act.to_string()));
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> Vec<TraceStep> {
        let mut correct = self.initial_correct;
        self.rules
            .iter()
            .map(|learned| {
                correct += learned.gain as usize;
                TraceStep {
                    net_gain: learned.gain,
                    correct_after: correct,
                    accuracy_after: correct as f64 / self.train_size as f64,
                }
            })
            .collect()
    }

    /// Training accuracy after the last rule.
    pub fn training_accuracy(&self) -> f64 {
        let gained: usize = self.rules.iter().map(|r| r.gain as usize).sum();
        (self.initial_correct + gained) as f64 / self.train_size as f64
    }
}

pub fn phrase_set_digest(phrases: &[Phrase]) -> String {
    let sorted: BTreeSet<&Phrase> = phrases.iter().collect();
    let mut hasher = Sha256::new();
    for phrase in sorted {
        hasher.update(phrase.to_string().as_bytes());
        hasher.update(b"\n");
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// The features a rule can test on one utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureView {
    pub phrase_hits: BTreeSet<Phrase>,
    pub prev_tag: PrevTag,
    pub change_of_speaker: bool,
}

pub fn initial_tag(corpus: &Corpus, default_tag: &Act) -> Vec<Act> {
    vec![default_tag.clone(); corpus.len()]
}

/// Feature views in corpus order, reading the preceding tag from `tags`.
pub fn featurize(corpus: &Corpus, phrase_set: &[Phrase], tags: &[Act]) -> Vec<FeatureView> {
    let mut views = Vec::with_capacity(corpus.len());
    let mut position = 0;
    for dialogue in corpus.dialogues() {
        for (turn, utt) in dialogue.utterances.iter().enumerate() {
            let phrase_hits = phrase_set
                .iter()
                .filter(|p| contains_tokens(&utt.tokens, p.tokens()))
                .cloned()
                .collect();
            let (prev_tag, change_of_speaker) = if turn == 0 {
                (PrevTag::Bod, true)
            } else {
                (
                    PrevTag::Act(tags[position - 1].clone()),
                    dialogue.utterances[turn - 1].speaker != utt.speaker,
                )
            };
            views.push(FeatureView {
                phrase_hits,
                prev_tag,
                change_of_speaker,
            });
            position += 1;
        }
    }
    views
}

pub fn rule_matches(rule: &Rule, view: &FeatureView, current: &Act) -> bool {
    *current == rule.from
        && rule.phrase.as_ref().is_none_or(|p| view.phrase_hits.contains(p))
        && rule.prev.as_ref().is_none_or(|p| *p == view.prev_tag)
        && rule.cos.is_none_or(|c| c == view.change_of_speaker)
}

/// Fraction of positions where `predicted` equals `gold`.
pub fn accuracy(predicted: &[Act], gold: &[Act]) -> Result<f64> {
    if predicted.len() != gold.len() {
        return Err(Error::LengthMismatch {
            predicted: predicted.len(),
            gold: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let correct = predicted.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(correct as f64 / gold.len() as f64)
}

/// Tags `corpus` with the model: default tag, then each rule in order.
pub fn apply_rules(model: &TaggerModel, corpus: &Corpus) -> Result<Vec<Act>> {
    model.validate()?;
    let phrases: Vec<Phrase> = model
        .rules
        .iter()
        .filter_map(|r| r.rule.phrase.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let engine = Engine::new(corpus, &phrases, &model.acts);
    let default = engine.act_index(&model.default_tag).expect("validated");
    let mut tags = vec![default; engine.len()];
    for learned in &model.rules {
        let cand = engine.encode(&learned.rule).expect("validated");
        engine.apply(&mut tags, &cand, model.update);
    }
    Ok(tags.into_iter().map(|t| model.acts[t as usize].clone()).collect())
}

/// Greedy rule learning. Candidates are instantiated from the features of
/// currently mistagged utterances and scored by exact net gain over the whole
/// training corpus; ties go to fewer conditions, then the serialized rule.
pub fn train(corpus: &Corpus, phrase_set: &[Phrase], config: &TrainConfig) -> Result<TaggerModel> {
    if config.threshold == 0 {
        return Err(Error::InvalidThreshold);
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let acts = corpus.act_inventory().to_vec();
    let phrases: Vec<Phrase> = phrase_set
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let engine = Engine::new(corpus, &phrases, &acts);

    let mut frequency = vec![0usize; acts.len()];
    for &g in &engine.gold {
        frequency[g as usize] += 1;
    }
    // first maximum in sorted inventory order
    let default = frequency
        .iter()
        .enumerate()
        .fold(0, |best, (i, &f)| if f > frequency[best] { i } else { best }) as u16;
    let mut tags = vec![default; engine.len()];
    let initial_correct = frequency[default as usize];
    let mut correct = initial_correct;

    let mut rules = Vec::new();
    while config.max_rules.is_none_or(|m| rules.len() < m) {
        let Some((cand, gain)) = engine.best_candidate(&tags, config) else {
            break;
        };
        if gain < config.threshold as i64 {
            break;
        }
        let delta = engine.apply(&mut tags, &cand, config.update);
        debug_assert_eq!(delta, gain);
        correct = (correct as i64 + delta) as usize;
        rules.push(LearnedRule {
            rule: engine.decode(&cand),
            gain: gain as u32,
        });
    }
    debug_assert_eq!(
        correct,
        tags.iter().zip(&engine.gold).filter(|(t, g)| t == g).count()
    );

    let train_size = engine.len();
    Ok(TaggerModel {
        default_tag: acts[default as usize].clone(),
        acts,
        rules,
        update: config.update,
        phrase_count: phrases.len(),
        phrase_digest: phrase_set_digest(&phrases),
        train_size,
        initial_correct,
    })
}

const NO_PHRASE: u32 = u32::MAX;
const NO_PREV: u16 = u16::MAX;
const PREV_BOD: u16 = u16::MAX - 1;
const NO_COS: u8 = 2;
/// Gold label outside the model inventory; never equals a tag.
const UNKNOWN_ACT: u16 = u16::MAX;

/// A rule over interned acts and phrases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    from: u16,
    to: u16,
    phrase: u32,
    prev: u16,
    cos: u8,
}

impl Candidate {
    fn conditions(&self) -> usize {
        (self.phrase != NO_PHRASE) as usize + (self.prev != NO_PREV) as usize + (self.cos != NO_COS) as usize
    }
}

/// Flattened, interned view of a corpus for fast rule scoring.
struct Engine<'a> {
    acts: &'a [Act],
    phrases: &'a [Phrase],
    gold: Vec<u16>,
    first_turn: Vec<bool>,
    cos: Vec<bool>,
    /// phrase ids contained in each position, sorted
    hits: Vec<Vec<u32>>,
    /// positions containing each phrase, ascending
    occurrences: Vec<Vec<u32>>,
}

impl<'a> Engine<'a> {
    fn new(corpus: &Corpus, phrases: &'a [Phrase], acts: &'a [Act]) -> Self {
        let act_ids: BTreeMap<&Act, u16> = acts.iter().enumerate().map(|(i, a)| (a, i as u16)).collect();
        let lookup: BTreeMap<&[String], u32> = phrases
            .iter()
            .enumerate()
            .map(|(i, p)| (p.tokens(), i as u32))
            .collect();
        let max_len = phrases.iter().map(Phrase::len).max().unwrap_or(0);
        let n = corpus.len();
        let mut engine = Engine {
            acts,
            phrases,
            gold: Vec::with_capacity(n),
            first_turn: Vec::with_capacity(n),
            cos: Vec::with_capacity(n),
            hits: Vec::with_capacity(n),
            occurrences: vec![Vec::new(); phrases.len()],
        };
        for dialogue in corpus.dialogues() {
            for (turn, utt) in dialogue.utterances.iter().enumerate() {
                let position = engine.gold.len() as u32;
                engine
                    .gold
                    .push(act_ids.get(&utt.act).copied().unwrap_or(UNKNOWN_ACT));
                engine.first_turn.push(turn == 0);
                engine
                    .cos
                    .push(turn == 0 || dialogue.utterances[turn - 1].speaker != utt.speaker);
                let mut hits = Vec::new();
                for len in 1..=max_len.min(utt.tokens.len()) {
                    for window in utt.tokens.windows(len) {
                        if let Some(&id) = lookup.get(window) {
                            hits.push(id);
                        }
                    }
                }
                hits.sort_unstable();
                hits.dedup();
                for &id in &hits {
                    engine.occurrences[id as usize].push(position);
                }
                engine.hits.push(hits);
            }
        }
        engine
    }

    fn len(&self) -> usize {
        self.gold.len()
    }

    fn act_index(&self, act: &Act) -> Option<u16> {
        self.acts.iter().position(|a| a == act).map(|i| i as u16)
    }

    fn encode(&self, rule: &Rule) -> Option<Candidate> {
        let phrase = match &rule.phrase {
            Some(p) => self.phrases.binary_search(p).ok()? as u32,
            None => NO_PHRASE,
        };
        let prev = match &rule.prev {
            None => NO_PREV,
            Some(PrevTag::Bod) => PREV_BOD,
            Some(PrevTag::Act(a)) => self.act_index(a)?,
        };
        Some(Candidate {
            from: self.act_index(&rule.from)?,
            to: self.act_index(&rule.to)?,
            phrase,
            prev,
            cos: rule.cos.map_or(NO_COS, u8::from),
        })
    }

    fn decode(&self, cand: &Candidate) -> Rule {
        let act = |i: u16| self.acts[i as usize].clone();
        Rule {
            from: act(cand.from),
            phrase: (cand.phrase != NO_PHRASE).then(|| self.phrases[cand.phrase as usize].clone()),
            prev: match cand.prev {
                NO_PREV => None,
                PREV_BOD => Some(PrevTag::Bod),
                a => Some(PrevTag::Act(act(a))),
            },
            cos: (cand.cos != NO_COS).then_some(cand.cos == 1),
            to: act(cand.to),
        }
    }

    fn prev_code(&self, tags: &[u16], i: usize) -> u16 {
        if self.first_turn[i] {
            PREV_BOD
        } else {
            tags[i - 1]
        }
    }

    /// Positions where `cand` fires, in corpus order. `sites` must contain
    /// every position the rule could fire at, ascending.
    fn firing(&self, tags: &[u16], cand: &Candidate, mode: UpdateMode, sites: &[u32], mut fire: impl FnMut(usize)) {
        let mut last_fired = usize::MAX;
        for &site in sites {
            let i = site as usize;
            if tags[i] != cand.from {
                continue;
            }
            if cand.cos != NO_COS && self.cos[i] != (cand.cos == 1) {
                continue;
            }
            if cand.phrase != NO_PHRASE && self.hits[i].binary_search(&cand.phrase).is_err() {
                continue;
            }
            if cand.prev != NO_PREV {
                let prev = if mode == UpdateMode::Sweep && !self.first_turn[i] && last_fired == i - 1 {
                    cand.to
                } else {
                    self.prev_code(tags, i)
                };
                if prev != cand.prev {
                    continue;
                }
            }
            last_fired = i;
            fire(i);
        }
    }

    fn net_gain(&self, tags: &[u16], cand: &Candidate, mode: UpdateMode, sites: &[u32]) -> i64 {
        let mut gain = 0i64;
        self.firing(tags, cand, mode, sites, |i| {
            gain += (self.gold[i] == cand.to) as i64 - (self.gold[i] == cand.from) as i64;
        });
        gain
    }

    /// Applies one rule; returns the change in the number of correct tags.
    fn apply(&self, tags: &mut [u16], cand: &Candidate, mode: UpdateMode) -> i64 {
        let all: Vec<u32>;
        let sites: &[u32] = if cand.phrase != NO_PHRASE {
            &self.occurrences[cand.phrase as usize]
        } else {
            all = (0..self.len() as u32).collect();
            &all
        };
        let mut fired = Vec::new();
        self.firing(tags, cand, mode, sites, |i| fired.push(i));
        let mut delta = 0;
        for i in fired {
            delta += (self.gold[i] == cand.to) as i64 - (self.gold[i] == cand.from) as i64;
            tags[i] = cand.to;
        }
        delta
    }

    fn best_candidate(&self, tags: &[u16], config: &TrainConfig) -> Option<(Candidate, i64)> {
        let mut candidates = Vec::new();
        for i in 0..self.len() {
            let gold = self.gold[i];
            if tags[i] == gold || gold == UNKNOWN_ACT {
                continue;
            }
            let prev = self.prev_code(tags, i);
            let cos = self.cos[i] as u8;
            for &template in &config.templates {
                let (use_phrase, use_prev, use_cos) = template.uses();
                let base = Candidate {
                    from: tags[i],
                    to: gold,
                    phrase: NO_PHRASE,
                    prev: if use_prev { prev } else { NO_PREV },
                    cos: if use_cos { cos } else { NO_COS },
                };
                if use_phrase {
                    candidates.extend(self.hits[i].iter().map(|&phrase| Candidate { phrase, ..base }));
                } else {
                    candidates.push(base);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();

        let mut by_tag: Vec<Vec<u32>> = vec![Vec::new(); self.acts.len()];
        for (i, &t) in tags.iter().enumerate() {
            by_tag[t as usize].push(i as u32);
        }

        let mut best_gain = i64::MIN;
        let mut tied: Vec<Candidate> = Vec::new();
        for cand in candidates {
            let sites = if cand.phrase != NO_PHRASE {
                &self.occurrences[cand.phrase as usize]
            } else {
                &by_tag[cand.from as usize]
            };
            let gain = self.net_gain(tags, &cand, config.update, sites);
            if gain > best_gain {
                best_gain = gain;
                tied.clear();
                tied.push(cand);
            } else if gain == best_gain {
                tied.push(cand);
            }
        }
        if best_gain < config.threshold as i64 {
            return tied.first().map(|&c| (c, best_gain));
        }
        let fewest = tied.iter().map(Candidate::conditions).min()?;
        tied.into_iter()
            .filter(|c| c.conditions() == fewest)
            .map(|c| (self.decode(&c).to_string(), c))
            .min()
            .map(|(_, c)| (c, best_gain))
    }
}
