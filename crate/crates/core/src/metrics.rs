//! The nine phrase-selection metrics, their selected dialogue act, and
//! deterministic ranking.
//!
//! Every metric is computed from the integer counts in a [`PhraseTable`];
//! logarithms are base 2 and `0 * log2(0)` is taken to be 0.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::corpus::Act;
use crate::counts::{Phrase, PhraseId, PhraseTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    /// Maximum joint count, `max_d #(p&d)`.
    Cooc,
    /// Maximum conditional probability, `max_d P(p|d)`.
    Cp,
    /// Entropy of the act distribution given the phrase.
    Ent,
    /// t-test style distance between the prior and phrase-conditioned act distributions.
    Ttest,
    /// Mutual information, `P(p) * S(p)`.
    Mi,
    /// Selectional preference strength (KL divergence from the act prior).
    S,
    /// Information gain, exactly as `Σ_d [P(p)P(d&p)log P(d&p) + P(p̄)P(d&p̄)log P(d&p̄) − P(d)log P(d)]`.
    Ig,
    /// Deviation: unsoundness plus incompleteness of `p IFF d*`, as counts.
    D,
    /// Deviation with conditional probabilities in place of counts.
    Dcp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    HigherIsBetter,
    LowerIsBetter,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::Cooc,
        Metric::Cp,
        Metric::Ent,
        Metric::Ttest,
        Metric::Mi,
        Metric::S,
        Metric::Ig,
        Metric::D,
        Metric::Dcp,
    ];

    pub fn abbrev(self) -> &'static str {
        match self {
            Metric::Cooc => "cooc",
            Metric::Cp => "cp",
            Metric::Ent => "ent",
            Metric::Ttest => "ttest",
            Metric::Mi => "mi",
            Metric::S => "s",
            Metric::Ig => "ig",
            Metric::D => "d",
            Metric::Dcp => "dcp",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Metric::Ent | Metric::D | Metric::Dcp => Direction::LowerIsBetter,
            _ => Direction::HigherIsBetter,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbrev())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.abbrev().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownMetric(s.to_string()))
    }
}

/// A metric value together with the act that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub score: f64,
    /// Index into the table's act inventory.
    pub selected_act: usize,
    /// TTEST terms dropped because their denominator was exactly zero.
    pub skipped_terms: u32,
}

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * libm::log2(x)
    } else {
        0.0
    }
}

/// Index of the first maximum; ties go to the earlier act.
fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

fn argmin(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, v) in values.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// Scores a phrase already known to the table.
pub fn evaluate(table: &PhraseTable, p: PhraseId, metric: Metric) -> Evaluation {
    let acts = 0..table.num_acts();
    let simple = |(selected_act, score): (usize, f64)| Evaluation {
        score,
        selected_act,
        skipped_terms: 0,
    };
    match metric {
        Metric::Cooc => simple(argmax(acts.map(|d| table.joint(p, d) as f64))),
        Metric::Cp => simple(argmax(acts.map(|d| table.p_phrase_given_act(p, d)))),
        Metric::Ent => {
            let terms: Vec<f64> = acts
                .map(|d| -xlog2x(table.p_act_given_phrase(p, d)))
                .collect();
            // A phrase seen with one act only has all-zero terms; prefer the
            // act it was seen with over inventory order.
            let selected_act = (0..terms.len())
                .fold(0, |best, d| {
                    let key = |i: usize| (terms[i], table.joint(p, i));
                    if key(d) > key(best) {
                        d
                    } else {
                        best
                    }
                });
            simple((selected_act, terms.iter().sum()))
        }
        Metric::S | Metric::Mi => {
            let terms: Vec<f64> = acts.map(|d| kl_term(table, p, d)).collect();
            let (selected_act, _) = argmax(terms.iter().copied());
            let s: f64 = terms.iter().sum();
            let score = if metric == Metric::Mi {
                table.p_phrase(p) * s
            } else {
                s
            };
            simple((selected_act, score))
        }
        Metric::Ttest => ttest(table, p),
        Metric::Ig => {
            let (pp, pn) = (table.p_phrase(p), table.p_absent(p));
            let terms: Vec<f64> = acts
                .map(|d| {
                    pp * xlog2x(table.p_joint(p, d)) + pn * xlog2x(table.p_absent_joint(p, d))
                        - xlog2x(table.p_act(d))
                })
                .collect();
            let (selected_act, _) = argmax(terms.iter().copied());
            simple((selected_act, terms.iter().sum()))
        }
        Metric::D => {
            let present = table.phrase_count(p);
            simple(argmin(acts.map(|d| {
                let unsound = present - table.joint(p, d);
                let incomplete = table.absent_joint(p, d);
                (unsound + incomplete) as f64
            })))
        }
        Metric::Dcp => {
            let n = table.num_acts();
            simple(argmin(acts.map(|star| {
                let unsound: f64 = (0..n)
                    .filter(|&d| d != star)
                    .map(|d| table.p_phrase_given_act(p, d))
                    .sum();
                table.p_absent_given_act(p, star) + unsound
            })))
        }
    }
}

fn kl_term(table: &PhraseTable, p: PhraseId, d: usize) -> f64 {
    let q = table.p_act_given_phrase(p, d);
    if q > 0.0 {
        q * (libm::log2(q) - libm::log2(table.p_act(d)))
    } else {
        0.0
    }
}

fn ttest(table: &PhraseTable, p: PhraseId) -> Evaluation {
    let n = table.num_acts() as i64;
    let present = table.phrase_count(p) as i64;
    let total = table.total() as i64;
    let numerator = (n * n - n) as f64;
    let mut skipped = 0;
    let mut terms = Vec::with_capacity(table.num_acts());
    for d in 0..table.num_acts() {
        let a = n * table.joint(p, d) as i64 - present;
        let b = n * table.act_count(d) as i64 - total;
        let denominator = a * a + b * b;
        if denominator == 0 {
            skipped += 1;
            terms.push(f64::NEG_INFINITY);
        } else {
            terms.push(numerator / denominator as f64);
        }
    }
    let (selected_act, _) = argmax(terms.iter().copied());
    let sum: f64 = terms.iter().filter(|t| t.is_finite()).sum();
    let absent = table.absent_count(p);
    let score = if absent == 0 {
        0.0
    } else {
        absent as f64 * libm::sqrt(sum)
    };
    Evaluation {
        score,
        selected_act,
        skipped_terms: skipped,
    }
}

pub fn score_phrase(table: &PhraseTable, phrase: &Phrase, metric: Metric) -> Result<f64> {
    Ok(evaluate(table, table.require(phrase)?, metric).score)
}

/// The act `d*` a metric selects for a phrase: the extremizing act for the
/// max/min metrics, otherwise the act with the largest per-act summand.
pub fn selected_act<'t>(table: &'t PhraseTable, phrase: &Phrase, metric: Metric) -> Result<&'t Act> {
    let eval = evaluate(table, table.require(phrase)?, metric);
    Ok(&table.acts()[eval.selected_act])
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedPhrase {
    pub phrase: Phrase,
    pub score: f64,
    pub selected_act: Option<Act>,
    /// 1-based.
    pub rank: usize,
    /// `#(p)`
    pub freq: u32,
}

/// Better score first, then higher frequency, then fewer tokens, then the
/// space-joined text.
pub fn compare_ranked(direction: Direction, a: &RankedPhrase, b: &RankedPhrase) -> Ordering {
    let by_score = match direction {
        Direction::HigherIsBetter => b.score.total_cmp(&a.score),
        Direction::LowerIsBetter => a.score.total_cmp(&b.score),
    };
    by_score
        .then_with(|| b.freq.cmp(&a.freq))
        .then_with(|| a.phrase.len().cmp(&b.phrase.len()))
        .then_with(|| a.phrase.cmp(&b.phrase))
}

/// Sorts scored entries and assigns ranks 1..N.
pub fn order_ranked(mut entries: Vec<RankedPhrase>, direction: Direction) -> Vec<RankedPhrase> {
    entries.sort_by(|a, b| compare_ranked(direction, a, b));
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    entries
}

pub fn rank_phrases<'a, I>(table: &PhraseTable, phrases: I, metric: Metric) -> Result<Vec<RankedPhrase>>
where
    I: IntoIterator<Item = &'a Phrase>,
{
    let mut ids = phrases
        .into_iter()
        .map(|p| table.require(p))
        .collect::<Result<Vec<_>>>()?;
    ids.sort_unstable();
    ids.dedup();
    Ok(rank_ids(table, ids, metric))
}

/// Ranks every phrase stored in the table.
pub fn rank_all(table: &PhraseTable, metric: Metric) -> Vec<RankedPhrase> {
    rank_ids(table, 0..table.len(), metric)
}

fn rank_ids(table: &PhraseTable, ids: impl IntoIterator<Item = PhraseId>, metric: Metric) -> Vec<RankedPhrase> {
    let entries = ids
        .into_iter()
        .map(|p| {
            let eval = evaluate(table, p, metric);
            RankedPhrase {
                phrase: table.phrase(p).clone(),
                score: eval.score,
                selected_act: Some(table.acts()[eval.selected_act].clone()),
                rank: 0,
                freq: table.phrase_count(p),
            }
        })
        .collect();
    order_ranked(entries, metric.direction())
}

/// `ceil(total * percent / 100)`.
pub fn cutoff_count(total: usize, percent: f64) -> Result<usize> {
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(Error::InvalidPercent(percent));
    }
    // absorb representation error such as 1000 * 0.07 = 70.00000000000001
    let exact = total as f64 * percent / 100.0;
    let count = libm::ceil(exact - 1e-9 * exact.max(1.0));
    Ok((count as usize).min(total))
}

/// Keeps the top `ceil(N * percent / 100)` entries.
pub fn cutoff(ranked: &[RankedPhrase], percent: f64) -> Result<Vec<RankedPhrase>> {
    let keep = cutoff_count(ranked.len(), percent)?;
    Ok(ranked[..keep].to_vec())
}

impl fmt::Display for RankedPhrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let act = self
            .selected_act
            .as_ref()
            .map(|a| a.to_string())
            .unwrap_or_default();
        write!(f, "{}\t{}\t{}\t{}\t{}", self.rank, self.score, act, self.freq, self.phrase)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::{build_table, extract_phrases};
    use crate::fixtures::{c1, corpus_from};

    fn p(s: &str) -> Phrase {
        Phrase::parse(s).unwrap()
    }

    fn c1_table() -> PhraseTable {
        let corpus = c1();
        build_table(&corpus, &extract_phrases(&corpus, 3)).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-6
    }

    #[test]
    fn c1_fixture_values() {
        let t = c1_table();
        let x = p("x");
        let s = |m| score_phrase(&t, &x, m).unwrap();
        assert_eq!(s(Metric::Cooc), 2.0);
        assert!(close(s(Metric::Cp), 2.0 / 3.0));
        assert_eq!(s(Metric::Ent), 0.0);
        assert!(close(s(Metric::S), 0.415037));
        assert!(close(s(Metric::Mi), 0.207519));
        assert!(close(s(Metric::Ttest), core::f64::consts::SQRT_2));
        assert!(close(s(Metric::Ig), 0.061278));
        assert_eq!(s(Metric::D), 1.0);
        assert!(close(s(Metric::Dcp), 1.0 / 3.0));
        for m in [Metric::D, Metric::Cp, Metric::Dcp, Metric::Cooc] {
            assert_eq!(selected_act(&t, &x, m).unwrap().as_str(), "A");
        }
    }

    #[test]
    fn perfect_cue_scores() {
        // "q" appears in every B utterance and nowhere else
        let corpus = corpus_from(&[("q z", "B"), ("q", "B"), ("z", "A"), ("y", "A"), ("y z", "C")]);
        let t = build_table(&corpus, &extract_phrases(&corpus, 3)).unwrap();
        let q = p("q");
        assert_eq!(score_phrase(&t, &q, Metric::Ent).unwrap(), 0.0);
        assert_eq!(score_phrase(&t, &q, Metric::D).unwrap(), 0.0);
        assert_eq!(score_phrase(&t, &q, Metric::Dcp).unwrap(), 0.0);
        assert_eq!(score_phrase(&t, &q, Metric::Cp).unwrap(), 1.0);
        for m in [Metric::Cooc, Metric::Cp, Metric::Ent, Metric::S, Metric::Mi, Metric::Ig, Metric::D, Metric::Dcp] {
            assert_eq!(selected_act(&t, &q, m).unwrap().as_str(), "B", "{m}");
        }
        // TTEST's largest per-act term belongs to A here: 6/(4+1) > 6/(16+1)
        assert_eq!(selected_act(&t, &q, Metric::Ttest).unwrap().as_str(), "A");
    }

    #[test]
    fn unknown_phrase_is_an_error() {
        let t = c1_table();
        assert!(matches!(
            score_phrase(&t, &p("nope"), Metric::Cooc),
            Err(Error::UnknownPhrase(_))
        ));
        assert!(selected_act(&t, &p("nope"), Metric::D).is_err());
        assert!(rank_phrases(&t, &[p("nope")], Metric::D).is_err());
    }

    #[test]
    fn ttest_is_zero_for_ubiquitous_phrase() {
        let corpus = corpus_from(&[("a b", "X"), ("a", "Y"), ("a c", "Y")]);
        let t = build_table(&corpus, &[p("a")]).unwrap();
        assert_eq!(score_phrase(&t, &p("a"), Metric::Ttest).unwrap(), 0.0);
    }

    #[test]
    fn ttest_skips_zero_denominators() {
        // D=2, U=4, #(A)=#(B)=2, #(p)=2 with one hit per act: every term 0/0
        let corpus = corpus_from(&[("p", "A"), ("q", "A"), ("p", "B"), ("r", "B")]);
        let t = build_table(&corpus, &[p("p")]).unwrap();
        let e = evaluate(&t, 0, Metric::Ttest);
        assert_eq!(e.skipped_terms, 2);
        assert_eq!(e.score, 0.0);
    }

    #[test]
    fn dcp_ranks_perfect_cue_above_x() {
        let corpus = c1();
        let t = build_table(&corpus, &extract_phrases(&corpus, 3)).unwrap();
        let ranked = rank_all(&t, Metric::Dcp);
        let pos = |s: &str| ranked.iter().position(|r| r.phrase == p(s)).unwrap();
        // "c d" is the only B utterance and occurs nowhere else
        assert_eq!(ranked[pos("c d")].score, 0.0);
        assert!(pos("c d") < pos("x"));
        assert_eq!(ranked.iter().map(|r| r.rank).collect::<Vec<_>>(), (1..=ranked.len()).collect::<Vec<_>>());
    }

    #[test]
    fn ties_prefer_shorter_phrases() {
        let corpus = corpus_from(&[("a b c", "A"), ("z", "B")]);
        let t = build_table(&corpus, &extract_phrases(&corpus, 3)).unwrap();
        let ranked = rank_phrases(&t, &[p("a b c"), p("a b")], Metric::Cooc).unwrap();
        assert_eq!(ranked[0].phrase, p("a b"));
        assert_eq!(ranked[1].phrase, p("a b c"));
        assert_eq!(ranked, rank_phrases(&t, &[p("a b"), p("a b c")], Metric::Cooc).unwrap());
    }

    #[test]
    fn cutoff_counts() {
        assert_eq!(cutoff_count(14231, 25.0).unwrap(), 3558);
        assert_eq!(cutoff_count(14231, 5.0).unwrap(), 712);
        assert_eq!(cutoff_count(100, 7.0).unwrap(), 7);
        assert_eq!(cutoff_count(1000, 0.1).unwrap(), 1);
        assert_eq!(cutoff_count(3, 100.0).unwrap(), 3);
        assert_eq!(cutoff_count(3, 1.0).unwrap(), 1);
        assert!(cutoff_count(3, 0.0).is_err());
        assert!(cutoff_count(3, 100.5).is_err());
        let ranked = rank_all(&c1_table(), Metric::Cp);
        assert_eq!(cutoff(&ranked, 100.0).unwrap(), ranked);
    }

    #[test]
    fn metric_names_round_trip() {
        for m in Metric::ALL {
            assert_eq!(m.abbrev().parse::<Metric>().unwrap(), m);
        }
        assert!("bogus".parse::<Metric>().is_err());
        assert_eq!(Metric::D.direction(), Direction::LowerIsBetter);
        assert_eq!(Metric::Ttest.direction(), Direction::HigherIsBetter);
    }
}
