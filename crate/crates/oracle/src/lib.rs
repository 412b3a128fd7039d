//! Naive reference computations for cross-checking `dacue-core`.
//!
//! Everything here works on plain strings and loops over utterances
//! directly: no shared code, no precomputed tables. Probabilities are
//! relative frequencies recomputed from scratch for each term.

/// One labeled utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utt {
    pub tokens: Vec<String>,
    pub act: String,
}

impl Utt {
    pub fn new(text: &str, act: &str) -> Self {
        Utt {
            tokens: text.split_whitespace().map(str::to_string).collect(),
            act: act.to_string(),
        }
    }
}

pub fn contains(tokens: &[String], phrase: &[String]) -> bool {
    if phrase.is_empty() || phrase.len() > tokens.len() {
        return false;
    }
    let mut start = 0;
    while start + phrase.len() <= tokens.len() {
        let mut all = true;
        for k in 0..phrase.len() {
            if tokens[start + k] != phrase[k] {
                all = false;
                break;
            }
        }
        if all {
            return true;
        }
        start += 1;
    }
    false
}

/// Sorted distinct acts.
pub fn acts(corpus: &[Utt]) -> Vec<String> {
    let mut acts: Vec<String> = corpus.iter().map(|u| u.act.clone()).collect();
    acts.sort();
    acts.dedup();
    acts
}

/// Distinct n-grams of length 1..=max_len.
pub fn all_phrases(corpus: &[Utt], max_len: usize) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for u in corpus {
        for start in 0..u.tokens.len() {
            for len in 1..=max_len {
                if start + len <= u.tokens.len() {
                    out.push(u.tokens[start..start + len].to_vec());
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// #(p&d)
pub fn joint(corpus: &[Utt], phrase: &[String], act: &str) -> u32 {
    corpus
        .iter()
        .filter(|u| u.act == act && contains(&u.tokens, phrase))
        .count() as u32
}

/// #(p)
pub fn phrase_count(corpus: &[Utt], phrase: &[String]) -> u32 {
    corpus.iter().filter(|u| contains(&u.tokens, phrase)).count() as u32
}

/// #(d)
pub fn act_count(corpus: &[Utt], act: &str) -> u32 {
    corpus.iter().filter(|u| u.act == act).count() as u32
}

/// #(p̄&d)
pub fn absent_joint(corpus: &[Utt], phrase: &[String], act: &str) -> u32 {
    corpus
        .iter()
        .filter(|u| u.act == act && !contains(&u.tokens, phrase))
        .count() as u32
}

fn plog(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

struct Probs<'a> {
    corpus: &'a [Utt],
    phrase: &'a [String],
}

impl Probs<'_> {
    fn u(&self) -> f64 {
        self.corpus.len() as f64
    }
    fn p_p(&self) -> f64 {
        phrase_count(self.corpus, self.phrase) as f64 / self.u()
    }
    fn p_notp(&self) -> f64 {
        1.0 - self.p_p()
    }
    fn p_d(&self, d: &str) -> f64 {
        act_count(self.corpus, d) as f64 / self.u()
    }
    fn p_d_given_p(&self, d: &str) -> f64 {
        joint(self.corpus, self.phrase, d) as f64 / phrase_count(self.corpus, self.phrase) as f64
    }
    fn p_p_given_d(&self, d: &str) -> f64 {
        joint(self.corpus, self.phrase, d) as f64 / act_count(self.corpus, d) as f64
    }
    fn p_notp_given_d(&self, d: &str) -> f64 {
        absent_joint(self.corpus, self.phrase, d) as f64 / act_count(self.corpus, d) as f64
    }
    fn p_d_and_p(&self, d: &str) -> f64 {
        joint(self.corpus, self.phrase, d) as f64 / self.u()
    }
    fn p_d_and_notp(&self, d: &str) -> f64 {
        absent_joint(self.corpus, self.phrase, d) as f64 / self.u()
    }
}

pub fn cooc(corpus: &[Utt], phrase: &[String]) -> f64 {
    acts(corpus)
        .iter()
        .map(|d| joint(corpus, phrase, d) as f64)
        .fold(f64::MIN, f64::max)
}

pub fn cp(corpus: &[Utt], phrase: &[String]) -> f64 {
    let pr = Probs { corpus, phrase };
    acts(corpus)
        .iter()
        .map(|d| pr.p_p_given_d(d))
        .fold(f64::MIN, f64::max)
}

pub fn ent(corpus: &[Utt], phrase: &[String]) -> f64 {
    let pr = Probs { corpus, phrase };
    -acts(corpus).iter().map(|d| plog(pr.p_d_given_p(d))).sum::<f64>()
}

pub fn s(corpus: &[Utt], phrase: &[String]) -> f64 {
    let pr = Probs { corpus, phrase };
    acts(corpus)
        .iter()
        .map(|d| {
            let q = pr.p_d_given_p(d);
            if q == 0.0 {
                0.0
            } else {
                q * (q.log2() - pr.p_d(d).log2())
            }
        })
        .sum()
}

pub fn mi(corpus: &[Utt], phrase: &[String]) -> f64 {
    let pr = Probs { corpus, phrase };
    pr.p_p() * s(corpus, phrase)
}

/// Zero-denominator terms are skipped; a phrase in every utterance scores 0.
pub fn ttest(corpus: &[Utt], phrase: &[String]) -> f64 {
    let all = acts(corpus);
    let big_d = all.len() as f64;
    let u = corpus.len() as f64;
    let p = phrase_count(corpus, phrase) as f64;
    let not_p = u - p;
    let mut sum = 0.0;
    for d in &all {
        let a = big_d * joint(corpus, phrase, d) as f64 - p;
        let b = big_d * act_count(corpus, d) as f64 - u;
        let den = a * a + b * b;
        if den != 0.0 {
            sum += (big_d * big_d - big_d) / den;
        }
    }
    not_p * sum.sqrt()
}

/// The information gain formula as printed, with its extra P(p) weighting.
pub fn ig(corpus: &[Utt], phrase: &[String]) -> f64 {
    let pr = Probs { corpus, phrase };
    acts(corpus)
        .iter()
        .map(|d| {
            pr.p_p() * plog(pr.p_d_and_p(d)) + pr.p_notp() * plog(pr.p_d_and_notp(d)) - plog(pr.p_d(d))
        })
        .sum()
}

/// Textbook information gain H(D) - H(D | presence of p), for comparison only.
pub fn textbook_ig(corpus: &[Utt], phrase: &[String]) -> f64 {
    let pr = Probs { corpus, phrase };
    let all = acts(corpus);
    let h_d = -all.iter().map(|d| plog(pr.p_d(d))).sum::<f64>();
    let h_given_p = -all.iter().map(|d| plog(pr.p_d_given_p(d))).sum::<f64>();
    let h_given_notp = if pr.p_notp() == 0.0 {
        0.0
    } else {
        -all
            .iter()
            .map(|d| plog(pr.p_d_and_notp(d) / pr.p_notp()))
            .sum::<f64>()
    };
    h_d - pr.p_p() * h_given_p - pr.p_notp() * h_given_notp
}

/// D by counting, for each candidate act, the utterances where
/// "p IFF d*" fails. Returns (score, first minimizing act).
pub fn deviation(corpus: &[Utt], phrase: &[String]) -> (f64, String) {
    let mut best: Option<(u32, String)> = None;
    for star in acts(corpus) {
        let failures = corpus
            .iter()
            .filter(|u| contains(&u.tokens, phrase) != (u.act == star))
            .count() as u32;
        if best.as_ref().is_none_or(|(f, _)| failures < *f) {
            best = Some((failures, star));
        }
    }
    let (f, a) = best.expect("non-empty corpus");
    (f as f64, a)
}

pub fn dcp(corpus: &[Utt], phrase: &[String]) -> f64 {
    let pr = Probs { corpus, phrase };
    let all = acts(corpus);
    all.iter()
        .map(|star| {
            let mut total = pr.p_notp_given_d(star);
            for d in &all {
                if d != star {
                    total += pr.p_p_given_d(d);
                }
            }
            total
        })
        .fold(f64::MAX, f64::min)
}

/// Metric by lowercase abbreviation.
pub fn metric(name: &str, corpus: &[Utt], phrase: &[String]) -> f64 {
    match name {
        "cooc" => cooc(corpus, phrase),
        "cp" => cp(corpus, phrase),
        "ent" => ent(corpus, phrase),
        "s" => s(corpus, phrase),
        "mi" => mi(corpus, phrase),
        "ttest" => ttest(corpus, phrase),
        "ig" => ig(corpus, phrase),
        "d" => deviation(corpus, phrase).0,
        "dcp" => dcp(corpus, phrase),
        other => panic!("unknown metric {other}"),
    }
}

/// True when `phrase` occurs in all and only the utterances of one act.
pub fn is_perfect_cue(corpus: &[Utt], phrase: &[String]) -> bool {
    acts(corpus).iter().any(|d| {
        corpus
            .iter()
            .all(|u| contains(&u.tokens, phrase) == (u.act == *d))
    })
}

/// One ranked entry: tokens and optional selected act.
pub type Entry = (Vec<String>, Option<String>);

fn is_proper_contiguous_sub(sub: &[String], of: &[String]) -> bool {
    sub.len() < of.len() && contains(of, sub)
}

/// Survivors that still have a higher-ranked (and, if `same_act`, same-act)
/// proper contiguous subphrase somewhere in the original ranking.
pub fn filter_violations(original: &[Entry], survivors: &[Entry], same_act: bool) -> Vec<Vec<String>> {
    let mut bad = Vec::new();
    for (tokens, act) in survivors {
        let pos = original
            .iter()
            .position(|(t, _)| t == tokens)
            .expect("survivor comes from the original list");
        let blocked = original[..pos]
            .iter()
            .any(|(t, a)| is_proper_contiguous_sub(t, tokens) && (!same_act || a == act));
        if blocked {
            bad.push(tokens.clone());
        }
    }
    bad
}

/// Entries the filter should have kept but did not.
pub fn filter_overkill(original: &[Entry], survivors: &[Entry], same_act: bool) -> Vec<Vec<String>> {
    original
        .iter()
        .enumerate()
        .filter(|(pos, (tokens, act))| {
            let blocked = original[..*pos]
                .iter()
                .any(|(t, a)| is_proper_contiguous_sub(t, tokens) && (!same_act || a == act));
            !blocked && !survivors.iter().any(|(t, _)| t == tokens)
        })
        .map(|(_, (t, _))| t.clone())
        .collect()
}
