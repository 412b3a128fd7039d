use std::collections::BTreeMap;

use rayon::prelude::*;

use dacue_core::corpus::Corpus;
use dacue_core::counts::{build_table, extract_phrases, Phrase};
use dacue_core::filter::{frequency_band, lexical_filter};
use dacue_core::metrics::{cutoff_count, rank_all, RankedPhrase};
use dacue_core::tbl::{apply_rules, train, TrainConfig};

use super::{accuracy, per_dialogue_accuracy, welch_t_test, ExperimentResult, Filtering, Method, Significance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub methods: Vec<Method>,
    pub cutoffs: Vec<f64>,
    pub filters: Vec<Filtering>,
    pub train: TrainConfig,
    /// Longest extracted phrase, in tokens.
    pub max_len: usize,
    /// Phrase list for the `Lit` baseline.
    pub lit: Option<Vec<Phrase>>,
    /// Frequency band applied to every metric ranking before filtering.
    pub min_freq: Option<u32>,
    pub max_freq: Option<u32>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            methods: vec![Method::All],
            cutoffs: vec![100.0],
            filters: vec![Filtering::None],
            train: TrainConfig::default(),
            max_len: 3,
            lit: None,
            min_freq: None,
            max_freq: None,
        }
    }
}

/// The leading entries of a ranked list at `percent` of `total`, where
/// `total` is the length of the unfiltered ranking. A list shorter than the
/// cutoff is used whole.
pub fn take_cutoff(entries: &[RankedPhrase], total: usize, percent: f64) -> Result<&[RankedPhrase]> {
    let count = cutoff_count(total, percent)?;
    Ok(&entries[..count.min(entries.len())])
}

/// Trains on `train` with `phrases` and scores the tagger on `heldout`.
pub fn train_and_score(
    train_set: &Corpus,
    heldout: &Corpus,
    phrases: &[Phrase],
    config: &TrainConfig,
) -> Result<(f64, Vec<f64>)> {
    let model = train(train_set, phrases, config)?;
    let tags = apply_rules(&model, heldout)?;
    Ok((accuracy(&tags, &heldout.gold_tags())?, per_dialogue_accuracy(heldout, &tags)?))
}

struct Cell {
    method: Method,
    filter: Filtering,
    cutoff_percent: f64,
    set: usize,
}

/// Runs every (method, filter, cutoff) cell of the grid. Baselines ignore
/// the filter and cutoff axes and yield one `none`/100% row each. Identical
/// phrase sets are trained once; cells run in parallel on the current rayon
/// pool. Rows come back sorted by method, filter and cutoff.
pub fn run_sweep(train_set: &Corpus, heldout: &Corpus, config: &SweepConfig) -> Result<Vec<ExperimentResult>> {
    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();
    let mut filters = config.filters.clone();
    filters.sort();
    filters.dedup();
    let mut cutoffs = config.cutoffs.clone();
    cutoffs.sort_by(f64::total_cmp);
    cutoffs.dedup();
    for &c in &cutoffs {
        cutoff_count(0, c)?;
    }
    if methods.contains(&Method::Lit) && config.lit.is_none() {
        return Err(Error::Usage("the lit baseline needs a phrase list".into()));
    }
    if heldout.is_empty() {
        return Err(dacue_core::Error::EmptyCorpus.into());
    }

    let extracted: Vec<Phrase> = extract_phrases(train_set, config.max_len).into_iter().collect();
    let table = build_table(train_set, &extracted)?;

    let mut sets: Vec<Vec<Phrase>> = Vec::new();
    let mut index: BTreeMap<Vec<Phrase>, usize> = BTreeMap::new();
    let mut intern = |mut phrases: Vec<Phrase>| {
        phrases.sort();
        *index.entry(phrases.clone()).or_insert_with(|| {
            sets.push(phrases);
            sets.len() - 1
        })
    };

    let mut cells = Vec::new();
    for &method in &methods {
        match method {
            Method::All => cells.push(Cell {
                method,
                filter: Filtering::None,
                cutoff_percent: 100.0,
                set: intern(extracted.clone()),
            }),
            Method::Lit => cells.push(Cell {
                method,
                filter: Filtering::None,
                cutoff_percent: 100.0,
                set: intern(config.lit.clone().expect("checked above")),
            }),
            Method::Metric(metric) => {
                let ranked = frequency_band(&rank_all(&table, metric), config.min_freq, config.max_freq);
                for &filter in &filters {
                    let list = match filter.mode() {
                        None => ranked.clone(),
                        Some(mode) => lexical_filter(&ranked, mode)?,
                    };
                    for &cutoff_percent in &cutoffs {
                        let kept = take_cutoff(&list, ranked.len(), cutoff_percent)?;
                        cells.push(Cell {
                            method,
                            filter,
                            cutoff_percent,
                            set: intern(kept.iter().map(|e| e.phrase.clone()).collect()),
                        });
                    }
                }
            }
        }
    }

    let scores: Vec<(f64, Vec<f64>)> = sets
        .par_iter()
        .map(|phrases| train_and_score(train_set, heldout, phrases, &config.train))
        .collect::<Result<_>>()?;

    Ok(cells
        .into_iter()
        .map(|cell| ExperimentResult {
            method: cell.method,
            filter: cell.filter,
            cutoff_percent: cell.cutoff_percent,
            phrase_count: sets[cell.set].len(),
            accuracy: scores[cell.set].0,
            per_dialogue: scores[cell.set].1.clone(),
        })
        .collect())
}

/// Compares every result with the `baseline` row (method `baseline`, filter
/// `none`, 100%) using Welch's t test on per-dialogue accuracy.
pub fn significance(results: &[ExperimentResult], baseline: Method) -> Vec<Significance> {
    let Some(base) = results
        .iter()
        .find(|r| r.method == baseline && r.filter == Filtering::None && r.cutoff_percent == 100.0)
    else {
        return Vec::new();
    };
    results
        .iter()
        .filter(|r| !std::ptr::eq(*r, base))
        .map(|r| Significance {
            method: r.method,
            filter: r.filter,
            cutoff_percent: r.cutoff_percent,
            baseline,
            test: welch_t_test(&r.per_dialogue, &base.per_dialogue).map_err(|e| e.to_string()),
        })
        .collect()
}
