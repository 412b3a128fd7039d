//! Ranked phrase lists and filter audits.
//!
//! A ranked file starts with a `#metric=<m>\ttotal=<n>` line, where `total`
//! is the length of the list before any filtering (cutoff percentages are
//! taken of it), followed by rows of `rank`, `metric`, `score`,
//! `selected_act` (empty when unknown), `freq`, `phrase`. Scores use the
//! shortest decimal that reads back to the same `f64`.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use dacue_core::corpus::Act;
use dacue_core::counts::Phrase;
use dacue_core::filter::Removal;
use dacue_core::metrics::{Metric, RankedPhrase};

use super::{at_line, fields, numbered_lines};
use crate::error::{Error, Result};

pub const HEADER: &str = "#rank\tmetric\tscore\tselected_act\tfreq\tphrase";

#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub metric: Metric,
    /// Entries in the unfiltered ranking this list descends from.
    pub total: usize,
    pub entries: Vec<RankedPhrase>,
}

impl RankedList {
    pub fn new(metric: Metric, entries: Vec<RankedPhrase>) -> Self {
        RankedList {
            metric,
            total: entries.len(),
            entries,
        }
    }

    /// The same list with different entries and the original total.
    pub fn derived(&self, entries: Vec<RankedPhrase>) -> Self {
        RankedList {
            metric: self.metric,
            total: self.total,
            entries,
        }
    }

    pub fn phrases(&self) -> Vec<Phrase> {
        self.entries.iter().map(|e| e.phrase.clone()).collect()
    }
}

pub fn write_ranked<W: Write>(mut out: W, list: &RankedList) -> Result<()> {
    writeln!(out, "#metric={}\ttotal={}", list.metric, list.total)?;
    writeln!(out, "{HEADER}")?;
    for entry in &list.entries {
        let act = entry.selected_act.as_ref().map(Act::as_str).unwrap_or("");
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            entry.rank, list.metric, entry.score, act, entry.freq, entry.phrase
        )?;
    }
    Ok(())
}

pub fn parse_ranked<R: BufRead>(reader: R) -> Result<RankedList> {
    let mut metric: Option<Metric> = None;
    let mut total: Option<usize> = None;
    let mut entries: Vec<RankedPhrase> = Vec::new();
    let mut seen = BTreeSet::new();
    for line in numbered_lines(reader) {
        let (n, text) = line?;
        if text.trim().is_empty() || text == HEADER {
            continue;
        }
        if let Some(meta) = text.strip_prefix('#') {
            if !entries.is_empty() {
                continue;
            }
            for pair in meta.split('\t') {
                match pair.split_once('=') {
                    Some(("metric", m)) => metric = Some(at_line(n, m.parse())?),
                    Some(("total", t)) => {
                        total = Some(t.parse().map_err(|_| Error::parse(n, format!("bad total {t:?}")))?)
                    }
                    _ => {}
                }
            }
            continue;
        }
        let f = fields(n, &text, 6)?;
        let rank: usize = f[0]
            .parse()
            .map_err(|_| Error::parse(n, format!("bad rank {:?}", f[0])))?;
        if rank != entries.len() + 1 {
            return Err(Error::parse(n, format!("rank {rank} out of sequence")));
        }
        let row_metric: Metric = at_line(n, f[1].parse())?;
        match metric {
            None => metric = Some(row_metric),
            Some(m) if m != row_metric => {
                return Err(Error::parse(n, format!("metric {row_metric} in a {m} list")))
            }
            Some(_) => {}
        }
        let score: f64 = f[2]
            .parse()
            .map_err(|_| Error::parse(n, format!("bad score {:?}", f[2])))?;
        let selected_act = if f[3].is_empty() {
            None
        } else {
            Some(at_line(n, Act::new(f[3]))?)
        };
        let freq: u32 = f[4]
            .parse()
            .map_err(|_| Error::parse(n, format!("bad freq {:?}", f[4])))?;
        let phrase = at_line(n, Phrase::parse(f[5]))?;
        if !seen.insert(phrase.clone()) {
            return Err(Error::parse(n, format!("duplicate phrase \"{phrase}\"")));
        }
        entries.push(RankedPhrase {
            phrase,
            score,
            selected_act,
            rank,
            freq,
        });
    }
    let metric = metric.ok_or_else(|| Error::parse(0, "ranked list names no metric"))?;
    let total = total.unwrap_or(entries.len());
    if total < entries.len() {
        return Err(Error::parse(0, format!("total {total} is below the {} listed phrases", entries.len())));
    }
    Ok(RankedList {
        metric,
        total,
        entries,
    })
}

pub fn write_audit<W: Write>(mut out: W, removals: &[Removal]) -> Result<()> {
    writeln!(
        out,
        "#removed_phrase\tremoved_rank\tremoved_act\tblocking_subphrase\tblocking_rank\tblocking_act"
    )?;
    let act = |a: &Option<Act>| a.as_ref().map(|a| a.as_str().to_string()).unwrap_or_default();
    for r in removals {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.removed,
            r.removed_rank,
            act(&r.removed_act),
            r.blocker,
            r.blocker_rank,
            act(&r.blocker_act)
        )?;
    }
    Ok(())
}
