//! Tagger model files.
//!
//! ```text
//! #dacue-model 1
//! default_tag=Suggest
//! acts=Accept Bye Greet Suggest
//! update=sweep
//! phrase_set=712 sha256=<hex>
//! train_size=2701 initial_correct=640
//! from=Suggest phrase="see you" to=Bye gain=41
//! from=Accept prev=BOD cos=t to=Greet gain=12
//! ```
//!
//! Rule lines keep the order the rules were learned in. The header pins the
//! phrase set by size and digest and carries enough to rebuild the training
//! trace from the per-rule gains.

use std::io::{BufRead, Write};

use dacue_core::corpus::Act;
use dacue_core::counts::Phrase;
use dacue_core::tbl::{LearnedRule, PrevTag, Rule, TaggerModel, UpdateMode};

use super::{at_line, numbered_lines};
use crate::error::{Error, Result};

pub const MAGIC: &str = "#dacue-model 1";

pub fn write_model<W: Write>(mut out: W, model: &TaggerModel) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "default_tag={}", model.default_tag)?;
    let acts: Vec<&str> = model.acts.iter().map(Act::as_str).collect();
    writeln!(out, "acts={}", acts.join(" "))?;
    writeln!(out, "update={}", model.update.name())?;
    writeln!(out, "phrase_set={} sha256={}", model.phrase_count, model.phrase_digest)?;
    writeln!(
        out,
        "train_size={} initial_correct={}",
        model.train_size, model.initial_correct
    )?;
    for learned in &model.rules {
        writeln!(out, "{} gain={}", learned.rule, learned.gain)?;
    }
    Ok(())
}

pub fn parse_model<R: BufRead>(reader: R) -> Result<TaggerModel> {
    let mut lines = numbered_lines(reader).filter(|l| !matches!(l, Ok((_, t)) if t.trim().is_empty()));
    match lines.next() {
        Some(Ok((_, first))) if first == MAGIC => {}
        Some(Ok((n, _))) => return Err(Error::parse(n, format!("expected {MAGIC:?}"))),
        Some(Err(e)) => return Err(e),
        None => return Err(Error::parse(1, "empty model file")),
    }
    let mut header = Header::default();
    let mut rules = Vec::new();
    for line in lines {
        let (n, text) = line?;
        if text.starts_with('#') {
            continue;
        }
        if text.starts_with("from=") {
            rules.push(parse_rule_line(n, &text)?);
            continue;
        }
        if !rules.is_empty() {
            return Err(Error::parse(n, "header line after the first rule"));
        }
        for (key, value) in pairs(n, &text)? {
            header.set(n, key, value)?;
        }
    }
    let missing = |what: &str| Error::parse(0, format!("model header lacks {what}"));
    let model = TaggerModel {
        default_tag: header.default_tag.ok_or_else(|| missing("default_tag"))?,
        acts: header.acts.ok_or_else(|| missing("acts"))?,
        rules,
        update: header.update.ok_or_else(|| missing("update"))?,
        phrase_count: header.phrase_count.ok_or_else(|| missing("phrase_set"))?,
        phrase_digest: header.digest.ok_or_else(|| missing("sha256"))?,
        train_size: header.train_size.ok_or_else(|| missing("train_size"))?,
        initial_correct: header.initial_correct.ok_or_else(|| missing("initial_correct"))?,
    };
    model.validate()?;
    let gained: usize = model.rules.iter().map(|r| r.gain as usize).sum();
    if model.train_size == 0 || model.initial_correct + gained > model.train_size {
        return Err(Error::parse(0, "gains exceed the training set size"));
    }
    Ok(model)
}

#[derive(Default)]
struct Header {
    default_tag: Option<Act>,
    acts: Option<Vec<Act>>,
    update: Option<UpdateMode>,
    phrase_count: Option<usize>,
    digest: Option<String>,
    train_size: Option<usize>,
    initial_correct: Option<usize>,
}

impl Header {
    fn set(&mut self, n: usize, key: &str, value: &str) -> Result<()> {
        let number = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::parse(n, format!("{key}: {v:?} is not a count")))
        };
        match key {
            "default_tag" => self.default_tag = Some(at_line(n, Act::new(value))?),
            "acts" => {
                let mut acts = value
                    .split(' ')
                    .map(Act::new)
                    .collect::<dacue_core::Result<Vec<_>>>();
                if let Ok(list) = &mut acts {
                    let sorted = list.windows(2).all(|w| w[0] < w[1]);
                    if !sorted || list.is_empty() {
                        return Err(Error::parse(n, "acts must be distinct and sorted"));
                    }
                }
                self.acts = Some(at_line(n, acts)?);
            }
            "update" => self.update = Some(at_line(n, value.parse())?),
            "phrase_set" => self.phrase_count = Some(number(value)?),
            "sha256" => {
                if value.len() != 64 || !value.bytes().all(|b| b.is_ascii_hexdigit()) {
                    return Err(Error::parse(n, "sha256 must be 64 hex digits"));
                }
                self.digest = Some(value.to_string());
            }
            "train_size" => self.train_size = Some(number(value)?),
            "initial_correct" => self.initial_correct = Some(number(value)?),
            other => return Err(Error::parse(n, format!("unknown header key {other:?}"))),
        }
        Ok(())
    }
}

/// Splits `k=v k=v` on single spaces; only the header's `acts` value may
/// contain spaces, so it must be the only pair on its line.
fn pairs(n: usize, text: &str) -> Result<Vec<(&str, &str)>> {
    if let Some(acts) = text.strip_prefix("acts=") {
        return Ok(vec![("acts", acts)]);
    }
    text.split(' ')
        .map(|pair| {
            pair.split_once('=')
                .ok_or_else(|| Error::parse(n, format!("expected key=value, found {pair:?}")))
        })
        .collect()
}

fn parse_rule_line(n: usize, text: &str) -> Result<LearnedRule> {
    let mut from = None;
    let mut phrase = None;
    let mut prev = None;
    let mut cos = None;
    let mut to = None;
    let mut gain = None;
    let mut rest = text;
    let mut order = Vec::new();
    while !rest.is_empty() {
        let (key, after) = rest
            .split_once('=')
            .ok_or_else(|| Error::parse(n, format!("expected key=value at {rest:?}")))?;
        let (value, tail) = if key == "phrase" {
            quoted(n, after)?
        } else {
            match after.split_once(' ') {
                Some((v, t)) => (v.to_string(), t),
                None => (after.to_string(), ""),
            }
        };
        order.push(key);
        match key {
            "from" => from = Some(at_line(n, Act::new(&value))?),
            "phrase" => phrase = Some(at_line(n, Phrase::parse(&value))?),
            "prev" => prev = Some(at_line(n, value.parse::<PrevTag>())?),
            "cos" => {
                cos = Some(match value.as_str() {
                    "t" => true,
                    "f" => false,
                    _ => return Err(Error::parse(n, format!("cos must be t or f, found {value:?}"))),
                })
            }
            "to" => to = Some(at_line(n, Act::new(&value))?),
            "gain" => {
                gain = Some(
                    value
                        .parse::<u32>()
                        .map_err(|_| Error::parse(n, format!("bad gain {value:?}")))?,
                )
            }
            other => return Err(Error::parse(n, format!("unknown rule field {other:?}"))),
        }
        rest = tail;
    }
    let canonical = ["from", "phrase", "prev", "cos", "to", "gain"];
    let positions: Vec<usize> = order
        .iter()
        .map(|k| canonical.iter().position(|c| c == k).expect("checked above"))
        .collect();
    if positions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::parse(n, "rule fields repeated or out of order"));
    }
    let (Some(from), Some(to), Some(gain)) = (from, to, gain) else {
        return Err(Error::parse(n, "rule needs from, to and gain"));
    };
    let rule: Rule = at_line(n, Rule::new(from, phrase, prev, cos, to))?;
    Ok(LearnedRule { rule, gain })
}

/// Reads a `"..."` value with `\"` and `\\` escapes; returns it and the
/// text after the following space.
fn quoted(n: usize, text: &str) -> Result<(String, &str)> {
    let body = text
        .strip_prefix('"')
        .ok_or_else(|| Error::parse(n, "phrase value must be quoted"))?;
    let mut value = String::new();
    let mut chars = body.char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some((_, e @ ('"' | '\\'))) => value.push(e),
                _ => return Err(Error::parse(n, "bad escape in phrase")),
            },
            '"' => {
                let tail = &body[i + 1..];
                let tail = match tail.strip_prefix(' ') {
                    Some(t) => t,
                    None if tail.is_empty() => tail,
                    None => return Err(Error::parse(n, "expected a space after the phrase")),
                };
                return Ok((value, tail));
            }
            c => value.push(c),
        }
    }
    Err(Error::parse(n, "unterminated phrase"))
}
