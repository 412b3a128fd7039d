//! Line-oriented file formats. Every reader reports the 1-based line number
//! of the first offending line; every writer emits `\n` line ends.

pub mod corpus;
pub mod lexicon;
pub mod model;
pub mod phrases;
pub mod ranked;
pub mod report;

use std::io::BufRead;

use crate::error::{Error, Result};

/// Non-blank lines that do not start with `#`, with their line numbers.
pub(crate) fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    numbered_lines(reader).filter(|line| match line {
        Ok((_, text)) => !text.trim().is_empty() && !text.starts_with('#'),
        Err(_) => true,
    })
}

pub(crate) fn numbered_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().map(|(i, line)| {
        let mut text = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        if text.ends_with('\r') {
            text.pop();
        }
        Ok((i + 1, text))
    })
}

/// Splits a tab-separated line into exactly `n` fields.
pub(crate) fn fields(line: usize, text: &str, n: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = text.split('\t').collect();
    if fields.len() != n {
        return Err(Error::parse(
            line,
            format!("expected {n} tab-separated fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

pub(crate) fn at_line<T>(line: usize, result: dacue_core::Result<T>) -> Result<T> {
    result.map_err(|e| Error::parse(line, e.to_string()))
}

/// Rejects values that would break a tab-separated line.
pub(crate) fn check_field(what: &str, value: &str) -> Result<()> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(Error::Unwritable(format!("{what} {value:?}: contains a tab or line break")));
    }
    Ok(())
}
