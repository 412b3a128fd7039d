//! Plain phrase lists (one phrase per line, tokens space-separated) and the
//! cooccurrence table dump.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use dacue_core::counts::{Phrase, PhraseTable};

use super::{at_line, content_lines};
use crate::error::Result;

/// Reads a phrase list. Tokens are taken as written apart from
/// lowercasing; duplicates collapse. The result is sorted.
pub fn parse_phrase_list<R: BufRead>(reader: R) -> Result<Vec<Phrase>> {
    let mut phrases = BTreeSet::new();
    for line in content_lines(reader) {
        let (n, text) = line?;
        phrases.insert(at_line(n, Phrase::parse(&text.to_lowercase()))?);
    }
    Ok(phrases.into_iter().collect())
}

pub fn write_phrase_list<W: Write>(mut out: W, phrases: &[Phrase]) -> Result<()> {
    for phrase in phrases {
        writeln!(out, "{phrase}")?;
    }
    Ok(())
}

/// `phrase`, `act`, `count` for every nonzero cell, in phrase then act order.
pub fn write_table_dump<W: Write>(mut out: W, table: &PhraseTable) -> Result<()> {
    writeln!(out, "#phrase\tact\tcount")?;
    for (phrase, act, count) in table.cells() {
        writeln!(out, "{phrase}\t{act}\t{count}")?;
    }
    Ok(())
}
