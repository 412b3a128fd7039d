//! Cluster lexicon TSV: `cluster_label`, `surface_token`, one pair per line.
//!
//! The numeral and ordinal matchers are always enabled; proper names are
//! clustered only when listed under `$proper-name$`.

use std::io::{BufRead, Write};

use dacue_core::corpus::ClusterLexicon;

use super::{at_line, content_lines, fields};
use crate::error::Result;

pub fn parse_lexicon<R: BufRead>(reader: R) -> Result<ClusterLexicon> {
    let mut lexicon = ClusterLexicon::new();
    for line in content_lines(reader) {
        let (n, text) = line?;
        let f = fields(n, &text, 2)?;
        at_line(n, lexicon.insert(f[0].trim(), f[1]))?;
    }
    Ok(lexicon)
}

pub fn write_lexicon<W: Write>(mut out: W, lexicon: &ClusterLexicon) -> Result<()> {
    writeln!(out, "#cluster_label\tsurface_token")?;
    for (label, surface) in lexicon.entries() {
        writeln!(out, "{label}\t{surface}")?;
    }
    Ok(())
}
