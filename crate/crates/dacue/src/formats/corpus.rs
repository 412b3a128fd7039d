//! Corpus TSV: `dialogue_id`, `turn_index`, `speaker`, `act`, `text`.
//!
//! Lines starting with `#` and blank lines are ignored. Utterances are
//! grouped into dialogues by first appearance and must arrive in turn order.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use dacue_core::corpus::{push_utterance, tokenize, Act, ClusterLexicon, Corpus, Dialogue, Utterance};

use super::{at_line, check_field, content_lines, fields};
use crate::error::{Error, Result};

pub const HEADER: &str = "#dialogue_id\tturn_index\tspeaker\tact\ttext";

pub fn parse_corpus<R: BufRead>(reader: R, lexicon: Option<&ClusterLexicon>) -> Result<Corpus> {
    let mut dialogues: Vec<Dialogue> = Vec::new();
    let mut slots = BTreeMap::new();
    for line in content_lines(reader) {
        let (n, text) = line?;
        let f = fields(n, &text, 5)?;
        if f[0].is_empty() {
            return Err(Error::parse(n, "empty dialogue_id"));
        }
        let turn_index = f[1]
            .parse::<usize>()
            .map_err(|_| Error::parse(n, format!("turn_index {:?} is not a non-negative integer", f[1])))?;
        let act = at_line(n, Act::new(f[3]))?;
        let mut tokens = tokenize(f[4]);
        if tokens.is_empty() {
            return Err(Error::parse(n, "utterance text is empty after tokenization"));
        }
        if let Some(lexicon) = lexicon {
            tokens = lexicon.apply(&tokens);
        }
        let utterance = Utterance {
            dialogue_id: f[0].to_string(),
            turn_index,
            speaker: f[2].to_string(),
            act,
            tokens,
        };
        at_line(n, push_utterance(&mut dialogues, &mut slots, utterance))?;
    }
    Ok(Corpus::new(dialogues)?)
}

/// Writes one line per utterance with the tokens space-joined as the text.
pub fn write_corpus<W: Write>(mut out: W, corpus: &Corpus) -> Result<()> {
    write_tagged(&mut out, corpus, corpus.utterances().map(|u| &u.act))
}

/// Like [`write_corpus`] with the act column taken from `tags`.
pub fn write_tagged<'a, W: Write>(
    mut out: W,
    corpus: &Corpus,
    tags: impl IntoIterator<Item = &'a Act>,
) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    let mut tags = tags.into_iter();
    for utt in corpus.utterances() {
        check_field("dialogue id", &utt.dialogue_id)?;
        check_field("speaker", &utt.speaker)?;
        let act = tags
            .next()
            .ok_or_else(|| Error::Unwritable("tags: fewer tags than utterances".into()))?;
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            utt.dialogue_id,
            utt.turn_index,
            utt.speaker,
            act,
            utt.tokens.join(" ")
        )?;
    }
    if tags.next().is_some() {
        return Err(Error::Unwritable("tags: more tags than utterances".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Corpus> {
        parse_corpus(text.as_bytes(), None)
    }

    fn line_of(err: Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("not a parse error: {other}"),
        }
    }

    #[test]
    fn single_line() {
        let corpus = parse("d1\t0\tA\tGreet\tHello.\n").unwrap();
        let utt = corpus.utterances().next().unwrap();
        assert_eq!(utt.dialogue_id, "d1");
        assert_eq!(utt.turn_index, 0);
        assert_eq!(utt.speaker, "A");
        assert_eq!(utt.act.as_str(), "Greet");
        assert_eq!(utt.tokens, ["hello"]);
    }

    #[test]
    fn malformed_lines_report_their_number() {
        assert_eq!(line_of(parse("# header\nd1\t0\tA\tGreet\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("d1\t0\tA\tGreet\thi\nd1\t0\tB\tGreet\thi\n").unwrap_err()), 2);
        assert_eq!(line_of(parse("d1\t1\tA\tGreet\thi\n").unwrap_err()), 1);
        assert_eq!(line_of(parse("d1\t0\tA\tGreet\t...\n").unwrap_err()), 1);
        assert_eq!(line_of(parse("d1\tx\tA\tGreet\thi\n").unwrap_err()), 1);
        assert_eq!(line_of(parse("d1\t0\tA\tBOD\thi\n").unwrap_err()), 1);
    }

    #[test]
    fn duplicate_turn_message() {
        let err = parse("d1\t0\tA\tGreet\thi\nd1\t0\tB\tGreet\thi\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn interleaved_dialogues_keep_first_appearance_order() {
        let corpus = parse("b\t0\tA\tX\tone\na\t0\tA\tX\ttwo\nb\t1\tB\tY\tthree\n").unwrap();
        let ids: Vec<_> = corpus.dialogues().iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["b", "a"]);
    }

    #[test]
    fn clusters_on_parse_and_round_trips() {
        let lexicon = ClusterLexicon::scheduling();
        let text = "d1\t0\tA\tSuggest\tHow about on Monday the 14th, at 3:00?\nd1\t1\tB\tAccept\tSure.\r\n";
        let corpus = parse_corpus(text.as_bytes(), Some(&lexicon)).unwrap();
        assert_eq!(
            corpus.utterances().next().unwrap().tokens.join(" "),
            "how about on $weekday$ the $ordinal-number$ at $number$"
        );
        let mut out = Vec::new();
        write_corpus(&mut out, &corpus).unwrap();
        assert_eq!(parse(std::str::from_utf8(&out).unwrap()).unwrap(), corpus);
        assert_eq!(parse_corpus(&out[..], Some(&lexicon)).unwrap(), corpus);
    }
}
