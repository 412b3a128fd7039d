#![allow(dead_code)]

use dacue_core::corpus::{Act, Corpus, Utterance};
use dacue_core::counts::Phrase;
use dacue_oracle::Utt;
use proptest::prelude::*;

/// Rows of (token ids, act id, speaker id), split into dialogues of up to 7 turns.
pub type Rows = Vec<(Vec<u8>, u8, u8)>;

pub fn rows(max_utts: usize, max_acts: u8, max_vocab: u8) -> impl Strategy<Value = Rows> {
    (2..=max_acts, 2..=max_vocab).prop_flat_map(move |(acts, vocab)| {
        prop::collection::vec(
            (prop::collection::vec(0..vocab, 1..6), 0..acts, 0..2u8),
            1..=max_utts,
        )
    })
}

pub fn corpus(rows: &Rows) -> Corpus {
    Corpus::from_utterances(rows.iter().enumerate().map(|(i, (tokens, act, speaker))| Utterance {
        dialogue_id: format!("d{}", i / 7),
        turn_index: i % 7,
        speaker: format!("s{speaker}"),
        act: Act::new(&format!("act{act}")).unwrap(),
        tokens: tokens.iter().map(|t| format!("w{t}")).collect(),
    }))
    .unwrap()
}

pub fn naive(corpus: &Corpus) -> Vec<Utt> {
    corpus
        .utterances()
        .map(|u| Utt {
            tokens: u.tokens.clone(),
            act: u.act.to_string(),
        })
        .collect()
}

pub fn phrase(s: &str) -> Phrase {
    Phrase::parse(s).unwrap()
}
