//! Synthetic dialogue corpora with planted cue phrases.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dacue_core::corpus::{Act, Corpus, Utterance};

use crate::error::{Error, Result};

/// Emitted when an utterance would otherwise have no tokens.
pub const FILLER: &str = "filler";

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub dialogues: usize,
    /// Number of acts, at least 2.
    pub acts: usize,
    /// Probability that an utterance carries its act's cue bigram.
    pub cue_strength: f64,
    /// Size of the shared noise vocabulary; 0 disables noise tokens.
    pub noise_vocab: usize,
    pub seed: u64,
    /// Inclusive range of utterances per dialogue.
    pub turns: (usize, usize),
    /// Inclusive range of noise tokens per utterance.
    pub noise_tokens: (usize, usize),
    /// Probability that the same speaker talks twice in a row.
    pub repeat_speaker: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            dialogues: 300,
            acts: 18,
            cue_strength: 0.85,
            noise_vocab: 500,
            seed: 0,
            turns: (6, 14),
            noise_tokens: (2, 6),
            repeat_speaker: 0.15,
        }
    }
}

pub fn act_name(k: usize) -> String {
    format!("act{k:02}")
}

/// The bigram planted for act `k`.
pub fn cue_tokens(k: usize) -> [String; 2] {
    [format!("cue{k:02}a"), format!("cue{k:02}b")]
}

pub fn noise_token(i: usize) -> String {
    format!("w{i}")
}

/// Start distribution and transition rows over acts. Depends only on the
/// number of acts, so corpora with different seeds share one process.
fn transitions(acts: usize) -> Vec<WeightedIndex<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ acts as u64);
    (0..=acts)
        .map(|_| {
            // skewed rows: a few likely successors per act
            let weights: Vec<f64> = (0..acts).map(|_| rng.gen::<f64>().powi(4) + 1e-3).collect();
            WeightedIndex::new(weights).expect("positive weights")
        })
        .collect()
}

pub fn gen_synthetic(config: &SynthConfig) -> Result<Corpus> {
    let invalid = |what: &str| Err(Error::Usage(format!("synthetic corpus: {what}")));
    if config.acts < 2 {
        return invalid("needs at least 2 acts");
    }
    if config.acts > 100 {
        return invalid("at most 100 acts");
    }
    if !(0.0..=1.0).contains(&config.cue_strength) || !(0.0..=1.0).contains(&config.repeat_speaker) {
        return invalid("probabilities must lie in [0, 1]");
    }
    if config.turns.0 == 0 || config.turns.0 > config.turns.1 || config.noise_tokens.0 > config.noise_tokens.1 {
        return invalid("empty turn or noise length range");
    }
    let acts: Vec<Act> = (0..config.acts)
        .map(|k| Act::new(&act_name(k)).expect("valid label"))
        .collect();
    let cues: Vec<[String; 2]> = (0..config.acts).map(cue_tokens).collect();
    let rows = transitions(config.acts);
    let noise_weights = (config.noise_vocab > 0).then(|| {
        // Zipf-like: token i has weight 1 / (i + 1)
        WeightedIndex::new((0..config.noise_vocab).map(|i| 1.0 / (i as f64 + 1.0))).expect("positive weights")
    });

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut utterances = Vec::new();
    for d in 0..config.dialogues {
        let dialogue_id = format!("s{d:05}");
        let turns = rng.gen_range(config.turns.0..=config.turns.1);
        let mut speaker = rng.gen_range(0..2u8);
        let mut act = rows[config.acts].sample(&mut rng);
        for turn in 0..turns {
            if turn > 0 {
                act = rows[act].sample(&mut rng);
                if !rng.gen_bool(config.repeat_speaker) {
                    speaker ^= 1;
                }
            }
            let mut tokens: Vec<String> = match &noise_weights {
                Some(w) => {
                    let n = rng.gen_range(config.noise_tokens.0..=config.noise_tokens.1);
                    (0..n).map(|_| noise_token(w.sample(&mut rng))).collect()
                }
                None => Vec::new(),
            };
            if rng.gen_bool(config.cue_strength) {
                let at = rng.gen_range(0..=tokens.len());
                tokens.splice(at..at, cues[act].iter().cloned());
            }
            if tokens.is_empty() {
                tokens.push(FILLER.to_string());
            }
            utterances.push(Utterance {
                dialogue_id: dialogue_id.clone(),
                turn_index: turn,
                speaker: if speaker == 0 { "A" } else { "B" }.to_string(),
                act: acts[act].clone(),
                tokens,
            });
        }
    }
    Ok(Corpus::from_utterances(utterances)?)
}
