mod common;

use common::{corpus, rows};
use dacue_core::corpus::{Act, Corpus};
use dacue_core::counts::{extract_phrases, Phrase};
use dacue_core::tbl::{
    accuracy, apply_rules, featurize, rule_matches, train, TaggerModel, Template, TrainConfig,
    UpdateMode,
};
use proptest::prelude::*;

/// Straight-line reference: recompute feature views before every decision.
fn naive_apply(model: &TaggerModel, corpus: &Corpus, phrases: &[Phrase]) -> Vec<Vec<Act>> {
    let mut tags = vec![model.default_tag.clone(); corpus.len()];
    let mut states = vec![tags.clone()];
    for learned in &model.rules {
        let snapshot = featurize(corpus, phrases, &tags);
        for i in 0..tags.len() {
            let view = match model.update {
                UpdateMode::Sweep => featurize(corpus, phrases, &tags).swap_remove(i),
                UpdateMode::Simultaneous => snapshot[i].clone(),
            };
            if rule_matches(&learned.rule, &view, &tags[i]) {
                tags[i] = learned.rule.to.clone();
            }
        }
        states.push(tags.clone());
    }
    states
}

fn correct(tags: &[Act], gold: &[Act]) -> usize {
    tags.iter().zip(gold).filter(|(t, g)| t == g).count()
}

fn check_training(corpus: &Corpus, config: &TrainConfig) -> Result<(), TestCaseError> {
    let phrases: Vec<Phrase> = extract_phrases(corpus, 3).into_iter().collect();
    let model = train(corpus, &phrases, config).unwrap();
    let gold = corpus.gold_tags();
    let states = naive_apply(&model, corpus, &phrases);
    prop_assert_eq!(correct(&states[0], &gold), model.initial_correct);
    let trace = model.trace();
    let mut previous = model.initial_correct;
    for (step, state) in trace.iter().zip(&states[1..]) {
        prop_assert!(step.net_gain >= config.threshold);
        prop_assert_eq!(step.correct_after, previous + step.net_gain as usize);
        prop_assert_eq!(correct(state, &gold), step.correct_after);
        prop_assert!(step.accuracy_after > previous as f64 / gold.len() as f64);
        previous = step.correct_after;
    }
    let tags = apply_rules(&model, corpus).unwrap();
    prop_assert_eq!(&tags, states.last().unwrap());
    prop_assert_eq!(accuracy(&tags, &gold).unwrap().to_bits(), model.training_accuracy().to_bits());
    // training is a pure function of its inputs
    let mut reversed = phrases.clone();
    reversed.reverse();
    prop_assert_eq!(train(corpus, &reversed, config).unwrap(), model);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sweep_training_contract(rows in rows(40, 4, 8), threshold in 1u32..3) {
        let config = TrainConfig { threshold, ..TrainConfig::default() };
        check_training(&corpus(&rows), &config)?;
    }

    #[test]
    fn simultaneous_training_contract(rows in rows(40, 4, 8)) {
        let config = TrainConfig { threshold: 1, update: UpdateMode::Simultaneous, ..TrainConfig::default() };
        check_training(&corpus(&rows), &config)?;
    }

    #[test]
    fn restricted_templates(rows in rows(40, 3, 6)) {
        let config = TrainConfig { threshold: 1, templates: vec![Template::Prev, Template::PrevCos], ..TrainConfig::default() };
        let corpus = corpus(&rows);
        check_training(&corpus, &config)?;
        let model = train(&corpus, &[], &config).unwrap();
        prop_assert!(model.rules.iter().all(|r| r.rule.phrase.is_none() && r.rule.prev.is_some()));
    }
}
