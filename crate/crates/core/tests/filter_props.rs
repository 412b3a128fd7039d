mod common;

use common::{corpus, phrase, rows};
use dacue_core::counts::{build_table, extract_phrases};
use dacue_core::filter::{lexical_filter, proper_subphrases, FilterMode};
use dacue_core::metrics::{rank_all, Metric, RankedPhrase};
use dacue_oracle::{filter_overkill, filter_violations, Entry};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn entries(list: &[RankedPhrase]) -> Vec<Entry> {
    list.iter()
        .map(|r| (r.phrase.tokens().to_vec(), r.selected_act.as_ref().map(|a| a.to_string())))
        .collect()
}

fn check(ranked: &[RankedPhrase]) -> Result<(), TestCaseError> {
    let basic = lexical_filter(ranked, FilterMode::Basic).unwrap();
    let modified = lexical_filter(ranked, FilterMode::Modified).unwrap();
    let original = entries(ranked);
    prop_assert!(filter_violations(&original, &entries(&basic), false).is_empty());
    prop_assert!(filter_violations(&original, &entries(&modified), true).is_empty());
    prop_assert!(filter_overkill(&original, &entries(&basic), false).is_empty());
    prop_assert!(filter_overkill(&original, &entries(&modified), true).is_empty());
    let basic_set: BTreeSet<_> = basic.iter().map(|r| &r.phrase).collect();
    let modified_set: BTreeSet<_> = modified.iter().map(|r| &r.phrase).collect();
    prop_assert!(basic_set.is_subset(&modified_set));
    prop_assert_eq!(&lexical_filter(&basic, FilterMode::Basic).unwrap(), &basic);
    prop_assert_eq!(&lexical_filter(&modified, FilterMode::Modified).unwrap(), &modified);
    for list in [&basic, &modified] {
        let ranks: Vec<usize> = list.iter().map(|r| r.rank).collect();
        prop_assert_eq!(ranks, (1..=list.len()).collect::<Vec<_>>());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn filters_metric_rankings_soundly(rows in rows(40, 4, 8)) {
        let corpus = corpus(&rows);
        let table = build_table(&corpus, &extract_phrases(&corpus, 3)).unwrap();
        for metric in Metric::ALL {
            check(&rank_all(&table, metric))?;
        }
    }

    #[test]
    fn filters_arbitrary_orderings_soundly(rows in rows(30, 4, 6), keys in prop::collection::vec(any::<u32>(), 200)) {
        let corpus = corpus(&rows);
        let table = build_table(&corpus, &extract_phrases(&corpus, 3)).unwrap();
        let mut ranked = rank_all(&table, Metric::Cooc);
        // reorder by random keys so longer phrases often outrank their parts
        let mut keyed: Vec<_> = ranked.drain(..).enumerate().map(|(i, r)| (keys[i % keys.len()], i, r)).collect();
        keyed.sort_by_key(|(k, i, _)| (*k, *i));
        let ranked: Vec<_> = keyed.into_iter().enumerate().map(|(i, (_, _, mut r))| { r.rank = i + 1; r }).collect();
        check(&ranked)?;
    }
}

#[test]
fn subphrase_counts() {
    assert_eq!(proper_subphrases(&phrase("a b c d")).len(), 4 + 3 + 2);
    assert_eq!(proper_subphrases(&phrase("a a a")).len(), 2);
}
