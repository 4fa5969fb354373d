//! Property tests for split, accuracy, and normalization invariants.

use std::collections::BTreeSet;

use proptest::prelude::*;
use zsac_core::embeddings::{normalize_l2, ClassEmbeddingTable, SemanticModality};
use zsac_core::evaluation::{aggregate_trials, top1_accuracy};
use zsac_core::linalg::norm;
use zsac_core::partitions::random_split_with_counts;

fn class_set(n: usize) -> BTreeSet<String> {
    (0..n).map(|i| format!("/m/p{i:03}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counted_splits_partition_the_class_set(
        n_train in 1usize..20,
        n_val in 1usize..20,
        n_test in 1usize..20,
        seed in 0u64..1000,
    ) {
        let total = n_train + n_val + n_test;
        let classes = class_set(total);
        let p = random_split_with_counts(&classes, (n_train, n_val, n_test), seed).unwrap();
        p.validate().unwrap();
        prop_assert_eq!(p.train_classes.len(), n_train);
        prop_assert_eq!(p.val_classes.len(), n_val);
        prop_assert_eq!(p.test_classes.len(), n_test);
        prop_assert_eq!(p.all_classes(), classes);
    }

    #[test]
    fn accuracy_is_invariant_to_joint_reordering(
        pairs in prop::collection::vec((0u8..5, 0u8..5), 1..40),
        rotation in 0usize..40,
    ) {
        let label = |v: u8| format!("/m/x{v}");
        let preds: Vec<String> = pairs.iter().map(|(p, _)| label(*p)).collect();
        let truths: Vec<String> = pairs.iter().map(|(_, t)| label(*t)).collect();
        let base = top1_accuracy(&preds, &truths).unwrap();

        let k = rotation % pairs.len();
        let rotate = |v: &[String]| -> Vec<String> {
            v.iter().cycle().skip(k).take(v.len()).cloned().collect()
        };
        let rotated = top1_accuracy(&rotate(&preds), &rotate(&truths)).unwrap();
        prop_assert_eq!(base, rotated);
    }

    #[test]
    fn summary_mean_lies_between_extremes(
        accs in prop::collection::vec(0.0f64..=1.0, 1..12),
    ) {
        let s = aggregate_trials(&accs, 0.25).unwrap();
        let min = accs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = accs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.mean_accuracy >= min - 1e-12);
        prop_assert!(s.mean_accuracy <= max + 1e-12);
        prop_assert!(s.std_dev >= 0.0);
        prop_assert_eq!(s.n_trials, accs.len());
    }

    #[test]
    fn normalization_is_idempotent_and_unit_norm(
        vectors in prop::collection::vec(
            prop::collection::vec(-10.0f64..10.0, 4),
            1..8,
        ),
    ) {
        // reject the measure-zero all-zeros vector case up front
        prop_assume!(vectors.iter().all(|v| norm(v) > 1e-9));
        let entries = vectors
            .into_iter()
            .enumerate()
            .map(|(i, v)| (format!("/m/n{i}"), v))
            .collect();
        let table = ClassEmbeddingTable::new(SemanticModality::Image, 4, entries).unwrap();
        let once = normalize_l2(&table).unwrap();
        for (_, v) in once.iter() {
            prop_assert!((norm(v) - 1.0).abs() < 1e-12);
        }
        let twice = normalize_l2(&once).unwrap();
        for ((_, a), (_, b)) in once.iter().zip(twice.iter()) {
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
