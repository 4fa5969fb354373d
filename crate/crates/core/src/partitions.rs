//! Seeded class-partition protocols.
//!
//! All three protocols split a class vocabulary into disjoint train,
//! validation, and test sets: `random` shuffles the whole vocabulary into
//! three parts, `within-category` confines a split to one category's
//! members with exactly two test classes, and `across-category` draws
//! equal counts from two categories (four train, four validation, and one
//! test class from each). Identical inputs and seed always reproduce the
//! identical partition.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::ontology::CategorySpec;
use crate::rng::{seeded_rng, STREAM_SPLIT};
use crate::{Error, Result};

/// Partition protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Protocol {
    Random,
    WithinCategory,
    AcrossCategory,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Random => "random",
            Protocol::WithinCategory => "within-category",
            Protocol::AcrossCategory => "across-category",
        }
    }
}

/// Disjoint train/validation/test class sets for one trial.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Partition {
    pub protocol: Protocol,
    #[cfg_attr(feature = "serde", serde(rename = "seed"))]
    pub trial_seed: u64,
    #[cfg_attr(feature = "serde", serde(rename = "train"))]
    pub train_classes: BTreeSet<String>,
    #[cfg_attr(feature = "serde", serde(rename = "val"))]
    pub val_classes: BTreeSet<String>,
    #[cfg_attr(feature = "serde", serde(rename = "test"))]
    pub test_classes: BTreeSet<String>,
    /// Class to category name, populated by the category protocols.
    #[cfg_attr(feature = "serde", serde(default))]
    pub category_tags: BTreeMap<String, String>,
}

impl Partition {
    /// Checks pairwise disjointness of the three class sets.
    pub fn validate(&self) -> Result<()> {
        let pairs = [
            (&self.train_classes, &self.val_classes),
            (&self.train_classes, &self.test_classes),
            (&self.val_classes, &self.test_classes),
        ];
        for (a, b) in pairs {
            if let Some(class) = a.intersection(b).next() {
                return Err(Error::OverlappingClassSets {
                    class: class.clone(),
                });
            }
        }
        Ok(())
    }

    /// Union of the three subsets.
    pub fn all_classes(&self) -> BTreeSet<String> {
        let mut all = self.train_classes.clone();
        all.extend(self.val_classes.iter().cloned());
        all.extend(self.test_classes.iter().cloned());
        all
    }
}

/// Splits classes into equal thirds after a seeded shuffle.
pub fn random_split(classes: &BTreeSet<String>, seed: u64) -> Result<Partition> {
    if classes.len() % 3 != 0 {
        return Err(Error::NotDivisibleByThree {
            count: classes.len(),
        });
    }
    let third = classes.len() / 3;
    random_split_with_counts(classes, (third, third, third), seed)
}

/// Splits classes into explicit train/val/test counts after a seeded
/// shuffle; the counts must use up the whole class set.
pub fn random_split_with_counts(
    classes: &BTreeSet<String>,
    counts: (usize, usize, usize),
    seed: u64,
) -> Result<Partition> {
    let (n_train, n_val, n_test) = counts;
    let total = n_train + n_val + n_test;
    if total != classes.len() || classes.is_empty() {
        return Err(Error::SplitCountMismatch {
            requested: total,
            available: classes.len(),
        });
    }
    let mut order: Vec<&String> = classes.iter().collect();
    let mut rng = seeded_rng(seed, STREAM_SPLIT);
    order.shuffle(&mut rng);

    let take =
        |slice: &[&String]| -> BTreeSet<String> { slice.iter().map(|s| s.to_string()).collect() };
    Ok(Partition {
        protocol: Protocol::Random,
        trial_seed: seed,
        train_classes: take(&order[..n_train]),
        val_classes: take(&order[n_train..n_train + n_val]),
        test_classes: take(&order[n_train + n_val..]),
        category_tags: BTreeMap::new(),
    })
}

/// Splits one category's members: two test classes, the remainder halved
/// between train and validation.
pub fn within_category_split(category: &CategorySpec, seed: u64) -> Result<Partition> {
    let n = category.members.len();
    if n < 4 || (n - 2) % 2 != 0 {
        return Err(Error::CategoryTooSmall {
            name: category.name.as_str().to_string(),
            needed: 4,
            available: n,
        });
    }
    let k = (n - 2) / 2;
    let mut order: Vec<&String> = category.members.iter().collect();
    let mut rng = seeded_rng(seed, STREAM_SPLIT);
    order.shuffle(&mut rng);

    let take =
        |slice: &[&String]| -> BTreeSet<String> { slice.iter().map(|s| s.to_string()).collect() };
    let tags = category
        .members
        .iter()
        .map(|m| (m.clone(), category.name.as_str().to_string()))
        .collect();
    Ok(Partition {
        protocol: Protocol::WithinCategory,
        trial_seed: seed,
        train_classes: take(&order[..k]),
        val_classes: take(&order[k..2 * k]),
        test_classes: take(&order[2 * k..]),
        category_tags: tags,
    })
}

/// Splits across two categories: per category, four train, four validation,
/// and one test class, drawn as nine distinct members so the subsets are
/// disjoint by construction.
pub fn across_category_split(a: &CategorySpec, b: &CategorySpec, seed: u64) -> Result<Partition> {
    if a.name == b.name {
        return Err(Error::InvalidConfig {
            message: String::from("across-category split needs two different categories"),
        });
    }
    let mut rng = seeded_rng(seed, STREAM_SPLIT);
    let mut train = BTreeSet::new();
    let mut val = BTreeSet::new();
    let mut test = BTreeSet::new();
    let mut tags = BTreeMap::new();
    for category in [a, b] {
        if category.members.len() < 9 {
            return Err(Error::CategoryTooSmall {
                name: category.name.as_str().to_string(),
                needed: 9,
                available: category.members.len(),
            });
        }
        let mut order: Vec<&String> = category.members.iter().collect();
        order.shuffle(&mut rng);
        for (i, mid) in order[..9].iter().enumerate() {
            let target = match i {
                0..=3 => &mut train,
                4..=7 => &mut val,
                _ => &mut test,
            };
            target.insert(mid.to_string());
            tags.insert(mid.to_string(), category.name.as_str().to_string());
        }
    }
    Ok(Partition {
        protocol: Protocol::AcrossCategory,
        trial_seed: seed,
        train_classes: train,
        val_classes: val,
        test_classes: test,
        category_tags: tags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::CategoryName;

    fn classes(n: usize) -> BTreeSet<String> {
        (0..n).map(|i| alloc::format!("/m/{i:03}")).collect()
    }

    fn category(name: CategoryName, n: usize) -> CategorySpec {
        CategorySpec {
            name,
            members: (0..n)
                .map(|i| alloc::format!("{}/{i:02}", name.as_str()))
                .collect(),
        }
    }

    #[test]
    fn random_split_shapes() {
        let p = random_split(&classes(69), 1).unwrap();
        assert_eq!(p.train_classes.len(), 23);
        assert_eq!(p.val_classes.len(), 23);
        assert_eq!(p.test_classes.len(), 23);
        p.validate().unwrap();
        assert_eq!(p.all_classes(), classes(69));

        let small = random_split(&classes(6), 5).unwrap();
        assert_eq!(
            (
                small.train_classes.len(),
                small.val_classes.len(),
                small.test_classes.len()
            ),
            (2, 2, 2)
        );

        assert!(matches!(
            random_split(&classes(70), 1),
            Err(Error::NotDivisibleByThree { count: 70 })
        ));
    }

    #[test]
    fn random_split_is_seeded_and_varies_across_seeds() {
        let p1 = random_split(&classes(69), 3).unwrap();
        let p2 = random_split(&classes(69), 3).unwrap();
        assert_eq!(p1, p2);

        let trials: Vec<Partition> = (1..=5)
            .map(|s| random_split(&classes(69), s).unwrap())
            .collect();
        for i in 0..trials.len() {
            for j in i + 1..trials.len() {
                assert_ne!(trials[i], trials[j], "trials {i} and {j} collided");
            }
        }
    }

    #[test]
    fn counted_split_consumes_exactly_the_class_set() {
        let p = random_split_with_counts(&classes(20), (8, 6, 6), 7).unwrap();
        assert_eq!(p.train_classes.len(), 8);
        assert_eq!(p.val_classes.len(), 6);
        assert_eq!(p.test_classes.len(), 6);
        p.validate().unwrap();
        assert_eq!(p.all_classes(), classes(20));

        assert!(matches!(
            random_split_with_counts(&classes(20), (8, 6, 5), 7),
            Err(Error::SplitCountMismatch { .. })
        ));
    }

    #[test]
    fn within_category_shapes() {
        let mi = category(CategoryName::MusicalInstrument, 18);
        let p = within_category_split(&mi, 2).unwrap();
        assert_eq!(
            (
                p.train_classes.len(),
                p.val_classes.len(),
                p.test_classes.len()
            ),
            (8, 8, 2)
        );
        p.validate().unwrap();
        // 2 + 2k = |members|
        assert_eq!(2 + 2 * p.train_classes.len(), mi.members.len());
        assert!(p.category_tags.values().all(|v| v == "Musical Instrument"));

        let animal = category(CategoryName::Animal, 14);
        let p = within_category_split(&animal, 2).unwrap();
        assert_eq!(
            (
                p.train_classes.len(),
                p.val_classes.len(),
                p.test_classes.len()
            ),
            (6, 6, 2)
        );

        let vehicle = category(CategoryName::Vehicle, 10);
        let p = within_category_split(&vehicle, 2).unwrap();
        assert_eq!(
            (
                p.train_classes.len(),
                p.val_classes.len(),
                p.test_classes.len()
            ),
            (4, 4, 2)
        );
    }

    #[test]
    fn across_category_composition() {
        let animal = category(CategoryName::Animal, 14);
        let vehicle = category(CategoryName::Vehicle, 10);
        let p = across_category_split(&animal, &vehicle, 4).unwrap();
        p.validate().unwrap();
        assert_eq!(p.train_classes.len(), 8);
        assert_eq!(p.val_classes.len(), 8);
        assert_eq!(p.test_classes.len(), 2);

        // equal counts from both categories in every subset
        for (subset, per_category) in [
            (&p.train_classes, 4),
            (&p.val_classes, 4),
            (&p.test_classes, 1),
        ] {
            let animals = subset
                .iter()
                .filter(|c| p.category_tags[*c] == "Animal")
                .count();
            let vehicles = subset
                .iter()
                .filter(|c| p.category_tags[*c] == "Vehicle")
                .count();
            assert_eq!(animals, per_category);
            assert_eq!(vehicles, per_category);
        }

        assert_eq!(p, across_category_split(&animal, &vehicle, 4).unwrap());

        assert!(across_category_split(&animal, &animal, 4).is_err());
        let tiny = category(CategoryName::Vehicle, 8);
        assert!(matches!(
            across_category_split(&animal, &tiny, 4),
            Err(Error::CategoryTooSmall { .. })
        ));
    }
}
