//! Label taxonomy, mutual-class computation, hierarchy pruning, sample caps.
//!
//! Class vocabularies from different datasets are joined by MID, never by
//! label strings. The joined (mutual) set is then pruned against the
//! taxonomy: a class whose mutual descendants number more than two is
//! dropped in favor of those descendants, while a class with one or two
//! mutual descendants absorbs them and stays. Descendants are counted at
//! every depth against the original mutual set, so rule outcomes do not
//! depend on processing order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::embeddings::EmbeddingTable;
use crate::rng::{seeded_rng, STREAM_SUBSAMPLE};
use crate::{Error, Result};

/// Node payload: display label plus ordered child MIDs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyNode {
    pub label: String,
    pub children: Vec<String>,
}

/// Node description used to construct a [`Taxonomy`]; mirrors the on-disk
/// taxonomy JSON shape.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeSpec {
    pub mid: String,
    pub label: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub children: Vec<String>,
}

/// Validated label forest: unique MIDs, every child edge resolves, each
/// node has at most one parent, no cycles, everything reachable from roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    nodes: BTreeMap<String, TaxonomyNode>,
    parents: BTreeMap<String, String>,
    roots: BTreeSet<String>,
}

impl Taxonomy {
    pub fn new(node_specs: Vec<NodeSpec>, roots: Vec<String>) -> Result<Self> {
        let mut nodes = BTreeMap::new();
        for spec in node_specs {
            let existing = nodes.insert(
                spec.mid.clone(),
                TaxonomyNode {
                    label: spec.label,
                    children: spec.children,
                },
            );
            if existing.is_some() {
                return Err(Error::DuplicateMid { mid: spec.mid });
            }
        }

        let roots: BTreeSet<String> = roots.into_iter().collect();
        for root in &roots {
            if !nodes.contains_key(root) {
                return Err(Error::DanglingChild {
                    parent: String::from("(roots)"),
                    child: root.clone(),
                });
            }
        }

        let mut parents: BTreeMap<String, String> = BTreeMap::new();
        for (mid, node) in &nodes {
            for child in &node.children {
                if !nodes.contains_key(child) {
                    return Err(Error::DanglingChild {
                        parent: mid.clone(),
                        child: child.clone(),
                    });
                }
                if roots.contains(child) || parents.insert(child.clone(), mid.clone()).is_some() {
                    return Err(Error::NotAForest { mid: child.clone() });
                }
            }
        }

        let taxonomy = Taxonomy {
            nodes,
            parents,
            roots,
        };
        taxonomy.check_reachability()?;
        Ok(taxonomy)
    }

    /// Iterative three-color DFS from the roots: a back edge is a cycle, and
    /// a node never reached either sits on a parent chain that loops (cycle)
    /// or was omitted from the root list (not a forest).
    fn check_reachability(&self) -> Result<()> {
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let mut color: BTreeMap<&str, u8> =
            self.nodes.keys().map(|mid| (mid.as_str(), WHITE)).collect();

        for root in &self.roots {
            if color[root.as_str()] != WHITE {
                continue;
            }
            // stack holds (mid, next child index)
            let mut stack: Vec<(&str, usize)> = alloc::vec![(root.as_str(), 0)];
            *color.get_mut(root.as_str()).unwrap() = GREY;
            while let Some((mid, child_idx)) = stack.pop() {
                let children = &self.nodes[mid].children;
                if child_idx < children.len() {
                    stack.push((mid, child_idx + 1));
                    let child = children[child_idx].as_str();
                    match color[child] {
                        WHITE => {
                            *color.get_mut(child).unwrap() = GREY;
                            stack.push((child, 0));
                        }
                        GREY => {
                            return Err(Error::CycleDetected {
                                mid: child.to_string(),
                            })
                        }
                        _ => {}
                    }
                } else {
                    *color.get_mut(mid).unwrap() = BLACK;
                }
            }
        }

        for (mid, c) in color {
            if c == WHITE {
                return if self.parents.contains_key(mid) {
                    Err(Error::CycleDetected {
                        mid: mid.to_string(),
                    })
                } else {
                    Err(Error::NotAForest {
                        mid: mid.to_string(),
                    })
                };
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, mid: &str) -> bool {
        self.nodes.contains_key(mid)
    }

    pub fn node(&self, mid: &str) -> Option<&TaxonomyNode> {
        self.nodes.get(mid)
    }

    pub fn label(&self, mid: &str) -> Option<&str> {
        self.nodes.get(mid).map(|n| n.label.as_str())
    }

    pub fn parent(&self, mid: &str) -> Option<&str> {
        self.parents.get(mid).map(String::as_str)
    }

    pub fn roots(&self) -> &BTreeSet<String> {
        &self.roots
    }

    /// Iterates `(mid, node)` in sorted MID order.
    pub fn nodes(&self) -> impl Iterator<Item = (&str, &TaxonomyNode)> {
        self.nodes.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// All descendants of `mid` at any depth, excluding `mid` itself.
    pub fn descendants(&self, mid: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let Some(node) = self.nodes.get(mid) else {
            return out;
        };
        let mut stack: Vec<&str> = node.children.iter().map(String::as_str).collect();
        while let Some(current) = stack.pop() {
            if out.insert(current.to_string()) {
                for child in &self.nodes[current].children {
                    stack.push(child);
                }
            }
        }
        out
    }
}

/// How a class entered or left the mutual set.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "rule"))]
pub enum ClassProvenance {
    /// Present in both source label sets; pruning not yet applied.
    Mutual,
    /// Kept: no mutual descendants.
    KeptNoMutualDescendants,
    /// Kept: one or two mutual descendants, which were absorbed.
    KeptParent { removed_descendants: Vec<String> },
    /// Removed: more than two mutual descendants.
    RemovedTooManyDescendants { count: usize },
    /// Removed: absorbed into a kept ancestor.
    RemovedAbsorbedInto { parent: String },
}

impl ClassProvenance {
    pub fn is_kept(&self) -> bool {
        matches!(
            self,
            ClassProvenance::Mutual
                | ClassProvenance::KeptNoMutualDescendants
                | ClassProvenance::KeptParent { .. }
        )
    }
}

/// Classes present in both datasets, with a per-class audit trail.
///
/// `classes` holds the surviving set; `provenance` additionally records
/// every class that pruning removed, so the 79-to-69 style reductions can
/// be audited class by class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutualClassSet {
    classes: BTreeSet<String>,
    provenance: BTreeMap<String, ClassProvenance>,
}

impl MutualClassSet {
    pub fn classes(&self) -> &BTreeSet<String> {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, mid: &str) -> bool {
        self.classes.contains(mid)
    }

    pub fn provenance(&self) -> &BTreeMap<String, ClassProvenance> {
        &self.provenance
    }
}

/// Exact MID intersection of two label sets.
pub fn intersect_by_mid(
    labels_a: &BTreeSet<String>,
    labels_b: &BTreeSet<String>,
) -> MutualClassSet {
    let classes: BTreeSet<String> = labels_a.intersection(labels_b).cloned().collect();
    let provenance = classes
        .iter()
        .map(|mid| (mid.clone(), ClassProvenance::Mutual))
        .collect();
    MutualClassSet {
        classes,
        provenance,
    }
}

/// Applies the descendant-count rules to the mutual set.
///
/// For each mutual class `c`, `k(c)` counts mutual classes among the
/// descendants of `c` at any depth, always against the original mutual set.
/// `k > 2` removes `c`; `1 <= k <= 2` keeps `c` and removes those
/// descendants; `k = 0` keeps `c`. A class is therefore removed exactly when
/// its own count exceeds two or some mutual ancestor has count one or two;
/// the topmost such ancestor is the surviving absorber.
pub fn prune_hierarchy(taxonomy: &Taxonomy, mutual: &MutualClassSet) -> Result<MutualClassSet> {
    for mid in mutual.classes() {
        if !taxonomy.contains(mid) {
            return Err(Error::MissingClass {
                class: mid.clone(),
                context: String::from("taxonomy"),
            });
        }
    }

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for mid in mutual.classes() {
        let k = taxonomy
            .descendants(mid)
            .iter()
            .filter(|d| mutual.contains(d))
            .count();
        counts.insert(mid.as_str(), k);
    }

    // topmost mutual ancestor with count 1..=2, walking each parent chain up
    let absorber = |mid: &str| -> Option<String> {
        let mut best = None;
        let mut current = mid;
        while let Some(parent) = taxonomy.parent(current) {
            if mutual.contains(parent) && (1..=2).contains(&counts[parent]) {
                best = Some(parent.to_string());
            }
            current = parent;
        }
        best
    };

    let mut classes = BTreeSet::new();
    let mut provenance = BTreeMap::new();
    for mid in mutual.classes() {
        let k = counts[mid.as_str()];
        if k > 2 {
            provenance.insert(
                mid.clone(),
                ClassProvenance::RemovedTooManyDescendants { count: k },
            );
        } else if let Some(parent) = absorber(mid) {
            provenance.insert(mid.clone(), ClassProvenance::RemovedAbsorbedInto { parent });
        } else if k == 0 {
            classes.insert(mid.clone());
            provenance.insert(mid.clone(), ClassProvenance::KeptNoMutualDescendants);
        } else {
            let removed: Vec<String> = taxonomy
                .descendants(mid)
                .into_iter()
                .filter(|d| mutual.contains(d))
                .collect();
            classes.insert(mid.clone());
            provenance.insert(
                mid.clone(),
                ClassProvenance::KeptParent {
                    removed_descendants: removed,
                },
            );
        }
    }

    Ok(MutualClassSet {
        classes,
        provenance,
    })
}

/// Subsamples over-represented classes down to `cap` records, uniformly
/// without replacement. Classes at or below the cap keep all records;
/// surviving records keep their original table order.
pub fn subsample_caps(table: &EmbeddingTable, cap: usize, seed: u64) -> Result<EmbeddingTable> {
    if cap == 0 {
        return Err(Error::InvalidConfig {
            message: String::from("sample cap must be at least 1"),
        });
    }
    let mut rng = seeded_rng(seed, STREAM_SUBSAMPLE);
    let mut keep: BTreeSet<usize> = BTreeSet::new();
    for (_, indices) in table.grouped_by_class() {
        if indices.len() <= cap {
            keep.extend(indices);
        } else {
            let picks = rand::seq::index::sample(&mut rng, indices.len(), cap);
            keep.extend(picks.iter().map(|p| indices[p]));
        }
    }
    let records = table
        .records()
        .iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, r)| r.clone())
        .collect();
    EmbeddingTable::new(table.modality(), table.dimension(), records)
}

/// The three category names used by the category-confined protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CategoryName {
    Animal,
    #[cfg_attr(feature = "serde", serde(rename = "Musical Instrument"))]
    MusicalInstrument,
    Vehicle,
}

impl CategoryName {
    pub fn as_str(self) -> &'static str {
        match self {
            CategoryName::Animal => "Animal",
            CategoryName::MusicalInstrument => "Musical Instrument",
            CategoryName::Vehicle => "Vehicle",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "Animal" => Ok(CategoryName::Animal),
            "Musical Instrument" => Ok(CategoryName::MusicalInstrument),
            "Vehicle" => Ok(CategoryName::Vehicle),
            _ => Err(Error::UnknownCategory {
                name: name.to_string(),
            }),
        }
    }

    /// Member count each category is required to carry.
    pub fn expected_members(self) -> usize {
        match self {
            CategoryName::Animal => 14,
            CategoryName::MusicalInstrument => 18,
            CategoryName::Vehicle => 10,
        }
    }
}

/// A named category and its member classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorySpec {
    pub name: CategoryName,
    pub members: BTreeSet<String>,
}

/// Validates raw `(name, members)` entries into the three category specs:
/// known names only, each exactly once, fixed member counts, and member
/// sets pairwise disjoint. Returned sorted by name.
pub fn category_specs(entries: &[(String, Vec<String>)]) -> Result<Vec<CategorySpec>> {
    let mut specs: BTreeMap<CategoryName, CategorySpec> = BTreeMap::new();
    let mut all_members: BTreeSet<String> = BTreeSet::new();
    for (name, members) in entries {
        let name = CategoryName::parse(name)?;
        if specs.contains_key(&name) {
            return Err(Error::InvalidConfig {
                message: format!("category {:?} listed twice", name.as_str()),
            });
        }
        let mut member_set = BTreeSet::new();
        for mid in members {
            if !all_members.insert(mid.clone()) || !member_set.insert(mid.clone()) {
                return Err(Error::OverlappingMembers { mid: mid.clone() });
            }
        }
        if member_set.len() != name.expected_members() {
            return Err(Error::CategorySize {
                name: name.as_str().to_string(),
                expected: name.expected_members(),
                found: member_set.len(),
            });
        }
        specs.insert(
            name,
            CategorySpec {
                name,
                members: member_set,
            },
        );
    }
    if specs.len() != 3 {
        return Err(Error::InvalidConfig {
            message: format!("expected 3 categories, found {}", specs.len()),
        });
    }
    Ok(specs.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::{EmbeddingRecord, InstanceModality};
    use alloc::vec;

    fn node(mid: &str, children: &[&str]) -> NodeSpec {
        NodeSpec {
            mid: mid.to_string(),
            label: mid.to_string(),
            children: children.iter().map(|c| c.to_string()).collect(),
        }
    }

    fn mids(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|n| n.to_string()).collect()
    }

    #[test]
    fn minimal_tree_loads() {
        let t = Taxonomy::new(
            vec![node("p", &["c"]), node("c", &[])],
            vec!["p".to_string()],
        )
        .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.roots().len(), 1);
        assert_eq!(t.parent("c"), Some("p"));
        assert_eq!(t.descendants("p"), mids(&["c"]));
    }

    #[test]
    fn structural_errors_are_detected() {
        let self_cycle = Taxonomy::new(vec![node("a", &["a"])], vec![]);
        assert!(matches!(self_cycle, Err(Error::CycleDetected { .. })));

        // a self-loop that also claims root status trips root-as-child
        // validation first; either way it must be rejected
        let rooted_self_cycle = Taxonomy::new(vec![node("a", &["a"])], vec!["a".to_string()]);
        assert!(matches!(
            rooted_self_cycle,
            Err(Error::NotAForest { .. } | Error::CycleDetected { .. })
        ));

        let two_cycle = Taxonomy::new(
            vec![node("r", &["a"]), node("a", &["b"]), node("b", &["a"])],
            vec!["r".to_string()],
        );
        assert!(matches!(
            two_cycle,
            Err(Error::NotAForest { .. } | Error::CycleDetected { .. })
        ));

        let dangling = Taxonomy::new(vec![node("a", &["ghost"])], vec!["a".to_string()]);
        match dangling {
            Err(Error::DanglingChild { parent, child }) => {
                assert_eq!(parent, "a");
                assert_eq!(child, "ghost");
            }
            other => panic!("expected dangling child, got {other:?}"),
        }

        let dup = Taxonomy::new(vec![node("a", &[]), node("a", &[])], vec!["a".to_string()]);
        assert!(matches!(dup, Err(Error::DuplicateMid { .. })));

        let two_parents = Taxonomy::new(
            vec![node("p1", &["c"]), node("p2", &["c"]), node("c", &[])],
            vec!["p1".to_string(), "p2".to_string()],
        );
        assert!(matches!(two_parents, Err(Error::NotAForest { .. })));

        let orphan = Taxonomy::new(vec![node("a", &[]), node("b", &[])], vec!["a".to_string()]);
        assert!(matches!(orphan, Err(Error::NotAForest { .. })));

        let detached_cycle = Taxonomy::new(
            vec![node("r", &[]), node("x", &["y"]), node("y", &["x"])],
            vec!["r".to_string()],
        );
        assert!(matches!(detached_cycle, Err(Error::CycleDetected { .. })));
    }

    #[test]
    fn intersection_is_exact_commutative_idempotent() {
        let a = mids(&["m1", "m2"]);
        let b = mids(&["m2", "m3"]);
        let ab = intersect_by_mid(&a, &b);
        assert_eq!(ab.classes(), &mids(&["m2"]));
        assert_eq!(intersect_by_mid(&b, &a).classes(), ab.classes());
        let again = intersect_by_mid(ab.classes(), ab.classes());
        assert_eq!(again.classes(), ab.classes());

        let disjoint = intersect_by_mid(&mids(&["x"]), &mids(&["y"]));
        assert!(disjoint.is_empty());
    }

    /// Fixture exercising every rule: parent with three mutual children is
    /// removed, parent with two is kept and absorbs them, leaf stays.
    fn pruning_fixture() -> (Taxonomy, MutualClassSet) {
        let taxonomy = Taxonomy::new(
            vec![
                node("animal", &["cat", "dog", "bird"]),
                node("cat", &[]),
                node("dog", &[]),
                node("bird", &["crow", "gull"]),
                node("crow", &[]),
                node("gull", &[]),
                node("thing", &["tool"]),
                node("tool", &["hammer"]),
                node("hammer", &[]),
            ],
            vec!["animal".to_string(), "thing".to_string()],
        )
        .unwrap();
        let mutual = intersect_by_mid(
            &mids(&[
                "animal", "cat", "dog", "bird", "crow", "gull", "tool", "hammer",
            ]),
            &mids(&[
                "animal", "cat", "dog", "bird", "crow", "gull", "tool", "hammer", "zebra",
            ]),
        );
        (taxonomy, mutual)
    }

    #[test]
    fn pruning_applies_all_three_rules() {
        let (taxonomy, mutual) = pruning_fixture();
        let pruned = prune_hierarchy(&taxonomy, &mutual).unwrap();

        // animal has 5 mutual descendants -> removed in favor of them
        assert!(!pruned.contains("animal"));
        assert_eq!(
            pruned.provenance()["animal"],
            ClassProvenance::RemovedTooManyDescendants { count: 5 }
        );

        // bird has exactly 2 -> kept, crow and gull absorbed
        assert!(pruned.contains("bird"));
        assert!(!pruned.contains("crow"));
        assert!(!pruned.contains("gull"));
        assert_eq!(
            pruned.provenance()["crow"],
            ClassProvenance::RemovedAbsorbedInto {
                parent: "bird".to_string()
            }
        );

        // tool has exactly 1 -> kept, hammer absorbed
        assert!(pruned.contains("tool"));
        assert!(!pruned.contains("hammer"));

        // plain leaves stay
        assert!(pruned.contains("cat"));
        assert!(pruned.contains("dog"));

        assert_eq!(pruned.classes(), &mids(&["bird", "cat", "dog", "tool"]));
    }

    #[test]
    fn pruning_is_a_fixpoint() {
        let (taxonomy, mutual) = pruning_fixture();
        let once = prune_hierarchy(&taxonomy, &mutual).unwrap();
        let twice = prune_hierarchy(&taxonomy, &once).unwrap();
        assert_eq!(once.classes(), twice.classes());
    }

    #[test]
    fn pruning_nested_chain_keeps_topmost_absorber() {
        // a -> c -> d, all mutual: k(a)=2 so a absorbs both c and d
        let taxonomy = Taxonomy::new(
            vec![node("a", &["c"]), node("c", &["d"]), node("d", &[])],
            vec!["a".to_string()],
        )
        .unwrap();
        let mutual = intersect_by_mid(&mids(&["a", "c", "d"]), &mids(&["a", "c", "d"]));
        let pruned = prune_hierarchy(&taxonomy, &mutual).unwrap();
        assert_eq!(pruned.classes(), &mids(&["a"]));
        assert_eq!(
            pruned.provenance()["d"],
            ClassProvenance::RemovedAbsorbedInto {
                parent: "a".to_string()
            }
        );
        // no surviving class still has a surviving mutual descendant
        for kept in pruned.classes() {
            for d in taxonomy.descendants(kept) {
                assert!(!pruned.contains(&d), "{kept} still has survivor {d}");
            }
        }
    }

    #[test]
    fn pruning_rejects_unknown_class() {
        let (taxonomy, _) = pruning_fixture();
        let mutual = intersect_by_mid(&mids(&["martian"]), &mids(&["martian"]));
        assert!(matches!(
            prune_hierarchy(&taxonomy, &mutual),
            Err(Error::MissingClass { .. })
        ));
    }

    #[test]
    fn subsampling_respects_caps() {
        let mut records = Vec::new();
        for i in 0..400 {
            records.push(EmbeddingRecord {
                instance_id: format!("big{i}"),
                class_mid: "/m/big".to_string(),
                vector: vec![i as f64],
            });
        }
        for i in 0..5 {
            records.push(EmbeddingRecord {
                instance_id: format!("small{i}"),
                class_mid: "/m/small".to_string(),
                vector: vec![i as f64],
            });
        }
        let table = EmbeddingTable::new(InstanceModality::Acoustic, 1, records).unwrap();

        let capped = subsample_caps(&table, 300, 9).unwrap();
        let groups = capped.grouped_by_class();
        assert_eq!(groups["/m/big"].len(), 300);
        assert_eq!(groups["/m/small"].len(), 5);

        // no invented ids, and the draw is seed-deterministic
        let input_ids: BTreeSet<&str> = table
            .records()
            .iter()
            .map(|r| r.instance_id.as_str())
            .collect();
        for r in capped.records() {
            assert!(input_ids.contains(r.instance_id.as_str()));
        }
        let capped_again = subsample_caps(&table, 300, 9).unwrap();
        assert_eq!(capped, capped_again);
        let other_seed = subsample_caps(&table, 300, 10).unwrap();
        assert_ne!(capped, other_seed);

        assert!(subsample_caps(&table, 0, 9).is_err());
    }

    #[test]
    fn category_validation() {
        let animal: Vec<String> = (0..14).map(|i| format!("a{i}")).collect();
        let mi: Vec<String> = (0..18).map(|i| format!("m{i}")).collect();
        let vehicle: Vec<String> = (0..10).map(|i| format!("v{i}")).collect();
        let entries = vec![
            ("Animal".to_string(), animal.clone()),
            ("Musical Instrument".to_string(), mi.clone()),
            ("Vehicle".to_string(), vehicle.clone()),
        ];
        let specs = category_specs(&entries).unwrap();
        assert_eq!(specs.len(), 3);
        assert_eq!(specs[0].name, CategoryName::Animal);
        assert_eq!(specs[0].members.len(), 14);

        let unknown = vec![("Weather".to_string(), animal.clone())];
        assert!(matches!(
            category_specs(&unknown),
            Err(Error::UnknownCategory { .. })
        ));

        let mut overlapping = entries.clone();
        overlapping[2].1[0] = "a0".to_string();
        assert!(matches!(
            category_specs(&overlapping),
            Err(Error::OverlappingMembers { .. })
        ));

        let mut short = entries;
        short[0].1.pop();
        assert!(matches!(
            category_specs(&short),
            Err(Error::CategorySize { .. })
        ));
    }
}
