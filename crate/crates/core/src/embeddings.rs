//! Instance-level embedding tables and class-level aggregation.
//!
//! An [`EmbeddingTable`] holds per-instance vectors (audio clips, images,
//! text tokens); a [`ClassEmbeddingTable`] holds exactly one vector per
//! class and is what the projection model consumes on its semantic side.
//! Aggregation (mean or seeded random pick), hybrid concatenation, and
//! L2 normalization all produce new tables; nothing here mutates in place.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::linalg;
use crate::rng::{seeded_rng, STREAM_CLASS_PICK};
use crate::{Error, Result};

/// Modality of instance-level vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum InstanceModality {
    Acoustic,
    Image,
    TextToken,
}

impl InstanceModality {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceModality::Acoustic => "acoustic",
            InstanceModality::Image => "image",
            InstanceModality::TextToken => "text-token",
        }
    }

    /// Modality of a class table aggregated from instances of this modality.
    pub fn class_modality(self) -> SemanticModality {
        match self {
            InstanceModality::Acoustic => SemanticModality::AcousticSemantic,
            InstanceModality::Image => SemanticModality::Image,
            InstanceModality::TextToken => SemanticModality::Text,
        }
    }
}

/// Modality of class-level semantic vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SemanticModality {
    /// Class means of acoustic instances; the self-modality upper bound.
    AcousticSemantic,
    Image,
    Text,
    Hybrid,
}

impl SemanticModality {
    pub fn as_str(self) -> &'static str {
        match self {
            SemanticModality::AcousticSemantic => "acoustic-semantic",
            SemanticModality::Image => "image",
            SemanticModality::Text => "text",
            SemanticModality::Hybrid => "hybrid",
        }
    }

    /// Name used in result rows and run configs; the acoustic-semantic
    /// channel reports as "audio".
    pub fn reporting_name(self) -> &'static str {
        match self {
            SemanticModality::AcousticSemantic => "audio",
            SemanticModality::Image => "image",
            SemanticModality::Text => "text",
            SemanticModality::Hybrid => "hybrid",
        }
    }

    pub fn from_reporting_name(name: &str) -> Result<Self> {
        match name {
            "audio" => Ok(SemanticModality::AcousticSemantic),
            "image" => Ok(SemanticModality::Image),
            "text" => Ok(SemanticModality::Text),
            "hybrid" => Ok(SemanticModality::Hybrid),
            other => Err(Error::InvalidConfig {
                message: format!(
                    "unknown modality {other:?}; expected audio, image, text, or hybrid"
                ),
            }),
        }
    }
}

/// One instance vector tagged with its class.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EmbeddingRecord {
    pub instance_id: String,
    pub class_mid: String,
    pub vector: Vec<f64>,
}

/// Validated collection of instance embeddings of one modality and dimension.
///
/// Record order is preserved from construction; instance ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    modality: InstanceModality,
    dimension: usize,
    records: Vec<EmbeddingRecord>,
}

impl EmbeddingTable {
    /// Validates dimensions, finiteness, and instance-id uniqueness.
    pub fn new(
        modality: InstanceModality,
        dimension: usize,
        records: Vec<EmbeddingRecord>,
    ) -> Result<Self> {
        let mut seen_ids = BTreeSet::new();
        for record in &records {
            if record.vector.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: record.vector.len(),
                    context: format!("record {:?}", record.instance_id),
                });
            }
            if !record.vector.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("record {:?}", record.instance_id),
                });
            }
            if !seen_ids.insert(record.instance_id.as_str()) {
                return Err(Error::DuplicateInstanceId {
                    id: record.instance_id.clone(),
                });
            }
        }
        Ok(EmbeddingTable {
            modality,
            dimension,
            records,
        })
    }

    pub fn modality(&self) -> InstanceModality {
        self.modality
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn records(&self) -> &[EmbeddingRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct classes present, sorted.
    pub fn classes(&self) -> BTreeSet<String> {
        self.records.iter().map(|r| r.class_mid.clone()).collect()
    }

    /// Record indices grouped by class, preserving record order within each.
    pub fn grouped_by_class(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, record) in self.records.iter().enumerate() {
            groups.entry(record.class_mid.as_str()).or_default().push(i);
        }
        groups
    }

    /// New table holding only records of the given classes, order preserved.
    pub fn restrict_to_classes(&self, classes: &BTreeSet<String>) -> EmbeddingTable {
        let records = self
            .records
            .iter()
            .filter(|r| classes.contains(&r.class_mid))
            .cloned()
            .collect();
        EmbeddingTable {
            modality: self.modality,
            dimension: self.dimension,
            records,
        }
    }

    /// New table holding only records whose instance id is in `instances`.
    pub fn restrict_to_instances(&self, instances: &BTreeSet<String>) -> EmbeddingTable {
        let records = self
            .records
            .iter()
            .filter(|r| instances.contains(&r.instance_id))
            .cloned()
            .collect();
        EmbeddingTable {
            modality: self.modality,
            dimension: self.dimension,
            records,
        }
    }
}

/// One vector per class, all of a fixed dimension and modality.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassEmbeddingTable {
    modality: SemanticModality,
    dimension: usize,
    entries: BTreeMap<String, Vec<f64>>,
}

impl ClassEmbeddingTable {
    pub fn new(
        modality: SemanticModality,
        dimension: usize,
        entries: BTreeMap<String, Vec<f64>>,
    ) -> Result<Self> {
        for (mid, vector) in &entries {
            if vector.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: vector.len(),
                    context: format!("class {mid:?}"),
                });
            }
            if !vector.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("class {mid:?}"),
                });
            }
        }
        Ok(ClassEmbeddingTable {
            modality,
            dimension,
            entries,
        })
    }

    pub fn modality(&self) -> SemanticModality {
        self.modality
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, mid: &str) -> Option<&[f64]> {
        self.entries.get(mid).map(Vec::as_slice)
    }

    pub fn classes(&self) -> BTreeSet<String> {
        self.entries.keys().cloned().collect()
    }

    /// Iterates `(mid, vector)` in sorted MID order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Sub-table with exactly `classes`; every class must be present.
    pub fn restrict(&self, classes: &BTreeSet<String>) -> Result<ClassEmbeddingTable> {
        let mut entries = BTreeMap::new();
        for mid in classes {
            let vector = self.entries.get(mid).ok_or_else(|| Error::MissingClass {
                class: mid.clone(),
                context: format!("{} class table", self.modality.as_str()),
            })?;
            entries.insert(mid.clone(), vector.clone());
        }
        Ok(ClassEmbeddingTable {
            modality: self.modality,
            dimension: self.dimension,
            entries,
        })
    }
}

/// Elementwise mean of nonempty, same-dimension vectors.
fn mean_vector(vectors: &[&[f64]], context: &str) -> Result<Vec<f64>> {
    let first = vectors.first().ok_or_else(|| Error::EmptyInput {
        context: context.to_string(),
    })?;
    let dim = first.len();
    let mut acc = vec![0.0; dim];
    for vector in vectors {
        if vector.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: vector.len(),
                context: context.to_string(),
            });
        }
        for (a, &v) in acc.iter_mut().zip(*vector) {
            *a += v;
        }
    }
    let n = vectors.len() as f64;
    for a in &mut acc {
        *a /= n;
    }
    Ok(acc)
}

/// Clip-level vector as the elementwise mean of its segment vectors.
pub fn average_segments_to_clip(segment_vectors: &[Vec<f64>]) -> Result<Vec<f64>> {
    let refs: Vec<&[f64]> = segment_vectors.iter().map(Vec::as_slice).collect();
    mean_vector(&refs, "segment average")
}

/// Label-level vector as the elementwise mean of its token vectors
/// (multi-word labels average their word embeddings).
pub fn compose_label_embedding(token_vectors: &[Vec<f64>]) -> Result<Vec<f64>> {
    let refs: Vec<&[f64]> = token_vectors.iter().map(Vec::as_slice).collect();
    mean_vector(&refs, "label token average")
}

/// Per-class mean vector over the table's records, for each requested class.
pub fn aggregate_class_mean(
    table: &EmbeddingTable,
    classes: &BTreeSet<String>,
) -> Result<ClassEmbeddingTable> {
    let groups = table.grouped_by_class();
    let mut entries = BTreeMap::new();
    for mid in classes {
        let indices = groups
            .get(mid.as_str())
            .ok_or_else(|| Error::ClassWithoutRecords {
                class: mid.clone(),
                context: format!("{} table", table.modality().as_str()),
            })?;
        let refs: Vec<&[f64]> = indices
            .iter()
            .map(|&i| table.records()[i].vector.as_slice())
            .collect();
        entries.insert(mid.clone(), mean_vector(&refs, "class mean")?);
    }
    ClassEmbeddingTable::new(
        table.modality().class_modality(),
        table.dimension(),
        entries,
    )
}

/// One uniformly chosen record per class; same seed, same selection.
/// Classes are visited in sorted order so draws are reproducible.
pub fn aggregate_class_random(
    table: &EmbeddingTable,
    classes: &BTreeSet<String>,
    seed: u64,
) -> Result<ClassEmbeddingTable> {
    let groups = table.grouped_by_class();
    let mut rng = seeded_rng(seed, STREAM_CLASS_PICK);
    let mut entries = BTreeMap::new();
    for mid in classes {
        let indices = groups
            .get(mid.as_str())
            .ok_or_else(|| Error::ClassWithoutRecords {
                class: mid.clone(),
                context: format!("{} table", table.modality().as_str()),
            })?;
        let pick = indices[rng.random_range(0..indices.len())];
        entries.insert(mid.clone(), table.records()[pick].vector.clone());
    }
    ClassEmbeddingTable::new(
        table.modality().class_modality(),
        table.dimension(),
        entries,
    )
}

/// Concatenates two class tables per class, `a`'s coordinates first.
/// The class sets must agree exactly.
pub fn concat_hybrid(
    a: &ClassEmbeddingTable,
    b: &ClassEmbeddingTable,
) -> Result<ClassEmbeddingTable> {
    let classes_a = a.classes();
    let classes_b = b.classes();
    if classes_a != classes_b {
        return Err(Error::ClassSetMismatch {
            only_in_a: classes_a.difference(&classes_b).cloned().collect(),
            only_in_b: classes_b.difference(&classes_a).cloned().collect(),
        });
    }
    let mut entries = BTreeMap::new();
    for (mid, va) in a.iter() {
        let vb = b.get(mid).expect("class sets verified equal");
        let mut v = Vec::with_capacity(va.len() + vb.len());
        v.extend_from_slice(va);
        v.extend_from_slice(vb);
        entries.insert(mid.to_string(), v);
    }
    ClassEmbeddingTable::new(
        SemanticModality::Hybrid,
        a.dimension() + b.dimension(),
        entries,
    )
}

/// Class table for the acoustic self-modality: per-test-class mean of
/// exactly the designated instances. Used to measure the upper bound that
/// classification of the same instances can reach.
pub fn semantic_acoustic_from_split(
    acoustic: &EmbeddingTable,
    test_classes: &BTreeSet<String>,
    test_instances: &BTreeSet<String>,
) -> Result<ClassEmbeddingTable> {
    let designated = acoustic.restrict_to_instances(test_instances);
    let mut table = aggregate_class_mean(&designated, test_classes);
    if let Err(Error::ClassWithoutRecords { class, .. }) = table {
        table = Err(Error::ClassWithoutRecords {
            class,
            context: String::from("designated test instances"),
        });
    }
    table
}

/// Rescales every class vector to unit Euclidean norm.
pub fn normalize_l2(table: &ClassEmbeddingTable) -> Result<ClassEmbeddingTable> {
    let mut entries = BTreeMap::new();
    for (mid, vector) in table.iter() {
        let n = linalg::norm(vector);
        if n <= 0.0 {
            return Err(Error::ZeroVector {
                class: mid.to_string(),
            });
        }
        entries.insert(mid.to_string(), vector.iter().map(|v| v / n).collect());
    }
    ClassEmbeddingTable::new(table.modality(), table.dimension(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, class: &str, vector: Vec<f64>) -> EmbeddingRecord {
        EmbeddingRecord {
            instance_id: id.to_string(),
            class_mid: class.to_string(),
            vector,
        }
    }

    fn two_class_table() -> EmbeddingTable {
        EmbeddingTable::new(
            InstanceModality::Acoustic,
            2,
            vec![
                record("a0", "/m/a", vec![1.0, 0.0]),
                record("a1", "/m/a", vec![0.0, 1.0]),
                record("b0", "/m/b", vec![2.0, 2.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn table_validation_rejects_bad_records() {
        let short = EmbeddingTable::new(
            InstanceModality::Acoustic,
            2,
            vec![record("x", "/m/a", vec![1.0])],
        );
        assert!(matches!(short, Err(Error::DimensionMismatch { .. })));

        let nan = EmbeddingTable::new(
            InstanceModality::Acoustic,
            1,
            vec![record("x", "/m/a", vec![f64::NAN])],
        );
        assert!(matches!(nan, Err(Error::NonFinite { .. })));

        let dup = EmbeddingTable::new(
            InstanceModality::Acoustic,
            1,
            vec![
                record("x", "/m/a", vec![1.0]),
                record("x", "/m/b", vec![2.0]),
            ],
        );
        assert!(matches!(dup, Err(Error::DuplicateInstanceId { .. })));
    }

    #[test]
    fn segment_average_is_elementwise_mean() {
        let mean = average_segments_to_clip(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(mean, vec![1.0, 1.0]);
        let single = average_segments_to_clip(&[vec![3.0, 3.0, 3.0]]).unwrap();
        assert_eq!(single, vec![3.0, 3.0, 3.0]);
        assert!(average_segments_to_clip(&[]).is_err());
    }

    #[test]
    fn segment_average_matches_summation_oracle() {
        let mut rng = crate::rng::seeded_rng(11, 0);
        let segments: Vec<Vec<f64>> = (0..10)
            .map(|_| {
                (0..128)
                    .map(|_| crate::rng::standard_normal(&mut rng))
                    .collect()
            })
            .collect();
        let mean = average_segments_to_clip(&segments).unwrap();
        for j in 0..128 {
            let mut acc = 0.0;
            for segment in &segments {
                acc += segment[j];
            }
            assert!((mean[j] - acc / 10.0).abs() < 1e-12);
        }
    }

    #[test]
    fn class_mean_aggregation() {
        let table = two_class_table();
        let classes = table.classes();
        let agg = aggregate_class_mean(&table, &classes).unwrap();
        assert_eq!(agg.modality(), SemanticModality::AcousticSemantic);
        assert_eq!(agg.get("/m/a").unwrap(), &[0.5, 0.5]);
        assert_eq!(agg.get("/m/b").unwrap(), &[2.0, 2.0]);

        let missing: BTreeSet<String> = ["/m/zzz".to_string()].into();
        assert!(matches!(
            aggregate_class_mean(&table, &missing),
            Err(Error::ClassWithoutRecords { .. })
        ));
    }

    #[test]
    fn class_mean_matches_accumulation_oracle() {
        let mut rng = crate::rng::seeded_rng(5, 0);
        let mut records = Vec::new();
        for c in 0..3 {
            for i in 0..100 {
                records.push(record(
                    &format!("c{c}i{i}"),
                    &format!("/m/{c}"),
                    (0..8)
                        .map(|_| crate::rng::standard_normal(&mut rng))
                        .collect(),
                ));
            }
        }
        let table = EmbeddingTable::new(InstanceModality::Image, 8, records).unwrap();
        let agg = aggregate_class_mean(&table, &table.classes()).unwrap();
        for c in 0..3 {
            let mid = format!("/m/{c}");
            let mut acc = vec![0.0; 8];
            for r in table.records().iter().filter(|r| r.class_mid == mid) {
                for (a, v) in acc.iter_mut().zip(&r.vector) {
                    *a += v;
                }
            }
            for (got, a) in agg.get(&mid).unwrap().iter().zip(acc) {
                assert!((got - a / 100.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mean_aggregation_is_order_invariant() {
        let table = two_class_table();
        let mut reversed: Vec<EmbeddingRecord> = table.records().to_vec();
        reversed.reverse();
        let table_rev = EmbeddingTable::new(InstanceModality::Acoustic, 2, reversed).unwrap();
        let classes = table.classes();
        assert_eq!(
            aggregate_class_mean(&table, &classes).unwrap(),
            aggregate_class_mean(&table_rev, &classes).unwrap()
        );
    }

    #[test]
    fn random_aggregation_is_seeded_and_roughly_uniform() {
        let table = two_class_table();
        let classes = table.classes();
        let once = aggregate_class_random(&table, &classes, 42).unwrap();
        let twice = aggregate_class_random(&table, &classes, 42).unwrap();
        assert_eq!(once, twice);

        // singleton class always yields its only record
        assert_eq!(once.get("/m/b").unwrap(), &[2.0, 2.0]);

        // two-record class: both records drawn with frequency 0.5 +- 0.05
        let mut first = 0usize;
        for seed in 1..=1000u64 {
            let t = aggregate_class_random(&table, &classes, seed).unwrap();
            if t.get("/m/a").unwrap() == [1.0, 0.0] {
                first += 1;
            }
        }
        let freq = first as f64 / 1000.0;
        assert!((freq - 0.5).abs() < 0.05, "frequency {freq}");
    }

    #[test]
    fn hybrid_concatenation() {
        let a = ClassEmbeddingTable::new(
            SemanticModality::Image,
            2,
            [("/m/x".to_string(), vec![1.0, 2.0])].into(),
        )
        .unwrap();
        let b = ClassEmbeddingTable::new(
            SemanticModality::Text,
            1,
            [("/m/x".to_string(), vec![9.0])].into(),
        )
        .unwrap();
        let h = concat_hybrid(&a, &b).unwrap();
        assert_eq!(h.modality(), SemanticModality::Hybrid);
        assert_eq!(h.dimension(), 3);
        assert_eq!(h.get("/m/x").unwrap(), &[1.0, 2.0, 9.0]);
        // first dim(a) coordinates reproduce a
        assert_eq!(&h.get("/m/x").unwrap()[..2], a.get("/m/x").unwrap());

        let b_extra = ClassEmbeddingTable::new(
            SemanticModality::Text,
            1,
            [
                ("/m/x".to_string(), vec![9.0]),
                ("/m/dog".to_string(), vec![1.0]),
            ]
            .into(),
        )
        .unwrap();
        match concat_hybrid(&a, &b_extra) {
            Err(Error::ClassSetMismatch { only_in_b, .. }) => {
                assert_eq!(only_in_b, vec!["/m/dog".to_string()]);
            }
            other => panic!("expected class-set mismatch, got {other:?}"),
        }
    }

    #[test]
    fn acoustic_semantic_table_equals_mean_of_designated_instances() {
        let table = two_class_table();
        let test_classes: BTreeSet<String> = ["/m/a".to_string()].into();
        let instances: BTreeSet<String> = ["a0".to_string(), "a1".to_string()].into();
        let sem = semantic_acoustic_from_split(&table, &test_classes, &instances).unwrap();
        assert_eq!(sem.get("/m/a").unwrap(), &[0.5, 0.5]);
        assert_eq!(sem.modality(), SemanticModality::AcousticSemantic);

        // exact agreement with aggregate_class_mean on the designated subset
        let restricted = table.restrict_to_instances(&instances);
        let oracle = aggregate_class_mean(&restricted, &test_classes).unwrap();
        assert_eq!(sem, oracle);

        let empty: BTreeSet<String> = BTreeSet::new();
        assert!(matches!(
            semantic_acoustic_from_split(&table, &test_classes, &empty),
            Err(Error::ClassWithoutRecords { .. })
        ));
    }

    #[test]
    fn l2_normalization() {
        let table = ClassEmbeddingTable::new(
            SemanticModality::Text,
            2,
            [
                ("/m/a".to_string(), vec![3.0, 4.0]),
                ("/m/b".to_string(), vec![0.0, 1.0]),
            ]
            .into(),
        )
        .unwrap();
        let normed = normalize_l2(&table).unwrap();
        assert_eq!(normed.get("/m/a").unwrap(), &[0.6, 0.8]);
        assert_eq!(normed.get("/m/b").unwrap(), &[0.0, 1.0]);

        // idempotent within 1e-12
        let twice = normalize_l2(&normed).unwrap();
        for (mid, v) in normed.iter() {
            for (x, y) in v.iter().zip(twice.get(mid).unwrap()) {
                assert!((x - y).abs() < 1e-12);
            }
        }

        let zero = ClassEmbeddingTable::new(
            SemanticModality::Text,
            2,
            [("/m/z".to_string(), vec![0.0, 0.0])].into(),
        )
        .unwrap();
        assert!(matches!(normalize_l2(&zero), Err(Error::ZeroVector { .. })));
    }

    #[test]
    fn normalized_norms_verified_independently() {
        let mut rng = crate::rng::seeded_rng(9, 0);
        let entries: BTreeMap<String, Vec<f64>> = (0..20)
            .map(|i| {
                (
                    format!("/m/{i:02}"),
                    (0..16)
                        .map(|_| crate::rng::standard_normal(&mut rng) * 3.0)
                        .collect(),
                )
            })
            .collect();
        let table = ClassEmbeddingTable::new(SemanticModality::Image, 16, entries).unwrap();
        let normed = normalize_l2(&table).unwrap();
        for (_, v) in normed.iter() {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-9);
        }
    }
}
