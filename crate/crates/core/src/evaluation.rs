//! Trial execution, top-1 accuracy, and multi-trial aggregation.
//!
//! A trial trains one projection per semantic modality on a partition's
//! seen classes, selects on the validation classes, and classifies every
//! acoustic test instance against the test classes only. Semantic tables
//! come from [`SemanticSource`] values so that a modality can be backed by
//! a fixed class table, by per-class aggregation of an instance table
//! (mean or a per-trial random pick), by the acoustic table itself (the
//! upper-bound modality, whose test table is built from exactly the
//! evaluated instances), or by a two-table concatenation.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::embeddings::{
    aggregate_class_mean, aggregate_class_random, concat_hybrid, normalize_l2,
    semantic_acoustic_from_split, ClassEmbeddingTable, EmbeddingTable, SemanticModality,
};
use crate::model::score_matrix;
use crate::partitions::{Partition, Protocol};
use crate::rng::derive_seed;
use crate::training::{train, TrainConfig, TrainReport};
use crate::{Error, Result};

/// How an instance-level table is reduced to one vector per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Aggregation {
    #[default]
    Mean,
    RandomPick,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Mean => "mean",
            Aggregation::RandomPick => "random-pick",
        }
    }
}

/// Where one modality's class vectors come from.
///
/// Random picks are redrawn per trial with a seed derived from the trial
/// seed, so the same partition replayed with the same seed picks the same
/// representatives.
#[derive(Debug, Clone, PartialEq)]
pub enum SemanticSource {
    /// The acoustic table doubles as its own semantic space. Train and
    /// validation class vectors aggregate those classes' instances; test
    /// class vectors aggregate exactly the instances that get classified.
    AudioSelf { aggregation: Aggregation },
    /// One fixed vector per class.
    ClassTable(ClassEmbeddingTable),
    /// Instance-level table reduced per class.
    InstanceTable {
        table: EmbeddingTable,
        aggregation: Aggregation,
    },
    /// Concatenation of two constituent sources (normalized first when
    /// normalization is on). Constituents must be table-backed.
    Hybrid {
        first: Box<SemanticSource>,
        second: Box<SemanticSource>,
    },
}

impl SemanticSource {
    /// Aggregation recorded in results: random-pick if any constituent
    /// redraws per trial.
    pub fn aggregation(&self) -> Aggregation {
        match self {
            SemanticSource::AudioSelf { aggregation } => *aggregation,
            SemanticSource::ClassTable(_) => Aggregation::Mean,
            SemanticSource::InstanceTable { aggregation, .. } => *aggregation,
            SemanticSource::Hybrid { first, second } => {
                if first.aggregation() == Aggregation::RandomPick
                    || second.aggregation() == Aggregation::RandomPick
                {
                    Aggregation::RandomPick
                } else {
                    Aggregation::Mean
                }
            }
        }
    }
}

/// Serializes `TrialResult::modality` under its reporting name.
#[cfg(feature = "serde")]
mod modality_name {
    use super::SemanticModality;
    use alloc::string::String;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &SemanticModality, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(m.reporting_name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SemanticModality, D::Error> {
        let name = String::deserialize(d)?;
        SemanticModality::from_reporting_name(&name).map_err(serde::de::Error::custom)
    }
}

/// One trained-and-evaluated (partition, modality) cell.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialResult {
    pub protocol: Protocol,
    #[cfg_attr(feature = "serde", serde(with = "modality_name"))]
    pub modality: SemanticModality,
    pub aggregation: Aggregation,
    pub accuracy: f64,
    pub trial_seed: u64,
    /// Whether semantic class vectors were L2-normalized (constituents
    /// first for concatenated modalities).
    pub normalized: bool,
    pub partition: Partition,
}

/// Mean and spread of one modality's accuracy over trials.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentSummary {
    pub mean_accuracy: f64,
    /// Sample standard deviation (n-1 denominator), 0 for a single trial.
    pub std_dev: f64,
    pub n_trials: usize,
    /// 1 / |test classes|.
    pub chance_level: f64,
}

/// All trial results plus one summary per modality.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentOutcome {
    pub trials: Vec<TrialResult>,
    pub summaries: BTreeMap<SemanticModality, ExperimentSummary>,
}

/// Fraction of positions where the prediction matches the truth.
pub fn top1_accuracy<P: AsRef<str>, T: AsRef<str>>(predictions: &[P], truths: &[T]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput {
            context: String::from("predictions"),
        });
    }
    if predictions.len() != truths.len() {
        return Err(Error::DimensionMismatch {
            expected: truths.len(),
            found: predictions.len(),
            context: String::from("prediction and truth sequences"),
        });
    }
    let hits = predictions
        .iter()
        .zip(truths)
        .filter(|(p, t)| p.as_ref() == t.as_ref())
        .count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// Mean and sample standard deviation over per-trial accuracies.
pub fn aggregate_trials(accuracies: &[f64], chance_level: f64) -> Result<ExperimentSummary> {
    if accuracies.is_empty() {
        return Err(Error::EmptyInput {
            context: String::from("trial accuracies"),
        });
    }
    let n = accuracies.len();
    let mean = accuracies.iter().sum::<f64>() / n as f64;
    let std_dev = if n == 1 {
        0.0
    } else {
        let ss = accuracies
            .iter()
            .map(|a| (a - mean) * (a - mean))
            .sum::<f64>();
        libm::sqrt(ss / (n - 1) as f64)
    };
    Ok(ExperimentSummary {
        mean_accuracy: mean,
        std_dev,
        n_trials: n,
        chance_level,
    })
}

/// Per-trial salt for random-pick draws, distinct per modality so one
/// modality's redraw never shifts another's.
fn pick_salt(modality: SemanticModality) -> u64 {
    match modality {
        SemanticModality::AcousticSemantic => 11,
        SemanticModality::Image => 12,
        SemanticModality::Text => 13,
        SemanticModality::Hybrid => 14,
    }
}

/// Builds one class table covering every partition class.
fn full_class_table(
    source: &SemanticSource,
    partition: &Partition,
    normalize: bool,
) -> Result<ClassEmbeddingTable> {
    let all = partition.all_classes();
    let table = match source {
        SemanticSource::AudioSelf { .. } | SemanticSource::Hybrid { .. } => {
            return Err(Error::InvalidConfig {
                message: String::from(
                    "concatenated modalities must combine class or instance tables",
                ),
            })
        }
        SemanticSource::ClassTable(table) => table.restrict(&all)?,
        SemanticSource::InstanceTable { table, aggregation } => match aggregation {
            Aggregation::Mean => aggregate_class_mean(table, &all)?,
            Aggregation::RandomPick => {
                let seed = derive_seed(
                    partition.trial_seed,
                    pick_salt(table.modality().class_modality()),
                );
                aggregate_class_random(table, &all, seed)?
            }
        },
    };
    if normalize {
        normalize_l2(&table)
    } else {
        Ok(table)
    }
}

/// Builds the (seen, validation, test) class tables for one modality.
///
/// For every source except `AudioSelf` the three tables are restrictions
/// of one table over all partition classes, so a class keeps the same
/// vector whichever side of the split it lands on.
fn semantic_tables(
    source: &SemanticSource,
    acoustic: &EmbeddingTable,
    partition: &Partition,
    normalize: bool,
) -> Result<(
    ClassEmbeddingTable,
    ClassEmbeddingTable,
    ClassEmbeddingTable,
)> {
    match source {
        SemanticSource::AudioSelf { aggregation } => {
            let table = match aggregation {
                Aggregation::Mean => {
                    let seen = aggregate_class_mean(acoustic, &partition.train_classes)?;
                    let val = aggregate_class_mean(acoustic, &partition.val_classes)?;
                    let test_ids: BTreeSet<String> = acoustic
                        .restrict_to_classes(&partition.test_classes)
                        .records()
                        .iter()
                        .map(|r| r.instance_id.clone())
                        .collect();
                    let test =
                        semantic_acoustic_from_split(acoustic, &partition.test_classes, &test_ids)?;
                    (seen, val, test)
                }
                Aggregation::RandomPick => {
                    let seed = derive_seed(
                        partition.trial_seed,
                        pick_salt(SemanticModality::AcousticSemantic),
                    );
                    let all = aggregate_class_random(acoustic, &partition.all_classes(), seed)?;
                    (
                        all.restrict(&partition.train_classes)?,
                        all.restrict(&partition.val_classes)?,
                        all.restrict(&partition.test_classes)?,
                    )
                }
            };
            if normalize {
                Ok((
                    normalize_l2(&table.0)?,
                    normalize_l2(&table.1)?,
                    normalize_l2(&table.2)?,
                ))
            } else {
                Ok(table)
            }
        }
        SemanticSource::Hybrid { first, second } => {
            let a = full_class_table(first, partition, normalize)?;
            let b = full_class_table(second, partition, normalize)?;
            let all = concat_hybrid(&a, &b)?;
            Ok((
                all.restrict(&partition.train_classes)?,
                all.restrict(&partition.val_classes)?,
                all.restrict(&partition.test_classes)?,
            ))
        }
        _ => {
            let all = full_class_table(source, partition, normalize)?;
            Ok((
                all.restrict(&partition.train_classes)?,
                all.restrict(&partition.val_classes)?,
                all.restrict(&partition.test_classes)?,
            ))
        }
    }
}

/// Instance vectors and true classes of one class subset, in table order.
fn instances_and_truths(table: &EmbeddingTable) -> (Vec<Vec<f64>>, Vec<String>) {
    let thetas = table.records().iter().map(|r| r.vector.clone()).collect();
    let truths = table
        .records()
        .iter()
        .map(|r| r.class_mid.clone())
        .collect();
    (thetas, truths)
}

/// Trains and evaluates every modality on one partition.
///
/// The per-run training seed is derived from the configured base seed and
/// the partition's trial seed, so trials differ in initialization and
/// batch order as well as in their class splits.
pub fn run_trial(
    acoustic: &EmbeddingTable,
    sources: &BTreeMap<SemanticModality, SemanticSource>,
    partition: &Partition,
    config: &TrainConfig,
    normalize: bool,
) -> Result<Vec<TrialResult>> {
    Ok(
        run_trial_with_reports(acoustic, sources, partition, config, normalize)?
            .into_iter()
            .map(|(result, _)| result)
            .collect(),
    )
}

/// [`run_trial`] variant that also hands back each modality's training
/// report (loss and validation curves plus the selected parameters).
pub fn run_trial_with_reports(
    acoustic: &EmbeddingTable,
    sources: &BTreeMap<SemanticModality, SemanticSource>,
    partition: &Partition,
    config: &TrainConfig,
    normalize: bool,
) -> Result<Vec<(TrialResult, TrainReport)>> {
    partition.validate()?;
    if sources.is_empty() {
        return Err(Error::EmptyInput {
            context: String::from("semantic sources"),
        });
    }
    let groups = acoustic.grouped_by_class();
    for class in partition.all_classes() {
        if !groups.contains_key(class.as_str()) {
            return Err(Error::ClassWithoutRecords {
                class,
                context: String::from("acoustic table"),
            });
        }
    }
    let train_instances = acoustic.restrict_to_classes(&partition.train_classes);
    let val_instances = acoustic.restrict_to_classes(&partition.val_classes);
    let test_instances = acoustic.restrict_to_classes(&partition.test_classes);
    let (test_thetas, test_truths) = instances_and_truths(&test_instances);

    let mut trial_config = config.clone();
    trial_config.seed = derive_seed(config.seed, partition.trial_seed);

    let mut results = Vec::with_capacity(sources.len());
    for (&modality, source) in sources {
        let (seen, val, test) = semantic_tables(source, acoustic, partition, normalize)?;
        let report = train(&train_instances, &seen, &val_instances, &val, &trial_config)?;
        let predictions: Vec<String> = score_matrix(&report.params, &test_thetas, &test)?
            .iter()
            .map(|scores| scores.argmax().to_string())
            .collect();
        let result = TrialResult {
            protocol: partition.protocol,
            modality,
            aggregation: source.aggregation(),
            accuracy: top1_accuracy(&predictions, &test_truths)?,
            trial_seed: partition.trial_seed,
            normalized: normalize,
            partition: partition.clone(),
        };
        results.push((result, report));
    }
    Ok(results)
}

/// Groups trial accuracies per modality and aggregates each group.
///
/// Every trial must share one test-class count so the reported chance
/// level (the reciprocal) is well defined.
pub fn summarize_trials(
    trials: &[TrialResult],
) -> Result<BTreeMap<SemanticModality, ExperimentSummary>> {
    if trials.is_empty() {
        return Err(Error::EmptyInput {
            context: String::from("trial results"),
        });
    }
    let n_test = trials[0].partition.test_classes.len();
    for trial in trials {
        if trial.partition.test_classes.len() != n_test {
            return Err(Error::InvalidConfig {
                message: String::from(
                    "trials mix different test-class counts; chance level is ambiguous",
                ),
            });
        }
    }
    let chance = 1.0 / n_test as f64;
    let mut grouped: BTreeMap<SemanticModality, Vec<f64>> = BTreeMap::new();
    for trial in trials {
        grouped
            .entry(trial.modality)
            .or_default()
            .push(trial.accuracy);
    }
    grouped
        .into_iter()
        .map(|(modality, accs)| Ok((modality, aggregate_trials(&accs, chance)?)))
        .collect()
}

/// Runs every partition against every modality and summarizes.
pub fn run_experiment(
    acoustic: &EmbeddingTable,
    sources: &BTreeMap<SemanticModality, SemanticSource>,
    partitions: &[Partition],
    config: &TrainConfig,
    normalize: bool,
) -> Result<ExperimentOutcome> {
    if partitions.is_empty() {
        return Err(Error::EmptyInput {
            context: String::from("partitions"),
        });
    }
    let mut trials = Vec::with_capacity(partitions.len() * sources.len());
    for partition in partitions {
        trials.extend(run_trial(acoustic, sources, partition, config, normalize)?);
    }
    let summaries = summarize_trials(&trials)?;
    Ok(ExperimentOutcome { trials, summaries })
}
