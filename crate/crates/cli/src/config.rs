//! Experiment run configuration.
//!
//! One JSON config drives a whole multi-trial, multi-modality run, so one
//! invocation produces one results table. Paths are resolved relative to
//! the config file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use zsac_core::embeddings::{
    compose_label_embedding, ClassEmbeddingTable, InstanceModality, SemanticModality,
};
use zsac_core::evaluation::{Aggregation, SemanticSource};
use zsac_core::partitions::Protocol;
use zsac_core::training::TrainConfig;

use crate::error::{CliError, Result};
use crate::io;

fn default_trials() -> usize {
    5
}

fn default_true() -> bool {
    true
}

/// An embedding file plus its declared dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRef {
    pub path: PathBuf,
    pub dimension: usize,
}

/// Where a modality's class vectors come from, as configured.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceConfig {
    /// The acoustic table itself (the upper-bound modality).
    AudioSelf {
        #[serde(default)]
        aggregation: Aggregation,
    },
    /// Instance or class JSONL table, reduced per class. A class-level
    /// table is simply a file with one line per class.
    Table {
        path: PathBuf,
        dimension: usize,
        #[serde(default)]
        aggregation: Aggregation,
        /// Instance tag recorded on the loaded table; defaults to the
        /// owning modality.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tag: Option<String>,
    },
    /// Class vectors composed by averaging token vectors over the
    /// whitespace-split taxonomy label of each class.
    LabelCompose {
        tokens: PathBuf,
        dimension: usize,
        taxonomy: PathBuf,
    },
    /// Concatenation of two table-backed sources.
    Hybrid {
        first: Box<SourceConfig>,
        second: Box<SourceConfig>,
    },
}

/// One modality entry: reporting name plus its source.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModalityConfig {
    pub modality: String,
    pub source: SourceConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: Protocol,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Explicit train/val/test class counts for the random protocol;
    /// default is equal thirds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_counts: Option<[usize; 3]>,
    pub acoustic: TableRef,
    /// Optional class vocabulary file (one MID per line); the acoustic
    /// table is restricted to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<PathBuf>,
    /// Category spec file, required by the category protocols.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<PathBuf>,
    /// Category name for the within-category protocol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    /// Category pair for the across-category protocol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category_pair: Option<[String; 2]>,
    pub modalities: Vec<ModalityConfig>,
    /// L2-normalize semantic class vectors (constituents first for the
    /// hybrid modality).
    #[serde(default)]
    pub normalize: bool,
    #[serde(default)]
    pub train: TrainConfig,
    /// Directory of partition JSON files to replay instead of generating
    /// new splits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partitions: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub write_csv: bool,
    /// Also write per-trial training reports and parameter checkpoints.
    #[serde(default)]
    pub write_reports: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let mut config: RunConfig = io::read_json(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.resolve_paths(base);
        config.validate()?;
        Ok(config)
    }

    /// Resolves all contained paths relative to the config location.
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        fix(&mut self.acoustic.path);
        if let Some(p) = &mut self.classes {
            fix(p);
        }
        if let Some(p) = &mut self.categories {
            fix(p);
        }
        if let Some(p) = &mut self.partitions {
            fix(p);
        }
        for modality in &mut self.modalities {
            resolve_source_paths(&mut modality.source, base);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(CliError::validation("trials must be at least 1"));
        }
        if self.modalities.is_empty() {
            return Err(CliError::validation("at least one modality is required"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for entry in &self.modalities {
            SemanticModality::from_reporting_name(&entry.modality)?;
            if !seen.insert(entry.modality.clone()) {
                return Err(CliError::validation(format!(
                    "modality {:?} configured twice",
                    entry.modality
                )));
            }
        }
        match self.protocol {
            Protocol::Random => {}
            Protocol::WithinCategory => {
                if self.category.is_none() || self.categories.is_none() {
                    return Err(CliError::validation(
                        "within-category runs need `category` and `categories`",
                    ));
                }
            }
            Protocol::AcrossCategory => {
                if self.category_pair.is_none() || self.categories.is_none() {
                    return Err(CliError::validation(
                        "across-category runs need `category_pair` and `categories`",
                    ));
                }
            }
        }
        if self.split_counts.is_some() && self.protocol != Protocol::Random {
            return Err(CliError::validation(
                "split_counts applies to the random protocol only",
            ));
        }
        self.train.validate()?;
        Ok(())
    }
}

fn resolve_source_paths(source: &mut SourceConfig, base: &Path) {
    let fix = |p: &mut PathBuf| {
        if p.is_relative() {
            *p = base.join(&p);
        }
    };
    match source {
        SourceConfig::AudioSelf { .. } => {}
        SourceConfig::Table { path, .. } => fix(path),
        SourceConfig::LabelCompose {
            tokens, taxonomy, ..
        } => {
            fix(tokens);
            fix(taxonomy);
        }
        SourceConfig::Hybrid { first, second } => {
            resolve_source_paths(first, base);
            resolve_source_paths(second, base);
        }
    }
}

fn parse_instance_tag(tag: &str) -> Result<InstanceModality> {
    match tag {
        "acoustic" => Ok(InstanceModality::Acoustic),
        "image" => Ok(InstanceModality::Image),
        "text-token" => Ok(InstanceModality::TextToken),
        other => Err(CliError::validation(format!(
            "unknown instance tag {other:?}; expected acoustic, image, or text-token"
        ))),
    }
}

fn default_instance_tag(owner: SemanticModality, is_second_constituent: bool) -> InstanceModality {
    match owner {
        SemanticModality::AcousticSemantic => InstanceModality::Acoustic,
        SemanticModality::Image => InstanceModality::Image,
        SemanticModality::Text => InstanceModality::TextToken,
        // the conventional hybrid is image followed by text
        SemanticModality::Hybrid => {
            if is_second_constituent {
                InstanceModality::TextToken
            } else {
                InstanceModality::Image
            }
        }
    }
}

/// Composes one class vector per vocabulary class by averaging the token
/// vectors of its whitespace-split taxonomy label.
fn compose_from_labels(
    tokens_path: &Path,
    dimension: usize,
    taxonomy_path: &Path,
    vocabulary: &std::collections::BTreeSet<String>,
) -> Result<ClassEmbeddingTable> {
    let tokens = io::load_embedding_table(tokens_path, dimension, InstanceModality::TextToken)?;
    let by_id: BTreeMap<&str, &[f64]> = tokens
        .records()
        .iter()
        .map(|r| (r.instance_id.as_str(), r.vector.as_slice()))
        .collect();
    let taxonomy = io::load_taxonomy(taxonomy_path)?;
    let mut entries = BTreeMap::new();
    for mid in vocabulary {
        let label = taxonomy.label(mid).ok_or_else(|| {
            CliError::validation(format!(
                "class {mid} is missing from {}",
                taxonomy_path.display()
            ))
        })?;
        let vectors: Vec<Vec<f64>> = label
            .split_whitespace()
            .filter_map(|token| by_id.get(token.to_lowercase().as_str()))
            .map(|v| v.to_vec())
            .collect();
        if vectors.is_empty() {
            return Err(CliError::validation(format!(
                "no token vectors found for class {mid} (label {label:?})"
            )));
        }
        entries.insert(mid.clone(), compose_label_embedding(&vectors)?);
    }
    ClassEmbeddingTable::new(SemanticModality::Text, dimension, entries).map_err(CliError::from)
}

fn build_source(
    config: &SourceConfig,
    owner: SemanticModality,
    is_second_constituent: bool,
    vocabulary: &std::collections::BTreeSet<String>,
) -> Result<SemanticSource> {
    match config {
        SourceConfig::AudioSelf { aggregation } => Ok(SemanticSource::AudioSelf {
            aggregation: *aggregation,
        }),
        SourceConfig::Table {
            path,
            dimension,
            aggregation,
            tag,
        } => {
            let instance_tag = match tag {
                Some(t) => parse_instance_tag(t)?,
                None => default_instance_tag(owner, is_second_constituent),
            };
            let table = io::load_embedding_table(path, *dimension, instance_tag)?;
            Ok(SemanticSource::InstanceTable {
                table,
                aggregation: *aggregation,
            })
        }
        SourceConfig::LabelCompose {
            tokens,
            dimension,
            taxonomy,
        } => {
            let table = compose_from_labels(tokens, *dimension, taxonomy, vocabulary)?;
            Ok(SemanticSource::ClassTable(table))
        }
        SourceConfig::Hybrid { first, second } => Ok(SemanticSource::Hybrid {
            first: Box::new(build_source(first, owner, false, vocabulary)?),
            second: Box::new(build_source(second, owner, true, vocabulary)?),
        }),
    }
}

/// Loads every configured modality source.
pub fn build_sources(
    config: &RunConfig,
    vocabulary: &std::collections::BTreeSet<String>,
) -> Result<BTreeMap<SemanticModality, SemanticSource>> {
    let mut sources = BTreeMap::new();
    for entry in &config.modalities {
        let modality = SemanticModality::from_reporting_name(&entry.modality)?;
        let source = build_source(&entry.source, modality, false, vocabulary)?;
        sources.insert(modality, source);
    }
    Ok(sources)
}
