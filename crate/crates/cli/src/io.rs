//! Readers and writers for every artifact file format.
//!
//! Formats:
//! - embedding files: JSON Lines, one record per line,
//!   `{"id": "...", "class": "/m/...", "vector": [...]}`; class tables
//!   reuse the same format with one line per class and `id` = class MID
//! - taxonomy: JSON `{"nodes": [{"mid", "label", "children"}], "roots": []}`
//! - label sets: plain text, one MID per line, `#` comments allowed
//! - category specs: JSON `{"categories": [{"name", "members"}]}`
//! - partitions: JSON `{"protocol", "seed", "train", "val", "test",
//!   "category_tags"}`
//! - checkpoints: JSON with row-major `U` and `V` arrays
//!
//! All files are UTF-8. Writers emit a trailing newline.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use zsac_core::embeddings::{
    ClassEmbeddingTable, EmbeddingRecord, EmbeddingTable, InstanceModality,
};
use zsac_core::model::{Activation, ProjectionParams};
use zsac_core::ontology::{
    category_specs, CategorySpec, ClassProvenance, MutualClassSet, NodeSpec, Taxonomy,
};
use zsac_core::partitions::Partition;
use zsac_core::synth::WorldSpec;

use crate::error::{CliError, Result};

#[derive(Serialize, Deserialize)]
struct EmbeddingLine {
    id: String,
    class: String,
    vector: Vec<f64>,
}

/// Loads a JSONL embedding file, validating each line against the
/// declared dimension and reporting the offending line number on error.
pub fn load_embedding_table(
    path: &Path,
    declared_dimension: usize,
    modality: InstanceModality,
) -> Result<EmbeddingTable> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut seen_ids = BTreeSet::new();
    for (number, line) in reader.lines().enumerate() {
        let number = number + 1;
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: EmbeddingLine = serde_json::from_str(&line)
            .map_err(|e| CliError::parse(path, format!("line {number}: {e}")))?;
        if parsed.vector.len() != declared_dimension {
            return Err(CliError::parse(
                path,
                format!(
                    "line {number}: vector has {} entries, declared dimension is {}",
                    parsed.vector.len(),
                    declared_dimension
                ),
            ));
        }
        if let Some(bad) = parsed.vector.iter().find(|x| !x.is_finite()) {
            return Err(CliError::parse(
                path,
                format!("line {number}: non-finite entry {bad}"),
            ));
        }
        if !seen_ids.insert(parsed.id.clone()) {
            return Err(CliError::parse(
                path,
                format!("line {number}: duplicate instance id {:?}", parsed.id),
            ));
        }
        records.push(EmbeddingRecord {
            instance_id: parsed.id,
            class_mid: parsed.class,
            vector: parsed.vector,
        });
    }
    EmbeddingTable::new(modality, declared_dimension, records).map_err(CliError::from)
}

pub fn write_embedding_table(path: &Path, table: &EmbeddingTable) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for record in table.records() {
        let line = EmbeddingLine {
            id: record.instance_id.clone(),
            class: record.class_mid.clone(),
            vector: record.vector.clone(),
        };
        serde_json::to_writer(&mut writer, &line)
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        writer.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

/// Writes a class table in the embedding JSONL format, one line per class
/// with the class MID doubling as the instance id.
pub fn write_class_table(path: &Path, table: &ClassEmbeddingTable) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for (mid, vector) in table.iter() {
        let line = EmbeddingLine {
            id: mid.to_string(),
            class: mid.to_string(),
            vector: vector.to_vec(),
        };
        serde_json::to_writer(&mut writer, &line)
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        writer.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct TaxonomyFile {
    nodes: Vec<NodeSpec>,
    roots: Vec<String>,
}

pub fn load_taxonomy(path: &Path) -> Result<Taxonomy> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: TaxonomyFile = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
    Taxonomy::new(file.nodes, file.roots).map_err(CliError::from)
}

pub fn write_taxonomy(path: &Path, taxonomy: &Taxonomy) -> Result<()> {
    let nodes = taxonomy
        .nodes()
        .map(|(mid, node)| NodeSpec {
            mid: mid.to_string(),
            label: node.label.clone(),
            children: node.children.clone(),
        })
        .collect();
    let file = TaxonomyFile {
        nodes,
        roots: taxonomy.roots().iter().cloned().collect(),
    };
    write_json(path, &file)
}

/// Loads one MID per line; blank lines and `#` comments are skipped.
pub fn load_label_set(path: &Path) -> Result<BTreeSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

pub fn write_label_set(path: &Path, labels: &BTreeSet<String>) -> Result<()> {
    let mut text = String::new();
    for label in labels {
        text.push_str(label);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct CategoryFile {
    categories: Vec<CategoryEntry>,
}

#[derive(Serialize, Deserialize)]
struct CategoryEntry {
    name: String,
    members: Vec<String>,
}

pub fn load_categories(path: &Path) -> Result<Vec<CategorySpec>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: CategoryFile = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
    let entries: Vec<(String, Vec<String>)> = file
        .categories
        .into_iter()
        .map(|c| (c.name, c.members))
        .collect();
    category_specs(&entries).map_err(CliError::from)
}

pub fn load_partition(path: &Path) -> Result<Partition> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let partition: Partition = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
    partition.validate()?;
    Ok(partition)
}

pub fn load_world_spec(path: &Path) -> Result<WorldSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let spec: WorldSpec = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
    spec.validate()?;
    Ok(spec)
}

/// Audit record of the prepare pipeline: surviving classes plus the rule
/// applied to every class that was ever in the mutual set.
#[derive(Serialize, Deserialize)]
pub struct ProvenanceFile {
    pub classes: Vec<String>,
    pub provenance: BTreeMap<String, ClassProvenance>,
}

impl ProvenanceFile {
    pub fn from_set(set: &MutualClassSet) -> Self {
        ProvenanceFile {
            classes: set.classes().iter().cloned().collect(),
            provenance: set.provenance().clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct CheckpointFile {
    pub d_s: usize,
    pub d_a: usize,
    pub r: usize,
    pub activation: Activation,
    #[serde(rename = "U")]
    pub u: Vec<f64>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    pub seed: u64,
}

impl CheckpointFile {
    pub fn from_params(params: &ProjectionParams) -> Self {
        CheckpointFile {
            d_s: params.d_s(),
            d_a: params.d_a(),
            r: params.rank(),
            activation: params.activation(),
            u: params.u().as_slice().to_vec(),
            v: params.v().as_slice().to_vec(),
            seed: params.seed(),
        }
    }

    pub fn into_params(self) -> Result<ProjectionParams> {
        ProjectionParams::from_parts(
            self.d_s,
            self.d_a,
            self.r,
            self.activation,
            self.u,
            self.v,
            self.seed,
        )
        .map_err(CliError::from)
    }
}

pub fn load_checkpoint(path: &Path) -> Result<ProjectionParams> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: CheckpointFile = serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
    file.into_params()
}

/// Writes any serializable value as pretty-printed JSON with a trailing
/// newline. Output bytes depend only on the value.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
}
