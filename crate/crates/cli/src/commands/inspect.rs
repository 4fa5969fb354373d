//! Artifact pretty-printer: sniffs the file kind and prints a human
//! summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde_json::Value;
use zsac_core::linalg::norm;

use crate::error::{CliError, Result};
use crate::io;
use crate::tables::render_summary;

pub fn cmd_inspect(path: &Path) -> Result<i32> {
    let extension = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or_default();
    let report = match extension {
        "jsonl" => inspect_embeddings(path),
        "json" => inspect_json(path),
        _ => inspect_text(path),
    }?;
    // tolerate downstream pagers closing the pipe early
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(report.as_bytes()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(CliError::runtime(format!("stdout: {e}")));
        }
    }
    Ok(0)
}

fn inspect_embeddings(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut per_class: BTreeMap<String, usize> = BTreeMap::new();
    let mut dimension = None;
    let mut records = 0usize;
    for (number, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line)
            .map_err(|e| CliError::parse(path, format!("line {}: {e}", number + 1)))?;
        let class = value
            .get("class")
            .and_then(Value::as_str)
            .unwrap_or("(unknown)");
        *per_class.entry(class.to_string()).or_default() += 1;
        if dimension.is_none() {
            dimension = value.get("vector").and_then(Value::as_array).map(Vec::len);
        }
        records += 1;
    }
    let mut out = String::new();
    let _ = writeln!(out, "embedding file: {}", path.display());
    let _ = writeln!(
        out,
        "  {} records, {} classes, dimension {}",
        records,
        per_class.len(),
        dimension.map_or_else(|| "?".to_string(), |d| d.to_string()),
    );
    if let (Some(min), Some(max)) = (
        per_class.values().min().copied(),
        per_class.values().max().copied(),
    ) {
        let _ = writeln!(out, "  records per class: min {min}, max {max}");
    }
    for (class, count) in per_class.iter().take(5) {
        let _ = writeln!(out, "    {class}: {count}");
    }
    if per_class.len() > 5 {
        let _ = writeln!(out, "    ... {} more classes", per_class.len() - 5);
    }
    Ok(out)
}

fn inspect_json(path: &Path) -> Result<String> {
    let value: Value = io::read_json(path)?;
    let object = value.as_object();
    let has = |key: &str| object.is_some_and(|o| o.contains_key(key));
    let mut out = String::new();

    if has("nodes") && has("roots") {
        let taxonomy = io::load_taxonomy(path)?;
        let _ = writeln!(out, "taxonomy: {}", path.display());
        let _ = writeln!(
            out,
            "  {} nodes, {} roots",
            taxonomy.len(),
            taxonomy.roots().len()
        );
        let leaves = taxonomy
            .nodes()
            .filter(|(_, node)| node.children.is_empty())
            .count();
        let _ = writeln!(out, "  {leaves} leaves");
    } else if has("protocol") && has("train") {
        let partition = io::load_partition(path)?;
        let _ = writeln!(out, "partition: {}", path.display());
        let _ = writeln!(
            out,
            "  protocol {}, seed {}",
            partition.protocol.as_str(),
            partition.trial_seed
        );
        let _ = writeln!(
            out,
            "  train {} / val {} / test {}",
            partition.train_classes.len(),
            partition.val_classes.len(),
            partition.test_classes.len(),
        );
        for mid in partition.test_classes.iter() {
            let _ = writeln!(out, "    test: {mid}");
        }
    } else if has("n_classes") && has("d_a") {
        let spec = io::load_world_spec(path)?;
        let _ = writeln!(out, "world spec: {}", path.display());
        let _ = writeln!(
            out,
            "  {} classes, d_a {}, d_s {}, {} samples/class, noise {}/{}, seed {}",
            spec.n_classes,
            spec.d_a,
            spec.d_s,
            spec.samples_per_class,
            spec.within_class_noise,
            spec.semantic_map_noise,
            spec.seed,
        );
    } else if has("trials") && has("summaries") {
        let results: crate::commands::run::ResultsFile = io::read_json(path)?;
        let _ = writeln!(out, "results: {}", path.display());
        let protocol = results
            .trials
            .first()
            .map(|t| t.protocol)
            .ok_or_else(|| CliError::parse(path, "results file contains no trials"))?;
        let normalized = results.trials.first().is_some_and(|t| t.normalized);
        out.push_str(&render_summary(protocol, &results.summaries, normalized));
        let _ = writeln!(out, "  {} trial rows", results.trials.len());
    } else if has("command") && has("inputs") {
        let manifest: crate::manifest::RunManifest = io::read_json(path)?;
        let _ = writeln!(out, "manifest: {}", path.display());
        let _ = writeln!(
            out,
            "  command {}, {} inputs, {} outputs, {:.2}s",
            manifest.command,
            manifest.inputs.len(),
            manifest.outputs.len(),
            manifest.duration_seconds,
        );
        for output in manifest.outputs.iter().take(8) {
            let _ = writeln!(out, "    out: {output}");
        }
    } else if has("classes") && has("provenance") {
        let file: io::ProvenanceFile = io::read_json(path)?;
        let _ = writeln!(out, "class provenance: {}", path.display());
        let _ = writeln!(out, "  {} surviving classes", file.classes.len());
        let removed = file.provenance.len() - file.classes.len();
        let _ = writeln!(out, "  {removed} removed (see per-class rules inside)");
    } else if has("U") && has("V") {
        let params = io::load_checkpoint(path)?;
        let _ = writeln!(out, "checkpoint: {}", path.display());
        let _ = writeln!(
            out,
            "  d_s {}, d_a {}, rank {}, activation {:?}, seed {}",
            params.d_s(),
            params.d_a(),
            params.rank(),
            params.activation(),
            params.seed(),
        );
        let _ = writeln!(
            out,
            "  |U| {:.4}, |V| {:.4}",
            norm(params.u().as_slice()),
            norm(params.v().as_slice()),
        );
    } else {
        let _ = writeln!(out, "json: {}", path.display());
        let pretty = serde_json::to_string_pretty(&value)
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        for line in pretty.lines().take(40) {
            let _ = writeln!(out, "  {line}");
        }
    }
    Ok(out)
}

fn inspect_text(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let total = text.lines().count();
    let mut out = String::new();
    let _ = writeln!(out, "text file: {} ({total} lines)", path.display());
    for line in text.lines().take(20) {
        let _ = writeln!(out, "  {line}");
    }
    if total > 20 {
        let _ = writeln!(out, "  ... {} more lines", total - 20);
    }
    Ok(out)
}
