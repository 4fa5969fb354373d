//! Dataset preparation: label intersection, hierarchy pruning, and
//! per-class sample caps.

use std::path::{Path, PathBuf};

use serde::Serialize;
use zsac_core::embeddings::InstanceModality;
use zsac_core::ontology::{intersect_by_mid, prune_hierarchy, subsample_caps, ClassProvenance};

use crate::error::{Result, EXIT_WARNING};
use crate::io;
use crate::manifest::ManifestBuilder;

/// One optional embedding side to restrict and cap.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingSide {
    pub path: PathBuf,
    pub dimension: usize,
    pub cap: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrepareArgs {
    pub taxonomy: PathBuf,
    pub audio_labels: PathBuf,
    pub image_labels: PathBuf,
    pub audio_embeddings: Option<EmbeddingSide>,
    pub image_embeddings: Option<EmbeddingSide>,
    pub seed: u64,
}

/// Intersects the two label sets, prunes against the taxonomy, and caps
/// per-class sample counts of any provided embedding tables. Returns the
/// process exit code (a warning code when the intersection is empty).
pub fn cmd_prepare(args: &PrepareArgs, output_dir: &Path) -> Result<i32> {
    let mut manifest = ManifestBuilder::new("prepare", args)?;
    manifest.input(&args.taxonomy)?;
    manifest.input(&args.audio_labels)?;
    manifest.input(&args.image_labels)?;

    let taxonomy = io::load_taxonomy(&args.taxonomy)?;
    let audio_labels = io::load_label_set(&args.audio_labels)?;
    let image_labels = io::load_label_set(&args.image_labels)?;

    let mutual = intersect_by_mid(&audio_labels, &image_labels);
    let mutual_path = output_dir.join("mutual-classes.txt");
    io::write_label_set(&mutual_path, mutual.classes())?;
    manifest.output(&mutual_path);
    println!("mutual classes: {}", mutual.len());

    let pruned = prune_hierarchy(&taxonomy, &mutual)?;
    let pruned_path = output_dir.join("pruned-classes.txt");
    io::write_label_set(&pruned_path, pruned.classes())?;
    manifest.output(&pruned_path);

    let provenance_path = output_dir.join("class-provenance.json");
    io::write_json(&provenance_path, &io::ProvenanceFile::from_set(&pruned))?;
    manifest.output(&provenance_path);

    let removed_busy = pruned
        .provenance()
        .values()
        .filter(|p| matches!(p, ClassProvenance::RemovedTooManyDescendants { .. }))
        .count();
    let absorbed = pruned
        .provenance()
        .values()
        .filter(|p| matches!(p, ClassProvenance::RemovedAbsorbedInto { .. }))
        .count();
    println!(
        "after pruning: {} ({} removed for >2 mutual descendants, {} absorbed into parents)",
        pruned.len(),
        removed_busy,
        absorbed,
    );

    for (side, tag, name) in [
        (&args.audio_embeddings, InstanceModality::Acoustic, "audio"),
        (&args.image_embeddings, InstanceModality::Image, "image"),
    ] {
        let Some(side) = side else { continue };
        manifest.input(&side.path)?;
        let table = io::load_embedding_table(&side.path, side.dimension, tag)?;
        let restricted = table.restrict_to_classes(pruned.classes());
        let capped = subsample_caps(&restricted, side.cap, args.seed)?;
        let out = output_dir.join(format!("{name}-subsampled.jsonl"));
        io::write_embedding_table(&out, &capped)?;
        manifest.output(&out);
        println!(
            "{name}: {} instances in, {} after class restriction, {} after cap {}",
            table.len(),
            restricted.len(),
            capped.len(),
            side.cap,
        );
    }

    manifest.write(output_dir)?;

    if mutual.is_empty() {
        eprintln!("warning: the label sets share no classes");
        return Ok(EXIT_WARNING);
    }
    Ok(0)
}
