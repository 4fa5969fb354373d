//! Synthetic world emission in the formats the other commands ingest.

use std::path::Path;

use zsac_core::synth::generate_world;

use crate::error::Result;
use crate::io;
use crate::manifest::ManifestBuilder;

/// Generates a world from a spec file and writes `acoustic.jsonl`,
/// `semantic.jsonl`, `taxonomy.json`, and the resolved `world.json`.
pub fn cmd_synth(spec_path: &Path, output_dir: &Path, seed_override: Option<u64>) -> Result<i32> {
    let mut spec = io::load_world_spec(spec_path)?;
    if let Some(seed) = seed_override {
        spec.seed = seed;
    }
    let mut manifest = ManifestBuilder::new("synth", &spec)?;
    manifest.input(spec_path)?;

    let (acoustic, semantic, taxonomy) = generate_world(&spec)?;

    let acoustic_path = output_dir.join("acoustic.jsonl");
    io::write_embedding_table(&acoustic_path, &acoustic)?;
    manifest.output(&acoustic_path);

    let semantic_path = output_dir.join("semantic.jsonl");
    io::write_class_table(&semantic_path, &semantic)?;
    manifest.output(&semantic_path);

    let taxonomy_path = output_dir.join("taxonomy.json");
    io::write_taxonomy(&taxonomy_path, &taxonomy)?;
    manifest.output(&taxonomy_path);

    let spec_out = output_dir.join("world.json");
    io::write_json(&spec_out, &spec)?;
    manifest.output(&spec_out);

    manifest.write(output_dir)?;
    println!(
        "world: {} classes, {} acoustic instances ({} dims), semantic dims {}",
        semantic.len(),
        acoustic.len(),
        acoustic.dimension(),
        semantic.dimension(),
    );
    Ok(0)
}
