//! Experiment execution: partitions, parallel trials, results, tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use zsac_core::embeddings::{EmbeddingTable, InstanceModality, SemanticModality};
use zsac_core::evaluation::{
    run_trial_with_reports, summarize_trials, ExperimentSummary, SemanticSource, TrialResult,
};
use zsac_core::ontology::CategorySpec;
use zsac_core::partitions::{
    across_category_split, random_split, random_split_with_counts, within_category_split,
    Partition, Protocol,
};
use zsac_core::training::TrainReport;

use crate::config::{build_sources, RunConfig, SourceConfig};
use crate::error::{CliError, Result};
use crate::io;
use crate::manifest::ManifestBuilder;
use crate::tables::render_summary;

/// Results file layout: all trial rows plus one summary per modality,
/// keyed by reporting name.
#[derive(Serialize, Deserialize)]
pub struct ResultsFile {
    pub trials: Vec<TrialResult>,
    pub summaries: BTreeMap<String, ExperimentSummary>,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    train_loss: &'a [f64],
    val_accuracy: &'a [f64],
    selected_epoch: usize,
    checkpoint: String,
}

fn category<'a>(specs: &'a [CategorySpec], name: &str) -> Result<&'a CategorySpec> {
    specs
        .iter()
        .find(|s| s.name.as_str() == name)
        .ok_or_else(|| {
            CliError::validation(format!("category {name:?} is not in the category file"))
        })
}

/// Generates `trials` partitions with seeds `base_seed`, `base_seed+1`, …
fn generate_partitions(
    config: &RunConfig,
    vocabulary: &BTreeSet<String>,
) -> Result<Vec<Partition>> {
    let specs = match &config.categories {
        Some(path) => io::load_categories(path)?,
        None => Vec::new(),
    };
    let mut partitions = Vec::with_capacity(config.trials);
    for i in 0..config.trials {
        let seed = config.base_seed + i as u64;
        let partition = match config.protocol {
            Protocol::Random => match config.split_counts {
                Some([t, v, e]) => random_split_with_counts(vocabulary, (t, v, e), seed)?,
                None => random_split(vocabulary, seed)?,
            },
            Protocol::WithinCategory => {
                let name = config.category.as_deref().expect("validated");
                within_category_split(category(&specs, name)?, seed)?
            }
            Protocol::AcrossCategory => {
                let [a, b] = config.category_pair.as_ref().expect("validated");
                across_category_split(category(&specs, a)?, category(&specs, b)?, seed)?
            }
        };
        partitions.push(partition);
    }
    Ok(partitions)
}

/// Loads partition files from a replay directory, sorted by trial seed.
fn replay_partitions(dir: &Path, protocol: Protocol) -> Result<Vec<Partition>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    let mut partitions = Vec::with_capacity(paths.len());
    for path in &paths {
        let partition = io::load_partition(path)?;
        if partition.protocol != protocol {
            return Err(CliError::validation(format!(
                "{}: partition protocol {} does not match the configured {}",
                path.display(),
                partition.protocol.as_str(),
                protocol.as_str(),
            )));
        }
        partitions.push(partition);
    }
    if partitions.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no partition files to replay",
            dir.display()
        )));
    }
    partitions.sort_by_key(|p| p.trial_seed);
    Ok(partitions)
}

fn register_source_inputs(manifest: &mut ManifestBuilder, source: &SourceConfig) -> Result<()> {
    match source {
        SourceConfig::AudioSelf { .. } => Ok(()),
        SourceConfig::Table { path, .. } => manifest.input(path),
        SourceConfig::LabelCompose {
            tokens, taxonomy, ..
        } => {
            manifest.input(tokens)?;
            manifest.input(taxonomy)
        }
        SourceConfig::Hybrid { first, second } => {
            register_source_inputs(manifest, first)?;
            register_source_inputs(manifest, second)
        }
    }
}

fn write_reports(
    output_dir: &Path,
    rows: &[(TrialResult, TrainReport)],
    manifest: &mut ManifestBuilder,
) -> Result<()> {
    let reports_dir = output_dir.join("reports");
    let checkpoints_dir = output_dir.join("checkpoints");
    fs::create_dir_all(&reports_dir).map_err(|e| CliError::io(&reports_dir, e))?;
    fs::create_dir_all(&checkpoints_dir).map_err(|e| CliError::io(&checkpoints_dir, e))?;
    for (result, report) in rows {
        let stem = format!(
            "trial-{}-{}",
            result.trial_seed,
            result.modality.reporting_name()
        );
        let checkpoint_path = checkpoints_dir.join(format!("{stem}.json"));
        io::write_json(
            &checkpoint_path,
            &io::CheckpointFile::from_params(&report.params),
        )?;
        let report_path = reports_dir.join(format!("{stem}.json"));
        io::write_json(
            &report_path,
            &ReportFile {
                train_loss: &report.train_loss,
                val_accuracy: &report.val_accuracy,
                selected_epoch: report.selected_epoch,
                checkpoint: checkpoint_path.display().to_string(),
            },
        )?;
        manifest.output(&checkpoint_path);
        manifest.output(&report_path);
    }
    Ok(())
}

fn write_csv(path: &Path, trials: &[TrialResult]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    writer
        .write_record(["protocol", "modality", "aggregation", "seed", "accuracy"])
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    for trial in trials {
        writer
            .write_record([
                trial.protocol.as_str(),
                trial.modality.reporting_name(),
                trial.aggregation.as_str(),
                &trial.trial_seed.to_string(),
                &trial.accuracy.to_string(),
            ])
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    }
    writer
        .flush()
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

/// Runs one configured experiment end to end and writes results, tables,
/// partitions, and the manifest into `output_dir`.
pub fn cmd_run(
    config_path: &Path,
    output_dir: &Path,
    seed_override: Option<u64>,
    jobs: Option<usize>,
) -> Result<i32> {
    let mut config = RunConfig::load(config_path)?;
    if let Some(seed) = seed_override {
        config.base_seed = seed;
    }
    let mut manifest = ManifestBuilder::new("run", &config)?;
    manifest.input(config_path)?;
    manifest.input(&config.acoustic.path)?;
    if let Some(path) = &config.classes {
        manifest.input(path)?;
    }
    if let Some(path) = &config.categories {
        manifest.input(path)?;
    }
    for entry in &config.modalities {
        register_source_inputs(&mut manifest, &entry.source)?;
    }

    let mut acoustic = io::load_embedding_table(
        &config.acoustic.path,
        config.acoustic.dimension,
        InstanceModality::Acoustic,
    )?;
    let vocabulary = match &config.classes {
        Some(path) => {
            let classes = io::load_label_set(path)?;
            acoustic = acoustic.restrict_to_classes(&classes);
            classes
        }
        None => acoustic.classes(),
    };
    let covered = acoustic.classes();
    if let Some(missing) = vocabulary.difference(&covered).next() {
        return Err(CliError::validation(format!(
            "class {missing} has no acoustic instances"
        )));
    }

    let sources = build_sources(&config, &vocabulary)?;

    let replaying = config.partitions.is_some();
    let partitions = match &config.partitions {
        Some(dir) => replay_partitions(dir, config.protocol)?,
        None => generate_partitions(&config, &vocabulary)?,
    };

    let rows = execute_trials(&acoustic, &sources, &partitions, &config, jobs)?;

    if !replaying {
        let partitions_dir = output_dir.join("partitions");
        fs::create_dir_all(&partitions_dir).map_err(|e| CliError::io(&partitions_dir, e))?;
        for partition in &partitions {
            let path = partitions_dir.join(format!("partition-{}.json", partition.trial_seed));
            io::write_json(&path, partition)?;
            manifest.output(&path);
        }
    }

    if config.write_reports {
        write_reports(output_dir, &rows, &mut manifest)?;
    }

    let mut trials: Vec<TrialResult> = rows.into_iter().map(|(result, _)| result).collect();
    trials.sort_by_key(|t| (t.trial_seed, t.modality));
    let summaries: BTreeMap<String, ExperimentSummary> = summarize_trials(&trials)?
        .into_iter()
        .map(|(modality, summary)| (modality.reporting_name().to_string(), summary))
        .collect();

    let results_path = output_dir.join("results.json");
    io::write_json(
        &results_path,
        &ResultsFile {
            trials: trials.clone(),
            summaries: summaries.clone(),
        },
    )?;
    manifest.output(&results_path);

    if config.write_csv {
        let csv_path = output_dir.join("results.csv");
        write_csv(&csv_path, &trials)?;
        manifest.output(&csv_path);
    }

    let table = render_summary(config.protocol, &summaries, config.normalize);
    let table_path = output_dir.join("table.txt");
    fs::write(&table_path, &table).map_err(|e| CliError::io(&table_path, e))?;
    manifest.output(&table_path);
    print!("{table}");

    manifest.write(output_dir)?;
    Ok(0)
}

/// Fans trials out over the worker pool; failures carry the trial seed.
fn execute_trials(
    acoustic: &EmbeddingTable,
    sources: &BTreeMap<SemanticModality, SemanticSource>,
    partitions: &[Partition],
    config: &RunConfig,
    jobs: Option<usize>,
) -> Result<Vec<(TrialResult, TrainReport)>> {
    let run_all = || -> Result<Vec<Vec<(TrialResult, TrainReport)>>> {
        partitions
            .par_iter()
            .map(|partition| {
                run_trial_with_reports(
                    acoustic,
                    sources,
                    partition,
                    &config.train,
                    config.normalize,
                )
                .map_err(|e| CliError::validation(format!("trial {}: {e}", partition.trial_seed)))
            })
            .collect()
    };
    let nested = match jobs {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::runtime(format!("worker pool: {e}")))?;
            pool.install(run_all)?
        }
        _ => run_all()?,
    };
    Ok(nested.into_iter().flatten().collect())
}
