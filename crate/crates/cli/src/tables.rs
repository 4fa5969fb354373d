//! Aligned plain-text result tables for eyeball comparison.

use std::collections::BTreeMap;

use zsac_core::evaluation::ExperimentSummary;
use zsac_core::partitions::Protocol;

/// Renders one summary table: a row per modality, accuracy as mean ± SD,
/// with the protocol and chance level in the header.
pub fn render_summary(
    protocol: Protocol,
    summaries: &BTreeMap<String, ExperimentSummary>,
    normalized: bool,
) -> String {
    let mut out = String::new();
    let chance = summaries
        .values()
        .next()
        .map(|s| s.chance_level)
        .unwrap_or(f64::NAN);
    let trials = summaries.values().next().map(|s| s.n_trials).unwrap_or(0);
    out.push_str(&format!(
        "protocol: {}   trials: {}   random guess: {:.2}   normalized: {}\n",
        protocol.as_str(),
        trials,
        chance,
        normalized,
    ));

    let name_width = summaries
        .keys()
        .map(|k| k.len())
        .chain(std::iter::once("modality".len()))
        .max()
        .unwrap_or(8);
    let header = format!("{:<name_width$}  {:>14}", "modality", "accuracy");
    let rule = "-".repeat(header.len());
    out.push_str(&header);
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    for (name, summary) in summaries {
        out.push_str(&format!(
            "{:<name_width$}  {:>6.3} ± {:.3}\n",
            name, summary.mean_accuracy, summary.std_dev,
        ));
    }
    out
}
