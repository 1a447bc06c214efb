//! Runs an experiment and persists every trial as a bundle.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use twinsgame_core::trial::{run_experiment, TrialOutcome};
use twinsgame_core::{ExperimentConfig, GameConfig, ResultTable};

use crate::bundle::{Bundle, BundleMeta};
use crate::report;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] twinsgame_core::Error),
    #[error(transparent)]
    Bundle(#[from] crate::bundle::BundleError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

pub fn bundle_dir(root: &Path, setting: usize, trial: usize) -> PathBuf {
    root.join("bundles").join(format!("setting-{setting:02}-trial-{trial:03}"))
}

/// Bundle holding everything one trial produced.
pub fn trial_bundle(config: &ExperimentConfig, outcome: &TrialOutcome) -> Bundle {
    let solutions: BTreeMap<String, _> = outcome
        .methods
        .iter()
        .filter_map(|m| m.equilibria.clone().map(|e| (m.method.to_string(), e)))
        .collect();
    Bundle {
        meta: BundleMeta {
            seed: Some(config.seed),
            setting: Some(outcome.setting),
            capacity: outcome.capacity,
            trial: Some(outcome.trial),
            config: Some(config.clone()),
        },
        game: outcome.game.clone(),
        observations: outcome.observations.clone(),
        model: outcome.model.clone(),
        solutions,
        evaluations: outcome.methods.clone(),
        error: outcome.error.clone(),
    }
}

fn write_file(path: &Path, write: impl FnOnce(BufWriter<File>) -> csv::Result<()>) -> Result<(), RunError> {
    let file = File::create(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })?;
    write(BufWriter::new(file)).map_err(|source| RunError::Csv { path: path.to_path_buf(), source })
}

/// Runs `config`, writing `bundles/`, `results.csv`, `summary.csv`,
/// `config.json`, and for the bar game `plot.tsv` under `out`.
pub fn run_to_dir(
    config: &ExperimentConfig,
    out: &Path,
    mut progress: impl FnMut(&TrialOutcome),
) -> Result<ResultTable, RunError> {
    config.validate()?;
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    fs::create_dir_all(out).map_err(io(out))?;
    let mut bundle_error = None;
    let table = run_experiment(config, |outcome| {
        progress(outcome);
        if bundle_error.is_none() {
            if let Err(e) = trial_bundle(config, outcome).save(&bundle_dir(out, outcome.setting, outcome.trial)) {
                bundle_error = Some(e);
            }
        }
        Ok(())
    })?;
    if let Some(e) = bundle_error {
        return Err(e.into());
    }

    let config_path = out.join("config.json");
    let json = serde_json::to_string_pretty(config).expect("config serializes");
    fs::write(&config_path, json + "\n").map_err(io(&config_path))?;
    write_file(&out.join("results.csv"), |w| report::write_results_csv(&table, w))?;
    let summary = table.summary();
    write_file(&out.join("summary.csv"), |w| report::write_summary_csv(&summary, w))?;
    if matches!(config.game, GameConfig::Santafe { .. }) {
        write_file(&out.join("plot.tsv"), |w| report::write_plot_data(&summary, w))?;
    }
    Ok(table)
}
