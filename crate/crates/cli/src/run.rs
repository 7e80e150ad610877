//! Sweep execution: fans (SNR point, channel) work units out over a rayon
//! pool and aggregates the integer error counts. Because every unit derives
//! its own seeds, the parallel result is identical to the sequential one.

use crate::cli::RunManifest;
use crate::output::{render_csv, render_metadata, render_plot_recipe, render_table};
use crate::CliError;
use hermit_core::montecarlo::{aggregate, run_channel_trials, BerCurve, ExperimentConfig, TrialRecord};
use rayon::prelude::*;
use std::path::Path;
use std::time::Instant;

/// Runs all work units of the sweep, in parallel when `jobs != 1`.
pub fn run_sweep(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<BerCurve>, CliError> {
    cfg.validate()?;
    let units: Vec<(usize, usize)> = (0..cfg.snr_grid_db.len())
        .flat_map(|p| (0..cfg.channels_per_point).map(move |c| (p, c)))
        .collect();

    let run_units = || -> Result<Vec<Vec<TrialRecord>>, hermit_core::Error> {
        units
            .par_iter()
            .map(|&(point, channel)| run_channel_trials(cfg, point, channel))
            .collect()
    };

    let records: Vec<Vec<TrialRecord>> = if jobs == 0 {
        run_units()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Io(format!("building thread pool: {e}")))?;
        pool.install(run_units)?
    };
    Ok(aggregate(cfg, records.iter().flatten()))
}

fn refuse_existing(path: &Path, force: bool) -> Result<(), CliError> {
    if !force && path.exists() {
        return Err(CliError::Validation(format!(
            "{} already exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}

/// Executes a validated run: sweeps, writes `results.csv`,
/// `metadata.json`, and `plot.gp` into the output directory, and prints a
/// per-method BER table.
pub fn execute(manifest: &RunManifest, cfg: &ExperimentConfig) -> Result<(), CliError> {
    let out_dir = &manifest.out_dir;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join("results.csv");
    let meta_path = out_dir.join("metadata.json");
    let plot_path = out_dir.join("plot.gp");
    refuse_existing(&csv_path, manifest.force)?;
    refuse_existing(&meta_path, manifest.force)?;

    let started = Instant::now();
    let curves = run_sweep(cfg, manifest.jobs)?;
    let wall_time_s = started.elapsed().as_secs_f64();

    std::fs::write(&csv_path, render_csv(&curves))
        .map_err(|e| CliError::Io(format!("writing {}: {e}", csv_path.display())))?;
    std::fs::write(&meta_path, render_metadata(&manifest.config, manifest.jobs, wall_time_s)?)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", meta_path.display())))?;
    std::fs::write(&plot_path, render_plot_recipe(&curves))
        .map_err(|e| CliError::Io(format!("writing {}: {e}", plot_path.display())))?;

    if !manifest.quiet {
        print!("{}", render_table(&curves));
        println!("wrote {}", csv_path.display());
    }
    Ok(())
}
