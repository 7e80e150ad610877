//! Argument parsing and validation.
//!
//! Flag values override config-file values; `--scale` divides the array
//! dimensions last. Exit codes: 0 ok, 2 validation, 3 I/O, 4 numerical
//! failure.

use crate::config::{method_config_name, parse_method, preset, ConfigFile, PropagationSpec};
use crate::CliError;
use clap::{Args, Parser, Subcommand};
use hermit_core::montecarlo::{ExperimentConfig, Method};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "hermit", version, about = "Jammer-mitigation BER sweeps for quantized massive MU-MIMO uplinks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a BER sweep and write results.csv, metadata.json, and plot.gp.
    Run(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON config file (mutually exclusive with --preset).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Named preset: fig3a, fig4a, or fig5a.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,

    /// Divide antennas, users, and cluster size by this factor.
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub scale: usize,

    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "hermit-out")]
    pub out: PathBuf,

    /// Master seed override.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,

    /// Worker threads (0 = one per core).
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub jobs: usize,

    /// Overwrite results already present in the output directory.
    #[arg(long)]
    pub force: bool,

    /// Comma-separated method list (jl,deq,uq,pq,qq).
    #[arg(long, value_name = "LIST")]
    pub methods: Option<String>,

    /// Comma-separated SNR grid in dB.
    #[arg(long, value_name = "LIST")]
    pub snr: Option<String>,

    /// Relative jammer power in dB.
    #[arg(long, value_name = "DB")]
    pub rho: Option<f64>,

    /// ADC resolution in bits.
    #[arg(long, value_name = "Q")]
    pub bits: Option<u32>,

    /// Cluster size S.
    #[arg(long, value_name = "S")]
    pub cluster: Option<usize>,

    /// Alphabet cardinality.
    #[arg(long, value_name = "N")]
    pub ac: Option<usize>,

    /// Hybrid alphabet selector: pq, qq, or uq. Replaces the HERMIT
    /// entries of the method list with the chosen variant (keeping the
    /// JL and DEq baselines); mutually exclusive with --methods.
    #[arg(long, value_name = "KIND")]
    pub alphabet: Option<String>,

    /// Propagation model: los or nlos.
    #[arg(long, value_name = "KIND")]
    pub prop: Option<String>,

    /// Number of basestation antennas B.
    #[arg(long, value_name = "B")]
    pub antennas: Option<usize>,

    /// Number of users U.
    #[arg(long, value_name = "U")]
    pub users: Option<usize>,

    /// Trials per channel realization per SNR point.
    #[arg(long, value_name = "N")]
    pub trials: Option<usize>,

    /// Channel realizations per SNR point.
    #[arg(long, value_name = "N")]
    pub channels: Option<usize>,

    /// Suppress the per-method BER table on stdout.
    #[arg(long)]
    pub quiet: bool,
}

/// Everything `execute` needs besides the experiment itself.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub out_dir: PathBuf,
    pub jobs: usize,
    pub force: bool,
    pub quiet: bool,
    /// The resolved on-disk form of the configuration, echoed to metadata.
    pub config: ConfigFile,
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Validation(format!("invalid {what} entry '{s}'")))
        })
        .collect()
}

/// Resolves CLI arguments into a validated run manifest and experiment
/// configuration.
pub fn resolve(args: &RunArgs) -> Result<(RunManifest, ExperimentConfig), CliError> {
    if args.config.is_some() && args.preset.is_some() {
        return Err(CliError::Validation(
            "--config and --preset are mutually exclusive".into(),
        ));
    }
    let mut file = if let Some(name) = &args.preset {
        preset(name)?
    } else if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        ConfigFile::from_json(&text)?
    } else {
        ConfigFile::default()
    };

    if args.methods.is_some() && args.alphabet.is_some() {
        return Err(CliError::Validation(
            "--methods and --alphabet are mutually exclusive".into(),
        ));
    }
    if let Some(list) = &args.methods {
        let parsed: Vec<Method> = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_method(s.trim()))
            .collect::<Result<_, _>>()?;
        if parsed.is_empty() {
            return Err(CliError::Validation("--methods list is empty".into()));
        }
        file.methods = parsed.iter().map(|&m| method_config_name(m).to_string()).collect();
    }
    if let Some(kind) = &args.alphabet {
        let hybrid = match kind.to_ascii_lowercase().as_str() {
            "uq" => Method::HermitUq,
            "pq" => Method::HermitPq,
            "qq" => Method::HermitQq,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown alphabet '{other}' (expected pq, qq, or uq)"
                )))
            }
        };
        file.methods = [Method::Jl, Method::Deq, hybrid]
            .iter()
            .map(|&m| method_config_name(m).to_string())
            .collect();
    }
    if let Some(kind) = &args.prop {
        file.propagation = match kind.to_ascii_lowercase().as_str() {
            "los" => PropagationSpec::Los,
            "nlos" => PropagationSpec::default_nlos(),
            other => {
                return Err(CliError::Validation(format!(
                    "unknown propagation '{other}' (expected los or nlos)"
                )))
            }
        };
    }
    if let Some(list) = &args.snr {
        file.snr_grid_db = parse_f64_list(list, "SNR")?;
    }
    if let Some(v) = args.rho {
        file.rho_db = v;
    }
    if let Some(v) = args.bits {
        file.adc_bits = v;
    }
    if let Some(v) = args.cluster {
        file.cluster_size = v;
    }
    if let Some(v) = args.ac {
        file.alphabet_cardinality = v;
    }
    if let Some(v) = args.antennas {
        file.num_antennas = v;
    }
    if let Some(v) = args.users {
        file.num_users = v;
    }
    if let Some(v) = args.trials {
        file.trials_per_point = v;
    }
    if let Some(v) = args.channels {
        file.channels_per_point = v;
    }
    if let Some(v) = args.seed {
        file.seed = v;
    }
    file.apply_scale(args.scale)?;

    let experiment = file.to_experiment()?;
    Ok((
        RunManifest {
            out_dir: args.out.clone(),
            jobs: args.jobs,
            force: args.force,
            quiet: args.quiet,
            config: file,
        },
        experiment,
    ))
}

/// Parses and validates a full argv sequence (including the binary name).
pub fn parse_and_validate<I, S>(argv: I) -> Result<(RunManifest, ExperimentConfig), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Validation(e.to_string()))?;
    match &cli.command {
        Command::Run(args) => resolve(args),
    }
}
