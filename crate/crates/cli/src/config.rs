//! Experiment configuration schema (JSON) and named presets.
//!
//! The JSON file mirrors [`ExperimentConfig`] field by field; unknown keys
//! are rejected. See the repository README for the documented schema.

use crate::CliError;
use hermit_core::channel::Propagation;
use hermit_core::montecarlo::{ExperimentConfig, Method};
use serde::{Deserialize, Serialize};

/// On-disk form of an experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub num_antennas: usize,
    pub num_users: usize,
    pub propagation: PropagationSpec,
    pub methods: Vec<String>,
    pub adc_bits: u32,
    pub cluster_size: usize,
    pub alphabet_cardinality: usize,
    pub rho_db: f64,
    pub snr_grid_db: Vec<f64>,
    pub trials_per_point: usize,
    pub channels_per_point: usize,
    pub seed: u64,
}

/// Propagation selector: `"los"` or `{"nlos": {...}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagationSpec {
    Los,
    Nlos {
        num_paths: usize,
        angular_spread_deg: f64,
    },
}

impl From<PropagationSpec> for Propagation {
    fn from(p: PropagationSpec) -> Propagation {
        match p {
            PropagationSpec::Los => Propagation::Los,
            PropagationSpec::Nlos {
                num_paths,
                angular_spread_deg,
            } => Propagation::Nlos {
                num_paths,
                angular_spread_deg,
            },
        }
    }
}

impl PropagationSpec {
    pub fn default_nlos() -> Self {
        PropagationSpec::Nlos {
            num_paths: 20,
            angular_spread_deg: 5.0,
        }
    }
}

/// Parses a method name; both the short and the canonical forms are
/// accepted (`uq` / `hermit-uq`, case-insensitive).
pub fn parse_method(name: &str) -> Result<Method, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "jl" => Ok(Method::Jl),
        "deq" => Ok(Method::Deq),
        "uq" | "hermit-uq" => Ok(Method::HermitUq),
        "pq" | "hermit-pq" => Ok(Method::HermitPq),
        "qq" | "hermit-qq" => Ok(Method::HermitQq),
        other => Err(CliError::Validation(format!(
            "unknown method '{other}' (expected jl, deq, hermit-uq, hermit-pq, or hermit-qq)"
        ))),
    }
}

pub fn method_config_name(m: Method) -> &'static str {
    match m {
        Method::Jl => "jl",
        Method::Deq => "deq",
        Method::HermitUq => "hermit-uq",
        Method::HermitPq => "hermit-pq",
        Method::HermitQq => "hermit-qq",
    }
}

impl Default for ConfigFile {
    /// Full-scale defaults: 256 antennas, 32 users, LoS, 4-bit ADCs,
    /// 64-antenna clusters, cardinality-16 alphabets, 25 dB jammer.
    fn default() -> Self {
        ConfigFile {
            num_antennas: 256,
            num_users: 32,
            propagation: PropagationSpec::Los,
            methods: ["jl", "deq", "hermit-uq", "hermit-pq", "hermit-qq"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            adc_bits: 4,
            cluster_size: 64,
            alphabet_cardinality: 16,
            rho_db: 25.0,
            snr_grid_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0],
            trials_per_point: 200,
            channels_per_point: 50,
            seed: 1,
        }
    }
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// Divides the array dimensions (B, U, S) by `scale` for desk-scale
    /// runs; statistical parameters are left untouched.
    pub fn apply_scale(&mut self, scale: usize) -> Result<(), CliError> {
        if scale == 0 {
            return Err(CliError::Validation("--scale must be at least 1".into()));
        }
        if scale == 1 {
            return Ok(());
        }
        for (name, value) in [
            ("antenna count", self.num_antennas),
            ("user count", self.num_users),
            ("cluster size", self.cluster_size),
        ] {
            if value % scale != 0 {
                return Err(CliError::Validation(format!(
                    "--scale {scale} does not divide the {name} {value}"
                )));
            }
        }
        self.num_antennas /= scale;
        self.num_users /= scale;
        self.cluster_size /= scale;
        Ok(())
    }

    pub fn to_experiment(&self) -> Result<ExperimentConfig, CliError> {
        let methods = self
            .methods
            .iter()
            .map(|m| parse_method(m))
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = ExperimentConfig {
            num_antennas: self.num_antennas,
            num_users: self.num_users,
            propagation: self.propagation.into(),
            methods,
            adc_bits: self.adc_bits,
            cluster_size: self.cluster_size,
            alphabet_cardinality: self.alphabet_cardinality,
            rho_db: self.rho_db,
            snr_grid_db: self.snr_grid_db.clone(),
            trials_per_point: self.trials_per_point,
            channels_per_point: self.channels_per_point,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Named parameter presets for the headline experiment setups.
///
/// All use the full-scale system (B=256, U=32) with a 25 dB jammer and
/// 4-bit ADCs; combine with `--scale` for desk-scale runs.
///
/// * `fig3a` — LoS alphabet study: S=64, AC=16, all five methods.
/// * `fig4a` — LoS cluster-size study: S=32, AC=16, all five methods.
/// * `fig5a` — LoS jammer-power study: S=64, AC=16, quadrature HERMIT
///   against the baselines; sweep `--rho` externally.
pub fn preset(name: &str) -> Result<ConfigFile, CliError> {
    let base = ConfigFile::default();
    match name {
        "fig3a" => Ok(base),
        "fig4a" => Ok(ConfigFile {
            cluster_size: 32,
            ..base
        }),
        "fig5a" => Ok(ConfigFile {
            methods: ["jl", "deq", "hermit-qq"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            ..base
        }),
        other => Err(CliError::Validation(format!(
            "unknown preset '{other}' (expected fig3a, fig4a, or fig5a)"
        ))),
    }
}
