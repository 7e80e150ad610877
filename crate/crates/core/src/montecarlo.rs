//! Seeded Monte Carlo bit-error-rate experiments.
//!
//! A sweep runs every configured method over a grid of SNR points. Per
//! point it generates fresh channel realizations, builds each method's
//! pipeline (analog transform, gain control, ADC statistics, equalizer)
//! once per channel, and then runs trials in which all methods see the
//! same transmit symbols, jammer signal, and noise, so method differences
//! are paired. Seeds are derived per (point, channel, trial), which makes
//! results independent of execution order; callers may distribute
//! [`run_channel_trials`] units over threads and still reproduce the
//! sequential [`sweep`] bit for bit.

use crate::channel::{self, ArrayGeometry, ChannelConfig, ChannelRealization, PlacementSpec, Propagation};
use crate::converter::{convert, gain_control, AdcModel};
use crate::equalizer::{bit_errors, hard_detect, lmmse_matrix, Constellation, EqualizerMatrix};
use crate::rng::{complex_gaussian, complex_gaussian_vector, derive_rng, derive_seed};
use crate::transform::{apply_transform, build_transform, covariance, Alphabet, AnalogTransform};
use crate::{CVector, Complex64, Error, Result};
use alloc::format;
use alloc::vec::Vec;
use rand::Rng;
#[allow(unused_imports)]
use num_traits::Float;

const STREAM_CHANNEL: u64 = 0x10;
const STREAM_TRIAL: u64 = 0x20;

/// 95% Wilson score interval quantile.
const WILSON_Z: f64 = 1.959963984540054;

/// Receiver variants compared in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Jammerless lower bound: the same quantized pipeline with the jammer
    /// silenced and an identity analog transform.
    Jl,
    /// Purely digital equalizer: identity analog transform, jammer-aware
    /// equalizer.
    Deq,
    /// Hybrid receiver with the unconstrained (unquantized) transform.
    HermitUq,
    /// Hybrid receiver with phase-quantized transform vectors.
    HermitPq,
    /// Hybrid receiver with quadrature-quantized transform vectors.
    HermitQq,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Jl,
        Method::Deq,
        Method::HermitUq,
        Method::HermitPq,
        Method::HermitQq,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Method::Jl => "JL",
            Method::Deq => "DEq",
            Method::HermitUq => "HERMIT-UQ",
            Method::HermitPq => "HERMIT-PQ",
            Method::HermitQq => "HERMIT-QQ",
        }
    }

    /// Whether this receiver's input contains the jammer signal.
    pub fn uses_jammer(&self) -> bool {
        !matches!(self, Method::Jl)
    }
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub num_antennas: usize,
    pub num_users: usize,
    pub propagation: Propagation,
    pub methods: Vec<Method>,
    pub adc_bits: u32,
    pub cluster_size: usize,
    pub alphabet_cardinality: usize,
    /// Relative jammer power in dB; `-inf` silences the jammer everywhere.
    pub rho_db: f64,
    pub snr_grid_db: Vec<f64>,
    pub trials_per_point: usize,
    pub channels_per_point: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_antennas == 0 || self.num_users == 0 {
            return Err(Error::Config("antenna and user counts must be positive".into()));
        }
        if self.cluster_size == 0 || !self.num_antennas.is_multiple_of(self.cluster_size) {
            return Err(Error::Config(format!(
                "cluster size {} must divide the antenna count {}",
                self.cluster_size, self.num_antennas
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::Config(format!("duplicate method {}", m.label())));
            }
        }
        if self.methods.contains(&Method::HermitPq) {
            (Alphabet::Phase {
                cardinality: self.alphabet_cardinality,
            })
            .validate()?;
        }
        if self.methods.contains(&Method::HermitQq) {
            (Alphabet::Quadrature {
                cardinality: self.alphabet_cardinality,
            })
            .validate()?;
        }
        if !(crate::converter::MIN_BITS..=crate::converter::MAX_BITS).contains(&self.adc_bits) {
            return Err(Error::Config(format!(
                "ADC resolution {} out of range",
                self.adc_bits
            )));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::Config("SNR grid must not be empty".into()));
        }
        if self.trials_per_point == 0 || self.channels_per_point == 0 {
            return Err(Error::Config(
                "trials_per_point and channels_per_point must be at least 1".into(),
            ));
        }
        PlacementSpec::for_users(self.num_users).validate()?;
        Ok(())
    }

    fn channel_config(&self, snr_db: f64) -> ChannelConfig {
        ChannelConfig {
            geometry: ArrayGeometry::ula(self.num_antennas),
            placement: PlacementSpec::for_users(self.num_users),
            propagation: self.propagation,
            snr_db,
            rho_db: self.rho_db,
        }
    }

    fn alphabet(&self, method: Method) -> Alphabet {
        match method {
            Method::HermitPq => Alphabet::Phase {
                cardinality: self.alphabet_cardinality,
            },
            Method::HermitQq => Alphabet::Quadrature {
                cardinality: self.alphabet_cardinality,
            },
            _ => Alphabet::Unconstrained,
        }
    }

    /// Bits transmitted per trial per method.
    pub fn bits_per_trial(&self) -> u64 {
        self.num_users as u64 * 4
    }
}

/// Everything one method needs to process a trial on a fixed channel.
#[derive(Debug, Clone)]
pub struct MethodPipeline {
    pub method: Method,
    pub transform: AnalogTransform,
    pub adc: AdcModel,
    pub equalizer: EqualizerMatrix,
}

/// Builds the per-method pipelines for one channel realization.
pub fn build_pipelines(
    cfg: &ExperimentConfig,
    chan: &ChannelRealization,
) -> Result<Vec<MethodPipeline>> {
    let b = chan.num_antennas();
    let s = cfg.cluster_size;
    let cy = covariance(&chan.h, &chan.h_j, chan.es, chan.ej, chan.n0);
    let mut pipelines = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let pipeline = match method {
            Method::Jl => {
                let silenced = chan.jammerless();
                let t = AnalogTransform::identity(b, s)?;
                let cy_jl =
                    covariance(&silenced.h, &silenced.h_j, silenced.es, 0.0, silenced.n0);
                let adc = AdcModel::new(cfg.adc_bits, gain_control(&t, &cy_jl)?)?;
                let equalizer = lmmse_matrix(&silenced, &t, &adc)?;
                MethodPipeline {
                    method,
                    transform: t,
                    adc,
                    equalizer,
                }
            }
            Method::Deq => {
                let t = AnalogTransform::identity(b, s)?;
                let adc = AdcModel::new(cfg.adc_bits, gain_control(&t, &cy)?)?;
                let equalizer = lmmse_matrix(chan, &t, &adc)?;
                MethodPipeline {
                    method,
                    transform: t,
                    adc,
                    equalizer,
                }
            }
            Method::HermitUq | Method::HermitPq | Method::HermitQq => {
                let t = build_transform(chan, s, cfg.alphabet(method))?;
                let adc = AdcModel::new(cfg.adc_bits, gain_control(&t, &cy)?)?;
                let equalizer = lmmse_matrix(chan, &t, &adc)?;
                MethodPipeline {
                    method,
                    transform: t,
                    adc,
                    equalizer,
                }
            }
        };
        pipelines.push(pipeline);
    }
    Ok(pipelines)
}

/// Provenance of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedLineage {
    pub experiment_seed: u64,
    pub point_index: usize,
    pub channel_index: usize,
    pub trial_index: usize,
}

/// Per-trial bit-error counts, aligned with the configured method list.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub lineage: SeedLineage,
    pub bit_errors: Vec<u64>,
}

/// Runs one trial: draws `(s, s_J, n)` once and pushes the same signals
/// through every pipeline. The jammerless baseline sees the same `H s + n`
/// with the jammer term dropped.
pub fn run_trial<R: Rng + ?Sized>(
    chan: &ChannelRealization,
    pipelines: &[MethodPipeline],
    constellation: &Constellation,
    rng: &mut R,
) -> Vec<u64> {
    let u = chan.num_users();
    let labels: Vec<usize> = (0..u)
        .map(|_| rng.random_range(0..constellation.size()))
        .collect();
    let s = CVector::from_fn(u, |i, _| constellation.point(labels[i]));
    // The jammer sample is drawn at unit variance and scaled, so sweeps
    // over rho with a shared seed see the same underlying waveform.
    let jammer_unit = complex_gaussian(rng, 1.0);
    let s_j = jammer_unit * Complex64::new(chan.ej.sqrt(), 0.0);
    let noise = complex_gaussian_vector(rng, chan.num_antennas(), chan.n0);

    let base = &chan.h * &s + noise;
    let with_jammer = &base + &chan.h_j * s_j;

    pipelines
        .iter()
        .map(|p| {
            let input = if p.method.uses_jammer() {
                &with_jammer
            } else {
                &base
            };
            let transformed = apply_transform(&p.transform, input);
            let r = convert(&transformed, &p.adc);
            let detected = hard_detect(&p.equalizer.estimate(&r), constellation);
            bit_errors(&labels, &detected)
        })
        .collect()
}

/// Runs all trials for one (SNR point, channel) work unit. Deterministic
/// given the configuration; units can run in any order or in parallel.
pub fn run_channel_trials(
    cfg: &ExperimentConfig,
    point_index: usize,
    channel_index: usize,
) -> Result<Vec<TrialRecord>> {
    let snr_db = *cfg
        .snr_grid_db
        .get(point_index)
        .ok_or_else(|| Error::Config(format!("SNR point {point_index} out of range")))?;
    let channel_seed = derive_seed(
        cfg.seed,
        &[STREAM_CHANNEL, point_index as u64, channel_index as u64],
    );
    let chan = channel::generate(&cfg.channel_config(snr_db), channel_seed)?;
    let pipelines = build_pipelines(cfg, &chan)?;
    let constellation = Constellation::qam16(chan.es);
    let mut records = Vec::with_capacity(cfg.trials_per_point);
    for trial_index in 0..cfg.trials_per_point {
        let mut rng = derive_rng(
            cfg.seed,
            &[
                STREAM_TRIAL,
                point_index as u64,
                channel_index as u64,
                trial_index as u64,
            ],
        );
        let errors = run_trial(&chan, &pipelines, &constellation, &mut rng);
        records.push(TrialRecord {
            lineage: SeedLineage {
                experiment_seed: cfg.seed,
                point_index,
                channel_index,
                trial_index,
            },
            bit_errors: errors,
        });
    }
    Ok(records)
}

/// Aggregated errors for one method at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bit_errors: u64,
    pub bits_total: u64,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        if self.bits_total == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits_total as f64
        }
    }

    /// 95% Wilson confidence interval for the error probability.
    pub fn wilson_ci(&self) -> (f64, f64) {
        wilson_interval(self.bit_errors, self.bits_total)
    }
}

/// BER curve of one method over the SNR grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub method: Method,
    pub points: Vec<BerPoint>,
}

/// 95% Wilson score interval for `errors` successes in `n` trials.
pub fn wilson_interval(errors: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = errors as f64 / n;
    let z = WILSON_Z;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Sums trial records into per-method BER curves with exact integer error
/// accounting. Merging the outputs of two half runs equals one full run.
pub fn aggregate<'a, I>(cfg: &ExperimentConfig, records: I) -> Vec<BerCurve>
where
    I: IntoIterator<Item = &'a TrialRecord>,
{
    let n_methods = cfg.methods.len();
    let n_points = cfg.snr_grid_db.len();
    let mut errors = alloc::vec![0u64; n_methods * n_points];
    let mut trials = alloc::vec![0u64; n_points];
    for record in records {
        let p = record.lineage.point_index;
        trials[p] += 1;
        for (m, &e) in record.bit_errors.iter().enumerate() {
            errors[m * n_points + p] += e;
        }
    }
    cfg.methods
        .iter()
        .enumerate()
        .map(|(m, &method)| BerCurve {
            method,
            points: (0..n_points)
                .map(|p| BerPoint {
                    snr_db: cfg.snr_grid_db[p],
                    bit_errors: errors[m * n_points + p],
                    bits_total: trials[p] * cfg.bits_per_trial(),
                })
                .collect(),
        })
        .collect()
}

/// Runs the complete sweep sequentially. Equivalent to aggregating the
/// [`run_channel_trials`] units in any order.
pub fn sweep(cfg: &ExperimentConfig) -> Result<Vec<BerCurve>> {
    cfg.validate()?;
    let mut records = Vec::new();
    for point_index in 0..cfg.snr_grid_db.len() {
        for channel_index in 0..cfg.channels_per_point {
            records.extend(run_channel_trials(cfg, point_index, channel_index)?);
        }
    }
    Ok(aggregate(cfg, records.iter()))
}
