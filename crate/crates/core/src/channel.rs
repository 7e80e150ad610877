//! Synthetic mmWave uplink channel generation.
//!
//! Users and a jammer are placed uniformly at random inside a sector in
//! front of a uniform linear array, subject to a minimum angular separation.
//! Channels are either a deterministic line-of-sight steering vector with
//! free-space amplitude, or a clustered sum of steering vectors with
//! Laplacian angular spread (non-LoS). Per-UE power control bounds the
//! spread of receive powers, and the noise and jammer variances are
//! calibrated so a requested average SNR and relative jammer power hold
//! exactly for the generated realization.

use crate::rng::{complex_gaussian, derive_rng, ChaCha8Rng};
use crate::{CMatrix, CVector, Complex64, Error, Result};
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use rand::Rng;
#[allow(unused_imports)]
use num_traits::Float;

/// Per-UE power-control range in dB; receive powers spread over at most
/// twice this, giving a max/min ratio of 10^0.6 < 4.
pub const POWER_CONTROL_RANGE_DB: f64 = 3.0;

/// Total candidate draws before entity placement is declared infeasible.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

const STREAM_PLACEMENT: u64 = 0x01;
const STREAM_PATHS: u64 = 0x02;
const STREAM_POWER_CONTROL: u64 = 0x03;

/// Uniform linear array at the basestation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    /// Number of antennas `B`.
    pub num_antennas: usize,
    /// Element spacing in wavelengths.
    pub element_spacing: f64,
    /// Half-width of the served sector in degrees.
    pub sector_halfwidth_deg: f64,
}

impl ArrayGeometry {
    /// Half-wavelength ULA serving a 120-degree sector.
    pub fn ula(num_antennas: usize) -> Self {
        ArrayGeometry {
            num_antennas,
            element_spacing: 0.5,
            sector_halfwidth_deg: 60.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_antennas == 0 {
            return Err(Error::Config("array needs at least one antenna".into()));
        }
        if self.element_spacing <= 0.0 {
            return Err(Error::Config("element spacing must be positive".into()));
        }
        Ok(())
    }
}

/// Placement constraints for the users and the jammer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementSpec {
    /// Number of users `U`; one extra entity (the jammer) is always placed.
    pub num_users: usize,
    /// Minimum azimuth separation between any two entities, in degrees.
    pub min_angular_sep_deg: f64,
    /// Distance range in meters.
    pub distance_range_m: (f64, f64),
    /// Azimuth sector in degrees.
    pub sector_deg: (f64, f64),
}

impl PlacementSpec {
    /// Default placement: 1-degree separation, 10..100 m, [-60, 60] degrees.
    pub fn for_users(num_users: usize) -> Self {
        PlacementSpec {
            num_users,
            min_angular_sep_deg: 1.0,
            distance_range_m: (10.0, 100.0),
            sector_deg: (-60.0, 60.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_users == 0 {
            return Err(Error::Config("need at least one user".into()));
        }
        let (dmin, dmax) = self.distance_range_m;
        if !(dmin > 0.0 && dmax >= dmin) {
            return Err(Error::Config("invalid distance range".into()));
        }
        let (lo, hi) = self.sector_deg;
        if hi <= lo {
            return Err(Error::Config("invalid sector".into()));
        }
        // Necessary condition: U+1 entities at pairwise min separation need
        // U * min_sep degrees of sector width.
        let needed = self.num_users as f64 * self.min_angular_sep_deg;
        if needed > hi - lo {
            return Err(Error::Config(format!(
                "cannot place {} entities with {} deg separation in a {} deg sector",
                self.num_users + 1,
                self.min_angular_sep_deg,
                hi - lo
            )));
        }
        Ok(())
    }
}

/// Position of one placed entity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub azimuth_deg: f64,
    pub distance_m: f64,
}

/// One generated uplink channel with calibrated powers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// UE channel matrix, `B x U`; column `u` is the channel of UE `u`.
    pub h: CMatrix,
    /// Jammer channel, length `B`.
    pub h_j: CVector,
    /// Symbol energy (fixed to 1).
    pub es: f64,
    /// Jammer transmit variance.
    pub ej: f64,
    /// Per-entry complex noise variance.
    pub n0: f64,
}

impl ChannelRealization {
    pub fn num_antennas(&self) -> usize {
        self.h.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.h.ncols()
    }

    /// Ratio of maximum to minimum per-UE receive power `Es * ||h_u||^2`.
    pub fn receive_power_ratio(&self) -> f64 {
        let mut min = f64::INFINITY;
        let mut max = 0.0f64;
        for u in 0..self.h.ncols() {
            let p = self.es * self.h.column(u).norm_squared();
            min = min.min(p);
            max = max.max(p);
        }
        max / min
    }

    /// Clone with the jammer silenced; basis of the jammerless baseline.
    pub fn jammerless(&self) -> ChannelRealization {
        ChannelRealization {
            ej: 0.0,
            ..self.clone()
        }
    }
}

/// Propagation model for generated channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Propagation {
    /// Single deterministic path.
    Los,
    /// Clustered paths with i.i.d. Rayleigh gains and Laplacian angular
    /// spread around the nominal azimuth.
    Nlos {
        num_paths: usize,
        angular_spread_deg: f64,
    },
}

impl Propagation {
    /// Non-LoS default: 20 paths, 5-degree angular spread.
    pub fn default_nlos() -> Self {
        Propagation::Nlos {
            num_paths: 20,
            angular_spread_deg: 5.0,
        }
    }
}

/// Everything needed to generate one [`ChannelRealization`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub geometry: ArrayGeometry,
    pub placement: PlacementSpec,
    pub propagation: Propagation,
    pub snr_db: f64,
    pub rho_db: f64,
}

/// ULA steering vector: entry `b` is `exp(i 2 pi d b sin(theta))` with `d`
/// the element spacing in wavelengths. All entries have unit modulus.
pub fn steering(geom: &ArrayGeometry, azimuth_deg: f64) -> CVector {
    let k = TAU * geom.element_spacing * (azimuth_deg.to_radians()).sin();
    CVector::from_fn(geom.num_antennas, |b, _| {
        Complex64::from_polar(1.0, k * b as f64)
    })
}

/// Free-space amplitude at distance `d` (proportional to `1/d`; the absolute
/// scale cancels in power calibration).
fn pathloss_amplitude(distance_m: f64) -> f64 {
    1.0 / distance_m
}

/// Line-of-sight channel: steering vector scaled by the free-space
/// amplitude, so `||h||^2 = B * g(d)^2`.
pub fn los_channel(geom: &ArrayGeometry, azimuth_deg: f64, distance_m: f64) -> CVector {
    steering(geom, azimuth_deg) * Complex64::new(pathloss_amplitude(distance_m), 0.0)
}

/// Clustered non-LoS channel: sum of `num_paths` steering vectors with
/// i.i.d. `CN(0, 1/L)` path gains and Laplacian angular offsets, scaled by
/// the free-space amplitude. `E||h||^2 = B * g(d)^2`, matching the LoS
/// normalization on average.
pub fn nlos_channel(
    geom: &ArrayGeometry,
    azimuth_deg: f64,
    distance_m: f64,
    num_paths: usize,
    angular_spread_deg: f64,
    seed: u64,
) -> CVector {
    let mut rng = derive_rng(seed, &[STREAM_PATHS]);
    nlos_channel_with(
        geom,
        azimuth_deg,
        distance_m,
        num_paths,
        angular_spread_deg,
        &mut rng,
    )
}

fn nlos_channel_with<R: Rng + ?Sized>(
    geom: &ArrayGeometry,
    azimuth_deg: f64,
    distance_m: f64,
    num_paths: usize,
    angular_spread_deg: f64,
    rng: &mut R,
) -> CVector {
    let mut h = CVector::zeros(geom.num_antennas);
    for _ in 0..num_paths.max(1) {
        let gain = complex_gaussian(rng, 1.0 / num_paths.max(1) as f64);
        let offset = sample_laplacian(rng, angular_spread_deg);
        h += steering(geom, azimuth_deg + offset) * gain;
    }
    h * Complex64::new(pathloss_amplitude(distance_m), 0.0)
}

/// Zero-mean Laplacian sample with the given scale, by inverse CDF.
fn sample_laplacian<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    let u: f64 = rng.random_range(-0.5..0.5);
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Places `U + 1` entities (users first, jammer last) uniformly in the
/// sector and distance range, redrawing any entity that falls within the
/// minimum angular separation of an already-placed one.
///
/// Fails with a configuration error when [`MAX_PLACEMENT_ATTEMPTS`]
/// candidate draws are exhausted or the sector cannot hold the entities.
pub fn place_entities(spec: &PlacementSpec, seed: u64) -> Result<Vec<Placement>> {
    let mut rng = derive_rng(seed, &[STREAM_PLACEMENT]);
    place_entities_with(spec, &mut rng)
}

fn place_entities_with<R: Rng + ?Sized>(
    spec: &PlacementSpec,
    rng: &mut R,
) -> Result<Vec<Placement>> {
    spec.validate()?;
    let total = spec.num_users + 1;
    let (lo, hi) = spec.sector_deg;
    let (dmin, dmax) = spec.distance_range_m;
    let mut placed: Vec<Placement> = Vec::with_capacity(total);
    let mut attempts = 0usize;
    while placed.len() < total {
        if attempts >= MAX_PLACEMENT_ATTEMPTS {
            return Err(Error::Config(format!(
                "placement infeasible: {} entities at {} deg separation not found in {} attempts",
                total, spec.min_angular_sep_deg, MAX_PLACEMENT_ATTEMPTS
            )));
        }
        attempts += 1;
        let candidate = Placement {
            azimuth_deg: rng.random_range(lo..=hi),
            distance_m: rng.random_range(dmin..=dmax),
        };
        let ok = placed
            .iter()
            .all(|p| (p.azimuth_deg - candidate.azimuth_deg).abs() >= spec.min_angular_sep_deg);
        if ok {
            placed.push(candidate);
        }
    }
    Ok(placed)
}

/// Rescales each column of `h` so its receive power is the original mean
/// power offset by a uniform draw in +/-[`POWER_CONTROL_RANGE_DB`] dB.
pub fn apply_power_control<R: Rng + ?Sized>(h: &CMatrix, rng: &mut R) -> Result<CMatrix> {
    let offsets: Vec<f64> = (0..h.ncols())
        .map(|_| rng.random_range(-POWER_CONTROL_RANGE_DB..=POWER_CONTROL_RANGE_DB))
        .collect();
    apply_power_control_with(h, &offsets)
}

/// Deterministic power control with explicit per-UE dB offsets.
pub fn apply_power_control_with(h: &CMatrix, offsets_db: &[f64]) -> Result<CMatrix> {
    assert_eq!(offsets_db.len(), h.ncols(), "one offset per UE");
    let powers: Vec<f64> = (0..h.ncols()).map(|u| h.column(u).norm_squared()).collect();
    if powers.contains(&0.0) {
        return Err(Error::Config("power control on an all-zero UE column".into()));
    }
    let mean_power = powers.iter().sum::<f64>() / powers.len() as f64;
    let mut out = h.clone();
    for (u, (&p, &x_db)) in powers.iter().zip(offsets_db).enumerate() {
        let target = mean_power * 10f64.powf(x_db / 10.0);
        let scale = Complex64::new((target / p).sqrt(), 0.0);
        let mut col = out.column_mut(u);
        col *= scale;
    }
    Ok(out)
}

/// Calibrates `(Es, N0, Ej)` for a generated channel so that
/// `SNR = Es ||H||_F^2 / (B N0)` equals `snr_db` and the relative jammer
/// power `rho = U Ej ||h_J||^2 / (Es ||H||_F^2)` equals `rho_db`.
///
/// `rho_db = -inf` yields `Ej = 0` (jammerless).
pub fn calibrate_powers(
    h: &CMatrix,
    h_j: &CVector,
    snr_db: f64,
    rho_db: f64,
) -> Result<(f64, f64, f64)> {
    let es = 1.0;
    let h_energy = h.norm_squared();
    let hj_energy = h_j.norm_squared();
    if h_energy == 0.0 || hj_energy == 0.0 {
        return Err(Error::Config("calibration requires nonzero channels".into()));
    }
    let b = h.nrows() as f64;
    let u = h.ncols() as f64;
    let n0 = es * h_energy / (b * 10f64.powf(snr_db / 10.0));
    let ej = 10f64.powf(rho_db / 10.0) * es * h_energy / (u * hj_energy);
    Ok((es, n0, ej))
}

/// Generates a full channel realization: placement, per-entity channels,
/// power control, and power calibration. Pure function of `(cfg, seed)`.
pub fn generate(cfg: &ChannelConfig, seed: u64) -> Result<ChannelRealization> {
    cfg.geometry.validate()?;
    if cfg.geometry.num_antennas < 1 {
        return Err(Error::Config("need at least one antenna".into()));
    }
    let placements = place_entities(&cfg.placement, seed)?;
    let u = cfg.placement.num_users;

    let entity_channel = |p: &Placement, index: usize| -> CVector {
        match cfg.propagation {
            Propagation::Los => los_channel(&cfg.geometry, p.azimuth_deg, p.distance_m),
            Propagation::Nlos {
                num_paths,
                angular_spread_deg,
            } => {
                let mut rng: ChaCha8Rng = derive_rng(seed, &[STREAM_PATHS, index as u64]);
                nlos_channel_with(
                    &cfg.geometry,
                    p.azimuth_deg,
                    p.distance_m,
                    num_paths,
                    angular_spread_deg,
                    &mut rng,
                )
            }
        }
    };

    let mut h = CMatrix::zeros(cfg.geometry.num_antennas, u);
    for (i, p) in placements[..u].iter().enumerate() {
        h.set_column(i, &entity_channel(p, i));
    }
    let mut pc_rng = derive_rng(seed, &[STREAM_POWER_CONTROL]);
    let h = apply_power_control(&h, &mut pc_rng)?;
    let h_j = entity_channel(&placements[u], u);

    let (es, n0, ej) = calibrate_powers(&h, &h_j, cfg.snr_db, cfg.rho_db)?;
    Ok(ChannelRealization { h, h_j, es, ej, n0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::complex_gaussian_vector;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn geom(b: usize) -> ArrayGeometry {
        ArrayGeometry::ula(b)
    }

    #[test]
    fn place_two_entities_respects_separation() {
        let spec = PlacementSpec::for_users(1);
        for seed in 0..20 {
            let placed = place_entities(&spec, seed).unwrap();
            assert_eq!(placed.len(), 2);
            let sep = (placed[0].azimuth_deg - placed[1].azimuth_deg).abs();
            assert!(sep >= 1.0, "separation {sep} below 1 degree");
        }
    }

    #[test]
    fn place_default_scenario_within_ranges() {
        let spec = PlacementSpec::for_users(32);
        let placed = place_entities(&spec, 3).unwrap();
        assert_eq!(placed.len(), 33);
        for p in &placed {
            assert!(p.distance_m >= 10.0 && p.distance_m <= 100.0);
            assert!(p.azimuth_deg >= -60.0 && p.azimuth_deg <= 60.0);
        }
    }

    #[test]
    fn infeasible_placement_is_a_config_error() {
        // 122 entities pairwise separated by >= 1 degree need 121 degrees of
        // sector; only 120 are available.
        let spec = PlacementSpec::for_users(121);
        match place_entities(&spec, 0) {
            Err(Error::Config(_)) => {}
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn broadside_steering_has_zero_phase_ramp() {
        let h = los_channel(&geom(8), 0.0, 25.0);
        let g = 1.0 / 25.0;
        for b in 0..8 {
            assert!((h[b] - Complex64::new(g, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn steering_phases_at_thirty_degrees() {
        // sin(30 deg) = 1/2, so entry b has phase pi * b / 2.
        let v = steering(&geom(4), 30.0);
        for b in 0..4 {
            let expected = (PI * b as f64 / 2.0) % (2.0 * PI);
            let diff = (v[b] - Complex64::from_polar(1.0, expected)).norm();
            assert!(diff < 1e-9, "entry {b}: {:?}", v[b]);
        }
    }

    #[test]
    fn doubling_distance_quarters_power() {
        let near = los_channel(&geom(4), 10.0, 20.0);
        let far = los_channel(&geom(4), 10.0, 40.0);
        let ratio = far.norm_squared() / near.norm_squared();
        assert!((ratio - 0.25).abs() < 1e-12);
    }

    #[test]
    fn single_undisplaced_path_is_scaled_steering() {
        let h = nlos_channel(&geom(6), 17.0, 30.0, 1, 0.0, 42);
        let s = los_channel(&geom(6), 17.0, 30.0);
        // h = alpha * s for a single complex scalar alpha.
        let alpha = h[0] / s[0];
        for b in 0..6 {
            assert!((h[b] - alpha * s[b]).norm() < 1e-12);
        }
    }

    #[test]
    fn nlos_energy_matches_los_normalization() {
        // E ||h||^2 / B -> g(d)^2 for many paths; Monte Carlo over seeds.
        let g2 = pathloss_amplitude(50.0).powi(2);
        let b = 4;
        let mut acc = 0.0;
        let n_seeds = 10_000;
        for seed in 0..n_seeds {
            let h = nlos_channel(&geom(b), 5.0, 50.0, 1000, 5.0, seed);
            acc += h.norm_squared() / b as f64;
        }
        let mean = acc / n_seeds as f64;
        assert!(
            (mean / g2 - 1.0).abs() < 0.05,
            "mean normalized energy {} vs expected {}",
            mean,
            g2
        );
    }

    #[test]
    fn different_seeds_give_different_channels() {
        let a = nlos_channel(&geom(4), 0.0, 20.0, 20, 5.0, 1);
        let b = nlos_channel(&geom(4), 0.0, 20.0, 20, 5.0, 2);
        assert!((a - b).norm() > 1e-9);
    }

    #[test]
    fn zero_offsets_equalize_powers() {
        let mut rng = derive_rng(9, &[0]);
        let h = CMatrix::from_fn(8, 3, |_, _| complex_gaussian(&mut rng, 1.0));
        let out = apply_power_control_with(&h, &[0.0, 0.0, 0.0]).unwrap();
        let p0 = out.column(0).norm_squared();
        for u in 1..3 {
            assert!((out.column(u).norm_squared() - p0).abs() < 1e-12 * p0);
        }
    }

    #[test]
    fn extreme_offsets_hit_ratio_bound() {
        let mut rng = derive_rng(10, &[0]);
        let h = CMatrix::from_fn(8, 2, |_, _| complex_gaussian(&mut rng, 1.0));
        let out = apply_power_control_with(&h, &[-3.0, 3.0]).unwrap();
        let p0 = out.column(0).norm_squared();
        let p1 = out.column(1).norm_squared();
        let ratio = p1.max(p0) / p1.min(p0);
        assert!((ratio - 10f64.powf(0.6)).abs() < 1e-9);
        assert!(ratio <= 4.0 + 1e-9);
    }

    #[test]
    fn power_control_rejects_zero_column() {
        let h = CMatrix::zeros(4, 2);
        assert!(apply_power_control_with(&h, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn power_control_keeps_frobenius_finite() {
        let mut rng = derive_rng(11, &[0]);
        let h = CMatrix::from_fn(16, 4, |_, _| complex_gaussian(&mut rng, 1.0));
        let out = apply_power_control(&h, &mut rng).unwrap();
        let f = out.norm_squared();
        assert!(f.is_finite() && f > 0.0);
    }

    #[test]
    fn calibration_identity_case() {
        // ||H||_F^2 = B with H = I, so snr = 0 dB gives N0 = 1.
        let h = CMatrix::identity(2, 2);
        let h_j = CVector::from_element(2, Complex64::new(1.0, 0.0));
        let (es, n0, _) = calibrate_powers(&h, &h_j, 0.0, 0.0).unwrap();
        assert_eq!(es, 1.0);
        assert!((n0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn calibration_rho_definition() {
        let mut rng = derive_rng(12, &[0]);
        let h = CMatrix::from_fn(16, 32, |_, _| complex_gaussian(&mut rng, 1.0));
        let h_j = complex_gaussian_vector(&mut rng, 16, 1.0);
        let (es, _, ej) = calibrate_powers(&h, &h_j, 10.0, 25.0).unwrap();
        let expected = 10f64.powf(2.5) / 32.0 * es * h.norm_squared();
        assert!((ej * h_j.norm_squared() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn negative_infinite_rho_silences_jammer() {
        let h = CMatrix::identity(4, 4);
        let h_j = CVector::from_element(4, Complex64::new(1.0, 0.0));
        let (_, _, ej) = calibrate_powers(&h, &h_j, 5.0, f64::NEG_INFINITY).unwrap();
        assert_eq!(ej, 0.0);
    }

    #[test]
    fn calibration_rejects_zero_channels() {
        let h = CMatrix::zeros(4, 2);
        let h_j = CVector::from_element(4, Complex64::new(1.0, 0.0));
        assert!(calibrate_powers(&h, &h_j, 0.0, 0.0).is_err());
    }

    fn test_config(b: usize, u: usize, prop: Propagation) -> ChannelConfig {
        ChannelConfig {
            geometry: ArrayGeometry::ula(b),
            placement: PlacementSpec::for_users(u),
            propagation: prop,
            snr_db: 10.0,
            rho_db: 25.0,
        }
    }

    #[test]
    fn generated_realization_meets_power_ratio_bound() {
        for seed in 0..10 {
            let chan = generate(&test_config(32, 8, Propagation::Los), seed).unwrap();
            assert!(chan.receive_power_ratio() <= 4.0 + 1e-9);
            let chan = generate(&test_config(32, 8, Propagation::default_nlos()), seed).unwrap();
            assert!(chan.receive_power_ratio() <= 4.0 + 1e-9);
        }
    }

    #[test]
    fn empirical_snr_and_rho_match_calibration() {
        let chan = generate(&test_config(16, 4, Propagation::Los), 7).unwrap();
        let mut rng = derive_rng(1234, &[0]);
        let n_draws = 10_000;
        let (mut sig, mut noise, mut jam) = (0.0, 0.0, 0.0);
        for _ in 0..n_draws {
            let s = complex_gaussian_vector(&mut rng, 4, chan.es);
            let n = complex_gaussian_vector(&mut rng, 16, chan.n0);
            let sj = complex_gaussian(&mut rng, chan.ej);
            sig += (&chan.h * &s).norm_squared();
            noise += n.norm_squared();
            jam += (&chan.h_j * sj).norm_squared();
        }
        let snr_db = 10.0 * (sig / noise).log10();
        let rho_db = 10.0 * (4.0 * jam / sig).log10();
        assert!((snr_db - 10.0).abs() < 0.1, "empirical SNR {snr_db} dB");
        assert!((rho_db - 25.0).abs() < 0.1, "empirical rho {rho_db} dB");
    }

    #[test]
    fn generate_is_deterministic() {
        let cfg = test_config(16, 4, Propagation::default_nlos());
        let a = generate(&cfg, 99).unwrap();
        let b = generate(&cfg, 99).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn steering_entries_are_unit_modulus(az in -90.0f64..90.0) {
            let v = steering(&geom(16), az);
            for b in 0..16 {
                prop_assert!((v[b].norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}
