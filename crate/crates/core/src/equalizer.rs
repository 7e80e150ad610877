//! Bussgang-aware LMMSE equalization and hard-decision detection.
//!
//! Under the linearized conversion model `r = gamma P(H s + h_J s_J + n)
//! + G^{-1} d` with `C_d ~ 2D I`, the LMMSE estimate of `s` is `s* = W r`
//! with
//!
//! ```text
//! W = (1/gamma) H^H P^H ( P H H^H P^H + (Ej/Es) P h_J h_J^H P^H
//!       + (N0/Es) P P^H + (2D / (gamma^2 Es)) G^{-2} )^{-1}.
//! ```
//!
//! The bracket is Hermitian positive definite and is factored by Cholesky
//! rather than inverted explicitly. Detection slices each estimate to the
//! nearest Gray-mapped 16-QAM point.

use crate::channel::ChannelRealization;
use crate::converter::AdcModel;
use crate::transform::AnalogTransform;
use crate::{CMatrix, CVector, Complex64, Error, Result};
use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Gray code per 2-bit axis label: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3.
/// Adjacent amplitude levels differ in exactly one bit.
const GRAY_LEVELS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];
const GRAY_OF_LEVEL_INDEX: [usize; 4] = [0b00, 0b01, 0b11, 0b10];

fn level_for_gray(bits: usize) -> f64 {
    GRAY_LEVELS[GRAY_OF_LEVEL_INDEX.iter().position(|&g| g == bits).unwrap()]
}

/// Zero-mean symbol constellation with average energy `Es`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
    bits_per_symbol: u32,
    energy: f64,
}

impl Constellation {
    /// Gray-mapped 16-QAM with per-axis levels `{+-1, +-3} / sqrt(10)`
    /// scaled to average energy `es`. The 4-bit symbol label is
    /// `(i_bits << 2) | q_bits`, each axis Gray coded.
    pub fn qam16(es: f64) -> Self {
        let scale = (es / 10.0).sqrt();
        let points = (0..16)
            .map(|label| {
                let i = level_for_gray((label >> 2) & 0b11);
                let q = level_for_gray(label & 0b11);
                Complex64::new(i * scale, q * scale)
            })
            .collect();
        Constellation {
            points,
            bits_per_symbol: 4,
            energy: es,
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Nearest constellation label by independent per-axis slicing.
    /// Boundary values resolve to the lowest label among the tied points,
    /// matching an exhaustive lowest-index scan.
    pub fn detect(&self, z: Complex64) -> usize {
        let scale = (self.energy / 10.0).sqrt();
        (Self::slice_axis(z.re, scale) << 2) | Self::slice_axis(z.im, scale)
    }

    fn slice_axis(x: f64, scale: f64) -> usize {
        if x <= -2.0 * scale {
            0b00
        } else if x <= 0.0 {
            0b01
        } else if x < 2.0 * scale {
            0b11
        } else {
            0b10
        }
    }
}

/// Linear equalizer `W` (`U x B`).
#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerMatrix {
    w: CMatrix,
}

impl EqualizerMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.w
    }

    /// Symbol estimate `s* = W r`.
    pub fn estimate(&self, r: &CVector) -> CVector {
        &self.w * r
    }
}

/// Builds the quantization-aware LMMSE matrix for a channel, analog
/// transform, and ADC model.
pub fn lmmse_matrix(
    chan: &ChannelRealization,
    t: &AnalogTransform,
    adc: &AdcModel,
) -> Result<EqualizerMatrix> {
    let b = chan.num_antennas();
    if t.num_antennas() != b || adc.gains.len() != b {
        return Err(Error::Config(format!(
            "dimension mismatch: {b} antennas, transform {}, gains {}",
            t.num_antennas(),
            adc.gains.len()
        )));
    }
    let gamma = adc.bussgang_gain;
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Config("Bussgang gain must be positive".into()));
    }
    let es = chan.es;
    let p = t.to_dense();
    let ph = &p * &chan.h;
    let phj = &p * &chan.h_j;

    let mut bracket = &ph * ph.adjoint();
    bracket += (&phj * phj.adjoint()) * Complex64::new(chan.ej / es, 0.0);
    bracket += &p * p.adjoint() * Complex64::new(chan.n0 / es, 0.0);
    let dist = 2.0 * adc.distortion_var / (gamma * gamma * es);
    for k in 0..b {
        bracket[(k, k)] += Complex64::new(dist / (adc.gains[k] * adc.gains[k]), 0.0);
    }

    let diag_min = (0..b).map(|k| bracket[(k, k)].re).fold(f64::INFINITY, f64::min);
    let diag_max = (0..b).map(|k| bracket[(k, k)].re).fold(0.0f64, f64::max);
    let chol = nalgebra::Cholesky::new(bracket).ok_or_else(|| {
        Error::Numerical(format!(
            "equalizer bracket ({b}x{b}) is not positive definite \
             (diagonal range [{diag_min:.3e}, {diag_max:.3e}])"
        ))
    })?;
    let solved = chol.solve(&ph);
    let w = solved.adjoint() * Complex64::new(1.0 / gamma, 0.0);
    Ok(EqualizerMatrix { w })
}

/// Hard decisions: per UE, the nearest constellation label. The label bits
/// are the Gray-mapped transmit bits.
pub fn hard_detect(s_star: &CVector, constellation: &Constellation) -> Vec<usize> {
    (0..s_star.len())
        .map(|u| constellation.detect(s_star[u]))
        .collect()
}

/// Number of differing bits between two label sequences.
pub fn bit_errors(sent: &[usize], detected: &[usize]) -> u64 {
    sent.iter()
        .zip(detected)
        .map(|(&a, &b)| (a ^ b).count_ones() as u64)
        .sum()
}
