//! Low-resolution ADC model: gain control, uniform midrise quantization
//! with MSE-optimal step size, and Bussgang gain/distortion statistics.
//!
//! The q-bit midrise quantizer is
//!
//! ```text
//! Q(x) = Delta floor(x / Delta) + Delta / 2      if |x| <  Delta 2^(q-1)
//!        (Delta / 2)(2^q - 1) sign(x)            otherwise
//! ```
//!
//! and the step size minimizes `E[(Q(x) - x)^2]` for standard normal input.
//! For Gaussian inputs, `Q(x) = gamma x + d` with the distortion `d`
//! uncorrelated with `x` (Bussgang's decomposition); `gamma` and
//! `D = Var(d)` feed the quantization-aware equalizer. A per-ADC gain
//! `g_k = sqrt(2 / [P C_y P^H]_kk)` normalizes each quantizer input to unit
//! variance per real component so the standard-normal statistics apply.
//!
//! All Gaussian moments are evaluated by exact piecewise integration over
//! the quantizer cells (error function sums), well inside the 1e-8 relative
//! accuracy the model needs.

use crate::transform::{AnalogTransform, Covariance};
use crate::{CVector, Complex64, Error, Result};
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::sync::atomic::{AtomicU64, Ordering};
#[allow(unused_imports)]
use num_traits::Float;

/// Supported ADC resolutions in bits.
pub const MIN_BITS: u32 = 1;
pub const MAX_BITS: u32 = 16;

/// Search bracket and tolerance for the step-size optimization.
const STEP_BRACKET: (f64, f64) = (1e-3, 4.0);
const STEP_TOLERANCE: f64 = 1e-8;

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / core::f64::consts::SQRT_2))
}

/// Iterates over the positive quantizer cells: reconstruction level and the
/// cell boundaries `[a, b)`, the last cell extending to infinity.
fn for_each_cell(q: u32, step: f64, mut f: impl FnMut(f64, f64, Option<f64>)) {
    let levels = 1u64 << (q - 1);
    for m in 0..levels {
        let level = (m as f64 + 0.5) * step;
        let a = m as f64 * step;
        let b = if m + 1 == levels {
            None
        } else {
            Some((m + 1) as f64 * step)
        };
        f(level, a, b);
    }
}

/// Exact `E[(Q(x) - x)^2]` for standard normal `x`, by per-cell integration
/// of the squared error against the Gaussian density.
pub fn quantizer_mse(q: u32, step: f64) -> f64 {
    let mut total = 0.0;
    for_each_cell(q, step, |level, a, b| {
        let (cdf_b, pdf_b, b_pdf_b) = match b {
            Some(b) => (normal_cdf(b), normal_pdf(b), b * normal_pdf(b)),
            None => (1.0, 0.0, 0.0),
        };
        let i0 = cdf_b - normal_cdf(a);
        let i1 = normal_pdf(a) - pdf_b;
        let i2 = i0 - (b_pdf_b - a * normal_pdf(a));
        total += level * level * i0 - 2.0 * level * i1 + i2;
    });
    2.0 * total
}

/// Bussgang gain and distortion variance of the q-bit quantizer for
/// standard normal input: `gamma = E[Q(x) x]` and `D = E[Q(x)^2] - gamma^2`.
pub fn bussgang_characterize(q: u32, step: f64) -> (f64, f64) {
    let mut e_qx = 0.0;
    let mut e_q2 = 0.0;
    for_each_cell(q, step, |level, a, b| {
        let (cdf_b, pdf_b) = match b {
            Some(b) => (normal_cdf(b), normal_pdf(b)),
            None => (1.0, 0.0),
        };
        e_qx += level * (normal_pdf(a) - pdf_b);
        e_q2 += level * level * (cdf_b - normal_cdf(a));
    });
    let gamma = 2.0 * e_qx;
    let d = 2.0 * e_q2 - gamma * gamma;
    (gamma, d)
}

fn golden_section_min(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

// Step sizes memoized per resolution; zero bits mark an empty slot (a valid
// step is never 0.0).
static STEP_CACHE: [AtomicU64; MAX_BITS as usize] = [const { AtomicU64::new(0) }; MAX_BITS as usize];

/// MSE-optimal step size for the q-bit midrise quantizer with standard
/// normal input, by golden-section search; memoized per `q`.
pub fn optimal_step_size(q: u32) -> Result<f64> {
    if !(MIN_BITS..=MAX_BITS).contains(&q) {
        return Err(Error::Config(format!(
            "ADC resolution must be {MIN_BITS}..={MAX_BITS} bits, got {q}"
        )));
    }
    let slot = &STEP_CACHE[(q - 1) as usize];
    let cached = slot.load(Ordering::Relaxed);
    if cached != 0 {
        return Ok(f64::from_bits(cached));
    }
    let step = golden_section_min(
        |d| quantizer_mse(q, d),
        STEP_BRACKET.0,
        STEP_BRACKET.1,
        STEP_TOLERANCE,
    );
    slot.store(step.to_bits(), Ordering::Relaxed);
    Ok(step)
}

/// The q-bit uniform midrise quantizer with step `Delta`:
/// `Delta floor(x / Delta) + Delta / 2` inside the no-overload range,
/// saturating at `+-(2^q - 1) Delta / 2` beyond it.
///
/// The cell index is clamped before reconstruction so every output,
/// including the saturated ones, comes from the same `(m + 1/2) Delta`
/// expression; outputs always lie in the 2^q-level set and the map is
/// monotone to the last bit.
pub fn midrise(x: f64, q: u32, step: f64) -> f64 {
    let half_levels = (1u64 << (q - 1)) as f64;
    let m = (x / step).floor().clamp(-half_levels, half_levels - 1.0);
    (m + 0.5) * step
}

/// Immutable ADC stage: resolution, optimal step, Bussgang statistics, and
/// per-antenna gain-control factors.
#[derive(Debug, Clone, PartialEq)]
pub struct AdcModel {
    pub resolution: u32,
    pub step: f64,
    pub bussgang_gain: f64,
    pub distortion_var: f64,
    pub gains: Vec<f64>,
}

impl AdcModel {
    pub fn new(resolution: u32, gains: Vec<f64>) -> Result<Self> {
        let step = optimal_step_size(resolution)?;
        let (bussgang_gain, distortion_var) = bussgang_characterize(resolution, step);
        if gains.iter().any(|&g| !g.is_finite() || g <= 0.0) {
            return Err(Error::Config("ADC gains must be positive and finite".into()));
        }
        Ok(AdcModel {
            resolution,
            step,
            bussgang_gain,
            distortion_var,
            gains,
        })
    }
}

/// Gain-control factors `g_k = sqrt(2 / [P C_y P^H]_kk)`.
///
/// The diagonal is evaluated clusterwise through the rank-one structure of
/// each block, never materializing the `B x B` product:
/// `diag(P C P^H)_k = C_kk - 2 Re{beta b_k conj((C a)_k)}
///                    + |beta|^2 (a^H C a) |b_k|^2`.
pub fn gain_control(t: &AnalogTransform, cy: &Covariance) -> Result<Vec<f64>> {
    let s = t.cluster_size;
    if cy.dim() != t.num_antennas() {
        return Err(Error::Config(format!(
            "covariance dimension {} does not match transform antennas {}",
            cy.dim(),
            t.num_antennas()
        )));
    }
    let mut gains = Vec::with_capacity(cy.dim());
    for (c, block) in t.blocks.iter().enumerate() {
        let cy_c = cy.block(c, s);
        let ca = cy_c.matrix() * &block.a;
        let aca = block.a.dotc(&ca).re;
        for k in 0..s {
            let base = cy_c.matrix()[(k, k)].re;
            let cross = (block.beta * block.b[k] * ca[k].conj()).re;
            let diag = base - 2.0 * cross + block.beta.norm_sqr() * aca * block.b[k].norm_sqr();
            if !diag.is_finite() || diag <= 0.0 {
                return Err(Error::Numerical(format!(
                    "transformed covariance diagonal not positive at antenna {} (value {diag:.3e})",
                    c * s + k
                )));
            }
            gains.push((2.0 / diag).sqrt());
        }
    }
    Ok(gains)
}

/// Data conversion: per antenna,
/// `r_k = (1 / g_k) (Q(g_k Re y_k) + i Q(g_k Im y_k))`.
pub fn convert(y_p: &CVector, adc: &AdcModel) -> CVector {
    assert_eq!(y_p.len(), adc.gains.len(), "one gain per antenna");
    CVector::from_fn(y_p.len(), |k, _| {
        let g = adc.gains[k];
        let re = midrise(g * y_p[k].re, adc.resolution, adc.step);
        let im = midrise(g * y_p[k].im, adc.resolution, adc.step);
        Complex64::new(re / g, im / g)
    })
}
