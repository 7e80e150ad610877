//! Counter-based seed derivation and complex Gaussian sampling.
//!
//! Every random draw in the simulator comes from a [`ChaCha8Rng`] whose seed
//! is derived from a master seed plus a list of integer tags (stream id,
//! sweep-point index, channel index, trial index, ...). Work units can then
//! run in any order, or in parallel, and still reproduce bit-identical
//! results.

use crate::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// SplitMix64 finalizer; a cheap, well-mixed 64-bit permutation.
pub fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Folds a master seed and a tag path into a single derived seed.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut state = mix64(master);
    for &t in tags {
        state = mix64(state ^ mix64(t));
    }
    state
}

/// Derives a deterministic RNG from a master seed and a tag path.
///
/// Different tag paths yield independent streams; the same path always
/// yields the same stream regardless of call order.
pub fn derive_rng(master: u64, tags: &[u64]) -> ChaCha8Rng {
    let state = derive_seed(master, tags);
    let mut seed = [0u8; 32];
    for (i, chunk) in seed.chunks_exact_mut(8).enumerate() {
        chunk.copy_from_slice(&mix64(state ^ (i as u64 + 1)).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Draws a circularly-symmetric complex Gaussian sample with the given
/// variance: real and imaginary parts are independent with variance
/// `variance / 2` each.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Draws a length-`len` vector of i.i.d. complex Gaussian samples.
pub fn complex_gaussian_vector<R: Rng + ?Sized>(
    rng: &mut R,
    len: usize,
    variance: f64,
) -> crate::CVector {
    crate::CVector::from_fn(len, |_, _| complex_gaussian(rng, variance))
}
