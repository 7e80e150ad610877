//! Simulation core for jammer mitigation in quantized massive MU-MIMO uplinks.
//!
//! The library models the full receive chain of a `B`-antenna basestation
//! serving `U` single-antenna users in the presence of a single-antenna
//! jammer:
//!
//! ```text
//! y = H s + h_J s_J + n          (antenna-domain receive signal)
//! y_P = P y                      (adaptive rank-one analog transform)
//! r = Q(y_P)                     (low-resolution data conversion)
//! s* = W r                       (Bussgang-aware LMMSE equalization)
//! ```
//!
//! The analog transform is a block-diagonal collection of rank-one updates
//! `P_c = I - beta_c b_c a_c^H` whose vectors may be constrained to finite
//! phase or quadrature alphabets so they map onto simple analog circuitry.
//! [`transform`] computes the optimal parameters, [`converter`] models the
//! ADCs, [`equalizer`] detects the transmit symbols, and [`montecarlo`] runs
//! seeded bit-error-rate sweeps comparing the hybrid receiver against purely
//! digital and jammerless baselines.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the companion CLI
//! crate carries all file formats and I/O.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channel;
pub mod converter;
pub mod equalizer;
mod error;
pub mod montecarlo;
pub mod rng;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix used throughout the receive-chain math.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;
