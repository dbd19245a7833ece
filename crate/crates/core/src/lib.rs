//! Numerical core of a telecom-band polarization-entangled photon-pair source simulator.
//!
//! Every algorithm lives here: exact polarization algebra, spectral and temporal models
//! of the filtered pairs, the seeded Monte Carlo detection chain, fringe and Bell
//! analysis, the loss budget and the interferometer phase-lock loop. Without the default
//! `std` feature the crate is `no_std` and needs only `alloc`. File formats,
//! configuration and the command line live in the `pairsim` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod analysis;
pub mod budget;
mod error;
pub mod events;
pub mod lock;
pub mod polarization;
pub mod spectral;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Pump wavelength of the source (Rb-referenced), m.
pub const PUMP_WAVELENGTH: f64 = 780.24e-9;
/// Conversion from a Gaussian FWHM to its standard deviation.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;
