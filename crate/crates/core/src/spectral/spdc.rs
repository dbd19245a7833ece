//! Type-0 down-conversion emission spectrum with a two-parameter temperature tuning model.

use alloc::format;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::{PUMP_WAVELENGTH, SPEED_OF_LIGHT};

/// Positive root of `sin^2(x)/x^2 = 1/2`.
pub const SINC2_HALF_WIDTH: f64 = 1.391_557_378_251_51;

/// Emission model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdcConfig {
    /// m
    pub pump_wavelength: f64,
    /// K
    pub degeneracy_temperature: f64,
    /// Emission FWHM at the degeneracy temperature, Hz.
    pub fwhm_at_degeneracy: f64,
    /// Signal/idler wavelength separation per kelvin of detuning, m/K. Positive values
    /// split the branches above the degeneracy temperature.
    pub tuning_span: f64,
    /// Scales the phase-mismatch argument; 1 reproduces `fwhm_at_degeneracy`.
    pub crystal_length_proxy: f64,
}

impl Default for SpdcConfig {
    fn default() -> Self {
        Self {
            pump_wavelength: PUMP_WAVELENGTH,
            degeneracy_temperature: 387.0,
            fwhm_at_degeneracy: 4e12,
            // each branch moves 18 nm/K, i.e. 54 nm for 3 K
            tuning_span: 36e-9,
            crystal_length_proxy: 1.0,
        }
    }
}

impl SpdcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm_at_degeneracy > 0.0 && self.fwhm_at_degeneracy.is_finite()) {
            return invalid(format!(
                "emission FWHM must be positive, got {}",
                self.fwhm_at_degeneracy
            ));
        }
        if !(self.pump_wavelength > 0.0) || !(self.crystal_length_proxy > 0.0) {
            return invalid("pump wavelength and crystal length proxy must be positive");
        }
        if !self.tuning_span.is_finite() || !self.degeneracy_temperature.is_finite() {
            return invalid("tuning parameters must be finite");
        }
        Ok(())
    }

    pub fn pump_frequency(&self) -> f64 {
        SPEED_OF_LIGHT / self.pump_wavelength
    }

    pub fn degenerate_frequency(&self) -> f64 {
        0.5 * self.pump_frequency()
    }

    pub fn degenerate_wavelength(&self) -> f64 {
        2.0 * self.pump_wavelength
    }

    /// Hz of detuning per unit of phase mismatch.
    fn mismatch_per_hz(&self) -> f64 {
        2.0 * SINC2_HALF_WIDTH * self.crystal_length_proxy / self.fwhm_at_degeneracy
    }

    /// Signed detuning of each branch from degeneracy, Hz (linearized about degeneracy).
    pub fn branch_offset(&self, temperature: f64) -> f64 {
        let lambda = self.degenerate_wavelength();
        0.5 * self.tuning_span * (temperature - self.degeneracy_temperature) * SPEED_OF_LIGHT
            / (lambda * lambda)
    }

    /// Peak frequencies `(signal, idler)` of the two emission branches; they sum to the
    /// pump frequency. Below the splitting threshold both sit at degeneracy.
    pub fn branch_frequencies(&self, temperature: f64) -> (f64, f64) {
        let offset = self.branch_offset(temperature).max(0.0);
        let center = self.degenerate_frequency();
        let signal = center + offset;
        (signal, self.pump_frequency() - signal)
    }

    /// Phase-mismatch argument of the sinc at optical frequency `nu`.
    pub fn mismatch(&self, temperature: f64, nu: f64) -> f64 {
        self.mismatch_per_hz()
            * ((nu - self.degenerate_frequency()).abs() - self.branch_offset(temperature))
    }
}

/// `sin^2(x)/x^2`, equal to 1 at the origin.
pub fn sinc2(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 3.0
    } else {
        let s = x.sin() / x;
        s * s
    }
}

/// Relative emission density (peak 1) at frequency `nu` and crystal temperature.
pub fn spdc_spectral_density(cfg: &SpdcConfig, temperature: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu.is_finite()) {
        return invalid(format!("optical frequency must be positive, got {nu}"));
    }
    Ok(sinc2(cfg.mismatch(temperature, nu)))
}

pub fn frequency_to_wavelength(nu: f64) -> f64 {
    SPEED_OF_LIGHT / nu
}

pub fn wavelength_to_frequency(lambda: f64) -> f64 {
    SPEED_OF_LIGHT / lambda
}
