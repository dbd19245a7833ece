use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::format;

use crate::error::{invalid, Result};
use crate::polarization::Pol;
use crate::{PUMP_WAVELENGTH, SPEED_OF_LIGHT};

/// Frequency at which the filters are set: half the pump frequency (1560.48 nm).
pub const DEGENERATE_FREQUENCY: f64 = 0.5 * SPEED_OF_LIGHT / PUMP_WAVELENGTH;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterShape {
    /// Unit transmission inside the passband with optional raised-cosine edges of the
    /// given width (Hz). The FWHM is unchanged by the edges.
    FlatTop {
        edge_width: f64,
    },
    Lorentzian,
}

/// Intensity transfer function of a bandwidth filter, possibly polarization dependent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub shape: FilterShape,
    /// Hz
    pub center_v: f64,
    /// Hz
    pub fwhm_v: f64,
    /// Hz
    pub center_h: f64,
    /// Hz
    pub fwhm_h: f64,
    /// Center shift per kelvin, Hz/K.
    pub temperature_tuning: f64,
    /// K
    pub temperature: f64,
    /// Temperature at which the centers above are specified, K.
    pub reference_temperature: f64,
}

impl FilterSpec {
    pub fn flat_top(center: f64, fwhm: f64) -> Self {
        Self {
            shape: FilterShape::FlatTop { edge_width: 0.0 },
            center_v: center,
            fwhm_v: fwhm,
            center_h: center,
            fwhm_h: fwhm,
            temperature_tuning: 0.0,
            temperature: 300.0,
            reference_temperature: 300.0,
        }
    }

    pub fn lorentzian(center_v: f64, fwhm_v: f64, center_h: f64, fwhm_h: f64) -> Self {
        Self {
            shape: FilterShape::Lorentzian,
            center_v,
            fwhm_v,
            center_h,
            fwhm_h,
            temperature_tuning: 0.0,
            temperature: 300.0,
            reference_temperature: 300.0,
        }
    }

    /// 100 GHz-grid DWDM channel: flat top, 80 GHz transmission bandwidth.
    pub fn dwdm_100ghz() -> Self {
        Self::flat_top(DEGENERATE_FREQUENCY, 80e9)
    }

    /// 540 MHz phase-shifted fiber Bragg grating (580 MHz for H, centers 480 MHz apart).
    pub fn psfbg_540mhz() -> Self {
        Self {
            temperature_tuning: 1e9,
            ..Self::lorentzian(
                DEGENERATE_FREQUENCY,
                540e6,
                DEGENERATE_FREQUENCY + 480e6,
                580e6,
            )
        }
    }

    /// 25 MHz phase-shifted fiber Bragg grating (28 MHz for H, centers 80 MHz apart).
    pub fn psfbg_25mhz() -> Self {
        Self {
            temperature_tuning: 200e6,
            ..Self::lorentzian(
                DEGENERATE_FREQUENCY,
                25e6,
                DEGENERATE_FREQUENCY + 80e6,
                28e6,
            )
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("fwhm_v", self.fwhm_v), ("fwhm_h", self.fwhm_h)] {
            if !(w > 0.0 && w.is_finite()) {
                return invalid(format!("filter {name} must be positive, got {w}"));
            }
        }
        if let FilterShape::FlatTop { edge_width } = self.shape {
            if self.fwhm_h != self.fwhm_v || self.center_h != self.center_v {
                return invalid("flat-top filters must have identical H and V parameters");
            }
            if !(edge_width >= 0.0 && edge_width <= self.fwhm_v) {
                return invalid(format!(
                    "flat-top edge width must lie in [0, fwhm], got {edge_width}"
                ));
            }
        }
        Ok(())
    }

    pub fn fwhm(&self, pol: Pol) -> f64 {
        match pol {
            Pol::H => self.fwhm_h,
            Pol::V => self.fwhm_v,
        }
    }

    /// Center for `pol` at the current filter temperature, Hz.
    pub fn effective_center(&self, pol: Pol) -> f64 {
        let center = match pol {
            Pol::H => self.center_h,
            Pol::V => self.center_v,
        };
        center + self.temperature_tuning * (self.temperature - self.reference_temperature)
    }

    /// Transmission at a detuning from the effective center of `pol`.
    pub fn transmission_at_detuning(&self, detuning: f64, pol: Pol) -> f64 {
        let w = self.fwhm(pol);
        match self.shape {
            FilterShape::Lorentzian => {
                let x = 2.0 * detuning / w;
                1.0 / (1.0 + x * x)
            }
            FilterShape::FlatTop { edge_width } => {
                let d = detuning.abs();
                let inner = 0.5 * (w - edge_width);
                let outer = 0.5 * (w + edge_width);
                if d <= inner {
                    1.0
                } else if d >= outer {
                    0.0
                } else {
                    0.5 * (1.0 + (PI * (d - inner) / edge_width).cos())
                }
            }
        }
    }
}

/// Intensity transmission in `[0, 1]` at absolute frequency `nu`.
pub fn filter_transmission(f: &FilterSpec, nu: f64, pol: Pol) -> f64 {
    f.transmission_at_detuning(nu - f.effective_center(pol), pol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentzian_peak_and_half_width() {
        let f = FilterSpec::psfbg_540mhz();
        let c = f.effective_center(Pol::V);
        assert_eq!(filter_transmission(&f, c, Pol::V), 1.0);
        assert!((filter_transmission(&f, c + 270e6, Pol::V) - 0.5).abs() < 1e-12);
        assert!((filter_transmission(&f, c - 270e6, Pol::V) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn birefringent_centers() {
        let f = FilterSpec::psfbg_25mhz();
        assert!((f.effective_center(Pol::H) - f.effective_center(Pol::V) - 80e6).abs() < 1e-3);
        let g = FilterSpec::psfbg_540mhz();
        assert!((g.effective_center(Pol::H) - g.effective_center(Pol::V) - 480e6).abs() < 1e-3);
        // V-centered light sits far in the H wing of the 25 MHz grating
        let c = f.effective_center(Pol::V);
        assert!(filter_transmission(&f, c, Pol::H) < 0.04);
    }

    #[test]
    fn temperature_tuning_shifts_both_centers() {
        let mut f = FilterSpec::psfbg_25mhz();
        let before = f.effective_center(Pol::V);
        f.temperature += 2.0;
        assert!((f.effective_center(Pol::V) - before - 400e6).abs() < 1e-3);
    }

    #[test]
    fn flat_top_is_a_box() {
        let f = FilterSpec::dwdm_100ghz();
        let c = f.effective_center(Pol::V);
        assert_eq!(filter_transmission(&f, c + 39.9e9, Pol::V), 1.0);
        assert_eq!(filter_transmission(&f, c - 40.1e9, Pol::H), 0.0);
    }

    #[test]
    fn raised_cosine_edge_keeps_fwhm() {
        let mut f = FilterSpec::dwdm_100ghz();
        f.shape = FilterShape::FlatTop { edge_width: 10e9 };
        f.validate().unwrap();
        assert!((f.transmission_at_detuning(40e9, Pol::V) - 0.5).abs() < 1e-12);
        assert_eq!(f.transmission_at_detuning(34e9, Pol::V), 1.0);
        assert_eq!(f.transmission_at_detuning(46e9, Pol::V), 0.0);
    }

    #[test]
    fn validation() {
        assert!(FilterSpec::psfbg_25mhz().validate().is_ok());
        let mut bad = FilterSpec::dwdm_100ghz();
        bad.fwhm_h = 50e9;
        assert!(bad.validate().is_err());
        let zero = FilterSpec::lorentzian(1.0, 0.0, 1.0, 1.0);
        assert!(zero.validate().is_err());
    }

    #[test]
    fn transmissions_bounded() {
        for f in [
            FilterSpec::dwdm_100ghz(),
            FilterSpec::psfbg_540mhz(),
            FilterSpec::psfbg_25mhz(),
        ] {
            for k in -200..200 {
                let nu = DEGENERATE_FREQUENCY + k as f64 * 1e9;
                for pol in Pol::ALL {
                    let t = filter_transmission(&f, nu, pol);
                    assert!((0.0..=1.0).contains(&t));
                }
            }
        }
    }
}
