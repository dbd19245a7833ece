//! Brightness, itemized pair-loss chain, available rates and multi-pair penalties.

use alloc::format;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::{PLANCK, PUMP_WAVELENGTH, SPEED_OF_LIGHT};

/// Converts a loss in dB to a linear transmission.
pub fn db_to_transmission(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

pub fn transmission_to_db(t: f64) -> f64 {
    -10.0 * t.log10()
}

/// Itemized losses seen by a photon pair between the crystal and the source output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBudget {
    /// Per-photon propagation loss from crystal to splitter, dB.
    pub single_photon_loss_db: f64,
    /// Pair penalty from a Lorentzian filter acting on energy-correlated photons, dB.
    pub lorentzian_pair_penalty_db: f64,
    /// Time-bin post-selection, dB.
    pub postselection_db: f64,
    /// Non-deterministic pair splitting at the output beam splitter, dB.
    pub splitting_db: f64,
    /// Extra pair-level channel loss (e.g. a fiber spool), dB.
    pub extra_channel_db: f64,
}

impl LossBudget {
    pub fn new(
        single_photon_loss_db: f64,
        lorentzian_pair_penalty_db: f64,
        postselection_db: f64,
        splitting_db: f64,
        extra_channel_db: f64,
    ) -> Result<Self> {
        let b = Self {
            single_photon_loss_db,
            lorentzian_pair_penalty_db,
            postselection_db,
            splitting_db,
            extra_channel_db,
        };
        for (name, v) in b.items() {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!(
                    "loss item {name} must be finite and non-negative, got {v}"
                ));
            }
        }
        Ok(b)
    }

    /// Paper-quoted chain for the 100 GHz DWDM filter.
    pub fn dwdm_100ghz() -> Self {
        Self::new(4.5, 0.0, 3.0, 3.0, 0.0).expect("valid preset")
    }

    pub fn psfbg_540mhz() -> Self {
        Self::new(5.2, 3.0, 3.0, 3.0, 0.0).expect("valid preset")
    }

    pub fn psfbg_25mhz() -> Self {
        Self::new(5.7, 3.0, 3.0, 3.0, 0.0).expect("valid preset")
    }

    /// Named items in report order; the per-photon loss appears once per photon.
    pub fn items(&self) -> [(&'static str, f64); 5] {
        [
            ("single_photon_loss", self.single_photon_loss_db),
            ("lorentzian_pair_penalty", self.lorentzian_pair_penalty_db),
            ("postselection", self.postselection_db),
            ("splitting", self.splitting_db),
            ("extra_channel", self.extra_channel_db),
        ]
    }

    /// Rows `(item, dB, running total)` of the pair-loss chain.
    pub fn chain(&self) -> Vec<(&'static str, f64, f64)> {
        let mut total = 0.0;
        let mut rows = Vec::with_capacity(6);
        for (name, db) in [
            ("signal_propagation", self.single_photon_loss_db),
            ("idler_propagation", self.single_photon_loss_db),
            ("lorentzian_pair_penalty", self.lorentzian_pair_penalty_db),
            ("postselection", self.postselection_db),
            ("splitting", self.splitting_db),
            ("extra_channel", self.extra_channel_db),
        ] {
            total += db;
            rows.push((name, db, total));
        }
        rows
    }
}

pub fn total_pair_loss(budget: &LossBudget) -> f64 {
    2.0 * budget.single_photon_loss_db
        + budget.lorentzian_pair_penalty_db
        + budget.postselection_db
        + budget.splitting_db
        + budget.extra_channel_db
}

/// Generator brightness constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightnessSpec {
    /// Pairs per injected pump photon.
    pub internal_probability: f64,
    /// Brightness averaged over the full emission band, pairs/(s·mW·MHz).
    pub b_full: f64,
    /// Peak brightness at the top of the emission band, pairs/(s·mW·MHz).
    pub b_top: f64,
    /// Full emission bandwidth, Hz.
    pub full_bandwidth: f64,
}

impl Default for BrightnessSpec {
    fn default() -> Self {
        Self {
            internal_probability: 4.8e-6,
            b_full: 2400.0,
            b_top: 3600.0,
            full_bandwidth: 4e12,
        }
    }
}

impl BrightnessSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.b_full > 0.0 && self.b_top >= self.b_full) {
            return invalid(format!(
                "brightness needs b_top >= b_full > 0, got {} / {}",
                self.b_top, self.b_full
            ));
        }
        if !(self.internal_probability >= 0.0 && self.full_bandwidth > 0.0) {
            return invalid("internal probability and full bandwidth must be positive");
        }
        Ok(())
    }
}

/// Pairs per second at the source output: `b_top · bandwidth · pump · 10^(-loss/10)`.
///
/// The Lorentzian pair penalty is carried by the budget only; `filter_bw_mhz` is the
/// nominal filter FWHM.
pub fn available_pair_rate(
    spec: &BrightnessSpec,
    filter_bw_mhz: f64,
    pump_mw: f64,
    budget: &LossBudget,
) -> f64 {
    spec.b_top * filter_bw_mhz * pump_mw * db_to_transmission(total_pair_loss(budget))
}

/// Mean number of pairs created per detection window, before any loss.
pub fn mean_pairs_per_window(
    spec: &BrightnessSpec,
    filter_bw_mhz: f64,
    pump_mw: f64,
    window_s: f64,
) -> f64 {
    spec.b_top * filter_bw_mhz * pump_mw * window_s
}

/// Relative entangled-state fidelity drop per mean pair number per window.
pub const MULTIPAIR_PENALTY_SLOPE: f64 = 1.0;

/// Linear small-`mu` model: a drop of 1% at `mu = 0.01`.
pub fn fidelity_penalty_from_multipair(mu: f64) -> f64 {
    MULTIPAIR_PENALTY_SLOPE * mu
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Improvements {
    /// Replace the Lorentzian filter by a flat-top one (-3 dB).
    pub flat_top_filter: bool,
    /// Splice all fiber connections (-2 dB per pair).
    pub spliced_fibers: bool,
    /// Tapered waveguide for better fiber coupling (-1 dB per pair).
    pub tapered_waveguide: bool,
    /// Cavity-based deterministic pair splitting (-3 dB).
    pub cavity_splitting: bool,
}

impl Improvements {
    pub fn all() -> Self {
        Self {
            flat_top_filter: true,
            spliced_fibers: true,
            tapered_waveguide: true,
            cavity_splitting: true,
        }
    }
}

/// An improvement asked for more reduction than the item it targets had left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampWarning {
    pub item: &'static str,
    pub requested_db: f64,
    pub available_db: f64,
}

fn reduce(value: &mut f64, by: f64, item: &'static str, warnings: &mut Vec<ClampWarning>) {
    if by > *value {
        warnings.push(ClampWarning {
            item,
            requested_db: by,
            available_db: *value,
        });
        *value = 0.0;
    } else {
        *value -= by;
    }
}

/// Applies the selected improvements; each item is floored at zero.
///
/// Fiber splicing and waveguide tapering act on both photons' propagation, so their pair
/// reductions are split evenly over the per-photon item.
pub fn apply_improvements(
    budget: &LossBudget,
    flags: Improvements,
) -> (LossBudget, Vec<ClampWarning>) {
    let mut b = *budget;
    let mut warnings = Vec::new();
    if flags.flat_top_filter {
        reduce(
            &mut b.lorentzian_pair_penalty_db,
            3.0,
            "lorentzian_pair_penalty",
            &mut warnings,
        );
    }
    if flags.spliced_fibers {
        reduce(
            &mut b.single_photon_loss_db,
            1.0,
            "single_photon_loss",
            &mut warnings,
        );
    }
    if flags.tapered_waveguide {
        reduce(
            &mut b.single_photon_loss_db,
            0.5,
            "single_photon_loss",
            &mut warnings,
        );
    }
    if flags.cavity_splitting {
        reduce(&mut b.splitting_db, 3.0, "splitting", &mut warnings);
    }
    (b, warnings)
}

/// Pump photons per second at `pump_mw` and the source pump wavelength.
pub fn pump_photon_flux(pump_mw: f64) -> f64 {
    pump_mw * 1e-3 * PUMP_WAVELENGTH / (PLANCK * SPEED_OF_LIGHT)
}

/// Source rate from the internal conversion probability, compared with the
/// `b_full × full bandwidth` route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalRateReport {
    pub from_internal_probability: f64,
    pub from_full_brightness: f64,
    /// `from_internal_probability / from_full_brightness`
    pub ratio: f64,
    /// Set when the two routes differ by more than 20%.
    pub discrepancy: bool,
}

pub fn rate_from_internal_probability(spec: &BrightnessSpec, pump_mw: f64) -> InternalRateReport {
    let from_internal_probability = spec.internal_probability * pump_photon_flux(pump_mw);
    let from_full_brightness = spec.b_full * spec.full_bandwidth * 1e-6 * pump_mw;
    let ratio = if from_full_brightness > 0.0 {
        from_internal_probability / from_full_brightness
    } else {
        f64::NAN
    };
    let discrepancy = ratio.is_finite() && (ratio - 1.0).abs() > 0.2;
    InternalRateReport {
        from_internal_probability,
        from_full_brightness,
        ratio,
        discrepancy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_loss_chains() {
        assert!((total_pair_loss(&LossBudget::dwdm_100ghz()) - 15.0).abs() < 1e-12);
        assert!((total_pair_loss(&LossBudget::psfbg_540mhz()) - 19.4).abs() < 1e-12);
        assert!((total_pair_loss(&LossBudget::psfbg_25mhz()) - 20.4).abs() < 1e-12);
    }

    #[test]
    fn chain_running_total_ends_at_total() {
        let b = LossBudget::psfbg_25mhz();
        let rows = b.chain();
        assert_eq!(rows.len(), 6);
        assert!((rows.last().unwrap().2 - total_pair_loss(&b)).abs() < 1e-12);
    }

    #[test]
    fn negative_item_rejected() {
        assert!(LossBudget::new(-1.0, 0.0, 3.0, 3.0, 0.0).is_err());
        assert!(LossBudget::new(1.0, f64::NAN, 3.0, 3.0, 0.0).is_err());
    }

    #[test]
    fn table_rates() {
        let spec = BrightnessSpec::default();
        let dwdm = available_pair_rate(&spec, 80_000.0, 1.0, &LossBudget::dwdm_100ghz());
        assert!((dwdm - 3600.0 * 8e4 * 10f64.powf(-1.5)).abs() < 1e-6);
        let narrow = available_pair_rate(&spec, 25.0, 1.0, &LossBudget::psfbg_25mhz());
        assert!((narrow - 820.8).abs() < 0.5, "{narrow}");
    }

    #[test]
    fn mu_examples() {
        let spec = BrightnessSpec::default();
        let mu = mean_pairs_per_window(&spec, 25.0, 7.0, 15.6e-9);
        assert!((mu - 0.009_828).abs() < 1e-9);
        assert_eq!(mean_pairs_per_window(&spec, 25.0, 7.0, 0.0), 0.0);
        assert_eq!(mean_pairs_per_window(&spec, 25.0, 14.0, 15.6e-9), 2.0 * mu);
    }

    #[test]
    fn multipair_penalty_is_linear() {
        assert_eq!(fidelity_penalty_from_multipair(0.0), 0.0);
        assert!((fidelity_penalty_from_multipair(0.01) - 0.01).abs() < 1e-15);
        assert!((fidelity_penalty_from_multipair(0.005) - 0.005).abs() < 1e-15);
    }

    #[test]
    fn improvements() {
        let b = LossBudget::psfbg_25mhz();
        let flat = Improvements {
            flat_top_filter: true,
            ..Default::default()
        };
        let (nb, w) = apply_improvements(&b, flat);
        assert!((total_pair_loss(&nb) - 17.4).abs() < 1e-12);
        assert!(w.is_empty());

        let (same, w) = apply_improvements(&b, Improvements::default());
        assert_eq!(same, b);
        assert!(w.is_empty());

        let (all, w) = apply_improvements(&b, Improvements::all());
        assert!((total_pair_loss(&b) - total_pair_loss(&all) - 9.0).abs() < 1e-12);
        assert!(w.is_empty());

        // the DWDM chain has no Lorentzian penalty left to remove
        let (d, w) = apply_improvements(&LossBudget::dwdm_100ghz(), flat);
        assert_eq!(d.lorentzian_pair_penalty_db, 0.0);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].item, "lorentzian_pair_penalty");
    }

    #[test]
    fn internal_probability_route() {
        let spec = BrightnessSpec::default();
        assert!((pump_photon_flux(1.0) - 3.928e15).abs() / 3.928e15 < 1e-3);
        let r = rate_from_internal_probability(&spec, 1.0);
        assert!((r.from_internal_probability - 1.885e10).abs() / 1.885e10 < 1e-3);
        assert!((r.from_full_brightness - 9.6e9).abs() < 1.0);
        assert!((r.ratio - 1.964).abs() < 0.01);
        assert!(r.discrepancy);
        let zero = rate_from_internal_probability(&spec, 0.0);
        assert_eq!(zero.from_internal_probability, 0.0);
    }

    #[test]
    fn brightness_validation() {
        assert!(BrightnessSpec::default().validate().is_ok());
        let bad = BrightnessSpec {
            b_top: 1000.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
