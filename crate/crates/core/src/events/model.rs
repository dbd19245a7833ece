use alloc::format;

use crate::budget::db_to_transmission;
use crate::error::{invalid, Error, Result};
use crate::spectral::FilterSpec;

/// Emission, interferometer and channel parameters of one seeded run.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceRunConfig {
    /// mW
    pub pump_power: f64,
    /// Pairs per (s mW MHz) within the filter band.
    pub brightness_peak: f64,
    pub filter: FilterSpec,
    /// s
    pub duration: f64,
    /// H/V path delay of the interferometer, s.
    pub mzi_delay: f64,
    /// rad; consumed by callers that build the post-selected state from it.
    pub mzi_phase: f64,
    /// Loss between the splitter and each analyzer, dB: `[alice, bob]`.
    pub channel_loss_db: [f64; 2],
    pub rng_seed: u64,
    /// Largest accepted expected number of pairs.
    pub event_cap: u64,
}

impl SourceRunConfig {
    pub fn new(filter: FilterSpec, pump_power: f64, duration: f64, rng_seed: u64) -> Self {
        Self {
            pump_power,
            brightness_peak: 3600.0,
            filter,
            duration,
            mzi_delay: 76e-9,
            mzi_phase: core::f64::consts::PI,
            channel_loss_db: [0.0, 0.0],
            rng_seed,
            event_cap: 20_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        if !(self.pump_power >= 0.0 && self.pump_power.is_finite()) {
            return invalid(format!(
                "pump power must be non-negative, got {}",
                self.pump_power
            ));
        }
        if !(self.brightness_peak > 0.0 && self.brightness_peak.is_finite()) {
            return invalid("brightness must be positive");
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return invalid(format!("duration must be positive, got {}", self.duration));
        }
        if !(self.mzi_delay >= 0.0 && self.mzi_delay.is_finite()) {
            return invalid("interferometer delay must be non-negative");
        }
        if self
            .channel_loss_db
            .iter()
            .any(|l| !(*l >= 0.0 && l.is_finite()))
        {
            return invalid("channel losses must be non-negative");
        }
        Ok(())
    }

    /// Pairs per second within the V filter bandwidth.
    pub fn pair_rate(&self) -> f64 {
        self.brightness_peak * self.filter.fwhm_v * 1e-6 * self.pump_power
    }

    pub fn expected_pairs(&self) -> f64 {
        self.pair_rate() * self.duration
    }

    pub(crate) fn check_cap(&self) -> Result<()> {
        let expected = self.expected_pairs();
        if expected > self.event_cap as f64 {
            return Err(Error::EventCap {
                expected,
                cap: self.event_cap,
            });
        }
        Ok(())
    }

    pub fn channel_transmission(&self, channel: Channel) -> f64 {
        db_to_transmission(self.channel_loss_db[channel.index()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub efficiency: f64,
    /// s
    pub jitter_fwhm: f64,
    /// Hz
    pub dark_rate: f64,
    /// Non-paralyzable, s.
    pub dead_time: f64,
}

impl DetectorModel {
    /// Free-running InGaAs avalanche photodiode: 20 %, 230 ps, 1e-6 dark counts per ns.
    pub fn ingaas() -> Self {
        Self {
            efficiency: 0.2,
            jitter_fwhm: 230e-12,
            dark_rate: 1e3,
            dead_time: 10e-6,
        }
    }

    /// Superconducting nanowire detector: 7 %, under 10 dark counts per second.
    pub fn snspd() -> Self {
        Self {
            efficiency: 0.07,
            jitter_fwhm: 50e-12,
            dark_rate: 10.0,
            dead_time: 100e-9,
        }
    }

    /// Unit efficiency, no jitter, no dark counts, no dead time.
    pub fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            jitter_fwhm: 0.0,
            dark_rate: 0.0,
            dead_time: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return invalid(format!(
                "detector efficiency must lie in [0, 1], got {}",
                self.efficiency
            ));
        }
        for (name, v) in [
            ("jitter", self.jitter_fwhm),
            ("dark rate", self.dark_rate),
            ("dead time", self.dead_time),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return invalid(format!("detector {name} must be non-negative, got {v}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    Alice,
    Bob,
}

impl Channel {
    pub fn index(self) -> usize {
        match self {
            Channel::Alice => 0,
            Channel::Bob => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::Alice => "alice",
            Channel::Bob => "bob",
        }
    }
}

/// Simulation-only origin of a detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruthTag {
    Signal,
    Idler,
    Dark,
}

impl TruthTag {
    pub fn name(self) -> &'static str {
        match self {
            TruthTag::Signal => "signal",
            TruthTag::Idler => "idler",
            TruthTag::Dark => "dark",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRecord {
    /// s
    pub timestamp: f64,
    pub channel: Channel,
    pub truth_tag: TruthTag,
    /// Index of the emitted pair, `None` for dark counts.
    pub pair_id: Option<u64>,
}

/// SplitMix64 finalizer; derives independent per-point seeds from one base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
