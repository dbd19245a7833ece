//! Run configuration: one TOML file, preset expansion, flag overrides and the hash that
//! tags every output file.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use pairsim_core::events::{DetectorModel, SourceRunConfig};
use pairsim_core::lock::{LockConfig, PhasePlant, Setpoint, SimulationSettings};
use pairsim_core::polarization::Pol;
use pairsim_core::spectral::{biphoton_temporal_correlation, FilterShape, FilterSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{config_err, CliError};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "PAIRSIM_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "pairsim-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FilterPreset {
    #[value(name = "dwdm100ghz")]
    Dwdm100ghz,
    #[default]
    #[value(name = "psfbg540mhz")]
    Psfbg540mhz,
    #[value(name = "psfbg25mhz")]
    Psfbg25mhz,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DetectorPreset {
    #[default]
    Ingaas,
    Snspd,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum CustomFilter {
    Lorentzian {
        center_v: f64,
        fwhm_v: f64,
        center_h: f64,
        fwhm_h: f64,
    },
    FlatTop {
        center: f64,
        fwhm: f64,
        edge_width: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomDetector {
    pub efficiency: f64,
    /// s
    pub jitter_fwhm: f64,
    /// Hz
    pub dark_rate: f64,
    /// s
    pub dead_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSettings {
    /// Crystal temperatures, K; one block of rows each.
    pub temperatures: Vec<f64>,
    /// Wavelength span centered on degeneracy, m.
    pub span: f64,
    pub points: usize,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        Self {
            temperatures: vec![387.0],
            span: 100e-9,
            points: 2001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct HistogramSettings {
    /// s; derived from the expected peak width when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
    /// Half-width of the delay axis, s; defaults to twice the interferometer delay plus margin.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Sweep {
    /// Interferometer phase with analyzers at 45° and 135°.
    #[default]
    Phase,
    /// Bob's half-wave-plate dial; polarization rotates by twice the dial angle.
    Hwp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FringeSettings {
    pub sweep: Sweep,
    pub points: usize,
    /// Two-photon interference visibility of the generated state.
    pub visibility: f64,
    /// Alice's half-wave-plate dial for the `hwp` sweep, rad.
    pub alice_hwp: f64,
    /// Table whose first two columns give nominal and realized phases (e.g. `lock_sweep.dat`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases_from: Option<PathBuf>,
}

impl Default for FringeSettings {
    fn default() -> Self {
        Self {
            sweep: Sweep::Phase,
            points: 16,
            visibility: 1.0,
            alice_hwp: PI / 8.0,
            phases_from: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BellSettings {
    /// Werner visibility of the analyzed state.
    pub visibility: f64,
}

impl Default for BellSettings {
    fn default() -> Self {
        Self { visibility: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetpointName {
    #[default]
    Zero,
    Pi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LockSettings {
    pub duration: f64,
    pub dt: f64,
    pub record_interval: f64,
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub dither_amplitude: f64,
    pub dither_frequency: f64,
    pub demod_time_constant: f64,
    pub setpoint: SetpointName,
    pub dphi_dt: f64,
    pub temperature_ramp: f64,
    pub temperature_diffusion: f64,
    pub pzt_range: f64,
    pub pzt_response_time: f64,
    pub sweep_start: f64,
    pub sweep_stop: f64,
    pub sweep_points: usize,
    pub sweep_dwell: f64,
    pub settle_tolerance: f64,
}

impl Default for LockSettings {
    fn default() -> Self {
        let plant = PhasePlant::default();
        let lock = LockConfig::default();
        let sim = SimulationSettings::default();
        Self {
            duration: sim.duration,
            dt: sim.dt,
            record_interval: sim.record_interval,
            kp: lock.kp,
            ki: lock.ki,
            kd: lock.kd,
            dither_amplitude: lock.dither_amplitude,
            dither_frequency: lock.dither_frequency,
            demod_time_constant: lock.demod_time_constant,
            setpoint: SetpointName::Zero,
            dphi_dt: plant.dphi_dt,
            temperature_ramp: plant.temperature_ramp,
            temperature_diffusion: plant.temperature_diffusion,
            pzt_range: plant.pzt_range,
            pzt_response_time: plant.pzt_response_time,
            sweep_start: -PI,
            sweep_stop: 2.5 * PI,
            sweep_points: 32,
            sweep_dwell: 20e-3,
            settle_tolerance: PI / 100.0,
        }
    }
}

impl LockSettings {
    pub fn plant(&self) -> PhasePlant {
        PhasePlant {
            phi_r0: 0.0,
            dphi_dt: self.dphi_dt,
            temperature_diffusion: self.temperature_diffusion,
            temperature_ramp: self.temperature_ramp,
            pzt_range: self.pzt_range,
            pzt_response_time: self.pzt_response_time,
        }
    }

    pub fn lock(&self) -> LockConfig {
        LockConfig {
            dither_amplitude: self.dither_amplitude,
            dither_frequency: self.dither_frequency,
            demod_time_constant: self.demod_time_constant,
            kp: self.kp,
            ki: self.ki,
            kd: self.kd,
            setpoint: match self.setpoint {
                SetpointName::Zero => Setpoint::Zero,
                SetpointName::Pi => Setpoint::Pi,
            },
            phi_e_offset: 0.0,
        }
    }

    pub fn simulation(&self, seed: u64) -> SimulationSettings {
        SimulationSettings {
            duration: self.duration,
            dt: self.dt,
            seed,
            record_interval: self.record_interval,
        }
    }

    pub fn sweep_targets(&self) -> Vec<f64> {
        let n = self.sweep_points;
        if n == 1 {
            return vec![self.sweep_start];
        }
        (0..n)
            .map(|k| {
                self.sweep_start + (self.sweep_stop - self.sweep_start) * k as f64 / (n - 1) as f64
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSettings {
    /// Pump laser linewidth, Hz.
    pub laser_linewidth: f64,
    /// Required factor for each `>>` in the timescale ordering.
    pub margin: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            laser_linewidth: 150e3,
            margin: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    pub filter: FilterPreset,
    pub detector: DetectorPreset,
    /// mW
    pub pump_power: f64,
    /// Interferometer phase, rad.
    pub phase: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Acquisition time per Monte Carlo run, s.
    pub duration: f64,
    /// Interferometer H/V delay, s.
    pub mzi_delay: f64,
    /// Full coincidence window, s; derived from the expected peak width when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coincidence_window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom_filter: Option<CustomFilter>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub custom_detector: Option<CustomDetector>,
    pub spectrum: SpectrumSettings,
    pub histogram: HistogramSettings,
    pub fringe: FringeSettings,
    pub bell: BellSettings,
    pub lock: LockSettings,
    pub check: CheckSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: "default".into(),
            filter: FilterPreset::default(),
            detector: DetectorPreset::default(),
            pump_power: 0.01,
            phase: PI,
            seed: 1,
            output_dir: None,
            duration: 1.0,
            mzi_delay: 76e-9,
            coincidence_window: None,
            custom_filter: None,
            custom_detector: None,
            spectrum: SpectrumSettings::default(),
            histogram: HistogramSettings::default(),
            fringe: FringeSettings::default(),
            bell: BellSettings::default(),
            lock: LockSettings::default(),
            check: CheckSettings::default(),
        }
    }
}

/// Values given on the command line; each `Some` replaces the file value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub filter: Option<FilterPreset>,
    pub detector: Option<DetectorPreset>,
    pub pump_power: Option<f64>,
    pub phase: Option<f64>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub duration: Option<f64>,
    pub coincidence_window: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($($f:ident),*) => {$( if let Some(v) = o.$f.clone() { self.$f = v; } )*};
        }
        set!(filter, detector, pump_power, phase, seed, duration);
        if o.output_dir.is_some() {
            self.output_dir = o.output_dir.clone();
        }
        if o.coincidence_window.is_some() {
            self.coincidence_window = o.coincidence_window;
        }
    }

    pub fn filter_spec(&self) -> Result<FilterSpec, CliError> {
        let spec = match (self.filter, self.custom_filter) {
            (FilterPreset::Dwdm100ghz, None) => FilterSpec::dwdm_100ghz(),
            (FilterPreset::Psfbg540mhz, None) => FilterSpec::psfbg_540mhz(),
            (FilterPreset::Psfbg25mhz, None) => FilterSpec::psfbg_25mhz(),
            (
                FilterPreset::Custom,
                Some(CustomFilter::Lorentzian {
                    center_v,
                    fwhm_v,
                    center_h,
                    fwhm_h,
                }),
            ) => FilterSpec::lorentzian(center_v, fwhm_v, center_h, fwhm_h),
            (
                FilterPreset::Custom,
                Some(CustomFilter::FlatTop {
                    center,
                    fwhm,
                    edge_width,
                }),
            ) => FilterSpec {
                shape: FilterShape::FlatTop { edge_width },
                ..FilterSpec::flat_top(center, fwhm)
            },
            (FilterPreset::Custom, None) => {
                return config_err("filter = \"custom\" needs a [custom_filter] table")
            }
            (_, Some(_)) => {
                return config_err("[custom_filter] is only allowed with filter = \"custom\"")
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn detector_model(&self) -> Result<DetectorModel, CliError> {
        let d = match (self.detector, self.custom_detector) {
            (DetectorPreset::Ingaas, None) => DetectorModel::ingaas(),
            (DetectorPreset::Snspd, None) => DetectorModel::snspd(),
            (DetectorPreset::Custom, Some(c)) => DetectorModel {
                efficiency: c.efficiency,
                jitter_fwhm: c.jitter_fwhm,
                dark_rate: c.dark_rate,
                dead_time: c.dead_time,
            },
            (DetectorPreset::Custom, None) => {
                return config_err("detector = \"custom\" needs a [custom_detector] table")
            }
            (_, Some(_)) => {
                return config_err("[custom_detector] is only allowed with detector = \"custom\"")
            }
        };
        d.validate()?;
        Ok(d)
    }

    pub fn source(&self) -> Result<SourceRunConfig, CliError> {
        let mut s = SourceRunConfig::new(
            self.filter_spec()?,
            self.pump_power,
            self.duration,
            self.seed,
        );
        s.mzi_delay = self.mzi_delay;
        s.mzi_phase = self.phase;
        s.validate()?;
        Ok(s)
    }

    /// Coincidence-peak FWHM expected from the filter and both detector jitters.
    pub fn expected_peak_width(&self) -> Result<f64, CliError> {
        let j = self.detector_model()?.jitter_fwhm;
        Ok(biphoton_temporal_correlation(&self.filter_spec()?, Pol::V, &[j, j])?.fwhm)
    }

    /// Fills every derived default so the result re-ingests to the identical run.
    pub fn resolve(mut self, env_out_dir: Option<&str>) -> Result<Self, CliError> {
        self.validate()?;
        if self.output_dir.is_none() {
            self.output_dir = Some(PathBuf::from(
                env_out_dir
                    .filter(|s| !s.is_empty())
                    .unwrap_or(DEFAULT_OUT_DIR),
            ));
        }
        if self.coincidence_window.is_none() || self.histogram.bin_width.is_none() {
            let w = self.expected_peak_width()?;
            self.coincidence_window.get_or_insert(3.0 * w);
            self.histogram.bin_width.get_or_insert(w / 8.0);
        }
        self.histogram.span.get_or_insert(2.0 * self.mzi_delay);
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.filter_spec()?;
        self.detector_model()?;
        let finite_pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                config_err(format!("{name} must be positive and finite, got {v}"))
            }
        };
        if !(self.pump_power >= 0.0 && self.pump_power.is_finite()) {
            return config_err(format!(
                "pump_power must be non-negative, got {}",
                self.pump_power
            ));
        }
        if !self.phase.is_finite() {
            return config_err("phase must be finite");
        }
        if self.seed > i64::MAX as u64 {
            return config_err("seed must fit in a signed 64-bit integer");
        }
        finite_pos("duration", self.duration)?;
        finite_pos("mzi_delay", self.mzi_delay)?;
        if let Some(w) = self.coincidence_window {
            finite_pos("coincidence_window", w)?;
        }
        if let Some(b) = self.histogram.bin_width {
            finite_pos("histogram.bin_width", b)?;
        }
        if let Some(s) = self.histogram.span {
            finite_pos("histogram.span", s)?;
        }
        if self.spectrum.points == 0 || self.spectrum.temperatures.is_empty() {
            return config_err("spectrum needs at least one point and one temperature");
        }
        if !(self.spectrum.span >= 0.0) {
            return config_err("spectrum.span must be non-negative");
        }
        if self.fringe.points < 5 {
            return config_err("fringe.points must be at least 5 for a sinusoid fit");
        }
        for (name, v) in [
            ("fringe.visibility", self.fringe.visibility),
            ("bell.visibility", self.bell.visibility),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return config_err(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if self.lock.sweep_points == 0 {
            return config_err("lock.sweep_points must be at least 1");
        }
        finite_pos("lock.duration", self.lock.duration)?;
        finite_pos("lock.sweep_dwell", self.lock.sweep_dwell)?;
        finite_pos("lock.settle_tolerance", self.lock.settle_tolerance)?;
        finite_pos("check.margin", self.check.margin)?;
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the serialized configuration.
    pub fn hash(&self) -> Result<String, CliError> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(format!("{digest:x}")[..16].to_string())
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(RunConfig::from_toml("pump = 1.0").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let mut c = RunConfig::from_toml("seed = 5\npump_power = 2.0").unwrap();
        c.apply(&Overrides {
            seed: Some(9),
            ..Overrides::default()
        });
        assert_eq!(c.seed, 9);
        assert_eq!(c.pump_power, 2.0);
    }

    #[test]
    fn env_supplies_output_dir_only_when_unset() {
        let c = RunConfig::default().resolve(Some("/tmp/x")).unwrap();
        assert_eq!(c.out_dir(), PathBuf::from("/tmp/x"));
        let c = RunConfig {
            output_dir: Some("here".into()),
            ..RunConfig::default()
        }
        .resolve(Some("/tmp/x"))
        .unwrap();
        assert_eq!(c.out_dir(), PathBuf::from("here"));
        assert_eq!(
            RunConfig::default().resolve(None).unwrap().out_dir(),
            PathBuf::from(DEFAULT_OUT_DIR)
        );
    }

    #[test]
    fn custom_needs_its_table() {
        let c = RunConfig {
            filter: FilterPreset::Custom,
            ..RunConfig::default()
        };
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        let c = RunConfig::from_toml(
            "filter = \"custom\"\n[custom_filter]\nshape = \"flat_top\"\ncenter = 1.9e14\nfwhm = 1e10\nedge_width = 0.0\n",
        )
        .unwrap();
        assert!(c.validate().is_ok());
        let partial =
            "filter = \"custom\"\n[custom_filter]\nshape = \"lorentzian\"\ncenter_v = 1.9e14\n";
        assert!(RunConfig::from_toml(partial).is_err());
    }
}
