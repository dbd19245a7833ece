//! Filtered biphoton: pair transmission, temporal envelope and coherence time.
//!
//! With a CW pump the two photons are exactly energy anti-correlated, so a filter placed
//! before the pair is split sees them at mirrored detunings `+d` and `-d`. The joint
//! spectral intensity is `T(c + d) T(c - d)`. For a single-pole (Lorentzian) filter the
//! phases of the two amplitude responses cancel at mirrored detunings, so the joint
//! amplitude is the real square root of the joint intensity for both supported shapes.
//! The temporal envelope is the modulus of its Fourier transform.

use core::f64::consts::{LN_2, PI};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::fft::{fft, ifft};
use super::filter::{FilterShape, FilterSpec};
use super::fwhm::fwhm;
use crate::error::{invalid, Error, Result};
use crate::polarization::Pol;
use crate::FWHM_PER_SIGMA;

/// Half-maximum point of `|sin x / x|`.
const SINC_HALF_WIDTH: f64 = 1.895_494_267_033_981;

/// Minimum number of grid steps across the measured FWHM.
const MIN_STEPS_PER_FWHM: usize = 5;

/// Sampling of the delay axis. The FFT length is the next power of two of
/// `span_factor × points_per_fwhm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationGrid {
    /// Samples per expected FWHM.
    pub points_per_fwhm: f64,
    /// Delay span in units of the expected FWHM.
    pub span_factor: f64,
}

impl Default for CorrelationGrid {
    fn default() -> Self {
        Self {
            points_per_fwhm: 64.0,
            span_factor: 32.0,
        }
    }
}

/// Coincidence envelope on a uniform delay grid centered on zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalCorrelation {
    /// s
    pub tau: Vec<f64>,
    /// Non-negative, unit peak at zero delay.
    pub profile: Vec<f64>,
    /// s
    pub fwhm: f64,
    /// `∫|A(d)|² dd` of the joint amplitude, Hz.
    pub spectral_norm: f64,
    /// `∫|psi(tau)|² dtau` of its transform before jitter, Hz.
    pub temporal_norm: f64,
}

impl TemporalCorrelation {
    pub fn step(&self) -> f64 {
        self.tau[1] - self.tau[0]
    }

    /// Largest `|g(tau) - g(-tau)|` over the grid.
    pub fn asymmetry(&self) -> f64 {
        let n = self.tau.len();
        let mid = n / 2;
        (1..mid)
            .map(|k| (self.profile[mid + k] - self.profile[mid - k]).abs())
            .fold(0.0, f64::max)
    }
}

/// Joint spectral amplitude at mirrored detuning `d` from the filter center for `pol`.
pub fn joint_amplitude(f: &FilterSpec, pol: Pol, detuning: f64) -> f64 {
    (f.transmission_at_detuning(detuning, pol) * f.transmission_at_detuning(-detuning, pol)).sqrt()
}

/// Zero-jitter envelope FWHM predicted in closed form, used to size the grid.
pub fn expected_envelope_fwhm(f: &FilterSpec, pol: Pol) -> f64 {
    let w = f.fwhm(pol);
    match f.shape {
        // |FT of 1/(1 + (2d/w)^2)| = exp(-pi w |tau|)
        FilterShape::Lorentzian => 2.0 * LN_2 / (PI * w),
        FilterShape::FlatTop { .. } => 2.0 * SINC_HALF_WIDTH / (PI * w),
    }
}

pub fn biphoton_temporal_correlation(
    f: &FilterSpec,
    pol: Pol,
    jitter_fwhms: &[f64],
) -> Result<TemporalCorrelation> {
    biphoton_temporal_correlation_with_grid(f, pol, jitter_fwhms, &CorrelationGrid::default())
}

/// Envelope convolved with one Gaussian per detector timing jitter (given as FWHMs).
pub fn biphoton_temporal_correlation_with_grid(
    f: &FilterSpec,
    pol: Pol,
    jitter_fwhms: &[f64],
    grid: &CorrelationGrid,
) -> Result<TemporalCorrelation> {
    f.validate()?;
    if jitter_fwhms.iter().any(|j| !(*j >= 0.0 && j.is_finite())) {
        return invalid("detector jitters must be finite and non-negative");
    }
    if !(grid.points_per_fwhm > 0.0 && grid.span_factor > 0.0) {
        return invalid("grid factors must be positive");
    }
    let core = expected_envelope_fwhm(f, pol);
    let expected = (core * core + jitter_fwhms.iter().map(|j| j * j).sum::<f64>()).sqrt();
    let dt = expected / grid.points_per_fwhm;
    let n = ((grid.span_factor * grid.points_per_fwhm).ceil() as usize)
        .next_power_of_two()
        .max(64);
    let df = 1.0 / (n as f64 * dt);
    let signed = |k: usize| {
        if k < n / 2 {
            k as f64
        } else {
            k as f64 - n as f64
        }
    };

    let mut buf: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(joint_amplitude(f, pol, signed(k) * df), 0.0))
        .collect();
    let spectral_norm = buf.iter().map(|a| a.norm_sqr()).sum::<f64>() * df;
    fft(&mut buf);
    let temporal_norm = buf.iter().map(|a| (a * df).norm_sqr()).sum::<f64>() * dt;
    let mut envelope: Vec<f64> = buf.iter().map(|a| a.norm() * df).collect();

    if !jitter_fwhms.is_empty() {
        let mut spec: Vec<Complex64> = envelope.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft(&mut spec);
        let variance: f64 = jitter_fwhms
            .iter()
            .map(|j| (j / FWHM_PER_SIGMA).powi(2))
            .sum();
        for (k, v) in spec.iter_mut().enumerate() {
            let freq = signed(k) * df;
            *v *= (-2.0 * PI * PI * variance * freq * freq).exp();
        }
        ifft(&mut spec);
        envelope = spec.iter().map(|v| v.re.max(0.0)).collect();
    }

    let mut tau = vec![0.0; n];
    let mut profile = vec![0.0; n];
    for j in 0..n {
        let m = (j + n / 2) % n;
        tau[j] = (j as f64 - (n / 2) as f64) * dt;
        profile[j] = envelope[m];
    }
    let peak = profile[n / 2];
    if !(peak > 0.0) {
        return Err(Error::Resolution {
            steps: 0.0,
            required: MIN_STEPS_PER_FWHM,
        });
    }
    for v in profile.iter_mut() {
        *v /= peak;
    }
    let width = fwhm(&tau, &profile).ok_or(Error::Resolution {
        steps: 0.0,
        required: MIN_STEPS_PER_FWHM,
    })?;
    let steps = width / dt;
    if steps < MIN_STEPS_PER_FWHM as f64 {
        return Err(Error::Resolution {
            steps,
            required: MIN_STEPS_PER_FWHM,
        });
    }
    Ok(TemporalCorrelation {
        tau,
        profile,
        fwhm: width,
        spectral_norm,
        temporal_norm,
    })
}

/// FWHM of the zero-jitter envelope, s.
pub fn coherence_time(f: &FilterSpec, pol: Pol) -> Result<f64> {
    Ok(biphoton_temporal_correlation(f, pol, &[])?.fwhm)
}

/// Extra loss (dB) of the pair relative to one photon: `-10 log10(∫T(c+d)T(c-d) / ∫T(c+d))`.
pub fn pair_vs_single_filter_loss(f: &FilterSpec, pol: Pol) -> Result<f64> {
    f.validate()?;
    // d = s tan(theta) maps the real line onto (-pi/2, pi/2) and flattens Lorentzian tails
    let s = 0.5 * f.fwhm(pol);
    let n = 200_000;
    let h = PI / n as f64;
    let (mut pair, mut single) = (0.0, 0.0);
    for i in 0..n {
        let theta = -0.5 * PI + (i as f64 + 0.5) * h;
        let c = theta.cos();
        let jac = s / (c * c);
        let d = s * theta.tan();
        let t_plus = f.transmission_at_detuning(d, pol);
        let t_minus = f.transmission_at_detuning(-d, pol);
        pair += t_plus * t_minus * jac;
        single += t_plus * jac;
    }
    Ok(-10.0 * (pair / single).log10())
}

/// Pump coherence time under the two common linewidth conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpCoherence {
    /// `1/(pi Δν)`, the Lorentzian-line convention used by default.
    pub lorentzian: f64,
    /// `1/(2 pi Δν)`
    pub angular: f64,
}

pub fn pump_coherence_time(linewidth: f64) -> Result<PumpCoherence> {
    if !(linewidth >= 0.0) {
        return invalid("laser linewidth must be non-negative");
    }
    if linewidth == 0.0 {
        return Ok(PumpCoherence {
            lorentzian: f64::INFINITY,
            angular: f64::INFINITY,
        });
    }
    Ok(PumpCoherence {
        lorentzian: 1.0 / (PI * linewidth),
        angular: 1.0 / (2.0 * PI * linewidth),
    })
}
