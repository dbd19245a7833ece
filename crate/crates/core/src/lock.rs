//! Interferometer phase stabilization: thermal drift, dither and lock-in error
//! extraction, PI(D) control of a piezo stretcher, residual-phase statistics.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};

/// Drift and actuator model of the interferometer phase `phi_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePlant {
    /// Phase at t = 0 before any actuation, rad.
    pub phi_r0: f64,
    /// rad/K
    pub dphi_dt: f64,
    /// Temperature random-walk strength, K/sqrt(s).
    pub temperature_diffusion: f64,
    /// Deterministic temperature slope, K/s.
    pub temperature_ramp: f64,
    /// Full stroke of the piezo, rad.
    pub pzt_range: f64,
    /// First-order lag of the piezo, s.
    pub pzt_response_time: f64,
}

impl Default for PhasePlant {
    fn default() -> Self {
        Self {
            phi_r0: 0.0,
            dphi_dt: 1e3,
            temperature_diffusion: 2e-4,
            temperature_ramp: 5e-4,
            pzt_range: 6.0 * PI,
            pzt_response_time: 1e-3,
        }
    }
}

impl PhasePlant {
    pub fn quiet() -> Self {
        Self {
            temperature_diffusion: 0.0,
            temperature_ramp: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dphi_dt > 0.0) {
            return invalid("dphi_dT must be positive");
        }
        if !(self.temperature_diffusion >= 0.0) || !self.temperature_ramp.is_finite() {
            return invalid("temperature noise must be non-negative and the ramp finite");
        }
        if !(self.pzt_range > 2.0 * PI) {
            return invalid("piezo range must exceed one fringe (2 pi)");
        }
        if !(self.pzt_response_time > 0.0) {
            return invalid("piezo response time must be positive");
        }
        Ok(())
    }
}

/// Which zero of the error signal the loop holds `phi_r + phi_e` at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setpoint {
    /// Dark fringe at the D-port detector.
    Zero,
    /// Bright fringe.
    Pi,
}

impl Setpoint {
    pub fn value(self) -> f64 {
        match self {
            Setpoint::Zero => 0.0,
            Setpoint::Pi => PI,
        }
    }

    /// Slope sign of `sin(psi)` at the setpoint.
    fn sign(self) -> f64 {
        match self {
            Setpoint::Zero => 1.0,
            Setpoint::Pi => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockConfig {
    /// Phase modulation of the reference light, rad.
    pub dither_amplitude: f64,
    /// Hz
    pub dither_frequency: f64,
    /// Each of the two low-pass stages, s.
    pub demod_time_constant: f64,
    pub kp: f64,
    /// 1/s
    pub ki: f64,
    /// s
    pub kd: f64,
    pub setpoint: Setpoint,
    /// Electronic offset added to the measured phase, rad.
    pub phi_e_offset: f64,
}

impl Default for LockConfig {
    fn default() -> Self {
        Self {
            dither_amplitude: 0.3,
            dither_frequency: 50e3,
            demod_time_constant: 100e-6,
            kp: 1.0,
            ki: 2000.0,
            kd: 0.0,
            setpoint: Setpoint::Zero,
            phi_e_offset: 0.0,
        }
    }
}

impl LockConfig {
    pub fn open_loop(self) -> Self {
        Self {
            kp: 0.0,
            ki: 0.0,
            kd: 0.0,
            ..self
        }
    }

    /// Locked value of `phi_r`.
    pub fn target(&self) -> f64 {
        self.setpoint.value() - self.phi_e_offset
    }

    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.dither_amplitude > 0.0 && self.dither_amplitude < 3.8) {
            return invalid("dither amplitude must lie in (0, 3.8) rad so that J1 stays positive");
        }
        if !(self.dither_frequency > 0.0 && self.demod_time_constant > 0.0) {
            return invalid("dither frequency and demodulation time constant must be positive");
        }
        if [self.kp, self.ki, self.kd]
            .iter()
            .any(|g| !(g.is_finite() && *g >= 0.0))
        {
            return invalid("gains must be finite and non-negative");
        }
        let mut warnings = Vec::new();
        if self.dither_frequency * self.demod_time_constant < 5.0 {
            warnings.push(alloc::format!(
                "dither frequency x demodulation time = {:.2} < 5: error signal will carry dither ripple",
                self.dither_frequency * self.demod_time_constant
            ));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSettings {
    /// s
    pub duration: f64,
    /// s
    pub dt: f64,
    pub seed: u64,
    /// Spacing of recorded samples, s.
    pub record_interval: f64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            duration: 2.0,
            dt: 2e-6,
            seed: 1,
            record_interval: 1e-4,
        }
    }
}

/// Intensity at the D-port detector.
pub fn detector_intensity(phi_r: f64, phi_e: f64) -> f64 {
    let s = (0.5 * (phi_r + phi_e)).sin();
    s * s
}

/// Bessel function of the first kind, order one, by its power series.
pub fn bessel_j1(x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h;
    let mut sum = term;
    for m in 1..40 {
        term *= -h * h / (m as f64 * (m + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// First-harmonic demodulator with two cascaded one-pole low-pass stages.
///
/// The output is scaled by `2/J1(d)`, so for a static phase `psi` it settles to `sin(psi)`.
#[derive(Debug, Clone)]
pub struct LockIn {
    omega: f64,
    alpha: f64,
    gain: f64,
    stage: [f64; 2],
}

impl LockIn {
    pub fn new(dither_amplitude: f64, dither_frequency: f64, time_constant: f64, dt: f64) -> Self {
        Self {
            omega: 2.0 * PI * dither_frequency,
            alpha: 1.0 - (-dt / time_constant).exp(),
            gain: 2.0 / bessel_j1(dither_amplitude),
            stage: [0.0; 2],
        }
    }

    /// Starts both filter stages at a settled output.
    pub fn preset(&mut self, output: f64) {
        self.stage = [output / self.gain; 2];
    }

    pub fn update(&mut self, t: f64, intensity: f64) -> f64 {
        let mixed = intensity * (self.omega * t).sin();
        self.stage[0] += self.alpha * (mixed - self.stage[0]);
        self.stage[1] += self.alpha * (self.stage[0] - self.stage[1]);
        self.gain * self.stage[1]
    }
}

/// Settled lock-in output for a static total phase `psi`, by simulating `settle` time
/// constants and averaging over the last dither periods.
pub fn lockin_error(psi: f64, lock: &LockConfig, dt: f64) -> f64 {
    let mut li = LockIn::new(
        lock.dither_amplitude,
        lock.dither_frequency,
        lock.demod_time_constant,
        dt,
    );
    let steps = (20.0 * lock.demod_time_constant / dt).ceil() as usize;
    let period = ((1.0 / (lock.dither_frequency * dt)).round() as usize).max(1);
    let mut acc = 0.0;
    for k in 0..steps + period {
        let t = k as f64 * dt;
        let dither = lock.dither_amplitude * (2.0 * PI * lock.dither_frequency * t).sin();
        let e = li.update(t, detector_intensity(psi + dither, 0.0));
        if k >= steps {
            acc += e;
        }
    }
    acc / period as f64
}

/// One stepped closed-loop simulation whose setpoint can be moved while running.
#[derive(Debug, Clone)]
pub struct LockLoop {
    plant: PhasePlant,
    lock: LockConfig,
    dt: f64,
    t: f64,
    rng: ChaCha8Rng,
    noise: Option<Normal<f64>>,
    temperature: f64,
    lockin: LockIn,
    integral: f64,
    bias: f64,
    pzt: f64,
    /// Electronic offset currently applied (follows its request with the piezo lag).
    phi_e: f64,
    phi_e_request: f64,
    last_error: f64,
    alpha_pzt: f64,
    error: f64,
    command: f64,
    pub unwinds: Vec<f64>,
}

impl LockLoop {
    /// Starts locked: the piezo already sits where `phi_r` equals the target.
    pub fn new(plant: &PhasePlant, lock: &LockConfig, dt: f64, seed: u64) -> Result<Self> {
        plant.validate()?;
        lock.validate()?;
        if !(dt > 0.0 && dt <= 1.0 / (10.0 * lock.dither_frequency) * (1.0 + 1e-12)) {
            return invalid("time step must be positive and at most a tenth of the dither period");
        }
        let noise = if plant.temperature_diffusion > 0.0 {
            Some(
                Normal::new(0.0, plant.temperature_diffusion * dt.sqrt())
                    .map_err(|_| crate::Error::Validation("bad noise".into()))?,
            )
        } else {
            None
        };
        let mut lockin = LockIn::new(
            lock.dither_amplitude,
            lock.dither_frequency,
            lock.demod_time_constant,
            dt,
        );
        lockin.preset(0.0);
        let pzt = lock.target() - plant.phi_r0;
        Ok(Self {
            plant: *plant,
            lock: *lock,
            dt,
            t: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            noise,
            temperature: 0.0,
            lockin,
            integral: 0.0,
            bias: pzt,
            pzt,
            phi_e: lock.phi_e_offset,
            phi_e_request: lock.phi_e_offset,
            last_error: 0.0,
            alpha_pzt: 1.0 - (-dt / plant.pzt_response_time).exp(),
            error: 0.0,
            command: pzt,
            unwinds: Vec::new(),
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn phi_r(&self) -> f64 {
        self.plant.phi_r0 + self.plant.dphi_dt * self.temperature + self.pzt
    }

    /// Temperature excursion since t = 0, K.
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn error(&self) -> f64 {
        self.error
    }

    pub fn command(&self) -> f64 {
        self.command
    }

    /// Locked value of `phi_r` for the requested offset.
    pub fn target(&self) -> f64 {
        self.lock.setpoint.value() - self.phi_e_request
    }

    /// `phi_r - target` wrapped to `(-pi, pi]`.
    pub fn residual(&self) -> f64 {
        wrap(self.phi_r() - self.target())
    }

    /// Moves the lock point. The piezo command is stepped by the same amount (feedforward)
    /// and the electronic offset follows with the piezo lag, so the loop never sees the jump.
    pub fn retarget(&mut self, target: f64) {
        let delta = target - self.target();
        self.phi_e_request -= delta;
        self.bias += delta;
    }

    pub fn step(&mut self) {
        let dt = self.dt;
        self.temperature += self.plant.temperature_ramp * dt;
        if let Some(n) = &self.noise {
            self.temperature += n.sample(&mut self.rng);
        }
        self.phi_e += self.alpha_pzt * (self.phi_e_request - self.phi_e);
        let dither =
            self.lock.dither_amplitude * (2.0 * PI * self.lock.dither_frequency * self.t).sin();
        let intensity = detector_intensity(self.phi_r() + dither, self.phi_e);
        let raw = self.lockin.update(self.t, intensity);
        let e = self.lock.setpoint.sign() * raw;
        self.integral += self.lock.ki * e * dt;
        let derivative = self.lock.kd * (e - self.last_error) / dt;
        self.last_error = e;
        self.error = e;
        let mut u = self.bias - self.lock.kp * e - self.integral - derivative;
        let half = 0.5 * self.plant.pzt_range;
        if u.abs() > half {
            // out of stroke: hop one fringe back
            let hop = 2.0 * PI * u.signum();
            self.bias -= hop;
            u -= hop;
            self.unwinds.push(self.t);
        }
        self.command = u;
        self.pzt += self.alpha_pzt * (u - self.pzt);
        self.t += dt;
    }
}

fn wrap(x: f64) -> f64 {
    let mut y = (x + PI) % (2.0 * PI);
    if y < 0.0 {
        y += 2.0 * PI;
    }
    PI - (2.0 * PI - y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LockRun {
    /// Recorded samples: s, rad, error (rad-equivalent), piezo command (rad).
    pub t: Vec<f64>,
    pub phi_r: Vec<f64>,
    pub error: Vec<f64>,
    pub actuation: Vec<f64>,
    /// Wrapped residual at every step, rad.
    pub residual: Vec<f64>,
    pub residual_rms: f64,
    pub residual_max: f64,
    /// Times at which the piezo ran out of range.
    pub unwinds: Vec<f64>,
    pub warnings: Vec<String>,
    /// Temperature excursion over the run, K.
    pub temperature_change: f64,
}

pub fn run_lock(
    plant: &PhasePlant,
    lock: &LockConfig,
    sim: &SimulationSettings,
) -> Result<LockRun> {
    let warnings = lock.validate()?;
    if !(sim.duration > 0.0 && sim.record_interval > 0.0) {
        return invalid("duration and record interval must be positive");
    }
    let mut lp = LockLoop::new(plant, lock, sim.dt, sim.seed)?;
    let steps = (sim.duration / sim.dt).round() as usize;
    let every = ((sim.record_interval / sim.dt).round() as usize).max(1);
    let mut run = LockRun {
        t: Vec::new(),
        phi_r: Vec::new(),
        error: Vec::new(),
        actuation: Vec::new(),
        residual: Vec::with_capacity(steps),
        residual_rms: 0.0,
        residual_max: 0.0,
        unwinds: Vec::new(),
        warnings,
        temperature_change: 0.0,
    };
    for k in 0..steps {
        if k % every == 0 {
            run.t.push(lp.time());
            run.phi_r.push(lp.phi_r());
            run.error.push(lp.error());
            run.actuation.push(lp.command());
        }
        lp.step();
        run.residual.push(lp.residual());
    }
    run.residual_rms = rms(&run.residual);
    run.residual_max = run.residual.iter().fold(0.0, |m, r| m.max(r.abs()));
    run.unwinds = lp.unwinds.clone();
    run.temperature_change = lp.temperature();
    Ok(run)
}

fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettleReport {
    /// rad
    pub target: f64,
    /// Time after the request from which `|phi_r - target|` stays below the tolerance
    /// for the rest of the dwell; `None` if it never does.
    pub settle_time: Option<f64>,
    /// Residual at the end of the dwell, rad.
    pub final_error: f64,
    /// Unwrapped `phi_r` at the end of the dwell, rad.
    pub final_phase: f64,
}

/// Moves a running loop to `target` and dwells there.
pub fn set_phase(lp: &mut LockLoop, target: f64, dwell: f64, tolerance: f64) -> SettleReport {
    lp.retarget(target);
    let start = lp.time();
    let steps = (dwell / lp.dt).round() as usize;
    let mut settled_since: Option<f64> = if lp.residual().abs() < tolerance {
        Some(start)
    } else {
        None
    };
    for _ in 0..steps {
        lp.step();
        if lp.residual().abs() < tolerance {
            settled_since.get_or_insert(lp.time());
        } else {
            settled_since = None;
        }
    }
    SettleReport {
        target,
        settle_time: settled_since.map(|s| s - start),
        final_error: lp.residual(),
        final_phase: lp.phi_r(),
    }
}

/// Steps a freshly locked loop through `targets`, dwelling `dwell` at each.
pub fn phase_sweep(
    plant: &PhasePlant,
    lock: &LockConfig,
    targets: &[f64],
    dwell: f64,
    tolerance: f64,
    dt: f64,
    seed: u64,
) -> Result<Vec<SettleReport>> {
    let first = targets.first().copied().unwrap_or(lock.target());
    let start = LockConfig {
        phi_e_offset: lock.setpoint.value() - first,
        ..*lock
    };
    let mut lp = LockLoop::new(plant, &start, dt, seed)?;
    Ok(targets
        .iter()
        .map(|&t| set_phase(&mut lp, t, dwell, tolerance))
        .collect())
}

/// Mean of `cos²(delta/2)` over residual samples.
pub fn fidelity_under_lock(residual: &[f64]) -> f64 {
    if residual.is_empty() {
        return 1.0;
    }
    residual
        .iter()
        .map(|d| (0.5 * d).cos().powi(2))
        .sum::<f64>()
        / residual.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intensity_at_fringe_extremes() {
        assert_eq!(detector_intensity(0.0, 0.0), 0.0);
        assert!((detector_intensity(PI, 0.0) - 1.0).abs() < 1e-15);
        assert!((detector_intensity(PI / 4.0, PI / 4.0) - 0.5).abs() < 1e-15);
        for k in 0..1000 {
            let p = -10.0 + k as f64 * 0.02;
            assert!(
                (detector_intensity(p, 0.3) - detector_intensity(p + 2.0 * PI, 0.3)).abs() < 1e-12
            );
        }
    }

    #[test]
    fn bessel_values() {
        assert!((bessel_j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j1(0.3) - 0.148_318_816_273_104_5).abs() < 1e-15);
        assert_eq!(bessel_j1(0.0), 0.0);
    }

    #[test]
    fn wrap_range() {
        for x in [-7.0, -PI, -0.1, 0.0, 3.0, PI, 4.0, 20.0] {
            let w = wrap(x);
            assert!(w > -PI - 1e-12 && w <= PI + 1e-12);
            assert!(((x - w) / (2.0 * PI)).round() * 2.0 * PI - (x - w) < 1e-9);
        }
    }

    #[test]
    fn slow_demodulation_warns() {
        let lock = LockConfig {
            demod_time_constant: 20e-6,
            ..LockConfig::default()
        };
        assert_eq!(lock.validate().unwrap().len(), 1);
        assert!(LockConfig::default().validate().unwrap().is_empty());
    }

    #[test]
    fn fidelity_of_zero_residual() {
        assert_eq!(fidelity_under_lock(&[0.0; 10]), 1.0);
        assert!((fidelity_under_lock(&[PI]) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn coarse_step_rejected() {
        assert!(LockLoop::new(&PhasePlant::default(), &LockConfig::default(), 5e-6, 1).is_err());
    }
}
