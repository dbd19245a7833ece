use core::f64::consts::FRAC_PI_2;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec::Vec;

use super::histogram::count_coincidences;
use super::model::{derive_seed, DetectorModel, SourceRunConfig};
use super::run::{delay_sampler, simulate_run_with_sampler, PolarizationAnalysis};
use crate::error::Result;
use crate::polarization::{state_with_visibility, ChshSettings, TwoPhotonDensity};

/// Coincidence counts at each scan point; `accidentals` are the coincidences whose two
/// detections do not come from the same pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    /// Scanned abscissa (analyzer angle or interferometer phase), rad.
    pub x: Vec<f64>,
    pub counts: Vec<u64>,
    pub accidentals: Vec<u64>,
    pub pairs_emitted: Vec<u64>,
}

impl FringeScan {
    /// Poisson standard errors of the raw counts.
    pub fn sigma(&self) -> Vec<f64> {
        self.counts.iter().map(|&n| (n as f64).sqrt()).collect()
    }
}

fn point(
    cfg: &SourceRunConfig,
    detectors: &[DetectorModel; 2],
    analysis: &PolarizationAnalysis,
    window: f64,
    index: u64,
    sampler: &super::source::DelaySampler,
) -> Result<(u64, u64, u64)> {
    let mut c = cfg.clone();
    c.rng_seed = derive_seed(cfg.rng_seed, index);
    let run = simulate_run_with_sampler(&c, detectors, Some(analysis), sampler)?;
    let (all, real) = count_coincidences(&run.alice, &run.bob, 0.0, window);
    Ok((all, all - real, run.pairs_emitted))
}

/// Scan of Bob's analyzer angle with Alice fixed; coincidences counted in a window of
/// width `coincidence_window` centered on zero delay.
pub fn fringe_scan_mc(
    cfg: &SourceRunConfig,
    detectors: &[DetectorModel; 2],
    analyzer_a: f64,
    analyzer_b_angles: &[f64],
    state: &TwoPhotonDensity,
    coincidence_window: f64,
) -> Result<FringeScan> {
    let sampler = delay_sampler(cfg)?;
    let mut scan = FringeScan {
        x: analyzer_b_angles.to_vec(),
        counts: Vec::new(),
        accidentals: Vec::new(),
        pairs_emitted: Vec::new(),
    };
    for (i, &b) in analyzer_b_angles.iter().enumerate() {
        let analysis = PolarizationAnalysis::new(*state, analyzer_a, b);
        let (n, acc, pairs) = point(
            cfg,
            detectors,
            &analysis,
            coincidence_window,
            i as u64,
            &sampler,
        )?;
        scan.counts.push(n);
        scan.accidentals.push(acc);
        scan.pairs_emitted.push(pairs);
    }
    Ok(scan)
}

/// Scan of the interferometer phase with analyzers at 45° and 135°, where the
/// coincidence rate follows `(1 - V cos phi)/2`.
pub fn phase_scan_mc(
    cfg: &SourceRunConfig,
    detectors: &[DetectorModel; 2],
    phases: &[f64],
    visibility: f64,
    coincidence_window: f64,
) -> Result<FringeScan> {
    let sampler = delay_sampler(cfg)?;
    let (a, b) = (
        core::f64::consts::FRAC_PI_4,
        3.0 * core::f64::consts::FRAC_PI_4,
    );
    let mut scan = FringeScan {
        x: phases.to_vec(),
        counts: Vec::new(),
        accidentals: Vec::new(),
        pairs_emitted: Vec::new(),
    };
    for (i, &phi) in phases.iter().enumerate() {
        let analysis = PolarizationAnalysis::new(state_with_visibility(phi, visibility)?, a, b);
        let (n, acc, pairs) = point(
            cfg,
            detectors,
            &analysis,
            coincidence_window,
            i as u64,
            &sampler,
        )?;
        scan.counts.push(n);
        scan.accidentals.push(acc);
        scan.pairs_emitted.push(pairs);
    }
    Ok(scan)
}

/// Correlation coefficients from simulated counts at the four CHSH setting pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshCounts {
    /// Per setting pair: counts at `(θa, θb), (θa, θb⊥), (θa⊥, θb), (θa⊥, θb⊥)`.
    pub counts: [[u64; 4]; 4],
    pub accidentals: [[u64; 4]; 4],
    pub e: [f64; 4],
    pub sigma: [f64; 4],
}

/// `E = (N++ + N-- - N+- - N-+)/N` and `sqrt((1 - E²)/N)`.
pub fn correlation_from_counts(n: [u64; 4]) -> (f64, f64) {
    let total = (n[0] + n[1] + n[2] + n[3]) as f64;
    if total == 0.0 {
        return (0.0, 1.0);
    }
    let e = (n[0] as f64 + n[3] as f64 - n[1] as f64 - n[2] as f64) / total;
    (e, ((1.0 - e * e) / total).max(0.0).sqrt().max(1.0 / total))
}

/// Sixteen runs: each setting pair with both analyzers at θ and θ + 90°.
pub fn chsh_mc(
    cfg: &SourceRunConfig,
    detectors: &[DetectorModel; 2],
    state: &TwoPhotonDensity,
    settings: &ChshSettings,
    coincidence_window: f64,
) -> Result<ChshCounts> {
    let sampler = delay_sampler(cfg)?;
    let mut out = ChshCounts {
        counts: [[0; 4]; 4],
        accidentals: [[0; 4]; 4],
        e: [0.0; 4],
        sigma: [0.0; 4],
    };
    for (s, (a, b)) in settings.pairs().into_iter().enumerate() {
        for (k, (da, db)) in [
            (0.0, 0.0),
            (0.0, FRAC_PI_2),
            (FRAC_PI_2, 0.0),
            (FRAC_PI_2, FRAC_PI_2),
        ]
        .into_iter()
        .enumerate()
        {
            let analysis = PolarizationAnalysis::new(*state, a + da, b + db);
            let (n, acc, _) = point(
                cfg,
                detectors,
                &analysis,
                coincidence_window,
                (4 * s + k) as u64,
                &sampler,
            )?;
            out.counts[s][k] = n;
            out.accidentals[s][k] = acc;
        }
        let (e, sigma) = correlation_from_counts(out.counts[s]);
        out.e[s] = e;
        out.sigma[s] = sigma;
    }
    Ok(out)
}
