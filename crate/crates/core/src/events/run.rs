use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::detect::{detect, Arrival};
use super::model::{Channel, DetectionRecord, DetectorModel, SourceRunConfig};
use super::source::{generate_pair_times, route_through_mzi, DelaySampler, TaggedPhoton};
use crate::error::Result;
use crate::polarization::{project, AnalyzerSetting, Pol, Port, TwoPhotonDensity};
use crate::spectral::biphoton_temporal_correlation;

/// Polarization analyzers in front of the detectors. Each user detects only the
/// transmitted port of an analyzer set to the given polarization angle.
#[derive(Debug, Clone)]
pub struct PolarizationAnalysis {
    /// Post-selected polarization state of same-bin pairs, (signal, idler) ordering.
    pub state: TwoPhotonDensity,
    /// rad
    pub alice_angle: f64,
    /// rad
    pub bob_angle: f64,
}

impl PolarizationAnalysis {
    pub fn new(state: TwoPhotonDensity, alice_angle: f64, bob_angle: f64) -> Self {
        Self {
            state,
            alice_angle,
            bob_angle,
        }
    }

    fn angle(&self, channel: Channel) -> f64 {
        match channel {
            Channel::Alice => self.alice_angle,
            Channel::Bob => self.bob_angle,
        }
    }

    /// Joint port probabilities `[TT, TR, RT, RR]` for photons sent to `(cs, ci)`.
    fn joint(&self, cs: Channel, ci: Channel) -> [f64; 4] {
        let (a, b) = (self.angle(cs), self.angle(ci));
        let mut p = [0.0; 4];
        for (k, (pa, pb)) in [
            (Port::Transmitted, Port::Transmitted),
            (Port::Transmitted, Port::Reflected),
            (Port::Reflected, Port::Transmitted),
            (Port::Reflected, Port::Reflected),
        ]
        .into_iter()
        .enumerate()
        {
            p[k] = project(
                &self.state,
                &AnalyzerSetting::new(a, pa),
                &AnalyzerSetting::new(b, pb),
            );
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub alice: Vec<DetectionRecord>,
    pub bob: Vec<DetectionRecord>,
    pub pairs_emitted: u64,
}

impl RunOutput {
    pub fn channel(&self, channel: Channel) -> &[DetectionRecord] {
        match channel {
            Channel::Alice => &self.alice,
            Channel::Bob => &self.bob,
        }
    }
}

/// Intrinsic-delay sampler for the configured filter (V polarization, no jitter).
pub fn delay_sampler(cfg: &SourceRunConfig) -> Result<DelaySampler> {
    DelaySampler::new(&biphoton_temporal_correlation(&cfg.filter, Pol::V, &[])?)
}

/// Full chain for one seed: emission, interferometer routing, random 50/50 splitting,
/// optional polarization analysis, channel loss and detection.
pub fn simulate_run(
    cfg: &SourceRunConfig,
    detectors: &[DetectorModel; 2],
    analysis: Option<&PolarizationAnalysis>,
) -> Result<RunOutput> {
    let sampler = delay_sampler(cfg)?;
    simulate_run_with_sampler(cfg, detectors, analysis, &sampler)
}

pub fn simulate_run_with_sampler(
    cfg: &SourceRunConfig,
    detectors: &[DetectorModel; 2],
    analysis: Option<&PolarizationAnalysis>,
    sampler: &DelaySampler,
) -> Result<RunOutput> {
    for d in detectors {
        d.validate()?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let times = generate_pair_times(cfg, &mut rng)?;

    let sides = [Channel::Alice, Channel::Bob];
    let tables = analysis.map(|a| {
        let mut t = [[[0.0; 4]; 2]; 2];
        for cs in sides {
            for ci in sides {
                t[cs.index()][ci.index()] = a.joint(cs, ci);
            }
        }
        t
    });

    let mut arrivals: [Vec<Arrival>; 2] = [Vec::new(), Vec::new()];
    for (id, &t) in times.iter().enumerate() {
        let offset = sampler.sample(&mut rng);
        let photons = route_through_mzi(&mut rng, id as u64, t, offset, cfg.mzi_delay);
        let chans = [sides[rng.random_range(0..2)], sides[rng.random_range(0..2)]];
        let pass = match (analysis, &tables) {
            (Some(a), Some(tables)) => analyze(&mut rng, a, tables, &photons, chans),
            _ => [true, true],
        };
        for k in 0..2 {
            if pass[k] {
                let p = &photons[k];
                arrivals[chans[k].index()].push(Arrival {
                    time: p.time,
                    tag: p.tag,
                    pair_id: Some(p.pair_id),
                });
            }
        }
    }

    let mut out = [Vec::new(), Vec::new()];
    for c in sides {
        let i = c.index();
        out[i] = detect(
            &mut rng,
            &arrivals[i],
            &detectors[i],
            cfg.channel_transmission(c),
            c,
            cfg.duration,
        )?;
    }
    let [alice, bob] = out;
    Ok(RunOutput {
        alice,
        bob,
        pairs_emitted: times.len() as u64,
    })
}

fn analyze<R: Rng + ?Sized>(
    rng: &mut R,
    analysis: &PolarizationAnalysis,
    tables: &[[[f64; 4]; 2]; 2],
    photons: &[TaggedPhoton; 2],
    chans: [Channel; 2],
) -> [bool; 2] {
    if photons[0].bin == photons[1].bin {
        let p = &tables[chans[0].index()][chans[1].index()];
        let u: f64 = rng.random::<f64>() * (p[0] + p[1] + p[2] + p[3]);
        let k = if u < p[0] {
            0
        } else if u < p[0] + p[1] {
            1
        } else if u < p[0] + p[1] + p[2] {
            2
        } else {
            3
        };
        [k < 2, k % 2 == 0]
    } else {
        let mut pass = [false; 2];
        for k in 0..2 {
            let (s, c) = analysis.angle(chans[k]).sin_cos();
            let p = match photons[k].pol {
                Pol::H => c * c,
                Pol::V => s * s,
            };
            pass[k] = rng.random::<f64>() < p;
        }
        pass
    }
}
