use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::model::{SourceRunConfig, TruthTag};
use crate::error::{invalid, Result};
use crate::polarization::{Bin, Pol};
use crate::spectral::TemporalCorrelation;

/// Creation times of a homogeneous Poisson process over `[0, duration)`, sorted.
pub fn generate_pair_times<R: Rng + ?Sized>(
    cfg: &SourceRunConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    cfg.check_cap()?;
    let rate = cfg.pair_rate();
    if rate == 0.0 {
        return Ok(Vec::new());
    }
    let gap = Exp::new(rate).map_err(|_| crate::Error::Validation("invalid pair rate".into()))?;
    let mut times = Vec::with_capacity((cfg.expected_pairs() * 1.01 + 16.0) as usize);
    let mut t = gap.sample(rng);
    while t < cfg.duration {
        times.push(t);
        t += gap.sample(rng);
    }
    Ok(times)
}

/// One photon leaving the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedPhoton {
    /// s
    pub time: f64,
    pub pol: Pol,
    pub bin: Bin,
    pub tag: TruthTag,
    pub pair_id: u64,
}

/// Independent polarizing-splitter routing of both photons: H takes the short path,
/// V the long one with `mzi_delay` added. `idler_offset` is the intrinsic delay of the
/// idler relative to the signal.
pub fn route_through_mzi<R: Rng + ?Sized>(
    rng: &mut R,
    pair_id: u64,
    pair_time: f64,
    idler_offset: f64,
    mzi_delay: f64,
) -> [TaggedPhoton; 2] {
    let mut route = |time: f64, tag: TruthTag| {
        let (pol, bin, delay) = if rng.random::<bool>() {
            (Pol::H, Bin::Early, 0.0)
        } else {
            (Pol::V, Bin::Late, mzi_delay)
        };
        TaggedPhoton {
            time: time + delay,
            pol,
            bin,
            tag,
            pair_id,
        }
    };
    let signal = route(pair_time, TruthTag::Signal);
    let idler = route(pair_time + idler_offset, TruthTag::Idler);
    [signal, idler]
}

/// Inverse-CDF sampler for the intrinsic signal–idler delay, built from a zero-jitter
/// coincidence envelope.
#[derive(Debug, Clone)]
pub struct DelaySampler {
    tau: Vec<f64>,
    cdf: Vec<f64>,
}

impl DelaySampler {
    pub fn new(envelope: &TemporalCorrelation) -> Result<Self> {
        Self::from_profile(&envelope.tau, &envelope.profile)
    }

    /// Piecewise-linear density through `(tau, weight)` samples on a uniform grid.
    pub fn from_profile(tau: &[f64], weight: &[f64]) -> Result<Self> {
        if tau.len() != weight.len() || tau.len() < 2 {
            return invalid("delay profile needs at least two matching samples");
        }
        let mut cdf = Vec::with_capacity(tau.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for k in 1..tau.len() {
            acc += 0.5 * (weight[k] + weight[k - 1]) * (tau[k] - tau[k - 1]);
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return invalid("delay profile has no weight");
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        Ok(Self {
            tau: tau.to_vec(),
            cdf,
        })
    }

    /// Point mass at zero delay.
    pub fn zero() -> Self {
        Self {
            tau: alloc::vec![0.0, 0.0],
            cdf: alloc::vec![0.0, 1.0],
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let k = self
            .cdf
            .partition_point(|&c| c < u)
            .clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.tau[k - 1] + t * (self.tau[k] - self.tau[k - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::FilterSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_pump_gives_empty_stream() {
        let cfg = SourceRunConfig::new(FilterSpec::psfbg_25mhz(), 0.0, 1.0, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(generate_pair_times(&cfg, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn event_cap_enforced() {
        let mut cfg = SourceRunConfig::new(FilterSpec::dwdm_100ghz(), 10.0, 1.0, 7);
        cfg.event_cap = 1000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(matches!(
            generate_pair_times(&cfg, &mut rng),
            Err(crate::Error::EventCap { .. })
        ));
    }

    #[test]
    fn delay_sampler_uses_trapezoid_cell_masses() {
        let tau = [-1.0, 0.0, 1.0];
        let s = DelaySampler::from_profile(&tau, &[0.0, 1.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let inside = (0..n).filter(|_| s.sample(&mut rng).abs() < 0.5).count() as f64 / n as f64;
        // the cdf is linear inside each cell, so each half of the grid is sampled uniformly
        assert!((inside - 0.5).abs() < 0.01, "{inside}");
        assert_eq!(DelaySampler::zero().sample(&mut rng), 0.0);
    }

    #[test]
    fn routing_tags_follow_polarization() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for id in 0..100 {
            for p in route_through_mzi(&mut rng, id, 1.0, 0.0, 5.0) {
                match p.pol {
                    Pol::H => assert!(p.bin == Bin::Early && p.time == 1.0),
                    Pol::V => assert!(p.bin == Bin::Late && p.time == 6.0),
                }
            }
        }
    }
}
