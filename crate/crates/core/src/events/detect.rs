use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};

use super::model::{Channel, DetectionRecord, DetectorModel, TruthTag};
use crate::error::Result;
use crate::FWHM_PER_SIGMA;

/// A photon arriving at a detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    /// s
    pub time: f64,
    pub tag: TruthTag,
    pub pair_id: Option<u64>,
}

/// Detection of one channel: Bernoulli thinning by `transmission × efficiency`, Gaussian
/// timing jitter, dark counts over `[0, duration)` and non-paralyzable dead time.
/// The returned records are sorted by timestamp.
pub fn detect<R: Rng + ?Sized>(
    rng: &mut R,
    arrivals: &[Arrival],
    det: &DetectorModel,
    transmission: f64,
    channel: Channel,
    duration: f64,
) -> Result<Vec<DetectionRecord>> {
    det.validate()?;
    let p = (transmission * det.efficiency).clamp(0.0, 1.0);
    let sigma = det.jitter_fwhm / FWHM_PER_SIGMA;
    let jitter =
        Normal::new(0.0, sigma).map_err(|_| crate::Error::Validation("invalid jitter".into()))?;
    let mut hits = Vec::with_capacity((arrivals.len() as f64 * p) as usize + 16);
    for a in arrivals {
        if rng.random::<f64>() < p {
            let dt = if sigma > 0.0 { jitter.sample(rng) } else { 0.0 };
            hits.push(DetectionRecord {
                timestamp: a.time + dt,
                channel,
                truth_tag: a.tag,
                pair_id: a.pair_id,
            });
        }
    }
    if det.dark_rate > 0.0 {
        let gap = Exp::new(det.dark_rate)
            .map_err(|_| crate::Error::Validation("invalid dark rate".into()))?;
        let mut t = gap.sample(rng);
        while t < duration {
            hits.push(DetectionRecord {
                timestamp: t,
                channel,
                truth_tag: TruthTag::Dark,
                pair_id: None,
            });
            t += gap.sample(rng);
        }
    }
    hits.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    Ok(apply_dead_time(hits, det.dead_time))
}

/// Keeps a hit only if it comes at least `dead_time` after the last kept hit.
pub fn apply_dead_time(sorted: Vec<DetectionRecord>, dead_time: f64) -> Vec<DetectionRecord> {
    if dead_time <= 0.0 {
        return sorted;
    }
    let mut kept: Vec<DetectionRecord> = Vec::with_capacity(sorted.len());
    for r in sorted {
        match kept.last() {
            Some(last) if r.timestamp - last.timestamp < dead_time => {}
            _ => kept.push(r),
        }
    }
    kept
}
