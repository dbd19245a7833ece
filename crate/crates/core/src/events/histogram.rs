use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::model::DetectionRecord;
use crate::error::{invalid, Result};
use crate::spectral::fwhm;

/// Histogram of `t_alice - t_bob` with uniform bins, one of them centered on zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceHistogram {
    /// s, `counts.len() + 1` entries.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Half-range of accepted differences, s.
    pub window_span: f64,
}

impl CoincidenceHistogram {
    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts with centers in `[lo, hi)`.
    pub fn area(&self, lo: f64, hi: f64) -> u64 {
        self.bin_centers()
            .iter()
            .zip(&self.counts)
            .filter(|(c, _)| **c >= lo && **c < hi)
            .map(|(_, n)| n)
            .sum()
    }
}

/// Bins every Alice–Bob difference within `±span` (rounded out to whole bins).
pub fn histogram_coincidences(
    alice: &[DetectionRecord],
    bob: &[DetectionRecord],
    bin_width: f64,
    span: f64,
) -> Result<CoincidenceHistogram> {
    if !(bin_width > 0.0 && span > 0.0 && span.is_finite()) {
        return invalid("bin width and span must be positive");
    }
    let half_bins = (span / bin_width).round() as usize;
    let nbins = 2 * half_bins + 1;
    let lo = -(half_bins as f64 + 0.5) * bin_width;
    let edges: Vec<f64> = (0..=nbins).map(|k| lo + k as f64 * bin_width).collect();
    let hi = edges[nbins];
    let mut counts = vec![0u64; nbins];
    let mut start = 0;
    for a in alice {
        while start < bob.len() && a.timestamp - bob[start].timestamp >= hi {
            start += 1;
        }
        for b in &bob[start..] {
            let d = a.timestamp - b.timestamp;
            if d < lo {
                break;
            }
            if d < hi {
                let k = ((d - lo) / bin_width) as usize;
                counts[k.min(nbins - 1)] += 1;
            }
        }
    }
    Ok(CoincidenceHistogram {
        bin_edges: edges,
        counts,
        window_span: -lo,
    })
}

/// Coincidences with `|t_a - t_b - offset| <= window/2`: `(all, same pair)`.
pub fn count_coincidences(
    alice: &[DetectionRecord],
    bob: &[DetectionRecord],
    offset: f64,
    window: f64,
) -> (u64, u64) {
    let half = 0.5 * window;
    let (mut all, mut real) = (0, 0);
    let mut start = 0;
    for a in alice {
        let center = a.timestamp - offset;
        while start < bob.len() && bob[start].timestamp < center - half {
            start += 1;
        }
        for b in &bob[start..] {
            if b.timestamp > center + half {
                break;
            }
            all += 1;
            if a.pair_id.is_some() && a.pair_id == b.pair_id {
                real += 1;
            }
        }
    }
    (all, real)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakReport {
    /// Expected position, s.
    pub nominal: f64,
    /// Count-weighted centroid over 1.5 FWHM either side, re-centered from the fullest bin
    /// within half a delay of `nominal`, s.
    pub position: f64,
    /// Counts within half a delay of `nominal`.
    pub area: u64,
    /// s
    pub fwhm: Option<f64>,
}

/// The side, central and side peaks at `-delay`, `0`, `+delay`.
pub fn peak_reports(hist: &CoincidenceHistogram, delay: f64) -> [PeakReport; 3] {
    let centers = hist.bin_centers();
    [-delay, 0.0, delay].map(|nominal| {
        let half = if delay > 0.0 {
            0.5 * delay
        } else {
            hist.window_span
        };
        let idx: Vec<usize> = (0..centers.len())
            .filter(|&k| (centers[k] - nominal).abs() < half)
            .collect();
        let x: Vec<f64> = idx.iter().map(|&k| centers[k]).collect();
        let y: Vec<f64> = idx.iter().map(|&k| hist.counts[k] as f64).collect();
        let area = idx.iter().map(|&k| hist.counts[k]).sum();
        let width = fwhm(&x, &y);
        let position = match idx.iter().copied().max_by_key(|&k| hist.counts[k]) {
            Some(top) if hist.counts[top] > 0 => {
                let reach = 1.5 * width.unwrap_or(0.0).max(hist.bin_width());
                let mut center = centers[top];
                for _ in 0..8 {
                    let near = idx
                        .iter()
                        .filter(|&&k| (centers[k] - center).abs() <= reach);
                    let (m, w) = near.fold((0.0, 0.0), |(m, w), &k| {
                        (
                            m + centers[k] * hist.counts[k] as f64,
                            w + hist.counts[k] as f64,
                        )
                    });
                    center = m / w;
                }
                center
            }
            _ => nominal,
        };
        PeakReport {
            nominal,
            position,
            area,
            fwhm: width,
        }
    })
}

/// Central-to-mean-side area ratio and its Poisson standard error.
pub fn central_to_side_ratio(peaks: &[PeakReport; 3]) -> (f64, f64) {
    let c = peaks[1].area as f64;
    let s = 0.5 * (peaks[0].area + peaks[2].area) as f64;
    let r = c / s;
    // the mean of the sides has variance s/2
    (r, r * (1.0 / c + 0.5 / s).sqrt())
}
