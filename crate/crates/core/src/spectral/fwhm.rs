/// Full width at half maximum of a sampled single-peaked profile on a uniform grid.
///
/// Walks outward from the global maximum to the first samples below half maximum and
/// interpolates linearly between the bracketing samples. Returns `None` when either side
/// never drops below half maximum.
pub fn fwhm(x: &[f64], y: &[f64]) -> Option<f64> {
    let (left, right) = half_max_crossings(x, y)?;
    Some(right - left)
}

/// Left and right half-maximum crossings around the global maximum.
pub fn half_max_crossings(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return None;
    }
    let (peak, &ymax) = y.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    if !(ymax > 0.0) {
        return None;
    }
    let half = 0.5 * ymax;
    let interp = |i: usize, j: usize| {
        // y[i] >= half > y[j]
        let t = (y[i] - half) / (y[i] - y[j]);
        x[i] + t * (x[j] - x[i])
    };
    let mut l = peak;
    while l > 0 && y[l - 1] >= half {
        l -= 1;
    }
    if l == 0 {
        return None;
    }
    let left = interp(l, l - 1);
    let mut r = peak;
    while r + 1 < y.len() && y[r + 1] >= half {
        r += 1;
    }
    if r + 1 == y.len() {
        return None;
    }
    let right = interp(r, r + 1);
    Some((left, right))
}

#[cfg(test)]
mod tests {
    extern crate std;

    use super::*;
    use crate::FWHM_PER_SIGMA;
    use std::vec::Vec;

    #[test]
    fn planted_gaussian_within_half_percent() {
        let sigma = 1.7;
        let x: Vec<f64> = (0..2001).map(|i| -20.0 + i as f64 * 0.02).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| (-0.5 * (v / sigma).powi(2)).exp())
            .collect();
        let w = fwhm(&x, &y).unwrap();
        assert!((w / (FWHM_PER_SIGMA * sigma) - 1.0).abs() < 5e-3);
    }

    #[test]
    fn triangle_is_exact() {
        let x: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 5.0 - (v - 5.0).abs()).collect();
        assert!((fwhm(&x, &y).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn open_profile_has_no_width() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 0.9, 0.8, 0.7];
        assert_eq!(fwhm(&x, &y), None);
    }
}
