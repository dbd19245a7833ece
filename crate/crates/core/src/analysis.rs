//! Fringe fitting, accidental subtraction and Bell-parameter statistics.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::polarization::chsh_combination;

/// Fit of `y = offset (1 - V cos(2 pi (x - x0) / period))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub offset: f64,
    /// `offset × visibility`
    pub amplitude: f64,
    /// Position of the fringe minimum, same unit as x.
    pub phase: f64,
    pub period: f64,
    pub visibility: f64,
    pub sigma_v: f64,
    pub chi2_reduced: f64,
    pub points: usize,
}

/// Weighted least squares with Poisson weights `1/max(count, 1)` and a fixed period.
pub fn fit_sinusoid(x: &[f64], counts: &[f64], period: f64) -> Result<FringeFit> {
    let variance: Vec<f64> = counts.iter().map(|&c| c.max(1.0)).collect();
    fit_sinusoid_weighted(x, counts, &variance, period)
}

/// Same model with explicit per-point variances (floored at 1).
///
/// Writing the model as `c + p1 cos kx + p2 sin kx` makes it linear in the parameters,
/// so Gauss-Newton from any start lands on the minimum in one step; the normal equations
/// are solved directly and their inverse is the parameter covariance.
pub fn fit_sinusoid_weighted(
    x: &[f64],
    y: &[f64],
    variance: &[f64],
    period: f64,
) -> Result<FringeFit> {
    let n = x.len();
    if y.len() != n || variance.len() != n {
        return Err(Error::Fit(format!(
            "length mismatch: {} x, {} y, {} variances",
            n,
            y.len(),
            variance.len()
        )));
    }
    if n < 5 {
        return Err(Error::Fit(format!("need at least 5 points, got {n}")));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::Fit(format!("period must be positive, got {period}")));
    }
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    if hi - lo < 0.5 * period {
        return Err(Error::Fit(format!(
            "abscissa spans {} but half a period is {}",
            hi - lo,
            0.5 * period
        )));
    }
    if x.iter().chain(y).chain(variance).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite data".into()));
    }
    let k = 2.0 * PI / period;
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for i in 0..n {
        let w = 1.0 / variance[i].max(1.0);
        let (s, c) = (k * x[i]).sin_cos();
        let f = [1.0, c, s];
        for r in 0..3 {
            b[r] += w * f[r] * y[i];
            for q in 0..3 {
                a[r][q] += w * f[r] * f[q];
            }
        }
    }
    let cov = invert3(&a).ok_or_else(|| Error::Fit("singular normal equations".into()))?;
    let p: Vec<f64> = (0..3)
        .map(|r| (0..3).map(|q| cov[r][q] * b[q]).sum())
        .collect();
    let (c0, p1, p2) = (p[0], p[1], p[2]);
    if !(c0 > 0.0) {
        return Err(Error::Fit(format!("fitted offset {c0} is not positive")));
    }

    let amp = p1.hypot(p2);
    let visibility = amp / c0;
    let sigma_v = if amp > 1e-12 * c0 {
        let g = [-visibility / c0, p1 / (c0 * amp), p2 / (c0 * amp)];
        quad_form(&cov, &g).sqrt()
    } else {
        // no defined direction at zero amplitude: use the mean amplitude variance
        (0.5 * (cov[1][1] + cov[2][2])).sqrt() / c0
    };
    let mut phase = (-p2).atan2(-p1) / k;
    if phase < 0.0 {
        phase += period;
    }

    let chi2: f64 = (0..n)
        .map(|i| {
            let (s, c) = (k * x[i]).sin_cos();
            let r = y[i] - (c0 + p1 * c + p2 * s);
            r * r / variance[i].max(1.0)
        })
        .sum();
    let chi2_reduced = if n > 3 {
        chi2 / (n - 3) as f64
    } else {
        f64::NAN
    };
    Ok(FringeFit {
        offset: c0,
        amplitude: amp,
        phase,
        period,
        visibility,
        sigma_v,
        chi2_reduced,
        points: n,
    })
}

fn quad_form(m: &[[f64; 3]; 3], g: &[f64; 3]) -> f64 {
    (0..3)
        .map(|r| (0..3).map(|q| g[r] * m[r][q] * g[q]).sum::<f64>())
        .sum()
}

fn invert3(a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(det.abs() > 1e-12 * scale * scale * scale) {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
            let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
            inv[r][c] = (a[r1][c1] * a[r2][c2] - a[r1][c2] * a[r2][c1]) / det;
        }
    }
    Some(inv)
}

/// Fit of `raw - accidentals`, with the two Poisson variances added per point.
pub fn visibility_net(
    x: &[f64],
    raw: &[f64],
    accidentals: &[f64],
    period: f64,
) -> Result<FringeFit> {
    if raw.len() != accidentals.len() {
        return Err(Error::Fit(
            "raw and accidental counts differ in length".into(),
        ));
    }
    let y: Vec<f64> = raw.iter().zip(accidentals).map(|(r, a)| r - a).collect();
    let var: Vec<f64> = raw.iter().zip(accidentals).map(|(r, a)| r + a).collect();
    fit_sinusoid_weighted(x, &y, &var, period)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellResult {
    pub s: f64,
    pub sigma_s: f64,
    /// `(S - 2) / sigma_S`
    pub n_sigma_violation: f64,
}

impl BellResult {
    pub fn from_s(s: f64, sigma_s: f64) -> Result<Self> {
        if !(sigma_s > 0.0 && sigma_s.is_finite() && s.is_finite()) {
            return Err(Error::Fit(format!(
                "Bell parameter needs a positive finite error, got {sigma_s}"
            )));
        }
        Ok(Self {
            s,
            sigma_s,
            n_sigma_violation: (s - 2.0) / sigma_s,
        })
    }
}

/// S from correlations at `(a,b), (a,b'), (a',b), (a',b')`, errors added in quadrature.
pub fn bell_from_fringes(e: [f64; 4], sigma: [f64; 4]) -> Result<BellResult> {
    let sigma_s = sigma.iter().map(|s| s * s).sum::<f64>().sqrt();
    BellResult::from_s(chsh_combination(e), sigma_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locality {
    Local,
    Nonlocal,
}

/// Two-photon fringes violate a Bell inequality only above `1/sqrt(2)` visibility.
pub fn visibility_threshold_check(visibility: f64) -> Locality {
    if visibility > FRAC_1_SQRT_2 {
        Locality::Nonlocal
    } else {
        Locality::Local
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn grid(n: usize, period: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * period / n as f64).collect()
    }

    #[test]
    fn noiseless_full_visibility() {
        let x = grid(16, 2.0 * PI);
        let y: Vec<f64> = x.iter().map(|&p| 500.0 * (1.0 - p.cos())).collect();
        let f = fit_sinusoid(&x, &y, 2.0 * PI).unwrap();
        assert!((f.visibility - 1.0).abs() < 1e-9);
        assert!(f.phase.abs() < 1e-9 || (f.phase - 2.0 * PI).abs() < 1e-9);
        assert!((f.offset - 500.0).abs() < 1e-9);
        assert!(f.sigma_v > 0.0);
    }

    #[test]
    fn recovers_shifted_phase_with_half_angle_period() {
        let x = grid(12, PI);
        let y: Vec<f64> = x
            .iter()
            .map(|&t| 100.0 * (1.0 - 0.6 * (2.0 * (t - 0.3)).cos()))
            .collect();
        let f = fit_sinusoid(&x, &y, PI).unwrap();
        assert!((f.visibility - 0.6).abs() < 1e-9);
        assert!((f.phase - 0.3).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = grid(4, 2.0 * PI);
        assert!(fit_sinusoid(&x, &[1.0; 4], 2.0 * PI).is_err());
        let narrow: Vec<f64> = (0..8).map(|i| i as f64 * 0.1).collect();
        assert!(matches!(
            fit_sinusoid(&narrow, &[1.0; 8], 2.0 * PI),
            Err(Error::Fit(_))
        ));
        let same = [1.0; 6];
        assert!(fit_sinusoid(&same, &[1.0; 6], 0.5).is_err());
    }

    #[test]
    fn flat_data_zero_visibility() {
        let x = grid(10, 2.0 * PI);
        let f = fit_sinusoid(&x, &[50.0; 10], 2.0 * PI).unwrap();
        assert!(f.visibility < 1e-12);
        assert!(f.sigma_v > 0.0);
    }

    #[test]
    fn bell_examples() {
        let h = FRAC_1_SQRT_2;
        let r = bell_from_fringes([-h, h, -h, -h], [0.01; 4]).unwrap();
        assert!((r.s - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-12);
        let zero = bell_from_fringes([0.0; 4], [0.01; 4]).unwrap();
        assert_eq!(zero.s, 0.0);
        assert!(zero.n_sigma_violation < 0.0);
        assert!((BellResult::from_s(2.82, 0.02).unwrap().n_sigma_violation - 41.0).abs() < 1e-9);
        assert!(BellResult::from_s(2.8, 0.0).is_err());
    }

    #[test]
    fn threshold() {
        assert_eq!(visibility_threshold_check(0.707), Locality::Local);
        assert_eq!(visibility_threshold_check(FRAC_1_SQRT_2), Locality::Local);
        assert_eq!(visibility_threshold_check(0.88), Locality::Nonlocal);
        assert_eq!(visibility_threshold_check(0.5), Locality::Local);
    }
}
