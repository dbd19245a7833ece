//! Polarization analyzers, coincidence probabilities and CHSH correlations.

use core::f64::consts::PI;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::format;
use num_complex::Complex64;

use super::density::TwoPhotonDensity;
use super::state::TwoPhotonState;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    Transmitted,
    Reflected,
}

impl Port {
    pub const ALL: [Port; 2] = [Port::Transmitted, Port::Reflected];

    /// +1 for the transmitted port, -1 for the reflected one.
    pub fn sign(self) -> f64 {
        match self {
            Port::Transmitted => 1.0,
            Port::Reflected => -1.0,
        }
    }
}

/// Polarizing analyzer set to a polarization angle (not a half-wave-plate dial angle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzerSetting {
    angle: f64,
    pub port: Port,
}

/// Reduces an angle to `[0, pi)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let mut r = angle % PI;
    if r < 0.0 {
        r += PI;
    }
    if r >= PI {
        r -= PI;
    }
    r
}

impl AnalyzerSetting {
    pub fn new(angle: f64, port: Port) -> Self {
        Self {
            angle: normalize_angle(angle),
            port,
        }
    }

    pub fn transmitted(angle: f64) -> Self {
        Self::new(angle, Port::Transmitted)
    }

    pub fn reflected(angle: f64) -> Self {
        Self::new(angle, Port::Reflected)
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Real Jones vector of the projected polarization.
    pub fn vector(&self) -> [f64; 2] {
        let (s, c) = self.angle.sin_cos();
        match self.port {
            Port::Transmitted => [c, s],
            Port::Reflected => [-s, c],
        }
    }
}

/// Anything that yields two-photon coincidence probabilities.
pub trait PolarizationState {
    /// Probability that Alice's photon exits `a` and Bob's photon exits `b`.
    fn project(&self, a: &AnalyzerSetting, b: &AnalyzerSetting) -> f64;

    fn fidelity_to(&self, target: &TwoPhotonState) -> f64;

    fn to_density(&self) -> TwoPhotonDensity;
}

fn product_vector(a: &AnalyzerSetting, b: &AnalyzerSetting) -> [f64; 4] {
    let va = a.vector();
    let vb = b.vector();
    [va[0] * vb[0], va[0] * vb[1], va[1] * vb[0], va[1] * vb[1]]
}

impl PolarizationState for TwoPhotonState {
    fn project(&self, a: &AnalyzerSetting, b: &AnalyzerSetting) -> f64 {
        let v = product_vector(a, b);
        let amp: Complex64 = v
            .iter()
            .zip(self.amplitudes().iter())
            .map(|(x, psi)| psi * *x)
            .sum();
        amp.norm_sqr()
    }

    fn fidelity_to(&self, target: &TwoPhotonState) -> f64 {
        target.inner(self).norm_sqr()
    }

    fn to_density(&self) -> TwoPhotonDensity {
        TwoPhotonDensity::from_pure(self)
    }
}

impl PolarizationState for TwoPhotonDensity {
    fn project(&self, a: &AnalyzerSetting, b: &AnalyzerSetting) -> f64 {
        let v = product_vector(a, b);
        let rho = self.matrix();
        let mut p = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                p += v[j] * v[k] * rho[j][k].re;
            }
        }
        p
    }

    fn fidelity_to(&self, target: &TwoPhotonState) -> f64 {
        self.expectation(target)
    }

    fn to_density(&self) -> TwoPhotonDensity {
        *self
    }
}

pub fn project<S: PolarizationState + ?Sized>(
    state: &S,
    a: &AnalyzerSetting,
    b: &AnalyzerSetting,
) -> f64 {
    state.project(a, b)
}

/// `P(++) + P(--) - P(+-) - P(-+)` for analyzers at polarization angles `a` and `b`.
pub fn correlation<S: PolarizationState + ?Sized>(state: &S, a: f64, b: f64) -> f64 {
    let mut e = 0.0;
    for pa in Port::ALL {
        for pb in Port::ALL {
            e += pa.sign()
                * pb.sign()
                * state.project(&AnalyzerSetting::new(a, pa), &AnalyzerSetting::new(b, pb));
        }
    }
    e
}

/// The four analyzer angles of a CHSH test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshSettings {
    /// 0, 45, 22.5 and 67.5 degrees; maximal violation for the |HH> ± |VV> family.
    pub fn standard() -> Self {
        Self {
            a: 0.0,
            a_prime: PI / 4.0,
            b: PI / 8.0,
            b_prime: 3.0 * PI / 8.0,
        }
    }

    /// Setting pairs in the order `(a,b), (a,b'), (a',b), (a',b')`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

/// `|E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|`, correlations in [`ChshSettings::pairs`] order.
///
/// This is the largest of the CHSH combinations obtainable by relabeling Alice's outcomes,
/// so it is bounded by 2 for local models and by `2 sqrt(2)` quantum mechanically.
pub fn chsh_combination(e: [f64; 4]) -> f64 {
    (e[0] - e[1]).abs() + (e[2] + e[3]).abs()
}

pub fn chsh_s<S: PolarizationState + ?Sized>(state: &S, settings: &ChshSettings) -> f64 {
    chsh_combination(settings.pairs().map(|(a, b)| correlation(state, a, b)))
}

/// Normalized coincidence rate `(1 - V cos phi)/2` of a phase fringe.
pub fn fringe_rate(phi: f64, visibility: f64) -> Result<f64> {
    check_visibility(visibility)?;
    Ok(0.5 * (1.0 - visibility * phi.cos()))
}

/// Raw double-projection probability `(1 - V cos phi)/4` behind [`fringe_rate`].
///
/// Equals `project(rho, 45°, 135°)` for `rho = V |psi_phi><psi_phi| + (1 - V) I/4`.
pub fn fringe_probability(phi: f64, visibility: f64) -> Result<f64> {
    check_visibility(visibility)?;
    Ok(0.25 * (1.0 - visibility * phi.cos()))
}

fn check_visibility(visibility: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&visibility) {
        return invalid(format!("visibility must lie in [0, 1], got {visibility}"));
    }
    Ok(())
}

/// State with fringe visibility `V` at interferometer phase `phi`.
pub fn state_with_visibility(phi: f64, visibility: f64) -> Result<TwoPhotonDensity> {
    TwoPhotonDensity::werner(&TwoPhotonState::entangled(phi), visibility)
}
