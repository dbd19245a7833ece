use core::f64::consts::FRAC_1_SQRT_2;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::format;
use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Normalization tolerance shared by all pure-state constructors.
pub const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub const ALL: [Pol; 2] = [Pol::H, Pol::V];

    pub(crate) fn index(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }
}

/// Time bin at the output of the unbalanced interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bin {
    Early,
    Late,
}

impl Bin {
    pub const ALL: [Bin; 2] = [Bin::Early, Bin::Late];

    pub(crate) fn index(self) -> usize {
        match self {
            Bin::Early => 0,
            Bin::Late => 1,
        }
    }
}

/// Single-photon polarization `alpha|H> + beta|V>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinglePhotonPol {
    alpha: Complex64,
    beta: Complex64,
}

impl SinglePhotonPol {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return invalid(format!(
                "single-photon state has squared norm {norm}, expected 1"
            ));
        }
        Ok(Self { alpha, beta })
    }

    pub fn horizontal() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn vertical() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    /// `|D> = (|H> + |V>)/sqrt(2)`
    pub fn diagonal() -> Self {
        Self {
            alpha: Complex64::new(FRAC_1_SQRT_2, 0.0),
            beta: Complex64::new(FRAC_1_SQRT_2, 0.0),
        }
    }

    /// Linear polarization at `angle` from horizontal.
    pub fn linear(angle: f64) -> Self {
        Self {
            alpha: Complex64::new(angle.cos(), 0.0),
            beta: Complex64::new(angle.sin(), 0.0),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn amplitude(&self, pol: Pol) -> Complex64 {
        match pol {
            Pol::H => self.alpha,
            Pol::V => self.beta,
        }
    }
}

/// Two-photon polarization state over the ordered basis `{HH, HV, VH, VV}`.
///
/// The first letter refers to the photon sent to Alice (signal), the second to Bob (idler).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonState {
    amplitudes: [Complex64; 4],
}

pub(crate) fn basis_index(a: Pol, b: Pol) -> usize {
    a.index() * 2 + b.index()
}

impl TwoPhotonState {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return invalid(format!(
                "two-photon state has squared norm {norm}, expected 1"
            ));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary non-zero amplitudes onto the unit sphere.
    pub fn normalized(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(norm.is_finite() && norm > 0.0) {
            return invalid("cannot normalize a zero or non-finite amplitude vector");
        }
        let scale = 1.0 / norm.sqrt();
        Ok(Self {
            amplitudes: amplitudes.map(|a| a * scale),
        })
    }

    pub fn product(a: &SinglePhotonPol, b: &SinglePhotonPol) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 4];
        for pa in Pol::ALL {
            for pb in Pol::ALL {
                amplitudes[basis_index(pa, pb)] = a.amplitude(pa) * b.amplitude(pb);
            }
        }
        Self { amplitudes }
    }

    /// `(|HH> + e^{i phi}|VV>)/sqrt(2)`, the family produced by the source.
    pub fn entangled(phi: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self {
            amplitudes: [
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                z,
                z,
                Complex64::from_polar(FRAC_1_SQRT_2, phi),
            ],
        }
    }

    pub fn phi_plus() -> Self {
        Self::entangled(0.0)
    }

    pub fn phi_minus() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            amplitudes: [h, z, z, -h],
        }
    }

    pub fn psi_plus() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            amplitudes: [z, h, h, z],
        }
    }

    pub fn psi_minus() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            amplitudes: [z, h, -h, z],
        }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }

    pub fn amplitude(&self, a: Pol, b: Pol) -> Complex64 {
        self.amplitudes[basis_index(a, b)]
    }

    /// `<self|other>`
    pub fn inner(&self, other: &TwoPhotonState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Two-photon state tagged with the interferometer output time bin of each photon.
///
/// Amplitudes are indexed by `(pol_s, bin_s, pol_i, bin_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeBinnedTwoPhotonState {
    amplitudes: [Complex64; 16],
    bin_delay: f64,
}

fn binned_index(ps: Pol, bs: Bin, pi: Pol, bi: Bin) -> usize {
    ((ps.index() * 2 + bs.index()) * 2 + pi.index()) * 2 + bi.index()
}

impl TimeBinnedTwoPhotonState {
    pub fn new(amplitudes: [Complex64; 16], bin_delay: f64) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return invalid(format!(
                "time-binned state has squared norm {norm}, expected 1"
            ));
        }
        if !(bin_delay >= 0.0 && bin_delay.is_finite()) {
            return invalid(format!(
                "bin delay must be finite and non-negative, got {bin_delay}"
            ));
        }
        Ok(Self {
            amplitudes,
            bin_delay,
        })
    }

    pub(crate) fn from_parts(amplitudes: [Complex64; 16], bin_delay: f64) -> Self {
        Self {
            amplitudes,
            bin_delay,
        }
    }

    pub fn amplitude(&self, ps: Pol, bs: Bin, pi: Pol, bi: Bin) -> Complex64 {
        self.amplitudes[binned_index(ps, bs, pi, bi)]
    }

    pub(crate) fn amplitude_mut(&mut self, ps: Pol, bs: Bin, pi: Pol, bi: Bin) -> &mut Complex64 {
        &mut self.amplitudes[binned_index(ps, bs, pi, bi)]
    }

    pub fn amplitudes(&self) -> &[Complex64; 16] {
        &self.amplitudes
    }

    pub fn bin_delay(&self) -> f64 {
        self.bin_delay
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// True when every H component sits in the early bin and every V component in the late one.
    pub fn respects_pbs_routing(&self) -> bool {
        let routed = |p: Pol| match p {
            Pol::H => Bin::Early,
            Pol::V => Bin::Late,
        };
        for ps in Pol::ALL {
            for bs in Bin::ALL {
                for pi in Pol::ALL {
                    for bi in Bin::ALL {
                        let a = self.amplitude(ps, bs, pi, bi);
                        if a.norm_sqr() > 0.0 && (bs != routed(ps) || bi != routed(pi)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Relative arrival delay `t_s - t_i` of a component, in units of the bin delay.
    pub fn relative_delay(bs: Bin, bi: Bin) -> i8 {
        bs.index() as i8 - bi.index() as i8
    }
}
