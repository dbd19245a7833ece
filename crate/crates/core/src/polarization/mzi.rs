//! Unbalanced polarizing interferometer and time-bin post-selection.

use num_complex::Complex64;

use super::state::{
    basis_index, Bin, Pol, SinglePhotonPol, TimeBinnedTwoPhotonState, TwoPhotonState,
};
use crate::error::{invalid, Error, Result};

/// Kept norms below this are treated as an empty post-selection.
const EMPTY_SURVIVAL: f64 = 1e-24;

fn route(pol: Pol) -> Bin {
    match pol {
        Pol::H => Bin::Early,
        Pol::V => Bin::Late,
    }
}

/// Sends a (possibly entangled) two-photon state through the interferometer.
///
/// H takes the short arm (early bin); V takes the long arm (late bin) and picks up
/// `e^{i phase_half}` per photon.
pub fn mzi_transform_state(
    input: &TwoPhotonState,
    phase_half: f64,
    bin_delay: f64,
) -> Result<TimeBinnedTwoPhotonState> {
    if !phase_half.is_finite() {
        return invalid("interferometer phase must be finite");
    }
    if !(bin_delay >= 0.0 && bin_delay.is_finite()) {
        return invalid("bin delay must be finite and non-negative");
    }
    let long_arm = Complex64::from_polar(1.0, phase_half);
    let arm = |p: Pol| match p {
        Pol::H => Complex64::new(1.0, 0.0),
        Pol::V => long_arm,
    };
    let mut out = TimeBinnedTwoPhotonState::from_parts([Complex64::new(0.0, 0.0); 16], bin_delay);
    for ps in Pol::ALL {
        for pi in Pol::ALL {
            *out.amplitude_mut(ps, route(ps), pi, route(pi)) =
                input.amplitude(ps, pi) * arm(ps) * arm(pi);
        }
    }
    Ok(out)
}

/// Interferometer transform for a product input `signal ⊗ idler`.
pub fn mzi_transform(
    signal: &SinglePhotonPol,
    idler: &SinglePhotonPol,
    phase_half: f64,
    bin_delay: f64,
) -> Result<TimeBinnedTwoPhotonState> {
    mzi_transform_state(
        &TwoPhotonState::product(signal, idler),
        phase_half,
        bin_delay,
    )
}

/// Keeps the zero-delay components `(e,e)` and `(l,l)`, renormalizes, and returns the
/// kept squared norm as the survival probability.
pub fn postselect_zero_delay(state: &TimeBinnedTwoPhotonState) -> Result<(TwoPhotonState, f64)> {
    let mut kept = [Complex64::new(0.0, 0.0); 4];
    for ps in Pol::ALL {
        for pi in Pol::ALL {
            for bin in Bin::ALL {
                kept[basis_index(ps, pi)] += state.amplitude(ps, bin, pi, bin);
            }
        }
    }
    let survival: f64 = kept.iter().map(|a| a.norm_sqr()).sum();
    if !(survival > EMPTY_SURVIVAL) {
        return Err(Error::EmptyPostSelection(survival));
    }
    let post = TwoPhotonState::normalized(kept)?;
    Ok((post, survival))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimescaleFailure {
    /// Pump coherence time too short for the interferometer delay.
    PumpCoherence,
    /// Interferometer delay too short to separate the time bins.
    BinSeparation,
}

/// Outcome of the `tau_L >> delta_t >> tau_p + tau_d` ordering check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimescaleReport {
    /// `tau_L / delta_t`
    pub coherence_ratio: f64,
    /// `delta_t / (tau_p + tau_d)`
    pub separation_ratio: f64,
    pub margin: f64,
    pub pass: bool,
    pub first_failure: Option<TimescaleFailure>,
}

pub fn check_timescale_ordering(
    pump_coherence: f64,
    bin_delay: f64,
    photon_coherence: f64,
    detector_jitter: f64,
    margin: f64,
) -> TimescaleReport {
    let coherence_ratio = pump_coherence / bin_delay;
    let separation_ratio = bin_delay / (photon_coherence + detector_jitter);
    let first_failure = if !(coherence_ratio >= margin) {
        Some(TimescaleFailure::PumpCoherence)
    } else if !(separation_ratio >= margin) {
        Some(TimescaleFailure::BinSeparation)
    } else {
        None
    };
    TimescaleReport {
        coherence_ratio,
        separation_ratio,
        margin,
        pass: first_failure.is_none(),
        first_failure,
    }
}
