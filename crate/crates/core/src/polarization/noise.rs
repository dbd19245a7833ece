use alloc::format;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::density::TwoPhotonDensity;
use super::measurement::PolarizationState;
use super::state::{basis_index, Pol, TwoPhotonState};
use crate::error::{invalid, Result};

pub fn fidelity<S: PolarizationState + ?Sized>(state: &S, target: &TwoPhotonState) -> f64 {
    state.fidelity_to(target)
}

/// Averages the `|VV>` phase over a zero-mean Gaussian of standard deviation `sigma`.
///
/// Every coherence involving `|VV>` is multiplied by `exp(-sigma^2/2)`; populations are
/// untouched.
pub fn dephase_density(rho: &TwoPhotonDensity, sigma: f64) -> Result<TwoPhotonDensity> {
    if !(sigma >= 0.0) {
        return invalid(format!("phase jitter must be non-negative, got {sigma}"));
    }
    let damping = if sigma.is_infinite() {
        0.0
    } else {
        (-0.5 * sigma * sigma).exp()
    };
    let vv = basis_index(Pol::V, Pol::V);
    let mut m = *rho.matrix();
    for k in 0..4 {
        if k != vv {
            m[vv][k] *= damping;
            m[k][vv] *= damping;
        }
    }
    Ok(TwoPhotonDensity::from_matrix_unchecked(m))
}

pub fn dephase_by_phase_jitter(state: &TwoPhotonState, sigma: f64) -> Result<TwoPhotonDensity> {
    dephase_density(&TwoPhotonDensity::from_pure(state), sigma)
}

/// Fidelity of `(|HH> + e^{i phi}|VV>)/sqrt(2)` to itself after Gaussian phase jitter.
pub fn jitter_fidelity(sigma: f64) -> f64 {
    0.5 * (1.0 + (-0.5 * sigma * sigma).exp())
}

/// White-noise admixture `(1 - p) rho + p I/4` standing in for accidental coincidences.
pub fn admix_accidentals(rho: &TwoPhotonDensity, p_acc: f64) -> Result<TwoPhotonDensity> {
    if !(0.0..=1.0).contains(&p_acc) {
        return invalid(format!(
            "accidental fraction must lie in [0, 1], got {p_acc}"
        ));
    }
    Ok(rho.mix_with(&TwoPhotonDensity::maximally_mixed(), p_acc))
}

/// Admixture weight giving a relative Bell-state fidelity drop `drop` (drop = 3p/4).
pub fn admixture_for_fidelity_drop(drop: f64) -> f64 {
    4.0 * drop / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn zero_jitter_leaves_state_unchanged() {
        let psi = TwoPhotonState::entangled(0.4);
        let rho = dephase_by_phase_jitter(&psi, 0.0).unwrap();
        assert_eq!(rho, TwoPhotonDensity::from_pure(&psi));
    }

    #[test]
    fn infinite_jitter_fully_dephases() {
        let psi = TwoPhotonState::phi_minus();
        let rho = dephase_by_phase_jitter(&psi, f64::INFINITY).unwrap();
        assert!((fidelity(&rho, &psi) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn negative_jitter_rejected() {
        assert!(dephase_by_phase_jitter(&TwoPhotonState::phi_minus(), -0.1).is_err());
        assert!(dephase_by_phase_jitter(&TwoPhotonState::phi_minus(), f64::NAN).is_err());
    }

    #[test]
    fn fifty_step_jitter_costs_about_four_tenths_of_a_percent() {
        let sigma = 2.0 * PI / 50.0;
        let psi = TwoPhotonState::phi_minus();
        let f = fidelity(&dephase_by_phase_jitter(&psi, sigma).unwrap(), &psi);
        assert!((f - jitter_fidelity(sigma)).abs() < 1e-14);
        let drop = 1.0 - f;
        assert!(drop > 0.0039 && drop < 0.0040, "drop {drop}");
    }

    #[test]
    fn admixture_endpoints() {
        let rho = TwoPhotonDensity::from_pure(&TwoPhotonState::phi_minus());
        assert_eq!(admix_accidentals(&rho, 0.0).unwrap(), rho);
        let mixed = admix_accidentals(&rho, 1.0).unwrap();
        assert!((mixed.purity() - 0.25).abs() < 1e-15);
        assert!(admix_accidentals(&rho, 1.5).is_err());
    }

    #[test]
    fn one_percent_drop_calibration() {
        let psi = TwoPhotonState::phi_minus();
        let p = admixture_for_fidelity_drop(0.01);
        assert!((p - 0.013_333_333_333_333_334).abs() < 1e-15);
        let f = fidelity(
            &admix_accidentals(&TwoPhotonDensity::from_pure(&psi), p).unwrap(),
            &psi,
        );
        assert!((f - 0.99).abs() < 1e-12);
    }
}
