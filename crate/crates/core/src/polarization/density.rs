use alloc::format;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::state::TwoPhotonState;
use crate::error::{invalid, Result};

const TRACE_TOLERANCE: f64 = 1e-12;
const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Smallest eigenvalue accepted as "positive semidefinite".
const MIN_EIGENVALUE: f64 = -1e-10;

pub type Matrix4 = [[Complex64; 4]; 4];

/// Two-photon polarization density matrix over `{HH, HV, VH, VV}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonDensity {
    rho: Matrix4,
}

impl TwoPhotonDensity {
    /// Validates trace, hermiticity and positivity.
    pub fn new(rho: Matrix4) -> Result<Self> {
        let trace: Complex64 = (0..4).map(|k| rho[k][k]).sum();
        if (trace.re - 1.0).abs() > TRACE_TOLERANCE || trace.im.abs() > TRACE_TOLERANCE {
            return invalid(format!("density matrix trace is {trace}, expected 1"));
        }
        for j in 0..4 {
            for k in 0..4 {
                let d = rho[j][k] - rho[k][j].conj();
                if d.norm() > HERMITIAN_TOLERANCE {
                    return invalid(format!("density matrix not Hermitian at ({j},{k})"));
                }
            }
        }
        if !shifted_cholesky_succeeds(&rho, -MIN_EIGENVALUE) {
            return invalid("density matrix has an eigenvalue below -1e-10");
        }
        Ok(Self { rho })
    }

    pub(crate) fn from_matrix_unchecked(rho: Matrix4) -> Self {
        Self { rho }
    }

    pub fn from_pure(state: &TwoPhotonState) -> Self {
        let psi = state.amplitudes();
        let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
        for j in 0..4 {
            for k in 0..4 {
                rho[j][k] = psi[j] * psi[k].conj();
            }
        }
        Self { rho }
    }

    pub fn maximally_mixed() -> Self {
        let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (k, row) in rho.iter_mut().enumerate() {
            row[k] = Complex64::new(0.25, 0.0);
        }
        Self { rho }
    }

    /// `V |bell><bell| + (1 - V) I/4`
    pub fn werner(bell: &TwoPhotonState, visibility: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&visibility) {
            return invalid(format!(
                "Werner visibility must lie in [0, 1], got {visibility}"
            ));
        }
        Ok(Self::from_pure(bell).mix_with(&Self::maximally_mixed(), 1.0 - visibility))
    }

    /// `(1 - weight) self + weight other`
    pub fn mix_with(&self, other: &Self, weight: f64) -> Self {
        let mut rho = self.rho;
        for (j, row) in rho.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = *v * (1.0 - weight) + other.rho[j][k] * weight;
            }
        }
        Self { rho }
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.rho
    }

    pub fn element(&self, j: usize, k: usize) -> Complex64 {
        self.rho[j][k]
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|k| self.rho[k][k].re).sum()
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        let mut p = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                p += (self.rho[j][k] * self.rho[k][j]).re;
            }
        }
        p
    }

    /// `<psi|rho|psi>`
    pub fn expectation(&self, psi: &TwoPhotonState) -> f64 {
        let a = psi.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..4 {
            for k in 0..4 {
                acc += a[j].conj() * self.rho[j][k] * a[k];
            }
        }
        acc.re
    }

    /// Positive semidefinite within the tolerance used by [`TwoPhotonDensity::new`].
    pub fn is_positive_semidefinite(&self) -> bool {
        shifted_cholesky_succeeds(&self.rho, -MIN_EIGENVALUE)
    }
}

/// Attempts a Cholesky factorization of `rho + shift·I`; success means every eigenvalue of
/// `rho` is at least `-shift` (up to roundoff).
fn shifted_cholesky_succeeds(rho: &Matrix4, shift: f64) -> bool {
    let mut a = *rho;
    for (k, row) in a.iter_mut().enumerate() {
        row[k] += Complex64::new(shift + 1e-13, 0.0);
    }
    let mut l = [[Complex64::new(0.0, 0.0); 4]; 4];
    for j in 0..4 {
        let mut d = a[j][j].re;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let djj = d.sqrt();
        l[j][j] = Complex64::new(djj, 0.0);
        for i in (j + 1)..4 {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / djj;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn werner_rejects_out_of_range_visibility() {
        assert!(TwoPhotonDensity::werner(&TwoPhotonState::phi_minus(), 1.2).is_err());
        assert!(TwoPhotonDensity::werner(&TwoPhotonState::phi_minus(), -0.1).is_err());
    }

    #[test]
    fn validation_rejects_negative_eigenvalue() {
        // diag(1.1, -0.1, 0, 0): unit trace, Hermitian, not positive
        let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
        rho[0][0] = Complex64::new(1.1, 0.0);
        rho[1][1] = Complex64::new(-0.1, 0.0);
        assert!(TwoPhotonDensity::new(rho).is_err());
    }

    #[test]
    fn validation_accepts_rank_one_projector() {
        let rho = *TwoPhotonDensity::from_pure(&TwoPhotonState::phi_minus()).matrix();
        assert!(TwoPhotonDensity::new(rho).is_ok());
    }

    #[test]
    fn validation_rejects_non_hermitian() {
        let mut rho = *TwoPhotonDensity::maximally_mixed().matrix();
        rho[0][3] = Complex64::new(0.0, 0.1);
        assert!(TwoPhotonDensity::new(rho).is_err());
    }

    #[test]
    fn purity_of_mixed_and_pure() {
        assert!((TwoPhotonDensity::maximally_mixed().purity() - 0.25).abs() < 1e-15);
        let pure = TwoPhotonDensity::from_pure(&TwoPhotonState::entangled(0.3));
        assert!((pure.purity() - 1.0).abs() < 1e-14);
    }
}
