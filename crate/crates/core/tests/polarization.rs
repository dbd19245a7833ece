//! Polarization algebra checked against dense matrix arithmetic built from scratch here.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;
use pairsim_core::polarization::*;
use proptest::prelude::*;

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// 2x2 projector onto `cos t |H> + sin t |V>` (transmitted) or its orthogonal (reflected).
fn single_projector(angle: f64, port: Port) -> [[f64; 2]; 2] {
    let (s, co) = angle.sin_cos();
    let v = match port {
        Port::Transmitted => [co, s],
        Port::Reflected => [-s, co],
    };
    [[v[0] * v[0], v[0] * v[1]], [v[1] * v[0], v[1] * v[1]]]
}

fn kron(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[i * 2 + k][j * 2 + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

/// `Tr(rho Pi)` by plain matrix multiplication.
fn dense_probability(rho: &Matrix4, pi: &[[f64; 4]; 4]) -> f64 {
    let mut tr = C::new(0.0, 0.0);
    for i in 0..4 {
        for k in 0..4 {
            tr += rho[i][k] * pi[k][i];
        }
    }
    tr.re
}

fn dense_correlation(rho: &Matrix4, a: f64, b: f64) -> f64 {
    let mut e = 0.0;
    for pa in [Port::Transmitted, Port::Reflected] {
        for pb in [Port::Transmitted, Port::Reflected] {
            let sign = if pa == pb { 1.0 } else { -1.0 };
            e += sign
                * dense_probability(
                    rho,
                    &kron(&single_projector(a, pa), &single_projector(b, pb)),
                );
        }
    }
    e
}

fn random_state(v: &[f64; 8]) -> TwoPhotonState {
    let amps = [
        C::new(v[0], v[1]),
        C::new(v[2], v[3]),
        C::new(v[4], v[5]),
        C::new(v[6], v[7]),
    ];
    TwoPhotonState::normalized(amps).unwrap()
}

#[test]
fn eq2_reduction_for_diagonal_pairs() {
    let d = SinglePhotonPol::diagonal();
    for k in 0..100 {
        let phi = -PI + 2.0 * PI * (k as f64 + 0.37) / 100.0;
        let out = mzi_transform(&d, &d, phi / 2.0, 76e-9).unwrap();
        let (post, survival) = postselect_zero_delay(&out).unwrap();
        assert!((survival - 0.5).abs() < 1e-12);
        let target = TwoPhotonState::entangled(phi);
        for (a, b) in post.amplitudes().iter().zip(target.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn projection_examples() {
    let hh = TwoPhotonState::product(
        &SinglePhotonPol::horizontal(),
        &SinglePhotonPol::horizontal(),
    );
    assert!(
        (project(
            &hh,
            &AnalyzerSetting::transmitted(0.0),
            &AnalyzerSetting::transmitted(0.0)
        ) - 1.0)
            .abs()
            < 1e-15
    );

    // <45,45|psi> = (1 + e^{i phi})/(2 sqrt 2) so |.|^2 = (1 + cos phi)/4
    for phi in [0.0, 0.3, 1.7, PI, 4.0] {
        let p = project(
            &TwoPhotonState::entangled(phi),
            &AnalyzerSetting::transmitted(FRAC_PI_4),
            &AnalyzerSetting::transmitted(FRAC_PI_4),
        );
        assert!((p - (1.0 + phi.cos()) / 4.0).abs() < 1e-14);
    }
    let p = project(
        &TwoPhotonState::phi_minus(),
        &AnalyzerSetting::transmitted(FRAC_PI_4),
        &AnalyzerSetting::transmitted(FRAC_PI_4),
    );
    assert!(p.abs() < 1e-15);
}

#[test]
fn analyzer_angle_is_normalized() {
    let a = AnalyzerSetting::transmitted(-FRAC_PI_4);
    assert!((a.angle() - 3.0 * FRAC_PI_4).abs() < 1e-15);
    let b = AnalyzerSetting::transmitted(7.0 * PI + 0.1);
    assert!((b.angle() - 0.1).abs() < 1e-12);
    assert!(AnalyzerSetting::transmitted(PI).angle() < PI);
}

#[test]
fn correlation_examples() {
    let phi_minus = TwoPhotonState::phi_minus();
    assert!((correlation(&phi_minus, 0.0, 0.0) - 1.0).abs() < 1e-14);
    for (a, b) in [(0.1, 0.4), (1.0, -0.3), (2.0, 2.5)] {
        assert!((correlation(&phi_minus, a, b) - (2.0 * (a + b)).cos()).abs() < 1e-14);
    }
    let phi_plus = TwoPhotonState::phi_plus();
    assert!((correlation(&phi_plus, PI / 8.0, PI / 8.0) - 1.0).abs() < 1e-14);
    let mixed = TwoPhotonDensity::maximally_mixed();
    for (a, b) in [(0.0, 0.0), (0.3, 1.2), (2.0, 0.1)] {
        assert!(correlation(&mixed, a, b).abs() < 1e-15);
    }
}

#[test]
fn chsh_examples() {
    let s = chsh_s(&TwoPhotonState::phi_minus(), &ChshSettings::standard());
    assert!((s - 2.0 * SQRT_2).abs() < 1e-9);

    let werner = TwoPhotonDensity::werner(&TwoPhotonState::phi_minus(), 1.0 / SQRT_2).unwrap();
    assert!((chsh_s(&werner, &ChshSettings::standard()) - 2.0).abs() < 1e-9);

    let hh = TwoPhotonState::product(
        &SinglePhotonPol::horizontal(),
        &SinglePhotonPol::horizontal(),
    );
    assert!((chsh_s(&hh, &ChshSettings::standard()) - SQRT_2).abs() < 1e-12);

    let mixed = TwoPhotonDensity::maximally_mixed();
    assert!(chsh_s(&mixed, &ChshSettings::standard()).abs() < 1e-12);
}

#[test]
fn fringe_rate_examples() {
    assert!(fringe_rate(0.0, 1.0).unwrap().abs() < 1e-15);
    assert!((fringe_rate(PI / 2.0, 0.37).unwrap() - 0.5).abs() < 1e-15);
    assert!((fringe_rate(PI, 0.97).unwrap() - 0.985).abs() < 1e-12);
    assert!(fringe_rate(0.0, 1.01).is_err());
    assert!(fringe_rate(0.0, -0.01).is_err());
}

#[test]
fn fringe_rate_is_twice_the_cross_analyzer_probability() {
    for &v in &[1.0, 0.9, 0.5] {
        for k in 0..12 {
            let phi = k as f64 * 0.5;
            let rho = state_with_visibility(phi, v).unwrap();
            let p = project(
                &rho,
                &AnalyzerSetting::transmitted(FRAC_PI_4),
                &AnalyzerSetting::transmitted(3.0 * FRAC_PI_4),
            );
            assert!((p - fringe_probability(phi, v).unwrap()).abs() < 1e-14);
            assert!((2.0 * p - fringe_rate(phi, v).unwrap()).abs() < 1e-14);
        }
    }
}

#[test]
fn fidelity_examples() {
    let m = TwoPhotonState::phi_minus();
    assert!((fidelity(&m, &m) - 1.0).abs() < 1e-15);
    assert!(fidelity(&TwoPhotonState::phi_plus(), &m).abs() < 1e-15);
    let near = TwoPhotonState::entangled(PI + 0.1);
    assert!((fidelity(&near, &m) - 0.05f64.cos().powi(2)).abs() < 1e-14);
    assert!((fidelity(&near, &m) - 0.9975).abs() < 1e-4);
}

/// Trapezoid quadrature of the fidelity over a Gaussian-distributed phase error.
fn quadrature_jitter_fidelity(sigma: f64) -> f64 {
    // F(delta) = cos^2(delta/2) for a phase error delta
    let n = 20_000;
    let half = 12.0 * sigma;
    let h = 2.0 * half / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let x = -half + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let g = (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt());
        acc += w * g * (x / 2.0).cos().powi(2);
    }
    acc * h
}

#[test]
fn dephasing_matches_quadrature() {
    let target = TwoPhotonState::phi_minus();
    for sigma in [0.05, 2.0 * PI / 50.0, 0.5, 1.0, 2.0] {
        let f = fidelity(&dephase_by_phase_jitter(&target, sigma).unwrap(), &target);
        let q = quadrature_jitter_fidelity(sigma);
        assert!((f - q).abs() / q < 1e-6, "sigma {sigma}: {f} vs {q}");
    }
    let f = fidelity(&dephase_by_phase_jitter(&target, 40.0).unwrap(), &target);
    assert!((f - 0.5).abs() < 1e-12);
    let q = quadrature_jitter_fidelity(40.0);
    assert!((q - 0.5).abs() < 1e-6);
}

#[test]
fn dephasing_is_monotone_in_sigma() {
    let target = TwoPhotonState::entangled(0.7);
    let mut last = 1.0 + 1e-15;
    for k in 0..60 {
        let sigma = k as f64 * 0.1;
        let f = fidelity(&dephase_by_phase_jitter(&target, sigma).unwrap(), &target);
        assert!(f <= last);
        last = f;
    }
}

#[test]
fn admixture_fidelity_is_affine() {
    let target = TwoPhotonState::phi_minus();
    let rho = TwoPhotonDensity::from_pure(&target);
    let f = |p: f64| fidelity(&admix_accidentals(&rho, p).unwrap(), &target);
    for p in [0.0, 0.1, 0.37, 0.8, 1.0] {
        assert!((f(p) - (1.0 - 0.75 * p)).abs() < 1e-14);
    }
    let mixed = admix_accidentals(&rho, 1.0).unwrap();
    assert!(chsh_s(&mixed, &ChshSettings::standard()).abs() < 1e-12);
}

proptest! {
    #[test]
    fn projections_are_complete(v in prop::array::uniform8(-1.0f64..1.0), a in -PI..PI, b in -PI..PI) {
        prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let psi = random_state(&v);
        let rho = TwoPhotonDensity::from_pure(&psi);
        let mut total = 0.0;
        let mut total_rho = 0.0;
        for pa in [Port::Transmitted, Port::Reflected] {
            for pb in [Port::Transmitted, Port::Reflected] {
                total += project(&psi, &AnalyzerSetting::new(a, pa), &AnalyzerSetting::new(b, pb));
                total_rho += project(&rho, &AnalyzerSetting::new(a, pa), &AnalyzerSetting::new(b, pb));
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!((total_rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projections_match_dense_oracle(v in prop::array::uniform8(-1.0f64..1.0), a in -PI..PI, b in -PI..PI, noise in 0.0f64..1.0) {
        prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let psi = random_state(&v);
        let rho = admix_accidentals(&TwoPhotonDensity::from_pure(&psi), noise).unwrap();
        for pa in [Port::Transmitted, Port::Reflected] {
            for pb in [Port::Transmitted, Port::Reflected] {
                let pi = kron(&single_projector(a, pa), &single_projector(b, pb));
                let want = dense_probability(rho.matrix(), &pi);
                let got = project(&rho, &AnalyzerSetting::new(a, pa), &AnalyzerSetting::new(b, pb));
                prop_assert!((got - want).abs() < 1e-12);
                let pure_want = dense_probability(TwoPhotonDensity::from_pure(&psi).matrix(), &pi);
                let pure_got = project(&psi, &AnalyzerSetting::new(a, pa), &AnalyzerSetting::new(b, pb));
                prop_assert!((pure_got - pure_want).abs() < 1e-12);
            }
        }
        prop_assert!((correlation(&rho, a, b) - dense_correlation(rho.matrix(), a, b)).abs() < 1e-12);
    }

    #[test]
    fn separable_states_respect_the_local_bound(
        ta in 0.0..PI, ca in -PI..PI, tb in 0.0..PI, cb in -PI..PI,
        a in -PI..PI, ap in -PI..PI, b in -PI..PI, bp in -PI..PI,
    ) {
        let sa = SinglePhotonPol::new(c(ta.cos()), C::from_polar(ta.sin(), ca)).unwrap();
        let sb = SinglePhotonPol::new(c(tb.cos()), C::from_polar(tb.sin(), cb)).unwrap();
        let psi = TwoPhotonState::product(&sa, &sb);
        let settings = ChshSettings { a, a_prime: ap, b, b_prime: bp };
        prop_assert!(chsh_s(&psi, &settings) <= 2.0 + 1e-9);
    }

    #[test]
    fn werner_chsh_scales_with_visibility(v in 0.0f64..=1.0) {
        let rho = TwoPhotonDensity::werner(&TwoPhotonState::phi_minus(), v).unwrap();
        prop_assert!((chsh_s(&rho, &ChshSettings::standard()) - 2.0 * SQRT_2 * v).abs() < 1e-9);
    }

    #[test]
    fn density_operations_stay_physical(v in prop::array::uniform8(-1.0f64..1.0), sigma in 0.0f64..5.0, p in 0.0f64..=1.0) {
        prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let psi = random_state(&v);
        let rho = dephase_by_phase_jitter(&psi, sigma).unwrap();
        let rho = admix_accidentals(&rho, p).unwrap();
        prop_assert!(TwoPhotonDensity::new(*rho.matrix()).is_ok());
    }
}
