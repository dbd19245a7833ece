//! Fit estimator checked by seeded Monte Carlo and by closed-form dilution.

use std::f64::consts::{PI, SQRT_2};

use pairsim_core::analysis::*;
use pairsim_core::polarization::{correlation, state_with_visibility, ChshSettings};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

fn phases(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 * 2.0 * PI / n as f64).collect()
}

fn sample_fringe(rng: &mut ChaCha8Rng, x: &[f64], mean: f64, v: f64, x0: f64) -> Vec<f64> {
    x.iter()
        .map(|&p| {
            let lambda = mean * (1.0 - v * (p - x0).cos());
            if lambda <= 0.0 {
                0.0
            } else {
                Poisson::new(lambda).unwrap().sample(rng)
            }
        })
        .collect()
}

#[test]
fn planted_visibility_recovered_within_two_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let x = phases(16);
    let mut inside = 0;
    for _ in 0..100 {
        let y = sample_fringe(&mut rng, &x, 500.0, 0.97, 0.4);
        let f = fit_sinusoid(&x, &y, 2.0 * PI).unwrap();
        if (f.visibility - 0.97).abs() < 2.0 * f.sigma_v {
            inside += 1;
        }
    }
    assert!(inside >= 90, "{inside}/100");
}

#[test]
fn chi2_near_one_for_high_visibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = phases(16);
    let chi: Vec<f64> = (0..40)
        .map(|_| {
            fit_sinusoid(&x, &sample_fringe(&mut rng, &x, 500.0, 0.99, 0.0), 2.0 * PI)
                .unwrap()
                .chi2_reduced
        })
        .collect();
    let mean = chi.iter().sum::<f64>() / chi.len() as f64;
    assert!((mean - 1.0).abs() < 0.5, "{mean}");
}

#[test]
fn bias_shrinks_with_counts() {
    let x = phases(16);
    let bias: Vec<f64> = [1e2, 1e3, 1e4]
        .iter()
        .map(|&mean| {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let trials = 200;
            let s: f64 = (0..trials)
                .map(|_| {
                    fit_sinusoid(&x, &sample_fringe(&mut rng, &x, mean, 0.9, 0.0), 2.0 * PI)
                        .unwrap()
                        .visibility
                })
                .sum();
            (s / trials as f64 - 0.9).abs()
        })
        .collect();
    assert!(bias[2] < bias[0], "{bias:?}");
    assert!(bias[2] < 2e-3, "{bias:?}");
}

#[test]
fn doubling_counts_shrinks_sigma_by_sqrt_two() {
    let x = phases(16);
    let y: Vec<f64> = x.iter().map(|&p| 400.0 * (1.0 - 0.9 * p.cos())).collect();
    let y2: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
    let s1 = fit_sinusoid(&x, &y, 2.0 * PI).unwrap().sigma_v;
    let s2 = fit_sinusoid(&x, &y2, 2.0 * PI).unwrap().sigma_v;
    assert!((s2 / s1 * SQRT_2 - 1.0).abs() < 0.1);
}

#[test]
fn zero_accidentals_net_equals_raw() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = phases(12);
    let y = sample_fringe(&mut rng, &x, 200.0, 0.8, 1.0);
    let raw = fit_sinusoid(&x, &y, 2.0 * PI).unwrap();
    let net = visibility_net(&x, &y, &vec![0.0; y.len()], 2.0 * PI).unwrap();
    assert_eq!(raw, net);
}

#[test]
fn flat_floor_dilutes_raw_visibility() {
    let (s, a, v) = (300.0, 40.0, 0.95);
    let x = phases(16);
    let signal: Vec<f64> = x.iter().map(|&p| s * 0.5 * (1.0 - v * p.cos())).collect();
    let raw: Vec<f64> = signal.iter().map(|y| y + a).collect();
    let acc = vec![a; x.len()];
    let raw_fit = fit_sinusoid(&x, &raw, 2.0 * PI).unwrap();
    let net_fit = visibility_net(&x, &raw, &acc, 2.0 * PI).unwrap();
    assert!((net_fit.visibility - v).abs() < 1e-9);
    assert!((raw_fit.visibility - v * s / (s + 2.0 * a)).abs() < 1e-9);
    assert!(net_fit.visibility > raw_fit.visibility);
}

#[test]
fn bell_from_exact_correlations_gives_werner_law() {
    for v in [0.5, 1.0 / SQRT_2, 0.9, 1.0] {
        let rho = state_with_visibility(PI, v).unwrap();
        let e = ChshSettings::standard()
            .pairs()
            .map(|(a, b)| correlation(&rho, a, b));
        let r = bell_from_fringes(e, [0.01; 4]).unwrap();
        assert!((r.s - 2.0 * SQRT_2 * v).abs() < 1e-6);
    }
}
