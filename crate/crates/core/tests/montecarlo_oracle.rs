//! Monte Carlo estimates against exact expectations computed by quadrature,
//! and against the closed-form expansion where it is already accurate.

use wideband_eed::asymptotic::extend_to_l;
use wideband_eed::montecarlo::{estimate_eed, estimate_ergodic_capacity};
use wideband_eed::{CorrelationSpec, SampleSpec, SystemConfig};

mod common;
use common::wishart2_expectation;

/// `E (1 + rho x)^(-beta)` for `x ~ Exp(1)`, trapezoid rule in `ln x`.
fn siso_expectation(rho: f64, beta: f64) -> f64 {
    let (lo, hi, h) = (-60.0f64, 5.0f64, 1e-3);
    let n = ((hi - lo) / h) as usize + 1;
    (0..n)
        .map(|i| {
            let x = (lo + i as f64 * h).exp();
            x * (-x).exp() * (1.0 + rho * x).powf(-beta)
        })
        .sum::<f64>()
        * h
}

fn within_sigmas(mean: f64, se: f64, exact: f64, k: f64) -> bool {
    (mean - exact).abs() <= k * se
}

#[test]
fn quadrature_oracle_reproduces_closed_cases() {
    // E (1 + rho x)^-1 = e^(1/rho) E1(1/rho) / rho; at rho = 1: 0.596347362323194
    assert!((siso_expectation(1.0, 1.0) - 0.596_347_362_323_194).abs() < 1e-9);
    // beta = 2: integral of e^-x/(1+x)^2 = 1 - e E1(1)
    assert!(
        (siso_expectation(1.0, 2.0) - (1.0 - std::f64::consts::E * 0.219_383_934_395_520_3)).abs()
            < 1e-9
    );
}

#[test]
fn siso_distortion_matches_exact_expectation() {
    let spec = SampleSpec::new(7, 1_000_000, 16).unwrap();
    for &(eta, rho) in &[(4.0, 1000.0), (1.0, 10.0), (0.5, 3.0)] {
        let config = SystemConfig::new(1, 1, 1, eta, 1.0).unwrap();
        let est = estimate_eed(&config, &CorrelationSpec::Identity, rho, &spec).unwrap();
        let exact = siso_expectation(rho, 2.0 / eta);
        assert!(
            within_sigmas(est.mean, est.std_error, exact, 4.0),
            "eta={eta} rho={rho}: {est:?} vs {exact}"
        );
    }
}

#[test]
fn siso_capacity_matches_exact_value() {
    // E log2(1 + rho x) at rho = 1e6 equals e^(1/rho) E1(1/rho) / ln 2
    let exact = 19.098_842_933_575_371;
    let config = SystemConfig::new(1, 1, 1, 1.0, 1.0).unwrap();
    let spec = SampleSpec::new(11, 1_000_000, 8).unwrap();
    let est = estimate_ergodic_capacity(&config, &CorrelationSpec::Identity, 1e6, &spec).unwrap();
    assert!(
        within_sigmas(est.mean, est.std_error, exact, 4.0),
        "{est:?} vs {exact}"
    );
}

#[test]
fn two_by_n_distortion_matches_wishart_quadrature() {
    // covers both coloring sides (N_r < N_t multiplies from the left,
    // N_r > N_t from the right) and the identity case
    let spec = SampleSpec::new(5, 400_000, 16).unwrap();
    let cases = [
        (4u32, 2u32, 2.0 / 1.5, [0.6, 1.4], 5.0),
        (2, 4, 2.0 / 1.5, [0.6, 1.4], 5.0),
        (2, 2, 1.0, [0.3, 1.7], 20.0),
        (3, 2, 0.5, [1.0, 1.0], 2.0),
    ];
    for (nt, nr, eta, sigma, rho) in cases {
        let config = SystemConfig::new(nt, nr, 1, eta, 1.0).unwrap();
        let corr = if sigma[0] == sigma[1] {
            CorrelationSpec::Identity
        } else {
            CorrelationSpec::ExplicitEigenvalues(sigma.to_vec())
        };
        let est = estimate_eed(&config, &corr, rho, &spec).unwrap();
        let d = nt.abs_diff(nr) as i32;
        let exact = wishart2_expectation(rho / nt as f64, config.beta(), d, sigma);
        assert!(
            within_sigmas(est.mean, est.std_error, exact, 4.0),
            "{nt}x{nr} sigma={sigma:?}: {est:?} vs {exact}"
        );
    }
}

#[test]
fn high_regime_estimates_approach_the_expansion() {
    // 4x2, eta = 0.2, L = 8: beta = 1.25 < 3, leading correction ~ rho^-1.75
    let spec = SampleSpec::new(9, 400_000, 16).unwrap();
    for corr in [CorrelationSpec::Identity, CorrelationSpec::Exponential(0.5)] {
        let config = SystemConfig::new(4, 2, 8, 0.2, 1.0).unwrap();
        let asy = extend_to_l(&config, &corr).unwrap();
        let rho = 1e3;
        let est = estimate_eed(&config, &corr, rho, &spec).unwrap();
        let ratio = est.mean / asy.evaluate(rho).unwrap();
        let tol = 4.0 * est.relative_error() + 0.01;
        assert!(
            (ratio - 1.0).abs() < tol,
            "{corr}: ratio {ratio}, tolerance {tol}"
        );
    }
}
