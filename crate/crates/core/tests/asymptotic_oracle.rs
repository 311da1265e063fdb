//! Two-dimensional quadrature oracle for the flat-channel coefficient with
//! `N_min = 2`.
//!
//! `E det(I + c W)^(-beta)` is integrated against the joint eigenvalue
//! density of the `2 x 2` complex Wishart matrix `W` (identity or
//! semicorrelated), normalized numerically. For large `c` it should match
//! `mu_1 / (P_s N_t^Delta) * (ln c)^p * c^(-Delta)`.

use wideband_eed::asymptotic::{distortion_exponent_1, distortion_factor_1};
use wideband_eed::SystemConfig;

mod common;
use common::wishart2_expectation;

fn check(nt: u32, nr: u32, eta: f64, sigma: [f64; 2], c: f64, rel: f64) {
    let config = SystemConfig::new(nt, nr, 1, eta, 1.0).unwrap();
    let d = nt.abs_diff(nr) as i32;
    let f = distortion_factor_1(&config, &sigma).unwrap();
    let delta = distortion_exponent_1(nt, nr, eta);
    let coeff = f.mu.ln_magnitude() - delta * (nt as f64).ln();
    let oracle = wishart2_expectation(c, config.beta(), d, sigma).ln() + delta * c.ln()
        - f.log_rho_power as f64 * c.ln().ln();
    assert!(
        (oracle - coeff).abs() < rel,
        "{nt}x{nr} beta={} sigma={sigma:?}: oracle ln {oracle} vs closed form ln {coeff}",
        config.beta()
    );
}

#[test]
fn low_regime_uncorrelated_and_correlated() {
    check(4, 2, 0.2, [1.0, 1.0], 1e8, 1e-4);
    check(4, 2, 0.2, [0.6, 1.4], 1e8, 1e-4);
    check(2, 2, 0.4, [0.3, 1.7], 1e8, 1e-4);
}

#[test]
fn high_regime_uncorrelated_and_correlated() {
    // leading correction decays like c^-(dn+1-beta) = c^-0.5 here
    check(4, 2, 0.8, [1.0, 1.0], 1e14, 1e-5);
    check(4, 2, 0.8, [0.6, 1.4], 1e14, 1e-5);
    check(2, 2, 4.0, [0.3, 1.7], 1e14, 1e-5);
}

#[test]
fn moderate_regime_generic_exponents() {
    // 4x2, beta = 4.5: s = 1
    check(4, 2, 2.0 / 4.5, [1.0, 1.0], 1e10, 1e-3);
    check(4, 2, 2.0 / 4.5, [0.6, 1.4], 1e10, 1e-3);
    // 2x2, beta = 1.7: s = 1
    check(2, 2, 2.0 / 1.7, [0.3, 1.7], 1e10, 1e-3);
}

#[test]
fn moderate_regime_vanishing_pochhammer() {
    // 4x2, beta = 4: the correlated factor needs its logarithmic limit
    check(4, 2, 0.5, [1.0, 1.0], 1e10, 1e-3);
    check(4, 2, 0.5, [0.6, 1.4], 1e10, 1e-3);
    check(2, 2, 1.0, [0.3, 1.7], 1e10, 1e-3);
}
