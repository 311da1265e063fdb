use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive arguments.
///
/// Lanczos approximation (g = 7, nine terms); arguments below one half are
/// mapped through the reflection formula.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "ln_gamma requires a finite positive argument, got {x}"
        )));
    }
    Ok(ln_gamma_positive(x))
}

fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // Gamma(x) Gamma(1 - x) = pi / sin(pi x), and sin(pi x) > 0 on (0, 1/2)
        return (PI / (PI * x).sin()).ln() - ln_gamma_positive(1.0 - x);
    }
    let x = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)` as an explicit product.
///
/// Works for negative non-integer `a`; fails only when a factor is exactly zero.
pub fn pochhammer(a: f64, n: u32) -> Result<f64> {
    let mut acc = 1.0;
    for k in 0..n {
        let factor = a + k as f64;
        if factor == 0.0 {
            return Err(Error::domain(format!(
                "pochhammer({a}, {n}) crosses a pole at k = {k}"
            )));
        }
        acc *= factor;
    }
    Ok(acc)
}

/// Harmonic number `H_n`, with `H_0 = 0`.
pub fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}
