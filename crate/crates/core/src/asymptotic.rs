//! Closed-form high-SNR expansion of the optimum expected distortion,
//! `E D_L ~ mu * (ln rho)^p * rho^(-delta)`.
//!
//! The flat-channel (`L = 1`) expansion is evaluated at the effective SCBR
//! `L eta`; diversity enters through `mu_L = P_s^(1-L) mu_1^L` and the
//! exponent sum `sum_k min{2/eta, L(2k-1+|N_t-N_r|)}`.
//!
//! All coefficients are carried as [`LogValue`] so that gamma products and
//! powers of `N_t` cannot overflow.

use crate::channel::{build_correlation, classify_beta, CorrelationSpec, RegimeKind, SystemConfig};
use crate::error::{Error, Result};
use crate::numerics::{det_real, harmonic, ln_gamma, pochhammer, LogValue, EULER_GAMMA};

/// Tolerance for treating `beta + 1 - |N_t - N_r|` as an even integer, and
/// for detecting a vanishing Pochhammer symbol in the correlated factor.
pub const PARITY_TOL: f64 = 1e-9;

/// Minimum eigenvalue separation for the correlated moderate factor.
pub const SPECTRUM_GAP_MIN: f64 = 1e-8;

/// `mu * (ln rho)^log_rho_power * rho^(-delta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticEed {
    pub mu: LogValue,
    pub log_rho_power: u32,
    pub delta: f64,
}

impl AsymptoticEed {
    /// Natural log of `mu`.
    pub fn mu_ln(&self) -> f64 {
        self.mu.ln_magnitude()
    }

    /// Natural log of the expansion at `rho`. Needs `rho > 1` when a
    /// `ln rho` factor is present, `rho > 0` otherwise.
    pub fn ln_evaluate(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::domain(format!(
                "asymptotic form needs a positive finite rho, got {rho}"
            )));
        }
        if self.mu.sign() <= 0 {
            return Err(Error::domain("asymptotic coefficient is not positive"));
        }
        let ln_rho = rho.ln();
        let mut out = self.mu.ln_magnitude() - self.delta * ln_rho;
        if self.log_rho_power > 0 {
            if !(ln_rho > 0.0) {
                return Err(Error::domain(format!(
                    "(ln rho)^{} term needs rho > 1, got {rho}",
                    self.log_rho_power
                )));
            }
            out += self.log_rho_power as f64 * ln_rho.ln();
        }
        Ok(out)
    }

    /// The expansion at `rho`; may under- or overflow for extreme inputs.
    pub fn evaluate(&self, rho: f64) -> Result<f64> {
        Ok(self.ln_evaluate(rho)?.exp())
    }
}

/// Flat-channel coefficient `mu_1` and the power of `ln rho` it multiplies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistortionFactor {
    pub mu: LogValue,
    pub log_rho_power: u32,
}

fn gamma_term(x: f64, factor: &str) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Pole {
            factor: factor.to_string(),
            argument: x,
        });
    }
    ln_gamma(x)
}

fn check_dims(m: u32, n: u32) -> Result<()> {
    if m == 0 || n < m {
        return Err(Error::domain(format!("need 1 <= m <= n, got m={m}, n={n}")));
    }
    Ok(())
}

/// Low-SCBR gamma product over `k = 1..=t`.
///
/// The `k = 1` factor is `Gamma(n-m+1) Gamma(beta-n+m-1) / Gamma(beta)`; for
/// `k >= 2` it is
/// `Gamma(k) Gamma(n-m+k) Gamma(beta-n+m-2k+2) Gamma(beta-n+m-2k+1)
///  / (Gamma(beta-k+1) Gamma(beta-n+m-k+1))`.
/// An empty product (`t = 0`) is 1.
pub fn kappa_l(beta: f64, t: u32, m: u32, n: u32) -> Result<LogValue> {
    check_dims(m, n)?;
    if t > m {
        return Err(Error::domain(format!("kappa_l: t={t} exceeds m={m}")));
    }
    let d = n as f64 - m as f64;
    let mut ln = 0.0;
    for k in 1..=t {
        let kf = k as f64;
        if k == 1 {
            ln += gamma_term(d + 1.0, "kappa_l Gamma(n-m+1)")?;
            ln += gamma_term(beta - d - 1.0, "kappa_l Gamma(beta-n+m-1)")?;
            ln -= gamma_term(beta, "kappa_l Gamma(beta)")?;
        } else {
            ln += gamma_term(kf, "kappa_l Gamma(k)")?;
            ln += gamma_term(d + kf, "kappa_l Gamma(n-m+k)")?;
            ln += gamma_term(beta - d - 2.0 * kf + 2.0, "kappa_l Gamma(beta-n+m-2k+2)")?;
            ln += gamma_term(beta - d - 2.0 * kf + 1.0, "kappa_l Gamma(beta-n+m-2k+1)")?;
            ln -= gamma_term(beta - kf + 1.0, "kappa_l Gamma(beta-k+1)")?;
            ln -= gamma_term(beta - d - kf + 1.0, "kappa_l Gamma(beta-n+m-k+1)")?;
        }
    }
    Ok(LogValue::from_ln(ln))
}

/// High-SCBR gamma product `prod_{k=1}^{t} Gamma(k) Gamma(n-m-beta+k)`.
pub fn kappa_h(beta: f64, t: u32, m: u32, n: u32) -> Result<LogValue> {
    check_dims(m, n)?;
    let d = n as f64 - m as f64;
    let mut ln = 0.0;
    for k in 1..=t {
        let kf = k as f64;
        ln += gamma_term(kf, "kappa_h Gamma(k)")?;
        ln += gamma_term(d - beta + kf, "kappa_h Gamma(n-m-beta+k)")?;
    }
    Ok(LogValue::from_ln(ln))
}

/// `sum_{k=1}^{N_min} min{2/eta, L(2k-1+|N_t-N_r|)}`.
///
/// Unsaturated terms are integers and are summed exactly; the saturated ones
/// contribute `2 * count / eta`.
pub fn distortion_exponent(nt: u32, nr: u32, l: u32, eta: f64) -> f64 {
    let m = nt.min(nr) as u64;
    let dn = nt.abs_diff(nr) as u64;
    let l = l as u64;
    let beta = 2.0 / (l as f64 * eta);
    let mut integer_part = 0u64;
    let mut saturated = 0u64;
    for k in 1..=m {
        let step = 2 * k - 1 + dn;
        if step as f64 <= beta {
            integer_part += l * step;
        } else {
            saturated += 1;
        }
    }
    integer_part as f64 + 2.0 * saturated as f64 / eta
}

/// Flat-channel exponent at SCBR `eta_eff`.
pub fn distortion_exponent_1(nt: u32, nr: u32, eta_eff: f64) -> f64 {
    distortion_exponent(nt, nr, 1, eta_eff)
}

fn validate_sigma(sigma: &[f64], m: u32) -> Result<()> {
    if sigma.len() != m as usize {
        return Err(Error::domain(format!(
            "expected {m} correlation eigenvalues, got {}",
            sigma.len()
        )));
    }
    if sigma.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::domain(
            "correlation eigenvalues must be positive and finite",
        ));
    }
    Ok(())
}

fn check_distinct(sigma: &[f64]) -> Result<()> {
    let mut sorted = sigma.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gap = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if gap < SPECTRUM_GAP_MIN {
        return Err(Error::DegenerateSpectrum {
            gap,
            threshold: SPECTRUM_GAP_MIN,
        });
    }
    Ok(())
}

/// `prod_{i<j} (sigma_j - sigma_i)`.
fn vandermonde(sigma: &[f64]) -> LogValue {
    let mut v = LogValue::ONE;
    for j in 0..sigma.len() {
        for i in 0..j {
            v *= LogValue::from_f64(sigma[j] - sigma[i]);
        }
    }
    v
}

/// Determinant of the `N_min x N_min` matrix with entries
/// `sigma_i^(-min{j-1, beta-dn-j})`, `j = 1..=N_min`.
pub fn v3_determinant(sigma: &[f64], beta: f64, dn: u32) -> Result<LogValue> {
    if sigma.is_empty() {
        return Err(Error::domain("v3_determinant: empty spectrum"));
    }
    if sigma.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::domain(
            "correlation eigenvalues must be positive and finite",
        ));
    }
    check_distinct(sigma)?;
    let m = sigma.len();
    let mut entries = Vec::with_capacity(m * m);
    for &s in sigma {
        for j in 1..=m {
            let jf = j as f64;
            entries.push(s.powf(-(jf - 1.0).min(beta - dn as f64 - jf)));
        }
    }
    det_real(&entries, m)
}

/// Ratio of the semicorrelated moderate coefficient to the uncorrelated one:
///
/// `(-1)^(s(s-1)/2) |V3| prod_{k=1}^{m-s} (k)_s / (a_k)_s
///  / (prod_i sigma_i^(dn+1) prod_{i<j} (sigma_j - sigma_i))`
///
/// with `a_k = dn - beta + s + k`. Each `1/(a_k)_s` is folded into column
/// `s+k` of `V3`. When `a_k` sits on `-p` with `0 <= p < s` that column
/// coincides with column `p+1` while `(a_k)_s` vanishes; the pair is replaced
/// by its limit, the column `sigma_i^(-p) ln(sigma_i) / prod_{i != p}(i-p)`.
fn correlation_ratio(sigma: &[f64], beta: f64, dn: u32, s: u32) -> Result<LogValue> {
    let m = sigma.len();
    let s_us = s as usize;
    let mut entries = Vec::with_capacity(m * m);
    for &x in sigma {
        for j in 1..=s_us {
            entries.push(x.powi(-(j as i32 - 1)));
        }
        for k in 1..=(m - s_us) {
            let a = dn as f64 - beta + s as f64 + k as f64;
            let pole = (0..s).find(|&p| (a + p as f64).abs() <= PARITY_TOL);
            let entry = match pole {
                Some(p) => {
                    let denom: f64 = (0..s)
                        .filter(|&i| i != p)
                        .map(|i| i as f64 - p as f64)
                        .product();
                    x.powi(-(p as i32)) * x.ln() / denom
                }
                None => x.powf(a) / pochhammer(a, s)?,
            };
            entries.push(entry);
        }
    }
    let mut ratio = det_real(&entries, m)?;
    if (s * s.saturating_sub(1) / 2) % 2 == 1 {
        ratio = -ratio;
    }
    for k in 1..=(m as u32 - s) {
        ratio *= LogValue::from_f64(pochhammer(k as f64, s)?);
    }
    let sigma_power: f64 = sigma.iter().map(|x| x.ln()).sum::<f64>() * (dn as f64 + 1.0);
    ratio /= LogValue::from_ln(sigma_power);
    ratio /= vandermonde(sigma);
    Ok(ratio)
}

/// `mu_1` for the flat channel at the configuration's effective SCBR
/// `L eta` (so `beta = 2/(L eta)`), given the `N_min` correlation
/// eigenvalues in ascending order.
///
/// In the moderate regime with `beta + 1 - dn` an even integer the
/// expansion carries one `ln rho` factor.
pub fn distortion_factor_1(config: &SystemConfig, sigma: &[f64]) -> Result<DistortionFactor> {
    let (nt, nr) = (config.nt(), config.nr());
    let (m, n, dn) = (config.n_min(), config.n_max(), config.dn());
    validate_sigma(sigma, m)?;
    let beta = config.beta();
    let delta1 = distortion_exponent_1(nt, nr, config.eta_effective());

    let mut base = LogValue::from_f64(config.ps()) * LogValue::from_ln(delta1 * (nt as f64).ln());
    for k in 1..=m {
        base /= LogValue::from_ln(ln_gamma((n - k + 1) as f64)? + ln_gamma((m - k + 1) as f64)?);
    }
    let ln_sigma_sum: f64 = sigma.iter().map(|x| x.ln()).sum();
    let uncorrelated = sigma.iter().all(|&x| x == 1.0);

    let regime = classify_beta(beta, nt, nr);
    let factor = match regime.kind {
        RegimeKind::High => DistortionFactor {
            mu: base * kappa_h(beta, m, m, n)? * LogValue::from_ln(-beta * ln_sigma_sum),
            log_rho_power: 0,
        },
        RegimeKind::Low => DistortionFactor {
            mu: base * kappa_l(beta, m, m, n)? * LogValue::from_ln(-(n as f64) * ln_sigma_sum),
            log_rho_power: 0,
        },
        RegimeKind::Moderate { s } => {
            let q = beta + 1.0 - dn as f64;
            let half = (q / 2.0).round();
            let even = (q - 2.0 * half).abs() <= PARITY_TOL;
            let (s, low_terms, power) = if even {
                let s = half as u32;
                (s, s - 1, 1)
            } else {
                (s, s, 0)
            };
            let mut mu = base
                * kappa_l(beta, low_terms, m, n)?
                * kappa_h(beta - 2.0 * s as f64, m - s, m, n)?;
            if !uncorrelated {
                check_distinct(sigma)?;
                mu *= correlation_ratio(sigma, beta, dn, s)?;
            }
            DistortionFactor {
                mu,
                log_rho_power: power,
            }
        }
    };
    if factor.mu.sign() <= 0 || !factor.mu.ln_magnitude().is_finite() {
        return Err(Error::domain(format!(
            "distortion factor is not a positive finite number (sign {}, ln {})",
            factor.mu.sign(),
            factor.mu.ln_magnitude()
        )));
    }
    Ok(factor)
}

/// High-SNR expansion of `E D_L` for the configuration and correlation.
pub fn extend_to_l(config: &SystemConfig, corr: &CorrelationSpec) -> Result<AsymptoticEed> {
    let (_, sigma) = build_correlation(corr, config.n_min() as usize)?;
    let flat = distortion_factor_1(config, &sigma)?;
    let l = config.l() as i32;
    let mu = LogValue::from_f64(config.ps()).powi(1 - l) * flat.mu.powi(l);
    Ok(AsymptoticEed {
        mu,
        log_rho_power: flat.log_rho_power * config.l(),
        delta: distortion_exponent(config.nt(), config.nr(), config.l(), config.eta()),
    })
}

/// `lim_{L->inf} (Gamma(n - a/L)/Gamma(n))^L = exp(a gamma + a/n - a H_n)`.
pub fn lemma1_limit(n: u32, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("lemma1_limit needs n >= 1"));
    }
    if a == 0.0 || !a.is_finite() {
        return Err(Error::domain(format!(
            "lemma1_limit needs a finite nonzero a, got {a}"
        )));
    }
    Ok((a * EULER_GAMMA + a / n as f64 - a * harmonic(n)).exp())
}

/// Infinite-diversity expansion `mu_inf rho^(-2 N_min/eta)` with
/// `ln mu_inf = ln P_s + (2 N_min/eta) ln N_t + 2 gamma N_min/eta
///  - (2/eta) sum_k H_{dn+k-1} - (2/eta) sum_k ln sigma_k`.
/// The configuration's `L` is ignored.
pub fn infinite_l_asymptotic(config: &SystemConfig, sigma: &[f64]) -> Result<AsymptoticEed> {
    let m = config.n_min();
    validate_sigma(sigma, m)?;
    let dn = config.dn();
    let rate = 2.0 / config.eta();
    let delta = 2.0 * m as f64 / config.eta();
    let harmonic_sum: f64 = (1..=m).map(|k| harmonic(dn + k - 1)).sum();
    let ln_sigma_sum: f64 = sigma.iter().map(|x| x.ln()).sum();
    let ln_mu =
        config.ps().ln() + delta * (config.nt() as f64).ln() + rate * EULER_GAMMA * m as f64
            - rate * harmonic_sum
            - rate * ln_sigma_sum;
    Ok(AsymptoticEed {
        mu: LogValue::from_ln(ln_mu),
        log_rho_power: 0,
        delta,
    })
}

/// `prod_k sigma_k^(-2/(L eta)) Gamma(dn - 2/(L eta) + k) / Gamma(dn + k)`.
///
/// In the high regime `mu_L = P_s N_t^(2 N_min/eta) phi(L)^L`. The
/// configuration's own `L` is ignored in favour of the argument.
pub fn phi(config: &SystemConfig, sigma: &[f64], l: u32) -> Result<f64> {
    let m = config.n_min();
    validate_sigma(sigma, m)?;
    if l == 0 {
        return Err(Error::domain("phi needs L >= 1"));
    }
    let dn = config.dn() as f64;
    let b = 2.0 / (l as f64 * config.eta());
    let mut ln = 0.0;
    for (k, &x) in (1..=m).zip(sigma) {
        let kf = k as f64;
        ln += -b * x.ln() + gamma_term(dn - b + kf, "phi Gamma(dn-2/(L eta)+k)")?
            - ln_gamma(dn + kf)?;
    }
    Ok(ln.exp())
}
