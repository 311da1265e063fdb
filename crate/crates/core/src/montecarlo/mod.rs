//! Sampling-based estimates of the exact expected distortion, the ergodic
//! capacity and the infinite-diversity distortion bound.
//!
//! Every estimator draws flat Rayleigh channels `H` (`N_r x N_t`, i.i.d.
//! `CN(0,1)` entries, optionally colored on the `N_min` side) and reduces
//! each draw to `ln det(I + (rho/N_t) H H^H)`. The L subchannels are
//! independent and identically distributed, so the L-fold expectation
//! factorizes and only flat draws are needed:
//! `E D_L = P_s [E det(...)^(-2/(L eta))]^L`.

mod stats;
mod streams;

use std::f64::consts::LN_2;

use rand::Rng;

use crate::channel::{build_correlation, CorrelationSpec, SystemConfig};
use crate::error::{Error, Result};
use crate::numerics::{
    cholesky_logdet_unchecked, matrix_sqrt_psd, sample_complex_gaussian, ComplexMatrix,
};

pub use stats::{merge_estimates, Accumulator, McEstimate};
use streams::run_streams;
pub use streams::{splitmix64, SampleSpec};

/// Draws channel realizations for one configuration and correlation model.
///
/// The correlation matrix is `N_min x N_min`; its square root multiplies
/// `H` from the left when `N_r <= N_t` and from the right otherwise.
#[derive(Clone, Debug)]
pub struct ChannelSampler {
    nt: usize,
    nr: usize,
    coloring: Option<ComplexMatrix>,
}

impl ChannelSampler {
    pub fn new(config: &SystemConfig, corr: &CorrelationSpec) -> Result<Self> {
        let coloring = if corr.is_identity() {
            None
        } else {
            let (sigma, _) = build_correlation(corr, config.n_min() as usize)?;
            Some(matrix_sqrt_psd(&sigma)?)
        };
        Ok(ChannelSampler {
            nt: config.nt() as usize,
            nr: config.nr() as usize,
            coloring,
        })
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    /// One `N_r x N_t` channel matrix.
    pub fn draw_channel<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let g = sample_complex_gaussian(rng, self.nr, self.nt);
        match &self.coloring {
            None => g,
            Some(root) if self.nr <= self.nt => root * &g,
            Some(root) => &g * root,
        }
    }

    /// `N_min x N_min` Gram matrix of one draw, sharing the nonzero spectrum
    /// of `H H^H`.
    pub fn draw_gram<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let h = self.draw_channel(rng);
        if self.nr <= self.nt {
            h.gram()
        } else {
            h.adjoint_gram()
        }
    }
}

/// `ln det(I + (rho/N_t) W)` for a Gram matrix `W`.
fn ln_det_gain(gram: &ComplexMatrix, rho: f64, nt: usize) -> Result<f64> {
    if rho == 0.0 {
        return Ok(0.0);
    }
    cholesky_logdet_unchecked(&gram.identity_plus_scaled(rho / nt as f64))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::domain(format!(
            "SNR rho must be finite and non-negative, got {rho}"
        )));
    }
    Ok(())
}

/// Optimum distortion for one realization of the `L` subchannels:
/// `P_s prod_l det(I + (rho/N_t) H_l H_l^H)^(-2/(L eta))`.
pub fn instant_distortion(
    h_list: &[ComplexMatrix],
    config: &SystemConfig,
    rho: f64,
) -> Result<f64> {
    check_rho(rho)?;
    if h_list.len() != config.l() as usize {
        return Err(Error::domain(format!(
            "expected {} subchannel matrices, got {}",
            config.l(),
            h_list.len()
        )));
    }
    let (nt, nr) = (config.nt() as usize, config.nr() as usize);
    let mut total_ln_det = 0.0;
    for h in h_list {
        if h.rows() != nr || h.cols() != nt {
            return Err(Error::domain(format!(
                "subchannel matrix is {}x{}, expected {nr}x{nt}",
                h.rows(),
                h.cols()
            )));
        }
        let gram = if nr <= nt { h.gram() } else { h.adjoint_gram() };
        total_ln_det += ln_det_gain(&gram, rho, nt)?;
    }
    let exponent = 2.0 / config.eta_effective();
    Ok(config.ps() * (-exponent * total_ln_det).exp())
}

/// `E D_L` from an estimate of the flat-channel distortion `E D_1` at the
/// effective SCBR `L eta`: `P_s^(1-L) (E D_1)^L`, evaluated as
/// `P_s (E D_1 / P_s)^L`, with a first-order standard error.
pub fn compose_diversity(single: &McEstimate, ps: f64, l: u32) -> McEstimate {
    let x = single.mean / ps;
    let power = l as i32;
    McEstimate {
        mean: ps * x.powi(power),
        std_error: ps * l as f64 * x.powi(power - 1) * (single.std_error / ps),
        n_samples: single.n_samples,
    }
}

fn pooled(parts: &[Accumulator]) -> Result<McEstimate> {
    merge_estimates(parts)
}

/// Optimum expected distortion `E D_L` at SNR `rho`.
///
/// The per-draw value `v = det(...)^(-2/(L eta))` lies in `(0, 1]`; the mean
/// is `P_s m^L` for the inner sample mean `m`, with standard error
/// `P_s L m^(L-1) se(m)`.
pub fn estimate_eed(
    config: &SystemConfig,
    corr: &CorrelationSpec,
    rho: f64,
    spec: &SampleSpec,
) -> Result<McEstimate> {
    check_rho(rho)?;
    let flat = estimate_flat_eed(&config.at_effective_scbr(), corr, rho, spec)?;
    Ok(compose_diversity(&flat, config.ps(), config.l()))
}

/// `E D_1` for the flat channel (`L` of the configuration is ignored; the
/// exponent uses its `eta` as is).
fn estimate_flat_eed(
    config: &SystemConfig,
    corr: &CorrelationSpec,
    rho: f64,
    spec: &SampleSpec,
) -> Result<McEstimate> {
    let sampler = ChannelSampler::new(config, corr)?;
    let exponent = 2.0 / config.eta();
    let nt = sampler.nt();
    let slots = run_streams(spec, 1, || {
        let sampler = &sampler;
        move |rng: &mut _, out: &mut [f64]| {
            let gram = sampler.draw_gram(rng);
            out[0] = (-exponent * ln_det_gain(&gram, rho, nt)?).exp();
            Ok(())
        }
    })?;
    let inner = pooled(&slots[0])?;
    Ok(McEstimate {
        mean: config.ps() * inner.mean,
        std_error: config.ps() * inner.std_error,
        n_samples: inner.n_samples,
    })
}

/// Ergodic capacity `E log2 det(I + (rho/N_t) H H^H)` in bits per complex
/// channel use (no bandwidth factor).
pub fn estimate_ergodic_capacity(
    config: &SystemConfig,
    corr: &CorrelationSpec,
    rho: f64,
    spec: &SampleSpec,
) -> Result<McEstimate> {
    check_rho(rho)?;
    let sampler = ChannelSampler::new(config, corr)?;
    let nt = sampler.nt();
    let slots = run_streams(spec, 1, || {
        let sampler = &sampler;
        move |rng: &mut _, out: &mut [f64]| {
            let gram = sampler.draw_gram(rng);
            out[0] = ln_det_gain(&gram, rho, nt)? / LN_2;
            Ok(())
        }
    })?;
    pooled(&slots[0])
}

/// Infinite-diversity bound `P_s 2^(-(2/eta) C)` from a capacity estimate.
pub fn bound_from_capacity(capacity: &McEstimate, config: &SystemConfig) -> McEstimate {
    let rate = 2.0 / config.eta();
    let value = config.ps() * (-rate * capacity.mean * LN_2).exp();
    McEstimate {
        mean: value,
        std_error: rate * LN_2 * value * capacity.std_error,
        n_samples: capacity.n_samples,
    }
}

/// `lim_{L->inf} E D_L = P_s 2^(-(2/eta) E log2 det(...))`, estimated.
pub fn infinite_l_bound_mc(
    config: &SystemConfig,
    corr: &CorrelationSpec,
    rho: f64,
    spec: &SampleSpec,
) -> Result<McEstimate> {
    let capacity = estimate_ergodic_capacity(config, corr, rho, spec)?;
    Ok(bound_from_capacity(&capacity, config))
}

/// All Monte Carlo quantities of one SNR point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointEstimates {
    pub rho: f64,
    /// `E D_L` for each requested diversity order, in request order.
    pub eed: Vec<McEstimate>,
    pub capacity: McEstimate,
    pub infinite_bound: McEstimate,
}

/// Estimates every `(rho, L)` combination plus capacity and the
/// infinite-diversity bound from one shared set of channel draws.
///
/// Each entry is bit-identical to the corresponding single-quantity
/// estimator run with the same [`SampleSpec`].
pub fn estimate_grid(
    config: &SystemConfig,
    corr: &CorrelationSpec,
    rhos: &[f64],
    l_values: &[u32],
    spec: &SampleSpec,
) -> Result<Vec<PointEstimates>> {
    for &rho in rhos {
        check_rho(rho)?;
    }
    let configs = l_values
        .iter()
        .map(|&l| config.with_l(l))
        .collect::<Result<Vec<_>>>()?;
    let exponents: Vec<f64> = configs.iter().map(|c| 2.0 / c.eta_effective()).collect();
    let sampler = ChannelSampler::new(config, corr)?;
    let nt = sampler.nt();
    let stride = exponents.len() + 1;
    let slots = run_streams(spec, rhos.len() * stride, || {
        let (sampler, exponents) = (&sampler, &exponents);
        move |rng: &mut _, out: &mut [f64]| {
            let gram = sampler.draw_gram(rng);
            for (i, &rho) in rhos.iter().enumerate() {
                let ln_det = ln_det_gain(&gram, rho, nt)?;
                let row = &mut out[i * stride..(i + 1) * stride];
                for (slot, &e) in row.iter_mut().zip(exponents.iter()) {
                    *slot = (-e * ln_det).exp();
                }
                row[stride - 1] = ln_det / LN_2;
            }
            Ok(())
        }
    })?;

    rhos.iter()
        .enumerate()
        .map(|(i, &rho)| {
            let eed = configs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let inner = pooled(&slots[i * stride + k])?;
                    let flat = McEstimate {
                        mean: c.ps() * inner.mean,
                        std_error: c.ps() * inner.std_error,
                        n_samples: inner.n_samples,
                    };
                    Ok(compose_diversity(&flat, c.ps(), c.l()))
                })
                .collect::<Result<Vec<_>>>()?;
            let capacity = pooled(&slots[i * stride + stride - 1])?;
            Ok(PointEstimates {
                rho,
                eed,
                infinite_bound: bound_from_capacity(&capacity, config),
                capacity,
            })
        })
        .collect()
}
