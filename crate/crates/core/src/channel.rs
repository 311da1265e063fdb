//! System configuration, SCBR regime classification and spatial correlation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, ComplexMatrix};

pub const MAX_ANTENNAS: u32 = 8;
pub const MAX_DIVERSITY: u32 = 1024;

/// Antenna counts, frequency diversity order and source description.
///
/// The SNR is not part of the configuration; it is passed per call.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemConfig {
    nt: u32,
    nr: u32,
    l: u32,
    eta: f64,
    ps: f64,
}

impl SystemConfig {
    pub fn new(nt: u32, nr: u32, l: u32, eta: f64, ps: f64) -> Result<Self> {
        if !(1..=MAX_ANTENNAS).contains(&nt) || !(1..=MAX_ANTENNAS).contains(&nr) {
            return Err(Error::config(format!(
                "antenna counts must lie in [1, {MAX_ANTENNAS}], got nt={nt}, nr={nr}"
            )));
        }
        if !(1..=MAX_DIVERSITY).contains(&l) {
            return Err(Error::config(format!(
                "diversity order must lie in [1, {MAX_DIVERSITY}], got {l}"
            )));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::config(format!(
                "SCBR eta must be positive and finite, got {eta}"
            )));
        }
        if !(ps > 0.0) || !ps.is_finite() {
            return Err(Error::config(format!(
                "source power must be positive and finite, got {ps}"
            )));
        }
        Ok(SystemConfig { nt, nr, l, eta, ps })
    }

    pub fn nt(&self) -> u32 {
        self.nt
    }

    pub fn nr(&self) -> u32 {
        self.nr
    }

    /// Frequency diversity order `L`.
    pub fn l(&self) -> u32 {
        self.l
    }

    /// Source-to-channel bandwidth ratio `W_s / W_c`.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn ps(&self) -> f64 {
        self.ps
    }

    pub fn n_min(&self) -> u32 {
        self.nt.min(self.nr)
    }

    pub fn n_max(&self) -> u32 {
        self.nt.max(self.nr)
    }

    /// `|N_t - N_r|`.
    pub fn dn(&self) -> u32 {
        self.nt.abs_diff(self.nr)
    }

    /// Effective SCBR `L * eta` seen by each subchannel.
    pub fn eta_effective(&self) -> f64 {
        self.l as f64 * self.eta
    }

    /// The regime-classifying quantity `2 / (L eta)`.
    pub fn beta(&self) -> f64 {
        2.0 / self.eta_effective()
    }

    pub fn with_l(&self, l: u32) -> Result<Self> {
        Self::new(self.nt, self.nr, l, self.eta, self.ps)
    }

    /// Flat-channel configuration (`L = 1`) at SCBR `L * eta`.
    pub fn at_effective_scbr(&self) -> Self {
        SystemConfig {
            l: 1,
            eta: self.eta_effective(),
            ..*self
        }
    }
}

/// Spatial correlation on the `N_min` side of the channel.
#[derive(Clone, Debug, PartialEq)]
pub enum CorrelationSpec {
    Identity,
    /// `Sigma_ij = r^|i-j|`, `0 < r < 1`.
    Exponential(f64),
    /// Strictly ascending positive eigenvalues summing to the dimension.
    ExplicitEigenvalues(Vec<f64>),
}

impl CorrelationSpec {
    pub fn is_identity(&self) -> bool {
        matches!(self, CorrelationSpec::Identity)
    }
}

impl fmt::Display for CorrelationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrelationSpec::Identity => write!(f, "identity"),
            CorrelationSpec::Exponential(r) => write!(f, "exp:{r}"),
            CorrelationSpec::ExplicitEigenvalues(sigma) => {
                let parts: Vec<String> = sigma.iter().map(|s| s.to_string()).collect();
                write!(f, "eig:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for CorrelationSpec {
    type Err = Error;

    /// Accepts `identity`, `exp:<r>` and `eig:<s1>,<s2>,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("identity") || s == "none" {
            return Ok(CorrelationSpec::Identity);
        }
        let bad = |what: &str| Error::config(format!("bad correlation spec {s:?}: {what}"));
        match s.split_once(':') {
            Some(("exp", r)) => {
                let r: f64 = r.trim().parse().map_err(|_| bad("r is not a number"))?;
                if r == 0.0 {
                    Ok(CorrelationSpec::Identity)
                } else {
                    Ok(CorrelationSpec::Exponential(r))
                }
            }
            Some(("eig", list)) => list
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| bad("eigenvalue is not a number"))
                })
                .collect::<Result<Vec<_>>>()
                .map(CorrelationSpec::ExplicitEigenvalues),
            _ => Err(bad("expected identity, exp:<r> or eig:<list>")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegimeKind {
    Low,
    Moderate { s: u32 },
    High,
}

impl RegimeKind {
    pub fn name(&self) -> &'static str {
        match self {
            RegimeKind::Low => "low",
            RegimeKind::Moderate { .. } => "moderate",
            RegimeKind::High => "high",
        }
    }

    pub fn s(&self) -> Option<u32> {
        match self {
            RegimeKind::Moderate { s } => Some(*s),
            _ => None,
        }
    }
}

/// SCBR regime at the configuration's diversity order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regime {
    pub kind: RegimeKind,
    /// `2 / (L eta)`.
    pub beta: f64,
}

/// Classifies `beta = 2/(L eta)` against `[|N_t-N_r|+1, N_t+N_r-1]`.
///
/// The moderate interval is closed. Comparisons are exact.
pub fn classify_regime(config: &SystemConfig) -> Regime {
    classify_beta(config.beta(), config.nt, config.nr)
}

pub(crate) fn classify_beta(beta: f64, nt: u32, nr: u32) -> Regime {
    let dn = nt.abs_diff(nr) as f64;
    let kind = if beta > (nt + nr - 1) as f64 {
        RegimeKind::Low
    } else if beta < dn + 1.0 {
        RegimeKind::High
    } else {
        let s = ((beta + 1.0 - dn) / 2.0).floor() as u32;
        RegimeKind::Moderate {
            s: s.min(nt.min(nr)),
        }
    };
    Regime { kind, beta }
}

/// Smallest diversity order beyond which the distortion exponent stops
/// growing: `ceil(2 / (eta (|N_t - N_r| + 1)))`. `L` is ignored.
pub fn transit_point(config: &SystemConfig) -> u32 {
    let x = 2.0 / (config.eta * (config.dn() + 1) as f64);
    (x.ceil() as u32).max(1)
}

/// Builds the `dim x dim` correlation matrix (unit diagonal) and its
/// ascending eigenvalues.
pub fn build_correlation(spec: &CorrelationSpec, dim: usize) -> Result<(ComplexMatrix, Vec<f64>)> {
    if dim == 0 {
        return Err(Error::config("correlation dimension must be positive"));
    }
    match spec {
        CorrelationSpec::Identity => Ok((ComplexMatrix::identity(dim), vec![1.0; dim])),
        CorrelationSpec::Exponential(r) => {
            if !(*r > 0.0 && *r < 1.0) {
                return Err(Error::config(format!(
                    "exponential correlation needs 0 < r < 1, got {r}"
                )));
            }
            let values: Vec<f64> = (0..dim * dim)
                .map(|k| r.powi((k / dim).abs_diff(k % dim) as i32))
                .collect();
            let m = ComplexMatrix::from_real(dim, dim, &values)?;
            let eig = hermitian_eigenvalues(&m)?;
            Ok((m, eig))
        }
        CorrelationSpec::ExplicitEigenvalues(sigma) => {
            validate_eigenvalues(sigma, dim)?;
            Ok((unit_diagonal_with_spectrum(sigma), sigma.clone()))
        }
    }
}

fn validate_eigenvalues(sigma: &[f64], dim: usize) -> Result<()> {
    if sigma.len() != dim {
        return Err(Error::config(format!(
            "expected {dim} correlation eigenvalues, got {}",
            sigma.len()
        )));
    }
    if sigma.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::config(
            "correlation eigenvalues must be positive and finite",
        ));
    }
    if sigma.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(
            "correlation eigenvalues must be strictly ascending",
        ));
    }
    let trace: f64 = sigma.iter().sum();
    if (trace - dim as f64).abs() > 1e-9 * dim as f64 {
        return Err(Error::config(format!(
            "correlation eigenvalues must sum to {dim} (unit diagonal), got {trace}"
        )));
    }
    Ok(())
}

/// Smallest gap between consecutive ascending eigenvalues (infinite for one).
pub fn spectral_gap(sigma: &[f64]) -> f64 {
    sigma
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

/// Real symmetric matrix with unit diagonal and the given spectrum, built by
/// plane rotations of `diag(sigma)` that move one diagonal entry to 1 at a
/// time (Bendel–Mickey). Requires `mean(sigma) == 1`.
fn unit_diagonal_with_spectrum(sigma: &[f64]) -> ComplexMatrix {
    let n = sigma.len();
    let mut a = vec![0.0; n * n];
    for (i, &s) in sigma.iter().enumerate() {
        a[i * n + i] = s;
    }
    for _ in 0..n {
        let below = (0..n).find(|&i| a[i * n + i] < 1.0 - 1e-15);
        let above = (0..n).find(|&j| a[j * n + j] > 1.0 + 1e-15);
        let (i, j) = match (below, above) {
            (Some(i), Some(j)) => (i, j),
            _ => break,
        };
        let (aii, ajj, aij) = (a[i * n + i], a[j * n + j], a[i * n + j]);
        // new a_ii = c^2 a_ii - 2cs a_ij + s^2 a_jj = 1, with t = s/c:
        // (a_jj - 1) t^2 - 2 a_ij t + (a_ii - 1) = 0, roots real since signs differ
        let qa = ajj - 1.0;
        let disc = (aij * aij - qa * (aii - 1.0)).max(0.0).sqrt();
        let t = (aij + disc) / qa;
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        for k in 0..n {
            let (aki, akj) = (a[k * n + i], a[k * n + j]);
            a[k * n + i] = c * aki - s * akj;
            a[k * n + j] = s * aki + c * akj;
        }
        for k in 0..n {
            let (aik, ajk) = (a[i * n + k], a[j * n + k]);
            a[i * n + k] = c * aik - s * ajk;
            a[j * n + k] = s * aik + c * ajk;
        }
        a[i * n + i] = 1.0;
    }
    for i in 0..n {
        a[i * n + i] = 1.0;
    }
    ComplexMatrix::from_real(n, n, &a).expect("square by construction")
}
