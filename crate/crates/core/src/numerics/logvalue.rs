use std::fmt;
use std::iter::Product;
use std::ops::{Div, DivAssign, Mul, MulAssign, Neg};

/// A real number stored as `sign * exp(ln_magnitude)`.
///
/// Products and quotients stay representable far outside the `f64` range,
/// which matters for gamma products and powers such as `N_t^Delta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    sign: i8,
    ln_magnitude: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0,
        ln_magnitude: f64::NEG_INFINITY,
    };
    pub const ONE: LogValue = LogValue {
        sign: 1,
        ln_magnitude: 0.0,
    };

    /// Builds a value from a sign in {-1, 0, 1} and the log of its magnitude.
    pub fn new(sign: i8, ln_magnitude: f64) -> Self {
        match sign.signum() {
            0 => Self::ZERO,
            s => LogValue {
                sign: s,
                ln_magnitude,
            },
        }
    }

    /// Positive value `exp(ln)`.
    pub fn from_ln(ln: f64) -> Self {
        LogValue {
            sign: 1,
            ln_magnitude: ln,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogValue {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_magnitude: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of `|value|`; `-inf` for zero.
    pub fn ln_magnitude(&self) -> f64 {
        self.ln_magnitude
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Conversion to `f64`; saturates to `±inf` or `0` outside the double range.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => s as f64 * self.ln_magnitude.exp(),
        }
    }

    /// Conversion to `f64` only when the result is finite and, for nonzero
    /// values, not flushed to zero.
    pub fn to_finite_f64(&self) -> Option<f64> {
        let x = self.to_f64();
        (x.is_finite() && (x != 0.0 || self.sign == 0)).then_some(x)
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        match self.sign {
            0 => Self::ZERO,
            s => LogValue {
                sign: if s < 0 && n % 2 != 0 { -1 } else { 1 },
                ln_magnitude: self.ln_magnitude * n as f64,
            },
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero LogValue");
        LogValue {
            sign: self.sign,
            ln_magnitude: -self.ln_magnitude,
        }
    }
}

impl Default for LogValue {
    fn default() -> Self {
        Self::ONE
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: LogValue) -> LogValue {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        LogValue {
            sign: self.sign * rhs.sign,
            ln_magnitude: self.ln_magnitude + rhs.ln_magnitude,
        }
    }
}

impl Div for LogValue {
    type Output = LogValue;

    fn div(self, rhs: LogValue) -> LogValue {
        self * rhs.recip()
    }
}

impl MulAssign for LogValue {
    fn mul_assign(&mut self, rhs: LogValue) {
        *self = *self * rhs;
    }
}

impl DivAssign for LogValue {
    fn div_assign(&mut self, rhs: LogValue) {
        *self = *self / rhs;
    }
}

impl Neg for LogValue {
    type Output = LogValue;

    fn neg(self) -> LogValue {
        LogValue {
            sign: -self.sign,
            ln_magnitude: self.ln_magnitude,
        }
    }
}

impl Product for LogValue {
    fn product<I: Iterator<Item = LogValue>>(iter: I) -> LogValue {
        iter.fold(LogValue::ONE, Mul::mul)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            1 => write!(f, "exp({})", self.ln_magnitude),
            _ => write!(f, "-exp({})", self.ln_magnitude),
        }
    }
}
