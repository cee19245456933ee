//! Deformed integer arithmetic: q-numbers and log-domain q-factorials.
//!
//! The deformed photon number is `[n]_q = (1 - q^n)/(1 - q)`, which
//! interpolates between `[n]_1 = n` (undeformed ladder weights) and the
//! bounded limit `[n]_q -> 1/(1-q)` for `q < 1`. Every probe-state
//! coefficient downstream is built from products `[n]_q! = [1]_q ... [n]_q`,
//! kept in log domain throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;

/// Deformation parameter `q` with `0 < q <= 1`.
///
/// `q = 1` is the undeformed limit and is accepted; the removable
/// singularity of `(1 - q^n)/(1 - q)` there is handled by an explicit
/// branch rather than by evaluating 0/0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DeformationParameter(f64);

impl DeformationParameter {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q <= 1.0 {
            Ok(Self(q))
        } else {
            Err(Error::InvalidDeformation(q))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_undeformed(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for DeformationParameter {
    type Error = Error;
    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<DeformationParameter> for f64 {
    fn from(q: DeformationParameter) -> f64 {
        q.0
    }
}

impl std::fmt::Display for DeformationParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The q-deformed photon number `[n]_q = (1 - q^n)/(1 - q)`.
///
/// Evaluated as `-expm1(n ln q)/(1 - q)` so that `1 - q^n` keeps full
/// precision when q is close to 1; exactly `n` in the undeformed limit.
pub fn q_number(n: u32, q: DeformationParameter) -> f64 {
    if q.is_undeformed() {
        return f64::from(n);
    }
    if n == 0 {
        return 0.0;
    }
    let ln_q = (q.value() - 1.0).ln_1p();
    (-f64::exp_m1(f64::from(n) * ln_q)) / (1.0 - q.value())
}

/// Natural log of the q-number, `ln [n]_q`, for n >= 1.
///
/// `ln(1 - q^n)` is computed from expm1/ln_1p to stay accurate for
/// q near 1, where `q^n` is itself near 1.
fn ln_q_number(n: u32, q: DeformationParameter) -> f64 {
    debug_assert!(n >= 1);
    if q.is_undeformed() {
        return f64::from(n).ln();
    }
    let ln_q = (q.value() - 1.0).ln_1p();
    let one_minus_qn = -f64::exp_m1(f64::from(n) * ln_q);
    one_minus_qn.ln() - (-q.value()).ln_1p()
}

/// Log-domain q-factorial: `ln [n]_q! = sum_{k=1..n} ln [k]_q`, with `n = 0 -> 0`.
///
/// Accumulated with compensated summation; per-term error is ulp-scale, so
/// the total stays within a few n ulps of the exact value.
pub fn log_q_factorial(n: u32, q: DeformationParameter) -> f64 {
    let mut acc = KahanSum::new();
    for k in 1..=n {
        acc.add(ln_q_number(k, q));
    }
    acc.value()
}
