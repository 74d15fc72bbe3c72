//! Arbitrary-precision scalars, outward-rounded intervals and log-magnitudes.
//!
//! Everything certified in the crate is ultimately a [`RealInterval`]. Products
//! of many factors are carried as [`LogMagnitude`] so that values such as
//! `exp(n^{d+1} log n)` never have to be materialized.

mod complex;
mod interval;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use rug::Float;

pub use complex::{BigComplex, ComplexInterval};
pub(crate) use interval::{rd, ru};
pub use interval::RealInterval;

use crate::error::{Error, Result};

pub const MIN_BITS: u32 = 64;
pub const DEFAULT_BITS: u32 = 256;

/// Working precision plus the escalation policy and default sample counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    pub mantissa_bits: u32,
    /// Number of precision doublings tried before giving up.
    pub max_escalations: u32,
    /// Points on |z| = 1 used for curve sup-norms.
    pub circle_samples: usize,
    /// Pseudo-random torus points used for polydisk lower bounds.
    pub torus_samples: usize,
    pub seed: u64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            mantissa_bits: DEFAULT_BITS,
            max_escalations: 2,
            circle_samples: 1 << 12,
            torus_samples: 1 << 12,
            seed: 0x5eed,
        }
    }
}

impl PrecisionContext {
    pub fn with_bits(bits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::PrecisionTooLow { bits });
        }
        Ok(PrecisionContext { mantissa_bits: bits, ..Default::default() })
    }

    pub fn bits(&self) -> u32 {
        self.mantissa_bits
    }

    /// The context after one more doubling, if the policy allows it.
    pub fn escalated(&self, step: u32) -> Option<Self> {
        (step <= self.max_escalations).then(|| PrecisionContext {
            mantissa_bits: self.mantissa_bits << step,
            max_escalations: self.max_escalations - step,
            ..self.clone()
        })
    }
}

/// Runs `op` at the context precision, doubling it on indeterminate results.
///
/// After `max_escalations` retries an indeterminate error is converted to its
/// definitive form (`IndependenceViolation` or `PrecisionExhausted`).
pub fn with_escalation<T>(ctx: &PrecisionContext, mut op: impl FnMut(&PrecisionContext) -> Result<T>) -> Result<T> {
    let mut current = ctx.clone();
    let mut last_err;
    let mut steps = 0;
    loop {
        match op(&current) {
            Err(e) if e.is_indeterminate() => last_err = e,
            other => return other,
        }
        steps += 1;
        match ctx.escalated(steps) {
            Some(next) => current = next,
            None => return Err(last_err.settle()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Logarithm of a magnitude with the sign of the underlying quantity.
///
/// Zero has no logarithm and is represented by its own variant.
#[derive(Clone, Debug, PartialEq)]
pub enum LogMagnitude {
    Zero,
    NonZero { log_abs: RealInterval, sign: Sign },
}

impl LogMagnitude {
    pub fn one(prec: u32) -> Self {
        LogMagnitude::NonZero { log_abs: RealInterval::zero(prec), sign: Sign::Plus }
    }

    pub fn new(log_abs: RealInterval, sign: Sign) -> Self {
        LogMagnitude::NonZero { log_abs, sign }
    }

    /// `log|v|` with the sign of `v`; `Zero` for an exact zero, `None` if the
    /// interval meets zero without being zero.
    pub fn of_interval(v: &RealInterval) -> Option<Self> {
        if v.is_exact_zero() {
            return Some(LogMagnitude::Zero);
        }
        let sign = v.sign()?;
        let log_abs = v.abs().ln()?;
        Some(LogMagnitude::NonZero { log_abs, sign })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LogMagnitude::Zero)
    }

    pub fn log_abs(&self) -> Option<&RealInterval> {
        match self {
            LogMagnitude::Zero => None,
            LogMagnitude::NonZero { log_abs, .. } => Some(log_abs),
        }
    }

    pub fn sign(&self) -> Option<Sign> {
        match self {
            LogMagnitude::Zero => None,
            LogMagnitude::NonZero { sign, .. } => Some(*sign),
        }
    }

    /// Midpoint of the log enclosure as a scalar.
    pub fn value(&self) -> Option<BigReal> {
        self.log_abs().map(|l| BigReal(l.mid()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (LogMagnitude::NonZero { log_abs: a, sign: s }, LogMagnitude::NonZero { log_abs: b, sign: t }) => {
                LogMagnitude::NonZero { log_abs: a.add(b), sign: *s * *t }
            }
            _ => LogMagnitude::Zero,
        }
    }
}

/// Log-magnitude of the product of `values`.
///
/// The sum of `k` log-enclosures widens by at most one outward rounding per
/// term. The empty product is `log 1 = 0` with sign `+`.
pub fn log_sum<'a>(prec: u32, values: impl IntoIterator<Item = &'a LogMagnitude>) -> LogMagnitude {
    let mut acc = LogMagnitude::one(prec);
    for v in values {
        acc = acc.mul(v);
        if acc.is_zero() {
            return acc;
        }
    }
    acc
}

/// An arbitrary-precision real scalar (an MPFR float with a ±2^30 binary exponent range).
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct BigReal(pub Float);

impl BigReal {
    pub fn zero(prec: u32) -> Self {
        BigReal(Float::new(prec))
    }

    pub fn from_f64(prec: u32, v: f64) -> Self {
        BigReal(Float::with_val(prec, v))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn bits(&self) -> u32 {
        self.0.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Decimal rendering with enough digits to round-trip at this precision.
    pub fn to_decimal(&self) -> String {
        decimal_string(&self.0)
    }

    pub fn max(self, other: BigReal) -> BigReal {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    pub fn cmp_total(&self, other: &BigReal) -> Ordering {
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl From<Float> for BigReal {
    fn from(f: Float) -> Self {
        BigReal(f)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

/// Decimal digits needed to round-trip `bits` binary digits.
pub fn decimal_digits(bits: u32) -> usize {
    (f64::from(bits) * std::f64::consts::LOG10_2).ceil() as usize + 2
}

/// Plain decimal (scientific when needed) string at round-trip precision.
pub fn decimal_string(f: &Float) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    trim_zeros(f.to_string_radix(10, Some(decimal_digits(f.prec()))))
}

/// Drops trailing zeros of the mantissa (`"2.500e-1"` becomes `"2.5e-1"`).
pub fn trim_zeros(s: String) -> String {
    let (mantissa, exp) = match s.find(['e', '@']) {
        Some(i) => s.split_at(i),
        None => (s.as_str(), ""),
    };
    if !mantissa.contains('.') {
        return s;
    }
    let m = mantissa.trim_end_matches('0').trim_end_matches('.');
    format!("{m}{exp}")
}

/// Parses a decimal string back into a float of `prec` bits (round to nearest).
pub fn parse_float(prec: u32, s: &str) -> Result<Float> {
    Float::parse(s)
        .map(|v| Float::with_val(prec, v))
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lm(v: f64) -> LogMagnitude {
        LogMagnitude::of_interval(&RealInterval::from_f64(256, v)).unwrap()
    }

    #[test]
    fn log_sum_small_integers() {
        let p = log_sum(256, [lm(2.0), lm(3.0)].iter());
        let six = RealInterval::from_i64(256, 6).ln().unwrap();
        assert!(p.log_abs().unwrap().intersect(&six).is_some());
        assert_eq!(p.sign(), Some(Sign::Plus));
    }

    #[test]
    fn log_sum_empty_is_one() {
        let p = log_sum(256, std::iter::empty());
        assert!(p.log_abs().unwrap().is_exact_zero());
        assert_eq!(p.sign(), Some(Sign::Plus));
    }

    #[test]
    fn zero_sentinel_absorbs() {
        let values = [lm(2.0), LogMagnitude::Zero, lm(-3.0)];
        assert!(log_sum(64, values.iter()).is_zero());
        let neg = log_sum(64, [lm(-2.0), lm(3.0)].iter());
        assert_eq!(neg.sign(), Some(Sign::Minus));
    }

    #[test]
    fn escalation_doubles_then_settles() {
        let ctx = PrecisionContext::default();
        let mut seen = Vec::new();
        let out: Result<()> = with_escalation(&ctx, |c| {
            seen.push(c.mantissa_bits);
            Err(Error::undecided("always", c.mantissa_bits))
        });
        assert_eq!(seen, vec![256, 512, 1024]);
        assert!(matches!(out, Err(Error::PrecisionExhausted { bits: 1024, .. })));

        let ok = with_escalation(&ctx, |c| {
            if c.mantissa_bits < 512 {
                Err(Error::undecided_independence(vec![1], 0, c.mantissa_bits))
            } else {
                Ok(c.mantissa_bits)
            }
        });
        assert_eq!(ok, Ok(512));
    }

    #[test]
    fn low_precision_rejected() {
        assert!(PrecisionContext::with_bits(32).is_err());
        assert!(PrecisionContext::with_bits(64).is_ok());
    }

    #[test]
    fn decimal_roundtrip() {
        let x = Float::with_val(256, 2).sqrt();
        let s = decimal_string(&x);
        assert_eq!(parse_float(256, &s).unwrap(), x);
    }
}
