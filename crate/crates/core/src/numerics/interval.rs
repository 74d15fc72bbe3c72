use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::{AssignRound, Pow};
use rug::{Float, Integer, Rational};

use super::Sign;

pub(crate) fn rd<T>(prec: u32, v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Down).0
}

pub(crate) fn ru<T>(prec: u32, v: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, v, Round::Up).0
}

fn fmin(a: Float, b: Float) -> Float {
    if b < a {
        b
    } else {
        a
    }
}

fn fmax(a: Float, b: Float) -> Float {
    if b > a {
        b
    } else {
        a
    }
}

/// A closed interval `[lo, hi]` of MPFR floats. Every operation rounds
/// outward, so the exact result of the real operation on any members of the
/// operands is a member of the result.
#[derive(Clone, Debug, PartialEq)]
pub struct RealInterval {
    lo: Float,
    hi: Float,
}

impl RealInterval {
    /// Builds an interval from endpoints; panics if `lo > hi` or either is NaN.
    pub fn new(lo: Float, hi: Float) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        RealInterval { lo, hi }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_i64(prec, 0)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(prec, 1)
    }

    pub fn from_i64(prec: u32, v: i64) -> Self {
        RealInterval { lo: rd(prec, v), hi: ru(prec, v) }
    }

    pub fn from_integer(prec: u32, v: &Integer) -> Self {
        RealInterval { lo: rd(prec, v), hi: ru(prec, v) }
    }

    pub fn from_f64(prec: u32, v: f64) -> Self {
        assert!(v.is_finite());
        RealInterval { lo: rd(prec, v), hi: ru(prec, v) }
    }

    pub fn from_rational(prec: u32, v: &Rational) -> Self {
        RealInterval { lo: rd(prec, v), hi: ru(prec, v) }
    }

    /// The tightest enclosure of an exactly represented float at `prec` bits.
    pub fn from_float(prec: u32, v: &Float) -> Self {
        RealInterval { lo: rd(prec, v), hi: ru(prec, v) }
    }

    pub fn pi(prec: u32) -> Self {
        RealInterval { lo: rd(prec, Constant::Pi), hi: ru(prec, Constant::Pi) }
    }

    pub fn ln2(prec: u32) -> Self {
        RealInterval { lo: rd(prec, Constant::Log2), hi: ru(prec, Constant::Log2) }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn into_bounds(self) -> (Float, Float) {
        (self.lo, self.hi)
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    /// Re-rounds both endpoints outward to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        RealInterval { lo: rd(prec, &self.lo), hi: ru(prec, &self.hi) }
    }

    pub fn mid(&self) -> Float {
        let prec = self.prec() + 1;
        let s = Float::with_val(prec, &self.lo + &self.hi);
        s / 2u32
    }

    /// An upper bound on `hi - lo`.
    pub fn width(&self) -> Float {
        ru(self.prec(), &self.hi - &self.lo)
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }

    pub fn contains(&self, v: &Float) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    /// Whether `other` lies inside `self`.
    pub fn encloses(&self, other: &RealInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Certified sign, or `None` when the interval meets zero.
    pub fn sign(&self) -> Option<Sign> {
        if self.lo > 0 {
            Some(Sign::Plus)
        } else if self.hi < 0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn certainly_lt(&self, other: &RealInterval) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_le(&self, other: &RealInterval) -> bool {
        self.hi <= other.lo
    }

    pub fn neg(&self) -> Self {
        RealInterval { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.prec().max(other.prec());
        RealInterval { lo: rd(p, &self.lo + &other.lo), hi: ru(p, &self.hi + &other.hi) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let p = self.prec().max(other.prec());
        RealInterval { lo: rd(p, &self.lo - &other.hi), hi: ru(p, &self.hi - &other.lo) }
    }

    pub fn add_i64(&self, v: i64) -> Self {
        let p = self.prec();
        RealInterval { lo: rd(p, &self.lo + v), hi: ru(p, &self.hi + v) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.prec().max(other.prec());
        if self.lo >= 0 && other.lo >= 0 {
            return RealInterval { lo: rd(p, &self.lo * &other.lo), hi: ru(p, &self.hi * &other.hi) };
        }
        let (a, b, c, d) = (&self.lo, &self.hi, &other.lo, &other.hi);
        let lo = fmin(fmin(rd(p, a * c), rd(p, a * d)), fmin(rd(p, b * c), rd(p, b * d)));
        let hi = fmax(fmax(ru(p, a * c), ru(p, a * d)), fmax(ru(p, b * c), ru(p, b * d)));
        RealInterval { lo, hi }
    }

    pub fn mul_i64(&self, v: i64) -> Self {
        let p = self.prec();
        if v >= 0 {
            RealInterval { lo: rd(p, &self.lo * v), hi: ru(p, &self.hi * v) }
        } else {
            RealInterval { lo: rd(p, &self.hi * v), hi: ru(p, &self.lo * v) }
        }
    }

    /// Division; `None` when the divisor meets zero.
    pub fn div(&self, other: &Self) -> Option<Self> {
        other.sign()?;
        let p = self.prec().max(other.prec());
        let (a, b, c, d) = (&self.lo, &self.hi, &other.lo, &other.hi);
        let lo = fmin(fmin(rd(p, a / c), rd(p, a / d)), fmin(rd(p, b / c), rd(p, b / d)));
        let hi = fmax(fmax(ru(p, a / c), ru(p, a / d)), fmax(ru(p, b / c), ru(p, b / d)));
        Some(RealInterval { lo, hi })
    }

    pub fn div_u64(&self, v: u64) -> Self {
        assert!(v > 0);
        let p = self.prec();
        let v = Integer::from(v);
        RealInterval { lo: rd(p, &self.lo / &v), hi: ru(p, &self.hi / &v) }
    }

    pub fn abs(&self) -> Self {
        if self.lo >= 0 {
            self.clone()
        } else if self.hi <= 0 {
            self.neg()
        } else {
            let hi = fmax(-self.lo.clone(), self.hi.clone());
            RealInterval { lo: Float::new(self.prec()), hi }
        }
    }

    pub fn sqr(&self) -> Self {
        let a = self.abs();
        let p = a.prec();
        RealInterval { lo: rd(p, a.lo.square_ref()), hi: ru(p, a.hi.square_ref()) }
    }

    pub fn powi(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one(self.prec());
        }
        let p = self.prec();
        if self.lo >= 0 {
            return RealInterval { lo: rd(p, (&self.lo).pow(k)), hi: ru(p, (&self.hi).pow(k)) };
        }
        if k % 2 == 1 {
            // odd powers are monotone
            RealInterval { lo: rd(p, (&self.lo).pow(k)), hi: ru(p, (&self.hi).pow(k)) }
        } else {
            self.abs().powi(k)
        }
    }

    /// Square root of the nonnegative part.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        let lo = if self.lo > 0 { rd(p, self.lo.sqrt_ref()) } else { Float::new(p) };
        let hi = if self.hi > 0 { ru(p, self.hi.sqrt_ref()) } else { Float::new(p) };
        RealInterval { lo, hi }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        RealInterval { lo: rd(p, self.lo.exp_ref()), hi: ru(p, self.hi.exp_ref()) }
    }

    /// Natural log; `None` unless the interval is certainly positive.
    pub fn ln(&self) -> Option<Self> {
        if self.lo.is_nan() || self.lo <= 0 {
            return None;
        }
        let p = self.prec();
        Some(RealInterval { lo: rd(p, self.lo.ln_ref()), hi: ru(p, self.hi.ln_ref()) })
    }

    /// Encloses `cos` via the mean-value bound `|cos t - cos m| <= |t - m|`.
    pub fn cos(&self) -> Self {
        self.trig(true)
    }

    pub fn sin(&self) -> Self {
        self.trig(false)
    }

    fn trig(&self, cosine: bool) -> Self {
        let p = self.prec();
        let m = self.mid();
        let r = {
            let a = ru(p, &self.hi - &m);
            let b = ru(p, &m - &self.lo);
            fmax(a, b)
        };
        let (c_lo, c_hi) = if cosine {
            (rd(p, m.cos_ref()), ru(p, m.cos_ref()))
        } else {
            (rd(p, m.sin_ref()), ru(p, m.sin_ref()))
        };
        let lo = fmax(rd(p, &c_lo - &r), Float::with_val(p, -1));
        let hi = fmin(ru(p, &c_hi + &r), Float::with_val(p, 1));
        RealInterval { lo, hi }
    }

    pub fn max(&self, other: &Self) -> Self {
        RealInterval { lo: fmax(self.lo.clone(), other.lo.clone()), hi: fmax(self.hi.clone(), other.hi.clone()) }
    }

    pub fn min(&self, other: &Self) -> Self {
        RealInterval { lo: fmin(self.lo.clone(), other.lo.clone()), hi: fmin(self.hi.clone(), other.hi.clone()) }
    }

    pub fn hull(&self, other: &Self) -> Self {
        RealInterval { lo: fmin(self.lo.clone(), other.lo.clone()), hi: fmax(self.hi.clone(), other.hi.clone()) }
    }

    /// Intersection, or `None` if disjoint.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = fmax(self.lo.clone(), other.lo.clone());
        let hi = fmin(self.hi.clone(), other.hi.clone());
        (lo <= hi).then_some(RealInterval { lo, hi })
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_string_radix(10, Some(20)), self.hi.to_string_radix(10, Some(20)))
    }
}
