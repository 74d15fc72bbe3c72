use std::fmt;

use rug::Float;

use super::interval::RealInterval;

/// An exactly stored complex number (a pair of MPFR floats).
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        BigComplex { re, im }
    }

    pub fn real(re: Float) -> Self {
        let prec = re.prec();
        BigComplex { re, im: Float::new(prec) }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        BigComplex { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn enclose(&self, prec: u32) -> ComplexInterval {
        ComplexInterval {
            re: RealInterval::from_float(prec, &self.re),
            im: RealInterval::from_float(prec, &self.im),
        }
    }

    /// Certified enclosure of the modulus.
    pub fn abs(&self, prec: u32) -> RealInterval {
        self.enclose(prec).abs()
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re.to_string_radix(10, Some(12)), self.im.to_string_radix(10, Some(12)))
    }
}

/// Rectangular complex interval.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexInterval {
    pub re: RealInterval,
    pub im: RealInterval,
}

impl ComplexInterval {
    pub fn new(re: RealInterval, im: RealInterval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: RealInterval) -> Self {
        let prec = re.prec();
        ComplexInterval { re, im: RealInterval::zero(prec) }
    }

    pub fn zero(prec: u32) -> Self {
        Self::real(RealInterval::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::real(RealInterval::one(prec))
    }

    /// Encloses `e^{iθ}` for every θ in `theta`.
    pub fn unit(theta: &RealInterval) -> Self {
        ComplexInterval { re: theta.cos(), im: theta.sin() }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexInterval { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexInterval { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        ComplexInterval { re, im }
    }

    pub fn mul_real(&self, r: &RealInterval) -> Self {
        ComplexInterval { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn scale_i64(&self, v: i64) -> Self {
        ComplexInterval { re: self.re.mul_i64(v), im: self.im.mul_i64(v) }
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one(self.prec());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `e^{re} (cos im + i sin im)`.
    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        ComplexInterval { re: self.im.cos().mul(&m), im: self.im.sin().mul(&m) }
    }

    pub fn abs(&self) -> RealInterval {
        self.re.sqr().add(&self.im.sqr()).sqrt()
    }

    pub fn mid(&self) -> BigComplex {
        BigComplex { re: self.re.mid(), im: self.im.mid() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_i_pi() {
        let pi = RealInterval::pi(128);
        let z = ComplexInterval::new(RealInterval::zero(128), pi);
        let e = z.exp();
        assert!(e.re.contains(&Float::with_val(128, -1)));
        assert!(e.im.contains_zero());
    }

    #[test]
    fn modulus_of_three_four() {
        let z = ComplexInterval::new(RealInterval::from_i64(64, 3), RealInterval::from_i64(64, 4));
        assert!(z.abs().contains(&Float::with_val(64, 5)));
        let sq = z.powi(2);
        assert!(sq.re.contains(&Float::with_val(64, -7)));
        assert!(sq.im.contains(&Float::with_val(64, 24)));
    }
}
