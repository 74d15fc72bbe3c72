//! Shared inputs for the benchmark suite.

use bwcurve::numerics::BigComplex;
use bwcurve::poly::multi_indices;
use bwcurve::{ExponentVector, Poly, PrecisionContext};

pub fn golden() -> ExponentVector {
    ExponentVector::golden()
}

pub fn planar() -> ExponentVector {
    "sqrt2m1,sqrt3m1".parse().expect("fixture parses")
}

pub fn context(bits: u32) -> PrecisionContext {
    PrecisionContext::with_bits(bits).expect("bits >= 64")
}

/// Deterministic dense polynomial with coefficients in `[-1, 1]`.
pub fn dense_poly(n: u32, d: usize) -> Poly {
    let terms = multi_indices(n, d).into_iter().enumerate().map(|(k, i)| {
        let t = k as f64 + 1.0;
        (i, BigComplex::from_f64(128, (t * 0.7).sin(), (t * 1.3).cos()))
    });
    Poly::from_terms(n, d, terms).expect("indices within degree")
}
