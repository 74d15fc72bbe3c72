//! Polynomials of total degree at most `n` in `d + 1` complex variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{decimal_string, parse_float, ru, BigComplex, ComplexInterval, RealInterval};

/// Exponent `(j0, j1, ..., jd)` of the monomial `z0^j0 z1^j1 ... zd^jd`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub j0: u32,
    pub j: Vec<u32>,
}

impl MultiIndex {
    pub fn new(j0: u32, j: Vec<u32>) -> Self {
        MultiIndex { j0, j }
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex { j0: 0, j: vec![0; d] }
    }

    pub fn d(&self) -> usize {
        self.j.len()
    }

    /// `|j| = j1 + ... + jd`.
    pub fn tail_degree(&self) -> u32 {
        self.j.iter().sum()
    }

    pub fn degree(&self) -> u32 {
        self.j0 + self.tail_degree()
    }

    /// All exponents as one slice-like iterator `j0, j1, ..., jd`.
    pub fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(self.j0).chain(self.j.iter().copied())
    }
}

/// Graded lexicographic order: by total degree, then larger `j0` first,
/// then larger `j1`, and so on.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exponents().cmp(self.exponents()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.j0)?;
        for (i, v) in self.j.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Number of monomials of total degree `<= n` in `d + 1` variables, `C(n+d+1, d+1)`.
pub fn dim_pn(n: u32, d: usize) -> usize {
    binomial(u64::from(n) + d as u64 + 1, d as u64 + 1) as usize
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// Every `MultiIndex` with `d` tail entries and degree `<= n`, in graded lex order.
pub fn multi_indices(n: u32, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(dim_pn(n, d));
    let mut buf = vec![0u32; d + 1];
    for deg in 0..=n {
        compositions(deg, 0, &mut buf, &mut |parts| {
            out.push(MultiIndex { j0: parts[0], j: parts[1..].to_vec() });
        });
    }
    out
}

/// Nonnegative `d`-vectors `j` with `|j| = m`, lexicographically descending.
pub fn simplex_slice(m: u32, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if d == 0 {
        if m == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut buf = vec![0u32; d];
    compositions(m, 0, &mut buf, &mut |parts| out.push(parts.to_vec()));
    out
}

fn compositions(total: u32, pos: usize, buf: &mut [u32], emit: &mut impl FnMut(&[u32])) {
    if pos + 1 == buf.len() {
        buf[pos] = total;
        emit(buf);
        return;
    }
    for v in (0..=total).rev() {
        buf[pos] = v;
        compositions(total - v, pos + 1, buf, emit);
    }
}

/// A polynomial in `P_n(d+1)` with exactly stored complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    n: u32,
    d: usize,
    terms: BTreeMap<MultiIndex, BigComplex>,
}

impl Poly {
    pub fn zero(n: u32, d: usize) -> Self {
        Poly { n, d, terms: BTreeMap::new() }
    }

    pub fn constant(n: u32, d: usize, prec: u32) -> Self {
        let mut p = Poly::zero(n, d);
        p.terms.insert(MultiIndex::zero(d), BigComplex::from_f64(prec, 1.0, 0.0));
        p
    }

    pub fn from_terms(n: u32, d: usize, terms: impl IntoIterator<Item = (MultiIndex, BigComplex)>) -> Result<Self> {
        let mut p = Poly::zero(n, d);
        for (idx, c) in terms {
            p.set(idx, c)?;
        }
        Ok(p)
    }

    /// Sets a coefficient; zero coefficients are dropped.
    pub fn set(&mut self, idx: MultiIndex, c: BigComplex) -> Result<()> {
        if idx.d() != self.d {
            return Err(Error::InvalidInput(format!("multi-index {idx} has {} tail entries, expected {}", idx.d(), self.d)));
        }
        if idx.degree() > self.n {
            return Err(Error::InvalidInput(format!("multi-index {idx} exceeds degree bound {}", self.n)));
        }
        if c.is_zero() {
            self.terms.remove(&idx);
        } else {
            self.terms.insert(idx, c);
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigComplex)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Option<&BigComplex> {
        self.terms.get(idx)
    }

    /// Largest coefficient precision, used as the natural evaluation precision.
    pub fn coeff_prec(&self) -> u32 {
        self.terms.values().map(BigComplex::prec).max().unwrap_or(64)
    }

    /// Evaluates at a point of `C^{d+1}` given as complex intervals.
    pub fn eval(&self, w: &[ComplexInterval], prec: u32) -> ComplexInterval {
        assert_eq!(w.len(), self.d + 1, "point has wrong dimension");
        let powers: Vec<Vec<ComplexInterval>> = w.iter().map(|wi| power_table(wi, self.n, prec)).collect();
        let mut acc = ComplexInterval::zero(prec);
        for (idx, c) in &self.terms {
            let mut mono = c.enclose(prec);
            for (k, e) in idx.exponents().enumerate() {
                if e > 0 {
                    mono = mono.mul(&powers[k][e as usize]);
                }
            }
            acc = acc.add(&mono);
        }
        acc
    }

    /// `Σ |c|`, an upper bound for the sup-norm on the closed unit polydisk.
    pub fn polydisk_upper(&self, prec: u32) -> Float {
        let mut acc = Float::new(prec);
        for c in self.terms.values() {
            let a = c.abs(prec);
            acc = ru(prec, &acc + a.hi());
        }
        acc
    }

    /// Largest certified lower bound of `|P|` over the given torus points.
    pub fn polydisk_lower(&self, samples: &[Vec<ComplexInterval>], prec: u32) -> Float {
        samples
            .par_iter()
            .map(|w| self.eval(w, prec).abs().lo().clone())
            .reduce(|| Float::new(prec), |a, b| if b > a { b } else { a })
    }

    /// `max |c|` (upper-rounded).
    pub fn max_coeff_abs(&self, prec: u32) -> Float {
        self.terms
            .values()
            .map(|c| c.abs(prec).hi().clone())
            .fold(Float::new(prec), |a, b| if b > a { b } else { a })
    }

    pub fn to_record(&self) -> PolyRecord {
        PolyRecord {
            n: self.n,
            d: self.d,
            bits: self.coeff_prec(),
            terms: self
                .terms
                .iter()
                .map(|(idx, c)| TermRecord {
                    j0: idx.j0,
                    j: idx.j.clone(),
                    re: decimal_string(&c.re),
                    im: decimal_string(&c.im),
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &PolyRecord) -> Result<Self> {
        let mut p = Poly::zero(rec.n, rec.d);
        for t in &rec.terms {
            let c = BigComplex::new(parse_float(rec.bits, &t.re)?, parse_float(rec.bits, &t.im)?);
            p.set(MultiIndex::new(t.j0, t.j.clone()), c)?;
        }
        Ok(p)
    }
}

/// `[1, w, w^2, ..., w^n]`.
pub(crate) fn power_table(w: &ComplexInterval, n: u32, prec: u32) -> Vec<ComplexInterval> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(ComplexInterval::one(prec));
    for k in 1..=n as usize {
        let next = out[k - 1].mul(w);
        out.push(next);
    }
    out
}

/// Serialized form of a [`Poly`]: one `(j0, j, re, im)` record per term with
/// decimal strings that round-trip at `bits` precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub n: u32,
    pub d: usize,
    pub bits: u32,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub j0: u32,
    pub j: Vec<u32>,
    pub re: String,
    pub im: String,
}

/// Torus sample set: the `2^{d+1}` sign points `(±1, ..., ±1)` followed by
/// `count` points with angles drawn from a fixed-seed generator.
pub fn torus_samples(d: usize, count: usize, seed: u64, prec: u32) -> Vec<Vec<ComplexInterval>> {
    let mut out = Vec::with_capacity(count + (1 << (d + 1)));
    for mask in 0u32..(1 << (d + 1)) {
        out.push(
            (0..=d)
                .map(|k| ComplexInterval::real(RealInterval::from_i64(prec, if mask >> k & 1 == 1 { -1 } else { 1 })))
                .collect(),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_pi = RealInterval::pi(prec).mul_i64(2);
    for _ in 0..count {
        out.push(
            (0..=d)
                .map(|_| {
                    let u: f64 = rng.gen();
                    ComplexInterval::unit(&two_pi.mul(&RealInterval::from_f64(prec, u)))
                })
                .collect(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(128, re, im)
    }

    fn pt(vals: &[(f64, f64)]) -> Vec<ComplexInterval> {
        vals.iter()
            .map(|&(a, b)| ComplexInterval::new(RealInterval::from_f64(128, a), RealInterval::from_f64(128, b)))
            .collect()
    }

    #[test]
    fn dim_small_cases() {
        assert_eq!(dim_pn(1, 1), 3);
        assert_eq!(dim_pn(2, 1), 6);
        assert_eq!(dim_pn(3, 2), 20);
        assert_eq!(dim_pn(0, 3), 1);
    }

    #[test]
    fn grlex_order_for_degree_one() {
        let idx = multi_indices(1, 1);
        assert_eq!(idx, vec![MultiIndex::new(0, vec![0]), MultiIndex::new(1, vec![0]), MultiIndex::new(0, vec![1])]);
        let mut sorted = multi_indices(3, 2);
        let copy = sorted.clone();
        sorted.sort();
        assert_eq!(sorted, copy);
    }

    #[test]
    fn degree_bound_enforced() {
        let mut p = Poly::zero(2, 1);
        assert!(p.set(MultiIndex::new(2, vec![1]), c(1.0, 0.0)).is_err());
        assert!(p.set(MultiIndex::new(0, vec![1, 1]), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn constant_evaluates_to_one() {
        let p = Poly::constant(3, 2, 128);
        let v = p.eval(&pt(&[(0.3, 0.1), (2.0, 0.0), (-1.0, 5.0)]), 128);
        assert!(v.re.contains(&Float::with_val(128, 1)));
        assert!(v.im.is_exact_zero());
    }

    #[test]
    fn resonant_binomial_is_two_at_phase_aligned_point() {
        // z0^2 - z1^3 at (1, -1)
        let p = Poly::from_terms(3, 1, [(MultiIndex::new(2, vec![0]), c(1.0, 0.0)), (MultiIndex::new(0, vec![3]), c(-1.0, 0.0))])
            .unwrap();
        let v = p.eval(&pt(&[(1.0, 0.0), (-1.0, 0.0)]), 128);
        assert!(v.re.contains(&Float::with_val(128, 2)));
        assert_eq!(p.polydisk_upper(128), 2);
        assert_eq!(p.polydisk_lower(&torus_samples(1, 0, 1, 128), 128), 2);
    }

    #[test]
    fn polydisk_bounds_of_simple_polys() {
        assert_eq!(Poly::zero(2, 1).polydisk_upper(64), 0);
        let p = Poly::from_terms(1, 1, [(MultiIndex::zero(1), c(3.0, 0.0)), (MultiIndex::new(1, vec![0]), c(0.0, 4.0))]).unwrap();
        assert_eq!(p.polydisk_upper(64), 7);
        let z0 = Poly::from_terms(1, 1, [(MultiIndex::new(1, vec![0]), c(1.0, 0.0))]).unwrap();
        assert_eq!(z0.polydisk_lower(&pt_set(&[(1.0, 0.0), (1.0, 0.0)]), 64), 1);
    }

    fn pt_set(v: &[(f64, f64)]) -> Vec<Vec<ComplexInterval>> {
        vec![pt(v)]
    }

    #[test]
    fn record_roundtrip() {
        let p = Poly::from_terms(2, 1, [(MultiIndex::new(1, vec![1]), BigComplex::new(Float::with_val(200, 3).sqrt(), Float::with_val(200, -0.25)))])
            .unwrap();
        let rec = p.to_record();
        let text = serde_json::to_string(&rec).unwrap();
        let back = Poly::from_record(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn torus_points_are_unimodular() {
        let s = torus_samples(2, 16, 7, 128);
        assert_eq!(s.len(), 8 + 16);
        for w in &s {
            for z in w {
                assert!(z.abs().contains(&Float::with_val(128, 1)));
            }
        }
    }
}
