//! The exponential curve `K(x) = {(e^z, e^{x1 z}, ..., e^{xd z}) : |z| <= 1}`
//! and certified sup-norms of polynomials restricted to it.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numerics::{ru, with_escalation, ComplexInterval, LogMagnitude, PrecisionContext, RealInterval};
use crate::poly::{multi_indices, power_table, MultiIndex, Poly};

/// Largest binary exponent used to bound a tail that is too small to represent.
const TAIL_EXPONENT_CAP: u64 = 1 << 20;

/// One coordinate of an exponent vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XEntry {
    /// Exact rational, from `p/q` or a decimal literal (kept verbatim for display).
    Rational { value: Rational, text: String },
    /// `sqrt(2) - 1`
    Sqrt2m1,
    /// `sqrt(3) - 1`
    Sqrt3m1,
    /// `(sqrt(5) - 1) / 2`
    Golden,
    /// `Σ_{k <= k_max} base^{-a_k}`; see [`crate::diophantine::liouville_fixture`].
    Liouville { base: u32, exponents: Vec<Integer> },
}

impl XEntry {
    pub fn rational(value: Rational) -> Self {
        let text = value.to_string();
        XEntry::Rational { value, text }
    }

    /// The exact value when it is rational and small enough to hold.
    pub fn exact(&self) -> Option<Rational> {
        match self {
            XEntry::Rational { value, .. } => Some(value.clone()),
            XEntry::Liouville { base, exponents } => {
                let mut acc = Rational::new();
                for a in exponents {
                    let a = a.to_u32().filter(|&a| a <= 1 << 16)?;
                    let denom = Integer::from(*base).pow(a);
                    acc += Rational::from((Integer::from(1), denom));
                }
                Some(acc)
            }
            _ => None,
        }
    }

    /// Certified enclosure of the true value at `prec` bits.
    pub fn enclose(&self, prec: u32) -> RealInterval {
        match self {
            XEntry::Rational { value, .. } => RealInterval::from_rational(prec, value),
            XEntry::Sqrt2m1 => sqrt_int(prec, 2).add_i64(-1),
            XEntry::Sqrt3m1 => sqrt_int(prec, 3).add_i64(-1),
            XEntry::Golden => sqrt_int(prec, 5).add_i64(-1).div_u64(2),
            XEntry::Liouville { base, exponents } => liouville_enclosure(*base, exponents, prec),
        }
    }
}

fn sqrt_int(prec: u32, v: i64) -> RealInterval {
    RealInterval::from_i64(prec, v).sqrt()
}

fn liouville_enclosure(base: u32, exponents: &[Integer], prec: u32) -> RealInterval {
    let log2b = f64::from(base).log2();
    let budget = u64::from(prec) + 64;
    let mut acc = RealInterval::zero(prec);
    for a in exponents {
        let scaled = a.to_f64() * log2b;
        if scaled <= budget as f64 {
            let a = a.to_u32().expect("small exponent");
            let term = RealInterval::from_i64(prec, i64::from(base)).powi(a);
            acc = acc.add(&RealInterval::one(prec).div(&term).expect("positive"));
        } else {
            // Remaining terms decay super-exponentially: their sum is below
            // 2·base^{-a_k} <= 2^{1 - min(a_k log2 b, cap)}.
            let e = (scaled.floor() as u64).min(TAIL_EXPONENT_CAP) as i32;
            let tail = Float::with_val(prec, Float::i_exp(1, 1 - e));
            let (lo, hi) = acc.into_bounds();
            return RealInterval::new(lo, ru(prec, &hi + &tail));
        }
    }
    acc
}

impl fmt::Display for XEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XEntry::Rational { text, .. } => f.write_str(text),
            XEntry::Sqrt2m1 => f.write_str("sqrt2m1"),
            XEntry::Sqrt3m1 => f.write_str("sqrt3m1"),
            XEntry::Golden => f.write_str("golden"),
            XEntry::Liouville { base, exponents } => write!(f, "liouville({base},{})", exponents.len()),
        }
    }
}

/// The vector `x ∈ [-1, 1]^d` defining the curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentVector {
    entries: Vec<XEntry>,
    /// Depth to which `⟨q·x⟩ ≠ 0` has been certified for all `0 < ‖q‖ <= q_checked`.
    pub q_checked: u32,
}

impl ExponentVector {
    pub fn new(entries: Vec<XEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("exponent vector must have d >= 1 entries".into()));
        }
        for e in &entries {
            let iv = e.enclose(64);
            if iv.lo() > &1 || iv.hi() < &-1 {
                return Err(Error::InvalidInput(format!("entry {e} lies outside [-1, 1]")));
            }
            if let Some(r) = e.exact() {
                if r.clone().abs() > 1 {
                    return Err(Error::InvalidInput(format!("entry {e} lies outside [-1, 1]")));
                }
            }
        }
        Ok(ExponentVector { entries, q_checked: 0 })
    }

    pub fn from_rationals(values: &[(i64, i64)]) -> Result<Self> {
        Self::new(values.iter().map(|&(p, q)| XEntry::rational(Rational::from((p, q)))).collect())
    }

    pub fn golden() -> Self {
        ExponentVector { entries: vec![XEntry::Golden], q_checked: 0 }
    }

    pub fn d(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[XEntry] {
        &self.entries
    }

    pub fn at(&self, prec: u32) -> XEnclosure {
        XEnclosure {
            prec,
            xs: self.entries.iter().map(|e| e.enclose(prec)).collect(),
            exact: self.entries.iter().map(XEntry::exact).collect(),
        }
    }

    /// `‖x‖ = max |x_l|` (upper bound).
    pub fn norm_upper(&self, prec: u32) -> Float {
        self.at(prec).xs.iter().map(|x| x.abs().hi().clone()).fold(Float::new(prec), |a, b| if b > a { b } else { a })
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Parses the fixture grammar: comma-separated entries, each one of `p/q`,
/// a decimal literal, `sqrt2m1`, `sqrt3m1`, `golden` or `liouville(b,k)`.
impl FromStr for ExponentVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for part in split_top_level(s) {
            entries.push(parse_entry(part.trim())?);
        }
        ExponentVector::new(entries)
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_entry(s: &str) -> Result<XEntry> {
    match s {
        "sqrt2m1" => return Ok(XEntry::Sqrt2m1),
        "sqrt3m1" => return Ok(XEntry::Sqrt3m1),
        "golden" => return Ok(XEntry::Golden),
        _ => {}
    }
    if let Some(args) = s.strip_prefix("liouville(").and_then(|r| r.strip_suffix(')')) {
        let nums: Vec<&str> = args.split(',').map(str::trim).collect();
        if nums.len() != 2 {
            return Err(Error::Parse(format!("expected liouville(base,k_max), got {s:?}")));
        }
        let base: u32 = nums[0].parse().map_err(|_| Error::Parse(format!("bad base in {s:?}")))?;
        let k_max: usize = nums[1].parse().map_err(|_| Error::Parse(format!("bad k_max in {s:?}")))?;
        return Ok(crate::diophantine::liouville_fixture(base, k_max)?.entry);
    }
    let value = if let Some((p, q)) = s.split_once('/') {
        let p: Integer = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q: Integer = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if q == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Rational::from((p, q))
    } else {
        parse_decimal(s)?
    };
    Ok(XEntry::Rational { value, text: s.to_string() })
}

/// Exact value of a decimal literal such as `-0.125` or `1e-3`.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a number or fixture: {s:?}"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: Integer = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let digits = digits / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = Integer::from(10);
    let mut r = if scale >= 0 {
        Rational::from(digits * ten.pow(scale as u32))
    } else {
        Rational::from((digits, ten.pow((-scale) as u32)))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// `x` realized at one precision: interval enclosures plus exact values where known.
#[derive(Clone, Debug)]
pub struct XEnclosure {
    pub prec: u32,
    pub xs: Vec<RealInterval>,
    pub exact: Vec<Option<Rational>>,
}

impl XEnclosure {
    /// Encloses `k0 + Σ k_l x_l`. Exactly known entries are combined in
    /// rational arithmetic, so a linear form that vanishes on them is `[0, 0]`.
    pub fn linear_form(&self, k0: i64, k: &[i64]) -> RealInterval {
        let mut exact = Rational::from(k0);
        let mut inexact: Option<RealInterval> = None;
        for ((kl, x), ex) in k.iter().zip(&self.xs).zip(&self.exact) {
            if *kl == 0 {
                continue;
            }
            match ex {
                Some(r) => exact += r.clone() * Integer::from(*kl),
                None => {
                    let t = x.mul_i64(*kl);
                    inexact = Some(match inexact {
                        Some(acc) => acc.add(&t),
                        None => t,
                    });
                }
            }
        }
        let base = RealInterval::from_rational(self.prec, &exact);
        match inexact {
            Some(v) => base.add(&v),
            None => base,
        }
    }

    /// `λ(j0, j) = j0 + j·x`.
    pub fn frequency(&self, idx: &MultiIndex) -> RealInterval {
        let k: Vec<i64> = idx.j.iter().map(|&v| i64::from(v)).collect();
        self.linear_form(i64::from(idx.j0), &k)
    }

    /// Checks that `k0 + k·x` has a certified sign; returns its absolute value.
    pub(crate) fn separated(&self, k0: i64, k: &[i64]) -> Result<RealInterval> {
        let v = self.linear_form(k0, k);
        if v.is_exact_zero() {
            let (q, p) = relation(k0, k);
            return Err(Error::IndependenceViolation { q, p, exact: true });
        }
        if v.contains_zero() {
            let (q, p) = relation(k0, k);
            return Err(Error::undecided_independence(q, p, self.prec));
        }
        Ok(v.abs())
    }
}

/// Rewrites `k0 + k·x = 0` as `q·x = p` with the first nonzero `q` entry positive.
pub(crate) fn relation(k0: i64, k: &[i64]) -> (Vec<i64>, i64) {
    let mut q: Vec<i64> = k.iter().map(|v| -v).collect();
    let mut p = k0;
    if q.iter().find(|v| **v != 0).is_some_and(|v| *v < 0) {
        q.iter_mut().for_each(|v| *v = -*v);
        p = -p;
    }
    (q, p)
}

/// The exponents `λ(j0, j) = j0 + j·x` of the exponential sum for degree `n`.
#[derive(Clone, Debug)]
pub struct FrequencySet {
    pub n: u32,
    pub entries: Vec<(MultiIndex, RealInterval)>,
    /// Smallest pairwise distance (certified positive); `None` for a single entry.
    pub min_gap: Option<RealInterval>,
}

pub fn frequencies(n: u32, x: &ExponentVector, ctx: &PrecisionContext) -> Result<FrequencySet> {
    with_escalation(ctx, |c| frequencies_at(n, x, c.bits()))
}

fn frequencies_at(n: u32, x: &ExponentVector, prec: u32) -> Result<FrequencySet> {
    let enc = x.at(prec);
    let idx = multi_indices(n, x.d());
    let entries: Vec<(MultiIndex, RealInterval)> = idx.iter().map(|i| (i.clone(), enc.frequency(i))).collect();
    let mut min_gap: Option<RealInterval> = None;
    let mut k = vec![0i64; x.d()];
    for (a, ia) in idx.iter().enumerate() {
        for ib in &idx[a + 1..] {
            for (l, kl) in k.iter_mut().enumerate() {
                *kl = i64::from(ia.j[l]) - i64::from(ib.j[l]);
            }
            let gap = enc.separated(i64::from(ia.j0) - i64::from(ib.j0), &k)?;
            min_gap = Some(match min_gap {
                Some(g) => g.min(&gap),
                None => gap,
            });
        }
    }
    Ok(FrequencySet { n, entries, min_gap })
}

/// `f(z) = Σ c(j0, j) e^{λ(j0, j) z}`, evaluated term by term.
pub fn eval_curve(p: &Poly, x: &ExponentVector, z: &ComplexInterval, prec: u32) -> ComplexInterval {
    let enc = x.at(prec);
    let mut acc = ComplexInterval::zero(prec);
    for (idx, c) in p.terms() {
        let lam = enc.frequency(idx);
        let e = z.mul_real(&lam).exp();
        acc = acc.add(&c.enclose(prec).mul(&e));
    }
    acc
}

/// The curve point `(e^z, e^{x1 z}, ..., e^{xd z})`.
pub fn curve_point(x: &ExponentVector, z: &ComplexInterval, prec: u32) -> Vec<ComplexInterval> {
    let enc = x.at(prec);
    std::iter::once(z.exp()).chain(enc.xs.iter().map(|xl| z.mul_real(xl).exp())).collect()
}

/// Certified enclosure of `‖P‖_K` together with how it was obtained.
#[derive(Clone, Debug)]
pub struct KNorm {
    pub interval: RealInterval,
    /// Circle points used for the lower end.
    pub samples: usize,
    /// Power-series terms used for the series upper bound.
    pub series_terms: usize,
}

/// Taylor order used around each circle sample.
const TAYLOR_ORDER: usize = 6;

struct Term {
    coeff: ComplexInterval,
    idx: MultiIndex,
    lambda: RealInterval,
}

/// `‖P‖_K = sup_{|z|=1} |f(z)|` enclosed using `m` equispaced circle points.
///
/// `lo` is the largest certified `|f|` over the points. `hi` is the smaller of
/// two certified bounds: the coefficient sum of the power series of `f` at 0
/// (with an explicit tail), and a Taylor expansion of order 6 around every
/// sample (with an explicit remainder), which covers the whole circle.
pub fn k_norm(p: &Poly, x: &ExponentVector, m: usize, ctx: &PrecisionContext) -> Result<KNorm> {
    k_norm_impl(p, x, m, ctx, true)
}

/// Only the upper end of [`k_norm`]; skips the circle sweep when the Taylor
/// remainder cannot improve on the series bound.
pub fn k_norm_upper(p: &Poly, x: &ExponentVector, m: usize, ctx: &PrecisionContext) -> Result<Float> {
    Ok(k_norm_impl(p, x, m, ctx, false)?.interval.hi().clone())
}

fn k_norm_impl(p: &Poly, x: &ExponentVector, m: usize, ctx: &PrecisionContext, need_lo: bool) -> Result<KNorm> {
    if m < 8 {
        return Err(Error::InvalidInput(format!("k_norm needs at least 8 circle samples, got {m}")));
    }
    if p.is_zero() {
        let prec = ctx.bits();
        return Ok(KNorm { interval: RealInterval::zero(prec), samples: m, series_terms: 0 });
    }
    let prec_hi = ctx.bits().max(p.coeff_prec());
    let enc = x.at(prec_hi);
    let terms: Vec<Term> = p
        .terms()
        .map(|(idx, c)| Term { coeff: c.enclose(prec_hi), idx: idx.clone(), lambda: enc.frequency(idx) })
        .collect();
    let coeff_sum = p.polydisk_upper(prec_hi);
    let lam_max = terms.iter().map(|t| t.lambda.abs().hi().clone()).fold(Float::new(prec_hi), |a, b| if b > a { b } else { a });

    let (series_hi, series_terms) = series_bound(&terms, &coeff_sum, &lam_max, prec_hi);
    let h = ru(prec_hi, RealInterval::pi(prec_hi).hi() / m as u32);
    let remainder = taylor_remainder(&coeff_sum, &lam_max, &h, prec_hi);
    let taylor_useful = remainder < series_hi;
    if !need_lo && !taylor_useful {
        let lo = Float::new(prec_hi);
        return Ok(KNorm { interval: RealInterval::new(lo, series_hi), samples: m, series_terms });
    }

    // Evaluation precision: enough to resolve |f| ~ series_hi against terms of size Σ|c| e^Λ.
    let scale_bits = {
        let top = lam_max.to_f64() / std::f64::consts::LN_2 + coeff_sum.to_f64().max(1e-300).log2();
        let ratio = top - series_hi.to_f64().max(f64::MIN_POSITIVE).log2();
        if ratio.is_finite() { ratio.max(0.0) } else { f64::from(prec_hi) }
    };
    let prec_eval = ctx.bits().max(scale_bits.ceil() as u32 + 64 + (terms.len() as f64).log2().ceil() as u32 + 16);
    let terms_eval: Vec<Term> = if prec_eval == prec_hi {
        terms
    } else {
        let enc_e = x.at(prec_eval);
        p.terms()
            .map(|(idx, c)| Term { coeff: c.enclose(prec_eval), idx: idx.clone(), lambda: enc_e.frequency(idx) })
            .collect()
    };
    let enc_e = x.at(prec_eval);
    let order = if taylor_useful { TAYLOR_ORDER } else { 1 };
    let values = circle_values(&terms_eval, &enc_e, m, prec_eval, order);
    let lo = values.iter().map(|v| v[0].abs().lo().clone()).fold(Float::new(prec_eval), |a, b| if b > a { b } else { a });

    let mut hi = series_hi;
    if taylor_useful {
        let taylor_hi = ru(prec_eval, &taylor_max(&values, &h, prec_eval) + &remainder);
        if taylor_hi < hi {
            hi = taylor_hi;
        }
    }
    let hi = if hi < lo { lo.clone() } else { hi };
    Ok(KNorm { interval: RealInterval::new(lo, hi), samples: m, series_terms })
}

/// k_norm with the sample count doubled from `ctx.circle_samples` until the
/// width is below `2^{-30}·lo` (at most four doublings).
pub fn k_norm_adaptive(p: &Poly, x: &ExponentVector, ctx: &PrecisionContext) -> Result<KNorm> {
    let mut m = ctx.circle_samples.max(8);
    let mut best = k_norm(p, x, m, ctx)?;
    for _ in 0..4 {
        let iv = &best.interval;
        let tol = Float::with_val(iv.prec(), iv.lo() >> 30u32);
        if iv.width() <= tol {
            break;
        }
        m *= 2;
        let next = k_norm(p, x, m, ctx)?;
        if next.interval.width() < best.interval.width() {
            best = next;
        }
    }
    Ok(best)
}

/// `Σ_{t<=T} |a_t| + tail` where `f(z) = Σ a_t z^t`.
fn series_bound(terms: &[Term], coeff_sum: &Float, lam_max: &Float, prec: u32) -> (Float, usize) {
    let lam_f = lam_max.to_f64();
    let t_min = terms.len() + 2 + (2.0 * lam_f).ceil() as usize;
    let t_max = 4 * terms.len() + (8.0 * lam_f).ceil() as usize + 64;
    // running λ_i^t / t!
    let mut pw: Vec<RealInterval> = vec![RealInterval::one(prec); terms.len()];
    let mut total = Float::new(prec);
    // Λ^t / t! (upper)
    let mut lam_pow = Float::with_val(prec, 1);
    let mut t = 0usize;
    loop {
        let mut a = ComplexInterval::zero(prec);
        for (term, w) in terms.iter().zip(&pw) {
            a = a.add(&term.coeff.mul_real(w));
        }
        total = ru(prec, &total + a.abs().hi());
        t += 1;
        for (term, w) in terms.iter().zip(pw.iter_mut()) {
            *w = w.mul(&term.lambda).div_u64(t as u64);
        }
        lam_pow = ru(prec, &lam_pow * lam_max);
        lam_pow = ru(prec, &lam_pow / t as u32);
        // tail Σ_{s>=t} Σ|c| Λ^s/s! <= Σ|c| Λ^t/t! / (1 - Λ/(t+1)) once t+1 > 2Λ
        if (t + 1) as f64 > 2.0 * lam_f && t >= t_min.min(t_max) {
            let tail = ru(prec, &lam_pow * coeff_sum);
            let tail = ru(prec, &tail * 2u32);
            let small = tail <= Float::with_val(prec, &total >> 40u32);
            if small || t >= t_max {
                return (ru(prec, &total + &tail), t);
            }
        }
    }
}

/// For each of `m` equispaced circle points, the values `f^{(k)}(z)` for `k < order`.
fn circle_values(terms: &[Term], enc: &XEnclosure, m: usize, prec: u32, order: usize) -> Vec<Vec<ComplexInterval>> {
    let two_pi = RealInterval::pi(prec).mul_i64(2);
    let n = terms.iter().map(|t| t.idx.degree()).max().unwrap_or(0);
    (0..m)
        .into_par_iter()
        .map(|k| {
            let theta = two_pi.mul_i64(k as i64).div_u64(m as u64);
            let z = ComplexInterval::unit(&theta);
            let bases: Vec<ComplexInterval> =
                std::iter::once(z.exp()).chain(enc.xs.iter().map(|xl| z.mul_real(xl).exp())).collect();
            let powers: Vec<Vec<ComplexInterval>> = bases.iter().map(|b| power_table(b, n, prec)).collect();
            let mut out = vec![ComplexInterval::zero(prec); order];
            for term in terms {
                let mut mono = term.coeff.clone();
                for (l, e) in term.idx.exponents().enumerate() {
                    if e > 0 {
                        mono = mono.mul(&powers[l][e as usize]);
                    }
                }
                for slot in out.iter_mut() {
                    *slot = slot.add(&mono);
                    mono = mono.mul_real(&term.lambda);
                }
            }
            out
        })
        .collect()
}

/// Bound for `max |f|` over the arcs `z_k e^{is}`, `|s| <= h`, from the Taylor data at the samples.
///
/// With `w = z_k(e^{is} − 1) = i z_k s + r`, `|r| <= s²/2`, the linear part
/// `|a0 + a1 i z_k s|` is convex in `s` and peaks at `s = ±h`; the rest is
/// `|a1| h²/2 + Σ_{j>=2} |a_j| h^j / j!`.
fn taylor_max(values: &[Vec<ComplexInterval>], h: &Float, prec: u32) -> Float {
    let m = values.len();
    let two_pi = RealInterval::pi(prec).mul_i64(2);
    let h_iv = RealInterval::new(h.clone(), h.clone());
    values
        .par_iter()
        .enumerate()
        .map(|(k, v)| {
            let mut acc = v[0].abs().hi().clone();
            if v.len() > 1 {
                let theta = two_pi.mul_i64(k as i64).div_u64(m as u64);
                let z = ComplexInterval::unit(&theta);
                let step = ComplexInterval::new(z.im.neg(), z.re.clone()).mul(&v[1]).mul_real(&h_iv);
                let ends = v[0].add(&step).abs().hi().clone().max(v[0].sub(&step).abs().hi());
                let curv = ru(prec, &ru(prec, v[1].abs().hi() * &ru(prec, h * h)) / 2u32);
                acc = ru(prec, &ends + &curv);
            }
            let mut hk = Float::with_val(prec, h);
            for (j, d) in v.iter().enumerate().skip(2) {
                hk = ru(prec, &hk * h);
                hk = ru(prec, &hk / j as u32);
                acc = ru(prec, &acc + &ru(prec, d.abs().hi() * &hk));
            }
            acc
        })
        .reduce(|| Float::new(prec), |a, b| if b > a { b } else { a })
}

/// `Σ|c| Λ^K e^{Λ(1+h)} h^K / K!`: every circle point is within arc (hence
/// chord) `h = π/M` of a sample, and `|f^{(K)}| <= Σ|c| Λ^K e^{Λ(1+h)}` there.
fn taylor_remainder(coeff_sum: &Float, lam_max: &Float, h: &Float, prec: u32) -> Float {
    let k = TAYLOR_ORDER as u32;
    let mut rem = ru(prec, coeff_sum * &ru(prec, Pow::pow(lam_max, k)));
    let growth = ru(prec, lam_max * &ru(prec, h + 1u32));
    rem = ru(prec, &rem * &ru(prec, growth.exp_ref()));
    rem = ru(prec, &rem * &ru(prec, Pow::pow(h, k)));
    for i in 2..=k {
        rem = ru(prec, &rem / i);
    }
    rem
}

/// Outcome of a Bernstein–Walsh check at one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BwVerdict {
    Holds,
    Violated,
    Indeterminate,
}

/// Tests `|P(z)| <= ‖P‖_K · exp(e_upper) · exp(n log⁺ max_i |z_i|)` with certified
/// arithmetic; `n` is the degree bound of `P`.
pub fn bw_verdict(p: &Poly, x: &ExponentVector, z: &[ComplexInterval], e_upper: &LogMagnitude, ctx: &PrecisionContext) -> Result<BwVerdict> {
    let e = match e_upper.log_abs() {
        Some(e) => e.clone(),
        None => return Err(Error::InvalidInput("e_upper must be a nonzero magnitude".into())),
    };
    let k = k_norm(p, x, ctx.circle_samples.max(8), ctx)?.interval;
    match bw_verdict_with(p, &k, z, &e, ctx.bits()) {
        BwVerdict::Indeterminate => {
            let k = k_norm_adaptive(p, x, ctx)?.interval;
            Ok(bw_verdict_with(p, &k, z, &e, ctx.bits()))
        }
        v => Ok(v),
    }
}

/// [`bw_verdict`] against a precomputed enclosure `k` of `‖P‖_K` and the log-bound `e`.
pub fn bw_verdict_with(p: &Poly, k: &RealInterval, z: &[ComplexInterval], e: &RealInterval, bits: u32) -> BwVerdict {
    let prec = bits.max(p.coeff_prec());
    let val = p.eval(z, prec).abs();
    // n · log⁺ max |z_i|
    let mut max_mod = RealInterval::one(prec);
    for zi in z {
        max_mod = max_mod.max(&zi.abs());
    }
    let growth = max_mod.ln().expect("max modulus >= 1").mul_i64(i64::from(p.n()));
    if val.hi().is_zero() {
        return BwVerdict::Holds;
    }
    let rhs_lo = RealInterval::new(k.lo().clone(), k.lo().clone()).ln().map(|l| l.add(e).add(&growth));
    let lhs = RealInterval::new(val.hi().clone(), val.hi().clone()).ln().expect("positive");
    if let Some(r) = &rhs_lo {
        if lhs.hi() <= r.lo() {
            return BwVerdict::Holds;
        }
    }
    if val.lo() > &0 {
        let lhs_lo = RealInterval::new(val.lo().clone(), val.lo().clone()).ln().expect("positive");
        let rhs_hi = RealInterval::new(k.hi().clone(), k.hi().clone()).ln().map(|l| l.add(e).add(&growth));
        if let Some(r) = rhs_hi {
            if lhs_lo.lo() > r.hi() {
                return BwVerdict::Violated;
            }
        }
    }
    BwVerdict::Indeterminate
}

/// Whether the Bernstein–Walsh inequality is certified to hold at `z`.
pub fn bw_check(p: &Poly, x: &ExponentVector, z: &[ComplexInterval], e_upper: &LogMagnitude, ctx: &PrecisionContext) -> Result<bool> {
    Ok(bw_verdict(p, x, z, e_upper, ctx)? == BwVerdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::BigComplex;

    fn mono(n: u32, d: usize, j0: u32, j: Vec<u32>, c: f64) -> Poly {
        Poly::from_terms(n, d, [(MultiIndex::new(j0, j), BigComplex::from_f64(128, c, 0.0))]).unwrap()
    }

    fn point(re: f64, im: f64) -> ComplexInterval {
        BigComplex::from_f64(256, re, im).enclose(256)
    }

    #[test]
    fn fixture_grammar() {
        let x: ExponentVector = "1/3, -0.25, golden, sqrt2m1, liouville(2,2)".parse().unwrap();
        assert_eq!(x.d(), 5);
        assert_eq!(x.to_string(), "1/3,-0.25,golden,sqrt2m1,liouville(2,2)");
        assert!("3/2".parse::<ExponentVector>().is_err());
        assert!("bogus".parse::<ExponentVector>().is_err());
        assert_eq!(parse_decimal("1e-3").unwrap(), Rational::from((1, 1000)));
    }

    #[test]
    fn half_frequencies() {
        let x: ExponentVector = "0.5".parse().unwrap();
        let f = frequencies(1, &x, &PrecisionContext::default()).unwrap();
        let vals: Vec<f64> = f.entries.iter().map(|(_, l)| l.to_f64()).collect();
        assert_eq!(vals.len(), 3);
        for v in [0.0, 1.0, 0.5] {
            assert!(vals.contains(&v));
        }
        assert_eq!(f.min_gap.unwrap().to_f64(), 0.5);
    }

    #[test]
    fn unit_exponent_is_dependent() {
        let x: ExponentVector = "1".parse().unwrap();
        match frequencies(1, &x, &PrecisionContext::default()) {
            Err(Error::IndependenceViolation { exact, .. }) => assert!(exact),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn e_at_one() {
        let x = ExponentVector::golden();
        let v = eval_curve(&mono(1, 1, 1, vec![0], 1.0), &x, &point(1.0, 0.0), 256);
        assert!((v.re.to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!(v.im.contains_zero());
    }

    #[test]
    fn k_norm_trivial_cases() {
        let x = ExponentVector::golden();
        let ctx = PrecisionContext::default();
        let one = k_norm(&Poly::constant(1, 1, 128), &x, 64, &ctx).unwrap().interval;
        assert!(one.lo() <= &1 && one.hi() >= &1);
        assert!(one.hi().to_f64() - 1.0 < 1e-30);
        let e = k_norm(&mono(1, 1, 1, vec![0], 1.0), &x, 64, &ctx).unwrap().interval;
        let e_iv = RealInterval::one(256).exp();
        assert!(e.lo() <= e_iv.lo() && e.hi() >= e_iv.hi());
    }

    #[test]
    fn resonant_sum_is_small_on_the_disk() {
        // q = 3, p = 2: |f| <= 2 e^3 <3x>
        let x = ExponentVector::golden();
        let p = Poly::from_terms(
            3,
            1,
            [
                (MultiIndex::new(2, vec![0]), BigComplex::from_f64(128, 1.0, 0.0)),
                (MultiIndex::new(0, vec![3]), BigComplex::from_f64(128, -1.0, 0.0)),
            ],
        )
        .unwrap();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let bound = 2.0 * 3f64.exp() * (3.0 * g - 2.0).abs();
        for k in 0..64 {
            let t = k as f64 * std::f64::consts::TAU / 64.0;
            let v = eval_curve(&p, &x, &point(t.cos(), t.sin()), 256).abs();
            assert!(v.hi().to_f64() <= bound);
        }
    }

    #[test]
    fn bw_constant_on_polydisk() {
        let x = ExponentVector::golden();
        let ctx = PrecisionContext::default();
        let z = vec![point(0.5, 0.5), point(-1.0, 0.0)];
        let ok = bw_check(&Poly::constant(1, 1, 128), &x, &z, &LogMagnitude::one(256), &ctx).unwrap();
        assert!(ok);
    }
}
