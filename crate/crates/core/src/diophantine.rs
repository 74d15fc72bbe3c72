//! Nearest-integer distances `⟨q·x⟩`, exhaustive small-`q` scans, the
//! Diophantine exponent estimate and the W-statistic.

use std::io::Write;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer};
use serde::Serialize;

use crate::curve::{ExponentVector, XEnclosure, XEntry};
use crate::error::{Error, Result};
use crate::numerics::{decimal_string, rd, ru, with_escalation, BigReal, LogMagnitude, PrecisionContext, RealInterval, Sign};

/// Bit budget for the Liouville exponent `a_k` itself.
pub const LIOUVILLE_BIT_BUDGET: u64 = 100_000;

/// Largest scan depth accepted without `force` for each dimension.
pub fn scan_depth_budget(d: usize) -> Option<u32> {
    match d {
        1 => Some(10_000),
        2 => Some(300),
        3 => Some(60),
        _ => None,
    }
}

/// Nearest integer `p` to `t` and an enclosure of `⟨t⟩ = |t − p|`.
///
/// When `t` straddles a half-integer the enclosure is widened to cover both
/// candidates; it always lies inside `[0, 1/2]`.
pub fn nearest_int_dist(t: &RealInterval) -> Result<(Integer, RealInterval)> {
    let prec = t.prec();
    let quarter = Float::with_val(prec, 0.25);
    if t.width() >= quarter {
        return Err(Error::undecided("interval too wide for a nearest-integer decision", prec));
    }
    let (p, _) = t.mid().to_integer_round(rug::float::Round::Nearest).expect("finite midpoint");
    let s = t.sub(&RealInterval::from_integer(prec, &p)).abs();
    // ⟨t⟩ = g(|t − p|) with g(s) = min(s, 1 − s), unimodal with peak 1/2.
    let g = |v: &Float, up: bool| {
        let one_minus = if up { ru(prec, 1 - v.clone()) } else { rd(prec, 1 - v.clone()) };
        if one_minus < *v { one_minus } else { v.clone() }
    };
    let half = Float::with_val(prec, 0.5);
    let lo = {
        let a = g(s.lo(), false);
        let b = g(s.hi(), false);
        if b < a { b } else { a }
    };
    let hi = if s.lo() <= &half && s.hi() >= &half {
        half.clone()
    } else {
        let a = g(s.lo(), true);
        let b = g(s.hi(), true);
        if b > a { b } else { a }
    };
    let lo = if lo < 0 { Float::new(prec) } else { lo };
    let hi = if hi > half { half } else { hi };
    Ok((p, RealInterval::new(lo, hi)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Cone {
    /// Every `q ∈ Z^d \ {0}`.
    All,
    /// `q ∈ Z^d_{≥0} \ {0}`.
    NonNeg,
}

impl std::str::FromStr for Cone {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Cone::All),
            "nonneg" => Ok(Cone::NonNeg),
            _ => Err(Error::Parse(format!("cone must be 'all' or 'nonneg', got {s:?}"))),
        }
    }
}

/// One small linear form `q·x` with its nearest integer.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceRecord {
    pub q: Vec<i64>,
    pub p: i64,
    pub dist: RealInterval,
    pub norm: u64,
    /// Undefined for `‖q‖ = 1`.
    pub w_stat: Option<BigReal>,
}

impl ResonanceRecord {
    pub fn new(q: Vec<i64>, enc: &XEnclosure) -> Result<Self> {
        let norm = q.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        if norm == 0 {
            return Err(Error::InvalidInput("q must be nonzero".into()));
        }
        let t = enc.linear_form(0, &q);
        let (p, dist) = nearest_int_dist(&t)?;
        let p = p.to_i64().ok_or_else(|| Error::InvalidInput("nearest integer overflows i64".into()))?;
        if dist.is_exact_zero() {
            return Err(Error::IndependenceViolation { q, p, exact: true });
        }
        if dist.contains_zero() {
            return Err(Error::undecided_independence(q, p, enc.prec));
        }
        let mut rec = ResonanceRecord { q, p, dist, norm, w_stat: None };
        if norm >= 2 {
            rec.w_stat = Some(w_statistic(&rec, enc.xs.len())?);
        }
        Ok(rec)
    }
}

/// `(−log dist.hi) / (‖q‖^{d+1} log ‖q‖)`, rounded down.
pub fn w_statistic(r: &ResonanceRecord, d: usize) -> Result<BigReal> {
    if r.norm < 2 {
        return Err(Error::InvalidInput("w-statistic needs ‖q‖ >= 2".into()));
    }
    let prec = r.dist.prec();
    let hi = r.dist.hi();
    if hi.is_zero() {
        return Err(Error::InvalidInput("w-statistic needs a positive distance".into()));
    }
    let neg_log = RealInterval::from_float(prec, hi).ln().expect("positive").neg();
    let qn = RealInterval::from_integer(prec, &Integer::from(r.norm));
    let denom = qn.powi(d as u32 + 1).mul(&qn.ln().expect("positive"));
    let v = neg_log.div(&denom).expect("positive denominator");
    Ok(BigReal(v.lo().clone()))
}

/// Result of a scan: certified per-norm minima and the exponent estimate.
#[derive(Clone, Debug)]
pub struct DiophantineProfile {
    pub depth: u32,
    pub cone: Cone,
    pub d: usize,
    /// `minima[t - 1]` minimizes `⟨q·x⟩` over `‖q‖ = t`.
    pub minima: Vec<ResonanceRecord>,
    pub mu_hat: Option<BigReal>,
    pub eps_hat: Option<BigReal>,
    /// Set when `mu_hat < d`, which is impossible for correct arithmetic.
    pub dirichlet_violation: bool,
    pub bits: u32,
}

pub fn scan(x: &ExponentVector, depth: u32, cone: Cone, ctx: &PrecisionContext) -> Result<DiophantineProfile> {
    scan_with(x, depth, cone, ctx, false)
}

/// Exhaustive scan over `0 < ‖q‖ <= depth`. Since `⟨−q·x⟩ = ⟨q·x⟩`, the cone
/// `All` enumerates only the representative whose first nonzero entry is positive.
pub fn scan_with(x: &ExponentVector, depth: u32, cone: Cone, ctx: &PrecisionContext, force: bool) -> Result<DiophantineProfile> {
    if depth == 0 {
        return Err(Error::InvalidInput("scan depth must be >= 1".into()));
    }
    let d = x.d();
    if !force {
        match scan_depth_budget(d) {
            Some(limit) if depth <= limit => {}
            _ => {
                let size = d.saturating_mul((2 * depth as usize + 1).saturating_pow(d as u32));
                return Err(Error::BudgetExceeded { size, budget: budget_size(d) });
            }
        }
    }
    with_escalation(ctx, |c| scan_at(x, depth, cone, c.bits()))
}

fn budget_size(d: usize) -> usize {
    scan_depth_budget(d).map_or(0, |q| d * (2 * q as usize + 1).pow(d as u32))
}

fn scan_at(x: &ExponentVector, depth: u32, cone: Cone, prec: u32) -> Result<DiophantineProfile> {
    let enc = x.at(prec);
    let d = x.d();
    let minima: Vec<ResonanceRecord> = (1..=depth)
        .into_par_iter()
        .map(|t| shell_minimum(&enc, d, t, cone))
        .collect::<Result<_>>()?;

    let mut mu_hat: Option<Float> = None;
    for r in minima.iter().filter(|r| r.norm >= 2) {
        let v = mu_ratio(r, prec);
        if mu_hat.as_ref().is_none_or(|m| v > *m) {
            mu_hat = Some(v);
        }
    }
    let eps_hat = mu_hat.as_ref().map(|mu| {
        minima
            .iter()
            .map(|r| {
                let scale = RealInterval::from_i64(prec, r.norm as i64).ln().expect("norm >= 1");
                let pow = RealInterval::from_float(prec, mu).mul(&scale).exp();
                r.dist.mul(&pow).lo().clone()
            })
            .fold(None::<Float>, |acc, v| Some(match acc {
                Some(a) if a <= v => a,
                _ => v,
            }))
            .expect("nonempty")
    });
    let dirichlet_violation = mu_hat.as_ref().is_some_and(|m| *m < d as u32);
    Ok(DiophantineProfile {
        depth,
        cone,
        d,
        minima,
        mu_hat: mu_hat.map(BigReal),
        eps_hat: eps_hat.map(BigReal),
        dirichlet_violation,
        bits: prec,
    })
}

/// `(−log dist.hi) / log ‖q‖`, rounded down.
fn mu_ratio(r: &ResonanceRecord, prec: u32) -> Float {
    let neg_log = RealInterval::from_float(prec, r.dist.hi()).ln().expect("positive").neg();
    let l = RealInterval::from_i64(prec, r.norm as i64).ln().expect("positive");
    neg_log.div(&l).expect("norm >= 2").lo().clone()
}

/// Minimum of `⟨q·x⟩` over the shell `‖q‖ = t`.
fn shell_minimum(enc: &XEnclosure, d: usize, t: u32, cone: Cone) -> Result<ResonanceRecord> {
    let mut best: Option<ResonanceRecord> = None;
    let mut q = vec![0i64; d];
    let t = i64::from(t);
    let lo = match cone {
        Cone::All => -t,
        Cone::NonNeg => 0,
    };
    let mut err: Option<Error> = None;
    for_each_vector(&mut q, 0, lo, t, &mut |q| {
        if err.is_some() {
            return;
        }
        if q.iter().map(|v| v.abs()).max() != Some(t) {
            return;
        }
        if cone == Cone::All && q.iter().find(|v| **v != 0).is_some_and(|v| *v < 0) {
            return;
        }
        match ResonanceRecord::new(q.to_vec(), enc) {
            Ok(r) => {
                best = match best.take() {
                    None => Some(r),
                    Some(b) => match pick(b, r, enc.prec) {
                        Ok(w) => Some(w),
                        Err(e) => {
                            err = Some(e);
                            None
                        }
                    },
                }
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(best.expect("shell is nonempty"))
}

/// The smaller of two records; `a` wins exact ties because it comes first lexicographically.
fn pick(a: ResonanceRecord, b: ResonanceRecord, prec: u32) -> Result<ResonanceRecord> {
    if a.dist.hi() < b.dist.lo() || a.dist == b.dist {
        Ok(a)
    } else if b.dist.hi() < a.dist.lo() {
        Ok(b)
    } else {
        Err(Error::undecided(format!("cannot order ⟨q·x⟩ for q = {:?} and {:?}", a.q, b.q), prec))
    }
}

fn for_each_vector(q: &mut [i64], pos: usize, lo: i64, hi: i64, f: &mut impl FnMut(&[i64])) {
    if pos == q.len() {
        f(q);
        return;
    }
    for v in lo..=hi {
        q[pos] = v;
        for_each_vector(q, pos + 1, lo, hi, f);
    }
}

impl DiophantineProfile {
    /// CSV with columns `norm, q1..qd, p, dist_lo, dist_hi, w_stat`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["norm".to_string()];
        header.extend((1..=self.d).map(|l| format!("q{l}")));
        header.extend(["p", "dist_lo", "dist_hi", "w_stat"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.minima {
            let mut row = vec![r.norm.to_string()];
            row.extend(r.q.iter().map(i64::to_string));
            row.push(r.p.to_string());
            row.push(decimal_string(r.dist.lo()));
            row.push(decimal_string(r.dist.hi()));
            row.push(r.w_stat.as_ref().map(BigReal::to_decimal).unwrap_or_default());
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv output failed: {e}"))
}

/// `⟨b^{a_k} x⟩` for one partial-sum denominator of a Liouville fixture.
#[derive(Clone, Debug)]
pub struct LiouvilleRecord {
    pub k: usize,
    /// `a_k`, so that `q = base^{a_k}`.
    pub exponent: Integer,
    pub log_dist: LogMagnitude,
}

#[derive(Clone, Debug)]
pub struct LiouvilleFixture {
    pub base: u32,
    pub exponents: Vec<Integer>,
    pub entry: XEntry,
    pub x: ExponentVector,
    pub records: Vec<LiouvilleRecord>,
    /// The fixture is rational with a denominator small enough for scans to hit.
    pub degenerate: bool,
}

/// `x = Σ_{k <= k_max} base^{-a_k}` with `a_1 = 2` and `a_{k+1} = (k+1)·base^{2a_k}·a_k`.
pub fn liouville_fixture(base: u32, k_max: usize) -> Result<LiouvilleFixture> {
    if base < 2 {
        return Err(Error::InvalidInput("Liouville base must be >= 2".into()));
    }
    if k_max == 0 {
        return Err(Error::InvalidInput("Liouville k_max must be >= 1".into()));
    }
    let log2b = f64::from(base).log2();
    let mut exps = vec![Integer::from(2)];
    for k in 1..k_max {
        let a = &exps[k - 1];
        let needed = ((a.to_f64() * 2.0 * log2b).ceil() as u64).saturating_add(u64::from(a.significant_bits()) + 64);
        if needed > LIOUVILLE_BIT_BUDGET || a.to_u32().is_none() {
            return Err(Error::TowerOverflow { k: k + 1, needed_bits: needed, budget_bits: LIOUVILLE_BIT_BUDGET });
        }
        let shift = 2 * a.to_u32().expect("checked");
        let next = Integer::from(base).pow(shift) * a * Integer::from(k as u64 + 1);
        exps.push(next);
    }
    let prec = 256;
    let ln_b = RealInterval::from_i64(prec, i64::from(base)).ln().expect("base >= 2");
    let mut records = Vec::new();
    for k in 0..k_max.saturating_sub(1) {
        // b^{a_k}·Σ_{j>k} b^{-a_j} = b^{a_k - a_{k+1}}·(1 + δ), 0 <= δ <= 2^{-61}
        let gap = Integer::from(&exps[k + 1] - &exps[k]);
        let mut log = ln_b.mul(&RealInterval::from_integer(prec, &gap)).neg();
        if k + 2 < k_max {
            let (lo, hi) = log.into_bounds();
            log = RealInterval::new(lo, ru(prec, hi + Float::with_val(prec, Float::i_exp(1, -61))));
        }
        records.push(LiouvilleRecord { k: k + 1, exponent: exps[k].clone(), log_dist: LogMagnitude::new(log, Sign::Plus) });
    }
    let degenerate = exps[k_max - 1].to_f64() * log2b <= 16.0;
    let entry = XEntry::Liouville { base, exponents: exps.clone() };
    let x = ExponentVector::new(vec![entry.clone()])?;
    Ok(LiouvilleFixture { base, exponents: exps, entry, x, records, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: f64) -> RealInterval {
        RealInterval::from_f64(128, v)
    }

    fn close(a: &Float, b: f64) -> bool {
        (a.to_f64() - b).abs() < 1e-12
    }

    #[test]
    fn nearest_integer_examples() {
        let (p, d) = nearest_int_dist(&iv(2.3)).unwrap();
        assert_eq!(p, 2);
        assert!(close(d.lo(), 0.3) && close(d.hi(), 0.3));
        let (p, d) = nearest_int_dist(&iv(-1.7)).unwrap();
        assert_eq!(p, -2);
        assert!(close(d.hi(), 0.3));
        let (p, d) = nearest_int_dist(&iv(5.0)).unwrap();
        assert_eq!(p, 5);
        assert!(d.is_exact_zero());
    }

    #[test]
    fn straddling_half_is_capped() {
        let t = RealInterval::new(Float::with_val(64, 0.49), Float::with_val(64, 0.51));
        let (_, d) = nearest_int_dist(&t).unwrap();
        assert_eq!(d.hi(), &0.5);
        assert!(d.lo() <= &0.49 && d.lo() > &0.48);
        let wide = RealInterval::new(Float::with_val(64, 0.0), Float::with_val(64, 0.3));
        assert!(nearest_int_dist(&wide).unwrap_err().is_indeterminate());
    }

    #[test]
    fn w_statistic_formula() {
        let r = ResonanceRecord { q: vec![2], p: 0, dist: RealInterval::from_i64(256, -16).exp(), norm: 2, w_stat: None };
        let w = w_statistic(&r, 1).unwrap();
        assert!((w.to_f64() - 16.0 / (4.0 * 2f64.ln())).abs() < 1e-9);
        let w3 = w_statistic(&r, 2).unwrap();
        assert!((w3.to_f64() - 16.0 / (8.0 * 2f64.ln())).abs() < 1e-9);
        let one = ResonanceRecord { norm: 1, ..r };
        assert!(w_statistic(&one, 1).is_err());
    }

    #[test]
    fn rational_scan_hits_dependence() {
        let x = ExponentVector::from_rationals(&[(1, 2)]).unwrap();
        let err = scan(&x, 3, Cone::All, &PrecisionContext::default()).unwrap_err();
        assert!(matches!(err, Error::IndependenceViolation { ref q, p: 1, exact: true } if q == &vec![2]));
    }

    #[test]
    fn liouville_exponents() {
        let f = liouville_fixture(2, 1).unwrap();
        assert!(f.degenerate);
        assert_eq!(f.entry.exact().unwrap(), rug::Rational::from((1, 4)));
        let f = liouville_fixture(2, 3).unwrap();
        assert_eq!(f.exponents[1], 64);
        assert_eq!(f.exponents[2], Integer::from(3) << 134u32);
        assert!(!f.degenerate);
        assert!(matches!(liouville_fixture(2, 4), Err(Error::TowerOverflow { k: 4, .. })));
    }

    #[test]
    fn budget_guard() {
        let x = ExponentVector::golden();
        assert!(matches!(scan(&x, 20_000, Cone::All, &PrecisionContext::default()), Err(Error::BudgetExceeded { .. })));
    }
}
