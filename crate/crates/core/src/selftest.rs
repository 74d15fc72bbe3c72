//! Desk-scale validation suite: every acceptance criterion, each compared
//! against an oracle that does not share code with the routine under test.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Float, Integer};

use crate::asymptotics::{
    adaptive_simpson, check_estimate_chain, check_integral_lemma, check_sum_vs_integral, fit_chain_constants,
    fit_lower_constant, simplex_count, LemmaCheckResult,
};
use crate::curve::{bw_verdict_with, k_norm, k_norm_adaptive, BwVerdict, ExponentVector};
use crate::diophantine::{scan, Cone};
use crate::error::{Error, Result};
use crate::lower::{main_term, residual_bounds, resonance_lower, universal_lower, vanishing_poly, OptimizerConfig};
use crate::numerics::{BigComplex, BigReal, ComplexInterval, PrecisionContext, RealInterval, Sign};
use crate::poly::{dim_pn, multi_indices, MultiIndex, Poly};
use crate::report::bound_report;
use crate::upper::{beta_log, beta_table, cert_upper, lemma_dist_rhs, prop_beta_rhs};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// Degrees up to 6 and reduced sample counts.
    Quick,
    /// Reduced degree sweep, full sample counts.
    Default,
    /// The full acceptance sizes.
    Full,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    /// Smallest slack seen; negative when the check failed numerically.
    pub margin: Option<f64>,
    pub elapsed: Duration,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:<8} {} [{:.2?}]", if self.passed { "PASS" } else { "FAIL" }, self.id, self.title, self.elapsed)?;
        if let Some(m) = self.margin {
            write!(f, " margin={m:.6e}")?;
        }
        if !self.detail.is_empty() {
            write!(f, " :: {}", self.detail)?;
        }
        Ok(())
    }
}

struct Outcome {
    passed: bool,
    detail: String,
    margin: Option<f64>,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>, margin: Option<f64>) -> Self {
        Outcome { passed, detail: detail.into(), margin }
    }
}

pub const CRITERIA: [(&str, &str); 11] = [
    ("1", "combinatorics exactness"),
    ("2", "beta oracle equivalence"),
    ("3", "sandwich soundness"),
    ("4", "upper-bound growth shape"),
    ("5", "lower-bound growth shape and residuals"),
    ("6", "resonance mechanism"),
    ("7", "distance lemma sweep"),
    ("8", "integral lemma ratio"),
    ("9", "sum-vs-integral lemma"),
    ("10", "Bernstein-Walsh validation"),
    ("11", "golden-ratio scan sanity"),
];

pub const LEMMA_CHECKS: [(&str, &str); 3] = [
    ("L-chain", "estimate chain, d=1, golden, n=6"),
    ("L-factorB", "factor B bound with fitted K, d=2, n<=12"),
    ("L-beta", "fitted beta constant, d=1, sqrt2m1"),
];

fn run_one(id: &str, title: &str, f: impl FnOnce() -> Result<Outcome>) -> CheckResult {
    let t = Instant::now();
    let (passed, detail, margin) = match f() {
        Ok(o) => (o.passed, o.detail, o.margin),
        Err(e) => (false, format!("error: {e}"), None),
    };
    CheckResult { id: id.to_string(), title: title.to_string(), passed, detail, margin, elapsed: t.elapsed() }
}

/// Runs one acceptance criterion (`"1"` to `"11"`) or lemma check (`"L-…"`).
pub fn run_check(id: &str, scale: Scale, ctx: &PrecisionContext) -> Option<CheckResult> {
    let title = CRITERIA.iter().chain(LEMMA_CHECKS.iter()).find(|(i, _)| *i == id)?.1;
    let f: Box<dyn FnOnce() -> Result<Outcome>> = match id {
        "1" => Box::new(criterion_combinatorics),
        "2" => Box::new(move || criterion_beta_oracle(ctx)),
        "3" => Box::new(move || criterion_sandwich(scale, ctx)),
        "4" => Box::new(move || criterion_upper_growth(ctx)),
        "5" => Box::new(move || criterion_lower_growth(scale, ctx)),
        "6" => Box::new(move || criterion_resonance(scale, ctx)),
        "7" => Box::new(move || criterion_distance_lemma(scale, ctx)),
        "8" => Box::new(criterion_integral_ratio),
        "9" => Box::new(criterion_sum_vs_integral),
        "10" => Box::new(move || criterion_bernstein_walsh(scale, ctx)),
        "11" => Box::new(move || criterion_golden_scan(scale, ctx)),
        "L-chain" => Box::new(move || lemma_chain(ctx)),
        "L-factorB" => Box::new(move || lemma_factor_b(scale, ctx)),
        "L-beta" => Box::new(move || lemma_beta_fit(ctx)),
        _ => return None,
    };
    Some(run_one(id, title, f))
}

/// All criteria followed by the lemma checks.
pub fn run_all(scale: Scale, ctx: &PrecisionContext) -> Vec<CheckResult> {
    CRITERIA
        .iter()
        .chain(LEMMA_CHECKS.iter())
        .map(|(id, _)| run_check(id, scale, ctx).expect("known id"))
        .collect()
}

fn min_opt(a: Option<f64>, b: f64) -> Option<f64> {
    Some(a.map_or(b, |a| a.min(b)))
}

fn lemma_outcome(results: &[LemmaCheckResult]) -> Outcome {
    let mut margin = None;
    let mut bad = Vec::new();
    for r in results {
        margin = min_opt(margin, r.margin.to_f64());
        if !r.holds {
            bad.push(format!("{}({})", r.lemma, r.params));
        }
    }
    Outcome::new(bad.is_empty(), bad.join("; "), margin)
}

// ---- 1 ----

fn binomial_oracle(n: u64, k: u64) -> Integer {
    let mut num = Integer::from(1);
    let mut den = Integer::from(1);
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

fn count_tuples(len: usize, max: u32, pred: &dyn Fn(u32) -> bool) -> u64 {
    let mut count = 0;
    let mut t = vec![0u32; len];
    loop {
        if pred(t.iter().sum()) {
            count += 1;
        }
        let mut i = 0;
        while i < len {
            t[i] += 1;
            if t[i] <= max {
                break;
            }
            t[i] = 0;
            i += 1;
        }
        if i == len {
            return count;
        }
    }
}

fn criterion_combinatorics() -> Result<Outcome> {
    let mut bad = Vec::new();
    for d in 1..=4usize {
        for n in 0..=6u32 {
            let brute = count_tuples(d + 1, n, &|s| s <= n);
            if dim_pn(n, d) as u64 != brute || multi_indices(n, d).len() as u64 != brute {
                bad.push(format!("dim_pn({n},{d})"));
            }
            let brute = count_tuples(d, n, &|s| s == n);
            if simplex_count(n, d) as u64 != brute {
                bad.push(format!("simplex_count({n},{d})"));
            }
            let total: u128 = (0..=n).map(|m| simplex_count(m, d)).sum();
            if binomial_oracle(u64::from(n) + d as u64, d as u64) != total {
                bad.push(format!("cross identity n={n} d={d}"));
            }
        }
    }
    Ok(Outcome::new(bad.is_empty(), bad.join(", "), None))
}

// ---- 2 ----

/// `x` values computed directly from their closed forms.
fn oracle_x(name: &str, prec: u32) -> Float {
    match name {
        "0.5" => Float::with_val(prec, 0.5),
        "sqrt2m1" => Float::with_val(prec, Float::with_val(prec, 2).sqrt() - 1u32),
        "sqrt3m1" => Float::with_val(prec, Float::with_val(prec, 3).sqrt() - 1u32),
        "golden" => Float::with_val(prec, (Float::with_val(prec, 5).sqrt() - 1u32) / 2u32),
        _ => unreachable!("no oracle for {name}"),
    }
}

/// `log|β(ℓ, m)|` as one direct product of plain floats.
fn beta_oracle(idx: &MultiIndex, n: u32, xs: &[Float], prec: u32) -> (Float, Sign) {
    let lam = |i: &MultiIndex| {
        let mut v = Float::with_val(prec, i.j0);
        for (j, x) in i.j.iter().zip(xs) {
            v += Float::with_val(prec, x * *j);
        }
        v
    };
    let target = lam(idx);
    let mut prod = Float::with_val(prec, 1);
    for j in multi_indices(n, xs.len()) {
        if &j != idx {
            prod *= Float::with_val(prec, &target - lam(&j));
        }
    }
    let sign = if prod < 0 { Sign::Minus } else { Sign::Plus };
    (prod.abs().ln(), sign)
}

fn criterion_beta_oracle(ctx: &PrecisionContext) -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut margin: Option<f64> = None;
    let c1024 = PrecisionContext { mantissa_bits: 1024, ..ctx.clone() };
    let tol = Float::with_val(64, Float::i_exp(1, -900));

    // hand table
    let half: ExponentVector = "0.5".parse()?;
    let want = [(0.5, Sign::Plus), (0.5, Sign::Plus), (0.25, Sign::Minus)];
    for (idx, (v, s)) in multi_indices(1, 1).iter().zip(want) {
        let got = beta_log(idx, 1, &half, &c1024)?;
        let ok = got.sign() == Some(s)
            && got.log_abs().is_some_and(|l| l.contains(&Float::with_val(1024, v).ln()) || (l.mid() - Float::with_val(1024, v).ln()).abs() < tol);
        if !ok {
            bad.push(format!("hand table at {idx}"));
        }
    }
    for n in 2..=3 {
        match beta_table(n, &half, &c1024) {
            Err(Error::IndependenceViolation { .. }) => {}
            Err(e) => bad.push(format!("x=0.5 n={n}: unexpected error {e}")),
            Ok(_) => bad.push(format!("x=0.5 n={n}: expected a violation")),
        }
    }

    for names in [vec!["sqrt2m1"], vec!["sqrt2m1", "sqrt3m1"]] {
        let x: ExponentVector = names.join(",").parse()?;
        let xs: Vec<Float> = names.iter().map(|s| oracle_x(s, 1200)).collect();
        for n in 0..=3 {
            for idx in multi_indices(n, x.d()) {
                let got = beta_log(&idx, n, &x, &c1024)?;
                let (want, sign) = beta_oracle(&idx, n, &xs, 1200);
                let l = got.log_abs().expect("nonzero").mid();
                let err = Float::with_val(1200, &l - &want).abs();
                let rel = if want.is_zero() { err.clone() } else { Float::with_val(1200, &err / want.clone().abs()) };
                let bound = rel.clone().min(&err);
                margin = min_opt(margin, -bound.to_f64().max(f64::MIN_POSITIVE).log2());
                if bound > tol || got.sign() != Some(sign) {
                    bad.push(format!("{names:?} n={n} {idx}: log2 err {:.1}", bound.to_f64().log2()));
                }
            }
        }
    }
    Ok(Outcome::new(bad.is_empty(), bad.join("; "), margin.map(|m| m - 900.0)))
}

// ---- 3 ----

fn criterion_sandwich(scale: Scale, ctx: &PrecisionContext) -> Result<Outcome> {
    let (n1, n2) = match scale {
        Scale::Quick => (6, 4),
        Scale::Default => (12, 6),
        Scale::Full => (20, 8),
    };
    let cfg = OptimizerConfig::default();
    let mut jobs: Vec<(ExponentVector, u32)> = (2..=n1).map(|n| (ExponentVector::golden(), n)).collect();
    let x2: ExponentVector = "sqrt2m1,sqrt3m1".parse()?;
    jobs.extend((2..=n2).map(|n| (x2.clone(), n)));
    let mut bad = Vec::new();
    let mut margin = None;
    for (x, n) in jobs {
        let r = bound_report(n, &x, &cfg, ctx)?;
        let m = r.margin().to_f64();
        margin = min_opt(margin, m);
        if !r.sandwich_holds() || m < 0.0 {
            bad.push(format!("d={} n={n}", x.d()));
        }
    }
    Ok(Outcome::new(bad.is_empty(), bad.join(", "), margin))
}

// ---- 4 ----

fn growth_fit(x: &ExponentVector, coef: f64, train: std::ops::RangeInclusive<u32>, test: std::ops::RangeInclusive<u32>, ctx: &PrecisionContext) -> Result<(f64, f64)> {
    let d = x.d() as i32;
    let main = |n: u32| coef * f64::from(n).powi(d + 1) * f64::from(n).ln();
    let scale = |n: u32| f64::from(n).powi(d + 1);
    let upper = |n: u32| -> Result<f64> { Ok(cert_upper(n, x, ctx)?.log_abs().expect("positive").hi().to_f64()) };
    let mut c = f64::MIN;
    for n in train {
        c = c.max((upper(n)? - main(n)) / scale(n));
    }
    let slack = c + 0.1 * c.abs();
    let mut margin = f64::MAX;
    for n in test {
        margin = margin.min(main(n) + slack * scale(n) - upper(n)?);
    }
    Ok((c, margin))
}

fn criterion_upper_growth(ctx: &PrecisionContext) -> Result<Outcome> {
    let (c1, m1) = growth_fit(&ExponentVector::golden(), 0.5, 5..=12, 13..=20, ctx)?;
    let (c2, m2) = growth_fit(&"sqrt2m1,sqrt3m1".parse()?, 1.0 / 3.0, 3..=6, 7..=8, ctx)?;
    Ok(Outcome::new(m1 >= 0.0 && m2 >= 0.0, format!("C(d=1)={c1:.4}, C(d=2)={c2:.4}"), Some(m1.min(m2))))
}

// ---- 5 ----

fn criterion_lower_growth(scale: Scale, ctx: &PrecisionContext) -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut ratio_min = f64::MAX;
    for d in 1..=3usize {
        for n in 30..=100u32 {
            let ratio = universal_lower(n, d).to_f64() / main_term(n, d).to_f64();
            ratio_min = ratio_min.min(ratio);
            if ratio < 0.5 {
                bad.push(format!("ratio d={d} n={n} = {ratio:.4}"));
            }
        }
    }
    let n_max = if scale == Scale::Quick { 6 } else { 8 };
    let c512 = PrecisionContext { mantissa_bits: 512, ..ctx.clone() };
    let mut worst = f64::MIN;
    for x in [ExponentVector::golden(), "sqrt2m1,sqrt3m1".parse()?] {
        for n in 1..=n_max {
            let p = vanishing_poly(n, &x, &c512)?;
            let idx = multi_indices(n, x.d());
            let c: Vec<Float> = idx.iter().map(|i| p.coeff(i).map_or(Float::new(p.coeff_prec()), |v| v.re.clone())).collect();
            // interval evaluation at the precision the coefficients carry
            let enc = x.at(p.coeff_prec());
            for (r, sum) in residual_bounds(&c, &idx, &enc) {
                let rel = if r.is_zero() { -f64::INFINITY } else { r.to_f64().log2() - sum.to_f64().log2() };
                worst = worst.max(rel);
                if rel > -128.0 {
                    bad.push(format!("residual d={} n={n}: 2^{rel:.1}", x.d()));
                    break;
                }
            }
        }
    }
    let detail = format!("min ratio {ratio_min:.4}, worst log2 residual {worst:.1}{}{}", if bad.is_empty() { "" } else { "; " }, bad.join(", "));
    Ok(Outcome::new(bad.is_empty(), detail, Some((ratio_min - 0.5).min(-128.0 - worst))))
}

// ---- 6 ----

fn criterion_resonance(scale: Scale, ctx: &PrecisionContext) -> Result<Outcome> {
    let liou: ExponentVector = "liouville(2,2)".parse()?;
    let r = resonance_lower(&[4], &liou, ctx)?;
    let ratio = r.bound.to_f64() / main_term(r.n, 1).to_f64();
    let mut bad = Vec::new();
    if ratio < 2.0 {
        bad.push(format!("liouville ratio {ratio:.4} < 2"));
    }
    let q_max: i64 = if scale == Scale::Quick { 1000 } else { 10_000 };
    let g = ExponentVector::golden();
    let worst: Vec<(i64, f64)> = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let r = resonance_lower(&[q], &g, ctx)?;
            let main = main_term(r.n, 1).to_f64();
            let b = r.bound.to_f64();
            Ok((q, if main > 0.0 { 1.0 - b / main } else if b > 0.0 { -1.0 } else { 1.0 }))
        })
        .collect::<Result<_>>()?;
    let (wq, wm) = worst.iter().cloned().fold((0, f64::MAX), |a, b| if b.1 < a.1 { b } else { a });
    if wm < 0.0 {
        bad.push(format!("golden q={wq} exceeds the main term"));
    }
    let detail = format!("liouville bound {:.4} / main {:.4} = {ratio:.4}; golden tightest q={wq}", r.bound.to_f64(), main_term(r.n, 1).to_f64());
    Ok(Outcome::new(bad.is_empty(), if bad.is_empty() { detail } else { format!("{detail}; {}", bad.join(", ")) }, Some((ratio - 2.0).min(wm))))
}

// ---- 7 ----

fn criterion_distance_lemma(scale: Scale, ctx: &PrecisionContext) -> Result<Outcome> {
    let count = if scale == Scale::Quick { 1000 } else { 10_000 };
    let prec = ctx.bits();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut failures = 0;
    let mut margin = f64::MAX;
    for _ in 0..count {
        let xa: i64 = rng.gen_range(-30..=30);
        let yb = xa + rng.gen_range(0..=20);
        let mut a: f64 = rng.gen_range(-10.0..10.0);
        if a == a.round() {
            a += 0.5;
        }
        let alpha = RealInterval::from_f64(prec, a);
        let mut lhs = RealInterval::zero(prec);
        for j in xa..=yb {
            let f = RealInterval::from_i64(prec, j).sub(&alpha).abs();
            lhs = lhs.add(&f.ln().expect("alpha is not an integer"));
        }
        let rhs = lemma_dist_rhs(xa, yb, &alpha)?;
        let rhs = rhs.log_abs().expect("nonzero");
        margin = margin.min(lhs.sub(rhs).to_f64());
        if lhs.hi() < rhs.lo() {
            failures += 1;
        }
    }
    Ok(Outcome::new(failures == 0, format!("{count} instances, {failures} failures"), Some(margin)))
}

// ---- 8 ----

fn criterion_integral_ratio() -> Result<Outcome> {
    let n = 10_000u32;
    let mut bad = Vec::new();
    let mut margin = f64::MAX;
    let mut parts = Vec::new();
    for d in 1..=4usize {
        let r = check_integral_lemma(n, d, &BigReal::zero(64));
        let ratio = r.ratio.as_ref().expect("ratio").to_f64();
        let target = 1.0 / (d * (d + 1)) as f64;
        let dev = (ratio - target).abs();
        margin = margin.min(0.02 - dev);
        parts.push(format!("d={d}: {ratio:.5} vs {target:.5}"));
        if dev > 0.02 {
            bad.push(format!("d={d} deviation {dev:.5} > 0.02"));
        }
        let nf = f64::from(n);
        let quad = adaptive_simpson(&|x: f64| (nf - x).powi(d as i32 - 1) * x * x.ln(), 1.0, nf, 1e-13);
        let closed = r.lhs.to_f64();
        let rel = ((quad - closed) / closed).abs();
        if rel > 1e-10 {
            bad.push(format!("d={d} quadrature relative gap {rel:.2e}"));
        }
    }
    let detail = if bad.is_empty() { parts.join(", ") } else { format!("{}; {}", parts.join(", "), bad.join(", ")) };
    Ok(Outcome::new(bad.is_empty(), detail, Some(margin)))
}

// ---- 9 ----

fn criterion_sum_vs_integral() -> Result<Outcome> {
    let mut results = Vec::new();
    for d in 1..=3usize {
        for n in [10u32, 100, 1000] {
            results.push(check_sum_vs_integral(d, n));
        }
    }
    Ok(lemma_outcome(&results))
}

// ---- 10 ----

fn random_point(rng: &mut ChaCha8Rng, d: usize, prec: u32) -> Vec<ComplexInterval> {
    let r: f64 = rng.gen_range(1.0..=3.0);
    let top = rng.gen_range(0..=d);
    (0..=d)
        .map(|i| {
            let m = if i == top { r } else { rng.gen_range(0.0..=r) };
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            BigComplex::from_f64(prec, m * t.cos(), m * t.sin()).enclose(prec)
        })
        .collect()
}

fn criterion_bernstein_walsh(scale: Scale, ctx: &PrecisionContext) -> Result<Outcome> {
    let polys = if scale == Scale::Quick { 20 } else { 100 };
    let points = 20;
    let x = ExponentVector::golden();
    let prec = ctx.bits();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0xb0);
    let vanishing: Vec<Poly> = (1..=5).map(|n| vanishing_poly(n, &x, ctx)).collect::<Result<_>>()?;
    let mut cases = Vec::new();
    for i in 0..polys {
        let n = 1 + (i % 5) as u32;
        let p = if i % 2 == 0 {
            let terms: Vec<(MultiIndex, BigComplex)> = multi_indices(n, 1)
                .into_iter()
                .map(|idx| (idx, BigComplex::from_f64(128, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                .collect();
            Poly::from_terms(n, 1, terms)?
        } else {
            // a vanishing polynomial, rotated and perturbed by noise far below its K-norm
            let v = &vanishing[n as usize - 1];
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let terms: Vec<(MultiIndex, BigComplex)> = v
                .terms()
                .map(|(idx, c)| {
                    let (cr, ci) = (Float::with_val(prec, &c.re), Float::with_val(prec, &c.im));
                    let noise = rng.gen_range(-1.0..1.0) * 1e-40;
                    let re = Float::with_val(prec, &cr * t.cos()) - Float::with_val(prec, &ci * t.sin()) + noise;
                    let im = Float::with_val(prec, &cr * t.sin()) + Float::with_val(prec, &ci * t.cos());
                    (idx.clone(), BigComplex::new(re, im))
                })
                .collect();
            Poly::from_terms(n, 1, terms)?
        };
        let zs: Vec<Vec<ComplexInterval>> = (0..points).map(|_| random_point(&mut rng, 1, prec)).collect();
        cases.push((p, zs));
    }
    let uppers: Vec<RealInterval> = (1..=5).map(|n| Ok(cert_upper(n, &x, ctx)?.log_abs().expect("positive").clone())).collect::<Result<_>>()?;
    let verdicts: Vec<(usize, usize, usize)> = cases
        .par_iter()
        .map(|(p, zs)| {
            let n = p.n();
            let e = &uppers[n as usize - 1];
            let e_bad = e.sub(&RealInterval::from_i64(prec, i64::from(n * n)).mul(&RealInterval::from_i64(prec, i64::from(n)).ln().expect("n >= 1")));
            let mut k = k_norm(p, &x, ctx.circle_samples, ctx)?.interval;
            let mut refined = false;
            let mut holds = 0;
            let mut violated = 0;
            for z in zs {
                let mut good = bw_verdict_with(p, &k, z, e, prec);
                let mut bad = bw_verdict_with(p, &k, z, &e_bad, prec);
                if !refined && (good == BwVerdict::Indeterminate || bad == BwVerdict::Indeterminate) {
                    k = k_norm_adaptive(p, &x, ctx)?.interval;
                    refined = true;
                    good = bw_verdict_with(p, &k, z, e, prec);
                    bad = bw_verdict_with(p, &k, z, &e_bad, prec);
                }
                if good == BwVerdict::Holds {
                    holds += 1;
                }
                if bad == BwVerdict::Violated {
                    violated += 1;
                }
            }
            Ok((zs.len(), holds, violated))
        })
        .collect::<Result<_>>()?;
    let total: usize = verdicts.iter().map(|v| v.0).sum();
    let holds: usize = verdicts.iter().map(|v| v.1).sum();
    let violated: usize = verdicts.iter().map(|v| v.2).sum();
    let passed = holds == total && violated > 0;
    Ok(Outcome::new(passed, format!("{holds}/{total} certified with cert_upper; {violated} falsified with the corrupted bound"), None))
}

// ---- 11 ----

fn criterion_golden_scan(scale: Scale, ctx: &PrecisionContext) -> Result<Outcome> {
    let q_max: u32 = if scale == Scale::Quick { 1000 } else { 10_000 };
    let profile = scan(&ExponentVector::golden(), q_max, Cone::All, ctx)?;
    // running minima of the per-norm distances
    let mut records = Vec::new();
    let mut best: Option<Float> = None;
    for r in &profile.minima {
        let v = r.dist.mid();
        if best.as_ref().is_none_or(|b| &v < b) {
            best = Some(v);
            records.push(r);
        }
    }
    // continued-fraction oracle: convergent denominators of the golden ratio are Fibonacci numbers
    let mut fib = vec![1i64, 2];
    while fib[fib.len() - 1] + fib[fib.len() - 2] <= i64::from(q_max) {
        fib.push(fib[fib.len() - 1] + fib[fib.len() - 2]);
    }
    let prec = 256;
    let g = oracle_x("golden", prec);
    let mut bad = Vec::new();
    let record_q: Vec<i64> = records.iter().map(|r| r.q[0]).collect();
    if record_q != fib {
        bad.push(format!("record q {record_q:?} differ from Fibonacci {fib:?}"));
    }
    let mut margin = f64::MAX;
    let mut values = Vec::new();
    for &q in &fib {
        let t = Float::with_val(prec, &g * q);
        let dist = Float::with_val(prec, &t - t.clone().round()).abs();
        let v = (dist * q).to_f64();
        values.push(format!("{q}:{v:.4}"));
        margin = margin.min((v - 0.44).min(0.51 - v));
        if !(0.44..=0.51).contains(&v) {
            bad.push(format!("q={q}: q<q x> = {v:.4} outside [0.44, 0.51]"));
        }
    }
    let detail = format!("{}{}{}", values.join(" "), if bad.is_empty() { "" } else { "; " }, bad.join("; "));
    Ok(Outcome::new(bad.is_empty(), detail, Some(margin)))
}

// ---- lemma checks ----

fn lemma_chain(ctx: &PrecisionContext) -> Result<Outcome> {
    let g = ExponentVector::golden();
    let k = fit_chain_constants(1, &g, &[3, 4, 5], ctx)?;
    Ok(lemma_outcome(&check_estimate_chain(6, 1, &g, &k, ctx)?))
}

fn lemma_factor_b(scale: Scale, ctx: &PrecisionContext) -> Result<Outcome> {
    let x: ExponentVector = "sqrt2m1,sqrt3m1".parse()?;
    let k = fit_chain_constants(2, &x, &[3, 4, 5, 6], ctx)?;
    let top = if scale == Scale::Quick { 8 } else { 12 };
    let mut results = Vec::new();
    for n in 7..=top {
        results.extend(check_estimate_chain(n, 2, &x, &k, ctx)?.into_iter().filter(|r| r.lemma == "factor_b"));
    }
    Ok(lemma_outcome(&results))
}

fn lemma_beta_fit(ctx: &PrecisionContext) -> Result<Outcome> {
    let x: ExponentVector = "sqrt2m1".parse()?;
    let min_log = |n: u32| -> Result<f64> { Ok(beta_table(n, &x, ctx)?.min_log_beta.to_f64()) };
    let zero = BigReal::zero(64);
    let mut train = Vec::new();
    for n in 4..=12 {
        train.push((min_log(n)?, prop_beta_rhs(n, 1, &zero).to_f64(), f64::from(n * n)));
    }
    let c = fit_lower_constant(&train);
    let c_big = BigReal::from_f64(64, c);
    let mut margin = f64::MAX;
    for n in 13..=16 {
        margin = margin.min(min_log(n)? - prop_beta_rhs(n, 1, &c_big).to_f64());
    }
    Ok(Outcome::new(margin >= 0.0, format!("C = {c:.6}"), Some(margin)))
}

/// CSV with columns `id, title, passed, margin, detail` (no timings, so reruns are byte-identical).
pub fn write_csv<W: std::io::Write>(results: &[CheckResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "title", "passed", "margin", "detail"]).map_err(crate::diophantine::csv_err)?;
    for r in results {
        w.write_record([
            r.id.clone(),
            r.title.clone(),
            r.passed.to_string(),
            r.margin.map(|m| format!("{m:.9e}")).unwrap_or_default(),
            r.detail.clone(),
        ])
        .map_err(crate::diophantine::csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
    Ok(())
}
