//! Certified lower bounds on `e_n(x)`.
//!
//! Every bound here is a certified ratio `‖P‖_Δ / ‖P‖_K` for an explicit `P`,
//! or the universal bound, which needs no polynomial at all.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Assign, Float};

use crate::curve::{frequencies, k_norm_upper, ExponentVector, XEnclosure};
use crate::diophantine::nearest_int_dist;
use crate::error::{Error, Result};
use crate::numerics::{rd, BigComplex, BigReal, ComplexInterval, PrecisionContext, RealInterval};
use crate::upper::beta_table_with;
use crate::poly::{dim_pn, multi_indices, torus_samples, MultiIndex, Poly};

/// Precision used for the polydisk side of a ratio; values there are O(Σ|c|).
const POLYDISK_BITS: u32 = 128;

/// `max(0, N log(N/n) − N)` with `N = dim_pn(n, d) − 1`, rounded down.
pub fn universal_lower(n: u32, d: usize) -> BigReal {
    let prec = 128;
    if n == 0 {
        return BigReal::zero(prec);
    }
    let big_n = dim_pn(n, d) as i64 - 1;
    if big_n <= i64::from(n) {
        return BigReal::zero(prec);
    }
    let r = RealInterval::from_i64(prec, big_n).div(&RealInterval::from_i64(prec, i64::from(n))).expect("n >= 1");
    let v = r.ln().expect("positive").add_i64(-1).mul_i64(big_n);
    BigReal(clamp0(v.lo().clone()))
}

fn clamp0(v: Float) -> Float {
    if v < 0 {
        Float::new(v.prec())
    } else {
        v
    }
}

/// `n^{d+1} log n / ((d−1)! (d+1))`; zero for `n < 2`.
pub fn main_term(n: u32, d: usize) -> BigReal {
    let prec = 128;
    if n < 2 || d == 0 {
        return BigReal::zero(prec);
    }
    let nf = Float::with_val(prec, n);
    let mut v = Float::with_val(prec, nf.ln_ref());
    for _ in 0..=d {
        v *= n;
    }
    let mut denom = Float::with_val(prec, d as u32 + 1);
    for k in 2..d as u32 {
        denom *= k;
    }
    BigReal(v / denom)
}

/// A nonzero `P` of degree `n` whose curve pullback vanishes to order `N = dim_pn − 1` at 0.
pub fn vanishing_poly(n: u32, x: &ExponentVector, ctx: &PrecisionContext) -> Result<Poly> {
    let d = x.d();
    if n == 0 {
        return Ok(Poly::constant(0, d, ctx.bits()));
    }
    frequencies(n, x, ctx)?;
    let idx = multi_indices(n, d);
    let big_n = idx.len() - 1;
    let log2_lam = f64::from(n.max(2)).log2();
    // The kernel is proportional to 1/β, so its dynamic range is the spread of log|β|.
    let table = beta_table_with(n, x, ctx, true)?;
    let logs: Vec<f64> = table.entries.iter().map(|(_, v)| v.log_abs().expect("nonzero").to_f64()).collect();
    let spread = logs.iter().cloned().fold(f64::MIN, f64::max) - logs.iter().cloned().fold(f64::MAX, f64::min);
    let base = ctx.bits() + (big_n as f64 * log2_lam + spread / std::f64::consts::LN_2).ceil() as u32 + 64;
    let mut last = Error::SingularSystem { bits: base };
    for step in 0..=ctx.max_escalations {
        let prec = base << step;
        let enc = x.at(prec);
        match kernel_at(&idx, &enc, prec) {
            Ok(c) => match certify_residuals(&c, &idx, &enc, ctx.bits()) {
                true => {
                    let terms = idx.iter().cloned().zip(c.into_iter().map(BigComplex::real));
                    return Poly::from_terms(n, d, terms);
                }
                false => last = Error::SingularSystem { bits: prec },
            },
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Kernel of `Σ_i c_i λ_i^t = 0, t < N` by full-pivoting elimination on midpoints.
fn kernel_at(idx: &[MultiIndex], enc: &XEnclosure, prec: u32) -> Result<Vec<Float>> {
    let cols = idx.len();
    let rows = cols - 1;
    let lam: Vec<Float> = idx.iter().map(|i| enc.frequency(i).mid()).map(|v| Float::with_val(prec, v)).collect();
    let mut a: Vec<Vec<Float>> = Vec::with_capacity(rows);
    let mut row: Vec<Float> = vec![Float::with_val(prec, 1); cols];
    for _ in 0..rows {
        a.push(row.clone());
        for (r, l) in row.iter_mut().zip(&lam) {
            *r *= l;
        }
    }
    let scale = a.iter().flatten().map(|v| v.clone().abs()).fold(Float::new(prec), |m, v| if v > m { v } else { m });
    // A pivot below the rounding level of the largest entry is not distinguishable from 0.
    let tiny = Float::with_val(prec, &scale >> (prec - 64));
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut tmp = Float::new(prec);
    for k in 0..rows {
        let (mut pr, mut pc) = (k, k);
        let mut best = Float::new(prec);
        for (r, arow) in a.iter().enumerate().skip(k) {
            for (c, v) in arow.iter().enumerate().skip(k) {
                if v.clone().abs() > best {
                    best = v.clone().abs();
                    pr = r;
                    pc = c;
                }
            }
        }
        if best <= tiny {
            return Err(Error::SingularSystem { bits: prec });
        }
        a.swap(k, pr);
        for arow in a.iter_mut() {
            arow.swap(k, pc);
        }
        perm.swap(k, pc);
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for arow in rest.iter_mut() {
            if arow[k].is_zero() {
                continue;
            }
            let f = Float::with_val(prec, &arow[k] / &pivot_row[k]);
            for c in k + 1..cols {
                tmp.assign(&f * &pivot_row[c]);
                arow[c] -= &tmp;
            }
            arow[k].assign(0);
        }
    }
    let mut y = vec![Float::new(prec); cols];
    y[rows].assign(1);
    for k in (0..rows).rev() {
        let mut s = Float::new(prec);
        for c in k + 1..cols {
            tmp.assign(&a[k][c] * &y[c]);
            s += &tmp;
        }
        y[k] = -s / &a[k][k];
    }
    let mut c = vec![Float::new(prec); cols];
    for (j, v) in y.into_iter().enumerate() {
        c[perm[j]] = v;
    }
    let top = c.iter().map(|v| v.clone().abs()).fold(Float::new(prec), |m, v| if v > m { v } else { m });
    for v in c.iter_mut() {
        *v /= &top;
    }
    Ok(c)
}

/// `|f^{(t)}(0)| <= 2^{-bits/2} Σ|c|` for every `t < N`, in interval arithmetic.
fn certify_residuals(c: &[Float], idx: &[MultiIndex], enc: &XEnclosure, bits: u32) -> bool {
    residual_bounds(c, idx, enc).iter().all(|(r, sum)| {
        let tol = Float::with_val(enc.prec, sum >> (bits / 2));
        r <= &tol
    })
}

/// Upper bounds on `|Σ c_i λ_i^t|` and `Σ|c_i|` for `t < N`.
pub fn residual_bounds(c: &[Float], idx: &[MultiIndex], enc: &XEnclosure) -> Vec<(Float, Float)> {
    let prec = enc.prec;
    let lam: Vec<RealInterval> = idx.iter().map(|i| enc.frequency(i)).collect();
    let coeffs: Vec<RealInterval> = c.iter().map(|v| RealInterval::from_float(prec, v)).collect();
    let sum = coeffs.iter().fold(RealInterval::zero(prec), |s, v| s.add(&v.abs()));
    let mut pw: Vec<RealInterval> = coeffs;
    let mut out = Vec::with_capacity(idx.len() - 1);
    for _ in 0..idx.len() - 1 {
        let r = pw.iter().fold(RealInterval::zero(prec), |s, v| s.add(v));
        out.push((r.abs().hi().clone(), sum.hi().clone()));
        for (p, l) in pw.iter_mut().zip(&lam) {
            *p = p.mul(l);
        }
    }
    out
}

/// A certified ratio `log(‖P‖_Δ / ‖P‖_K)` with its two ingredients.
#[derive(Clone, Debug)]
pub struct PolyLower {
    /// `max(0, log(polydisk_lo / k_hi))`, rounded down.
    pub bound: BigReal,
    pub polydisk_lo: Float,
    pub k_hi: Float,
}

pub fn lower_from_poly(p: &Poly, x: &ExponentVector, ctx: &PrecisionContext) -> Result<PolyLower> {
    if p.is_zero() {
        return Err(Error::InvalidInput("lower_from_poly needs a nonzero polynomial".into()));
    }
    let samples = torus_samples(p.d(), ctx.torus_samples, ctx.seed, POLYDISK_BITS);
    let polydisk_lo = p.polydisk_lower(&samples, POLYDISK_BITS);
    let k_hi = k_norm_upper(p, x, ctx.circle_samples.max(8), ctx)?;
    let prec = ctx.bits();
    let bound = if polydisk_lo.is_zero() || k_hi.is_zero() {
        Float::new(prec)
    } else {
        let num = RealInterval::from_float(prec, &polydisk_lo).ln().expect("positive");
        let den = RealInterval::from_float(prec, &k_hi).ln().expect("positive");
        clamp0(num.sub(&den).lo().clone())
    };
    Ok(PolyLower { bound: BigReal(bound), polydisk_lo, k_hi })
}

/// The resonant polynomial for `q ≥ 0` with its degree and `p`.
///
/// `P = z0^p − ∏ z_l^{q_l}` for `p ≥ 0`, and `1 − z0^{|p|} ∏ z_l^{q_l}` for `p < 0`.
pub fn resonance_poly(q: &[i64], p: i64, prec: u32) -> Result<(Poly, u32)> {
    if q.iter().any(|v| *v < 0) || q.iter().all(|v| *v == 0) {
        return Err(Error::InvalidInput(format!("resonance needs q >= 0, q != 0, got {q:?}")));
    }
    let qsum: u32 = q.iter().map(|v| *v as u32).sum();
    let d = q.len();
    let qj: Vec<u32> = q.iter().map(|v| *v as u32).collect();
    let one = BigComplex::real(Float::with_val(prec, 1));
    let minus = BigComplex::real(Float::with_val(prec, -1));
    let (n, terms) = if p >= 0 {
        let n = (p as u32).max(qsum);
        (n, vec![(MultiIndex::new(p as u32, vec![0; d]), one), (MultiIndex::new(0, qj), minus)])
    } else {
        let n = p.unsigned_abs() as u32 + qsum;
        (n, vec![(MultiIndex::zero(d), one), (MultiIndex::new(p.unsigned_abs() as u32, qj), minus)])
    };
    Ok((Poly::from_terms(n, d, terms)?, n))
}

/// Certified resonance lower bound from one `q`.
#[derive(Clone, Debug)]
pub struct ResonanceBound {
    pub q: Vec<i64>,
    pub p: i64,
    pub n: u32,
    pub dist: RealInterval,
    /// `max(0, −n − log dist.hi)`, rounded down.
    pub bound: BigReal,
}

pub fn resonance_lower(q: &[i64], x: &ExponentVector, ctx: &PrecisionContext) -> Result<ResonanceBound> {
    if q.len() != x.d() {
        return Err(Error::InvalidInput(format!("q has {} entries, x has {}", q.len(), x.d())));
    }
    crate::numerics::with_escalation(ctx, |c| {
        let enc = x.at(c.bits());
        let t = enc.linear_form(0, q);
        let (p, dist) = nearest_int_dist(&t)?;
        let p = p.to_i64().ok_or_else(|| Error::InvalidInput("p overflows i64".into()))?;
        if dist.is_exact_zero() {
            return Err(Error::IndependenceViolation { q: q.to_vec(), p, exact: true });
        }
        if dist.contains_zero() {
            return Err(Error::undecided_independence(q.to_vec(), p, c.bits()));
        }
        let (_, n) = resonance_poly(q, p, 64)?;
        let prec = c.bits();
        let v = RealInterval::from_float(prec, dist.hi()).ln().expect("positive").neg().add_i64(-i64::from(n));
        Ok(ResonanceBound { q: q.to_vec(), p, n, dist, bound: BigReal(clamp0(v.lo().clone())) })
    })
}

/// Best resonance bound over `q ≥ 0` whose resonant polynomial has degree at most `n`.
pub fn best_resonance(n: u32, x: &ExponentVector, ctx: &PrecisionContext) -> Result<Option<ResonanceBound>> {
    let d = x.d();
    let mut best: Option<ResonanceBound> = None;
    let mut q = vec![0i64; d];
    let mut candidates = Vec::new();
    collect_nonneg(&mut q, 0, i64::from(n), &mut candidates);
    for q in candidates {
        if q.iter().all(|v| *v == 0) {
            continue;
        }
        let r = resonance_lower(&q, x, ctx)?;
        if r.n > n {
            continue;
        }
        if best.as_ref().is_none_or(|b| r.bound.0 > b.bound.0) {
            best = Some(r);
        }
    }
    Ok(best)
}

fn collect_nonneg(q: &mut [i64], pos: usize, budget: i64, out: &mut Vec<Vec<i64>>) {
    if pos == q.len() {
        out.push(q.to_vec());
        return;
    }
    for v in 0..=budget {
        q[pos] = v;
        collect_nonneg(q, pos + 1, budget - v, out);
    }
    q[pos] = 0;
}

#[derive(Clone, Debug)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub sweeps: usize,
    /// Torus points used by the search surrogate (certification uses the full set).
    pub surrogate_samples: usize,
    /// Largest `dim_pn` for which the search runs at all.
    pub budget: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 8, sweeps: 3, surrogate_samples: 64, budget: 120 }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizerResult {
    /// `max(universal_lower, best certified witness value)`.
    pub bound: BigReal,
    /// Certified value of the witness itself.
    pub witness_bound: BigReal,
    pub witness: Poly,
}

/// Multi-start coordinate ascent on real coefficients, warm-started from the
/// vanishing polynomial and the best resonant polynomial. Only the final
/// certification decides the reported value.
pub fn optimizer_lower(n: u32, x: &ExponentVector, cfg: &OptimizerConfig, ctx: &PrecisionContext) -> Result<OptimizerResult> {
    let d = x.d();
    if n == 0 {
        let zero = universal_lower(0, d);
        return Ok(OptimizerResult { bound: zero.clone(), witness_bound: zero, witness: Poly::constant(0, d, ctx.bits()) });
    }
    let vanishing = vanishing_poly(n, x, ctx)?;
    let v_lower = lower_from_poly(&vanishing, x, ctx)?.bound;
    let mut warm = vec![(vanishing, v_lower)];
    if let Some(r) = best_resonance(n, x, ctx)? {
        warm.push(resonance_warm_start(n, &r, x, ctx)?);
    }
    optimizer_from(n, x, cfg, ctx, warm)
}

/// The resonant polynomial of `r` lifted to degree `n`, with its certified value.
pub fn resonance_warm_start(n: u32, r: &ResonanceBound, x: &ExponentVector, ctx: &PrecisionContext) -> Result<(Poly, BigReal)> {
    let (p, _) = resonance_poly(&r.q, r.p, ctx.bits())?;
    let p = Poly::from_terms(n, x.d(), p.terms().map(|(i, c)| (i.clone(), c.clone())))?;
    let certified = lower_from_poly(&p, x, ctx)?.bound;
    let value = if certified.0 > r.bound.0 { certified } else { r.bound.clone() };
    Ok((p, value))
}

/// [`optimizer_lower`] with caller-supplied warm starts and their certified
/// values; the constant polynomial is always added.
pub fn optimizer_from(
    n: u32,
    x: &ExponentVector,
    cfg: &OptimizerConfig,
    ctx: &PrecisionContext,
    mut warm: Vec<(Poly, BigReal)>,
) -> Result<OptimizerResult> {
    let d = x.d();
    let universal = universal_lower(n, d);
    warm.insert(0, (Poly::constant(n, d, ctx.bits()), BigReal::zero(ctx.bits())));

    let mut best_idx = 0;
    for (i, (_, v)) in warm.iter().enumerate() {
        if v.0 > warm[best_idx].1 .0 {
            best_idx = i;
        }
    }
    let (mut witness, mut witness_bound) = warm[best_idx].clone();

    if dim_pn(n, d) <= cfg.budget && cfg.restarts > 0 {
        let search = Search::new(n, x, cfg, ctx);
        let starts: Vec<Vec<Float>> = warm.iter().map(|(p, _)| search.coefficients(p)).collect();
        let candidates: Vec<(Float, Vec<Float>)> = (0..cfg.restarts)
            .into_par_iter()
            .map(|r| search.run(&starts[r % starts.len()], ctx.seed.wrapping_add(r as u64), r >= starts.len()))
            .collect();
        // deterministic: highest surrogate, earliest restart on ties
        let mut top: Option<&(Float, Vec<Float>)> = None;
        for cand in &candidates {
            if top.is_none_or(|t| cand.0 > t.0) {
                top = Some(cand);
            }
        }
        if let Some((_, coeffs)) = top {
            let p = search.poly(coeffs)?;
            let v = lower_from_poly(&p, x, ctx)?.bound;
            if v.0 > witness_bound.0 {
                witness = p;
                witness_bound = v;
            }
        }
    }
    let bound = if universal.0 > witness_bound.0 { universal } else { witness_bound.clone() };
    Ok(OptimizerResult { bound, witness_bound, witness })
}

/// Midpoint-arithmetic surrogate of `log(‖P‖_Δ / ‖P‖_K)` with incremental updates.
struct Search {
    n: u32,
    d: usize,
    prec: u32,
    idx: Vec<MultiIndex>,
    /// `v[t][i] = λ_i^t / t!`
    v: Vec<Vec<Float>>,
    /// `mono[s][i]` = monomial `i` at torus point `s` (real and imaginary parts).
    mono: Vec<Vec<(Float, Float)>>,
    tail: Float,
    sweeps: usize,
}

struct State {
    c: Vec<Float>,
    a: Vec<Float>,
    vals: Vec<(Float, Float)>,
    csum: Float,
}

impl Search {
    fn new(n: u32, x: &ExponentVector, cfg: &OptimizerConfig, ctx: &PrecisionContext) -> Self {
        let d = x.d();
        let idx = multi_indices(n, d);
        let big_n = idx.len();
        let prec = ctx.bits() + (big_n as f64 * f64::from(n.max(2)).log2()).ceil() as u32 + 64;
        let enc = x.at(prec);
        let lam: Vec<Float> = idx.iter().map(|i| enc.frequency(i).mid()).collect();
        let terms = big_n + 2 * n as usize + 16;
        let mut v = Vec::with_capacity(terms);
        let mut row = vec![Float::with_val(prec, 1); big_n];
        for t in 0..terms {
            v.push(row.clone());
            for (r, l) in row.iter_mut().zip(&lam) {
                *r *= l;
                *r /= (t + 1) as u32;
            }
        }
        // Σ_{s>=T} Λ^s/s! per unit of Σ|c|, bounded by twice the first term.
        let mut tail = Float::with_val(prec, 2);
        for t in 1..=terms {
            tail *= n;
            tail /= t as u32;
        }
        let samples = torus_samples(d, cfg.surrogate_samples, ctx.seed, 64);
        let mono = samples
            .iter()
            .map(|w| {
                idx.iter()
                    .map(|i| {
                        let mut m = ComplexInterval::one(64);
                        for (k, e) in i.exponents().enumerate() {
                            m = m.mul(&w[k].powi(e));
                        }
                        let mid = m.mid();
                        (Float::with_val(prec, mid.re), Float::with_val(prec, mid.im))
                    })
                    .collect()
            })
            .collect();
        Search { n, d, prec, idx, v, mono, tail, sweeps: cfg.sweeps }
    }

    fn coefficients(&self, p: &Poly) -> Vec<Float> {
        self.idx
            .iter()
            .map(|i| p.coeff(i).map_or(Float::new(self.prec), |c| Float::with_val(self.prec, &c.re)))
            .collect()
    }

    fn poly(&self, c: &[Float]) -> Result<Poly> {
        let terms = self.idx.iter().cloned().zip(c.iter().map(|v| BigComplex::real(v.clone())));
        Poly::from_terms(self.n, self.d, terms)
    }

    fn state(&self, c: &[Float]) -> State {
        let prec = self.prec;
        let a = self
            .v
            .iter()
            .map(|row| row.iter().zip(c).fold(Float::new(prec), |s, (v, ci)| s + Float::with_val(prec, v * ci)))
            .collect();
        let vals = self
            .mono
            .iter()
            .map(|ms| {
                ms.iter().zip(c).fold((Float::new(prec), Float::new(prec)), |(re, im), ((mr, mi), ci)| {
                    (re + Float::with_val(prec, mr * ci), im + Float::with_val(prec, mi * ci))
                })
            })
            .collect();
        let csum = c.iter().fold(Float::new(prec), |s, v| s + v.clone().abs());
        State { c: c.to_vec(), a, vals, csum }
    }

    fn objective(&self, s: &State) -> Float {
        let prec = self.prec;
        let mut top = Float::new(prec);
        for (re, im) in &s.vals {
            let m = Float::with_val(prec, re.hypot_ref(im));
            if m > top {
                top = m;
            }
        }
        let mut k = Float::with_val(prec, &self.tail * &s.csum);
        for a in &s.a {
            k += a.clone().abs();
        }
        if top.is_zero() || k.is_zero() {
            return Float::with_val(prec, f64::NEG_INFINITY);
        }
        Float::with_val(prec, top.ln_ref()) - Float::with_val(prec, k.ln_ref())
    }

    fn shifted(&self, s: &State, i: usize, delta: &Float) -> State {
        let prec = self.prec;
        let mut out = State { c: s.c.clone(), a: s.a.clone(), vals: s.vals.clone(), csum: Float::new(prec) };
        out.c[i] += delta;
        for (a, row) in out.a.iter_mut().zip(&self.v) {
            *a += Float::with_val(prec, &row[i] * delta);
        }
        for (v, ms) in out.vals.iter_mut().zip(&self.mono) {
            v.0 += Float::with_val(prec, &ms[i].0 * delta);
            v.1 += Float::with_val(prec, &ms[i].1 * delta);
        }
        out.csum = out.c.iter().fold(Float::new(prec), |acc, v| acc + v.clone().abs());
        out
    }

    /// Coordinate ascent from `start`; returns the final surrogate and coefficients.
    fn run(&self, start: &[Float], seed: u64, perturb: bool) -> (Float, Vec<Float>) {
        let prec = self.prec;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = start.to_vec();
        if perturb {
            let scale = c.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max).max(1.0);
            for v in c.iter_mut() {
                let noise: f64 = rng.gen_range(-1.0..1.0);
                *v += Float::with_val(prec, noise * scale * 1e-3);
            }
        }
        let mut s = self.state(&c);
        let mut obj = self.objective(&s);
        for _ in 0..self.sweeps {
            let mut improved = false;
            for i in 0..self.idx.len() {
                let base = s.c[i].clone().abs();
                let step = if base.is_zero() { rd(prec, &s.csum >> 8u32) } else { base };
                for shift in [1u32, 4, 8] {
                    for sign in [1i32, -1] {
                        let delta = Float::with_val(prec, &step >> shift) * sign;
                        if delta.is_zero() {
                            continue;
                        }
                        let cand = self.shifted(&s, i, &delta);
                        let o = self.objective(&cand);
                        if o > obj {
                            obj = o;
                            s = cand;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        (obj, s.c)
    }
}
