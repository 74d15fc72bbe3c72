//! β-product tables and the certified upper bound on `e_n(x)`.

use std::io::Write;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::curve::{ExponentVector, XEnclosure};
use crate::diophantine::{csv_err, nearest_int_dist};
use crate::error::{Error, Result};
use crate::numerics::{decimal_string, ru, with_escalation, BigReal, LogMagnitude, PrecisionContext, RealInterval, Sign};
use crate::poly::{dim_pn, multi_indices, MultiIndex};

/// Largest `dim_pn` handled without an explicit override.
pub const BETA_TABLE_BUDGET: usize = 3000;

/// Factors multiplied directly before taking a logarithm.
const CHUNK: usize = 128;

/// `log|β(ℓ, m)|` with the sign of `β`.
pub fn beta_log(idx: &MultiIndex, n: u32, x: &ExponentVector, ctx: &PrecisionContext) -> Result<LogMagnitude> {
    check_index(idx, n, x)?;
    with_escalation(ctx, |c| {
        let enc = x.at(c.bits());
        let freqs = frequency_list(n, &enc);
        let pos = freqs.iter().position(|(j, _)| j == idx).expect("index in range");
        beta_at(pos, &freqs, &enc)
    })
}

fn check_index(idx: &MultiIndex, n: u32, x: &ExponentVector) -> Result<()> {
    if idx.d() != x.d() {
        return Err(Error::InvalidInput(format!("multi-index {idx} does not match d = {}", x.d())));
    }
    if idx.degree() > n {
        return Err(Error::InvalidInput(format!("multi-index {idx} has degree above {n}")));
    }
    Ok(())
}

fn frequency_list(n: u32, enc: &XEnclosure) -> Vec<(MultiIndex, RealInterval)> {
    multi_indices(n, enc.xs.len()).into_iter().map(|i| {
        let lam = enc.frequency(&i);
        (i, lam)
    }).collect()
}

/// Product over `j ≠ i` of `λ_i − λ_j`, accumulated in chunks and summed in the log domain.
fn beta_at(i: usize, freqs: &[(MultiIndex, RealInterval)], enc: &XEnclosure) -> Result<LogMagnitude> {
    let prec = enc.prec;
    let (ref idx_i, ref lam_i) = freqs[i];
    let mut sign = Sign::Plus;
    let mut log = RealInterval::zero(prec);
    let mut chunk = RealInterval::one(prec);
    let mut in_chunk = 0;
    for (j, (idx_j, lam_j)) in freqs.iter().enumerate() {
        if j == i {
            continue;
        }
        let mut f = lam_i.sub(lam_j);
        if f.contains_zero() {
            // Re-derive the difference from the exact linear form to tell an
            // exact zero from a precision problem.
            let k: Vec<i64> = idx_i.j.iter().zip(&idx_j.j).map(|(a, b)| i64::from(*a) - i64::from(*b)).collect();
            let k0 = i64::from(idx_i.j0) - i64::from(idx_j.j0);
            enc.separated(k0, &k)?;
            f = enc.linear_form(k0, &k);
        }
        if f.sign() == Some(Sign::Minus) {
            sign = sign * Sign::Minus;
        }
        chunk = chunk.mul(&f.abs());
        in_chunk += 1;
        if in_chunk == CHUNK {
            log = log.add(&chunk.ln().expect("positive factors"));
            chunk = RealInterval::one(prec);
            in_chunk = 0;
        }
    }
    log = log.add(&chunk.ln().expect("positive factors"));
    Ok(LogMagnitude::new(log, sign))
}

/// All `log|β(ℓ, m)|` for degree `n` in graded-lex order.
#[derive(Clone, Debug)]
pub struct BetaTable {
    pub n: u32,
    pub d: usize,
    pub entries: Vec<(MultiIndex, LogMagnitude)>,
    /// Position of the entry with the smallest `log|β|` (ties go to the earlier index).
    pub min_index: usize,
    /// Certified enclosure of `min log|β|` over the table.
    pub min_log_beta: RealInterval,
    pub bits: u32,
}

impl BetaTable {
    pub fn min_entry(&self) -> (&MultiIndex, &LogMagnitude) {
        let (i, v) = &self.entries[self.min_index];
        (i, v)
    }

    /// CSV with columns `l, m1..md, log_beta, sign`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["l".to_string()];
        header.extend((1..=self.d).map(|k| format!("m{k}")));
        header.push("log_beta".into());
        header.push("sign".into());
        w.write_record(&header).map_err(csv_err)?;
        for (idx, v) in &self.entries {
            let mut row = vec![idx.j0.to_string()];
            row.extend(idx.j.iter().map(u32::to_string));
            row.push(decimal_string(&v.log_abs().expect("nonzero entry").mid()));
            row.push(v.sign().expect("nonzero entry").to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
        Ok(())
    }
}

pub fn beta_table(n: u32, x: &ExponentVector, ctx: &PrecisionContext) -> Result<BetaTable> {
    beta_table_with(n, x, ctx, false)
}

/// `beta_table` with the size guard optionally lifted.
pub fn beta_table_with(n: u32, x: &ExponentVector, ctx: &PrecisionContext, force: bool) -> Result<BetaTable> {
    let size = dim_pn(n, x.d());
    if size > BETA_TABLE_BUDGET && !force {
        return Err(Error::BudgetExceeded { size, budget: BETA_TABLE_BUDGET });
    }
    with_escalation(ctx, |c| {
        let enc = x.at(c.bits());
        let freqs = frequency_list(n, &enc);
        let values: Vec<LogMagnitude> =
            (0..freqs.len()).into_par_iter().map(|i| beta_at(i, &freqs, &enc)).collect::<Result<_>>()?;
        let mut min_index = 0;
        let mut min_log = values[0].log_abs().expect("nonzero").clone();
        for (i, v) in values.iter().enumerate().skip(1) {
            let l = v.log_abs().expect("nonzero");
            if l.mid() < values[min_index].log_abs().expect("nonzero").mid() {
                min_index = i;
            }
            min_log = min_log.min(l);
        }
        let entries = freqs.into_iter().map(|(i, _)| i).zip(values).collect();
        Ok(BetaTable { n, d: x.d(), entries, min_index, min_log_beta: min_log, bits: c.bits() })
    })
}

/// Lower bound for `log ∏_{j=xa}^{yb} |j − α|`: `log(⟨α⟩·((yb−xa)/(2e))^{yb−xa})`, with `0^0 = 1`.
pub fn lemma_dist_rhs(xa: i64, yb: i64, alpha: &RealInterval) -> Result<LogMagnitude> {
    if xa > yb {
        return Err(Error::InvalidInput(format!("lemma_dist_rhs needs xa <= yb, got {xa} > {yb}")));
    }
    let prec = alpha.prec();
    let (_, dist) = nearest_int_dist(alpha)?;
    if dist.is_exact_zero() {
        return Ok(LogMagnitude::Zero);
    }
    let mut log = match dist.ln() {
        Some(l) => l,
        None => return Err(Error::undecided("⟨α⟩ not separated from 0", prec)),
    };
    let k = yb - xa;
    if k > 0 {
        let two_e = RealInterval::one(prec).exp().mul_i64(2);
        let ratio = RealInterval::from_i64(prec, k).div(&two_e).expect("positive");
        log = log.add(&ratio.ln().expect("positive").mul_i64(k));
    }
    Ok(LogMagnitude::new(log, Sign::Plus))
}

/// `n^{d+1} log n / (d+1)! − C n^{d+1}`.
pub fn prop_beta_rhs(n: u32, d: usize, c: &BigReal) -> BigReal {
    let prec = c.bits().max(128);
    let nf = Float::with_val(prec, n);
    let nd = Float::with_val(prec, (&nf).pow(d as u32 + 1));
    let mut fact = Float::with_val(prec, 1);
    for k in 2..=(d as u32 + 1) {
        fact *= k;
    }
    let main = Float::with_val(prec, &nd * Float::with_val(prec, nf.ln_ref())) / fact;
    BigReal(main - Float::with_val(prec, &nd * c.as_float()))
}

/// `e_upper = N log(N+n) + log(N+1) − min log|β|` with `N = dim_pn − 1`,
/// rounded upward. `n = 0` gives 0.
pub fn cert_upper(n: u32, x: &ExponentVector, ctx: &PrecisionContext) -> Result<LogMagnitude> {
    if n == 0 {
        return Ok(LogMagnitude::one(ctx.bits()));
    }
    let table = beta_table(n, x, ctx)?;
    Ok(cert_upper_from_table(&table))
}

pub fn cert_upper_from_table(table: &BetaTable) -> LogMagnitude {
    let prec = table.bits;
    if table.n == 0 {
        return LogMagnitude::one(prec);
    }
    let big_n = dim_pn(table.n, table.d) as i64 - 1;
    let a = RealInterval::from_i64(prec, big_n + i64::from(table.n)).ln().expect("positive").mul_i64(big_n);
    let b = RealInterval::from_i64(prec, big_n + 1).ln().expect("positive");
    let e = a.add(&b).sub(&table.min_log_beta);
    // Only the upper end is certified as an upper bound; keep it as the whole interval's top.
    let hi = ru(prec, e.hi());
    LogMagnitude::new(RealInterval::new(e.lo().clone(), hi), Sign::Plus)
}

/// Coefficients `a_t` of `R_{ℓ,m}(λ) = ∏_{(j0,j) ≠ (ℓ,m)} (λ − λ(j0, j))`, lowest degree first.
pub fn r_poly_coeffs(idx: &MultiIndex, n: u32, x: &ExponentVector, prec: u32) -> Vec<RealInterval> {
    let enc = x.at(prec);
    let mut coeffs = vec![RealInterval::one(prec)];
    for j in multi_indices(n, x.d()) {
        if &j == idx {
            continue;
        }
        let root = enc.frequency(&j);
        let mut next = vec![RealInterval::zero(prec); coeffs.len() + 1];
        for (t, c) in coeffs.iter().enumerate() {
            next[t + 1] = next[t + 1].add(c);
            next[t] = next[t].sub(&c.mul(&root));
        }
        coeffs = next;
    }
    coeffs
}

/// `Σ a_t λ^t` by Horner's rule.
pub fn eval_real_poly(coeffs: &[RealInterval], lambda: &RealInterval) -> RealInterval {
    let prec = lambda.prec();
    coeffs.iter().rev().fold(RealInterval::zero(prec), |acc, c| acc.mul(lambda).add(c))
}
