//! Per-degree bound reports and their JSON / CSV renderings.

use std::io::Write;

use rug::float::Round;
use rug::Float;
use serde::Serialize;

use crate::curve::ExponentVector;
use crate::diophantine::{csv_err, Cone, DiophantineProfile};
use crate::error::{Error, Result};
use crate::lower::{
    best_resonance, lower_from_poly, main_term, optimizer_from, resonance_warm_start, universal_lower, vanishing_poly,
    OptimizerConfig, ResonanceBound,
};
use crate::numerics::{decimal_digits, BigReal, PrecisionContext};
use crate::poly::{Poly, PolyRecord};
use crate::numerics::{decimal_string, trim_zeros};
use crate::upper::{cert_upper, BetaTable};

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub n: u32,
    pub d: usize,
    pub x: String,
    pub bits: u32,
    pub lower_universal: BigReal,
    pub lower_vanishing: BigReal,
    pub lower_resonance: Option<ResonanceBound>,
    pub lower_optimizer: BigReal,
    pub witness: Poly,
    pub upper_cert: BigReal,
    pub asymptote: BigReal,
}

impl BoundReport {
    pub fn best_lower(&self) -> &BigReal {
        let mut best = &self.lower_universal;
        for v in [Some(&self.lower_vanishing), self.lower_resonance.as_ref().map(|r| &r.bound), Some(&self.lower_optimizer)]
            .into_iter()
            .flatten()
        {
            if v.0 > best.0 {
                best = v;
            }
        }
        best
    }

    /// `upper_cert − max(lowers)`.
    pub fn margin(&self) -> BigReal {
        let prec = self.upper_cert.bits().max(self.best_lower().bits());
        BigReal(Float::with_val_round(prec, &self.upper_cert.0 - &self.best_lower().0, Round::Down).0)
    }

    pub fn sandwich_holds(&self) -> bool {
        self.best_lower().0 <= self.upper_cert.0 && [&self.lower_universal, &self.lower_vanishing, &self.lower_optimizer].iter().all(|v| v.0 >= 0)
    }

    pub fn to_record(&self) -> ReportRecord {
        let lo = |v: &BigReal| Decimal::new(v, self.bits, Round::Down);
        ReportRecord {
            n: self.n,
            d: self.d,
            x: self.x.clone(),
            bits: self.bits,
            lower_universal: lo(&self.lower_universal),
            lower_vanishing: lo(&self.lower_vanishing),
            lower_resonance: self.lower_resonance.as_ref().map(|r| ResonanceField {
                bound: lo(&r.bound),
                q: r.q.clone(),
                p: r.p,
                n: r.n,
            }),
            lower_optimizer: lo(&self.lower_optimizer),
            upper_cert: Decimal::new(&self.upper_cert, self.bits, Round::Up),
            asymptote: Decimal::new(&self.asymptote, self.bits, Round::Nearest),
            witness: self.witness.to_record(),
        }
    }
}

/// A real value rendered as a decimal string, rounded in a stated direction.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Decimal {
    pub value: String,
    pub bits: u32,
}

impl Decimal {
    pub fn new(v: &BigReal, bits: u32, round: Round) -> Self {
        let value = if v.0.is_zero() {
            "0".to_string()
        } else {
            trim_zeros(v.0.to_string_radix_round(10, Some(decimal_digits(bits.min(v.bits()))), round))
        };
        Decimal { value, bits }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceField {
    pub bound: Decimal,
    pub q: Vec<i64>,
    pub p: i64,
    pub n: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRecord {
    pub n: u32,
    pub d: usize,
    pub x: String,
    pub bits: u32,
    pub lower_universal: Decimal,
    pub lower_vanishing: Decimal,
    pub lower_resonance: Option<ResonanceField>,
    pub lower_optimizer: Decimal,
    pub upper_cert: Decimal,
    pub asymptote: Decimal,
    pub witness: PolyRecord,
}

pub const REPORT_CSV_HEADER: [&str; 12] = [
    "n",
    "d",
    "x",
    "bits",
    "lower_universal",
    "lower_vanishing",
    "lower_resonance",
    "resonance_q",
    "resonance_p",
    "lower_optimizer",
    "upper_cert",
    "asymptote",
];

/// JSON array of report records.
pub fn write_reports_json<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let records: Vec<ReportRecord> = reports.iter().map(BoundReport::to_record).collect();
    write_json(&records, out)
}

/// CSV with the columns of [`REPORT_CSV_HEADER`]; `resonance_q` is `;`-separated.
pub fn write_reports_csv<W: Write>(reports: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        let rec = r.to_record();
        let (res, q, p) = match &rec.lower_resonance {
            Some(f) => (
                f.bound.value.clone(),
                f.q.iter().map(i64::to_string).collect::<Vec<_>>().join(";"),
                f.p.to_string(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        w.write_record([
            rec.n.to_string(),
            rec.d.to_string(),
            rec.x,
            rec.bits.to_string(),
            rec.lower_universal.value,
            rec.lower_vanishing.value,
            res,
            q,
            p,
            rec.lower_optimizer.value,
            rec.upper_cert.value,
            rec.asymptote.value,
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
    Ok(())
}

/// All bounds for one degree. The vanishing and resonant polynomials are
/// certified once and reused as optimizer warm starts.
pub fn bound_report(n: u32, x: &ExponentVector, cfg: &OptimizerConfig, ctx: &PrecisionContext) -> Result<BoundReport> {
    let d = x.d();
    let upper = cert_upper(n, x, ctx)?;
    let upper_cert = BigReal(upper.log_abs().expect("positive").hi().clone());
    let vanishing = vanishing_poly(n, x, ctx)?;
    let lower_vanishing = lower_from_poly(&vanishing, x, ctx)?.bound;
    let mut warm = vec![(vanishing, lower_vanishing.clone())];
    let resonance = if n == 0 { None } else { best_resonance(n, x, ctx)? };
    if let Some(r) = &resonance {
        warm.push(resonance_warm_start(n, r, x, ctx)?);
    }
    let opt = optimizer_from(n, x, cfg, ctx, warm)?;
    Ok(BoundReport {
        n,
        d,
        x: x.to_string(),
        bits: ctx.bits(),
        lower_universal: universal_lower(n, d),
        lower_vanishing,
        lower_resonance: resonance,
        lower_optimizer: opt.bound,
        witness: opt.witness,
        upper_cert,
        asymptote: main_term(n, d),
    })
}

fn write_json<W: Write, T: Serialize>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::InvalidInput(format!("json: {e}")))?;
    writeln!(out).map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
    Ok(())
}

#[derive(Serialize)]
struct ProfileRow {
    norm: u64,
    q: Vec<i64>,
    p: i64,
    dist_lo: String,
    dist_hi: String,
    w_stat: Option<String>,
}

#[derive(Serialize)]
struct ProfileDoc {
    d: usize,
    cone: Cone,
    depth: u32,
    bits: u32,
    mu_hat: Option<Decimal>,
    eps_hat: Option<Decimal>,
    dirichlet_violation: bool,
    minima: Vec<ProfileRow>,
}

/// JSON form of a scan; distances are the certified interval ends.
pub fn write_profile_json<W: Write>(profile: &DiophantineProfile, out: W) -> Result<()> {
    let dec = |v: &BigReal| Decimal::new(v, profile.bits, Round::Nearest);
    let doc = ProfileDoc {
        d: profile.d,
        cone: profile.cone,
        depth: profile.depth,
        bits: profile.bits,
        mu_hat: profile.mu_hat.as_ref().map(dec),
        eps_hat: profile.eps_hat.as_ref().map(dec),
        dirichlet_violation: profile.dirichlet_violation,
        minima: profile
            .minima
            .iter()
            .map(|r| ProfileRow {
                norm: r.norm,
                q: r.q.clone(),
                p: r.p,
                dist_lo: decimal_string(r.dist.lo()),
                dist_hi: decimal_string(r.dist.hi()),
                w_stat: r.w_stat.as_ref().map(BigReal::to_decimal),
            })
            .collect(),
    };
    write_json(&doc, out)
}

#[derive(Serialize)]
struct BetaRow {
    l: u32,
    m: Vec<u32>,
    log_beta: String,
    sign: String,
}

#[derive(Serialize)]
struct BetaDoc {
    n: u32,
    d: usize,
    bits: u32,
    min_l: u32,
    min_m: Vec<u32>,
    min_log_beta: Decimal,
    entries: Vec<BetaRow>,
}

pub fn write_beta_json<W: Write>(table: &BetaTable, out: W) -> Result<()> {
    let (idx, _) = table.min_entry();
    let doc = BetaDoc {
        n: table.n,
        d: table.d,
        bits: table.bits,
        min_l: idx.j0,
        min_m: idx.j.clone(),
        min_log_beta: Decimal::new(&BigReal(table.min_log_beta.lo().clone()), table.bits, Round::Down),
        entries: table
            .entries
            .iter()
            .map(|(i, v)| BetaRow {
                l: i.j0,
                m: i.j.clone(),
                log_beta: decimal_string(&v.log_abs().expect("nonzero entry").mid()),
                sign: v.sign().expect("nonzero entry").to_string(),
            })
            .collect(),
    };
    write_json(&doc, out)
}

#[derive(Serialize)]
struct ResonanceDoc {
    x: String,
    q: Vec<i64>,
    p: i64,
    n: u32,
    dist_lo: String,
    dist_hi: String,
    bound: Decimal,
    asymptote: Decimal,
}

/// One resonance bound with `main_term(n, d)` for comparison.
pub fn write_resonance_json<W: Write>(r: &ResonanceBound, x: &ExponentVector, bits: u32, out: W) -> Result<()> {
    let doc = ResonanceDoc {
        x: x.to_string(),
        q: r.q.clone(),
        p: r.p,
        n: r.n,
        dist_lo: decimal_string(r.dist.lo()),
        dist_hi: decimal_string(r.dist.hi()),
        bound: Decimal::new(&r.bound, bits, Round::Down),
        asymptote: Decimal::new(&main_term(r.n, x.d()), bits, Round::Nearest),
    };
    write_json(&doc, out)
}

pub fn write_resonance_csv<W: Write>(r: &ResonanceBound, x: &ExponentVector, bits: u32, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "q", "p", "n", "dist_lo", "dist_hi", "bound", "asymptote"]).map_err(csv_err)?;
    w.write_record([
        x.to_string(),
        r.q.iter().map(i64::to_string).collect::<Vec<_>>().join(";"),
        r.p.to_string(),
        r.n.to_string(),
        decimal_string(r.dist.lo()),
        decimal_string(r.dist.hi()),
        Decimal::new(&r.bound, bits, Round::Down).value,
        Decimal::new(&main_term(r.n, x.d()), bits, Round::Nearest).value,
    ])
    .map_err(csv_err)?;
    w.flush().map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
    Ok(())
}
