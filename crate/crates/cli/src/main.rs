use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bwcurve::diophantine::scan_with;
use bwcurve::lower::resonance_lower;
use bwcurve::report::{
    bound_report, write_beta_json, write_profile_json, write_reports_csv, write_reports_json, write_resonance_csv,
    write_resonance_json,
};
use bwcurve::selftest::{self, Scale};
use bwcurve::upper::beta_table_with;
use bwcurve::{Cone, Error, ExponentVector, OptimizerConfig, PrecisionContext};

#[derive(Parser)]
#[command(name = "bwcurve", version, about = "Certified bounds for Bernstein-Walsh constants of exponential curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower and upper bounds on e_n(x) for each n in a range.
    Bounds {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        x: XArgs,
        /// Degree or inclusive range `a..b`.
        #[arg(long)]
        n: String,
        /// Restarts of the coefficient search (0 disables it).
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Per-norm minima of <q·x> over 0 < ‖q‖ <= Q.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        x: XArgs,
        #[arg(long = "Q")]
        q_max: u32,
        #[arg(long, default_value = "all")]
        cone: Cone,
    },
    /// The full table of log|β(ℓ, m)| for one degree.
    Beta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        x: XArgs,
        #[arg(long)]
        n: u32,
    },
    /// The resonance lower bound for a single q.
    Resonance {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        x: XArgs,
        /// Comma-separated nonnegative integer vector.
        #[arg(long)]
        q: String,
    },
    /// Runs the validation suite; exits 1 if any check fails.
    Selftest {
        #[command(flatten)]
        common: Common,
        /// Degrees up to 6 and reduced sample counts.
        #[arg(long, conflicts_with = "full")]
        quick: bool,
        /// Full acceptance sizes.
        #[arg(long)]
        full: bool,
        /// Run only these check ids (e.g. `3,L-chain`).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
}

#[derive(Args)]
struct XArgs {
    /// Comma-separated entries: `p/q`, decimals, sqrt2m1, sqrt3m1, golden, liouville(b,k).
    #[arg(long)]
    x: String,
    /// Dimension; must match the number of entries in --x.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Args)]
struct Common {
    /// Working precision in bits (at least 64).
    #[arg(long, default_value_t = 256)]
    precision: u32,
    /// Circle and torus sample counts.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Lift the size guards on β tables and scans.
    #[arg(long)]
    force_budget: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Common {
    fn context(&self) -> Result<PrecisionContext, Error> {
        let mut ctx = PrecisionContext::with_bits(self.precision)?;
        if let Some(s) = self.samples {
            ctx.circle_samples = s;
            ctx.torus_samples = s;
        }
        if let Some(seed) = self.seed {
            ctx.seed = seed;
        }
        Ok(ctx)
    }

    fn writer(&self) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", p.display())))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

impl XArgs {
    fn parse(&self) -> Result<ExponentVector, Error> {
        let x: ExponentVector = self.x.parse()?;
        if let Some(d) = self.d {
            if d != x.d() {
                return Err(Error::InvalidInput(format!("--d {d} does not match the {} entries of --x", x.d())));
            }
        }
        Ok(x)
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), Error> {
    let bad = || Error::Parse(format!("expected n or a..b, got {s:?}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_q(s: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(|v| v.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad q entry {v:?}"))))
        .collect()
}

fn finish(mut w: Box<dyn Write>) -> Result<(), Error> {
    w.flush().map_err(|e| Error::InvalidInput(format!("write failed: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Bounds { common, x, n, restarts } => {
            let ctx = common.context()?;
            let x = x.parse()?;
            let (a, b) = parse_range(&n)?;
            let cfg = OptimizerConfig { restarts, ..OptimizerConfig::default() };
            if !common.force_budget {
                let size = bwcurve::poly::dim_pn(b, x.d());
                if size > bwcurve::upper::BETA_TABLE_BUDGET {
                    return Err(Error::BudgetExceeded { size, budget: bwcurve::upper::BETA_TABLE_BUDGET });
                }
            }
            let reports = (a..=b).map(|n| bound_report(n, &x, &cfg, &ctx)).collect::<Result<Vec<_>, _>>()?;
            let w = common.writer()?;
            match common.format {
                Format::Json => write_reports_json(&reports, w)?,
                Format::Csv => write_reports_csv(&reports, w)?,
            }
        }
        Command::Scan { common, x, q_max, cone } => {
            let ctx = common.context()?;
            let x = x.parse()?;
            let profile = scan_with(&x, q_max, cone, &ctx, common.force_budget)?;
            let mut w = common.writer()?;
            match common.format {
                Format::Json => write_profile_json(&profile, &mut w)?,
                Format::Csv => profile.write_csv(&mut w)?,
            }
            finish(w)?;
        }
        Command::Beta { common, x, n } => {
            let ctx = common.context()?;
            let x = x.parse()?;
            let table = beta_table_with(n, &x, &ctx, common.force_budget)?;
            let mut w = common.writer()?;
            match common.format {
                Format::Json => write_beta_json(&table, &mut w)?,
                Format::Csv => table.write_csv(&mut w)?,
            }
            finish(w)?;
        }
        Command::Resonance { common, x, q } => {
            let ctx = common.context()?;
            let x = x.parse()?;
            let q = parse_q(&q)?;
            let r = resonance_lower(&q, &x, &ctx)?;
            let mut w = common.writer()?;
            match common.format {
                Format::Json => write_resonance_json(&r, &x, ctx.bits(), &mut w)?,
                Format::Csv => write_resonance_csv(&r, &x, ctx.bits(), &mut w)?,
            }
            finish(w)?;
        }
        Command::Selftest { common, quick, full, only } => {
            let ctx = common.context()?;
            let scale = if quick {
                Scale::Quick
            } else if full {
                Scale::Full
            } else {
                Scale::Default
            };
            let ids: Vec<&str> = selftest::CRITERIA.iter().chain(selftest::LEMMA_CHECKS.iter()).map(|(id, _)| *id).collect();
            for id in &only {
                if !ids.contains(&id.as_str()) {
                    return Err(Error::InvalidInput(format!("unknown check id {id:?}")));
                }
            }
            let mut results = Vec::new();
            for id in ids.into_iter().filter(|id| only.is_empty() || only.iter().any(|o| o == id)) {
                let r = selftest::run_check(id, scale, &ctx).expect("known id");
                eprintln!("{r}");
                results.push(r);
            }
            let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
            if common.out.is_some() || common.format == Format::Csv {
                let mut w = common.writer()?;
                selftest::write_csv(&results, &mut w)?;
                finish(w)?;
            }
            if !failed.is_empty() {
                eprintln!("selftest: {} of {} checks failed: {}", failed.len(), results.len(), failed.join(", "));
                return Ok(ExitCode::from(1));
            }
            eprintln!("selftest: all {} checks passed", results.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::IndependenceViolation { .. } | Error::PrecisionExhausted { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
