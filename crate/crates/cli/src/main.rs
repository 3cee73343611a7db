use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wienercert::harness::{
    certify_command, functional_command, oracle_command, parse_axis, parse_criteria, parse_ladder,
    sweep_command, Report, RunConfig, SweepConfig,
};
use wienercert::testbed::FamilySpec;
use wienercert::{Error, Result};

#[derive(Parser)]
#[command(
    name = "wienercert",
    version,
    about = "Numerical Wiener-algebra membership certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate certificates and cross-check them against the spectral oracle.
    Certify(Common),
    /// Evaluate a single functional on the finest rung.
    Functional {
        /// A0, A1, A01, A_delta, V*, quasiconvex, V, conditions2d or bernstein_sum.
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the spectral oracle ladder with Riesz and conjugate checks.
    Oracle(Common),
    /// Certify every point of a parameter grid and emit one CSV row per point.
    Sweep {
        /// Swept axis: `a=0.6:2.0:0.2`, `a=1,2,3`, `b=a+0.5` or `a=` (empty).
        #[arg(long = "param", required = true)]
        params: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// gaussian, exp_decay, triangle, polya, zygmund_odd, corollary, stein_chirp, tensor2d, mixed2d.
    #[arg(long)]
    family: String,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Half-width of the vanishing interval around the origin (corollary).
    #[arg(long)]
    gap: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    a1: Option<f64>,
    #[arg(long)]
    b1: Option<f64>,
    /// Decay exponent of |f|; with --beta selects a chirp by its exponents.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// First tensor factor, `name[:key=value...]`.
    #[arg(long)]
    fx: Option<String>,
    /// Second tensor factor.
    #[arg(long)]
    fy: Option<String>,
    /// Comma list of thm11a, thm11b, beurling, quasiconvex, thmC, thm13-2d.
    #[arg(long)]
    criteria: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    /// Ladder as `L:N[,L:N...]` with doubling rungs.
    #[arg(long)]
    ladder: Option<String>,
    /// Truncation levels for dyadic sums, e.g. `6,8,10`.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    timings: bool,
}

impl Common {
    fn params(&self) -> BTreeMap<String, f64> {
        [
            ("a", self.a),
            ("b", self.b),
            ("gap", self.gap),
            ("gamma", self.gamma),
            ("a1", self.a1),
            ("b1", self.b1),
            ("alpha", self.alpha),
            ("beta", self.beta),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
    }

    fn spec(&self, params: &BTreeMap<String, f64>) -> Result<FamilySpec> {
        FamilySpec::from_parts(&self.family, params, self.fx.as_deref(), self.fy.as_deref())
    }

    fn run_config(&self, family: FamilySpec) -> Result<RunConfig> {
        let mut cfg = RunConfig::new(family);
        if let Some(c) = &self.criteria {
            cfg.criteria = parse_criteria(c)?;
        }
        if let Some(l) = &self.ladder {
            cfg.ladder = Some(parse_ladder(l)?);
        }
        if let Some(l) = &self.levels {
            let levels = l
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad level '{v}'")))
                })
                .collect::<Result<_>>()?;
            cfg.dyadic_levels = Some(levels);
        }
        cfg.delta = self.delta;
        cfg.timings = self.timings;
        cfg.out = self.out.clone();
        Ok(cfg)
    }

    fn expect_format(&self, wanted: Format) -> Result<()> {
        match self.format {
            Some(f) if f != wanted => {
                let name = if wanted == Format::Json {
                    "json"
                } else {
                    "csv"
                };
                Err(Error::Config(format!("this command only writes {name}")))
            }
            _ => Ok(()),
        }
    }
}

fn emit(body: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, body).map_err(Error::from),
        None => writeln!(std::io::stdout(), "{}", body.trim_end()).map_err(Error::from),
    }
}

fn emit_report(report: &Report, common: &Common) -> Result<()> {
    emit(&report.to_json()?, common.out.as_ref())?;
    eprintln!("{}", report.summary());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Certify(c) => {
            c.expect_format(Format::Json)?;
            let cfg = c.run_config(c.spec(&c.params())?)?;
            emit_report(&certify_command(&cfg)?, &c)
        }
        Command::Functional { name, common: c } => {
            c.expect_format(Format::Json)?;
            let cfg = c.run_config(c.spec(&c.params())?)?;
            emit_report(&functional_command(&cfg, &name)?, &c)
        }
        Command::Oracle(c) => {
            c.expect_format(Format::Json)?;
            let cfg = c.run_config(c.spec(&c.params())?)?;
            emit_report(&oracle_command(&cfg)?, &c)
        }
        Command::Sweep { params, common: c } => {
            c.expect_format(Format::Csv)?;
            let axes = params
                .iter()
                .map(|p| parse_axis(p))
                .collect::<Result<Vec<_>>>()?;
            let fixed = c.params();
            // The template family only fixes dimension and default criteria; each point rebuilds its own.
            let family = c.spec(&fixed).or_else(|_| c.spec(&BTreeMap::new()))?;
            let template = c.run_config(family)?;
            let mut sweep = SweepConfig::new(&c.family, axes, template);
            sweep.fixed = fixed;
            let table = sweep_command(&sweep)?;
            emit(&table.to_csv()?, c.out.as_ref())?;
            let failed = table.rows.iter().filter(|r| r.error.is_some()).count();
            eprintln!(
                "{}: {} points, {} failed",
                c.family,
                table.rows.len(),
                failed
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
