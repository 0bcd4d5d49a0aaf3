use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use supercong::arith::{PrimePowerModulus, RationalArg};
use supercong::padic_gamma::gamma_p;
use supercong::point_count::{count_brute, count_charsum, count_koblitz};
use supercong::verify::{
    exit_code, load_or_build, run_conjecture, run_identity_suite, run_theorem_equality, write_reports, CacheOutcome,
    OutputFormat, RunConfig,
};
use supercong::Error;

#[derive(Parser)]
#[command(name = "supercong", version, about = "Verify the quintic supercongruence and its supporting identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification batch and stream one report per line.
    Verify {
        #[command(subcommand)]
        target: Target,
    },
    /// Count projective points of the Dwork quintic over F_p.
    Count {
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        /// p-adic precision K for the Gauss-sum methods (a minimum; raised as needed).
        #[arg(long, default_value_t = 3)]
        precision: u32,
    },
    /// Print the coefficient c(n) of the weight-4 eta quotient.
    Coeff {
        #[arg(long)]
        n: usize,
        /// Expansion order; defaults to n.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Print Γ_p(num/den) modulo p^k.
    Gamma {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u32,
        #[arg(long, allow_hyphen_values = true)]
        num: i64,
        #[arg(long)]
        den: i64,
    },
}

#[derive(Subcommand)]
enum Target {
    /// Truncated 4F3 against c(p) modulo p^K.
    Conjecture(BatchArgs),
    /// 4G - s(p)p against c(p) modulo p^K, odd p.
    Theorem(BatchArgs),
    /// The fixed battery of supporting identities.
    Identities(BatchArgs),
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long)]
    pmin: Option<u64>,
    #[arg(long)]
    pmax: Option<u64>,
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Koblitz,
    Charsum,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl BatchArgs {
    fn apply(self, mut c: RunConfig) -> RunConfig {
        c.p_min = self.pmin.unwrap_or(c.p_min);
        c.p_max = self.pmax.unwrap_or(c.p_max);
        c.precision = self.precision.unwrap_or(c.precision);
        c.order = self.order.unwrap_or(c.order);
        c.cache = self.cache.or(c.cache);
        c.jobs = self.jobs.unwrap_or(c.jobs);
        if let Some(f) = self.format {
            c.format = match f {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
            };
        }
        c
    }
}

const USAGE_ERROR: u8 = 2;

fn describe(outcome: &CacheOutcome) -> String {
    match outcome {
        CacheOutcome::Computed => "computed (no cache)".into(),
        CacheOutcome::Loaded => "loaded".into(),
        CacheOutcome::Created => "created".into(),
        CacheOutcome::Extended { previous } => format!("rebuilt (held N={previous})"),
        CacheOutcome::Replaced { reason } => format!("rebuilt (corrupt: {reason})"),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Verify { target } => {
            let (config, runner): (_, fn(&RunConfig) -> supercong::Result<_>) = match target {
                Target::Conjecture(a) => (a.apply(RunConfig::conjecture()), run_conjecture),
                Target::Theorem(a) => (a.apply(RunConfig::theorem()), run_theorem_equality),
                Target::Identities(a) => (a.apply(RunConfig::identities()), run_identity_suite),
            };
            if let Some(path) = &config.cache {
                // Report what happened to the cache before the batch reuses it.
                let (_, outcome) = load_or_build(Some(path), config.order)?;
                eprintln!("cache {}: {}", path.display(), describe(&outcome));
            }
            let reports = runner(&config)?;
            write_reports(&mut out, &reports, config.format)?;
            Ok(exit_code(&reports) as u8)
        }
        Command::Count { p, method, lambda, precision } => {
            let result = match method {
                Method::Brute => count_brute(p, lambda)?,
                Method::Koblitz => count_koblitz(p, lambda, precision)?,
                Method::Charsum => {
                    if lambda != 1 {
                        return Err(Error::BadParameters("the charsum method counts lambda = 1 only".into()));
                    }
                    count_charsum(p, precision)?
                }
            };
            let line = serde_json::to_string(&result).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(out, "{line}")?;
            Ok(0)
        }
        Command::Coeff { n, order, cache } => {
            let order = order.unwrap_or(n).max(1);
            let (table, outcome) = load_or_build(cache.as_deref(), order)?;
            if let Some(path) = &cache {
                eprintln!("cache {}: {}", path.display(), describe(&outcome));
            }
            writeln!(out, "{}", table.c(n)?)?;
            Ok(0)
        }
        Command::Gamma { p, k, num, den } => {
            if den == 0 {
                return Err(Error::BadParameters("zero denominator".into()));
            }
            let modulus = PrimePowerModulus::new(p, k)?;
            writeln!(out, "{}", gamma_p(RationalArg::new(num, den), modulus)?.value())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
