//! Command-line front end.
//!
//! ```text
//! bessel-hierarchy norm --d 3 --p 4 --k 1
//! bessel-hierarchy verify p4 --d 5
//! bessel-hierarchy sweep --d 7
//! bessel-hierarchy reproduce --table sup-values
//! bessel-hierarchy cache clear --cache results.json
//! ```
//!
//! Exit codes: 0 when every entry passes, 1 on any FAIL or INCONCLUSIVE (or
//! a computation failure), 2 on invalid arguments.

pub mod cache;
pub mod report;
pub mod tables;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{stein_tomas_exponent, verify_p4, verify_pst, verify_sup_monotone};
use crate::local::{verify_holder_chain, verify_second_order_positivity};
use crate::norms::{default_radius, Exponent, NormEngine, NormKey};
use crate::quadrature::QuadConfig;
use crate::record::Status;
use crate::sweep::{p0_report, DEFAULT_P_MAX, DEFAULT_STEP};
use report::{digest, Entry, Report};
use tables::Table;

/// Environment variable holding the default cache path.
pub const CACHE_ENV: &str = "BESSEL_HIERARCHY_CACHE";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default number of explicit degrees for the local checks.
pub const DEFAULT_LOCAL_K: u32 = 8;
/// Default `K` for the sup-norm hierarchy.
pub const DEFAULT_SUP_K: u32 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Order-10/5 Gauss pairs, tolerance 1e-8.
    Fast,
    /// Order-16/8 Gauss pairs, tolerance 1e-11.
    #[default]
    Standard,
    /// Order-24/12 Gauss pairs on panels of π/4, tolerance 1e-12.
    High,
}

impl Precision {
    pub fn quad_config(self) -> QuadConfig {
        let standard = QuadConfig::default();
        match self {
            Precision::Fast => QuadConfig {
                gauss_order_high: 10,
                gauss_order_low: 5,
                abs_tol: 1e-8,
                ..standard
            },
            Precision::Standard => standard,
            Precision::High => QuadConfig {
                panel_length: std::f64::consts::FRAC_PI_4,
                gauss_order_high: 24,
                gauss_order_low: 12,
                abs_tol: 1e-12,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

/// Settings shared by every command. All fields have defaults; the whole
/// struct is embedded in each report and hashed into its digest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Quadrature profile (default `standard`).
    pub precision: Precision,
    /// Truncation radius for `norm` (default `max(200, 3ν)`).
    pub radius: Option<f64>,
    /// Output format (default `json`).
    pub format: Format,
    /// Cache file (default: `$BESSEL_HIERARCHY_CACHE`, else no cache).
    pub cache_path: Option<PathBuf>,
    /// Sweep grid spacing (default 0.01).
    pub grid_step: f64,
    /// End of the explicit sweep grid (default 60).
    pub p_max: f64,
    /// Worker threads (default: one per core).
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            precision: Precision::Standard,
            radius: None,
            format: Format::Json,
            cache_path: None,
            grid_step: DEFAULT_STEP,
            p_max: DEFAULT_P_MAX,
            jobs: None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "bessel-hierarchy",
    version,
    about = "Weighted Bessel norms with error enclosures and hierarchy checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[arg(long, value_enum, default_value_t = Precision::Standard, global = true)]
    pub precision: Precision,
    /// Result cache file.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..=1024))]
    pub jobs: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute Λ_{d,p}(k) with an error enclosure.
    Norm {
        /// Dimension (at least 2).
        #[arg(long)]
        d: u32,
        /// Exponent: a number, a fraction such as 10/3, or `inf`.
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        /// Degree of the spherical harmonic.
        #[arg(long)]
        k: u32,
        /// Truncation radius (finite p only).
        #[arg(long = "R")]
        radius: Option<f64>,
    },
    /// Run one of the hierarchy or local checks.
    Verify {
        #[arg(value_enum)]
        claim: Claim,
        /// Dimension (at least 2).
        #[arg(long)]
        d: u32,
        /// Single degree for holder-chain (default: every k in 1..=K).
        #[arg(long)]
        k: Option<u32>,
        /// Largest degree checked (sup-monotone default 30, local checks 8).
        #[arg(long = "K")]
        k_max: Option<u32>,
        /// Exponent for the local checks (default 6 for d = 2, 4 for d = 3,
        /// the Stein–Tomas exponent otherwise).
        #[arg(long, value_parser = parse_exponent)]
        p: Option<Exponent>,
    },
    /// Certify the exponent threshold for one dimension.
    Sweep {
        /// Dimension, 2 to 10.
        #[arg(long)]
        d: u32,
        /// Grid spacing in p.
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        /// End of the explicit grid; beyond it an analytic certificate applies.
        #[arg(long = "p-max", default_value_t = DEFAULT_P_MAX)]
        p_max: f64,
    },
    /// Regenerate a published table next to engine values.
    Reproduce {
        #[arg(long, value_enum)]
        table: Table,
    },
    /// Manage the result cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Claim {
    SupMonotone,
    P4,
    Pst,
    HolderChain,
    LocalCoefficients,
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Delete the cache file.
    Clear,
}

fn parse_exponent(s: &str) -> std::result::Result<Exponent, String> {
    if let Some((num, den)) = s.split_once('/') {
        let (n, d): (f64, f64) = (
            num.trim()
                .parse()
                .map_err(|_| format!("bad numerator in {s:?}"))?,
            den.trim()
                .parse()
                .map_err(|_| format!("bad denominator in {s:?}"))?,
        );
        let p = n / d;
        return if p.is_finite() {
            Ok(Exponent::Finite(p))
        } else {
            Err(format!("exponent {s:?} is not finite"))
        };
    }
    s.parse::<Exponent>().map_err(|e| e.to_string())
}

/// Default exponent of the local checks for dimension `d`.
pub fn default_local_exponent(d: u32) -> f64 {
    match d {
        2 => 6.0,
        3 => 4.0,
        _ => stein_tomas_exponent(d),
    }
}

impl Command {
    fn describe(&self) -> String {
        match self {
            Command::Norm { d, p, k, radius } => {
                let r = radius.map(|r| format!(" --R {r}")).unwrap_or_default();
                format!("norm --d {d} --p {p} --k {k}{r}")
            }
            Command::Verify {
                claim,
                d,
                k,
                k_max,
                p,
            } => {
                let mut s = format!("verify {} --d {d}", claim_name(*claim));
                if let Some(p) = p {
                    s += &format!(" --p {p}");
                }
                if let Some(k) = k {
                    s += &format!(" --k {k}");
                }
                if let Some(kk) = k_max {
                    s += &format!(" --K {kk}");
                }
                s
            }
            Command::Sweep { d, step, p_max } => {
                format!("sweep --d {d} --step {step} --p-max {p_max}")
            }
            Command::Reproduce { table } => format!("reproduce --table {}", table_name(*table)),
            Command::Cache { .. } => "cache clear".to_owned(),
        }
    }
}

fn claim_name(c: Claim) -> String {
    c.to_possible_value()
        .map(|v| v.get_name().to_owned())
        .unwrap_or_default()
}

fn table_name(t: Table) -> String {
    t.to_possible_value()
        .map(|v| v.get_name().to_owned())
        .unwrap_or_default()
}

fn run_command(engine: &NormEngine, config: &RunConfig, command: &Command) -> Result<Vec<Entry>> {
    match *command {
        Command::Norm { d, p, k, radius } => {
            let key = NormKey::new(d, p, k)?;
            let value = match p {
                Exponent::Infinity => engine.lambda_sup(d, k)?,
                Exponent::Finite(_) => {
                    let r = radius
                        .or(config.radius)
                        .unwrap_or_else(|| default_radius(d, k));
                    engine.lambda_finite(key, r)?
                }
            };
            Ok(vec![Entry::Norm { value }])
        }
        Command::Verify {
            claim,
            d,
            k,
            k_max,
            p,
        } => {
            let p_local = match p {
                Some(Exponent::Finite(p)) => p,
                Some(Exponent::Infinity) => {
                    return Err(Error::domain("local checks need a finite exponent"));
                }
                None => default_local_exponent(d),
            };
            let record = |r| Entry::Record { record: r };
            match claim {
                Claim::SupMonotone => Ok(vec![record(verify_sup_monotone(
                    engine,
                    d,
                    k_max.unwrap_or(DEFAULT_SUP_K),
                )?)]),
                Claim::P4 => Ok(vec![record(verify_p4(engine, d)?)]),
                Claim::Pst => Ok(vec![record(verify_pst(engine, d)?)]),
                Claim::HolderChain => {
                    let ks: Vec<u32> = match k {
                        Some(k) => vec![k],
                        None => (1..=k_max.unwrap_or(DEFAULT_LOCAL_K)).collect(),
                    };
                    ks.into_iter()
                        .map(|k| Ok(record(verify_holder_chain(engine, d, p_local, k)?)))
                        .collect()
                }
                Claim::LocalCoefficients => {
                    let (rec, coefficients) = verify_second_order_positivity(
                        engine,
                        d,
                        p_local,
                        k_max.unwrap_or(DEFAULT_LOCAL_K),
                    )?;
                    Ok(vec![record(rec), Entry::Coefficients { coefficients }])
                }
            }
        }
        Command::Sweep { d, step, p_max } => Ok(vec![Entry::Threshold {
            report: p0_report(engine, d, step, p_max)?,
        }]),
        Command::Reproduce { table } => Ok(vec![Entry::Table {
            table: tables::reproduce(engine, table, config.grid_step, config.p_max)?,
        }]),
        Command::Cache { .. } => Ok(Vec::new()),
    }
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

/// Parses `args`, runs the command and writes the report to `out`.
/// Diagnostics go to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };

    let mut config = RunConfig {
        precision: cli.global.precision,
        format: cli.global.format,
        cache_path: cli.global.cache.clone(),
        jobs: cli.global.jobs.map(|j| j as usize),
        ..RunConfig::default()
    };
    match &cli.command {
        Command::Sweep { step, p_max, .. } => {
            config.grid_step = *step;
            config.p_max = *p_max;
        }
        Command::Norm { radius, .. } => config.radius = *radius,
        _ => {}
    }

    if let Command::Cache {
        action: CacheAction::Clear,
    } = cli.command
    {
        let Some(path) = config.cache_path.as_deref() else {
            let _ = writeln!(
                err,
                "error: no cache path given (use --cache or {CACHE_ENV})"
            );
            return EXIT_USAGE;
        };
        return match cache::clear(path) {
            Ok(removed) => {
                let _ = writeln!(
                    out,
                    "{} {}",
                    if removed { "removed" } else { "no cache at" },
                    path.display()
                );
                EXIT_PASS
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_FAIL
            }
        };
    }

    let engine = match NormEngine::new(config.precision.quad_config()) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let profile = digest(&config.precision.quad_config());
    if let Some(path) = config.cache_path.as_deref() {
        if let Err(reason) = cache::load(path, &profile, &engine) {
            let _ = writeln!(err, "warning: ignoring cache {}: {reason}", path.display());
        }
    }

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_FAIL;
        }
    };
    let entries = match pool.install(|| run_command(&engine, &config, &cli.command)) {
        Ok(entries) => entries,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code_for(&e);
        }
    };

    if let Some(path) = config.cache_path.as_deref() {
        if let Err(e) = cache::save(path, &profile, &engine) {
            let _ = writeln!(
                err,
                "warning: could not write cache {}: {e}",
                path.display()
            );
        }
    }

    let report = Report::new(cli.command.describe(), config.clone(), entries);
    let body = match config.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    };
    let _ = out.write_all(body.as_bytes());
    match report.status {
        Status::Pass => EXIT_PASS,
        _ => EXIT_FAIL,
    }
}
