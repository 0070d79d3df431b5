//! Command-line front end for the l4moment toolkit.
//!
//! Every subcommand prints a line-oriented report `name residual tolerance
//! status` (or one JSON object with `--format json`) and exits 0 when all
//! checks pass, 1 when one fails, 2 on invalid flags and 3 on I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use l4moment::euler::{
    a_k_constant, z1_product, z2_value, z3_product, z4_product, EulerProductResult, LocalFactorContext, ShiftPoint,
};
use l4moment::moments::{self, OutputFormat, SweepConfig};
use l4moment::smooth::BumpProfile;
use l4moment::verify::{self, Check};
use l4moment::Error;

/// Default directory for sweep output when `--output` is absent.
const OUTPUT_DIR_ENV: &str = "L4MOMENT_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "l4moment", version, about = "Numerical checks for the fourth moment of quadratic Dirichlet L-functions")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    A4,
    Z1,
    Z2,
    Z3,
    Z4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Euler-product identities, exact constants and AFE spot checks.
    VerifyIdentities {
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(3..))]
        plimit: u64,
        /// Largest d in the AFE spot check.
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        afe_dmax: u64,
        /// Also run the Dirichlet-series identities.
        #[arg(long)]
        series: bool,
    },
    /// The Gauss-type sum G_k(n).
    Gauss {
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Poisson summation residual for odd n at scale Z.
    Poisson {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        z: f64,
        /// Truncation in k (default: smallest with certified tail below 1e-12).
        #[arg(long)]
        kmax: Option<u64>,
        /// `reference`, `inner:Z` or `outer:Z`.
        #[arg(long, default_value = "reference")]
        profile: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Moments of L(1/2, chi_8d) over odd square-free d <= X.
    Sweep {
        #[arg(long)]
        xmax: u64,
        /// Moment orders, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        k: Vec<u32>,
        /// Report only X = xmax.
        #[arg(long)]
        no_dyadic: bool,
        /// Weight for the smoothed sums: `reference`, `inner:Z` or `outer:Z`.
        #[arg(long)]
        profile: Option<String>,
        #[arg(long, default_value_t = moments::DEFAULT_SWEEP_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        blocks: usize,
        #[arg(long, default_value_t = moments::DEFAULT_SWEEP_CAP)]
        cap: u64,
        /// Output file (default: $L4MOMENT_OUTPUT_DIR/sweep.<ext>, else stdout).
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
        data_format: DataFormat,
    },
    /// A truncated Euler product with its tail bound.
    Euler {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(3..))]
        plimit: u64,
        /// Odd parameter a of Z2 and Z3.
        #[arg(long, default_value_t = 1)]
        a: u64,
        /// Nonzero parameter k of Z2.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
    },
    /// L(s, chi_8d) from the Hurwitz-zeta oracle.
    Lvalue {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

enum Failure {
    Invalid(String),
    Compute(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Capacity { .. } | Error::Region { .. } | Error::Pole { .. } => {
                Failure::Invalid(e.to_string())
            }
            Error::Io(m) => Failure::Io(m),
            other => Failure::Compute(other.to_string()),
        }
    }
}

#[derive(Serialize)]
struct CheckRow<'a> {
    name: &'a str,
    residual: f64,
    tolerance: f64,
    passed: bool,
}

struct Report {
    command: &'static str,
    values: Value,
    checks: Vec<Check>,
}

impl Report {
    fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    fn print(&self, format: Format) {
        match format {
            Format::Text => {
                if let Value::Object(map) = &self.values {
                    for (k, v) in map {
                        match v {
                            Value::Array(_) if k == "records" => {}
                            // whole numbers print without a trailing `.0`
                            Value::Number(x) if x.as_f64().is_some_and(|f| f.fract() == 0.0 && f.abs() < 1e15) => {
                                println!("{k} {}", x.as_f64().unwrap_or_default())
                            }
                            _ => println!("{k} {v}"),
                        }
                    }
                }
                for c in &self.checks {
                    println!("{}", c.line());
                }
            }
            Format::Json => {
                let rows: Vec<CheckRow> = self
                    .checks
                    .iter()
                    .map(|c| CheckRow {
                        name: &c.name,
                        residual: c.residual,
                        tolerance: c.tolerance,
                        passed: c.passed(),
                    })
                    .collect();
                let doc = json!({
                    "command": self.command,
                    "passed": self.passed(),
                    "values": self.values,
                    "checks": rows,
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("report serialises"));
            }
        }
    }
}

fn parse_profile(s: &str) -> Result<BumpProfile, Failure> {
    let bad = || Failure::Invalid(format!("profile `{s}`: expected reference, inner:Z or outer:Z"));
    if s == "reference" {
        return Ok(BumpProfile::reference());
    }
    let (kind, z) = s.split_once(':').ok_or_else(bad)?;
    let z: f64 = z.parse().map_err(|_| bad())?;
    Ok(match kind {
        "inner" => BumpProfile::plateau_inner(z)?,
        "outer" => BumpProfile::plateau_outer(z)?,
        _ => return Err(bad()),
    })
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Invalid(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn c64(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn product_values(r: &EulerProductResult) -> Value {
    json!({
        "value": c64(r.value),
        "extrapolated": c64(r.extrapolated()),
        "tail_bound": r.tail_bound,
        "prime_limit": r.prime_limit,
    })
}

fn run(command: Command) -> Result<Report, Failure> {
    match command {
        Command::VerifyIdentities { plimit, afe_dmax, series } => {
            let mut checks = verify::euler_headline(plimit, plimit)?;
            checks.extend(verify::residue_constants());
            checks.push(verify::afe_identity(afe_dmax, 1e-6)?);
            if series {
                checks.extend(verify::dirichlet_identities()?);
            }
            Ok(Report {
                command: "verify-identities",
                values: json!({ "plimit": plimit }),
                checks,
            })
        }
        Command::Gauss { n, k, tol } => {
            let (g, check) = verify::gauss_value(n, k, positive("tol", tol)?)?;
            Ok(Report {
                command: "gauss",
                values: json!({ "n": n, "k": k, "value": g }),
                checks: vec![check],
            })
        }
        Command::Poisson { n, z, kmax, profile, tol } => {
            let profile = parse_profile(&profile)?;
            let z = positive("z", z)?;
            let kmax = match kmax {
                Some(k) => k,
                None => moments::poisson_kmax(n, z, &profile, moments::POISSON_TAIL_TOL)?,
            };
            let c = moments::poisson_check(n, z, &profile, kmax)?;
            Ok(Report {
                command: "poisson",
                values: json!({ "n": n, "Z": z, "kmax": kmax, "lhs": c.lhs, "rhs": c.rhs, "tail_bound": c.tail_bound }),
                checks: vec![Check::new(format!("poisson_n={n}_Z={z}"), c.residual, positive("tol", tol)?)],
            })
        }
        Command::Sweep {
            xmax,
            k,
            no_dyadic,
            profile,
            tol,
            blocks,
            cap,
            output,
            data_format,
        } => {
            let cfg = SweepConfig {
                x_max: xmax,
                dyadic: !no_dyadic,
                profile: profile.as_deref().map(parse_profile).transpose()?,
                afe_tol: tol,
                thread_blocks: blocks,
                moments: k,
                cap,
            };
            cfg.validate()?;
            let out = moments::sweep_moments(&cfg)?;
            let (fmt, ext) = match data_format {
                DataFormat::Csv => (OutputFormat::Csv, "csv"),
                DataFormat::Json => (OutputFormat::Json, "json"),
            };
            let path = output.or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("sweep.{ext}"))));
            let mut values = json!({
                "X_max": xmax,
                "records": out.records.len(),
                "min_2A": out.min_two_a,
                "clamped": out.clamped,
                "oracle_samples": out.samples.len(),
            });
            match &path {
                Some(p) => {
                    moments::emit_results(&out.records, &cfg, fmt, p)?;
                    values["output"] = json!(p.display().to_string());
                }
                None => {
                    values["records"] = serde_json::to_value(&out.records).map_err(|e| Failure::Compute(e.to_string()))?;
                }
            }
            let worst = out.samples.iter().map(|s| s.rel_error).fold(0.0, f64::max);
            Ok(Report {
                command: "sweep",
                values,
                checks: vec![
                    Check::new("min_2A_below_zero", (-out.min_two_a).max(0.0), moments::NEGATIVE_TOL),
                    Check::new("oracle_sample_max_rel_error", worst, moments::ORACLE_TOL),
                ],
            })
        }
        Command::Euler {
            which,
            alpha,
            beta,
            gamma,
            plimit,
            a,
            k,
        } => {
            let sp = ShiftPoint::real(alpha, beta, gamma);
            let r = match which {
                Which::A4 => a_k_constant(4, plimit)?,
                Which::Z1 => z1_product(&sp, plimit)?,
                Which::Z2 => z2_value(&sp, &LocalFactorContext::new(a, k)?, plimit)?,
                Which::Z3 => z3_product(&sp, a, plimit)?,
                Which::Z4 => z4_product(&sp, plimit)?,
            };
            Ok(Report {
                command: "euler",
                values: product_values(&r),
                checks: Vec::new(),
            })
        }
        Command::Lvalue { d, s, t, tol } => {
            let (l, checks) = verify::lvalue(d, Complex64::new(s, t), positive("tol", tol)?)?;
            Ok(Report {
                command: "lvalue",
                values: json!({ "d": d, "s": c64(Complex64::new(s, t)), "value": c64(l) }),
                checks,
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(report) => {
            report.print(cli.format);
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Invalid(m) => (2, m),
                Failure::Compute(m) => (1, m),
                Failure::Io(m) => (3, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
