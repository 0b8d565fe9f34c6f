//! Command-line front end: batch computations over the library with
//! reproducible seeds and machine-readable output.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stable_gibbs::error::Error;
use stable_gibbs::gibbs::serial::to_json;
use stable_gibbs::gibbs::sampler::sample_partition;
use stable_gibbs::gibbs::types::{Composition, MixingModel, VTable};
use stable_gibbs::gibbs::vtable::{build_vtable, eppf, BuildConfig};
use stable_gibbs::lamperti::{x_cdf, x_pdf};
use stable_gibbs::model::parse_model_spec;
use stable_gibbs::numerics::mc::McConfig;
use stable_gibbs::numerics::quad::QuadConfig;
use stable_gibbs::numerics::rng::{RngFactory, DEFAULT_SEED};
use stable_gibbs::specfun::mittag_leffler;
use stable_gibbs::stable::{pdf, sample as stable_sample, StabilityIndex};
use stable_gibbs::validate::{run_suite, Suite};
use std::io::Write;

/// Environment variable overriding the default Monte Carlo sample count.
const MC_SAMPLES_ENV: &str = "STABLE_GIBBS_MC_SAMPLES";

#[derive(Parser)]
#[command(
    name = "stable-gibbs",
    about = "EPPFs of Gibbs partitions derived from a stable subordinator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// Stability index in (0, 1)
    #[arg(long)]
    alpha: f64,
    /// Mixing model spec, e.g. pd:theta=1 or kolmogorov:tau=1
    #[arg(long)]
    model: String,
    /// RNG seed (fixed default: reproducibility is the product)
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Monte Carlo sample budget (overridden by STABLE_GIBBS_MC_SAMPLES)
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Relative quadrature tolerance
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Build and certify the V-table of a mixing model
    Vtable {
        #[command(flatten)]
        common: CommonOpts,
        /// Table size N (rows n = 1..=N)
        #[arg(long)]
        n: usize,
    },
    /// Evaluate the EPPF of a composition under a mixing model
    Eppf {
        #[command(flatten)]
        common: CommonOpts,
        /// Block sizes, e.g. 2,1,1
        #[arg(long)]
        composition: String,
    },
    /// Draw partitions of {1..n} as restricted growth strings
    Sample {
        #[command(flatten)]
        common: CommonOpts,
        /// Partition size
        #[arg(long)]
        n: usize,
        /// Number of draws
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Stable-law utilities
    Stable {
        #[command(subcommand)]
        what: StableCmd,
    },
    /// Lamperti-law utilities
    Lamperti {
        #[command(subcommand)]
        what: LampertiCmd,
    },
    /// Mittag-Leffler function E_{alpha,1}(-lambda)
    Ml {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the certification suite and print a pass/fail table
    Validate {
        /// quick: reduced sample counts; full: acceptance scale
        #[arg(long, default_value = "quick")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum StableCmd {
    /// Density f_alpha(t)
    Pdf {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exact draws of S_alpha
    Sample {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum LampertiCmd {
    /// Density of X_alpha = S_alpha / S'_alpha
    Pdf {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        y: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Distribution function of X_alpha
    Cdf {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        y: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Serialize)]
struct ValueReport {
    value: f64,
    std_error: f64,
    method: String,
    model: String,
    alpha: f64,
    seed: u64,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap help/version are not errors
            use clap::error::ErrorKind::*;
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            let msg = e.to_string();
            eprintln!(
                "{}",
                serde_json::to_string(&ErrorReport { error: &msg }).unwrap_or(msg)
            );
            std::process::exit(1);
        }
    }
}

fn mc_samples_default(cli_value: Option<usize>) -> usize {
    if let Ok(s) = std::env::var(MC_SAMPLES_ENV) {
        if let Ok(v) = s.parse::<usize>() {
            return v;
        }
    }
    cli_value.unwrap_or(200_000)
}

fn build_cfg(common: &CommonOpts) -> Result<(StabilityIndex, MixingModel, BuildConfig), Error> {
    let alpha = StabilityIndex::new(common.alpha)?;
    let model = parse_model_spec(&common.model)?;
    model.validate(&alpha)?;
    let mut quad = QuadConfig::new(1e-14, common.quad_tol)?;
    quad.max_subdivisions = 12;
    let mc = McConfig::new(mc_samples_default(common.mc_samples), common.seed)?;
    Ok((
        alpha,
        model,
        BuildConfig {
            quad,
            mc,
            ..Default::default()
        },
    ))
}

fn emit(common_out: &Option<std::path::PathBuf>, text: &str) -> Result<(), Error> {
    match common_out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {path:?}: {e}"))),
        None => {
            let mut stdout = std::io::stdout();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.write_all(b"\n"))
                .map_err(|e| Error::InvalidParameter(format!("stdout: {e}")))
        }
    }
}

fn vtable_csv(vt: &VTable) -> String {
    let mut s = String::from("n,k,v,sigma,method\n");
    for n in 1..=vt.n_max() {
        for k in 1..=n {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                n,
                k,
                vt.v(n, k),
                vt.sigma(n, k),
                vt.method(n, k)
            ));
        }
    }
    s
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Vtable { common, n } => {
            let (alpha, model, cfg) = build_cfg(&common)?;
            let vt = build_vtable(&alpha, &model, n, &cfg)?;
            let passed = vt
                .certification
                .as_ref()
                .map(|c| c.passed)
                .unwrap_or(true);
            let text = match common.format {
                Format::Json => to_json(&vt)?,
                Format::Csv => vtable_csv(&vt),
            };
            emit(&common.out, &text)?;
            Ok(if passed { 0 } else { 2 })
        }
        Command::Eppf { common, composition } => {
            let (alpha, model, cfg) = build_cfg(&common)?;
            let comp: Composition = composition.parse()?;
            let vt = build_vtable(&alpha, &model, comp.n(), &cfg)?;
            let e = eppf(&vt, &comp)?;
            let rep = ValueReport {
                value: e.value,
                std_error: e.std_error,
                method: e.method.to_string(),
                model: model.descriptor(),
                alpha: alpha.alpha(),
                seed: common.seed,
            };
            let text = match common.format {
                Format::Json => serde_json::to_string_pretty(&rep)?,
                Format::Csv => format!(
                    "value,std_error,method\n{},{},{}\n",
                    rep.value, rep.std_error, rep.method
                ),
            };
            emit(&common.out, &text)?;
            Ok(0)
        }
        Command::Sample { common, n, count } => {
            let (alpha, model, cfg) = build_cfg(&common)?;
            let vt = build_vtable(&alpha, &model, n, &cfg)?;
            let factory = RngFactory::new(common.seed);
            let mut rng = factory.stream(u64::MAX); // sampling stream, distinct from builder streams
            let mut lines = Vec::with_capacity(count);
            for _ in 0..count {
                lines.push(sample_partition(&vt, n, &mut rng)?.rgs_string());
            }
            let text = match common.format {
                Format::Json => serde_json::to_string_pretty(&lines)?,
                Format::Csv => lines.join("\n"),
            };
            emit(&common.out, &text)?;
            Ok(0)
        }
        Command::Stable { what } => {
            match what {
                StableCmd::Pdf { alpha, t, format } => {
                    let a = StabilityIndex::new(alpha)?;
                    let v = pdf(&a, t, &QuadConfig::tight())?;
                    let rep = ValueReport {
                        value: v,
                        std_error: 0.0,
                        method: if a.is_half() { "closed_form" } else { "quadrature" }.into(),
                        model: format!("stable:alpha={alpha}"),
                        alpha,
                        seed: 0,
                    };
                    let text = match format {
                        Format::Json => serde_json::to_string_pretty(&rep)?,
                        Format::Csv => format!("t,pdf\n{t},{v}\n"),
                    };
                    emit(&None, &text)?;
                }
                StableCmd::Sample {
                    alpha,
                    count,
                    seed,
                    format,
                } => {
                    let a = StabilityIndex::new(alpha)?;
                    let mut rng = RngFactory::new(seed).stream(0);
                    let draws: Vec<f64> =
                        (0..count).map(|_| stable_sample(&a, &mut rng)).collect();
                    let text = match format {
                        Format::Json => serde_json::to_string_pretty(&draws)?,
                        Format::Csv => draws
                            .iter()
                            .map(|d| d.to_string())
                            .collect::<Vec<_>>()
                            .join("\n"),
                    };
                    emit(&None, &text)?;
                }
            }
            Ok(0)
        }
        Command::Lamperti { what } => {
            let (label, alpha, y, format, v) = match what {
                LampertiCmd::Pdf { alpha, y, format } => {
                    let a = StabilityIndex::new(alpha)?;
                    ("pdf", alpha, y, format, x_pdf(&a, y))
                }
                LampertiCmd::Cdf { alpha, y, format } => {
                    let a = StabilityIndex::new(alpha)?;
                    ("cdf", alpha, y, format, x_cdf(&a, y))
                }
            };
            let rep = ValueReport {
                value: v,
                std_error: 0.0,
                method: "closed_form".into(),
                model: format!("lamperti-{label}:alpha={alpha}"),
                alpha,
                seed: 0,
            };
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&rep)?,
                Format::Csv => format!("y,{label}\n{y},{v}\n"),
            };
            emit(&None, &text)?;
            Ok(0)
        }
        Command::Ml {
            alpha,
            lambda,
            format,
        } => {
            let a = StabilityIndex::new(alpha)?;
            let v = mittag_leffler(&a, lambda)?;
            let rep = ValueReport {
                value: v,
                std_error: 0.0,
                method: "quadrature".into(),
                model: format!("mittag-leffler:alpha={alpha}"),
                alpha,
                seed: 0,
            };
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&rep)?,
                Format::Csv => format!("lambda,value\n{lambda},{v}\n"),
            };
            emit(&None, &text)?;
            Ok(0)
        }
        Command::Validate {
            suite,
            seed,
            format,
        } => {
            let suite = match suite.as_str() {
                "quick" => Suite::Quick,
                "full" => Suite::Full,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "suite must be quick or full, got '{other}'"
                    )))
                }
            };
            let results = run_suite(suite, seed)?;
            let all_passed = results.iter().all(|r| r.passed);
            match format {
                Format::Json => {
                    emit(&None, &serde_json::to_string_pretty(&results)?)?;
                }
                Format::Csv => {
                    let mut text =
                        String::from("criterion,name,measured,threshold,passed\n");
                    for r in &results {
                        text.push_str(&format!(
                            "{},{:?},{},{},{}\n",
                            r.criterion, r.name, r.measured, r.threshold, r.passed
                        ));
                    }
                    emit(&None, &text)?;
                }
            }
            for r in &results {
                eprintln!(
                    "[{}] criterion {:>2}: {:<60} measured {:>12.5e} vs {:>9.3e}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.criterion,
                    r.name,
                    r.measured,
                    r.threshold
                );
            }
            Ok(if all_passed { 0 } else { 2 })
        }
    }
}
