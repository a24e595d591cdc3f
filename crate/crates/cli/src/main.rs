//! `emi` — empirical-rate toolkit for model-free MIMO links.
//!
//! Subcommands:
//! * `rate` — evaluate the empirical rate of an input/output CSV pair.
//! * `experiment` — run a configured Monte Carlo experiment and persist
//!   JSON + CSV results with a run manifest.
//! * `bounds` — closed-form calculator: admissible exponent range, tail
//!   constant, tail bound, rate threshold.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use emi_core::bounds::{gamma_limit, rate_threshold, tail_bound, ChernoffParams};
use emi_core::experiments::{run_experiment, ExperimentConfig, ExperimentReport};
use emi_core::linalg::DEFAULT_RANK_TOL;
use emi_core::rate::{empirical_rate_covariance_with_tol, empirical_rate_with_tol, RateValue};
use emi_core::Error;

const EXIT_VERDICT_FAILURE: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_DIMENSION_MISMATCH: u8 = 3;
const EXIT_CAP_EXCEEDED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "emi",
    version,
    about = "Empirical mutual-information rates, tail bounds, and Monte Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the empirical rate between two sample matrices.
    ///
    /// Matrices are CSV files: one row per channel use, comma-separated
    /// columns, no header.
    Rate {
        /// Input block X (n x t).
        x: PathBuf,
        /// Output block Y (n x r).
        y: PathBuf,
        /// Also print the rate in bits per use.
        #[arg(long)]
        bits: bool,
        /// Remove per-column means before evaluating (covariance variant).
        #[arg(long)]
        covariance: bool,
        /// Relative rank tolerance for dependent-column pruning.
        #[arg(long)]
        tol: Option<f64>,
        /// Emit a JSON record instead of the plain line.
        #[arg(long)]
        json: bool,
    },
    /// Run an experiment from a JSON config and persist its results.
    Experiment {
        /// Path to the experiment config (JSON, tagged by "experiment").
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: machine parallelism).
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory (default: ./runs/<timestamp>-<seed>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form calculator for the tail bound and rate threshold.
    Bounds {
        /// Block length n.
        #[arg(long)]
        n: usize,
        /// Transmit dimension t.
        #[arg(long)]
        t: usize,
        /// Receive dimension r.
        #[arg(long)]
        r: usize,
        /// Chernoff exponent fraction; omit to print only the admissible range.
        #[arg(long)]
        gamma: Option<f64>,
        /// Rate threshold T at which to evaluate the tail bound.
        #[arg(long)]
        threshold: Option<f64>,
        /// Target error probability for the rate threshold.
        #[arg(long)]
        pe: Option<f64>,
        /// Empirical rate (nats/use) for the rate threshold.
        #[arg(long = "rate-emp")]
        rate_emp: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Rate {
            x,
            y,
            bits,
            covariance,
            tol,
            json,
        } => cmd_rate(&x, &y, bits, covariance, tol, json),
        Command::Experiment {
            config,
            seed,
            threads,
            out,
        } => cmd_experiment(&config, seed, threads, out),
        Command::Bounds {
            n,
            t,
            r,
            gamma,
            threshold,
            pe,
            rate_emp,
        } => cmd_bounds(n, t, r, gamma, threshold, pe, rate_emp),
    };
    ExitCode::from(code)
}

// ---------------------------------------------------------------------------
// rate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct RateRecord {
    nats: serde_json::Value,
    bits: serde_json::Value,
    infinite: bool,
    pruned_input: bool,
    pruned_output: bool,
    joint_rank_deficient: bool,
}

fn rate_number(value: f64) -> serde_json::Value {
    if value.is_infinite() {
        serde_json::Value::String("inf".to_string())
    } else {
        serde_json::json!(value)
    }
}

fn cmd_rate(
    x_path: &Path,
    y_path: &Path,
    bits: bool,
    covariance: bool,
    tol: Option<f64>,
    json: bool,
) -> u8 {
    let rank_tol = tol.unwrap_or(DEFAULT_RANK_TOL);
    if !(rank_tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return EXIT_BAD_INPUT;
    }
    let x = match io::read_matrix_csv(x_path) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    let y = match io::read_matrix_csv(y_path) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    let result = if covariance {
        empirical_rate_covariance_with_tol(&x, &y, rank_tol)
    } else {
        empirical_rate_with_tol(&x, &y, rank_tol)
    };
    match result {
        Ok(rate) => {
            print_rate(&rate, bits, json);
            0
        }
        Err(Error::DimensionMismatch(message)) => {
            eprintln!("error: dimension mismatch: {message}");
            EXIT_DIMENSION_MISMATCH
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_BAD_INPUT
        }
    }
}

fn print_rate(rate: &RateValue, bits: bool, json: bool) {
    if json {
        let record = RateRecord {
            nats: rate_number(rate.nats()),
            bits: rate_number(rate.bits()),
            infinite: rate.is_infinite(),
            pruned_input: rate.flags.pruned_input,
            pruned_output: rate.flags.pruned_output,
            joint_rank_deficient: rate.flags.joint_rank_deficient,
        };
        println!(
            "{}",
            serde_json::to_string(&record).expect("record serializes")
        );
    } else if rate.is_infinite() {
        println!("inf");
    } else if bits {
        println!("{:.6} nats ({:.6} bits)", rate.nats(), rate.bits());
    } else {
        println!("{:.6} nats", rate.nats());
    }
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FullReport<'a> {
    #[serde(flatten)]
    report: &'a ExperimentReport,
    manifest: &'a io::RunManifest,
}

fn cmd_experiment(
    config_path: &Path,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
) -> u8 {
    let started = io::unix_now();
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config_path.display());
            return EXIT_BAD_INPUT;
        }
    };
    let mut config: ExperimentConfig = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid config {}: {e}", config_path.display());
            return EXIT_BAD_INPUT;
        }
    };
    if let Some(seed) = seed {
        config.set_seed(seed);
    }
    if threads.is_some() {
        config.set_threads(threads);
    }

    let report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e @ Error::CapExceeded { .. }) => {
            eprintln!("error: {e}");
            return EXIT_CAP_EXCEEDED;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };

    let out_dir = out.unwrap_or_else(|| {
        PathBuf::from("runs").join(format!("{}-{}", started as u64, report.seed))
    });
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return EXIT_BAD_INPUT;
    }
    let report_path = out_dir.join("report.json");
    let csv_path = out_dir.join("points.csv");
    let manifest_path = out_dir.join("manifest.json");

    let manifest = io::RunManifest {
        config_path: config_path.display().to_string(),
        resolved_seed: report.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_secs: started,
        finished_unix_secs: io::unix_now(),
        output_paths: vec![
            report_path.display().to_string(),
            csv_path.display().to_string(),
            manifest_path.display().to_string(),
        ],
    };

    let full = FullReport {
        report: &report,
        manifest: &manifest,
    };
    let report_json =
        serde_json::to_string_pretty(&full).expect("report serializes") + "\n";
    let manifest_json =
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    for (path, contents) in [
        (&csv_path, io::report_to_csv(&report)),
        (&report_path, report_json),
        (&manifest_path, manifest_json),
    ] {
        if let Err(e) = io::write_atomic(path, &contents) {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    }

    print_summary(&report, &out_dir);
    if report.all_pass() {
        0
    } else {
        EXIT_VERDICT_FAILURE
    }
}

fn print_summary(report: &ExperimentReport, out_dir: &Path) {
    println!(
        "experiment {} (seed {}), {:.2}s",
        report.kind, report.seed, report.wall_clock_secs
    );
    println!(
        "{:<32} {:>13} {:>13} {:>13} {:>13} {:>8}",
        "point", "T_or_R", "empirical", "ci", "analytic", "verdict"
    );
    for point in &report.points {
        let analytic = point
            .analytic
            .map(|v| format!("{v:>13.4e}"))
            .unwrap_or_else(|| format!("{:>13}", "-"));
        let verdict = match point.verdict {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "-",
        };
        println!(
            "{:<32} {:>13.4e} {:>13.4e} {:>13.4e} {} {:>8}",
            point.point_id, point.x, point.empirical, point.ci_halfwidth, analytic, verdict
        );
    }
    for warning in &report.warnings {
        println!("warning: {warning}");
    }
    for verdict in &report.verdicts {
        println!(
            "verdict {}: {} ({})",
            verdict.name,
            if verdict.pass { "PASS" } else { "FAIL" },
            verdict.detail
        );
    }
    println!("results written to {}", out_dir.display());
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

fn cmd_bounds(
    n: usize,
    t: usize,
    r: usize,
    gamma: Option<f64>,
    threshold: Option<f64>,
    pe: Option<f64>,
    rate_emp: Option<f64>,
) -> u8 {
    if n == 0 || t == 0 || r == 0 {
        eprintln!("error: n, t, r must all be at least 1");
        return EXIT_BAD_INPUT;
    }
    println!("gamma_limit = {:.6}", gamma_limit(n, t, r));
    let Some(gamma) = gamma else {
        if threshold.is_some() || pe.is_some() || rate_emp.is_some() {
            eprintln!("error: --gamma is required for bound evaluation");
            return EXIT_BAD_INPUT;
        }
        return 0;
    };
    let params = match ChernoffParams::new(n, t, r, gamma) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    println!("tail_constant = {:.6}", params.constant());
    if let Some(threshold_value) = threshold {
        match tail_bound(&params, threshold_value) {
            Ok(report) => println!(
                "tail_bound(T={threshold_value:.6}) = {:.6e}",
                report.bound
            ),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_BAD_INPUT;
            }
        }
    }
    match (rate_emp, pe) {
        (Some(rate), Some(pe)) => match rate_threshold(&params, rate, pe) {
            Ok(value) => println!(
                "rate_threshold(rate={rate:.6}, target_error={pe:.6}) = {value:.6}"
            ),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_BAD_INPUT;
            }
        },
        (None, None) => {}
        _ => {
            eprintln!("error: --rate-emp and --pe go together");
            return EXIT_BAD_INPUT;
        }
    }
    0
}
