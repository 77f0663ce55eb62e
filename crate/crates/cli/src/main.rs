use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dwpf_core::enumeration::{c_vertex_histogram, count_configurations, enumerate_configurations};
use dwpf_core::harness::{compute, parse_params, parse_seed_range, run_suite, run_sweep, Method, Report, SuiteConfig};
use dwpf_core::Error;
use serde_json::json;

/// Domain-wall partition functions of the trigonometric Felderhof model.
#[derive(Parser, Debug)]
#[command(name = "dwpf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the partition function for one parameter document.
    Compute {
        #[arg(long, value_parser = parse_method)]
        method: Method,
        /// JSON document with `n`, `alpha`, `beta`, `u`, `v`.
        #[arg(long)]
        params: PathBuf,
        /// Reject fields equal to ±1.
        #[arg(long)]
        strict: bool,
    },
    /// Run a named cross-check suite over a range of seeds.
    Check {
        /// routes-agree, korepin, bethe-identities, toda or counting.
        #[arg(long)]
        suite: String,
        /// Inclusive range such as `1..20`.
        #[arg(long, default_value = "1..20")]
        seeds: String,
        #[arg(long)]
        threads: Option<usize>,
        /// Write the report as JSON lines here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the flat CSV table.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Override a tolerance, e.g. `--tol toda=1e-6`. Repeatable.
        #[arg(long = "tol", value_name = "KEY=VALUE")]
        tolerances: Vec<String>,
    },
    /// Count domain-wall configurations.
    Count {
        #[arg(long)]
        n: usize,
        /// Also print the histogram of c-vertex counts.
        #[arg(long)]
        histogram: bool,
    },
    /// Write every configuration as one JSON line.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        emit: PathBuf,
    },
    /// Evaluate a line-oriented sweep specification.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Why a command did not succeed: bad input, or checks that ran and failed.
enum Failure {
    Usage(String),
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit_report(report: &Report, out: Option<&PathBuf>, csv: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            report.write_json_lines(&mut w)?;
            w.flush()?;
        }
        None => report.write_json_lines(io::stdout().lock())?,
    }
    if let Some(path) = csv {
        let mut w = create(path)?;
        report.write_csv(&mut w)?;
        w.flush()?;
    }
    let s = &report.summary;
    eprintln!(
        "{}: {} cases, {} failures, max residual {}",
        report.suite,
        s.cases,
        s.failures,
        s.max_residual.map_or("n/a".to_string(), |r| format!("{r:.3e}"))
    );
    if report.passed() {
        Ok(())
    } else {
        let ids: Vec<_> = report.failures().take(10).map(|c| c.case_id.as_str()).collect();
        Err(Failure::Checks(format!("failed cases: {}", ids.join(", "))))
    }
}

fn config(threads: Option<usize>, tolerances: &[String]) -> Result<SuiteConfig, Failure> {
    let mut config = SuiteConfig {
        threads,
        ..SuiteConfig::default()
    };
    for t in tolerances {
        let (key, value) = t
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("tolerance `{t}` is not KEY=VALUE")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Failure::Usage(format!("tolerance `{t}` has a non-numeric value")))?;
        config.tolerances.set(key, value)?;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compute { method, params, strict } => {
            let p = parse_params(&read(&params)?, strict)?;
            let z = compute(method, &p)?;
            println!(
                "{}",
                json!({"method": method.name(), "n": p.n(), "value": [z.re, z.im]})
            );
        }
        Command::Check {
            suite,
            seeds,
            threads,
            out,
            csv,
            tolerances,
        } => {
            let seeds = parse_seed_range(&seeds)?;
            let report = run_suite(&suite, &seeds, &config(threads, &tolerances)?)?;
            emit_report(&report, out.as_ref(), csv.as_ref())?;
        }
        Command::Count { n, histogram } => {
            let count = count_configurations(n)?;
            if histogram {
                let hist: Vec<_> = c_vertex_histogram(n)?.into_iter().collect();
                println!("{}", json!({"n": n, "count": count, "c_vertex_histogram": hist}));
            } else {
                println!("{}", json!({"n": n, "count": count}));
            }
        }
        Command::Enumerate { n, emit } => {
            let configs = enumerate_configurations(n)?;
            let mut w = create(&emit)?;
            let mut written = 0u64;
            for c in configs {
                let kinds: Vec<_> = c.kinds().iter().map(|k| k.name()).collect();
                writeln!(w, "{}", json!({"index": written, "n": n, "kinds": kinds}))?;
                written += 1;
            }
            w.flush()?;
            println!(
                "{}",
                json!({"n": n, "written": written, "path": emit.display().to_string()})
            );
        }
        Command::Sweep {
            spec,
            threads,
            out,
            csv,
        } => {
            let report = run_sweep(&read(&spec)?, &config(threads, &[])?)?;
            emit_report(&report, out.as_ref(), csv.as_ref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
