//! `lazydist` — run the bundled probabilistic models on a chosen backend.
//!
//! `query` evaluates one model once, in-process, and prints the
//! probability together with the evaluation counters. `bench` sweeps a
//! list of sizes over a set of backends, running each cell in a child
//! process so that a backend that blows up (in time *or* memory) can be
//! killed at the deadline and reported as a timed-out cell instead of
//! taking the whole sweep down with it.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage error, 3 when every
//! benchmark cell timed out.

use std::io::Read;
use std::path::PathBuf;
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize, Serializer};

use lazydist::models::{run_model, BackendId, ModelError, ModelId};

#[derive(Parser)]
#[command(
    name = "lazydist",
    version,
    about = "Exact probabilistic queries over a lazy non-deterministic graph",
    after_help = "Models: allsix, allfiveorsix, palindrome, palindrome-efficient, \
                  consecutivebs, flipcoin-heads, sprinkler (reports P(grass wet)), \
                  partialpattern. Backends: lazy, strict, list."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one model query once and print the record.
    Query {
        #[arg(long, value_parser = parse_model)]
        model: ModelId,
        /// Problem size; ignored by sprinkler and partialpattern.
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, value_parser = parse_backend, default_value = "lazy")]
        backend: BackendId,
        #[arg(long, value_enum, default_value_t = QueryFormat::Human)]
        format: QueryFormat,
    },
    /// Sweep sizes and backends, one record per (n, backend) cell.
    Bench {
        #[arg(long, value_parser = parse_model)]
        model: ModelId,
        /// Comma-separated list of sizes, e.g. --n 5,6,7.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        /// Comma-separated subset of lazy,strict,list.
        #[arg(long, value_parser = parse_backend, value_delimiter = ',',
              default_value = "lazy,strict,list")]
        backends: Vec<BackendId>,
        /// Repetitions per cell; wall_ms reports their mean.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        runs: u32,
        /// Per-repetition deadline in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, value_enum, default_value_t = EmitFormat::Json)]
        format: EmitFormat,
        /// Write records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_model(s: &str) -> Result<ModelId, String> {
    s.parse()
}

fn parse_backend(s: &str) -> Result<BackendId, String> {
    s.parse()
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryFormat {
    Human,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitFormat {
    Json,
    Csv,
}

/// One result row. Field order is the output schema, for JSON keys and
/// CSV columns alike.
#[derive(Serialize)]
struct BenchRecord {
    name: String,
    n: u32,
    backend: String,
    /// NaN (a timed-out cell has no probability) serializes as JSON null.
    #[serde(serialize_with = "nan_as_null")]
    probability: f64,
    choice_expansions: u64,
    suspensions_forced: u64,
    wall_ms: f64,
    runs: u32,
    timed_out: bool,
}

fn nan_as_null<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_nan() {
        s.serialize_none()
    } else {
        s.serialize_f64(*x)
    }
}

const CSV_HEADER: [&str; 9] = [
    "name",
    "n",
    "backend",
    "probability",
    "choice_expansions",
    "suspensions_forced",
    "wall_ms",
    "runs",
    "timed_out",
];

/// A failure with the exit code it deserves.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::internal(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::internal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Query {
            model,
            n,
            backend,
            format,
        } => cmd_query(model, n, backend, format),
        Cmd::Bench {
            model,
            n,
            backends,
            runs,
            timeout,
            format,
            out,
        } => cmd_bench(model, &n, &backends, runs, timeout, format, out.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("lazydist: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_query(
    model: ModelId,
    n: u32,
    backend: BackendId,
    format: QueryFormat,
) -> Result<u8, Failure> {
    let started = Instant::now();
    let result = run_model(model, backend, n).map_err(|e| match e {
        ModelError::InvalidN { .. } => Failure::usage(e.to_string()),
        other => Failure::internal(other.to_string()),
    })?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let record = BenchRecord {
        name: model.name().to_string(),
        n,
        backend: backend.name().to_string(),
        probability: result.probability,
        choice_expansions: result.stats.choice_expansions,
        suspensions_forced: result.stats.suspensions_forced,
        wall_ms,
        runs: 1,
        timed_out: false,
    };
    match format {
        QueryFormat::Human => println!(
            "{} n={} backend={} probability={} choice_expansions={} \
             suspensions_forced={} wall_ms={:.3}",
            record.name,
            record.n,
            record.backend,
            record.probability,
            record.choice_expansions,
            record.suspensions_forced,
            record.wall_ms,
        ),
        QueryFormat::Json => println!("{}", serde_json::to_string(&record)?),
    }
    Ok(0)
}

fn cmd_bench(
    model: ModelId,
    sizes: &[u32],
    backends: &[BackendId],
    runs: u32,
    timeout: f64,
    format: EmitFormat,
    out: Option<&std::path::Path>,
) -> Result<u8, Failure> {
    if !timeout.is_finite() || timeout <= 0.0 {
        return Err(Failure::usage(format!(
            "--timeout must be a positive number of seconds, got {timeout}"
        )));
    }
    let mut records = Vec::with_capacity(sizes.len() * backends.len());
    for &n in sizes {
        for &backend in backends {
            records.push(bench_cell(model, n, backend, runs, timeout)?);
        }
    }
    emit(&records, format, out)?;
    if !records.is_empty() && records.iter().all(|r| r.timed_out) {
        Ok(3)
    } else {
        Ok(0)
    }
}

/// What one child repetition came back with.
struct ChildReport {
    probability: f64,
    choice_expansions: u64,
    suspensions_forced: u64,
    wall_ms: f64,
}

enum ChildOutcome {
    Done(ChildReport),
    /// Deadline hit, or the child died abnormally (the usual cause at
    /// large n being the kernel's out-of-memory kill).
    Gone { elapsed_ms: f64 },
}

fn bench_cell(
    model: ModelId,
    n: u32,
    backend: BackendId,
    runs: u32,
    timeout: f64,
) -> Result<BenchRecord, Failure> {
    let mut walls = Vec::with_capacity(runs as usize);
    let mut first: Option<ChildReport> = None;
    for _ in 0..runs {
        match run_child(model, n, backend, timeout)? {
            ChildOutcome::Gone { elapsed_ms } => {
                return Ok(BenchRecord {
                    name: model.name().to_string(),
                    n,
                    backend: backend.name().to_string(),
                    probability: f64::NAN,
                    choice_expansions: 0,
                    suspensions_forced: 0,
                    wall_ms: elapsed_ms,
                    runs,
                    timed_out: true,
                });
            }
            ChildOutcome::Done(report) => {
                if let Some(seen) = &first {
                    let same = seen.probability.to_bits() == report.probability.to_bits()
                        && seen.choice_expansions == report.choice_expansions
                        && seen.suspensions_forced == report.suspensions_forced;
                    if !same {
                        return Err(Failure::internal(format!(
                            "nondeterministic run: {model} n={n} backend={backend} \
                             disagreed across repetitions"
                        )));
                    }
                }
                walls.push(report.wall_ms);
                first = Some(report);
            }
        }
    }
    let report = first.expect("runs >= 1 is enforced by the parser");
    Ok(BenchRecord {
        name: model.name().to_string(),
        n,
        backend: backend.name().to_string(),
        probability: report.probability,
        choice_expansions: report.choice_expansions,
        suspensions_forced: report.suspensions_forced,
        wall_ms: walls.iter().sum::<f64>() / walls.len() as f64,
        runs,
        timed_out: false,
    })
}

/// Run one repetition as a child process, enforcing the deadline from
/// outside so that runaway cells are killed rather than waited on.
fn run_child(
    model: ModelId,
    n: u32,
    backend: BackendId,
    timeout: f64,
) -> Result<ChildOutcome, Failure> {
    let exe = std::env::current_exe()?;
    let started = Instant::now();
    let mut child = Command::new(exe)
        .args([
            "query",
            "--model",
            model.name(),
            "--n",
            &n.to_string(),
            "--backend",
            backend.name(),
            "--format",
            "json",
        ])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()?;

    let deadline = started + Duration::from_secs_f64(timeout);
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if Instant::now() >= deadline {
            child.kill().ok();
            child.wait()?;
            return Ok(ChildOutcome::Gone {
                elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
            });
        }
        std::thread::sleep(Duration::from_millis(2));
    };

    let mut stdout = String::new();
    if let Some(mut pipe) = child.stdout.take() {
        pipe.read_to_string(&mut stdout)?;
    }
    let mut stderr = String::new();
    if let Some(mut pipe) = child.stderr.take() {
        pipe.read_to_string(&mut stderr)?;
    }

    match status.code() {
        Some(0) => {
            #[derive(Deserialize)]
            struct Line {
                probability: f64,
                choice_expansions: u64,
                suspensions_forced: u64,
                wall_ms: f64,
            }
            let line: Line = serde_json::from_str(stdout.trim())
                .map_err(|e| Failure::internal(format!("bad record from child: {e}")))?;
            Ok(ChildOutcome::Done(ChildReport {
                probability: line.probability,
                choice_expansions: line.choice_expansions,
                suspensions_forced: line.suspensions_forced,
                wall_ms: line.wall_ms,
            }))
        }
        Some(2) => Err(Failure::usage(stderr.trim().to_string())),
        Some(1) => Err(Failure::internal(stderr.trim().to_string())),
        // Killed by a signal or an unexpected code: the cell exhausted
        // its resources. Report it like a timeout rather than dying.
        _ => Ok(ChildOutcome::Gone {
            elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
        }),
    }
}

fn emit(records: &[BenchRecord], format: EmitFormat, out: Option<&std::path::Path>) -> Result<(), Failure> {
    let payload = match format {
        EmitFormat::Json => {
            let mut text = serde_json::to_string_pretty(records)?;
            text.push('\n');
            text.into_bytes()
        }
        EmitFormat::Csv => csv_bytes(records)?,
    };
    match out {
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&payload)?;
        }
        Some(path) => {
            std::fs::write(path, payload).map_err(|e| {
                Failure::internal(format!("cannot write {}: {e}", path.display()))
            })?;
        }
    }
    Ok(())
}

fn csv_bytes(records: &[BenchRecord]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)
        .map_err(|e| Failure::internal(e.to_string()))?;
    for r in records {
        let probability = if r.probability.is_nan() {
            "NaN".to_string()
        } else {
            r.probability.to_string()
        };
        w.write_record([
            r.name.as_str(),
            &r.n.to_string(),
            r.backend.as_str(),
            &probability,
            &r.choice_expansions.to_string(),
            &r.suspensions_forced.to_string(),
            &r.wall_ms.to_string(),
            &r.runs.to_string(),
            &r.timed_out.to_string(),
        ])
        .map_err(|e| Failure::internal(e.to_string()))?;
    }
    w.into_inner()
        .map_err(|e| Failure::internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(p: f64, timed_out: bool) -> BenchRecord {
        BenchRecord {
            name: "allsix".into(),
            n: 3,
            backend: "lazy".into(),
            probability: p,
            choice_expansions: 18,
            suspensions_forced: 40,
            wall_ms: 0.25,
            runs: 3,
            timed_out,
        }
    }

    #[test]
    fn json_keys_follow_the_schema_order() {
        let text = serde_json::to_string(&sample(0.25, false)).unwrap();
        let mut last = 0;
        for key in CSV_HEADER {
            let pos = text.find(&format!("\"{key}\"")).expect(key);
            assert!(pos > last, "{key} out of order in {text}");
            last = pos;
        }
    }

    #[test]
    fn timed_out_probability_is_json_null_and_csv_nan() {
        let text = serde_json::to_string(&sample(f64::NAN, true)).unwrap();
        assert!(text.contains("\"probability\":null"));

        let bytes = csv_bytes(&[sample(f64::NAN, true)]).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.lines().nth(1).unwrap().contains("NaN"));
    }

    #[test]
    fn empty_emission_is_a_header_only_csv() {
        let bytes = csv_bytes(&[]).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text.trim_end(), CSV_HEADER.join(","));
    }
}
