//! `dnl` subcommands. Each one wraps a single library operation.
//!
//! Exit codes: 0 success, 1 validation failure or stale data, 2 usage
//! error, 3 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, TimeZone, Utc};
use clap::{Parser, Subcommand};
use dnl_core::canonical::to_canonical_vec;
use dnl_core::{
    check_staleness, compare_labels_at, fingerprint_csv, parse_label, profile_csv_at,
    render_comparison_documents, render_label, resolve, validate_label, DatasetProfile, Label,
    ProfileError, ResolvedView, ValidationReport, ViolationLevel,
};
use serde::Serialize;

use crate::server::{self, AppState, Clock};
use crate::store::LabelStore;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dnl", version, about = "Dataset Nutrition Label tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a label document.
    Validate {
        label: PathBuf,
        /// Print the validation report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Profile a CSV file.
    Profile {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Timestamp to record instead of the current time.
        #[arg(long, value_parser = parse_timestamp)]
        profiled_at: Option<DateTime<Utc>>,
    },
    /// Print the structural fingerprint of a CSV file.
    Fingerprint { csv: PathBuf },
    /// Compare a label's recorded structure with a CSV file.
    CheckStaleness {
        label: PathBuf,
        csv: PathBuf,
    },
    /// Alerts and FYIs for one use case and prediction.
    Resolve {
        label: PathBuf,
        #[arg(long)]
        use_case: String,
        #[arg(long)]
        prediction: String,
        #[arg(long)]
        json: bool,
    },
    /// Compare labels for one use case title.
    Compare {
        #[arg(long)]
        use_case: String,
        #[arg(required = true, num_args = 1..)]
        labels: Vec<PathBuf>,
        /// Also write comparison.html here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_timestamp)]
        generated_at: Option<DateTime<Utc>>,
    },
    /// Render a label to static HTML.
    Render {
        label: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "DNL_STORE")]
        store: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

fn parse_timestamp(s: &str) -> Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| format!("not an RFC 3339 timestamp: {e}"))
}

/// `SOURCE_DATE_EPOCH` when set, else the wall clock.
pub fn default_now() -> Result<DateTime<Utc>, String> {
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => v
            .trim()
            .parse::<i64>()
            .ok()
            .and_then(|secs| Utc.timestamp_opt(secs, 0).single())
            .ok_or_else(|| format!("SOURCE_DATE_EPOCH is not a valid epoch: {v:?}")),
        Err(_) => Ok(Utc::now()),
    }
}

/// Failure of one subcommand, carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<i32, Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<fs::File, Failure> {
    fs::File::open(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, bytes: &[u8]) -> Result<(), Failure> {
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::new(EXIT_IO, format!("stdout: {e}")))
}

fn canonical<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    to_canonical_vec(value).expect("library values always encode")
}

fn report_violations(err: &mut dyn Write, source: &Path, report: &ValidationReport) {
    for v in &report.violations {
        let level = match v.level {
            ViolationLevel::Error => "error",
            ViolationLevel::Warning => "warning",
        };
        let _ = writeln!(err, "{}: {level} {} at {}: {}", source.display(), v.code, v.path, v.message);
    }
}

/// Reads, parses and validates a label. Anything short of a passing label
/// is a failure with the matching exit code.
fn load_label(path: &Path, err: &mut dyn Write) -> Result<Label, Failure> {
    let bytes = read(path)?;
    let label = parse_label(&bytes)
        .map_err(|e| Failure::new(EXIT_FAILED, format!("{}: {} {}", path.display(), e.code(), e)))?;
    let report = validate_label(&label);
    report_violations(err, path, &report);
    if !report.passed() {
        return Err(Failure::new(
            EXIT_FAILED,
            format!("{}: label fails validation", path.display()),
        ));
    }
    Ok(label)
}

fn profile_file(path: &Path, at: DateTime<Utc>) -> Result<DatasetProfile, Failure> {
    profile_csv_at(open(path)?, at).map_err(|e| profile_failure(path, e))
}

fn profile_failure(path: &Path, e: ProfileError) -> Failure {
    let code = match e {
        ProfileError::Io(_) => EXIT_IO,
        _ => EXIT_FAILED,
    };
    Failure::new(code, format!("{}: {} {}", path.display(), e.code(), e))
}

fn now_or(given: Option<DateTime<Utc>>) -> Result<DateTime<Utc>, Failure> {
    match given {
        Some(t) => Ok(t),
        None => default_now().map_err(|m| Failure::new(EXIT_USAGE, m)),
    }
}

fn cmd_validate(label: &Path, json: bool, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let bytes = read(label)?;
    let parsed = match parse_label(&bytes) {
        Ok(l) => l,
        Err(e) => {
            if json {
                let body = serde_json::json!({
                    "verdict": "fail",
                    "parse_error": { "code": e.code(), "path": e.path(), "message": e.to_string() },
                });
                emit(out, &dnl_core::canonical::value_to_canonical_vec(&body))?;
            } else {
                emit(out, b"INVALID\n")?;
            }
            let _ = writeln!(err, "{}: {} {}", label.display(), e.code(), e);
            return Ok(EXIT_FAILED);
        }
    };
    let report = validate_label(&parsed);
    report_violations(err, label, &report);
    if json {
        emit(out, &canonical(&report))?;
    } else {
        emit(out, if report.passed() { b"OK\n" } else { b"INVALID\n" })?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_profile(
    csv: &Path,
    dest: Option<&Path>,
    at: Option<DateTime<Utc>>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let profile = profile_file(csv, now_or(at)?)?;
    let bytes = profile.to_canonical_json();
    match dest {
        Some(path) => {
            write_out(path, &bytes)?;
            let _ = writeln!(err, "wrote {}", path.display());
        }
        None => emit(out, &bytes)?,
    }
    Ok(EXIT_OK)
}

fn cmd_fingerprint(csv: &Path, out: &mut dyn Write) -> Outcome {
    let fp = fingerprint_csv(open(csv)?).map_err(|e| profile_failure(csv, e))?;
    emit(out, &canonical(&fp))?;
    Ok(EXIT_OK)
}

fn cmd_check_staleness(label: &Path, csv: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let label_doc = load_label(label, err)?;
    let profile = profile_file(csv, now_or(None)?)?;
    let report = check_staleness(&label_doc, &profile)
        .map_err(|e| Failure::new(EXIT_FAILED, format!("{}: {} {}", label.display(), e.code(), e)))?;
    emit(out, &canonical(&report))?;
    let _ = writeln!(err, "{}", report.note);
    Ok(if report.is_fresh() { EXIT_OK } else { EXIT_FAILED })
}

fn describe_view(view: &ResolvedView) -> String {
    let mut s = format!(
        "use case {} / prediction {}\nalerts: {} red, {} orange, {} yellow\n",
        view.use_case_id,
        view.prediction_id,
        view.severity_summary.red,
        view.severity_summary.orange,
        view.severity_summary.yellow,
    );
    for a in &view.alerts {
        s.push_str(&format!("  [{}] {}  {}\n", a.severity.color(), a.id, a.title));
    }
    s.push_str(&format!("fyis: {}\n", view.fyis.len()));
    for f in &view.fyis {
        s.push_str(&format!("  [green] {}  {}\n", f.id, f.title));
    }
    s
}

fn cmd_resolve(
    label: &Path,
    use_case: &str,
    prediction: &str,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let label_doc = load_label(label, err)?;
    let view = resolve(&label_doc, use_case, prediction)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("{} {}", e.code(), e)))?;
    if json {
        emit(out, &canonical(&view))?;
    } else {
        emit(out, describe_view(&view).as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn cmd_compare(
    title: &str,
    paths: &[PathBuf],
    dest: Option<&Path>,
    at: Option<DateTime<Utc>>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let labels = paths
        .iter()
        .map(|p| load_label(p, err))
        .collect::<Result<Vec<_>, _>>()?;
    let report = compare_labels_at(&labels, title, now_or(at)?).map_err(|e| {
        let code = match e {
            dnl_core::CompareError::NoLabelMatches(_) => EXIT_FAILED,
            _ => EXIT_USAGE,
        };
        Failure::new(code, format!("{} {}", e.code(), e))
    })?;
    if let Some(dir) = dest {
        render_comparison_documents(&report)
            .write_to(dir)
            .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", dir.display())))?;
        let _ = writeln!(err, "wrote {}", dir.join("comparison.html").display());
    }
    emit(out, &canonical(&report))?;
    Ok(EXIT_OK)
}

fn cmd_render(label: &Path, dir: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let label_doc = load_label(label, err)?;
    let docs = render_label(&label_doc).map_err(|e| Failure::new(EXIT_FAILED, e.to_string()))?;
    docs.write_to(dir)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", dir.display())))?;
    let listing: String = docs.paths().map(|p| format!("{}\n", dir.join(p).display())).collect();
    emit(out, listing.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_serve(store: &Path, host: &str, port: u16) -> Outcome {
    let store = LabelStore::open(store).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    let clock: Clock = match std::env::var_os("SOURCE_DATE_EPOCH") {
        Some(_) => {
            let fixed = now_or(None)?;
            Arc::new(move || fixed)
        }
        None => server::system_clock(),
    };
    let state = Arc::new(AppState { store, clock });
    let runtime = tokio::runtime::Runtime::new()
        .map_err(|e| Failure::new(EXIT_IO, format!("runtime: {e}")))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| Failure::new(EXIT_IO, format!("bind {host}:{port}: {e}")))?;
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        server::serve_on(listener, state, shutdown)
            .await
            .map_err(|e| Failure::new(EXIT_IO, format!("serve: {e}")))?;
        Ok(EXIT_OK)
    })
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Validate { label, json } => cmd_validate(label, *json, out, err),
        Command::Profile {
            csv,
            out: dest,
            profiled_at,
        } => cmd_profile(csv, dest.as_deref(), *profiled_at, out, err),
        Command::Fingerprint { csv } => cmd_fingerprint(csv, out),
        Command::CheckStaleness { label, csv } => cmd_check_staleness(label, csv, out, err),
        Command::Resolve {
            label,
            use_case,
            prediction,
            json,
        } => cmd_resolve(label, use_case, prediction, *json, out, err),
        Command::Compare {
            use_case,
            labels,
            out: dest,
            generated_at,
        } => cmd_compare(use_case, labels, dest.as_deref(), *generated_at, out, err),
        Command::Render { label, out: dir } => cmd_render(label, dir, out, err),
        Command::Serve { store, port, host } => cmd_serve(store, host, *port),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "dnl: {}", f.message);
            f.code
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
