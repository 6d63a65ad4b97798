//! The `iotforge` command line.
//!
//! Exit codes: 0 success, 1 invalid model (or warnings under
//! `--fail-on-warning`), 2 I/O or usage error, 3 valid but not schedulable.

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diag::{Diagnostic, Severity};
use crate::dsl::{parse_model, SourceFile};
use crate::ops::{self, Operation, Outcome, Status};
use crate::sched::SchedReport;
use crate::thingml::{output_dir, write_units};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_UNSCHEDULABLE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "iotforge",
    version,
    about = "Validate IoT component models, generate ThingML and check schedulability"
)]
pub struct Cli {
    /// Treat warnings as errors (exit 1).
    #[arg(long, global = true)]
    pub fail_on_warning: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check models and print their diagnostics.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Generate ThingML into <out>/<system>/.
    Generate {
        path: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Print units instead of writing them; with a file name, print only that unit.
        #[arg(long, value_name = "UNIT", num_args = 0..=1, default_missing_value = "")]
        stdout: Option<String>,
    },
    /// Run schedulability analysis on a model's allocation.
    Analyze {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Pretty-print a JSON report written by `analyze --format json`.
    Report {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Serve the HTTP API (port from --port, IOTFORGE_PORT or 8470).
    Serve {
        #[arg(long)]
        port: Option<u16>,
    },
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    color: bool,
    fail_on_warning: bool,
}

fn color_enabled() -> bool {
    match std::env::var("IOTFORGE_COLOR").as_deref() {
        Ok("never") => false,
        _ => std::io::stdout().is_terminal() && std::io::stderr().is_terminal(),
    }
}

/// Runs the command line with `args` (including the program name) and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut ctx = Ctx { out, err, color: color_enabled(), fail_on_warning: cli.fail_on_warning };
    match cli.command {
        Command::Validate { paths, format } => validate(&mut ctx, &paths, format),
        Command::Generate { path, out, stdout } => generate(&mut ctx, &path, &out, stdout.as_deref()),
        Command::Analyze { path, format } => analyze(&mut ctx, &path, format),
        Command::Report { path, format } => report(&mut ctx, &path, format),
        Command::Serve { port } => serve(&mut ctx, port),
    }
}

fn read_source(ctx: &mut Ctx, path: &Path) -> Option<SourceFile> {
    match std::fs::read_to_string(path) {
        Ok(text) => Some(SourceFile::new(path.display().to_string(), text)),
        Err(e) => {
            let _ = writeln!(ctx.err, "error: cannot read {}: {e}", path.display());
            None
        }
    }
}

fn render_diagnostic(d: &Diagnostic, path: &str, color: bool) -> String {
    let sev = match (d.severity, color) {
        (Severity::Error, true) => "\x1b[31merror\x1b[0m",
        (Severity::Warning, true) => "\x1b[33mwarning\x1b[0m",
        (Severity::Error, false) => "error",
        (Severity::Warning, false) => "warning",
    };
    format!("{path}:{}:{}: {sev}[{}]: {}", d.line, d.column, d.code, d.message)
}

fn print_diagnostics(w: &mut dyn Write, diags: &[Diagnostic], path: &str, color: bool) {
    for d in diags {
        let _ = writeln!(w, "{}", render_diagnostic(d, path, color));
    }
}

fn run_op(ctx: &mut Ctx, op: Operation, source: &SourceFile) -> Result<Outcome, i32> {
    ops::run(op, source).map_err(|e| {
        let _ = writeln!(ctx.err, "internal error: {e}");
        EXIT_INVALID
    })
}

/// Exit code for a checked model, before any further work.
fn gate(ctx: &Ctx, outcome: &Outcome) -> Option<i32> {
    if outcome.status == Status::Invalid || (ctx.fail_on_warning && outcome.has_warnings()) {
        Some(EXIT_INVALID)
    } else {
        None
    }
}

#[derive(Serialize)]
struct FileDiagnostics<'a> {
    path: String,
    diagnostics: &'a [Diagnostic],
}

fn validate(ctx: &mut Ctx, paths: &[PathBuf], format: Format) -> i32 {
    let mut code = EXIT_OK;
    let mut results: Vec<(String, Vec<Diagnostic>)> = Vec::new();
    for path in paths {
        let Some(source) = read_source(ctx, path) else {
            code = EXIT_IO;
            continue;
        };
        let outcome = match run_op(ctx, Operation::Validate, &source) {
            Ok(o) => o,
            Err(c) => return c,
        };
        if gate(ctx, &outcome).is_some() && code == EXIT_OK {
            code = EXIT_INVALID;
        }
        results.push((source.path, outcome.diagnostics));
    }
    match format {
        Format::Text => {
            for (path, diags) in &results {
                if diags.is_empty() {
                    let _ = writeln!(ctx.out, "{path}: ok");
                }
                print_diagnostics(ctx.out, diags, path, ctx.color);
            }
        }
        Format::Json => {
            let files: Vec<FileDiagnostics> =
                results.iter().map(|(path, diagnostics)| FileDiagnostics { path: path.clone(), diagnostics }).collect();
            let mut text = serde_json::to_string_pretty(&files).expect("diagnostics serialize");
            text.push('\n');
            let _ = ctx.out.write_all(text.as_bytes());
        }
    }
    code
}

fn generate(ctx: &mut Ctx, path: &Path, out_dir: &Path, stdout: Option<&str>) -> i32 {
    let Some(source) = read_source(ctx, path) else { return EXIT_IO };
    let outcome = match run_op(ctx, Operation::Generate, &source) {
        Ok(o) => o,
        Err(c) => return c,
    };
    print_diagnostics(ctx.err, &outcome.diagnostics, &source.path, ctx.color);
    if let Some(code) = gate(ctx, &outcome) {
        return code;
    }
    let units = outcome.units.unwrap_or_default();
    match stdout {
        Some("") => {
            for unit in &units {
                let _ = writeln!(ctx.out, "// ==> {} <==", unit.file_name);
                let _ = ctx.out.write_all(unit.text.as_bytes());
            }
            EXIT_OK
        }
        Some(name) => match units.iter().find(|u| u.file_name == name || u.file_name == format!("{name}.thingml")) {
            Some(unit) => {
                let _ = ctx.out.write_all(unit.text.as_bytes());
                EXIT_OK
            }
            None => {
                let names: Vec<&str> = units.iter().map(|u| u.file_name.as_str()).collect();
                let _ = writeln!(ctx.err, "error: no unit named {name}; units are {}", names.join(", "));
                EXIT_INVALID
            }
        },
        None => {
            let Ok(model) = parse_model(&source) else { return EXIT_INVALID };
            let dir = output_dir(out_dir, &model);
            match write_units(&dir, &units) {
                Ok(files) => {
                    for f in files {
                        let _ = writeln!(ctx.out, "{}", f.display());
                    }
                    EXIT_OK
                }
                Err(e) => {
                    let _ = writeln!(ctx.err, "error: cannot write {}: {e}", dir.display());
                    EXIT_IO
                }
            }
        }
    }
}

fn print_report(ctx: &mut Ctx, report: &SchedReport, format: Format) {
    let text = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    let _ = ctx.out.write_all(text.as_bytes());
}

fn analyze(ctx: &mut Ctx, path: &Path, format: Format) -> i32 {
    let Some(source) = read_source(ctx, path) else { return EXIT_IO };
    let outcome = match run_op(ctx, Operation::Analyze, &source) {
        Ok(o) => o,
        Err(c) => return c,
    };
    print_diagnostics(ctx.err, &outcome.diagnostics, &source.path, ctx.color);
    if let Some(code) = gate(ctx, &outcome) {
        return code;
    }
    let Some(report) = outcome.report else { return EXIT_INVALID };
    print_report(ctx, &report, format);
    if report.schedulable() {
        EXIT_OK
    } else {
        EXIT_UNSCHEDULABLE
    }
}

fn report(ctx: &mut Ctx, path: &Path, format: Format) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: cannot read {}: {e}", path.display());
            return EXIT_IO;
        }
    };
    match serde_json::from_str::<SchedReport>(&text) {
        Ok(report) => {
            print_report(ctx, &report, format);
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {} is not a schedulability report: {e}", path.display());
            EXIT_INVALID
        }
    }
}

fn serve(ctx: &mut Ctx, port: Option<u16>) -> i32 {
    let port = match port.map(Ok).unwrap_or_else(crate::service::port_from_env) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            return EXIT_IO;
        }
    };
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], port));
    let _ = writeln!(ctx.err, "listening on http://{addr}");
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            return EXIT_IO;
        }
    };
    match runtime.block_on(crate::service::serve(addr)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(ctx.err, "error: {e}");
            EXIT_IO
        }
    }
}
