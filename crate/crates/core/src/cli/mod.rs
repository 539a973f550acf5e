//! The `sumprod` command line: one subcommand per experiment, `key=value`
//! parameters, an optional TOML config and CSV or JSON output.
//!
//! Parameter precedence is command line, then the config file (top-level
//! keys and the table named after the subcommand), then defaults; the
//! resolved values and their sources head every output.
//!
//! Exit codes: 0 pass, 1 an asserted bound failed, 2 configuration or
//! domain error, 3 capacity exceeded, 4 search budget exhausted.

mod commands;
mod params;

pub use params::{ParamSpec, Params, Source};

use crate::error::{LabError, Result};
use clap::{Arg, ArgAction, Command};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    BoundFail,
    Timeout,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::BoundFail => 1,
            Status::Timeout => 4,
        }
    }
}

/// What a subcommand produced.
pub struct Outcome {
    pub status: Status,
    /// Machine-readable table (CSV body with header row).
    pub csv: String,
    pub json: serde_json::Value,
    pub summary: Vec<String>,
}

pub fn exit_code(e: &LabError) -> i32 {
    match e {
        LabError::Capacity(_) => 3,
        LabError::Timeout(_) => 4,
        _ => 2,
    }
}

fn cli() -> Command {
    let mut app = Command::new("sumprod")
        .about("Finite experiments on monochromatic {x+y, xy} patterns")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg(Arg::new("config").long("config").global(true).value_name("FILE").help("TOML parameter file"))
        .arg(Arg::new("out").long("out").global(true).value_name("PATH").help("write the machine-readable result here"))
        .arg(
            Arg::new("format")
                .long("format")
                .global(true)
                .value_parser(["csv", "json"])
                .default_value("csv"),
        )
        .arg(
            Arg::new("workers")
                .long("workers")
                .global(true)
                .env("SUMPROD_WORKERS")
                .value_parser(clap::value_parser!(usize))
                .help("worker threads for parallel sections"),
        );
    for spec in commands::SPECS {
        let mut help = String::from("parameters (key=value):\n");
        for p in spec.params {
            help.push_str(&format!("  {:<12} {} [default: {}]\n", p.key, p.help, p.default));
        }
        app = app.subcommand(
            Command::new(spec.name)
                .about(spec.about)
                .after_help(help)
                .arg(Arg::new("params").num_args(0..).action(ArgAction::Append).value_name("KEY=VALUE")),
        );
    }
    app
}

fn header_lines(cmd: &str, params: &Params) -> Vec<String> {
    let mut out = vec![format!("sumprod {cmd}")];
    out.extend(params.iter().map(|(k, v, s)| format!("{k}={v} ({})", s.name())));
    out
}

fn render(cmd: &str, params: &Params, outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut s = String::new();
            for line in header_lines(cmd, params) {
                s.push_str("# ");
                s.push_str(&line);
                s.push('\n');
            }
            s.push_str(&outcome.csv);
            s
        }
        Format::Json => {
            let mut p = serde_json::Map::new();
            for (k, v, src) in params.iter() {
                p.insert(k.to_string(), serde_json::json!({ "value": v, "source": src.name() }));
            }
            let doc = serde_json::json!({
                "command": cmd,
                "params": p,
                "result": outcome.json,
                "summary": outcome.summary,
            });
            let mut s = serde_json::to_string_pretty(&doc).unwrap_or_default();
            s.push('\n');
            s
        }
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let m = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let (name, sub) = m.subcommand().expect("subcommand required");
    let format = match m.get_one::<String>("format").map(String::as_str) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    };
    let out_path = m.get_one::<String>("out").map(PathBuf::from);
    let workers = m.get_one::<usize>("workers").copied();
    let raw: Vec<String> = sub.get_many::<String>("params").map(|v| v.cloned().collect()).unwrap_or_default();
    let config = m.get_one::<String>("config").map(PathBuf::from);

    let result = (|| -> Result<(Params, Outcome)> {
        let spec = commands::SPECS.iter().find(|s| s.name == name).expect("registered subcommand");
        let file = match &config {
            Some(p) => Some(std::fs::read_to_string(p).map_err(|e| LabError::Config(format!("{}: {e}", p.display())))?),
            None => None,
        };
        let params = Params::resolve(spec.params, file.as_deref(), name, &raw)?;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = workers {
            if w == 0 {
                return Err(LabError::Config("--workers must be positive".into()));
            }
            builder = builder.num_threads(w);
        }
        let pool = builder.build().map_err(|e| LabError::Config(e.to_string()))?;
        let outcome = pool.install(|| (spec.run)(&params))?;
        Ok((params, outcome))
    })();

    match result {
        Ok((params, outcome)) => {
            let body = render(name, &params, &outcome, format);
            if let Some(path) = out_path {
                if let Err(e) = std::fs::write(&path, body) {
                    let _ = writeln!(stderr, "io error: {}: {e}", path.display());
                    return 2;
                }
                for line in &outcome.summary {
                    let _ = writeln!(stdout, "{line}");
                }
            } else {
                let _ = write!(stdout, "{body}");
                if format == Format::Csv {
                    for line in &outcome.summary {
                        let _ = writeln!(stdout, "# {line}");
                    }
                }
            }
            outcome.status.code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests;
