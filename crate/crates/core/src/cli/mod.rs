//! Command-line frontend: argument parsing, report envelope, cache.

pub mod cache;
pub mod commands;
pub mod config;
pub mod reference;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::modular_gl2z::RelationMode;
use crate::qseries::CheckStatus;
use crate::Error;
use commands::{BianchiVerify, BlochCheck, CycloReport, Field, HmapCheck, UnitsCheck};
use config::{OutputFormat, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    FullUnits,
    PaperLiteral,
}

impl From<ModeArg> for RelationMode {
    fn from(m: ModeArg) -> RelationMode {
        match m {
            ModeArg::FullUnits => RelationMode::FullUnits,
            ModeArg::PaperLiteral => RelationMode::Diagonal,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "eulercx", version, about = "Euler, cyclotomic and Bianchi complexes: builds, checks and reports")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: GlobalOpts,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Series truncation in whole powers of q.
    #[arg(long, global = true, default_value_t = 40)]
    pub prec: i64,
    /// Numeric tolerance (defaults to each check's pinned value).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value = "full-units")]
    pub mode: ModeArg,
    /// Random tuples for the five-term check.
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: OutputFormat,
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[arg(long, global = true, env = "EULERCX_CACHE_DIR", default_value = ".eulercx-cache")]
    pub cache_dir: PathBuf,
    /// Allow imported reference facts to act as oracles.
    #[arg(long, global = true)]
    pub use_imported: bool,
    /// Also run experimental probes; they never change the exit status.
    #[arg(long, global = true)]
    pub experimental: bool,
    /// Worker threads for independent jobs.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// GL2(Z) modular complex at level N and its cyclotomic map.
    Cyclo {
        #[arg(long, default_value_t = 11)]
        level: u64,
        #[arg(long, value_enum, default_value = "dims")]
        report: CycloReport,
    },
    /// Bianchi complexes over Z[i] or Z[ρ].
    Bianchi {
        #[arg(long, value_enum, default_value = "gaussian")]
        field: Field,
        #[arg(long)]
        prime_norm: Option<u64>,
        /// Level generator, e.g. 2+i or 3-2ρ.
        #[arg(long, allow_hyphen_values = true)]
        ideal: Option<String>,
        #[arg(long, value_enum, default_value = "suite")]
        verify: BianchiVerify,
    },
    /// Siegel-unit q-series checks.
    Units {
        #[arg(long, default_value_t = 5)]
        level: u64,
        #[arg(long, value_enum, default_value = "all")]
        check: UnitsCheck,
    },
    /// Dilogarithm identity suites.
    Bloch {
        #[arg(long, value_enum, default_value = "five-term")]
        check: BlochCheck,
        #[arg(long)]
        level: Option<u64>,
    },
    /// Numerical checks of the elliptic h-map.
    Hmap {
        #[arg(long, default_value_t = 3)]
        level: u64,
        #[arg(long, value_enum, default_value = "all")]
        check: HmapCheck,
    },
    /// All acceptance criteria.
    Suite,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cyclo { .. } => "cyclo",
            Command::Bianchi { .. } => "bianchi",
            Command::Units { .. } => "units",
            Command::Bloch { .. } => "bloch",
            Command::Hmap { .. } => "hmap",
            Command::Suite => "suite",
        }
    }

    /// CSV is only offered for dimension tables.
    fn has_table(&self) -> bool {
        matches!(
            self,
            Command::Cyclo { report: CycloReport::Dims | CycloReport::All, .. } | Command::Bianchi { verify: BianchiVerify::Dims, .. }
        )
    }

    fn params(&self) -> Value {
        match self {
            Command::Cyclo { level, report } => json!({"level": level, "report": report}),
            Command::Bianchi { field, prime_norm, ideal, verify } => json!({"field": field, "prime_norm": prime_norm, "ideal": ideal, "verify": verify}),
            Command::Units { level, check } => json!({"level": level, "check": check}),
            Command::Bloch { check, level } => json!({"check": check, "level": level}),
            Command::Hmap { level, check } => json!({"level": level, "check": check}),
            Command::Suite => json!({}),
        }
    }
}

impl GlobalOpts {
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            prec: self.prec,
            tol: self.tol,
            mode: self.mode.into(),
            trials: self.trials,
            seed: self.seed,
            jobs: self.jobs,
            cache_dir: if self.no_cache { None } else { Some(self.cache_dir.clone()) },
            format: self.format,
            use_imported: self.use_imported,
            experimental: self.experimental,
            ..RunConfig::default()
        }
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> crate::Result<report::Outcome> {
    match cmd {
        Command::Cyclo { level, report } => commands::cyclo(*level, *report, cfg),
        Command::Bianchi { field, prime_norm, ideal, verify } => commands::bianchi(*field, *prime_norm, ideal.as_deref(), *verify, cfg),
        Command::Units { level, check } => commands::units(*level, *check, cfg),
        Command::Bloch { check, level } => commands::bloch_cmd(*check, *level, cfg),
        Command::Hmap { level, check } => commands::hmap_cmd(*check, *level, cfg),
        Command::Suite => commands::suite(cfg),
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

/// Report text (always JSON) for a command, through the cache when enabled.
pub fn report_json(cmd: &Command, cfg: &RunConfig, warnings: &mut Vec<String>) -> crate::Result<String> {
    let params = cmd.params();
    let config = serde_json::to_value(cfg).expect("config serializes");
    let produce = || -> crate::Result<String> {
        let o = dispatch(cmd, cfg)?;
        Ok(report::json_text(&report::envelope(cmd.name(), &params, &config, &o)))
    };
    match &cfg.cache_dir {
        None => produce(),
        Some(dir) => cache::Cache::new(dir).get_or_produce(&cache::cache_key(cmd.name(), &params, &config), warnings, produce),
    }
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let cfg = cli.opts.run_config();
    if let Err(e) = cfg.validate() {
        let _ = writeln!(stderr, "error: {}", e);
        return EXIT_USAGE;
    }
    if cfg.format == OutputFormat::Csv && !cli.command.has_table() {
        let _ = writeln!(stderr, "error: csv output is only available for dimension tables (cyclo --report dims, bianchi --verify dims)");
        return EXIT_USAGE;
    }
    let mut warnings = Vec::new();
    let text = match report_json(&cli.command, &cfg, &mut warnings) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e);
            return error_code(&e);
        }
    };
    let v: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: report is not valid JSON: {}", e);
            return EXIT_FAIL;
        }
    };
    for w in v["warnings"].as_array().into_iter().flatten() {
        warnings.push(w.as_str().unwrap_or_default().to_string());
    }
    let rendered = match cfg.format {
        OutputFormat::Json => Ok(text),
        f => report::render(&v, f),
    };
    let rendered = match rendered {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e);
            return error_code(&e);
        }
    };
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {}", w);
    }
    let written = match &cli.opts.out {
        Some(p) => std::fs::write(p, rendered.as_bytes()),
        None => stdout.write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write report: {}", e);
        return EXIT_FAIL;
    }
    match report::status_of(&v) {
        CheckStatus::Fail => EXIT_FAIL,
        _ => EXIT_OK,
    }
}
