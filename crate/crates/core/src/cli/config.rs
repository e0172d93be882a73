use std::path::PathBuf;

use serde::Serialize;

use crate::error::{input, Result};
use crate::modular_gl2z::RelationMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    /// Series truncation in whole powers of q.
    pub prec: i64,
    /// Numeric tolerance; `None` keeps each check's pinned value.
    pub tol: Option<f64>,
    pub dedup_tol: f64,
    pub mode: RelationMode,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip)]
    pub jobs: usize,
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
    #[serde(skip)]
    pub format: OutputFormat,
    pub use_imported: bool,
    pub experimental: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prec: 40,
            tol: None,
            dedup_tol: crate::bloch::TAU_DEDUP,
            mode: RelationMode::FullUnits,
            trials: 100,
            seed: 0,
            jobs: 1,
            cache_dir: None,
            format: OutputFormat::Json,
            use_imported: false,
            experimental: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return input(format!("--tol must be positive, got {}", t));
            }
        }
        if !(self.dedup_tol > 0.0 && self.dedup_tol.is_finite()) {
            return input("dedup tolerance must be positive");
        }
        if self.prec < 0 {
            return input(format!("--prec must be non-negative, got {}", self.prec));
        }
        if self.jobs == 0 {
            return input("--jobs must be at least 1");
        }
        Ok(())
    }

    pub fn tol_or(&self, pinned: f64) -> f64 {
        self.tol.unwrap_or(pinned)
    }
}
