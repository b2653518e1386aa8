//! Experiment harness for the split-step integrators: initial states,
//! convergence/estimator scans, the adaptive laser-beam run, and
//! machine-readable result emission.

pub mod config;
pub mod emit;
pub mod laser;
pub mod scan;
pub mod states;

pub use config::RunConfig;
pub use emit::{emit, parse_csv, write_snapshot, OutputFormat};
pub use laser::{run_laser, LaserConfig, LaserOutput};
pub use scan::{
    dyadic_steps, eps_scan, fitted_slope, global_error_scan, order_scan, wkb_scan, ScanContext,
    ScanRecord,
};
pub use states::InitialState;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] nlsplit_core::Error),
    #[error("state is not resolved on this grid: {0}")]
    Unresolved(String),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed record data: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub fn io(path: impl Into<String>) -> impl FnOnce(std::io::Error) -> HarnessError {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}
