//! Run configuration: a JSON file with nested keys, overridable by CLI
//! flags. Every field has a desk-scale default, so an empty config is valid.

use crate::laser::LaserConfig;
use crate::states::InitialState;
use crate::{HarnessError, Result};
use nlsplit_core::operators::Potential;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct RunConfig {
    /// Gridpoints per axis for 1D scans.
    pub grid_n: usize,
    /// Box half-width; the domain is `[-half_width, half_width)`.
    pub half_width: f64,
    /// Semiclassical parameter for scans at fixed ε.
    pub eps: f64,
    /// Nonlinearity strength/sign.
    pub theta: f64,
    /// `"none"` or `"harmonic"`.
    pub potential: String,
    /// Harmonic frequency when `potential = "harmonic"`.
    pub omega: f64,
    /// Schemes to scan.
    pub schemes: Vec<String>,
    /// Dyadic step range: largest and smallest step (for eps-scan this is
    /// the ε = t range).
    pub t_max: f64,
    pub t_min: f64,
    /// Horizon of global-error scans.
    pub t_end: f64,
    /// Initial state for Gaussian-based scans.
    pub state: InitialState,
    /// Reference refinement for local errors.
    pub ref_substeps: usize,
    /// Laser-beam run settings.
    pub laser: LaserConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid_n: 2048,
            half_width: 8.0,
            eps: 1e-2,
            theta: 0.25,
            potential: "none".into(),
            omega: 1.0,
            schemes: nlsplit_core::schemes::BUILTIN_SCHEMES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            t_max: 1e-1,
            t_min: 1e-4,
            t_end: 0.5,
            state: InitialState::Gaussian {
                center: 1.0,
                width: 1.0,
                shift: 0.0,
            },
            ref_substeps: 64,
            laser: LaserConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(HarnessError::io(path.display().to_string()))?;
        serde_json::from_str(&text)
            .map_err(|e| HarnessError::BadConfig(format!("{}: {e}", path.display())))
    }

    pub fn potential(&self) -> Result<Potential> {
        match self.potential.as_str() {
            "none" => Ok(Potential::None),
            "harmonic" => Ok(Potential::Harmonic { omega: self.omega }),
            other => Err(HarnessError::BadConfig(format!(
                "unknown potential `{other}` (none or harmonic)"
            ))),
        }
    }
}
