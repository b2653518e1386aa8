//! Adaptive integration of a defocussing beam in a nonlinear medium.
//!
//! The propagation model `i ε ∂_z ψ = -½ ε² Δψ + θ|ψ|²ψ` is the cubic
//! equation with `U ≡ 0` after dividing by ε, so the run uses the regular
//! stepper with a potential-free problem. The propagation direction z plays
//! the role of time.

use crate::states::InitialState;
use crate::Result;
use nlsplit_core::grid::WaveField;
use nlsplit_core::operators::{Potential, PotentialField, ProblemParams};
use nlsplit_core::schemes::builtin_scheme;
use nlsplit_core::{adaptive_integrate_observed, make_grid, ControllerConfig, Trajectory};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LaserConfig {
    pub grid_n: usize,
    pub half_width: f64,
    pub eps: f64,
    pub theta: f64,
    pub scheme: String,
    pub tol: f64,
    pub z_end: f64,
    pub h_init: f64,
    pub safety: f64,
    pub grow_max: f64,
    pub shrink_min: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    pub state: InitialState,
    /// Keep a y = 0 slice every accepted step.
    pub record_slices: bool,
}

impl Default for LaserConfig {
    fn default() -> Self {
        let ctrl = ControllerConfig::new(1e-6);
        LaserConfig {
            grid_n: 128,
            half_width: 8.0,
            eps: 1e-2,
            theta: 1.0,
            scheme: "yoshida4".into(),
            tol: ctrl.tol,
            z_end: 5.0,
            h_init: ctrl.h_init,
            safety: ctrl.safety,
            grow_max: ctrl.grow_max,
            shrink_min: ctrl.shrink_min,
            h_min: ctrl.h_min,
            h_max: ctrl.h_max,
            max_steps: ctrl.max_steps,
            state: InitialState::TanhGaussian {
                amplitude: 1.0,
                radius: 0.5,
                steepness: 1.0,
                modulation_axis: 1,
            },
            record_slices: true,
        }
    }
}

/// One recorded y = 0 slice: interleaved (re, im) values along x at a given z.
#[derive(Debug, Clone)]
pub struct Slice {
    pub z: f64,
    pub values: Vec<num_complex::Complex64>,
}

#[derive(Debug)]
pub struct LaserOutput {
    pub trajectory: Trajectory,
    pub initial: WaveField,
    /// x coordinates of the slice columns.
    pub xs: Vec<f64>,
    pub slices: Vec<Slice>,
}

/// Runs the adaptive beam propagation and records the y = 0 slice after
/// every accepted step.
pub fn run_laser(cfg: &LaserConfig) -> Result<LaserOutput> {
    let grid = make_grid(2, -cfg.half_width, cfg.half_width, cfg.grid_n)?;
    let p = ProblemParams::new(cfg.eps, cfg.theta, Potential::None)?;
    let pot = PotentialField::new(&grid, p.potential);
    let scheme = builtin_scheme(&cfg.scheme)?;
    let u0 = cfg.state.evaluate(&grid)?;

    let ctrl = ControllerConfig {
        tol: cfg.tol,
        safety: cfg.safety,
        grow_max: cfg.grow_max,
        shrink_min: cfg.shrink_min,
        h_init: cfg.h_init,
        h_min: cfg.h_min,
        h_max: cfg.h_max,
        max_steps: cfg.max_steps,
    };

    let n = cfg.grid_n;
    let iy0 = n / 2; // y = 0 row for a [-L, L) grid
    let xs: Vec<f64> = (0..n).map(|i| grid.axis(0).coord(i)).collect();
    let mut slices = Vec::new();
    let record = cfg.record_slices;
    let trajectory = adaptive_integrate_observed(
        &scheme,
        &u0,
        &p,
        &pot,
        0.0,
        cfg.z_end,
        &ctrl,
        &mut |z, u| {
            if record {
                let values = (0..n).map(|i| u.values()[i * n + iy0]).collect();
                slices.push(Slice { z, values });
            }
        },
    )?;

    Ok(LaserOutput {
        trajectory,
        initial: u0,
        xs,
        slices,
    })
}
