//! Initial states for the experiments.

use crate::{HarnessError, Result};
use nlsplit_core::grid::{GridSpec, WaveField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// The initial conditions used by the experiment harness.
///
/// All states keep essentially no mass near the box boundary on the default
/// domains; `evaluate` enforces this so that the periodic truncation is
/// harmless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialState {
    /// `exp(-((x-center)/width)²) · exp(i·shift·x)`, per axis distance in 2D.
    Gaussian { center: f64, width: f64, shift: f64 },
    /// Oscillatory WKB state `e^{-x²} · e^{-i/ε · log(eˣ + e⁻ˣ)}` (1D).
    Wkb { eps: f64 },
    /// `A exp(-(x²+y²)/r₀²) tanh(q/y_s)` with `q` the coordinate along
    /// `modulation_axis` (2D); carries an odd nodal line through q = 0.
    TanhGaussian {
        amplitude: f64,
        radius: f64,
        steepness: f64,
        modulation_axis: usize,
    },
    /// `A exp(-(x²+y²)/r₀²)` (2D).
    PlainGaussian { amplitude: f64, radius: f64 },
}

impl InitialState {
    /// Samples the state on `grid`. Fails when the state carries more than
    /// 1e-10 of its mass on the outermost grid ring (periodic truncation
    /// would then be visible) or reaches non-finite values.
    pub fn evaluate(&self, grid: &Arc<GridSpec>) -> Result<WaveField> {
        let field = match self {
            InitialState::Gaussian {
                center,
                width,
                shift,
            } => {
                let (c, w, s) = (*center, *width, *shift);
                WaveField::from_fn(grid, move |x, y| {
                    let mut r2 = (x - c) * (x - c);
                    if grid.dim() == 2 {
                        r2 += (y - c) * (y - c);
                    }
                    (-r2 / (w * w)).exp() * Complex64::from_polar(1.0, s * x)
                })
            }
            InitialState::Wkb { eps } => {
                if grid.dim() != 1 {
                    return Err(HarnessError::BadConfig(
                        "the WKB state is one-dimensional".into(),
                    ));
                }
                let e = *eps;
                WaveField::from_fn(grid, move |x, _| {
                    let phase = -(x.exp() + (-x).exp()).ln() / e;
                    (-x * x).exp() * Complex64::from_polar(1.0, phase)
                })
            }
            InitialState::TanhGaussian {
                amplitude,
                radius,
                steepness,
                modulation_axis,
            } => {
                if grid.dim() != 2 {
                    return Err(HarnessError::BadConfig(
                        "the tanh-modulated beam state is two-dimensional".into(),
                    ));
                }
                if *modulation_axis > 1 {
                    return Err(HarnessError::BadConfig(format!(
                        "modulation_axis = {modulation_axis} not in {{0, 1}}"
                    )));
                }
                let (a, r0, ys, ax) = (*amplitude, *radius, *steepness, *modulation_axis);
                WaveField::from_fn(grid, move |x, y| {
                    let q = if ax == 0 { x } else { y };
                    let env = a * (-(x * x + y * y) / (r0 * r0)).exp();
                    Complex64::new(env * (q / ys).tanh(), 0.0)
                })
            }
            InitialState::PlainGaussian { amplitude, radius } => {
                if grid.dim() != 2 {
                    return Err(HarnessError::BadConfig(
                        "the beam state is two-dimensional".into(),
                    ));
                }
                let (a, r0) = (*amplitude, *radius);
                WaveField::from_fn(grid, move |x, y| {
                    Complex64::new(a * (-(x * x + y * y) / (r0 * r0)).exp(), 0.0)
                })
            }
        };
        if !field.is_finite() {
            return Err(HarnessError::BadConfig(
                "state evaluates to non-finite values".into(),
            ));
        }
        let frac = boundary_mass_fraction(&field);
        if frac > 1e-10 {
            return Err(HarnessError::Unresolved(format!(
                "boundary mass fraction {frac:.2e} exceeds 1e-10"
            )));
        }
        Ok(field)
    }
}

/// Fraction of the total L² mass sitting on the outermost grid ring.
pub fn boundary_mass_fraction(u: &WaveField) -> f64 {
    let g = u.grid();
    let total: f64 = u.values().iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut boundary = 0.0;
    match g.dim() {
        1 => {
            let n = g.axis(0).n;
            boundary += u.values()[0].norm_sqr() + u.values()[n - 1].norm_sqr();
        }
        _ => {
            let (n0, n1) = (g.axis(0).n, g.axis(1).n);
            for i in 0..n0 {
                for j in 0..n1 {
                    if i == 0 || i == n0 - 1 || j == 0 || j == n1 - 1 {
                        boundary += u.values()[i * n1 + j].norm_sqr();
                    }
                }
            }
        }
    }
    boundary / total
}

/// Largest spectral amplitude in the top half of the frequency range,
/// relative to the overall largest amplitude. A state with a fat tail is not
/// resolved and spectral operations on it are meaningless.
pub fn spectral_tail_fraction(u: &WaveField) -> f64 {
    let g = u.grid();
    let spec = u.spectrum();
    let mut max_all = 0.0_f64;
    let mut max_tail = 0.0_f64;
    let in_tail = |j: usize, n: usize| {
        let f = if j < n / 2 { j } else { n - j };
        f >= n / 4
    };
    for (idx, v) in spec.iter().enumerate() {
        let a = v.norm();
        max_all = max_all.max(a);
        let tail = match g.dim() {
            1 => in_tail(idx, g.axis(0).n),
            _ => {
                let n1 = g.axis(1).n;
                in_tail(idx / n1, g.axis(0).n) || in_tail(idx % n1, n1)
            }
        };
        if tail {
            max_tail = max_tail.max(a);
        }
    }
    if max_all == 0.0 {
        0.0
    } else {
        max_tail / max_all
    }
}
