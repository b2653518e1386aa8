//! Adaptive and fixed-step time integration loops.
//!
//! The adaptive loop accepts a step when the estimator norm is below the
//! local absolute tolerance and updates the step size with the classical
//! integral rule
//!
//! ```text
//! h ← h · clamp(safety · (tol / est_norm)^{1/(p+1)}, shrink_min, grow_max)
//! ```
//!
//! clamped to `[h_min, h_max]`. Rejected steps are redone from the same
//! state with the shrunk step. `est_norm = 0` maps to the factor `grow_max`.
//! The final time is hit exactly by truncating the last step.

use crate::grid::WaveField;
use crate::operators::{PotentialField, ProblemParams};
use crate::schemes::SplittingScheme;
use crate::stepper::{advance, estimate};
use crate::{Error, Result};

/// Adaptive controller settings. Defaults match `ControllerConfig::new(tol)`.
#[derive(Debug, Clone, Copy)]
pub struct ControllerConfig {
    /// Local absolute tolerance on the estimator norm.
    pub tol: f64,
    /// Safety factor in (0, 1], default 0.9.
    pub safety: f64,
    /// Largest growth factor per step, default 4.0.
    pub grow_max: f64,
    /// Smallest shrink factor per step, default 0.25.
    pub shrink_min: f64,
    /// First attempted step size, default 1e-3.
    pub h_init: f64,
    /// Smallest admissible step; going below it is an error.
    pub h_min: f64,
    /// Largest admissible step.
    pub h_max: f64,
    /// Abort bound on attempted steps (accepted + rejected).
    pub max_steps: usize,
}

impl ControllerConfig {
    pub fn new(tol: f64) -> Self {
        ControllerConfig {
            tol,
            safety: 0.9,
            grow_max: 4.0,
            shrink_min: 0.25,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 1.0,
            max_steps: 1_000_000,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.tol > 0.0
            && (0.0..=1.0).contains(&self.safety)
            && self.safety > 0.0
            && self.grow_max > 1.0
            && self.shrink_min > 0.0
            && self.shrink_min < 1.0
            && self.h_min > 0.0
            && self.h_min <= self.h_max
            && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("controller config {self:?}")))
        }
    }

    /// The step-size update factor for an estimate `est` of an order-`p`
    /// method.
    fn factor(&self, est: f64, order: u32) -> f64 {
        if est == 0.0 {
            return self.grow_max;
        }
        let raw = self.safety * (self.tol / est).powf(1.0 / (order as f64 + 1.0));
        raw.clamp(self.shrink_min, self.grow_max)
    }
}

/// One accepted step (or one fixed step) of a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct StepTrace {
    /// Time at the END of the step.
    pub time: f64,
    /// Step size used.
    pub h: f64,
    /// Estimator norm of the accepted step; `None` for fixed-step runs,
    /// which skip the estimator.
    pub est_norm: Option<f64>,
    /// Number of rejected attempts immediately before this acceptance.
    pub rejected: u32,
}

/// Result of a time integration run. `times` holds the initial time followed
/// by the end time of every accepted step; per-step scalar data lives in
/// `steps` (field snapshots are not retained — long runs would not fit in
/// memory otherwise).
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub steps: Vec<StepTrace>,
    pub final_state: WaveField,
}

impl Trajectory {
    pub fn accepted_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn rejected_steps(&self) -> usize {
        self.steps.iter().map(|s| s.rejected as usize).sum()
    }

    pub fn min_accepted_h(&self) -> Option<f64> {
        self.steps
            .iter()
            .map(|s| s.h)
            .fold(None, |acc, h| Some(acc.map_or(h, |m: f64| m.min(h))))
    }

    pub fn max_accepted_h(&self) -> Option<f64> {
        self.steps
            .iter()
            .map(|s| s.h)
            .fold(None, |acc, h| Some(acc.map_or(h, |m: f64| m.max(h))))
    }

    pub fn max_est_norm(&self) -> f64 {
        self.steps
            .iter()
            .filter_map(|s| s.est_norm)
            .fold(0.0, f64::max)
    }
}

/// Integrates from `t0` to `t_end` with estimator-driven step control.
pub fn adaptive_integrate(
    scheme: &SplittingScheme,
    u0: &WaveField,
    p: &ProblemParams,
    pot: &PotentialField,
    t0: f64,
    t_end: f64,
    cfg: &ControllerConfig,
) -> Result<Trajectory> {
    adaptive_integrate_observed(scheme, u0, p, pot, t0, t_end, cfg, &mut |_, _| {})
}

/// Like [`adaptive_integrate`], additionally calling `observer` with the
/// state at `t0` and after every accepted step (for snapshot emission along
/// the run).
#[allow(clippy::too_many_arguments)]
pub fn adaptive_integrate_observed(
    scheme: &SplittingScheme,
    u0: &WaveField,
    p: &ProblemParams,
    pot: &PotentialField,
    t0: f64,
    t_end: f64,
    cfg: &ControllerConfig,
    observer: &mut dyn FnMut(f64, &WaveField),
) -> Result<Trajectory> {
    cfg.validate()?;
    if !(t_end > t0) {
        return Err(Error::InvalidParams(format!(
            "t_end = {t_end} must exceed t0 = {t0}"
        )));
    }
    let mut u = u0.clone();
    let mut time = t0;
    let mut h = cfg.h_init.clamp(cfg.h_min, cfg.h_max);
    let mut times = vec![t0];
    let mut steps = Vec::new();
    let mut rejected = 0u32;
    let mut attempts = 0usize;
    observer(t0, &u);

    while time < t_end - 1e-14 * (t_end - t0) {
        if attempts >= cfg.max_steps {
            return Err(Error::MaxStepsExceeded {
                max_steps: cfg.max_steps,
                time,
            });
        }
        attempts += 1;
        // truncate the final step; truncation is not subject to h_min
        let h_try = h.min(t_end - time);
        let rec = estimate(scheme, h_try, &u, p, pot)?;
        let factor = cfg.factor(rec.est_norm, scheme.order);
        if rec.est_norm <= cfg.tol {
            time += h_try;
            u = rec.u_out;
            observer(time, &u);
            times.push(time);
            steps.push(StepTrace {
                time,
                h: h_try,
                est_norm: Some(rec.est_norm),
                rejected,
            });
            rejected = 0;
            h = (h_try * factor).clamp(cfg.h_min, cfg.h_max);
        } else {
            rejected += 1;
            let h_new = h_try * factor;
            if h_new < cfg.h_min {
                return Err(Error::StepUnderflow {
                    time,
                    h: h_new,
                    h_min: cfg.h_min,
                });
            }
            h = h_new;
        }
    }

    Ok(Trajectory {
        times,
        steps,
        final_state: u,
    })
}

/// Integrates from `t0` to `t_end` with `n = round((t_end - t0)/h)` equal
/// steps and no rejection logic. The estimator is not evaluated.
pub fn fixed_integrate(
    scheme: &SplittingScheme,
    u0: &WaveField,
    p: &ProblemParams,
    pot: &PotentialField,
    t0: f64,
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    if !(t_end > t0) || !(h > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need t_end > t0 and h > 0 (got t0 = {t0}, t_end = {t_end}, h = {h})"
        )));
    }
    let span = t_end - t0;
    let n = (span / h).round().max(1.0) as usize;
    let h_eff = span / n as f64;
    let mut u = u0.clone();
    let mut times = vec![t0];
    let mut steps = Vec::with_capacity(n);
    for i in 1..=n {
        u = advance(scheme, h_eff, &u, p, pot)?;
        let time = t0 + span * i as f64 / n as f64;
        times.push(time);
        steps.push(StepTrace {
            time,
            h: h_eff,
            est_norm: None,
            rejected: 0,
        });
    }
    Ok(Trajectory {
        times,
        steps,
        final_state: u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridSpec};
    use crate::operators::Potential;
    use crate::schemes::builtin_scheme;
    use crate::stepper::split_step;
    use num_complex::Complex64;
    use std::sync::Arc;

    fn gaussian(g: &Arc<GridSpec>) -> WaveField {
        WaveField::from_fn(g, |x, _| {
            Complex64::new((-(x - 1.0) * (x - 1.0)).exp(), 0.0)
        })
    }

    fn setup(theta: f64) -> (Arc<GridSpec>, ProblemParams, PotentialField, WaveField) {
        let g = make_grid(1, -8.0, 8.0, 256).unwrap();
        let p = ProblemParams::new(0.5, theta, Potential::Harmonic { omega: 1.0 }).unwrap();
        let pot = PotentialField::new(&g, p.potential);
        let u = gaussian(&g);
        (g, p, pot, u)
    }

    #[test]
    fn zero_defect_grows_to_h_max() {
        // θ=0, U=0: est ≡ 0, every step accepted, h grows by grow_max to h_max
        let g = make_grid(1, -8.0, 8.0, 128).unwrap();
        let p = ProblemParams::new(1.0, 0.0, Potential::None).unwrap();
        let pot = PotentialField::new(&g, p.potential);
        let u = gaussian(&g);
        let mut cfg = ControllerConfig::new(1e-8);
        cfg.h_init = 0.01;
        cfg.h_max = 0.16;
        let scheme = builtin_scheme("strang").unwrap();
        let traj = adaptive_integrate(&scheme, &u, &p, &pot, 0.0, 2.0, &cfg).unwrap();
        assert_eq!(traj.rejected_steps(), 0);
        assert!(traj.max_est_norm() <= 1e-12);
        // 0.01 → 0.04 → 0.16 (cap); remaining 1.95/0.16 ≈ 13 steps
        assert!(traj.accepted_steps() <= 16, "{}", traj.accepted_steps());
        assert!((traj.max_accepted_h().unwrap() - cfg.h_max).abs() < 1e-12);
        // ends exactly at T
        assert!((traj.times.last().unwrap() - 2.0).abs() < 1e-12);
        // and the final state is the exact dispersive flow
        let exact = crate::operators::flow_a(2.0, &u, &p);
        assert!(traj.final_state.l2_distance(&exact) < 1e-11);
    }

    #[test]
    fn accepted_steps_respect_the_tolerance() {
        let (_, p, pot, u) = setup(1.0);
        let scheme = builtin_scheme("yoshida4").unwrap();
        let cfg = ControllerConfig::new(1e-7);
        let traj = adaptive_integrate(&scheme, &u, &p, &pot, 0.0, 1.0, &cfg).unwrap();
        assert!(traj.max_est_norm() <= cfg.tol);
        assert!(traj.accepted_steps() > 0);
        let t_last = *traj.times.last().unwrap();
        assert!((t_last - 1.0).abs() <= cfg.h_min);
        // times strictly increasing
        for w in traj.times.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn step_after_borderline_acceptance_shrinks_by_safety() {
        // est == tol exactly: accept, next h ≈ safety·h. Synthesized through
        // the factor formula, which is what the loop applies.
        let cfg = ControllerConfig::new(1e-6);
        let f = cfg.factor(1e-6, 3);
        assert!((f - cfg.safety).abs() < 1e-12);
        assert_eq!(cfg.factor(0.0, 3), cfg.grow_max);
        // strongly exceeded tolerance clamps at shrink_min
        assert_eq!(cfg.factor(1.0, 3), cfg.shrink_min);
    }

    #[test]
    fn adaptive_final_state_matches_fixed_step_run() {
        let (_, p, pot, u) = setup(1.0);
        let scheme = builtin_scheme("yoshida4").unwrap();
        let cfg = ControllerConfig::new(1e-7);
        let t_end = 0.5;
        let traj = adaptive_integrate(&scheme, &u, &p, &pot, 0.0, t_end, &cfg).unwrap();
        let h_min_acc = traj.min_accepted_h().unwrap();
        let fixed = fixed_integrate(&scheme, &u, &p, &pot, 0.0, t_end, h_min_acc).unwrap();
        let dist = traj.final_state.l2_distance(&fixed.final_state);
        let bound = 10.0 * cfg.tol * traj.accepted_steps() as f64;
        assert!(dist <= bound, "dist {dist} > bound {bound}");
    }

    #[test]
    fn halving_the_tolerance_never_grows_the_max_step() {
        let (_, p, pot, u) = setup(1.0);
        let scheme = builtin_scheme("strang").unwrap();
        let mut prev_max = f64::INFINITY;
        for tol in [1e-4, 5e-5, 2.5e-5, 1.25e-5] {
            let cfg = ControllerConfig::new(tol);
            let traj = adaptive_integrate(&scheme, &u, &p, &pot, 0.0, 0.5, &cfg).unwrap();
            let max_h = traj.max_accepted_h().unwrap();
            assert!(
                max_h <= prev_max + 1e-15,
                "tol {tol}: max_h {max_h} > previous {prev_max}"
            );
            prev_max = max_h;
        }
    }

    #[test]
    fn underflow_and_max_steps_are_reported() {
        let (_, p, pot, u) = setup(1.0);
        let scheme = builtin_scheme("lie").unwrap();
        let mut cfg = ControllerConfig::new(1e-16);
        cfg.h_min = 1e-4;
        cfg.h_init = 1e-3;
        let err = adaptive_integrate(&scheme, &u, &p, &pot, 0.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }), "{err:?}");

        let mut cfg = ControllerConfig::new(1e-7);
        cfg.max_steps = 3;
        let err = adaptive_integrate(&scheme, &u, &p, &pot, 0.0, 10.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::MaxStepsExceeded { .. }), "{err:?}");
    }

    #[test]
    fn fixed_integrate_single_step_equals_split_step() {
        let (_, p, pot, u) = setup(1.0);
        let scheme = builtin_scheme("strang").unwrap();
        let traj = fixed_integrate(&scheme, &u, &p, &pot, 0.0, 0.05, 0.05).unwrap();
        assert_eq!(traj.accepted_steps(), 1);
        let inter = split_step(&scheme, 0.05, &u, &p, &pot).unwrap();
        assert!(traj.final_state.l2_distance(inter.output()) == 0.0);
    }

    #[test]
    fn fixed_integrate_linear_case_is_exact() {
        let g = make_grid(1, -8.0, 8.0, 128).unwrap();
        let p = ProblemParams::new(1.0, 0.0, Potential::None).unwrap();
        let pot = PotentialField::new(&g, p.potential);
        let u = gaussian(&g);
        let scheme = builtin_scheme("auz5").unwrap();
        let traj = fixed_integrate(&scheme, &u, &p, &pot, 0.0, 1.0, 0.01).unwrap();
        assert_eq!(traj.accepted_steps(), 100);
        let exact = crate::operators::flow_a(1.0, &u, &p);
        assert!(traj.final_state.l2_distance(&exact) < 1e-11);
    }
}
