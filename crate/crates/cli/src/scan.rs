//! Convergence and estimator-deviation scans.
//!
//! Every scan reports rows of (scheme, ε, t, local error, estimator
//! deviation, observed order). "Local error" always means the L² distance of
//! one step `S(t,u)` from the order-6 reference composition run at step
//! t/64, so all experiments share a single ground truth. Observed orders are
//! `log(e_k/e_{k+1}) / log(t_k/t_{k+1})` for consecutive rows of one scheme.

use crate::states::{spectral_tail_fraction, InitialState};
use crate::{HarnessError, Result};
use nlsplit_core::fixed_integrate;
use nlsplit_core::grid::{GridSpec, WaveField};
use nlsplit_core::operators::{Potential, PotentialField, ProblemParams};
use nlsplit_core::schemes::{builtin_scheme, reference_scheme, SplittingScheme};
use nlsplit_core::stepper::{advance, estimate};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// One row of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub scheme: String,
    pub eps: f64,
    pub t: f64,
    pub local_error: f64,
    /// `‖P - L‖`; absent for global-error scans, which skip the estimator.
    pub est_deviation: Option<f64>,
    /// Defined from the second row of each scheme's scan onward.
    pub observed_order: Option<f64>,
}

/// Shared scan inputs: the grid and the ε-independent problem data.
#[derive(Debug, Clone)]
pub struct ScanContext {
    pub grid: Arc<GridSpec>,
    pub theta: f64,
    pub potential: Potential,
    /// Substep refinement of the order-6 reference (64 puts the reference
    /// error several orders below anything measured here).
    pub ref_substeps: usize,
}

impl ScanContext {
    pub fn new(grid: Arc<GridSpec>, theta: f64, potential: Potential) -> Self {
        ScanContext {
            grid,
            theta,
            potential,
            ref_substeps: 64,
        }
    }

    fn problem(&self, eps: f64) -> Result<(ProblemParams, PotentialField)> {
        let p = ProblemParams::new(eps, self.theta, self.potential)?;
        let pot = PotentialField::new(&self.grid, p.potential);
        Ok((p, pot))
    }
}

/// Dyadically decreasing step list from `t_max` down to `t_min` (inclusive
/// up to rounding).
pub fn dyadic_steps(t_max: f64, t_min: f64) -> Vec<f64> {
    let mut ts = Vec::new();
    let mut t = t_max;
    while t >= t_min * (1.0 - 1e-9) {
        ts.push(t);
        t /= 2.0;
    }
    ts
}

/// One step of the order-6 reference composition at substep `t/ref_substeps`.
pub fn local_reference(
    t: f64,
    u: &WaveField,
    p: &ProblemParams,
    pot: &PotentialField,
    ref_substeps: usize,
) -> Result<WaveField> {
    let scheme = reference_scheme();
    let h = t / ref_substeps as f64;
    let mut w = u.clone();
    for _ in 0..ref_substeps {
        w = advance(&scheme, h, &w, p, pot)?;
    }
    Ok(w)
}

fn resolve_schemes(names: &[String]) -> Result<Vec<SplittingScheme>> {
    names
        .iter()
        .map(|n| builtin_scheme(n).map_err(HarnessError::from))
        .collect()
}

fn check_resolved(u: &WaveField) -> Result<()> {
    let tail = spectral_tail_fraction(u);
    if tail > 1e-10 {
        return Err(HarnessError::Unresolved(format!(
            "spectral tail fraction {tail:.2e} exceeds 1e-10"
        )));
    }
    Ok(())
}

fn observed(prev: Option<(f64, f64)>, t: f64, e: f64) -> Option<f64> {
    prev.and_then(|(tp, ep)| {
        if e > 0.0 && ep > 0.0 && tp != t {
            Some((ep / e).ln() / (tp / t).ln())
        } else {
            None
        }
    })
}

/// Local error and estimator deviation of one step per (scheme, t), at a
/// fixed ε.
pub fn order_scan(
    ctx: &ScanContext,
    scheme_names: &[String],
    eps: f64,
    t_list: &[f64],
    state: &InitialState,
) -> Result<Vec<ScanRecord>> {
    let schemes = resolve_schemes(scheme_names)?;
    let (p, pot) = ctx.problem(eps)?;
    let u = state.evaluate(&ctx.grid)?;
    check_resolved(&u)?;
    let refs: Vec<WaveField> = t_list
        .iter()
        .map(|&t| local_reference(t, &u, &p, &pot, ctx.ref_substeps))
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    for scheme in &schemes {
        let mut prev: Option<(f64, f64)> = None;
        for (&t, reference) in t_list.iter().zip(&refs) {
            let rec = estimate(scheme, t, &u, &p, &pot)?;
            let local_error = rec.u_out.l2_distance(reference);
            let mut dev = rec.estimator.clone();
            dev.add_scaled(num_complex::Complex64::new(-1.0, 0.0), &rec.u_out);
            dev.add_scaled(num_complex::Complex64::new(1.0, 0.0), reference);
            let est_deviation = dev.l2_norm();
            records.push(ScanRecord {
                scheme: scheme.name.clone(),
                eps,
                t,
                local_error,
                est_deviation: Some(est_deviation),
                observed_order: observed(prev, t, local_error),
            });
            prev = Some((t, local_error));
        }
    }
    Ok(records)
}

/// Scan along the coupled diagonal t = ε.
pub fn eps_scan(
    ctx: &ScanContext,
    scheme_names: &[String],
    eps_list: &[f64],
    state: &InitialState,
) -> Result<Vec<ScanRecord>> {
    let schemes = resolve_schemes(scheme_names)?;
    let u = state.evaluate(&ctx.grid)?;
    check_resolved(&u)?;
    let mut records = Vec::new();
    for scheme in &schemes {
        let mut prev: Option<(f64, f64)> = None;
        for &eps in eps_list {
            let t = eps;
            let (p, pot) = ctx.problem(eps)?;
            let reference = local_reference(t, &u, &p, &pot, ctx.ref_substeps)?;
            let rec = estimate(scheme, t, &u, &p, &pot)?;
            let local_error = rec.u_out.l2_distance(&reference);
            let mut dev = rec.estimator.clone();
            dev.add_scaled(num_complex::Complex64::new(-1.0, 0.0), &rec.u_out);
            dev.add_scaled(num_complex::Complex64::new(1.0, 0.0), &reference);
            records.push(ScanRecord {
                scheme: scheme.name.clone(),
                eps,
                t,
                local_error,
                est_deviation: Some(dev.l2_norm()),
                observed_order: observed(prev, t, local_error),
            });
            prev = Some((t, local_error));
        }
    }
    Ok(records)
}

/// Order scan with the oscillatory WKB state `e^{-x²} e^{-i φ(x)/ε}`.
///
/// Requires at least 8 gridpoints per oscillation: the local wavenumber is
/// bounded by `1/ε`, so the spacing must satisfy `Δx ≤ πε/4`.
pub fn wkb_scan(
    ctx: &ScanContext,
    scheme_names: &[String],
    eps: f64,
    t_list: &[f64],
) -> Result<Vec<ScanRecord>> {
    let dx = ctx.grid.axis(0).spacing;
    if dx > std::f64::consts::PI * eps / 4.0 {
        return Err(HarnessError::Unresolved(format!(
            "spacing {dx:.3e} too coarse for ε = {eps:.1e} oscillations \
             (need ≤ {:.3e} for 8 points per oscillation)",
            std::f64::consts::PI * eps / 4.0
        )));
    }
    order_scan(ctx, scheme_names, eps, t_list, &InitialState::Wkb { eps })
}

/// Global error at `T` against a fine reference run, per step size in
/// `h_list`. The reference is the order-6 composition at `min(h)/8`.
pub fn global_error_scan(
    ctx: &ScanContext,
    scheme_name: &str,
    eps: f64,
    h_list: &[f64],
    t_end: f64,
    state: &InitialState,
) -> Result<Vec<ScanRecord>> {
    let scheme = builtin_scheme(scheme_name)?;
    let (p, pot) = ctx.problem(eps)?;
    let u = state.evaluate(&ctx.grid)?;
    check_resolved(&u)?;
    let h_ref = h_list.iter().cloned().fold(f64::INFINITY, f64::min) / 8.0;
    let reference = fixed_integrate(&reference_scheme(), &u, &p, &pot, 0.0, t_end, h_ref)?;
    let mut records = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &h in h_list {
        let traj = fixed_integrate(&scheme, &u, &p, &pot, 0.0, t_end, h)?;
        let err = traj.final_state.l2_distance(&reference.final_state);
        records.push(ScanRecord {
            scheme: scheme.name.clone(),
            eps,
            t: h,
            local_error: err,
            est_deviation: None,
            observed_order: observed(prev, h, err),
        });
        prev = Some((h, err));
    }
    Ok(records)
}

/// Least-squares slope of `log e` vs `log t` over the rows of `scheme` whose
/// t lies in `[t_lo, t_hi]` and whose error exceeds `floor` (errors at the
/// roundoff level carry no order information).
pub fn fitted_slope(
    records: &[ScanRecord],
    scheme: &str,
    t_lo: f64,
    t_hi: f64,
    floor: f64,
    deviation: bool,
) -> Result<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.scheme == scheme && r.t >= t_lo * (1.0 - 1e-9) && r.t <= t_hi * (1.0 + 1e-9))
        .filter_map(|r| {
            let e = if deviation {
                r.est_deviation?
            } else {
                r.local_error
            };
            (e > floor).then(|| (r.t.ln(), e.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return Err(HarnessError::Parse(format!(
            "not enough resolvable rows for a slope of {scheme} in [{t_lo:.3e}, {t_hi:.3e}]"
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|q| q.0).sum();
    let sy: f64 = pts.iter().map(|q| q.1).sum();
    let sxx: f64 = pts.iter().map(|q| q.0 * q.0).sum();
    let sxy: f64 = pts.iter().map(|q| q.0 * q.1).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Re-evaluates one scan point on a grid with doubled resolution and returns
/// the relative change in local error. The scans are trustworthy only when
/// this is small (spatial error subdominant).
pub fn resolution_guard(
    ctx: &ScanContext,
    scheme_name: &str,
    eps: f64,
    t: f64,
    state: &InitialState,
) -> Result<f64> {
    let one = |grid: Arc<GridSpec>| -> Result<f64> {
        let sub = ScanContext {
            grid,
            theta: ctx.theta,
            potential: ctx.potential,
            ref_substeps: ctx.ref_substeps,
        };
        let recs = order_scan(&sub, &[scheme_name.to_string()], eps, &[t], state)?;
        Ok(recs[0].local_error)
    };
    let axis = ctx.grid.axis(0);
    let coarse = one(ctx.grid.clone())?;
    let fine_grid = nlsplit_core::make_grid(ctx.grid.dim(), axis.lower, axis.upper, axis.n * 2)?;
    let fine = one(fine_grid)?;
    Ok((coarse - fine).abs() / fine.abs().max(f64::MIN_POSITIVE))
}
