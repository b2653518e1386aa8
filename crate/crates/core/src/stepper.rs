//! One s-stage splitting step and the defect-based local error estimator.
//!
//! A step of size `t` produces the stage chain
//!
//! ```text
//! w₀ = u,   vᵢ = E_A(aᵢ t, w_{i-1}),   wᵢ = E_B(bᵢ t, vᵢ),   i = 1..s,
//! ```
//!
//! with output `w_s = S(t, u)`. The defect of the step,
//! `S¹(t,u) = ∂ₜS(t,u) - F(S(t,u))`, is evaluated without any time
//! differentiation by the stage recursion
//!
//! ```text
//! z₀ = 0,
//! zᵢ = bᵢ B(wᵢ) + ∂₂E_B(bᵢ t, vᵢ) E_A(aᵢ t) [aᵢ A(w_{i-1}) + z_{i-1}],
//! S¹ = z_s - F(w_s),
//! ```
//!
//! and the a-posteriori local error estimator of an order-p scheme is
//! `P(t,u) = t/(p+1) · S¹(t,u)`. Since stage `i` only touches `w_{i-1}`,
//! `vᵢ`, `wᵢ`, the estimator is computed in the same sweep as the step
//! itself with a sliding window of fields.

use crate::grid::WaveField;
use crate::operators::{
    apply_a, apply_b, apply_f, dflow_b, flow_a, flow_b, PotentialField, ProblemParams,
};
use crate::schemes::SplittingScheme;
use crate::{Error, Result};
use num_complex::Complex64;

/// All stage values of one splitting step: `v[i] = v_{i+1}` and
/// `w[0] = input`, …, `w[s] = output`.
#[derive(Debug, Clone)]
pub struct StepIntermediates {
    pub v: Vec<WaveField>,
    pub w: Vec<WaveField>,
}

impl StepIntermediates {
    pub fn output(&self) -> &WaveField {
        self.w.last().expect("at least one stage")
    }

    pub fn stages(&self) -> usize {
        self.v.len()
    }
}

/// Result of one estimated step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    /// Step size the record was computed with.
    pub t: f64,
    /// `S(t, u)`.
    pub u_out: WaveField,
    /// The estimator field `P(t, u)`.
    pub estimator: WaveField,
    /// `‖P(t, u)‖` in the weighted L² norm.
    pub est_norm: f64,
}

/// Runs one splitting step and keeps every intermediate stage value.
/// Negative `t` is permitted (adjoint steps).
pub fn split_step(
    scheme: &SplittingScheme,
    t: f64,
    u: &WaveField,
    p: &ProblemParams,
    pot: &PotentialField,
) -> Result<StepIntermediates> {
    let s = scheme.stages();
    let mut v = Vec::with_capacity(s);
    let mut w = Vec::with_capacity(s + 1);
    w.push(u.clone());
    for i in 0..s {
        let vi = flow_a(scheme.a[i] * t, &w[i], p);
        let wi = flow_b(scheme.b[i] * t, &vi, p, pot)?;
        v.push(vi);
        w.push(wi);
    }
    Ok(StepIntermediates { v, w })
}

/// Runs one splitting step keeping only the current state.
pub fn advance(
    scheme: &SplittingScheme,
    t: f64,
    u: &WaveField,
    p: &ProblemParams,
    pot: &PotentialField,
) -> Result<WaveField> {
    let mut w = u.clone();
    for (&ai, &bi) in scheme.a.iter().zip(&scheme.b) {
        w = flow_b(bi * t, &flow_a(ai * t, &w, p), p, pot)?;
    }
    Ok(w)
}

/// Evaluates the defect `S¹(t,u)` from recorded stage values.
pub fn defect(
    scheme: &SplittingScheme,
    inter: &StepIntermediates,
    t: f64,
    p: &ProblemParams,
    pot: &PotentialField,
) -> Result<WaveField> {
    if inter.stages() != scheme.stages() {
        return Err(Error::StageMismatch {
            scheme: scheme.name.clone(),
            expected: scheme.stages(),
            got: inter.stages(),
        });
    }
    let mut z = WaveField::zeros(inter.w[0].grid());
    for i in 0..scheme.stages() {
        z = stage_update(
            scheme.a[i],
            scheme.b[i],
            t,
            &inter.w[i],
            &inter.v[i],
            &inter.w[i + 1],
            &z,
            p,
            pot,
        )?;
    }
    let mut s1 = z;
    s1.add_scaled(Complex64::new(-1.0, 0.0), &apply_f(inter.output(), p, pot)?);
    Ok(s1)
}

/// `zᵢ = bᵢ B(wᵢ) + ∂₂E_B(bᵢ t, vᵢ) E_A(aᵢ t) [aᵢ A(w_{i-1}) + z]`
#[allow(clippy::too_many_arguments)]
fn stage_update(
    ai: f64,
    bi: f64,
    t: f64,
    w_prev: &WaveField,
    vi: &WaveField,
    wi: &WaveField,
    z: &WaveField,
    p: &ProblemParams,
    pot: &PotentialField,
) -> Result<WaveField> {
    let mut arg = apply_a(w_prev, p);
    arg.scale(Complex64::new(ai, 0.0));
    arg.add_scaled(Complex64::new(1.0, 0.0), z);
    let transported = dflow_b(bi * t, vi, &flow_a(ai * t, &arg, p), p, pot)?;
    let mut out = apply_b(wi, p, pot)?;
    out.scale(Complex64::new(bi, 0.0));
    out.add_scaled(Complex64::new(1.0, 0.0), &transported);
    Ok(out)
}

/// Runs one step and evaluates the a-posteriori estimator
/// `P(t,u) = t/(p+1)·S¹(t,u)` in the same stage sweep, holding only the
/// sliding window `(w_{i-1}, vᵢ, wᵢ, z)`.
pub fn estimate(
    scheme: &SplittingScheme,
    t: f64,
    u: &WaveField,
    p: &ProblemParams,
    pot: &PotentialField,
) -> Result<StepRecord> {
    let mut w_prev = u.clone();
    let mut z = WaveField::zeros(u.grid());
    for (&ai, &bi) in scheme.a.iter().zip(&scheme.b) {
        let vi = flow_a(ai * t, &w_prev, p);
        let wi = flow_b(bi * t, &vi, p, pot)?;
        z = stage_update(ai, bi, t, &w_prev, &vi, &wi, &z, p, pot)?;
        w_prev = wi;
    }
    let mut estimator = z;
    estimator.add_scaled(Complex64::new(-1.0, 0.0), &apply_f(&w_prev, p, pot)?);
    estimator.scale(Complex64::new(t / (scheme.order as f64 + 1.0), 0.0));
    let est_norm = estimator.l2_norm();
    Ok(StepRecord {
        t,
        u_out: w_prev,
        estimator,
        est_norm,
    })
}
