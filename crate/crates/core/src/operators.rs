//! The split vector fields, their exact flows, and commutator expressions.
//!
//! The PDE right-hand side `F(u) = A(u) + B(u)` is split into
//!
//! ```text
//! A(u) = i (ε/2) Δu                      (dispersive part, linear)
//! B(u) = -(i/ε) (U(x) + θ|u|²) u         (potential + nonlinearity, pointwise)
//! ```
//!
//! Both sub-flows are exact: `E_A(t)` is the Fourier multiplier
//! `exp(-i t ε k²/2)` and `E_B(t,u)` the phase rotation
//! `exp(-i (t/ε)(U + θ|u|²)) u`, which preserves `|u|` pointwise and is
//! therefore exact despite the nonlinearity.
//!
//! `B` is not complex-differentiable (it contains `|u|²`); all derivative
//! operations here are real-linear maps on complex fields. The Fréchet
//! derivative of `E_A` is `E_A(t)` itself since `A` is linear.

use crate::grid::{apply_symbol, derivative_any, same_grid, GridSpec, WaveField};
use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// External potential selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    None,
    /// `U(x) = ½ ω² |x|²`
    Harmonic {
        omega: f64,
    },
}

/// Physical data of the equation: semiclassical parameter, nonlinearity
/// strength/sign, and potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub eps: f64,
    pub theta: f64,
    pub potential: Potential,
}

impl ProblemParams {
    pub fn new(eps: f64, theta: f64, potential: Potential) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParams(format!("eps = {eps} must be > 0")));
        }
        if let Potential::Harmonic { omega } = potential {
            if !(omega > 0.0) {
                return Err(Error::InvalidParams(format!("omega = {omega} must be > 0")));
            }
        }
        Ok(ProblemParams {
            eps,
            theta,
            potential,
        })
    }
}

/// The potential sampled on a grid, together with the analytic data
/// (gradient, Laplacian) used by commutator expressions.
#[derive(Debug, Clone)]
pub struct PotentialField {
    grid: Arc<GridSpec>,
    values: Vec<f64>,
    grad: Vec<Vec<f64>>,
    laplacian: f64,
    hessian_diag: f64,
}

impl PotentialField {
    pub fn new(grid: &Arc<GridSpec>, potential: Potential) -> Self {
        let d = grid.dim();
        match potential {
            Potential::None => PotentialField {
                grid: grid.clone(),
                values: vec![0.0; grid.len()],
                grad: vec![vec![0.0; grid.len()]; d],
                laplacian: 0.0,
                hessian_diag: 0.0,
            },
            Potential::Harmonic { omega } => {
                let w2 = omega * omega;
                let mut values = vec![0.0; grid.len()];
                let mut grad = vec![vec![0.0; grid.len()]; d];
                for idx in 0..grid.len() {
                    let pt = grid.point(idx);
                    let r2: f64 = pt[..d].iter().map(|x| x * x).sum();
                    values[idx] = 0.5 * w2 * r2;
                    for (axis, g) in grad.iter_mut().enumerate() {
                        g[idx] = w2 * pt[axis];
                    }
                }
                PotentialField {
                    grid: grid.clone(),
                    values,
                    grad,
                    laplacian: d as f64 * w2,
                    hessian_diag: w2,
                }
            }
        }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    /// `U(x_j)` per gridpoint.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∂U/∂x_axis` per gridpoint.
    pub fn grad(&self, axis: usize) -> &[f64] {
        &self.grad[axis]
    }

    /// `ΔU`, constant for the supported potentials.
    pub fn laplacian(&self) -> f64 {
        self.laplacian
    }

    /// The (isotropic) Hessian diagonal, `ω²` or 0.
    pub fn hessian_diag(&self) -> f64 {
        self.hessian_diag
    }

    fn matches(&self, u: &WaveField) -> bool {
        Arc::ptr_eq(&self.grid, u.grid()) || *self.grid == **u.grid()
    }
}

fn check_grids(u: &WaveField, pot: &PotentialField) -> Result<()> {
    if pot.matches(u) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

fn check_pair(u: &WaveField, v: &WaveField) -> Result<()> {
    if same_grid(u, v) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// `A(u) = i (ε/2) Δu`, evaluated spectrally.
pub fn apply_a(u: &WaveField, p: &ProblemParams) -> WaveField {
    let c = Complex64::new(0.0, 0.5 * p.eps);
    apply_symbol(u, |k2| c * (-k2))
}

/// `B(u) = -(i/ε)(U + θ|u|²) u`, evaluated pointwise.
pub fn apply_b(u: &WaveField, p: &ProblemParams, pot: &PotentialField) -> Result<WaveField> {
    check_grids(u, pot)?;
    let mut out = u.clone();
    let inv_eps = 1.0 / p.eps;
    for (v, &uu) in out.values_mut().iter_mut().zip(pot.values()) {
        let phase = (uu + p.theta * v.norm_sqr()) * inv_eps;
        *v *= Complex64::new(0.0, -phase);
    }
    Ok(out)
}

/// `F(u) = A(u) + B(u)`.
pub fn apply_f(u: &WaveField, p: &ProblemParams, pot: &PotentialField) -> Result<WaveField> {
    let mut out = apply_a(u, p);
    out.add_scaled(Complex64::new(1.0, 0.0), &apply_b(u, p, pot)?);
    Ok(out)
}

/// Exact dispersive flow `E_A(t) u`: Fourier multiplier `exp(-i t ε k²/2)`.
/// Any real `t` is allowed; `E_A` is a unitary group.
pub fn flow_a(t: f64, u: &WaveField, p: &ProblemParams) -> WaveField {
    let half_te = 0.5 * t * p.eps;
    apply_symbol(u, |k2| Complex64::from_polar(1.0, -half_te * k2))
}

/// Exact pointwise flow `E_B(t,u) = exp(-i (t/ε)(U + θ|u|²)) u`.
pub fn flow_b(t: f64, u: &WaveField, p: &ProblemParams, pot: &PotentialField) -> Result<WaveField> {
    check_grids(u, pot)?;
    let mut out = u.clone();
    let te = t / p.eps;
    for (v, &uu) in out.values_mut().iter_mut().zip(pot.values()) {
        let phase = -te * (uu + p.theta * v.norm_sqr());
        *v *= Complex64::from_polar(1.0, phase);
    }
    Ok(out)
}

/// Fréchet derivative of the pointwise flow with respect to the initial
/// value, applied to a direction `v` (a real-linear map):
///
/// ```text
/// ∂₂E_B(t,u) v = e^{-i(t/ε)(U+θ|u|²)} v
///              - i (t/ε) θ e^{-i(t/ε)(U+θ|u|²)} u (ū v + u v̄)
/// ```
pub fn dflow_b(
    t: f64,
    u: &WaveField,
    v: &WaveField,
    p: &ProblemParams,
    pot: &PotentialField,
) -> Result<WaveField> {
    check_grids(u, pot)?;
    check_pair(u, v)?;
    let te = t / p.eps;
    let mut out = v.clone();
    for ((z, &uu), &upot) in out
        .values_mut()
        .iter_mut()
        .zip(u.values())
        .zip(pot.values())
    {
        let ph = Complex64::from_polar(1.0, -te * (upot + p.theta * uu.norm_sqr()));
        let mixed = uu.conj() * *z + uu * z.conj();
        *z = ph * *z - Complex64::new(0.0, te * p.theta) * ph * uu * mixed;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Commutator expressions
//
// The first- and second-order commutators of the split vector fields, in the
// expanded pointwise form (spectral derivatives of u plus analytic potential
// data). These are the leading terms of splitting local errors; unit tests
// validate each one against a nested finite-difference commutator oracle.

struct FieldDerivs {
    du: Vec<WaveField>,
    lap: WaveField,
}

fn first_derivs(u: &WaveField) -> FieldDerivs {
    let d = u.grid().dim();
    let du: Vec<WaveField> = (0..d)
        .map(|axis| derivative_any(u, axis, 1).expect("axis in range"))
        .collect();
    let lap = apply_symbol(u, |k2| Complex64::new(-k2, 0.0));
    FieldDerivs { du, lap }
}

/// `[A,B](u) = (∇U)·(∇u) + ½(ΔU)u + θ(u²(Δū) + 2u|∇u|² + ū(∇u)·(∇u))`.
pub fn commutator_ab(u: &WaveField, p: &ProblemParams, pot: &PotentialField) -> WaveField {
    let d = u.grid().dim();
    let FieldDerivs { du, lap } = first_derivs(u);
    let half_lap_u = 0.5 * pot.laplacian();
    let mut out = WaveField::zeros(u.grid());
    for idx in 0..u.grid().len() {
        let uu = u.values()[idx];
        let lp = lap.values()[idx];
        let mut grad_u_grad = Complex64::default(); // (∇U)·(∇u)
        let mut grad_sq = Complex64::default(); // (∇u)·(∇u)
        let mut grad_abs = 0.0; // |∇u|²
        for axis in 0..d {
            let di = du[axis].values()[idx];
            grad_u_grad += pot.grad(axis)[idx] * di;
            grad_sq += di * di;
            grad_abs += di.norm_sqr();
        }
        out.values_mut()[idx] = grad_u_grad
            + half_lap_u * uu
            + p.theta * (uu * uu * lp.conj() + 2.0 * uu * grad_abs + uu.conj() * grad_sq);
    }
    out
}

/// `[B,[B,A]](u) = -(i/ε)( u(∇U)·(∇U) - 2θ(ΔU)|u|²u`
/// `- θ²(2|u|⁴Δu + 2|u|²u²Δū + |u|²ū(∇u)·(∇u) + 6|u|²u|∇u|² + u³(∇ū)·(∇ū)) )`.
pub fn commutator_bba(u: &WaveField, p: &ProblemParams, pot: &PotentialField) -> WaveField {
    let d = u.grid().dim();
    let FieldDerivs { du, lap } = first_derivs(u);
    let lap_u = pot.laplacian();
    let th = p.theta;
    let pref = Complex64::new(0.0, -1.0 / p.eps);
    let mut out = WaveField::zeros(u.grid());
    for idx in 0..u.grid().len() {
        let uu = u.values()[idx];
        let lp = lap.values()[idx];
        let a2 = uu.norm_sqr();
        let mut grad_u_sq = 0.0; // (∇U)·(∇U)
        let mut grad_sq = Complex64::default(); // (∇u)·(∇u)
        let mut grad_abs = 0.0; // |∇u|²
        for axis in 0..d {
            let di = du[axis].values()[idx];
            let gi = pot.grad(axis)[idx];
            grad_u_sq += gi * gi;
            grad_sq += di * di;
            grad_abs += di.norm_sqr();
        }
        let quad = 2.0 * a2 * a2 * lp
            + 2.0 * a2 * uu * uu * lp.conj()
            + a2 * uu.conj() * grad_sq
            + 6.0 * a2 * uu * grad_abs
            + uu * uu * uu * grad_sq.conj();
        out.values_mut()[idx] =
            pref * (uu * grad_u_sq - 2.0 * th * lap_u * a2 * uu - th * th * quad);
    }
    out
}

/// `[A,[A,B]](u)`, with the Hessian/trace terms spelled out:
///
/// ```text
/// iε( Tr((∇∇ᵀU)(∇∇ᵀu)) + θ(u²Δ²ū + 4u(∇u)·(∇Δū) + 2(Δū)(∇u)·(∇u))
///   + θ( ū Tr((∇∇ᵀu)²) + 2u Tr((∇∇ᵀu)(∇∇ᵀū))
///      + 2(∇ū)ᵀ(∇∇ᵀu)(∇u) + 2(∇u)ᵀ(∇∇ᵀū)(∇u) + 2(∇u)ᵀ(∇∇ᵀu)(∇ū) ) )
/// ```
///
/// The terms `(Δ²U)u` and `(∇ΔU)·(∇u)` vanish identically for the supported
/// potentials (zero and harmonic) and are omitted.
pub fn commutator_aab(u: &WaveField, p: &ProblemParams, pot: &PotentialField) -> WaveField {
    let d = u.grid().dim();
    let FieldDerivs { du, lap } = first_derivs(u);
    // Hessian entries h[i][j] for i <= j
    let mut hess: Vec<Vec<Option<WaveField>>> = vec![vec![None, None], vec![None, None]];
    for i in 0..d {
        for j in i..d {
            hess[i][j] = Some(derivative_any(&du[i], j, 1).expect("axis in range"));
        }
    }
    let h = |i: usize, j: usize, idx: usize| -> Complex64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        hess[a][b].as_ref().unwrap().values()[idx]
    };
    let grad_lap: Vec<WaveField> = (0..d)
        .map(|axis| derivative_any(&lap, axis, 1).expect("axis in range"))
        .collect();
    let bilap = apply_symbol(u, |k2| Complex64::new(k2 * k2, 0.0));
    let th = p.theta;
    let pref = Complex64::new(0.0, p.eps);
    let mut out = WaveField::zeros(u.grid());
    for idx in 0..u.grid().len() {
        let uu = u.values()[idx];
        let lpc = lap.values()[idx].conj();
        let bl_c = bilap.values()[idx].conj();
        let mut grad_sq = Complex64::default(); // (∇u)·(∇u)
        let mut grad_gradlap_c = Complex64::default(); // (∇u)·(∇Δū)
        let mut hess_lap_u = Complex64::default(); // Tr((∇∇ᵀU)(∇∇ᵀu)) = ω² Δu
        let mut tr_h2 = Complex64::default(); // Tr((∇∇ᵀu)²)
        let mut tr_h_hc = Complex64::default(); // Tr((∇∇ᵀu)(∇∇ᵀū))
        let mut quad_c_h_g = Complex64::default(); // (∇ū)ᵀ(∇∇ᵀu)(∇u)
        let mut quad_g_hc_g = Complex64::default(); // (∇u)ᵀ(∇∇ᵀū)(∇u)
        let mut quad_g_h_gc = Complex64::default(); // (∇u)ᵀ(∇∇ᵀu)(∇ū)
        for i in 0..d {
            let di = du[i].values()[idx];
            grad_sq += di * di;
            grad_gradlap_c += di * grad_lap[i].values()[idx].conj();
            hess_lap_u += pot.hessian_diag() * h(i, i, idx);
            for j in 0..d {
                let dj = du[j].values()[idx];
                let hij = h(i, j, idx);
                tr_h2 += hij * h(j, i, idx);
                tr_h_hc += hij * hij.conj();
                quad_c_h_g += di.conj() * hij * dj;
                quad_g_hc_g += di * hij.conj() * dj;
                quad_g_h_gc += di * hij * dj.conj();
            }
        }
        let cubic = uu * uu * bl_c + 4.0 * uu * grad_gradlap_c + 2.0 * lpc * grad_sq;
        let hess_terms = uu.conj() * tr_h2
            + 2.0 * uu * tr_h_hc
            + 2.0 * quad_c_h_g
            + 2.0 * quad_g_hc_g
            + 2.0 * quad_g_h_gc;
        out.values_mut()[idx] = pref * (hess_lap_u + th * (cubic + hess_terms));
    }
    out
}
