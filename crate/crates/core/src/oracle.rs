//! Independent brute-force reference integrator.
//!
//! Classical 4-stage explicit Runge-Kutta applied to the spectral
//! semi-discretization `u' = F(u)`. Deliberately NOT a splitting method, so
//! agreement with the split-step path is evidence against shared bugs. It is
//! orders of magnitude slower and meant for small validation instances only.

use crate::grid::WaveField;
use crate::operators::{apply_f, PotentialField, ProblemParams};
use crate::{Error, Result};
use num_complex::Complex64;

/// Integration method of the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    /// Classical RK4 on the spectral method-of-lines system.
    Rk4Mol,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Number of RK4 substeps across the requested interval.
    pub substeps: usize,
    pub method: OracleMethod,
}

impl OracleConfig {
    pub fn new(substeps: usize) -> Self {
        OracleConfig {
            substeps: substeps.max(1),
            method: OracleMethod::Rk4Mol,
        }
    }
}

/// Stability bound for RK4 on the imaginary axis is |λ|h ≤ 2√2; stay
/// slightly inside it.
const RK4_IMAG_BOUND: f64 = 2.8;

/// Approximates the exact flow `E_F(t, u0)` with `cfg.substeps` RK4 steps.
///
/// The stiff linear part has spectral radius `ε·k_max²/2`; the substep must
/// satisfy `h·ε·k_max²/2 ≤ 2.8` or the method is rejected up front. NaNs
/// appearing mid-run abort with an error.
pub fn oracle_solve(
    u0: &WaveField,
    p: &ProblemParams,
    pot: &PotentialField,
    t: f64,
    cfg: &OracleConfig,
) -> Result<WaveField> {
    let OracleMethod::Rk4Mol = cfg.method;
    let h = t / cfg.substeps as f64;
    let lambda_h = (h * p.eps * u0.grid().k_squared_max() / 2.0).abs();
    if lambda_h > RK4_IMAG_BOUND {
        let needed =
            (t.abs() * p.eps * u0.grid().k_squared_max() / 2.0 / RK4_IMAG_BOUND).ceil() as usize;
        return Err(Error::Unstable {
            lambda_h,
            bound: RK4_IMAG_BOUND,
            needed,
        });
    }

    let mut u = u0.clone();
    for step in 0..cfg.substeps {
        let k1 = apply_f(&u, p, pot)?;
        let k2 = apply_f(&stage(&u, 0.5 * h, &k1), p, pot)?;
        let k3 = apply_f(&stage(&u, 0.5 * h, &k2), p, pot)?;
        let k4 = apply_f(&stage(&u, h, &k3), p, pot)?;
        let c = Complex64::new(h / 6.0, 0.0);
        u.add_scaled(c, &k1);
        u.add_scaled(c * 2.0, &k2);
        u.add_scaled(c * 2.0, &k3);
        u.add_scaled(c, &k4);
        if !u.is_finite() {
            return Err(Error::NonFinite {
                context: format!("oracle substep {}/{}", step + 1, cfg.substeps),
            });
        }
    }
    Ok(u)
}

fn stage(u: &WaveField, c: f64, k: &WaveField) -> WaveField {
    let mut out = u.clone();
    out.add_scaled(Complex64::new(c, 0.0), k);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::operators::Potential;
    use crate::schemes::builtin_scheme;
    use crate::stepper::advance;
    use std::f64::consts::PI;

    #[test]
    fn plane_wave_matches_exact_solution() {
        // θ=0, U=0, u0 = e^{ix} on [0,2π): E_F(t)u0 = e^{-iεt/2} u0
        let g = make_grid(1, 0.0, 2.0 * PI, 64).unwrap();
        let p = ProblemParams::new(1.0, 0.0, Potential::None).unwrap();
        let pot = PotentialField::new(&g, p.potential);
        let u0 = WaveField::from_fn(&g, |x, _| Complex64::from_polar(1.0, x));
        let t = 0.1;
        let out = oracle_solve(&u0, &p, &pot, t, &OracleConfig::new(1000)).unwrap();
        let exact = &u0 * Complex64::from_polar(1.0, -0.5 * t);
        assert!(out.l2_distance(&exact) < 1e-10);
    }

    #[test]
    fn cross_validates_against_strang_in_the_linear_case() {
        let g = make_grid(1, -8.0, 8.0, 256).unwrap();
        let p = ProblemParams::new(1.0, 0.0, Potential::Harmonic { omega: 1.0 }).unwrap();
        let pot = PotentialField::new(&g, p.potential);
        let u0 = WaveField::from_fn(&g, |x, _| {
            Complex64::new((-(x - 1.0) * (x - 1.0)).exp(), 0.0)
        });
        let t = 0.1;
        let oracle = oracle_solve(&u0, &p, &pot, t, &OracleConfig::new(1000)).unwrap();
        let scheme = builtin_scheme("strang").unwrap();
        let h = 1e-4;
        let mut u = u0.clone();
        for _ in 0..(t / h).round() as usize {
            u = advance(&scheme, h, &u, &p, &pot).unwrap();
        }
        assert!(u.l2_distance(&oracle) < 1e-8);
    }

    #[test]
    fn richardson_self_convergence_is_fourth_order() {
        // error(substeps = m) / error(substeps = 2m) ≈ 16 against an 8m baseline
        let g = make_grid(1, -8.0, 8.0, 256).unwrap();
        let p = ProblemParams::new(1.0, 1.0, Potential::Harmonic { omega: 1.0 }).unwrap();
        let pot = PotentialField::new(&g, p.potential);
        let u0 = WaveField::from_fn(&g, |x, _| {
            Complex64::new((-(x - 1.0) * (x - 1.0)).exp(), 0.0)
        });
        let t = 0.1;
        let m = 64;
        let base = oracle_solve(&u0, &p, &pot, t, &OracleConfig::new(8 * m)).unwrap();
        let e1 = oracle_solve(&u0, &p, &pot, t, &OracleConfig::new(m))
            .unwrap()
            .l2_distance(&base);
        let e2 = oracle_solve(&u0, &p, &pot, t, &OracleConfig::new(2 * m))
            .unwrap()
            .l2_distance(&base);
        let ratio = e1 / e2;
        assert!(
            (10.0..24.0).contains(&ratio),
            "expected ~16, got {ratio} (e1 = {e1:.3e}, e2 = {e2:.3e})"
        );
    }

    #[test]
    fn unstable_substep_is_rejected_with_guidance() {
        let g = make_grid(1, -8.0, 8.0, 1024).unwrap();
        let p = ProblemParams::new(1.0, 1.0, Potential::None).unwrap();
        let pot = PotentialField::new(&g, p.potential);
        let u0 = WaveField::zeros(&g);
        let err = oracle_solve(&u0, &p, &pot, 0.1, &OracleConfig::new(50)).unwrap_err();
        match err {
            Error::Unstable { needed, .. } => {
                // the suggested count must actually be stable
                let lam = 0.1 * p.eps * g.k_squared_max() / 2.0 / needed as f64;
                assert!(lam <= RK4_IMAG_BOUND);
            }
            other => panic!("expected Unstable, got {other:?}"),
        }
    }

    #[test]
    fn norm_drift_stays_small_over_test_horizon() {
        let g = make_grid(1, -8.0, 8.0, 256).unwrap();
        let p = ProblemParams::new(1.0, 1.0, Potential::Harmonic { omega: 1.0 }).unwrap();
        let pot = PotentialField::new(&g, p.potential);
        let u0 = WaveField::from_fn(&g, |x, _| {
            Complex64::new((-(x - 1.0) * (x - 1.0)).exp(), 0.0)
        });
        let out = oracle_solve(&u0, &p, &pot, 0.1, &OracleConfig::new(1000)).unwrap();
        assert!((out.l2_norm() - u0.l2_norm()).abs() < 1e-9);
    }
}
