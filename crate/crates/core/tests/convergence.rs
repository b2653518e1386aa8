//! Local-error convergence orders, estimator asymptotics, and the
//! dominant-term laws, all measured against the order-6 reference
//! composition run at step t/64.

use nlsplit_core::grid::{make_grid, GridSpec, WaveField};
use nlsplit_core::operators::{Potential, PotentialField, ProblemParams};
use nlsplit_core::schemes::{builtin_scheme, reference_scheme, BUILTIN_SCHEMES};
use nlsplit_core::stepper::{advance, estimate};
use nlsplit_core::{commutator_aab, commutator_ab, commutator_bba};
use num_complex::Complex64;
use std::sync::Arc;

fn gaussian(g: &Arc<GridSpec>) -> WaveField {
    WaveField::from_fn(g, |x, _| {
        Complex64::new((-(x - 1.0) * (x - 1.0)).exp(), 0.0)
    })
}

/// Exact-flow stand-in: the order-6 composition at step t/64.
fn local_reference(t: f64, u: &WaveField, p: &ProblemParams, pot: &PotentialField) -> WaveField {
    let r = reference_scheme();
    let h = t / 64.0;
    let mut w = u.clone();
    for _ in 0..64 {
        w = advance(&r, h, &w, p, pot).unwrap();
    }
    w
}

/// Least-squares slope of log e against log t over rows with e above the
/// roundoff floor.
fn fitted_slope(ts: &[f64], es: &[f64], floor: f64) -> f64 {
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(es)
        .filter(|(_, &e)| e > floor)
        .map(|(&t, &e)| (t.ln(), e.ln()))
        .collect();
    assert!(pts.len() >= 2, "not enough resolvable points for a slope");
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[test]
fn builtin_schemes_show_their_classical_local_order() {
    let g = make_grid(1, -8.0, 8.0, 512).unwrap();
    let p = ProblemParams::new(1.0, 1.0, Potential::Harmonic { omega: 1.0 }).unwrap();
    let pot = PotentialField::new(&g, p.potential);
    let u = gaussian(&g);
    let ts: Vec<f64> = (4..=8).map(|k| 2f64.powi(-k)).collect();
    let refs: Vec<WaveField> = ts
        .iter()
        .map(|&t| local_reference(t, &u, &p, &pot))
        .collect();
    for name in BUILTIN_SCHEMES {
        let scheme = builtin_scheme(name).unwrap();
        let es: Vec<f64> = ts
            .iter()
            .zip(&refs)
            .map(|(&t, r)| advance(&scheme, t, &u, &p, &pot).unwrap().l2_distance(r))
            .collect();
        let slope = fitted_slope(&ts, &es, 1e-12);
        let want = scheme.order as f64 + 1.0;
        println!("{name}: local-error slope {slope:.3} (nominal {want})");
        assert!(
            (slope - want).abs() <= 0.25,
            "{name}: slope {slope:.3} not within 0.25 of {want}"
        );
    }
}

#[test]
fn reference_composition_is_order_six() {
    // double triple-jump of strang: measured local-error slope ≈ 7 against
    // itself at step t/64
    let g = make_grid(1, -8.0, 8.0, 512).unwrap();
    let p = ProblemParams::new(1.0, 1.0, Potential::Harmonic { omega: 1.0 }).unwrap();
    let pot = PotentialField::new(&g, p.potential);
    let u = gaussian(&g);
    let r = reference_scheme();
    let ts: Vec<f64> = (2..=5).map(|k| 2f64.powi(-k)).collect();
    let es: Vec<f64> = ts
        .iter()
        .map(|&t| {
            advance(&r, t, &u, &p, &pot)
                .unwrap()
                .l2_distance(&local_reference(t, &u, &p, &pot))
        })
        .collect();
    let slope = fitted_slope(&ts, &es, 1e-13);
    println!("ref6: local-error slope {slope:.3}");
    assert!((6.4..=7.6).contains(&slope), "slope {slope:.3}");
}

#[test]
fn estimator_is_asymptotically_correct_for_every_builtin() {
    // est_norm / ‖L‖ → 1; checked at the smallest step whose local error is
    // still above the roundoff floor
    let g = make_grid(1, -8.0, 8.0, 512).unwrap();
    let p = ProblemParams::new(1.0, 1.0, Potential::Harmonic { omega: 1.0 }).unwrap();
    let pot = PotentialField::new(&g, p.potential);
    let u = gaussian(&g);
    for name in BUILTIN_SCHEMES {
        let scheme = builtin_scheme(name).unwrap();
        let mut checked = false;
        for k in (4..=12).rev() {
            let t = 2f64.powi(-k);
            let rec = estimate(&scheme, t, &u, &p, &pot).unwrap();
            let l = rec.u_out.l2_distance(&local_reference(t, &u, &p, &pot));
            if l > 1e-11 {
                let ratio = rec.est_norm / l;
                println!("{name}: est/L = {ratio:.4} at t = 2^-{k}");
                assert!(
                    (0.9..=1.1).contains(&ratio),
                    "{name}: est/L = {ratio} at t = 2^-{k}"
                );
                checked = true;
                break;
            }
        }
        assert!(checked, "{name}: no resolvable step found");
    }
}

#[test]
fn lie_local_error_is_dominated_by_the_first_commutator() {
    // ‖L_lie(t,u) - (t²/2)[B,A](u)‖ / t² decays at least one order in t;
    // [B,A] = -[A,B]
    let g = make_grid(1, -8.0, 8.0, 512).unwrap();
    let p = ProblemParams::new(1.0, 1.0, Potential::Harmonic { omega: 1.0 }).unwrap();
    let pot = PotentialField::new(&g, p.potential);
    let u = gaussian(&g);
    let scheme = builtin_scheme("lie").unwrap();
    let dominant = &commutator_ab(&u, &p, &pot) * -1.0;
    let ts: Vec<f64> = (4..=9).map(|k| 2f64.powi(-k)).collect();
    let res: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let l = &advance(&scheme, t, &u, &p, &pot).unwrap() - &local_reference(t, &u, &p, &pot);
            let mut d = &dominant * (t * t / 2.0);
            d.add_scaled(Complex64::new(-1.0, 0.0), &l);
            d.l2_norm() / (t * t)
        })
        .collect();
    let slope = fitted_slope(&ts, &res, 1e-13);
    println!("lie dominant-term residual slope {slope:.3}");
    assert!(slope >= 0.75, "slope {slope:.3}");
}

#[test]
fn strang_local_error_is_dominated_by_the_second_commutators() {
    // ‖L_strang(t,u) - (t³/6)(¼[A,[B,A]] + ½[B,[B,A]])(u)‖ / t³ decays at
    // least one order in t; [A,[B,A]] = -[A,[A,B]]
    let g = make_grid(1, -8.0, 8.0, 512).unwrap();
    let p = ProblemParams::new(1.0, 1.0, Potential::Harmonic { omega: 1.0 }).unwrap();
    let pot = PotentialField::new(&g, p.potential);
    let u = gaussian(&g);
    let scheme = builtin_scheme("strang").unwrap();
    let mut dominant = &commutator_aab(&u, &p, &pot) * -0.25;
    dominant.add_scaled(Complex64::new(0.5, 0.0), &commutator_bba(&u, &p, &pot));
    let ts: Vec<f64> = (4..=9).map(|k| 2f64.powi(-k)).collect();
    let res: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let l = &advance(&scheme, t, &u, &p, &pot).unwrap() - &local_reference(t, &u, &p, &pot);
            let mut d = &dominant * (t * t * t / 6.0);
            d.add_scaled(Complex64::new(-1.0, 0.0), &l);
            d.l2_norm() / (t * t * t)
        })
        .collect();
    let slope = fitted_slope(&ts, &res, 1e-13);
    println!("strang dominant-term residual slope {slope:.3}");
    assert!(slope >= 0.75, "slope {slope:.3}");
}

#[test]
fn strang_step_error_is_third_order_in_the_linear_case() {
    // θ=0, harmonic U: one Strang step vs a tiny-step oracle is O(t³)
    let g = make_grid(1, -8.0, 8.0, 256).unwrap();
    let p = ProblemParams::new(1.0, 0.0, Potential::Harmonic { omega: 1.0 }).unwrap();
    let pot = PotentialField::new(&g, p.potential);
    let u = gaussian(&g);
    let scheme = builtin_scheme("strang").unwrap();
    let ts = [0.1, 0.05, 0.025];
    let es: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let oracle =
                nlsplit_core::oracle_solve(&u, &p, &pot, t, &nlsplit_core::OracleConfig::new(2000))
                    .unwrap();
            advance(&scheme, t, &u, &p, &pot)
                .unwrap()
                .l2_distance(&oracle)
        })
        .collect();
    for pair in es.windows(2) {
        let order = (pair[0] / pair[1]).log2();
        assert!((2.6..=3.4).contains(&order), "observed order {order:.3}");
    }
}
