use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use wigner_flow::numerics::{integrate_2d, PhaseRect};
use wigner_flow::states::{PtGround, Wavefunction, WignerState};

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// Normalized `sech^lambda`.
fn sech_power(lambda: u32) -> impl Fn(f64) -> f64 {
    let norm2: f64 = match lambda {
        1 => 2.0,
        2 => 4.0 / 3.0,
        3 => 16.0 / 15.0,
        _ => unreachable!(),
    };
    move |s| sech(s).powi(lambda as i32) / norm2.sqrt()
}

/// Weyl transform of a real even wavefunction by the trapezoid rule on the
/// whole line, which converges geometrically for analytic integrands.
fn weyl_trapezoid(psi: &impl Fn(f64) -> f64, s: f64, q: f64) -> f64 {
    let h = 0.02;
    let mut acc = psi(s) * psi(s);
    for k in 1..4000 {
        let y = k as f64 * h;
        acc += 2.0 * psi(s - y) * psi(s + y) * (2.0 * q * y).cos();
    }
    acc * h / PI
}

#[test]
fn closed_form_matches_weyl_transform() {
    for lambda in [1, 2, 3] {
        let p = PtGround::new(lambda).unwrap();
        let psi = sech_power(lambda);
        let mut worst: f64 = 0.0;
        for i in 0..21 {
            for j in 0..21 {
                let (s, q) = (-3.0 + 0.3 * i as f64, -3.0 + 0.3 * j as f64);
                worst = worst.max((p.value(s, q).unwrap() - weyl_trapezoid(&psi, s, q)).abs());
            }
        }
        assert!(worst < 1e-12, "lambda {lambda}: {worst:e}");
    }
}

#[test]
fn wavefunction_state_matches_closed_form() {
    let psi = Wavefunction::from_real_fn(-25.0, 25.0, 5001, sech_power(1)).unwrap();
    let wf = WignerState::from_wavefunction(psi);
    let pt = WignerState::pt_ground(1).unwrap();
    for &(s, q) in &[(0.0, 0.0), (0.7, -0.4), (-1.9, 1.2), (1.76, 1.13)] {
        let (a, b) = (wf.value(s, q).unwrap(), pt.value(s, q).unwrap());
        assert!((a - b).abs() < 1e-7, "({s}, {q}): {a} vs {b}");
    }
}

fn integrals(state: &WignerState) -> (f64, f64) {
    integrals_at(state, 1e-11)
}

fn integrals_at(state: &WignerState, rel_tol: f64) -> (f64, f64) {
    let d = state.domain();
    let norm = integrate_2d(|s, q| state.value(s, q).unwrap(), &d, rel_tol).unwrap().value;
    let purity = integrate_2d(|s, q| state.value(s, q).unwrap().powi(2), &d, rel_tol).unwrap().value;
    (norm, 2.0 * PI * purity)
}

#[test]
fn built_in_states_are_normalized_and_pure() {
    let states = [
        WignerState::pt_ground(1).unwrap(),
        WignerState::pt_ground(2).unwrap(),
        WignerState::pt_ground(3).unwrap(),
        WignerState::harmonic_ground(1.0).unwrap(),
        WignerState::harmonic_ground(2.3).unwrap(),
    ];
    for st in &states {
        let (norm, purity) = integrals(st);
        assert!((norm - 1.0).abs() < 1e-8, "{:?}: norm {norm}", st.kind());
        assert!((purity - 1.0).abs() < 1e-8, "{:?}: purity {purity}", st.kind());
    }
}

#[test]
fn wavefunction_state_is_normalized_and_pure() {
    let psi = Wavefunction::from_real_fn(-6.0, 6.0, 241, |s| (-0.5 * (s - 0.5).powi(2)).exp()).unwrap();
    let st = WignerState::from_wavefunction(psi).with_domain(PhaseRect::symmetric(6.0, 7.0).unwrap());
    let (norm, purity) = integrals_at(&st, 1e-9);
    assert!((norm - 1.0).abs() < 1e-8, "norm {norm}");
    assert!((purity - 1.0).abs() < 1e-6, "purity {purity}");
}

#[test]
fn mixture_purity_is_below_one() {
    let a = WignerState::pt_ground(1).unwrap();
    let b = WignerState::displaced(a.clone(), 4.0, 0.0);
    let mix = WignerState::mixture(vec![(0.5, a.clone()), (0.5, b.clone())]).unwrap();
    let (norm, purity) = integrals(&mix);
    assert!((norm - 1.0).abs() < 1e-8);
    // 1/2 + (1/2) * 2pi ∫∫ W_a W_b, and the overlap equals |<a|b>|^2 = (4/sinh 4)^2
    let overlap = (4.0 / 4f64.sinh()).powi(2);
    assert!((purity - 0.5 - 0.5 * overlap).abs() < 1e-8, "{purity}");
    assert!(purity < 1.0);
}

#[test]
fn scaled_state_purity_scales_quadratically() {
    let st = WignerState::scaled(WignerState::harmonic_ground(1.0).unwrap(), 1.7);
    let (norm, purity) = integrals(&st);
    assert!((norm - 1.7).abs() < 1e-9);
    assert!((purity - 1.7 * 1.7).abs() < 1e-8);
}

#[test]
fn marginals() {
    let pt = WignerState::pt_ground(1).unwrap();
    assert!((pt.marginal_position(0.0).unwrap() - 0.5).abs() < 1e-10);
    assert!((pt.marginal_position(1.3).unwrap() - 0.5 * sech(1.3).powi(2)).abs() < 1e-10);
    // momentum wavefunction of sech(s)/sqrt 2 is sqrt(pi)/2 sech(pi p/2)
    for &p in &[0.0, 0.8, -2.1] {
        let want = PI / 4.0 * sech(PI * p / 2.0).powi(2);
        assert!((pt.marginal_momentum(p).unwrap() - want).abs() < 1e-10, "p = {p}");
    }
    let ho = WignerState::harmonic_ground(1.0).unwrap();
    assert!((ho.marginal_position(0.0).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-12);
}

#[test]
fn momentum_of_sech_wavefunction() {
    let psi = Wavefunction::from_real_fn(-30.0, 30.0, 6001, sech_power(1)).unwrap();
    for &p in &[0.0, 0.5, 1.7] {
        let phi = psi.momentum(p);
        let want = PI.sqrt() / 2.0 * sech(PI * p / 2.0);
        assert!((phi - Complex64::new(want, 0.0)).norm() < 1e-8, "p = {p}: {phi}");
    }
}

#[test]
fn displaced_copy_matches_shifted_wavefunction() {
    let (s0, q0) = (1.0, 0.5);
    let psi = Wavefunction::from_fn(-24.0, 26.0, 5001, |s| {
        Complex64::new(0.0, q0 * s).exp() * sech(s - s0) / 2f64.sqrt()
    })
    .unwrap();
    let wf = WignerState::from_wavefunction(psi);
    let displaced = WignerState::displaced(WignerState::pt_ground(1).unwrap(), s0, q0);
    for &(s, q) in &[(1.0, 0.5), (0.2, -0.3), (2.4, 1.6)] {
        let (a, b) = (wf.value(s, q).unwrap(), displaced.value(s, q).unwrap());
        assert!((a - b).abs() < 1e-7, "({s}, {q}): {a} vs {b}");
        let (ga, gb) = (wf.gradient(s, q).unwrap(), displaced.gradient(s, q).unwrap());
        assert!((ga.ws - gb.ws).abs() < 1e-5 && (ga.wq - gb.wq).abs() < 1e-6);
    }
}

#[test]
fn pt_is_not_positive_definite() {
    let p = WignerState::pt_ground(1).unwrap();
    let pos = p.positivity();
    assert!(!pos.positive && pos.min_w < -1e-3, "{pos:?}");
    assert!(WignerState::harmonic_ground(1.0).unwrap().positivity().positive);
}

/// Order-8 central differences of `f` at `x`.
fn fd8(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let c = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    c.iter().enumerate().map(|(k, c)| c * (f(x + (k + 1) as f64 * h) - f(x - (k + 1) as f64 * h))).sum::<f64>() / h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pt_parity(lambda in 1u32..=3, s in -6.0f64..6.0, q in -6.0f64..6.0) {
        let p = PtGround::new(lambda).unwrap();
        let w = p.value(s, q).unwrap();
        prop_assert_eq!(w, p.value(-s, q).unwrap());
        prop_assert_eq!(w, p.value(s, -q).unwrap());
        prop_assert!(w.abs() <= 1.0 / PI + 1e-15);
    }

    #[test]
    fn pt_derivatives_match_finite_differences(lambda in 1u32..=3, s in -3.0f64..3.0, q in -3.0f64..3.0) {
        let p = PtGround::new(lambda).unwrap();
        let d = p.derivatives(s, q, 5).unwrap();
        for j in 0..5 {
            let fd = fd8(|x| p.derivatives(s, x, j).unwrap().dq[j], q, 0.02);
            prop_assert!((fd - d.dq[j + 1]).abs() < 1e-7 * d.dq[j + 1].abs().max(1.0), "j {}", j);
        }
        let fd = fd8(|x| p.value(x, q).unwrap(), s, 0.02);
        prop_assert!((fd - d.ds_dq[0]).abs() < 1e-8);
    }

    #[test]
    fn harmonic_derivatives_match_finite_differences(w2 in 0.3f64..3.0, s in -2.0f64..2.0, q in -2.0f64..2.0) {
        let st = WignerState::harmonic_ground(w2).unwrap();
        let d = st.q_derivatives(s, q, 4).unwrap();
        for j in 0..4 {
            let fd = fd8(|x| st.q_derivatives(s, x, j).unwrap()[j], q, 0.02);
            prop_assert!((fd - d[j + 1]).abs() < 1e-7 * d[j + 1].abs().max(1.0));
        }
    }
}
