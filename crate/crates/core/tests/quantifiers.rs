use std::f64::consts::PI;

use proptest::prelude::*;
use wigner_flow::classical::{harmonic_orbit, pt_orbit};
use wigner_flow::flow::{Correction, FlowField, SeriesPolicy};
use wigner_flow::potentials::PotentialModel;
use wigner_flow::quantifiers::*;
use wigner_flow::states::WignerState;
use wigner_flow::Error;

fn pt_field(lambda: u32) -> FlowField {
    FlowField::new(
        WignerState::pt_ground(lambda).unwrap(),
        PotentialModel::poschl_teller(lambda).unwrap(),
    )
}

fn harmonic_field(w2: f64) -> FlowField {
    FlowField::new(
        WignerState::harmonic_ground(w2).unwrap(),
        PotentialModel::harmonic(w2).unwrap(),
    )
}

#[test]
fn full_period_fluxes_cancel_by_parity() {
    let f = pt_field(1);
    for l in [0.5, 1.0, 1.5] {
        let o = pt_orbit(1, l).unwrap();
        for q in [Quantity::Decoherence, Quantity::Entropy, Quantity::Purity] {
            let r = flux(&f, &o, Span::Full, q).unwrap();
            assert!(r.quad_error > 0.0);
            assert!(r.value.abs() < 10.0 * r.quad_error, "l {l} {q:?}: {r:?}");
        }
    }
    let o = pt_orbit(2, 1.3).unwrap();
    let r = purity_flux(&pt_field(2), &o, Span::Full).unwrap();
    assert!(r.value.abs() < 10.0 * r.quad_error, "{r:?}");
}

#[test]
fn quarter_flux_matches_the_area_oracle() {
    let f = pt_field(1);
    let o = pt_orbit(1, 0.7).unwrap();
    let c = decoherence_flux(&f, &o, Span::Quarter).unwrap();
    let a = decoherence_flux_by_area(&f, &o, Span::Quarter).unwrap();
    assert!(c.value.abs() > 1e-3);
    assert!((c.value - a.value).abs() < 1e-7, "{c:?} vs {a:?}");
    let full = decoherence_flux_by_area(&f, &o, Span::Full).unwrap();
    assert!(full.value.abs() < 1e-12, "{full:?}");
}

#[test]
fn displaced_state_obeys_the_divergence_theorem() {
    let model = PotentialModel::poschl_teller(1).unwrap();
    let base = WignerState::pt_ground(1).unwrap();
    for (s0, q0) in [(1.0, 0.0), (1.0, 0.4)] {
        let f = FlowField::new(WignerState::displaced(base.clone(), s0, q0), model.clone());
        assert!(!f.is_stationary());
        for l in [0.4, 1.2] {
            let o = pt_orbit(1, l).unwrap();
            for span in [Span::Full, Span::Quarter] {
                let c = decoherence_flux(&f, &o, span).unwrap();
                let a = decoherence_flux_by_area(&f, &o, span).unwrap();
                assert!((c.value - a.value).abs() < 1e-7, "({s0}, {q0}) l {l} {span:?}: {c:?} vs {a:?}");
            }
        }
    }
    // a momentum kick breaks q-parity, so the closed contour carries flux
    let f = FlowField::new(WignerState::displaced(base, 1.0, 0.4), model);
    let c = decoherence_flux(&f, &pt_orbit(1, 1.2).unwrap(), Span::Full).unwrap();
    assert!(c.value.abs() > 1e-4, "{c:?}");
}

fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h)).sum();
    h * (inner + 0.5 * (f(a) + f(b)))
}

#[test]
fn quarter_entropy_flux_matches_trapezoid_refinement() {
    let f = pt_field(1);
    let o = pt_orbit(1, 0.7).unwrap();
    let r = entropy_flux(&f, &o, Span::Quarter).unwrap();
    let g = |t: f64| {
        let (s, q) = o.state(t);
        f.state().value(s, q).unwrap().ln() * f.delta_jq(s, q).unwrap().value * q
    };
    let t4 = o.period() / 4.0;
    let coarse = trapezoid(g, 0.0, t4, 1024);
    let fine = trapezoid(g, 0.0, t4, 2048);
    assert!((fine - r.value).abs() < 1e-7, "{} vs {}", fine, r.value);
    // second order: halving h cuts the error by four
    assert!((coarse - r.value).abs() > 3.0 * (fine - r.value).abs());
}

#[test]
fn reversal_negates_signed_fluxes() {
    let f = pt_field(1);
    let o = pt_orbit(1, 0.7).unwrap();
    let back = o.reversed();
    for q in [Quantity::Decoherence, Quantity::Entropy, Quantity::Purity] {
        let a = flux(&f, &o, Span::Quarter, q).unwrap().value;
        let b = flux(&f, &back, Span::Quarter, q).unwrap().value;
        assert!(a != 0.0 && (a + b).abs() <= 1e-14 * a.abs(), "{q:?}: {a} {b}");
    }
    let a = decoherence_flux_by_area(&f, &back, Span::Quarter).unwrap().value;
    let c = decoherence_flux(&f, &back, Span::Quarter).unwrap().value;
    assert!((a - c).abs() < 1e-7);
    // the unsigned variant ignores direction
    let a = decoherence_flux(&f, &o, Span::Abs).unwrap().value;
    let b = decoherence_flux(&f, &back, Span::Abs).unwrap().value;
    assert!((a - b).abs() < 1e-12 && a > 0.0);
}

#[test]
fn abs_span_bounds_the_signed_spans() {
    let f = pt_field(2);
    let o = pt_orbit(2, 2.5).unwrap();
    let abs = decoherence_flux(&f, &o, Span::Abs).unwrap().value;
    let quarter = decoherence_flux(&f, &o, Span::Quarter).unwrap().value;
    assert!(abs >= 4.0 * quarter.abs() - 1e-12);
}

#[test]
fn harmonic_quantifiers_are_exactly_zero() {
    let f = harmonic_field(1.7);
    for l in [0.2, 1.0, 6.0] {
        let r = quantify(&f, &harmonic_orbit(1.7, l).unwrap()).unwrap();
        for v in [
            r.sigma_flux_full,
            r.sigma_flux_quarter,
            r.sigma_flux_abs,
            r.entropy_flux_full,
            r.entropy_flux_quarter,
            r.purity_flux_full,
            r.purity_flux_quarter,
        ] {
            assert_eq!(v, 0.0);
        }
    }
    let g = harmonic_field(1.0);
    let b = global_balance(&g).unwrap();
    assert_eq!((b.mean_div_w, b.mean_w_div_w), (0.0, 0.0));
}

#[test]
fn report_fields() {
    let f = pt_field(1);
    let rows = sweep(&f, &[0.5, 1.5], Default::default());
    let r = rows[1].as_ref().unwrap();
    assert_eq!(r.l, 1.5);
    assert!((r.period - 2.0 * PI / 0.5f64.sqrt()).abs() < 1e-12);
    assert!(!r.quasi_static && r.k_used_max == 0 && r.quad_error >= 0.0);
    assert!(r.sigma_flux_abs > r.sigma_flux_quarter.abs());
    assert!(matches!(
        sweep(&f, &[2.5], Default::default())[0],
        Err(Error::OutsideBoundWindow { .. })
    ));
    let d = FlowField::new(
        WignerState::displaced(WignerState::pt_ground(1).unwrap(), 0.5, 0.0),
        PotentialModel::poschl_teller(1).unwrap(),
    );
    assert!(quantify(&d, &pt_orbit(1, 0.5).unwrap()).unwrap().quasi_static);
}

#[test]
fn series_correction_reports_its_order_or_fails_with_tau() {
    let f = pt_field(1)
        .with_correction(Correction::Series(SeriesPolicy { k_max: 8, term_tol: 1e-12 }))
        .unwrap();
    match decoherence_flux(&f, &pt_orbit(1, 0.5).unwrap(), Span::Quarter) {
        Ok(r) => assert!(r.k_used_max >= 1),
        Err(e) => {
            assert!(matches!(e, Error::AlongPath { .. }), "{e}");
            assert!(matches!(e.root(), Error::SeriesDivergence { .. }));
        }
    }
}

#[test]
fn entropy_flux_needs_positive_density() {
    let f = FlowField::new(
        WignerState::scaled(WignerState::pt_ground(1).unwrap(), -1.0),
        PotentialModel::poschl_teller(1).unwrap(),
    );
    let e = entropy_flux(&f, &pt_orbit(1, 0.7).unwrap(), Span::Full).unwrap_err();
    assert!(matches!(e, Error::Positivity { tau: Some(_), .. }), "{e}");
    // purity carries no such requirement
    assert!(purity_flux(&f, &pt_orbit(1, 0.7).unwrap(), Span::Full).is_ok());
}

#[test]
fn global_entropy() {
    let h = wigner_flow::quantifiers::global_entropy(&WignerState::harmonic_ground(1.0).unwrap()).unwrap();
    assert!((h.value - (1.0 + PI.ln())).abs() < 1e-8, "{h:?}");
    // squeezing leaves the entropy of a Gaussian unchanged
    let h2 = wigner_flow::quantifiers::global_entropy(&WignerState::harmonic_ground(3.0).unwrap()).unwrap();
    assert!((h2.value - h.value).abs() < 1e-8);
    let pt = WignerState::pt_ground(1).unwrap();
    assert!(matches!(
        wigner_flow::quantifiers::global_entropy(&pt),
        Err(Error::Positivity { tau: None, .. })
    ));
    let part = entropy_positive_part(&pt).unwrap();
    assert!((part.value - 2.1556911376).abs() < 1e-8, "{:.12}", part.value);
    let mix = WignerState::mixture(vec![(1.0, WignerState::harmonic_ground(1.0).unwrap())]).unwrap();
    let m = wigner_flow::quantifiers::global_entropy(&mix).unwrap();
    assert!((m.value - h.value).abs() < 1e-12);
}

#[test]
fn purity_contracts() {
    for st in [
        WignerState::pt_ground(1).unwrap(),
        WignerState::pt_ground(2).unwrap(),
        WignerState::harmonic_ground(0.6).unwrap(),
    ] {
        let p = global_purity(&st).unwrap().value;
        assert!((p - 1.0).abs() < 1e-8, "{p}");
    }
    let a = WignerState::pt_ground(1).unwrap();
    let b = WignerState::displaced(a.clone(), 4.0, 0.0);
    let mix = WignerState::mixture(vec![(0.5, a), (0.5, b)]).unwrap();
    let p = global_purity(&mix).unwrap().value;
    assert!(p > 0.0 && p < 1.0);
}

#[test]
fn ground_state_energies() {
    for (lambda, want) in [(1u32, -1.0), (2, -4.0)] {
        let st = WignerState::pt_ground(lambda).unwrap();
        let m = PotentialModel::poschl_teller(lambda).unwrap();
        let e = expectation(&st, |s, q| m.hamiltonian_value(s, q)).unwrap();
        assert!((e.value - want).abs() < 1e-6, "lambda {lambda}: {e:?}");
        let x = expectation(&st, |s, _| s).unwrap();
        assert!(x.value.abs() < 1e-12);
    }
}

#[test]
fn global_balance_vanishes_for_eigenstates() {
    for lambda in [1, 2] {
        let f = pt_field(lambda)
            .with_correction(Correction::Resummed { rel_tol: 1e-9 })
            .unwrap();
        let b = global_balance(&f).unwrap();
        assert!(b.mean_w_div_w.abs() < 1e-6 && b.mean_div_w.abs() < 1e-5, "{b:?}");
        assert!(b.quad_error < 1e-6);
        assert!((b.purity - 1.0).abs() < 1e-8 && b.s_vn.is_none());
    }
}

#[test]
fn fluid_moments_of_ground_states() {
    let m = fluid_moments(&WignerState::pt_ground(1).unwrap(), 0.0).unwrap();
    assert!((m.density - 0.5).abs() < 1e-12 && m.velocity.abs() < 1e-14);
    let h = fluid_moments(&WignerState::harmonic_ground(1.0).unwrap(), 0.0).unwrap();
    assert!((h.density - 1.0 / PI.sqrt()).abs() < 1e-13);
    assert!((h.pressure - 0.5 * h.density).abs() < 1e-13);
    // a momentum kick moves the mean velocity and leaves the pressure alone
    let k = fluid_moments(
        &WignerState::displaced(WignerState::harmonic_ground(1.0).unwrap(), 0.0, 0.8),
        0.0,
    )
    .unwrap();
    assert!((k.velocity - 0.8).abs() < 1e-12 && (k.pressure - h.pressure).abs() < 1e-12);
    assert!(matches!(
        fluid_moments(&WignerState::harmonic_ground(1.0).unwrap(), 40.0),
        Err(Error::NearZeroDensity { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn even_states_have_no_mean_velocity(lambda in 1u32..=3, s in -4.0f64..4.0) {
        let m = fluid_moments(&WignerState::pt_ground(lambda).unwrap(), s).unwrap();
        prop_assert!(m.velocity.abs() < 1e-12);
        prop_assert!(m.density > 0.0 && m.pressure > 0.0);
    }

    #[test]
    fn harmonic_fluxes_vanish(w2 in 0.2f64..4.0, l in 0.05f64..8.0) {
        let f = harmonic_field(w2);
        let o = harmonic_orbit(w2, l).unwrap();
        for span in [Span::Full, Span::Quarter, Span::Abs] {
            prop_assert_eq!(decoherence_flux(&f, &o, span).unwrap().value, 0.0);
            prop_assert_eq!(purity_flux(&f, &o, span).unwrap().value, 0.0);
        }
    }
}
