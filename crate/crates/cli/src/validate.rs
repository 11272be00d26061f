//! Oracle suites behind `wigflow validate`.

use std::time::Instant;

use wigner_flow::classical::{integrate_orbit, pt_orbit, ClassicalOrbit, OrbitFamily};
use wigner_flow::flow::{Correction, Fault, FlowField};
use wigner_flow::numerics::integrate_2d;
use wigner_flow::potentials::PotentialModel;
use wigner_flow::quantifiers::{
    decoherence_flux, decoherence_flux_by_area, flux, global_balance, global_purity, Quantity, Span,
};
use wigner_flow::states::{Wavefunction, WignerState};

type Measured = Result<(f64, f64), String>;

pub struct Check {
    pub name: String,
    pub tolerance: f64,
    run: Box<dyn Fn(Option<Fault>) -> Measured>,
}

pub struct Outcome {
    pub name: String,
    pub value: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
    pub seconds: f64,
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn field(state: WignerState, model: PotentialModel, fault: Option<Fault>) -> FlowField {
    FlowField::new(state, model).with_fault(fault)
}

fn check(name: &str, tolerance: f64, run: impl Fn(Option<Fault>) -> Measured + 'static) -> Check {
    Check {
        name: name.to_string(),
        tolerance,
        run: Box::new(run),
    }
}

fn weyl_equivalence(lambda: u32, samples: usize, n: usize) -> Measured {
    let psi = Wavefunction::from_real_fn(-25.0, 25.0, samples, |s| (1.0 / s.cosh()).powi(lambda as i32)).map_err(e)?;
    let weyl = WignerState::from_wavefunction(psi);
    let closed = WignerState::pt_ground(lambda).map_err(e)?;
    let mut worst: f64 = 0.0;
    let h = 6.0 / (n - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            let (s, q) = (-3.0 + h * i as f64, -3.0 + h * j as f64);
            worst = worst.max((weyl.value(s, q).map_err(e)? - closed.value(s, q).map_err(e)?).abs());
        }
    }
    Ok((worst, 0.0))
}

fn stationarity(lambda: u32, fault: Option<Fault>) -> Measured {
    let f = field(
        WignerState::pt_ground(lambda).map_err(e)?,
        PotentialModel::poschl_teller(lambda).map_err(e)?,
        fault,
    );
    let mut worst: f64 = 0.0;
    for i in 0..9 {
        for j in 0..9 {
            let (s, q) = (-2.8 + 0.7 * i as f64, -2.8 + 0.7 * j as f64);
            worst = worst.max(f.continuity_residual(s, q).map_err(e)?.abs());
        }
    }
    Ok((worst, 0.0))
}

/// Contour flux against the enclosed-area form for a displaced, kicked
/// ground state; reports the larger mismatch over the given spans.
fn divergence_theorem(lambda: u32, ls: &[f64], spans: &[Span], fault: Option<Fault>) -> Measured {
    let model = PotentialModel::poschl_teller(lambda).map_err(e)?;
    let st = WignerState::displaced(WignerState::pt_ground(lambda).map_err(e)?, 1.0, 0.4);
    let f = field(st, model, fault);
    let mut worst: f64 = 0.0;
    for &l in ls {
        let o = pt_orbit(lambda, l).map_err(e)?;
        for &span in spans {
            let c = decoherence_flux(&f, &o, span).map_err(e)?.value;
            let a = decoherence_flux_by_area(&f, &o, span).map_err(e)?.value;
            worst = worst.max((c - a).abs());
        }
    }
    Ok((worst, 0.0))
}

fn parity(lambda: u32, l: f64, fault: Option<Fault>) -> Measured {
    let f = field(
        WignerState::pt_ground(lambda).map_err(e)?,
        PotentialModel::poschl_teller(lambda).map_err(e)?,
        fault,
    );
    let o = pt_orbit(lambda, l).map_err(e)?;
    let mut worst: f64 = 0.0;
    for q in [Quantity::Decoherence, Quantity::Entropy, Quantity::Purity] {
        let r = flux(&f, &o, Span::Full, q).map_err(e)?;
        if !(r.quad_error > 0.0) {
            return Err(format!("zero error estimate for {q:?}"));
        }
        worst = worst.max(r.value.abs() / r.quad_error);
    }
    Ok((worst, 0.0))
}

fn harmonic_nullity(fault: Option<Fault>) -> Measured {
    let model = PotentialModel::harmonic(1.3).map_err(e)?;
    let f = field(WignerState::harmonic_ground(1.3).map_err(e)?, model.clone(), fault);
    let mut worst: f64 = 0.0;
    for i in 0..7 {
        for j in 0..7 {
            let (s, q) = (-1.8 + 0.6 * i as f64, -1.8 + 0.6 * j as f64);
            let d = f.delta_jq(s, q).map_err(e)?;
            worst = worst.max(d.value.abs()).max(d.dq.abs());
        }
    }
    let o = ClassicalOrbit::new(&model, 1.0, OrbitFamily::Hamiltonian).map_err(e)?;
    for span in [Span::Full, Span::Quarter] {
        worst = worst.max(decoherence_flux(&f, &o, span).map_err(e)?.value.abs());
    }
    Ok((worst, 0.0))
}

fn pure_state(lambda: u32) -> Measured {
    let st = WignerState::pt_ground(lambda).map_err(e)?;
    let norm = integrate_2d(|s, q| st.value(s, q).unwrap_or(f64::NAN), &st.domain(), 1e-11)
        .map_err(e)?
        .value;
    let purity = global_purity(&st).map_err(e)?.value;
    Ok(((norm - 1.0).abs().max((purity - 1.0).abs()), 0.0))
}

fn orbit_conservation(lambda: u32, l: f64) -> Measured {
    let o = pt_orbit(lambda, l).map_err(e)?;
    let mut drift: f64 = 0.0;
    for k in 0..256 {
        let tau = 2.0 * o.period() * k as f64 / 256.0;
        drift = drift.max((o.hamiltonian_at(tau) - o.energy()).abs());
    }
    let (s0, q0) = o.state(0.0);
    let tr = integrate_orbit(o.model(), s0, q0, o.period(), o.period() / 4096.0).map_err(e)?;
    let (s, q) = tr.end();
    let (sa, qa) = o.state(o.period());
    Ok((drift.max((s - sa).abs()).max((q - qa).abs()), 0.0))
}

fn balance(lambda: u32, fault: Option<Fault>) -> Measured {
    let f = field(
        WignerState::pt_ground(lambda).map_err(e)?,
        PotentialModel::poschl_teller(lambda).map_err(e)?,
        fault,
    )
    .with_correction(Correction::Resummed { rel_tol: 1e-9 })
    .map_err(e)?;
    let b = global_balance(&f).map_err(e)?;
    Ok((b.mean_div_w.abs().max(b.mean_w_div_w.abs()), b.quad_error))
}

pub fn suite(full: bool) -> Vec<Check> {
    let mut v = vec![
        check("weyl transform equivalence, lambda=1", 1e-8, |_| weyl_equivalence(1, 2001, 11)),
        check("pure-state norm and purity, lambda=1", 1e-8, |_| pure_state(1)),
        check("stationarity div J, lambda=1", 1e-7, |f| stationarity(1, f)),
        check("divergence theorem, lambda=1", 1e-7, |f| {
            divergence_theorem(1, &[0.7], &[Span::Full, Span::Quarter], f)
        }),
        check("full-period parity cancellation (|flux|/error), lambda=1", 10.0, |f| parity(1, 1.0, f)),
        check("harmonic nullity", 0.0, harmonic_nullity),
        check("orbit energy and integrator agreement, lambda=1", 1e-6, |_| orbit_conservation(1, 1.3)),
    ];
    if full {
        v.extend([
            check("weyl transform equivalence, lambda=2", 1e-8, |_| weyl_equivalence(2, 5001, 21)),
            check("pure-state norm and purity, lambda=2", 1e-8, |_| pure_state(2)),
            check("stationarity div J, lambda=2", 1e-7, |f| stationarity(2, f)),
            check("divergence theorem, lambda=2", 1e-7, |f| {
                divergence_theorem(2, &[1.5, 4.0], &[Span::Full, Span::Quarter], f)
            }),
            check("full-period parity cancellation (|flux|/error), lambda=2", 10.0, |f| parity(2, 3.0, f)),
            check("orbit energy and integrator agreement, lambda=2", 1e-6, |_| orbit_conservation(2, 4.0)),
            check("global balance <div w>, <W div w>, lambda=1", 1e-6, |f| balance(1, f)),
            check("global balance <div w>, <W div w>, lambda=2", 1e-6, |f| balance(2, f)),
        ]);
    }
    v
}

pub fn run(checks: &[Check], fault: Option<Fault>) -> Vec<Outcome> {
    checks
        .iter()
        .map(|c| {
            let start = Instant::now();
            let r = (c.run)(fault);
            let seconds = start.elapsed().as_secs_f64();
            match r {
                Ok((value, err)) => Outcome {
                    name: c.name.clone(),
                    value: Some(value),
                    tolerance: c.tolerance,
                    passed: value <= c.tolerance,
                    note: if err > 0.0 { format!("quad error {err:.1e}") } else { String::new() },
                    seconds,
                },
                Err(msg) => Outcome {
                    name: c.name.clone(),
                    value: None,
                    tolerance: c.tolerance,
                    passed: false,
                    note: msg,
                    seconds,
                },
            }
        })
        .collect()
}

pub fn table(outcomes: &[Outcome]) -> String {
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<6}{:<width$}  {:>10}  {:>9}  {:>7}\n", "", "check", "measured", "tolerance", "time");
    for o in outcomes {
        let value = o.value.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "{:<6}{:<width$}  {:>10}  {:>9.1e}  {:>6.1}s",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            value,
            o.tolerance,
            o.seconds
        ));
        if !o.note.is_empty() {
            out.push_str("  ");
            out.push_str(&o.note);
        }
        out.push('\n');
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    out.push_str(&format!("{} of {} checks passed\n", outcomes.len() - failed, outcomes.len()));
    out
}
