//! Information fluxes along classical contours and global functionals of `W`.
//!
//! Along an orbit `C` the three contour quantifiers are
//!
//! ```text
//! decoherence  -∫ dJ_q(s_C, q_C) ds_C
//! entropy      +∫ ln W(s_C, q_C) dJ_q(s_C, q_C) ds_C
//! purity       -∫ W(s_C, q_C) dJ_q(s_C, q_C) ds_C
//! ```
//!
//! with `ds_C = q_C dtau`. [`Span::Quarter`] and [`Span::Abs`] are
//! extensions: for an even eigenstate on a symmetric orbit every full-period
//! signed flux cancels exactly.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use crate::classical::{ClassicalOrbit, OrbitFamily};
use crate::error::{Error, Result};
use crate::flow::{FlowField, W_FLOOR};
use crate::numerics::{integrate_1d_vec, PhaseRect, QuadOptions, QuadratureResult};
use crate::par;
use crate::states::WignerState;

/// Relative tolerance of the contour quadratures.
pub const FLUX_REL_TOL: f64 = 1e-9;
/// `|W|` below which points are dropped from the global balance integrals.
pub const BALANCE_W_CUT: f64 = 1e-10;
/// `W` below which `W ln W` is taken as 0.
const ENTROPY_UNDERFLOW: f64 = 1e-300;

/// Portion of the orbit a flux is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Span {
    /// `[0, T]`.
    Full,
    /// `[0, T/4]`, from `(0, sqrt l)` to the right turning point.
    Quarter,
    /// `[0, T]` of the absolute value of the integrand.
    Abs,
}

impl Span {
    pub fn interval(self, period: f64) -> (f64, f64) {
        match self {
            Span::Full | Span::Abs => (0.0, period),
            Span::Quarter => (0.0, 0.25 * period),
        }
    }
}

impl std::str::FromStr for Span {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Span::Full),
            "quarter" => Ok(Span::Quarter),
            "abs" => Ok(Span::Abs),
            _ => Err(Error::InvalidArgument(format!("unknown span `{s}` (full, quarter, abs)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    Decoherence,
    Entropy,
    Purity,
}

/// A contour integral with its quadrature error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flux {
    pub value: f64,
    pub quad_error: f64,
    /// Largest series order used along the path; 0 when resummed.
    pub k_used_max: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantifierReport {
    pub l: f64,
    pub period: f64,
    pub sigma_flux_full: f64,
    pub sigma_flux_quarter: f64,
    pub sigma_flux_abs: f64,
    pub entropy_flux_full: f64,
    pub purity_flux_full: f64,
    pub entropy_flux_quarter: f64,
    pub purity_flux_quarter: f64,
    pub k_used_max: usize,
    pub quad_error: f64,
    /// The state is not an eigenstate of the model.
    pub quasi_static: bool,
}

fn check_pairing(field: &FlowField, orbit: &ClassicalOrbit) -> Result<()> {
    if field.model() != orbit.model() {
        return Err(Error::InvalidArgument(format!(
            "orbit model {:?} differs from field model {:?}",
            orbit.model(),
            field.model()
        )));
    }
    Ok(())
}

fn along(tau: f64) -> impl Fn(Error) -> Error {
    move |e| Error::AlongPath {
        tau,
        source: Box::new(e),
    }
}

fn flux_opts(rel_tol: f64) -> QuadOptions {
    QuadOptions::relative(rel_tol).with_abs_tol(1e-15)
}

/// The integrands of the three quantifiers at `tau`, in [`Quantity`] order.
/// `ln W` is only evaluated when `with_entropy` is set.
fn integrands(
    field: &FlowField,
    orbit: &ClassicalOrbit,
    (a, b): (f64, f64),
    tau: f64,
    with_entropy: bool,
    k_used: &AtomicUsize,
) -> Result<[f64; 3]> {
    let p = orbit.trace(a, b, tau);
    let d = field.delta_jq(p.s, p.q).map_err(along(tau))?;
    k_used.fetch_max(d.k_used, Ordering::Relaxed);
    let base = d.value * p.velocity;
    if base == 0.0 {
        return Ok([0.0; 3]);
    }
    let w = field.state().value(p.s, p.q).map_err(along(tau))?;
    let entropy = if with_entropy {
        if !(w > W_FLOOR) {
            return Err(Error::Positivity {
                s: p.s,
                q: p.q,
                w,
                tau: Some(tau),
            });
        }
        w.ln() * base
    } else {
        0.0
    };
    Ok([-base, entropy, -w * base])
}

fn index(q: Quantity) -> usize {
    match q {
        Quantity::Decoherence => 0,
        Quantity::Entropy => 1,
        Quantity::Purity => 2,
    }
}

/// Signed integrals of all three integrands over `[a, b]` in one pass.
fn signed_fluxes(
    field: &FlowField,
    orbit: &ClassicalOrbit,
    ab: (f64, f64),
    with_entropy: bool,
    rel_tol: f64,
) -> Result<[Flux; 3]> {
    let k_used = AtomicUsize::new(0);
    let r = integrate_1d_vec(
        |t| integrands(field, orbit, ab, t, with_entropy, &k_used),
        ab.0,
        ab.1,
        &flux_opts(rel_tol),
    )?;
    let k = k_used.load(Ordering::Relaxed);
    Ok(r.map(|r| Flux {
        value: r.value,
        quad_error: r.abs_error_estimate,
        k_used_max: k,
    }))
}

/// `∫ |g|` over `[a, b]`, split where `g` changes sign.
fn abs_integral(g: impl Fn(f64) -> Result<f64> + Sync, a: f64, b: f64, rel_tol: f64) -> Result<QuadratureResult> {
    const SAMPLES: usize = 129;
    let xs: Vec<f64> = (0..SAMPLES).map(|i| a + (b - a) * i as f64 / (SAMPLES - 1) as f64).collect();
    let gs = par::map_slice(&xs, |&x| g(x)).into_iter().collect::<Result<Vec<f64>>>()?;
    let mut breaks = vec![a];
    for i in 0..SAMPLES - 1 {
        let (mut lo, mut hi, glo) = (xs[i], xs[i + 1], gs[i]);
        if glo == 0.0 || gs[i + 1] == 0.0 || glo.signum() == gs[i + 1].signum() {
            continue;
        }
        while hi - lo > 1e-14 * (b - a) {
            let mid = 0.5 * (lo + hi);
            let gm = g(mid)?;
            if gm == 0.0 {
                (lo, hi) = (mid, mid);
            } else if gm.signum() == glo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        breaks.push(0.5 * (lo + hi));
    }
    breaks.push(b);
    let mut out = QuadratureResult {
        value: 0.0,
        abs_error_estimate: 0.0,
        panels_used: 0,
    };
    for w in breaks.windows(2) {
        if w[1] - w[0] <= 0.0 {
            continue;
        }
        let [r] = integrate_1d_vec(|x| g(x).map(|v| [v.abs()]), w[0], w[1], &flux_opts(rel_tol))?;
        out.value += r.value;
        out.abs_error_estimate += r.abs_error_estimate;
        out.panels_used += r.panels_used;
    }
    Ok(out)
}

/// One contour quantifier over `span`.
pub fn flux(field: &FlowField, orbit: &ClassicalOrbit, span: Span, quantity: Quantity) -> Result<Flux> {
    check_pairing(field, orbit)?;
    let ab = span.interval(orbit.period());
    let with_entropy = quantity == Quantity::Entropy;
    let i = index(quantity);
    if span != Span::Abs {
        return Ok(signed_fluxes(field, orbit, ab, with_entropy, FLUX_REL_TOL)?[i]);
    }
    abs_flux(field, orbit, i, with_entropy, FLUX_REL_TOL)
}

fn abs_flux(field: &FlowField, orbit: &ClassicalOrbit, i: usize, with_entropy: bool, rel_tol: f64) -> Result<Flux> {
    let ab = Span::Abs.interval(orbit.period());
    let k_used = AtomicUsize::new(0);
    let r = abs_integral(
        |t| Ok(integrands(field, orbit, ab, t, with_entropy, &k_used)?[i]),
        ab.0,
        ab.1,
        rel_tol,
    )?;
    Ok(Flux {
        value: r.value,
        quad_error: r.abs_error_estimate,
        k_used_max: k_used.load(Ordering::Relaxed),
    })
}

/// Decoherence, entropy and purity fluxes over `span`, in [`Quantity`]
/// order, at quadrature tolerance `rel_tol`.
pub fn span_fluxes(field: &FlowField, orbit: &ClassicalOrbit, span: Span, rel_tol: f64) -> Result<[Flux; 3]> {
    check_pairing(field, orbit)?;
    if span != Span::Abs {
        return signed_fluxes(field, orbit, span.interval(orbit.period()), true, rel_tol);
    }
    Ok([
        abs_flux(field, orbit, 0, false, rel_tol)?,
        abs_flux(field, orbit, 1, true, rel_tol)?,
        abs_flux(field, orbit, 2, false, rel_tol)?,
    ])
}

/// `-∫ dJ_q q_C dtau`.
pub fn decoherence_flux(field: &FlowField, orbit: &ClassicalOrbit, span: Span) -> Result<Flux> {
    flux(field, orbit, span, Quantity::Decoherence)
}

/// `+∫ ln W dJ_q q_C dtau`; errors where `W` falls to the positivity floor.
pub fn entropy_flux(field: &FlowField, orbit: &ClassicalOrbit, span: Span) -> Result<Flux> {
    flux(field, orbit, span, Quantity::Entropy)
}

/// `-∫ W dJ_q q_C dtau`.
pub fn purity_flux(field: &FlowField, orbit: &ClassicalOrbit, span: Span) -> Result<Flux> {
    flux(field, orbit, span, Quantity::Purity)
}

/// Decoherence flux over the arc of `span` from the divergence theorem.
///
/// The forward orbit runs clockwise around the origin, so the arc together
/// with the two rays from its endpoints to the origin bounds a sector `V`
/// and
///
/// ```text
/// -∫_arc dJ_q ds = -∫∫_V ∂_q dJ_q dV - ∫_0^1 [dJ_q(r P_b) s_b - dJ_q(r P_a) s_a] dr.
/// ```
///
/// The sector is covered by `(r, tau) -> r (s_C, q_C)`, with Jacobian
/// `r |s_C q_C' - q_C s_C'|`; this needs the orbit to be star-shaped about
/// the origin. For [`Span::Full`] the rays cancel.
pub fn decoherence_flux_by_area(field: &FlowField, orbit: &ClassicalOrbit, span: Span) -> Result<Flux> {
    check_pairing(field, orbit)?;
    if span == Span::Abs {
        return Err(Error::InvalidArgument("the area form has no unsigned variant".into()));
    }
    let (a, b) = span.interval(orbit.period());
    let opts = QuadOptions::relative(1e-11).with_abs_tol(1e-14);
    let inner_err = AtomicU64::new(0);
    let sector = integrate_1d_vec(
        |tau| {
            let (s, q) = orbit.state(tau);
            let jac = (s * orbit.acceleration(tau) - q * q).abs();
            let [r] = integrate_1d_vec(
                |r| Ok([r * field.delta_jq(r * s, r * q)?.dq]),
                0.0,
                1.0,
                &opts,
            )
            .map_err(along(tau))?;
            inner_err.fetch_max(r.abs_error_estimate.to_bits(), Ordering::Relaxed);
            Ok([jac * r.value])
        },
        a,
        b,
        &opts,
    )?[0];
    let mut value = -sector.value;
    let mut err = sector.abs_error_estimate + (b - a) * f64::from_bits(inner_err.load(Ordering::Relaxed));
    if span != Span::Full {
        let (sa, qa) = orbit.state(a);
        let (sb, qb) = orbit.state(b);
        let [rays] = integrate_1d_vec(
            |r| Ok([field.delta_jq(r * sb, r * qb)?.value * sb - field.delta_jq(r * sa, r * qa)?.value * sa]),
            0.0,
            1.0,
            &opts,
        )?;
        value -= rays.value;
        err += rays.abs_error_estimate;
    }
    if !orbit.is_forward() {
        value = -value;
    }
    Ok(Flux {
        value,
        quad_error: err,
        k_used_max: 0,
    })
}

/// All quantifiers for one orbit.
pub fn quantify(field: &FlowField, orbit: &ClassicalOrbit) -> Result<QuantifierReport> {
    quantify_with(field, orbit, FLUX_REL_TOL)
}

pub fn quantify_with(field: &FlowField, orbit: &ClassicalOrbit, rel_tol: f64) -> Result<QuantifierReport> {
    check_pairing(field, orbit)?;
    let period = orbit.period();
    let full = signed_fluxes(field, orbit, Span::Full.interval(period), true, rel_tol)?;
    let quarter = signed_fluxes(field, orbit, Span::Quarter.interval(period), true, rel_tol)?;
    let abs = abs_flux(field, orbit, 0, false, rel_tol)?;
    let all = full.iter().chain(&quarter).chain(std::iter::once(&abs));
    let quad_error = all.clone().map(|f| f.quad_error).fold(0.0, f64::max);
    let k_used_max = all.map(|f| f.k_used_max).max().unwrap_or(0);
    Ok(QuantifierReport {
        l: orbit.l(),
        period,
        sigma_flux_full: full[0].value,
        sigma_flux_quarter: quarter[0].value,
        sigma_flux_abs: abs.value,
        entropy_flux_full: full[1].value,
        purity_flux_full: full[2].value,
        entropy_flux_quarter: quarter[1].value,
        purity_flux_quarter: quarter[2].value,
        k_used_max,
        quad_error,
        quasi_static: !field.is_stationary(),
    })
}

/// [`quantify`] over several energy parameters, in parallel. Results keep
/// the order of `ls`.
pub fn sweep(field: &FlowField, ls: &[f64], family: OrbitFamily) -> Vec<Result<QuantifierReport>> {
    par::map_slice(ls, |&l| {
        let orbit = ClassicalOrbit::new(field.model(), l, family)?;
        quantify(field, &orbit)
    })
}

fn global_opts() -> QuadOptions {
    QuadOptions::relative(1e-10).with_abs_tol(1e-13)
}

/// Nested vector quadrature over a rectangle; the error adds the outer
/// estimate and the s-width times the worst inner estimate.
fn integrate_rect<const N: usize, F>(f: F, rect: &PhaseRect, opts: &QuadOptions) -> Result<[QuadratureResult; N]>
where
    F: Fn(f64, f64) -> Result<[f64; N]> + Sync,
{
    integrate_rows(|s| integrate_1d_vec(|q| f(s, q), rect.q_min, rect.q_max, opts), rect, opts)
}

/// Outer s-quadrature of per-row results.
fn integrate_rows<const N: usize, F>(row: F, rect: &PhaseRect, opts: &QuadOptions) -> Result<[QuadratureResult; N]>
where
    F: Fn(f64) -> Result<[QuadratureResult; N]> + Sync,
{
    let width = rect.s_max - rect.s_min;
    let inner_err = AtomicU64::new(0);
    let outer = integrate_1d_vec(
        |s| {
            let r = row(s)?;
            let worst = r.iter().map(|r| r.abs_error_estimate).fold(0.0, f64::max);
            inner_err.fetch_max(worst.to_bits(), Ordering::Relaxed);
            Ok(r.map(|r| r.value))
        },
        rect.s_min,
        rect.s_max,
        opts,
    )?;
    let extra = width * f64::from_bits(inner_err.load(Ordering::Relaxed));
    Ok(outer.map(|r| QuadratureResult {
        abs_error_estimate: r.abs_error_estimate + extra,
        ..r
    }))
}

fn w_ln_w(w: f64) -> f64 {
    if w < ENTROPY_UNDERFLOW {
        0.0
    } else {
        w * w.ln()
    }
}

/// `-∫∫ W ln W`. Errors unless the state is positive.
pub fn global_entropy(state: &WignerState) -> Result<QuadratureResult> {
    let pos = state.positivity();
    if !pos.positive {
        return Err(Error::Positivity {
            s: pos.at.0,
            q: pos.at.1,
            w: pos.min_w,
            tau: None,
        });
    }
    entropy_positive_part(state)
}

/// `-∫∫_{W > 0} W ln W`, defined for any state.
pub fn entropy_positive_part(state: &WignerState) -> Result<QuadratureResult> {
    let [r] = integrate_between_nodes(
        state,
        |s, q| Ok([-w_ln_w(state.value(s, q)?)]),
        0.0,
        |sign| sign > 0.0,
        &QuadOptions::relative(1e-9).with_abs_tol(1e-11).with_min_panels(1),
    )?;
    Ok(r)
}

/// `2 pi ∫∫ W^2`.
pub fn global_purity(state: &WignerState) -> Result<QuadratureResult> {
    let [r] = integrate_rect(|s, q| Ok([state.value(s, q)?.powi(2)]), &state.domain(), &global_opts())?;
    Ok(QuadratureResult {
        value: 2.0 * PI * r.value,
        abs_error_estimate: 2.0 * PI * r.abs_error_estimate,
        ..r
    })
}

/// `∫∫ W O` for a phase-space symbol `O`.
pub fn expectation(state: &WignerState, symbol: impl Fn(f64, f64) -> f64 + Sync) -> Result<QuadratureResult> {
    let [r] = integrate_rect(|s, q| Ok([state.value(s, q)? * symbol(s, q)]), &state.domain(), &global_opts())?;
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GlobalReport {
    /// `-∫∫ W ln W`; `None` when `W` takes negative values.
    pub s_vn: Option<f64>,
    pub purity: f64,
    /// `<div w> = ∫∫ W div w`, the entropy production.
    pub mean_div_w: f64,
    /// `<W div w> = ∫∫ W^2 div w`, minus the purity production over `2 pi`.
    pub mean_w_div_w: f64,
    pub quad_error: f64,
}

/// Pieces of `[lo, hi]` between sign changes of `W(s, .)` on which some
/// sample has `|W| > cut`, with the sign of `W` there. Ends are nodes
/// located by bisection.
fn segments_along_q(state: &WignerState, s: f64, lo: f64, hi: f64, cut: f64) -> Result<Vec<(f64, f64, f64)>> {
    const SAMPLES: usize = 400;
    let at = |i: usize| lo + (hi - lo) * i as f64 / SAMPLES as f64;
    let mut out = Vec::new();
    let (mut start, mut peak) = (lo, 0.0f64);
    let mut prev = state.value(s, lo)?;
    for i in 1..=SAMPLES {
        let cur = state.value(s, at(i))?;
        peak = peak.max(prev.abs());
        if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
            let (mut a, mut b) = (at(i - 1), at(i));
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if state.value(s, m)?.signum() == prev.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            let node = 0.5 * (a + b);
            if peak > cut {
                out.push((start, node, prev.signum()));
            }
            (start, peak) = (node, 0.0);
        }
        prev = cur;
    }
    if peak.max(prev.abs()) > cut {
        out.push((start, hi, prev.signum()));
    }
    Ok(out)
}

/// Integral over `rect` of `f`, with each q-row split at the nodes of `W`
/// and every piece integrated under the smoothstep map
/// `u^3 (10 - 15u + 6u^2)`, which is flat to second order at both ends and
/// tames kinks and logarithms sitting on the nodes. `keep` selects pieces by
/// the sign of `W` on them.
fn integrate_between_nodes<const N: usize, F>(
    state: &WignerState,
    f: F,
    cut: f64,
    keep: impl Fn(f64) -> bool + Sync,
    opts: &QuadOptions,
) -> Result<[QuadratureResult; N]>
where
    F: Fn(f64, f64) -> Result<[f64; N]> + Sync,
{
    let rect = state.domain();
    integrate_rows(
        |s| {
            let mut acc = [QuadratureResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                panels_used: 0,
            }; N];
            for (a, b, sign) in segments_along_q(state, s, rect.q_min, rect.q_max, cut)? {
                if !keep(sign) {
                    continue;
                }
                let h = b - a;
                let r = integrate_1d_vec(
                    |u| {
                        let x = a + h * u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
                        let jac = 30.0 * h * u * u * (1.0 - u) * (1.0 - u);
                        f(s, x).map(|v| v.map(|v| v * jac))
                    },
                    0.0,
                    1.0,
                    opts,
                )?;
                for k in 0..N {
                    acc[k].value += r[k].value;
                    acc[k].abs_error_estimate += r[k].abs_error_estimate;
                }
            }
            Ok(acc)
        },
        &rect,
        opts,
    )
}

/// `<div w>` and `<W div w>` over the pieces of the domain where `|W|`
/// exceeds `1e-10`.
///
/// `W div w = ∂_q dJ_q - dJ_q ∂_q ln|W|` has simple poles on the nodal lines
/// of `W`. Integrating the second term by parts in `q` between consecutive
/// nodes leaves `∂_q dJ_q (1 + ln|W|)`, whose singularity is only
/// logarithmic, plus boundary terms `dJ_q ln|W|` that cancel in pairs across
/// each node. Each piece is integrated under a map that clusters points at
/// both ends. `W^2 div w = W ∂_q dJ_q - dJ_q ∂_q W` is smooth.
pub fn global_balance(field: &FlowField) -> Result<GlobalReport> {
    let state = field.state();
    let opts = QuadOptions::relative(1e-7).with_abs_tol(1e-10).with_min_panels(1);
    let integrand = |s: f64, q: f64| -> Result<[f64; 2]> {
        let g = state.gradient(s, q)?;
        if g.w == 0.0 {
            return Ok([0.0; 2]);
        }
        let d = field.delta_jq(s, q)?;
        Ok([d.dq * (1.0 + g.w.abs().ln()), g.w * d.dq - d.value * g.wq])
    };
    let [div, wdiv] = integrate_between_nodes(state, integrand, BALANCE_W_CUT, |_| true, &opts)?;
    let purity = global_purity(state)?;
    let s_vn = if state.positivity().positive {
        Some(global_entropy(state)?.value)
    } else {
        None
    };
    Ok(GlobalReport {
        s_vn,
        purity: purity.value,
        mean_div_w: div.value,
        mean_w_div_w: wdiv.value,
        quad_error: div.abs_error_estimate.max(wdiv.abs_error_estimate),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidMoments {
    pub density: f64,
    pub velocity: f64,
    pub pressure: f64,
}

/// Momentum moments of `W` at fixed `s`: `∫W dq`, `∫qW dq / density` and
/// `∫q^2 W dq - density velocity^2`.
pub fn fluid_moments(state: &WignerState, s: f64) -> Result<FluidMoments> {
    let d = state.domain();
    let [m0, m1, m2] = integrate_1d_vec(
        |q| {
            let w = state.value(s, q)?;
            Ok([w, q * w, q * q * w])
        },
        d.q_min,
        d.q_max,
        &QuadOptions::relative(1e-12).with_abs_tol(1e-15),
    )?;
    let density = m0.value;
    if !(density.abs() > W_FLOOR) {
        return Err(Error::NearZeroDensity { s, q: 0.0, w: density });
    }
    let velocity = m1.value / density;
    Ok(FluidMoments {
        density,
        velocity,
        pressure: m2.value - density * velocity * velocity,
    })
}
