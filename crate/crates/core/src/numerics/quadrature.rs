//! Composite Gauss-Legendre quadrature.
//!
//! The adaptive driver doubles a uniform panel count until two consecutive
//! estimates agree. The reported error is the larger of that difference and a
//! round-off floor of `50 eps * integral(|f|)`, the same guard QUADPACK uses,
//! so integrals that cancel to zero by symmetry still get an honest estimate.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::par;

/// Points per panel in the adaptive rule.
pub const PANEL_POINTS: usize = 16;
const ROUNDOFF_FACTOR: f64 = 50.0 * f64::EPSILON;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// n-point rule on [-1, 1], nodes by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            if n == 1 {
                nodes[0] = 0.0;
                weights[0] = 2.0;
                break;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn sixteen() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(PANEL_POINTS))
    }
}

/// A frozen set of nodes and weights.
#[derive(Clone, Debug, Default)]
pub struct FixedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FixedRule {
    /// `panels` equal panels on [a, b] with an `n`-point rule each.
    pub fn composite(a: f64, b: f64, panels: usize, n: usize) -> Self {
        let gl = if n == PANEL_POINTS {
            GaussLegendre::sixteen().clone()
        } else {
            GaussLegendre::new(n)
        };
        let h = (b - a) / panels as f64;
        let mut rule = FixedRule {
            nodes: Vec::with_capacity(panels * n),
            weights: Vec::with_capacity(panels * n),
        };
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                rule.nodes.push(mid + 0.5 * h * x);
                rule.weights.push(0.5 * h * w);
            }
        }
        rule
    }

    /// An `n`-point rule on every interval between consecutive breakpoints.
    pub fn on_breakpoints(breaks: &[f64], n: usize) -> Self {
        let gl = GaussLegendre::new(n);
        let mut rule = FixedRule::default();
        for pair in breaks.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if hi <= lo {
                continue;
            }
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                rule.nodes.push(mid + half * x);
                rule.weights.push(half * w);
            }
        }
        rule
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_panels: usize,
    pub max_panels: usize,
}

impl QuadOptions {
    pub fn relative(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_min_panels(mut self, panels: usize) -> Self {
        self.min_panels = panels.max(1);
        self
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            min_panels: 2,
            max_panels: 1 << 13,
        }
    }
}

fn check_interval(a: f64, b: f64, opts: &QuadOptions) -> Result<()> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must satisfy a < b, got [{a}, {b}]"
        )));
    }
    if !(opts.rel_tol > 0.0) {
        return Err(Error::InvalidArgument("rel_tol must be positive".into()));
    }
    Ok(())
}

/// One composite pass; returns per-component (sum, sum of |f| w).
fn composite_pass<const N: usize, F>(f: &F, a: f64, b: f64, panels: usize) -> Result<([f64; N], [f64; N])>
where
    F: Fn(f64) -> Result<[f64; N]> + Sync,
{
    let gl = GaussLegendre::sixteen();
    let h = (b - a) / panels as f64;
    let total = panels * PANEL_POINTS;
    let values = par::map_range(total, |idx| {
        let (p, i) = (idx / PANEL_POINTS, idx % PANEL_POINTS);
        let x = a + (p as f64 + 0.5) * h + 0.5 * h * gl.nodes[i];
        let y = f(x)?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { at: x });
        }
        Ok(y)
    });
    let mut sum = [0.0; N];
    let mut abs = [0.0; N];
    for (idx, v) in values.into_iter().enumerate() {
        let v = v?;
        let w = 0.5 * h * gl.weights[idx % PANEL_POINTS];
        for k in 0..N {
            sum[k] += w * v[k];
            abs[k] += w * v[k].abs();
        }
    }
    Ok((sum, abs))
}

/// Adaptive panel-doubling quadrature of a vector-valued integrand. All
/// components must meet the tolerance.
pub fn integrate_1d_vec<const N: usize, F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<[QuadratureResult; N]>
where
    F: Fn(f64) -> Result<[f64; N]> + Sync,
{
    check_interval(a, b, opts)?;
    let mut panels = opts.min_panels.max(1);
    let (mut prev, _) = composite_pass(&f, a, b, panels)?;
    loop {
        panels *= 2;
        let (cur, abs) = composite_pass(&f, a, b, panels)?;
        let mut done = true;
        let mut out = [QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            panels_used: panels,
        }; N];
        for k in 0..N {
            let diff = (cur[k] - prev[k]).abs();
            let floor = ROUNDOFF_FACTOR * abs[k];
            out[k].value = cur[k];
            out[k].abs_error_estimate = diff.max(floor);
            // at the round-off floor further doubling cannot help
            if diff > (opts.rel_tol * cur[k].abs()).max(opts.abs_tol).max(floor) {
                done = false;
            }
        }
        if done {
            return Ok(out);
        }
        if panels >= opts.max_panels {
            let worst = out
                .iter()
                .max_by(|x, y| x.abs_error_estimate.total_cmp(&y.abs_error_estimate))
                .copied()
                .unwrap_or(out[0]);
            return Err(Error::NonConvergence {
                best: worst.value,
                error: worst.abs_error_estimate,
                panels,
            });
        }
        prev = cur;
    }
}

pub fn try_integrate_1d<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    integrate_1d_vec(|x| f(x).map(|v| [v]), a, b, opts).map(|[r]| r)
}

pub fn integrate_1d_with<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_1d_vec(|x| Ok([f(x)]), a, b, opts).map(|[r]| r)
}

/// Integral of `f` over [a, b] to relative tolerance `rel_tol` (absolute
/// floor 1e-14).
pub fn integrate_1d<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_1d_with(f, a, b, &QuadOptions::relative(rel_tol))
}

/// Axis-aligned rectangle in the (s, q) plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRect {
    pub s_min: f64,
    pub s_max: f64,
    pub q_min: f64,
    pub q_max: f64,
}

impl PhaseRect {
    pub fn new(s_min: f64, s_max: f64, q_min: f64, q_max: f64) -> Result<Self> {
        if !(s_min < s_max) || !(q_min < q_max) {
            return Err(Error::InvalidArgument(format!(
                "degenerate rectangle [{s_min}, {s_max}] x [{q_min}, {q_max}]"
            )));
        }
        Ok(PhaseRect {
            s_min,
            s_max,
            q_min,
            q_max,
        })
    }

    pub fn symmetric(s_half: f64, q_half: f64) -> Result<Self> {
        PhaseRect::new(-s_half, s_half, -q_half, q_half)
    }

    pub fn union(&self, other: &PhaseRect) -> PhaseRect {
        PhaseRect {
            s_min: self.s_min.min(other.s_min),
            s_max: self.s_max.max(other.s_max),
            q_min: self.q_min.min(other.q_min),
            q_max: self.q_max.max(other.q_max),
        }
    }

    pub fn translate(&self, ds: f64, dq: f64) -> PhaseRect {
        PhaseRect {
            s_min: self.s_min + ds,
            s_max: self.s_max + ds,
            q_min: self.q_min + dq,
            q_max: self.q_max + dq,
        }
    }
}

fn bump_max(slot: &AtomicU64, v: f64) {
    // non-negative floats order like their bit patterns
    slot.fetch_max(v.max(0.0).to_bits(), Ordering::Relaxed);
}

/// Tensor-product quadrature over a rectangle: adaptive in q inside adaptive
/// in s. The error estimate adds the outer estimate to the worst inner
/// estimate times the s-width.
pub fn try_integrate_2d<F>(f: F, rect: &PhaseRect, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let inner_err = AtomicU64::new(0);
    let panels = AtomicU64::new(0);
    let width = rect.s_max - rect.s_min;
    let inner_opts = QuadOptions {
        abs_tol: opts.abs_tol / width.max(1.0),
        ..*opts
    };
    let outer = try_integrate_1d(
        |s| {
            let r = try_integrate_1d(|q| f(s, q), rect.q_min, rect.q_max, &inner_opts)?;
            bump_max(&inner_err, r.abs_error_estimate);
            panels.fetch_max(r.panels_used as u64, Ordering::Relaxed);
            Ok(r.value)
        },
        rect.s_min,
        rect.s_max,
        opts,
    )?;
    Ok(QuadratureResult {
        value: outer.value,
        abs_error_estimate: outer.abs_error_estimate
            + width * f64::from_bits(inner_err.load(Ordering::Relaxed)),
        panels_used: outer.panels_used * panels.load(Ordering::Relaxed) as usize,
    })
}

pub fn integrate_2d<F>(f: F, rect: &PhaseRect, rel_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    try_integrate_2d(|s, q| Ok(f(s, q)), rect, &QuadOptions::relative(rel_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_weights_and_moments() {
        for n in [1, 2, 4, 5, 16, 20] {
            let gl = GaussLegendre::new(n);
            let wsum: f64 = gl.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n = {n}");
            // exact for degree 2n-1
            let d = 2 * n - 1;
            let m: f64 = gl.nodes.iter().zip(&gl.weights).map(|(x, w)| w * x.powi(d as i32 - 1)).sum();
            let exact = if (d - 1) % 2 == 0 { 2.0 / d as f64 } else { 0.0 };
            assert!((m - exact).abs() < 1e-13, "n = {n}: {m} vs {exact}");
        }
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_1d(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate_1d(|x| (-x * x).exp(), -8.0, 8.0, 1e-12).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-13, "{}", r.value);
        assert!(r.abs_error_estimate >= 0.0);
    }

    #[test]
    fn sine_over_half_period() {
        let r = integrate_1d(f64::sin, 0.0, PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
    }

    #[test]
    fn two_dimensional_examples() {
        let unit = PhaseRect::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!((integrate_2d(|_, _| 1.0, &unit, 1e-12).unwrap().value - 1.0).abs() < 1e-14);
        let big = PhaseRect::symmetric(8.0, 8.0).unwrap();
        let g = integrate_2d(|s, q| (-s * s - q * q).exp(), &big, 1e-12).unwrap();
        assert!((g.value - PI).abs() < 1e-12, "{}", g.value);
        let sq = PhaseRect::symmetric(1.0, 1.0).unwrap();
        assert!(integrate_2d(|s, q| s * q, &sq, 1e-12).unwrap().value.abs() < 1e-15);
    }

    #[test]
    fn non_convergence_reports_best_estimate() {
        let opts = QuadOptions {
            max_panels: 4,
            ..QuadOptions::relative(1e-14)
        };
        let e = integrate_1d_with(|x| (200.0 * x).sin(), 0.0, 10.0, &opts).unwrap_err();
        assert!(matches!(e, Error::NonConvergence { panels: 4, .. }));
    }

    #[test]
    fn bad_bounds_rejected() {
        assert!(integrate_1d(|x| x, 1.0, 0.0, 1e-8).is_err());
        assert!(integrate_1d(|x| x, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn nonfinite_integrand_is_an_error() {
        let e = integrate_1d(|x| 1.0 / (x - x), 0.0, 1.0, 1e-8).unwrap_err();
        assert!(matches!(e, Error::NonFinite { .. }));
    }

    #[test]
    fn refinement_does_not_increase_error_on_smooth_integrands() {
        let f = |x: f64| (x.sin() * 3.0).exp();
        let mut last = f64::INFINITY;
        for panels in [1usize, 2, 4, 8] {
            let opts = QuadOptions {
                min_panels: panels,
                max_panels: 2 * panels,
                ..QuadOptions::relative(1e-300)
            };
            let err = match integrate_1d_with(f, 0.0, 6.0, &opts) {
                Ok(r) => r.abs_error_estimate,
                Err(Error::NonConvergence { error, .. }) => error,
                Err(e) => panic!("{e}"),
            };
            assert!(err <= last * (1.0 + 1e-9), "panels {panels}: {err} > {last}");
            last = err;
        }
    }

    #[test]
    fn breakpoint_rule_is_exact_for_piecewise_polynomials() {
        let breaks = [0.0, 0.3, 1.0, 2.5];
        let rule = FixedRule::on_breakpoints(&breaks, 4);
        let f = |x: f64| if x < 1.0 { x.powi(5) } else { 2.0 - x * x };
        let exact = 1.0 / 6.0 + (2.0 * 1.5 - (2.5f64.powi(3) - 1.0) / 3.0);
        assert!((rule.integrate(f) - exact).abs() < 1e-14);
    }
}
