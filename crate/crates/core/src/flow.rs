//! The Wigner current `J`, its quantum correction `dJ_q`, the phase velocity
//! `w = J/W` and their divergences.
//!
//! The momentum current is `J_q = -U~'(s) W + dJ_q` with
//!
//! ```text
//! dJ_q = -sum_{k>=1} (-1)^k 4^{-k} / (2k+1)! U~^(2k+1)(s) ∂_q^{2k} W.
//! ```
//!
//! Substituting `∂_q^{2k} W = (1/pi) ∫ dy (2iy)^{2k} e^{2iqy} rho(s, y)` sums
//! the series under the integral:
//!
//! ```text
//! dJ_q = -(1/pi) ∫ dy e^{2iqy} rho(s, y) K(s, y),
//! K = (U~(s+y) - U~(s-y)) / (2y) - U~'(s).
//! ```
//!
//! [`Correction::Resummed`] evaluates this integral. [`Correction::Series`]
//! sums the truncated series term by term with a smallest-term stopping
//! rule. The series is asymptotic for the Poschl-Teller well and usually
//! fails that rule, so it is not the default.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::special::factorial;
use crate::numerics::{find_zeros_2d, integrate_1d_vec, FixedRule, PhaseGrid, QuadOptions, Zero2d};
use crate::potentials::PotentialModel;
use crate::states::{WignerState, YRule};

/// Default density floor below which `w` is not evaluated.
pub const W_FLOOR: f64 = 1e-13;
/// Below this `|y|` the kernel `K` is evaluated from its Taylor series.
const KERNEL_SERIES_Y: f64 = 0.05;
/// Odd potential derivatives kept in the small-`y` kernel series.
const KERNEL_SERIES_TERMS: usize = 8;
/// Gauss-Legendre points per knot interval for piecewise-smooth kernels.
const KNOT_POINTS: usize = 6;

/// Stopping controls for the truncated series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPolicy {
    pub k_max: usize,
    pub term_tol: f64,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy { k_max: 8, term_tol: 1e-12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Correction {
    /// All orders, through the integral kernel.
    Resummed { rel_tol: f64 },
    /// The truncated series in `∂_q^{2k} W`.
    Series(SeriesPolicy),
}

impl Default for Correction {
    fn default() -> Self {
        Correction::Resummed { rel_tol: 1e-12 }
    }
}

/// Deliberate defects used to check that the validation suite notices them.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Negate `dJ_q` but not `∂_q dJ_q`.
    FlipDeltaJqValue,
}

/// `dJ_q` and `∂_q dJ_q` with diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaJq {
    pub value: f64,
    pub dq: f64,
    /// Number of series terms summed; 0 when the correction vanishes
    /// identically or was resummed.
    pub k_used: usize,
    /// Last retained series term (series) or quadrature error estimate
    /// (resummed).
    pub last_term: f64,
}

impl DeltaJq {
    const ZERO: DeltaJq = DeltaJq {
        value: 0.0,
        dq: 0.0,
        k_used: 0,
        last_term: 0.0,
    };
}

/// Phase-space current at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Current {
    pub js: f64,
    pub jq: f64,
    pub delta: DeltaJq,
}

/// Everything the flow needs at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowPoint {
    pub w: f64,
    pub ws: f64,
    pub wq: f64,
    pub current: Current,
    /// `∇·J`.
    pub div_j: f64,
}

impl FlowPoint {
    /// `∇·w = (W ∂_q dJ_q - dJ_q ∂_q W) / W^2`, or `None` below the floor.
    pub fn div_w(&self, floor: f64) -> Option<f64> {
        (self.w.abs() > floor).then(|| {
            let d = &self.current.delta;
            (self.w * d.dq - d.value * self.wq) / (self.w * self.w)
        })
    }
}

#[derive(Clone, Debug)]
pub struct FlowField {
    state: WignerState,
    model: PotentialModel,
    correction: Correction,
    w_floor: f64,
    fault: Option<Fault>,
}

impl FlowField {
    pub fn new(state: WignerState, model: PotentialModel) -> Self {
        FlowField {
            state,
            model,
            correction: Correction::default(),
            w_floor: W_FLOOR,
            fault: None,
        }
    }

    pub fn with_correction(mut self, correction: Correction) -> Result<Self> {
        match correction {
            Correction::Series(p) if p.k_max == 0 || !(p.term_tol > 0.0) => {
                return Err(Error::InvalidArgument("series needs k_max >= 1 and term_tol > 0".into()));
            }
            Correction::Resummed { rel_tol } if !(rel_tol > 0.0) => {
                return Err(Error::InvalidArgument("rel_tol must be positive".into()));
            }
            _ => {}
        }
        self.correction = correction;
        Ok(self)
    }

    pub fn with_w_floor(mut self, floor: f64) -> Self {
        self.w_floor = floor;
        self
    }

    #[doc(hidden)]
    pub fn with_fault(mut self, fault: Option<Fault>) -> Self {
        self.fault = fault;
        self
    }

    pub fn state(&self) -> &WignerState {
        &self.state
    }

    pub fn model(&self) -> &PotentialModel {
        &self.model
    }

    pub fn correction(&self) -> Correction {
        self.correction
    }

    pub fn w_floor(&self) -> f64 {
        self.w_floor
    }

    /// Whether `W` is an eigenstate of the model, so `∂W/∂tau = 0`.
    pub fn is_stationary(&self) -> bool {
        self.state.is_stationary_under(&self.model)
    }

    pub fn delta_jq(&self, s: f64, q: f64) -> Result<DeltaJq> {
        if self.model.is_quadratic() {
            return Ok(DeltaJq::ZERO);
        }
        let mut d = match self.correction {
            Correction::Resummed { rel_tol } => self.delta_resummed(s, q, rel_tol)?,
            Correction::Series(policy) => self.delta_series(s, q, policy)?,
        };
        if self.fault == Some(Fault::FlipDeltaJqValue) {
            d.value = -d.value;
        }
        Ok(d)
    }

    fn delta_resummed(&self, s: f64, q: f64, rel_tol: f64) -> Result<DeltaJq> {
        let odd: Vec<f64> = (0..=KERNEL_SERIES_TERMS)
            .map(|k| self.model.flow_derivative(2 * k + 1, s) / factorial(2 * k + 1))
            .collect();
        let kernel = |y: f64| {
            if y.abs() < KERNEL_SERIES_Y {
                let y2 = y * y;
                odd[1..].iter().rev().fold(0.0, |acc, c| acc * y2 + c) * y2
            } else {
                (self.model.flow_value(s + y) - self.model.flow_value(s - y)) / (2.0 * y) - odd[0]
            }
        };
        // integrand pair for ±y: e^{2iqy} rho K and its q-derivative
        let pair = |y: f64| -> [Complex64; 2] {
            let k = kernel(y);
            let f = |y: f64| Complex64::new(0.0, 2.0 * q * y).exp() * self.state.rho(s, y) * k;
            let (a, b) = (f(y), f(-y));
            let iy = Complex64::new(0.0, 2.0 * y);
            [a + b, iy * (a - b)]
        };
        let (v, dv, err) = match self.state.y_rule(s) {
            YRule::Adaptive { upper } => {
                let opts = QuadOptions::relative(rel_tol).with_abs_tol(1e-15);
                let [r, rq] = integrate_1d_vec(
                    |y| {
                        let [a, b] = pair(y);
                        Ok([a.re, b.re])
                    },
                    0.0,
                    upper,
                    &opts,
                )?;
                (r.value, rq.value, r.abs_error_estimate.max(rq.abs_error_estimate))
            }
            YRule::Knots(breaks) => {
                let rule = FixedRule::on_breakpoints(&breaks, KNOT_POINTS);
                let mut acc = [Complex64::new(0.0, 0.0); 2];
                for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let [a, b] = pair(y);
                    acc[0] += a * w;
                    acc[1] += b * w;
                }
                (acc[0].re, acc[1].re, 0.0)
            }
        };
        Ok(DeltaJq {
            value: -v / PI,
            dq: -dv / PI,
            k_used: 0,
            last_term: err / PI,
        })
    }

    fn delta_series(&self, s: f64, q: f64, policy: SeriesPolicy) -> Result<DeltaJq> {
        let dw = self.state.q_derivatives(s, q, 2 * policy.k_max + 1)?;
        let coeff = |k: usize| {
            let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
            sign * 0.25f64.powi(k as i32) / factorial(2 * k + 1) * self.model.flow_derivative(2 * k + 1, s)
        };
        let (mut sum, mut sum_q) = (0.0, 0.0);
        let mut best = (f64::INFINITY, 0.0, 0.0, 0usize);
        let mut prev = f64::INFINITY;
        let mut decreased = false;
        for k in 1..=policy.k_max {
            let c = coeff(k);
            let (t, tq) = (c * dw[2 * k], c * dw[2 * k + 1]);
            if t.abs() > prev && decreased {
                // past the smallest term of an asymptotic series
                let (_, v, vq, kb) = best;
                return Ok(DeltaJq {
                    value: v,
                    dq: vq,
                    k_used: kb,
                    last_term: coeff(kb) * dw[2 * kb],
                });
            }
            decreased |= k > 1 && t.abs() < prev;
            prev = t.abs();
            sum += t;
            sum_q += tq;
            if t.abs() < best.0 {
                best = (t.abs(), sum, sum_q, k);
            }
            if t.abs() <= policy.term_tol * sum.abs() || (t == 0.0 && tq == 0.0 && sum == 0.0) {
                return Ok(DeltaJq {
                    value: sum,
                    dq: sum_q,
                    k_used: k,
                    last_term: t,
                });
            }
        }
        if !decreased && policy.k_max > 1 {
            return Err(Error::SeriesDivergence {
                s,
                q,
                k_max: policy.k_max,
                partial_sum: best.1,
                k_smallest: best.3,
                smallest_term: best.0,
            });
        }
        Ok(DeltaJq {
            value: sum,
            dq: sum_q,
            k_used: policy.k_max,
            last_term: prev,
        })
    }

    /// `(J_s, J_q)` with the correction diagnostics.
    pub fn flow_j(&self, s: f64, q: f64) -> Result<Current> {
        let w = self.state.value(s, q)?;
        self.current_from(s, q, w)
    }

    fn current_from(&self, s: f64, q: f64, w: f64) -> Result<Current> {
        let delta = self.delta_jq(s, q)?;
        Ok(Current {
            js: q * w,
            jq: -self.model.flow_derivative(1, s) * w + delta.value,
            delta,
        })
    }

    /// `W`, its gradient, `J` and `∇·J` at one point.
    pub fn point(&self, s: f64, q: f64) -> Result<FlowPoint> {
        let g = self.state.gradient(s, q)?;
        let current = self.current_from(s, q, g.w)?;
        let div_j = q * g.ws - self.model.flow_derivative(1, s) * g.wq + current.delta.dq;
        Ok(FlowPoint {
            w: g.w,
            ws: g.ws,
            wq: g.wq,
            current,
            div_j,
        })
    }

    /// `w = J / W`.
    pub fn phase_velocity_w(&self, s: f64, q: f64) -> Result<(f64, f64)> {
        let w = self.state.value(s, q)?;
        self.check_floor(s, q, w)?;
        let j = self.current_from(s, q, w)?;
        Ok((j.js / w, j.jq / w))
    }

    /// `∇·w = (W ∇·J - J·∇W) / W^2`.
    pub fn divergence_w(&self, s: f64, q: f64) -> Result<f64> {
        if self.model.is_quadratic() {
            let w = self.state.value(s, q)?;
            self.check_floor(s, q, w)?;
            return Ok(0.0);
        }
        let p = self.point(s, q)?;
        self.check_floor(s, q, p.w)?;
        Ok(p.div_w(self.w_floor).unwrap())
    }

    /// `∇·J`; zero for eigenstates.
    pub fn continuity_residual(&self, s: f64, q: f64) -> Result<f64> {
        Ok(self.point(s, q)?.div_j)
    }

    /// Zeros of `(J_s, J_q)` on the grid.
    pub fn stagnation_points(&self, grid: &PhaseGrid) -> Result<Vec<Zero2d>> {
        find_zeros_2d(
            |s, q| {
                let j = self.flow_j(s, q)?;
                Ok([j.js, j.jq])
            },
            grid,
        )
    }

    fn check_floor(&self, s: f64, q: f64, w: f64) -> Result<()> {
        if w.abs() <= self.w_floor {
            return Err(Error::NearZeroDensity { s, q, w });
        }
        Ok(())
    }
}
