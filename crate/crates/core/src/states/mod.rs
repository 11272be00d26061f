//! Wigner functions with exact derivatives.
//!
//! Convention (`hbar = 1`): `W(s, q) = (1/pi) ∫ dy e^{2iqy} rho(s, y)` with
//! `rho(s, y) = psi(s - y) conj(psi(s + y))`, or the weighted sum of such
//! kernels for a mixture.

mod harmonic;
mod pt;
mod spline;
mod wavefunction;

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

pub use harmonic::HarmonicGround;
pub use pt::{b_derivatives, PtDerivatives, PtGround, MAX_Q_ORDER};
pub use spline::UniformSpline;
pub use wavefunction::{wigner_from_wavefunction, Wavefunction, IMAGINARY_TOLERANCE};

use crate::error::{Error, Result};
use crate::numerics::{integrate_1d_with, PhaseRect, QuadOptions};
use crate::par;
use crate::potentials::PotentialModel;

/// Tail mass allowed outside the default domain.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Smallest default half-width of the domain in each direction.
pub const DEFAULT_HALF_WIDTH: f64 = 10.0;

#[derive(Clone, Debug)]
pub enum StateKind {
    PtGround(PtGround),
    HarmonicGround(HarmonicGround),
    Wavefunction(Arc<Wavefunction>),
    /// `psi(s - s0) e^{i q0 s}`, i.e. `W(s - s0, q - q0)`.
    Displaced { inner: Box<WignerState>, s0: f64, q0: f64 },
    /// `sum_i w_i W_i`.
    Mixture(Vec<(f64, WignerState)>),
}

/// Result of the grid scan for the minimum of `W`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Positivity {
    pub min_w: f64,
    pub at: (f64, f64),
    pub positive: bool,
}

/// `W` and its first partial derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gradient {
    pub w: f64,
    pub ws: f64,
    pub wq: f64,
}

/// How to integrate over `y in [0, Y]` in the Weyl kernel at a given `s`.
#[derive(Clone, Debug, PartialEq)]
pub enum YRule {
    /// Smooth integrand; adaptive quadrature on `[0, upper]`.
    Adaptive { upper: f64 },
    /// Piecewise-smooth integrand; fixed rule on every sub-interval.
    Knots(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct WignerState {
    kind: StateKind,
    domain: PhaseRect,
    positivity: OnceLock<Positivity>,
}

impl WignerState {
    fn with_kind(kind: StateKind) -> Self {
        let domain = default_domain(&kind);
        WignerState {
            kind,
            domain,
            positivity: OnceLock::new(),
        }
    }

    pub fn pt_ground(lambda: u32) -> Result<Self> {
        Ok(Self::with_kind(StateKind::PtGround(PtGround::new(lambda)?)))
    }

    pub fn harmonic_ground(omega2: f64) -> Result<Self> {
        Ok(Self::with_kind(StateKind::HarmonicGround(HarmonicGround::new(omega2)?)))
    }

    pub fn from_wavefunction(psi: Wavefunction) -> Self {
        Self::with_kind(StateKind::Wavefunction(Arc::new(psi)))
    }

    pub fn displaced(inner: WignerState, s0: f64, q0: f64) -> Self {
        Self::with_kind(StateKind::Displaced {
            inner: Box::new(inner),
            s0,
            q0,
        })
    }

    /// Convex mixture; weights must be positive and sum to one.
    pub fn mixture(parts: Vec<(f64, WignerState)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("a mixture needs at least one component".into()));
        }
        if parts.iter().any(|(w, _)| !(*w > 0.0)) {
            return Err(Error::InvalidArgument("mixture weights must be positive".into()));
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self::with_kind(StateKind::Mixture(parts)))
    }

    /// `c W`; not a physical state unless `c = 1`, but useful for checking
    /// how functionals scale.
    pub fn scaled(inner: WignerState, c: f64) -> Self {
        Self::with_kind(StateKind::Mixture(vec![(c, inner)]))
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    /// Truncated integration domain; tails outside carry less than
    /// [`TAIL_TOLERANCE`] of the probability.
    pub fn domain(&self) -> PhaseRect {
        self.domain
    }

    pub fn with_domain(mut self, domain: PhaseRect) -> Self {
        self.domain = domain;
        self
    }

    /// Whether `W(s, q) = W(-s, q) = W(s, -q)`.
    pub fn is_even(&self) -> bool {
        match &self.kind {
            StateKind::PtGround(_) | StateKind::HarmonicGround(_) => true,
            StateKind::Wavefunction(_) => false,
            StateKind::Displaced { inner, s0, q0 } => *s0 == 0.0 && *q0 == 0.0 && inner.is_even(),
            StateKind::Mixture(parts) => parts.iter().all(|(_, p)| p.is_even()),
        }
    }

    /// Whether `W` is known to be an eigenstate (hence stationary) of `model`.
    pub fn is_stationary_under(&self, model: &PotentialModel) -> bool {
        match (&self.kind, model) {
            (StateKind::PtGround(p), PotentialModel::PoschlTeller { lambda }) => p.lambda() == *lambda,
            (StateKind::HarmonicGround(h), PotentialModel::Harmonic { omega2 }) => {
                (h.omega() * h.omega() - omega2).abs() <= 1e-14 * omega2
            }
            (StateKind::Displaced { inner, s0, q0 }, _) => *s0 == 0.0 && *q0 == 0.0 && inner.is_stationary_under(model),
            (StateKind::Mixture(parts), _) => parts.iter().all(|(_, p)| p.is_stationary_under(model)),
            _ => false,
        }
    }

    pub fn value(&self, s: f64, q: f64) -> Result<f64> {
        match &self.kind {
            StateKind::PtGround(p) => p.value(s, q),
            StateKind::HarmonicGround(h) => Ok(h.value(s, q)),
            StateKind::Wavefunction(psi) => wigner_from_wavefunction(psi, s, q),
            StateKind::Displaced { inner, s0, q0 } => inner.value(s - s0, q - q0),
            StateKind::Mixture(parts) => parts.iter().try_fold(0.0, |acc, (w, p)| Ok(acc + w * p.value(s, q)?)),
        }
    }

    /// `∂_q^j W(s, q)` for `j = 0..=n`.
    pub fn q_derivatives(&self, s: f64, q: f64, n: usize) -> Result<Vec<f64>> {
        match &self.kind {
            StateKind::PtGround(p) => Ok(p.derivatives(s, q, n)?.dq),
            StateKind::HarmonicGround(h) => Ok(h.q_derivatives(s, q, n)),
            StateKind::Wavefunction(psi) => psi.weyl_q_derivatives(s, q, n),
            StateKind::Displaced { inner, s0, q0 } => inner.q_derivatives(s - s0, q - q0, n),
            StateKind::Mixture(parts) => {
                let mut out = vec![0.0; n + 1];
                for (w, p) in parts {
                    for (o, d) in out.iter_mut().zip(p.q_derivatives(s, q, n)?) {
                        *o += w * d;
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn gradient(&self, s: f64, q: f64) -> Result<Gradient> {
        match &self.kind {
            StateKind::PtGround(p) => {
                let d = p.derivatives(s, q, 1)?;
                Ok(Gradient {
                    w: d.dq[0],
                    ws: d.ds_dq[0],
                    wq: d.dq[1],
                })
            }
            StateKind::HarmonicGround(h) => {
                let d = h.q_derivatives(s, q, 1);
                Ok(Gradient {
                    w: d[0],
                    ws: h.s_derivative(s, q),
                    wq: d[1],
                })
            }
            StateKind::Wavefunction(psi) => {
                let (w, ws, wq) = psi.weyl_gradient(s, q)?;
                Ok(Gradient { w, ws, wq })
            }
            StateKind::Displaced { inner, s0, q0 } => inner.gradient(s - s0, q - q0),
            StateKind::Mixture(parts) => {
                let mut g = Gradient { w: 0.0, ws: 0.0, wq: 0.0 };
                for (w, p) in parts {
                    let d = p.gradient(s, q)?;
                    g.w += w * d.w;
                    g.ws += w * d.ws;
                    g.wq += w * d.wq;
                }
                Ok(g)
            }
        }
    }

    /// Position-space kernel `rho(s, y)`; Hermitian in `y`.
    pub fn rho(&self, s: f64, y: f64) -> Complex64 {
        match &self.kind {
            StateKind::PtGround(p) => Complex64::new(p.rho(s, y), 0.0),
            StateKind::HarmonicGround(h) => Complex64::new(h.rho(s, y), 0.0),
            StateKind::Wavefunction(psi) => psi.rho(s, y),
            StateKind::Displaced { inner, s0, q0 } => {
                inner.rho(s - s0, y) * Complex64::new(0.0, -2.0 * q0 * y).exp()
            }
            StateKind::Mixture(parts) => parts.iter().map(|(w, p)| p.rho(s, y) * *w).sum(),
        }
    }

    /// Integration rule in `y >= 0` for kernels centred at `s`.
    pub fn y_rule(&self, s: f64) -> YRule {
        match &self.kind {
            StateKind::PtGround(p) => YRule::Adaptive { upper: p.y_extent() + s.abs() },
            StateKind::HarmonicGround(h) => YRule::Adaptive { upper: h.y_extent() },
            StateKind::Wavefunction(psi) => YRule::Knots(psi.breakpoints(s)),
            StateKind::Displaced { inner, s0, .. } => inner.y_rule(s - s0),
            StateKind::Mixture(parts) => {
                let rules: Vec<YRule> = parts.iter().map(|(_, p)| p.y_rule(s)).collect();
                let upper = rules
                    .iter()
                    .map(|r| match r {
                        YRule::Adaptive { upper } => *upper,
                        YRule::Knots(k) => k.last().copied().unwrap_or(0.0),
                    })
                    .fold(0.0, f64::max);
                if rules.iter().all(|r| matches!(r, YRule::Adaptive { .. })) {
                    return YRule::Adaptive { upper };
                }
                let mut breaks = vec![0.0, upper];
                for r in rules {
                    match r {
                        YRule::Knots(k) => breaks.extend(k),
                        YRule::Adaptive { upper } => {
                            let n = (upper / 0.05).ceil() as usize;
                            breaks.extend((1..n).map(|i| i as f64 * upper / n as f64));
                        }
                    }
                }
                breaks.sort_by(f64::total_cmp);
                breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
                YRule::Knots(breaks)
            }
        }
    }

    /// Grid scan for the minimum of `W` over the domain (computed once).
    pub fn positivity(&self) -> &Positivity {
        self.positivity.get_or_init(|| {
            let n = if self.has_wavefunction() { 81 } else { 161 };
            let d = self.domain;
            let at = |i: usize, n: usize, lo: f64, hi: f64| lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let vals = par::map_range(n * n, |idx| {
                let (s, q) = (at(idx / n, n, d.s_min, d.s_max), at(idx % n, n, d.q_min, d.q_max));
                (self.value(s, q).unwrap_or(f64::NAN), s, q)
            });
            let (min_w, s, q) = vals
                .into_iter()
                .filter(|v| v.0.is_finite())
                .fold((f64::INFINITY, 0.0, 0.0), |a, b| if b.0 < a.0 { b } else { a });
            Positivity {
                min_w,
                at: (s, q),
                positive: min_w >= -1e-14,
            }
        })
    }

    fn has_wavefunction(&self) -> bool {
        match &self.kind {
            StateKind::Wavefunction(_) => true,
            StateKind::Displaced { inner, .. } => inner.has_wavefunction(),
            StateKind::Mixture(parts) => parts.iter().any(|(_, p)| p.has_wavefunction()),
            _ => false,
        }
    }

    /// `∫ W(s, q) dq` over the domain.
    pub fn marginal_position(&self, s: f64) -> Result<f64> {
        let d = self.domain;
        let opts = QuadOptions::relative(1e-12).with_abs_tol(1e-15);
        Ok(integrate_1d_with(|q| self.value(s, q).unwrap_or(f64::NAN), d.q_min, d.q_max, &opts)?.value)
    }

    /// `∫ W(s, q) ds` over the domain.
    pub fn marginal_momentum(&self, q: f64) -> Result<f64> {
        let d = self.domain;
        let opts = QuadOptions::relative(1e-12).with_abs_tol(1e-15);
        Ok(integrate_1d_with(|s| self.value(s, q).unwrap_or(f64::NAN), d.s_min, d.s_max, &opts)?.value)
    }
}

fn default_domain(kind: &StateKind) -> PhaseRect {
    let tail = TAIL_TOLERANCE;
    let (s_half, q_half) = match kind {
        StateKind::PtGround(p) => {
            // position tail ~ N^2 4^l e^{-2 l S} / (2 l); momentum tail ~ e^{-pi Q}
            let l = p.lambda() as f64;
            let s = (p.psi_norm2() * 4f64.powf(l) / (2.0 * l * tail)).ln() / (2.0 * l);
            let q = (4.0 / tail).ln() / PI;
            (s.max(DEFAULT_HALF_WIDTH), q.max(DEFAULT_HALF_WIDTH))
        }
        StateKind::HarmonicGround(h) => {
            let w = h.omega();
            let k = (1.0 / tail).ln();
            ((k / w).sqrt().max(DEFAULT_HALF_WIDTH), (k * w).sqrt().max(DEFAULT_HALF_WIDTH))
        }
        StateKind::Wavefunction(psi) => {
            let mut q = DEFAULT_HALF_WIDTH;
            while q < 60.0 && psi.momentum(q).norm_sqr().max(psi.momentum(-q).norm_sqr()) > 0.1 * tail {
                q += 5.0;
            }
            return PhaseRect {
                s_min: psi.s_min(),
                s_max: psi.s_max(),
                q_min: -q,
                q_max: q,
            };
        }
        StateKind::Displaced { inner, s0, q0 } => return inner.domain().translate(*s0, *q0),
        StateKind::Mixture(parts) => {
            let mut it = parts.iter().map(|(_, p)| p.domain());
            let first = it.next().expect("mixtures are non-empty");
            return it.fold(first, |a, b| a.union(&b));
        }
    };
    PhaseRect {
        s_min: -s_half,
        s_max: s_half,
        q_min: -q_half,
        q_max: q_half,
    }
}
