//! Classical motion under `ds/dtau = q`, `dq/dtau = -U'(s)/2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::Jet;
use crate::potentials::PotentialModel;

/// Which closed-form curve to use for the Poschl-Teller well.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OrbitFamily {
    /// Level set `H = l - lambda(lambda+1)` of the Hamiltonian:
    /// `sinh s = sqrt(l/(L-l)) sin(sqrt(L-l) tau)` with `L = lambda(lambda+1)`.
    #[default]
    Hamiltonian,
    /// `sinh s = sin(l tau)/sqrt(l)`, period `2 pi / l`. Conserves `H` only
    /// when `l = lambda`.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shape {
    /// `sinh s = a sin(omega tau)`.
    Sinh { a: f64, omega: f64 },
    /// `s = a sin(omega tau)`.
    Sine { a: f64, omega: f64 },
}

/// Closed orbit with `s(0) = 0`, `q(0) = sqrt(l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalOrbit {
    model: PotentialModel,
    l: f64,
    period: f64,
    shape: Shape,
    forward: bool,
}

/// Sample of an orbit traversal: position, momentum and `ds/dtau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitPoint {
    pub s: f64,
    pub q: f64,
    pub velocity: f64,
}

impl ClassicalOrbit {
    /// Dispatches on the model: Poschl-Teller or harmonic.
    pub fn new(model: &PotentialModel, l: f64, family: OrbitFamily) -> Result<Self> {
        match model {
            PotentialModel::PoschlTeller { lambda } => pt_orbit_with(*lambda, l, family),
            PotentialModel::Harmonic { omega2 } => harmonic_orbit(*omega2, l),
            PotentialModel::Polynomial { .. } => Err(Error::InvalidArgument(
                "closed-form orbits exist only for the Poschl-Teller and harmonic models".into(),
            )),
        }
    }

    pub fn model(&self) -> &PotentialModel {
        &self.model
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn is_forward(&self) -> bool {
        self.forward
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        ClassicalOrbit {
            forward: !self.forward,
            ..self.clone()
        }
    }

    /// `(s_C(tau), q_C(tau))` along the forward parameterization.
    pub fn state(&self, tau: f64) -> (f64, f64) {
        match self.shape {
            Shape::Sinh { a, omega } => {
                let (sn, cs) = (omega * tau).sin_cos();
                let x = a * sn;
                (x.asinh(), a * omega * cs / x.hypot(1.0))
            }
            Shape::Sine { a, omega } => {
                let (sn, cs) = (omega * tau).sin_cos();
                (a * sn, a * omega * cs)
            }
        }
    }

    /// `dq_C/dtau` along the forward parameterization.
    pub fn acceleration(&self, tau: f64) -> f64 {
        match self.shape {
            Shape::Sinh { a, omega } => {
                let (sn, cs) = (omega * tau).sin_cos();
                let x = a * sn;
                let r2 = 1.0 + x * x;
                -a * omega * omega * sn / r2.sqrt() - (a * omega * cs).powi(2) * x / (r2 * r2.sqrt())
            }
            Shape::Sine { a, omega } => -a * omega * omega * (omega * tau).sin(),
        }
    }

    pub fn s(&self, tau: f64) -> f64 {
        self.state(tau).0
    }

    pub fn q(&self, tau: f64) -> f64 {
        self.state(tau).1
    }

    /// Point on the arc `[a, b]` at parameter `tau`, in the orbit's direction
    /// of traversal. A reversed orbit visits `tau' = a + b - tau` and carries
    /// the negated velocity, so any line integral over the arc flips sign.
    pub fn trace(&self, a: f64, b: f64, tau: f64) -> OrbitPoint {
        let (t, sign) = if self.forward { (tau, 1.0) } else { (a + b - tau, -1.0) };
        let (s, q) = self.state(t);
        OrbitPoint { s, q, velocity: sign * q }
    }

    /// `H(s_C(0), q_C(0))`.
    pub fn energy(&self) -> f64 {
        let (s, q) = self.state(0.0);
        self.model.hamiltonian_value(s, q)
    }

    pub fn hamiltonian_at(&self, tau: f64) -> f64 {
        let (s, q) = self.state(tau);
        self.model.hamiltonian_value(s, q)
    }

    /// Largest `|ds/dtau - q|` over `n` times in one period, by order-8
    /// central differences.
    pub fn velocity_defect(&self, n: usize) -> f64 {
        let h = self.period * 1e-3;
        (0..n)
            .map(|k| {
                let tau = (k as f64 + 0.5) * self.period / n as f64;
                (central_difference_8(|t| self.s(t), tau, h) - self.q(tau)).abs()
            })
            .fold(0.0, f64::max)
    }

    fn verified(self) -> Result<Self> {
        let defect = self.velocity_defect(8);
        let scale = self.l.sqrt().max(1.0);
        if !(defect < 1e-8 * scale) {
            return Err(Error::InvalidArgument(format!(
                "orbit fails ds/dtau = q by {defect:e}; parameterization is inconsistent"
            )));
        }
        Ok(self)
    }
}

/// Order-8 central difference of `f'` at `x`.
pub fn central_difference_8(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    C.iter()
        .enumerate()
        .map(|(k, c)| {
            let d = (k + 1) as f64 * h;
            c * (f(x + d) - f(x - d))
        })
        .sum::<f64>()
        / h
}

/// Bound Poschl-Teller orbit of the default family.
pub fn pt_orbit(lambda: u32, l: f64) -> Result<ClassicalOrbit> {
    pt_orbit_with(lambda, l, OrbitFamily::Hamiltonian)
}

pub fn pt_orbit_with(lambda: u32, l: f64, family: OrbitFamily) -> Result<ClassicalOrbit> {
    let model = PotentialModel::poschl_teller(lambda)?;
    model.check_bound(l)?;
    let depth = model.depth().unwrap();
    let (shape, period) = match family {
        OrbitFamily::Hamiltonian => {
            let omega = (depth - l).sqrt();
            (
                Shape::Sinh {
                    a: (l / (depth - l)).sqrt(),
                    omega,
                },
                2.0 * PI / omega,
            )
        }
        OrbitFamily::Literal => (Shape::Sinh { a: 1.0 / l.sqrt(), omega: l }, 2.0 * PI / l),
    };
    ClassicalOrbit {
        model,
        l,
        period,
        shape,
        forward: true,
    }
    .verified()
}

/// Harmonic orbit with energy `H = l`: `s = sqrt(l)/omega sin(omega tau)`.
pub fn harmonic_orbit(omega2: f64, l: f64) -> Result<ClassicalOrbit> {
    let model = PotentialModel::harmonic(omega2)?;
    model.check_bound(l)?;
    let omega = omega2.sqrt();
    ClassicalOrbit {
        model,
        l,
        period: 2.0 * PI / omega,
        shape: Shape::Sine {
            a: l.sqrt() / omega,
            omega,
        },
        forward: true,
    }
    .verified()
}

/// Sampled numerical trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub tau: Vec<f64>,
    pub s: Vec<f64>,
    pub q: Vec<f64>,
}

impl Trajectory {
    pub fn end(&self) -> (f64, f64) {
        (*self.s.last().unwrap(), *self.q.last().unwrap())
    }
}

/// Fourth-order Forest-Ruth integration from `(s0, q0)` to `tau_end`, with
/// the step shrunk so that a whole number of steps of size at most `dt`
/// lands on `tau_end`.
pub fn integrate_orbit(model: &PotentialModel, s0: f64, q0: f64, tau_end: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0) || !(tau_end >= 0.0) {
        return Err(Error::InvalidArgument(format!("need dt > 0 and tau_end >= 0, got {dt}, {tau_end}")));
    }
    let theta = 1.0 / (2.0 - 2f64.cbrt());
    let n = ((tau_end / dt).ceil() as usize).max(1);
    let h = tau_end / n as f64;
    let drift = [0.5 * theta, 0.5 * (1.0 - theta), 0.5 * (1.0 - theta), 0.5 * theta];
    let kick = [theta, 1.0 - 2.0 * theta, theta];
    let force = |s: f64| -model.flow_derivative(1, s);

    let mut out = Trajectory {
        tau: Vec::with_capacity(n + 1),
        s: Vec::with_capacity(n + 1),
        q: Vec::with_capacity(n + 1),
    };
    let (mut s, mut q) = (s0, q0);
    out.tau.push(0.0);
    out.s.push(s);
    out.q.push(q);
    for step in 1..=n {
        for k in 0..3 {
            s += drift[k] * h * q;
            q += kick[k] * h * force(s);
        }
        s += drift[3] * h * q;
        out.tau.push(step as f64 * h);
        out.s.push(s);
        out.q.push(q);
    }
    Ok(out)
}

/// `∂_s (ds/dtau) + ∂_q (dq/dtau)` for the classical field, by jets.
pub fn classical_divergence(model: &PotentialModel, s: f64, q: f64) -> f64 {
    // ds/dtau = q is independent of s; dq/dtau = -U'(s)/2 is independent of q
    let vs = Jet::constant(q, 1);
    let vq = Jet::constant(-model.flow_derivative(1, s), 1);
    vs.derivative(1) + vq.derivative(1)
}
