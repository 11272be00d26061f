use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Ground state of `H = q^2 + omega^2 s^2`:
/// `W = (1/pi) exp(-omega s^2 - q^2/omega)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicGround {
    omega: f64,
}

impl HarmonicGround {
    pub fn new(omega2: f64) -> Result<Self> {
        if !(omega2 > 0.0) || !omega2.is_finite() {
            return Err(Error::InvalidArgument(format!("omega^2 must be positive, got {omega2}")));
        }
        Ok(HarmonicGround { omega: omega2.sqrt() })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn value(&self, s: f64, q: f64) -> f64 {
        (-self.omega * s * s - q * q / self.omega).exp() / PI
    }

    /// `∂_q^j W`, `j = 0..=n`, via physicists' Hermite polynomials:
    /// `d^j/dq^j e^{-u^2} = (-1)^j omega^{-j/2} H_j(u) e^{-u^2}`, `u = q/sqrt(omega)`.
    pub fn q_derivatives(&self, s: f64, q: f64, n: usize) -> Vec<f64> {
        let w = self.value(s, q);
        let root = self.omega.sqrt();
        let u = q / root;
        let mut out = Vec::with_capacity(n + 1);
        let (mut h0, mut h1) = (1.0, 2.0 * u);
        let mut scale = 1.0;
        for j in 0..=n {
            let hj = if j == 0 { h0 } else { h1 };
            out.push(scale * hj * w);
            scale *= -1.0 / root;
            if j >= 1 {
                let h2 = 2.0 * u * h1 - 2.0 * j as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
        }
        out
    }

    pub fn s_derivative(&self, s: f64, q: f64) -> f64 {
        -2.0 * self.omega * s * self.value(s, q)
    }

    /// `psi(s - y) psi(s + y)` with `psi = (omega/pi)^{1/4} exp(-omega s^2 / 2)`.
    pub fn rho(&self, s: f64, y: f64) -> f64 {
        (self.omega / PI).sqrt() * (-self.omega * (s * s + y * y)).exp()
    }

    pub fn y_extent(&self) -> f64 {
        (45.0 / self.omega).sqrt()
    }
}
