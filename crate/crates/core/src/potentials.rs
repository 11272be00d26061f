//! Dimensionless potentials `U(s)` with exact derivatives.
//!
//! `H = q^2 + U(s)`. The flow uses `U~ = U/2` (see [`PotentialModel::flow_derivative`]).

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::Jet;

/// Highest order for which the integer tanh polynomials are tabulated; they
/// stay inside `i128` up to order 31.
pub const MAX_EXACT_ORDER: usize = 30;

/// `d^n/ds^n sech^2 s = sech^2 s * P_n(tanh s)`, with integer coefficients in
/// ascending powers of `t = tanh s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TanhPolynomial {
    pub coeffs: Vec<i128>,
}

impl TanhPolynomial {
    pub fn one() -> Self {
        TanhPolynomial { coeffs: vec![1] }
    }

    /// `P_{n+1}(t) = -2t P_n(t) + (1 - t^2) P_n'(t)`; `None` on overflow.
    pub fn next(&self) -> Option<Self> {
        let mut out = vec![0i128; self.coeffs.len() + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i + 1] = out[i + 1].checked_sub(c.checked_mul(2)?)?;
            if i > 0 {
                let ic = c.checked_mul(i as i128)?;
                out[i - 1] = out[i - 1].checked_add(ic)?;
                out[i + 1] = out[i + 1].checked_sub(ic)?;
            }
        }
        while out.len() > 1 && *out.last().unwrap() == 0 {
            out.pop();
        }
        Some(TanhPolynomial { coeffs: out })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c as f64)
    }

    /// Parity of the polynomial (that of its derivative order).
    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(|&c| c == 0)
    }

    /// All polynomials `P_0..=P_MAX_EXACT_ORDER`, built once.
    pub fn table() -> &'static [TanhPolynomial] {
        &tables().0
    }
}

/// The same derivatives written as `sech^2 s * tanh^p s * R_n(sech^2 s)`,
/// `p = n mod 2`. Near `|tanh s| = 1` Horner in `t` cancels badly; in
/// `x = sech^2 s` the polynomial is well conditioned. With `x' = -2xt`:
/// even n gives `R_{n+1} = -2(R + xR')`, odd n gives
/// `R_{n+1} = (3x - 2)R - 2x(1 - x)R'`.
fn next_in_sech2(r: &[i128], odd: bool) -> Option<Vec<i128>> {
    let mut out = vec![0i128; r.len() + 1];
    for (i, &c) in r.iter().enumerate() {
        let ic = c.checked_mul(i as i128)?;
        if odd {
            // (3x - 2) c x^i - 2 (x - x^2) i c x^(i-1)
            out[i + 1] = out[i + 1].checked_add(c.checked_mul(3)?)?.checked_add(ic.checked_mul(2)?)?;
            out[i] = out[i].checked_sub(c.checked_mul(2)?)?.checked_sub(ic.checked_mul(2)?)?;
        } else {
            out[i] = out[i].checked_sub(c.checked_mul(2)?)?.checked_sub(ic.checked_mul(2)?)?;
        }
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    Some(out)
}

type Tables = (Vec<TanhPolynomial>, Vec<Vec<i128>>);

fn tables() -> &'static Tables {
    static TABLE: OnceLock<Tables> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = vec![TanhPolynomial::one()];
        for n in 0..MAX_EXACT_ORDER {
            let next = v[n].next().expect("tanh polynomial overflow below the tabulated order");
            v.push(next);
        }
        let mut shifted = vec![vec![1i128]];
        for n in 0..MAX_EXACT_ORDER {
            let next = next_in_sech2(&shifted[n], n % 2 == 1).expect("sech^2 form overflow below the tabulated order");
            shifted.push(next);
        }
        (v, shifted)
    })
}

/// n-th derivative of `sech^2` at `s`.
pub fn sech2_derivative(n: usize, s: f64) -> f64 {
    let sech = 1.0 / s.cosh();
    let sech2 = if sech.is_finite() { sech * sech } else { 0.0 };
    if sech2 == 0.0 {
        return 0.0;
    }
    if n <= MAX_EXACT_ORDER {
        let t = s.tanh();
        if t * t < 0.3 {
            sech2 * tables().0[n].eval(t)
        } else {
            let r = tables().1[n].iter().rev().fold(0.0, |acc, &c| acc * sech2 + c as f64);
            let odd = if n % 2 == 1 { t } else { 1.0 };
            sech2 * odd * r
        }
    } else {
        let x = Jet::variable(s, n);
        let sh = x.sech();
        (&sh * &sh).derivative(n)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialModel {
    /// `U = -lambda (lambda + 1) sech^2 s`.
    PoschlTeller { lambda: u32 },
    /// `U = omega2 s^2`.
    Harmonic { omega2: f64 },
    /// `U = sum_k c_k s^k`.
    Polynomial { coeffs: Vec<f64> },
}

impl PotentialModel {
    pub fn poschl_teller(lambda: u32) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::InvalidArgument("lambda must be a positive integer".into()));
        }
        Ok(PotentialModel::PoschlTeller { lambda })
    }

    pub fn harmonic(omega2: f64) -> Result<Self> {
        if !(omega2 > 0.0) || !omega2.is_finite() {
            return Err(Error::InvalidArgument(format!("omega^2 must be positive, got {omega2}")));
        }
        Ok(PotentialModel::Harmonic { omega2 })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        PotentialModel::Polynomial { coeffs }
    }

    /// `lambda (lambda + 1)` for Poschl-Teller.
    pub fn depth(&self) -> Option<f64> {
        match self {
            PotentialModel::PoschlTeller { lambda } => {
                let l = *lambda as f64;
                Some(l * (l + 1.0))
            }
            _ => None,
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.derivative(0, s)
    }

    /// Exact n-th derivative of `U` at `s`.
    pub fn derivative(&self, n: usize, s: f64) -> f64 {
        match self {
            PotentialModel::PoschlTeller { .. } => -self.depth().unwrap() * sech2_derivative(n, s),
            PotentialModel::Harmonic { omega2 } => match n {
                0 => omega2 * s * s,
                1 => 2.0 * omega2 * s,
                2 => 2.0 * omega2,
                _ => 0.0,
            },
            PotentialModel::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for k in (n..coeffs.len()).rev() {
                    let falling = ((k - n + 1)..=k).fold(1.0, |f, j| f * j as f64);
                    acc = acc * s + coeffs[k] * falling;
                }
                acc
            }
        }
    }

    /// n-th derivative of the flow potential `U~ = U/2`.
    pub fn flow_derivative(&self, n: usize, s: f64) -> f64 {
        0.5 * self.derivative(n, s)
    }

    pub fn flow_value(&self, s: f64) -> f64 {
        0.5 * self.value(s)
    }

    pub fn hamiltonian_value(&self, s: f64, q: f64) -> f64 {
        q * q + self.value(s)
    }

    /// Whether every derivative above the second vanishes, so the quantum
    /// correction to the flow is identically zero.
    pub fn is_quadratic(&self) -> bool {
        match self {
            PotentialModel::PoschlTeller { .. } => false,
            PotentialModel::Harmonic { .. } => true,
            PotentialModel::Polynomial { coeffs } => coeffs.iter().skip(3).all(|&c| c == 0.0),
        }
    }

    pub fn is_even(&self) -> bool {
        match self {
            PotentialModel::PoschlTeller { .. } | PotentialModel::Harmonic { .. } => true,
            PotentialModel::Polynomial { coeffs } => coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0),
        }
    }

    /// Open interval of the energy parameter `l` with bound periodic motion.
    pub fn bound_window(&self) -> Option<(f64, f64)> {
        match self {
            PotentialModel::PoschlTeller { .. } => Some((0.0, self.depth().unwrap())),
            PotentialModel::Harmonic { .. } => Some((0.0, f64::INFINITY)),
            PotentialModel::Polynomial { .. } => None,
        }
    }

    pub fn check_bound(&self, l: f64) -> Result<()> {
        if let Some((lo, hi)) = self.bound_window() {
            if !(l > lo && l < hi) {
                return Err(Error::OutsideBoundWindow { l, lo, hi });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_tanh_polynomials() {
        let t = TanhPolynomial::table();
        assert_eq!(t[1].coeffs, vec![0, -2]);
        assert_eq!(t[2].coeffs, vec![-2, 0, 6]);
        assert_eq!(t[3].coeffs, vec![0, 16, 0, -24]);
        for (n, p) in t.iter().enumerate() {
            // parity of P_n matches parity of n
            for (i, &c) in p.coeffs.iter().enumerate() {
                assert!(c == 0 || i % 2 == n % 2, "n = {n}, i = {i}");
            }
        }
    }

    #[test]
    fn tabulation_stops_before_overflow() {
        let t = TanhPolynomial::table();
        assert_eq!(t.len(), MAX_EXACT_ORDER + 1);
        assert!(t[MAX_EXACT_ORDER].next().is_some());
    }

    #[test]
    fn pt_examples() {
        let pt = PotentialModel::poschl_teller(1).unwrap();
        assert_eq!(pt.derivative(0, 0.0), -2.0);
        assert_eq!(pt.derivative(3, 0.0), 0.0);
        assert_eq!(pt.derivative(2, 0.0), 4.0);
        assert_eq!(pt.hamiltonian_value(0.0, 1.0), -1.0);
        let pt2 = PotentialModel::poschl_teller(2).unwrap();
        assert!((pt2.hamiltonian_value(0.0, 2f64.sqrt()) + 4.0).abs() < 1e-15);
        let ho = PotentialModel::harmonic(1.0).unwrap();
        assert_eq!(ho.hamiltonian_value(3.0, 4.0), 25.0);
    }

    #[test]
    fn jet_fallback_matches_table() {
        for &s in &[0.0, 0.4, 0.88, 0.89, -1.3, 2.2, 6.0] {
            for n in [5usize, 12, 20] {
                let x = Jet::variable(s, n);
                let sh = x.sech();
                let jet = (&sh * &sh).derivative(n);
                let exact = sech2_derivative(n, s);
                assert!((jet - exact).abs() <= 1e-10 * exact.abs().max(1.0), "n = {n}, s = {s}: {jet:e} vs {exact:e}");
            }
        }
    }

    #[test]
    fn polynomial_derivatives() {
        let p = PotentialModel::polynomial(vec![1.0, -2.0, 0.5, 3.0]);
        assert_eq!(p.derivative(0, 2.0), 1.0 - 4.0 + 2.0 + 24.0);
        assert_eq!(p.derivative(1, 2.0), -2.0 + 2.0 + 36.0);
        assert_eq!(p.derivative(3, 2.0), 18.0);
        assert_eq!(p.derivative(4, 2.0), 0.0);
        assert!(!p.is_quadratic());
    }

    #[test]
    fn bound_window() {
        let pt = PotentialModel::poschl_teller(1).unwrap();
        assert!(pt.check_bound(1.0).is_ok());
        assert_eq!(
            pt.check_bound(2.5),
            Err(Error::OutsideBoundWindow { l: 2.5, lo: 0.0, hi: 2.0 })
        );
        assert!(pt.check_bound(0.0).is_err());
    }

    #[test]
    fn far_tail_is_zero_not_nan() {
        let pt = PotentialModel::poschl_teller(3).unwrap();
        assert_eq!(pt.derivative(7, 800.0), 0.0);
    }
}
