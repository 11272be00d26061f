//! Closed-form Wigner function of the Poschl-Teller ground state.
//!
//! `W = C D^(lambda-1) f` with `D = -(1/sinh 2s) d/ds` and
//! `f = sin(2qs) / (sinh 2s sinh(pi q))`. Write
//! `f = R(s) sinc(2qs) B(q)` with `R = 2s/sinh 2s` and `B = q csch(pi q)`;
//! then `d_q^i [R sinc(2qs)] = R (2s)^i sinc^(i)(2qs)` and the q-derivatives of
//! `W` follow from the Leibniz rule, with `D` acting on each s-factor.
//!
//! Removable singularities: for `|s| < 0.25` the s-factors are expanded in
//! Taylor series about 0 and `D` acts on the series (differentiate, divide by
//! s); for `|q| < 0.5` `B` comes from its Taylor series about 0.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::special::{binomial_table, factorial, sinc_derivatives};
use crate::numerics::Jet;

const S_SERIES: f64 = 0.25;
const Q_SERIES: f64 = 0.5;
/// Beyond these W is far below the smallest normal double.
pub const S_TAIL: f64 = 300.0;
pub const Q_TAIL: f64 = 80.0;
/// Highest q-derivative order supported.
pub const MAX_Q_ORDER: usize = 40;
const B_SERIES_ORDER: usize = 260;
const R_SERIES_ORDER: usize = 420;

#[derive(Clone, Debug, PartialEq)]
pub struct PtGround {
    lambda: u32,
    /// Prefactor of `D^(lambda-1) f`.
    prefactor: f64,
    /// Squared normalization of `psi = N sech^lambda s`.
    psi_norm2: f64,
}

/// `∂_q^j W` for `j = 0..=n` and, alongside, `∂_s ∂_q^j W`.
#[derive(Clone, Debug, PartialEq)]
pub struct PtDerivatives {
    pub dq: Vec<f64>,
    pub ds_dq: Vec<f64>,
}

impl PtGround {
    pub fn new(lambda: u32) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::InvalidArgument("lambda must be a positive integer".into()));
        }
        let l = lambda as usize;
        // N^2 = Gamma(l + 1/2) / (sqrt(pi) Gamma(l)) = (2l)! / (4^l l! (l-1)!)
        let psi_norm2 = factorial(2 * l) / (4f64.powi(lambda as i32) * factorial(l) * factorial(l - 1));
        Ok(PtGround {
            lambda,
            prefactor: 2.0 * psi_norm2 / factorial(l - 1),
            psi_norm2,
        })
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn psi_norm2(&self) -> f64 {
        self.psi_norm2
    }

    /// Ground-state wavefunction `N sech^lambda s`.
    pub fn psi(&self, s: f64) -> f64 {
        self.psi_norm2.sqrt() * sech(s).powi(self.lambda as i32)
    }

    /// `psi(s - y) psi(s + y)`.
    pub fn rho(&self, s: f64, y: f64) -> f64 {
        self.psi_norm2 * (sech(s - y) * sech(s + y)).powi(self.lambda as i32)
    }

    /// Half-width in y beyond which `rho` is below ~1e-19 of its peak.
    pub fn y_extent(&self) -> f64 {
        22.0 / self.lambda as f64 + 2.0
    }

    pub fn value(&self, s: f64, q: f64) -> Result<f64> {
        Ok(self.derivatives(s, q, 0)?.dq[0])
    }

    /// q-derivatives up to order `n` together with their s-derivatives.
    pub fn derivatives(&self, s: f64, q: f64, n: usize) -> Result<PtDerivatives> {
        if n > MAX_Q_ORDER {
            return Err(Error::InvalidArgument(format!(
                "q-derivative order {n} exceeds the supported maximum {MAX_Q_ORDER}"
            )));
        }
        if !s.is_finite() || !q.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite point ({s}, {q})")));
        }
        let (sa, qa) = (s.abs(), q.abs());
        if sa > S_TAIL || qa > Q_TAIL {
            return Ok(PtDerivatives {
                dq: vec![0.0; n + 1],
                ds_dq: vec![0.0; n + 1],
            });
        }
        let b = b_derivatives(qa, n)?;
        let h = if sa < S_SERIES {
            self.s_factors_series(sa, qa, n)?
        } else {
            self.s_factors_direct(sa, qa, n)?
        };
        let binom = binomial_table(n);
        let mut dq = vec![0.0; n + 1];
        let mut ds_dq = vec![0.0; n + 1];
        for j in 0..=n {
            let (mut v, mut d) = (0.0, 0.0);
            for i in 0..=j {
                let w = binom[j][i] * b[j - i];
                v += w * h[i].0;
                d += w * h[i].1;
            }
            // W is even in s and q
            let qsign = if q < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
            let ssign = if s < 0.0 { -1.0 } else { 1.0 };
            dq[j] = self.prefactor * v * qsign;
            ds_dq[j] = self.prefactor * d * qsign * ssign;
        }
        Ok(PtDerivatives { dq, ds_dq })
    }

    /// `(D^(lambda-1) G_i, d/ds of it)` at `s >= 0.25`, with
    /// `G_i = R(s) (2s)^i sinc^(i)(2qs)`.
    fn s_factors_direct(&self, s: f64, q: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        let m = self.lambda as usize;
        let sinc = sinc_derivatives(2.0 * q * s, n + m);
        let two_s = Jet::variable(s, m).scale(2.0);
        let r = two_s.try_div(&two_s.sinh())?;
        let csch2 = two_s.csch()?;
        let mut pow = Jet::constant(1.0, m);
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut sc = vec![0.0; m + 1];
            let mut a = 1.0;
            for (k, slot) in sc.iter_mut().enumerate() {
                *slot = a * sinc[i + k];
                a *= 2.0 * q / (k + 1) as f64;
            }
            let mut g = &(&r * &pow) * &Jet::from_coeffs(sc);
            for _ in 1..m {
                let dg = g.differentiate();
                g = -(&csch2.truncate(dg.order()) * &dg);
            }
            out.push((g.coeff(0), g.coeff(1)));
            pow = &pow * &two_s;
        }
        Ok(out)
    }

    /// Same as [`Self::s_factors_direct`] from Taylor series about `s = 0`.
    fn s_factors_series(&self, s: f64, q: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        let steps = self.lambda as usize - 1;
        let order = 30 + 2 * steps + (2.0 * q).ceil() as usize;
        let r0 = r_series(order);
        let half_r0 = r0.scale(0.5);
        let sinc0 = sinc_at_zero(n + order);
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            // (2 sigma)^i sinc^(i)(2 q sigma) as a series in sigma
            let mut c = vec![0.0; order + 1];
            let mut a = 2f64.powi(i as i32);
            for k in 0..=order - i {
                c[k + i] = a * sinc0[i + k];
                a *= 2.0 * q / (k + 1) as f64;
            }
            let mut g = &r0 * &Jet::from_coeffs(c);
            for _ in 0..steps {
                let dg = g.differentiate();
                let scale = dg.coeffs().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                let quot = dg.divide_by_variable(1e-12 * scale.max(1e-300))?;
                g = -(&half_r0.truncate(quot.order()) * &quot);
            }
            out.push(g.eval_with_slope(s));
        }
        Ok(out)
    }
}

fn sech(x: f64) -> f64 {
    let c = x.cosh();
    if c.is_finite() {
        1.0 / c
    } else {
        0.0
    }
}

/// `sinc^(k)(0)`: zero for odd k, `(-1)^(k/2) / (k + 1)` for even k.
fn sinc_at_zero(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            if k % 2 == 1 {
                0.0
            } else if k % 4 == 0 {
                1.0 / (k + 1) as f64
            } else {
                -1.0 / (k + 1) as f64
            }
        })
        .collect()
}

/// Taylor series of `2s / sinh 2s` about 0, truncated to `order`.
fn r_series(order: usize) -> Jet {
    static SERIES: OnceLock<Jet> = OnceLock::new();
    let full = SERIES.get_or_init(|| {
        // sinh(2s)/(2s) = sum_k (2s)^(2k) / (2k+1)!
        let mut c = vec![0.0; R_SERIES_ORDER + 1];
        let mut term = 1.0;
        for k in (0..=R_SERIES_ORDER).step_by(2) {
            c[k] = term;
            term *= 4.0 / ((k + 2) as f64 * (k + 3) as f64);
        }
        Jet::from_coeffs(c).recip().expect("series starts at 1")
    });
    full.truncate(order.min(R_SERIES_ORDER))
}

/// Rows `d[m][k] = b_k k!/(k-m)!` of the derivatives of `q csch(pi q)` about 0.
fn b_series_table() -> &'static Vec<Vec<f64>> {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // sinh(pi q)/q = sum_k pi^(2k+1) q^(2k) / (2k+1)!
        let mut c = vec![0.0; B_SERIES_ORDER + 1];
        let mut term = PI;
        for k in (0..=B_SERIES_ORDER).step_by(2) {
            c[k] = term;
            term *= PI * PI / ((k + 2) as f64 * (k + 3) as f64);
        }
        let b = Jet::from_coeffs(c).recip().expect("series starts at pi");
        let mut rows = vec![b.coeffs().to_vec()];
        for m in 1..=MAX_Q_ORDER {
            let prev = &rows[m - 1];
            let row: Vec<f64> = (0..=B_SERIES_ORDER)
                .map(|k| if k < m { 0.0 } else { prev[k] * (k - m + 1) as f64 })
                .collect();
            rows.push(row);
        }
        rows
    })
}

/// `d^m/dq^m [q csch(pi q)]` for `m = 0..=n` at `q >= 0`.
pub fn b_derivatives(q: f64, n: usize) -> Result<Vec<f64>> {
    if q > Q_TAIL {
        return Ok(vec![0.0; n + 1]);
    }
    if q < Q_SERIES {
        let table = b_series_table();
        return Ok((0..=n)
            .map(|m| {
                let row = &table[m];
                (m..=B_SERIES_ORDER).rev().fold(0.0, |acc, k| acc * q + row[k])
            })
            .collect());
    }
    let x = Jet::variable(q, n);
    let b = &x * &x.scale(PI).csch()?;
    Ok((0..=n).map(|m| b.derivative(m)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefactors() {
        let p1 = PtGround::new(1).unwrap();
        assert_eq!(p1.prefactor(), 1.0);
        assert_eq!(p1.psi_norm2(), 0.5);
        let p2 = PtGround::new(2).unwrap();
        assert_eq!(p2.prefactor(), 1.5);
        assert_eq!(p2.psi_norm2(), 0.75);
        assert!(PtGround::new(0).is_err());
    }

    #[test]
    fn origin_and_axis_values() {
        let p = PtGround::new(1).unwrap();
        assert!((p.value(0.0, 0.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((p.value(0.0, 1.0).unwrap() - 1.0 / PI.sinh()).abs() < 1e-15);
    }

    #[test]
    fn lambda_one_matches_direct_formula() {
        let p = PtGround::new(1).unwrap();
        for &(s, q) in &[(0.3f64, 0.7f64), (1.2, -0.4), (-2.5, 1.9), (0.26, 3.0), (4.0, 0.6)] {
            let direct = (2.0 * q * s).sin() / ((2.0 * s).sinh() * (PI * q).sinh());
            let w = p.value(s, q).unwrap();
            assert!((w - direct).abs() < 1e-14, "({s}, {q}): {w} vs {direct}");
        }
    }

    #[test]
    fn branches_are_continuous() {
        for lambda in 1..=3 {
            let p = PtGround::new(lambda).unwrap();
            for &q in &[0.0, 0.3, 0.49999, 0.5, 1.7, 6.0] {
                let a = p.derivatives(S_SERIES * (1.0 - 1e-12), q, 6).unwrap();
                let b = p.derivatives(S_SERIES, q, 6).unwrap();
                for j in 0..=6 {
                    let scale = a.dq[j].abs().max(1.0);
                    assert!((a.dq[j] - b.dq[j]).abs() < 1e-10 * scale, "lambda {lambda} q {q} j {j}");
                    let scale = a.ds_dq[j].abs().max(1.0);
                    assert!((a.ds_dq[j] - b.ds_dq[j]).abs() < 1e-9 * scale, "lambda {lambda} q {q} j {j} ds");
                }
            }
        }
        for m in [0usize, 3, 8] {
            let lo = b_derivatives(Q_SERIES * (1.0 - 1e-13), 10).unwrap();
            let hi = b_derivatives(Q_SERIES, 10).unwrap();
            assert!((lo[m] - hi[m]).abs() < 1e-11 * hi[m].abs().max(1.0));
        }
    }

    #[test]
    fn tails_vanish() {
        let p = PtGround::new(2).unwrap();
        assert_eq!(p.value(400.0, 0.1).unwrap(), 0.0);
        assert_eq!(p.value(0.1, -90.0).unwrap(), 0.0);
        assert!(p.derivatives(0.0, 0.0, MAX_Q_ORDER + 1).is_err());
    }

    #[test]
    fn symmetry_is_exact() {
        let p = PtGround::new(2).unwrap();
        for &(s, q) in &[(0.1, 0.2), (0.9, 1.4), (2.2, 0.05)] {
            let d = p.derivatives(s, q, 3).unwrap();
            let m = p.derivatives(-s, -q, 3).unwrap();
            for j in 0..=3 {
                let sq = if j % 2 == 1 { -1.0 } else { 1.0 };
                assert_eq!(m.dq[j], sq * d.dq[j]);
                assert_eq!(m.ds_dq[j], -sq * d.ds_dq[j]);
            }
        }
    }
}
