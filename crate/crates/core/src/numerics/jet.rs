//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] of order `n` holds the Taylor coefficients `c_0..=c_n` of a
//! function about an expansion point, so `c_k = f^(k)(x0) / k!`. Binary
//! operations between jets of different order truncate to the smaller one.
//! Elementary functions are composed with the usual first-order recurrences
//! (`g' = h(f) f'`), which are exact up to rounding.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Jet { c }
    }

    /// The independent variable `x0 + t`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn from_coeffs(c: Vec<f64>) -> Self {
        assert!(!c.is_empty(), "a jet needs at least one coefficient");
        Jet { c }
    }

    pub fn zeros(order: usize) -> Self {
        Jet { c: vec![0.0; order + 1] }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    #[inline]
    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point, `k! c_k`.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut f = 1.0;
        for i in 2..=k {
            f *= i as f64;
        }
        self.coeff(k) * f
    }

    /// Jet of the derivative; the order drops by one.
    pub fn differentiate(&self) -> Jet {
        if self.c.len() == 1 {
            return Jet::zeros(0);
        }
        Jet {
            c: self.c[1..]
                .iter()
                .enumerate()
                .map(|(k, &v)| (k + 1) as f64 * v)
                .collect(),
        }
    }

    /// Divides by the local variable `t`, dropping the constant term.
    ///
    /// Only meaningful when the constant coefficient vanishes; the caller is
    /// responsible for that (it is checked loosely against `tol`).
    pub fn divide_by_variable(&self, tol: f64) -> Result<Jet> {
        if self.c.len() < 2 {
            return Err(Error::Singularity("cannot divide an order-0 jet by its variable"));
        }
        if self.c[0].abs() > tol {
            return Err(Error::Singularity("division by variable with nonzero constant term"));
        }
        Ok(Jet { c: self.c[1..].to_vec() })
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet {
            c: self.c[..=order.min(self.order())].to_vec(),
        }
    }

    /// Evaluates the Taylor polynomial at offset `t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
    }

    /// Value and first derivative of the Taylor polynomial at offset `t`.
    pub fn eval_with_slope(&self, t: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &v in self.c.iter().rev() {
            dp = dp * t + p;
            p = p * t + v;
        }
        (p, dp)
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet {
            c: self.c.iter().map(|v| v * k).collect(),
        }
    }

    pub fn add_scalar(&self, k: f64) -> Jet {
        let mut out = self.clone();
        out.c[0] += k;
        out
    }

    pub fn recip(&self) -> Result<Jet> {
        Jet::constant(1.0, self.order()).try_div(self)
    }

    pub fn try_div(&self, rhs: &Jet) -> Result<Jet> {
        let b0 = rhs.c[0];
        if b0 == 0.0 || !b0.is_finite() {
            return Err(Error::Singularity("division by a jet with zero constant term"));
        }
        let n = self.order().min(rhs.order());
        let mut out = vec![0.0; n + 1];
        for k in 0..=n {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= rhs.c[j] * out[k - j];
            }
            out[k] = acc / b0;
        }
        Ok(Jet { c: out })
    }

    pub fn powi(&self, mut n: u32) -> Jet {
        let mut base = self.clone();
        let mut acc = Jet::constant(1.0, self.order());
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut g = vec![0.0; n + 1];
        g[0] = self.c[0].exp();
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * g[k - j];
            }
            g[k] = acc / k as f64;
        }
        Jet { c: g }
    }

    pub fn ln(&self) -> Result<Jet> {
        let f0 = self.c[0];
        if f0 <= 0.0 {
            return Err(Error::Singularity("logarithm of a non-positive value"));
        }
        let n = self.order();
        let mut g = vec![0.0; n + 1];
        g[0] = f0.ln();
        for k in 1..=n {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= j as f64 / k as f64 * g[j] * self.c[k - j];
            }
            g[k] = acc / f0;
        }
        Ok(Jet { c: g })
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let f0 = self.c[0];
        if f0 <= 0.0 {
            return Err(Error::Singularity("square root at a non-positive value"));
        }
        let n = self.order();
        let mut g = vec![0.0; n + 1];
        g[0] = f0.sqrt();
        for k in 1..=n {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= g[j] * g[k - j];
            }
            g[k] = acc / (2.0 * g[0]);
        }
        Ok(Jet { c: g })
    }

    /// `(sin f, cos f)`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.order();
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        (s[0], c[0]) = self.c[0].sin_cos();
        for k in 1..=n {
            let (mut sa, mut ca) = (0.0, 0.0);
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                sa += w * c[k - j];
                ca -= w * s[k - j];
            }
            s[k] = sa / k as f64;
            c[k] = ca / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    /// `(sinh f, cosh f)`.
    pub fn sinh_cosh(&self) -> (Jet, Jet) {
        let n = self.order();
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        s[0] = self.c[0].sinh();
        c[0] = self.c[0].cosh();
        for k in 1..=n {
            let (mut sa, mut ca) = (0.0, 0.0);
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                sa += w * c[k - j];
                ca += w * s[k - j];
            }
            s[k] = sa / k as f64;
            c[k] = ca / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    pub fn sinh(&self) -> Jet {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Jet {
        self.sinh_cosh().1
    }

    pub fn tanh(&self) -> Jet {
        let (s, c) = self.sinh_cosh();
        // cosh never vanishes on the real line
        s.try_div(&c).expect("cosh is nonzero")
    }

    pub fn sech(&self) -> Jet {
        self.cosh().recip().expect("cosh is nonzero")
    }

    pub fn csch(&self) -> Result<Jet> {
        self.sinh()
            .recip()
            .map_err(|_| Error::Singularity("csch has a pole at 0"))
    }

    pub fn coth(&self) -> Result<Jet> {
        let (s, c) = self.sinh_cosh();
        c.try_div(&s)
            .map_err(|_| Error::Singularity("coth has a pole at 0"))
    }

    pub fn asinh(&self) -> Jet {
        let n = self.order();
        let root = (self * self)
            .add_scalar(1.0)
            .sqrt()
            .expect("1 + f^2 is positive");
        let slope = self.differentiate().try_div(&root.truncate(n.saturating_sub(1))).expect("root is positive");
        let mut g = vec![0.0; n + 1];
        g[0] = self.c[0].asinh();
        for k in 1..=n {
            g[k] = slope.coeff(k - 1) / k as f64;
        }
        Jet { c: g }
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet {
            c: (0..=n).map(|k| self.c[k] + rhs.c[k]).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet {
            c: (0..=n).map(|k| self.c[k] - rhs.c[k]).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        let mut out = vec![0.0; n + 1];
        for (i, &a) in self.c[..=n].iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.c[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet { c: out }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Taylor jet of `f` about `x0`, where `f` is written over [`Jet`] operations.
///
/// ```
/// use wigner_flow::numerics::jet_eval;
/// let j = jet_eval(|x| Ok(x.sin()), 0.0, 3).unwrap();
/// assert!((j.coeff(3) + 1.0 / 6.0).abs() < 1e-15);
/// ```
pub fn jet_eval<F>(f: F, x0: f64, order: usize) -> Result<Jet>
where
    F: FnOnce(&Jet) -> Result<Jet>,
{
    f(&Jet::variable(x0, order))
}
