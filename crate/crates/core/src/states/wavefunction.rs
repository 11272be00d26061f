//! Sampled wavefunctions and their Weyl transform.
//!
//! File format: one sample per line, `s  Re(psi)  Im(psi)`, whitespace
//! separated, strictly increasing uniform `s`; `#` starts a comment line.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use super::spline::UniformSpline;
use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;

/// Gauss points per sub-interval in the knot-aligned rules.
const KNOT_POINTS: usize = 6;
/// Imaginary part of a Weyl transform above this is reported as an error.
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Wavefunction {
    s0: f64,
    ds: f64,
    samples: Vec<Complex64>,
    re: UniformSpline,
    im: UniformSpline,
    input_norm: f64,
}

impl Wavefunction {
    /// Samples on the uniform grid `s0 + i ds`; normalized on construction.
    pub fn new(s0: f64, ds: f64, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::InvalidArgument("a wavefunction needs at least 4 samples".into()));
        }
        if !(ds > 0.0) || !ds.is_finite() || !s0.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid grid start {s0} / spacing {ds}")));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("wavefunction samples must be finite".into()));
        }
        let raw = Self::build(s0, ds, samples);
        let norm2 = raw.norm_squared();
        if !(norm2 > 0.0) {
            return Err(Error::InvalidArgument("wavefunction has zero norm".into()));
        }
        let scale = 1.0 / norm2.sqrt();
        let mut out = Self::build(s0, ds, raw.samples.iter().map(|z| z * scale).collect());
        out.input_norm = norm2.sqrt();
        Ok(out)
    }

    fn build(s0: f64, ds: f64, samples: Vec<Complex64>) -> Self {
        let re = UniformSpline::new(s0, ds, samples.iter().map(|z| z.re).collect());
        let im = UniformSpline::new(s0, ds, samples.iter().map(|z| z.im).collect());
        Wavefunction {
            s0,
            ds,
            samples,
            re,
            im,
            input_norm: 1.0,
        }
    }

    /// Samples `f` at `n` uniform points on `[s_min, s_max]`.
    pub fn from_fn(s_min: f64, s_max: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if !(s_min < s_max) || n < 4 {
            return Err(Error::InvalidArgument(format!(
                "need s_min < s_max and at least 4 points, got [{s_min}, {s_max}] with {n}"
            )));
        }
        let ds = (s_max - s_min) / (n - 1) as f64;
        Self::new(s_min, ds, (0..n).map(|i| f(s_min + i as f64 * ds)).collect())
    }

    pub fn from_real_fn(s_min: f64, s_max: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(s_min, s_max, n, |s| Complex64::new(f(s), 0.0))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Vec::new();
        let mut psi = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected 3 columns, found {}", cols.len()),
                });
            }
            let mut v = [0.0; 3];
            for (k, c) in cols.iter().enumerate() {
                v[k] = c.parse().map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("bad number {c:?}: {e}"),
                })?;
            }
            if let Some(&prev) = s.last() {
                if !(v[0] > prev) {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("s must be strictly increasing ({} after {prev})", v[0]),
                    });
                }
            }
            s.push(v[0]);
            psi.push(Complex64::new(v[1], v[2]));
        }
        if s.len() < 4 {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: "need at least 4 samples".into(),
            });
        }
        let ds = (s[s.len() - 1] - s[0]) / (s.len() - 1) as f64;
        for (i, &x) in s.iter().enumerate() {
            let want = s[0] + i as f64 * ds;
            if (x - want).abs() > 1e-6 * ds {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("grid is not uniform: s = {x}, expected {want}"),
                });
            }
        }
        Self::new(s[0], ds, psi)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn s_min(&self) -> f64 {
        self.s0
    }

    pub fn s_max(&self) -> f64 {
        self.s0 + (self.samples.len() - 1) as f64 * self.ds
    }

    pub fn spacing(&self) -> f64 {
        self.ds
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Norm of the samples as supplied, before normalization.
    pub fn input_norm(&self) -> f64 {
        self.input_norm
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        Complex64::new(self.re.eval(x), self.im.eval(x))
    }

    pub fn eval_with_derivative(&self, x: f64) -> (Complex64, Complex64) {
        let (a, da) = self.re.eval_with_derivative(x);
        let (b, db) = self.im.eval_with_derivative(x);
        (Complex64::new(a, b), Complex64::new(da, db))
    }

    fn knot_rule(&self) -> &'static GaussLegendre {
        static RULE: std::sync::OnceLock<GaussLegendre> = std::sync::OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(KNOT_POINTS))
    }

    /// Integral of `f` over each knot interval of the grid.
    fn integrate_knots(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let gl = self.knot_rule();
        let half = 0.5 * self.ds;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.samples.len() - 1 {
            let mid = self.s0 + (i as f64 + 0.5) * self.ds;
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                acc += f(mid + half * x) * (half * w);
            }
        }
        acc
    }

    pub fn norm_squared(&self) -> f64 {
        self.integrate_knots(|x| Complex64::new(self.eval(x).norm_sqr(), 0.0)).re
    }

    /// `psi(s - y) conj(psi(s + y))`.
    pub fn rho(&self, s: f64, y: f64) -> Complex64 {
        self.eval(s - y) * self.eval(s + y).conj()
    }

    /// `d/ds [psi(s - y) conj(psi(s + y))]`.
    pub fn rho_ds(&self, s: f64, y: f64) -> Complex64 {
        let (a, da) = self.eval_with_derivative(s - y);
        let (b, db) = self.eval_with_derivative(s + y);
        da * b.conj() + a * db.conj()
    }

    /// Largest `y` with both `s - y` and `s + y` on the grid.
    pub fn y_extent(&self, s: f64) -> f64 {
        (s - self.s_min()).min(self.s_max() - s).max(0.0)
    }

    /// Breakpoints on `[0, y_extent(s)]` where `s - y` or `s + y` crosses a
    /// knot; between them the integrand of the Weyl transform is a smooth
    /// polynomial times a phase.
    pub fn breakpoints(&self, s: f64) -> Vec<f64> {
        let ymax = self.y_extent(s);
        let mut out = vec![0.0, ymax];
        if ymax > 0.0 {
            for i in 0..self.samples.len() {
                let y = (s - (self.s0 + i as f64 * self.ds)).abs();
                if y > 0.0 && y < ymax {
                    out.push(y);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * self.ds);
        out
    }

    /// `∫_{-Y}^{Y} f(y) dy` on the knot-aligned rule for centre `s`, for `N`
    /// integrands at once. Both halves are summed explicitly (no symmetry is
    /// assumed) so asymmetries stay visible in the imaginary part.
    pub fn integrate_y<const N: usize>(&self, s: f64, f: impl Fn(f64) -> [Complex64; N]) -> [Complex64; N] {
        let gl = self.knot_rule();
        let breaks = self.breakpoints(s);
        let mut acc = [Complex64::new(0.0, 0.0); N];
        for pair in breaks.windows(2) {
            let (mid, half) = (0.5 * (pair[0] + pair[1]), 0.5 * (pair[1] - pair[0]));
            if half <= 0.0 {
                continue;
            }
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                let y = mid + half * x;
                let (a, b) = (f(y), f(-y));
                for k in 0..N {
                    acc[k] += (a[k] + b[k]) * (half * w);
                }
            }
        }
        acc
    }

    /// `(2 pi)^{-1/2} ∫ psi(s) e^{-ips} ds`.
    pub fn momentum(&self, p: f64) -> Complex64 {
        self.integrate_knots(|s| self.eval(s) * Complex64::new(0.0, -p * s).exp()) / (2.0 * PI).sqrt()
    }

    /// `(1/pi) ∫ dy (2iy)^j e^{2iqy} rho(s, y)` for `j = 0..=n`, real parts,
    /// after checking the imaginary residue.
    pub fn weyl_q_derivatives(&self, s: f64, q: f64, n: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let [z] = self.integrate_y(s, |y| {
                let phase = Complex64::new(0.0, 2.0 * q * y).exp();
                [Complex64::new(0.0, 2.0 * y).powu(j as u32) * phase * self.rho(s, y)]
            });
            let z = z / PI;
            check_residue(s, q, z)?;
            out.push(z.re);
        }
        Ok(out)
    }

    /// `(W, ∂_s W, ∂_q W)` in one pass.
    pub fn weyl_gradient(&self, s: f64, q: f64) -> Result<(f64, f64, f64)> {
        let [w, ws, wq] = self.integrate_y(s, |y| {
            let phase = Complex64::new(0.0, 2.0 * q * y).exp();
            let r = phase * self.rho(s, y);
            [r, phase * self.rho_ds(s, y), Complex64::new(0.0, 2.0 * y) * r]
        });
        for z in [w, ws, wq] {
            check_residue(s, q, z / PI)?;
        }
        Ok((w.re / PI, ws.re / PI, wq.re / PI))
    }
}

fn check_residue(s: f64, q: f64, z: Complex64) -> Result<()> {
    if z.im.abs() > IMAGINARY_TOLERANCE {
        return Err(Error::ImaginaryResidue { s, q, residue: z.im });
    }
    Ok(())
}

/// `W(s, q) = (1/pi) ∫ dy e^{2iqy} psi(s - y) conj(psi(s + y))`.
pub fn wigner_from_wavefunction(psi: &Wavefunction, s: f64, q: f64) -> Result<f64> {
    Ok(psi.weyl_q_derivatives(s, q, 0)?[0])
}
