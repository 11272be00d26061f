//! Natural cubic spline on a uniform grid.

#[derive(Clone, Debug)]
pub struct UniformSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl UniformSpline {
    /// Requires at least two samples and `h > 0`.
    pub fn new(x0: f64, h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        assert!(n >= 2 && h > 0.0);
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i-1} - 2 y_i + y_{i+1}) / h^2
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i] - 2.0 * y[i + 1] + y[i + 2]) / (h * h);
                let denom = 4.0 - if i > 0 { c[i - 1] } else { 0.0 };
                c[i] = 1.0 / denom;
                d[i] = (rhs - if i > 0 { d[i - 1] } else { 0.0 }) / denom;
            }
            m[k] = d[k - 1];
            for i in (1..k).rev() {
                m[i] = d[i - 1] - c[i - 1] * m[i + 1];
            }
        }
        UniformSpline { x0, h, y, m }
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + (self.y.len() - 1) as f64 * self.h
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let u = (x - self.x0) / self.h;
        let last = self.y.len() - 1;
        if !(u >= 0.0 && u <= last as f64) {
            return None;
        }
        let i = (u.floor() as usize).min(last - 1);
        Some((i, u - i as f64))
    }

    /// Value and first derivative; zero outside the grid.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let Some((i, t)) = self.locate(x) else {
            return (0.0, 0.0);
        };
        let h = self.h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let a = 1.0 - t;
        let v = a * y0 + t * y1 + h * h / 6.0 * ((a * a * a - a) * m0 + (t * t * t - t) * m1);
        let dv = (y1 - y0) / h + h / 6.0 * (-(3.0 * a * a - 1.0) * m0 + (3.0 * t * t - 1.0) * m1);
        (v, dv)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }
}
