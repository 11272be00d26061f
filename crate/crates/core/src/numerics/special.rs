//! Small special-function helpers.

use num_complex::Complex64;

pub fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Pascal triangle rows `0..=n`.
pub fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut row = vec![1.0; m + 1];
        for k in 1..m {
            row[k] = rows[m - 1][k - 1] + rows[m - 1][k];
        }
        rows.push(row);
    }
    rows
}

/// Derivatives `sinc^(k)(x)`, `k = 0..=n`, of `sinc x = sin x / x`.
///
/// Uses `sinc^(k)(x) = Re(i^k I_k)` with `I_k = int_0^1 t^k e^{ixt} dt`.
/// The moment recurrence runs upward while `k < |x|` and downward (Miller
/// style, seeded with zero far above) otherwise, which keeps it stable for
/// every `x` including the removable point `x = 0`.
pub fn sinc_derivatives(x: f64, n: usize) -> Vec<f64> {
    let moments = if x == 0.0 {
        (0..=n).map(|k| Complex64::new(1.0 / (k + 1) as f64, 0.0)).collect()
    } else if (n as f64) < x.abs() {
        upward_moments(x, n)
    } else {
        downward_moments(x, n)
    };
    let mut ik = Complex64::new(1.0, 0.0);
    moments
        .into_iter()
        .map(|m| {
            let v = (ik * m).re;
            ik *= Complex64::i();
            v
        })
        .collect()
}

fn upward_moments(x: f64, n: usize) -> Vec<Complex64> {
    let e = Complex64::new(x.cos(), x.sin());
    let ix = Complex64::new(0.0, x);
    let half = (0.5 * x).sin();
    let mut out = Vec::with_capacity(n + 1);
    out.push(Complex64::new(x.sin() / x, 2.0 * half * half / x));
    for k in 1..=n {
        let prev = out[k - 1];
        out.push((e - k as f64 * prev) / ix);
    }
    out
}

fn downward_moments(x: f64, n: usize) -> Vec<Complex64> {
    let e = Complex64::new(x.cos(), x.sin());
    let ix = Complex64::new(0.0, x);
    let top = n.max(x.abs().ceil() as usize) + 60;
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur = Complex64::new(0.0, 0.0);
    for k in (1..=top).rev() {
        // cur holds I_k; step to I_{k-1}
        cur = (e - ix * cur) / k as f64;
        if k - 1 <= n {
            out[k - 1] = cur;
        }
    }
    out
}
