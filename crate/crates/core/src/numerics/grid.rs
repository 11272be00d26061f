use crate::error::{Error, Result};
use crate::numerics::quadrature::PhaseRect;

/// Uniform tensor grid over a phase-space rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    pub s_min: f64,
    pub s_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub n_s: usize,
    pub n_q: usize,
}

impl PhaseGrid {
    pub fn new(s_min: f64, s_max: f64, q_min: f64, q_max: f64, n_s: usize, n_q: usize) -> Result<Self> {
        if !(s_min < s_max) || !(q_min < q_max) {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must be increasing, got s in [{s_min}, {s_max}], q in [{q_min}, {q_max}]"
            )));
        }
        if n_s < 2 || n_q < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 points per axis, got {n_s}x{n_q}"
            )));
        }
        Ok(PhaseGrid {
            s_min,
            s_max,
            q_min,
            q_max,
            n_s,
            n_q,
        })
    }

    /// Grid on [-s_half, s_half] x [-q_half, q_half].
    pub fn symmetric(s_half: f64, q_half: f64, n_s: usize, n_q: usize) -> Result<Self> {
        PhaseGrid::new(-s_half, s_half, -q_half, q_half, n_s, n_q)
    }

    pub fn ds(&self) -> f64 {
        (self.s_max - self.s_min) / (self.n_s - 1) as f64
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_q - 1) as f64
    }

    pub fn s_at(&self, i: usize) -> f64 {
        // pin the last node to the bound so mirrored grids stay exact
        if i + 1 == self.n_s {
            self.s_max
        } else {
            self.s_min + i as f64 * self.ds()
        }
    }

    pub fn q_at(&self, j: usize) -> f64 {
        if j + 1 == self.n_q {
            self.q_max
        } else {
            self.q_min + j as f64 * self.dq()
        }
    }

    pub fn s_nodes(&self) -> Vec<f64> {
        (0..self.n_s).map(|i| self.s_at(i)).collect()
    }

    pub fn q_nodes(&self) -> Vec<f64> {
        (0..self.n_q).map(|j| self.q_at(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.n_s * self.n_q
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node `(s_i, q_j)` for flat index `i * n_q + j`.
    pub fn node(&self, idx: usize) -> (f64, f64) {
        (self.s_at(idx / self.n_q), self.q_at(idx % self.n_q))
    }

    pub fn rect(&self) -> PhaseRect {
        PhaseRect {
            s_min: self.s_min,
            s_max: self.s_max,
            q_min: self.q_min,
            q_max: self.q_max,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PhaseGrid::new(1.0, 0.0, 0.0, 1.0, 3, 3).is_err());
        assert!(PhaseGrid::new(0.0, 1.0, 0.0, 1.0, 1, 3).is_err());
        assert!(PhaseGrid::new(0.0, 1.0, 0.0, 1.0, 2, 2).is_ok());
    }

    #[test]
    fn nodes_are_uniform_and_hit_the_bounds() {
        let g = PhaseGrid::symmetric(3.0, 2.0, 7, 5).unwrap();
        let s = g.s_nodes();
        assert_eq!(s[0], -3.0);
        assert_eq!(s[6], 3.0);
        assert_eq!(s[3], 0.0);
        for w in s.windows(2) {
            assert!((w[1] - w[0] - 1.0).abs() < 1e-15);
        }
        assert_eq!(g.node(5 * 2 + 3), (s[2], g.q_at(3)));
    }
}
