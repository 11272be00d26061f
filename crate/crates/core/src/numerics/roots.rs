//! Zeros of planar vector fields.

use crate::error::Result;
use crate::numerics::grid::PhaseGrid;
use crate::par;

/// Newton stops once its step is below this fraction of the cell size, or
/// the residual is below this fraction of the largest field value on the grid.
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero2d {
    pub s: f64,
    pub q: f64,
    /// Euclidean norm of the field at the reported point.
    pub residual: f64,
    /// Newton failed in this cell; the point is the cell centre.
    pub low_confidence: bool,
}

fn straddles(vals: [f64; 4]) -> bool {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Newton iteration with a central-difference Jacobian. Returns `None` if it
/// stalls, leaves `bounds`, or hits the iteration cap.
fn newton<F>(f: &F, mut x: [f64; 2], h: [f64; 2], bounds: [f64; 4], tol: f64) -> Result<Option<([f64; 2], f64)>>
where
    F: Fn(f64, f64) -> Result<[f64; 2]>,
{
    let mut fx = f(x[0], x[1])?;
    for _ in 0..NEWTON_MAX_ITER {
        let r = norm(fx);
        if r < tol {
            return Ok(Some((x, r)));
        }
        let fsp = f(x[0] + h[0], x[1])?;
        let fsm = f(x[0] - h[0], x[1])?;
        let fqp = f(x[0], x[1] + h[1])?;
        let fqm = f(x[0], x[1] - h[1])?;
        let a = (fsp[0] - fsm[0]) / (2.0 * h[0]);
        let b = (fqp[0] - fqm[0]) / (2.0 * h[1]);
        let c = (fsp[1] - fsm[1]) / (2.0 * h[0]);
        let d = (fqp[1] - fqm[1]) / (2.0 * h[1]);
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return Ok(None);
        }
        let step = [(d * fx[0] - b * fx[1]) / det, (a * fx[1] - c * fx[0]) / det];
        // damp until the residual drops
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..20 {
            let trial = [x[0] - t * step[0], x[1] - t * step[1]];
            let ft = f(trial[0], trial[1])?;
            if norm(ft) < r || norm(ft) < tol {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((nx, nf)) = accepted else {
            return Ok(None);
        };
        let moved = ((nx[0] - x[0]) / h[0]).hypot((nx[1] - x[1]) / h[1]) * 1e-6;
        x = nx;
        fx = nf;
        if x[0] < bounds[0] || x[0] > bounds[1] || x[1] < bounds[2] || x[1] > bounds[3] {
            return Ok(None);
        }
        if moved < NEWTON_TOL {
            return Ok(Some((x, norm(fx))));
        }
    }
    let r = norm(fx);
    Ok((r < tol).then_some((x, r)))
}

/// All zeros of `field` inside the grid rectangle.
///
/// Cells in which both components change sign (or touch zero) at the corners
/// are refined by Newton from the cell centre. Duplicates from neighbouring
/// cells are merged, and the result is sorted lexicographically in (s, q).
pub fn find_zeros_2d<F>(field: F, grid: &PhaseGrid) -> Result<Vec<Zero2d>>
where
    F: Fn(f64, f64) -> Result<[f64; 2]> + Sync,
{
    let (ns, nq) = (grid.n_s, grid.n_q);
    let values: Vec<[f64; 2]> = par::map_range(grid.len(), |idx| {
        let (s, q) = grid.node(idx);
        field(s, q)
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let at = |i: usize, j: usize| values[i * nq + j];
    let scale = values.iter().map(|&v| norm(v)).fold(0.0, f64::max);
    let tol = NEWTON_TOL * if scale > 0.0 { scale } else { 1.0 };

    let mut cells = Vec::new();
    for i in 0..ns - 1 {
        for j in 0..nq - 1 {
            let c = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            if straddles(c.map(|v| v[0])) && straddles(c.map(|v| v[1])) {
                cells.push((i, j));
            }
        }
    }

    let (ds, dq) = (grid.ds(), grid.dq());
    let h = [1e-6 * ds, 1e-6 * dq];
    let refined = par::map_slice(&cells, |&(i, j)| -> Result<Zero2d> {
        let centre = [grid.s_at(i) + 0.5 * ds, grid.q_at(j) + 0.5 * dq];
        // allow Newton to wander one cell out of its own
        let bounds = [
            grid.s_at(i) - ds,
            grid.s_at(i) + 2.0 * ds,
            grid.q_at(j) - dq,
            grid.q_at(j) + 2.0 * dq,
        ];
        Ok(match newton(&field, centre, h, bounds, tol)? {
            Some((x, r)) => Zero2d {
                s: x[0],
                q: x[1],
                residual: r,
                low_confidence: false,
            },
            None => Zero2d {
                s: centre[0],
                q: centre[1],
                residual: norm(field(centre[0], centre[1])?),
                low_confidence: true,
            },
        })
    });

    let mut found: Vec<Zero2d> = refined.into_iter().collect::<Result<_>>()?;
    // confident points first so they win the merge
    found.sort_by_key(|a| a.low_confidence);
    let mut kept: Vec<Zero2d> = Vec::new();
    for z in found {
        let radius = if z.low_confidence { 1.5 } else { 0.5 };
        let dup = kept.iter().any(|k| {
            ((k.s - z.s) / ds).abs() < radius && ((k.q - z.q) / dq).abs() < radius
        });
        if !dup {
            kept.push(z);
        }
    }
    kept.sort_by(|a, b| a.s.total_cmp(&b.s).then(a.q.total_cmp(&b.q)));
    Ok(kept)
}
