//! Pointwise flow-field dumps.

use std::path::Path;

use wigner_flow::flow::FlowField;
use wigner_flow::numerics::PhaseGrid;
use wigner_flow::par;

use crate::error::{CliError, Result};
use crate::sweep::num;

pub const HEADER: [&str; 8] = ["s", "q", "W", "J_s", "J_q", "dJq", "divw", "k_used"];

/// `NSxNQ`, e.g. `41x41`.
pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || CliError::Config(format!("--grid {s:?}: expected NSxNQ, e.g. 41x41"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let ns = a.trim().parse().map_err(|_| bad())?;
    let nq = b.trim().parse().map_err(|_| bad())?;
    Ok((ns, nq))
}

/// `S,Q` half-widths of the symmetric rectangle.
pub fn parse_domain(s: &str) -> Result<(f64, f64)> {
    let bad = || CliError::Config(format!("--domain {s:?}: expected two positive half-widths S,Q"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let hs: f64 = a.trim().parse().map_err(|_| bad())?;
    let hq: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(hs > 0.0 && hq > 0.0 && hs.is_finite() && hq.is_finite()) {
        return Err(bad());
    }
    Ok((hs, hq))
}

pub fn rows(field: &FlowField, grid: &PhaseGrid) -> Result<Vec<[String; 8]>> {
    let floor = field.w_floor();
    par::map_range(grid.len(), |idx| {
        let (s, q) = grid.node(idx);
        let p = field.point(s, q)?;
        Ok([
            num(s),
            num(q),
            num(p.w),
            num(p.current.js),
            num(p.current.jq),
            num(p.current.delta.value),
            p.div_w(floor).map(num).unwrap_or_default(),
            p.current.delta.k_used.to_string(),
        ])
    })
    .into_iter()
    .collect::<Result<Vec<_>, wigner_flow::error::Error>>()
    .map_err(CliError::from)
}

pub fn write_csv(path: &Path, rows: &[[String; 8]]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
