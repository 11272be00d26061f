//! Energy sweeps and single-orbit reports.

use std::io::Write;
use std::path::{Path, PathBuf};

use wigner_flow::classical::ClassicalOrbit;
use wigner_flow::par;
use wigner_flow::quantifiers::{span_fluxes, Flux, Span};

use crate::error::{CliError, Result};
use crate::setup::Setup;

pub const SPANS: [Span; 3] = [Span::Full, Span::Quarter, Span::Abs];
const SPAN_NAMES: [&str; 3] = ["full", "quarter", "abs"];
const QUANTITY_NAMES: [&str; 3] = ["sigma_flux", "entropy_flux", "purity_flux"];

pub fn parse_spans(s: &str) -> Result<Vec<Span>> {
    if s == "all" {
        return Ok(SPANS.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let span: Span = part
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("unknown --span {part:?}; expected full, quarter, abs or all")))?;
        if !out.contains(&span) {
            out.push(span);
        }
    }
    Ok(out)
}

/// `n` points from `lo` to `hi` inclusive, last one pinned to `hi`.
pub fn l_values(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(CliError::Config("--l-steps must be at least 1".into()));
    }
    if n == 1 {
        if lo != hi {
            return Err(CliError::Config("--l-steps 1 needs --l-min equal to --l-max".into()));
        }
        return Ok(vec![lo]);
    }
    if !(lo < hi) {
        return Err(CliError::Config(format!("--l-min ({lo}) must be below --l-max ({hi})")));
    }
    Ok((0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect())
}

#[derive(Debug, Clone)]
pub struct Row {
    pub l: f64,
    pub period: Option<f64>,
    /// `[span][quantity]`, `None` where not requested or failed
    pub cells: [[Option<Flux>; 3]; 3],
    pub quasi_static: bool,
    pub error: Option<String>,
}

impl Row {
    pub fn k_used_max(&self) -> Option<usize> {
        self.fluxes().map(|f| f.k_used_max).max()
    }

    pub fn quad_error(&self) -> Option<f64> {
        self.fluxes().map(|f| f.quad_error).reduce(f64::max)
    }

    fn fluxes(&self) -> impl Iterator<Item = &Flux> {
        self.cells.iter().flatten().flatten()
    }
}

pub fn compute_row(setup: &Setup, l: f64, spans: &[Span]) -> Row {
    let mut row = Row {
        l,
        period: None,
        cells: [[None; 3]; 3],
        quasi_static: setup.field.is_stationary(),
        error: None,
    };
    let orbit = match ClassicalOrbit::new(&setup.model, l, setup.family) {
        Ok(o) => o,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.period = Some(orbit.period());
    let mut errors = Vec::new();
    for (i, span) in SPANS.iter().enumerate() {
        if !spans.contains(span) {
            continue;
        }
        match span_fluxes(&setup.field, &orbit, *span, setup.tol) {
            Ok(f) => row.cells[i] = f.map(Some),
            Err(e) => errors.push(format!("{}: {e}", SPAN_NAMES[i])),
        }
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

pub fn compute_rows(setup: &Setup, ls: &[f64], spans: &[Span]) -> Vec<Row> {
    par::map_slice(ls, |&l| compute_row(setup, l, spans))
}

pub fn header() -> Vec<String> {
    let mut h = vec!["l".to_string(), "period".to_string()];
    for span in SPAN_NAMES {
        for q in QUANTITY_NAMES {
            h.push(format!("{q}_{span}"));
        }
    }
    h.extend(["k_used_max", "quad_error", "quasi_static", "error"].map(String::from));
    h
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn record(row: &Row) -> Vec<String> {
    let mut r = vec![num(row.l), opt_num(row.period)];
    for span in &row.cells {
        for cell in span {
            r.push(opt_num(cell.map(|f| f.value)));
        }
    }
    r.push(row.k_used_max().map(|k| k.to_string()).unwrap_or_default());
    r.push(opt_num(row.quad_error()));
    r.push(row.quasi_static.to_string());
    r.push(row.error.clone().unwrap_or_default());
    r
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header())?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

/// Path of the plotting script written next to `csv`.
pub fn plot_path(csv: &Path) -> PathBuf {
    csv.with_extension("plot.py")
}

pub fn write_plot_script(csv: &Path, lambda: u32) -> Result<PathBuf> {
    let path = plot_path(csv);
    let name = csv
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .ok_or_else(|| CliError::Config(format!("--out {} has no file name", csv.display())))?;
    let png = csv.with_extension("png");
    let png = png.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut f = std::fs::File::create(&path)?;
    write!(f, "{}", PLOT_TEMPLATE.replace("@CSV@", &name).replace("@PNG@", &png).replace("@LAMBDA@", &lambda.to_string()))?;
    Ok(path)
}

const PLOT_TEMPLATE: &str = r#"#!/usr/bin/env python3
# Quantifiers versus the energy parameter l, one panel per contour span.
# Reads the sweep CSV sitting next to this script; needs matplotlib.
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
src = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "@CSV@")
dst = sys.argv[2] if len(sys.argv) > 2 else os.path.join(here, "@PNG@")

with open(src, newline="") as fh:
    rows = list(csv.DictReader(fh))

series = [
    ("sigma_flux", "decoherence", "black"),
    ("entropy_flux", "entropy flux", "blue"),
    ("purity_flux", "purity flux", "red"),
]
spans = [s for s in ("full", "quarter", "abs") if any(r["sigma_flux_" + s] for r in rows)]
if not spans:
    sys.exit("no flux columns in " + src)

fig, axes = plt.subplots(len(spans), 1, figsize=(6, 3 * len(spans)), sharex=True, squeeze=False)
for ax, span in zip(axes[:, 0], spans):
    for key, label, color in series:
        pts = [(float(r["l"]), float(r[key + "_" + span])) for r in rows if r[key + "_" + span]]
        if pts:
            xs, ys = zip(*pts)
            ax.plot(xs, ys, color=color, marker=".", label=label)
    ax.axhline(0.0, color="0.7", lw=0.5)
    ax.set_ylabel(span + " span")
    ax.legend(fontsize="small")
axes[-1, 0].set_xlabel("l")
axes[0, 0].set_title("lambda = @LAMBDA@")
fig.tight_layout()
fig.savefig(dst, dpi=150)
print("wrote", dst)
"#;
