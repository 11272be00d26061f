//! `wigflow`: energy sweeps, field dumps and validation for Wigner phase-space
//! flow. Exit codes: 0 success, 1 validation failure, 2 configuration error,
//! 3 numeric failure.

mod config;
mod error;
mod field;
mod setup;
mod sweep;
mod validate;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wigner_flow::flow::Fault;
use wigner_flow::numerics::PhaseGrid;

use config::ConfigFile;
use error::{CliError, Result};
use setup::{Common, Setup, COMMON_KEYS};

#[derive(Parser, Debug)]
#[command(name = "wigflow", version, about = "Wigner phase-space flow: sweeps, field dumps and validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Contour quantifiers over a range of the energy parameter l
    Sweep(SweepArgs),
    /// Flow field on a phase-space grid
    Field(FieldArgs),
    /// Contour quantifiers for a single orbit
    Quantify(QuantifyArgs),
    /// Run the oracle suites and print a pass/fail table
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    l_min: Option<f64>,
    #[arg(long)]
    l_max: Option<f64>,
    #[arg(long)]
    l_steps: Option<usize>,
    /// full | quarter | abs | all, or a comma list
    #[arg(long)]
    span: Option<String>,
    /// CSV path; the plotting script goes next to it as <stem>.plot.py
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FieldArgs {
    #[command(flatten)]
    common: Common,
    /// NSxNQ grid points
    #[arg(long)]
    grid: Option<String>,
    /// S,Q half-widths of the rectangle centred on the origin
    #[arg(long)]
    domain: Option<String>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QuantifyArgs {
    #[command(flatten)]
    common: Common,
    /// Energy parameter of the orbit
    #[arg(long)]
    l: Option<f64>,
    #[arg(long)]
    span: Option<String>,
    /// Also write the report as a one-row sweep CSV
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// fast | full (full adds the lambda = 2 grid and global balance)
    #[arg(default_value = "fast")]
    level: String,
    /// Deliberate defect, for checking that the suite notices it
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wigflow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Field(a) => cmd_field(a),
        Command::Quantify(a) => cmd_quantify(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn load(common: &Common, extra: &[&str]) -> Result<ConfigFile> {
    let cfg = ConfigFile::load(common.config.as_deref())?;
    let keys: Vec<&str> = COMMON_KEYS.iter().chain(extra).copied().collect();
    cfg.check_keys(&keys)?;
    Ok(cfg)
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let cfg = load(&a.common, &["l-min", "l-max", "l-steps", "span"])?;
    let setup = Setup::resolve(&a.common, &cfg)?;
    let window = setup.model.bound_window();
    let (lo, hi) = match window {
        Some((lo, hi)) if hi.is_finite() => (lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo)),
        _ => (0.5, 2.0),
    };
    let l_min = cfg.pick(a.l_min, "l-min")?.unwrap_or(lo);
    let l_max = cfg.pick(a.l_max, "l-max")?.unwrap_or(hi);
    let steps = cfg.pick(a.l_steps, "l-steps")?.unwrap_or(19);
    for l in [l_min, l_max] {
        setup.model.check_bound(l).map_err(|e| CliError::Config(e.to_string()))?;
    }
    let ls = sweep::l_values(l_min, l_max, steps)?;
    for &l in &ls {
        setup.model.check_bound(l).map_err(|e| CliError::Config(e.to_string()))?;
    }
    let spans = sweep::parse_spans(&cfg.pick(a.span, "span")?.unwrap_or_else(|| "all".into()))?;
    let out: PathBuf = cfg.pick(a.out, "out")?.unwrap_or_else(|| "sweep.csv".into());

    let rows = sweep::compute_rows(&setup, &ls, &spans);
    sweep::write_csv(&out, &rows)?;
    let script = sweep::write_plot_script(&out, setup.lambda)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    println!("wrote {} ({} rows) and {}", out.display(), rows.len(), script.display());
    if failed > 0 {
        return Err(CliError::Numeric(format!(
            "{failed} of {} rows failed; see the error column",
            rows.len()
        )));
    }
    Ok(())
}

fn cmd_field(a: FieldArgs) -> Result<()> {
    let cfg = load(&a.common, &["grid", "domain"])?;
    let setup = Setup::resolve(&a.common, &cfg)?;
    let (ns, nq) = field::parse_grid(&cfg.pick(a.grid, "grid")?.unwrap_or_else(|| "41x41".into()))?;
    let (hs, hq) = field::parse_domain(&cfg.pick(a.domain, "domain")?.unwrap_or_else(|| "3,3".into()))?;
    let grid = PhaseGrid::symmetric(hs, hq, ns, nq).map_err(|e| CliError::Config(e.to_string()))?;
    let out: PathBuf = cfg.pick(a.out, "out")?.unwrap_or_else(|| "field.csv".into());
    let rows = field::rows(&setup.field, &grid)?;
    field::write_csv(&out, &rows)?;
    println!("wrote {} ({ns}x{nq} points)", out.display());
    Ok(())
}

fn cmd_quantify(a: QuantifyArgs) -> Result<()> {
    let cfg = load(&a.common, &["l", "span"])?;
    let setup = Setup::resolve(&a.common, &cfg)?;
    let l: f64 = cfg
        .pick(a.l, "l")?
        .ok_or_else(|| CliError::Config("quantify needs --l".into()))?;
    setup.model.check_bound(l).map_err(|e| CliError::Config(e.to_string()))?;
    let spans = sweep::parse_spans(&cfg.pick(a.span, "span")?.unwrap_or_else(|| "all".into()))?;
    let row = sweep::compute_row(&setup, l, &spans);
    let mut stdout = std::io::stdout().lock();
    for (k, v) in sweep::header().iter().zip(sweep::record(&row)) {
        if !v.is_empty() {
            writeln!(stdout, "{k} = {v}")?;
        }
    }
    if let Some(out) = cfg.pick(a.out, "out")? {
        let out: PathBuf = out;
        sweep::write_csv(&out, std::slice::from_ref(&row))?;
    }
    match row.error {
        Some(msg) => Err(CliError::Numeric(msg)),
        None => Ok(()),
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<()> {
    let full = match a.level.as_str() {
        "fast" => false,
        "full" => true,
        o => return Err(CliError::Config(format!("unknown level {o:?}; expected fast or full"))),
    };
    let fault = match a.inject_fault.as_deref() {
        None => None,
        Some("flip-djq") => Some(Fault::FlipDeltaJqValue),
        Some(o) => return Err(CliError::Config(format!("unknown fault {o:?}"))),
    };
    let outcomes = validate::run(&validate::suite(full), fault);
    print!("{}", validate::table(&outcomes));
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join("; ")))
    }
}
