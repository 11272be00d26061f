//! Turns merged flag/config values into a state, model and flow settings.

use std::path::PathBuf;

use clap::Args;
use wigner_flow::classical::OrbitFamily;
use wigner_flow::flow::{Correction, FlowField, SeriesPolicy};
use wigner_flow::potentials::PotentialModel;
use wigner_flow::states::{Wavefunction, WignerState};

use crate::config::ConfigFile;
use crate::error::{CliError, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const RESUMMED_TOL: f64 = 1e-12;

/// Options shared by `sweep`, `field` and `quantify`.
#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// `key = value` file; flags given on the command line win
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Poschl-Teller strength (positive integer)
    #[arg(long)]
    pub lambda: Option<u32>,

    /// pt-ground | ho-ground | wavefile:PATH
    #[arg(long)]
    pub state: Option<String>,

    /// Potential driving the flow: pt | ho (default follows --state)
    #[arg(long)]
    pub potential: Option<String>,

    /// Harmonic stiffness for ho-ground and --potential ho
    #[arg(long)]
    pub omega2: Option<f64>,

    /// resummed | series (default: series if --kmax is given)
    #[arg(long)]
    pub correction: Option<String>,

    /// Highest series order for --correction series
    #[arg(long)]
    pub kmax: Option<usize>,

    /// Relative tolerance of the contour quadrature
    #[arg(long)]
    pub tol: Option<f64>,

    /// Orbit family for Poschl-Teller: hamiltonian | literal
    #[arg(long)]
    pub orbit: Option<String>,
}

pub const COMMON_KEYS: [&str; 9] = [
    "lambda",
    "state",
    "potential",
    "omega2",
    "correction",
    "kmax",
    "tol",
    "orbit",
    "out",
];

pub struct Setup {
    pub lambda: u32,
    pub model: PotentialModel,
    pub field: FlowField,
    pub tol: f64,
    pub family: OrbitFamily,
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl Setup {
    pub fn resolve(c: &Common, cfg: &ConfigFile) -> Result<Self> {
        let lambda: u32 = cfg.pick(c.lambda, "lambda")?.unwrap_or(1);
        if lambda == 0 {
            return Err(CliError::Config("--lambda must be a positive integer".into()));
        }
        let omega2: f64 = cfg.pick(c.omega2, "omega2")?.unwrap_or(1.0);
        let spec: String = cfg.pick(c.state.clone(), "state")?.unwrap_or_else(|| "pt-ground".into());
        let (state, natural) = match spec.as_str() {
            "pt-ground" => (WignerState::pt_ground(lambda).map_err(config_err)?, "pt"),
            "ho-ground" => (WignerState::harmonic_ground(omega2).map_err(config_err)?, "ho"),
            other => match other.strip_prefix("wavefile:") {
                Some(path) if !path.is_empty() => {
                    let psi = Wavefunction::read(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
                    (WignerState::from_wavefunction(psi), "pt")
                }
                _ => {
                    return Err(CliError::Config(format!(
                        "unknown --state {other:?}; expected pt-ground, ho-ground or wavefile:PATH"
                    )))
                }
            },
        };
        let potential: String = cfg.pick(c.potential.clone(), "potential")?.unwrap_or_else(|| natural.into());
        let model = match potential.as_str() {
            "pt" => PotentialModel::poschl_teller(lambda).map_err(config_err)?,
            "ho" => PotentialModel::harmonic(omega2).map_err(config_err)?,
            p => return Err(CliError::Config(format!("unknown --potential {p:?}; expected pt or ho"))),
        };

        let kmax: Option<usize> = cfg.pick(c.kmax, "kmax")?;
        let correction: Option<String> = cfg.pick(c.correction.clone(), "correction")?;
        let correction = match (correction.as_deref(), kmax) {
            (Some("resummed"), _) | (None, None) => Correction::Resummed { rel_tol: RESUMMED_TOL },
            (Some("series"), k) | (None, k @ Some(_)) => {
                let mut p = SeriesPolicy::default();
                if let Some(k) = k {
                    p.k_max = k;
                }
                Correction::Series(p)
            }
            (Some(o), _) => {
                return Err(CliError::Config(format!(
                    "unknown --correction {o:?}; expected resummed or series"
                )))
            }
        };
        let field = FlowField::new(state, model.clone())
            .with_correction(correction)
            .map_err(config_err)?;

        let tol: f64 = cfg.pick(c.tol, "tol")?.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::Config(format!("--tol must lie in (0, 1), got {tol}")));
        }
        let orbit: String = cfg.pick(c.orbit.clone(), "orbit")?.unwrap_or_else(|| "hamiltonian".into());
        let family = match orbit.as_str() {
            "hamiltonian" => OrbitFamily::Hamiltonian,
            "literal" => OrbitFamily::Literal,
            o => return Err(CliError::Config(format!("unknown --orbit {o:?}; expected hamiltonian or literal"))),
        };
        Ok(Setup {
            lambda,
            model,
            field,
            tol,
            family,
        })
    }
}
