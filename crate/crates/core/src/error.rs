use thiserror::Error;

/// Errors raised by the numerical kernels, states, flow and quantifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge with {panels} panels (best estimate {best:e}, error estimate {error:e})")]
    NonConvergence { best: f64, error: f64, panels: usize },

    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },

    #[error("jet singularity: {0}")]
    Singularity(&'static str),

    #[error("energy parameter l = {l} is outside the bound-motion window ({lo}, {hi})")]
    OutsideBoundWindow { l: f64, lo: f64, hi: f64 },

    #[error(
        "quantum-correction series still growing at k_max = {k_max} at (s, q) = ({s}, {q}); \
         smallest-term partial sum {partial_sum:e} (k = {k_smallest}, term {smallest_term:e})"
    )]
    SeriesDivergence {
        s: f64,
        q: f64,
        k_max: usize,
        partial_sum: f64,
        k_smallest: usize,
        smallest_term: f64,
    },

    #[error("Wigner density |W| = {w:e} at (s, q) = ({s}, {q}) is below the floor; phase velocity undefined")]
    NearZeroDensity { s: f64, q: f64, w: f64 },

    #[error("Wigner function not positive: W = {w:e} at (s, q) = ({s}, {q}){}", .tau.map(|t| format!(" (tau = {t})")).unwrap_or_default())]
    Positivity {
        s: f64,
        q: f64,
        w: f64,
        tau: Option<f64>,
    },

    #[error("Weyl transform imaginary residue {residue:e} at (s, q) = ({s}, {q}); wavefunction grid too coarse")]
    ImaginaryResidue { s: f64, q: f64, residue: f64 },

    #[error("at tau = {tau}: {source}")]
    AlongPath { tau: f64, source: Box<Error> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("wavefunction file line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// The innermost error, looking through [`Error::AlongPath`].
    pub fn root(&self) -> &Error {
        match self {
            Error::AlongPath { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
