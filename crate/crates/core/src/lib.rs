//! Phase-space flow of Wigner functions.
//!
//! The crate evaluates Wigner functions and their exact derivatives, the
//! quantum-corrected phase-space current `J = (qW, -U~'W + dJ_q)`, the Wigner
//! phase velocity `w = J/W` and its divergence, and contour and global
//! information-flux functionals for the hyperbolic Poschl-Teller well, the
//! harmonic oscillator and user-supplied wavefunctions.
//!
//! All quantities are dimensionless: `H = q^2 + U(s)`, and the flow is
//! generated by `H/2`, so `ds/dtau = q` and `dq/dtau = -U'(s)/2`.

pub mod classical;
pub mod error;
pub mod flow;
pub mod numerics;
pub mod potentials;
pub mod quantifiers;
pub mod states;
pub mod par;

pub use error::{Error, Result};
pub use par::is_parallel;
