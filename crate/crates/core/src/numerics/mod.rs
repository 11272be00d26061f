//! Quadrature, jets, grids and root finding.

pub mod grid;
pub mod jet;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use grid::PhaseGrid;
pub use jet::{jet_eval, Jet};
pub use quadrature::{
    integrate_1d, integrate_1d_vec, integrate_1d_with, integrate_2d, try_integrate_1d, try_integrate_2d, FixedRule,
    GaussLegendre, PhaseRect, QuadOptions, QuadratureResult,
};
pub use roots::{find_zeros_2d, Zero2d};
