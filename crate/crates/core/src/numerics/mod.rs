//! Numerical substrate: root finding, quadrature, average-density
//! normalization and Taylor-series integration of Hill-type equations.

mod airy;
mod expint;
pub mod mathieu;
pub mod pv;
pub mod quadrature;
pub mod roots;
pub mod taylor;
pub(crate) mod tridiag;

pub use expint::exp_integral;
pub use mathieu::{discriminant, mathieu, MathieuEval};
pub use pv::{pv_normalization, PvMode};
pub use quadrature::{
    cosine_map_nodes, cosine_map_panels, gauss_legendre, integrate, integrate_band, panel_nodes,
    sqrt_map_nodes, ExcludedPoint, QuadNode, QuadResult, QuadValue, QuadratureSpec,
};
pub use roots::{find_root, scan_roots, Bracket};
pub use taylor::{Coefficient, FundamentalPair};
