//! Fejér kernels, webs and `(n, l)`-nets, sparse grids, cubature formulas
//! and linear recovery from point values.
//!
//! Knots on dyadic grids are stored exactly as `π a / 2^b`, so web
//! membership is an integer test.

mod cubature;
mod fejer;
mod knots;
mod recovery;

pub use cubature::{
    aligned_member, aligned_sup, class_cubature_error, cubature, cubature_direct, cubature_fn, cubature_reference,
    knot_values, smolyak_cubature, CubatureStats, CubatureSymbol,
};
pub use fejer::{fejer_closed_form, fejer_kernel};
pub use knots::{is_nl_net, sparse_grid, sparse_grid_with, FloatCoord, Knot, KnotSet, NetReport, Web, WEB_TOL};
pub use recovery::{dirichlet_cardinal, recovery_apply, recovery_error, RecoveryStats};

#[cfg(test)]
mod tests;
