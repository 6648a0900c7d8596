//! Sparse trigonometric polynomials over `Z^d`, dyadic blocks, hyperbolic
//! crosses, grid sampling and norms.

mod fft;
mod grid;
mod index;
mod norms;
mod poly;

pub use fft::{transform_nd, Direction};
pub(crate) use grid::power_mean;
pub use grid::{analyze, default_grid, next_pow2, sample, sample_aliased, GridFunction};
pub use index::{block_of, compositions, compositions_upto, FrequencyIndex, IndexSet, IndexSetKind};
pub use norms::{grid_norm, norm, norm_with_error, Exponent, NormEstimate, QuadratureOptions};
pub use poly::{delta_s, hyperbolic_partial_sum, layer, TrigPolynomial};
