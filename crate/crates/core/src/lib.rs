//! Constructive sparse trigonometric approximation of multivariate periodic
//! functions with mixed smoothness.
//!
//! The crate is organised bottom-up:
//!
//! - [`trig`]: sparse trigonometric polynomials, dyadic blocks, hyperbolic
//!   crosses, grid sampling and norms.
//! - [`classes`]: mixed-smoothness function classes and their samplers.
//! - [`greedy`]: the real trigonometric dictionary, norming functionals, the
//!   Weak Chebyshev Greedy Algorithm and the Incremental Algorithm.
//! - [`layered`]: m-term methods built from greedy runs, including the
//!   layer-by-layer scheme `S_n(f) + Σ_l G_{m_l}(f_l)`.
//! - [`quadrature`]: Fejér kernels, webs, sparse grids, cubature and recovery.
//! - [`harness`]: experiment configs, rate fitting, oracles and CSV/JSON output.
//!
//! All norms use the normalized measure `(2π)^{-d} dx`, so every exponential
//! `e^{i(k,x)}` has unit norm in every `L_p`.

pub mod classes;
pub mod error;
mod extended;
pub mod greedy;
pub mod harness;
pub mod layered;
pub mod par;
pub mod quadrature;
pub mod rng;
pub mod trig;

pub use error::{Error, Result};
pub use trig::{FrequencyIndex, GridFunction, IndexSet, IndexSetKind, TrigPolynomial};
