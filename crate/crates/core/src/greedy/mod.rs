//! Greedy approximation over the real trigonometric dictionary in `L_p`:
//! the Weak Chebyshev Greedy Algorithm and the Incremental Algorithm.
//!
//! Two backends compute the same quantities. `Grid` keeps the residual as
//! real samples and works for any `1 < p < ∞`. `Coordinates` keeps it as
//! coordinates in the orthonormal atoms and is exact, but only valid at
//! `p = 2`; `Auto` picks it there.

mod chebyshev;
mod dictionary;
mod ia;
mod lebesgue;
mod norming;
mod trace;
mod wcga;
mod workspace;

pub use chebyshev::{chebyshev_project, Projection, ProjectionOptions};
pub use dictionary::{cos_lp_norm, harmonic_target, AtomId, DictionaryAtom, TrigDictionary};
pub use ia::{ia_epsilon, modulus_of_smoothness, IaSchedule};
pub use lebesgue::{lebesgue_check, oracle_sigma, LebesgueReport};
pub use norming::{select_atom, NormingFunctional};
pub use trace::{Algorithm, ApproximationTrace, Coefficients, TraceStep};
pub use wcga::wcga;

use crate::error::{Error, Result};
use crate::trig::TrigPolynomial;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Auto,
    Grid,
    Coordinates,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyOptions {
    pub backend: Backend,
    pub oversample: usize,
    pub projection: ProjectionOptions,
    /// IA re-synthesizes `G_m` from its exact coefficients this often.
    pub resynth_every: usize,
    /// Store a full coefficient snapshot in every trace step.
    pub keep_snapshots: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self {
            backend: Backend::Auto,
            oversample: 4,
            projection: ProjectionOptions::default(),
            resynth_every: 32,
            keep_snapshots: true,
        }
    }
}

impl GreedyOptions {
    pub(crate) fn use_coordinates(&self, p: f64) -> Result<bool> {
        match self.backend {
            Backend::Auto => Ok(p == 2.0),
            Backend::Grid => Ok(false),
            Backend::Coordinates if p == 2.0 => Ok(true),
            Backend::Coordinates => Err(Error::InvalidParameter(format!(
                "coordinate backend needs p = 2, got {p}"
            ))),
        }
    }
}

pub(crate) fn check_target(f: &TrigPolynomial, dict: &TrigDictionary) -> Result<()> {
    if f.dim() != dict.dim {
        return Err(Error::DimensionMismatch {
            expected: dict.dim,
            got: f.dim(),
        });
    }
    if !f.is_real(1e-12 * f.a_norm().max(1e-300)) {
        return Err(Error::InvalidParameter("target must be real valued".into()));
    }
    if dict.is_empty() {
        return Err(Error::InvalidParameter("empty dictionary".into()));
    }
    Ok(())
}

/// `Σ |t̂(k)|²` over frequencies whose magnitude vector has no atom.
pub(crate) fn energy_outside(f: &TrigPolynomial, dict: &TrigDictionary) -> f64 {
    f.iter()
        .filter(|(k, _)| !dict.contains_magnitude(&k.0))
        .map(|(_, c)| c.norm_sqr())
        .sum()
}

/// Per-axis maximum of the dictionary box and the target's support.
pub(crate) fn joint_bounds(f: &TrigPolynomial, dict: &TrigDictionary) -> Vec<u64> {
    f.max_abs_freq()
        .into_iter()
        .zip(&dict.bounds)
        .map(|(a, &b)| a.max(b))
        .collect()
}
