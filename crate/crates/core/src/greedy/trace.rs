use super::dictionary::{AtomId, DictionaryAtom};
use crate::error::Result;
use crate::trig::TrigPolynomial;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Wcga,
    Ia,
}

/// Coefficients of the selected atoms, in order of first selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coefficients {
    Real { values: Vec<f64> },
    /// `(plus_i - minus_i) / denominator`, where `plus_i` and `minus_i`
    /// count how often `+φ_i` and `-φ_i` were chosen.
    Rational {
        plus: Vec<u64>,
        minus: Vec<u64>,
        denominator: u64,
    },
}

impl Coefficients {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Coefficients::Real { values } => values.clone(),
            Coefficients::Rational {
                plus,
                minus,
                denominator,
            } => plus
                .iter()
                .zip(minus)
                .map(|(&a, &b)| (a as f64 - b as f64) / *denominator as f64)
                .collect(),
        }
    }

    /// SHA-256 of the little-endian coefficient bytes, first 16 hex digits.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        match self {
            Coefficients::Real { values } => {
                for v in values {
                    h.update(v.to_le_bytes());
                }
            }
            Coefficients::Rational {
                plus,
                minus,
                denominator,
            } => {
                for (a, b) in plus.iter().zip(minus) {
                    h.update(a.to_le_bytes());
                    h.update(b.to_le_bytes());
                }
                h.update(denominator.to_le_bytes());
            }
        }
        h.finalize()
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub atom: AtomId,
    /// `+1` or `-1`; WCGA always reports `+1`.
    pub sign: i8,
    pub score: f64,
    /// `‖f_m‖_p` after the step, in the scale of the input `f`.
    pub residual_p: f64,
    pub coeffs_digest: String,
    /// Full snapshot, kept when requested.
    pub coeffs: Option<Coefficients>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationTrace {
    pub algorithm: Algorithm,
    /// Weakness `t` (WCGA) or schedule constant `v` (IA).
    pub param: f64,
    pub p: f64,
    pub initial_norm: f64,
    pub selected: Vec<DictionaryAtom>,
    pub steps: Vec<TraceStep>,
    pub coefficients: Coefficients,
    pub approximant: TrigPolynomial,
    /// True when the run stopped because the residual vanished.
    pub converged: bool,
}

#[derive(Serialize)]
struct Line<'a> {
    step: usize,
    atom: &'a AtomId,
    score: f64,
    residual_p: f64,
    coeffs_digest: &'a str,
}

impl ApproximationTrace {
    /// Residual norms after steps `1..=m`.
    pub fn residuals(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.residual_p).collect()
    }

    /// Residual after `m` steps (`m = 0` is the input norm). Runs that
    /// stopped early keep their last residual.
    pub fn residual_after(&self, m: usize) -> f64 {
        if m == 0 {
            return self.initial_norm;
        }
        self.steps
            .get(m.min(self.steps.len()).saturating_sub(1))
            .map_or(self.initial_norm, |s| s.residual_p)
    }

    /// One JSON object per step.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for s in &self.steps {
            let line = Line {
                step: s.step,
                atom: &s.atom,
                score: s.score,
                residual_p: s.residual_p,
                coeffs_digest: &s.coeffs_digest,
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}
