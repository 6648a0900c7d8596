use super::grid::{default_grid, sample, GridFunction};
use super::poly::TrigPolynomial;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Norm selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Exponent {
    /// `L_p` by grid quadrature, `1 < p < ∞`.
    P(f64),
    /// Grid maximum of `|t|`.
    Inf,
    /// `Σ |t̂(k)|`.
    A,
    /// `L_2` by Parseval.
    L2Exact,
}

impl Exponent {
    /// `L_p` exponent with `p = ∞` mapped to [`Exponent::Inf`].
    pub fn lp(p: f64) -> Self {
        if p.is_infinite() {
            Exponent::Inf
        } else {
            Exponent::P(p)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Grid size per axis is the next power of two at least
    /// `oversample·(2 max|k_j| + 1)`.
    pub oversample: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { oversample: 4 }
    }
}

/// A norm value with the grid it was computed on and the difference against
/// the factor-2 refined grid (zero for exact norms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub grid: Vec<usize>,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || p.is_nan() {
        return Err(Error::InvalidParameter(format!("norm exponent {p} must exceed 1")));
    }
    Ok(())
}

fn grid_value(g: &GridFunction, p: Exponent) -> Result<f64> {
    match p {
        Exponent::P(p) => g.lp_norm(p),
        Exponent::Inf => Ok(g.sup_norm()),
        Exponent::A | Exponent::L2Exact => Err(Error::Unsupported(
            "coefficient norms need a polynomial, not samples".into(),
        )),
    }
}

/// Norm of a polynomial on the default grid.
pub fn norm(t: &TrigPolynomial, p: Exponent, opts: &QuadratureOptions) -> Result<f64> {
    match p {
        Exponent::A => Ok(t.a_norm()),
        Exponent::L2Exact => Ok(t.l2_norm()),
        Exponent::P(q) => {
            check_p(q)?;
            let g = sample(t, &default_grid(&t.max_abs_freq(), opts.oversample))?;
            grid_value(&g, p)
        }
        Exponent::Inf => {
            let g = sample(t, &default_grid(&t.max_abs_freq(), opts.oversample))?;
            Ok(g.sup_norm())
        }
    }
}

/// Like [`norm`], also evaluating on a grid twice as fine per axis and
/// reporting the difference.
pub fn norm_with_error(
    t: &TrigPolynomial,
    p: Exponent,
    opts: &QuadratureOptions,
) -> Result<NormEstimate> {
    match p {
        Exponent::A | Exponent::L2Exact => Ok(NormEstimate {
            value: norm(t, p, opts)?,
            error_estimate: 0.0,
            grid: Vec::new(),
        }),
        Exponent::P(_) | Exponent::Inf => {
            if let Exponent::P(q) = p {
                check_p(q)?;
            }
            let grid = default_grid(&t.max_abs_freq(), opts.oversample);
            let value = grid_value(&sample(t, &grid)?, p)?;
            let fine: Vec<usize> = grid.iter().map(|m| 2 * m).collect();
            let refined = grid_value(&sample(t, &fine)?, p)?;
            Ok(NormEstimate {
                value,
                error_estimate: (refined - value).abs(),
                grid,
            })
        }
    }
}

/// Norm of grid samples; `p ≤ 1` is rejected like for polynomials.
pub fn grid_norm(g: &GridFunction, p: Exponent) -> Result<f64> {
    if let Exponent::P(q) = p {
        check_p(q)?;
    }
    grid_value(g, p)
}
