use super::cubature::{knot_values, median};
use super::knots::{Knot, KnotSet};
use crate::classes::{sample_class, ClassSpec};
use crate::error::{Error, Result};
use crate::layered::lp_error;
use crate::trig::{FrequencyIndex, IndexSet, TrigPolynomial};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `Ψ(f, X) = Σ f(ξ^j) ψ_j`.
pub fn recovery_apply(f: &TrigPolynomial, x: &KnotSet, psis: &[TrigPolynomial]) -> Result<TrigPolynomial> {
    if psis.len() != x.len() {
        return Err(Error::LengthMismatch(format!(
            "{} recovery functions for {} knots",
            psis.len(),
            x.len()
        )));
    }
    let vals = knot_values(f, x)?;
    let mut out = TrigPolynomial::zero(x.d);
    for (v, psi) in vals.iter().zip(psis) {
        if *v != 0.0 {
            out = out.add(&psi.scale(*v))?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryStats {
    pub errors: Vec<f64>,
    pub max: f64,
    pub median: f64,
}

/// `‖f - Ψ(f, X)‖_p` over random class members on `Q_{l_max}`; a lower
/// estimate of the class supremum.
pub fn recovery_error(
    spec: ClassSpec,
    x: &KnotSet,
    psis: &[TrigPolynomial],
    p: f64,
    l_max: u32,
    seeds: &[u64],
) -> Result<RecoveryStats> {
    let truncation = IndexSet::step_cross(spec.dim(), l_max);
    let errors = crate::par::map_slice(seeds, |&seed| -> Result<f64> {
        let f = sample_class(spec, &truncation, seed)?.f;
        let g = recovery_apply(&f, x, psis)?;
        lp_error(&f.sub(&g)?, p)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(RecoveryStats {
        max: errors.iter().cloned().fold(0.0, f64::max),
        median: median(&errors),
        errors,
    })
}

/// Equispaced knots `2πj/2^n` with rectangle weights and the cardinal
/// Dirichlet functions `ψ_j(x) = 2^{-n} D*(x - ξ^j)`, where `D*` is the
/// Dirichlet kernel of order `2^{n-1}` with halved extreme terms. The
/// operator reproduces `T(2^{n-1} - 1)` and `ψ_j(ξ^i) = δ_ij`.
pub fn dirichlet_cardinal(n: u32) -> Result<(KnotSet, Vec<TrigPolynomial>)> {
    if n > 20 {
        return Err(Error::InvalidParameter(format!("grid level {n} too large")));
    }
    let m = 1i64 << n;
    let mut points = Vec::with_capacity(m as usize);
    let mut psis = Vec::with_capacity(m as usize);
    let half = m / 2;
    for j in 0..m {
        points.push(Knot::exact(vec![2 * j], vec![n])?);
        let xj = std::f64::consts::TAU * j as f64 / m as f64;
        let mut psi = TrigPolynomial::zero(1);
        if m == 1 {
            psi.set(FrequencyIndex(vec![0]), Complex64::new(1.0, 0.0));
        } else {
            for k in -half..=half {
                let w = if k.abs() == half { 0.5 } else { 1.0 };
                psi.set(FrequencyIndex(vec![k]), Complex64::from_polar(w / m as f64, -(k as f64) * xj));
            }
        }
        psis.push(psi);
    }
    let weights = vec![1.0 / m as f64; m as usize];
    Ok((KnotSet::new(1, points, Some(weights))?, psis))
}
