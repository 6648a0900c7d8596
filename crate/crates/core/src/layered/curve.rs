use super::{check_mu, layer_decay, layered_approx, rate_law};
use crate::classes::{bernoulli_coeffs, sample_class, ClassSpec};
use crate::error::{Error, Result};
use crate::greedy::GreedyOptions;
use crate::trig::{IndexSet, TrigPolynomial};
use serde::{Deserialize, Serialize};

/// What a rate curve approximates: random members of a class, or the
/// Bernoulli kernel `F_r` itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Class(ClassSpec),
    Kernel { r: f64, d: usize },
}

impl Target {
    pub fn dim(&self) -> usize {
        match self {
            Target::Class(spec) => spec.dim(),
            Target::Kernel { d, .. } => *d,
        }
    }

    /// `(r, q, θ)` where they apply.
    pub fn parameters(&self) -> (Option<f64>, Option<f64>, Option<f64>) {
        match *self {
            Target::Kernel { r, .. } => (Some(r), None, None),
            Target::Class(spec) => match spec {
                ClassSpec::W { r, q, .. } | ClassSpec::H { r, q, .. } => (Some(r), Some(q), None),
                ClassSpec::B { r, q, theta, .. } | ClassSpec::HTheta { r, q, theta, .. } => {
                    (Some(r), Some(q), Some(theta))
                }
                ClassSpec::WAb { .. } => (None, None, None),
            },
        }
    }
}

/// Riemann zeta for `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    const N: usize = 32;
    let n = N as f64;
    let head: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Bernoulli numbers B_2, B_4, B_6, B_8 over (2j)!.
    let coef = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0];
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (j, c) in coef.iter().enumerate() {
        tail += c * rising * power;
        let k = (2 * j + 1) as f64;
        rising *= (s + k) * (s + k + 1.0);
        power /= n * n;
    }
    head + tail
}

/// `F_r` truncated to the step hyperbolic cross `Q_{l_max}`.
pub fn kernel_target(r: f64, d: usize, l_max: u32) -> Result<TrigPolynomial> {
    bernoulli_coeffs(r, &IndexSet::step_cross(d, l_max))
}

/// `‖F_r - S_{l_max}(F_r)‖_2` from `‖F_r‖_2² = (1 + 2ζ(2r))^d`.
pub fn kernel_l2_tail(r: f64, d: usize, l_max: u32) -> Result<f64> {
    if !(r > 0.5) {
        return Err(Error::Guard(format!("F_r is square integrable only for r > 1/2, got {r}")));
    }
    let total = (1.0 + 2.0 * zeta(2.0 * r)).powi(d as i32);
    let kept = kernel_target(r, d, l_max)?.l2_norm().powi(2);
    Ok((total - kept).max(0.0).sqrt())
}

/// One run of the layered method on one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub regime: String,
    pub d: usize,
    pub r: Option<f64>,
    pub q: Option<f64>,
    #[serde(with = "crate::extended")]
    pub p: f64,
    pub theta: Option<f64>,
    pub mu: f64,
    pub n: u32,
    pub seed: u64,
    pub m: usize,
    pub error_p: f64,
    pub predicted: f64,
    pub ratio: f64,
}

/// Runs the layered method for every `(n, seed)` and tabulates the realized
/// `m`, the error and the predicted rate `m^{-ρ}(log m)^κ`. Class targets
/// are sampled on `Q_{l_max}`; the kernel target is deterministic and its
/// `L_2` tail beyond `Q_{l_max}` is folded into the error at `p = 2`.
pub fn sigma_upper_curve(
    target: &Target,
    p: f64,
    mu: f64,
    n_range: &[u32],
    seeds: &[u64],
    l_max: u32,
    opts: &GreedyOptions,
) -> Result<Vec<CurveRow>> {
    let law = rate_law(target, p)?;
    let (a, _) = layer_decay(target)?;
    check_mu(mu, a)?;
    if let Some(&n) = n_range.iter().find(|&&n| n > l_max) {
        return Err(Error::InvalidParameter(format!("level n = {n} exceeds truncation {l_max}")));
    }
    let d = target.dim();
    let samples: Vec<(u64, TrigPolynomial, f64)> = crate::par::map_slice(seeds, |&seed| -> Result<_> {
        Ok(match *target {
            Target::Class(spec) => (seed, sample_class(spec, &IndexSet::step_cross(d, l_max), seed)?.f, 0.0),
            Target::Kernel { r, .. } => {
                let tail = if p == 2.0 { kernel_l2_tail(r, d, l_max)? } else { 0.0 };
                (seed, kernel_target(r, d, l_max)?, tail)
            }
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let jobs: Vec<(u32, usize)> = n_range
        .iter()
        .flat_map(|&n| (0..samples.len()).map(move |i| (n, i)))
        .collect();
    let (r, q, theta) = target.parameters();
    let mut rows = crate::par::map_slice(&jobs, |&(n, i)| -> Result<CurveRow> {
        let (seed, f, tail) = &samples[i];
        let mut run = layered_approx(f, p, mu, n, opts)?;
        run.tail = *tail;
        let m = run.total_terms;
        let error_p = run.error_with_tail();
        let predicted = law.predicted(m as f64);
        Ok(CurveRow {
            regime: law.regime.clone(),
            d,
            r,
            q,
            p,
            theta,
            mu,
            n,
            seed: *seed,
            m,
            error_p,
            predicted,
            ratio: error_p / predicted,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.n.cmp(&b.n).then(a.seed.cmp(&b.seed)));
    Ok(rows)
}
