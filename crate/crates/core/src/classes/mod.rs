//! Mixed-smoothness function classes.
//!
//! Class members are finite truncations. `W^r_q` members are `f = φ ∗ F_r`
//! with `‖φ‖_q = 1`; the block classes `H^r_q`, `B^r_{q,θ}`, `H^r_{q,θ}` and
//! the A-norm layer class `W^{a,b}_A` are sampled block by block and scaled so
//! their defining norm is exactly one.

use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use crate::trig::{
    block_of, norm, Exponent, FrequencyIndex, IndexSet, QuadratureOptions, TrigPolynomial,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};

/// Exponent of the `|φ̂(k)|` profile `(∏ max(|k_j|, 1))^{-1/2-δ}`.
pub const PHI_PROFILE_DELTA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ClassSpec {
    /// `W^r_q`: `f = φ ∗ F_r`, `‖φ‖_q ≤ 1`.
    W { r: f64, q: f64, d: usize },
    /// `H^r_q`: `sup_s ‖δ_s f‖_q 2^{r‖s‖₁} ≤ 1`.
    H { r: f64, q: f64, d: usize },
    /// `B^r_{q,θ}`: `(Σ_s (‖δ_s f‖_q 2^{r‖s‖₁})^θ)^{1/θ} ≤ 1`.
    B {
        r: f64,
        q: f64,
        #[serde(with = "crate::extended")]
        theta: f64,
        d: usize,
    },
    /// `H^r_{q,θ}`: `sup_n (Σ_{‖s‖₁=n} (‖δ_s f‖_q 2^{rn})^θ)^{1/θ} ≤ 1`.
    HTheta {
        r: f64,
        q: f64,
        #[serde(with = "crate::extended")]
        theta: f64,
        d: usize,
    },
    /// `W^{a,b}_A`: `‖f_l‖_A ≤ 2^{-al} max(l,1)^{(d-1)b}` for every layer.
    WAb { a: f64, b: f64, d: usize },
}

impl ClassSpec {
    pub fn dim(&self) -> usize {
        match *self {
            ClassSpec::W { d, .. }
            | ClassSpec::H { d, .. }
            | ClassSpec::B { d, .. }
            | ClassSpec::HTheta { d, .. }
            | ClassSpec::WAb { d, .. } => d,
        }
    }

    /// `(r, q)` for the smoothness classes, `None` for `W^{a,b}_A`.
    pub fn smoothness(&self) -> Option<(f64, f64)> {
        match *self {
            ClassSpec::W { r, q, .. }
            | ClassSpec::H { r, q, .. }
            | ClassSpec::B { r, q, .. }
            | ClassSpec::HTheta { r, q, .. } => Some((r, q)),
            ClassSpec::WAb { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.dim() == 0 {
            return bad("dimension must be positive".into());
        }
        if let Some((r, q)) = self.smoothness() {
            if !(r > 0.0) {
                return bad(format!("smoothness r = {r} must be positive"));
            }
            if !(q > 1.0 && q.is_finite()) {
                return bad(format!("integrability q = {q} must lie in (1, inf)"));
            }
        }
        match *self {
            ClassSpec::W { r, q, .. } if r <= 1.0 / q => Err(Error::Guard(format!(
                "W class needs r > 1/q for continuity, got r = {r}, q = {q}"
            ))),
            ClassSpec::B { theta, .. } | ClassSpec::HTheta { theta, .. } if !(theta >= 1.0) => {
                bad(format!("summability theta = {theta} must be at least 1"))
            }
            ClassSpec::WAb { a, b, .. } if !a.is_finite() || !b.is_finite() => {
                bad("a and b must be finite".into())
            }
            _ => Ok(()),
        }
    }
}

/// Values recomputed after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `‖φ‖_q` by quadrature (W only).
    pub phi_norm: Option<f64>,
    /// Defining norm of `f` (block classes).
    pub class_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSample {
    pub f: TrigPolynomial,
    pub spec: ClassSpec,
    pub phi: Option<TrigPolynomial>,
    pub truncation: IndexSet,
    pub seed: u64,
    pub certificate: Certificate,
}

/// Univariate `F̂_r(k)`.
pub fn bernoulli_coeff_1d(r: f64, k: i64) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mag = (k.unsigned_abs() as f64).powf(-r);
    Complex64::from_polar(mag, -(k.signum() as f64) * r * FRAC_PI_2)
}

/// `F̂_r(k) = ∏_j F̂_r(k_j)`.
pub fn bernoulli_coeff(r: f64, k: &[i64]) -> Complex64 {
    k.iter().map(|&kj| bernoulli_coeff_1d(r, kj)).product()
}

/// Coefficients of the multivariate Bernoulli kernel `F_r` on `truncation`.
pub fn bernoulli_coeffs(r: f64, truncation: &IndexSet) -> Result<TrigPolynomial> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("r = {r} must be positive")));
    }
    TrigPolynomial::from_entries(
        truncation.dim,
        truncation
            .members()
            .into_iter()
            .map(|k| {
                let c = bernoulli_coeff(r, &k.0);
                (k, c)
            }),
    )
}

/// `L_q` norm used for block norms: Parseval at `q = 2`, quadrature otherwise.
pub fn block_lq(t: &TrigPolynomial, q: f64) -> Result<f64> {
    if q == 2.0 {
        Ok(t.l2_norm())
    } else {
        norm(t, Exponent::lp(q), &QuadratureOptions::default())
    }
}

/// Fills the conjugate-symmetric closure of `keys` with values drawn by
/// `draw(k, rng)` on one representative of each `{k, -k}` pair; the result is
/// real valued. The zero frequency gets the real part.
pub(crate) fn random_real<F>(dim: usize, keys: &[FrequencyIndex], rng: &mut Rng, mut draw: F) -> TrigPolynomial
where
    F: FnMut(&FrequencyIndex, &mut Rng) -> Complex64,
{
    let mut t = TrigPolynomial::zero(dim);
    for k in keys {
        let nk = k.neg();
        if *k < nk {
            continue;
        }
        let c = draw(k, rng);
        if *k == nk {
            t.set(k.clone(), Complex64::new(c.re, 0.0));
        } else {
            t.set(k.clone(), c);
            t.set(nk, c.conj());
        }
    }
    t
}

fn complex_normal(rng: &mut Rng) -> Complex64 {
    Complex64::new(rng::normal(rng), rng::normal(rng))
}

fn group_by_block(members: Vec<FrequencyIndex>) -> BTreeMap<Vec<u32>, Vec<FrequencyIndex>> {
    let mut out: BTreeMap<Vec<u32>, Vec<FrequencyIndex>> = BTreeMap::new();
    for k in members {
        out.entry(block_of(&k.0)).or_default().push(k);
    }
    out
}

fn l1(s: &[u32]) -> u32 {
    s.iter().sum()
}

fn lp_sum(vals: impl Iterator<Item = f64>, theta: f64) -> f64 {
    if theta.is_infinite() {
        vals.fold(0.0, f64::max)
    } else {
        vals.map(|v| v.powf(theta)).sum::<f64>().powf(1.0 / theta)
    }
}

/// `W^{a,b}_A` layer budget `2^{-al} max(l,1)^{(d-1)b}`.
pub fn wab_layer_bound(a: f64, b: f64, d: usize, l: u32) -> f64 {
    2f64.powf(-a * l as f64) * (l.max(1) as f64).powf((d as f64 - 1.0) * b)
}

/// Draws a random member of the class, truncated to `truncation`.
pub fn sample_class(spec: ClassSpec, truncation: &IndexSet, seed: u64) -> Result<ClassSample> {
    spec.validate()?;
    let d = spec.dim();
    if truncation.dim != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: truncation.dim,
        });
    }
    let members = truncation.members();
    if members.is_empty() {
        return Err(Error::InvalidParameter("empty truncation".into()));
    }
    let mut rng = rng::stream(seed, 0);
    let mut sample = match spec {
        ClassSpec::W { r, q, .. } => {
            let exponent = -0.5 - PHI_PROFILE_DELTA;
            let phi = random_real(d, &members, &mut rng, |k, rng| {
                let w: f64 = k.0.iter().map(|&kj| kj.unsigned_abs().max(1) as f64).product();
                let phase = TAU * rng::uniform(rng);
                Complex64::from_polar(w.powf(exponent), phase)
            });
            let phi = phi.scale(1.0 / block_lq(&phi, q)?);
            let mut f = TrigPolynomial::zero(d);
            for (k, c) in phi.iter() {
                f.set(k.clone(), c * bernoulli_coeff(r, &k.0));
            }
            let phi_norm = block_lq(&phi, q)?;
            ClassSample {
                f,
                spec,
                phi: Some(phi),
                truncation: truncation.clone(),
                seed,
                certificate: Certificate {
                    phi_norm: Some(phi_norm),
                    class_norm: None,
                },
            }
        }
        ClassSpec::H { r, q, .. }
        | ClassSpec::B { r, q, .. }
        | ClassSpec::HTheta { r, q, .. } => {
            let blocks = group_by_block(members);
            let weights = block_weights(&spec, blocks.keys(), &mut rng);
            let mut f = TrigPolynomial::zero(d);
            for (s, keys) in &blocks {
                let delta = random_real(d, keys, &mut rng, |_, rng| complex_normal(rng));
                let target = weights[s] * 2f64.powf(-r * l1(s) as f64);
                let scaled = delta.scale(target / block_lq(&delta, q)?);
                f = f.add(&scaled)?;
            }
            finish_block_sample(f, spec, truncation, seed)
        }
        ClassSpec::WAb { a, b, .. } => {
            let mut layers: BTreeMap<u32, Vec<FrequencyIndex>> = BTreeMap::new();
            for k in members {
                layers.entry(l1(&block_of(&k.0))).or_default().push(k);
            }
            let mut f = TrigPolynomial::zero(d);
            for (l, keys) in &layers {
                let part = random_real(d, keys, &mut rng, |_, rng| complex_normal(rng));
                let scaled = part.scale(wab_layer_bound(a, b, d, *l) / part.a_norm());
                f = f.add(&scaled)?;
            }
            finish_block_sample(f, spec, truncation, seed)
        }
    };
    sample.truncation = truncation.clone();
    Ok(sample)
}

fn finish_block_sample(f: TrigPolynomial, spec: ClassSpec, truncation: &IndexSet, seed: u64) -> ClassSample {
    let class_norm = class_norm(&f, spec).ok();
    ClassSample {
        f,
        spec,
        phi: None,
        truncation: truncation.clone(),
        seed,
        certificate: Certificate {
            phi_norm: None,
            class_norm,
        },
    }
}

/// Per-block multipliers `w_s` with unit defining aggregate.
fn block_weights<'a>(
    spec: &ClassSpec,
    blocks: impl Iterator<Item = &'a Vec<u32>>,
    rng: &mut Rng,
) -> BTreeMap<Vec<u32>, f64> {
    let blocks: Vec<Vec<u32>> = blocks.cloned().collect();
    match *spec {
        ClassSpec::B { theta, .. } => {
            let raw: Vec<f64> = blocks.iter().map(|_| 0.25 + 0.75 * rng::uniform(rng)).collect();
            let total = lp_sum(raw.iter().copied(), theta);
            blocks.into_iter().zip(raw).map(|(s, w)| (s, w / total)).collect()
        }
        ClassSpec::HTheta { theta, .. } => {
            let raw: Vec<f64> = blocks.iter().map(|_| 0.25 + 0.75 * rng::uniform(rng)).collect();
            let mut per_layer: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
            for (s, w) in blocks.iter().zip(&raw) {
                per_layer.entry(l1(s)).or_default().push(*w);
            }
            let totals: BTreeMap<u32, f64> = per_layer
                .into_iter()
                .map(|(l, ws)| (l, lp_sum(ws.into_iter(), theta)))
                .collect();
            blocks
                .into_iter()
                .zip(raw)
                .map(|(s, w)| {
                    let t = totals[&l1(&s)];
                    (s, w / t)
                })
                .collect()
        }
        _ => blocks.into_iter().map(|s| (s, 1.0)).collect(),
    }
}

/// Defining norm of `f` in a block class (`sup`, `ℓ_θ` over blocks, or
/// `sup` over layers of per-layer `ℓ_θ`); for `W^{a,b}_A` the largest ratio
/// of `‖f_l‖_A` to its layer budget.
pub fn class_norm(f: &TrigPolynomial, spec: ClassSpec) -> Result<f64> {
    spec.validate()?;
    if f.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: f.dim(),
        });
    }
    let blocks = f.blocks();
    match spec {
        ClassSpec::W { .. } => Err(Error::Unsupported(
            "W classes have no block-norm formula".into(),
        )),
        ClassSpec::WAb { a, b, d } => {
            let mut layers: BTreeMap<u32, f64> = BTreeMap::new();
            for (s, t) in &blocks {
                *layers.entry(l1(s)).or_default() += t.a_norm();
            }
            Ok(layers
                .into_iter()
                .map(|(l, v)| v / wab_layer_bound(a, b, d, l))
                .fold(0.0, f64::max))
        }
        ClassSpec::H { r, q, .. } | ClassSpec::B { r, q, .. } | ClassSpec::HTheta { r, q, .. } => {
            let mut weighted: Vec<(u32, f64)> = Vec::with_capacity(blocks.len());
            for (s, t) in &blocks {
                let n = l1(s);
                weighted.push((n, block_lq(t, q)? * 2f64.powf(r * n as f64)));
            }
            Ok(match spec {
                ClassSpec::H { .. } => weighted.iter().map(|w| w.1).fold(0.0, f64::max),
                ClassSpec::B { theta, .. } => lp_sum(weighted.iter().map(|w| w.1), theta),
                ClassSpec::HTheta { theta, .. } => {
                    let mut per_layer: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
                    for (n, v) in weighted {
                        per_layer.entry(n).or_default().push(v);
                    }
                    per_layer
                        .into_values()
                        .map(|vs| lp_sum(vs.into_iter(), theta))
                        .fold(0.0, f64::max)
                }
                _ => unreachable!(),
            })
        }
    }
}

/// `(Σ_s ε_s^p 2^{‖s‖₁(p/q-1)})^{1/p}`, the two-sided estimate of
/// `sup ‖f‖_p` over `‖δ_s f‖_q ≤ ε_s` (for `q < p`) or of `inf ‖f‖_p` over
/// `‖δ_s f‖_q ≥ ε_s` (for `p < q`).
pub fn block_lp_bound(eps: &BTreeMap<Vec<u32>, f64>, p: f64, q: f64) -> Result<f64> {
    let upper = q >= 1.0 && q < p && p.is_finite();
    let lower = p > 1.0 && p < q;
    if !(upper || lower) {
        return Err(Error::Guard(format!(
            "exponents p = {p}, q = {q} need 1 <= q < p < inf or 1 < p < q <= inf"
        )));
    }
    let expo = if q.is_infinite() { -1.0 } else { p / q - 1.0 };
    let mut sum = 0.0;
    for (s, &e) in eps {
        if !(e >= 0.0) {
            return Err(Error::InvalidParameter(format!("negative block bound at {s:?}")));
        }
        sum += e.powf(p) * 2f64.powf(l1(s) as f64 * expo);
    }
    Ok(sum.powf(1.0 / p))
}
