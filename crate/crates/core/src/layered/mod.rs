//! m-term methods built from greedy runs.
//!
//! [`g_p_m`] runs the Incremental Algorithm on `t/‖t‖` in `L_p` and rescales,
//! [`g_inf_m`] does the same with `p ≍ ln ϑ(N)` for uniform-norm targets, and
//! [`a_m`] assembles the layered approximant `S_n(f) + Σ_{l>n} G_{m_l}(f_l)`.

mod curve;
mod rates;

pub use curve::{kernel_l2_tail, kernel_target, sigma_upper_curve, zeta, CurveRow, Target};
pub use rates::{layer_decay, rate_law, RateLaw};

use crate::classes::ClassSample;
use crate::error::{Error, Result};
use crate::greedy::{ia_epsilon, ApproximationTrace, GreedyOptions, IaSchedule, TrigDictionary};
use crate::trig::{hyperbolic_partial_sum, layer, norm, Exponent, QuadratureOptions, TrigPolynomial};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Output of one rescaled greedy run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledGreedy {
    /// `‖t‖` times the IA approximant of `t/‖t‖`.
    pub approximant: TrigPolynomial,
    /// Dictionary norm `Σ|b_i|` of the input in the normalized real atoms.
    pub scale: f64,
    #[serde(with = "crate::extended")]
    pub p: f64,
    /// The underlying run on the normalized target; `None` when `m = 0`.
    pub trace: Option<ApproximationTrace>,
}

/// [`g_p_m`] keeping the normalization constant and the IA trace.
pub fn g_p_m_detailed(t: &TrigPolynomial, m: usize, p: f64, opts: &GreedyOptions) -> Result<ScaledGreedy> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("greedy exponent p = {p} must lie in [2, inf)")));
    }
    let dict = TrigDictionary::for_support(t.dim(), t.keys(), p)?;
    let scale = dict.a_norm(t)?;
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter("cannot normalize the zero polynomial".into()));
    }
    if m == 0 {
        return Ok(ScaledGreedy {
            approximant: TrigPolynomial::zero(t.dim()),
            scale,
            p,
            trace: None,
        });
    }
    let schedule = IaSchedule::for_lp(p, 1.0)?;
    let trace = ia_epsilon(&t.scale(1.0 / scale), &dict, &schedule, m, opts)?;
    Ok(ScaledGreedy {
        approximant: trace.approximant.scale(scale),
        scale,
        p,
        trace: Some(trace),
    })
}

/// `G^p_m(t)`: at most `m` real atoms, dictionary norm equal to that of `t`.
pub fn g_p_m(t: &TrigPolynomial, m: usize, p: f64, opts: &GreedyOptions) -> Result<TrigPolynomial> {
    Ok(g_p_m_detailed(t, m, p, opts)?.approximant)
}

/// `ϑ(N) = ∏(2N_j + 1)`.
pub fn box_size(bounds: &[u64]) -> f64 {
    bounds.iter().map(|&n| (2 * n + 1) as f64).product()
}

/// `max(2, ⌈ln ϑ⌉)`; values within `1e-9` of an integer round down.
pub fn inf_exponent(theta: f64) -> f64 {
    (theta.ln() - 1e-9).ceil().max(2.0)
}

/// `G^∞_m(t)`: [`g_p_m`] with `p = max(2, ⌈ln ϑ(N)⌉)` for the smallest box
/// `N` containing the support of `t`.
pub fn g_inf_m(t: &TrigPolynomial, m: usize, opts: &GreedyOptions) -> Result<ScaledGreedy> {
    let p = inf_exponent(box_size(&t.max_abs_freq()));
    g_p_m_detailed(t, m, p, opts)
}

/// `m_l = ⌊2^{n-μ(l-n)} l^{d-1}⌋` for `n < l ≤ l_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSchedule {
    pub n: u32,
    pub mu: f64,
    pub d: usize,
    pub l_max: u32,
    pub m_l: BTreeMap<u32, usize>,
}

impl LayerSchedule {
    pub fn new(n: u32, mu: f64, d: usize, l_max: u32) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("decay parameter mu = {mu} must be positive")));
        }
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let m_l = (n + 1..=l_max)
            .map(|l| {
                let v = 2f64.powf(n as f64 - mu * (l - n) as f64) * (l as f64).powi(d as i32 - 1);
                (l, v.floor() as usize)
            })
            .collect();
        Ok(Self { n, mu, d, l_max, m_l })
    }

    pub fn budget(&self, l: u32) -> usize {
        self.m_l.get(&l).copied().unwrap_or(0)
    }

    /// `2^n max(n,1)^{d-1}`, the nominal size of the approximant.
    pub fn nominal_terms(&self) -> f64 {
        2f64.powi(self.n as i32) * (self.n.max(1) as f64).powi(self.d as i32 - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructiveApproximant {
    pub schedule: LayerSchedule,
    #[serde(with = "crate::extended")]
    pub p: f64,
    /// `S_n(f)`.
    pub base: TrigPolynomial,
    /// `G_{m_l}(f_l)` for the nonempty layers `l > n`.
    pub layer_parts: BTreeMap<u32, TrigPolynomial>,
    /// Support sizes of the base plus all layer parts.
    pub total_terms: usize,
    /// `‖f_l - G_{m_l}(f_l)‖_p` per nonempty layer.
    pub errors: BTreeMap<u32, f64>,
    /// `‖f - A_m(f)‖_p` for the truncated `f` (a lower estimate at `p = ∞`).
    pub total_error: f64,
    /// Norm of the part of the target beyond the truncation, when known.
    pub tail: f64,
}

impl ConstructiveApproximant {
    pub fn approximant(&self) -> Result<TrigPolynomial> {
        let mut acc = self.base.clone();
        for part in self.layer_parts.values() {
            acc = acc.add(part)?;
        }
        Ok(acc)
    }

    /// Error including the known tail: combined in quadrature at `p = 2`
    /// (orthogonality), added otherwise.
    pub fn error_with_tail(&self) -> f64 {
        if self.p == 2.0 {
            self.total_error.hypot(self.tail)
        } else {
            self.total_error + self.tail
        }
    }
}

fn check_layer_exponent(p: f64) -> Result<()> {
    if !(p >= 2.0) {
        return Err(Error::InvalidParameter(format!("layered method needs p >= 2, got {p}")));
    }
    Ok(())
}

pub(crate) fn lp_error(t: &TrigPolynomial, p: f64) -> Result<f64> {
    if t.is_empty() {
        return Ok(0.0);
    }
    if p == 2.0 {
        Ok(t.l2_norm())
    } else if p.is_infinite() {
        norm(t, Exponent::Inf, &QuadratureOptions::default())
    } else {
        norm(t, Exponent::P(p), &QuadratureOptions::default())
    }
}

/// `S_n(f) + Σ_{l>n} G_{m_l}(f_l)` without a class guard on `μ`. Layers up
/// to the top layer of `f` are processed in parallel; at `p = ∞` each layer
/// goes through [`g_inf_m`].
pub fn layered_approx(
    f: &TrigPolynomial,
    p: f64,
    mu: f64,
    n: u32,
    opts: &GreedyOptions,
) -> Result<ConstructiveApproximant> {
    check_layer_exponent(p)?;
    let l_max = f.max_layer().unwrap_or(0).max(n);
    let schedule = LayerSchedule::new(n, mu, f.dim(), l_max)?;
    let base = hyperbolic_partial_sum(f, n);
    let layers: Vec<(u32, TrigPolynomial)> = (n + 1..=l_max)
        .map(|l| (l, layer(f, l)))
        .filter(|(_, fl)| !fl.is_empty())
        .collect();
    let results = crate::par::map_slice(&layers, |(l, fl)| -> Result<(u32, TrigPolynomial, f64)> {
        let m = schedule.budget(*l);
        let part = if m == 0 {
            TrigPolynomial::zero(f.dim())
        } else if p.is_infinite() {
            g_inf_m(fl, m, opts)?.approximant
        } else {
            g_p_m(fl, m, p, opts)?
        };
        let part = part.pruned(0.0);
        let err = lp_error(&fl.sub(&part)?, p)?;
        Ok((*l, part, err))
    });
    let mut layer_parts = BTreeMap::new();
    let mut errors = BTreeMap::new();
    let mut total_terms = base.len();
    let mut approx = base.clone();
    for r in results {
        let (l, part, err) = r?;
        total_terms += part.len();
        approx = approx.add(&part)?;
        layer_parts.insert(l, part);
        errors.insert(l, err);
    }
    let total_error = lp_error(&f.sub(&approx)?, p)?;
    Ok(ConstructiveApproximant {
        schedule,
        p,
        base,
        layer_parts,
        total_terms,
        errors,
        total_error,
        tail: 0.0,
    })
}

/// [`layered_approx`] on a class sample, enforcing `0 < μ < a` for the
/// class's layer decay `a`. The sample is the truncated function itself, so
/// no tail is added.
pub fn a_m(sample: &ClassSample, p: f64, mu: f64, n: u32, opts: &GreedyOptions) -> Result<ConstructiveApproximant> {
    let (a, _) = layer_decay(&Target::Class(sample.spec))?;
    check_mu(mu, a)?;
    layered_approx(&sample.f, p, mu, n, opts)
}

pub(crate) fn check_mu(mu: f64, a: f64) -> Result<()> {
    if !(mu > 0.0 && mu < a) {
        return Err(Error::Guard(format!(
            "decay parameter needs 0 < mu < a, got mu = {mu}, a = {a}"
        )));
    }
    Ok(())
}

/// The hyperbolic-cross method alone: `S_n(f)` and its error.
pub fn hyperbolic_cross_approx(f: &TrigPolynomial, n: u32, p: f64) -> Result<(TrigPolynomial, f64)> {
    let s = hyperbolic_partial_sum(f, n);
    let err = lp_error(&f.sub(&s)?, p)?;
    Ok((s, err))
}
