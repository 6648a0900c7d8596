use super::curve::Target;
use crate::classes::ClassSpec;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Predicted decay `m^{-ρ} (log m)^κ` of the best m-term error in one regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateLaw {
    pub rho: f64,
    pub kappa: f64,
    /// Short identifier of the regime, e.g. `w/q<=2<=p`.
    pub regime: String,
    /// The smoothness condition the regime assumes.
    pub guard: String,
}

impl RateLaw {
    pub fn predicted(&self, m: f64) -> f64 {
        m.powf(-self.rho) * m.ln().powf(self.kappa)
    }
}

fn law(rho: f64, kappa: f64, regime: &str, guard: &str, holds: bool) -> Result<RateLaw> {
    if !holds {
        return Err(Error::Guard(format!("regime {regime} needs {guard}")));
    }
    Ok(RateLaw {
        rho,
        kappa,
        regime: regime.into(),
        guard: guard.into(),
    })
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter(format!("exponent p = {p} must exceed 1")));
    }
    Ok(())
}

/// Rate exponents `(ρ, κ)` for `σ_m(target)_p`, selected by regime. Upper
/// bounds at `p = ∞` carry an extra `1/2` on the log power.
pub fn rate_law(target: &Target, p: f64) -> Result<RateLaw> {
    check_p(p)?;
    match *target {
        Target::Class(spec) => {
            spec.validate()?;
            match spec {
                ClassSpec::W { r, q, d } => w_law(r, q, d, p),
                ClassSpec::H { r, q, d } => block_law(r, q, f64::INFINITY, d, p, "h"),
                ClassSpec::B { r, q, theta, d } => block_law(r, q, theta, d, p, "b"),
                ClassSpec::HTheta { r, q, theta, d } => block_law(r, q, theta, d, p, "htheta"),
                ClassSpec::WAb { a, b, d } => {
                    let dm = d as f64 - 1.0;
                    if p < 2.0 {
                        return Err(Error::Unsupported(format!("layer-decay classes need p >= 2, got {p}")));
                    }
                    let extra = if p.is_infinite() { 0.5 } else { 0.0 };
                    law(a + 0.5, dm * (a + b) + extra, "wab/p>=2", "a > 0", a > 0.0)
                }
            }
        }
        Target::Kernel { r, d } => {
            let dm = d as f64 - 1.0;
            if p.is_infinite() {
                law(r - 0.5, r * dm + 0.5, "kernel/p=inf", "r > 1", r > 1.0)
            } else if p <= 2.0 {
                let g = 1.0 - 1.0 / p;
                law(r - g, dm * (r - 1.0 + 2.0 / p), "kernel/p<=2", "r > 1 - 1/p", r > g)
            } else {
                law(r - 0.5, r * dm, "kernel/2<=p", "r > 1", r > 1.0)
            }
        }
    }
}

fn w_law(r: f64, q: f64, d: usize, p: f64) -> Result<RateLaw> {
    let dm = d as f64 - 1.0;
    let eta = 1.0 / q - 0.5;
    if p.is_infinite() {
        return if q <= 2.0 {
            law(r - eta, dm * (r - 2.0 * eta) + 0.5, "w/q<=2,p=inf", "r > 1/q", r > 1.0 / q)
        } else {
            law(r, r * dm + 0.5, "w/2<=q,p=inf", "r > 1/2", r > 0.5)
        };
    }
    let beta = 1.0 / q - 1.0 / p;
    if p < q {
        law(r, r * dm, "w/p<q", "r > 0", r > 0.0)
    } else if p <= 2.0 {
        law(r - beta, dm * (r - 2.0 * beta), "w/q<=p<=2", "r > 2(1/q - 1/p)", r > 2.0 * beta)
    } else if q <= 2.0 {
        law(r - eta, dm * (r - 2.0 * eta), "w/q<=2<=p", "r > 1/q", r > 1.0 / q)
    } else {
        law(r, r * dm, "w/2<=q<=p", "r > 1/2", r > 0.5)
    }
}

/// `H`, `B` and `H_θ` share one table; `θ = ∞` is `H`.
fn block_law(r: f64, q: f64, theta: f64, d: usize, p: f64, name: &str) -> Result<RateLaw> {
    let dm = d as f64 - 1.0;
    let it = 1.0 / theta;
    let eta = 1.0 / q - 0.5;
    let id = |tail: &str| format!("{name}/{tail}");
    if p.is_infinite() {
        return if q <= 2.0 {
            law(r - eta, dm * (r - 1.0 / q + 1.0 - it) + 0.5, &id("q<=2,p=inf"), "r > 1/q", r > 1.0 / q)
        } else {
            law(r, dm * (r + 0.5 - it) + 0.5, &id("2<=q,p=inf"), "r > 1/2", r > 0.5)
        };
    }
    let beta = 1.0 / q - 1.0 / p;
    if p < q {
        if q >= 2.0 && theta.is_infinite() {
            law(r, dm * (r + 0.5), &id("p<q,2<=q"), "r > 0", r > 0.0)
        } else {
            Err(Error::Unsupported(format!(
                "no rate for {name} with p = {p} < q = {q} in this table"
            )))
        }
    } else if p <= 2.0 {
        law(r - beta, dm * (r - beta + 1.0 / p - it), &id("q<=p<=2"), "r > 1/q - 1/p", r > beta)
    } else if q <= 2.0 {
        law(r - eta, dm * (r - 1.0 / q + 1.0 - it), &id("q<=2<=p"), "r > 1/q", r > 1.0 / q)
    } else {
        law(r, dm * (r + 0.5 - it), &id("2<=q<=p"), "r > 1/2", r > 0.5)
    }
}

/// `(a, b)` with `‖f_l‖_A ≪ 2^{-al} l^{(d-1)b}` on the target; `q` above 2
/// is treated as 2.
pub fn layer_decay(target: &Target) -> Result<(f64, f64)> {
    match *target {
        Target::Class(spec) => {
            spec.validate()?;
            Ok(match spec {
                ClassSpec::W { r, q, .. } => {
                    let qt = q.min(2.0);
                    (r - 1.0 / qt, 1.0 - 1.0 / qt)
                }
                ClassSpec::H { r, q, .. } => (r - 1.0 / q.min(2.0), 1.0),
                ClassSpec::B { r, q, theta, .. } | ClassSpec::HTheta { r, q, theta, .. } => {
                    (r - 1.0 / q.min(2.0), 1.0 - 1.0 / theta)
                }
                ClassSpec::WAb { a, b, .. } => (a, b),
            })
        }
        Target::Kernel { r, .. } => Ok((r - 1.0, 1.0)),
    }
}
