use crate::classes::ClassSpec;
use crate::error::{Error, Result};
use crate::greedy::{GreedyOptions, TrigDictionary};
use crate::layered::{layer_decay, rate_law, Target};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// How the unit-norm targets of a greedy rate run are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyTarget {
    /// Coefficients `±1/i` over a random ordering of all atoms.
    Harmonic,
    /// Independent standard normal coefficients.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    /// IA(ε) on targets of unit dictionary norm in the box `bounds`; the
    /// error is `‖t - G_m(t)‖_p`. With `p = inf` the run uses the exponent
    /// `⌈ln ϑ(N)⌉` and reports the sup-grid error.
    IaRate {
        bounds: Vec<u64>,
        #[serde(with = "crate::extended")]
        p: f64,
        m: Vec<usize>,
        target: GreedyTarget,
    },
    /// The layered method `A_m(f, p, μ)` for each `n`.
    Layered {
        target: Target,
        #[serde(with = "crate::extended")]
        p: f64,
        mu: f64,
        n: Vec<u32>,
        l_max: u32,
    },
    /// Smolyak cubature on the sparse grid of each level `n`: the exact
    /// supremum over the class truncated to `Q_{l_max}` where available, plus
    /// sampled errors on `Q_{sample_l_max}`.
    Cubature {
        spec: ClassSpec,
        n: Vec<u32>,
        l_max: u32,
        sample_l_max: u32,
        /// Levels up to this one are checked for exactness on `T(Q_{n-d})`.
        exact_max: u32,
    },
    /// Exhaustive best m-term error against WCGA and IA on random targets.
    Oracle {
        bounds: Vec<u64>,
        p: f64,
        m: usize,
        weakness: f64,
        budget: u64,
    },
    /// WCGA after `⌈m ln(m+1)⌉ · c_iter` steps against `σ_m`.
    Lebesgue {
        bounds: Vec<u64>,
        p: f64,
        m: usize,
        weakness: f64,
        c_iter: usize,
        budget: u64,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::IaRate { .. } => "ia_rate",
            Experiment::Layered { .. } => "layered",
            Experiment::Cubature { .. } => "cubature",
            Experiment::Oracle { .. } => "oracle",
            Experiment::Lebesgue { .. } => "lebesgue",
        }
    }
}

/// Slope band on the fitted rate. `enforce = false` makes a breach a
/// monitored warning instead of a failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeBand {
    pub lo: f64,
    pub hi: f64,
    pub enforce: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub slope: Option<SlopeBand>,
    /// For per-seed fits: fraction of seeds whose slope must lie in the band.
    pub seed_fraction: Option<f64>,
    /// Ceiling on the monitored constant (error over predicted rate, or the
    /// Lebesgue ratio).
    pub monitor_max: Option<f64>,
    /// Slack in "algorithm error >= oracle" and similar comparisons.
    pub slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slope: None,
            seed_fraction: None,
            monitor_max: None,
            slack: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub id: String,
    /// The rate or bound the run checks.
    pub claim: String,
    /// The parameter condition the run satisfies.
    pub guard: String,
    pub experiment: Experiment,
    pub seeds: Vec<u64>,
    /// Grid oversampling for `L_p` quadrature.
    pub oversample: usize,
    pub tolerances: Tolerances,
    /// Default output directory; the command line may override it.
    pub out_dir: Option<String>,
}

fn bad<T>(msg: String) -> Result<T> {
    Err(Error::InvalidParameter(msg))
}

fn check_bounds(bounds: &[u64]) -> Result<()> {
    if bounds.is_empty() || bounds.len() > 4 {
        return bad(format!("box needs 1 to 4 dimensions, got {}", bounds.len()));
    }
    Ok(())
}

fn check_finite_p(p: f64) -> Result<()> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::Guard(format!("greedy runs need 2 <= p < inf, got p = {p}")));
    }
    Ok(())
}

fn check_oracle_budget(bounds: &[u64], p: f64, m: usize, budget: u64) -> Result<()> {
    if budget > 100_000 {
        return bad(format!("oracle budget {budget} exceeds 100000 subsets"));
    }
    let n = TrigDictionary::for_box(bounds, p)?.len();
    let k = m.min(n);
    let count = (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    if p != 2.0 && count > budget as f64 {
        return Err(Error::OracleBudget(format!(
            "{count} subsets of size {k} from {n} atoms exceed the budget {budget}"
        )));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn greedy_options(&self) -> GreedyOptions {
        GreedyOptions {
            oversample: self.oversample,
            keep_snapshots: false,
            ..GreedyOptions::default()
        }
    }

    /// Checks parameters and the regime guard without running anything.
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return bad("experiment id is empty".into());
        }
        if self.oversample < 2 {
            return bad(format!("oversample {} must be at least 2", self.oversample));
        }
        let t = &self.tolerances;
        if let Some(b) = t.slope {
            if !(b.lo < b.hi) {
                return bad(format!("slope band [{}, {}] is empty", b.lo, b.hi));
            }
        }
        if let Some(f) = t.seed_fraction {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("seed fraction {f} must lie in [0, 1]"));
            }
        }
        if !(t.slack >= 0.0) {
            return bad(format!("slack {} must be nonnegative", t.slack));
        }
        match &self.experiment {
            Experiment::IaRate { bounds, p, m, .. } => {
                check_bounds(bounds)?;
                if !p.is_infinite() {
                    check_finite_p(*p)?;
                }
                if m.is_empty() || m.contains(&0) {
                    return bad("term counts must be positive and nonempty".into());
                }
            }
            Experiment::Layered {
                target,
                p,
                mu,
                n,
                l_max,
            } => {
                if !(*p >= 2.0) {
                    return Err(Error::Guard(format!("layered method needs p >= 2, got p = {p}")));
                }
                rate_law(target, *p)?;
                let (a, _) = layer_decay(target)?;
                if !(*mu > 0.0 && *mu < a) {
                    return Err(Error::Guard(format!(
                        "decay parameter needs 0 < mu < a, got mu = {mu}, a = {a}"
                    )));
                }
                if let Some(&k) = n.iter().find(|&&k| k > *l_max) {
                    return bad(format!("level n = {k} exceeds truncation {l_max}"));
                }
                if n.is_empty() {
                    return bad("no levels given".into());
                }
            }
            Experiment::Cubature {
                spec,
                n,
                l_max,
                sample_l_max,
                ..
            } => {
                spec.validate()?;
                match spec.smoothness() {
                    Some((r, q)) if r > 1.0 / q => {}
                    Some((r, q)) => {
                        return Err(Error::Guard(format!(
                            "point values need r > 1/q, got r = {r}, q = {q}"
                        )))
                    }
                    None => return Err(Error::Unsupported("cubature needs a smoothness class".into())),
                }
                if n.is_empty() {
                    return bad("no levels given".into());
                }
                if sample_l_max > l_max {
                    return bad(format!("sample truncation {sample_l_max} exceeds {l_max}"));
                }
                if let Some(&k) = n.iter().find(|&&k| k > *sample_l_max) {
                    return bad(format!("level n = {k} exceeds sample truncation {sample_l_max}"));
                }
            }
            Experiment::Oracle {
                bounds,
                p,
                m,
                weakness,
                budget,
            }
            | Experiment::Lebesgue {
                bounds,
                p,
                m,
                weakness,
                budget,
                ..
            } => {
                check_bounds(bounds)?;
                check_finite_p(*p)?;
                if !(*weakness > 0.0 && *weakness <= 1.0) {
                    return bad(format!("weakness t = {weakness} must lie in (0, 1]"));
                }
                if *m == 0 {
                    return bad("m must be positive".into());
                }
                check_oracle_budget(bounds, *p, *m, *budget)?;
            }
        }
        Ok(())
    }
}

fn base(id: &str, claim: &str, guard: &str, experiment: Experiment, seeds: Vec<u64>) -> ExperimentConfig {
    ExperimentConfig {
        id: id.into(),
        claim: claim.into(),
        guard: guard.into(),
        experiment,
        seeds,
        oversample: 4,
        tolerances: Tolerances::default(),
        out_dir: None,
    }
}

fn band(lo: f64, hi: f64, enforce: bool) -> Option<SlopeBand> {
    Some(SlopeBand { lo, hi, enforce })
}

fn layered(
    id: &str,
    claim: &str,
    guard: &str,
    target: Target,
    p: f64,
    mu: f64,
    n: Vec<u32>,
    l_max: u32,
    seeds: Vec<u64>,
    slope: Option<SlopeBand>,
) -> ExperimentConfig {
    let mut c = base(
        id,
        claim,
        guard,
        Experiment::Layered {
            target,
            p,
            mu,
            n,
            l_max,
        },
        seeds,
    );
    c.tolerances.slope = slope;
    c
}

/// The bundled configurations, one per implemented rate or bound. Bands
/// marked `enforce` are acceptance bands; the others are monitored, since
/// constants and pre-asymptotic effects are unknown at desk scale.
pub fn presets() -> Vec<ExperimentConfig> {
    let inf = f64::INFINITY;
    let w2 = ClassSpec::W { r: 1.5, q: 2.0, d: 2 };
    let mut out = Vec::new();

    let mut c = base(
        "ia-a1-l3",
        "IA(eps) on A_1 in L_3: error <= C gamma^(1/2) m^(-1/2)",
        "2 <= p < inf, so rho(u) <= (p-1) u^2 / 2",
        Experiment::IaRate {
            bounds: vec![64],
            p: 3.0,
            m: vec![8, 16, 32, 64, 128],
            target: GreedyTarget::Harmonic,
        },
        (1..=6).collect(),
    );
    c.tolerances.slope = band(-0.75, -0.35, false);
    c.tolerances.seed_fraction = Some(0.9);
    c.tolerances.monitor_max = Some(1.0);
    out.push(c);

    let mut c = base(
        "ia-box-lp",
        "IA(eps) on the real system in L_4: error <= C(d) m^(-1/2) p^(1/2) ||t||_A",
        "2 <= p < inf",
        Experiment::IaRate {
            bounds: vec![16, 16],
            p: 4.0,
            m: vec![8, 16, 32, 64, 128, 256],
            target: GreedyTarget::Harmonic,
        },
        (1..=20).collect(),
    );
    c.tolerances.slope = band(-1.5, -0.45, true);
    c.tolerances.seed_fraction = Some(0.9);
    c.tolerances.monitor_max = Some(0.5);
    out.push(c);

    let mut c = base(
        "ia-box-sup",
        "IA(eps) in L_p with p = ceil(ln theta(N)): sup error <= C(d) m^(-1/2) (ln theta(N))^(1/2) ||t||_A",
        "t in T(N, d), p = max(2, ceil(ln theta(N)))",
        Experiment::IaRate {
            bounds: vec![16, 16],
            p: inf,
            m: vec![8, 16, 32, 64, 128, 256],
            target: GreedyTarget::Harmonic,
        },
        (1..=20).collect(),
    );
    c.tolerances.slope = band(-1.5, -0.45, true);
    c.tolerances.seed_fraction = Some(0.9);
    c.tolerances.monitor_max = Some(0.5);
    out.push(c);

    out.push(layered(
        "layered-w-mixed",
        "sigma_m(W^r_q)_p << m^(-r+eta) (log m)^((d-1)(r-2 eta)), eta = 1/q - 1/2",
        "1 < q <= 2 <= p < inf, r > 1/q",
        Target::Class(ClassSpec::W { r: 2.0, q: 1.5, d: 2 }),
        4.0,
        0.5,
        vec![2, 3, 4, 5],
        8,
        vec![1],
        band(-2.6, -1.1, false),
    ));

    out.push(layered(
        "layered-w-l2",
        "sigma_m(W^r_q)_p << m^(-r) (log m)^(r(d-1))",
        "2 <= q <= p < inf, r > 1/2",
        Target::Class(w2),
        2.0,
        0.5,
        vec![3, 4, 5, 6, 7],
        14,
        vec![1, 2],
        band(-1.7, -1.3, true),
    ));

    out.push(layered(
        "layered-w-sup",
        "sigma_m(W^r_q)_inf << m^(-r) (log m)^(r(d-1)+1/2)",
        "2 <= q < inf, r > 1/2",
        Target::Class(w2),
        inf,
        0.5,
        vec![2, 3, 4, 5],
        8,
        vec![1],
        band(-2.3, -0.8, false),
    ));

    out.push(layered(
        "kernel-l2",
        "sigma_m(F_r)_p << m^(-r+1-1/p) (log m)^((d-1)(r-1+2/p))",
        "1 < p <= 2, r > 1 - 1/p",
        Target::Kernel { r: 1.5, d: 2 },
        2.0,
        0.25,
        vec![3, 4, 5, 6, 7],
        14,
        vec![1],
        band(-1.2, -0.8, true),
    ));

    out.push(layered(
        "kernel-lp",
        "sigma_m(F_r)_p << m^(-r+1/2) (log m)^(r(d-1))",
        "2 <= p < inf, r > 1",
        Target::Kernel { r: 1.5, d: 2 },
        4.0,
        0.25,
        vec![2, 3, 4, 5],
        8,
        vec![1],
        band(-1.75, -0.25, false),
    ));

    out.push(layered(
        "layered-h-mixed",
        "sigma_m(H^r_q)_p << m^(-r+eta) (log m)^((d-1)(r-1/q+1))",
        "1 < q <= 2 <= p < inf, r > 1/q",
        Target::Class(ClassSpec::H { r: 2.0, q: 1.5, d: 2 }),
        4.0,
        0.5,
        vec![2, 3, 4, 5],
        8,
        vec![1],
        band(-2.6, -1.1, false),
    ));

    out.push(layered(
        "layered-h-l2",
        "sigma_m(H^r_q)_p << m^(-r) (log m)^((d-1)(r+1/2))",
        "2 <= q <= p < inf, r > 1/2",
        Target::Class(ClassSpec::H { r: 1.5, q: 2.0, d: 2 }),
        2.0,
        0.5,
        vec![3, 4, 5, 6, 7],
        12,
        vec![1, 2],
        band(-2.0, -1.0, false),
    ));

    out.push(layered(
        "layered-b-l2",
        "sigma_m(B^r_(q,theta))_p << m^(-r) (log m)^((d-1)(r+1/2-1/theta))",
        "2 <= q <= p < inf, r > 1/2",
        Target::Class(ClassSpec::B {
            r: 1.5,
            q: 2.0,
            theta: 2.0,
            d: 2,
        }),
        2.0,
        0.5,
        vec![3, 4, 5, 6, 7],
        12,
        vec![1, 2],
        band(-2.0, -1.0, false),
    ));

    out.push(layered(
        "layered-htheta-sup",
        "sigma_m(H^r_(q,theta))_inf << m^(-r) (log m)^((r+1/2-1/theta)(d-1)+1/2)",
        "2 <= q < inf, r > 1/2",
        Target::Class(ClassSpec::HTheta {
            r: 1.5,
            q: 2.0,
            theta: 2.0,
            d: 2,
        }),
        inf,
        0.5,
        vec![2, 3, 4, 5],
        8,
        vec![1],
        band(-2.3, -0.8, false),
    ));

    let mut c = base(
        "cubature-sparse-grid",
        "Smolyak cubature on SG(n): error << 2^(-rn) n^(d-1) on H^r_q",
        "r > 1/q",
        Experiment::Cubature {
            spec: ClassSpec::H { r: 1.5, q: 2.0, d: 2 },
            n: vec![3, 4, 5, 6, 7, 8],
            l_max: 28,
            sample_l_max: 10,
            exact_max: 6,
        },
        (1..=4).collect(),
    );
    c.tolerances.slope = band(-1.75, -1.25, true);
    out.push(c);

    let mut c = base(
        "oracle-dominance",
        "no m-term algorithm beats sigma_m",
        "2 <= p < inf, C(|D|, m) <= 1e5",
        Experiment::Oracle {
            bounds: vec![3],
            p: 4.0,
            m: 2,
            weakness: 1.0,
            budget: 100_000,
        },
        (0..20).collect(),
    );
    c.tolerances.slack = 1e-9;
    out.push(c);

    let mut c = base(
        "lebesgue-monitor",
        "WCGA after ceil(m ln(m+1)) * 4 steps stays within a constant of sigma_m",
        "2 <= p < inf",
        Experiment::Lebesgue {
            bounds: vec![4],
            p: 4.0,
            m: 2,
            weakness: 1.0,
            c_iter: 4,
            budget: 100_000,
        },
        (0..100).collect(),
    );
    c.tolerances.monitor_max = Some(10.0);
    out.push(c);

    out
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    presets().into_iter().find(|c| c.id == name).ok_or_else(|| {
        let names: Vec<String> = presets().into_iter().map(|c| c.id).collect();
        Error::InvalidParameter(format!("unknown preset {name}; available: {}", names.join(", ")))
    })
}
