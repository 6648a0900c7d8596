use super::config::{Experiment, ExperimentConfig, GreedyTarget};
use super::fit::{fit_level, fit_rate, RateFit};
use crate::classes::ClassSpec;
use crate::error::{Error, Result};
use crate::greedy::{harmonic_target, lebesgue_check, oracle_sigma, wcga, GreedyOptions, TrigDictionary};
use crate::layered::{box_size, g_p_m_detailed, inf_exponent, lp_error, rate_law, sigma_upper_curve};
use crate::quadrature::{aligned_sup, class_cubature_error, cubature_reference, smolyak_cubature, CubatureSymbol};
use crate::trig::IndexSet;
use crate::TrigPolynomial;
use serde::{Deserialize, Serialize};

/// One line of `results.csv`. Columns that do not apply are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub regime: String,
    pub d: usize,
    pub r: Option<f64>,
    pub q: Option<f64>,
    pub p: Option<f64>,
    pub theta: Option<f64>,
    pub mu: Option<f64>,
    pub n: Option<u32>,
    pub seed: Option<u64>,
    pub m: usize,
    pub error: f64,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
    /// Slope of the experiment-level fit, repeated on every row.
    pub fit_slope: Option<f64>,
}

impl Row {
    fn new(config: &ExperimentConfig, regime: &str, d: usize) -> Self {
        Row {
            experiment: config.id.clone(),
            regime: regime.into(),
            d,
            r: None,
            q: None,
            p: None,
            theta: None,
            mu: None,
            n: None,
            seed: None,
            m: 0,
            error: 0.0,
            predicted: None,
            ratio: None,
            fit_slope: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// A breach is a failure.
    Asserted,
    /// A breach is a warning.
    Monitored,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl Status {
    /// `0` all asserted checks passed, `2` a monitored metric was breached,
    /// `1` an asserted check failed.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Warn => 2,
            Status::Fail => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSlope {
    pub seed: u64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub id: String,
    pub kind: String,
    pub claim: String,
    pub guard: String,
    pub status: Status,
    pub rows: usize,
    /// Predicted slope where a rate law applies.
    pub expected_slope: Option<f64>,
    pub fit: Option<RateFit>,
    pub seed_slopes: Vec<SeedSlope>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub summary: Summary,
}

struct Collected {
    rows: Vec<Row>,
    expected_slope: Option<f64>,
    fit: Option<RateFit>,
    seed_slopes: Vec<SeedSlope>,
    checks: Vec<Check>,
}

fn check(name: &str, kind: CheckKind, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        kind,
        passed,
        detail,
    }
}

/// Random real polynomial with unit dictionary norm in `dict`.
pub fn gaussian_target(dict: &TrigDictionary, seed: u64) -> TrigPolynomial {
    let mut r = crate::rng::stream(seed, 0);
    let idx: Vec<usize> = (0..dict.len()).collect();
    let c: Vec<f64> = idx.iter().map(|_| crate::rng::normal(&mut r)).collect();
    let total: f64 = c.iter().map(|v| v.abs()).sum();
    dict.synthesize(&idx, &c.iter().map(|v| v / total).collect::<Vec<_>>())
}

/// Validates and runs an experiment in memory.
pub fn execute(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let mut warnings = Vec::new();
    let collected = if config.seeds.is_empty() {
        warnings.push("seed list is empty; nothing was run".to_string());
        Collected {
            rows: Vec::new(),
            expected_slope: None,
            fit: None,
            seed_slopes: Vec::new(),
            checks: Vec::new(),
        }
    } else {
        let opts = config.greedy_options();
        match &config.experiment {
            Experiment::IaRate { bounds, p, m, target } => ia_rate(config, bounds, *p, m, *target, &opts)?,
            Experiment::Layered { .. } => layered(config, &opts)?,
            Experiment::Cubature { .. } => cubature(config)?,
            Experiment::Oracle { .. } => oracle(config, &opts)?,
            Experiment::Lebesgue { .. } => lebesgue(config, &opts)?,
        }
    };
    let Collected {
        mut rows,
        expected_slope,
        fit,
        seed_slopes,
        checks,
    } = collected;
    if let Some(f) = &fit {
        for r in &mut rows {
            r.fit_slope = Some(f.slope);
        }
    }
    let mut status = Status::Pass;
    for c in checks.iter().filter(|c| !c.passed) {
        status = status.max(match c.kind {
            CheckKind::Asserted => Status::Fail,
            CheckKind::Monitored => Status::Warn,
        });
    }
    let summary = Summary {
        id: config.id.clone(),
        kind: config.experiment.kind().into(),
        claim: config.claim.clone(),
        guard: config.guard.clone(),
        status,
        rows: rows.len(),
        expected_slope,
        fit,
        seed_slopes,
        checks,
        warnings,
    };
    Ok(Outcome { rows, summary })
}

fn band_checks(config: &ExperimentConfig, fit: Option<&RateFit>, seed_slopes: &[SeedSlope], checks: &mut Vec<Check>) {
    let Some(b) = config.tolerances.slope else { return };
    let kind = if b.enforce {
        CheckKind::Asserted
    } else {
        CheckKind::Monitored
    };
    match (config.tolerances.seed_fraction, fit) {
        (Some(frac), _) if !seed_slopes.is_empty() => {
            let inside = seed_slopes.iter().filter(|s| s.slope >= b.lo && s.slope <= b.hi).count();
            let share = inside as f64 / seed_slopes.len() as f64;
            checks.push(check(
                "seed_slopes_in_band",
                kind,
                share >= frac,
                format!(
                    "{inside} of {} seed slopes in [{}, {}], need fraction {frac}",
                    seed_slopes.len(),
                    b.lo,
                    b.hi
                ),
            ));
        }
        (_, Some(f)) => checks.push(check(
            "slope_in_band",
            kind,
            f.within(b.lo, b.hi),
            format!("slope {:.4} (loo band {:.4}..{:.4}) against [{}, {}]", f.slope, f.band[0], f.band[1], b.lo, b.hi),
        )),
        _ => checks.push(check("slope_in_band", kind, false, "no fit available".into())),
    }
}

fn monitor(config: &ExperimentConfig, name: &str, value: f64, checks: &mut Vec<Check>) {
    if let Some(max) = config.tolerances.monitor_max {
        checks.push(check(
            name,
            CheckKind::Monitored,
            value <= max,
            format!("max {value:.4} against ceiling {max}"),
        ));
    }
}

fn ia_rate(
    config: &ExperimentConfig,
    bounds: &[u64],
    p: f64,
    ms: &[usize],
    target: GreedyTarget,
    opts: &GreedyOptions,
) -> Result<Collected> {
    let theta = box_size(bounds);
    let exponent = if p.is_infinite() { inf_exponent(theta) } else { p };
    let dict = TrigDictionary::for_box(bounds, exponent)?;
    let normalizer = if p.is_infinite() { theta.ln().sqrt() } else { p.sqrt() };
    let m_max = *ms.iter().max().unwrap_or(&1);
    let regime = if p.is_infinite() { "ia/sup" } else { "ia/lp" };
    let per_seed = crate::par::map_slice(&config.seeds, |&seed| -> Result<Vec<Row>> {
        let t = match target {
            GreedyTarget::Harmonic => harmonic_target(&dict, seed),
            GreedyTarget::Gaussian => gaussian_target(&dict, seed),
        };
        let errors: Vec<f64> = if p.is_infinite() {
            // Each m needs its own approximant for the sup-grid error; IA is
            // deterministic, so these are prefixes of one run.
            ms.iter()
                .map(|&m| {
                    let g = g_p_m_detailed(&t, m, exponent, opts)?;
                    lp_error(&t.sub(&g.approximant)?, f64::INFINITY)
                })
                .collect::<Result<_>>()?
        } else {
            let g = g_p_m_detailed(&t, m_max, exponent, opts)?;
            let trace = g.trace.as_ref().ok_or_else(|| Error::InvalidParameter("empty run".into()))?;
            ms.iter().map(|&m| trace.residual_after(m) * g.scale).collect()
        };
        let a_norm = dict.a_norm(&t)?;
        Ok(ms
            .iter()
            .zip(errors)
            .map(|(&m, error)| {
                let predicted = a_norm * normalizer / (m as f64).sqrt();
                let mut row = Row::new(config, regime, bounds.len());
                row.p = Some(p);
                row.seed = Some(seed);
                row.m = m;
                row.error = error;
                row.predicted = Some(predicted);
                row.ratio = Some(error / predicted);
                row
            })
            .collect())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut seed_slopes = Vec::new();
    for (seed, rows) in config.seeds.iter().zip(&per_seed) {
        let pts: Vec<[f64; 2]> = rows.iter().map(|r| [r.m as f64, r.error]).collect();
        if let Ok(f) = fit_rate(&pts, 0.0) {
            seed_slopes.push(SeedSlope { seed: *seed, slope: f.slope });
        }
    }
    let rows: Vec<Row> = per_seed.into_iter().flatten().collect();
    let pts: Vec<[f64; 2]> = rows.iter().map(|r| [r.m as f64, r.error]).collect();
    let fit = fit_rate(&pts, 0.0).ok();
    let mut checks = Vec::new();
    band_checks(config, fit.as_ref(), &seed_slopes, &mut checks);
    let worst = rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    monitor(config, "rate_constant", worst, &mut checks);
    Ok(Collected {
        rows,
        expected_slope: Some(-0.5),
        fit,
        seed_slopes,
        checks,
    })
}

fn layered(config: &ExperimentConfig, opts: &GreedyOptions) -> Result<Collected> {
    let Experiment::Layered {
        target,
        p,
        mu,
        n,
        l_max,
    } = &config.experiment
    else {
        unreachable!()
    };
    let law = rate_law(target, *p)?;
    let curve = sigma_upper_curve(target, *p, *mu, n, &config.seeds, *l_max, opts)?;
    let rows: Vec<Row> = curve
        .into_iter()
        .map(|c| {
            let mut row = Row::new(config, &c.regime, c.d);
            row.r = c.r;
            row.q = c.q;
            row.p = Some(c.p);
            row.theta = c.theta;
            row.mu = Some(c.mu);
            row.n = Some(c.n);
            row.seed = Some(c.seed);
            row.m = c.m;
            row.error = c.error_p;
            row.predicted = Some(c.predicted);
            row.ratio = Some(c.ratio);
            row
        })
        .collect();
    let pts: Vec<[f64; 2]> = rows.iter().map(|r| [r.m as f64, r.error]).collect();
    let fit = fit_rate(&pts, law.kappa);
    let mut checks = Vec::new();
    if let Err(e) = &fit {
        checks.push(check("fit", CheckKind::Monitored, false, e.to_string()));
    }
    let fit = fit.ok();
    band_checks(config, fit.as_ref(), &[], &mut checks);
    let worst = rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    monitor(config, "rate_constant", worst, &mut checks);
    Ok(Collected {
        rows,
        expected_slope: Some(-law.rho),
        fit,
        seed_slopes: Vec::new(),
        checks,
    })
}

fn cubature(config: &ExperimentConfig) -> Result<Collected> {
    let Experiment::Cubature {
        spec,
        n,
        l_max,
        sample_l_max,
        exact_max,
    } = &config.experiment
    else {
        unreachable!()
    };
    let d = spec.dim();
    let (r, q) = spec.smoothness().ok_or_else(|| Error::Unsupported("cubature needs a smoothness class".into()))?;
    let theta = match *spec {
        ClassSpec::B { theta, .. } | ClassSpec::HTheta { theta, .. } => Some(theta),
        _ => None,
    };
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut fit_pts = Vec::new();
    let mut exact_worst: f64 = 0.0;
    let mut dominated = true;
    for &level in n {
        let x = smolyak_cubature(level, d)?;
        let aligned = match aligned_sup(*spec, &x, *l_max) {
            Ok(v) => Some(v),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
        let stats = class_cubature_error(*spec, &x, *sample_l_max, &config.seeds)?;
        let (_, upper) = cubature_reference(r, level, d);
        let mut push = |regime: &str, seed: Option<u64>, error: f64| {
            let mut row = Row::new(config, regime, d);
            row.r = Some(r);
            row.q = Some(q);
            row.theta = theta;
            row.n = Some(level);
            row.seed = seed;
            row.m = x.len();
            row.error = error;
            row.predicted = Some(upper);
            row.ratio = Some(error / upper);
            rows.push(row);
        };
        if let Some(a) = aligned {
            push("cubature/aligned", None, a);
            fit_pts.push([level as f64, a]);
            if stats.max > a * (1.0 + config.tolerances.slack) + 1e-15 {
                dominated = false;
            }
        } else {
            fit_pts.push([level as f64, stats.median]);
        }
        for (&seed, &e) in config.seeds.iter().zip(&stats.errors) {
            push("cubature/sample", Some(seed), e);
        }
        if level <= *exact_max && level as usize >= d {
            let symbol = CubatureSymbol::new(&x)?;
            for k in IndexSet::step_cross(d, level - d as u32).members() {
                exact_worst = exact_worst.max(symbol.error_at(&k.0).norm());
            }
        }
    }
    checks.push(check(
        "exact_on_hyperbolic_cross",
        CheckKind::Asserted,
        exact_worst <= 1e-12,
        format!("largest symbol error on T(Q_(n-d)) is {exact_worst:.3e}"),
    ));
    checks.push(check(
        "samples_below_supremum",
        CheckKind::Asserted,
        dominated,
        "every sampled error is at most the class supremum".into(),
    ));
    let fit = fit_level(&fit_pts, d as f64 - 1.0);
    if let Err(e) = &fit {
        checks.push(check("fit", CheckKind::Monitored, false, e.to_string()));
    }
    let fit = fit.ok();
    band_checks(config, fit.as_ref(), &[], &mut checks);
    Ok(Collected {
        rows,
        expected_slope: Some(-r),
        fit,
        seed_slopes: Vec::new(),
        checks,
    })
}

fn oracle(config: &ExperimentConfig, opts: &GreedyOptions) -> Result<Collected> {
    let Experiment::Oracle {
        bounds,
        p,
        m,
        weakness,
        budget,
    } = &config.experiment
    else {
        unreachable!()
    };
    let dict = TrigDictionary::for_box(bounds, *p)?;
    let per_seed = crate::par::map_slice(&config.seeds, |&seed| -> Result<[f64; 3]> {
        let f = gaussian_target(&dict, seed);
        let sigma = oracle_sigma(&f, &dict, *m, opts, *budget)?;
        let w = wcga(&f, &dict, *weakness, *m, 0.0, opts)?.residual_after(*m);
        let g = g_p_m_detailed(&f, *m, *p, opts)?;
        let ia = lp_error(&f.sub(&g.approximant)?, *p)?;
        Ok([sigma, w, ia])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut worst_gap = f64::INFINITY;
    for (&seed, v) in config.seeds.iter().zip(&per_seed) {
        for (regime, e) in [("oracle/sigma", v[0]), ("oracle/wcga", v[1]), ("oracle/ia", v[2])] {
            let mut row = Row::new(config, regime, bounds.len());
            row.p = Some(*p);
            row.seed = Some(seed);
            row.m = *m;
            row.error = e;
            row.predicted = Some(v[0]);
            row.ratio = (v[0] > 0.0).then(|| e / v[0]);
            rows.push(row);
        }
        worst_gap = worst_gap.min(v[1] - v[0]).min(v[2] - v[0]);
    }
    let checks = vec![check(
        "oracle_dominance",
        CheckKind::Asserted,
        worst_gap >= -config.tolerances.slack,
        format!("smallest algorithm error minus sigma_m is {worst_gap:.3e}"),
    )];
    Ok(Collected {
        rows,
        expected_slope: None,
        fit: None,
        seed_slopes: Vec::new(),
        checks,
    })
}

fn lebesgue(config: &ExperimentConfig, opts: &GreedyOptions) -> Result<Collected> {
    let Experiment::Lebesgue {
        bounds,
        p,
        m,
        weakness,
        c_iter,
        budget,
    } = &config.experiment
    else {
        unreachable!()
    };
    let dict = TrigDictionary::for_box(bounds, *p)?;
    let reports = crate::par::map_slice(&config.seeds, |&seed| {
        let f = gaussian_target(&dict, seed);
        lebesgue_check(&f, &dict, *weakness, *m, *c_iter, opts, *budget)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Row> = config
        .seeds
        .iter()
        .zip(&reports)
        .map(|(&seed, rep)| {
            let mut row = Row::new(config, "lebesgue/wcga", bounds.len());
            row.p = Some(*p);
            row.seed = Some(seed);
            row.m = rep.steps;
            row.error = rep.residual;
            row.predicted = Some(rep.sigma);
            row.ratio = Some(rep.ratio);
            row
        })
        .collect();
    let mut checks = Vec::new();
    let worst = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    monitor(config, "lebesgue_ratio", worst, &mut checks);
    Ok(Collected {
        rows,
        expected_slope: None,
        fit: None,
        seed_slopes: Vec::new(),
        checks,
    })
}
