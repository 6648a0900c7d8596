use super::chebyshev::{check_exponent, EXACT_FIT};
use super::dictionary::{synthesize_atoms, TrigDictionary};
use super::norming::check_fits;
use super::trace::{Algorithm, ApproximationTrace, Coefficients, TraceStep};
use super::workspace::{lp, norming_kernel, AtomTerms, Workspace};
use super::{check_target, energy_outside, joint_bounds, GreedyOptions};
use crate::error::{Error, Result};
use crate::trig::TrigPolynomial;
use serde::{Deserialize, Serialize};

/// Power-type bound `ρ(u) ≤ γ u^q` on the modulus of smoothness of `L_p`:
/// `((p-1)/2, 2)` for `p ≥ 2` and `(1/p, p)` for `1 < p < 2`.
pub fn modulus_of_smoothness(p: f64) -> Result<(f64, f64)> {
    check_exponent(p)?;
    Ok(if p >= 2.0 { ((p - 1.0) / 2.0, 2.0) } else { (1.0 / p, p) })
}

/// `ε_n = v γ^{1/q} n^{-1/q'}` with `q' = q/(q-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IaSchedule {
    pub v: f64,
    pub gamma: f64,
    pub q: f64,
}

impl IaSchedule {
    /// Schedule for `L_p` from its modulus of smoothness.
    pub fn for_lp(p: f64, v: f64) -> Result<Self> {
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!("schedule constant v = {v} must be positive")));
        }
        let (gamma, q) = modulus_of_smoothness(p)?;
        Ok(Self { v, gamma, q })
    }

    pub fn eps(&self, n: usize) -> f64 {
        let dual = self.q / (self.q - 1.0);
        self.v * self.gamma.powf(1.0 / self.q) * (n as f64).powf(-1.0 / dual)
    }
}

/// Signed-element counts of `G_m = (1/m) Σ ±φ`.
struct Counts {
    selected: Vec<usize>,
    slot: std::collections::HashMap<usize, usize>,
    plus: Vec<u64>,
    minus: Vec<u64>,
}

impl Counts {
    fn new() -> Self {
        Self {
            selected: Vec::new(),
            slot: Default::default(),
            plus: Vec::new(),
            minus: Vec::new(),
        }
    }

    /// Records `sign·φ_i`; returns the slot of `i`.
    fn add(&mut self, i: usize, sign: i8) -> usize {
        let next = self.selected.len();
        let s = *self.slot.entry(i).or_insert(next);
        if s == next {
            self.selected.push(i);
            self.plus.push(0);
            self.minus.push(0);
        }
        if sign > 0 {
            self.plus[s] += 1;
        } else {
            self.minus[s] += 1;
        }
        s
    }

    fn net(&self, s: usize) -> i64 {
        self.plus[s] as i64 - self.minus[s] as i64
    }

    fn snapshot(&self, m: usize) -> Coefficients {
        Coefficients::Rational {
            plus: self.plus.clone(),
            minus: self.minus.clone(),
            denominator: m as u64,
        }
    }
}

/// Incremental Algorithm with schedule `ε`.
///
/// Step `m` takes the `±φ` maximizing `F_{f_{m-1}}(±φ)`, checks
/// `F_{f_{m-1}}(±φ - f) ≥ -ε_m` and sets `G_m = (1-1/m) G_{m-1} ± φ/m`.
/// Coefficients are kept as exact counts over `m`. Intended for `f` with
/// dictionary norm `Σ|b_i| ≤ 1`; otherwise the check may fail with
/// [`Error::ScheduleTooTight`]. Stops early if the residual vanishes.
pub fn ia_epsilon(
    f: &TrigPolynomial,
    dict: &TrigDictionary,
    schedule: &IaSchedule,
    m_max: usize,
    opts: &GreedyOptions,
) -> Result<ApproximationTrace> {
    check_target(f, dict)?;
    check_exponent(dict.p)?;
    let (counts, steps, initial_norm, converged) = if opts.use_coordinates(dict.p)? {
        ia_coordinates(f, dict, schedule, m_max, opts)?
    } else {
        ia_grid(f, dict, schedule, m_max, opts)?
    };
    let m = steps.len().max(1);
    let values: Vec<f64> = (0..counts.selected.len())
        .map(|s| counts.net(s) as f64 / m as f64)
        .collect();
    let atoms: Vec<_> = counts.selected.iter().map(|&i| dict.get(i).clone()).collect();
    let approximant = synthesize_atoms(f.dim(), atoms.iter(), &values);
    Ok(ApproximationTrace {
        algorithm: Algorithm::Ia,
        param: schedule.v,
        p: dict.p,
        initial_norm,
        selected: atoms,
        steps,
        coefficients: counts.snapshot(m),
        approximant,
        converged,
    })
}

type IaRun = (Counts, Vec<TraceStep>, f64, bool);

#[allow(clippy::too_many_arguments)]
fn record(
    step: usize,
    dict: &TrigDictionary,
    i: usize,
    sign: i8,
    score: f64,
    residual_p: f64,
    counts: &Counts,
    keep: bool,
) -> TraceStep {
    let snap = counts.snapshot(step);
    TraceStep {
        step,
        atom: dict.get(i).id(),
        sign,
        score,
        residual_p,
        coeffs_digest: snap.digest(),
        coeffs: keep.then_some(snap),
    }
}

fn check_step(step: usize, score: f64, f_value: f64, schedule: &IaSchedule) -> Result<()> {
    let value = score.abs() - f_value;
    let eps = schedule.eps(step);
    if value < -eps {
        return Err(Error::ScheduleTooTight {
            step,
            value,
            bound: -eps,
        });
    }
    Ok(())
}

fn ia_grid(
    f: &TrigPolynomial,
    dict: &TrigDictionary,
    schedule: &IaSchedule,
    m_max: usize,
    opts: &GreedyOptions,
) -> Result<IaRun> {
    let p = dict.p;
    let ws = Workspace::for_bounds(&joint_bounds(f, dict), opts.oversample);
    check_fits(&ws, &dict.bounds)?;
    let fg = ws.sample_real(f)?;
    let all_terms: Vec<AtomTerms> = crate::par::map_slice(dict.atoms(), |a| ws.terms(a));
    let f_norm = lp(&fg, p);
    let mut g = vec![0.0; fg.len()];
    let mut r = fg.clone();
    let mut s = f_norm;
    let mut counts = Counts::new();
    let mut steps = Vec::new();
    let mut converged = false;
    let every = opts.resynth_every.max(1);
    for m in 1..=m_max {
        if s <= EXACT_FIT * f_norm || s == 0.0 {
            converged = true;
            break;
        }
        let u = norming_kernel(&r, s, p);
        let uhat = ws.spectrum(&u);
        let scores: Vec<f64> = crate::par::map_slice(&all_terms, |a| Workspace::inner(&uhat, a));
        let i = best_signed(&scores);
        let f_value = u.iter().zip(&fg).map(|(a, b)| a * b).sum::<f64>() / fg.len() as f64;
        check_step(m, scores[i], f_value, schedule)?;
        let sign: i8 = if scores[i] >= 0.0 { 1 } else { -1 };
        counts.add(i, sign);
        if m % every == 0 {
            let terms: Vec<AtomTerms> = counts.selected.iter().map(|&j| all_terms[j].clone()).collect();
            let c: Vec<f64> = (0..counts.selected.len())
                .map(|s| counts.net(s) as f64 / m as f64)
                .collect();
            g = ws.synth(&terms, &c);
        } else {
            let phi = ws.synth(std::slice::from_ref(&all_terms[i]), &[sign as f64]);
            let w = 1.0 / m as f64;
            for (gv, pv) in g.iter_mut().zip(&phi) {
                *gv = (1.0 - w) * *gv + w * pv;
            }
        }
        for ((rv, fv), gv) in r.iter_mut().zip(&fg).zip(&g) {
            *rv = fv - gv;
        }
        s = lp(&r, p);
        steps.push(record(m, dict, i, sign, scores[i], s, &counts, opts.keep_snapshots));
    }
    Ok((counts, steps, f_norm, converged))
}

/// Largest `|score|`, ties to the canonically smaller atom.
fn best_signed(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if s.abs() > scores[best].abs() {
            best = i;
        }
    }
    best
}

/// Exact `p = 2` path in orthonormal coordinates. Atoms never selected keep
/// residual coordinate `b_i`, so they are scanned in decreasing `|b_i|`.
fn ia_coordinates(
    f: &TrigPolynomial,
    dict: &TrigDictionary,
    schedule: &IaSchedule,
    m_max: usize,
    opts: &GreedyOptions,
) -> Result<IaRun> {
    let b = dict.coordinates(f)?;
    let outside = energy_outside(f, dict);
    let f_norm = f.l2_norm();
    let n = b.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[j].abs().total_cmp(&b[i].abs()).then(i.cmp(&j)));
    let mut tail = vec![0.0; n + 1];
    for j in (0..n).rev() {
        tail[j] = tail[j + 1] + b[order[j]] * b[order[j]];
    }
    let f_sq = outside + tail[0];
    let mut counts = Counts::new();
    let mut next = 0usize;
    let mut steps = Vec::new();
    let mut converged = false;
    let mut s = f_norm;
    // Residual coordinate of a selected slot after m steps.
    let resid = |counts: &Counts, slot: usize, m: usize| -> f64 {
        let i = counts.selected[slot];
        if m == 0 {
            b[i]
        } else {
            b[i] - counts.net(slot) as f64 / m as f64
        }
    };
    for m in 1..=m_max {
        if s <= EXACT_FIT * f_norm || s == 0.0 {
            converged = true;
            break;
        }
        while next < n && counts.slot.contains_key(&order[next]) {
            next += 1;
        }
        // Best among selected slots, then the top unselected atom.
        let mut best: Option<(usize, f64)> = None;
        let consider = |best: &mut Option<(usize, f64)>, i: usize, v: f64| {
            let better = match *best {
                None => true,
                Some((bi, bv)) => v.abs() > bv.abs() || (v.abs() == bv.abs() && i < bi),
            };
            if better {
                *best = Some((i, v));
            }
        };
        for slot in 0..counts.selected.len() {
            consider(&mut best, counts.selected[slot], resid(&counts, slot, m - 1));
        }
        if next < n {
            consider(&mut best, order[next], b[order[next]]);
        }
        let (i, ri) = best.expect("dictionary is nonempty");
        let score = ri / s;
        // F_r(f) = ⟨r, f⟩ / ‖r‖ with ⟨r, f⟩ = ‖f‖² - ⟨G, f⟩.
        let g_dot_f: f64 = if m == 1 {
            0.0
        } else {
            (0..counts.selected.len())
                .map(|slot| counts.net(slot) as f64 / (m - 1) as f64 * b[counts.selected[slot]])
                .sum()
        };
        check_step(m, score, (f_sq - g_dot_f) / s, schedule)?;
        let sign: i8 = if ri >= 0.0 { 1 } else { -1 };
        counts.add(i, sign);
        while next < n && counts.slot.contains_key(&order[next]) {
            next += 1;
        }
        let sel: f64 = (0..counts.selected.len())
            .map(|slot| resid(&counts, slot, m).powi(2))
            .sum();
        s = (outside + sel + tail[next]).sqrt();
        steps.push(record(m, dict, i, sign, score, s, &counts, opts.keep_snapshots));
    }
    Ok((counts, steps, f_norm, converged))
}
