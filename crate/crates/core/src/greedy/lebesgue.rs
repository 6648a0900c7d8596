use super::chebyshev::{check_exponent, solve};
use super::dictionary::TrigDictionary;
use super::norming::check_fits;
use super::wcga::wcga;
use super::workspace::{AtomTerms, Workspace};
use super::{check_target, energy_outside, joint_bounds, GreedyOptions};
use crate::error::{Error, Result};
use crate::trig::TrigPolynomial;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LebesgueReport {
    pub m: usize,
    pub steps: usize,
    pub residual: f64,
    pub sigma: f64,
    /// `residual / sigma`, with `0/0 = 0`.
    pub ratio: f64,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Best `m`-term error `σ_m(f)_p` over the dictionary. At `p = 2` this is
/// the tail of the sorted coordinates; otherwise every `m`-subset is
/// projected, refusing when there are more than `budget` subsets.
pub fn oracle_sigma(
    f: &TrigPolynomial,
    dict: &TrigDictionary,
    m: usize,
    opts: &GreedyOptions,
    budget: u64,
) -> Result<f64> {
    check_target(f, dict)?;
    let p = dict.p;
    check_exponent(p)?;
    if p == 2.0 {
        let mut sq: Vec<f64> = dict.coordinates(f)?.iter().map(|b| b * b).collect();
        sq.sort_by(|a, b| b.total_cmp(a));
        let tail: f64 = sq.iter().skip(m).rev().sum();
        return Ok((energy_outside(f, dict) + tail).sqrt());
    }
    let n = dict.len();
    let k = m.min(n);
    let count = binomial(n, k);
    if count > budget as f64 {
        return Err(Error::OracleBudget(format!(
            "{count} subsets of size {k} from {n} atoms exceed the budget {budget}"
        )));
    }
    let ws = Workspace::for_bounds(&joint_bounds(f, dict), opts.oversample);
    check_fits(&ws, &dict.bounds)?;
    let fg = ws.sample_real(f)?;
    let fhat = ws.spectrum(&fg);
    let terms: Vec<AtomTerms> = dict.atoms().iter().map(|a| ws.terms(a)).collect();
    let all = subsets(n, k);
    let values = crate::par::map_slice(&all, |subset| -> Result<f64> {
        let sel: Vec<AtomTerms> = subset.iter().map(|&i| terms[i].clone()).collect();
        let start: Vec<f64> = subset
            .iter()
            .map(|&i| Workspace::inner(&fhat, &terms[i]) / dict.get(i).l2_sq())
            .collect();
        Ok(solve(&ws, &fg, &sel, vec![start], p, &opts.projection)?
            .projection
            .residual_norm)
    });
    let mut best = f64::INFINITY;
    for v in values {
        best = best.min(v?);
    }
    Ok(best)
}

/// Runs WCGA for `⌈m ln(m+1)⌉ · c_iter` steps and compares the residual with
/// `σ_m(f)_p`.
pub fn lebesgue_check(
    f: &TrigPolynomial,
    dict: &TrigDictionary,
    t: f64,
    m: usize,
    c_iter: usize,
    opts: &GreedyOptions,
    budget: u64,
) -> Result<LebesgueReport> {
    let steps = (m as f64 * (m as f64 + 1.0).ln()).ceil() as usize * c_iter;
    let trace = wcga(f, dict, t, steps, 0.0, opts)?;
    let residual = trace.residual_after(steps);
    let sigma = oracle_sigma(f, dict, m, opts, budget)?;
    let ratio = if sigma == 0.0 {
        if residual <= 1e-12 * trace.initial_norm.max(f64::MIN_POSITIVE) {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        residual / sigma
    };
    Ok(LebesgueReport {
        m,
        steps,
        residual,
        sigma,
        ratio,
    })
}
