use super::chebyshev::{check_exponent, solve, EXACT_FIT};
use super::dictionary::{synthesize_atoms, TrigDictionary};
use super::norming::{check_fits, check_weakness, pick};
use super::trace::{Algorithm, ApproximationTrace, Coefficients, TraceStep};
use super::workspace::{lp, norming_kernel, AtomTerms, Workspace};
use super::{check_target, energy_outside, joint_bounds, GreedyOptions};
use crate::error::{Error, Result};
use crate::trig::TrigPolynomial;

/// Weak Chebyshev Greedy Algorithm: select an atom whose norming-functional
/// value is within factor `t` of the best, then replace the approximant by
/// the best `L_p` approximation from all selected atoms. Stops after `m_max`
/// steps, once `‖f_m‖_p ≤ stop`, or when the residual vanishes.
pub fn wcga(
    f: &TrigPolynomial,
    dict: &TrigDictionary,
    t: f64,
    m_max: usize,
    stop: f64,
    opts: &GreedyOptions,
) -> Result<ApproximationTrace> {
    check_target(f, dict)?;
    check_weakness(t)?;
    check_exponent(dict.p)?;
    if opts.use_coordinates(dict.p)? {
        wcga_coordinates(f, dict, t, m_max, stop, opts)
    } else {
        wcga_grid(f, dict, t, m_max, stop, opts)
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    f: &TrigPolynomial,
    dict: &TrigDictionary,
    t: f64,
    initial_norm: f64,
    selected: Vec<usize>,
    steps: Vec<TraceStep>,
    coeffs: Vec<f64>,
    converged: bool,
) -> ApproximationTrace {
    let atoms: Vec<_> = selected.iter().map(|&i| dict.get(i).clone()).collect();
    let approximant = synthesize_atoms(f.dim(), atoms.iter(), &coeffs);
    ApproximationTrace {
        algorithm: Algorithm::Wcga,
        param: t,
        p: dict.p,
        initial_norm,
        selected: atoms,
        steps,
        coefficients: Coefficients::Real { values: coeffs },
        approximant,
        converged,
    }
}

fn make_step(
    step: usize,
    dict: &TrigDictionary,
    atom: usize,
    score: f64,
    residual_p: f64,
    coeffs: &[f64],
    keep: bool,
) -> TraceStep {
    let snapshot = Coefficients::Real {
        values: coeffs.to_vec(),
    };
    TraceStep {
        step,
        atom: dict.get(atom).id(),
        sign: 1,
        score,
        residual_p,
        coeffs_digest: snapshot.digest(),
        coeffs: keep.then_some(snapshot),
    }
}

fn wcga_grid(
    f: &TrigPolynomial,
    dict: &TrigDictionary,
    t: f64,
    m_max: usize,
    stop: f64,
    opts: &GreedyOptions,
) -> Result<ApproximationTrace> {
    let p = dict.p;
    let ws = Workspace::for_bounds(&joint_bounds(f, dict), opts.oversample);
    check_fits(&ws, &dict.bounds)?;
    let fg = ws.sample_real(f)?;
    let fhat = ws.spectrum(&fg);
    let all_terms: Vec<AtomTerms> = crate::par::map_slice(dict.atoms(), |a| ws.terms(a));
    let f_norm = lp(&fg, p);
    let mut r = fg.clone();
    let mut s = f_norm;
    let mut selected: Vec<usize> = Vec::new();
    let mut in_span = vec![false; dict.len()];
    let mut sel_terms: Vec<AtomTerms> = Vec::new();
    let mut coeffs: Vec<f64> = Vec::new();
    let mut steps = Vec::new();
    let mut converged = s == 0.0;
    for step in 1..=m_max {
        if s <= EXACT_FIT * f_norm || s == 0.0 {
            converged = true;
            break;
        }
        if s <= stop {
            break;
        }
        let uhat = ws.spectrum(&norming_kernel(&r, s, p));
        let scores: Vec<f64> = crate::par::map_slice(&all_terms, |a| Workspace::inner(&uhat, a));
        let Some(i) = pick(&scores, t, |i| in_span[i]) else {
            converged = true;
            break;
        };
        let rhat = ws.spectrum(&r);
        let atom = dict.get(i);
        let warm_new = Workspace::inner(&rhat, &all_terms[i]) / atom.l2_sq();
        selected.push(i);
        in_span[i] = true;
        sel_terms.push(all_terms[i].clone());
        let mut warm = coeffs.clone();
        warm.push(warm_new);
        let l2: Vec<f64> = selected
            .iter()
            .map(|&j| Workspace::inner(&fhat, &all_terms[j]) / dict.get(j).l2_sq())
            .collect();
        let solved = solve(&ws, &fg, &sel_terms, vec![warm, l2], p, &opts.projection)
            .map_err(|e| Error::at_step(step, e))?;
        coeffs = solved.projection.coeffs;
        r = solved.residual;
        s = solved.projection.residual_norm;
        steps.push(make_step(step, dict, i, scores[i], s, &coeffs, opts.keep_snapshots));
    }
    Ok(finish(f, dict, t, f_norm, selected, steps, coeffs, converged))
}

/// Exact `p = 2` path: atoms are orthonormal, so the Chebyshev step keeps
/// the coordinates of the selected atoms and the residual is the rest.
fn wcga_coordinates(
    f: &TrigPolynomial,
    dict: &TrigDictionary,
    t: f64,
    m_max: usize,
    stop: f64,
    opts: &GreedyOptions,
) -> Result<ApproximationTrace> {
    let b = dict.coordinates(f)?;
    let outside = energy_outside(f, dict);
    let f_norm = f.l2_norm();
    let n = b.len();
    // Canonical positions sorted by decreasing |b|; ties keep canonical order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[j].abs().total_cmp(&b[i].abs()).then(i.cmp(&j)));
    // tail[j] = Σ_{i ≥ j} b_{order[i]}², summed from the small end.
    let mut tail = vec![0.0; n + 1];
    for j in (0..n).rev() {
        tail[j] = tail[j + 1] + b[order[j]] * b[order[j]];
    }
    let mut in_span = vec![false; n];
    let mut selected = Vec::new();
    let mut coeffs = Vec::new();
    let mut steps = Vec::new();
    let mut s = f_norm;
    let mut converged = s == 0.0;
    let mut next = 0usize;
    for step in 1..=m_max {
        if s <= EXACT_FIT * f_norm || s == 0.0 {
            converged = true;
            break;
        }
        if s <= stop {
            break;
        }
        let i = if t >= 1.0 {
            while next < n && in_span[order[next]] {
                next += 1;
            }
            if next == n || b[order[next]] == 0.0 {
                converged = true;
                break;
            }
            order[next]
        } else {
            match pick(&b, t, |i| in_span[i]) {
                Some(i) => i,
                None => {
                    converged = true;
                    break;
                }
            }
        };
        let score = b[i] / s;
        in_span[i] = true;
        selected.push(i);
        coeffs.push(b[i]);
        let rest = if t >= 1.0 && order[next] == i {
            next += 1;
            tail[next]
        } else {
            (0..n).filter(|&j| !in_span[j]).map(|j| b[j] * b[j]).sum()
        };
        s = (outside + rest).sqrt();
        steps.push(make_step(step, dict, i, score, s, &coeffs, opts.keep_snapshots));
    }
    Ok(finish(f, dict, t, f_norm, selected, steps, coeffs, converged))
}
