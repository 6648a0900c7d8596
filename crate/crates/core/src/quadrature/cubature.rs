use super::knots::{for_each_tensor, Knot, KnotSet};
use crate::classes::{sample_class, ClassSpec};
use crate::error::{Error, Result};
use crate::trig::{compositions, sample_aliased, transform_nd, Direction, FrequencyIndex, IndexSet, TrigPolynomial};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Periodic Smolyak rule of level `n`: the combination
/// `Σ (-1)^{n-|j|} C(d-1, n-|j|) ⊗ U_{j_i}` over `n-d+1 ≤ |j| ≤ n`, where
/// `U_j` is the rectangle rule on `2πk/2^j`, `0 ≤ k < 2^j`. Weights are
/// accumulated per distinct knot and knots with zero weight are dropped.
/// Exact on every `T(Q_n)`.
pub fn smolyak_cubature(n: u32, d: usize) -> Result<KnotSet> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut acc: BTreeMap<Knot, f64> = BTreeMap::new();
    let lo = (n as i64 - d as i64 + 1).max(0) as u32;
    for total in lo..=n {
        let gap = (n - total) as u64;
        let coef = if gap % 2 == 0 { 1.0 } else { -1.0 } * binomial(d as u64 - 1, gap);
        for levels in compositions(total, d) {
            let w = coef * 2f64.powi(-(total as i32));
            for_each_tensor(&levels, |k| {
                // 2πk/2^j = π(2k)/2^j.
                let num: Vec<i64> = k.iter().map(|&v| 2 * v).collect();
                let knot = Knot::exact(num, levels.clone()).expect("lengths agree");
                *acc.entry(knot).or_default() += w;
            });
        }
    }
    let (points, weights): (Vec<Knot>, Vec<f64>) = acc.into_iter().filter(|(_, w)| *w != 0.0).unzip();
    KnotSet::new(d, points, Some(weights))
}

/// Grid of size `2^{b_j+1}` per axis holding every exact knot, `b_j` the
/// largest denominator exponent; `None` if some knot is a float.
fn knot_grid(x: &KnotSet) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut bmax = vec![0u32; x.d];
    for k in &x.points {
        let Knot::Exact { den_pow, .. } = k else {
            return None;
        };
        for (m, &b) in bmax.iter_mut().zip(den_pow) {
            *m = (*m).max(b);
        }
    }
    if bmax.iter().any(|&b| b > 24) {
        return None;
    }
    let sizes: Vec<usize> = bmax.iter().map(|&b| 1usize << (b + 1)).collect();
    let idx = x
        .points
        .iter()
        .map(|k| {
            let Knot::Exact { num, den_pow } = k else { unreachable!() };
            let mut flat = 0usize;
            for j in 0..x.d {
                let m = sizes[j] as i64;
                let i = (num[j] << (bmax[j] - den_pow[j])).rem_euclid(m) as usize;
                flat = flat * sizes[j] + i;
            }
            flat
        })
        .collect();
    Some((sizes, idx))
}

/// `Λ(f, X) = Σ λ_j f(ξ^j)` (real part). Exact knots are evaluated through
/// one aliased inverse FFT; float knots by direct summation.
pub fn cubature(f: &TrigPolynomial, x: &KnotSet) -> Result<f64> {
    let w = x.weights()?;
    let vals = knot_values(f, x)?;
    Ok(vals.iter().zip(w).map(|(v, wj)| v * wj).sum())
}

/// Real parts of `f(ξ^j)` for every knot.
pub fn knot_values(f: &TrigPolynomial, x: &KnotSet) -> Result<Vec<f64>> {
    check_dim(f, x)?;
    Ok(match knot_grid(x) {
        Some((sizes, idx)) => {
            let g = sample_aliased(f, &sizes)?;
            idx.iter().map(|&i| g.samples()[i].re).collect()
        }
        None => crate::par::map_slice(&x.points, |k| f.eval(&k.point()).re),
    })
}

/// [`cubature`] by evaluating `f` at every knot.
pub fn cubature_direct(f: &TrigPolynomial, x: &KnotSet) -> Result<f64> {
    let w = x.weights()?;
    check_dim(f, x)?;
    let vals = crate::par::map_slice(&x.points, |k| f.eval(&k.point()).re);
    Ok(vals.iter().zip(w).map(|(v, wj)| v * wj).sum())
}

/// `Λ(g, X)` for an arbitrary function.
pub fn cubature_fn<F: Fn(&[f64]) -> f64 + Sync>(g: F, x: &KnotSet) -> Result<f64> {
    let w = x.weights()?;
    let vals = crate::par::map_slice(&x.points, |k| g(&k.point()));
    Ok(vals.iter().zip(w).map(|(v, wj)| v * wj).sum())
}

fn check_dim(f: &TrigPolynomial, x: &KnotSet) -> Result<()> {
    if f.dim() != x.d {
        return Err(Error::DimensionMismatch {
            expected: x.d,
            got: f.dim(),
        });
    }
    Ok(())
}

/// `Λ(e^{i(k,·)}, X)` for all `k`, periodic in `k` modulo the knot grid.
#[derive(Debug, Clone)]
pub struct CubatureSymbol {
    sizes: Vec<usize>,
    values: Vec<Complex64>,
}

impl CubatureSymbol {
    /// Requires weights and exact knots.
    pub fn new(x: &KnotSet) -> Result<Self> {
        let w = x.weights()?;
        let (sizes, idx) = knot_grid(x).ok_or_else(|| Error::Unsupported("symbol needs exact knots".into()))?;
        let mut buf = vec![Complex64::default(); sizes.iter().product()];
        for (&i, &wj) in idx.iter().zip(w) {
            buf[i] += wj;
        }
        transform_nd(&mut buf, &sizes, Direction::Forward);
        // Forward gives Σ λ e^{-i(k,ξ)}; the symbol is its conjugate.
        for v in &mut buf {
            *v = v.conj();
        }
        Ok(Self { sizes, values: buf })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn at(&self, k: &[i64]) -> Complex64 {
        self.values[self.flat(k)]
    }

    fn flat(&self, k: &[i64]) -> usize {
        k.iter()
            .zip(&self.sizes)
            .fold(0usize, |acc, (&kj, &m)| acc * m + kj.rem_euclid(m as i64) as usize)
    }

    /// Error functional `Λ(e_k) - [k = 0]`.
    pub fn error_at(&self, k: &[i64]) -> Complex64 {
        let v = self.at(k);
        if k.iter().all(|&kj| kj == 0) {
            v - 1.0
        } else {
            v
        }
    }

    /// `(Σ_{k∈ρ(s)} |Λ(e_k) - [k=0]|²)^{1/2}`, using that a dyadic band
    /// longer than the grid covers every residue equally often.
    pub fn block_norm(&self, s: &[u32]) -> f64 {
        if s.iter().all(|&v| v == 0) {
            return self.error_at(&vec![0; s.len()]).norm();
        }
        let mults: Vec<Vec<(usize, f64)>> = s
            .iter()
            .zip(&self.sizes)
            .map(|(&sj, &m)| residue_multiplicity(sj, m))
            .collect();
        let d = s.len();
        let mut total = 0.0;
        let mut pos = vec![0usize; d];
        'outer: loop {
            let mut flat = 0usize;
            let mut mult = 1.0;
            for j in 0..d {
                let (a, c) = mults[j][pos[j]];
                flat = flat * self.sizes[j] + a;
                mult *= c;
            }
            total += mult * self.values[flat].norm_sqr();
            let mut j = d;
            loop {
                if j == 0 {
                    break 'outer;
                }
                j -= 1;
                pos[j] += 1;
                if pos[j] < mults[j].len() {
                    break;
                }
                pos[j] = 0;
            }
        }
        total.sqrt()
    }
}

/// Residues mod `m` hit by the band `ρ(s)`, with multiplicities.
fn residue_multiplicity(s: u32, m: usize) -> Vec<(usize, f64)> {
    if s == 0 {
        return vec![(0, 1.0)];
    }
    let half = 1u64 << (s - 1);
    if half >= m as u64 {
        let c = 2.0 * (half / m as u64) as f64;
        return (0..m).map(|a| (a, c)).collect();
    }
    let mut count: BTreeMap<usize, f64> = BTreeMap::new();
    for k in half as i64..(2 * half) as i64 {
        *count.entry(k.rem_euclid(m as i64) as usize).or_default() += 1.0;
        *count.entry((-k).rem_euclid(m as i64) as usize).or_default() += 1.0;
    }
    count.into_iter().collect()
}

/// Block budgets `‖δ_s f‖_2` of the member that maximizes the cubature error
/// given the block error norms `a_s`, and the resulting supremum.
fn allocation(spec: ClassSpec, norms: &BTreeMap<Vec<u32>, f64>) -> Result<(f64, BTreeMap<Vec<u32>, f64>)> {
    let (r, q, theta, per_layer) = match spec {
        ClassSpec::H { r, q, .. } => (r, q, f64::INFINITY, false),
        ClassSpec::B { r, q, theta, .. } => (r, q, theta, false),
        ClassSpec::HTheta { r, q, theta, .. } => (r, q, theta, true),
        _ => {
            return Err(Error::Unsupported(
                "worst-case member is available for H, B and H_theta classes only".into(),
            ))
        }
    };
    if q != 2.0 {
        return Err(Error::Unsupported(format!("worst-case member needs q = 2, got {q}")));
    }
    let scale = |s: &[u32]| 2f64.powf(-r * s.iter().sum::<u32>() as f64);
    // Groups sharing one ℓ_θ constraint.
    let mut groups: BTreeMap<u32, Vec<(&Vec<u32>, f64)>> = BTreeMap::new();
    for (s, &a) in norms {
        let g = if per_layer { s.iter().sum() } else { 0 };
        groups.entry(g).or_default().push((s, a * scale(s)));
    }
    let mut sup = 0.0;
    let mut budget = BTreeMap::new();
    for items in groups.values() {
        let (value, y) = dual_maximizer(items.iter().map(|x| x.1).collect(), theta);
        sup += value;
        for ((s, _), ys) in items.iter().zip(y) {
            budget.insert((*s).clone(), ys * scale(s));
        }
    }
    Ok((sup, budget))
}

/// Maximizes `Σ b_i y_i` over `‖y‖_θ ≤ 1`, `b ≥ 0`: value `‖b‖_{θ'}`.
fn dual_maximizer(b: Vec<f64>, theta: f64) -> (f64, Vec<f64>) {
    if theta.is_infinite() {
        return (b.iter().sum(), vec![1.0; b.len()]);
    }
    if theta == 1.0 {
        let (mut best, mut at) = (0.0, 0);
        for (i, &v) in b.iter().enumerate() {
            if v > best {
                best = v;
                at = i;
            }
        }
        let mut y = vec![0.0; b.len()];
        if !b.is_empty() {
            y[at] = 1.0;
        }
        return (best, y);
    }
    let dual = theta / (theta - 1.0);
    let norm = b.iter().map(|v| v.powf(dual)).sum::<f64>().powf(1.0 / dual);
    if norm == 0.0 {
        return (0.0, vec![0.0; b.len()]);
    }
    let y = b.iter().map(|v| (v / norm).powf(dual - 1.0)).collect();
    (norm, y)
}

fn block_norms(symbol: &CubatureSymbol, d: usize, l_max: u32) -> BTreeMap<Vec<u32>, f64> {
    let blocks: Vec<Vec<u32>> = (0..=l_max).flat_map(|l| compositions(l, d)).collect();
    let norms = crate::par::map_slice(&blocks, |s| symbol.block_norm(s));
    blocks.into_iter().zip(norms).collect()
}

/// `sup |∫f - Λ(f, X)|` over the class truncated to `Q_{l_max}`, exactly,
/// by duality block by block (`q = 2` block classes).
pub fn aligned_sup(spec: ClassSpec, x: &KnotSet, l_max: u32) -> Result<f64> {
    spec.validate()?;
    let symbol = CubatureSymbol::new(x)?;
    Ok(allocation(spec, &block_norms(&symbol, x.d, l_max))?.0)
}

/// A real class member on `Q_{l_max}` attaining [`aligned_sup`].
pub fn aligned_member(spec: ClassSpec, x: &KnotSet, l_max: u32) -> Result<TrigPolynomial> {
    spec.validate()?;
    let symbol = CubatureSymbol::new(x)?;
    let norms = block_norms(&symbol, x.d, l_max);
    let (_, budget) = allocation(spec, &norms)?;
    let mut f = TrigPolynomial::zero(x.d);
    for k in IndexSet::step_cross(x.d, l_max).members() {
        let s = k.block();
        let a = norms[&s];
        if a == 0.0 {
            continue;
        }
        let c = symbol.error_at(&k.0).conj() * (budget[&s] / a);
        if c != Complex64::default() {
            f.set(FrequencyIndex(k.0.clone()), c);
        }
    }
    Ok(f)
}

/// Sampled cubature errors over a class: a lower estimate of the class
/// supremum, plus the exact truncated supremum where available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubatureStats {
    pub errors: Vec<f64>,
    pub max: f64,
    pub median: f64,
    /// Exact supremum over the truncated class, if computable.
    pub aligned: Option<f64>,
}

pub(crate) fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// `|f̂(0) - Λ(f, X)|` over random class members on `Q_{l_max}`.
pub fn class_cubature_error(spec: ClassSpec, x: &KnotSet, l_max: u32, seeds: &[u64]) -> Result<CubatureStats> {
    x.weights()?;
    let truncation = IndexSet::step_cross(spec.dim(), l_max);
    let errors = crate::par::map_slice(seeds, |&seed| -> Result<f64> {
        let f = sample_class(spec, &truncation, seed)?.f;
        Ok((f.mean().re - cubature(&f, x)?).abs())
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let aligned = match aligned_sup(spec, x, l_max) {
        Ok(v) => Some(v),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(CubatureStats {
        max: errors.iter().cloned().fold(0.0, f64::max),
        median: median(&errors),
        errors,
        aligned,
    })
}

/// Reference curves `2^{-rn} n^{(d-1)/2}` (lower) and `2^{-rn} n^{d-1}`
/// (upper) for cubature on sparse grids of level `n`.
pub fn cubature_reference(r: f64, n: u32, d: usize) -> (f64, f64) {
    let base = 2f64.powf(-r * n as f64);
    let nn = (n.max(1)) as f64;
    (base * nn.powf((d as f64 - 1.0) / 2.0), base * nn.powf(d as f64 - 1.0))
}
