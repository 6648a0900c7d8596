use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Integer frequency vector `k ∈ Z^d`. Ordering is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyIndex(pub Vec<i64>);

impl FrequencyIndex {
    pub fn new(k: Vec<i64>) -> Self {
        Self(k)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|&v| -v).collect())
    }

    pub fn l1(&self) -> u64 {
        self.0.iter().map(|v| v.unsigned_abs()).sum()
    }

    /// `∏ max(|k_j|, 1)`, the hyperbolic-cross weight.
    pub fn cross_weight(&self) -> u64 {
        self.0.iter().map(|v| v.unsigned_abs().max(1)).product()
    }

    /// Dyadic block `s` containing this frequency.
    pub fn block(&self) -> Vec<u32> {
        block_of(&self.0)
    }
}

impl From<Vec<i64>> for FrequencyIndex {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

/// Dyadic block index of `k`: `s_j = 0` for `k_j = 0`, otherwise the unique
/// `s_j ≥ 1` with `2^{s_j-1} ≤ |k_j| < 2^{s_j}`.
pub fn block_of(k: &[i64]) -> Vec<u32> {
    k.iter()
        .map(|&v| {
            let a = v.unsigned_abs();
            if a == 0 {
                0
            } else {
                64 - a.leading_zeros()
            }
        })
        .collect()
}

/// All `s ∈ N_0^d` with `‖s‖₁ = n`.
pub fn compositions(n: u32, d: usize) -> Vec<Vec<u32>> {
    fn rec(rest: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=rest {
            cur.push(v);
            rec(rest - v, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(d), &mut out);
    out
}

/// All `s ∈ N_0^d` with `‖s‖₁ ≤ n`.
pub fn compositions_upto(n: u32, d: usize) -> Vec<Vec<u32>> {
    (0..=n).flat_map(|l| compositions(l, d)).collect()
}

/// One-dimensional dyadic band `{k : ⌊2^{s-1}⌋ ≤ |k| < 2^s}`.
fn band(s: u32) -> Vec<i64> {
    if s == 0 {
        return vec![0];
    }
    let lo = 1i64 << (s - 1);
    let hi = 1i64 << s;
    let mut v: Vec<i64> = (-hi + 1..=-lo).collect();
    v.extend(lo..hi);
    v
}

fn cartesian(axes: &[Vec<i64>], out: &mut Vec<FrequencyIndex>) {
    let d = axes.len();
    if axes.iter().any(|a| a.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; d];
    loop {
        out.push(FrequencyIndex(
            idx.iter().zip(axes).map(|(&i, a)| a[i]).collect(),
        ));
        let mut j = d;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param")]
pub enum IndexSetKind {
    /// `ρ(s)`.
    DyadicBlock(Vec<u32>),
    /// `Q_n = ∪_{‖s‖₁ ≤ n} ρ(s)`.
    StepHyperbolicCross(u32),
    /// `Γ(N) = {k : ∏ max(|k_j|,1) ≤ N}`.
    HyperbolicCross(u64),
    /// `Π(N,d) = {k : |k_j| ≤ N_j}`.
    Box(Vec<u64>),
    /// `∪_{‖s‖₁ = l} ρ(s)`.
    Layer(u32),
    Explicit(Vec<FrequencyIndex>),
}

/// A finite set of frequencies described by its construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSet {
    pub dim: usize,
    pub kind: IndexSetKind,
}

impl IndexSet {
    pub fn new(dim: usize, kind: IndexSetKind) -> Self {
        Self { dim, kind }
    }

    pub fn dyadic_block(s: Vec<u32>) -> Self {
        Self::new(s.len(), IndexSetKind::DyadicBlock(s))
    }

    pub fn step_cross(dim: usize, n: u32) -> Self {
        Self::new(dim, IndexSetKind::StepHyperbolicCross(n))
    }

    pub fn hyperbolic_cross(dim: usize, n: u64) -> Self {
        Self::new(dim, IndexSetKind::HyperbolicCross(n))
    }

    pub fn cube(dim: usize, n: u64) -> Self {
        Self::new(dim, IndexSetKind::Box(vec![n; dim]))
    }

    pub fn layer(dim: usize, l: u32) -> Self {
        Self::new(dim, IndexSetKind::Layer(l))
    }

    pub fn contains(&self, k: &FrequencyIndex) -> bool {
        if k.dim() != self.dim {
            return false;
        }
        match &self.kind {
            IndexSetKind::DyadicBlock(s) => &block_of(&k.0) == s,
            IndexSetKind::StepHyperbolicCross(n) => {
                block_of(&k.0).iter().sum::<u32>() <= *n
            }
            IndexSetKind::Layer(l) => block_of(&k.0).iter().sum::<u32>() == *l,
            IndexSetKind::HyperbolicCross(n) => {
                // Overflow-safe product check.
                let mut prod: u64 = 1;
                for v in &k.0 {
                    match prod.checked_mul(v.unsigned_abs().max(1)) {
                        Some(p) if p <= *n => prod = p,
                        _ => return false,
                    }
                }
                true
            }
            IndexSetKind::Box(n) => k.0.iter().zip(n).all(|(v, b)| v.unsigned_abs() <= *b),
            IndexSetKind::Explicit(list) => list.contains(k),
        }
    }

    /// Enumerates the members. Order is unspecified except for `Explicit`.
    pub fn members(&self) -> Vec<FrequencyIndex> {
        let d = self.dim;
        let mut out = Vec::new();
        match &self.kind {
            IndexSetKind::DyadicBlock(s) => {
                let axes: Vec<Vec<i64>> = s.iter().map(|&v| band(v)).collect();
                cartesian(&axes, &mut out);
            }
            IndexSetKind::StepHyperbolicCross(n) => {
                for s in compositions_upto(*n, d) {
                    let axes: Vec<Vec<i64>> = s.iter().map(|&v| band(v)).collect();
                    cartesian(&axes, &mut out);
                }
            }
            IndexSetKind::Layer(l) => {
                for s in compositions(*l, d) {
                    let axes: Vec<Vec<i64>> = s.iter().map(|&v| band(v)).collect();
                    cartesian(&axes, &mut out);
                }
            }
            IndexSetKind::Box(n) => {
                let axes: Vec<Vec<i64>> = n
                    .iter()
                    .map(|&b| (-(b as i64)..=b as i64).collect())
                    .collect();
                cartesian(&axes, &mut out);
            }
            IndexSetKind::HyperbolicCross(n) => {
                fn rec(
                    j: usize,
                    d: usize,
                    budget: u64,
                    cur: &mut Vec<i64>,
                    out: &mut Vec<FrequencyIndex>,
                ) {
                    if j == d {
                        out.push(FrequencyIndex(cur.clone()));
                        return;
                    }
                    let b = budget as i64;
                    for v in -b..=b {
                        let w = v.unsigned_abs().max(1);
                        cur.push(v);
                        rec(j + 1, d, budget / w, cur, out);
                        cur.pop();
                    }
                }
                if *n >= 1 {
                    rec(0, d, *n, &mut Vec::with_capacity(d), &mut out);
                }
            }
            IndexSetKind::Explicit(list) => {
                let mut seen = BTreeSet::new();
                for k in list {
                    if seen.insert(k.clone()) {
                        out.push(k.clone());
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.members().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Componentwise `max |k_j|` over the members.
    pub fn max_abs(&self) -> Vec<u64> {
        match &self.kind {
            IndexSetKind::Box(n) => n.clone(),
            IndexSetKind::DyadicBlock(s) => s
                .iter()
                .map(|&v| if v == 0 { 0 } else { (1u64 << v) - 1 })
                .collect(),
            IndexSetKind::StepHyperbolicCross(n) | IndexSetKind::Layer(n) => {
                vec![if *n == 0 { 0 } else { (1u64 << n) - 1 }; self.dim]
            }
            IndexSetKind::HyperbolicCross(n) => vec![*n; self.dim],
            IndexSetKind::Explicit(list) => {
                let mut m = vec![0u64; self.dim];
                for k in list {
                    for (a, v) in m.iter_mut().zip(&k.0) {
                        *a = (*a).max(v.unsigned_abs());
                    }
                }
                m
            }
        }
    }
}
