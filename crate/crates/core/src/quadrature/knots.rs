use crate::error::{Error, Result};
use crate::trig::compositions;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::PI;

/// A point of `T^d`. Exact knots are `x_j = π num_j / 2^{den_pow_j}`, kept
/// in lowest terms; float knots carry coordinates only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Knot {
    Exact { num: Vec<i64>, den_pow: Vec<u32> },
    Float { x: Vec<FloatCoord> },
}

/// `f64` with a total order so float knots can live in sets.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FloatCoord(pub f64);

impl PartialEq for FloatCoord {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0).is_eq()
    }
}
impl Eq for FloatCoord {}
impl PartialOrd for FloatCoord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for FloatCoord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
impl std::hash::Hash for FloatCoord {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

/// Reduces `π a / 2^b` so that `a` is odd or zero.
fn reduce(mut a: i64, mut b: u32) -> (i64, u32) {
    if a == 0 {
        return (0, 0);
    }
    while b > 0 && a % 2 == 0 {
        a /= 2;
        b -= 1;
    }
    (a, b)
}

impl Knot {
    pub fn exact(num: Vec<i64>, den_pow: Vec<u32>) -> Result<Self> {
        if num.len() != den_pow.len() {
            return Err(Error::LengthMismatch(format!(
                "{} numerators vs {} denominators",
                num.len(),
                den_pow.len()
            )));
        }
        if den_pow.iter().any(|&b| b > 62) {
            return Err(Error::InvalidParameter("denominator exponent above 62".into()));
        }
        let (num, den_pow) = num.iter().zip(&den_pow).map(|(&a, &b)| reduce(a, b)).unzip();
        Ok(Knot::Exact { num, den_pow })
    }

    pub fn float(x: Vec<f64>) -> Self {
        Knot::Float {
            x: x.into_iter().map(FloatCoord).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Knot::Exact { num, .. } => num.len(),
            Knot::Float { x } => x.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Knot::Exact { .. })
    }

    /// Float coordinates.
    pub fn point(&self) -> Vec<f64> {
        match self {
            Knot::Exact { num, den_pow } => num
                .iter()
                .zip(den_pow)
                .map(|(&a, &b)| PI * a as f64 / (1u64 << b) as f64)
                .collect(),
            Knot::Float { x } => x.iter().map(|c| c.0).collect(),
        }
    }
}

/// Knots with optional cubature weights `λ_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotSet {
    pub d: usize,
    pub points: Vec<Knot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl KnotSet {
    pub fn new(d: usize, points: Vec<Knot>, weights: Option<Vec<f64>>) -> Result<Self> {
        if let Some(k) = points.iter().find(|k| k.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: k.dim(),
            });
        }
        if let Some(w) = &weights {
            if w.len() != points.len() {
                return Err(Error::LengthMismatch(format!(
                    "{} weights for {} knots",
                    w.len(),
                    points.len()
                )));
            }
        }
        Ok(Self { d, points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn all_exact(&self) -> bool {
        self.points.iter().all(Knot::is_exact)
    }

    pub fn weights(&self) -> Result<&[f64]> {
        self.weights.as_deref().ok_or(Error::MissingWeights)
    }

    /// Union with another set; weights are dropped.
    pub fn union(&self, other: &KnotSet) -> Result<KnotSet> {
        if other.d != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        let set: BTreeSet<Knot> = self.points.iter().chain(&other.points).cloned().collect();
        KnotSet::new(self.d, set.into_iter().collect(), None)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let k: KnotSet = serde_json::from_str(s)?;
        KnotSet::new(k.d, k.points, k.weights)
    }
}

/// The web `W(s) = {x : ∏ sin(2^{s_j} x_j) = 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Web {
    pub s: Vec<u32>,
}

/// Tolerance on `|w(s, x)|` for float knots.
pub const WEB_TOL: f64 = 1e-9;

impl Web {
    pub fn new(s: Vec<u32>) -> Self {
        Self { s }
    }

    /// `w(s, x) = ∏ sin(2^{s_j} x_j)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.s
            .iter()
            .zip(x)
            .map(|(&s, &xj)| (2f64.powi(s as i32) * xj).sin())
            .product()
    }

    /// Membership; exact for rational-π knots (`2^{s_j} a_j / 2^{b_j} ∈ Z`
    /// for some `j`), within [`WEB_TOL`] otherwise.
    pub fn contains(&self, knot: &Knot) -> bool {
        match knot {
            Knot::Exact { num, den_pow } => self
                .s
                .iter()
                .zip(num.iter().zip(den_pow))
                .any(|(&s, (&a, &b))| a == 0 || s + a.trailing_zeros() >= b),
            Knot::Float { x } => {
                let pt: Vec<f64> = x.iter().map(|c| c.0).collect();
                self.value(&pt).abs() <= WEB_TOL
            }
        }
    }
}

/// `SG(n)`: union over `n ∈ N_0^d`, `‖n‖₁ = n` of the grids
/// `(πk_1 2^{-n_1}, …, πk_d 2^{-n_d})`, `0 ≤ k_j < 2^{n_j}`, deduplicated.
pub fn sparse_grid(n: u32, d: usize) -> KnotSet {
    sparse_grid_with(n, d, 0)
}

/// [`sparse_grid`] restricted to compositions with every part at least
/// `min_part`.
pub fn sparse_grid_with(n: u32, d: usize, min_part: u32) -> KnotSet {
    let mut set: BTreeSet<Knot> = BTreeSet::new();
    for levels in compositions(n, d) {
        if levels.iter().any(|&v| v < min_part) {
            continue;
        }
        for_each_tensor(&levels, |k| {
            let (num, den_pow) = k.iter().zip(&levels).map(|(&a, &b)| reduce(a, b)).unzip();
            set.insert(Knot::Exact { num, den_pow });
        });
    }
    KnotSet {
        d,
        points: set.into_iter().collect(),
        weights: None,
    }
}

/// Calls `f` with every `k`, `0 ≤ k_j < 2^{levels_j}`.
pub(crate) fn for_each_tensor<F: FnMut(&[i64])>(levels: &[u32], mut f: F) {
    let d = levels.len();
    let mut k = vec![0i64; d];
    loop {
        f(&k);
        let mut j = d;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            k[j] += 1;
            if k[j] < 1i64 << levels[j] {
                break;
            }
            k[j] = 0;
        }
    }
}

/// Result of an `(n, l)`-net check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetReport {
    pub is_net: bool,
    /// Some knots were tested in floating point.
    pub approximate: bool,
    /// The web with the most knots off it, and that count.
    pub worst_web: Vec<u32>,
    pub worst_count: usize,
}

/// Checks `|X \ W(s)| ≤ 2^l` for every `s ∈ N_0^d` with `‖s‖₁ = n`.
pub fn is_nl_net(x: &KnotSet, n: u32, l: u32) -> NetReport {
    let bound = 1usize.checked_shl(l).unwrap_or(usize::MAX);
    let mut worst_web = vec![0; x.d];
    let mut worst_count = 0usize;
    let mut first = true;
    for s in compositions(n, x.d) {
        let web = Web::new(s);
        let off = x.points.iter().filter(|k| !web.contains(k)).count();
        if first || off > worst_count {
            worst_count = off;
            worst_web = web.s;
            first = false;
        }
    }
    NetReport {
        is_net: worst_count <= bound,
        approximate: !x.all_exact(),
        worst_web,
        worst_count,
    }
}
