use crate::error::{Error, Result};
use crate::trig::{FrequencyIndex, TrigPolynomial};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::cmp::Ordering;
use std::collections::BTreeSet;

/// `‖cos‖_p` under the normalized measure; 1 at `p = ∞`.
pub fn cos_lp_norm(p: f64) -> f64 {
    if p.is_infinite() {
        return 1.0;
    }
    let ln = ln_gamma((p + 1.0) / 2.0) - 0.5 * std::f64::consts::PI.ln() - ln_gamma(p / 2.0 + 1.0);
    (ln / p).exp()
}

/// `norm_const · ∏_{j∈E} cos k_j x_j ∏_{j∉E} sin k_j x_j` with `k_j ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictionaryAtom {
    pub freq: FrequencyIndex,
    /// Bit `j` set means a cosine in coordinate `j`.
    pub pattern: u32,
    pub norm_const: f64,
}

impl DictionaryAtom {
    pub fn new(freq: Vec<i64>, pattern: u32, p: f64) -> Result<Self> {
        if freq.len() > 32 {
            return Err(Error::InvalidParameter("at most 32 coordinates".into()));
        }
        for (j, &k) in freq.iter().enumerate() {
            if k < 0 {
                return Err(Error::InvalidParameter(format!("atom frequency {freq:?} has a negative entry")));
            }
            if k == 0 && pattern & (1 << j) == 0 {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {j} has zero frequency and must be a cosine"
                )));
            }
        }
        let nonzero = freq.iter().filter(|&&k| k != 0).count() as i32;
        Ok(Self {
            freq: FrequencyIndex(freq),
            pattern,
            norm_const: cos_lp_norm(p).powi(-nonzero),
        })
    }

    pub fn dim(&self) -> usize {
        self.freq.dim()
    }

    pub fn is_cos(&self, j: usize) -> bool {
        self.pattern & (1 << j) != 0
    }

    pub fn nonzero(&self) -> usize {
        self.freq.0.iter().filter(|&&k| k != 0).count()
    }

    /// Canonical order: `(‖freq‖₁, freq, pattern)`.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.freq
            .l1()
            .cmp(&other.freq.l1())
            .then_with(|| self.freq.cmp(&other.freq))
            .then_with(|| self.pattern.cmp(&other.pattern))
    }

    /// Expansion into exponentials, `2^{#nonzero}` terms.
    pub fn terms(&self) -> Vec<(Vec<i64>, Complex64)> {
        let nz: Vec<usize> = (0..self.dim()).filter(|&j| self.freq.0[j] != 0).collect();
        let mut out = Vec::with_capacity(1 << nz.len());
        for mask in 0u32..(1 << nz.len()) {
            let mut k = self.freq.0.clone();
            let mut c = Complex64::new(self.norm_const, 0.0);
            for (bit, &j) in nz.iter().enumerate() {
                let sigma = if mask & (1 << bit) != 0 { -1.0 } else { 1.0 };
                if sigma < 0.0 {
                    k[j] = -k[j];
                }
                c *= if self.is_cos(j) {
                    Complex64::new(0.5, 0.0)
                } else {
                    Complex64::new(0.0, -0.5 * sigma)
                };
            }
            out.push((k, c));
        }
        out
    }

    pub fn to_poly(&self) -> TrigPolynomial {
        let mut t = TrigPolynomial::zero(self.dim());
        for (k, c) in self.terms() {
            t.set(FrequencyIndex(k), c);
        }
        t
    }

    /// `⟨φ, φ⟩ = mean(φ²)`.
    pub fn l2_sq(&self) -> f64 {
        self.norm_const * self.norm_const * 0.5f64.powi(self.nonzero() as i32)
    }

    /// `mean(t·φ)` for real `t`.
    pub fn inner(&self, t: &TrigPolynomial) -> f64 {
        self.terms()
            .into_iter()
            .map(|(k, c)| {
                let neg: Vec<i64> = k.iter().map(|v| -v).collect();
                (c * t.get_slice(&neg)).re
            })
            .sum()
    }

    /// Direct evaluation at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.norm_const;
        for (j, (&k, &xj)) in self.freq.0.iter().zip(x).enumerate() {
            let a = k as f64 * xj;
            v *= if self.is_cos(j) { a.cos() } else { a.sin() };
        }
        v
    }

    pub fn id(&self) -> AtomId {
        AtomId {
            k: self.freq.0.clone(),
            pattern: self.pattern,
        }
    }
}

/// Compact atom identity used in traces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AtomId {
    pub k: Vec<i64>,
    pub pattern: u32,
}

/// The real trigonometric system on a set of magnitude vectors, normalized in
/// `L_p`, listed in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigDictionary {
    pub dim: usize,
    /// Per-axis maximum `|k_j|`.
    pub bounds: Vec<u64>,
    #[serde(with = "crate::extended")]
    pub p: f64,
    atoms: Vec<DictionaryAtom>,
}

fn patterns_for(k: &[i64]) -> impl Iterator<Item = u32> + '_ {
    let d = k.len();
    let zeros: u32 = (0..d).filter(|&j| k[j] == 0).map(|j| 1u32 << j).sum();
    (0u32..(1 << d)).filter(move |pat| pat & zeros == zeros)
}

impl TrigDictionary {
    /// All atoms with `0 ≤ k_j ≤ N_j`: `∏(2N_j + 1)` of them.
    pub fn for_box(bounds: &[u64], p: f64) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidParameter("empty box".into()));
        }
        let mut mags: Vec<Vec<i64>> = vec![Vec::new()];
        for &n in bounds {
            let mut next = Vec::with_capacity(mags.len() * (n as usize + 1));
            for m in &mags {
                for k in 0..=n as i64 {
                    let mut v = m.clone();
                    v.push(k);
                    next.push(v);
                }
            }
            mags = next;
        }
        Self::from_magnitudes(bounds.len(), mags, p)
    }

    /// Atoms whose magnitude vector `|k|` occurs in `support`. For supports
    /// closed under coordinate sign flips this spans exactly the real
    /// polynomials on the support.
    pub fn for_support<'a, I>(dim: usize, support: I, p: f64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a FrequencyIndex>,
    {
        let mags: BTreeSet<Vec<i64>> = support
            .into_iter()
            .map(|k| k.0.iter().map(|v| v.abs()).collect())
            .collect();
        Self::from_magnitudes(dim, mags.into_iter().collect(), p)
    }

    fn from_magnitudes(dim: usize, mags: Vec<Vec<i64>>, p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::InvalidParameter(format!("dictionary exponent {p} must exceed 1")));
        }
        let mut atoms = Vec::new();
        let mut bounds = vec![0u64; dim];
        for k in mags {
            if k.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.len(),
                });
            }
            for (b, &v) in bounds.iter_mut().zip(&k) {
                *b = (*b).max(v as u64);
            }
            for pat in patterns_for(&k) {
                atoms.push(DictionaryAtom::new(k.clone(), pat, p)?);
            }
        }
        atoms.sort_by(|a, b| a.canonical_cmp(b));
        Ok(Self {
            dim,
            bounds,
            p,
            atoms,
        })
    }

    pub fn atoms(&self) -> &[DictionaryAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn get(&self, i: usize) -> &DictionaryAtom {
        &self.atoms[i]
    }

    /// Whether some atom has frequency `|k|`.
    pub fn contains_magnitude(&self, k: &[i64]) -> bool {
        let mag: Vec<i64> = k.iter().map(|v| v.abs()).collect();
        let l1: u64 = mag.iter().map(|v| *v as u64).sum();
        let key = (l1, mag.as_slice());
        let i = self
            .atoms
            .partition_point(|a| (a.freq.l1(), a.freq.0.as_slice()) < key);
        self.atoms
            .get(i)
            .is_some_and(|a| a.freq.0.as_slice() == key.1)
    }

    /// Position of an atom in canonical order.
    pub fn position(&self, id: &AtomId) -> Option<usize> {
        let l1: u64 = id.k.iter().map(|v| v.unsigned_abs()).sum();
        let key = (l1, id.k.as_slice(), id.pattern);
        self.atoms
            .binary_search_by(|a| (a.freq.l1(), a.freq.0.as_slice(), a.pattern).cmp(&key))
            .ok()
    }

    /// Coordinates `b` with `t = Σ b_i φ_i` for real `t` in the span.
    pub fn coordinates(&self, t: &TrigPolynomial) -> Result<Vec<f64>> {
        if t.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: t.dim(),
            });
        }
        Ok(crate::par::map_slice(&self.atoms, |a| a.inner(t) / a.l2_sq()))
    }

    /// `Σ |b_i|`: the norm of `t` in the dictionary's convex-hull gauge.
    pub fn a_norm(&self, t: &TrigPolynomial) -> Result<f64> {
        Ok(self.coordinates(t)?.iter().map(|b| b.abs()).sum())
    }

    /// `Σ c_i φ_{atoms[i]}` as a polynomial.
    pub fn synthesize(&self, indices: &[usize], coeffs: &[f64]) -> TrigPolynomial {
        synthesize_atoms(self.dim, indices.iter().map(|&i| &self.atoms[i]), coeffs)
    }
}

pub(crate) fn synthesize_atoms<'a, I>(dim: usize, atoms: I, coeffs: &[f64]) -> TrigPolynomial
where
    I: Iterator<Item = &'a DictionaryAtom>,
{
    let mut acc: std::collections::BTreeMap<FrequencyIndex, Complex64> = Default::default();
    for (a, &c) in atoms.zip(coeffs) {
        if c == 0.0 {
            continue;
        }
        for (k, v) in a.terms() {
            *acc.entry(FrequencyIndex(k)).or_default() += v * c;
        }
    }
    TrigPolynomial::from_entries(dim, acc).expect("atoms share the dimension")
}


/// Random member of `A_1(D)`: `Σ ±φ_{π(i)} / i` over a random permutation
/// `π` of the dictionary with random signs, scaled to unit dictionary norm.
/// The harmonic profile keeps `‖t‖_2` comparable to the dictionary norm, so
/// greedy errors are not saturated at `‖t‖_p` for `m` below the dictionary
/// size.
pub fn harmonic_target(dict: &TrigDictionary, seed: u64) -> TrigPolynomial {
    let mut r = crate::rng::stream(seed, 1);
    let mut keyed: Vec<(f64, usize)> = (0..dict.len()).map(|i| (crate::rng::uniform(&mut r), i)).collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let idx: Vec<usize> = keyed.iter().map(|k| k.1).collect();
    let c: Vec<f64> = (0..idx.len())
        .map(|i| if crate::rng::uniform(&mut r) < 0.5 { -1.0 } else { 1.0 } / (i + 1) as f64)
        .collect();
    let total: f64 = c.iter().map(|v| v.abs()).sum();
    dict.synthesize(&idx, &c).scale(1.0 / total)
}
