use super::index::{block_of, FrequencyIndex, IndexSet};
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

/// Finite sum `t(x) = Σ_k c_k e^{i(k,x)}` over `k ∈ Z^d`.
///
/// Exact zeros are never stored. Coefficients are complex even for real
/// functions; `is_real` checks the conjugate symmetry `c_{-k} = conj(c_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    coeffs: BTreeMap<FrequencyIndex, Complex64>,
}

impl TrigPolynomial {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FrequencyIndex, Complex64)>,
    {
        let mut t = Self::zero(dim);
        for (k, c) in entries {
            t.add_term(k, c)?;
        }
        Ok(t)
    }

    /// Single exponential `c·e^{i(k,x)}`.
    pub fn monomial(k: Vec<i64>, c: Complex64) -> Self {
        let mut t = Self::zero(k.len());
        t.set(FrequencyIndex(k), c);
        t
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::monomial(vec![0; dim], Complex64::new(c, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, k: &FrequencyIndex) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn get_slice(&self, k: &[i64]) -> Complex64 {
        // BTreeMap lookup needs an owned key of the same type.
        self.coeffs
            .get(&FrequencyIndex(k.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    /// Overwrites the coefficient at `k`; zero removes it.
    pub fn set(&mut self, k: FrequencyIndex, c: Complex64) {
        debug_assert_eq!(k.dim(), self.dim);
        if c == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    pub fn add_term(&mut self, k: FrequencyIndex, c: Complex64) -> Result<()> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: k.dim(),
            });
        }
        let v = self.get(&k) + c;
        self.set(k, v);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FrequencyIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &FrequencyIndex> {
        self.coeffs.keys()
    }

    pub fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            let v = out.get(k) + c;
            out.set(k.clone(), v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            let v = out.get(k) - c;
            out.set(k.clone(), v);
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.coeffs {
            out.set(k.clone(), c * s);
        }
        out
    }

    /// Keeps the terms whose frequency satisfies `keep`.
    pub fn restrict<F: Fn(&FrequencyIndex) -> bool>(&self, keep: F) -> Self {
        Self {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }

    pub fn restrict_to(&self, set: &IndexSet) -> Self {
        self.restrict(|k| set.contains(k))
    }

    /// Drops terms with `|c| ≤ tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        self.restrict_values(|c| c.norm() > tol)
    }

    fn restrict_values<F: Fn(&Complex64) -> bool>(&self, keep: F) -> Self {
        Self {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| keep(c))
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }

    /// `max_k |a_k - b_k|`, treating missing keys as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (k, c) in &self.coeffs {
            m = m.max((c - other.get(k)).norm());
        }
        for (k, c) in &other.coeffs {
            if !self.coeffs.contains_key(k) {
                m = m.max(c.norm());
            }
        }
        m
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .all(|(k, c)| (c.conj() - self.get(&k.neg())).norm() <= tol)
    }

    /// Componentwise `max |k_j|` over the support.
    pub fn max_abs_freq(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.dim];
        for k in self.coeffs.keys() {
            for (a, v) in m.iter_mut().zip(&k.0) {
                *a = (*a).max(v.unsigned_abs());
            }
        }
        m
    }

    /// `‖t‖_A = Σ_k |c_k|`.
    pub fn a_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `‖t‖_2` by Parseval (normalized measure).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Mean value `t̂(0)`.
    pub fn mean(&self) -> Complex64 {
        self.get(&FrequencyIndex::zero(self.dim))
    }

    /// Direct evaluation at a point.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.dim);
        self.coeffs
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k.0.iter().zip(x).map(|(&kj, &xj)| kj as f64 * xj).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// Groups the terms by dyadic block.
    pub fn blocks(&self) -> BTreeMap<Vec<u32>, TrigPolynomial> {
        let mut out: BTreeMap<Vec<u32>, TrigPolynomial> = BTreeMap::new();
        for (k, c) in &self.coeffs {
            out.entry(block_of(&k.0))
                .or_insert_with(|| TrigPolynomial::zero(self.dim))
                .set(k.clone(), *c);
        }
        out
    }

    /// Largest layer index `‖s‖₁` present.
    pub fn max_layer(&self) -> Option<u32> {
        self.coeffs
            .keys()
            .map(|k| block_of(&k.0).iter().sum::<u32>())
            .max()
    }
}

/// `δ_s(t)`: restriction to the dyadic block `ρ(s)`.
pub fn delta_s(t: &TrigPolynomial, s: &[u32]) -> TrigPolynomial {
    t.restrict(|k| block_of(&k.0) == s)
}

/// `Σ_{‖s‖₁ = l} δ_s(t)`.
pub fn layer(t: &TrigPolynomial, l: u32) -> TrigPolynomial {
    t.restrict(|k| block_of(&k.0).iter().sum::<u32>() == l)
}

/// `S_n(t)`: restriction to the step hyperbolic cross `Q_n`.
pub fn hyperbolic_partial_sum(t: &TrigPolynomial, n: u32) -> TrigPolynomial {
    t.restrict(|k| block_of(&k.0).iter().sum::<u32>() <= n)
}

#[derive(Serialize, Deserialize)]
struct Entry {
    k: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    dim: usize,
    entries: Vec<Entry>,
}

impl Serialize for TrigPolynomial {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        Wire {
            dim: self.dim,
            entries: self
                .coeffs
                .iter()
                .map(|(k, c)| Entry {
                    k: k.0.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TrigPolynomial {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = Wire::deserialize(de)?;
        if wire.dim == 0 {
            return Err(serde::de::Error::custom("dim must be positive"));
        }
        let mut t = TrigPolynomial::zero(wire.dim);
        for e in wire.entries {
            if e.k.len() != wire.dim {
                return Err(serde::de::Error::custom(format!(
                    "entry {:?} has dimension {}, expected {}",
                    e.k,
                    e.k.len(),
                    wire.dim
                )));
            }
            t.add_term(FrequencyIndex(e.k), Complex64::new(e.re, e.im))
                .map_err(serde::de::Error::custom)?;
        }
        Ok(t)
    }
}
