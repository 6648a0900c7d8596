//! Grid machinery shared by the greedy solvers. Functions are real samples
//! on a power-of-two grid; inner products against atoms are read off one
//! forward FFT, so a sweep over the whole dictionary costs one transform.

use super::dictionary::DictionaryAtom;
use crate::error::Result;
use crate::trig::{default_grid, sample, transform_nd, Direction, TrigPolynomial};
use num_complex::Complex64;

/// Exponential terms of an atom as flat grid indices.
#[derive(Debug, Clone)]
pub(crate) struct AtomTerms {
    /// Index of `+σ∘k` (synthesis).
    pub pos: Vec<usize>,
    /// Index of `-σ∘k` (inner products).
    pub neg: Vec<usize>,
    pub freq: Vec<Vec<i64>>,
    pub coef: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Workspace {
    pub sizes: Vec<usize>,
    pub total: usize,
}

impl Workspace {
    pub fn for_bounds(bounds: &[u64], oversample: usize) -> Self {
        let sizes = default_grid(bounds, oversample);
        let total = sizes.iter().product();
        Self { sizes, total }
    }

    pub fn flat(&self, k: &[i64]) -> usize {
        let mut idx = 0usize;
        for (&m, &kj) in self.sizes.iter().zip(k) {
            idx = idx * m + kj.rem_euclid(m as i64) as usize;
        }
        idx
    }

    pub fn terms(&self, atom: &DictionaryAtom) -> AtomTerms {
        let raw = atom.terms();
        let mut out = AtomTerms {
            pos: Vec::with_capacity(raw.len()),
            neg: Vec::with_capacity(raw.len()),
            freq: Vec::with_capacity(raw.len()),
            coef: Vec::with_capacity(raw.len()),
        };
        for (k, c) in raw {
            let nk: Vec<i64> = k.iter().map(|v| -v).collect();
            out.pos.push(self.flat(&k));
            out.neg.push(self.flat(&nk));
            out.freq.push(k);
            out.coef.push(c);
        }
        out
    }

    pub fn sample_real(&self, t: &TrigPolynomial) -> Result<Vec<f64>> {
        Ok(sample(t, &self.sizes)?.real_parts())
    }

    /// `ĝ = FFT(g)/N` over the full grid.
    pub fn spectrum(&self, g: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform_nd(&mut buf, &self.sizes, Direction::Forward);
        let s = 1.0 / self.total as f64;
        buf.iter_mut().for_each(|v| *v *= s);
        buf
    }

    /// Grid samples of `Σ c_j φ_j`.
    pub fn synth(&self, atoms: &[AtomTerms], coeffs: &[f64]) -> Vec<f64> {
        let mut buf = vec![Complex64::default(); self.total];
        for (a, &c) in atoms.iter().zip(coeffs) {
            for (&i, &v) in a.pos.iter().zip(&a.coef) {
                buf[i] += v * c;
            }
        }
        transform_nd(&mut buf, &self.sizes, Direction::Inverse);
        buf.into_iter().map(|v| v.re).collect()
    }

    /// `mean(g·φ)` from `ĝ`.
    pub fn inner(spec: &[Complex64], a: &AtomTerms) -> f64 {
        a.neg
            .iter()
            .zip(&a.coef)
            .map(|(&i, &c)| (c * spec[i]).re)
            .sum()
    }

    /// `mean(w·φ_a·φ_b)` from `ŵ`.
    pub fn pair(&self, spec: &[Complex64], a: &AtomTerms, b: &AtomTerms) -> f64 {
        let d = self.sizes.len();
        let mut acc = 0.0;
        let mut k = vec![0i64; d];
        for (ka, ca) in a.freq.iter().zip(&a.coef) {
            for (kb, cb) in b.freq.iter().zip(&b.coef) {
                for j in 0..d {
                    k[j] = -(ka[j] + kb[j]);
                }
                acc += (ca * cb * spec[self.flat(&k)]).re;
            }
        }
        acc
    }
}

/// `(mean |g|^p)^{1/p}`.
pub(crate) fn lp(g: &[f64], p: f64) -> f64 {
    crate::trig::power_mean(g.iter().map(|v| v.abs()), g.len(), p)
}

/// `|g/s|^{p-1} sign(g)`, the sampled norming kernel of `g` with `s = ‖g‖_p`.
pub(crate) fn norming_kernel(g: &[f64], s: f64, p: f64) -> Vec<f64> {
    g.iter()
        .map(|&v| {
            let x = v / s;
            x.abs().powf(p - 1.0).copysign(x)
        })
        .collect()
}
