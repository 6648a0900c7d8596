use super::fft::{transform_nd, Direction};
use super::index::{FrequencyIndex, IndexSet};
use super::poly::TrigPolynomial;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Samples on the uniform tensor grid `x_m = 2π m_j / M_j` over `[0, 2π)^d`,
/// stored row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    sizes: Vec<usize>,
    samples: Vec<Complex64>,
}

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// Default grid for a polynomial with `max |k_j| = n_j`: the next power of
/// two at least `oversample·(2 n_j + 1)`.
pub fn default_grid(max_abs: &[u64], oversample: usize) -> Vec<usize> {
    max_abs
        .iter()
        .map(|&n| next_pow2(oversample.max(1) * (2 * n as usize + 1)))
        .collect()
}

impl GridFunction {
    pub fn new(sizes: Vec<usize>, samples: Vec<Complex64>) -> Result<Self> {
        validate_sizes(&sizes)?;
        let total: usize = sizes.iter().product();
        if samples.len() != total {
            return Err(Error::InvalidGrid(format!(
                "{} samples for grid {:?}",
                samples.len(),
                sizes
            )));
        }
        Ok(Self { sizes, samples })
    }

    pub fn from_real(sizes: Vec<usize>, samples: &[f64]) -> Result<Self> {
        Self::new(sizes, samples.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(sizes: Vec<usize>, f: F) -> Result<Self> {
        validate_sizes(&sizes)?;
        let total: usize = sizes.iter().product();
        let mut samples = Vec::with_capacity(total);
        let mut x = vec![0.0; sizes.len()];
        for idx in 0..total {
            node_into(&sizes, idx, &mut x);
            samples.push(f(&x));
        }
        Self::new(sizes, samples)
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.re).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Node coordinates of the flat index `idx`.
    pub fn node(&self, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        node_into(&self.sizes, idx, &mut x);
        x
    }

    /// `(mean |g|^p)^{1/p}`; `p` must be at least 1.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("L_p exponent {p} < 1")));
        }
        Ok(power_mean(self.samples.iter().map(|c| c.norm()), self.len(), p))
    }

    /// Grid maximum of `|g|`: a lower bound for the true sup norm.
    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Grid mean of `|g|`.
    pub fn mean_abs(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).sum::<f64>() / self.len() as f64
    }

    pub fn min_real(&self) -> f64 {
        self.samples.iter().map(|c| c.re).fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn power_mean<I: Iterator<Item = f64>>(abs: I, len: usize, p: f64) -> f64 {
    if len == 0 {
        return 0.0;
    }
    if p == 2.0 {
        return (abs.map(|a| a * a).sum::<f64>() / len as f64).sqrt();
    }
    // Scale by the maximum to avoid overflow for large p.
    let vals: Vec<f64> = abs.collect();
    let max = vals.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let s: f64 = vals.iter().map(|a| (a / max).powf(p)).sum::<f64>() / len as f64;
    max * s.powf(1.0 / p)
}

fn validate_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if let Some(m) = sizes.iter().find(|m| **m == 0 || !m.is_power_of_two()) {
        return Err(Error::InvalidGrid(format!(
            "grid size {m} is not a positive power of two"
        )));
    }
    Ok(())
}

fn node_into(sizes: &[usize], mut idx: usize, x: &mut [f64]) {
    for j in (0..sizes.len()).rev() {
        let m = sizes[j];
        x[j] = TAU * (idx % m) as f64 / m as f64;
        idx /= m;
    }
}

fn flat_index(sizes: &[usize], k: &[i64]) -> usize {
    let mut idx = 0usize;
    for (&m, &kj) in sizes.iter().zip(k) {
        idx = idx * m + kj.rem_euclid(m as i64) as usize;
    }
    idx
}

fn check_unaliased(sizes: &[usize], k: &FrequencyIndex) -> Result<()> {
    if k.0.iter().zip(sizes).any(|(kj, &m)| 2 * kj.unsigned_abs() >= m as u64) {
        return Err(Error::Aliasing {
            grid: sizes.to_vec(),
            freq: k.0.clone(),
        });
    }
    Ok(())
}

fn sample_impl(t: &TrigPolynomial, sizes: &[usize], aliased: bool) -> Result<GridFunction> {
    if sizes.len() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: sizes.len(),
        });
    }
    validate_sizes(sizes)?;
    let total: usize = sizes.iter().product();
    let mut buf = vec![Complex64::default(); total];
    for (k, c) in t.iter() {
        if !aliased {
            check_unaliased(sizes, k)?;
        }
        buf[flat_index(sizes, &k.0)] += c;
    }
    transform_nd(&mut buf, sizes, Direction::Inverse);
    GridFunction::new(sizes.to_vec(), buf)
}

/// Samples `t` on the grid by an inverse FFT. Every frequency must satisfy
/// `2|k_j| < M_j`.
pub fn sample(t: &TrigPolynomial, sizes: &[usize]) -> Result<GridFunction> {
    sample_impl(t, sizes, false)
}

/// Like [`sample`] but folds frequencies modulo the grid. The values at the
/// nodes are still exact.
pub fn sample_aliased(t: &TrigPolynomial, sizes: &[usize]) -> Result<GridFunction> {
    sample_impl(t, sizes, true)
}

/// Fourier coefficients `ĝ(k) = mean(g e^{-i(k,x)})` restricted to `support`.
pub fn analyze(g: &GridFunction, support: &IndexSet) -> Result<TrigPolynomial> {
    analyze_keys(g, support.members().iter())
}

pub(crate) fn analyze_keys<'a, I>(g: &GridFunction, keys: I) -> Result<TrigPolynomial>
where
    I: Iterator<Item = &'a FrequencyIndex>,
{
    if g.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    let mut buf = g.samples.clone();
    transform_nd(&mut buf, &g.sizes, Direction::Forward);
    let scale = 1.0 / g.len() as f64;
    let mut out = TrigPolynomial::zero(g.dim());
    for k in keys {
        if k.dim() != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                got: k.dim(),
            });
        }
        check_unaliased(&g.sizes, k)?;
        out.set(k.clone(), buf[flat_index(&g.sizes, &k.0)] * scale);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_samples() {
        let g = sample(&TrigPolynomial::constant(1, 1.0), &[8]).unwrap();
        assert!(g.samples().iter().all(|v| (v - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn cosine_samples() {
        let t = TrigPolynomial::from_entries(
            1,
            [
                (FrequencyIndex(vec![1]), c(0.5)),
                (FrequencyIndex(vec![-1]), c(0.5)),
            ],
        )
        .unwrap();
        let g = sample(&t, &[8]).unwrap();
        for (m, v) in g.samples().iter().enumerate() {
            let x = TAU * m as f64 / 8.0;
            assert!((v - c(x.cos())).norm() < 1e-14);
        }
    }

    #[test]
    fn aliasing_requires_opt_in() {
        let t = TrigPolynomial::monomial(vec![4], c(1.0));
        assert!(matches!(sample(&t, &[8]), Err(Error::Aliasing { .. })));
        let g = sample_aliased(&t, &[8]).unwrap();
        // e^{i4x} at x = 2πm/8 is (-1)^m.
        for (m, v) in g.samples().iter().enumerate() {
            assert!((v - c(if m % 2 == 0 { 1.0 } else { -1.0 })).norm() < 1e-14);
        }
    }

    #[test]
    fn non_power_of_two_grid_is_rejected() {
        let t = TrigPolynomial::constant(1, 1.0);
        assert!(matches!(sample(&t, &[6]), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn analyze_constant_and_exponential() {
        let one = GridFunction::from_fn(vec![8], |_| c(1.0)).unwrap();
        let t = analyze(&one, &IndexSet::cube(1, 3)).unwrap();
        assert!(t.max_abs_diff(&TrigPolynomial::constant(1, 1.0)) < 1e-15);

        let g = GridFunction::from_fn(vec![16, 16], |x| {
            Complex64::from_polar(1.0, 3.0 * x[0] - 2.0 * x[1])
        })
        .unwrap();
        let t = analyze(&g, &IndexSet::cube(2, 7)).unwrap();
        let want = TrigPolynomial::monomial(vec![3, -2], c(1.0));
        assert!(t.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn analyze_recovers_fejer_coefficients() {
        let n = 8.0;
        let g = GridFunction::from_fn(vec![32], |x| {
            let v = if x[0] == 0.0 {
                n
            } else {
                (n * x[0] / 2.0).sin().powi(2) / (n * (x[0] / 2.0).sin().powi(2))
            };
            c(v)
        })
        .unwrap();
        let t = analyze(&g, &IndexSet::cube(1, 15)).unwrap();
        for k in -15i64..=15 {
            let want = (1.0 - k.abs() as f64 / n).max(0.0);
            assert!((t.get(&FrequencyIndex(vec![k])) - c(want)).norm() < 1e-13, "k = {k}");
        }
    }

    /// Direct `O(|G|·M^d)` summation oracle.
    fn direct_samples(t: &TrigPolynomial, sizes: &[usize]) -> Vec<Complex64> {
        let g = GridFunction::from_fn(sizes.to_vec(), |x| t.eval(x)).unwrap();
        g.into_samples()
    }

    #[test]
    fn round_trip_on_hyperbolic_cross() {
        let support = IndexSet::hyperbolic_cross(2, 8);
        let mut r = rng::stream(7, 0);
        let t = TrigPolynomial::from_entries(
            2,
            support
                .members()
                .into_iter()
                .map(|k| (k, Complex64::new(rng::normal(&mut r), rng::normal(&mut r)))),
        )
        .unwrap();
        let g = sample(&t, &[64, 64]).unwrap();
        let direct = direct_samples(&t, &[64, 64]);
        let err = g
            .samples()
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "sample vs direct: {err}");
        let back = analyze(&g, &support).unwrap();
        assert!(back.max_abs_diff(&t) < 1e-12);
    }
}
