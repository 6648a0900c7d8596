use super::dictionary::{DictionaryAtom, TrigDictionary};
use super::workspace::{lp, norming_kernel, Workspace};
use crate::error::{Error, Result};
use crate::trig::{default_grid, sample, GridFunction, QuadratureOptions, TrigPolynomial};
use num_complex::Complex64;

/// Norming functional `F_f(g) = mean(|f|^{p-1} sign(f) g) / ‖f‖_p^{p-1}` of a
/// real function `f`, with `F_f(f) = ‖f‖_p` and unit operator norm.
#[derive(Debug, Clone)]
pub struct NormingFunctional {
    pub base: GridFunction,
    pub p: f64,
    pub norm_p: f64,
    /// Coefficients of `f` when built from a polynomial; used for the exact
    /// `p = 2` path.
    coeffs: Option<TrigPolynomial>,
    kernel_hat: Vec<Complex64>,
}

impl NormingFunctional {
    /// Functional of `f` on its default quadrature grid.
    pub fn new(f: &TrigPolynomial, p: f64, opts: &QuadratureOptions) -> Result<Self> {
        Self::on_grid(f, p, &default_grid(&f.max_abs_freq(), opts.oversample))
    }

    /// Functional of `f` on an explicit grid.
    pub fn on_grid(f: &TrigPolynomial, p: f64, sizes: &[usize]) -> Result<Self> {
        let g = sample(f, sizes)?;
        let mut out = Self::from_samples(g, p)?;
        out.coeffs = Some(f.clone());
        Ok(out)
    }

    /// Functional of real samples.
    pub fn from_samples(base: GridFunction, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "norming exponent {p} must lie in (1, inf)"
            )));
        }
        let re = base.real_parts();
        let norm_p = lp(&re, p);
        if norm_p == 0.0 {
            return Err(Error::ZeroResidual);
        }
        let ws = workspace_for(&base);
        let kernel_hat = ws.spectrum(&norming_kernel(&re, norm_p, p));
        Ok(Self {
            base,
            p,
            norm_p,
            coeffs: None,
            kernel_hat,
        })
    }

    /// `F_f(g)`. At `p = 2` with known coefficients this is
    /// `⟨f, g⟩ / ‖f‖_2` by Parseval.
    pub fn apply(&self, g: &TrigPolynomial) -> Result<f64> {
        if g.dim() != self.base.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.base.dim(),
                got: g.dim(),
            });
        }
        if self.p == 2.0 {
            if let Some(f) = &self.coeffs {
                let dot: f64 = f
                    .iter()
                    .map(|(k, c)| (c * g.get(&k.neg())).re)
                    .sum();
                return Ok(dot / f.l2_norm());
            }
        }
        // Checks that `g` is unaliased on the grid.
        sample(g, self.base.sizes())?;
        let ws = workspace_for(&self.base);
        Ok(g
            .iter()
            .map(|(k, c)| (c * self.kernel_hat[ws.flat(&k.neg().0)]).re)
            .sum())
    }

    pub fn apply_atom(&self, atom: &DictionaryAtom) -> Result<f64> {
        self.apply(&atom.to_poly())
    }

    /// `F_f(φ)` for every atom from the one transform of the kernel.
    pub fn scores(&self, dict: &TrigDictionary) -> Result<Vec<f64>> {
        let ws = workspace_for(&self.base);
        check_fits(&ws, &dict.bounds)?;
        Ok(crate::par::map_slice(dict.atoms(), |a| {
            Workspace::inner(&self.kernel_hat, &ws.terms(a))
        }))
    }
}

fn workspace_for(g: &GridFunction) -> Workspace {
    Workspace {
        sizes: g.sizes().to_vec(),
        total: g.len(),
    }
}

pub(crate) fn check_fits(ws: &Workspace, bounds: &[u64]) -> Result<()> {
    if bounds.len() != ws.sizes.len() {
        return Err(Error::DimensionMismatch {
            expected: ws.sizes.len(),
            got: bounds.len(),
        });
    }
    if bounds.iter().zip(&ws.sizes).any(|(&n, &m)| 2 * n as usize >= m) {
        return Err(Error::Aliasing {
            grid: ws.sizes.clone(),
            freq: bounds.iter().map(|&n| n as i64).collect(),
        });
    }
    Ok(())
}

/// Index of the selected atom: the largest `|score|` for `t = 1`, otherwise
/// the first atom in canonical order with `|score| ≥ t · max`. Ties go to the
/// canonically smaller atom.
pub(crate) fn pick(scores: &[f64], t: f64, exclude: impl Fn(usize) -> bool) -> Option<usize> {
    let max = scores
        .iter()
        .enumerate()
        .filter(|(i, _)| !exclude(*i))
        .fold(0.0f64, |m, (_, s)| m.max(s.abs()));
    if max == 0.0 {
        return None;
    }
    let threshold = if t >= 1.0 { max } else { t * max };
    scores
        .iter()
        .enumerate()
        .find(|(i, s)| !exclude(*i) && s.abs() >= threshold)
        .map(|(i, _)| i)
}

/// Weak greedy selection over the whole dictionary.
pub fn select_atom(f: &NormingFunctional, dict: &TrigDictionary, t: f64) -> Result<usize> {
    check_weakness(t)?;
    if dict.is_empty() {
        return Err(Error::InvalidParameter("empty dictionary".into()));
    }
    let scores = f.scores(dict)?;
    pick(&scores, t, |_| false).ok_or(Error::ZeroResidual)
}

pub(crate) fn check_weakness(t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!("weakness t = {t} must lie in (0, 1]")));
    }
    Ok(())
}
