use crate::error::{Error, Result};
use crate::trig::{FrequencyIndex, TrigPolynomial};
use num_complex::Complex64;

/// Product Fejér kernel `∏ K_{N_j}(x_j)` with `K_N = Σ_{|k|<N} (1 - |k|/N) e^{ikx}`.
pub fn fejer_kernel(n: &[u64]) -> Result<TrigPolynomial> {
    if n.is_empty() {
        return Err(Error::InvalidParameter("Fejér kernel needs at least one axis".into()));
    }
    if let Some(bad) = n.iter().find(|&&v| v == 0) {
        return Err(Error::InvalidParameter(format!("Fejér order must be at least 1, got {bad}")));
    }
    let mut entries: Vec<(Vec<i64>, f64)> = vec![(Vec::new(), 1.0)];
    for &nj in n {
        let nj = nj as i64;
        let mut next = Vec::with_capacity(entries.len() * (2 * nj as usize - 1));
        for (k, c) in &entries {
            for kj in -(nj - 1)..nj {
                let mut k2 = k.clone();
                k2.push(kj);
                next.push((k2, c * (1.0 - kj.abs() as f64 / nj as f64)));
            }
        }
        entries = next;
    }
    TrigPolynomial::from_entries(
        n.len(),
        entries
            .into_iter()
            .map(|(k, c)| (FrequencyIndex(k), Complex64::new(c, 0.0))),
    )
}

/// `K_N(x) = sin²(Nx/2) / (N sin²(x/2))`, with the limit `N` at `x ∈ 2πZ`.
pub fn fejer_closed_form(n: u64, x: f64) -> f64 {
    let nf = n as f64;
    let den = (0.5 * x).sin();
    if den.abs() < 1e-12 {
        return nf;
    }
    let num = (0.5 * nf * x).sin();
    num * num / (nf * den * den)
}
