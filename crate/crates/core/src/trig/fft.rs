use num_complex::Complex64;
use rustfft::FftPlanner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X_k = Σ_n x_n e^{-2πi kn/N}`.
    Forward,
    /// `x_n = Σ_k X_k e^{+2πi kn/N}` (unnormalized).
    Inverse,
}

/// In-place multidimensional FFT over a row-major array (last axis fastest).
///
/// Planner and scratch space are local to the call.
pub fn transform_nd(data: &mut [Complex64], sizes: &[usize], dir: Direction) {
    let total: usize = sizes.iter().product();
    assert_eq!(data.len(), total, "buffer does not match grid shape");
    if total == 0 {
        return;
    }
    let mut planner = FftPlanner::<f64>::new();
    let d = sizes.len();
    let mut stride = 1usize;
    for axis in (0..d).rev() {
        let n = sizes[axis];
        if n > 1 {
            let fft = match dir {
                Direction::Forward => planner.plan_fft_forward(n),
                Direction::Inverse => planner.plan_fft_inverse(n),
            };
            if stride == 1 {
                fft.process(data);
            } else {
                let mut line = vec![Complex64::default(); n];
                let block = n * stride;
                for outer in (0..total).step_by(block) {
                    for inner in 0..stride {
                        let base = outer + inner;
                        for (i, v) in line.iter_mut().enumerate() {
                            *v = data[base + i * stride];
                        }
                        fft.process(&mut line);
                        for (i, v) in line.iter().enumerate() {
                            data[base + i * stride] = *v;
                        }
                    }
                }
            }
        }
        stride *= n;
    }
}
