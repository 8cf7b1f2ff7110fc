//! Complex 3D FFT on an `n³` cube stored row-major (last index fastest).
//!
//! Each pass transforms the contiguous axis and then rotates the axes
//! `(i, j, l) -> (j, l, i)`, so three passes bring the data back into the
//! original layout. Work is split over planes with rayon; every line is
//! transformed by the same code path whatever the thread count, so results
//! are bit-identical across pool sizes.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

const BLOCK: usize = 16;

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalised forward transform, `X(k) = sum_x x e^{-ikx}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Unnormalised inverse transform, `x = sum_k X(k) e^{ikx}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "fft buffer size");
        let mut tmp = vec![Complex64::new(0.0, 0.0); data.len()];
        lines(data, n, plan);
        rotate(data, &mut tmp, n);
        lines(&mut tmp, n, plan);
        rotate(&tmp, data, n);
        lines(data, n, plan);
        rotate(data, &mut tmp, n);
        data.copy_from_slice(&tmp);
    }
}

fn lines(data: &mut [Complex64], n: usize, plan: &Arc<dyn Fft<f64>>) {
    let scratch_len = plan.get_inplace_scratch_len();
    data.par_chunks_mut(n * n).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, plane| plan.process_with_scratch(plane, scratch),
    );
}

/// `dst[(j*n + l)*n + i] = src[(i*n + j)*n + l]`, i.e. the transpose of the
/// `n x n²` matrix `src`.
fn rotate(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    let n2 = n * n;
    let block = BLOCK.min(n2);
    dst.par_chunks_mut(block * n)
        .enumerate()
        .for_each(|(b, out)| {
            let jl0 = b * block;
            for i in 0..n {
                let row = &src[i * n2 + jl0..i * n2 + jl0 + block];
                for (c, v) in row.iter().enumerate() {
                    out[c * n + i] = *v;
                }
            }
        });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(data: &[Complex64], n: usize, sign: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for k1 in 0..n {
            for k2 in 0..n {
                for k3 in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x1 in 0..n {
                        for x2 in 0..n {
                            for x3 in 0..n {
                                let phase = sign * 2.0 * PI * ((k1 * x1 + k2 * x2 + k3 * x3) % n) as f64
                                    / n as f64;
                                acc += data[(x1 * n + x2) * n + x3] * Complex64::from_polar(1.0, phase);
                            }
                        }
                    }
                    out[(k1 * n + k2) * n + k3] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let n = 4;
        let data: Vec<Complex64> = (0..n * n * n)
            .map(|q| Complex64::new((q as f64 * 0.37).sin(), (q as f64 * 1.3).cos()))
            .collect();
        let fft = Fft3::new(n);
        let mut fwd = data.clone();
        fft.forward(&mut fwd);
        let want = naive_dft(&data, n, -1.0);
        for (a, b) in fwd.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut inv = data.clone();
        fft.inverse(&mut inv);
        let want = naive_dft(&data, n, 1.0);
        for (a, b) in inv.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rotation_cycles_back() {
        let n = 8;
        let src: Vec<Complex64> = (0..n * n * n).map(|q| Complex64::new(q as f64, 0.0)).collect();
        let mut a = vec![Complex64::new(0.0, 0.0); src.len()];
        let mut b = a.clone();
        rotate(&src, &mut a, n);
        rotate(&a, &mut b, n);
        rotate(&b, &mut a, n);
        assert_eq!(a, src);
    }
}
