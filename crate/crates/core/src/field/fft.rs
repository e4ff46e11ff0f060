//! Square 2D FFT on row-major buffers.
//!
//! Forward transform is unnormalized, the inverse divides by `n²`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

struct Plan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plan(n: usize) -> Arc<Plan> {
    static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Plan>>>> = OnceLock::new();
    let plans = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = plans.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plan {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn rows(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>) {
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(n).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
}

fn transpose(data: &mut [Complex64], n: usize) {
    const BLOCK: usize = 32;
    for rb in (0..n).step_by(BLOCK) {
        for cb in (rb..n).step_by(BLOCK) {
            for r in rb..(rb + BLOCK).min(n) {
                let start = if cb == rb { r + 1 } else { cb };
                for c in start..(cb + BLOCK).min(n) {
                    data.swap(r * n + c, c * n + r);
                }
            }
        }
    }
}

fn transform(data: &mut [Complex64], n: usize, inverse: bool) {
    assert_eq!(data.len(), n * n, "buffer is not n×n");
    let p = plan(n);
    let fft = if inverse { &p.inverse } else { &p.forward };
    rows(data, n, fft);
    transpose(data, n);
    rows(data, n, fft);
    transpose(data, n);
    if inverse {
        let scale = 1.0 / (n * n) as f64;
        data.par_iter_mut().for_each(|v| *v *= scale);
    }
}

/// In-place forward DFT (unnormalized).
pub fn dft2(data: &mut [Complex64], n: usize) {
    transform(data, n, false);
}

/// In-place inverse DFT, divided by `n²`.
pub fn idft2(data: &mut [Complex64], n: usize) {
    transform(data, n, true);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_dft() {
        let n = 16;
        let data: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        dft2(&mut fast, n);
        for k2 in [0usize, 3, 9] {
            for k1 in [0usize, 5, 15] {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..n {
                    for c in 0..n {
                        let phase = -2.0 * std::f64::consts::PI * ((k1 * c + k2 * r) as f64) / n as f64;
                        acc += data[r * n + c] * Complex64::from_polar(1.0, phase);
                    }
                }
                assert!((acc - fast[k2 * n + k1]).norm() < 1e-10);
            }
        }
        idft2(&mut fast, n);
        for (a, b) in fast.iter().zip(&data) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn transpose_is_involution() {
        let n = 64;
        let data: Vec<Complex64> = (0..n * n).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let mut t = data.clone();
        transpose(&mut t, n);
        assert_eq!(t[1], data[n]);
        transpose(&mut t, n);
        assert_eq!(t, data);
    }
}
