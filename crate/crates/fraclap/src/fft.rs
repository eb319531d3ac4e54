//! FFT-backed linear convolution and symmetric-Toeplitz matrix-vector
//! products via circulant embedding.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

fn plans(len: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    (
        planner.plan_fft_forward(len),
        planner.plan_fft_inverse(len),
    )
}

/// Full linear convolution: `out[k] = Σ_i a[i] b[k-i]`, length `a+b-1`.
pub fn convolve_full(a: &[f64], b: &[f64]) -> Vec<f64> {
    let out_len = a.len() + b.len() - 1;
    let n = next_pow2(out_len);
    let (fwd, inv) = plans(n);
    let mut fa: Vec<Complex64> = a
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(n)
        .collect();
    let mut fb: Vec<Complex64> = b
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(n)
        .collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / n as f64;
    fa.truncate(out_len);
    fa.iter().map(|c| c.re * scale).collect()
}

/// Symmetric Toeplitz operator `T x`, `T_{jm} = col[|j-m|]`, applied through
/// a circulant embedding of size `next_pow2(2N)` with a cached FFT plan.
pub struct SymToeplitz {
    n: usize,
    fft_len: usize,
    eig: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl SymToeplitz {
    pub fn new(col: &[f64]) -> Self {
        let n = col.len();
        assert!(n >= 1);
        let fft_len = next_pow2(2 * n);
        let (fwd, inv) = plans(fft_len);
        let mut c = vec![Complex64::new(0.0, 0.0); fft_len];
        c[0] = Complex64::new(col[0], 0.0);
        for k in 1..n {
            c[k] = Complex64::new(col[k], 0.0);
            c[fft_len - k] = Complex64::new(col[k], 0.0);
        }
        let mut eig = c;
        fwd.process(&mut eig);
        SymToeplitz {
            n,
            fft_len,
            eig,
            fwd,
            inv,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut buf: Vec<Complex64> = x
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
            .take(self.fft_len)
            .collect();
        self.fwd.process(&mut buf);
        for (b, e) in buf.iter_mut().zip(&self.eig) {
            *b *= e;
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.fft_len as f64;
        buf[..self.n].iter().map(|c| c.re * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_conv(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn convolution_matches_direct() {
        let a: Vec<f64> = (0..37).map(|i| (i as f64 * 0.7).sin()).collect();
        let b: Vec<f64> = (0..21).map(|i| (i as f64 * 1.3).cos()).collect();
        let fast = convolve_full(&a, &b);
        let slow = direct_conv(&a, &b);
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn toeplitz_matvec_matches_direct() {
        let n = 50;
        let col: Vec<f64> = (0..n).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 % 13) as f64) - 6.0).collect();
        let t = SymToeplitz::new(&col);
        let fast = t.matvec(&x);
        for j in 0..n {
            let mut acc = 0.0;
            for (m, &xm) in x.iter().enumerate() {
                acc += col[(j as i64 - m as i64).unsigned_abs() as usize] * xm;
            }
            assert!((fast[j] - acc).abs() < 1e-12);
        }
    }
}
