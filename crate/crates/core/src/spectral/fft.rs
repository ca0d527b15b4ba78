use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Unnormalized 2D complex FFT on an `nx * ny` array stored with the first index fastest.
#[derive(Clone)]
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fx: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.nx, self.ny)
    }
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut p = FftPlanner::new();
        Self {
            nx,
            ny,
            fx: p.plan_fft_forward(nx),
            fy: p.plan_fft_forward(ny),
            ix: p.plan_fft_inverse(nx),
            iy: p.plan_fft_inverse(ny),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// `X[p, q] = Σ x[i, j] exp(-2πi (p i / nx + q j / ny))`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &*self.fx, &*self.fy);
    }

    /// `x[i, j] = Σ X[p, q] exp(+2πi (p i / nx + q j / ny))`, no `1/N` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &*self.ix, &*self.iy);
    }

    fn run(&self, data: &mut [Complex64], rows: &dyn Fft<f64>, cols: &dyn Fft<f64>) {
        let (nx, ny) = (self.nx, self.ny);
        assert_eq!(data.len(), nx * ny, "Fft2 buffer size");
        rows.process(data);
        let mut t = vec![Complex64::new(0.0, 0.0); nx * ny];
        transpose(data, &mut t, nx, ny);
        cols.process(&mut t);
        transpose(&t, data, ny, nx);
    }
}

/// `dst[j + ny * i] = src[i + nx * j]`, blocked for cache reuse.
fn transpose(src: &[Complex64], dst: &mut [Complex64], nx: usize, ny: usize) {
    const B: usize = 32;
    for jb in (0..ny).step_by(B) {
        for ib in (0..nx).step_by(B) {
            for j in jb..(jb + B).min(ny) {
                for i in ib..(ib + B).min(nx) {
                    dst[j + ny * i] = src[i + nx * j];
                }
            }
        }
    }
}
