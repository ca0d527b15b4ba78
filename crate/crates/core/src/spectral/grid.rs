use std::f64::consts::PI;
use std::sync::Arc;

use super::Fft2;
use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, lx) x [0, ly)`; storage index `i + nx * j`.
#[derive(Debug)]
pub struct SpectralGrid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    fft: Fft2,
}

impl PartialEq for SpectralGrid {
    fn eq(&self, o: &Self) -> bool {
        self.nx == o.nx && self.ny == o.ny && self.lx == o.lx && self.ly == o.ly
    }
}

impl SpectralGrid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Arc<Self>> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::Config(format!("{name} must be even and >= 4, got {n}")));
            }
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(Error::Config(format!("box periods must be positive, got {lx} x {ly}")));
        }
        Ok(Arc::new(Self { nx, ny, lx, ly, fft: Fft2::new(nx, ny) }))
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fft(&self) -> &Fft2 {
        &self.fft
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.dy()
    }

    /// Signed mode number of storage index `i` along `xi`.
    #[inline]
    pub fn mode_x(&self, i: usize) -> i64 {
        signed_mode(i, self.nx)
    }

    #[inline]
    pub fn mode_y(&self, j: usize) -> i64 {
        signed_mode(j, self.ny)
    }

    #[inline]
    pub fn kx(&self, i: usize) -> f64 {
        2.0 * PI * self.mode_x(i) as f64 / self.lx
    }

    #[inline]
    pub fn ky(&self, j: usize) -> f64 {
        2.0 * PI * self.mode_y(j) as f64 / self.ly
    }

    pub fn is_nyquist(&self, i: usize, j: usize) -> bool {
        i == self.nx / 2 || j == self.ny / 2
    }

    /// Two-thirds rule: keep `|m| < nx/3` and `|n| < ny/3`.
    pub fn in_dealias_band(&self, i: usize, j: usize) -> bool {
        3 * self.mode_x(i).unsigned_abs() < self.nx as u64 && 3 * self.mode_y(j).unsigned_abs() < self.ny as u64
    }
}

#[inline]
pub(crate) fn signed_mode(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
