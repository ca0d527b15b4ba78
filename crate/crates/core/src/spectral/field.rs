use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::SpectralGrid;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative tolerance for the zero-xi-mean constraint.
pub const ZERO_MEAN_TOL: f64 = 1e-12;

/// Real periodic field with cached Fourier coefficients
/// `c[p, q] = (1/N) Σ f(x_i, y_j) exp(-i (k_p x_i + k_q y_j))`.
///
/// Nyquist modes are always zero, so every field is a real trigonometric polynomial
/// and spectral operators act exactly.
#[derive(Debug, Clone)]
pub struct SpectralField2D {
    grid: Arc<SpectralGrid>,
    values: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl SpectralField2D {
    pub fn zeros(grid: &Arc<SpectralGrid>) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.len()], coeffs: vec![ZERO; grid.len()] }
    }

    pub fn from_values(grid: &Arc<SpectralGrid>, values: Vec<f64>) -> Result<Self> {
        check_len(grid, values.len())?;
        let mut c: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        grid.fft().forward(&mut c);
        let s = 1.0 / grid.len() as f64;
        c.iter_mut().for_each(|z| *z *= s);
        let had_nyquist = zero_nyquist(grid, &mut c);
        if had_nyquist {
            return Self::from_coeffs(grid, c);
        }
        Ok(Self { grid: grid.clone(), values, coeffs: c })
    }

    pub fn from_fn(grid: &Arc<SpectralGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut v = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                v.push(f(grid.x(i), grid.y(j)));
            }
        }
        Self::from_values(grid, v).expect("length matches grid")
    }

    /// Builds the field from coefficients; they are symmetrized to the nearest real field.
    pub fn from_coeffs(grid: &Arc<SpectralGrid>, mut coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(grid, coeffs.len())?;
        zero_nyquist(grid, &mut coeffs);
        let (nx, ny) = (grid.nx, grid.ny);
        for j in 0..ny {
            let jm = (ny - j) % ny;
            for i in 0..nx {
                let im = (nx - i) % nx;
                let (a, b) = (i + nx * j, im + nx * jm);
                if a < b {
                    let h = 0.5 * (coeffs[a] + coeffs[b].conj());
                    coeffs[a] = h;
                    coeffs[b] = h.conj();
                } else if a == b {
                    coeffs[a].im = 0.0;
                }
            }
        }
        let mut buf = coeffs.clone();
        grid.fft().inverse(&mut buf);
        let values = buf.into_iter().map(|z| z.re).collect();
        Ok(Self { grid: grid.clone(), values, coeffs })
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Applies the Fourier multiplier `m(kx, ky)`; `m(-k)` must equal `conj(m(k))`.
    pub fn apply_multiplier(&self, m: impl Fn(f64, f64) -> Complex64) -> Self {
        let g = &self.grid;
        let mut c = self.coeffs.clone();
        for j in 0..g.ny {
            let ky = g.ky(j);
            for i in 0..g.nx {
                let z = &mut c[i + g.nx * j];
                if *z != ZERO {
                    *z *= m(g.kx(i), ky);
                }
            }
        }
        Self::from_coeffs(g, c).expect("same grid")
    }

    /// `∂ξ^p ∂η^q f` for `p, q >= 0`.
    pub fn derivative(&self, p: u32, q: u32) -> Self {
        self.apply_multiplier(|kx, ky| ik_pow(kx, p as i32) * ik_pow(ky, q as i32))
    }

    /// `∂ξ^p ∂η^q f` where a negative `p` divides by `(i kξ)^|p|`; needs zero xi-mean.
    pub fn partial(&self, p: i32, q: u32) -> Result<Self> {
        if p < 0 {
            self.check_zero_mean()?;
        }
        Ok(self.apply_multiplier(|kx, ky| {
            if kx == 0.0 && p < 0 {
                ZERO
            } else {
                ik_pow(kx, p) * ik_pow(ky, q as i32)
            }
        }))
    }

    /// `∂ξ^{-power} f` by Fourier division with the `kξ = 0` modes annihilated.
    pub fn antiderivative_xi(&self, power: u32) -> Result<Self> {
        if !(1..=2).contains(&power) {
            return Err(Error::Domain(format!("antiderivative power must be 1 or 2, got {power}")));
        }
        self.partial(-(power as i32), 0)
    }

    /// Removes the `kξ = 0` Fourier modes, i.e. subtracts the xi-average of every row.
    pub fn zero_mean_project(&self) -> Self {
        let g = &self.grid;
        let mut c = self.coeffs.clone();
        for j in 0..g.ny {
            c[g.nx * j] = ZERO;
        }
        Self::from_coeffs(g, c).expect("same grid")
    }

    /// Upper bound `Σ_q |c[0, q]|` for the largest row average.
    pub fn zero_mode_content(&self) -> f64 {
        (0..self.grid.ny).map(|j| self.coeffs[self.grid.nx * j].norm()).sum()
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mode_content() <= ZERO_MEAN_TOL * self.sup_norm()
    }

    pub fn check_zero_mean(&self) -> Result<()> {
        if self.is_zero_mean() {
            Ok(())
        } else {
            Err(Error::Constraint(format!(
                "kxi = 0 content {:.3e} exceeds {:.0e} of sup norm {:.3e}",
                self.zero_mode_content(),
                ZERO_MEAN_TOL,
                self.sup_norm()
            )))
        }
    }

    /// `(Σ <k>^{2s} |m(k) c_k|² lx ly)^{1/2}` with `<k> = sqrt(1 + kξ² + kη²)` and
    /// `m = Π (i kξ)^p (i kη)^q` over `prefactors`.
    pub fn hs_norm(&self, s: f64, prefactors: &[(i32, u32)]) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("regularity index must be >= 0, got {s}")));
        }
        if prefactors.iter().any(|&(p, _)| p < 0) {
            self.check_zero_mean()?;
        }
        let g = &self.grid;
        let mut acc = 0.0;
        for j in 0..g.ny {
            let ky = g.ky(j);
            for i in 0..g.nx {
                let c = self.coeffs[i + g.nx * j];
                if c == ZERO {
                    continue;
                }
                let kx = g.kx(i);
                if kx == 0.0 && prefactors.iter().any(|&(p, _)| p < 0) {
                    continue;
                }
                let mut w = (1.0 + kx * kx + ky * ky).powf(s);
                for &(p, q) in prefactors {
                    w *= (kx.abs().powi(p) * ky.abs().powi(q as i32)).powi(2);
                }
                acc += w * c.norm_sqr();
            }
        }
        Ok((acc * g.lx * g.ly).sqrt())
    }

    /// Continuum `L²` norm, via Parseval.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (s * self.grid.lx * self.grid.ly).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `f(ξ + dx, η + dy)` by Fourier phase multiplication.
    pub fn shift(&self, dx: f64, dy: f64) -> Self {
        self.apply_multiplier(|kx, ky| Complex64::from_polar(1.0, kx * dx + ky * dy))
    }

    /// Pointwise product, without dealiasing.
    pub fn product(&self, other: &Self) -> Self {
        self.assert_same_grid(other);
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Self::from_values(&self.grid, v).expect("same grid")
    }

    pub fn square(&self) -> Self {
        self.product(self)
    }

    /// Keeps only the two-thirds band.
    pub fn dealias(&self) -> Self {
        let g = &self.grid;
        let mut c = self.coeffs.clone();
        for j in 0..g.ny {
            for i in 0..g.nx {
                if !g.in_dealias_band(i, j) {
                    c[i + g.nx * j] = ZERO;
                }
            }
        }
        Self::from_coeffs(g, c).expect("same grid")
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| a * v).collect(),
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    /// `self + a x`.
    pub fn axpy(&self, a: f64, x: &Self) -> Self {
        self.assert_same_grid(x);
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&x.values).map(|(s, x)| s + a * x).collect(),
            coeffs: self.coeffs.iter().zip(&x.coeffs).map(|(s, x)| s + a * x).collect(),
        }
    }

    /// Trigonometric interpolant at an arbitrary point.
    pub fn eval_at(&self, x: f64, y: f64) -> f64 {
        let g = &self.grid;
        let mut acc = 0.0;
        for j in 0..g.ny {
            let ky = g.ky(j);
            for i in 0..g.nx {
                let c = self.coeffs[i + g.nx * j];
                if c != ZERO {
                    acc += (c * Complex64::from_polar(1.0, g.kx(i) * x + ky * y)).re;
                }
            }
        }
        acc
    }

    fn assert_same_grid(&self, o: &Self) {
        assert!(
            Arc::ptr_eq(&self.grid, &o.grid) || *self.grid == *o.grid,
            "spectral fields live on different grids"
        );
    }
}

impl Add for &SpectralField2D {
    type Output = SpectralField2D;
    fn add(self, o: Self) -> SpectralField2D {
        self.axpy(1.0, o)
    }
}

impl Sub for &SpectralField2D {
    type Output = SpectralField2D;
    fn sub(self, o: Self) -> SpectralField2D {
        self.axpy(-1.0, o)
    }
}

impl Mul<&SpectralField2D> for f64 {
    type Output = SpectralField2D;
    fn mul(self, f: &SpectralField2D) -> SpectralField2D {
        f.scale(self)
    }
}

impl Neg for &SpectralField2D {
    type Output = SpectralField2D;
    fn neg(self) -> SpectralField2D {
        self.scale(-1.0)
    }
}

/// `(i k)^p` for any integer `p`; callers handle `k = 0` with `p < 0`.
#[inline]
pub fn ik_pow(k: f64, p: i32) -> Complex64 {
    let mag = k.powi(p);
    match p.rem_euclid(4) {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    }
}

fn check_len(grid: &SpectralGrid, n: usize) -> Result<()> {
    if n != grid.len() {
        return Err(Error::Dimension(format!("{n} entries for a {}x{} grid", grid.nx, grid.ny)));
    }
    Ok(())
}

fn zero_nyquist(grid: &SpectralGrid, c: &mut [Complex64]) -> bool {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut any = false;
    for j in 0..ny {
        let z = &mut c[nx / 2 + nx * j];
        any |= *z != ZERO;
        *z = ZERO;
    }
    for i in 0..nx {
        let z = &mut c[i + nx * (ny / 2)];
        any |= *z != ZERO;
        *z = ZERO;
    }
    any
}
