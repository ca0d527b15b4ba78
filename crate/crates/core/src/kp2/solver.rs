use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::KP2Coefficients;
use crate::error::{Error, Result};
use crate::spectral::{SpectralField2D, SpectralGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Linear symbol `L` of `A_τ = L A + N(A)`: `(i/a_t)(a_4 kξ³ - a_e kη²/kξ)`, zero at `kξ = 0`.
pub fn linear_symbol(c: &KP2Coefficients, kx: f64, ky: f64) -> Complex64 {
    if kx == 0.0 {
        ZERO
    } else {
        Complex64::new(0.0, (c.a_4 * kx.powi(3) - c.a_e * ky * ky / kx) / c.a_t)
    }
}

/// Time-independent data of the pseudo-spectral discretization.
#[derive(Debug, Clone)]
struct Operators {
    grid: Arc<SpectralGrid>,
    lin: Vec<Complex64>,
    /// `-(a_n / 2a_t) i kξ`, zero outside the two-thirds band.
    nl: Vec<Complex64>,
    /// Modes the solution may occupy: `kξ != 0`, inside the band, not Nyquist.
    active: Vec<bool>,
}

impl Operators {
    fn new(grid: &Arc<SpectralGrid>, c: &KP2Coefficients, nonlinear: bool) -> Self {
        let n = grid.len();
        let (mut lin, mut nl, mut active) = (vec![ZERO; n], vec![ZERO; n], vec![false; n]);
        let g = if nonlinear { c.a_n / (2.0 * c.a_t) } else { 0.0 };
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let idx = i + grid.nx * j;
                let (kx, ky) = (grid.kx(i), grid.ky(j));
                let on = kx != 0.0 && grid.in_dealias_band(i, j) && !grid.is_nyquist(i, j);
                active[idx] = on;
                if on {
                    lin[idx] = linear_symbol(c, kx, ky);
                    nl[idx] = Complex64::new(0.0, -g * kx);
                }
            }
        }
        Self { grid: grid.clone(), lin, nl, active }
    }

    /// Dealiased `-(a_n/2a_t) ∂ξ(f g)` in coefficient space.
    fn product_term(&self, f: &[Complex64], g: Option<&[Complex64]>, out: &mut [Complex64], scale: f64) {
        let fft = self.grid.fft();
        let n = self.grid.len();
        let mut a = f.to_vec();
        fft.inverse(&mut a);
        match g {
            None => a.iter_mut().for_each(|z| *z = Complex64::new(z.re * z.re, 0.0)),
            Some(g) => {
                let mut b = g.to_vec();
                fft.inverse(&mut b);
                a.iter_mut().zip(&b).for_each(|(z, w)| *z = Complex64::new(z.re * w.re, 0.0));
            }
        }
        fft.forward(&mut a);
        let s = scale / n as f64;
        for ((o, z), m) in out.iter_mut().zip(&a).zip(&self.nl) {
            *o = m * z * s;
        }
    }

    fn nonlinear(&self, u: &[Complex64], out: &mut [Complex64]) {
        self.product_term(u, None, out, 1.0);
    }
}

/// `φ1, φ2, φ3` at `z`, by Taylor series for `|z| < 1`.
pub fn phi123(z: Complex64) -> [Complex64; 3] {
    if z.norm() < 1.0 {
        let mut out = [ZERO; 3];
        for (k, o) in out.iter_mut().enumerate() {
            // Σ z^n / (n + k + 1)!
            let mut term = Complex64::new(1.0 / factorial(k + 1), 0.0);
            let mut acc = term;
            for n in 1..30 {
                term = term * z / (n + k + 1) as f64;
                acc += term;
            }
            *o = acc;
        }
        out
    } else {
        let e = z.exp();
        let p1 = (e - 1.0) / z;
        let p2 = (e - 1.0 - z) / (z * z);
        let p3 = (e - 1.0 - z - z * z / 2.0) / (z * z * z);
        [p1, p2, p3]
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[derive(Debug, Clone)]
struct EtdCoefficients {
    h: f64,
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    half: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

impl EtdCoefficients {
    fn new(lin: &[Complex64], h: f64) -> Self {
        let n = lin.len();
        let mut s = Self {
            h,
            e: vec![ZERO; n],
            e2: vec![ZERO; n],
            half: vec![ZERO; n],
            f1: vec![ZERO; n],
            f2: vec![ZERO; n],
            f3: vec![ZERO; n],
        };
        for (i, &l) in lin.iter().enumerate() {
            let z = l * h;
            let [p1, p2, p3] = phi123(z);
            let [q1, _, _] = phi123(z / 2.0);
            s.e[i] = z.exp();
            s.e2[i] = (z / 2.0).exp();
            s.half[i] = q1 * (h / 2.0);
            s.f1[i] = (p1 - 3.0 * p2 + 4.0 * p3) * h;
            s.f2[i] = (2.0 * p2 - 4.0 * p3) * h;
            s.f3[i] = (4.0 * p3 - p2) * h;
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Turning this off leaves only the linear flow `exp(τΩ)`.
    pub nonlinear: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { nonlinear: true }
    }
}

/// Fourth-order exponential time differencing (Cox-Matthews ETDRK4) for KP-II on a periodic box.
#[derive(Debug, Clone)]
pub struct Kp2Solver {
    ops: Operators,
    coeffs: KP2Coefficients,
    dtau: f64,
    etd: Option<EtdCoefficients>,
    u: Vec<Complex64>,
    tau: f64,
}

impl Kp2Solver {
    /// `a0` must have zero ξ-mean; it is projected onto the resolved band.
    pub fn new(a0: &SpectralField2D, coeffs: KP2Coefficients, dtau: f64, opts: SolverOptions) -> Result<Self> {
        KP2Coefficients::new(coeffs.a_t, coeffs.a_4, coeffs.a_n, coeffs.a_e)?;
        if !(dtau > 0.0 && dtau.is_finite()) {
            return Err(Error::Domain(format!("dtau must be positive, got {dtau}")));
        }
        a0.check_zero_mean()?;
        let ops = Operators::new(a0.grid(), &coeffs, opts.nonlinear);
        let u = a0.coeffs().iter().zip(&ops.active).map(|(&c, &on)| if on { c } else { ZERO }).collect();
        Ok(Self { ops, coeffs, dtau, etd: None, u, tau: 0.0 })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn coefficients(&self) -> &KP2Coefficients {
        &self.coeffs
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.ops.grid
    }

    pub fn current(&self) -> SpectralField2D {
        SpectralField2D::from_coeffs(&self.ops.grid, self.u.clone()).expect("grid-sized state")
    }

    /// `A_τ` of the current state, consistent with the discretized flow.
    pub fn tendency(&self) -> SpectralField2D {
        let mut nl = vec![ZERO; self.u.len()];
        self.ops.nonlinear(&self.u, &mut nl);
        let c: Vec<Complex64> = self.u.iter().zip(&self.ops.lin).zip(&nl).map(|((u, l), n)| l * u + n).collect();
        SpectralField2D::from_coeffs(&self.ops.grid, c).expect("grid-sized state")
    }

    /// One step of size `h`.
    pub fn step(&mut self, h: f64) -> Result<()> {
        if !matches!(&self.etd, Some(e) if e.h == h) {
            self.etd = Some(EtdCoefficients::new(&self.ops.lin, h));
        }
        let k = self.etd.as_ref().unwrap();
        let ops = &self.ops;
        let n = self.u.len();
        let u = &self.u;
        let (mut nu, mut na, mut nb, mut nc) = (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);

        ops.nonlinear(u, &mut nu);
        let a: Vec<Complex64> = (0..n).map(|i| k.e2[i] * u[i] + k.half[i] * nu[i]).collect();
        ops.nonlinear(&a, &mut na);
        let b: Vec<Complex64> = (0..n).map(|i| k.e2[i] * u[i] + k.half[i] * na[i]).collect();
        ops.nonlinear(&b, &mut nb);
        let c: Vec<Complex64> = (0..n).map(|i| k.e2[i] * a[i] + k.half[i] * (2.0 * nb[i] - nu[i])).collect();
        ops.nonlinear(&c, &mut nc);
        let next: Vec<Complex64> = (0..n)
            .map(|i| {
                if !ops.active[i] {
                    return ZERO;
                }
                k.e[i] * u[i] + k.f1[i] * nu[i] + k.f2[i] * (na[i] + nb[i]) + k.f3[i] * nc[i]
            })
            .collect();
        if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BlowUp { what: "KP-II solver".into(), last_finite_time: self.tau });
        }
        self.u = next;
        self.tau += h;
        Ok(())
    }

    /// Advances to `target` in equal substeps no longer than the nominal `dtau`.
    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        let span = target - self.tau;
        if span < -1e-14 * target.abs().max(1.0) {
            return Err(Error::Domain(format!("cannot integrate backwards from {} to {target}", self.tau)));
        }
        if span <= 0.0 {
            return Ok(());
        }
        let steps = ((span / self.dtau) - 1e-9).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            self.step(h)?;
        }
        self.tau = target;
        Ok(())
    }
}

/// `A_τ = L A - (a_n/2a_t) ∂ξ P(A²)` with `P` the two-thirds projection.
pub fn tendency(a: &SpectralField2D, coeffs: &KP2Coefficients) -> SpectralField2D {
    let ops = Operators::new(a.grid(), coeffs, true);
    let mut nl = vec![ZERO; a.coeffs().len()];
    ops.nonlinear(a.coeffs(), &mut nl);
    let c = a.coeffs().iter().zip(&ops.lin).zip(&nl).map(|((u, l), n)| l * u + n).collect();
    SpectralField2D::from_coeffs(a.grid(), c).expect("same grid")
}

/// `A_ττ = L A_τ - (a_n/a_t) ∂ξ P(A A_τ)`, the τ-derivative of [`tendency`].
pub fn second_tendency(a: &SpectralField2D, a_tau: &SpectralField2D, coeffs: &KP2Coefficients) -> SpectralField2D {
    let ops = Operators::new(a.grid(), coeffs, true);
    let mut nl = vec![ZERO; a.coeffs().len()];
    ops.product_term(a.coeffs(), Some(a_tau.coeffs()), &mut nl, 2.0);
    let c = a_tau.coeffs().iter().zip(&ops.lin).zip(&nl).map(|((u, l), n)| l * u + n).collect();
    SpectralField2D::from_coeffs(a.grid(), c).expect("same grid")
}

/// One ETDRK4 step from `a`.
pub fn kp2_step(a: &SpectralField2D, coeffs: &KP2Coefficients, dtau: f64) -> Result<SpectralField2D> {
    let mut s = Kp2Solver::new(a, *coeffs, dtau, SolverOptions::default())?;
    s.step(dtau)?;
    Ok(s.current())
}
