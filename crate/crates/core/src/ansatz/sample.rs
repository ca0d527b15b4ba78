use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AnsatzBundle;
use crate::error::{Error, Result};
use crate::lattice::{AnyLatticeState, GridSpec, LatticeState, LatticeStateD, LatticeStateH};
use crate::params::{Frame, ModelParams};
use crate::spectral::{Fft2, SpectralField2D, SpectralGrid};

/// Relative tolerance for `nj·ε = Lξ`, `nk·ε² = Lη`.
const COMMENSURATE_TOL: f64 = 1e-9;

/// Placement of the lattice inside the continuum box: site `(j, k)` sits at
/// `ξ = ε(j - c t)`, `η = ε² k` with `c` the frame speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeGeometry {
    pub frame: Frame,
    pub eps: f64,
    pub speed: f64,
    pub nj: usize,
    pub nk: usize,
}

fn nearest_even(x: f64) -> usize {
    ((x / 2.0).round() as usize * 2).max(4)
}

impl LatticeGeometry {
    /// Lattice for an exact box `Lξ = nj ε`, `Lη = nk ε²`.
    pub fn new(frame: Frame, params: &ModelParams, eps: f64, nj: usize, nk: usize) -> Result<Self> {
        frame.check(params)?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("eps must be positive, got {eps}")));
        }
        GridSpec::new(nj, nk)?;
        Ok(Self { frame, eps, speed: frame.speed(params), nj, nk })
    }

    /// Snaps the requested box to the nearest commensurate one: `nj` and `nk` are the even
    /// integers closest to `Lξ/ε` and `Lη/ε²`.
    pub fn commensurate(frame: Frame, params: &ModelParams, eps: f64, lx: f64, ly: f64) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::Config(format!("box periods must be positive, got {lx} x {ly}")));
        }
        Self::new(frame, params, eps, nearest_even(lx / eps), nearest_even(ly / (eps * eps)))
    }

    /// Geometry matching an existing continuum grid; fails if the box is not commensurate.
    pub fn for_grid(frame: Frame, params: &ModelParams, eps: f64, grid: &SpectralGrid) -> Result<Self> {
        let (fj, fk) = (grid.lx / eps, grid.ly / (eps * eps));
        let (nj, nk) = (fj.round(), fk.round());
        if (fj - nj).abs() > COMMENSURATE_TOL * fj || (fk - nk).abs() > COMMENSURATE_TOL * fk {
            return Err(Error::Config(format!(
                "box {} x {} is not commensurate with eps = {eps}: Lxi/eps = {fj}, Leta/eps^2 = {fk}",
                grid.lx, grid.ly
            )));
        }
        Self::new(frame, params, eps, nj as usize, nk as usize)
    }

    pub fn lx(&self) -> f64 {
        self.nj as f64 * self.eps
    }

    pub fn ly(&self) -> f64 {
        self.nk as f64 * self.eps * self.eps
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::new(self.nj, self.nk).expect("validated at construction")
    }

    /// Continuum grid on this geometry's box.
    pub fn continuum_grid(&self, nx: usize, ny: usize) -> Result<Arc<SpectralGrid>> {
        SpectralGrid::new(nx, ny, self.lx(), self.ly())
    }

    pub fn check(&self, grid: &SpectralGrid) -> Result<()> {
        let ok = |a: f64, b: f64| (a - b).abs() <= COMMENSURATE_TOL * b;
        if ok(grid.lx, self.lx()) && ok(grid.ly, self.ly()) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "continuum box {} x {} does not match lattice box {} x {}",
                grid.lx,
                grid.ly,
                self.lx(),
                self.ly()
            )))
        }
    }
}

/// Evaluates continuum fields at the moving-frame lattice points by folding their Fourier
/// series onto the lattice and applying one inverse FFT; exact for trigonometric polynomials.
#[derive(Debug, Clone)]
pub struct LatticeSampler {
    pub geom: LatticeGeometry,
    fft: Fft2,
}

impl LatticeSampler {
    pub fn new(geom: LatticeGeometry) -> Self {
        Self { fft: Fft2::new(geom.nj, geom.nk), geom }
    }

    /// `f(ε(j - c t), ε² k)` for every site, with no amplitude factor.
    pub fn sample(&self, f: &SpectralField2D, t: f64) -> Result<Vec<f64>> {
        let g = f.grid();
        self.geom.check(g)?;
        let (nj, nk) = (self.geom.nj, self.geom.nk);
        let shift = -self.geom.speed * t;
        let mut c = vec![Complex64::new(0.0, 0.0); nj * nk];
        for j in 0..g.ny {
            let my = g.mode_y(j);
            let q = my.rem_euclid(nk as i64) as usize;
            for i in 0..g.nx {
                let z = f.coeffs()[i + g.nx * j];
                if z.re == 0.0 && z.im == 0.0 {
                    continue;
                }
                let mx = g.mode_x(i);
                let p = mx.rem_euclid(nj as i64) as usize;
                let phase = 2.0 * PI * mx as f64 * shift / nj as f64;
                c[p + nj * q] += z * Complex64::from_polar(1.0, phase);
            }
        }
        self.fft.inverse(&mut c);
        Ok(c.into_iter().map(|z| z.re).collect())
    }

    /// `ε² ·` [`Self::sample`].
    pub fn sample_scaled(&self, f: &SpectralField2D, t: f64) -> Result<Vec<f64>> {
        let e2 = self.geom.eps * self.geom.eps;
        Ok(self.sample(f, t)?.into_iter().map(|v| e2 * v).collect())
    }
}

/// One-shot sampling; the lattice size is read off the continuum box.
pub fn sample_to_lattice(f: &SpectralField2D, eps: f64, t: f64, params: &ModelParams, frame: Frame) -> Result<Vec<f64>> {
    let geom = LatticeGeometry::for_grid(frame, params, eps, f.grid())?;
    LatticeSampler::new(geom).sample(f, t)
}

/// Lattice state sitting exactly on the full ansatz of `bundle` at the bundle's time.
pub fn lattice_state_from_bundle(bundle: &AnsatzBundle, sampler: &LatticeSampler) -> Result<AnyLatticeState> {
    if bundle.frame != sampler.geom.frame {
        return Err(Error::Config("bundle and lattice geometry use different frames".into()));
    }
    let t = bundle.t;
    let s = |name: &str| sampler.sample_scaled(bundle.get(name)?, t);
    let grid = sampler.geom.grid_spec();
    Ok(match bundle.frame {
        Frame::Horizontal => {
            let mut st = LatticeStateH::zeros(grid);
            st.t = t;
            st.u1 = s("A")?;
            st.u2 = s("U")?;
            st.w = s("W")?;
            AnyLatticeState::Horizontal(st)
        }
        Frame::Diagonal => {
            let mut st = LatticeStateD::zeros(grid);
            st.t = t;
            st.al = s("L")?;
            st.ad = s("D")?;
            st.ax = s("X")?;
            st.ay = s("Y")?;
            st.u = s("U")?;
            st.v = s("V")?;
            AnyLatticeState::Diagonal(st)
        }
    })
}

/// Initial lattice state on the full ansatz built from `a0`. The lattice size is read off
/// the continuum box, which must be commensurate with `eps`.
pub fn initial_lattice_state(a0: &SpectralField2D, params: &ModelParams, eps: f64, frame: Frame) -> Result<AnyLatticeState> {
    let bundle = AnsatzBundle::build(frame, a0, params, eps, 0.0)?;
    let geom = LatticeGeometry::for_grid(frame, params, eps, a0.grid())?;
    lattice_state_from_bundle(&bundle, &LatticeSampler::new(geom))
}
