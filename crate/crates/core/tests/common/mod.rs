//! Reference computations shared by the oracle tests and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::PI;

use fpukp::lattice::{rhs_diagonal, rhs_horizontal, Rk4};
use fpukp::kp2::SolverOptions;
use fpukp::{GridSpec, KP2Coefficients, Kp2Solver, LatticeState, LatticeStateD, LatticeStateH, ModelParams, SpectralField2D, SpectralGrid};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

pub fn signed(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Modes kept by a 2/3-dealiased solver that also drops Nyquist.
pub fn active(m: i64, n: usize) -> bool {
    3 * m.unsigned_abs() < n as u64 && 2 * m.unsigned_abs() != n as u64
}

/// Largest entrywise gap between one linear solver step of size `h` on an 8×8 grid and
/// `exp(hΩ)` computed densely, with `Ω = F⁻¹ diag(σ) F` assembled from the DFT matrix.
pub fn dense_exponential_gap(h: f64) -> f64 {
    let (nx, ny) = (8, 8);
    let (lx, ly) = (2.0 * PI, 3.0 * PI);
    let g = SpectralGrid::new(nx, ny, lx, ly).unwrap();
    let c = KP2Coefficients::new(1.5, 0.8, 2.0, 1.3).unwrap();
    let n = nx * ny;
    let mut sigma = vec![Complex64::new(0.0, 0.0); n];
    for q in 0..ny {
        for p in 0..nx {
            let (mx, my) = (signed(p, nx), signed(q, ny));
            if mx == 0 || !active(mx, nx) || !active(my, ny) {
                continue;
            }
            let kx = 2.0 * PI * mx as f64 / lx;
            let ky = 2.0 * PI * my as f64 / ly;
            sigma[p + nx * q] = Complex64::new(0.0, (c.a_4 * kx.powi(3) - c.a_e * ky * ky / kx) / c.a_t);
        }
    }
    let mut omega = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        let (xa, ya) = (a % nx, a / nx);
        for b in 0..n {
            let (xb, yb) = (b % nx, b / nx);
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, s) in sigma.iter().enumerate() {
                if s.norm() == 0.0 {
                    continue;
                }
                let (p, q) = ((m % nx) as f64, (m / nx) as f64);
                let ph = 2.0 * PI * (p * (xa as f64 - xb as f64) / nx as f64 + q * (ya as f64 - yb as f64) / ny as f64);
                acc += s * Complex64::from_polar(1.0, ph);
            }
            omega[(a, b)] = acc.re / n as f64;
        }
    }
    let a0 = SpectralField2D::from_fn(&g, |x, y| {
        (x + 0.3).sin() * (1.0 + (2.0 * y / 3.0).cos()) + 0.4 * (2.0 * x - 1.0).cos() * (4.0 * y / 3.0).sin()
    });
    let mut s = Kp2Solver::new(&a0, c, h, SolverOptions { nonlinear: false }).unwrap();
    let start = DMatrix::from_column_slice(n, 1, s.current().values());
    s.step(h).unwrap();
    let exact = (omega * h).exp() * start;
    s.current().values().iter().zip(exact.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Lawson (integrating-factor) RK4 for `a_t A_τ + a_4 A_ξξξ + (a_n/2)(A²)_ξ = 0` on a 1D periodic grid.
pub fn kdv_reference(a0: &[f64], lx: f64, c: &KP2Coefficients, tau: f64, steps: usize) -> Vec<f64> {
    let n = a0.len();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let k: Vec<f64> = (0..n).map(|i| 2.0 * PI * signed(i, n) as f64 / lx).collect();
    let keep: Vec<bool> = (0..n).map(|i| signed(i, n) != 0 && active(signed(i, n), n)).collect();
    let lin: Vec<Complex64> = k.iter().map(|&k| Complex64::new(0.0, c.a_4 * k.powi(3) / c.a_t)).collect();
    let g = c.a_n / (2.0 * c.a_t);
    let zero = Complex64::new(0.0, 0.0);
    let nonlinear = |u: &[Complex64]| -> Vec<Complex64> {
        let mut phys = u.to_vec();
        inv.process(&mut phys);
        let mut sq: Vec<Complex64> = phys.iter().map(|z| Complex64::new(z.re * z.re, 0.0)).collect();
        fwd.process(&mut sq);
        (0..n).map(|i| if keep[i] { Complex64::new(0.0, -g * k[i]) * sq[i] / n as f64 } else { zero }).collect()
    };
    let mut u: Vec<Complex64> = a0.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut u);
    for (i, z) in u.iter_mut().enumerate() {
        *z = if keep[i] { *z / n as f64 } else { zero };
    }
    let h = tau / steps as f64;
    let e_half: Vec<Complex64> = lin.iter().map(|l| (l * h / 2.0).exp()).collect();
    let axpy = |u: &[Complex64], a: f64, k: &[Complex64]| -> Vec<Complex64> { u.iter().zip(k).map(|(u, k)| u + k * a).collect() };
    let prop = |u: &[Complex64]| -> Vec<Complex64> { u.iter().zip(&e_half).map(|(u, e)| u * e).collect() };
    for _ in 0..steps {
        let k1 = nonlinear(&u);
        let u_half = prop(&u);
        let k1h = prop(&k1);
        let k2 = nonlinear(&axpy(&u_half, h / 2.0, &k1h));
        let k3 = nonlinear(&axpy(&u_half, h / 2.0, &k2));
        let k4 = nonlinear(&prop(&axpy(&u_half, h, &k3)));
        let a = prop(&prop(&u));
        let b = prop(&prop(&k1));
        let m = prop(&k2.iter().zip(&k3).map(|(x, y)| x + y).collect::<Vec<_>>());
        u = (0..n).map(|i| a[i] + h / 6.0 * (b[i] + 2.0 * m[i] + k4[i])).collect();
    }
    let mut out = u;
    inv.process(&mut out);
    out.iter().map(|z| z.re).collect()
}

/// Largest gap between the 2D solver on η-independent data and the 1D reference at `τ = 0.25`.
pub fn kdv_reduction_gap() -> f64 {
    let (nx, lx) = (64, 40.0);
    let g = SpectralGrid::new(nx, 4, lx, 10.0).unwrap();
    let c = KP2Coefficients::horizontal(&ModelParams::new(1.0, 1.0, 1.0, 1.0).unwrap());
    let a0 = SpectralField2D::from_fn(&g, |x, _| 0.6 / ((x - 20.0) / 2.5).cosh().powi(2)).zero_mean_project();
    let tau = 0.25;
    let mut s = Kp2Solver::new(&a0, c, 1e-3, SolverOptions::default()).unwrap();
    let line: Vec<f64> = s.current().values()[..nx].to_vec();
    s.advance_to(tau).unwrap();
    let reference = kdv_reference(&line, lx, &c, tau, 1000);
    let out = s.current();
    let mut worst: f64 = 0.0;
    for row in 0..4 {
        for (x, y) in out.values()[row * nx..(row + 1) * nx].iter().zip(&reference) {
            worst = worst.max((x - y).abs());
        }
    }
    worst
}

pub fn random_h(grid: GridSpec, amp: f64, seed: u64) -> LatticeStateH {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = LatticeStateH::zeros(grid);
    for f in s.fields_mut() {
        f.iter_mut().for_each(|v| *v = amp * rng.gen_range(-1.0..1.0));
    }
    s
}

pub fn random_d(grid: GridSpec, amp: f64, seed: u64) -> LatticeStateD {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = LatticeStateD::zeros(grid);
    for f in s.fields_mut() {
        f.iter_mut().for_each(|v| *v = amp * rng.gen_range(-1.0..1.0));
    }
    s
}

/// Gap between `a` and `b` in units of the spacing of doubles at `scale`, the magnitude of
/// the largest term that went into the sum.
pub fn ulps(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / (f64::EPSILON * scale.max(a.abs()).max(f64::MIN_POSITIVE))
}

fn sum_with_scale(terms: &[f64]) -> (f64, f64) {
    (terms.iter().sum(), terms.iter().fold(0.0, |m: f64, t| m.max(t.abs())) * terms.len() as f64)
}

/// Spring forces `∂V/∂r`, `∂V/∂s` of `V(r, s)`.
fn v_r(p: &ModelParams, r: f64, s: f64) -> f64 {
    p.c1 * p.c1 * r + p.alpha1 * r * r + 0.5 * p.alpha2 * s * s
}

fn v_s(p: &ModelParams, r: f64, s: f64) -> f64 {
    p.c2 * p.c2 * s + p.alpha2 * r * s
}

/// Worst gap, in ulps, between the horizontal rhs and forces written from the spring potential.
pub fn horizontal_rhs_ulps(p: &ModelParams, s: &LatticeStateH) -> f64 {
    let g = s.grid;
    let d = rhs_horizontal(s, p).unwrap();
    let at = |f: &[f64], j: i64, k: i64| f[g.wrap(j, k)];
    let mut worst: f64 = 0.0;
    for k in 0..g.nk as i64 {
        for j in 0..g.nj as i64 {
            let i = g.wrap(j, k);
            let exact = [
                (d.u1[i], at(&s.w, j + 1, k) - at(&s.w, j, k)),
                (d.u2[i], at(&s.w, j, k + 1) - at(&s.w, j, k)),
                (d.v1[i], at(&s.z, j + 1, k) - at(&s.z, j, k)),
                (d.v2[i], at(&s.z, j, k + 1) - at(&s.z, j, k)),
            ];
            for (x, y) in exact {
                worst = worst.max(ulps(x, y, y.abs()));
            }
            let (fx, sx) = sum_with_scale(&[
                v_r(p, at(&s.u1, j, k), at(&s.v1, j, k)),
                -v_r(p, at(&s.u1, j - 1, k), at(&s.v1, j - 1, k)),
                v_s(p, at(&s.v2, j, k), at(&s.u2, j, k)),
                -v_s(p, at(&s.v2, j, k - 1), at(&s.u2, j, k - 1)),
            ]);
            let (fy, sy) = sum_with_scale(&[
                v_s(p, at(&s.u1, j, k), at(&s.v1, j, k)),
                -v_s(p, at(&s.u1, j - 1, k), at(&s.v1, j - 1, k)),
                v_r(p, at(&s.v2, j, k), at(&s.u2, j, k)),
                -v_r(p, at(&s.v2, j, k - 1), at(&s.u2, j, k - 1)),
            ]);
            worst = worst.max(ulps(d.w[i], fx, sx)).max(ulps(d.z[i], fy, sy));
        }
    }
    worst
}

/// Worst gap, in ulps, between the diagonal rhs and forces written from `P` and `Q`.
pub fn diagonal_rhs_ulps(p: &ModelParams, s: &LatticeStateD) -> f64 {
    let g = s.grid;
    let d = rhs_diagonal(s, p).unwrap();
    let at = |f: &[f64], m: i64, n: i64| f[g.wrap(m, n)];
    let c2 = p.c1 * p.c1;
    let dp = |r: f64| c2 * r + 2.0 * p.alpha1 * r * r;
    let dq = |r: f64| c2 * r - 2.0 * p.alpha1 * r * r;
    let mut worst: f64 = 0.0;
    for n in 0..g.nk as i64 {
        for m in 0..g.nj as i64 {
            let i = g.wrap(m, n);
            let exact = [
                (d.al[i], at(&s.v, m, n) - at(&s.u, m, n)),
                (d.ad[i], at(&s.u, m + 1, n + 1) - at(&s.v, m, n)),
                (d.ax[i], at(&s.u, m + 1, n) - at(&s.v, m, n)),
                (d.ay[i], at(&s.u, m, n + 1) - at(&s.v, m, n)),
            ];
            for (x, y) in exact {
                worst = worst.max(ulps(x, y, y.abs()));
            }
            let (fu, su) = sum_with_scale(&[
                dp(at(&s.al, m, n)),
                -dp(at(&s.ad, m - 1, n - 1)),
                -dp(at(&s.ax, m - 1, n)),
                -dq(at(&s.ay, m, n - 1)),
            ]);
            let (fv, sv) = sum_with_scale(&[dp(at(&s.ad, m, n)), -dp(at(&s.al, m, n)), dp(at(&s.ax, m, n)), dq(at(&s.ay, m, n))]);
            worst = worst.max(ulps(d.u[i], fu, su)).max(ulps(d.v[i], fv, sv));
        }
    }
    worst
}

/// Strains of a smooth displacement field on a 16×16 lattice, so the state is a genuine
/// lattice configuration with nonlinear forces of order `amp²`.
pub fn smooth_h(g: GridSpec, amp: f64) -> LatticeStateH {
    use std::f64::consts::TAU;
    let (nj, nk) = (g.nj as f64, g.nk as f64);
    let x = |j: i64, k: i64| amp * ((TAU * j as f64 / nj).sin() + 0.5 * (TAU * (j as f64 / nj + 2.0 * k as f64 / nk)).cos());
    let y = |j: i64, k: i64| amp * (TAU * (k as f64 / nk - j as f64 / nj)).sin();
    let mut s = LatticeStateH::zeros(g);
    for k in 0..g.nk as i64 {
        for j in 0..g.nj as i64 {
            let i = g.wrap(j, k);
            s.u1[i] = x(j + 1, k) - x(j, k);
            s.u2[i] = x(j, k + 1) - x(j, k);
            s.v1[i] = y(j + 1, k) - y(j, k);
            s.v2[i] = y(j, k + 1) - y(j, k);
            s.w[i] = 0.3 * amp * (TAU * k as f64 / nk).cos();
            s.z[i] = 0.2 * amp * (TAU * j as f64 / nj).sin();
        }
    }
    s
}

/// Relative Hamiltonian drift over 1000 RK4 steps at `dt = 0.01` on a 16×16 nonlinear state.
pub fn hamiltonian_drift_16x16() -> f64 {
    let p = ModelParams::new(1.0, 0.8, 1.0, 0.7).unwrap();
    let mut s = smooth_h(GridSpec::new(16, 16).unwrap(), 0.3);
    let h0 = s.hamiltonian(&p);
    let mut rk = Rk4::new(&s);
    for _ in 0..1000 {
        rk.step(&mut s, &p, 0.01).unwrap();
    }
    (s.hamiltonian(&p) - h0).abs() / h0.abs()
}
