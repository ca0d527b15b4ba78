//! Periodic pseudo-spectral fields on a rectangle.

mod fft;
mod field;
mod grid;

pub use fft::Fft2;
pub use field::{ik_pow, SpectralField2D, ZERO_MEAN_TOL};
pub use grid::SpectralGrid;

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::Error;

    fn grid() -> std::sync::Arc<SpectralGrid> {
        SpectralGrid::new(32, 16, 4.0 * PI, 2.0 * PI).unwrap()
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid();
        let lx = g.lx;
        let f = SpectralField2D::from_fn(&g, |x, _| (2.0 * PI * x / lx).sin());
        let d = f.derivative(1, 0);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let e = (2.0 * PI / lx) * (2.0 * PI * g.x(i) / lx).cos();
                assert!((d.values()[i + g.nx * j] - e).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn derivative_of_constant() {
        let g = grid();
        let f = SpectralField2D::from_fn(&g, |_, _| 3.5);
        for (p, q) in [(1, 0), (0, 1), (2, 3)] {
            assert!(f.derivative(p, q).sup_norm() < 1e-13);
        }
    }

    #[test]
    fn antiderivative_of_cosine() {
        let g = grid();
        let lx = g.lx;
        let f = SpectralField2D::from_fn(&g, |x, _| (2.0 * PI * x / lx).cos());
        let a = f.antiderivative_xi(1).unwrap();
        let exact = SpectralField2D::from_fn(&g, |x, _| lx / (2.0 * PI) * (2.0 * PI * x / lx).sin());
        assert!((&a - &exact).sup_norm() < 1e-13);
        assert!(SpectralField2D::zeros(&g).antiderivative_xi(2).unwrap().sup_norm() == 0.0);
    }

    #[test]
    fn antiderivative_rejects_mass() {
        let g = grid();
        let f = SpectralField2D::from_fn(&g, |x, _| 1.0 + x.cos());
        assert!(matches!(f.antiderivative_xi(1), Err(Error::Constraint(_))));
        assert!(matches!(f.hs_norm(1.0, &[(-1, 1)]), Err(Error::Constraint(_))));
        assert!(f.antiderivative_xi(3).is_err());
    }

    #[test]
    fn projection() {
        let g = grid();
        let one = SpectralField2D::from_fn(&g, |_, _| 1.0);
        assert!(one.zero_mean_project().sup_norm() < 1e-15);
        let f = SpectralField2D::from_fn(&g, |x, y| (x / 2.0).sin() * y.cos());
        let p = f.zero_mean_project();
        assert!((&p - &f).sup_norm() < 1e-15);
    }

    #[test]
    fn single_mode_hs_norm() {
        let g = grid();
        // cos(kx x + ky y) = (e + e*)/2: two coefficients of size 1/2.
        let (kx, ky) = (g.kx(3), g.ky(2));
        let f = SpectralField2D::from_fn(&g, |x, y| (kx * x + ky * y).cos());
        let w: f64 = 1.0 + kx * kx + ky * ky;
        for s in [0.0, 1.0, 2.5] {
            let expect = w.powf(s / 2.0) * (g.lx * g.ly / 2.0).sqrt();
            assert!((f.hs_norm(s, &[]).unwrap() - expect).abs() < 1e-12 * expect);
        }
        assert_eq!(SpectralField2D::zeros(&g).hs_norm(2.0, &[]).unwrap(), 0.0);
    }

    #[test]
    fn shift_is_translation() {
        let g = grid();
        let f = SpectralField2D::from_fn(&g, |x, y| (x / 2.0).sin() + (2.0 * y + x).cos());
        let s = f.shift(0.3, -0.7);
        let e = SpectralField2D::from_fn(&g, |x, y| ((x + 0.3) / 2.0).sin() + (2.0 * (y - 0.7) + x + 0.3).cos());
        assert!((&s - &e).sup_norm() < 1e-13);
    }

    #[test]
    fn eval_at_matches_grid() {
        let g = grid();
        let f = SpectralField2D::from_fn(&g, |x, y| (x / 2.0).sin() * (3.0 * y).cos());
        assert!((f.eval_at(g.x(5), g.y(3)) - f.values()[5 + g.nx * 3]).abs() < 1e-13);
        assert!((f.eval_at(0.37, 1.1) - (0.37f64 / 2.0).sin() * (3.3f64).cos()).abs() < 1e-13);
    }

    #[test]
    fn ik_pow_cycle() {
        assert_eq!(ik_pow(2.0, 1), num_complex::Complex64::new(0.0, 2.0));
        assert_eq!(ik_pow(2.0, -1), num_complex::Complex64::new(0.0, -0.5));
        assert_eq!(ik_pow(2.0, -2), num_complex::Complex64::new(-0.25, 0.0));
        assert_eq!(ik_pow(2.0, 3), num_complex::Complex64::new(0.0, -8.0));
    }
}
