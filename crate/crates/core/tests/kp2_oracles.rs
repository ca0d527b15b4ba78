//! KP-II solver against independent references.

mod common;

use std::f64::consts::PI;

use fpukp::kp2::{normalize, solve, InitialData, SolveOptions};
use fpukp::{KP2Coefficients, ModelParams, SpectralGrid};

#[test]
fn linear_step_matches_dense_exponential() {
    for h in [0.05, 0.3] {
        let gap = common::dense_exponential_gap(h);
        assert!(gap < 1e-10, "h = {h}: {gap:e}");
    }
}

#[test]
fn eta_independent_data_matches_kdv_reference() {
    let gap = common::kdv_reduction_gap();
    assert!(gap < 1e-8, "{gap:e}");
}

#[test]
fn l2_norm_drift_on_perturbed_soliton() {
    let p = ModelParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
    let c = KP2Coefficients::horizontal(&p);
    let g = SpectralGrid::new(256, 64, 32.0 * PI, 16.0 * PI).unwrap();
    let a0 = InitialData::PerturbedLineSoliton { speed: 0.05, delta: 1.0, mode: 1, center: None }.build(&g, &c).unwrap();
    let tr = solve(&a0, &c, 0.25, 2e-3, &[0.05, 0.1, 0.15, 0.2], &SolveOptions::default()).unwrap();
    assert!(tr.hypothesis.ok());
    assert_eq!(tr.snapshots.len(), 4);
    assert!(tr.max_l2_drift() <= 1e-5, "drift {:e}", tr.max_l2_drift());
    assert!(tr.diagnostics.iter().all(|d| d.zero_mode <= 1e-12));
}

#[test]
fn normalization_maps_dispersion_relations() {
    let p = ModelParams::new(1.4, 0.9, 0.7, 1.1).unwrap();
    for c in [KP2Coefficients::horizontal(&p), KP2Coefficients::diagonal(&ModelParams::diagonal(1.2, 0.5).unwrap()).unwrap()] {
        let s = normalize(&c).unwrap();
        let unit = KP2Coefficients::normalized();
        let t = s.transform(&c);
        for (x, y) in [(t.a_t, 1.0), (t.a_4, 1.0), (t.a_n, 2.0), (t.a_e, 1.0)] {
            assert!((x - y).abs() < 1e-12);
        }
        // plane wave exp(i(kξ + lη - ωτ)) of A is one of B with wavenumbers (k xi, l eta), frequency ω tau
        for (k, l) in [(0.7, 0.3), (1.9, -1.2), (0.2, 2.5)] {
            let w = c.dispersion(k, l);
            let w_unit = unit.dispersion(k * s.xi, l * s.eta) / s.tau;
            assert!((w - w_unit).abs() <= 1e-12 * w.abs().max(1.0), "{w} vs {w_unit}");
        }
    }
}

#[test]
fn gaussian_data_fails_the_hypothesis_check() {
    let c = KP2Coefficients::normalized();
    let g = SpectralGrid::new(64, 32, 40.0, 40.0).unwrap();
    let a0 = InitialData::GaussianZeroMean { amplitude: 0.3, sigma_xi: 3.0, sigma_eta: 6.0, center_xi: None, center_eta: None }
        .build(&g, &c)
        .unwrap();
    assert!(solve(&a0, &c, 0.1, 1e-2, &[], &SolveOptions::default()).is_err());
    let relaxed = SolveOptions { enforce_hypotheses: false, ..SolveOptions::default() };
    let tr = solve(&a0, &c, 0.1, 1e-2, &[], &relaxed).unwrap();
    assert!(!tr.hypothesis.ok());
}
