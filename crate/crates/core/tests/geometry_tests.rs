use std::f64::consts::PI;

use qutritlab::geometry::{self, line_element, SamplerConfig, TOTAL_VOLUME};
use qutritlab::qutrit::{ket_to_bloch, params_to_ket, PureStateParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn volume_targets() {
    assert!((TOTAL_VOLUME - 44.413_219_804_902).abs() < 1e-6);
    assert!((TOTAL_VOLUME / 9.0 - PI * PI / 2.0).abs() < 1e-14);
}

#[test]
fn coarse_volume_quadrature() {
    let v = geometry::total_volume_quadrature([8; 4]).unwrap();
    assert!((v - TOTAL_VOLUME).abs() / TOTAL_VOLUME < 0.01, "v = {v}");
}

#[test]
fn moment_integrals_by_quadrature() {
    // ∫ dΩ n_j = 0 and ∫ dΩ n_j n_k = (V/8) δ_jk, evaluated deterministically.
    for j in 0..8 {
        let first = geometry::product_quadrature([64, 64, 8, 8], |t, p, a, b| {
            let n = qutritlab::qutrit::params_to_bloch(&PureStateParams { theta: t, phi: p, chi1: a, chi2: b })
                .unwrap();
            geometry::volume_density(t, p) * n.0[j]
        })
        .unwrap();
        assert!(first.abs() < 1e-6 * TOTAL_VOLUME, "first moment {j}: {first}");
        for k in 0..8 {
            let second = geometry::product_quadrature([64, 64, 8, 8], |t, p, a, b| {
                let n = qutritlab::qutrit::params_to_bloch(&PureStateParams { theta: t, phi: p, chi1: a, chi2: b })
                    .unwrap();
                geometry::volume_density(t, p) * n.0[j] * n.0[k]
            })
            .unwrap();
            let want = if j == k { TOTAL_VOLUME / 8.0 } else { 0.0 };
            assert!((second - want).abs() < 1e-6 * TOTAL_VOLUME, "({j},{k}): {second}");
        }
    }
}

#[test]
fn line_element_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let step = 1e-5;
    for _ in 0..1000 {
        // Stay away from the coordinate boundaries so p ± dp remains in range.
        let p = PureStateParams::new(
            rng.gen_range(0.05..1.52),
            rng.gen_range(0.05..1.52),
            rng.gen_range(0.1..6.1),
            rng.gen_range(0.1..6.1),
        )
        .unwrap();
        let dir: [f64; 4] = [0; 4].map(|_| rng.gen_range(-1.0..1.0));
        let dp = dir.map(|x| x * step);
        let shift = |s: f64| PureStateParams {
            theta: p.theta + s * dp[0],
            phi: p.phi + s * dp[1],
            chi1: p.chi1 + s * dp[2],
            chi2: p.chi2 + s * dp[3],
        };
        let n_plus = ket_to_bloch(&params_to_ket(&shift(0.5)).unwrap()).unwrap();
        let n_minus = ket_to_bloch(&params_to_ket(&shift(-0.5)).unwrap()).unwrap();
        let dn2: f64 = (0..8).map(|j| (n_plus.0[j] - n_minus.0[j]).powi(2)).sum();
        let ds2 = line_element(&p, &dp);
        assert!((ds2 - dn2).abs() <= 1e-3 * ds2.max(1e-300), "ds2 {ds2} vs dn2 {dn2}");
    }
}

#[test]
fn line_element_is_three_times_fubini_study() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..200 {
        let p = PureStateParams::new(
            rng.gen_range(0.05..1.52),
            rng.gen_range(0.05..1.52),
            rng.gen_range(0.1..6.1),
            rng.gen_range(0.1..6.1),
        )
        .unwrap();
        let h = 1e-4;
        let dp = [0; 4].map(|_| h * rng.gen_range(-1.0..1.0));
        // Centered pair so the odd-order error terms cancel.
        let shift = |s: f64| PureStateParams {
            theta: p.theta + s * dp[0],
            phi: p.phi + s * dp[1],
            chi1: p.chi1 + s * dp[2],
            chi2: p.chi2 + s * dp[3],
        };
        let a = params_to_ket(&shift(-0.5)).unwrap();
        let b = params_to_ket(&shift(0.5)).unwrap();
        let fs2 = 1.0 - qutritlab::linalg::inner(&a, &b).norm_sqr();
        let ds2 = line_element(&p, &dp);
        assert!((ds2 - 3.0 * fs2).abs() <= 1e-3 * ds2, "{ds2} vs {}", 3.0 * fs2);
    }
}

#[test]
fn sampler_moments_at_moderate_size() {
    let m = geometry::bloch_moments(&SamplerConfig::with_seed(5), 200_000);
    assert!(m.first.max_sigma(&[0.0; 8]) < 4.0);
    let target: Vec<f64> = (0..64).map(|i| if i / 8 == i % 8 { 0.125 } else { 0.0 }).collect();
    assert!(m.second.max_sigma(&target) < 4.0);
}

#[test]
fn chunking_does_not_change_draws() {
    // Identical chunk sizes give identical streams regardless of thread scheduling.
    let cfg = SamplerConfig::new(99, 17).unwrap();
    let a = geometry::sample_pure(&cfg, 500);
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| geometry::sample_pure(&cfg, 500));
    assert_eq!(a, b);
}
