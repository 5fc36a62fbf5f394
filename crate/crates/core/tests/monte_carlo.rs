//! Sample-based routes against their population counterparts.

use wlmvdr_core::analysis::{characterize_capon, characterize_empirical, characterize_mvdr};
use wlmvdr_core::beamform::{capon_weights, output_in, wl_mvdr_weights};
use wlmvdr_core::scenario::{ArrayScenario, Interference, NoncircularitySpec};
use wlmvdr_core::signal::synthesize;
use wlmvdr_core::stats::{estimate_in_stats, population_in_stats};

fn fig2_like(soi: f64, rate: f64) -> ArrayScenario {
    let sc = ArrayScenario {
        n_sensors: 6,
        soi_doa_deg: soi,
        soi_power: 10.0,
        soi_phase: 0.0,
        interferences: [19.0, 42.0, 90.0]
            .iter()
            .map(|&d| Interference { doa_deg: d, power: 100.0, carrier_phase: 0.0 })
            .collect(),
        noise_power: 1.0,
        noncircularity: NoncircularitySpec { rate, phase: 150f64.to_radians() },
        soi_noncircularity: None,
    };
    sc.snapped().unwrap()
}

#[test]
fn empirical_and_matrix_characterizations_agree() {
    let t = 20_000;
    let tol = 5.0 / (t as f64).sqrt();
    for (soi, seed) in [(-75.0, 1), (25.0, 2), (80.0, 3)] {
        let sc = fig2_like(soi, 0.8);
        let batch = synthesize(&sc, t, seed).unwrap();
        let est = estimate_in_stats(batch.in_ref(), 6).unwrap();
        let s = sc.soi_steering().unwrap();

        // in-sample weights: the matrix route on the sample statistics is exact
        // algebra on the same data the empirical route averages
        let q = output_in(&batch, &wl_mvdr_weights(&est, &s).unwrap()).unwrap();
        let emp = characterize_empirical(&q).unwrap();
        let mat = characterize_mvdr(&est, &s).unwrap();
        assert!((emp.kappa / mat.kappa - 1.0).abs() < tol, "θ_s = {soi}");
        assert!((emp.kappa_tilde - mat.kappa_tilde).norm() < tol * mat.kappa);

        let q = output_in(&batch, &capon_weights(&est, &s).unwrap()).unwrap();
        let emp = characterize_empirical(&q).unwrap();
        let mat = characterize_capon(&est, &s).unwrap();
        assert!((emp.kappa / mat.kappa - 1.0).abs() < tol);
        assert!((emp.kappa_tilde - mat.kappa_tilde).norm() < tol * mat.kappa);

        for c in [emp, mat] {
            assert!((c.kappa_i + c.kappa_q - c.kappa).abs() <= 1e-12 * c.kappa);
        }
    }
}

#[test]
fn sample_statistics_converge_at_root_t() {
    let sc = fig2_like(25.0, 0.8);
    let pop = population_in_stats(&sc).unwrap();
    let err_at = |t: usize| {
        // average over seeds to steady the slope estimate
        (0..4u64)
            .map(|seed| {
                let b = synthesize(&sc, t, 100 + seed).unwrap();
                let est = estimate_in_stats(b.in_ref(), 6).unwrap();
                est.r().sub(pop.r()).unwrap().frobenius_norm() + est.c().sub(pop.c()).unwrap().frobenius_norm()
            })
            .sum::<f64>()
            / 4.0
    };
    let (e3, e4, e5) = (err_at(1_000), err_at(10_000), err_at(100_000));
    let slope1 = (e3 / e4).log10();
    let slope2 = (e4 / e5).log10();
    assert!(e3 > e4 && e4 > e5);
    assert!((slope1 - 0.5).abs() < 0.2 && (slope2 - 0.5).abs() < 0.2, "slopes {slope1} {slope2}");
}
