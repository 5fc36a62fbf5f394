#![allow(dead_code)]

use std::f64::consts::PI;

use proptest::prelude::*;
use wlmvdr_core::scenario::{orthogonal_grid, ArrayScenario, Interference, NoncircularitySpec};
use wlmvdr_core::theory::TheoryInputs;
use wlmvdr_core::Complex64;

/// Uniform-power scenario with interferences on distinct exact-orthogonal DOAs.
pub fn orthogonal_scenario() -> impl Strategy<Value = ArrayScenario> {
    (2usize..=10).prop_flat_map(|n| {
        (
            proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n),
            -89.0..89.0f64,
            0.0..3.0f64,
            -1.0..2.0f64,
            0.05..0.95f64,
            0.0..2.0 * PI,
            proptest::collection::vec(0.0..2.0 * PI, n),
        )
            .prop_map(move |(picks, soi, log_pi, log_pis, rate, phase, phis)| {
                let grid = orthogonal_grid(n);
                ArrayScenario {
                    n_sensors: n,
                    soi_doa_deg: soi,
                    soi_power: 10f64.powf(log_pis),
                    soi_phase: 0.0,
                    interferences: picks
                        .iter()
                        .map(|&k| Interference { doa_deg: grid[k], power: 10f64.powf(log_pi), carrier_phase: phis[k] })
                        .collect(),
                    noise_power: 1.0,
                    noncircularity: NoncircularitySpec { rate, phase },
                    soi_noncircularity: None,
                }
            })
    })
}

/// Abstract coefficient bundle inside the theory's validity box, with
/// `0 < |α_Is|² < 1` so the approximations are defined.
pub fn approx_inputs() -> impl Strategy<Value = TheoryInputs> {
    (-1.0..4.0f64, 0.01..0.99f64, 0.0..1.0f64, 0.0..2.0 * PI, 0.0..0.999f64, 0.0..2.0 * PI).prop_map(
        |(log_eps, a, frac, arg, rate, delta)| {
            let alpha_i_sq = Complex64::from_polar(a * frac, arg);
            TheoryInputs {
                eps_s: 10.0,
                eps: 10f64.powf(log_eps),
                alpha_is_sq: a,
                alpha_i_sq,
                alpha_w: (Complex64::from_polar(1.0, delta) * alpha_i_sq).re,
                gamma_rate: rate,
                gamma_phase: delta,
            }
        },
    )
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
