//! Figure-reproduction presets.

use crate::config::{ExperimentConfig, IqConfig, IqModel, ScenarioConfig, SeriesConfig, SweepConfig, SweepVariable};
use crate::error::{CliError, Result};

pub const PRESET_NAMES: [&str; 8] = ["fig1", "fig1-alt", "fig2a", "fig2b", "fig3", "fig6a", "fig6b", "fig6c"];

/// The three receiver I/Q pairs `(g, ζ°)` of the imbalance study.
pub const IQ_PAIRS: [(f64, f64); 3] = [(1.08, 8.2), (0.9, -11.2), (1.15, 15.0)];

const SNR_DB: f64 = 10.0;
const INR_DB: f64 = 20.0;
const SNAPSHOTS: usize = 20_000;
const TRIALS: usize = 10;
const SEED: u64 = 20_170_601;
const DELTA_DEG: f64 = 150.0;

/// `|γ|` from 0.05 to 0.95 in steps of 0.05.
fn rate_grid() -> Vec<f64> {
    (1..=19).map(|k| (k * 5) as f64 / 100.0).collect()
}

/// δ over [0°, 360°) in half-degree steps.
fn phase_grid() -> Vec<f64> {
    (0..720).map(|k| k as f64 / 2.0).collect()
}

/// θ_s from −85° to 85° in 5° steps.
fn doa_grid() -> Vec<f64> {
    (-17..=17).map(|k| (k * 5) as f64).collect()
}

fn scenario(n_sensors: usize, soi_doa_deg: f64, interference_doas_deg: &[f64], gamma_rate: f64) -> ScenarioConfig {
    ScenarioConfig {
        n_sensors,
        soi_doa_deg,
        soi_phase_deg: 0.0,
        snr_db: SNR_DB,
        inr_db: INR_DB,
        noise_power: 1.0,
        interference_doas_deg: interference_doas_deg.to_vec(),
        interference_phases_deg: Vec::new(),
        gamma_rate,
        gamma_phase_deg: if gamma_rate > 0.0 { DELTA_DEG } else { 0.0 },
    }
}

fn base(scenario: ScenarioConfig, sweep: SweepConfig, series: Option<SeriesConfig>) -> ExperimentConfig {
    ExperimentConfig {
        trials: TRIALS,
        snapshots: SNAPSHOTS,
        seed: SEED,
        snap_doas: true,
        output: None,
        scenario,
        sweep,
        series,
        iq: None,
        iq_model: IqModel::Absorbed,
    }
}

fn rate_sweep(n: usize, doas: &[f64], soi_series: &[f64]) -> ExperimentConfig {
    let mut sc = scenario(n, soi_series[0], doas, 0.5);
    sc.gamma_phase_deg = DELTA_DEG;
    base(
        sc,
        SweepConfig { variable: SweepVariable::GammaRate, values: rate_grid(), iq_pairs: Vec::new() },
        Some(SeriesConfig { variable: SweepVariable::SoiDoa, values: soi_series.to_vec() }),
    )
}

const FIG2_DOAS: [f64; 3] = [19.0, 42.0, 90.0];

pub fn figure_preset(name: &str) -> Result<ExperimentConfig> {
    Ok(match name {
        "fig1" => rate_sweep(2, &[0.0, 90.0], &[-75.0, 25.0, 80.0]),
        "fig1-alt" => rate_sweep(2, &[0.0, 90.0], &[-75.0, -25.0, 80.0]),
        "fig2a" => rate_sweep(6, &FIG2_DOAS, &[-75.0, 25.0, 80.0]),
        "fig2b" => rate_sweep(6, &FIG2_DOAS, &[-50.0, 10.0, 15.0]),
        "fig3" => base(
            scenario(16, 85.0, &[14.0, 30.0, 49.0, 90.0], 0.4),
            SweepConfig { variable: SweepVariable::GammaPhase, values: phase_grid(), iq_pairs: Vec::new() },
            Some(SeriesConfig { variable: SweepVariable::GammaRate, values: vec![0.4, 0.6, 0.8] }),
        ),
        "fig6a" | "fig6b" | "fig6c" => {
            let k = (name.as_bytes()[4] - b'a') as usize;
            let (g, zeta_deg) = IQ_PAIRS[k];
            let mut cfg = base(
                scenario(6, 0.0, &FIG2_DOAS, 0.0),
                SweepConfig { variable: SweepVariable::SoiDoa, values: doa_grid(), iq_pairs: Vec::new() },
                None,
            );
            cfg.iq = Some(IqConfig { g, zeta_deg });
            cfg
        }
        _ => return Err(CliError::UnknownPreset(name.to_owned(), PRESET_NAMES.join(", "))),
    })
}
