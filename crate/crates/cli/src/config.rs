//! Experiment configuration.
//!
//! The on-disk format is TOML. Angles are in degrees and powers in dB at this
//! boundary; everything is converted once into an [`ArrayScenario`].
//!
//! ```toml
//! trials = 10
//! snapshots = 20000
//! seed = 1
//! snap_doas = true
//!
//! [scenario]
//! n_sensors = 6
//! soi_doa_deg = 25.0
//! snr_db = 10.0
//! inr_db = 20.0
//! interference_doas_deg = [19.0, 42.0, 90.0]
//! gamma_rate = 0.5
//! gamma_phase_deg = 150.0
//!
//! [sweep]
//! variable = "gamma_rate"
//! values = [0.2, 0.5, 0.8]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wlmvdr_core::from_db;
use wlmvdr_core::scenario::{ArrayScenario, Interference, NoncircularitySpec};
use wlmvdr_core::signal::{iq_noncircularity, IqImbalance};

use crate::error::{CliError, Result};

fn default_noise_power() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_sensors: usize,
    pub soi_doa_deg: f64,
    #[serde(default)]
    pub soi_phase_deg: f64,
    /// Per-source SOI power over noise power, dB.
    pub snr_db: f64,
    /// Per-interference power over noise power, dB.
    pub inr_db: f64,
    #[serde(default = "default_noise_power")]
    pub noise_power: f64,
    pub interference_doas_deg: Vec<f64>,
    /// Carrier phases; empty means all zero.
    #[serde(default)]
    pub interference_phases_deg: Vec<f64>,
    #[serde(default)]
    pub gamma_rate: f64,
    #[serde(default)]
    pub gamma_phase_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    GammaRate,
    GammaPhase,
    SoiDoa,
    IqPair,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GammaRate => "gamma_rate",
            Self::GammaPhase => "gamma_phase",
            Self::SoiDoa => "soi_doa",
            Self::IqPair => "iq_pair",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IqConfig {
    pub g: f64,
    pub zeta_deg: f64,
}

impl IqConfig {
    pub fn imbalance(&self) -> Result<IqImbalance> {
        Ok(IqImbalance::new(self.g, self.zeta_deg.to_radians())?)
    }
}

/// How an I/Q imbalance enters the simulated snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IqModel {
    /// Each source waveform passes through the imbalance before the array,
    /// keeping its power; noise stays circular. Matches the closed forms.
    #[default]
    Absorbed,
    /// `x ↦ μx + νx*` on every sensor output. Also mirrors the SOI into the
    /// IN term, which the closed forms do not model.
    Receiver,
}

impl IqModel {
    fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

/// Grid of the swept variable. Phases and DOAs are in degrees; an `iq_pair`
/// sweep walks `iq_pairs` and reports the pair index as the sweep value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iq_pairs: Vec<IqConfig>,
}

/// A secondary parameter giving one curve per value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub snapshots: usize,
    pub seed: u64,
    #[serde(default)]
    pub snap_doas: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub scenario: ScenarioConfig,
    pub sweep: SweepConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesConfig>,
    /// Receiver I/Q imbalance shared by every sensor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iq: Option<IqConfig>,
    #[serde(default, skip_serializing_if = "IqModel::is_default")]
    pub iq_model: IqModel,
}

/// One sweep point: the scenario as received plus the front-end imbalance.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub sweep_value: f64,
    pub scenario: ArrayScenario,
    pub iq: Option<IqImbalance>,
    pub iq_model: IqModel,
}

impl GridPoint {
    /// Scenario seen by the closed-form theory: with I/Q imbalance, every
    /// source carries the noncircularity the imbalance induces.
    pub fn theory_scenario(&self) -> ArrayScenario {
        let mut sc = self.scenario.clone();
        if let Some(imb) = self.iq {
            let gamma = iq_noncircularity(imb);
            let spec = NoncircularitySpec { rate: gamma.norm(), phase: gamma.arg() };
            sc.noncircularity = spec;
            sc.soi_noncircularity = Some(spec);
        }
        sc
    }
}

fn apply_variable(sc: &mut ScenarioConfig, variable: SweepVariable, value: f64) {
    match variable {
        SweepVariable::GammaRate => sc.gamma_rate = value,
        SweepVariable::GammaPhase => sc.gamma_phase_deg = value,
        SweepVariable::SoiDoa => sc.soi_doa_deg = value,
        SweepVariable::IqPair => unreachable!("I/Q pairs are not scenario fields"),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        let cfg: Self =
            toml::from_str(&text).map_err(|source| CliError::ConfigParse { path: path.to_owned(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config types serialize to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let sc = &self.scenario;
        if sc.n_sensors == 0 {
            return bad("n_sensors must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.snapshots < 2 * sc.n_sensors {
            return bad(format!("snapshots = {} is below 2·N = {}", self.snapshots, 2 * sc.n_sensors));
        }
        if !sc.interference_phases_deg.is_empty() && sc.interference_phases_deg.len() != sc.interference_doas_deg.len()
        {
            return bad("interference_phases_deg must be empty or match interference_doas_deg".into());
        }
        match self.sweep.variable {
            SweepVariable::IqPair => {
                if self.sweep.iq_pairs.is_empty() {
                    return bad("an iq_pair sweep needs a nonempty iq_pairs list".into());
                }
                if self.iq.is_some() {
                    return bad("an iq_pair sweep cannot be combined with a fixed [iq] section".into());
                }
            }
            _ if self.sweep.values.is_empty() => return bad("sweep grid is empty".into()),
            _ => {}
        }
        if let Some(series) = &self.series {
            if series.variable == SweepVariable::IqPair {
                return bad("series over I/Q pairs is not supported".into());
            }
            if series.variable == self.sweep.variable {
                return bad("series and sweep must use different variables".into());
            }
            if series.values.is_empty() {
                return bad("series grid is empty".into());
            }
        }
        let has_iq = self.iq.is_some() || self.sweep.variable == SweepVariable::IqPair;
        if has_iq && (sc.gamma_rate != 0.0 || self.sweep.variable == SweepVariable::GammaRate) {
            return bad("with I/Q imbalance the transmitted sources must be circular (gamma_rate = 0)".into());
        }
        Ok(())
    }

    /// One single-curve config per series value, labelled `_<variable><value>`.
    pub fn expand_series(&self) -> Vec<(String, ExperimentConfig)> {
        let Some(series) = &self.series else {
            return vec![(String::new(), self.clone())];
        };
        series
            .values
            .iter()
            .map(|&v| {
                let mut cfg = self.clone();
                cfg.series = None;
                apply_variable(&mut cfg.scenario, series.variable, v);
                (format!("_{}{}", series.variable, v), cfg)
            })
            .collect()
    }

    /// The base scenario in linear units, DOAs snapped when requested.
    pub fn base_scenario(&self) -> Result<ArrayScenario> {
        let sc = &self.scenario;
        let noise = sc.noise_power;
        let phases = |p: usize| sc.interference_phases_deg.get(p).copied().unwrap_or(0.0).to_radians();
        let scenario = ArrayScenario {
            n_sensors: sc.n_sensors,
            soi_doa_deg: sc.soi_doa_deg,
            soi_power: noise * from_db(sc.snr_db),
            soi_phase: sc.soi_phase_deg.to_radians(),
            interferences: sc
                .interference_doas_deg
                .iter()
                .enumerate()
                .map(|(p, &doa)| Interference {
                    doa_deg: doa,
                    power: noise * from_db(sc.inr_db),
                    carrier_phase: phases(p),
                })
                .collect(),
            noise_power: noise,
            noncircularity: NoncircularitySpec::new(sc.gamma_rate, sc.gamma_phase_deg.to_radians())?,
            soi_noncircularity: None,
        };
        scenario.validate()?;
        if self.snap_doas {
            Ok(scenario.snapped()?)
        } else {
            Ok(scenario)
        }
    }

    /// Every sweep point of a single-curve config.
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        self.validate()?;
        if self.series.is_some() {
            return Err(CliError::Config("multi-curve config; call expand_series() first".into()));
        }
        let fixed_iq = self.iq.map(|c| c.imbalance()).transpose()?;
        if self.sweep.variable == SweepVariable::IqPair {
            let base = self.base_scenario()?;
            return self
                .sweep
                .iq_pairs
                .iter()
                .enumerate()
                .map(|(k, pair)| {
                    Ok(GridPoint {
                        sweep_value: k as f64,
                        scenario: base.clone(),
                        iq: Some(pair.imbalance()?),
                        iq_model: self.iq_model,
                    })
                })
                .collect();
        }
        self.sweep
            .values
            .iter()
            .map(|&v| {
                let mut cfg = self.clone();
                apply_variable(&mut cfg.scenario, self.sweep.variable, v);
                Ok(GridPoint { sweep_value: v, scenario: cfg.base_scenario()?, iq: fixed_iq, iq_model: self.iq_model })
            })
            .collect()
    }
}
