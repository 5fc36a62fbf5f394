//! Theory evaluation, Monte Carlo simulation and their comparison.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use wlmvdr_core::analysis::{gain_report, InAccumulator};
use wlmvdr_core::beamform::{capon_weights, output_in, wl_mvdr_weights};
use wlmvdr_core::scenario::{check_assumptions, AssumptionReport};
use wlmvdr_core::signal::{apply_iq_imbalance, iq_mu_nu, synthesize, synthesize_iq_absorbed};
use wlmvdr_core::stats::estimate_in_stats;
use wlmvdr_core::theory::{approx, closed_form, special_case, ApproxTarget, SpatialCase, TheoryInputs};
use wlmvdr_core::{to_db, Error};

use crate::config::{ExperimentConfig, GridPoint, IqModel};
use crate::error::{CliError, Result};
use crate::output::{sort_rows, ResultRow, Source};

/// Tolerance on the worst normalized inner product between interference
/// steering vectors for the closed forms to be evaluated.
pub const ASSUMPTION_TOL: f64 = 1e-6;

fn theory_inputs(point: &GridPoint) -> Result<TheoryInputs> {
    let sc = point.theory_scenario();
    let report = check_assumptions(&sc, ASSUMPTION_TOL)?;
    if !report.holds() {
        return Err(Error::AssumptionViolated(format!(
            "worst interference inner product {:.3e}, power spread {:.3e} (tolerance {ASSUMPTION_TOL:.0e}); \
             try snapping DOAs",
            report.pairwise_orthogonality, report.power_spread
        ))
        .into());
    }
    Ok(TheoryInputs::from_scenario(&sc)?)
}

fn approx_row(sweep_value: f64, t: &TheoryInputs, sinr_capon: f64) -> Result<ResultRow> {
    if let Some(case) = SpatialCase::classify(t.alpha_is_sq) {
        let b = special_case(t, case)?;
        let lambda_i = b.g_i / b.g;
        let lambda_q = b.g_q / b.g;
        return Ok(ResultRow {
            sweep_value,
            source: Source::TheoryApprox,
            g: b.g,
            g_i: Some(b.g_i),
            g_q: Some(b.g_q),
            lambda_i,
            lambda_q,
            sinr_mvdr: b.sinr_mvdr,
            sinr_capon: b.sinr_capon,
            trials: None,
            snapshots: None,
        });
    }
    let f = |target| approx(t, target);
    Ok(ResultRow {
        sweep_value,
        source: Source::TheoryApprox,
        g: f(ApproxTarget::Gain)?,
        g_i: Some(f(ApproxTarget::GainI)?),
        g_q: Some(f(ApproxTarget::GainQ)?),
        lambda_i: f(ApproxTarget::LambdaI)?,
        lambda_q: f(ApproxTarget::LambdaQ)?,
        sinr_mvdr: f(ApproxTarget::SinrMvdr)?,
        // the strong-interference forms leave the Capon SINR exact
        sinr_capon,
        trials: None,
        snapshots: None,
    })
}

fn theory_rows(point: &GridPoint) -> Result<[ResultRow; 2]> {
    let t = theory_inputs(point)?;
    let cf = closed_form(&t)?;
    let exact = ResultRow {
        sweep_value: point.sweep_value,
        source: Source::TheoryExact,
        g: cf.g,
        g_i: Some(cf.g_i),
        g_q: Some(cf.g_q),
        lambda_i: cf.lambda_i,
        lambda_q: cf.lambda_q,
        sinr_mvdr: cf.sinr_mvdr,
        sinr_capon: cf.sinr_capon,
        trials: None,
        snapshots: None,
    };
    Ok([exact, approx_row(point.sweep_value, &t, cf.sinr_capon)?])
}

/// One theory-exact and one theory-approx row per grid point, sorted.
pub fn run_theory(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for point in cfg.points()? {
        rows.extend(theory_rows(&point)?);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// Seed of trial `trial` at grid point `point`: a dedicated ChaCha8 stream of
/// the config seed, so trials are independent of scheduling.
pub fn trial_seed(seed: u64, point: usize, trial: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | trial as u64);
    rng.next_u64()
}

fn simulate_trial(point: &GridPoint, snapshots: usize, seed: u64) -> Result<(InAccumulator, InAccumulator)> {
    let batch = match (point.iq, point.iq_model) {
        (None, _) => synthesize(&point.scenario, snapshots, seed)?,
        (Some(imb), IqModel::Absorbed) => synthesize_iq_absorbed(&point.scenario, snapshots, seed, imb)?,
        (Some(imb), IqModel::Receiver) => apply_iq_imbalance(&synthesize(&point.scenario, snapshots, seed)?, imb),
    };
    let stats = estimate_in_stats(batch.in_ref(), batch.n_sensors())?;
    let s = batch.steering();
    let mvdr = output_in(&batch, &wl_mvdr_weights(&stats, s)?)?;
    let capon = output_in(&batch, &capon_weights(&stats, s)?)?;
    Ok((InAccumulator::from_samples(&mvdr), InAccumulator::from_samples(&capon)))
}

/// Monte Carlo rows, one per grid point.
///
/// Grid points and trials run in parallel; per-trial accumulators are merged
/// in trial order, so the output does not depend on the thread count.
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let points = cfg.points()?;
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..cfg.trials).map(move |t| (p, t))).collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(p, t)| simulate_trial(&points[p], cfg.snapshots, trial_seed(cfg.seed, p, t)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(points.len());
    for (point, chunk) in points.iter().zip(results.chunks(cfg.trials)) {
        let (mut mvdr, mut capon) = (InAccumulator::default(), InAccumulator::default());
        for (m, c) in chunk {
            mvdr.merge(m);
            capon.merge(c);
        }
        let pi_s = match (point.iq, point.iq_model) {
            (Some(imb), IqModel::Receiver) => point.scenario.soi_power * iq_mu_nu(imb).0.norm_sqr(),
            _ => point.scenario.soi_power,
        };
        let report = gain_report(&mvdr.characterize()?, &capon.characterize()?, pi_s)?;
        let mut row = ResultRow::from_report(point.sweep_value, Source::Simulated, &report);
        row.trials = Some(cfg.trials);
        row.snapshots = Some(cfg.snapshots);
        rows.push(row);
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// Largest `|10·log10(simulated / theory-exact)|` of one column.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnGap {
    pub column: &'static str,
    /// `None` when no sweep point has the column defined on both sides.
    pub max_abs_db: Option<f64>,
    pub worst_sweep_value: Option<f64>,
}

type Column = (&'static str, fn(&ResultRow) -> Option<f64>);

const COLUMNS: [Column; 7] = [
    ("G_dB", |r| Some(r.g)),
    ("GI_dB", |r| r.g_i),
    ("GQ_dB", |r| r.g_q),
    ("lambda_I", |r| Some(r.lambda_i)),
    ("lambda_Q", |r| Some(r.lambda_q)),
    ("SINR_MVDR_dB", |r| Some(r.sinr_mvdr)),
    ("SINR_Capon_dB", |r| Some(r.sinr_capon)),
];

/// Per-column gaps between simulated rows and the theory-exact row at the
/// same sweep value. Every simulated row must have a partner.
pub fn compare(rows: &[ResultRow]) -> Result<Vec<ColumnGap>> {
    let mut pairs = Vec::new();
    for sim in rows.iter().filter(|r| r.source == Source::Simulated) {
        let theory = rows
            .iter()
            .find(|r| r.source == Source::TheoryExact && r.sweep_value == sim.sweep_value)
            .ok_or_else(|| CliError::Config(format!("no theory-exact row at sweep value {}", sim.sweep_value)))?;
        pairs.push((sim, theory));
    }
    Ok(COLUMNS
        .iter()
        .map(|&(column, get)| {
            let mut worst: Option<(f64, f64)> = None;
            for (sim, theory) in &pairs {
                if let (Some(a), Some(b)) = (get(sim), get(theory)) {
                    let gap = to_db(a / b).abs();
                    if worst.is_none_or(|(w, _)| gap > w) {
                        worst = Some((gap, sim.sweep_value));
                    }
                }
            }
            ColumnGap { column, max_abs_db: worst.map(|w| w.0), worst_sweep_value: worst.map(|w| w.1) }
        })
        .collect())
}

/// Assumption diagnostics of the literal and the snapped geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub literal: AssumptionReport,
    pub snapped: AssumptionReport,
    pub snapped_doas_deg: Vec<f64>,
}

pub fn check(cfg: &ExperimentConfig) -> Result<CheckReport> {
    let mut literal_cfg = cfg.clone();
    literal_cfg.snap_doas = false;
    let mut snapped_cfg = cfg.clone();
    snapped_cfg.snap_doas = true;
    let literal = literal_cfg.base_scenario()?;
    let snapped = snapped_cfg.base_scenario()?;
    Ok(CheckReport {
        literal: check_assumptions(&literal, ASSUMPTION_TOL)?,
        snapped: check_assumptions(&snapped, ASSUMPTION_TOL)?,
        snapped_doas_deg: snapped.interferences.iter().map(|i| i.doa_deg).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset::figure_preset;

    #[test]
    fn trial_seeds_are_distinct() {
        let mut seen: Vec<u64> = (0..4).flat_map(|p| (0..4).map(move |t| trial_seed(7, p, t))).collect();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 16);
        assert_eq!(trial_seed(7, 1, 2), trial_seed(7, 1, 2));
    }

    #[test]
    fn literal_doas_fail_assumptions() {
        let (_, mut cfg) = figure_preset("fig2a").unwrap().expand_series().remove(0);
        cfg.snap_doas = false;
        assert!(matches!(run_theory(&cfg), Err(CliError::Core(Error::AssumptionViolated(_)))));
        let report = check(&cfg).unwrap();
        assert!(!report.literal.orthogonal());
        assert!(report.snapped.orthogonal());
    }

    #[test]
    fn compare_needs_partner_rows() {
        let (_, mut cfg) = figure_preset("fig2a").unwrap().expand_series().remove(0);
        cfg.sweep.values = vec![0.5];
        let theory = run_theory(&cfg).unwrap();
        let mut sim = theory[0].clone();
        sim.source = Source::Simulated;
        sim.g *= 1.1;
        let gaps = compare(&[theory[0].clone(), sim.clone()]).unwrap();
        assert!((gaps[0].max_abs_db.unwrap() - to_db(1.1)).abs() < 1e-12);
        assert_eq!(gaps[1].max_abs_db, Some(0.0));
        assert!(compare(&[sim]).is_err());
    }
}
