use std::process::Command;

use wlmvdr_cli::config::{IqModel, SweepVariable};
use wlmvdr_cli::output::{csv_string, read_csv, sort_rows};
use wlmvdr_cli::{emit, figure_preset, run_simulation, run_theory, ExperimentConfig, Format, ResultRow, Source};
use wlmvdr_core::scenario::snap_doa;
use wlmvdr_core::signal::{apply_iq_imbalance, synthesize, IqImbalance};
use wlmvdr_core::stats::scalar_noncircularity;

fn curves(name: &str) -> Vec<(String, ExperimentConfig)> {
    figure_preset(name).unwrap().expand_series()
}

fn of(rows: &[ResultRow], source: Source) -> impl Iterator<Item = &ResultRow> {
    rows.iter().filter(move |r| r.source == source)
}

fn small(mut cfg: ExperimentConfig, values: &[f64]) -> ExperimentConfig {
    cfg.sweep.values = values.to_vec();
    cfg.snapshots = 2000;
    cfg.trials = 3;
    cfg
}

#[test]
fn orthogonal_soi_rows_are_zero_db() {
    let (_, mut cfg) = curves("fig2a").remove(0);
    cfg.scenario.soi_doa_deg = 0.0;
    for row in run_theory(&cfg).unwrap() {
        for v in [row.g_db(), row.g_i_db().unwrap(), row.g_q_db().unwrap()] {
            assert!(v.abs() < 1e-9, "{row:?}");
        }
    }
}

#[test]
fn fig2_channel_orderings() {
    for (label, cfg) in curves("fig2a") {
        for r in run_theory(&cfg).unwrap() {
            assert!(r.g_i.unwrap() > r.g_q.unwrap(), "fig2a{label} at {}: {r:?}", r.sweep_value);
        }
    }
    for (label, cfg) in curves("fig2b") {
        for r in run_theory(&cfg).unwrap() {
            assert!(r.g_q.unwrap() > r.g_i.unwrap(), "fig2b{label} at {}: {r:?}", r.sweep_value);
        }
    }
}

#[test]
fn fig2a_ordering_holds_for_negative_soi_doa() {
    let (_, mut cfg) = curves("fig2a").remove(0);
    cfg.scenario.soi_doa_deg = -25.0;
    for r in run_theory(&cfg).unwrap() {
        assert!(r.g_i.unwrap() > r.g_q.unwrap());
    }
}

#[test]
fn fig1_channels_coincide() {
    for name in ["fig1", "fig1-alt"] {
        for (_, cfg) in curves(name) {
            for r in of(&run_theory(&cfg).unwrap(), Source::TheoryExact) {
                let g = r.g;
                assert!((r.g_i.unwrap() / g - 1.0).abs() < 1e-10 && (r.g_q.unwrap() / g - 1.0).abs() < 1e-10);
                assert!(g > 1.0);
            }
        }
    }
}

#[test]
fn fig3_sweeps_phase_over_full_turn() {
    let cfg = figure_preset("fig3").unwrap();
    assert_eq!(cfg.sweep.variable, SweepVariable::GammaPhase);
    assert_eq!(cfg.sweep.values.len(), 720);
    assert!(cfg.sweep.values.iter().all(|v| (0.0..360.0).contains(v)));
    assert_eq!(cfg.scenario.n_sensors, 16);
    assert_eq!(cfg.scenario.interference_doas_deg, [14.0, 30.0, 49.0, 90.0]);
    let fig6c = figure_preset("fig6c").unwrap();
    let iq = fig6c.iq.unwrap();
    assert_eq!((iq.g, iq.zeta_deg), (1.15, 15.0));
}

#[test]
fn approximation_gap_shrinks_with_inr() {
    for (label, cfg) in curves("fig2a") {
        let gap = |inr: f64| -> Vec<f64> {
            let mut c = cfg.clone();
            c.scenario.inr_db = inr;
            let rows = run_theory(&c).unwrap();
            let exact: Vec<_> = of(&rows, Source::TheoryExact).collect();
            of(&rows, Source::TheoryApprox).zip(exact).map(|(a, e)| (a.g - e.g).abs() / e.g).collect()
        };
        let (g20, g40) = (gap(20.0), gap(40.0));
        for (k, (a, b)) in g20.iter().zip(&g40).enumerate() {
            assert!(b < a, "fig2a{label} point {k}: {b} !< {a}");
        }
    }
}

#[test]
fn simulation_is_deterministic_and_parallel_safe() {
    let (_, cfg) = curves("fig2a").remove(2);
    let cfg = small(cfg, &[0.2, 0.8]);
    let a = csv_string(&run_simulation(&cfg).unwrap()).unwrap();
    let b = csv_string(&run_simulation(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| csv_string(&run_simulation(&cfg).unwrap()).unwrap());
    assert_eq!(a, c);
    let mut other = cfg.clone();
    other.seed += 1;
    assert_ne!(a, csv_string(&run_simulation(&other).unwrap()).unwrap());
}

#[test]
fn circular_point_simulates_to_zero_db() {
    let (_, cfg) = curves("fig2a").remove(2);
    let mut cfg = small(cfg, &[0.0]);
    cfg.snapshots = 20_000;
    cfg.trials = 10;
    let row = run_simulation(&cfg).unwrap().remove(0);
    assert_eq!((row.trials, row.snapshots), (Some(10), Some(20_000)));
    assert!(row.g_db().abs() < 0.2, "{row:?}");
}

#[test]
fn emitted_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (_, cfg) = curves("fig2b").remove(1);
    let cfg = small(cfg, &[0.3, 0.6]);
    let mut rows = run_theory(&cfg).unwrap();
    rows.extend(run_simulation(&cfg).unwrap());
    sort_rows(&mut rows);
    let path = dir.path().join("nested/out.csv");
    emit(&rows, &path, Format::Csv).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let back = read_csv(text.as_bytes()).unwrap();
    assert_eq!(back.len(), 6);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-11 * a.abs().max(b.abs());
    let close_db = |a: f64, b: f64| close(a.log10(), b.log10()) || (a / b - 1.0).abs() < 1e-11;
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!((a.sweep_value, a.source, a.trials, a.snapshots), (b.sweep_value, b.source, b.trials, b.snapshots));
        assert!(close(a.lambda_i, b.lambda_i) && close(a.lambda_q, b.lambda_q));
        assert!(close_db(a.g, b.g) && close_db(a.sinr_mvdr, b.sinr_mvdr) && close_db(a.sinr_capon, b.sinr_capon));
        assert!(close_db(a.g_i.unwrap(), b.g_i.unwrap()) && close_db(a.g_q.unwrap(), b.g_q.unwrap()));
    }
    assert_eq!(csv_string(&back).unwrap(), text);

    let script = dir.path().join("out.gp");
    emit(&rows, &script, Format::PlotScript).unwrap();
    assert!(std::fs::read_to_string(&script).unwrap().contains("'out.csv'"));
    assert!(dir.path().join("out.csv").exists());
}

#[test]
fn iq_front_end_rate_per_sensor() {
    let cfg = figure_preset("fig6c").unwrap();
    let point = cfg.points().unwrap().remove(10);
    let imb = point.iq.unwrap();
    let t = 20_000;
    let batch = apply_iq_imbalance(&synthesize(&point.scenario, t, 3).unwrap(), imb);
    for k in 0..batch.n_sensors() {
        let rate = scalar_noncircularity(&batch.sensor_stream(k)).unwrap().norm();
        assert!((rate - 0.29).abs() < 0.02, "sensor {k}: {rate}");
    }
    assert_eq!(imb, IqImbalance::new(1.15, 15f64.to_radians()).unwrap());
}

#[test]
fn absorbed_iq_simulation_tracks_theory() {
    let mut cfg = figure_preset("fig6b").unwrap();
    cfg.sweep.values = vec![-40.0, 25.0, 60.0];
    let theory = run_theory(&cfg).unwrap();
    let sim = run_simulation(&cfg).unwrap();
    for (s, e) in sim.iter().zip(of(&theory, Source::TheoryExact)) {
        assert!((s.g_i_db().unwrap() - e.g_i_db().unwrap()).abs() < 0.1, "{s:?} vs {e:?}");
        assert!((s.g_q_db().unwrap() - e.g_q_db().unwrap()).abs() < 0.1);
    }
    cfg.iq_model = IqModel::Receiver;
    let receiver = run_simulation(&cfg).unwrap();
    assert!(receiver.iter().zip(&sim).any(|(r, s)| r.g > s.g));
}

#[test]
fn preset_dump_reloads() {
    let dir = tempfile::tempdir().unwrap();
    for name in wlmvdr_cli::preset::PRESET_NAMES {
        let cfg = figure_preset(name).unwrap();
        let path = dir.path().join(format!("{name}.toml"));
        std::fs::write(&path, cfg.to_toml()).unwrap();
        assert_eq!(ExperimentConfig::load(&path).unwrap(), cfg);
    }
}

#[test]
fn snapping_moves_only_interferences() {
    let (_, cfg) = curves("fig2a").remove(1);
    let pt = cfg.points().unwrap().remove(0);
    assert_eq!(pt.scenario.soi_doa_deg, 25.0);
    let want: Vec<f64> = [19.0, 42.0, 90.0].iter().map(|&d| snap_doa(d, 6).unwrap().0).collect();
    let got: Vec<f64> = pt.scenario.interferences.iter().map(|i| i.doa_deg).collect();
    assert_eq!(got, want);
}

#[test]
fn binary_writes_series_files() {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_wlmvdr");
    let status =
        Command::new(exe).args(["theory", "--preset", "fig2b"]).env("WLMVDR_OUT_DIR", dir.path()).output().unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    for suffix in ["-50", "10", "15"] {
        let p = dir.path().join(format!("fig2b_soi_doa{suffix}.csv"));
        let rows = read_csv(std::fs::File::open(&p).unwrap()).unwrap();
        assert_eq!(rows.len(), 38);
    }

    let cfg_path = dir.path().join("tiny.toml");
    let (_, cfg) = curves("fig2a").remove(0);
    std::fs::write(&cfg_path, small(cfg, &[0.5]).to_toml()).unwrap();
    let out = dir.path().join("cmp.csv");
    let res = Command::new(exe).args(["compare", "--config"]).arg(&cfg_path).arg("--out").arg(&out).output().unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(String::from_utf8_lossy(&res.stdout).contains("GI_dB"));
    assert_eq!(read_csv(std::fs::File::open(&out).unwrap()).unwrap().len(), 3);

    let bad = Command::new(exe).args(["theory", "--preset", "fig9"]).output().unwrap();
    assert!(!bad.status.success());
    let literal = Command::new(exe)
        .args(["theory", "--preset", "fig2a", "--no-snap-doas", "--out"])
        .arg(dir.path().join("lit.csv"))
        .output()
        .unwrap();
    assert!(!literal.status.success());
    assert!(String::from_utf8_lossy(&literal.stderr).contains("assumption"));
}
