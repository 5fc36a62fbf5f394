use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use wlmvdr_cli::output::Format;
use wlmvdr_cli::preset::PRESET_NAMES;
use wlmvdr_cli::{
    check, compare, emit, figure_preset, resolve_output, run_simulation, run_theory, series_path, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "wlmvdr", version, about = "WL MVDR vs Capon gain experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and approximate gains over the sweep grid.
    Theory(RunArgs),
    /// Monte Carlo gains over the sweep grid.
    Simulate(RunArgs),
    /// Theory and simulation side by side, with per-column gaps.
    Compare(RunArgs),
    /// Print a figure preset as a TOML config.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interference orthogonality and power diagnostics.
    Check(InputArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
}

impl InputArgs {
    fn load(&self) -> Result<(String, ExperimentConfig)> {
        if let Some(path) = &self.config {
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
            return Ok((name, ExperimentConfig::load(path)?));
        }
        let name = self.preset.as_deref().expect("clap enforces one input");
        Ok((name.to_owned(), figure_preset(name)?))
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output file; multi-curve runs append the series label to its stem.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Snap interference DOAs to the exact-orthogonal grid.
    #[arg(long, overrides_with = "no_snap_doas")]
    snap_doas: bool,
    /// Use the DOAs as written.
    #[arg(long)]
    no_snap_doas: bool,
}

impl RunArgs {
    fn load(&self) -> Result<(String, ExperimentConfig)> {
        let (name, mut cfg) = self.input.load()?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(t) = self.snapshots {
            cfg.snapshots = t;
        }
        if let Some(n) = self.trials {
            cfg.trials = n;
        }
        if self.snap_doas {
            cfg.snap_doas = true;
        }
        if self.no_snap_doas {
            cfg.snap_doas = false;
        }
        cfg.validate()?;
        Ok((name, cfg))
    }
}

#[derive(Clone, Copy)]
enum Mode {
    Theory,
    Simulate,
    Compare,
}

fn run(args: &RunArgs, mode: Mode) -> Result<()> {
    let (name, cfg) = args.load()?;
    let base = resolve_output(&name, &cfg, args.out.as_deref(), args.format);
    for (suffix, single) in cfg.expand_series() {
        let mut rows = Vec::new();
        if matches!(mode, Mode::Theory | Mode::Compare) {
            rows.extend(run_theory(&single)?);
        }
        if matches!(mode, Mode::Simulate | Mode::Compare) {
            rows.extend(run_simulation(&single)?);
        }
        let path = series_path(&base, &suffix);
        emit(&rows, &path, args.format).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
        if let Mode::Compare = mode {
            for gap in compare(&rows)? {
                match (gap.max_abs_db, gap.worst_sweep_value) {
                    (Some(db), Some(at)) => println!("  {:<14} max |sim - theory| = {db:.4} dB at {at}", gap.column),
                    _ => println!("  {:<14} undefined", gap.column),
                }
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Theory(a) => run(a, Mode::Theory),
        Command::Simulate(a) => run(a, Mode::Simulate),
        Command::Compare(a) => run(a, Mode::Compare),
        Command::Preset { name, out } => {
            if !PRESET_NAMES.contains(&name.as_str()) {
                bail!("unknown preset {name:?}; known presets: {}", PRESET_NAMES.join(", "));
            }
            let text = figure_preset(name)?.to_toml();
            match out {
                Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Check(input) => {
            let (name, cfg) = input.load()?;
            let report = check(&cfg)?;
            println!("{name}: N = {}, P = {}", cfg.scenario.n_sensors, cfg.scenario.interference_doas_deg.len());
            println!("  literal DOAs {:?}", cfg.scenario.interference_doas_deg);
            println!(
                "    worst |j_i^H j_k|/N = {:.3e} (orthogonal: {})",
                report.literal.pairwise_orthogonality,
                report.literal.orthogonal()
            );
            println!("  snapped DOAs {:?}", report.snapped_doas_deg);
            println!(
                "    worst |j_i^H j_k|/N = {:.3e} (orthogonal: {})",
                report.snapped.pairwise_orthogonality,
                report.snapped.orthogonal()
            );
            println!("  power spread {:.3e} (uniform: {})", report.literal.power_spread, report.literal.uniform_power);
            Ok(())
        }
    }
}
