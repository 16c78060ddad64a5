use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pcburgers::experiment::output::write_atomic;
use pcburgers::experiment::{
    compare, emit_reference, norms_table, preset, run, uniform_grid, Case, ExperimentConfig,
    ReferenceCase, Table, PRESETS,
};
use pcburgers::pc_basis::OrthogonalFamily;

/// Stochastic Galerkin Burgers experiments.
#[derive(Parser)]
#[command(name = "pcburgers", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a config file and write snapshots, series and audits.
    Run(RunArgs),
    /// Tabulate the exact solution of a test case.
    Reference(ReferenceArgs),
    /// Error norms between two CSV tables, column by column.
    Compare(CompareArgs),
    /// List the preset names.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// `key=value`, applied after the preset or config file.
    #[arg(long = "override", short = 'o', value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory; relative paths are resolved against PCBURGERS_OUTPUT_ROOT.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Hermite,
    Jacobi,
    Laguerre,
}

#[derive(Args)]
struct ReferenceArgs {
    #[arg(long)]
    case: String,
    #[arg(long, value_enum, default_value = "hermite")]
    family: FamilyArg,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    out: PathBuf,
    /// Highest coefficient index written.
    #[arg(long, default_value_t = 3)]
    modes: usize,
    /// Number of equally spaced points on [x_lo, x_hi].
    #[arg(long, default_value_t = 1001, conflicts_with = "grid")]
    points: usize,
    /// Take the abscissae from the x column of this CSV file.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Further `key=value` settings (a, b, x0, r, bump_eps, x_lo, x_hi).
    #[arg(long = "set", short = 's', value_name = "KEY=VALUE")]
    settings: Vec<String>,
}

#[derive(Args)]
struct CompareArgs {
    run: PathBuf,
    reference: PathBuf,
    /// Interpolate the second table linearly onto the abscissae of the first.
    #[arg(long)]
    interpolate: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(a) => cmd_run(a),
        Command::Reference(a) => cmd_reference(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Presets => {
            for p in PRESETS {
                println!("{p}");
            }
            Ok(())
        }
    }
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let mut cfg = match (&a.preset, &a.config) {
        (Some(p), None) => preset(p)?,
        (None, Some(path)) => ExperimentConfig::from_file(path)?,
        _ => bail!("give exactly one of --preset or --config"),
    };
    for o in &a.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(dir) = a.output_dir {
        cfg.output_dir = dir;
    }
    cfg.validate()?;
    let report = run(&cfg)?;
    for p in &report.snapshot_paths {
        println!("snapshot {}", p.display());
    }
    println!("series {}", report.series_path.display());
    if let Some(p) = &report.audit_path {
        println!("rh_audit {}", p.display());
    }
    println!("report {}", report.report_path.display());
    println!("metadata {}", report.metadata_path.display());
    println!("plot {}", report.plot_path.display());
    let drift: Vec<String> = report
        .mass_drift
        .iter()
        .map(|d| format!("{d:.3e}"))
        .collect();
    println!("mass_drift [{}]", drift.join(", "));
    if cfg.case == Case::Shock {
        println!("plateaus {}", report.plateaus.len());
        for d in &report.discontinuities {
            println!(
                "discontinuity x={:.4} s={:.4} rh={:.3e} rh_jump={:.3e} entropy={:.3e}",
                d.location,
                d.speed,
                d.flux_scaled_residual,
                d.jump_scaled_residual,
                d.entropy_residual
            );
        }
    }
    println!("wall_time {:.2}s", report.wall_time);
    Ok(())
}

fn cmd_reference(a: ReferenceArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.set("case", &a.case)?;
    if cfg.case == Case::Bump {
        cfg.x0 = 0.25;
    }
    for s in &a.settings {
        cfg.apply_override(s)?;
    }
    let family = match a.family {
        FamilyArg::Hermite => OrthogonalFamily::HermiteNormalized,
        FamilyArg::Jacobi => OrthogonalFamily::jacobi(a.alpha, a.beta)?,
        FamilyArg::Laguerre => OrthogonalFamily::laguerre(a.alpha)?,
    };
    let grid = match &a.grid {
        Some(path) => Table::read(path)?
            .column("x")
            .with_context(|| format!("{} has no x column", path.display()))?,
        None => uniform_grid(cfg.x_lo, cfg.x_hi, a.points),
    };
    let table = emit_reference(
        &ReferenceCase::from_config(&cfg),
        &grid,
        a.t,
        a.modes,
        family,
    )?;
    write_atomic(&a.out, table.to_csv().as_bytes())?;
    println!("{}", a.out.display());
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let x = Table::read(&a.run)?;
    let y = Table::read(&a.reference)?;
    let norms = compare(&x, &y, a.interpolate)?;
    let text = norms_table(&norms);
    print!("{text}");
    if let Some(out) = a.out {
        write_atomic(&out, text.as_bytes())?;
    }
    Ok(())
}
