//! `nfmimo`: design, evaluate and reproduce orthogonal LoS MIMO array placements.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or config error, 3 infeasible design.

mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use nfmimo::config::{load_configs, ConfigSuite, ExperimentConfig, Strategy};
use nfmimo::experiments::{
    run_antenna_sweep, run_design, run_elevation_sweep, run_evaluate, run_grid_search, run_ortho_map,
    run_spacing_sweep, run_table2,
};
use nfmimo::table::Table;
use nfmimo::Error;

#[derive(Parser)]
#[command(name = "nfmimo", version, about = "Orthogonal antenna placement for line-of-sight MIMO links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Io {
    /// JSON config: one experiment or {"experiments": [...]}.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Scenario id to pick from a config suite.
    #[arg(long)]
    scenario: Option<String>,
    /// Output directory for CSV files.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also render each CSV as SVG.
    #[arg(long)]
    plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form receiver design.
    Design {
        #[arg(value_enum)]
        method: DesignMethod,
        #[command(flatten)]
        io: Io,
    },
    /// Effective rank, rank and capacity of the configured receiver.
    Evaluate {
        #[command(flatten)]
        io: Io,
    },
    /// Exhaustive search over receiver spacings.
    GridSearch {
        #[command(flatten)]
        io: Io,
    },
    /// Regenerate a figure or table.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignMethod {
    Paraxial,
    TwoSub,
    FourSub,
    Chain,
}

impl DesignMethod {
    fn strategy(self) -> Strategy {
        match self {
            Self::Paraxial => Strategy::Paraxial,
            Self::TwoSub => Strategy::TwoSub,
            Self::FourSub => Strategy::FourSub,
            Self::Chain => Strategy::Chain,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    FigElevation,
    FigAntennas,
    FigSpacing,
    FigOrtho,
    Table2,
}

impl Target {
    fn scenario(self) -> &'static str {
        match self {
            Self::FigElevation => "fig-elevation",
            Self::FigAntennas => "fig-antennas",
            Self::FigSpacing => "fig-spacing",
            Self::FigOrtho => "fig-ortho",
            Self::Table2 => "table2",
        }
    }
}

enum Failure {
    Usage(String),
    Infeasible(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidGeometry(_) | Error::InvalidArgument(_) | Error::DegenerateGrid(_) => {
                Self::Usage(e.to_string())
            }
            _ => Self::Runtime(e.to_string()),
        }
    }
}

fn pick<'a>(suite: &'a ConfigSuite, wanted: Option<&str>) -> Result<&'a ExperimentConfig, Failure> {
    if suite.experiments.len() == 1 && wanted.is_none_or(|w| suite.experiments[0].scenario == w) {
        return Ok(&suite.experiments[0]);
    }
    match wanted {
        Some(w) => suite.get(w).ok_or_else(|| Failure::Usage(format!("config has no scenario {w:?}"))),
        None => Err(Failure::Usage("config holds several scenarios; pass --scenario".into())),
    }
}

fn out_dir(io: &Io, cfg: &ExperimentConfig) -> PathBuf {
    io.out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn emit(tables: &[Table], dir: &Path, plots: bool) -> Result<(), Failure> {
    for t in tables {
        let path = t.save(dir)?;
        info!("wrote {}", path.display());
        if plots {
            let svg = dir.join(format!("{}.svg", t.name));
            plot::render(t, &svg).map_err(|e| Failure::Runtime(format!("plotting {}: {e}", t.name)))?;
            info!("wrote {}", svg.display());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Design { method, io } => {
            let suite = load_configs(&io.config)?;
            let cfg = pick(&suite, io.scenario.as_deref())?;
            let out = run_design(cfg, method.strategy())?;
            emit(std::slice::from_ref(&out.table), &out_dir(&io, cfg), io.plots)?;
            print!("{}", out.table.to_csv_string()?);
            if let Some(n) = out.neff {
                println!("neff_exact={n:.9}");
            }
            if !out.feasible {
                return Err(Failure::Infeasible(out.diagnostics.join("; ")));
            }
        }
        Command::Evaluate { io } => {
            let suite = load_configs(&io.config)?;
            let cfg = pick(&suite, io.scenario.as_deref())?;
            let rep = run_evaluate(cfg)?;
            let mut t = Table::new("evaluate", nfmimo::SpectralReport::CSV_HEADER);
            t.push(rep.csv_record(&cfg.scenario))?;
            emit(&[t], &out_dir(&io, cfg), false)?;
            println!("neff={:.9}", rep.effective_rank);
            println!("rank={}", rep.rank_numeric);
            println!("capacity_equipower={:.9}", rep.capacity_equipower);
            println!("capacity_waterfilling={:.9}", rep.capacity_waterfilling);
            println!("max_offdiag_db={:.6}", rep.max_off_diagonal_db());
        }
        Command::GridSearch { io } => {
            let suite = load_configs(&io.config)?;
            let cfg = pick(&suite, io.scenario.as_deref())?;
            let (r, trace) = run_grid_search(cfg)?;
            emit(&[trace], &out_dir(&io, cfg), io.plots)?;
            let params: Vec<String> = r.best_params.iter().map(|v| format!("{v}")).collect();
            println!("best_params_lam={}", params.join(","));
            println!("neff={:.9}", r.best_effective_rank);
            println!("evaluated={}", r.evaluated);
        }
        Command::Reproduce { target, io } => {
            let suite = load_configs(&io.config)?;
            let cfg = pick(&suite, Some(io.scenario.as_deref().unwrap_or(target.scenario())))?;
            let tables = match target {
                Target::FigElevation => vec![run_elevation_sweep(cfg)?],
                Target::FigAntennas => vec![run_antenna_sweep(cfg)?],
                Target::FigSpacing => {
                    let (fig, table) = run_spacing_sweep(cfg)?;
                    vec![fig, table]
                }
                Target::FigOrtho => run_ortho_map(cfg)?,
                Target::Table2 => vec![run_table2(cfg)?],
            };
            let dir = out_dir(&io, cfg);
            emit(&tables, &dir, io.plots)?;
            for t in &tables {
                println!("{}", dir.join(format!("{}.csv", t.name)).display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(m)) => {
            eprintln!("infeasible design: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
