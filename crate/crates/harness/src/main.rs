use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use pretopo::Error;
use pretopo_cli::commands::{self, BagsArgs, FamilySource, GenGrids, Overrides};
use pretopo_cli::experiment::{run_to_files, ExperimentConfig};
use pretopo_cli::{exit_code, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "lps", version, about = "Learn pretopological propagation models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Burn a grid from one origin and print the map and the burnt set.
    Simulate {
        #[arg(long)]
        grid: PathBuf,
        /// `simple`, `medium`, `hard`, a DNF such as `q4 | (q6 & q7)`, or weights.
        #[arg(long)]
        model: String,
        /// `row,col` or a cell index.
        #[arg(long)]
        origin: String,
        /// Also write the burnt set as a structuring file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a nested obstacle series (and optional training samples).
    GenGrids {
        #[arg(long, default_value_t = 15)]
        width: usize,
        #[arg(long, default_value_t = 15)]
        height: usize,
        /// Comma-separated obstacle percentages.
        #[arg(long, value_delimiter = ',', default_value = "0,10,20,30,40,50,60")]
        obstacles: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Target model for training structurings.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value_t = 0.3)]
        fraction: f64,
    },
    /// Learn a model from a target structuring.
    Learn {
        #[command(flatten)]
        input: FamilyInput,
        #[arg(long)]
        structuring: PathBuf,
        /// Learner config file (`key = value` lines).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        beam: Option<usize>,
        #[arg(long)]
        pop: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the learned model text.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count bags and, for a candidate model, the covered ones.
    Bags {
        #[command(flatten)]
        input: FamilyInput,
        #[arg(long)]
        structuring: PathBuf,
        #[arg(long)]
        model: Option<String>,
        /// Cross-check against explicit bag enumeration (small universes).
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Write the enumerated bags (with --oracle).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a grid benchmark described by a TOML file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Master seed, overriding the file.
        #[arg(long)]
        seed: Option<u64>,
        /// Run records CSV, overriding the file; means go next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FamilyInput {
    /// Neighborhood family file.
    #[arg(long)]
    family: Option<PathBuf>,
    /// Grid file, read as its Moore family.
    #[arg(long)]
    grid: Option<PathBuf>,
}

impl FamilyInput {
    fn load(&self) -> Result<pretopo::NeighborhoodFamily> {
        match (&self.family, &self.grid) {
            (Some(f), _) => commands::load_family(FamilySource::Neighborhoods(&commands::read(f)?)),
            (_, Some(g)) => commands::load_family(FamilySource::Grid(&commands::read(g)?)),
            _ => unreachable!("clap requires one input"),
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Simulate { grid, model, origin, out } => {
            let text = commands::simulate(&commands::read(&grid)?, &model, &origin)?;
            if let Some(path) = out {
                let line = text.lines().last().unwrap_or_default();
                commands::write(&path, &format!("{line}\n"))?;
            }
            Ok(text)
        }
        Command::GenGrids {
            width,
            height,
            obstacles,
            seed,
            out,
            model,
            fraction,
        } => commands::gen_grids(&GenGrids {
            width,
            height,
            obstacles: &obstacles,
            seed,
            out_dir: &out,
            model: model.as_deref(),
            fraction,
        }),
        Command::Learn {
            input,
            structuring,
            config,
            beam,
            pop,
            p,
            seed,
            out,
        } => {
            let family = input.load()?;
            let learned = commands::learn_cmd(
                &family,
                &commands::read(&structuring)?,
                &commands::read(&config)?,
                Overrides { beam, pop, p, seed },
            )?;
            if let Some(path) = out {
                commands::write(&path, &format!("{}\n", learned.model))?;
            }
            Ok(learned.report)
        }
        Command::Bags {
            input,
            structuring,
            model,
            oracle,
            p,
            out,
        } => commands::bags(&BagsArgs {
            family: &input.load()?,
            structuring_text: &commands::read(&structuring)?,
            candidate: model.as_deref(),
            oracle,
            p,
            dump: out.as_deref(),
        }),
        Command::Experiment { config, seed, out } => {
            let mut cfg = ExperimentConfig::from_toml(&commands::read(&config)?)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out = out
                .or_else(|| cfg.output.clone())
                .ok_or_else(|| Error::Config("no output path: set `output` or pass --out".into()))?;
            let records = run_to_files(&cfg, Path::new(&out))?;
            Ok(format!("{} runs written to {}\n", records.len(), out.display()))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
