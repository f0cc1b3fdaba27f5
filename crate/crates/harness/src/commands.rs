//! Subcommand bodies. Each returns the text printed on standard output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use pretopo::bags::{
    bag_accounts, dump_bags, generate_bags_bruteforce, intrinsic_from_counts, oracle_counts, BagLimits,
};
use pretopo::learners::{learn, LearnerConfig};
use pretopo::measures::extrinsic_measure;
use pretopo::percolation::{
    build_training_structuring, generate_obstacle_series, moore_family, simulate_fire, Grid, TargetModel,
};
use pretopo::{elementary_closures_over, Dnf, ElementSet, Error, Model, NeighborhoodFamily, Structuring};

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// A benchmark model name, a DNF, or a weight vector.
pub fn parse_model(text: &str) -> Result<Model> {
    if let Ok(m) = text.parse::<TargetModel>() {
        return Ok(Model::Dnf(m.dnf()));
    }
    Ok(text.parse::<Model>()?)
}

/// `row,col` or a flat cell index.
pub fn parse_origin(grid: &Grid, text: &str) -> Result<usize> {
    let bad = || Error::InvalidArgument(format!("bad origin {text:?} (expected `row,col` or a cell index)"));
    let x = match text.split_once(',') {
        Some((r, c)) => {
            let r: usize = r.trim().parse().map_err(|_| bad())?;
            let c: usize = c.trim().parse().map_err(|_| bad())?;
            if r >= grid.height() || c >= grid.width() {
                return Err(Error::InvalidArgument(format!(
                    "origin ({r}, {c}) outside a {}x{} grid",
                    grid.width(),
                    grid.height()
                ))
                .into());
            }
            grid.cell(r, c)
        }
        None => text.trim().parse().map_err(|_| bad())?,
    };
    if x >= grid.cells() {
        return Err(Error::InvalidArgument(format!("origin {x} outside a grid of {} cells", grid.cells())).into());
    }
    Ok(x)
}

pub fn simulate(grid_text: &str, model_text: &str, origin_text: &str) -> Result<String> {
    let grid: Grid = grid_text.parse()?;
    let model = parse_model(model_text)?;
    let origin = parse_origin(&grid, origin_text)?;
    let burnt = simulate_fire(&grid, &model, origin)?;
    let line = Structuring::from_entries(grid.cells(), [(origin, burnt.clone())])?.to_text();
    Ok(format!("{}{line}", grid.render(&burnt, Some(origin))))
}

pub struct GenGrids<'a> {
    pub width: usize,
    pub height: usize,
    pub obstacles: &'a [f64],
    pub seed: u64,
    pub out_dir: &'a Path,
    /// With a model, also writes sampled training structurings.
    pub model: Option<&'a str>,
    pub fraction: f64,
}

/// Writes `grid_<pct>.txt` (and `train_<pct>.txt`) for every percentage.
pub fn gen_grids(args: &GenGrids<'_>) -> Result<String> {
    let series = generate_obstacle_series(args.width, args.height, args.obstacles, args.seed)?;
    let model = args.model.map(parse_model).transpose()?;
    fs::create_dir_all(args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let mut report = String::new();
    for (pct, grid) in series.grids() {
        let path = args.out_dir.join(format!("grid_{pct}.txt"));
        write(&path, &grid.to_text())?;
        writeln!(report, "{} obstacles={}", path.display(), grid.obstacles().len())?;
        if let Some(m) = &model {
            let s = build_training_structuring(grid, m, args.fraction, args.seed)?;
            let path = args.out_dir.join(format!("train_{pct}.txt"));
            write(&path, &s.to_text())?;
            writeln!(report, "{} samples={}", path.display(), s.domain_len())?;
        }
    }
    Ok(report)
}

pub enum FamilySource<'a> {
    Neighborhoods(&'a str),
    Grid(&'a str),
}

pub fn load_family(source: FamilySource<'_>) -> Result<NeighborhoodFamily> {
    Ok(match source {
        FamilySource::Neighborhoods(text) => NeighborhoodFamily::parse(text)?,
        FamilySource::Grid(text) => moore_family(&text.parse::<Grid>()?),
    })
}

/// Command-line overrides applied on top of a learner config file.
#[derive(Debug, Default, Clone, Copy)]
pub struct Overrides {
    pub beam: Option<usize>,
    pub pop: Option<usize>,
    pub p: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut LearnerConfig) -> Result<()> {
        if let Some(b) = self.beam {
            config.beam_size = b;
        }
        if let Some(n) = self.pop {
            config.initial_pop = n;
        }
        if let Some(p) = self.p {
            config.p = p;
        }
        if let Some(s) = self.seed {
            config.rng_seed = s;
        }
        config.validate()?;
        Ok(())
    }
}

pub struct Learned {
    pub report: String,
    pub model: Model,
}

pub fn learn_cmd(family: &NeighborhoodFamily, structuring_text: &str, config_text: &str, o: Overrides) -> Result<Learned> {
    let target = Structuring::parse(structuring_text, family.len())?;
    let mut config = LearnerConfig::parse(config_text)?;
    o.apply(&mut config)?;
    let r = learn(family, &target, &config)?;
    let mut report = String::new();
    writeln!(report, "model: {}", r.model)?;
    writeln!(report, "algorithm: {} ({})", config.algorithm, config.params_tag())?;
    writeln!(report, "precision: {}", r.extrinsic.precision)?;
    writeln!(report, "recall: {}", r.extrinsic.recall)?;
    writeln!(report, "f_measure: {}", r.extrinsic.f_measure)?;
    match r.intrinsic {
        Some(h) => writeln!(report, "intrinsic: {h}")?,
        None => writeln!(report, "intrinsic: n/a")?,
    }
    writeln!(report, "iterations: {}", r.iterations)?;
    writeln!(report, "structuring_calls: {}", r.structuring_calls)?;
    writeln!(report, "wall_time_s: {:.6}", r.wall_time.as_secs_f64())?;
    Ok(Learned { report, model: r.model })
}

pub struct BagsArgs<'a> {
    pub family: &'a NeighborhoodFamily,
    pub structuring_text: &'a str,
    pub candidate: Option<&'a str>,
    pub oracle: bool,
    pub p: f64,
    /// Where to dump the enumerated bags (requires `oracle`).
    pub dump: Option<&'a Path>,
}

pub fn bags(args: &BagsArgs<'_>) -> Result<String> {
    let family = args.family;
    let target = Structuring::parse(args.structuring_text, family.len())?;
    let limits = BagLimits::default();
    let candidate = args.candidate.map(parse_model).transpose()?;
    // Without a candidate the accounts are taken against the identity model.
    let learned = match &candidate {
        Some(m) => elementary_closures_over(family, m, target.domain())?,
        None => Structuring::from_entries(family.len(), target.domain().map(|x| (x, ElementSet::singleton(family.len(), x))))?,
    };
    let acc = bag_accounts(&target, &learned, &limits)?;
    let mut out = String::new();
    writeln!(out, "positive_bags: {}", acc.total_positive)?;
    writeln!(out, "negative_bags: {}", acc.total_negative)?;
    if let Some(m) = &candidate {
        writeln!(out, "candidate: {m}")?;
        writeln!(out, "covered_positive_estimate: {}", acc.covered_positive_estimate)?;
        writeln!(out, "covered_negative: {}", acc.covered_negative)?;
        writeln!(out, "intrinsic: {}", intrinsic_from_counts(&acc.covered_positive_estimate, acc.covered_negative, args.p))?;
        writeln!(out, "f_measure: {}", extrinsic_measure(&target, &learned)?.f_measure)?;
    }
    if args.oracle {
        let bags = generate_bags_bruteforce(family, &target, &limits)?;
        let o = match &candidate {
            Some(m) => oracle_counts(&bags, m),
            None => oracle_counts(&bags, &Dnf::empty()),
        };
        writeln!(out, "oracle_positive_bags: {}", o.positive)?;
        writeln!(out, "oracle_negative_bags: {}", o.negative)?;
        if candidate.is_some() {
            let est = u64::try_from(&acc.covered_positive_estimate).map_or(i128::MAX, i128::from);
            writeln!(out, "oracle_covered_positive: {}", o.covered_positive)?;
            writeln!(out, "oracle_covered_negative: {}", o.covered_negative)?;
            writeln!(out, "delta_covered_positive: {}", est - o.covered_positive as i128)?;
            writeln!(out, "delta_covered_negative: {}", acc.covered_negative as i128 - o.covered_negative as i128)?;
        }
        if let Some(path) = args.dump {
            write(path, &dump_bags(&bags))?;
        }
    } else if args.dump.is_some() {
        return Err(Error::Config("--dump requires --oracle".into()).into());
    }
    Ok(out)
}
