//! Grid benchmark: repetitions × obstacle densities × learners, written as
//! CSV run records plus a per-setting mean aggregate.

use std::cmp::Ordering;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use pretopo::learners::{learn, LearnerConfig};
use pretopo::percolation::{build_training_structuring, generate_obstacle_series, moore_family, TargetModel};
use pretopo::{Dnf, Error};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

fn default_side() -> usize {
    15
}

fn default_fraction() -> f64 {
    0.3
}

fn default_repetitions() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: String,
    #[serde(default = "default_side")]
    width: usize,
    #[serde(default = "default_side")]
    height: usize,
    obstacles: Vec<f64>,
    #[serde(default = "default_fraction")]
    fraction: f64,
    #[serde(default = "default_repetitions")]
    repetitions: usize,
    #[serde(default)]
    seed: u64,
    output: Option<PathBuf>,
    #[serde(default)]
    learner: Vec<toml::Table>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// `simple`, `medium`, `hard` or a DNF over the eight Moore predicates.
    pub model: String,
    pub width: usize,
    pub height: usize,
    pub obstacles: Vec<f64>,
    pub fraction: f64,
    pub repetitions: usize,
    pub learners: Vec<LearnerConfig>,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses the TOML form. Each `[[learner]]` table holds the keys of
    /// the learner config format.
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let mut learners = Vec::with_capacity(raw.learner.len());
        for table in &raw.learner {
            let text = |v: &toml::Value| match v {
                toml::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let algorithm = table
                .get("algorithm")
                .ok_or_else(|| Error::Config("[[learner]] lacks `algorithm`".into()))?;
            let mut l = LearnerConfig::new(text(algorithm).parse()?);
            for (key, value) in table {
                l.set(key, &text(value))?;
            }
            learners.push(l);
        }
        let config = ExperimentConfig {
            model: raw.model,
            width: raw.width,
            height: raw.height,
            obstacles: raw.obstacles,
            fraction: raw.fraction,
            repetitions: raw.repetitions,
            learners,
            seed: raw.seed,
            output: raw.output,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| -> Result<()> { Err(Error::Config(msg).into()) };
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        if self.learners.is_empty() {
            return fail("at least one [[learner]] is required".into());
        }
        if self.obstacles.is_empty() {
            return fail("obstacles must list at least one percentage".into());
        }
        if let Some(p) = self.obstacles.iter().find(|p| !(0.0..=100.0).contains(*p)) {
            return fail(format!("obstacle percentage {p} outside [0, 100]"));
        }
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return fail(format!("fraction {} outside (0, 1]", self.fraction));
        }
        if self.width == 0 || self.height == 0 {
            return fail("grid sides must be positive".into());
        }
        for l in &self.learners {
            l.validate()?;
        }
        target_dnf(&self.model)?;
        Ok(())
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// A named benchmark model or an explicit DNF.
pub fn target_dnf(model: &str) -> Result<Dnf> {
    if let Ok(m) = model.parse::<TargetModel>() {
        return Ok(m.dnf());
    }
    Ok(model.parse::<Dnf>()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub model: String,
    pub obstacle_pct: f64,
    pub rep: usize,
    pub algorithm: String,
    pub params: String,
    pub f_measure: f64,
    pub intrinsic: Option<f64>,
    pub structuring_calls: usize,
    pub wall_time_s: f64,
    pub learned: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRecord {
    pub model: String,
    pub obstacle_pct: f64,
    pub algorithm: String,
    pub params: String,
    pub runs: usize,
    pub f_measure: f64,
    pub intrinsic: Option<f64>,
    pub structuring_calls: f64,
    pub wall_time_s: f64,
}

/// 64-bit seed from the SHA-256 of the given parts.
pub fn derive_seed(parts: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p.as_bytes());
        hasher.update([0x1f]);
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

fn record_order(a: &RunRecord, b: &RunRecord) -> Ordering {
    a.model
        .cmp(&b.model)
        .then(a.rep.cmp(&b.rep))
        .then(a.obstacle_pct.total_cmp(&b.obstacle_pct))
        .then_with(|| a.algorithm.cmp(&b.algorithm))
        .then_with(|| a.params.cmp(&b.params))
}

/// Runs every (repetition, grid, learner) cell. Records come back sorted
/// by model, repetition, obstacle percentage, algorithm and parameters.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let dnf = target_dnf(&config.model)?;
    let master = config.seed.to_string();
    let mut cells = Vec::new();
    for rep in 0..config.repetitions {
        let grid_seed = derive_seed(&[&master, "grids", &rep.to_string()]);
        let series = generate_obstacle_series(config.width, config.height, &config.obstacles, grid_seed)?;
        for (pct, grid) in series.grids() {
            let pct_tag = pct.to_string();
            let sample_seed = derive_seed(&[&master, "sample", &config.model, &rep.to_string(), &pct_tag]);
            let target = build_training_structuring(grid, &dnf, config.fraction, sample_seed)?;
            let family = moore_family(grid);
            for learner in &config.learners {
                let mut lc = learner.clone();
                lc.rng_seed = derive_seed(&[&master, &config.model, &rep.to_string(), &pct_tag, lc.algorithm.name()]);
                cells.push((rep, *pct, family.clone(), target.clone(), lc));
            }
        }
    }
    let mut records = cells
        .into_par_iter()
        .map(|(rep, pct, family, target, lc)| -> Result<RunRecord> {
            let start = Instant::now();
            let r = learn(&family, &target, &lc)?;
            Ok(RunRecord {
                model: config.model.clone(),
                obstacle_pct: pct,
                rep,
                algorithm: lc.algorithm.name().to_string(),
                params: lc.params_tag(),
                f_measure: r.extrinsic.f_measure,
                intrinsic: r.intrinsic,
                structuring_calls: r.structuring_calls,
                wall_time_s: start.elapsed().as_secs_f64(),
                learned: r.model.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(record_order);
    Ok(records)
}

/// Means per (model, obstacle percentage, algorithm, parameters).
pub fn aggregate(records: &[RunRecord]) -> Vec<MeanRecord> {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.model
            .cmp(&b.model)
            .then(a.obstacle_pct.total_cmp(&b.obstacle_pct))
            .then_with(|| a.algorithm.cmp(&b.algorithm))
            .then_with(|| a.params.cmp(&b.params))
    });
    let mut out = Vec::new();
    for group in sorted.chunk_by(|a, b| {
        a.model == b.model && a.obstacle_pct == b.obstacle_pct && a.algorithm == b.algorithm && a.params == b.params
    }) {
        let n = group.len() as f64;
        let mean = |f: &dyn Fn(&RunRecord) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / n;
        let intrinsic: Vec<f64> = group.iter().filter_map(|r| r.intrinsic).collect();
        out.push(MeanRecord {
            model: group[0].model.clone(),
            obstacle_pct: group[0].obstacle_pct,
            algorithm: group[0].algorithm.clone(),
            params: group[0].params.clone(),
            runs: group.len(),
            f_measure: mean(&|r| r.f_measure),
            intrinsic: (intrinsic.len() == group.len()).then(|| intrinsic.iter().sum::<f64>() / n),
            structuring_calls: mean(&|r| r.structuring_calls as f64),
            wall_time_s: mean(&|r| r.wall_time_s),
        });
    }
    out
}

/// `results.csv` → `results_mean.csv`.
pub fn mean_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "results".into(), |s| s.to_string_lossy().into_owned());
    let ext = path.extension().map_or_else(String::new, |e| format!(".{}", e.to_string_lossy()));
    path.with_file_name(format!("{stem}_mean{ext}"))
}

fn write_rows<T: Serialize>(file: File, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Opens both output files, runs the experiment and writes the CSVs.
/// Output paths are created before any learning starts.
pub fn run_to_files(config: &ExperimentConfig, out: &Path) -> Result<Vec<RunRecord>> {
    let means = mean_path(out);
    let runs_file = File::create(out).with_context(|| format!("cannot create {}", out.display()))?;
    let means_file = File::create(&means).with_context(|| format!("cannot create {}", means.display()))?;
    let records = run_experiment(config)?;
    if records.is_empty() {
        bail!("experiment produced no runs");
    }
    write_rows(runs_file, &records)?;
    write_rows(means_file, &aggregate(&records))?;
    Ok(records)
}

/// Reads run records back from a CSV file.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(r.deserialize().collect::<Result<Vec<RunRecord>, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pretopo::learners::Algorithm;

    #[test]
    fn parses_learner_tables() {
        let c = ExperimentConfig::from_toml(
            "model = \"hard\"\nobstacles = [0, 12.5]\nrepetitions = 3\n\
             [[learner]]\nalgorithm = \"mi\"\nbeam_size = 5\np = 0.5\n\
             [[learner]]\nalgorithm = \"genetic_numeric\"\ninitial_pop = 500\n",
        )
        .unwrap();
        assert_eq!((c.width, c.height, c.fraction, c.seed), (15, 15, 0.3, 0));
        assert_eq!(c.learners[0].algorithm, Algorithm::Mi);
        assert_eq!((c.learners[0].beam_size, c.learners[0].p), (5, 0.5));
        assert_eq!(c.learners[1].initial_pop, 500);
    }

    #[test]
    fn rejects_bad_configs() {
        let err = |text: &str| {
            let e = ExperimentConfig::from_toml(text).unwrap_err();
            e.downcast::<Error>().unwrap()
        };
        assert!(matches!(err("model = \"x y\"\nobstacles = [0]\n[[learner]]\nalgorithm = \"mi\"\n"), Error::Parse { .. }));
        assert!(matches!(err("model = \"simple\"\nobstacles = [120]\n[[learner]]\nalgorithm = \"mi\"\n"), Error::Config(_)));
        assert!(matches!(err("model = \"simple\"\nobstacles = [0]\n[[learner]]\nbeam_size = 2\n"), Error::Config(_)));
        assert!(matches!(err("model = \"simple\"\nobstacles = [0]\ncolour = 1\n"), Error::Parse { line: 3, .. }));
    }

    #[test]
    fn shipped_configs_parse() {
        for text in [
            include_str!("../../../configs/grid_simple.toml"),
            include_str!("../../../configs/grid_medium.toml"),
            include_str!("../../../configs/grid_hard.toml"),
        ] {
            let c = ExperimentConfig::from_toml(text).unwrap();
            assert_eq!(c.obstacles.len() * c.repetitions * c.learners.len(), 560);
        }
    }

    #[test]
    fn seeds_depend_on_every_part() {
        let base = derive_seed(&["1", "simple", "0", "10", "mi"]);
        assert_eq!(base, derive_seed(&["1", "simple", "0", "10", "mi"]));
        assert_ne!(base, derive_seed(&["1", "simple", "0", "10", "greedy"]));
        assert_ne!(derive_seed(&["1", "simple0"]), derive_seed(&["1simple", "0"]));
    }

    #[test]
    fn mean_file_sits_next_to_runs() {
        assert_eq!(mean_path(Path::new("out/runs.csv")), PathBuf::from("out/runs_mean.csv"));
        assert_eq!(mean_path(Path::new("runs")), PathBuf::from("runs_mean"));
    }
}
