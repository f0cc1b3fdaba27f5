//! Forest-fire percolation on rectangular grids.
//!
//! Cells are indexed row-major (`(r, c) ↦ r * width + c`), row 0 is the
//! northern edge and column 0 the western edge. The eight Moore
//! neighborhoods are numbered
//!
//! ```text
//! V1 V4 V6        NW  N  NE
//! V2  x V7   =    W   x  E
//! V3 V5 V8        SW  S  SE
//! ```
//!
//! Grid file format: a `width height` line followed by `height` rows of
//! `.` (inflammable) and `#` (obstructed).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::closure::{closure_unchecked, Propagation};
use crate::dnf::{Clause, Dnf};
use crate::error::{Error, Result};
use crate::family::{NeighborhoodFamily, Universe};
use crate::set::ElementSet;
use crate::structuring::Structuring;

/// `(row, column)` offsets of `V1..V8`.
pub const MOORE_OFFSETS: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    width: usize,
    height: usize,
    obstacles: ElementSet,
}

impl Grid {
    /// Grid without obstacles.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!("grid dimensions {width}x{height} must be positive")));
        }
        Ok(Grid {
            width,
            height,
            obstacles: ElementSet::empty(width * height),
        })
    }

    pub fn with_obstacles(width: usize, height: usize, obstacles: ElementSet) -> Result<Self> {
        let mut g = Self::new(width, height)?;
        if obstacles.universe() != width * height {
            return Err(Error::InvalidArgument(format!(
                "obstacle set over {} cells, grid has {}",
                obstacles.universe(),
                width * height
            )));
        }
        g.obstacles = obstacles;
        Ok(g)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    pub fn obstacles(&self) -> &ElementSet {
        &self.obstacles
    }

    pub fn cell(&self, row: usize, col: usize) -> usize {
        assert!(row < self.height && col < self.width, "cell ({row}, {col}) outside grid");
        row * self.width + col
    }

    pub fn coords(&self, x: usize) -> (usize, usize) {
        (x / self.width, x % self.width)
    }

    pub fn is_obstructed(&self, x: usize) -> bool {
        self.obstacles.contains(x)
    }

    pub fn inflammable(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.cells()).filter(|&x| !self.obstacles.contains(x))
    }

    /// Adjacent cell of `x` in the direction of `V_i` (1-based), if any.
    pub fn neighbor(&self, x: usize, i: usize) -> Option<usize> {
        let (dr, dc) = MOORE_OFFSETS[i - 1];
        let (r, c) = self.coords(x);
        let r = r.checked_add_signed(dr)?;
        let c = c.checked_add_signed(dc)?;
        (r < self.height && c < self.width).then(|| r * self.width + c)
    }

    /// ASCII map: `o` origin, `*` burnt, `.` inflammable, `#` obstructed.
    pub fn render(&self, burnt: &ElementSet, origin: Option<usize>) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for x in 0..self.cells() {
            out.push(if Some(x) == origin {
                'o'
            } else if burnt.contains(x) {
                '*'
            } else if self.is_obstructed(x) {
                '#'
            } else {
                '.'
            });
            if (x + 1) % self.width == 0 {
                out.push('\n');
            }
        }
        out
    }

    /// Serializes in the grid file format.
    pub fn to_text(&self) -> String {
        format!("{} {}\n{}", self.width, self.height, self.render(&ElementSet::empty(self.cells()), None))
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, 1, "missing `width height` header"))?;
        let dims: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |s: &str| {
            s.parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::parse(hline, 1, format!("bad grid dimension {s:?}")))
        };
        if dims.len() != 2 {
            return Err(Error::parse(hline, 1, "header must be `width height`"));
        }
        let (width, height) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
        let mut obstacles = ElementSet::empty(width * height);
        let mut rows = 0;
        for (lineno, line) in lines {
            if rows == height {
                return Err(Error::parse(lineno, 1, format!("more than {height} rows")));
            }
            let chars: Vec<char> = line.chars().collect();
            if chars.len() != width {
                return Err(Error::parse(lineno, 1, format!("row has {} cells, expected {width}", chars.len())));
            }
            for (c, ch) in chars.into_iter().enumerate() {
                match ch {
                    '.' => {}
                    '#' => {
                        obstacles.insert(rows * width + c);
                    }
                    other => return Err(Error::parse(lineno, c + 1, format!("unexpected cell character {other:?}"))),
                }
            }
            rows += 1;
        }
        if rows != height {
            return Err(Error::parse(hline, 1, format!("expected {height} rows, found {rows}")));
        }
        Grid::with_obstacles(width, height, obstacles)
    }
}

/// The eight directional neighborhoods of a grid. Obstructed cells keep
/// `V_i(x) = {x}` and never appear in another cell's neighborhood.
pub fn moore_family(grid: &Grid) -> NeighborhoodFamily {
    let n = grid.cells();
    let lists = (1..=8)
        .map(|i| {
            (0..n)
                .map(|x| {
                    if grid.is_obstructed(x) {
                        return Vec::new();
                    }
                    grid.neighbor(x, i).filter(|&y| !grid.is_obstructed(y)).into_iter().collect()
                })
                .collect()
        })
        .collect();
    let universe = Universe::indexed(n).expect("grid has at least one cell");
    NeighborhoodFamily::new(universe, lists).expect("moore neighborhoods are valid")
}

/// The three reference propagation models of the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetModel {
    Simple,
    Medium,
    Hard,
}

impl TargetModel {
    pub const ALL: [TargetModel; 3] = [TargetModel::Simple, TargetModel::Medium, TargetModel::Hard];

    pub fn name(self) -> &'static str {
        match self {
            TargetModel::Simple => "simple",
            TargetModel::Medium => "medium",
            TargetModel::Hard => "hard",
        }
    }

    pub fn dnf(self) -> Dnf {
        let clauses: &[&[usize]] = match self {
            TargetModel::Simple => &[&[4], &[6], &[7]],
            TargetModel::Medium => &[&[4, 6], &[5, 8], &[7]],
            TargetModel::Hard => &[&[3], &[5], &[2, 4], &[4, 7], &[6, 7, 8]],
        };
        Dnf::new(clauses.iter().map(|c| Clause::new(c).expect("valid clause")))
    }
}

impl fmt::Display for TargetModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TargetModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "simple" => Ok(TargetModel::Simple),
            "medium" => Ok(TargetModel::Medium),
            "hard" => Ok(TargetModel::Hard),
            other => Err(Error::InvalidArgument(format!(
                "unknown target model {other:?} (expected simple, medium or hard)"
            ))),
        }
    }
}

pub fn target_model(name: &str) -> Result<Dnf> {
    name.parse::<TargetModel>().map(TargetModel::dnf)
}

/// Round-half-up of a non-negative quantity, tolerant to the binary
/// representation of values such as `0.3 * 225`.
pub fn round_half_up(value: f64) -> usize {
    (value + 0.5 + 1e-9).floor() as usize
}

/// Grids of one size with nested obstacle sets of growing density.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleSeries {
    grids: Vec<(f64, Grid)>,
}

impl ObstacleSeries {
    pub fn grids(&self) -> &[(f64, Grid)] {
        &self.grids
    }

    pub fn len(&self) -> usize {
        self.grids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grids.is_empty()
    }
}

/// Obstructs the first `round(p * cells / 100)` cells of one seeded
/// permutation for each percentage `p`, so denser grids contain the
/// obstacles of sparser ones.
pub fn generate_obstacle_series(width: usize, height: usize, percentages: &[f64], seed: u64) -> Result<ObstacleSeries> {
    let base = Grid::new(width, height)?;
    if percentages.is_empty() {
        return Err(Error::Config("at least one obstacle percentage is required".into()));
    }
    for (j, &p) in percentages.iter().enumerate() {
        if !(0.0..=100.0).contains(&p) {
            return Err(Error::Config(format!("obstacle percentage {p} outside [0, 100]")));
        }
        if j > 0 && p <= percentages[j - 1] {
            return Err(Error::Config("obstacle percentages must be strictly increasing".into()));
        }
    }
    let n = base.cells();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let grids = percentages
        .iter()
        .map(|&p| {
            let count = round_half_up(p * n as f64 / 100.0).min(n);
            let obstacles = ElementSet::from_members(n, order[..count].iter().copied());
            (p, Grid::with_obstacles(width, height, obstacles).expect("sized to the grid"))
        })
        .collect();
    Ok(ObstacleSeries { grids })
}

/// Cells burnt by a fire started at `origin`: the closure of `{origin}`.
pub fn simulate_fire<M: Propagation + ?Sized>(grid: &Grid, model: &M, origin: usize) -> Result<ElementSet> {
    if origin >= grid.cells() {
        return Err(Error::InvalidArgument(format!(
            "origin {origin} outside a grid of {} cells",
            grid.cells()
        )));
    }
    let family = moore_family(grid);
    model.check(&family)?;
    Ok(closure_unchecked(&family, model, ElementSet::singleton(grid.cells(), origin)))
}

/// Burnt regions for a uniform sample of `round(fraction * #inflammable)`
/// inflammable cells (at least one).
pub fn build_training_structuring<M: Propagation + ?Sized>(
    grid: &Grid,
    model: &M,
    fraction: f64,
    seed: u64,
) -> Result<Structuring> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!("training fraction {fraction} outside (0, 1]")));
    }
    let mut cells: Vec<usize> = grid.inflammable().collect();
    if cells.is_empty() {
        return Err(Error::EmptyInput("grid has no inflammable cell".into()));
    }
    let count = round_half_up(fraction * cells.len() as f64).clamp(1, cells.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (sample, _) = cells.partial_shuffle(&mut rng, count);
    let mut sample = sample.to_vec();
    sample.sort_unstable();
    let family = moore_family(grid);
    model.check(&family)?;
    let n = grid.cells();
    Structuring::from_entries(
        n,
        sample
            .into_iter()
            .map(|x| (x, closure_unchecked(&family, model, ElementSet::singleton(n, x)))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moore_neighborhood_shapes() {
        let g = Grid::new(3, 3).unwrap();
        let fam = moore_family(&g);
        let center = g.cell(1, 1);
        for i in 1..=8 {
            assert_eq!(fam.neighborhood(i, center).unwrap().len(), 2);
        }
        assert_eq!(fam.neighborhood(4, center).unwrap(), ElementSet::from_members(9, [center, g.cell(0, 1)]));
        assert_eq!(fam.neighborhood(7, center).unwrap(), ElementSet::from_members(9, [center, g.cell(1, 2)]));
        let corner = g.cell(0, 0);
        for i in [1, 2, 3, 4, 6] {
            assert_eq!(fam.neighborhood(i, corner).unwrap(), ElementSet::singleton(9, corner));
        }
        for i in [5, 7, 8] {
            assert_eq!(fam.neighborhood(i, corner).unwrap().len(), 2);
        }
    }

    #[test]
    fn obstructed_cells_are_inert() {
        let mut obstacles = ElementSet::empty(9);
        obstacles.insert(4);
        let g = Grid::with_obstacles(3, 3, obstacles).unwrap();
        let fam = moore_family(&g);
        for i in 1..=8 {
            assert_eq!(fam.neighborhood(i, 4).unwrap(), ElementSet::singleton(9, 4));
        }
    }

    #[test]
    fn target_models() {
        assert_eq!(target_model("simple").unwrap().to_string(), "q4 | q6 | q7");
        assert_eq!(target_model("medium").unwrap().to_string(), "q7 | (q4 & q6) | (q5 & q8)");
        assert_eq!(
            target_model("hard").unwrap(),
            "q3 | q5 | (q2 & q4) | (q4 & q7) | (q6 & q7 & q8)".parse().unwrap()
        );
        assert!(target_model("windy").is_err());
    }

    #[test]
    fn obstacle_counts() {
        let pcts = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0];
        let series = generate_obstacle_series(15, 15, &pcts, 7).unwrap();
        let counts: Vec<usize> = series.grids().iter().map(|(_, g)| g.obstacles().len()).collect();
        assert_eq!(counts, vec![0, 23, 45, 68, 90, 113, 135]);
        for w in series.grids().windows(2) {
            assert!(w[0].1.obstacles().is_subset(w[1].1.obstacles()));
        }
        assert_eq!(series, generate_obstacle_series(15, 15, &pcts, 7).unwrap());
        assert!(generate_obstacle_series(15, 15, &[10.0, 10.0], 7).is_err());
        assert!(generate_obstacle_series(15, 15, &[120.0], 7).is_err());
    }

    #[test]
    fn simple_fire_on_small_grid() {
        let g = Grid::new(3, 3).unwrap();
        let q = TargetModel::Simple.dnf();
        assert_eq!(simulate_fire(&g, &q, g.cell(0, 2)).unwrap(), ElementSet::full(9));
        let sw = g.cell(2, 0);
        assert_eq!(simulate_fire(&g, &q, sw).unwrap(), ElementSet::singleton(9, sw));
        let blocked = Grid::with_obstacles(3, 3, ElementSet::full(9)).unwrap();
        assert_eq!(simulate_fire(&blocked, &q, 4).unwrap(), ElementSet::singleton(9, 4));
        assert!(simulate_fire(&g, &q, 9).is_err());
    }

    #[test]
    fn training_sample_sizes() {
        let g = Grid::new(15, 15).unwrap();
        let q = TargetModel::Simple.dnf();
        let s = build_training_structuring(&g, &q, 0.3, 11).unwrap();
        assert_eq!(s.domain_len(), 68);
        assert_eq!(s, build_training_structuring(&g, &q, 0.3, 11).unwrap());
        let full = build_training_structuring(&Grid::new(4, 3).unwrap(), &q, 1.0, 1).unwrap();
        assert!(full.is_full());
        let blocked = Grid::with_obstacles(2, 2, ElementSet::full(4)).unwrap();
        assert!(matches!(
            build_training_structuring(&blocked, &q, 0.5, 1),
            Err(Error::EmptyInput(_))
        ));
        assert!(build_training_structuring(&g, &q, 0.0, 1).is_err());
    }

    #[test]
    fn grid_text_roundtrip() {
        let g: Grid = "3 2\n.#.\n..#\n".parse().unwrap();
        assert!(g.is_obstructed(1) && g.is_obstructed(5));
        assert_eq!(g.to_text().parse::<Grid>().unwrap(), g);
        assert!(matches!("3 2\n.x.\n...\n".parse::<Grid>(), Err(Error::Parse { line: 2, column: 2, .. })));
        assert!("3 2\n...\n".parse::<Grid>().is_err());
    }
}
