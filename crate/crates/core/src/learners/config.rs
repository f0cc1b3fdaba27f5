//! Learner configuration and its flat `key = value` text format.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::family::strip_comment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    GeneticNumeric,
    GeneticLogical,
    Greedy,
    Mi,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::GeneticNumeric,
        Algorithm::GeneticLogical,
        Algorithm::Greedy,
        Algorithm::Mi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::GeneticNumeric => "genetic_numeric",
            Algorithm::GeneticLogical => "genetic_logical",
            Algorithm::Greedy => "greedy",
            Algorithm::Mi => "mi",
        }
    }

    pub fn is_genetic(self) -> bool {
        matches!(self, Algorithm::GeneticNumeric | Algorithm::GeneticLogical)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown algorithm {:?} (expected genetic_numeric, genetic_logical, greedy or mi)",
                    s.trim()
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub algorithm: Algorithm,
    pub max_iter: usize,
    pub beam_size: usize,
    pub initial_pop: usize,
    pub required_iter_convergence: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub p: f64,
    pub rng_seed: u64,
}

impl LearnerConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        LearnerConfig {
            algorithm,
            max_iter: 50,
            beam_size: 1,
            initial_pop: 100,
            required_iter_convergence: 10,
            mutation_rate: 0.1,
            crossover_rate: 0.8,
            p: 1.0,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.beam_size == 0 {
            return fail("beam_size must be at least 1".into());
        }
        if self.algorithm.is_genetic() {
            if self.initial_pop < 2 {
                return fail(format!("initial_pop = {} must be at least 2", self.initial_pop));
            }
            if self.max_iter == 0 {
                return fail("max_iter must be at least 1 for genetic learners".into());
            }
            if self.required_iter_convergence == 0 {
                return fail("required_iter_convergence must be at least 1".into());
            }
        }
        for (name, v) in [("mutation_rate", self.mutation_rate), ("crossover_rate", self.crossover_rate)] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} = {v} outside [0, 1]"));
            }
        }
        if !(self.p >= 0.0 && self.p.is_finite()) {
            return fail(format!("p = {} must be a finite non-negative number", self.p));
        }
        Ok(())
    }

    /// Short tag of the settings that distinguish runs of one algorithm.
    pub fn params_tag(&self) -> String {
        match self.algorithm {
            Algorithm::GeneticNumeric | Algorithm::GeneticLogical => format!("pop={}", self.initial_pop),
            Algorithm::Greedy => format!("beam={}", self.beam_size),
            Algorithm::Mi => format!("beam={};p={}", self.beam_size, self.p),
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
        }
        match key {
            "algorithm" => self.algorithm = value.parse()?,
            "max_iter" => self.max_iter = num(key, value)?,
            "beam_size" => self.beam_size = num(key, value)?,
            "initial_pop" => self.initial_pop = num(key, value)?,
            "required_iter_convergence" => self.required_iter_convergence = num(key, value)?,
            "mutation_rate" => self.mutation_rate = num(key, value)?,
            "crossover_rate" => self.crossover_rate = num(key, value)?,
            "p" => self.p = num(key, value)?,
            "rng_seed" => self.rng_seed = num(key, value)?,
            other => return Err(Error::Config(format!("unknown learner setting {other:?}"))),
        }
        Ok(())
    }

    /// Parses the flat format. `algorithm` is required; other keys default.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, 1, "expected `key = value`"))?;
            pairs.push((k.trim(), v.trim()));
        }
        let algorithm = pairs
            .iter()
            .find(|(k, _)| *k == "algorithm")
            .ok_or_else(|| Error::Config("learner config lacks `algorithm`".into()))?
            .1
            .parse()?;
        let mut config = LearnerConfig::new(algorithm);
        for (k, v) in pairs {
            config.set(k, v)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn to_text(&self) -> String {
        format!(
            "algorithm = {}\nmax_iter = {}\nbeam_size = {}\ninitial_pop = {}\nrequired_iter_convergence = {}\n\
             mutation_rate = {}\ncrossover_rate = {}\np = {}\nrng_seed = {}\n",
            self.algorithm,
            self.max_iter,
            self.beam_size,
            self.initial_pop,
            self.required_iter_convergence,
            self.mutation_rate,
            self.crossover_rate,
            self.p,
            self.rng_seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_with_defaults() {
        let c = LearnerConfig::parse("# mi run\nalgorithm = mi\nbeam_size = 5\n").unwrap();
        assert_eq!(c.algorithm, Algorithm::Mi);
        assert_eq!(c.beam_size, 5);
        assert_eq!(c.p, 1.0);
        assert_eq!(LearnerConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(matches!(LearnerConfig::parse("beam_size = 2"), Err(Error::Config(_))));
        assert!(matches!(LearnerConfig::parse("algorithm = annealing"), Err(Error::Config(_))));
        assert!(LearnerConfig::parse("algorithm = greedy\nbeam_size = 0").is_err());
        assert!(LearnerConfig::parse("algorithm = genetic_logical\ninitial_pop = 1").is_err());
        assert!(LearnerConfig::parse("algorithm = greedy\nwidth = 3").is_err());
        assert!(LearnerConfig::parse("algorithm = greedy\nmutation_rate = 2").is_err());
    }
}
