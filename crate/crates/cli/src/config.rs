//! Experiment configuration: presets, TOML files and flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nhrmt::asymptotics::edge_formula_width;
use nhrmt::SymmetryClass;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{config_err, CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Charpoly1,
    Charpoly2,
    DosEdge,
    R2Bulk,
    SpacingSurmise,
    Girko,
}

impl Experiment {
    pub const ALL: [Experiment; 6] =
        [Self::Charpoly1, Self::Charpoly2, Self::DosEdge, Self::R2Bulk, Self::SpacingSurmise, Self::Girko];

    pub fn name(self) -> &'static str {
        match self {
            Self::Charpoly1 => "charpoly1",
            Self::Charpoly2 => "charpoly2",
            Self::DosEdge => "dos_edge",
            Self::R2Bulk => "r2_bulk",
            Self::SpacingSurmise => "spacing_surmise",
            Self::Girko => "girko",
        }
    }

    /// Whether the grid lists evaluation points (`true`) or histogram bins.
    pub fn grid_is_points(self) -> bool {
        matches!(self, Self::Charpoly1 | Self::Charpoly2)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scale {
    /// Sizes that finish in minutes on a laptop.
    #[default]
    Desk,
    /// The published figure statistics.
    Paper,
}

impl FromStr for Scale {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            _ => config_err(format!("unknown preset `{s}` (expected desk or paper)")),
        }
    }
}

/// `count` points (or bins) spanning `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        GridSpec { min, max, count }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min >= 0.0) {
            return config_err(format!("grid bounds must be finite and non-negative: {self}"));
        }
        if self.count == 0 {
            return config_err("grid needs at least one point");
        }
        if self.max < self.min || (self.count > 1 && self.max == self.min) {
            return config_err(format!("grid max must exceed min: {self}"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.min + step * k as f64).collect()
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        nhrmt::spectra::uniform_edges(self.min, self.max, self.count)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}

impl FromStr for GridSpec {
    type Err = CliError;

    /// `min:max:count`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Config(format!("grid `{s}` is not min:max:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let min = parts[0].trim().parse().map_err(|_| bad())?;
        let max = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        Ok(GridSpec { min, max, count })
    }
}

mod class_serde {
    use super::*;

    pub fn serialize<S: Serializer>(c: &SymmetryClass, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(c.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<SymmetryClass, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(c: &Option<SymmetryClass>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match c {
                Some(c) => s.serialize_some(c.name()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<SymmetryClass>, D::Error> {
            Option::<String>::deserialize(d)?.map(|s| s.parse().map_err(serde::de::Error::custom)).transpose()
        }
    }
}

/// A fully specified run. `N` is the half-dimension (matrix size `N`, or
/// `2N` for AII†).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(with = "class_serde")]
    pub class: SymmetryClass,
    #[serde(rename = "N")]
    pub n_half: usize,
    pub g: f64,
    pub n_list: Vec<u32>,
    pub n_samples: u64,
    pub seed: u64,
    pub grid: GridSpec,
    pub output_dir: PathBuf,
}

/// Any subset of the config fields: the contents of a config file, or the
/// command-line overrides.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub experiment: Option<Experiment>,
    #[serde(default, with = "class_serde::option")]
    pub class: Option<SymmetryClass>,
    #[serde(rename = "N")]
    pub n_half: Option<usize>,
    pub g: Option<f64>,
    pub n_list: Option<Vec<u32>>,
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
    pub grid: Option<GridSpec>,
    pub output_dir: Option<PathBuf>,
}

impl PartialConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Fields set in `other` win.
    pub fn overlay(self, other: PartialConfig) -> PartialConfig {
        PartialConfig {
            experiment: other.experiment.or(self.experiment),
            class: other.class.or(self.class),
            n_half: other.n_half.or(self.n_half),
            g: other.g.or(self.g),
            n_list: other.n_list.or(self.n_list),
            n_samples: other.n_samples.or(self.n_samples),
            seed: other.seed.or(self.seed),
            grid: other.grid.or(self.grid),
            output_dir: other.output_dir.or(self.output_dir),
        }
    }
}

/// Largest integer a TOML file can hold.
const TOML_INT_MAX: u64 = i64::MAX as u64;

impl ExperimentConfig {
    /// Preset for `experiment`; `scale` selects desk or published statistics.
    pub fn preset(experiment: Experiment, scale: Scale) -> Self {
        use SymmetryClass::*;
        let paper = scale == Scale::Paper;
        let (class, n_half, g, n_list, n_samples) = match experiment {
            Experiment::Charpoly1 => (AIDagger, 5, 2.0, vec![1, 2], 100_000),
            Experiment::Charpoly2 => (AIDagger, 50, 2.0, vec![1], if paper { 5_000_000 } else { 100_000 }),
            Experiment::DosEdge => {
                if paper {
                    (AIDagger, 1000, 2.0, vec![], 20_000)
                } else {
                    (AIDagger, 500, 2.0, vec![], 1000)
                }
            }
            Experiment::R2Bulk => (AIDagger, 1000, 1.0, vec![], if paper { 20_000 } else { 200 }),
            Experiment::SpacingSurmise => (A, 2, 1.0, vec![], if paper { 1_000_000 } else { 100_000 }),
            Experiment::Girko => {
                if paper {
                    (AIIDagger, 1000, 2.0, vec![], 20_000)
                } else {
                    (AIIDagger, 100, 2.0, vec![], 1000)
                }
            }
        };
        let grid = default_grid(experiment, class, n_half, g);
        ExperimentConfig {
            experiment,
            class,
            n_half,
            g,
            n_list,
            n_samples,
            seed: 1,
            grid,
            output_dir: PathBuf::from(format!("out/{}", experiment.name())),
        }
    }

    /// Preset, then `file`, then `flags`. The grid defaults to one derived
    /// from the final class, `N` and `g` unless either layer sets it.
    pub fn resolve(experiment: Experiment, scale: Scale, file: PartialConfig, flags: PartialConfig) -> Result<Self> {
        let layered = file.overlay(flags);
        if let Some(e) = layered.experiment {
            if e != experiment {
                return config_err(format!("config is for `{e}`, but `{experiment}` was requested"));
            }
        }
        let base = Self::preset(experiment, scale);
        let class = layered.class.unwrap_or(base.class);
        let n_half = layered.n_half.unwrap_or(base.n_half);
        let g = layered.g.unwrap_or(base.g);
        let grid = match layered.grid {
            Some(grid) => grid,
            None if g > 0.0 && g.is_finite() && n_half > 0 => default_grid(experiment, class, n_half, g),
            None => base.grid,
        };
        let config = ExperimentConfig {
            experiment,
            class,
            n_half,
            g,
            n_list: layered.n_list.unwrap_or(base.n_list),
            n_samples: layered.n_samples.unwrap_or(base.n_samples),
            seed: layered.seed.unwrap_or(base.seed),
            grid,
            output_dir: layered.output_dir.unwrap_or(base.output_dir),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let e = self.experiment;
        if self.n_half == 0 {
            return config_err("N must be at least 1");
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return config_err(format!("g must be positive, got {}", self.g));
        }
        if self.n_samples < 2 {
            return config_err(format!("{e} needs at least 2 realizations, got {}", self.n_samples));
        }
        if self.n_samples > TOML_INT_MAX || self.seed > TOML_INT_MAX {
            return config_err("n_samples and seed must not exceed 2^63 - 1");
        }
        self.grid.validate()?;
        if !e.grid_is_points() && self.grid.count > 0 && self.grid.max <= self.grid.min {
            return config_err("histogram grid needs max > min");
        }
        match e {
            Experiment::Charpoly1 | Experiment::Charpoly2 => {
                if self.n_list.is_empty() || self.n_list.contains(&0) {
                    return config_err("n_list must list replica indices n >= 1");
                }
            }
            _ if !self.n_list.is_empty() => {
                return config_err(format!("n_list is not used by {e}; leave it empty"));
            }
            _ => {}
        }
        let needs_replica_class = matches!(
            e,
            Experiment::Charpoly1 | Experiment::Charpoly2 | Experiment::DosEdge | Experiment::R2Bulk
        );
        if needs_replica_class && self.class == SymmetryClass::A {
            return config_err(format!("{e} has predictions only for AI† and AII†"));
        }
        if e == Experiment::SpacingSurmise && self.n_half != 2 {
            return config_err("spacing_surmise uses N = 2 (2×2 matrices, 4×4 for AII†)");
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: ExperimentConfig = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }
}

/// Default grid for an experiment:
/// - charpoly1: `|z|` in `[0, 3]`, 20 points;
/// - charpoly2: `|ω|` in `[0.05, 1]`, 20 points;
/// - dos_edge: 20 bins over the outer `u ∈ [0, 5]` (formula units) of the disc;
/// - r2_bulk: 30 bins of `|ω|` in `[0, 6√g]`;
/// - spacing_surmise: 40 bins of `s/⟨s⟩` in `[0, 4]`;
/// - girko: 14 bins of `|z|` in `[0, 0.7 R]`.
pub fn default_grid(experiment: Experiment, class: SymmetryClass, n_half: usize, g: f64) -> GridSpec {
    let radius = class.spectral_radius(n_half, g);
    match experiment {
        Experiment::Charpoly1 => GridSpec::new(0.0, 3.0, 20),
        Experiment::Charpoly2 => GridSpec::new(0.05, 1.0, 20),
        Experiment::DosEdge => {
            let u_scale = (g / edge_formula_width(class)).sqrt();
            GridSpec::new((radius - 5.0 * u_scale).max(0.0), radius, 20)
        }
        Experiment::R2Bulk => GridSpec::new(0.0, 6.0 * g.sqrt(), 30),
        Experiment::SpacingSurmise => GridSpec::new(0.0, 4.0, 40),
        Experiment::Girko => GridSpec::new(0.0, 0.7 * radius, 14),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for e in Experiment::ALL {
            for s in [Scale::Desk, Scale::Paper] {
                ExperimentConfig::preset(e, s).validate().unwrap();
            }
        }
    }

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "0:3:20".parse().unwrap();
        assert_eq!(g, GridSpec::new(0.0, 3.0, 20));
        assert_eq!(g.points().len(), 20);
        assert_eq!(g.points()[19], 3.0);
        assert_eq!(g.bin_edges().len(), 21);
        assert!("0:3".parse::<GridSpec>().is_err());
        assert!("a:3:2".parse::<GridSpec>().is_err());
    }
}
