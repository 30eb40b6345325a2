//! Experiment configuration files (TOML).
//!
//! ```toml
//! material = "A"
//! data = "curve.csv"
//! output = "results"
//! restarts = 50
//! seed = 42
//!
//! [bounds.ms]
//! lower = 1.52e6
//! upper = 1.52e6
//! unit = "A/m"
//! fixed = true
//! scale = "linear"
//! # ... one table per parameter: ms, a, alpha, c, k
//!
//! [optimizer]
//! algorithm = "de"
//!
//! [init]
//! kind = "gaussian"
//! sigma_fraction = 0.05
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{Param, ParamBounds, ParamRange, Scale};
use crate::error::{Error, Result};
use crate::grid::{GridSpec, DEFAULT_POINTS_PER_PARAM};
use crate::harness::ExperimentSpec;
use crate::model::{BhCurve, JaParams};
use crate::optim::{Algorithm, DeSettings, GaSettings, OptimizerConfig, PsoSettings, StopCriteria};
use crate::sampling::InitStrategy;
use crate::stats::DEFAULT_GRID_POINTS;

/// Largest seed a configuration file can store (TOML integers are signed 64-bit).
pub const MAX_SEED: u64 = i64::MAX as u64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsRow {
    pub lower: f64,
    pub upper: f64,
    pub unit: String,
    #[serde(default)]
    pub fixed: bool,
    #[serde(default)]
    pub scale: Scale,
}

impl BoundsRow {
    pub fn from_range(param: Param, range: &ParamRange) -> Self {
        BoundsRow {
            lower: range.lower,
            upper: range.upper,
            unit: param.unit().to_string(),
            fixed: range.is_fixed(),
            scale: range.scale,
        }
    }

    fn to_range(&self, param: Param) -> Result<ParamRange> {
        let bad = |reason: String| Error::InvalidBounds {
            param: param.name(),
            reason,
        };
        if self.unit != param.unit() {
            return Err(bad(format!("unit must be `{}`, got `{}`", param.unit(), self.unit)));
        }
        if self.fixed != (self.lower == self.upper) {
            return Err(bad(format!(
                "fixed = {} but limits are [{}, {}]; a fixed parameter has lower == upper",
                self.fixed, self.lower, self.upper
            )));
        }
        Ok(ParamRange::new(self.lower, self.upper, self.scale))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsTable {
    pub ms: BoundsRow,
    pub a: BoundsRow,
    pub alpha: BoundsRow,
    pub c: BoundsRow,
    pub k: BoundsRow,
}

impl BoundsTable {
    pub fn from_bounds(bounds: &ParamBounds) -> Self {
        let row = |p: Param| BoundsRow::from_range(p, bounds.range(p));
        BoundsTable {
            ms: row(Param::Ms),
            a: row(Param::A),
            alpha: row(Param::Alpha),
            c: row(Param::C),
            k: row(Param::K),
        }
    }

    pub fn to_bounds(&self) -> Result<ParamBounds> {
        ParamBounds::from_ranges([
            self.ms.to_range(Param::Ms)?,
            self.a.to_range(Param::A)?,
            self.alpha.to_range(Param::Alpha)?,
            self.c.to_range(Param::C)?,
            self.k.to_range(Param::K)?,
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    pub algorithm: Algorithm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pso: Option<PsoSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub de: Option<DeSettings>,
}

impl OptimizerSection {
    pub fn to_config(&self) -> Result<OptimizerConfig> {
        let mut c = OptimizerConfig::new(self.algorithm);
        if let Some(n) = self.population_size {
            c.population_size = n;
        }
        if let Some(s) = self.ga {
            c.ga = s;
        }
        if let Some(s) = self.pso {
            c.pso = s;
        }
        if let Some(s) = self.de {
            c.de = s;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Uniform,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitSection {
    pub kind: InitKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_fraction: Option<f64>,
    /// Expert estimate; defaults to the centre of the limits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<JaParams>,
}

impl InitSection {
    pub fn to_strategy(&self, bounds: &ParamBounds) -> Result<InitStrategy> {
        let strategy = match self.kind {
            InitKind::Uniform => InitStrategy::Uniform,
            InitKind::Gaussian => {
                let sigma_fraction = self.sigma_fraction.ok_or_else(|| {
                    Error::InvalidStrategy("gaussian initialization needs sigma_fraction".into())
                })?;
                InitStrategy::Gaussian {
                    center: self.center.unwrap_or_else(|| bounds.midpoint()),
                    sigma_fraction,
                }
            }
        };
        strategy.validate(bounds)?;
        Ok(strategy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub material: String,
    /// B-H curve; relative paths are resolved against the config file's directory.
    pub data: PathBuf,
    /// Report directory; relative paths are resolved like `data`.
    pub output: PathBuf,
    pub restarts: usize,
    pub seed: u64,
    #[serde(default = "default_density_points")]
    pub density_points: usize,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default)]
    pub stop: StopCriteria,
    pub bounds: BoundsTable,
    pub optimizer: OptimizerSection,
    pub init: InitSection,
}

fn default_density_points() -> usize {
    DEFAULT_GRID_POINTS
}

fn default_grid_points() -> usize {
    DEFAULT_POINTS_PER_PARAM
}

impl ExperimentConfig {
    /// A material-A configuration with uniform initialization.
    pub fn template(algorithm: Algorithm) -> Self {
        ExperimentConfig {
            material: "A".into(),
            data: "curve.csv".into(),
            output: "results".into(),
            restarts: 50,
            seed: 42,
            density_points: DEFAULT_GRID_POINTS,
            grid_points: DEFAULT_POINTS_PER_PARAM,
            stop: StopCriteria::default(),
            bounds: BoundsTable::from_bounds(&ParamBounds::material_a()),
            optimizer: OptimizerSection {
                algorithm,
                population_size: None,
                ga: None,
                pso: None,
                de: None,
            },
            init: InitSection {
                kind: InitKind::Uniform,
                sigma_fraction: None,
                center: None,
            },
        }
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format {
            path: origin.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Fails only for seeds above [`MAX_SEED`], which TOML integers cannot hold.
    pub fn to_toml(&self) -> Result<String> {
        if self.seed > MAX_SEED {
            return Err(Error::InvalidConfig(format!(
                "seed {} exceeds the largest storable seed {MAX_SEED}",
                self.seed
            )));
        }
        toml::to_string_pretty(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn bounds(&self) -> Result<ParamBounds> {
        self.bounds.to_bounds()
    }

    pub fn strategy(&self) -> Result<InitStrategy> {
        self.init.to_strategy(&self.bounds()?)
    }

    pub fn optimizer_config(&self) -> Result<OptimizerConfig> {
        self.optimizer.to_config()
    }

    pub fn grid(&self) -> Result<GridSpec> {
        if self.grid_points < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid_points must be at least 2, got {}",
                self.grid_points
            )));
        }
        Ok(GridSpec::uniform(&self.bounds()?, self.grid_points))
    }

    /// `path` interpreted relative to `base` unless absolute.
    pub fn resolve(base: &Path, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            base.join(path)
        }
    }

    pub fn to_spec(&self, data: BhCurve) -> Result<ExperimentSpec> {
        let spec = ExperimentSpec {
            data,
            bounds: self.bounds()?,
            optimizer: self.optimizer_config()?,
            init: self.strategy()?,
            restarts: self.restarts,
            seed: self.seed,
            stop: self.stop,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn template_round_trips() {
        let c = ExperimentConfig::template(Algorithm::Pso);
        let back = ExperimentConfig::parse(&c.to_toml().unwrap(), Path::new("t.toml")).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.bounds().unwrap(), ParamBounds::material_a());
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let text = r#"
material = "A"
data = "curve.csv"
output = "out"
restarts = 10
seed = 1

[bounds.ms]
lower = 1.52e6
upper = 1.52e6
unit = "A/m"
fixed = true
[bounds.a]
lower = 1.0
upper = 100.0
unit = "A/m"
[bounds.alpha]
lower = 1e-6
upper = 1e-5
unit = "-"
scale = "log"
[bounds.c]
lower = 0.1
upper = 0.9
unit = "-"
[bounds.k]
lower = 1.0
upper = 100.0
unit = "A/m"

[optimizer]
algorithm = "ga"
ga = { beta = 2.0 }

[init]
kind = "gaussian"
sigma_fraction = 0.1
"#;
        let c = ExperimentConfig::parse(text, Path::new("c.toml")).unwrap();
        assert_eq!(c.bounds().unwrap(), ParamBounds::material_a());
        let opt = c.optimizer_config().unwrap();
        assert_eq!(opt.population_size, 40);
        assert_eq!(opt.ga.beta, 2.0);
        assert_eq!(opt.ga.mutation_rate, 0.1);
        match c.strategy().unwrap() {
            InitStrategy::Gaussian { center, sigma_fraction } => {
                assert_eq!(center, ParamBounds::material_a().midpoint());
                assert_eq!(sigma_fraction, 0.1);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(c.stop, StopCriteria::default());
        assert_eq!(c.density_points, 512);
    }

    #[test]
    fn rejects_inconsistent_rows() {
        let mut c = ExperimentConfig::template(Algorithm::De);
        c.bounds.a.fixed = true;
        assert!(c.bounds().is_err());
        let mut c = ExperimentConfig::template(Algorithm::De);
        c.bounds.k.unit = "T".into();
        assert!(c.bounds().is_err());
        let mut c = ExperimentConfig::template(Algorithm::De);
        c.init.kind = InitKind::Gaussian;
        assert!(c.strategy().is_err());
        assert!(ExperimentConfig::parse("material = 3", Path::new("x.toml")).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn config_round_trip(
            restarts in 1usize..100_000,
            seed in 0..=MAX_SEED,
            a_hi in 2.0f64..1e4,
            sigma in proptest::option::of(1e-4f64..1.0),
            pop in proptest::option::of(4usize..500),
            f in 0.01f64..2.0,
            alg in 0usize..3,
        ) {
            let mut c = ExperimentConfig::template(Algorithm::ALL[alg]);
            c.restarts = restarts;
            c.seed = seed;
            c.bounds.a.upper = a_hi;
            c.init.sigma_fraction = sigma;
            c.init.kind = if sigma.is_some() { InitKind::Gaussian } else { InitKind::Uniform };
            c.init.center = sigma.map(|_| JaParams::new(1.52e6, 1.5, 2e-6, 0.5, 3.0));
            c.optimizer.population_size = pop;
            c.optimizer.de = Some(DeSettings { f, cr: 0.5 });
            let back = ExperimentConfig::parse(&c.to_toml().unwrap(), Path::new("p.toml")).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
