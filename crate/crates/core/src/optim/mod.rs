//! Population-based minimizers over the JA parameter box.
//!
//! All three algorithms work in search coordinates (log for ranges flagged
//! [`Scale::Log`](crate::Scale::Log), linear otherwise), clip every move to the
//! box and never touch pinned parameters. One iteration is one generation; the
//! best error seen so far is recorded after each.

mod de;
mod ga;
mod pso;
mod space;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::ParamBounds;
use crate::error::{Error, Result};
use crate::model::JaParams;
use crate::sampling::SeededRng;

pub use space::SearchSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ga,
    Pso,
    De,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Ga, Algorithm::Pso, Algorithm::De];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ga => "ga",
            Algorithm::Pso => "pso",
            Algorithm::De => "de",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ga" => Ok(Algorithm::Ga),
            "pso" => Ok(Algorithm::Pso),
            "de" => Ok(Algorithm::De),
            other => Err(Error::InvalidConfig(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaSettings {
    /// Selection pressure: parent weight is `exp(-beta * rank)`.
    pub beta: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Standard deviation of a mutation, as a fraction of the search range.
    pub mutation_step: f64,
}

impl Default for GaSettings {
    fn default() -> Self {
        GaSettings {
            beta: 1.0,
            mutation_rate: 0.1,
            mutation_step: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoSettings {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity limit as a fraction of the search range.
    pub max_velocity: f64,
    /// Initial velocities are uniform in `+-initial_velocity * range`.
    pub initial_velocity: f64,
}

impl Default for PsoSettings {
    fn default() -> Self {
        PsoSettings {
            inertia: 0.72,
            cognitive: 1.49,
            social: 1.49,
            max_velocity: 0.2,
            initial_velocity: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeSettings {
    /// Differential weight.
    pub f: f64,
    /// Crossover rate.
    pub cr: f64,
}

impl Default for DeSettings {
    fn default() -> Self {
        DeSettings { f: 0.7, cr: 0.9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub population_size: usize,
    #[serde(default)]
    pub ga: GaSettings,
    #[serde(default)]
    pub pso: PsoSettings,
    #[serde(default)]
    pub de: DeSettings,
}

impl OptimizerConfig {
    /// Default settings: GA with 40 individuals, PSO and DE with 30.
    pub fn new(algorithm: Algorithm) -> Self {
        let population_size = match algorithm {
            Algorithm::Ga => 40,
            Algorithm::Pso | Algorithm::De => 30,
        };
        OptimizerConfig {
            algorithm,
            population_size,
            ga: GaSettings::default(),
            pso: PsoSettings::default(),
            de: DeSettings::default(),
        }
    }

    pub fn with_population(mut self, size: usize) -> Self {
        self.population_size = size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.population_size < 4 {
            return bad(format!(
                "population size must be at least 4, got {}",
                self.population_size
            ));
        }
        let unit = |name: &str, x: f64| -> Result<()> {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {x}")))
            }
        };
        match self.algorithm {
            Algorithm::Ga => {
                unit("mutation rate", self.ga.mutation_rate)?;
                if !(self.ga.beta.is_finite() && self.ga.beta >= 0.0) {
                    return bad(format!("beta must be non-negative, got {}", self.ga.beta));
                }
                if !(self.ga.mutation_step.is_finite() && self.ga.mutation_step >= 0.0) {
                    return bad(format!("mutation step must be non-negative, got {}", self.ga.mutation_step));
                }
            }
            Algorithm::Pso => {
                let p = &self.pso;
                for (name, x) in [
                    ("inertia", p.inertia),
                    ("cognitive coefficient", p.cognitive),
                    ("social coefficient", p.social),
                    ("initial velocity", p.initial_velocity),
                ] {
                    if !(x.is_finite() && x >= 0.0) {
                        return bad(format!("{name} must be non-negative, got {x}"));
                    }
                }
                if !(p.max_velocity.is_finite() && p.max_velocity > 0.0) {
                    return bad(format!("max velocity must be positive, got {}", p.max_velocity));
                }
            }
            Algorithm::De => {
                unit("crossover rate", self.de.cr)?;
                if !(self.de.f > 0.0 && self.de.f <= 2.0) {
                    return bad(format!("differential weight must lie in (0, 2], got {}", self.de.f));
                }
            }
        }
        Ok(())
    }
}

/// Termination rule shared by all algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopCriteria {
    pub it_max: usize,
    /// Iterations without improvement before halting.
    pub window: usize,
    /// Improvements smaller than this (in % error) do not count.
    pub tol_abs: f64,
}

impl Default for StopCriteria {
    fn default() -> Self {
        StopCriteria {
            it_max: 10_000,
            window: 100,
            tol_abs: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    Continue,
    Halt,
}

impl StopCriteria {
    /// Decides whether to stop after iteration `it`.
    ///
    /// `history[0]` is the best error of the initial population and
    /// `history[j]` the best error after iteration `j`.
    pub fn check(&self, history: &[f64], it: usize) -> StopDecision {
        if it >= self.it_max {
            return StopDecision::Halt;
        }
        if it > self.window && it < history.len() {
            let improved = history[it] < history[it - self.window] - self.tol_abs;
            if !improved {
                return StopDecision::Halt;
            }
        }
        StopDecision::Continue
    }
}

/// [`StopCriteria::check`] with the default limits.
pub fn stop_criteria_check(history: &[f64], it: usize) -> StopDecision {
    StopCriteria::default().check(history, it)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    /// Best error before the first iteration, then after each iteration.
    pub best_errors: Vec<f64>,
    pub best: JaParams,
    pub best_error: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Best-so-far bookkeeping around the objective.
struct Tracker<F> {
    objective: F,
    best: [f64; 5],
    best_error: f64,
    evaluations: usize,
    space: SearchSpace,
}

impl<F: FnMut(&JaParams) -> f64> Tracker<F> {
    fn new(objective: F, space: SearchSpace) -> Self {
        Tracker {
            objective,
            best: [0.0; 5],
            best_error: f64::INFINITY,
            evaluations: 0,
            space,
        }
    }

    fn eval(&mut self, x: &[f64; 5]) -> f64 {
        let e = (self.objective)(&self.space.decode(x));
        // NaN never becomes the best
        let e = if e.is_nan() { f64::INFINITY } else { e };
        self.evaluations += 1;
        if e < self.best_error {
            self.best_error = e;
            self.best = *x;
        }
        e
    }
}

/// One generation of an algorithm's state.
trait Population {
    fn step<F: FnMut(&JaParams) -> f64>(&mut self, tracker: &mut Tracker<F>, rng: &mut SeededRng);
}

/// Minimizes `objective` from `initial_population` until `stop` halts.
pub fn run_optimizer<F>(
    config: &OptimizerConfig,
    initial_population: &[JaParams],
    bounds: &ParamBounds,
    objective: F,
    stop: &StopCriteria,
    rng: &mut SeededRng,
) -> Result<IterationTrace>
where
    F: FnMut(&JaParams) -> f64,
{
    config.validate()?;
    bounds.validate()?;
    if initial_population.len() != config.population_size {
        return Err(Error::InvalidConfig(format!(
            "initial population has {} members, configuration expects {}",
            initial_population.len(),
            config.population_size
        )));
    }
    if let Some(p) = initial_population.iter().find(|p| !bounds.contains(p)) {
        return Err(Error::InvalidConfig(format!(
            "initial candidate {p:?} lies outside the parameter limits"
        )));
    }
    let space = SearchSpace::new(bounds);
    let start: Vec<[f64; 5]> = initial_population.iter().map(|p| space.encode(p)).collect();
    let mut tracker = Tracker::new(objective, space.clone());

    match config.algorithm {
        Algorithm::Ga => {
            let pop = ga::Ga::new(config.ga, start, &space, &mut tracker);
            iterate(pop, tracker, stop, rng)
        }
        Algorithm::Pso => {
            let pop = pso::Swarm::new(config.pso, start, &space, &mut tracker, rng);
            iterate(pop, tracker, stop, rng)
        }
        Algorithm::De => {
            let pop = de::De::new(config.de, start, &space, &mut tracker);
            iterate(pop, tracker, stop, rng)
        }
    }
}

fn iterate<P, F>(
    mut pop: P,
    mut tracker: Tracker<F>,
    stop: &StopCriteria,
    rng: &mut SeededRng,
) -> Result<IterationTrace>
where
    P: Population,
    F: FnMut(&JaParams) -> f64,
{
    let mut history = vec![tracker.best_error];
    let mut it = 0;
    while it < stop.it_max {
        pop.step(&mut tracker, rng);
        it += 1;
        history.push(tracker.best_error);
        if stop.check(&history, it) == StopDecision::Halt {
            break;
        }
    }
    Ok(IterationTrace {
        best: tracker.space.decode(&tracker.best),
        best_error: tracker.best_error,
        best_errors: history,
        iterations: it,
        evaluations: tracker.evaluations,
    })
}

/// Standard normal draw.
fn gauss(rng: &mut SeededRng) -> f64 {
    rng.sample(rand_distr::StandardNormal)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_rule_examples() {
        let decreasing: Vec<f64> = (0..=50).map(|i| 100.0 - i as f64).collect();
        assert_eq!(stop_criteria_check(&decreasing, 50), StopDecision::Continue);

        let constant = vec![3.0; 150];
        let first_halt = (1..150)
            .find(|&it| stop_criteria_check(&constant[..=it], it) == StopDecision::Halt);
        assert_eq!(first_halt, Some(101));

        let long: Vec<f64> = (0..=10_000).map(|i| -(i as f64)).collect();
        assert_eq!(stop_criteria_check(&long, 10_000), StopDecision::Halt);
        assert_eq!(stop_criteria_check(&long, 9_999), StopDecision::Continue);
    }

    #[test]
    fn stop_rule_ignores_sub_tolerance_progress() {
        let creeping: Vec<f64> = (0..=101).map(|i| 1.0 - i as f64 * 1e-13).collect();
        assert_eq!(stop_criteria_check(&creeping, 101), StopDecision::Halt);
    }

    #[test]
    fn config_validation() {
        for alg in Algorithm::ALL {
            OptimizerConfig::new(alg).validate().unwrap();
        }
        assert!(OptimizerConfig::new(Algorithm::De).with_population(3).validate().is_err());
        let mut c = OptimizerConfig::new(Algorithm::De);
        c.de.f = 2.5;
        assert!(c.validate().is_err());
        let mut c = OptimizerConfig::new(Algorithm::Ga);
        c.ga.mutation_rate = 1.5;
        assert!(c.validate().is_err());
        assert_eq!("PSO".parse::<Algorithm>().unwrap(), Algorithm::Pso);
    }
}
