//! Initial-candidate sampling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::bounds::{Param, ParamBounds};
use crate::error::{Error, Result};
use crate::model::JaParams;

/// Rejection attempts before an out-of-bounds Gaussian draw is clamped.
pub const MAX_REJECTIONS: usize = 1000;

/// Reproducible random stream identified by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SeededRng {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Distribution of the initial candidates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitStrategy {
    /// Every free parameter uniform over its limits.
    Uniform,
    /// Every free parameter normal around `center` with standard deviation
    /// `sigma_fraction * center`, truncated to the limits.
    Gaussian { center: JaParams, sigma_fraction: f64 },
}

impl InitStrategy {
    pub fn gaussian(center: JaParams, sigma_fraction: f64) -> Self {
        InitStrategy::Gaussian {
            center,
            sigma_fraction,
        }
    }

    /// Short label used in reports, e.g. `uniform` or `gaussian-5%`.
    pub fn tag(&self) -> String {
        match self {
            InitStrategy::Uniform => "uniform".to_string(),
            InitStrategy::Gaussian { sigma_fraction, .. } => {
                format!("gaussian-{}%", sigma_fraction * 100.0)
            }
        }
    }

    pub fn validate(&self, bounds: &ParamBounds) -> Result<()> {
        bounds.validate()?;
        if let InitStrategy::Gaussian {
            center,
            sigma_fraction,
        } = self
        {
            if !(sigma_fraction.is_finite() && *sigma_fraction > 0.0) {
                return Err(Error::InvalidStrategy(format!(
                    "sigma fraction must be positive, got {sigma_fraction}"
                )));
            }
            if !bounds.contains(center) {
                return Err(Error::InvalidStrategy(format!(
                    "center {center:?} lies outside the parameter limits"
                )));
            }
        }
        Ok(())
    }
}

/// Draws one candidate. Fixed parameters take their bound value.
pub fn sample_params(
    strategy: &InitStrategy,
    bounds: &ParamBounds,
    rng: &mut SeededRng,
) -> Result<JaParams> {
    strategy.validate(bounds)?;
    Ok(draw(strategy, bounds, rng))
}

/// Draws `size` independent candidates from one stream.
pub fn sample_population(
    strategy: &InitStrategy,
    bounds: &ParamBounds,
    rng: &mut SeededRng,
    size: usize,
) -> Result<Vec<JaParams>> {
    strategy.validate(bounds)?;
    if size == 0 {
        return Err(Error::InvalidConfig("population size must be at least 1".into()));
    }
    Ok((0..size).map(|_| draw(strategy, bounds, rng)).collect())
}

fn draw(strategy: &InitStrategy, bounds: &ParamBounds, rng: &mut SeededRng) -> JaParams {
    let mut v = [0.0; 5];
    for p in Param::ALL {
        let r = bounds.range(p);
        v[p.index()] = if r.is_fixed() {
            r.lower
        } else {
            match strategy {
                InitStrategy::Uniform => rng.gen_range(r.lower..=r.upper),
                InitStrategy::Gaussian {
                    center,
                    sigma_fraction,
                } => {
                    let mu = center.to_array()[p.index()];
                    truncated_normal(mu, sigma_fraction * mu.abs(), r.lower, r.upper, rng)
                }
            }
        };
    }
    JaParams::from_array(v)
}

fn truncated_normal(mu: f64, sigma: f64, lower: f64, upper: f64, rng: &mut SeededRng) -> f64 {
    let normal = match Normal::new(mu, sigma) {
        Ok(n) if sigma > 0.0 => n,
        _ => return mu.clamp(lower, upper),
    };
    let mut x = mu;
    for _ in 0..MAX_REJECTIONS {
        x = normal.sample(rng);
        if (lower..=upper).contains(&x) {
            return x;
        }
    }
    if (x - lower).abs() <= (x - upper).abs() {
        lower
    } else {
        upper
    }
}
