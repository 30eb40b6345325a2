//! Density summaries of restart outcomes.
//!
//! A Gaussian kernel density estimate (Silverman bandwidth) is evaluated on a
//! uniform grid, normalised to unit trapezoid mass, and summarised by its mode
//! and the equal-tailed 95% interval of its cumulative distribution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 512;

/// Grid extends this many bandwidths past the sample range on each side.
const GRID_MARGIN: f64 = 3.0;

pub const CI_LEVEL: f64 = 0.95;

/// Interval convention recorded in reports.
pub const CI_METHOD: &str = "equal-tailed quantiles of the Gaussian KDE (Silverman bandwidth)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionStats {
    pub count: usize,
    pub best: f64,
    pub worst: f64,
    pub ml_estimate: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub bandwidth: f64,
    /// All samples identical; every summary equals that value.
    pub degenerate: bool,
    /// An interval endpoint fell outside the sample range and was pulled back to it.
    pub ci_clamped: bool,
    /// The density mode lies outside the equal-tailed interval (multimodal density).
    pub ml_outside_ci: bool,
}

/// Normalised density on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl Density {
    /// Trapezoid integral over the whole grid.
    pub fn total_mass(&self) -> f64 {
        self.mass_between(self.grid[0], self.grid[self.grid.len() - 1])
    }

    /// Integral of the piecewise-linear density over `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let mut mass = 0.0;
        for i in 0..self.grid.len() - 1 {
            let (x0, x1) = (self.grid[i], self.grid[i + 1]);
            let a = lo.max(x0);
            let b = hi.min(x1);
            if b <= a {
                continue;
            }
            let at = |x: f64| {
                let t = (x - x0) / (x1 - x0);
                self.density[i] + t * (self.density[i + 1] - self.density[i])
            };
            mass += 0.5 * (at(a) + at(b)) * (b - a);
        }
        mass
    }

    /// Local maxima of the density (strictly higher than the left neighbour,
    /// at least as high as the right one).
    pub fn local_maxima(&self) -> Vec<usize> {
        let d = &self.density;
        (1..d.len() - 1)
            .filter(|&i| d[i] > d[i - 1] && d[i] >= d[i + 1])
            .collect()
    }

    fn cumulative(&self) -> Vec<f64> {
        let mut cdf = Vec::with_capacity(self.grid.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.density[i - 1] + self.density[i]) * (self.grid[i] - self.grid[i - 1]);
            cdf.push(acc);
        }
        cdf
    }

    /// Inverts the cumulative distribution of the piecewise-linear density.
    fn quantile(&self, cdf: &[f64], q: f64) -> f64 {
        let last = self.grid.len() - 1;
        let cell = cdf.partition_point(|&c| c < q);
        if cell == 0 {
            return self.grid[0];
        }
        if cell > last {
            return self.grid[last];
        }
        let i = cell - 1;
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let (d0, d1) = (self.density[i], self.density[i + 1]);
        let w = x1 - x0;
        let r = q - cdf[i];
        // solve d0 t + (d1 - d0) t^2 / (2w) = r for t in [0, w]
        let disc = (d0 * d0 + 2.0 * (d1 - d0) * r / w).max(0.0);
        let denom = d0 + disc.sqrt();
        let t = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
        x0 + t.clamp(0.0, w)
    }
}

/// Silverman's rule: `0.9 min(sd, IQR / 1.34) n^(-1/5)`.
pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * n.powf(-0.2)
}

/// Linear-interpolation sample quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn check_samples(samples: &[f64], n_grid: usize) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            need: 2,
            got: samples.len(),
        });
    }
    if n_grid < 3 {
        return Err(Error::InvalidConfig(format!(
            "density grid needs at least 3 points, got {n_grid}"
        )));
    }
    if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidConfig(format!("sample {i} is not finite")));
    }
    Ok(())
}

fn degenerate_value(samples: &[f64]) -> Option<f64> {
    let first = samples[0];
    samples.iter().all(|&x| x == first).then_some(first)
}

/// Kernel density estimate of `samples` on an `n_grid`-point grid.
///
/// Each grid value is the kernel mass of its trapezoid cell divided by the
/// cell width, so no sample is lost when the bandwidth is narrower than the
/// grid spacing. When every sample is non-negative the grid starts no lower
/// than 0 and the kernel mass below 0 is dropped before normalisation.
pub fn export_density(samples: &[f64], n_grid: usize) -> Result<Density> {
    check_samples(samples, n_grid)?;
    if let Some(value) = degenerate_value(samples) {
        return Err(Error::DegenerateSample {
            count: samples.len(),
            value,
        });
    }
    let h = silverman_bandwidth(samples);
    let (min, max) = min_max(samples);
    let non_negative = min >= 0.0;
    let mut lo = min - GRID_MARGIN * h;
    if non_negative {
        lo = lo.max(0.0);
    }
    let hi = max + GRID_MARGIN * h;
    let step = (hi - lo) / (n_grid - 1) as f64;
    let grid: Vec<f64> = (0..n_grid).map(|i| lo + i as f64 * step).collect();

    let last = n_grid - 1;
    let density: Vec<f64> = grid
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let left = if i == 0 { g } else { g - 0.5 * step };
            let right = if i == last { g } else { g + 0.5 * step };
            let mass: f64 = samples
                .iter()
                .map(|&x| normal_mass((left - x) / h, (right - x) / h))
                .sum();
            mass / (samples.len() as f64 * (right - left))
        })
        .collect();

    let mut out = Density {
        grid,
        density,
        bandwidth: h,
    };
    let mass = out.total_mass();
    out.density.iter_mut().for_each(|d| *d /= mass);
    Ok(out)
}

/// Best/worst case, density mode and 95% interval of `samples`.
pub fn infer_stats(samples: &[f64], n_grid: usize) -> Result<DistributionStats> {
    check_samples(samples, n_grid)?;
    if let Some(value) = degenerate_value(samples) {
        return Ok(DistributionStats {
            count: samples.len(),
            best: value,
            worst: value,
            ml_estimate: value,
            ci_lower: value,
            ci_upper: value,
            bandwidth: 0.0,
            degenerate: true,
            ci_clamped: false,
            ml_outside_ci: false,
        });
    }
    let density = export_density(samples, n_grid)?;
    Ok(summarize(samples, &density))
}

/// Summary statistics for a density already estimated from `samples`.
pub fn summarize(samples: &[f64], density: &Density) -> DistributionStats {
    let (best, worst) = min_max(samples);
    let mut mode = 0;
    for (i, &d) in density.density.iter().enumerate() {
        if d > density.density[mode] {
            mode = i;
        }
    }
    let ml_estimate = density.grid[mode];

    let cdf = density.cumulative();
    let tail = 0.5 * (1.0 - CI_LEVEL);
    let raw_lower = density.quantile(&cdf, tail);
    let raw_upper = density.quantile(&cdf, 1.0 - tail);
    let ci_lower = raw_lower.clamp(best, worst);
    let ci_upper = raw_upper.clamp(best, worst);
    let ci_clamped = ci_lower != raw_lower || ci_upper != raw_upper;
    let ml_outside_ci = ml_estimate < ci_lower || ml_estimate > ci_upper;
    if ml_outside_ci {
        log::warn!("density mode {ml_estimate} lies outside the 95% interval [{ci_lower}, {ci_upper}]");
    }

    DistributionStats {
        count: samples.len(),
        best,
        worst,
        ml_estimate,
        ci_lower,
        ci_upper,
        bandwidth: density.bandwidth,
        degenerate: false,
        ci_clamped,
        ml_outside_ci,
    }
}

/// Standard normal probability of `[z0, z1]`, accurate in both tails.
fn normal_mass(z0: f64, z1: f64) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    if z0 >= 0.0 {
        0.5 * (libm::erfc(z0 * r) - libm::erfc(z1 * r))
    } else if z1 <= 0.0 {
        0.5 * (libm::erfc(-z1 * r) - libm::erfc(-z0 * r))
    } else {
        1.0 - 0.5 * (libm::erfc(-z0 * r) + libm::erfc(z1 * r))
    }
}

fn min_max(samples: &[f64]) -> (f64, f64) {
    samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}
