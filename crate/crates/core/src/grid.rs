//! Exhaustive grid sweep over the parameter box.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{Param, ParamBounds, ParamRange, Scale};
use crate::error::{Error, Result};
use crate::model::{fitness_error, BhCurve, JaParams};

pub const DEFAULT_POINTS_PER_PARAM: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridAxis {
    pub count: usize,
    pub spacing: Scale,
}

/// Sample counts and spacing for each parameter, in (Ms, a, alpha, c, k) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: [GridAxis; 5],
}

impl GridSpec {
    /// `points` samples per free parameter, spaced like the bounds' search scale.
    pub fn uniform(bounds: &ParamBounds, points: usize) -> Self {
        GridSpec {
            axes: std::array::from_fn(|i| {
                let r = bounds.ranges()[i];
                GridAxis {
                    count: if r.is_fixed() { 1 } else { points },
                    spacing: r.scale,
                }
            }),
        }
    }

    pub fn size(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn validate(&self, bounds: &ParamBounds) -> Result<()> {
        for p in Param::ALL {
            let axis = &self.axes[p.index()];
            let range = bounds.range(p);
            let ok = if range.is_fixed() {
                axis.count == 1
            } else {
                axis.count >= 2
            };
            if !ok {
                return Err(Error::InvalidConfig(format!(
                    "grid axis {p} has {} points; fixed parameters take 1, free ones at least 2",
                    axis.count
                )));
            }
            if axis.spacing == Scale::Log && range.lower <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "grid axis {p} is logarithmic but its range is not positive"
                )));
            }
        }
        self.axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.count))
            .ok_or_else(|| Error::InvalidConfig("grid size overflows".into()))?;
        Ok(())
    }

    /// The `flat`-th grid point in row-major order (`k` varies fastest).
    pub fn point(&self, bounds: &ParamBounds, mut flat: usize) -> JaParams {
        let ranges = bounds.ranges();
        let mut v = [0.0; 5];
        for i in (0..5).rev() {
            let n = self.axes[i].count;
            v[i] = axis_value(&ranges[i], self.axes[i], flat % n);
            flat /= n;
        }
        JaParams::from_array(v)
    }
}

fn axis_value(range: &ParamRange, axis: GridAxis, j: usize) -> f64 {
    if axis.count == 1 || j == 0 {
        return range.lower;
    }
    if j + 1 == axis.count {
        return range.upper;
    }
    let t = j as f64 / (axis.count - 1) as f64;
    match axis.spacing {
        Scale::Linear => range.lower + t * (range.upper - range.lower),
        Scale::Log => {
            let (lo, hi) = (range.lower.ln(), range.upper.ln());
            range.clamp((lo + t * (hi - lo)).exp())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub params: JaParams,
    pub error: f64,
    pub evaluations: usize,
}

/// Minimum of `objective` over the grid. Ties go to the first point in
/// row-major order; the sweep is streamed and split across the rayon pool.
pub fn grid_argmin<F>(bounds: &ParamBounds, grid: &GridSpec, objective: F) -> Result<GridResult>
where
    F: Fn(&JaParams) -> f64 + Sync,
{
    bounds.validate()?;
    grid.validate(bounds)?;
    let total = grid.size();
    let (error, index) = (0..total)
        .into_par_iter()
        .map(|flat| {
            let e = objective(&grid.point(bounds, flat));
            (if e.is_nan() { f64::INFINITY } else { e }, flat)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| match a.0.total_cmp(&b.0) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => {
                    if a.1 <= b.1 {
                        a
                    } else {
                        b
                    }
                }
            },
        );
    Ok(GridResult {
        params: grid.point(bounds, index),
        error,
        evaluations: total,
    })
}

/// Brute-force fit of `data`: the grid point with the lowest fitness error.
pub fn brute_force_search(data: &BhCurve, bounds: &ParamBounds, grid: &GridSpec) -> Result<GridResult> {
    grid_argmin(bounds, grid, |p| fitness_error(data, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn small_grid(bounds: &ParamBounds, n: usize) -> GridSpec {
        GridSpec::uniform(bounds, n)
    }

    #[test]
    fn single_point_grid() {
        let mut b = ParamBounds::material_a();
        b.a = ParamRange::fixed(13.0);
        b.alpha = ParamRange::fixed(5e-6);
        b.c = ParamRange::fixed(0.8);
        b.k = ParamRange::fixed(24.0);
        let g = small_grid(&b, 5);
        assert_eq!(g.size(), 1);
        let r = grid_argmin(&b, &g, |p| p.k).unwrap();
        assert_eq!(r.params, JaParams::new(1.52e6, 13.0, 5e-6, 0.8, 24.0));
        assert_eq!(r.error, 24.0);
        assert_eq!(r.evaluations, 1);
    }

    #[test]
    fn evaluation_count_is_grid_size() {
        let b = ParamBounds::material_a();
        let g = GridSpec {
            axes: [
                GridAxis { count: 1, spacing: Scale::Linear },
                GridAxis { count: 3, spacing: Scale::Linear },
                GridAxis { count: 4, spacing: Scale::Log },
                GridAxis { count: 2, spacing: Scale::Linear },
                GridAxis { count: 5, spacing: Scale::Linear },
            ],
        };
        let calls = AtomicUsize::new(0);
        let r = grid_argmin(&b, &g, |_| {
            calls.fetch_add(1, Ordering::Relaxed);
            1.0
        })
        .unwrap();
        assert_eq!(r.evaluations, 120);
        assert_eq!(calls.load(Ordering::Relaxed), 120);
        // constant objective: first point wins
        assert_eq!(r.params, g.point(&b, 0));
    }

    #[test]
    fn axes_hit_the_limits_and_log_axis_is_geometric() {
        let b = ParamBounds::material_a();
        let g = small_grid(&b, 3);
        let first = g.point(&b, 0);
        let last = g.point(&b, g.size() - 1);
        assert_eq!(first, JaParams::new(1.52e6, 1.0, 1e-6, 0.1, 1.0));
        assert_eq!(last, JaParams::new(1.52e6, 100.0, 1e-5, 0.9, 100.0));
        let mid_alpha = g.point(&b, 9).alpha;
        assert!((mid_alpha - 10f64.powf(-5.5)).abs() < 1e-18);
    }

    #[test]
    fn refined_grid_contains_coarse_points() {
        let b = ParamBounds::material_a();
        let coarse = small_grid(&b, 3);
        let fine = small_grid(&b, 5);
        let objective = |p: &JaParams| (p.a - 37.0).powi(2) + (p.k - 61.0).powi(2) + (p.c - 0.33).powi(2);
        let rc = grid_argmin(&b, &coarse, objective).unwrap();
        let rf = grid_argmin(&b, &fine, objective).unwrap();
        assert!(rf.error <= rc.error);
        // every coarse point is a fine point
        for flat in 0..coarse.size() {
            let p = coarse.point(&b, flat);
            assert!((0..fine.size()).any(|f| fine.point(&b, f) == p));
        }
    }

    #[test]
    fn rejects_invalid_axes() {
        let b = ParamBounds::material_a();
        let mut g = small_grid(&b, 3);
        g.axes[1].count = 1;
        assert!(g.validate(&b).is_err());
        let mut g = small_grid(&b, 3);
        g.axes[0].count = 2;
        assert!(g.validate(&b).is_err());
    }
}
