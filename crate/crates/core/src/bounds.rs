//! Search limits for the five JA parameters.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::JaParams;

/// Index of a JA parameter in the canonical (Ms, a, alpha, c, k) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Ms,
    A,
    Alpha,
    C,
    K,
}

impl Param {
    pub const ALL: [Param; 5] = [Param::Ms, Param::A, Param::Alpha, Param::C, Param::K];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::Ms => "ms",
            Param::A => "a",
            Param::Alpha => "alpha",
            Param::C => "c",
            Param::K => "k",
        }
    }

    /// SI unit, `-` for dimensionless parameters.
    pub fn unit(self) -> &'static str {
        match self {
            Param::Ms | Param::A | Param::K => "A/m",
            Param::Alpha | Param::C => "-",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether a parameter is searched in linear or logarithmic coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

impl Scale {
    pub fn forward(self, x: f64) -> f64 {
        match self {
            Scale::Linear => x,
            Scale::Log => x.ln(),
        }
    }

    pub fn inverse(self, u: f64) -> f64 {
        match self {
            Scale::Linear => u,
            Scale::Log => u.exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lower: f64,
    pub upper: f64,
    #[serde(default)]
    pub scale: Scale,
}

impl ParamRange {
    pub fn new(lower: f64, upper: f64, scale: Scale) -> Self {
        ParamRange {
            lower,
            upper,
            scale,
        }
    }

    pub fn fixed(value: f64) -> Self {
        ParamRange::new(value, value, Scale::Linear)
    }

    pub fn is_fixed(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lower, self.upper)
    }

    /// Centre of the range in its search coordinates (geometric mean for log ranges).
    pub fn midpoint(&self) -> f64 {
        if self.is_fixed() {
            return self.lower;
        }
        match self.scale {
            Scale::Linear => 0.5 * (self.lower + self.upper),
            Scale::Log => (self.lower * self.upper).sqrt(),
        }
    }

    /// Limits in search coordinates.
    pub fn internal(&self) -> (f64, f64) {
        (self.scale.forward(self.lower), self.scale.forward(self.upper))
    }
}

/// Per-parameter search box. A range with `lower == upper` pins that parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub ms: ParamRange,
    pub a: ParamRange,
    pub alpha: ParamRange,
    pub c: ParamRange,
    pub k: ParamRange,
}

impl ParamBounds {
    pub fn from_ranges(ranges: [ParamRange; 5]) -> Result<Self> {
        let b = ParamBounds {
            ms: ranges[0],
            a: ranges[1],
            alpha: ranges[2],
            c: ranges[3],
            k: ranges[4],
        };
        b.validate()?;
        Ok(b)
    }

    /// Limits for the medium-voltage core steel (material A): Ms known and pinned.
    pub fn material_a() -> Self {
        ParamBounds {
            ms: ParamRange::fixed(1.52e6),
            a: ParamRange::new(1.0, 100.0, Scale::Linear),
            alpha: ParamRange::new(1e-6, 1e-5, Scale::Log),
            c: ParamRange::new(0.1, 0.9, Scale::Linear),
            k: ParamRange::new(1.0, 100.0, Scale::Linear),
        }
    }

    /// Limits for the database material (material B).
    pub fn material_b() -> Self {
        ParamBounds {
            ms: ParamRange::new(9.35e5, 11.42e5, Scale::Linear),
            a: ParamRange::new(1.0, 1000.0, Scale::Linear),
            alpha: ParamRange::new(1e-6, 1e-5, Scale::Log),
            c: ParamRange::new(0.1, 0.9, Scale::Linear),
            k: ParamRange::new(1.0, 5000.0, Scale::Linear),
        }
    }

    pub fn ranges(&self) -> [ParamRange; 5] {
        [self.ms, self.a, self.alpha, self.c, self.k]
    }

    pub fn range(&self, p: Param) -> &ParamRange {
        match p {
            Param::Ms => &self.ms,
            Param::A => &self.a,
            Param::Alpha => &self.alpha,
            Param::C => &self.c,
            Param::K => &self.k,
        }
    }

    pub fn range_mut(&mut self, p: Param) -> &mut ParamRange {
        match p {
            Param::Ms => &mut self.ms,
            Param::A => &mut self.a,
            Param::Alpha => &mut self.alpha,
            Param::C => &mut self.c,
            Param::K => &mut self.k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in Param::ALL {
            let r = self.range(p);
            let bad = |reason: String| Error::InvalidBounds {
                param: p.name(),
                reason,
            };
            if !r.lower.is_finite() || !r.upper.is_finite() {
                return Err(bad("limits must be finite".into()));
            }
            if r.lower > r.upper {
                return Err(bad(format!("lower {} exceeds upper {}", r.lower, r.upper)));
            }
            if r.scale == Scale::Log && r.lower <= 0.0 {
                return Err(bad("log-scaled range must be strictly positive".into()));
            }
            let valid = match p {
                Param::Ms | Param::A | Param::K => r.lower > 0.0,
                Param::Alpha => r.lower >= 0.0,
                Param::C => r.lower > 0.0 && r.upper < 1.0,
            };
            if !valid {
                return Err(bad(format!(
                    "[{}, {}] admits invalid model parameters",
                    r.lower, r.upper
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, params: &JaParams) -> bool {
        self.ranges()
            .iter()
            .zip(params.to_array())
            .all(|(r, x)| r.contains(x))
    }

    pub fn clamp(&self, params: &JaParams) -> JaParams {
        let v = params.to_array();
        let r = self.ranges();
        JaParams::from_array(std::array::from_fn(|i| r[i].clamp(v[i])))
    }

    /// Default expert estimate: the centre of each range.
    pub fn midpoint(&self) -> JaParams {
        let r = self.ranges();
        JaParams::from_array(std::array::from_fn(|i| r[i].midpoint()))
    }

    /// Parameters that are searched.
    pub fn free_params(&self) -> impl Iterator<Item = Param> + '_ {
        Param::ALL.into_iter().filter(|p| !self.range(*p).is_fixed())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn material_limits_are_valid() {
        ParamBounds::material_a().validate().unwrap();
        ParamBounds::material_b().validate().unwrap();
        let free: Vec<_> = ParamBounds::material_a().free_params().collect();
        assert_eq!(free, vec![Param::A, Param::Alpha, Param::C, Param::K]);
    }

    #[test]
    fn alpha_midpoint_is_geometric() {
        let m = ParamBounds::material_a().midpoint();
        assert!((m.alpha - 10f64.powf(-5.5)).abs() < 1e-18);
        assert_eq!(m.ms, 1.52e6);
        assert_eq!(m.a, 50.5);
    }

    #[test]
    fn rejects_bad_ranges() {
        let mut b = ParamBounds::material_a();
        b.c = ParamRange::new(0.1, 1.0, Scale::Linear);
        assert!(b.validate().is_err());
        let mut b = ParamBounds::material_a();
        b.a = ParamRange::new(10.0, 1.0, Scale::Linear);
        assert!(b.validate().is_err());
        let mut b = ParamBounds::material_a();
        b.alpha = ParamRange::new(0.0, 1e-5, Scale::Log);
        assert!(b.validate().is_err());
    }
}
