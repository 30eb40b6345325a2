use crate::bounds::{ParamBounds, ParamRange};
use crate::model::JaParams;

/// Box in search coordinates.
#[derive(Debug, Clone)]
pub struct SearchSpace {
    ranges: [ParamRange; 5],
    lower: [f64; 5],
    upper: [f64; 5],
    free: Vec<usize>,
}

impl SearchSpace {
    pub fn new(bounds: &ParamBounds) -> Self {
        let ranges = bounds.ranges();
        let mut lower = [0.0; 5];
        let mut upper = [0.0; 5];
        for (i, r) in ranges.iter().enumerate() {
            (lower[i], upper[i]) = r.internal();
        }
        let free = (0..5).filter(|&i| !ranges[i].is_fixed()).collect();
        SearchSpace {
            ranges,
            lower,
            upper,
            free,
        }
    }

    /// Indices of the searched dimensions.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn lower(&self, i: usize) -> f64 {
        self.lower[i]
    }

    pub fn upper(&self, i: usize) -> f64 {
        self.upper[i]
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn clip(&self, x: &mut [f64; 5]) {
        for i in 0..5 {
            x[i] = x[i].clamp(self.lower[i], self.upper[i]);
        }
    }

    pub fn encode(&self, p: &JaParams) -> [f64; 5] {
        let v = p.to_array();
        std::array::from_fn(|i| self.ranges[i].scale.forward(v[i]))
    }

    /// Maps back to parameters; the result is clamped in parameter space so
    /// that round-off in `exp` cannot leave the box, and pinned values are exact.
    pub fn decode(&self, x: &[f64; 5]) -> JaParams {
        JaParams::from_array(std::array::from_fn(|i| {
            let r = &self.ranges[i];
            if r.is_fixed() {
                r.lower
            } else {
                r.clamp(r.scale.inverse(x[i]))
            }
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_stays_in_bounds() {
        let b = ParamBounds::material_a();
        let s = SearchSpace::new(&b);
        assert_eq!(s.free(), &[1, 2, 3, 4]);
        let edge = JaParams::new(1.52e6, 100.0, 1e-5, 0.9, 1.0);
        let back = s.decode(&s.encode(&edge));
        assert!(b.contains(&back));
        assert!((back.alpha - 1e-5).abs() < 1e-18);
        let mut x = [0.0, 1e9, -1e9, 0.5, 50.0];
        s.clip(&mut x);
        assert!(b.contains(&s.decode(&x)));
    }
}
