//! Classic DE/rand/1/bin with greedy one-to-one replacement.

use rand::seq::index;
use rand::Rng;

use super::{DeSettings, Population, SearchSpace, Tracker};
use crate::model::JaParams;
use crate::sampling::SeededRng;

pub(super) struct De {
    settings: DeSettings,
    space: SearchSpace,
    members: Vec<[f64; 5]>,
    errors: Vec<f64>,
}

impl De {
    pub(super) fn new<F: FnMut(&JaParams) -> f64>(
        settings: DeSettings,
        start: Vec<[f64; 5]>,
        space: &SearchSpace,
        tracker: &mut Tracker<F>,
    ) -> Self {
        let errors = start.iter().map(|x| tracker.eval(x)).collect();
        De {
            settings,
            space: space.clone(),
            members: start,
            errors,
        }
    }
}

/// Three distinct indices in `0..size`, all different from `target`.
pub(super) fn pick_three(size: usize, target: usize, rng: &mut SeededRng) -> [usize; 3] {
    let picked = index::sample(rng, size - 1, 3);
    let skip = |j: usize| if j >= target { j + 1 } else { j };
    [skip(picked.index(0)), skip(picked.index(1)), skip(picked.index(2))]
}

impl Population for De {
    fn step<F: FnMut(&JaParams) -> f64>(&mut self, tracker: &mut Tracker<F>, rng: &mut SeededRng) {
        let size = self.members.len();
        let free = self.space.free();
        let mut next = self.members.clone();
        let mut next_errors = self.errors.clone();
        for target in 0..size {
            let [r1, r2, r3] = pick_three(size, target, rng);
            let (a, b, c) = (&self.members[r1], &self.members[r2], &self.members[r3]);
            let mut trial = self.members[target];
            if !free.is_empty() {
                let forced = free[rng.gen_range(0..free.len())];
                for &i in free {
                    if i == forced || rng.gen::<f64>() < self.settings.cr {
                        trial[i] = a[i] + self.settings.f * (b[i] - c[i]);
                    }
                }
            }
            self.space.clip(&mut trial);
            let e = tracker.eval(&trial);
            if e <= self.errors[target] {
                next[target] = trial;
                next_errors[target] = e;
            }
        }
        self.members = next;
        self.errors = next_errors;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_are_distinct_and_skip_target_at_minimum_size() {
        let mut rng = SeededRng::new(0, 0);
        for _ in 0..1000 {
            for target in 0..4 {
                let [a, b, c] = pick_three(4, target, &mut rng);
                let mut v = vec![a, b, c, target];
                v.sort();
                v.dedup();
                assert_eq!(v.len(), 4);
                assert!(a < 4 && b < 4 && c < 4);
            }
        }
    }
}
