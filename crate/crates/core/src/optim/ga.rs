//! Real-coded genetic algorithm: rank-exponential roulette selection,
//! arithmetic blend crossover, Gaussian mutation and (mu + lambda) survival.

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::Rng;

use super::{gauss, GaSettings, Population, SearchSpace, Tracker};
use crate::model::JaParams;
use crate::sampling::SeededRng;

pub(super) struct Ga {
    settings: GaSettings,
    space: SearchSpace,
    /// Sorted by error, best first.
    members: Vec<([f64; 5], f64)>,
    selection: WeightedIndex<f64>,
}

impl Ga {
    pub(super) fn new<F: FnMut(&JaParams) -> f64>(
        settings: GaSettings,
        start: Vec<[f64; 5]>,
        space: &SearchSpace,
        tracker: &mut Tracker<F>,
    ) -> Self {
        let mut members: Vec<_> = start.into_iter().map(|x| (x, tracker.eval(&x))).collect();
        sort(&mut members);
        let weights = (0..members.len()).map(|rank| (-settings.beta * rank as f64).exp());
        let selection = WeightedIndex::new(weights).expect("population is non-empty");
        Ga {
            settings,
            space: space.clone(),
            members,
            selection,
        }
    }

    fn mutate(&self, x: &mut [f64; 5], rng: &mut SeededRng) {
        for &i in self.space.free() {
            if rng.gen::<f64>() < self.settings.mutation_rate {
                x[i] += self.settings.mutation_step * self.space.width(i) * gauss(rng);
            }
        }
        self.space.clip(x);
    }
}

impl Population for Ga {
    fn step<F: FnMut(&JaParams) -> f64>(&mut self, tracker: &mut Tracker<F>, rng: &mut SeededRng) {
        let size = self.members.len();
        let mut children = Vec::with_capacity(size + 1);
        while children.len() < size {
            let a = self.members[self.selection.sample(rng)].0;
            let b = self.members[self.selection.sample(rng)].0;
            let (mut c1, mut c2) = (a, b);
            for &i in self.space.free() {
                let lambda: f64 = rng.gen();
                c1[i] = lambda * a[i] + (1.0 - lambda) * b[i];
                c2[i] = lambda * b[i] + (1.0 - lambda) * a[i];
            }
            self.mutate(&mut c1, rng);
            self.mutate(&mut c2, rng);
            children.push(c1);
            children.push(c2);
        }
        children.truncate(size);
        for c in children {
            let e = tracker.eval(&c);
            self.members.push((c, e));
        }
        sort(&mut self.members);
        self.members.truncate(size);
    }
}

/// Stable sort by error, so earlier members win ties.
fn sort(members: &mut [([f64; 5], f64)]) {
    members.sort_by(|a, b| a.1.total_cmp(&b.1));
}
