//! Global-best particle swarm with inertia weight and velocity clamping.

use rand::Rng;

use super::{PsoSettings, Population, SearchSpace, Tracker};
use crate::model::JaParams;
use crate::sampling::SeededRng;

struct Particle {
    x: [f64; 5],
    v: [f64; 5],
    best_x: [f64; 5],
    best_err: f64,
}

pub(super) struct Swarm {
    settings: PsoSettings,
    space: SearchSpace,
    particles: Vec<Particle>,
    leader: [f64; 5],
    leader_err: f64,
}

impl Swarm {
    pub(super) fn new<F: FnMut(&JaParams) -> f64>(
        settings: PsoSettings,
        start: Vec<[f64; 5]>,
        space: &SearchSpace,
        tracker: &mut Tracker<F>,
        rng: &mut SeededRng,
    ) -> Self {
        let mut particles = Vec::with_capacity(start.len());
        for x in start {
            let mut v = [0.0; 5];
            if settings.initial_velocity > 0.0 {
                for &i in space.free() {
                    let vmax = settings.initial_velocity * space.width(i);
                    v[i] = rng.gen_range(-vmax..=vmax);
                }
            }
            let e = tracker.eval(&x);
            particles.push(Particle {
                x,
                v,
                best_x: x,
                best_err: e,
            });
        }
        let mut swarm = Swarm {
            settings,
            space: space.clone(),
            particles,
            leader: [0.0; 5],
            leader_err: f64::INFINITY,
        };
        swarm.update_leader();
        swarm
    }

    fn update_leader(&mut self) {
        for p in &self.particles {
            if p.best_err < self.leader_err {
                self.leader_err = p.best_err;
                self.leader = p.best_x;
            }
        }
    }
}

impl Population for Swarm {
    fn step<F: FnMut(&JaParams) -> f64>(&mut self, tracker: &mut Tracker<F>, rng: &mut SeededRng) {
        let s = self.settings;
        for p in &mut self.particles {
            for &i in self.space.free() {
                let vmax = s.max_velocity * self.space.width(i);
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let v = s.inertia * p.v[i]
                    + s.cognitive * r1 * (p.best_x[i] - p.x[i])
                    + s.social * r2 * (self.leader[i] - p.x[i]);
                p.v[i] = v.clamp(-vmax, vmax);
                let x = p.x[i] + p.v[i];
                let clipped = x.clamp(self.space.lower(i), self.space.upper(i));
                if clipped != x {
                    p.v[i] = 0.0;
                }
                p.x[i] = clipped;
            }
            let e = tracker.eval(&p.x);
            if e < p.best_err {
                p.best_err = e;
                p.best_x = p.x;
            }
        }
        self.update_leader();
    }
}
