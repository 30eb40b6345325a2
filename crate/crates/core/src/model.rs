//! Scalar Jiles-Atherton forward model.
//!
//! Magnetization is marched with an explicit Euler step driven by the sampled
//! field sequence. Only the total magnetization `M` is carried as state; the
//! irreversible component is recovered from `M = Mrev + Mirr` and
//! `Mrev = c (Man - Mirr)`, which gives `Mirr = (M - c Man) / (1 - c)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum permeability [H/m].
pub const MU0: f64 = 4.0e-7 * PI;

/// Below this `|He/a|` the Langevin function and its slope use their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// Smallest admissible magnitude of the susceptibility denominator.
pub const DENOMINATOR_TOL: f64 = 1e-12;

/// Fitness reported when the model cannot be simulated for a candidate.
pub const PENALTY_ERROR: f64 = 100.0;

/// The five JA material parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JaParams {
    /// Saturation magnetization [A/m].
    pub ms: f64,
    /// Domain-wall density [A/m].
    pub a: f64,
    /// Inter-domain coupling [-].
    pub alpha: f64,
    /// Reversibility coefficient [-].
    pub c: f64,
    /// Pinning [A/m].
    pub k: f64,
}

impl JaParams {
    pub fn new(ms: f64, a: f64, alpha: f64, c: f64, k: f64) -> Self {
        JaParams { ms, a, alpha, c, k }
    }

    /// Components in the canonical order (Ms, a, alpha, c, k).
    pub fn to_array(&self) -> [f64; 5] {
        [self.ms, self.a, self.alpha, self.c, self.k]
    }

    pub fn from_array(v: [f64; 5]) -> Self {
        JaParams::new(v[0], v[1], v[2], v[3], v[4])
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.to_array();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite component in {self:?}")));
        }
        if self.ms <= 0.0 || self.a <= 0.0 || self.k <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "Ms, a and k must be positive (Ms={}, a={}, k={})",
                self.ms, self.a, self.k
            )));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::InvalidParams(format!("c must lie in (0, 1), got {}", self.c)));
        }
        if self.alpha < 0.0 {
            return Err(Error::InvalidParams(format!(
                "alpha must be non-negative, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Sign of the field increment driving the irreversible magnetization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Rising,
    Falling,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Rising => 1.0,
            Direction::Falling => -1.0,
        }
    }

    /// Direction of `dh`, or `None` when the field does not move.
    pub fn of_increment(dh: f64) -> Option<Direction> {
        if dh > 0.0 {
            Some(Direction::Rising)
        } else if dh < 0.0 {
            Some(Direction::Falling)
        } else {
            None
        }
    }
}

/// Integration state between two field samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimState {
    /// Total magnetization [A/m].
    pub m: f64,
    pub delta: Direction,
}

/// Ordered (H [A/m], B [T]) samples of a hysteresis loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BhCurve {
    h: Vec<f64>,
    b: Vec<f64>,
}

impl BhCurve {
    /// Builds a curve, rejecting mismatched lengths, fewer than three samples
    /// and non-finite values.
    pub fn new(h: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if h.len() != b.len() {
            return Err(Error::InvalidCurve(format!(
                "H has {} samples but B has {}",
                h.len(),
                b.len()
            )));
        }
        if h.len() < 3 {
            return Err(Error::InvalidCurve(format!(
                "need at least 3 samples, got {}",
                h.len()
            )));
        }
        if let Some(i) = h.iter().zip(&b).position(|(h, b)| !h.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidCurve(format!("non-finite value at sample {i}")));
        }
        Ok(BhCurve { h, b })
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.h.iter().copied().zip(self.b.iter().copied())
    }

    /// Largest `|B|` on the curve, used as the saturation flux density in the fitness.
    pub fn b_peak(&self) -> f64 {
        self.b.iter().fold(0.0_f64, |acc, b| acc.max(b.abs()))
    }

    /// Magnetization that puts the model on the first measured sample.
    pub fn initial_magnetization(&self) -> f64 {
        self.b[0] / MU0 - self.h[0]
    }

    /// Whether the field increment changes sign at least once.
    pub fn has_reversal(&self) -> bool {
        let mut last: Option<Direction> = None;
        for w in self.h.windows(2) {
            if let Some(d) = Direction::of_increment(w[1] - w[0]) {
                if last.is_some_and(|l| l != d) {
                    return true;
                }
                last = Some(d);
            }
        }
        false
    }
}

/// Anhysteretic magnetization `Ms (coth(He/a) - a/He)` [A/m].
pub fn langevin_man(he: f64, params: &JaParams) -> f64 {
    let x = he / params.a;
    let ax = x.abs();
    let l = if ax < SERIES_THRESHOLD {
        ax / 3.0 - ax * ax * ax / 45.0
    } else {
        1.0 / ax.tanh() - 1.0 / ax
    };
    params.ms * l.copysign(x)
}

/// Slope `dMan/dHe` of the anhysteretic curve [-].
pub fn dman_dhe(he: f64, params: &JaParams) -> f64 {
    let ax = (he / params.a).abs();
    let dl = if ax < SERIES_THRESHOLD {
        1.0 / 3.0 - ax * ax / 15.0
    } else {
        let coth = 1.0 / ax.tanh();
        1.0 - coth * coth + 1.0 / (ax * ax)
    };
    params.ms / params.a * dl
}

/// Total susceptibility `dM/dH` at field `h` for the given state.
///
/// The irreversible slope is suppressed when `(Man - Mirr) * delta < 0`.
pub fn dm_dh(state: &SimState, h: f64, params: &JaParams) -> Result<f64> {
    let he = h + params.alpha * state.m;
    let man = langevin_man(he, params);
    let dman = dman_dhe(he, params);
    let c = params.c;
    // (1 - c) * dMirr/dHe, using (1 - c)(Man - Mirr) = Man - M.
    let gap = man - state.m;
    let irr = if gap * state.delta.sign() < 0.0 {
        0.0
    } else {
        gap / (params.k * state.delta.sign())
    };
    let numerator = irr + c * dman;
    let denominator = 1.0 - params.alpha * c * dman - params.alpha * irr;
    if denominator.abs() < DENOMINATOR_TOL || !denominator.is_finite() {
        return Err(Error::DegenerateSusceptibility { denominator });
    }
    Ok(numerator / denominator)
}

/// Integrates the JA model along `h_sequence` starting from magnetization `m0`.
///
/// `B` is reported for every input sample, so the output has the same length
/// as the input. A step that leaves `|M| < Ms` or produces a non-finite value
/// fails the whole simulation.
pub fn simulate_loop(h_sequence: &[f64], params: &JaParams, m0: f64) -> Result<BhCurve> {
    let b = simulate_b(h_sequence, params, m0)?;
    BhCurve::new(h_sequence.to_vec(), b)
}

/// Flux density trace of [`simulate_loop`] without building a curve.
pub fn simulate_b(h_sequence: &[f64], params: &JaParams, m0: f64) -> Result<Vec<f64>> {
    params.validate()?;
    if h_sequence.len() < 2 {
        return Err(Error::InvalidCurve(format!(
            "field sequence needs at least 2 samples, got {}",
            h_sequence.len()
        )));
    }
    if !m0.is_finite() || m0.abs() >= params.ms {
        return Err(Error::SimulationFailed {
            step: 0,
            reason: format!("initial magnetization {m0} outside (-Ms, Ms)"),
        });
    }
    let mut b = Vec::with_capacity(h_sequence.len());
    let mut state = SimState {
        m: m0,
        delta: initial_direction(h_sequence),
    };
    b.push(MU0 * (h_sequence[0] + m0));
    for (step, w) in h_sequence.windows(2).enumerate() {
        let (h, h_next) = (w[0], w[1]);
        let dh = h_next - h;
        if let Some(d) = Direction::of_increment(dh) {
            state.delta = d;
        }
        if dh != 0.0 {
            let chi = dm_dh(&state, h, params).map_err(|e| Error::SimulationFailed {
                step: step + 1,
                reason: e.to_string(),
            })?;
            let m = state.m + chi * dh;
            if !m.is_finite() || m.abs() >= params.ms {
                return Err(Error::SimulationFailed {
                    step: step + 1,
                    reason: format!("magnetization {m:e} left (-Ms, Ms)"),
                });
            }
            state.m = m;
        }
        b.push(MU0 * (h_next + state.m));
    }
    Ok(b)
}

fn initial_direction(h: &[f64]) -> Direction {
    h.windows(2)
        .find_map(|w| Direction::of_increment(w[1] - w[0]))
        .unwrap_or(Direction::Rising)
}

/// RMS misfit between measured and simulated `B`, as a percentage of the
/// curve's peak `|B|`.
///
/// The simulation reuses the measured field samples and starts on the first
/// measured point. Candidates that cannot be simulated score [`PENALTY_ERROR`].
pub fn fitness_error(data: &BhCurve, params: &JaParams) -> f64 {
    let b_cal = match simulate_b(data.h(), params, data.initial_magnetization()) {
        Ok(b) => b,
        Err(_) => return PENALTY_ERROR,
    };
    let error = rms_percent(data.b(), &b_cal, data.b_peak());
    if error.is_finite() {
        error
    } else {
        PENALTY_ERROR
    }
}

/// `100 / Bs * sqrt(mean((B_data - B_cal)^2))`.
pub fn rms_percent(b_data: &[f64], b_cal: &[f64], b_sat: f64) -> f64 {
    let n = b_data.len() as f64;
    let sum_sq: f64 = b_data
        .iter()
        .zip(b_cal)
        .map(|(d, c)| (d - c) * (d - c))
        .sum();
    (sum_sq / n).sqrt() / b_sat * 100.0
}
