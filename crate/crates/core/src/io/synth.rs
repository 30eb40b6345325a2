//! Synthetic B-H loops standing in for measured material data.

use std::f64::consts::PI;

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::{langevin_man, simulate_b, simulate_loop, BhCurve, JaParams, MU0};
use crate::sampling::SeededRng;

pub const MIN_SAMPLES_PER_PERIOD: usize = 100;

const STEADY_STATE_PASSES: usize = 20;

/// `H_i = amplitude * cos(2 pi i / samples_per_period)` for `periods` full cycles,
/// starting at the positive peak.
pub fn sinusoidal_field(amplitude: f64, samples_per_period: usize, periods: usize) -> Vec<f64> {
    (0..samples_per_period * periods)
        .map(|i| amplitude * (2.0 * PI * i as f64 / samples_per_period as f64).cos())
        .collect()
}

/// Solves `M = Man(h + alpha M)` by bisection on `(-Ms, Ms)`.
pub fn anhysteretic_magnetization(h: f64, params: &JaParams) -> f64 {
    let (mut lo, mut hi) = (-params.ms, params.ms);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if langevin_man(h + params.alpha * mid, params) > mid {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Initial magnetization of the periodic steady state for a field period.
///
/// Starting from the anhysteretic point at `h_period[0]`, one period (closed
/// back to its first sample) is simulated repeatedly until the end
/// magnetization reproduces the start.
pub fn steady_state_magnetization(h_period: &[f64], params: &JaParams) -> Result<f64> {
    let mut h = h_period.to_vec();
    h.push(h_period[0]);
    let mut m = anhysteretic_magnetization(h[0], params);
    for _ in 0..STEADY_STATE_PASSES {
        let b = simulate_b(&h, params, m)?;
        let next = b[b.len() - 1] / MU0 - h[h.len() - 1];
        let converged = (next - m).abs() <= 1e-12 * params.ms;
        m = next;
        if converged {
            break;
        }
    }
    Ok(m)
}

/// Simulated loop for `params` under a cosine field, with optional additive
/// Gaussian noise of standard deviation `noise_fraction * max|B|` on `B`.
///
/// The simulation starts on the steady-state loop at the positive field peak
/// (see [`steady_state_magnetization`]).
pub fn generate_synthetic(
    params: &JaParams,
    amplitude: f64,
    samples_per_period: usize,
    periods: usize,
    noise_fraction: f64,
    rng: &mut SeededRng,
) -> Result<BhCurve> {
    params.validate()?;
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::InvalidConfig(format!("amplitude must be positive, got {amplitude}")));
    }
    if samples_per_period < MIN_SAMPLES_PER_PERIOD {
        return Err(Error::InvalidConfig(format!(
            "need at least {MIN_SAMPLES_PER_PERIOD} samples per period, got {samples_per_period}"
        )));
    }
    if periods == 0 {
        return Err(Error::InvalidConfig("need at least one period".into()));
    }
    if !(noise_fraction.is_finite() && noise_fraction >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "noise fraction must be non-negative, got {noise_fraction}"
        )));
    }
    let h = sinusoidal_field(amplitude, samples_per_period, periods);
    let m0 = steady_state_magnetization(&h[..samples_per_period], params)?;
    let clean = simulate_loop(&h, params, m0)?;
    if noise_fraction == 0.0 {
        return Ok(clean);
    }
    let sd = noise_fraction * clean.b_peak();
    let noise = Normal::new(0.0, sd).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let b = clean.b().iter().map(|b| b + noise.sample(rng)).collect();
    BhCurve::new(h, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::csv::{format_bh_csv, ingest_bh_csv};
    use crate::model::fitness_error;

    fn material_a() -> JaParams {
        JaParams::new(1.52e6, 13.0, 1e-5, 0.8, 24.0)
    }

    #[test]
    fn field_starts_at_the_peak_and_repeats() {
        let h = sinusoidal_field(50.0, 200, 2);
        assert_eq!(h.len(), 400);
        assert_eq!(h[0], 50.0);
        assert!((h[100] + 50.0).abs() < 1e-12);
        for i in 0..200 {
            assert!((h[i] - h[i + 200]).abs() < 1e-9);
        }
    }

    #[test]
    fn anhysteretic_point_is_a_fixed_point() {
        let p = material_a();
        for h in [-100.0, -3.0, 0.0, 7.0, 100.0] {
            let m = anhysteretic_magnetization(h, &p);
            assert!((langevin_man(h + p.alpha * m, &p) - m).abs() <= 1e-6 * p.ms);
        }
        assert!(anhysteretic_magnetization(0.0, &p).abs() < 1e-30);
    }

    #[test]
    fn noiseless_curve_is_fit_exactly_by_its_parameters() {
        let p = material_a();
        let data = generate_synthetic(&p, 100.0, 200, 1, 0.0, &mut SeededRng::new(0, 0)).unwrap();
        assert!(data.has_reversal());
        // the fitness recovers m0 from B[0], so only round-off remains
        assert!(fitness_error(&data, &p) < 1e-9);
    }

    #[test]
    fn one_percent_noise_gives_about_one_percent_error() {
        let p = material_a();
        let data = generate_synthetic(&p, 100.0, 400, 1, 0.01, &mut SeededRng::new(3, 0)).unwrap();
        let e = fitness_error(&data, &p);
        assert!(e > 0.8 && e < 1.2, "{e}");
    }

    #[test]
    fn steady_state_loop_closes() {
        let p = material_a();
        let data = generate_synthetic(&p, 100.0, 2000, 2, 0.0, &mut SeededRng::new(0, 0)).unwrap();
        let b = data.b();
        let worst = (0..2000).map(|i| (b[i] - b[i + 2000]).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-9 * data.b_peak(), "{worst}");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let p = material_a();
        let data = generate_synthetic(&p, 80.0, 100, 1, 0.02, &mut SeededRng::new(9, 1)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("loop.csv");
        std::fs::write(&path, format_bh_csv(&data)).unwrap();
        assert_eq!(ingest_bh_csv(&path).unwrap(), data);
    }

    #[test]
    fn rejects_bad_generator_settings() {
        let p = material_a();
        let rng = &mut SeededRng::new(0, 0);
        assert!(generate_synthetic(&p, 0.0, 200, 1, 0.0, rng).is_err());
        assert!(generate_synthetic(&p, 100.0, 50, 1, 0.0, rng).is_err());
        assert!(generate_synthetic(&p, 100.0, 200, 0, 0.0, rng).is_err());
        assert!(generate_synthetic(&p, 100.0, 200, 1, -0.1, rng).is_err());
        let bad = JaParams::new(1.52e6, 13.0, 1e-5, 1.2, 24.0);
        assert!(generate_synthetic(&bad, 100.0, 200, 1, 0.0, rng).is_err());
    }
}
