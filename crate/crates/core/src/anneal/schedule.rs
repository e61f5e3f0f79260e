use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ω₀ of the reference schedule, rad/µs.
pub const OMEGA_0: f64 = TAU * 0.7;
/// Δ_i of the reference schedule, rad/µs. Negative so the anneal starts in
/// the trivial all-ground state.
pub const DELTA_INITIAL: f64 = -TAU * 0.7;

/// Piecewise-linear drive profiles. Times in µs, frequencies in rad/µs.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub duration: f64,
    pub omega_knots: Vec<(f64, f64)>,
    pub delta_knots: Vec<(f64, f64)>,
}

impl Schedule {
    pub fn new(
        duration: f64,
        omega_knots: Vec<(f64, f64)>,
        delta_knots: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let s = Schedule {
            duration,
            omega_knots,
            delta_knots,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::input(format!(
                "schedule duration must be positive, got {}",
                self.duration
            )));
        }
        for (name, knots) in [("omega", &self.omega_knots), ("delta", &self.delta_knots)] {
            if knots.is_empty() {
                return Err(Error::input(format!("{name} profile has no knots")));
            }
            for &(t, v) in knots.iter() {
                if !(t.is_finite() && v.is_finite()) {
                    return Err(Error::input(format!(
                        "{name} profile has a non-finite knot"
                    )));
                }
                if t < 0.0 || t > self.duration {
                    return Err(Error::input(format!(
                        "{name} knot at t = {t} lies outside [0, {}]",
                        self.duration
                    )));
                }
            }
            if knots.windows(2).any(|w| w[1].0 < w[0].0) {
                return Err(Error::input(format!("{name} knots are not time-sorted")));
            }
        }
        if let Some(&(t, v)) = self.omega_knots.iter().find(|k| k.1 < 0.0) {
            return Err(Error::input(format!("Omega is negative ({v}) at t = {t}")));
        }
        Ok(())
    }

    pub fn omega(&self, t: f64) -> f64 {
        interpolate(&self.omega_knots, t)
    }

    pub fn delta(&self, t: f64) -> f64 {
        interpolate(&self.delta_knots, t)
    }

    pub fn max_omega(&self) -> f64 {
        self.omega_knots.iter().fold(0.0, |m, k| m.max(k.1))
    }

    pub fn max_abs_delta(&self) -> f64 {
        self.delta_knots.iter().fold(0.0, |m, k| m.max(k.1.abs()))
    }
}

/// Linear interpolation, constant beyond the first and last knots.
fn interpolate(knots: &[(f64, f64)], t: f64) -> f64 {
    let i = knots.partition_point(|k| k.0 <= t);
    if i == 0 {
        return knots[0].1;
    }
    if i == knots.len() {
        return knots[i - 1].1;
    }
    let (t0, v0) = knots[i - 1];
    let (t1, v1) = knots[i];
    if t1 == t0 {
        return v1;
    }
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// Reference anneal of duration `t`: Δ linear from Δ_i to `delta_f`, Ω a
/// trapezoid rising to Ω₀ over the first 10% and falling to 0 over the last.
pub fn reference_schedule(delta_f: f64, t: f64) -> Result<Schedule> {
    reference_schedule_with(DELTA_INITIAL, OMEGA_0, delta_f, t)
}

pub fn reference_schedule_with(
    delta_i: f64,
    omega_0: f64,
    delta_f: f64,
    t: f64,
) -> Result<Schedule> {
    if !(t > 0.0) {
        return Err(Error::input(format!(
            "schedule duration must be positive, got {t}"
        )));
    }
    Schedule::new(
        t,
        vec![(0.0, 0.0), (0.1 * t, omega_0), (0.9 * t, omega_0), (t, 0.0)],
        vec![(0.0, delta_i), (t, delta_f)],
    )
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    #[serde(rename = "T_us")]
    t_us: f64,
    omega_knots: Vec<(f64, f64)>,
    delta_knots: Vec<(f64, f64)>,
}

/// Schedule JSON with frequencies in linear MHz.
pub fn read_schedule(text: &str) -> Result<Schedule> {
    let j: ScheduleJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let scale = |k: Vec<(f64, f64)>| k.into_iter().map(|(t, f)| (t, TAU * f)).collect();
    Schedule::new(j.t_us, scale(j.omega_knots), scale(j.delta_knots))
}

pub fn write_schedule(s: &Schedule) -> String {
    let scale = |k: &[(f64, f64)]| k.iter().map(|&(t, w)| (t, w / TAU)).collect();
    let j = ScheduleJson {
        t_us: s.duration,
        omega_knots: scale(&s.omega_knots),
        delta_knots: scale(&s.delta_knots),
    };
    serde_json::to_string_pretty(&j).expect("schedule serialization cannot fail")
}
