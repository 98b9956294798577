//! Leak position from the arrival-time difference of the negative pressure
//! wave at the two ends of the line.
//!
//! With `Δt = t_inlet − t_outlet` and chainage measured from the inlet, a
//! uniform wave speed gives `x = ½·(L + v·Δt)`: the later the inlet sees the
//! drop, the nearer the leak is to the outlet. For piecewise wave speed the
//! position solves `T(0→x) − T(x→L) = Δt`, whose left side increases strictly
//! with `x`.

use serde::{Deserialize, Serialize};

use crate::domain::PipelineProfile;
use crate::{Error, Result};

/// Bracket width at which the piecewise-speed bisection stops, m.
pub const BISECTION_TOLERANCE_M: f64 = 1e-3;

/// Relative slack on the feasibility bound `|Δt| ≤ T(0→L)`.
const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum WaveSpeedUsed {
    Uniform {
        wave_speed_m_s: f64,
    },
    Profile {
        segments: usize,
        min_wave_speed_m_s: f64,
        max_wave_speed_m_s: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakFix {
    /// Distance from the inlet station, m.
    pub chainage_m: f64,
    /// `t_inlet − t_outlet`, s.
    pub time_difference_s: f64,
    pub wave_speed_used: WaveSpeedUsed,
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationError {
    pub absolute_m: f64,
    pub relative_to_length: f64,
}

fn check_feasible(time_difference_s: f64, max_s: f64) -> Result<()> {
    if !time_difference_s.is_finite() {
        return Err(Error::invalid("arrival times must be finite"));
    }
    if time_difference_s.abs() > max_s * (1.0 + FEASIBILITY_SLACK) {
        return Err(Error::InfeasibleTimeDifference {
            time_difference_s,
            max_s,
        });
    }
    Ok(())
}

pub fn localize_uniform(t_inlet_s: f64, t_outlet_s: f64, length_m: f64, wave_speed_m_s: f64) -> Result<LeakFix> {
    if !(length_m.is_finite() && length_m > 0.0) {
        return Err(Error::invalid(format!("line length must be > 0 (got {length_m})")));
    }
    if !(wave_speed_m_s.is_finite() && wave_speed_m_s > 0.0) {
        return Err(Error::invalid(format!("wave speed must be > 0 (got {wave_speed_m_s})")));
    }
    let dt = t_inlet_s - t_outlet_s;
    check_feasible(dt, length_m / wave_speed_m_s)?;
    let chainage_m = (0.5 * (length_m + wave_speed_m_s * dt)).clamp(0.0, length_m);
    Ok(LeakFix {
        chainage_m,
        time_difference_s: dt,
        wave_speed_used: WaveSpeedUsed::Uniform { wave_speed_m_s },
        confidence: 1.0,
    })
}

pub fn localize_profile(t_inlet_s: f64, t_outlet_s: f64, profile: &PipelineProfile) -> Result<LeakFix> {
    profile.validate().into_result()?;
    let dt = t_inlet_s - t_outlet_s;
    let total = profile.end_to_end_travel_time();
    check_feasible(dt, total)?;

    // g(x) = T(0→x) − T(x→L) − Δt = 2·T(0→x) − T_total − Δt
    let g = |x: f64| 2.0 * profile.travel_time(0.0, x) - total - dt;
    let (mut lo, mut hi) = (0.0, profile.length_m);
    if g(lo) >= 0.0 {
        hi = lo;
    } else if g(hi) <= 0.0 {
        lo = hi;
    }
    while hi - lo > BISECTION_TOLERANCE_M {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let speeds = profile.velocity_segments.iter().map(|s| s.wave_speed_m_s);
    Ok(LeakFix {
        chainage_m: 0.5 * (lo + hi),
        time_difference_s: dt,
        wave_speed_used: WaveSpeedUsed::Profile {
            segments: profile.velocity_segments.len(),
            min_wave_speed_m_s: speeds.clone().fold(f64::INFINITY, f64::min),
            max_wave_speed_m_s: speeds.fold(f64::NEG_INFINITY, f64::max),
        },
        confidence: 1.0,
    })
}

pub fn localization_error(fix: &LeakFix, truth_chainage_m: f64, length_m: f64) -> LocalizationError {
    let absolute_m = (fix.chainage_m - truth_chainage_m).abs();
    LocalizationError {
        absolute_m,
        relative_to_length: absolute_m / length_m,
    }
}
