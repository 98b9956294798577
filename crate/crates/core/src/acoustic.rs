//! Leak acoustics: the local pressure drop caused by a hole, the smallest
//! hole a sensor can resolve, frequency-squared damping, and the three
//! repair-urgency classes.
//!
//! The pressure-drop relation `Δp = 0.3·P_s·(D_hole/D_pipe)²` holds for a
//! pipe without flow. It is applied to operating lines as an approximation.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coefficient of the no-flow leak pressure-drop relation.
pub const PRESSURE_DROP_COEFFICIENT: f64 = 0.3;

/// Continuous-emission band of an established gas leak, Hz.
pub const EMISSION_BAND_HZ: (f64, f64) = (175e3, 750e3);

/// Hole ratio at or above which a leak needs repair within 24 to 48 hours.
pub const URGENT_RATIO: f64 = 0.1;
/// Hole ratio at or above which a leak needs repair within 30 days.
pub const REPAIR_RATIO: f64 = 0.01;

/// Caveat attached to every result derived from the pressure-drop relation.
pub const NO_FLOW_CAVEAT: &str =
    "leak pressure-drop relation assumes a pipe without flow; applied to an operating line";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeakGeometry {
    pub hole_diameter_m: f64,
    pub pipe_diameter_m: f64,
    pub static_pressure_pa: f64,
}

impl LeakGeometry {
    pub fn validate(&self) -> Result<()> {
        let g = self;
        if !(g.hole_diameter_m.is_finite() && g.pipe_diameter_m.is_finite() && g.static_pressure_pa.is_finite()) {
            return Err(Error::invalid("leak geometry must be finite"));
        }
        if g.pipe_diameter_m <= 0.0 {
            return Err(Error::invalid(format!(
                "pipe diameter must be > 0 (got {})",
                g.pipe_diameter_m
            )));
        }
        if g.hole_diameter_m < 0.0 || g.hole_diameter_m > g.pipe_diameter_m {
            return Err(Error::invalid(format!(
                "hole diameter {} m must lie in [0, {}] m",
                g.hole_diameter_m, g.pipe_diameter_m
            )));
        }
        if g.static_pressure_pa < 0.0 {
            return Err(Error::invalid(format!(
                "static pressure must be >= 0 (got {})",
                g.static_pressure_pa
            )));
        }
        Ok(())
    }

    pub fn hole_ratio(&self) -> f64 {
        self.hole_diameter_m / self.pipe_diameter_m
    }
}

/// Amplitude factor `exp(−k·f²·d)` for a wave of frequency `f` after
/// travelling distance `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttenuationModel {
    pub damping_coefficient_s2_per_m: f64,
    #[serde(default = "default_band")]
    pub reference_band_hz: (f64, f64),
}

fn default_band() -> (f64, f64) {
    EMISSION_BAND_HZ
}

impl AttenuationModel {
    pub fn new(damping_coefficient_s2_per_m: f64) -> Result<Self> {
        let m = AttenuationModel {
            damping_coefficient_s2_per_m,
            reference_band_hz: EMISSION_BAND_HZ,
        };
        m.validate()?;
        Ok(m)
    }

    /// Chooses `k` so that a wave of `frequency_hz` keeps `factor` of its
    /// amplitude after `distance_m`.
    pub fn calibrated(frequency_hz: f64, distance_m: f64, factor: f64) -> Result<Self> {
        if !(frequency_hz > 0.0 && distance_m > 0.0 && factor > 0.0 && factor <= 1.0) {
            return Err(Error::invalid(
                "calibration needs f > 0, d > 0 and a factor in (0, 1]",
            ));
        }
        Self::new(-factor.ln() / (frequency_hz * frequency_hz * distance_m))
    }

    /// 10 Hz halved over 100 miles (160 934 m).
    pub fn low_frequency_reference() -> Self {
        Self::calibrated(10.0, 160_934.0, 0.5).expect("constants are valid")
    }

    pub fn lossless() -> Self {
        AttenuationModel {
            damping_coefficient_s2_per_m: 0.0,
            reference_band_hz: EMISSION_BAND_HZ,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.damping_coefficient_s2_per_m;
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::invalid(format!("damping coefficient must be >= 0 (got {k})")));
        }
        let (lo, hi) = self.reference_band_hz;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!("reference band ({lo}, {hi}) must have low < high")));
        }
        Ok(())
    }
}

impl Default for AttenuationModel {
    fn default() -> Self {
        Self::low_frequency_reference()
    }
}

/// Repair urgency, ordered from least to most urgent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Severity {
    #[serde(rename = "MONITOR")]
    Monitor,
    #[serde(rename = "REPAIR_30D")]
    Repair30d,
    #[serde(rename = "URGENT_24_48H")]
    Urgent24To48h,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Monitor => "MONITOR",
            Severity::Repair30d => "REPAIR_30D",
            Severity::Urgent24To48h => "URGENT_24_48H",
        }
    }
}

/// Local pressure drop at the leak, Pa.
pub fn leak_pressure_drop(geometry: &LeakGeometry) -> Result<f64> {
    geometry.validate()?;
    let ratio = geometry.hole_ratio();
    Ok(PRESSURE_DROP_COEFFICIENT * geometry.static_pressure_pa * ratio * ratio)
}

/// Smallest hole-to-pipe diameter ratio whose pressure drop reaches
/// `sensor_floor_pa` at `static_pressure_pa`.
pub fn min_detectable_hole_ratio(static_pressure_pa: f64, sensor_floor_pa: f64) -> Result<f64> {
    if !(static_pressure_pa.is_finite() && static_pressure_pa > 0.0) {
        return Err(Error::invalid(format!(
            "static pressure must be > 0 (got {static_pressure_pa})"
        )));
    }
    if !(sensor_floor_pa.is_finite() && sensor_floor_pa >= 0.0) {
        return Err(Error::invalid(format!(
            "sensor floor must be >= 0 (got {sensor_floor_pa})"
        )));
    }
    Ok((sensor_floor_pa / (PRESSURE_DROP_COEFFICIENT * static_pressure_pa)).sqrt())
}

/// Hole ratio implied by an observed pressure drop (inverse of
/// [`leak_pressure_drop`]).
pub fn hole_ratio_from_drop(pressure_drop_pa: f64, static_pressure_pa: f64) -> Result<f64> {
    min_detectable_hole_ratio(static_pressure_pa, pressure_drop_pa.max(0.0))
}

pub fn attenuation_factor(model: &AttenuationModel, frequency_hz: f64, distance_m: f64) -> f64 {
    (-model.damping_coefficient_s2_per_m * frequency_hz * frequency_hz * distance_m).exp()
}

/// Thresholds: ratio ≥ 0.1 is urgent, ≥ 0.01 needs repair within 30 days,
/// anything smaller or undetectable is monitored.
pub fn classify_severity(estimated_hole_ratio: f64, detectable: bool) -> Severity {
    if !detectable || estimated_hole_ratio.is_nan() || estimated_hole_ratio < REPAIR_RATIO {
        Severity::Monitor
    } else if estimated_hole_ratio >= URGENT_RATIO {
        Severity::Urgent24To48h
    } else {
        Severity::Repair30d
    }
}
