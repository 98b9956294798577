//! Pipeline geometry, fluid properties, station telemetry and the
//! pressure-wave speed they imply.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Standard gravity, m/s².
pub const GRAVITY_M_S2: f64 = 9.80665;

/// Chainage comparisons (segment joins, profile end points) use this slack.
pub const CHAINAGE_TOLERANCE_M: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElevationPoint {
    pub chainage_m: f64,
    pub elevation_m: f64,
}

/// Constant wave speed over `[start_m, end_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VelocitySegment {
    pub start_m: f64,
    pub end_m: f64,
    pub wave_speed_m_s: f64,
}

/// Geometry, wall material and wave-speed description of one line between
/// the inlet station (chainage 0) and the outlet station (chainage `length_m`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineProfile {
    pub length_m: f64,
    pub inner_diameter_m: f64,
    pub wall_thickness_m: f64,
    pub wall_elastic_modulus_pa: f64,
    pub elevation_profile: Vec<ElevationPoint>,
    pub velocity_segments: Vec<VelocitySegment>,
}

impl PipelineProfile {
    /// Flat line with a single wave-speed segment.
    pub fn uniform(
        length_m: f64,
        inner_diameter_m: f64,
        wall_thickness_m: f64,
        wall_elastic_modulus_pa: f64,
        wave_speed_m_s: f64,
    ) -> Self {
        PipelineProfile {
            length_m,
            inner_diameter_m,
            wall_thickness_m,
            wall_elastic_modulus_pa,
            elevation_profile: vec![
                ElevationPoint {
                    chainage_m: 0.0,
                    elevation_m: 0.0,
                },
                ElevationPoint {
                    chainage_m: length_m,
                    elevation_m: 0.0,
                },
            ],
            velocity_segments: vec![VelocitySegment {
                start_m: 0.0,
                end_m: length_m,
                wave_speed_m_s,
            }],
        }
    }

    pub fn cross_section_m2(&self) -> f64 {
        std::f64::consts::PI * self.inner_diameter_m * self.inner_diameter_m / 4.0
    }

    /// Returns the single wave speed when the profile has exactly one segment.
    pub fn uniform_wave_speed(&self) -> Option<f64> {
        match self.velocity_segments.as_slice() {
            [only] => Some(only.wave_speed_m_s),
            _ => None,
        }
    }

    pub fn min_wave_speed(&self) -> f64 {
        self.velocity_segments
            .iter()
            .map(|s| s.wave_speed_m_s)
            .fold(f64::INFINITY, f64::min)
    }

    /// Wave speed at `chainage_m`; the segment whose half-open interval
    /// contains the point wins, the last segment owns the outlet.
    pub fn wave_speed_at(&self, chainage_m: f64) -> f64 {
        self.velocity_segments
            .iter()
            .find(|s| chainage_m >= s.start_m && chainage_m < s.end_m)
            .or(self.velocity_segments.last())
            .map(|s| s.wave_speed_m_s)
            .unwrap_or(f64::NAN)
    }

    /// Pressure-wave travel time between two chainages, integrating `1/v`
    /// over the velocity segments. Symmetric in its arguments.
    pub fn travel_time(&self, from_m: f64, to_m: f64) -> f64 {
        let (a, b) = if from_m <= to_m {
            (from_m, to_m)
        } else {
            (to_m, from_m)
        };
        self.velocity_segments
            .iter()
            .map(|s| {
                let overlap = (b.min(s.end_m) - a.max(s.start_m)).max(0.0);
                overlap / s.wave_speed_m_s
            })
            .sum()
    }

    /// Inlet-to-outlet travel time.
    pub fn end_to_end_travel_time(&self) -> f64 {
        self.travel_time(0.0, self.length_m)
    }

    /// Linear interpolation of the elevation profile, clamped at the ends.
    pub fn elevation_at(&self, chainage_m: f64) -> f64 {
        let pts = &self.elevation_profile;
        match pts.len() {
            0 => 0.0,
            1 => pts[0].elevation_m,
            _ => {
                if chainage_m <= pts[0].chainage_m {
                    return pts[0].elevation_m;
                }
                for w in pts.windows(2) {
                    let (p, q) = (w[0], w[1]);
                    if chainage_m <= q.chainage_m {
                        let frac = (chainage_m - p.chainage_m) / (q.chainage_m - p.chainage_m);
                        return p.elevation_m + frac * (q.elevation_m - p.elevation_m);
                    }
                }
                pts[pts.len() - 1].elevation_m
            }
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_profile(self)
    }
}

/// One violated profile invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileViolation {
    NonPositive { field: &'static str, value: f64 },
    NoVelocitySegments,
    EmptySegment { index: usize, start_m: f64, end_m: f64 },
    NonPositiveWaveSpeed { index: usize, value: f64 },
    VelocityGap { from_m: f64, to_m: f64 },
    VelocityOverlap { from_m: f64, to_m: f64 },
    VelocityOutsideLine { from_m: f64, to_m: f64 },
    ElevationTooShort { points: usize },
    ElevationStart { chainage_m: f64 },
    ElevationEnd { chainage_m: f64, length_m: f64 },
    ElevationNotIncreasing { index: usize },
    NonFinite { field: String },
}

impl fmt::Display for ProfileViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ProfileViolation::*;
        match self {
            NonPositive { field, value } => write!(f, "{field} must be > 0 (got {value})"),
            NoVelocitySegments => write!(f, "velocity_segments is empty"),
            EmptySegment {
                index,
                start_m,
                end_m,
            } => write!(
                f,
                "velocity segment {index} is empty or reversed: [{start_m}, {end_m}]"
            ),
            NonPositiveWaveSpeed { index, value } => {
                write!(f, "velocity segment {index} has wave speed {value} <= 0")
            }
            VelocityGap { from_m, to_m } => {
                write!(f, "velocity segments leave a gap over [{from_m}, {to_m}] m")
            }
            VelocityOverlap { from_m, to_m } => {
                write!(f, "velocity segments overlap over [{from_m}, {to_m}] m")
            }
            VelocityOutsideLine { from_m, to_m } => write!(
                f,
                "velocity segments extend outside the line over [{from_m}, {to_m}] m"
            ),
            ElevationTooShort { points } => write!(
                f,
                "elevation_profile needs at least 2 points (got {points})"
            ),
            ElevationStart { chainage_m } => {
                write!(f, "elevation_profile must start at chainage 0 (got {chainage_m})")
            }
            ElevationEnd {
                chainage_m,
                length_m,
            } => write!(
                f,
                "elevation_profile must end at length_m = {length_m} (got {chainage_m})"
            ),
            ElevationNotIncreasing { index } => write!(
                f,
                "elevation_profile chainage at index {index} is not strictly increasing"
            ),
            NonFinite { field } => write!(f, "{field} is not finite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<ProfileViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            Err(Error::invalid(format!("pipeline profile: {}", msgs.join("; "))))
        }
    }
}

/// Checks every profile invariant and reports all violations found.
pub fn validate_profile(profile: &PipelineProfile) -> ValidationReport {
    let mut out = Vec::new();
    let tol = CHAINAGE_TOLERANCE_M;

    for (field, value) in [
        ("length_m", profile.length_m),
        ("inner_diameter_m", profile.inner_diameter_m),
        ("wall_thickness_m", profile.wall_thickness_m),
        ("wall_elastic_modulus_pa", profile.wall_elastic_modulus_pa),
    ] {
        if !value.is_finite() {
            out.push(ProfileViolation::NonFinite {
                field: field.to_string(),
            });
        } else if value <= 0.0 {
            out.push(ProfileViolation::NonPositive { field, value });
        }
    }
    let length = profile.length_m;

    // Velocity segments, checked in declaration order.
    let segs = &profile.velocity_segments;
    if segs.is_empty() {
        out.push(ProfileViolation::NoVelocitySegments);
    }
    let mut cursor = 0.0_f64;
    for (i, s) in segs.iter().enumerate() {
        if !(s.start_m.is_finite() && s.end_m.is_finite() && s.wave_speed_m_s.is_finite()) {
            out.push(ProfileViolation::NonFinite {
                field: format!("velocity_segments[{i}]"),
            });
            continue;
        }
        if s.end_m <= s.start_m {
            out.push(ProfileViolation::EmptySegment {
                index: i,
                start_m: s.start_m,
                end_m: s.end_m,
            });
        }
        if s.wave_speed_m_s <= 0.0 {
            out.push(ProfileViolation::NonPositiveWaveSpeed {
                index: i,
                value: s.wave_speed_m_s,
            });
        }
        if s.start_m < -tol {
            out.push(ProfileViolation::VelocityOutsideLine {
                from_m: s.start_m,
                to_m: 0.0_f64.min(s.end_m),
            });
        }
        if s.start_m > cursor + tol {
            out.push(ProfileViolation::VelocityGap {
                from_m: cursor,
                to_m: s.start_m,
            });
        } else if s.start_m < cursor - tol && i > 0 {
            out.push(ProfileViolation::VelocityOverlap {
                from_m: s.start_m.max(0.0),
                to_m: cursor.min(s.end_m),
            });
        }
        cursor = cursor.max(s.end_m);
    }
    if !segs.is_empty() && length.is_finite() {
        if cursor < length - tol {
            out.push(ProfileViolation::VelocityGap {
                from_m: cursor,
                to_m: length,
            });
        } else if cursor > length + tol {
            out.push(ProfileViolation::VelocityOutsideLine {
                from_m: length,
                to_m: cursor,
            });
        }
    }

    let pts = &profile.elevation_profile;
    if pts.len() < 2 {
        out.push(ProfileViolation::ElevationTooShort { points: pts.len() });
    }
    if let Some(first) = pts.first() {
        if first.chainage_m.abs() > tol {
            out.push(ProfileViolation::ElevationStart {
                chainage_m: first.chainage_m,
            });
        }
    }
    if let Some(last) = pts.last() {
        if pts.len() >= 2 && (last.chainage_m - length).abs() > tol {
            out.push(ProfileViolation::ElevationEnd {
                chainage_m: last.chainage_m,
                length_m: length,
            });
        }
    }
    for (i, p) in pts.iter().enumerate() {
        if !(p.chainage_m.is_finite() && p.elevation_m.is_finite()) {
            out.push(ProfileViolation::NonFinite {
                field: format!("elevation_profile[{i}]"),
            });
        }
    }
    for (i, w) in pts.windows(2).enumerate() {
        if w[1].chainage_m <= w[0].chainage_m {
            out.push(ProfileViolation::ElevationNotIncreasing { index: i + 1 });
        }
    }

    ValidationReport { violations: out }
}

/// Liquid properties at reference conditions plus the linear compensation
/// coefficients used for the line inventory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidState {
    pub density_kg_m3: f64,
    pub bulk_modulus_pa: f64,
    pub thermal_expansion_per_k: f64,
    pub compressibility_per_pa: f64,
    pub reference_temperature_k: f64,
    pub reference_pressure_pa: f64,
}

impl FluidState {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("density_kg_m3", self.density_kg_m3),
            ("bulk_modulus_pa", self.bulk_modulus_pa),
            ("reference_temperature_k", self.reference_temperature_k),
            ("reference_pressure_pa", self.reference_pressure_pa),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("fluid {name} must be finite and > 0 (got {v})")));
            }
        }
        let non_negative = [
            ("thermal_expansion_per_k", self.thermal_expansion_per_k),
            ("compressibility_per_pa", self.compressibility_per_pa),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("fluid {name} must be finite and >= 0 (got {v})")));
            }
        }
        Ok(())
    }
}

/// Pressure-wave speed in a liquid-filled thin-walled elastic pipe
/// (Korteweg): `v = sqrt((K/ρ) / (1 + K·D/(E·e)))`.
pub fn wave_speed(fluid: &FluidState, profile: &PipelineProfile) -> Result<f64> {
    let k = fluid.bulk_modulus_pa;
    let rho = fluid.density_kg_m3;
    let d = profile.inner_diameter_m;
    let e_mod = profile.wall_elastic_modulus_pa;
    let wall = profile.wall_thickness_m;
    if [k, rho, d, e_mod, wall].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::invalid(
            "wave speed needs finite positive K, density, diameter, wall modulus and thickness",
        ));
    }
    let v = ((k / rho) / (1.0 + k * d / (e_mod * wall))).sqrt();
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(format!("degenerate wave speed {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Channel {
    #[serde(rename = "pressure_pa")]
    PressurePa,
    #[serde(rename = "flow_m3_s")]
    FlowM3S,
    #[serde(rename = "temperature_k")]
    TemperatureK,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::PressurePa, Channel::FlowM3S, Channel::TemperatureK];

    pub fn as_str(self) -> &'static str {
        match self {
            Channel::PressurePa => "pressure_pa",
            Channel::FlowM3S => "flow_m3_s",
            Channel::TemperatureK => "temperature_k",
        }
    }

    /// Physical admissibility of a sample value on this channel.
    pub fn check_value(self, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::invalid(format!("{} value is not finite", self.as_str())));
        }
        match self {
            Channel::PressurePa if value < 0.0 => {
                Err(Error::invalid(format!("pressure_pa must be >= 0 (got {value})")))
            }
            Channel::TemperatureK if value <= 0.0 => {
                Err(Error::invalid(format!("temperature_k must be > 0 (got {value})")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown channel `{s}` (expected pressure_pa, flow_m3_s or temperature_k)"
                ))
            })
    }
}

/// One telemetry reading.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorSample {
    pub timestamp_s: f64,
    pub station_id: String,
    pub channel: Channel,
    pub value: f64,
}

impl SensorSample {
    pub fn new(timestamp_s: f64, station_id: impl Into<String>, channel: Channel, value: f64) -> Result<Self> {
        if !timestamp_s.is_finite() {
            return Err(Error::invalid("timestamp_s is not finite"));
        }
        channel.check_value(value)?;
        Ok(SensorSample {
            timestamp_s,
            station_id: station_id.into(),
            channel,
            value,
        })
    }
}

/// Uniformly sampled readings of one channel at one station.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    station_id: String,
    channel: Channel,
    start_time_s: f64,
    sample_interval_s: f64,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(
        station_id: impl Into<String>,
        channel: Channel,
        start_time_s: f64,
        sample_interval_s: f64,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !start_time_s.is_finite() {
            return Err(Error::invalid("series start time is not finite"));
        }
        if !(sample_interval_s.is_finite() && sample_interval_s > 0.0) {
            return Err(Error::invalid(format!(
                "sample interval must be > 0 (got {sample_interval_s})"
            )));
        }
        if values.is_empty() {
            return Err(Error::invalid("series has no samples"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(TimeSeries {
            station_id: station_id.into(),
            channel,
            start_time_s,
            sample_interval_s,
            values,
        })
    }

    pub fn station_id(&self) -> &str {
        &self.station_id
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn start_time_s(&self) -> f64 {
        self.start_time_s
    }

    pub fn sample_interval_s(&self) -> f64 {
        self.sample_interval_s
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.start_time_s + index as f64 * self.sample_interval_s
    }

    pub fn end_time_s(&self) -> f64 {
        self.time_at(self.values.len() - 1)
    }

    /// Linear interpolation between samples; `None` outside the span.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        let pos = (t - self.start_time_s) / self.sample_interval_s;
        let last = (self.values.len() - 1) as f64;
        if !(-1e-9..=last + 1e-9).contains(&pos) {
            return None;
        }
        let pos = pos.clamp(0.0, last);
        let i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            return Some(self.values[self.values.len() - 1]);
        }
        let frac = pos - i as f64;
        Some(self.values[i] + frac * (self.values[i + 1] - self.values[i]))
    }

    pub fn samples(&self) -> impl Iterator<Item = SensorSample> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| SensorSample {
            timestamp_s: self.time_at(i),
            station_id: self.station_id.clone(),
            channel: self.channel,
            value: v,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rigid(k: f64, rho: f64) -> f64 {
        let fluid = FluidState {
            density_kg_m3: rho,
            bulk_modulus_pa: k,
            thermal_expansion_per_k: 0.0,
            compressibility_per_pa: 0.0,
            reference_temperature_k: 288.15,
            reference_pressure_pa: 101_325.0,
        };
        let profile = PipelineProfile::uniform(1000.0, 0.5, 0.01, 1e20, 1000.0);
        wave_speed(&fluid, &profile).unwrap()
    }

    #[test]
    fn rigid_limit_water() {
        // sqrt(2.2e9 / 1000)
        assert!((rigid(2.2e9, 1000.0) - 1483.2397).abs() < 1e-3);
    }

    #[test]
    fn rigid_limit_case_study_oil() {
        assert!((rigid(1.124e9, 850.0) - 1150.0).abs() < 0.1);
    }

    #[test]
    fn thinner_wall_is_slower() {
        let fluid = FluidState {
            density_kg_m3: 850.0,
            bulk_modulus_pa: 1.5e9,
            thermal_expansion_per_k: 0.0,
            compressibility_per_pa: 0.0,
            reference_temperature_k: 288.15,
            reference_pressure_pa: 101_325.0,
        };
        let thick = PipelineProfile::uniform(1000.0, 0.5, 0.01, 2.07e11, 1000.0);
        let mut thin = thick.clone();
        thin.wall_thickness_m /= 2.0;
        assert!(wave_speed(&fluid, &thin).unwrap() < wave_speed(&fluid, &thick).unwrap());
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let fluid = FluidState {
            density_kg_m3: 0.0,
            bulk_modulus_pa: 1.5e9,
            thermal_expansion_per_k: 0.0,
            compressibility_per_pa: 0.0,
            reference_temperature_k: 288.15,
            reference_pressure_pa: 101_325.0,
        };
        let p = PipelineProfile::uniform(1000.0, 0.5, 0.01, 2.07e11, 1000.0);
        assert!(wave_speed(&fluid, &p).is_err());
    }

    #[test]
    fn well_formed_profile_passes() {
        let p = PipelineProfile::uniform(61_480.0, 0.5, 0.008, 2.07e11, 1150.5);
        assert!(validate_profile(&p).is_ok());
    }

    #[test]
    fn gap_is_named() {
        let mut p = PipelineProfile::uniform(10_000.0, 0.5, 0.008, 2.07e11, 1150.0);
        p.velocity_segments = vec![
            VelocitySegment {
                start_m: 0.0,
                end_m: 4000.0,
                wave_speed_m_s: 1100.0,
            },
            VelocitySegment {
                start_m: 5000.0,
                end_m: 10_000.0,
                wave_speed_m_s: 1200.0,
            },
        ];
        let report = validate_profile(&p);
        assert_eq!(
            report.violations,
            vec![ProfileViolation::VelocityGap {
                from_m: 4000.0,
                to_m: 5000.0
            }]
        );
        assert!(report.violations[0].to_string().contains("[4000, 5000]"));
    }

    #[test]
    fn overlap_and_short_coverage_reported() {
        let mut p = PipelineProfile::uniform(10_000.0, 0.5, 0.008, 2.07e11, 1150.0);
        p.velocity_segments = vec![
            VelocitySegment {
                start_m: 0.0,
                end_m: 6000.0,
                wave_speed_m_s: 1100.0,
            },
            VelocitySegment {
                start_m: 5000.0,
                end_m: 9000.0,
                wave_speed_m_s: 1200.0,
            },
        ];
        let v = validate_profile(&p).violations;
        assert!(v.contains(&ProfileViolation::VelocityOverlap {
            from_m: 5000.0,
            to_m: 6000.0
        }));
        assert!(v.contains(&ProfileViolation::VelocityGap {
            from_m: 9000.0,
            to_m: 10_000.0
        }));
    }

    #[test]
    fn elevation_must_start_at_zero() {
        let mut p = PipelineProfile::uniform(10_000.0, 0.5, 0.008, 2.07e11, 1150.0);
        p.elevation_profile[0].chainage_m = 10.0;
        let v = validate_profile(&p).violations;
        assert_eq!(v, vec![ProfileViolation::ElevationStart { chainage_m: 10.0 }]);
    }

    #[test]
    fn travel_time_over_segments() {
        let mut p = PipelineProfile::uniform(10_000.0, 0.5, 0.008, 2.07e11, 1000.0);
        p.velocity_segments = vec![
            VelocitySegment {
                start_m: 0.0,
                end_m: 5000.0,
                wave_speed_m_s: 1000.0,
            },
            VelocitySegment {
                start_m: 5000.0,
                end_m: 10_000.0,
                wave_speed_m_s: 1250.0,
            },
        ];
        assert!((p.travel_time(0.0, 10_000.0) - 9.0).abs() < 1e-12);
        assert!((p.travel_time(7500.0, 2500.0) - 4.5).abs() < 1e-12);
        assert_eq!(p.wave_speed_at(5000.0), 1250.0);
        assert_eq!(p.wave_speed_at(10_000.0), 1250.0);
    }

    #[test]
    fn series_rejects_bad_interval_and_nan() {
        assert!(TimeSeries::new("a", Channel::PressurePa, 0.0, 0.0, vec![1.0]).is_err());
        assert!(TimeSeries::new("a", Channel::PressurePa, 0.0, 1.0, vec![]).is_err());
        assert!(TimeSeries::new("a", Channel::PressurePa, 0.0, 1.0, vec![f64::NAN]).is_err());
        let s = TimeSeries::new("a", Channel::FlowM3S, 10.0, 0.5, vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.end_time_s(), 11.0);
        assert_eq!(s.value_at(10.25), Some(0.5));
        assert_eq!(s.value_at(11.5), None);
    }

    #[test]
    fn negative_pressure_sample_rejected() {
        assert!(SensorSample::new(0.0, "inlet", Channel::PressurePa, -1.0).is_err());
        assert!(SensorSample::new(0.0, "inlet", Channel::FlowM3S, -1.0).is_ok());
        assert_eq!("flow_m3_s".parse::<Channel>().unwrap(), Channel::FlowM3S);
    }
}
