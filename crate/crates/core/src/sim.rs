//! Deterministic synthetic telemetry for a two-station line with one leak.
//!
//! The negative pressure wave is modelled as a step of height
//! `Δp·attenuation(f_dom, distance)` reaching each station after the wave
//! travel time from the leak; flows shift at the same instants so that the
//! inlet picks up `q·(L−x)/L` and the outlet loses `q·x/L`. There is no
//! friction or line-pack solver, which keeps arrival times and leak volumes
//! exact.
//!
//! Noise is drawn from xoshiro256++ seeded through SplitMix64
//! (`seed_from_u64`). Each sample consumes four normals in the order inlet
//! pressure, outlet pressure, inlet flow, outlet flow; each normal is one
//! Box–Muller cosine branch from two 53-bit uniforms.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::acoustic::{attenuation_factor, leak_pressure_drop, AttenuationModel, LeakGeometry};
use crate::domain::{Channel, FluidState, PipelineProfile, TimeSeries, GRAVITY_M_S2};
use crate::{Error, Result};

/// Discharge coefficient of a sharp-edged orifice.
pub const DISCHARGE_COEFFICIENT: f64 = 0.61;

pub const DEFAULT_DOMINANT_FREQUENCY_HZ: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpHarmonic {
    pub frequency_hz: f64,
    pub amplitude_pa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    pub gaussian_sigma_pa: f64,
    pub pump_harmonic: PumpHarmonic,
    pub flow_sigma_m3_s: f64,
    /// Outlet clock lag: outlet events are stamped this much later.
    pub outlet_clock_offset_s: f64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self::default()
    }

    fn validate(&self) -> Result<()> {
        let non_negative = [
            ("gaussian_sigma_pa", self.gaussian_sigma_pa),
            ("pump_harmonic.frequency_hz", self.pump_harmonic.frequency_hz),
            ("pump_harmonic.amplitude_pa", self.pump_harmonic.amplitude_pa),
            ("flow_sigma_m3_s", self.flow_sigma_m3_s),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("noise {name} must be >= 0 (got {v})")));
            }
        }
        if !self.outlet_clock_offset_s.is_finite() {
            return Err(Error::invalid("noise outlet_clock_offset_s must be finite"));
        }
        Ok(())
    }
}

fn default_frequency() -> f64 {
    DEFAULT_DOMINANT_FREQUENCY_HZ
}

fn default_inlet_id() -> String {
    "inlet".into()
}

fn default_outlet_id() -> String {
    "outlet".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeakScenario {
    pub profile: PipelineProfile,
    pub fluid: FluidState,
    pub baseline_flow_m3_s: f64,
    pub inlet_pressure_pa: f64,
    pub leak_chainage_m: f64,
    pub leak_start_s: f64,
    pub leak_geometry: LeakGeometry,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub seed: u64,
    #[serde(default)]
    pub attenuation: AttenuationModel,
    #[serde(default = "default_frequency")]
    pub dominant_frequency_hz: f64,
    /// Pressure-step rise time; zero is an instantaneous step.
    #[serde(default)]
    pub ramp_duration_s: f64,
    #[serde(default = "default_inlet_id")]
    pub inlet_station_id: String,
    #[serde(default = "default_outlet_id")]
    pub outlet_station_id: String,
}

impl LeakScenario {
    pub fn validate(&self) -> Result<()> {
        self.profile.validate().into_result()?;
        self.fluid.validate()?;
        self.leak_geometry.validate()?;
        self.noise.validate()?;
        self.attenuation.validate()?;
        let l = self.profile.length_m;
        let finite = [
            ("baseline_flow_m3_s", self.baseline_flow_m3_s),
            ("inlet_pressure_pa", self.inlet_pressure_pa),
            ("leak_chainage_m", self.leak_chainage_m),
            ("leak_start_s", self.leak_start_s),
            ("sample_rate_hz", self.sample_rate_hz),
            ("duration_s", self.duration_s),
            ("dominant_frequency_hz", self.dominant_frequency_hz),
            ("ramp_duration_s", self.ramp_duration_s),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(format!("scenario {name} is not finite")));
            }
        }
        if self.sample_rate_hz <= 0.0 {
            return Err(Error::invalid(format!(
                "sample_rate_hz must be > 0 (got {})",
                self.sample_rate_hz
            )));
        }
        if self.duration_s <= 0.0 {
            return Err(Error::invalid(format!("duration_s must be > 0 (got {})", self.duration_s)));
        }
        if !(0.0..=l).contains(&self.leak_chainage_m) {
            return Err(Error::invalid(format!(
                "leak_chainage_m {} outside [0, {l}]",
                self.leak_chainage_m
            )));
        }
        if !(0.0..=self.duration_s).contains(&self.leak_start_s) {
            return Err(Error::invalid(format!(
                "leak_start_s {} outside [0, {}]",
                self.leak_start_s, self.duration_s
            )));
        }
        if self.inlet_pressure_pa < 0.0 {
            return Err(Error::invalid("inlet_pressure_pa must be >= 0"));
        }
        if self.dominant_frequency_hz < 0.0 || self.ramp_duration_s < 0.0 {
            return Err(Error::invalid("dominant_frequency_hz and ramp_duration_s must be >= 0"));
        }
        if self.inlet_station_id == self.outlet_station_id {
            return Err(Error::invalid("inlet and outlet station ids must differ"));
        }
        if let Some((x, p)) = steady_state_profile(self).into_iter().find(|&(_, p)| p < 0.0) {
            return Err(Error::invalid(format!(
                "hydrostatic pressure {p} Pa at chainage {x} m is negative (slack line)"
            )));
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        (self.duration_s * self.sample_rate_hz + 1e-9).floor() as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub leak_chainage_m: f64,
    pub leak_start_s: f64,
    pub arrival_inlet_s: f64,
    pub arrival_outlet_s: f64,
    pub leak_rate_m3_s: f64,
    pub pressure_drop_pa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub inlet_pressure: TimeSeries,
    pub outlet_pressure: TimeSeries,
    pub inlet_flow: TimeSeries,
    pub outlet_flow: TimeSeries,
    pub truth: GroundTruth,
}

impl ScenarioOutput {
    pub fn series(&self) -> [&TimeSeries; 4] {
        [
            &self.inlet_pressure,
            &self.outlet_pressure,
            &self.inlet_flow,
            &self.outlet_flow,
        ]
    }
}

/// Hydrostatic pressure at every elevation-profile point, no friction.
pub fn steady_state_profile(scenario: &LeakScenario) -> Vec<(f64, f64)> {
    let rho_g = scenario.fluid.density_kg_m3 * GRAVITY_M_S2;
    let pts = &scenario.profile.elevation_profile;
    let z0 = pts.first().map(|p| p.elevation_m).unwrap_or(0.0);
    pts.iter()
        .map(|p| (p.chainage_m, scenario.inlet_pressure_pa - rho_g * (p.elevation_m - z0)))
        .collect()
}

/// Hydrostatic pressure at one chainage.
pub fn steady_pressure_at(scenario: &LeakScenario, chainage_m: f64) -> f64 {
    let rho_g = scenario.fluid.density_kg_m3 * GRAVITY_M_S2;
    let z0 = scenario.profile.elevation_at(0.0);
    scenario.inlet_pressure_pa - rho_g * (scenario.profile.elevation_at(chainage_m) - z0)
}

/// Sharp-edged orifice outflow `C_d·(π·D₁²/4)·sqrt(2·P_s/ρ)`.
pub fn orifice_leak_rate(geometry: &LeakGeometry, density_kg_m3: f64) -> f64 {
    let area = std::f64::consts::PI * geometry.hole_diameter_m * geometry.hole_diameter_m / 4.0;
    DISCHARGE_COEFFICIENT * area * (2.0 * geometry.static_pressure_pa / density_kg_m3).sqrt()
}

/// Hole diameter that makes [`orifice_leak_rate`] equal `rate_m3_s`.
pub fn orifice_hole_diameter(rate_m3_s: f64, static_pressure_pa: f64, density_kg_m3: f64) -> f64 {
    let velocity = (2.0 * static_pressure_pa / density_kg_m3).sqrt();
    (4.0 * rate_m3_s / (DISCHARGE_COEFFICIENT * std::f64::consts::PI * velocity)).sqrt()
}

struct NoiseSource(Xoshiro256PlusPlus);

impl NoiseSource {
    fn new(seed: u64) -> Self {
        NoiseSource(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    /// Uniform in (0, 1].
    fn open_unit(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn normal(&mut self) -> f64 {
        let u1 = self.open_unit();
        let u2 = self.open_unit();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Fraction of the step applied at time `t` for an event at `arrival`.
fn step_fraction(t: f64, arrival: f64, ramp: f64) -> f64 {
    if t < arrival {
        0.0
    } else if ramp > 0.0 {
        ((t - arrival) / ramp).min(1.0)
    } else {
        1.0
    }
}

pub fn simulate(scenario: &LeakScenario) -> Result<ScenarioOutput> {
    scenario.validate()?;
    let s = scenario;
    let length = s.profile.length_m;
    let x = s.leak_chainage_m;

    let pressure_drop = leak_pressure_drop(&s.leak_geometry)?;
    let leak_rate = orifice_leak_rate(&s.leak_geometry, s.fluid.density_kg_m3);
    let arrival_inlet = s.leak_start_s + s.profile.travel_time(x, 0.0);
    let arrival_outlet = s.leak_start_s + s.profile.travel_time(x, length);
    let observed_outlet = arrival_outlet + s.noise.outlet_clock_offset_s;

    let step_in = pressure_drop * attenuation_factor(&s.attenuation, s.dominant_frequency_hz, x);
    let step_out = pressure_drop * attenuation_factor(&s.attenuation, s.dominant_frequency_hz, length - x);
    let base_in = steady_pressure_at(s, 0.0);
    let base_out = steady_pressure_at(s, length);
    let q_in_shift = leak_rate * (length - x) / length;
    let q_out_shift = leak_rate * x / length;

    let n = s.sample_count();
    let dt = 1.0 / s.sample_rate_hz;
    let mut rng = NoiseSource::new(s.seed);
    let pump = s.noise.pump_harmonic;
    let (mut p_in, mut p_out, mut q_in, mut q_out) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for i in 0..n {
        let t = i as f64 / s.sample_rate_hz;
        let f_in = step_fraction(t, arrival_inlet, s.ramp_duration_s);
        let f_out = step_fraction(t, observed_outlet, s.ramp_duration_s);
        let pump_pa = pump.amplitude_pa * (std::f64::consts::TAU * pump.frequency_hz * t).sin();

        let n_pin = rng.normal() * s.noise.gaussian_sigma_pa;
        let n_pout = rng.normal() * s.noise.gaussian_sigma_pa;
        let n_qin = rng.normal() * s.noise.flow_sigma_m3_s;
        let n_qout = rng.normal() * s.noise.flow_sigma_m3_s;

        p_in.push((base_in - step_in * f_in + pump_pa + n_pin).max(0.0));
        p_out.push((base_out - step_out * f_out + pump_pa + n_pout).max(0.0));
        q_in.push(s.baseline_flow_m3_s + q_in_shift * f_in + n_qin);
        q_out.push(s.baseline_flow_m3_s - q_out_shift * f_out + n_qout);
    }

    let series = |id: &str, ch: Channel, v: Vec<f64>| TimeSeries::new(id, ch, 0.0, dt, v);
    Ok(ScenarioOutput {
        inlet_pressure: series(&s.inlet_station_id, Channel::PressurePa, p_in)?,
        outlet_pressure: series(&s.outlet_station_id, Channel::PressurePa, p_out)?,
        inlet_flow: series(&s.inlet_station_id, Channel::FlowM3S, q_in)?,
        outlet_flow: series(&s.outlet_station_id, Channel::FlowM3S, q_out)?,
        truth: GroundTruth {
            leak_chainage_m: x,
            leak_start_s: s.leak_start_s,
            arrival_inlet_s: arrival_inlet,
            arrival_outlet_s: arrival_outlet,
            leak_rate_m3_s: leak_rate,
            pressure_drop_pa: pressure_drop,
        },
    })
}
