#![allow(dead_code)]

use leakline_core::acoustic::{AttenuationModel, LeakGeometry};
use leakline_core::domain::{FluidState, PipelineProfile};
use leakline_core::sim::{LeakScenario, NoiseSpec};

pub const CASE_LENGTH_M: f64 = 61_480.0;
pub const CASE_SPEED_M_S: f64 = 1150.5;

pub fn crude_oil() -> FluidState {
    FluidState {
        density_kg_m3: 850.0,
        bulk_modulus_pa: 1.5e9,
        thermal_expansion_per_k: 8e-4,
        compressibility_per_pa: 7e-10,
        reference_temperature_k: 288.15,
        reference_pressure_pa: 101_325.0,
    }
}

pub fn case_profile() -> PipelineProfile {
    PipelineProfile::uniform(CASE_LENGTH_M, 0.5, 0.008, 2.07e11, CASE_SPEED_M_S)
}

/// Leak-free, noiseless case-study line sampled at 100 Hz.
pub fn base_scenario() -> LeakScenario {
    LeakScenario {
        profile: case_profile(),
        fluid: crude_oil(),
        baseline_flow_m3_s: 0.3,
        inlet_pressure_pa: 5e6,
        leak_chainage_m: 39_340.0,
        leak_start_s: 20.0,
        leak_geometry: LeakGeometry {
            hole_diameter_m: 0.0,
            pipe_diameter_m: 0.5,
            static_pressure_pa: 4e6,
        },
        sample_rate_hz: 100.0,
        duration_s: 100.0,
        noise: NoiseSpec::noiseless(),
        seed: 1,
        attenuation: AttenuationModel::low_frequency_reference(),
        dominant_frequency_hz: 10.0,
        ramp_duration_s: 0.0,
        inlet_station_id: "inlet".into(),
        outlet_station_id: "outlet".into(),
    }
}
