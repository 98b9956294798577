//! Run configuration and scenario documents (JSON, `schema_version: 1`).

use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use leakline_core::acoustic::{AttenuationModel, LeakGeometry};
use leakline_core::detect::DetectionConfig;
use leakline_core::domain::{FluidState, PipelineProfile};
use leakline_core::sim::{LeakScenario, NoiseSpec, DEFAULT_DOMINANT_FREQUENCY_HZ};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Line-pack volume difference that counts as imbalance, and how many
/// consecutive windows must exceed it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BalanceConfig {
    pub threshold_m3: f64,
    pub persistence_windows: NonZeroUsize,
    /// Compensate line inventory for pressure and temperature.
    pub compensation: bool,
    pub window_s: f64,
}

impl Default for BalanceConfig {
    fn default() -> Self {
        BalanceConfig {
            threshold_m3: 1.0,
            persistence_windows: NonZeroUsize::new(2).expect("non-zero"),
            compensation: true,
            window_s: 600.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stations {
    pub inlet: String,
    pub outlet: String,
}

impl Default for Stations {
    fn default() -> Self {
        Stations {
            inlet: "inlet".into(),
            outlet: "outlet".into(),
        }
    }
}

/// Optional default locations; relative paths resolve against the config
/// file's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub scenario: Option<PathBuf>,
    pub telemetry_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

fn default_frequency() -> f64 {
    DEFAULT_DOMINANT_FREQUENCY_HZ
}

fn default_sensor_floor() -> f64 {
    500.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub profile: PipelineProfile,
    pub fluid: FluidState,
    #[serde(default)]
    pub detection: DetectionConfig,
    #[serde(default)]
    pub balance: BalanceConfig,
    #[serde(default)]
    pub attenuation: AttenuationModel,
    /// Frequency at which wave attenuation is evaluated, Hz.
    #[serde(default = "default_frequency")]
    pub dominant_frequency_hz: f64,
    /// Smallest pressure drop the sensors resolve, Pa.
    #[serde(default = "default_sensor_floor")]
    pub sensor_floor_pa: f64,
    #[serde(default)]
    pub stations: Stations,
    #[serde(default)]
    pub paths: Paths,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn check_version(path: &Path, version: u32) -> Result<()> {
    if version == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "{}: schema_version {version} is not supported (expected {SCHEMA_VERSION})",
            path.display()
        )))
    }
}

/// Parses a JSON document, reporting the offending field path and line.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        if field == "." {
            CliError::Input(format!("{}: {inner}", path.display()))
        } else {
            CliError::Input(format!("{}: field `{field}`: {inner}", path.display()))
        }
    })?;
    Ok(value)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_json(path, &text)
}

fn invalid(path: &Path, what: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {what}: {msg}", path.display()))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut config: RunConfig = read_json(path)?;
        check_version(path, config.schema_version)?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.validate(path)?;
        Ok(config)
    }

    fn validate(&self, path: &Path) -> Result<()> {
        self.profile
            .validate()
            .into_result()
            .map_err(|e| invalid(path, "profile", e))?;
        self.fluid.validate().map_err(|e| invalid(path, "fluid", e))?;
        self.detection.validate().map_err(|e| invalid(path, "detection", e))?;
        self.attenuation.validate().map_err(|e| invalid(path, "attenuation", e))?;
        let b = &self.balance;
        if !(b.threshold_m3.is_finite() && b.threshold_m3 > 0.0) {
            return Err(invalid(path, "balance.threshold_m3", "must be > 0"));
        }
        if !(b.window_s.is_finite() && b.window_s > 0.0) {
            return Err(invalid(path, "balance.window_s", "must be > 0"));
        }
        if !(self.dominant_frequency_hz.is_finite() && self.dominant_frequency_hz >= 0.0) {
            return Err(invalid(path, "dominant_frequency_hz", "must be >= 0"));
        }
        if !(self.sensor_floor_pa.is_finite() && self.sensor_floor_pa >= 0.0) {
            return Err(invalid(path, "sensor_floor_pa", "must be >= 0"));
        }
        if self.stations.inlet == self.stations.outlet {
            return Err(invalid(path, "stations", "inlet and outlet ids must differ"));
        }
        Ok(())
    }

    /// `explicit` if given, else the configured path resolved against the
    /// config directory. The result must exist unless `must_exist` is false.
    pub fn resolve(&self, explicit: Option<&Path>, configured: Option<&PathBuf>, what: &str, must_exist: bool) -> Result<PathBuf> {
        let path = match (explicit, configured) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(p)) => self.base_dir.join(p),
            (None, None) => {
                return Err(CliError::Input(format!(
                    "no {what} given on the command line or under `paths` in the config"
                )))
            }
        };
        if must_exist && !path.exists() {
            return Err(CliError::Input(format!("{what} {} does not exist", path.display())));
        }
        Ok(path)
    }
}

/// Scenario document: a leak scenario whose profile, fluid, attenuation,
/// dominant frequency and station ids default to the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    #[serde(default)]
    pub profile: Option<PipelineProfile>,
    #[serde(default)]
    pub fluid: Option<FluidState>,
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
    pub attenuation: Option<AttenuationModel>,
    #[serde(default)]
    pub dominant_frequency_hz: Option<f64>,
    #[serde(default)]
    pub ramp_duration_s: f64,
    #[serde(default)]
    pub inlet_station_id: Option<String>,
    #[serde(default)]
    pub outlet_station_id: Option<String>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self> {
        let file: ScenarioFile = read_json(path)?;
        check_version(path, file.schema_version)?;
        Ok(file)
    }

    /// Fills defaults from `config` and validates the result.
    pub fn resolve(self, config: &RunConfig, path: &Path) -> Result<LeakScenario> {
        let scenario = LeakScenario {
            profile: self.profile.unwrap_or_else(|| config.profile.clone()),
            fluid: self.fluid.unwrap_or(config.fluid),
            baseline_flow_m3_s: self.baseline_flow_m3_s,
            inlet_pressure_pa: self.inlet_pressure_pa,
            leak_chainage_m: self.leak_chainage_m,
            leak_start_s: self.leak_start_s,
            leak_geometry: self.leak_geometry,
            sample_rate_hz: self.sample_rate_hz,
            duration_s: self.duration_s,
            noise: self.noise,
            seed: self.seed,
            attenuation: self.attenuation.unwrap_or(config.attenuation),
            dominant_frequency_hz: self.dominant_frequency_hz.unwrap_or(config.dominant_frequency_hz),
            ramp_duration_s: self.ramp_duration_s,
            inlet_station_id: self.inlet_station_id.unwrap_or_else(|| config.stations.inlet.clone()),
            outlet_station_id: self.outlet_station_id.unwrap_or_else(|| config.stations.outlet.clone()),
        };
        scenario
            .validate()
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(scenario)
    }
}
