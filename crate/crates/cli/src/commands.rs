//! The five subcommands. Each returns its records; the binary prints them.

use std::fs;
use std::path::{Path, PathBuf};

use leakline_core::acoustic::{
    attenuation_factor, classify_severity, hole_ratio_from_drop, leak_pressure_drop, min_detectable_hole_ratio,
    LeakGeometry, Severity, NO_FLOW_CAVEAT, PRESSURE_DROP_COEFFICIENT,
};
use leakline_core::detect::{detect_onsets, pair_events, step_height, OnsetEvent, Polarity};
use leakline_core::domain::{Channel, PipelineProfile, TimeSeries};
use leakline_core::inventory::{detect_imbalance, line_inventory, volume_balance, BalanceResult, InventorySnapshot};
use leakline_core::localize::{localize_profile, localize_uniform, LeakFix};
use leakline_core::sim::{orifice_hole_diameter, simulate as run_simulation, GroundTruth};
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, ScenarioFile};
use crate::error::{CliError, Result};
use crate::telemetry::{self, Telemetry};

pub const TRUTH_FILE: &str = "truth.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AlarmKind {
    PressureWaveLeak,
    VolumeImbalance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alarm {
    pub time_s: f64,
    pub kind: AlarmKind,
    pub chainage_m: Option<f64>,
    pub time_difference_s: Option<f64>,
    pub delta_v_m3: Option<f64>,
    pub severity: Severity,
    pub confidence: f64,
    pub notes: String,
}

/// Writes the four telemetry CSVs and `truth.json` into `out_dir`.
pub fn simulate(config: &RunConfig, scenario_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<Vec<PathBuf>> {
    let mut scenario = ScenarioFile::load(scenario_path)?.resolve(config, scenario_path)?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    let output = run_simulation(&scenario)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut written = Vec::new();
    for series in output.series() {
        written.push(telemetry::write_series(out_dir, series)?);
    }
    let truth_path = out_dir.join(TRUTH_FILE);
    let mut text = serde_json::to_string_pretty(&output.truth).expect("truth serializes");
    text.push('\n');
    fs::write(&truth_path, text).map_err(|e| CliError::io(&truth_path, e))?;
    written.push(truth_path);
    Ok(written)
}

pub fn read_truth(dir: &Path) -> Result<GroundTruth> {
    crate::config::read_json(&dir.join(TRUTH_FILE))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median of up to `half_window` samples just before `index`.
fn level_before(series: &TimeSeries, index: usize, half_window: usize) -> f64 {
    let x = series.values();
    let start = index.saturating_sub(half_window);
    if start == index {
        return x[0];
    }
    median(&mut x[start..index].to_vec())
}

/// Samples on each side of an onset used for level estimates: one second,
/// but never fewer than 16.
fn half_window(series: &TimeSeries) -> usize {
    ((1.0 / series.sample_interval_s()).round() as usize).max(16)
}

fn localize_with(profile: &PipelineProfile, dt: f64) -> Result<LeakFix> {
    Ok(match profile.uniform_wave_speed() {
        Some(v) => localize_uniform(dt, 0.0, profile.length_m, v)?,
        None => localize_profile(dt, 0.0, profile)?,
    })
}

fn pressure_wave_alarm(config: &RunConfig, inlet: &TimeSeries, outlet: &TimeSeries, a: &OnsetEvent, b: &OnsetEvent) -> Result<Alarm> {
    let profile = &config.profile;
    let total = profile.end_to_end_travel_time();
    let measured = a.onset_time_s - b.onset_time_s;
    // Sample quantization can push a leak at either end just past the bound.
    let dt = measured.clamp(-total, total);
    let fix = localize_with(profile, dt)?;
    let x = fix.chainage_m;
    let leak_time = a.onset_time_s - profile.travel_time(0.0, x);

    let (hw_a, hw_b) = (half_window(inlet), half_window(outlet));
    let f = config.dominant_frequency_hz;
    let seen_a = -step_height(inlet, a.sample_index, hw_a);
    let seen_b = -step_height(outlet, b.sample_index, hw_b);
    let at_leak_a = seen_a / attenuation_factor(&config.attenuation, f, x);
    let at_leak_b = seen_b / attenuation_factor(&config.attenuation, f, profile.length_m - x);
    let drop = (0.5 * (at_leak_a + at_leak_b)).max(0.0);
    let p_a = level_before(inlet, a.sample_index, hw_a);
    let p_b = level_before(outlet, b.sample_index, hw_b);
    let static_pressure = (p_a + (p_b - p_a) * x / profile.length_m).max(0.0);

    let (severity, ratio_note) = if static_pressure > 0.0 {
        let ratio = hole_ratio_from_drop(drop, static_pressure)?.min(1.0);
        let detectable = drop >= config.sensor_floor_pa;
        (
            classify_severity(ratio, detectable),
            format!("estimated hole ratio {ratio:.4}"),
        )
    } else {
        (Severity::Monitor, "no static pressure at the leak".to_string())
    };
    let strength = a.strength.min(b.strength);
    let mut notes = format!(
        "inlet onset {} s, outlet onset {} s; drop at leak {drop:.1} Pa at {static_pressure:.0} Pa static; {ratio_note}",
        a.onset_time_s, b.onset_time_s
    );
    if dt != measured {
        notes.push_str("; time difference clamped to the end-to-end travel time");
    }
    notes.push_str("; ");
    notes.push_str(NO_FLOW_CAVEAT);
    Ok(Alarm {
        time_s: leak_time,
        kind: AlarmKind::PressureWaveLeak,
        chainage_m: Some(x),
        time_difference_s: Some(measured),
        delta_v_m3: None,
        severity,
        confidence: (1.0 - 1.0 / strength).clamp(0.0, 1.0),
        notes,
    })
}

/// Pressure-wave alarms from the inlet and outlet pressure channels, in
/// time order.
pub fn detect(config: &RunConfig, telemetry: &Telemetry) -> Result<Vec<Alarm>> {
    let inlet = telemetry.require(&config.stations.inlet, Channel::PressurePa)?;
    let outlet = telemetry.require(&config.stations.outlet, Channel::PressurePa)?;
    let drops = |s: &TimeSeries| -> Result<Vec<OnsetEvent>> {
        Ok(detect_onsets(s, &config.detection)?
            .into_iter()
            .filter(|e| e.polarity == Polarity::Drop)
            .collect())
    };
    let (a, b) = (drops(inlet)?, drops(outlet)?);
    let slack = 2.0 * inlet.sample_interval_s().max(outlet.sample_interval_s());
    let pairing = pair_events(&a, &b, config.profile.end_to_end_travel_time() + slack);
    let mut alarms = pairing
        .pairs
        .iter()
        .map(|(a, b)| pressure_wave_alarm(config, inlet, outlet, a, b))
        .collect::<Result<Vec<_>>>()?;
    alarms.sort_by(|p, q| p.time_s.total_cmp(&q.time_s));
    Ok(alarms)
}

/// One NDJSON line of `balance` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BalanceRecord {
    Alarm(Alarm),
    Window(BalanceResult),
}

fn mean_at(series: &[&TimeSeries], t: f64) -> Option<f64> {
    let values: Vec<f64> = series.iter().filter_map(|s| s.value_at(t)).collect();
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn snapshot(config: &RunConfig, telemetry: &Telemetry, t: f64) -> Result<InventorySnapshot> {
    let fluid = &config.fluid;
    let stations = [&config.stations.inlet, &config.stations.outlet];
    let channel = |c: Channel| -> Vec<&TimeSeries> { stations.iter().filter_map(|s| telemetry.get(s, c)).collect() };
    let (p, temp) = if config.balance.compensation {
        (
            mean_at(&channel(Channel::PressurePa), t).unwrap_or(fluid.reference_pressure_pa),
            mean_at(&channel(Channel::TemperatureK), t).unwrap_or(fluid.reference_temperature_k),
        )
    } else {
        (fluid.reference_pressure_pa, fluid.reference_temperature_k)
    };
    Ok(line_inventory(&config.profile, fluid, p, temp, t)?)
}

fn imbalance_alarm(config: &RunConfig, telemetry: &Telemetry, alarm: &leakline_core::inventory::ImbalanceAlarm) -> Result<Alarm> {
    let b = &config.balance;
    let span = alarm.time_s - alarm.first_exceedance_s;
    let rate = alarm.cumulative_delta_v_m3 / span;
    let static_pressure = snapshot(config, telemetry, alarm.time_s)?.mean_pressure_pa;
    let d = config.profile.inner_diameter_m;
    let (severity, ratio_note) = if static_pressure > 0.0 {
        let ratio = (orifice_hole_diameter(rate, static_pressure, config.fluid.density_kg_m3) / d).min(1.0);
        let drop = leak_pressure_drop(&LeakGeometry {
            hole_diameter_m: ratio * d,
            pipe_diameter_m: d,
            static_pressure_pa: static_pressure,
        })?;
        (
            classify_severity(ratio, drop >= config.sensor_floor_pa),
            format!("orifice-equivalent hole ratio {ratio:.4}"),
        )
    } else {
        (Severity::Monitor, "no line pressure to size the hole".to_string())
    };
    let per_window = alarm.cumulative_delta_v_m3 / alarm.windows as f64;
    Ok(Alarm {
        time_s: alarm.time_s,
        kind: AlarmKind::VolumeImbalance,
        chainage_m: None,
        time_difference_s: None,
        delta_v_m3: Some(alarm.cumulative_delta_v_m3),
        severity,
        confidence: (1.0 - b.threshold_m3 / per_window).clamp(0.0, 1.0),
        notes: format!(
            "{} windows over threshold since {} s; implied leak rate {rate:.6} m3/s; {ratio_note}; {NO_FLOW_CAVEAT}",
            alarm.windows, alarm.first_exceedance_s
        ),
    })
}

/// Volume balance over consecutive windows of `window_s` seconds, with an
/// imbalance alarm after each window that completes a persistent run.
pub fn balance(config: &RunConfig, telemetry: &Telemetry, window_s: f64) -> Result<Vec<BalanceRecord>> {
    if !(window_s.is_finite() && window_s > 0.0) {
        return Err(CliError::Input(format!("window must be > 0 s (got {window_s})")));
    }
    let inflow = telemetry.require(&config.stations.inlet, Channel::FlowM3S)?;
    let outflow = telemetry.require(&config.stations.outlet, Channel::FlowM3S)?;
    let start = inflow.start_time_s().max(outflow.start_time_s());
    let end = inflow.end_time_s().min(outflow.end_time_s());
    let count = ((end - start) / window_s + 1e-9).floor();
    if count.is_nan() || count < 1.0 {
        return Err(CliError::Input(format!(
            "flow telemetry spans {} s, shorter than one {window_s} s window",
            (end - start).max(0.0)
        )));
    }

    let mut results = Vec::new();
    for k in 0..count as usize {
        let t0 = start + k as f64 * window_s;
        let t1 = (start + (k + 1) as f64 * window_s).min(end);
        let r = volume_balance(
            inflow,
            outflow,
            &snapshot(config, telemetry, t0)?,
            &snapshot(config, telemetry, t1)?,
            (t0, t1),
        )?;
        results.push(r);
    }

    let b = &config.balance;
    let mut alarms = Vec::new();
    let mut from = 0;
    while let Some(mut alarm) = detect_imbalance(&results[from..], b.threshold_m3, b.persistence_windows) {
        alarm.window_index += from;
        alarms.push((alarm.window_index, imbalance_alarm(config, telemetry, &alarm)?));
        // Latch until the run of exceedances ends.
        from = alarm.window_index + 1;
        while from < results.len() && results[from].leakage_volume_m3 > b.threshold_m3 {
            from += 1;
        }
    }

    let mut records = Vec::with_capacity(results.len() + alarms.len());
    let mut pending = alarms.into_iter().peekable();
    for (i, r) in results.into_iter().enumerate() {
        records.push(BalanceRecord::Window(r));
        while let Some((_, alarm)) = pending.next_if(|(j, _)| *j == i) {
            records.push(BalanceRecord::Alarm(alarm));
        }
    }
    Ok(records)
}

pub enum SpeedModel<'a> {
    Uniform { length_m: f64, wave_speed_m_s: f64 },
    Profile(&'a PipelineProfile),
}

pub fn localize(t_inlet_s: f64, t_outlet_s: f64, model: SpeedModel<'_>) -> Result<LeakFix> {
    Ok(match model {
        SpeedModel::Uniform {
            length_m,
            wave_speed_m_s,
        } => localize_uniform(t_inlet_s, t_outlet_s, length_m, wave_speed_m_s)?,
        SpeedModel::Profile(p) => localize_profile(t_inlet_s, t_outlet_s, p)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub severity: Severity,
    pub hole_ratio: f64,
    pub static_pressure_pa: f64,
    pub pressure_drop_pa: f64,
    pub sensor_floor_pa: f64,
    pub min_detectable_hole_ratio: f64,
    pub detectable: bool,
    pub notes: String,
}

pub fn classify(static_pressure_pa: f64, hole_ratio: f64, sensor_floor_pa: f64) -> Result<Classification> {
    if !(0.0..=1.0).contains(&hole_ratio) {
        return Err(CliError::Input(format!("hole ratio must lie in [0, 1] (got {hole_ratio})")));
    }
    let pressure_drop_pa = leak_pressure_drop(&LeakGeometry {
        hole_diameter_m: hole_ratio,
        pipe_diameter_m: 1.0,
        static_pressure_pa,
    })?;
    let min_ratio = min_detectable_hole_ratio(static_pressure_pa, sensor_floor_pa)?;
    let detectable = pressure_drop_pa >= sensor_floor_pa;
    Ok(Classification {
        severity: classify_severity(hole_ratio, detectable),
        hole_ratio,
        static_pressure_pa,
        pressure_drop_pa,
        sensor_floor_pa,
        min_detectable_hole_ratio: min_ratio,
        detectable,
        notes: format!(
            "drop = {PRESSURE_DROP_COEFFICIENT}·P_s·ratio²; {NO_FLOW_CAVEAT}"
        ),
    })
}
