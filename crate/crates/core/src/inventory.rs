//! Volume balance with a compensated line inventory.
//!
//! Over a window `[t0, t1]` the unexplained loss is
//!
//! ```text
//! ΔV = ∫ Q_in dt − ∫ Q_out dt − (V_line(t1) − V_line(t0))
//! ```
//!
//! where the line inventory `V_line = A·L·[1 + β_T·(T − T_ref) + β_P·(P − P_ref)]`
//! is evaluated at the mean line pressure and temperature. Pipe-wall dilation
//! is folded into `β_P`.

use std::num::NonZeroUsize;

use serde::{Deserialize, Serialize};

use crate::domain::{Channel, FluidState, PipelineProfile, TimeSeries};
use crate::{Error, Result};

/// Relative slack allowed when a window endpoint falls on a series endpoint.
const SPAN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InventorySnapshot {
    pub time_s: f64,
    pub line_volume_m3: f64,
    pub mean_pressure_pa: f64,
    pub mean_temperature_k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceResult {
    pub window: (f64, f64),
    pub v_in_m3: f64,
    pub v_out_m3: f64,
    pub delta_inventory_m3: f64,
    pub leakage_volume_m3: f64,
}

/// Raised after `persistence` consecutive windows with `ΔV > threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceAlarm {
    /// Index into the balance results of the window that completed the run.
    pub window_index: usize,
    /// End of the window that completed the run.
    pub time_s: f64,
    /// Start of the first exceeding window of the run.
    pub first_exceedance_s: f64,
    /// Sum of ΔV over the exceeding run.
    pub cumulative_delta_v_m3: f64,
    /// Length of the run, in windows.
    pub windows: usize,
}

/// Compensated line volume at the given mean pressure and temperature.
pub fn line_inventory(
    profile: &PipelineProfile,
    fluid: &FluidState,
    mean_pressure_pa: f64,
    mean_temperature_k: f64,
    time_s: f64,
) -> Result<InventorySnapshot> {
    profile.validate().into_result()?;
    fluid.validate()?;
    if !(mean_pressure_pa.is_finite() && mean_temperature_k.is_finite() && time_s.is_finite()) {
        return Err(Error::invalid("inventory inputs must be finite"));
    }
    let base = profile.cross_section_m2() * profile.length_m;
    let factor = 1.0
        + fluid.thermal_expansion_per_k * (mean_temperature_k - fluid.reference_temperature_k)
        + fluid.compressibility_per_pa * (mean_pressure_pa - fluid.reference_pressure_pa);
    let line_volume_m3 = base * factor;
    if line_volume_m3.is_nan() || line_volume_m3 <= 0.0 {
        return Err(Error::invalid(format!(
            "compensated line volume {line_volume_m3} m³ is not positive"
        )));
    }
    Ok(InventorySnapshot {
        time_s,
        line_volume_m3,
        mean_pressure_pa,
        mean_temperature_k,
    })
}

fn check_window(series: &TimeSeries, t0: f64, t1: f64) -> Result<()> {
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::Range(format!("invalid window [{t0}, {t1}]")));
    }
    let slack = SPAN_SLACK * series.sample_interval_s().max(1.0);
    let (start, end) = (series.start_time_s(), series.end_time_s());
    if t0 < start - slack || t1 > end + slack {
        return Err(Error::Range(format!(
            "window [{t0}, {t1}] s is outside the {} span [{start}, {end}] s of station `{}`",
            series.channel(),
            series.station_id()
        )));
    }
    Ok(())
}

/// Trapezoidal integral of a flow series over `[t0, t1]`. Window ends that
/// fall between samples use the linearly interpolated value.
pub fn integrate_flow(series: &TimeSeries, t0: f64, t1: f64) -> Result<f64> {
    if series.channel() != Channel::FlowM3S {
        return Err(Error::invalid(format!(
            "integrate_flow needs a flow_m3_s series, got {}",
            series.channel()
        )));
    }
    check_window(series, t0, t1)?;
    if t1 == t0 {
        return Ok(0.0);
    }
    let start = series.start_time_s();
    let end = series.end_time_s();
    let (t0, t1) = (t0.clamp(start, end), t1.clamp(start, end));
    let dt = series.sample_interval_s();

    // Knots: t0, every sample strictly inside (t0, t1), t1.
    let first_inner = ((t0 - start) / dt).floor() as usize + 1;
    let mut prev_t = t0;
    let mut prev_v = series.value_at(t0).expect("clamped into span");
    let mut total = 0.0;
    let mut i = first_inner;
    while i < series.len() {
        let t = series.time_at(i);
        if t >= t1 {
            break;
        }
        let v = series.values()[i];
        total += 0.5 * (prev_v + v) * (t - prev_t);
        prev_t = t;
        prev_v = v;
        i += 1;
    }
    let v1 = series.value_at(t1).expect("clamped into span");
    total += 0.5 * (prev_v + v1) * (t1 - prev_t);
    Ok(total)
}

/// Leakage volume over `window = (t0, t1)`; positive means lost product.
pub fn volume_balance(
    inlet_flow: &TimeSeries,
    outlet_flow: &TimeSeries,
    inventory_start: &InventorySnapshot,
    inventory_end: &InventorySnapshot,
    window: (f64, f64),
) -> Result<BalanceResult> {
    let (t0, t1) = window;
    let tol = SPAN_SLACK * t1.abs().max(t0.abs()).max(1.0);
    if (inventory_start.time_s - t0).abs() > tol || (inventory_end.time_s - t1).abs() > tol {
        return Err(Error::Range(format!(
            "inventory snapshots at {} s and {} s do not match the window [{t0}, {t1}] s",
            inventory_start.time_s, inventory_end.time_s
        )));
    }
    let v_in_m3 = integrate_flow(inlet_flow, t0, t1)?;
    let v_out_m3 = integrate_flow(outlet_flow, t0, t1)?;
    let delta_inventory_m3 = inventory_end.line_volume_m3 - inventory_start.line_volume_m3;
    Ok(BalanceResult {
        window,
        v_in_m3,
        v_out_m3,
        delta_inventory_m3,
        leakage_volume_m3: v_in_m3 - v_out_m3 - delta_inventory_m3,
    })
}

/// First persistent exceedance of `threshold_m3` in an ordered run of windows.
pub fn detect_imbalance(
    results: &[BalanceResult],
    threshold_m3: f64,
    persistence_windows: NonZeroUsize,
) -> Option<ImbalanceAlarm> {
    let need = persistence_windows.get();
    let mut run_start = None;
    let mut cumulative = 0.0;
    for (i, r) in results.iter().enumerate() {
        if r.leakage_volume_m3 > threshold_m3 {
            let first = *run_start.get_or_insert(i);
            cumulative += r.leakage_volume_m3;
            if i + 1 - first >= need {
                return Some(ImbalanceAlarm {
                    window_index: i,
                    time_s: r.window.1,
                    first_exceedance_s: results[first].window.0,
                    cumulative_delta_v_m3: cumulative,
                    windows: i + 1 - first,
                });
            }
        } else {
            run_start = None;
            cumulative = 0.0;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fluid(beta_t: f64, beta_p: f64) -> FluidState {
        FluidState {
            density_kg_m3: 850.0,
            bulk_modulus_pa: 1.5e9,
            thermal_expansion_per_k: beta_t,
            compressibility_per_pa: beta_p,
            reference_temperature_k: 288.15,
            reference_pressure_pa: 101_325.0,
        }
    }

    fn profile() -> PipelineProfile {
        PipelineProfile::uniform(61_480.0, 0.5, 0.008, 2.07e11, 1150.5)
    }

    fn flow(values: Vec<f64>, dt: f64) -> TimeSeries {
        TimeSeries::new("inlet", Channel::FlowM3S, 0.0, dt, values).unwrap()
    }

    #[test]
    fn uncompensated_inventory_is_geometric() {
        let snap = line_inventory(&profile(), &fluid(0.0, 0.0), 101_325.0, 288.15, 0.0).unwrap();
        // π·0.5²/4·61480
        assert!((snap.line_volume_m3 - 12_071.569_771).abs() < 1e-5);
        let snap = line_inventory(&profile(), &fluid(0.0, 0.0), 5e6, 330.0, 0.0).unwrap();
        assert!((snap.line_volume_m3 - 12_071.569_771).abs() < 1e-5);
    }

    #[test]
    fn thermal_swell() {
        let cold = line_inventory(&profile(), &fluid(8e-4, 0.0), 101_325.0, 288.15, 0.0).unwrap();
        let warm = line_inventory(&profile(), &fluid(8e-4, 0.0), 101_325.0, 298.15, 0.0).unwrap();
        assert!((warm.line_volume_m3 / cold.line_volume_m3 - 1.008).abs() < 1e-12);
    }

    #[test]
    fn constant_and_zero_flow() {
        let s = flow(vec![0.1; 601], 1.0);
        assert!((integrate_flow(&s, 0.0, 600.0).unwrap() - 60.0).abs() < 1e-9);
        let z = flow(vec![0.0; 11], 1.0);
        assert_eq!(integrate_flow(&z, 0.0, 10.0).unwrap(), 0.0);
    }

    #[test]
    fn linear_ramp_is_exact_including_partial_intervals() {
        let s = flow((0..=100).map(|i| 0.002 * i as f64).collect(), 1.0);
        assert!((integrate_flow(&s, 0.0, 100.0).unwrap() - 10.0).abs() < 1e-12);
        // ∫_{10.5}^{20.25} 0.002 t dt
        let exact = 0.001 * (20.25_f64.powi(2) - 10.5_f64.powi(2));
        assert!((integrate_flow(&s, 10.5, 20.25).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn window_outside_span_is_range_error() {
        let s = flow(vec![0.1; 11], 1.0);
        assert!(matches!(integrate_flow(&s, 0.0, 11.0), Err(Error::Range(_))));
        assert!(matches!(integrate_flow(&s, -1.0, 5.0), Err(Error::Range(_))));
        let p = TimeSeries::new("inlet", Channel::PressurePa, 0.0, 1.0, vec![1.0; 11]).unwrap();
        assert!(integrate_flow(&p, 0.0, 5.0).is_err());
    }

    fn snap(t: f64, v: f64) -> InventorySnapshot {
        InventorySnapshot {
            time_s: t,
            line_volume_m3: v,
            mean_pressure_pa: 1e6,
            mean_temperature_k: 300.0,
        }
    }

    #[test]
    fn steady_state_balances_to_zero() {
        let a = flow(vec![0.1; 601], 1.0);
        let b = flow(vec![0.1; 601], 1.0);
        let r = volume_balance(&a, &b, &snap(0.0, 100.0), &snap(600.0, 100.0), (0.0, 600.0)).unwrap();
        assert_eq!(r.leakage_volume_m3, 0.0);
    }

    #[test]
    fn inventory_swell_explains_negative_balance() {
        let a = flow(vec![0.1; 601], 1.0);
        let b = flow(vec![0.1; 601], 1.0);
        let r = volume_balance(&a, &b, &snap(0.0, 100.0), &snap(600.0, 102.0), (0.0, 600.0)).unwrap();
        assert!((r.leakage_volume_m3 + 2.0).abs() < 1e-12);
        assert_eq!(
            r.leakage_volume_m3,
            r.v_in_m3 - r.v_out_m3 - r.delta_inventory_m3
        );
    }

    #[test]
    fn mismatched_snapshot_times_rejected() {
        let a = flow(vec![0.1; 601], 1.0);
        let r = volume_balance(&a, &a, &snap(0.0, 100.0), &snap(500.0, 100.0), (0.0, 600.0));
        assert!(matches!(r, Err(Error::Range(_))));
    }

    fn results(dvs: &[f64]) -> Vec<BalanceResult> {
        dvs.iter()
            .enumerate()
            .map(|(i, &dv)| BalanceResult {
                window: (i as f64 * 600.0, (i + 1) as f64 * 600.0),
                v_in_m3: 0.0,
                v_out_m3: 0.0,
                delta_inventory_m3: -dv,
                leakage_volume_m3: dv,
            })
            .collect()
    }

    #[test]
    fn persistent_imbalance_alarms_on_third_window() {
        let n3 = NonZeroUsize::new(3).unwrap();
        let alarm = detect_imbalance(&results(&[0.5, 2.1, 2.3, 2.2]), 2.0, n3).unwrap();
        assert_eq!(alarm.window_index, 3);
        assert_eq!(alarm.first_exceedance_s, 600.0);
        assert_eq!(alarm.time_s, 2400.0);
        assert!((alarm.cumulative_delta_v_m3 - 6.6).abs() < 1e-12);
    }

    #[test]
    fn no_alarm_cases() {
        let n2 = NonZeroUsize::new(2).unwrap();
        assert!(detect_imbalance(&results(&[0.0; 5]), 2.0, n2).is_none());
        assert!(detect_imbalance(&results(&[0.0, 5.0, 0.0, 5.0]), 2.0, n2).is_none());
    }
}
