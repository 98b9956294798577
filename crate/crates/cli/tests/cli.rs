//! End-to-end runs of the `leakline` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use leakline::commands::{read_truth, Alarm, AlarmKind};
use leakline::telemetry::{self, write_series};
use leakline_core::acoustic::Severity;
use leakline_core::domain::{Channel, TimeSeries};
use leakline_core::inventory::BalanceResult;
use leakline_core::localize::LeakFix;
use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_leakline");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn write_json(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

struct Workspace {
    dir: TempDir,
    config: PathBuf,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let config = write_json(dir.path(), "config.json", &load("case_study_config.json"));
        Workspace { dir, config }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn with_config(self, edit: impl FnOnce(&mut Value)) -> Self {
        let mut c = load("case_study_config.json");
        edit(&mut c);
        write_json(self.dir.path(), "config.json", &c);
        self
    }

    /// Simulates `scenario` into a fresh directory named `out`.
    fn simulate(&self, scenario: &Value, out: &str) -> PathBuf {
        let s = write_json(self.dir.path(), &format!("{out}.json"), scenario);
        let out_dir = self.path(out);
        let o = run(&[
            "simulate",
            "-c",
            self.config.to_str().unwrap(),
            s.to_str().unwrap(),
            out_dir.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        out_dir
    }

    fn cmd(&self, sub: &str, telemetry: &Path, extra: &[&str]) -> Output {
        let mut args = vec![sub, "-c", self.config.to_str().unwrap(), telemetry.to_str().unwrap()];
        args.extend_from_slice(extra);
        run(&args)
    }
}

fn parse_lines<T: serde::de::DeserializeOwned>(text: &str) -> Vec<T> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn no_leak(mut scenario: Value) -> Value {
    scenario["leak_geometry"]["hole_diameter_m"] = json!(0.0);
    scenario
}

#[test]
fn simulate_writes_four_csvs_and_truth() {
    let ws = Workspace::new();
    let out = ws.simulate(&load("case_study_scenario.json"), "run");
    for name in [
        "inlet_pressure_pa.csv",
        "outlet_pressure_pa.csv",
        "inlet_flow_m3_s.csv",
        "outlet_flow_m3_s.csv",
    ] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        assert!(text.starts_with("timestamp_s,station_id,channel,value\n"));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 1 + 30_001);
    }
    let truth = read_truth(&out).unwrap();
    let dt = truth.arrival_inlet_s - truth.arrival_outlet_s;
    assert!((dt - 14.95).abs() < 1e-3, "{dt}");
}

#[test]
fn zero_duration_is_a_schema_error() {
    let ws = Workspace::new();
    let mut s = load("case_study_scenario.json");
    s["duration_s"] = json!(0.0);
    let path = write_json(ws.dir.path(), "s.json", &s);
    let o = run(&["simulate", "-c", ws.config.to_str().unwrap(), path.to_str().unwrap(), ws.path("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("duration_s"), "{}", stderr(&o));
}

#[test]
fn schema_errors_name_field_and_line() {
    let ws = Workspace::new();
    let mut s = load("case_study_scenario.json");
    s["noise"]["gaussian_sigma"] = json!(1.0);
    let path = write_json(ws.dir.path(), "s.json", &s);
    let o = run(&["simulate", "-c", ws.config.to_str().unwrap(), path.to_str().unwrap(), ws.path("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("noise") && err.contains("gaussian_sigma") && err.contains("line"), "{err}");

    let ws = ws.with_config(|c| c["schema_version"] = json!(7));
    let o = run(&["simulate", "-c", ws.config.to_str().unwrap(), path.to_str().unwrap(), ws.path("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("schema_version"));

    let ws = ws.with_config(|c| c["fluid"]["density_kg_m3"] = json!("heavy"));
    let o = run(&["detect", "-c", ws.config.to_str().unwrap(), "."]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fluid.density_kg_m3"), "{}", stderr(&o));
}

#[test]
fn same_seed_same_bytes_and_seed_flag_overrides() {
    let ws = Workspace::new();
    let s = load("case_study_scenario.json");
    let a = ws.simulate(&s, "a");
    let b = ws.simulate(&s, "b");
    let c = ws.path("c");
    let scen = ws.path("a.json");
    let o = run(&[
        "simulate",
        "-c",
        ws.config.to_str().unwrap(),
        scen.to_str().unwrap(),
        c.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert!(o.status.success());
    let name = "inlet_pressure_pa.csv";
    assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
    assert_ne!(fs::read(a.join(name)).unwrap(), fs::read(c.join(name)).unwrap());
}

#[test]
fn detect_is_silent_without_a_leak() {
    let ws = Workspace::new();
    let out = ws.simulate(&no_leak(load("case_study_scenario.json")), "quiet");
    let o = ws.cmd("detect", &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "");
}

#[test]
fn detect_locates_case_study_leak() {
    let ws = Workspace::new();
    let out = ws.simulate(&load("case_study_scenario.json"), "leak");
    let o = ws.cmd("detect", &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let alarms: Vec<Alarm> = parse_lines(&stdout(&o));
    assert_eq!(alarms.len(), 1);
    let a = &alarms[0];
    assert_eq!(a.kind, AlarmKind::PressureWaveLeak);
    assert!((a.chainage_m.unwrap() - 39_340.0).abs() <= 50.0);
    assert!((a.time_difference_s.unwrap() - 14.95).abs() <= 0.05);
    assert!((a.time_s - 100.0).abs() <= 0.05);
    assert!(a.delta_v_m3.is_none());
    assert_eq!(a.severity, Severity::Repair30d);
    assert!((0.0..=1.0).contains(&a.confidence));
    assert!(a.notes.contains("without flow"));
    // optional fields are present as null
    assert!(stdout(&o).contains("\"delta_v_m3\":null"));
}

fn superpose(a: &TimeSeries, b: &TimeSeries, base: &TimeSeries) -> TimeSeries {
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .zip(base.values())
        .map(|((x, y), z)| x + y - z)
        .collect();
    TimeSeries::new(a.station_id(), a.channel(), a.start_time_s(), a.sample_interval_s(), values).unwrap()
}

#[test]
fn two_incidents_give_two_alarms_in_order() {
    let ws = Workspace::new();
    let mut s = load("case_study_scenario.json");
    s["duration_s"] = json!(400.0);
    s["noise"] = json!({});
    let mut first = s.clone();
    first["leak_chainage_m"] = json!(45_000.0);
    first["leak_start_s"] = json!(250.0);
    let mut second = s.clone();
    second["leak_chainage_m"] = json!(12_000.0);
    second["leak_start_s"] = json!(120.0);
    let runs = [ws.simulate(&first, "first"), ws.simulate(&second, "second"), ws.simulate(&no_leak(s), "base")];
    let read = |d: &Path| telemetry::read_dir(d).unwrap();
    let (a, b, base) = (read(&runs[0]), read(&runs[1]), read(&runs[2]));
    let combined = ws.path("combined");
    fs::create_dir(&combined).unwrap();
    for station in ["inlet", "outlet"] {
        for ch in [Channel::PressurePa, Channel::FlowM3S] {
            let series = superpose(
                a.get(station, ch).unwrap(),
                b.get(station, ch).unwrap(),
                base.get(station, ch).unwrap(),
            );
            write_series(&combined, &series).unwrap();
        }
    }
    let o = ws.cmd("detect", &combined, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let alarms: Vec<Alarm> = parse_lines(&stdout(&o));
    assert_eq!(alarms.len(), 2, "{}", stdout(&o));
    assert!(alarms[0].time_s < alarms[1].time_s);
    assert!((alarms[0].chainage_m.unwrap() - 12_000.0).abs() <= 50.0);
    assert!((alarms[1].chainage_m.unwrap() - 45_000.0).abs() <= 50.0);
}

#[test]
fn malformed_row_names_file_and_line() {
    let ws = Workspace::new();
    let out = ws.simulate(&no_leak(load("case_study_scenario.json")), "bad");
    let path = out.join("outlet_pressure_pa.csv");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[5] = "0.04,outlet,pressure_pa,not-a-number";
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let o = ws.cmd("detect", &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("outlet_pressure_pa.csv:6"), "{err}");

    lines[5] = "0.04,outlet,pressure_psi,1";
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let o = ws.cmd("detect", &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("outlet_pressure_pa.csv:6"));
}

#[test]
fn balance_quiet_when_steady() {
    let ws = Workspace::new();
    let mut s = no_leak(load("case_study_scenario.json"));
    s["duration_s"] = json!(1800.0);
    s["sample_rate_hz"] = json!(10.0);
    let out = ws.simulate(&s, "steady");
    let o = ws.cmd("balance", &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(!text.contains("VOLUME_IMBALANCE"));
    let rows: Vec<BalanceResult> = parse_lines(&text);
    assert_eq!(rows.len(), 3);
    // flow noise 5e-4 m³/s over 600 s averages out to well under 0.1 m³
    assert!(rows.iter().all(|r| r.leakage_volume_m3.abs() < 0.1), "{text}");
}

#[test]
fn balance_recovers_noiseless_leak_volume() {
    let ws = Workspace::new();
    let mut s = load("case_study_scenario.json");
    s["noise"] = json!({});
    s["sample_rate_hz"] = json!(10.0);
    s["duration_s"] = json!(1300.0);
    s["leak_start_s"] = json!(0.0);
    s["leak_chainage_m"] = json!(30_000.0);
    // hole sized for 0.005 m³/s at 4 MPa
    let d = leakline_core::sim::orifice_hole_diameter(0.005, 4e6, 850.0);
    s["leak_geometry"]["hole_diameter_m"] = json!(d);
    let out = ws.simulate(&s, "small");
    let o = ws.cmd("balance", &out, &["--window-s", "600"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let windows: Vec<BalanceResult> =
        text.lines().filter(|l| l.contains("\"window\"")).map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(windows.len(), 2);
    // second window starts after both arrivals: exactly rate × duration
    let dv = windows[1].leakage_volume_m3;
    assert!((dv - 3.0).abs() <= 0.03, "{dv}");
    assert!(text.contains("VOLUME_IMBALANCE"));
}

fn constant_series(station: &str, channel: Channel, n: usize, f: impl Fn(f64) -> f64) -> TimeSeries {
    let values = (0..n).map(|i| f(i as f64)).collect();
    TimeSeries::new(station, channel, 0.0, 1.0, values).unwrap()
}

#[test]
fn heating_only_is_explained_by_inventory() {
    let ws = Workspace::new();
    let dir = ws.path("heating");
    fs::create_dir(&dir).unwrap();
    let n = 1201;
    for station in ["inlet", "outlet"] {
        write_series(&dir, &constant_series(station, Channel::FlowM3S, n, |_| 0.3)).unwrap();
        write_series(&dir, &constant_series(station, Channel::PressurePa, n, |_| 4e6)).unwrap();
        // +2 K over 20 minutes
        write_series(&dir, &constant_series(station, Channel::TemperatureK, n, |t| 288.15 + 2.0 * t / 1200.0)).unwrap();
    }
    let o = ws.cmd("balance", &dir, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows: Vec<BalanceResult> = parse_lines(&stdout(&o));
    assert_eq!(rows.len(), 2);
    let area = std::f64::consts::PI / 4.0 * 0.5 * 0.5;
    let expected = area * 61_480.0 * 8e-4 * 1.0;
    for r in &rows {
        assert!((r.delta_inventory_m3 - expected).abs() < 1e-6 * expected);
        assert!((r.leakage_volume_m3 + expected).abs() < 1e-6 * expected);
    }

    let ws = ws.with_config(|c| c["balance"]["compensation"] = json!(false));
    let o = ws.cmd("balance", &dir, &[]);
    let rows: Vec<BalanceResult> = parse_lines(&stdout(&o));
    assert!(rows.iter().all(|r| r.delta_inventory_m3 == 0.0));
}

#[test]
fn paths_from_config_resolve_relative_to_it() {
    let ws = Workspace::new();
    fs::copy(fixture("case_study_scenario.json"), ws.path("scenario.json")).unwrap();
    let ws = ws.with_config(|c| {
        c["paths"] = json!({ "scenario": "scenario.json", "out_dir": "tele", "telemetry_dir": "tele" });
    });
    assert!(run(&["simulate", "-c", ws.config.to_str().unwrap()]).status.success());
    let o = run(&["detect", "-c", ws.config.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1);

    let ws = ws.with_config(|c| c["paths"] = json!({ "telemetry_dir": "missing" }));
    let o = run(&["detect", "-c", ws.config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does not exist"));
}

fn localize(args: &[&str]) -> Output {
    let mut all = vec!["localize"];
    all.extend_from_slice(args);
    run(&all)
}

#[test]
fn localize_examples() {
    let o = localize(&["14.95", "0", "--length", "61480", "--velocity", "1150.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    let fix: LeakFix = serde_json::from_str(&text).unwrap();
    assert!((fix.chainage_m - 39_340.0).abs() <= 20.0);

    let o = localize(&["3", "3", "--length", "61.48km", "--velocity", "1150.5"]);
    let fix: LeakFix = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(fix.chainage_m, 30_740.0);

    let o = localize(&["-60", "0", "--length", "61480", "--velocity", "1150.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("time difference"), "{}", stderr(&o));
}

#[test]
fn localize_with_profile_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut profile = load("case_study_config.json")["profile"].clone();
    profile["velocity_segments"] = json!([
        { "start_m": 0.0, "end_m": 30740.0, "wave_speed_m_s": 1100.0 },
        { "start_m": 30740.0, "end_m": 61480.0, "wave_speed_m_s": 1200.0 }
    ]);
    let path = write_json(dir.path(), "profile.json", &profile);
    let o = localize(&["0", "0", "--profile", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fix: LeakFix = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(fix.chainage_m < 30_740.0);

    let o = localize(&["0", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn classify_examples() {
    let severity = |args: &[&str]| -> String {
        let mut all = vec!["classify"];
        all.extend_from_slice(args);
        let o = run(&all);
        assert!(o.status.success(), "{}", stderr(&o));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        v["severity"].as_str().unwrap().to_string()
    };
    assert_eq!(severity(&["--pressure-bar", "69", "--hole-ratio", "0.2"]), "URGENT_24_48H");
    assert_eq!(severity(&["--pressure-bar", "69", "--hole-ratio", "0.05"]), "REPAIR_30D");
    assert_eq!(severity(&["--pressure-bar", "69", "--hole-ratio", "0.005"]), "MONITOR");
    assert_eq!(severity(&["--pressure-bar", "69", "--hole-mm", "50", "--pipe-mm", "500"]), "URGENT_24_48H");
    // 0.2 ratio at 10 mbar drops only 1.2 Pa: below the sensor floor
    assert_eq!(severity(&["--pressure-bar", "10mbar", "--hole-ratio", "0.2"]), "MONITOR");

    let o = run(&["classify", "--pressure-bar", "69", "--hole-ratio", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["classify", "--pressure-bar", "69", "--hole-ratio", "0.1", "--hole-mm", "5", "--pipe-mm", "50"]);
    assert_eq!(o.status.code(), Some(2));
}
