use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use leakline::commands::{self, SpeedModel};
use leakline::config::{read_json, RunConfig};
use leakline::telemetry;
use leakline::units::{parse_quantity, Dimension};
use leakline::CliError;
use leakline_core::domain::PipelineProfile;
use serde::Serialize;

/// Pipeline leak detection runs over CSV telemetry.
///
/// Exit status: 0 on success, 1 when the inputs admit no answer (for example
/// an arrival-time difference longer than the line), 2 on invalid input.
#[derive(Parser)]
#[command(name = "leakline", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Run configuration (JSON).
    #[arg(long, short)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a leak scenario and write telemetry CSVs plus truth.json.
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        /// Scenario file (JSON); defaults to `paths.scenario` in the config.
        scenario: Option<PathBuf>,
        /// Output directory; defaults to `paths.out_dir` in the config.
        out_dir: Option<PathBuf>,
        /// Override the scenario's RNG seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Detect and locate pressure-wave leaks; prints NDJSON alarms.
    Detect {
        #[command(flatten)]
        config: ConfigArg,
        /// Telemetry directory; defaults to `paths.telemetry_dir`.
        telemetry_dir: Option<PathBuf>,
    },
    /// Windowed volume balance; prints NDJSON balance results and alarms.
    Balance {
        #[command(flatten)]
        config: ConfigArg,
        telemetry_dir: Option<PathBuf>,
        /// Window length in seconds; defaults to `balance.window_s`.
        #[arg(long)]
        window_s: Option<f64>,
    },
    /// Leak chainage from the inlet and outlet arrival times (s).
    #[command(allow_negative_numbers = true)]
    Localize {
        t_inlet: f64,
        t_outlet: f64,
        /// Line length, e.g. `61480`, `61.48km`.
        #[arg(long, value_parser = length, requires = "velocity", conflicts_with = "profile")]
        length: Option<f64>,
        /// Uniform wave speed, m/s.
        #[arg(long, requires = "length")]
        velocity: Option<f64>,
        /// Pipeline profile (JSON) with piecewise wave speeds.
        #[arg(long, required_unless_present = "length")]
        profile: Option<PathBuf>,
    },
    /// Repair-urgency class of a leak.
    Classify {
        /// Static line pressure; bare numbers are bar.
        #[arg(long, value_parser = pressure_bar)]
        pressure_bar: f64,
        /// Hole-to-pipe diameter ratio.
        #[arg(long, conflicts_with_all = ["hole_mm", "pipe_mm"], required_unless_present = "hole_mm")]
        hole_ratio: Option<f64>,
        /// Hole diameter; bare numbers are mm.
        #[arg(long, value_parser = millimetres, requires = "pipe_mm")]
        hole_mm: Option<f64>,
        /// Pipe inner diameter; bare numbers are mm.
        #[arg(long, value_parser = millimetres, requires = "hole_mm")]
        pipe_mm: Option<f64>,
        /// Sensor resolution floor; bare numbers are Pa.
        #[arg(long, value_parser = pascals, default_value = "500")]
        sensor_floor: f64,
    },
}

fn length(s: &str) -> Result<f64, String> {
    parse_quantity(s, Dimension::Length, "m")
}

fn millimetres(s: &str) -> Result<f64, String> {
    parse_quantity(s, Dimension::Length, "mm")
}

fn pressure_bar(s: &str) -> Result<f64, String> {
    parse_quantity(s, Dimension::Pressure, "bar")
}

fn pascals(s: &str) -> Result<f64, String> {
    parse_quantity(s, Dimension::Pressure, "Pa")
}

fn print_lines<T: Serialize>(records: &[T]) -> io::Result<()> {
    let mut out = BufWriter::new(io::stdout().lock());
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

fn load_telemetry(config: &RunConfig, dir: Option<&Path>) -> Result<telemetry::Telemetry, CliError> {
    let dir = config.resolve(dir, config.paths.telemetry_dir.as_ref(), "telemetry directory", true)?;
    telemetry::read_dir(&dir)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let stdout_err = |e: io::Error| CliError::io(Path::new("<stdout>"), e);
    match cli.command {
        Command::Simulate {
            config,
            scenario,
            out_dir,
            seed,
        } => {
            let config = RunConfig::load(&config.config)?;
            let scenario = config.resolve(scenario.as_deref(), config.paths.scenario.as_ref(), "scenario", true)?;
            let out_dir = config.resolve(out_dir.as_deref(), config.paths.out_dir.as_ref(), "output directory", false)?;
            let written = commands::simulate(&config, &scenario, &out_dir, seed)?;
            for path in written {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Detect { config, telemetry_dir } => {
            let config = RunConfig::load(&config.config)?;
            let telemetry = load_telemetry(&config, telemetry_dir.as_deref())?;
            print_lines(&commands::detect(&config, &telemetry)?).map_err(stdout_err)?;
        }
        Command::Balance {
            config,
            telemetry_dir,
            window_s,
        } => {
            let config = RunConfig::load(&config.config)?;
            let telemetry = load_telemetry(&config, telemetry_dir.as_deref())?;
            let window = window_s.unwrap_or(config.balance.window_s);
            print_lines(&commands::balance(&config, &telemetry, window)?).map_err(stdout_err)?;
        }
        Command::Localize {
            t_inlet,
            t_outlet,
            length,
            velocity,
            profile,
        } => {
            let loaded: PipelineProfile;
            let model = match (length, velocity, profile) {
                (Some(length_m), Some(wave_speed_m_s), _) => SpeedModel::Uniform {
                    length_m,
                    wave_speed_m_s,
                },
                (_, _, Some(path)) => {
                    loaded = read_json(&path)?;
                    SpeedModel::Profile(&loaded)
                }
                _ => unreachable!("clap enforces --length/--velocity or --profile"),
            };
            print_lines(&[commands::localize(t_inlet, t_outlet, model)?]).map_err(stdout_err)?;
        }
        Command::Classify {
            pressure_bar,
            hole_ratio,
            hole_mm,
            pipe_mm,
            sensor_floor,
        } => {
            let ratio = match (hole_ratio, hole_mm, pipe_mm) {
                (Some(r), _, _) => r,
                (None, Some(h), Some(p)) if p > 0.0 => h / p,
                (None, Some(_), Some(p)) => {
                    return Err(CliError::Input(format!("pipe diameter must be > 0 (got {p} m)")))
                }
                _ => unreachable!("clap enforces --hole-ratio or --hole-mm with --pipe-mm"),
            };
            print_lines(&[commands::classify(pressure_bar, ratio, sensor_floor)?]).map_err(stdout_err)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("leakline: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
