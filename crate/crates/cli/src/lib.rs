//! Command-line front end: scenario files, run orchestration and artifacts.

pub mod metrics_file;
pub mod scenario_file;
pub mod svg;
pub mod trajectory_csv;

use clap::Parser;
use hetsafe_core::sim::presets;
use hetsafe_core::{Mode, Scenario};
use metrics_file::MetricsFile;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNSAFE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("scenario schema error: {0}")]
    Schema(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "hetsafe",
    version,
    about = "Simulate a team of double-integrator agents behind a barrier-certificate safety filter"
)]
pub struct RunArgs {
    /// JSON scenario file.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    pub scenario: Option<PathBuf>,
    /// Built-in scenario.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(presets::PRESET_NAMES))]
    pub preset: Option<String>,
    /// Directory for trajectory.csv, metrics.json and trajectory.svg.
    #[arg(long, value_name = "PATH", default_value = ".")]
    pub out_dir: PathBuf,
    /// Override the scenario's constraint mode.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(Mode::ALL.map(Mode::as_str)))]
    pub mode: Option<String>,
    /// Also write trajectory.svg.
    #[arg(long)]
    pub svg: bool,
    /// Suppress the summary on stdout.
    #[arg(long)]
    pub quiet: bool,
}

impl RunArgs {
    pub fn load_scenario(&self) -> Result<Scenario, InputError> {
        let mut sc = match (&self.scenario, &self.preset) {
            (Some(path), _) => scenario_file::parse_scenario(path)?,
            (None, Some(name)) => presets::by_name(name)
                .ok_or_else(|| InputError::Usage(format!("unknown preset `{name}`")))?,
            (None, None) => {
                return Err(InputError::Usage(
                    "one of --scenario or --preset is required".into(),
                ))
            }
        };
        if let Some(m) = &self.mode {
            sc.mode =
                Mode::parse(m).ok_or_else(|| InputError::Usage(format!("unknown mode `{m}`")))?;
        }
        Ok(sc)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), InputError> {
    std::fs::write(path, contents).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn io_err(path: &Path, e: impl ToString) -> InputError {
    InputError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    }
}

/// Run with parsed arguments and write the artifacts; returns the exit code.
pub fn execute(args: &RunArgs) -> i32 {
    let sc = match args.load_scenario() {
        Ok(sc) => sc,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, InputError::Usage(_)) {
                use clap::CommandFactory;
                eprintln!("\n{}", RunArgs::command().render_usage());
            }
            return EXIT_INPUT;
        }
    };
    let (log, metrics) = match hetsafe_core::run(&sc) {
        Ok(out) => out,
        Err(hetsafe_core::SimError::InvalidScenario(msg)) => {
            eprintln!("error: invalid scenario: {msg}");
            return EXIT_INPUT;
        }
        Err(e) => {
            eprintln!("run aborted: {e}");
            return EXIT_UNSAFE;
        }
    };
    let summary = MetricsFile::new(&metrics, &log, &sc);
    let written = (|| -> Result<(), InputError> {
        let dir = &args.out_dir;
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let csv_path = dir.join("trajectory.csv");
        let file = std::fs::File::create(&csv_path).map_err(|e| io_err(&csv_path, e))?;
        trajectory_csv::write_csv(&log, &sc, std::io::BufWriter::new(file))
            .map_err(|e| io_err(&csv_path, e))?;
        write_file(&dir.join("metrics.json"), &summary.to_json())?;
        if args.svg {
            write_file(&dir.join("trajectory.svg"), &svg::render_svg(&log, &sc))?;
        }
        Ok(())
    })();
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    if !args.quiet {
        let fmt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        let max_goal_err = summary.goal_errors_m.iter().copied().fold(0.0, f64::max);
        println!(
            "mode={} agents={} steps={} min_pair_margin_m={} min_h={} max_goal_err_m={:.4} infeasible={} deadlock={} safe={}",
            summary.mode,
            sc.n_agents(),
            summary.steps,
            fmt(summary.min_pair_margin_m),
            fmt(summary.min_h_m_per_s),
            max_goal_err,
            summary.qp_infeasible_count,
            summary.deadlock_detected,
            summary.safe
        );
    }
    if summary.safe {
        EXIT_OK
    } else {
        eprintln!("safety violation: min_h below tolerance");
        EXIT_UNSAFE
    }
}

/// Parse `argv` (including the program name) and run.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunArgs::try_parse_from(argv) {
        Ok(args) => execute(&args),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
