//! `drawjectory`: plan drone trajectories from recorded demonstrations.

use std::io::{IsTerminal, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drawjectory_core::bundle::PlanBundle;
use drawjectory_core::mission::{execute_mission, parse_mission};
use drawjectory_core::recording::{load_flight_path, save_flight_path, Format};
use drawjectory_core::sampling::{save_waypoints, SamplingConfig, SamplingStrategy};
use drawjectory_core::{EditOp, FeasibilityLimits, FlightPath, Mission, PlanRequest, SimilarityReport, Vec3};
use drawjectory_service::{ServeOptions, DEFAULT_HOST, DEFAULT_PORT};

#[derive(Debug, Parser)]
#[command(name = "drawjectory", version, about = "Trajectory planning by demonstration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Work with mission scripts.
    #[command(subcommand)]
    Mission(MissionCommand),
    /// Cut a recording down to the points between two indices (inclusive).
    Trim {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        start: usize,
        #[arg(long)]
        end: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Select waypoints from a recording.
    Sample {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        trim: TrimArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Sample, interpolate and check a recording; writes a plan bundle.
    Plan {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        trim: TrimArgs,
        #[command(flatten)]
        limits: LimitArgs,
        /// Apply an edit (JSON, e.g. '{"kind":"shift","offset":[0.1,0,0]}'); repeatable.
        #[arg(long = "edit", value_name = "JSON")]
        edits: Vec<String>,
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Append edits to a plan bundle and replan.
    Edit {
        /// Plan bundle, or `-` for stdin.
        bundle: Option<PathBuf>,
        #[arg(long = "edit", value_name = "JSON", required = true)]
        edits: Vec<String>,
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Print the feasibility report of a plan bundle, optionally under other limits.
    Check {
        bundle: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
        #[arg(long)]
        strict: bool,
    },
    /// Print the error report of a plan bundle.
    Metrics {
        bundle: Option<PathBuf>,
        /// Only RSME and MAE.
        #[arg(long)]
        summary: bool,
    },
    /// Compare two recordings: Hausdorff, Fréchet and DTW distances.
    Similarity {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value = DEFAULT_HOST)]
        host: String,
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        /// Directory of static editor assets.
        #[arg(long)]
        assets: Option<PathBuf>,
        /// Restore sessions from, and save them to, this directory.
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum MissionCommand {
    /// Execute a mission script and write the simulated recording.
    Run {
        script: PathBuf,
        /// Cruise speed in m/s.
        #[arg(long, default_value_t = 0.5)]
        cruise: f64,
        /// Time between emitted points in seconds.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// Recording file; stdin when omitted or `-`.
    input: Option<PathBuf>,
    /// Input format; inferred from the extension, CSV for stdin.
    #[arg(long)]
    input_format: Option<Format>,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Format for recording and waypoint output; inferred from the extension.
    #[arg(long)]
    output_format: Option<Format>,
}

#[derive(Debug, Args)]
struct SamplingArgs {
    #[arg(long, default_value = "equidistant")]
    strategy: SamplingStrategy,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrimArgs {
    /// First index kept (default: 0).
    #[arg(long)]
    start: Option<usize>,
    /// Last index kept (default: last point).
    #[arg(long)]
    end: Option<usize>,
}

#[derive(Debug, Args)]
struct LimitArgs {
    /// Speed limit in m/s.
    #[arg(long)]
    vmax: Option<f64>,
    /// Acceleration limit in m/s².
    #[arg(long)]
    amax: Option<f64>,
    /// Flight volume as `xmin,ymin,zmin,xmax,ymax,zmax`.
    #[arg(long = "box", value_name = "BOX")]
    bounds: Option<BoxArg>,
    /// Sampling step for checks and control points, in seconds.
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct BoxArg([f64; 6]);

impl std::str::FromStr for BoxArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let values: Vec<f64> = s
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
            .collect::<Result<_, _>>()?;
        let values: [f64; 6] =
            values.try_into().map_err(|v: Vec<f64>| format!("expected 6 values, got {}", v.len()))?;
        Ok(BoxArg(values))
    }
}

impl LimitArgs {
    fn apply(&self, mut limits: FeasibilityLimits) -> FeasibilityLimits {
        if let Some(v) = self.vmax {
            limits.v_max = v;
        }
        if self.amax.is_some() {
            limits.a_max = self.amax;
        }
        if let Some(BoxArg([x0, y0, z0, x1, y1, z1])) = self.bounds {
            limits.box_min = Vec3::new(x0, y0, z0);
            limits.box_max = Vec3::new(x1, y1, z1);
        }
        if let Some(step) = self.step {
            limits.check_step = step;
        }
        limits
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("invalid edit `{text}`: {source}")]
    Edit { text: String, source: serde_json::Error },
    #[error("trajectory is infeasible ({0} violations)")]
    Infeasible(usize),
    #[error(transparent)]
    Core(#[from] drawjectory_core::Error),
    #[error(transparent)]
    Service(#[from] drawjectory_service::ServiceError),
}

impl CliError {
    fn code(&self) -> &str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::File { .. } => "io",
            CliError::Edit { .. } => "invalid_edit",
            CliError::Infeasible(_) => "infeasible",
            CliError::Core(e) => e.code(),
            CliError::Service(e) => e.code(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Infeasible(_) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_input(path: Option<&Path>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    match path {
        Some(p) if p != Path::new("-") => {
            buf = std::fs::read(p).map_err(|source| CliError::File { path: p.to_path_buf(), source })?;
        }
        _ => {
            let mut stdin = std::io::stdin();
            if stdin.is_terminal() {
                return Err(CliError::Usage("no input file given and stdin is a terminal".into()));
            }
            stdin.read_to_end(&mut buf).map_err(|source| CliError::File { path: "<stdin>".into(), source })?;
        }
    }
    Ok(buf)
}

fn format_for(path: Option<&Path>, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| match path {
        Some(p) if p != Path::new("-") => Format::from_path(p),
        _ => Format::Csv,
    })
}

impl Input {
    fn load(&self) -> CliResult<FlightPath> {
        let bytes = read_input(self.input.as_deref())?;
        let path = load_flight_path(bytes.as_slice(), format_for(self.input.as_deref(), self.input_format))?;
        log::info!("loaded {} points", path.points().len());
        Ok(path)
    }
}

impl Output {
    fn format(&self) -> Format {
        format_for(self.output.as_deref(), self.output_format)
    }

    fn write(&self, bytes: &[u8]) -> CliResult<()> {
        match &self.output {
            Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::File { path: path.clone(), source }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(bytes)
                    .and_then(|_| stdout.flush())
                    .map_err(|source| CliError::File { path: "<stdout>".into(), source })
            }
        }
    }
}

impl TrimArgs {
    fn apply(&self, path: FlightPath) -> CliResult<FlightPath> {
        if self.start.is_none() && self.end.is_none() {
            return Ok(path);
        }
        let last = path.points().len() - 1;
        Ok(path.trim(self.start.unwrap_or(0), self.end.unwrap_or(last))?)
    }
}

fn parse_edits(texts: &[String]) -> CliResult<Vec<EditOp>> {
    texts
        .iter()
        .map(|text| serde_json::from_str(text).map_err(|source| CliError::Edit { text: text.clone(), source }))
        .collect()
}

fn load_bundle(path: Option<&Path>) -> CliResult<PlanBundle> {
    let bytes = read_input(path)?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::Usage(format!("bundle is not UTF-8: {e}")))?;
    Ok(PlanBundle::from_json(&text)?)
}

/// Plans `request`, writes the bundle, then applies the `--strict` policy.
fn plan_and_write(request: &PlanRequest, strict: bool, output: &Output) -> CliResult<()> {
    let (bundle, result) = PlanBundle::plan(request)?;
    output.write(bundle.to_json()?.as_bytes())?;
    let violations = result.feasibility.violations.len();
    if !result.feasible() {
        log::warn!("trajectory violates limits at {violations} samples");
        if strict {
            return Err(CliError::Infeasible(violations));
        }
    }
    Ok(())
}

fn pretty(value: &impl serde::Serialize) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(drawjectory_core::Error::from)?;
    text.push('\n');
    Ok(text)
}

fn print(text: &str) -> CliResult<()> {
    Output { output: None, output_format: None }.write(text.as_bytes())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Mission(MissionCommand::Run { script, cruise, step, output }) => {
            let text =
                std::fs::read_to_string(&script).map_err(|source| CliError::File { path: script.clone(), source })?;
            let mission: Mission = parse_mission(&text)?;
            let path = execute_mission(&mission, cruise, step)?;
            log::info!("mission produced {} points over {:.3} s", path.points().len(), path.duration());
            let mut buf = Vec::new();
            save_flight_path(&path, output.format(), &mut buf)?;
            output.write(&buf)
        }
        Command::Trim { input, start, end, output } => {
            let path = input.load()?.trim(start, end)?.to_trimmed();
            let mut buf = Vec::new();
            save_flight_path(&path, output.format(), &mut buf)?;
            output.write(&buf)
        }
        Command::Sample { input, sampling, trim, output } => {
            let path = trim.apply(input.load()?)?;
            let config = SamplingConfig { strategy: sampling.strategy, n: sampling.n, seed: sampling.seed };
            let waypoints = config.sample(path.effective_points())?;
            let mut buf = Vec::new();
            save_waypoints(&waypoints, output.format(), &mut buf)?;
            output.write(&buf)
        }
        Command::Plan { input, sampling, trim, limits, edits, strict, output } => {
            let request = PlanRequest {
                flight_path: trim.apply(input.load()?)?,
                sampling: SamplingConfig { strategy: sampling.strategy, n: sampling.n, seed: sampling.seed },
                limits: limits.apply(FeasibilityLimits::default()),
                edits: parse_edits(&edits)?,
            };
            plan_and_write(&request, strict, &output)
        }
        Command::Edit { bundle, edits, strict, output } => {
            let mut request = load_bundle(bundle.as_deref())?.to_request()?;
            request.edits.extend(parse_edits(&edits)?);
            plan_and_write(&request, strict, &output)
        }
        Command::Check { bundle, limits, strict } => {
            let mut request = load_bundle(bundle.as_deref())?.to_request()?;
            request.limits = limits.apply(request.limits);
            let result = drawjectory_core::pipeline::run_pipeline(&request)?;
            print(&pretty(&result.feasibility)?)?;
            if strict && !result.feasible() {
                return Err(CliError::Infeasible(result.feasibility.violations.len()));
            }
            Ok(())
        }
        Command::Metrics { bundle, summary } => {
            let error = load_bundle(bundle.as_deref())?.error;
            if summary {
                print(&pretty(&serde_json::json!({ "rsme": error.rsme, "mae": error.mae }))?)
            } else {
                print(&pretty(&error)?)
            }
        }
        Command::Similarity { a, b, format } => {
            let load = |p: &Path| -> CliResult<FlightPath> {
                Input { input: Some(p.to_path_buf()), input_format: format }.load()
            };
            let report: SimilarityReport = SimilarityReport::compute(&load(&a)?.positions(), &load(&b)?.positions())?;
            print(&pretty(&report)?)
        }
        Command::Serve { host, port, assets, snapshot_dir } => {
            Ok(drawjectory_service::serve_blocking(ServeOptions { host, port, assets, snapshot_dir })?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DRAWJECTORY_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let mut lines = rendered.lines();
            let first = lines.next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("error[usage]: {first}");
            for line in lines {
                eprintln!("{line}");
            }
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code())
        }
    }
}
