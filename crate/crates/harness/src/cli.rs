//! `headpoint` command line.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use headpoint_core::analysis::{Dispersion, Grouping};
use headpoint_core::geometry::{GeometryError, ScreenGeometry};
use headpoint_core::synth::Anisotropy;
use headpoint_core::trials::{build_layout, Distance, LayoutName, LayoutParams};
use rayon::prelude::*;
use thiserror::Error;

use crate::eventlog::{EventLog, EventLogError};
use crate::replay::{replay, ReplayError};
use crate::study::{analyze_logs, synth_study, MotionOverrides, StudyError, StudyPlan};
use crate::trace::{TraceError, TraceFile};

/// Environment variable overriding the default screen profile.
pub const SCREEN_PROFILE_ENV: &str = "HEADPOINT_SCREEN_PROFILE";
pub const TRACE_EXT: &str = "trace";
pub const EVENTS_EXT: &str = "events";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Trace {
        path: PathBuf,
        #[source]
        source: TraceError,
    },
    #[error("{path}: {source}")]
    Replay {
        path: PathBuf,
        #[source]
        source: ReplayError,
    },
    #[error("{path}: {source}")]
    Events {
        path: PathBuf,
        #[source]
        source: EventLogError,
    },
    #[error(transparent)]
    Study(#[from] StudyError),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "headpoint",
    version,
    about = "Head-pointing sessions: synthetic traces, replay, analysis and live service"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic study traces.
    Synth(SynthArgs),
    /// Replay a trace file, or every trace in a directory, into event logs.
    Replay(ReplayArgs),
    /// Compute per-trial and per-sequence statistics from event logs.
    Analyze(AnalyzeArgs),
    /// Run the WebSocket session service.
    Serve(ServeArgs),
    /// Print the layout document of a test layout.
    Layout(LayoutArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutChoice {
    Numbers,
    Alphabets,
    All,
}

impl LayoutChoice {
    fn names(self) -> Vec<LayoutName> {
        match self {
            LayoutChoice::Numbers => vec![LayoutName::Numbers],
            LayoutChoice::Alphabets => vec![LayoutName::Alphabets],
            LayoutChoice::All => LayoutName::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceChoice {
    Near,
    Mid,
    Far,
    All,
}

impl DistanceChoice {
    fn distances(self) -> Vec<Distance> {
        match self {
            DistanceChoice::Near => vec![Distance::Near],
            DistanceChoice::Mid => vec![Distance::Mid],
            DistanceChoice::Far => vec![Distance::Far],
            DistanceChoice::All => Distance::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub participants: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = LayoutChoice::All)]
    pub layout: LayoutChoice,
    #[arg(long, value_enum, default_value_t = DistanceChoice::All)]
    pub distance: DistanceChoice,
    #[arg(long)]
    pub out: PathBuf,
    /// Jitter standard deviation while holding on a target (pt).
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    #[arg(long)]
    pub frame_ms: Option<f64>,
    #[arg(long)]
    pub hold_ms: Option<f64>,
    #[arg(long)]
    pub move_ms_per_pt: Option<f64>,
    /// Major axis angle of anisotropic jitter (degrees, screen coordinates).
    #[arg(long, requires = "anisotropy_ratio")]
    pub anisotropy_deg: Option<f64>,
    /// Major over minor jitter standard deviation.
    #[arg(long, requires = "anisotropy_deg")]
    pub anisotropy_ratio: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Trace file or directory of `.trace` files.
    #[arg(long)]
    pub trace: PathBuf,
    /// Event log file, or output directory when `--trace` is a directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Directory of `.events` files.
    #[arg(long)]
    pub events: PathBuf,
    /// Output directory for the CSV files.
    #[arg(long)]
    pub out: PathBuf,
    /// Pool all participants per distance and layout in sequences.csv.
    #[arg(long)]
    pub pooled: bool,
    /// Use the population standard deviation instead of the sample one.
    #[arg(long)]
    pub population: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8787")]
    pub listen: SocketAddr,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    #[arg(long, value_parser = parse_layout_name)]
    pub name: LayoutName,
    /// `WxH` or `WxH:MX:MY` (points, meters per NDC unit).
    #[arg(long, value_parser = parse_screen_profile)]
    pub screen: Option<ScreenGeometry>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_layout_name(s: &str) -> Result<LayoutName, String> {
    s.parse::<LayoutName>().map_err(|e| e.to_string())
}

/// Parses `WxH` or `WxH:MX:MY`.
pub fn parse_screen_profile(s: &str) -> Result<ScreenGeometry, String> {
    let bad = || format!("invalid screen profile {s:?} (expected WxH or WxH:MX:MY)");
    let mut parts = s.split(':');
    let size = parts.next().ok_or_else(bad)?;
    let (w, h) = size.split_once(['x', 'X']).ok_or_else(bad)?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
    let (w, h) = (num(w)?, num(h)?);
    let extent: Vec<&str> = parts.collect();
    let screen: Result<ScreenGeometry, GeometryError> = match extent.as_slice() {
        [] => ScreenGeometry::new(w, h),
        [mx, my] => ScreenGeometry::with_extent(w, h, num(mx)?, num(my)?),
        _ => return Err(bad()),
    };
    screen.map_err(|e| format!("{}: {e}", bad()))
}

/// Screen profile from the environment, or the default one.
pub fn default_screen() -> Result<ScreenGeometry, CliError> {
    match std::env::var(SCREEN_PROFILE_ENV) {
        Ok(v) => parse_screen_profile(&v).map_err(|e| CliError::Usage(format!("{SCREEN_PROFILE_ENV}: {e}"))),
        Err(_) => Ok(ScreenGeometry::default()),
    }
}

/// Writes `contents` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// Files in `dir` with extension `ext`, sorted by path.
fn list_files(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, CliError> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == ext) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth(args) => synth(args),
        Command::Replay(args) => replay_cmd(args),
        Command::Analyze(args) => analyze(args),
        Command::Serve(args) => serve(args),
        Command::Layout(args) => layout(args),
    }
}

fn synth(args: SynthArgs) -> Result<(), CliError> {
    if args.participants == 0 {
        return Err(CliError::Usage("--participants must be at least 1".into()));
    }
    let screen = default_screen()?;
    let plan = StudyPlan {
        participants: args.participants,
        seed: args.seed,
        distances: args.distance.distances(),
        layouts: args.layout.names(),
        motion: MotionOverrides {
            noise_sigma_pt: args.noise_sigma,
            frame_interval_ms: args.frame_ms,
            dwell_hold_ms: args.hold_ms,
            move_ms_per_pt: args.move_ms_per_pt,
            anisotropy: args
                .anisotropy_deg
                .zip(args.anisotropy_ratio)
                .map(|(axis_deg, ratio)| Anisotropy { axis_deg, ratio }),
        },
    };
    let traces = synth_study(&plan, &screen)?;
    create_dir(&args.out)?;
    traces.par_iter().try_for_each(|(name, trace)| {
        let path = args.out.join(format!("{name}.{TRACE_EXT}"));
        let text = trace.to_text().map_err(|source| CliError::Trace { path: path.clone(), source })?;
        write_atomic(&path, text.as_bytes())
    })?;
    eprintln!("wrote {} traces to {}", traces.len(), args.out.display());
    Ok(())
}

fn replay_file(trace_path: &Path, out_path: &Path, screen: &ScreenGeometry) -> Result<(), CliError> {
    let trace =
        TraceFile::load_path(trace_path).map_err(|source| CliError::Trace { path: trace_path.into(), source })?;
    let log = replay(&trace, screen).map_err(|source| CliError::Replay { path: trace_path.into(), source })?;
    write_atomic(out_path, log.to_text().as_bytes())
}

fn replay_cmd(args: ReplayArgs) -> Result<(), CliError> {
    let screen = default_screen()?;
    if !args.trace.is_dir() {
        return replay_file(&args.trace, &args.out, &screen);
    }
    let traces = list_files(&args.trace, TRACE_EXT)?;
    create_dir(&args.out)?;
    let results: Vec<Result<(), CliError>> = traces
        .par_iter()
        .map(|path| {
            let stem = path.file_stem().unwrap_or_default();
            let out = args.out.join(stem).with_extension(EVENTS_EXT);
            replay_file(path, &out, &screen)
        })
        .collect();
    // Report the first failure in path order.
    results.into_iter().collect::<Result<Vec<_>, _>>()?;
    eprintln!("replayed {} traces into {}", traces.len(), args.out.display());
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let files = list_files(&args.events, EVENTS_EXT)?;
    let logs = files
        .par_iter()
        .map(|path| EventLog::load_path(path).map_err(|source| CliError::Events { path: path.clone(), source }))
        .collect::<Result<Vec<_>, _>>()?;
    let grouping = if args.pooled { Grouping::Pooled } else { Grouping::PerSequence };
    let dispersion = if args.population { Dispersion::Population } else { Dispersion::Sample };
    let outputs = analyze_logs(&logs, grouping, dispersion)?;
    for s in &outputs.skipped {
        let who = s.participant.as_deref().unwrap_or("*");
        eprintln!("skipped {who}/{}/{}: {}", s.distance, s.layout, s.reason);
    }
    create_dir(&args.out)?;
    for (name, contents) in outputs.files() {
        write_atomic(&args.out.join(name), contents.as_bytes())?;
    }
    eprintln!("analyzed {} event logs into {}", logs.len(), args.out.display());
    Ok(())
}

fn serve(args: ServeArgs) -> Result<(), CliError> {
    let screen = default_screen()?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::io(Path::new("<runtime>"), e))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.listen)
            .await
            .map_err(|e| CliError::io(Path::new(&args.listen.to_string()), e))?;
        let addr = listener.local_addr().map_err(|e| CliError::io(Path::new(&args.listen.to_string()), e))?;
        eprintln!("listening on ws://{addr}{}", crate::service::SESSION_PATH);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        crate::service::serve(listener, screen, shutdown)
            .await
            .map_err(|e| CliError::io(Path::new(&addr.to_string()), e))
    })
}

fn layout(args: LayoutArgs) -> Result<(), CliError> {
    let screen = match args.screen {
        Some(s) => s,
        None => default_screen()?,
    };
    let layout = build_layout(args.name, &screen, LayoutParams::default_for(args.name))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut doc = serde_json::to_string_pretty(&layout).expect("layout serializes");
    doc.push('\n');
    match args.out {
        Some(path) => write_atomic(&path, doc.as_bytes()),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}
