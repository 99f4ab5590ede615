use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpgossip::experiment::{
    emit_plot, run_point, write_csv, DatasetKind, DatasetSource, ExperimentError, ExperimentRow, ExperimentSpec,
};
use lpgossip::problems::{read_points, read_set_system};
use lpgossip::protocols::{ProtocolConfig, ProtocolKind, StopRule};
use lpgossip::sim::write_trace;

const EXIT_INVALID: u8 = 2;
const EXIT_ROUND_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "lpgossip", version, about = "Gossip-based Clarkson LP-type solving experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep n = 2^i over one dataset and write one CSV row per run.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Lowload,
    LowloadExtended,
    Highload,
    Hitting,
}

impl From<ProtocolArg> for ProtocolKind {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Lowload => ProtocolKind::LowLoad,
            ProtocolArg::LowloadExtended => ProtocolKind::LowLoadExtended,
            ProtocolArg::Highload => ProtocolKind::HighLoad,
            ProtocolArg::Hitting => ProtocolKind::Hitting,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum UntilArg {
    /// Stop once some node holds an optimal basis.
    Solution,
    /// Stop once every node has output.
    Termination,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    protocol: ProtocolArg,
    /// duo-disk, triple-disk, triangle, hull or file:<path>
    #[arg(long)]
    dataset: String,
    #[arg(long)]
    i_min: u32,
    #[arg(long)]
    i_max: u32,
    #[arg(long, default_value_t = 10)]
    runs: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Combinatorial dimension (3 for disks, the target size for hitting sets).
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    c_sample: u32,
    #[arg(long, default_value_t = 4)]
    c_mature: u32,
    /// Basis copies pushed per round (high-load only).
    #[arg(long = "accel-C", default_value_t = 1)]
    accel_c: u32,
    /// Hull perturbation magnitude.
    #[arg(long, default_value_t = 0.01)]
    perturbation: f64,
    #[arg(long, value_enum, default_value_t = UntilArg::Solution)]
    until: UntilArg,
    /// Round cap per run (default 64·d·⌈log₂ n⌉).
    #[arg(long)]
    round_cap: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Per-envelope trace of every run.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    let spec = match build_spec(&args) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match execute(&spec, &args) {
        Ok(rows) => {
            let capped = rows.iter().filter(|r| r.round_cap_hit()).count();
            let wrong = rows.iter().filter(|r| !r.correct && !r.round_cap_hit()).count();
            eprintln!("{} runs written to {}", rows.len(), args.out.display());
            if wrong > 0 {
                eprintln!("warning: {wrong} runs ended with a wrong output");
            }
            if capped > 0 {
                eprintln!("{capped} runs exceeded the round cap");
                return ExitCode::from(EXIT_ROUND_CAP);
            }
            ExitCode::SUCCESS
        }
        Err(e @ ExperimentError::Invalid(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn build_spec(args: &RunArgs) -> Result<ExperimentSpec, ExperimentError> {
    let kind = ProtocolKind::from(args.protocol);
    let source = parse_dataset(&args.dataset, kind)?;
    if kind != ProtocolKind::Hitting && args.d != 3 {
        return Err(ExperimentError::Invalid(format!("disk problems have dimension 3, got --d {}", args.d)));
    }
    if !(args.perturbation.is_finite() && args.perturbation >= 0.0) {
        return Err(ExperimentError::Invalid("perturbation must be finite and non-negative".into()));
    }
    let mut protocol = ProtocolConfig::new(kind, args.d);
    protocol.c_sample = args.c_sample;
    protocol.c_mature = args.c_mature;
    protocol.accel = args.accel_c;
    protocol.round_cap = args.round_cap;
    let spec = ExperimentSpec {
        datasets: vec![source],
        protocol,
        i_min: args.i_min,
        i_max: args.i_max,
        runs: args.runs,
        seed: args.seed,
        perturbation: args.perturbation,
        stop: match args.until {
            UntilArg::Solution => StopRule::FirstSolution,
            UntilArg::Termination => StopRule::Termination,
        },
        trace: args.trace.is_some(),
    };
    spec.validate()?;
    Ok(spec)
}

fn parse_dataset(name: &str, kind: ProtocolKind) -> Result<DatasetSource, ExperimentError> {
    if let Some(path) = name.strip_prefix("file:") {
        let path = PathBuf::from(path);
        let invalid = |e: lpgossip::problems::ProblemError| ExperimentError::Invalid(format!("{}: {e}", path.display()));
        return if kind == ProtocolKind::Hitting {
            let system = read_set_system(&path).map_err(invalid)?;
            Ok(DatasetSource::SetFile { path, system })
        } else {
            let points = read_points(&path).map_err(invalid)?;
            Ok(DatasetSource::PointFile { path, points })
        };
    }
    let kind: DatasetKind = name.parse().map_err(|_| ExperimentError::Invalid(format!("unknown dataset {name:?}")))?;
    Ok(DatasetSource::Generated(kind))
}

fn execute(spec: &ExperimentSpec, args: &RunArgs) -> Result<Vec<ExperimentRow>, ExperimentError> {
    let mut trace = args.trace.as_deref().map(create).transpose()?;
    let mut rows = Vec::new();
    for ds in &spec.datasets {
        for i in spec.i_min..=spec.i_max {
            for run in 0..spec.runs {
                let (row, report) = run_point(spec, ds, i, run)?;
                if let (Some(w), Some(entries)) = (trace.as_mut(), report.trace.as_deref()) {
                    writeln!(w, "# dataset={} n={} run={} seed={}", row.dataset, row.n, row.run, row.seed)?;
                    write_trace(&mut *w, entries)?;
                }
                rows.push(row);
            }
        }
    }
    if let Some(mut w) = trace {
        w.flush()?;
    }
    write_csv(create(&args.out)?, &rows)?;
    if let Some(path) = &args.plot {
        emit_plot(&rows, path)?;
    }
    Ok(rows)
}

fn create(path: &Path) -> Result<BufWriter<File>, ExperimentError> {
    Ok(BufWriter::new(File::create(path)?))
}
