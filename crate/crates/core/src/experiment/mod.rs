//! Round-count sweeps over `n = 2^i`, CSV output and SVG charts.

use std::io::Write;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lptype::{sequential_clarkson, LpError};
use crate::problems::{HittingSetProblem, MedProblem, Point2D, ProblemError, SetSystem};
use crate::protocols::runner::{derive_seed, RunOptions};
use crate::protocols::{run_hitting, run_lp, ProtocolConfig, ProtocolKind, RunError, RunReport, StopRule};

pub mod datasets;
pub mod plot;

pub use datasets::{DatasetKind, DatasetSpec};
pub use plot::{emit_plot, render_svg};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error("{kind} needs more than {n} points")]
    TooFewPoints { kind: DatasetKind, n: usize },
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("no rows to plot")]
    EmptyInput,
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Where the instance of a sweep point comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum DatasetSource {
    Generated(DatasetKind),
    /// Points read from a file, reused for every `n`.
    PointFile { path: PathBuf, points: Vec<Point2D> },
    /// A set system read from a file (hitting protocol), reused for every `n`.
    SetFile { path: PathBuf, system: SetSystem },
}

impl DatasetSource {
    pub fn label(&self) -> String {
        match self {
            DatasetSource::Generated(kind) => kind.name().to_owned(),
            DatasetSource::PointFile { path, .. } | DatasetSource::SetFile { path, .. } => {
                format!("file:{}", path.display())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub datasets: Vec<DatasetSource>,
    pub protocol: ProtocolConfig,
    pub i_min: u32,
    pub i_max: u32,
    pub runs: u32,
    pub seed: u64,
    pub perturbation: f64,
    pub stop: StopRule,
    /// Keep per-envelope traces in the run reports.
    pub trace: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.runs == 0 {
            return Err(ExperimentError::Invalid("runs must be at least 1".into()));
        }
        if self.i_min > self.i_max || self.i_max > 24 {
            return Err(ExperimentError::Invalid(format!("bad exponent range {}..={}", self.i_min, self.i_max)));
        }
        if self.datasets.is_empty() {
            return Err(ExperimentError::Invalid("no dataset".into()));
        }
        self.protocol
            .validate()
            .map_err(|e| ExperimentError::Invalid(e.to_string()))?;
        for ds in &self.datasets {
            let hitting = self.protocol.kind == ProtocolKind::Hitting;
            match ds {
                DatasetSource::SetFile { .. } if !hitting => {
                    return Err(ExperimentError::Invalid("set systems need the hitting protocol".into()))
                }
                DatasetSource::Generated(_) | DatasetSource::PointFile { .. } if hitting => {
                    return Err(ExperimentError::Invalid("the hitting protocol needs a set-system file".into()))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentRow {
    pub protocol: ProtocolKind,
    pub dataset: String,
    pub n: usize,
    pub run: u32,
    pub seed: u64,
    /// `None` when the run hit its round cap first.
    pub rounds_to_solution: Option<u64>,
    pub max_work_per_round: u32,
    pub max_global_multiset: u64,
    pub total_messages: u64,
    pub correct: bool,
}

impl ExperimentRow {
    pub fn round_cap_hit(&self) -> bool {
        self.rounds_to_solution.is_none()
    }

    fn from_report(spec: &ExperimentSpec, dataset: String, run: u32, seed: u64, report: &RunReport, ok: bool) -> Self {
        Self {
            protocol: spec.protocol.kind,
            dataset,
            n: report.n,
            run,
            seed,
            rounds_to_solution: if ok { report.rounds_to_solution } else { None },
            max_work_per_round: report.max_work_overall(),
            max_global_multiset: report.max_global_multiset(),
            total_messages: report.total_messages,
            correct: ok && report.correct,
        }
    }
}

pub const CSV_HEADER: [&str; 10] = [
    "protocol",
    "dataset",
    "n",
    "run",
    "seed",
    "rounds_to_solution",
    "max_work_per_round",
    "max_global_multiset",
    "total_messages",
    "correct",
];

/// Seed of one sweep point: depends only on the master seed, the dataset
/// label, the exponent and the run index.
pub fn run_seed(master: u64, dataset: &str, i: u32, run: u32) -> u64 {
    let label = dataset
        .bytes()
        .fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01B3));
    derive_seed(derive_seed(derive_seed(master, label), i as u64), run as u64)
}

/// One run of a sweep point, with its report (also on a round-cap failure).
pub fn run_point(spec: &ExperimentSpec, ds: &DatasetSource, i: u32, run: u32) -> Result<(ExperimentRow, RunReport), ExperimentError> {
    let label = ds.label();
    let seed = run_seed(spec.seed, &label, i, run);
    let n = 1usize << i;
    let opts = RunOptions {
        stop: spec.stop,
        trace: spec.trace,
    };
    let result = match ds {
        DatasetSource::SetFile { system, .. } => {
            let problem = HittingSetProblem::new(system.clone());
            run_hitting(&problem, &spec.protocol, Some(n), seed, &opts)
        }
        DatasetSource::Generated(kind) => {
            let points = DatasetSpec {
                kind: *kind,
                n_points: n,
                seed,
                perturbation: spec.perturbation,
            }
            .generate()?;
            run_med(points, spec, n, seed, &opts)?
        }
        DatasetSource::PointFile { points, .. } => run_med(points.clone(), spec, n, seed, &opts)?,
    };
    match result {
        Ok(report) => Ok((ExperimentRow::from_report(spec, label, run, seed, &report, true), report)),
        Err(RunError::RoundCapExceeded { report, .. }) => {
            Ok((ExperimentRow::from_report(spec, label, run, seed, &report, false), *report))
        }
        Err(e) => Err(e.into()),
    }
}

fn run_med(
    points: Vec<Point2D>,
    spec: &ExperimentSpec,
    n: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<Result<RunReport, RunError>, ExperimentError> {
    let problem = MedProblem::new(points)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 3));
    let target = sequential_clarkson(&problem, &mut rng)?.fvalue().clone();
    Ok(run_lp(&problem, &target, &spec.protocol, n, seed, opts))
}

/// Runs the whole sweep. Rows are ordered by dataset, then `i`, then run.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRow>, ExperimentError> {
    spec.validate()?;
    let mut rows = Vec::new();
    for ds in &spec.datasets {
        for i in spec.i_min..=spec.i_max {
            for run in 0..spec.runs {
                rows.push(run_point(spec, ds, i, run)?.0);
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(out: W, rows: &[ExperimentRow]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.protocol.name().to_owned(),
            r.dataset.clone(),
            r.n.to_string(),
            r.run.to_string(),
            r.seed.to_string(),
            r.rounds_to_solution.map(|x| x.to_string()).unwrap_or_default(),
            r.max_work_per_round.to_string(),
            r.max_global_multiset.to_string(),
            r.total_messages.to_string(),
            r.correct.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[ExperimentRow]) -> Result<String, ExperimentError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Mean rounds to solution of one dataset at one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPoint {
    pub dataset: String,
    pub log_n: u32,
    pub mean_rounds: f64,
}

/// Averages successful rows per (dataset, n), in first-appearance order of
/// datasets and increasing `n`.
pub fn summarize(rows: &[ExperimentRow]) -> Vec<SeriesPoint> {
    let mut labels: Vec<&str> = Vec::new();
    for r in rows {
        if !labels.contains(&r.dataset.as_str()) {
            labels.push(&r.dataset);
        }
    }
    let mut out = Vec::new();
    for label in labels {
        let mut ns: Vec<usize> = rows.iter().filter(|r| r.dataset == label).map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        for n in ns {
            let rounds: Vec<f64> = rows
                .iter()
                .filter(|r| r.dataset == label && r.n == n)
                .filter_map(|r| r.rounds_to_solution)
                .map(|x| x as f64)
                .collect();
            if rounds.is_empty() {
                continue;
            }
            out.push(SeriesPoint {
                dataset: label.to_owned(),
                log_n: n.trailing_zeros(),
                mean_rounds: rounds.iter().sum::<f64>() / rounds.len() as f64,
            });
        }
    }
    out
}

/// Least-squares slope of `y` against `x` (with intercept).
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
