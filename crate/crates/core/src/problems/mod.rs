//! Concrete LP-type problems.

use thiserror::Error;

use crate::lptype::LpError;

pub mod hitting;
pub mod io;
pub mod lp2d;
pub mod med;

pub use io::{format_points, format_set_system, parse_points, parse_set_system, read_points, read_set_system};
pub use hitting::{hitting_f, setcover_to_hitting, HittingSetProblem, SetSystem};
pub use lp2d::{lp2d_f, HalfPlane, Lp2dProblem, LpOutcome};
pub use med::{med_f, min_disk, Disk, MedProblem, Point2D};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("point {0} has a non-finite coordinate")]
    NonFinitePoint(usize),
    #[error("half-plane {0} has a zero or non-finite normal")]
    DegenerateHalfPlane(usize),
    #[error("set {0} is empty")]
    EmptySet(usize),
    #[error("set {set} contains index {index} outside the universe")]
    IndexOutOfRange { set: usize, index: usize },
    #[error("element {0} belongs to no set")]
    UncoveredElement(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Lp(#[from] LpError),
}
