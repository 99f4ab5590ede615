//! Distributed Clarkson-style protocols as gossip handlers.
//!
//! * [`lowload`]: sampling-based rounds with filtering, optionally preceded
//!   by a pull phase for nodes that start empty.
//! * [`highload`]: nodes gossip their local optimal bases, optionally
//!   several copies per round.
//! * [`hitting`]: the sampling rounds specialised to hitting sets.
//!
//! All of them share the termination table in [`termination`] and are driven
//! by [`runner`].

use rand::seq::index;
use rand::Rng;
use thiserror::Error;

use crate::lptype::{ElementId, LpError};

pub mod highload;
pub mod hitting;
pub mod lowload;
pub mod runner;
pub mod termination;

pub use runner::{run_hitting, run_lp, RunError, RunReport, StopRule};
pub use termination::{TerminationRecord, TerminationTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    LowLoad,
    LowLoadExtended,
    HighLoad,
    Hitting,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::LowLoad => "lowload",
            ProtocolKind::LowLoadExtended => "lowload-extended",
            ProtocolKind::HighLoad => "highload",
            ProtocolKind::Hitting => "hitting",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::LowLoad, Self::LowLoadExtended, Self::HighLoad, Self::Hitting]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    /// Combinatorial dimension for the LP protocols, target hitting-set size
    /// for the hitting protocol.
    pub d: usize,
    pub c_sample: u32,
    pub c_mature: u32,
    /// Basis copies pushed per round by high-load nodes.
    pub accel: u32,
    /// Constant in the hitting protocol's push cap `c·d·log n`.
    pub c_push: u32,
    /// `None` selects `64·d·log₂ n`.
    pub round_cap: Option<u64>,
    /// `None` selects `⌈log₂ n⌉`.
    pub log_n: Option<u32>,
}

impl ProtocolConfig {
    pub fn new(kind: ProtocolKind, d: usize) -> Self {
        Self {
            kind,
            d,
            c_sample: 3,
            c_mature: 4,
            accel: 1,
            c_push: 4,
            round_cap: None,
            log_n: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.d == 0 {
            return Err(ConfigError::ZeroDimension);
        }
        if self.c_sample == 0 || self.c_mature == 0 || self.accel == 0 || self.c_push == 0 {
            return Err(ConfigError::ZeroConstant);
        }
        Ok(())
    }

    pub fn log_n(&self, n: usize) -> u32 {
        self.log_n.unwrap_or_else(|| ceil_log2(n)).max(1)
    }

    pub fn round_cap(&self, n: usize) -> u64 {
        self.round_cap
            .unwrap_or_else(|| 64 * self.d as u64 * ceil_log2(n).max(1) as u64)
    }

    /// Rounds after injection at which a termination record matures.
    pub fn maturity_window(&self, n: usize) -> u64 {
        self.c_mature as u64 * self.log_n(n) as u64
    }

    /// Pulls issued per sampling attempt for a sample of size `r`.
    pub fn sample_pulls(&self, r: usize, n: usize) -> usize {
        self.c_sample as usize * (r + self.log_n(n) as usize)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("protocol constants must be positive")]
    ZeroConstant,
}

pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Sample size of the low-load rounds.
pub fn lowload_sample_size(d: usize) -> usize {
    6 * d * d
}

/// Sample size of the hitting rounds, `⌈6d·ln(12ds)⌉`.
pub fn hitting_sample_size(d: usize, s: usize) -> usize {
    let d = d as f64;
    (6.0 * d * (12.0 * d * s as f64).ln()).ceil() as usize
}

/// Probability of keeping a non-original copy in a filtering step.
pub fn keep_probability(d: usize) -> f64 {
    1.0 / (1.0 + 1.0 / (2.0 * d as f64))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("local multiset with {size} distinct elements exceeds the basis cap of {cap}")]
    LocalBasisTooLarge { size: usize, cap: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// One stored copy of an element. The tag is drawn when the copy is stored
/// and only serves to tell copies of the same element apart in samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    pub id: ElementId,
    pub tag: u64,
}

/// Read-only view used by the harness to measure a run.
pub trait NodeView {
    fn originals(&self) -> Box<dyn Iterator<Item = ElementId> + '_>;
    fn original_count(&self) -> usize;
    /// `|H(v)|`, counted with multiplicity.
    fn local_size(&self) -> usize;
    fn solved_round(&self) -> Option<u64>;
    fn output(&self) -> Option<&TerminationRecord>;
    fn in_pull_phase(&self) -> bool {
        false
    }
    fn sampling_stats(&self) -> (u64, u64) {
        (0, 0)
    }
}

/// Chooses `r` distinct copies uniformly among the non-empty replies,
/// returning their element ids; `None` when fewer than `r` distinct copies
/// arrived.
pub fn select_sample<R: Rng + ?Sized>(replies: &[Item], r: usize, rng: &mut R) -> Option<Vec<ElementId>> {
    let mut distinct = replies.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < r {
        return None;
    }
    let mut picked: Vec<ElementId> = index::sample(rng, distinct.len(), r)
        .into_iter()
        .map(|i| distinct[i].id)
        .collect();
    picked.sort_unstable();
    Some(picked)
}
