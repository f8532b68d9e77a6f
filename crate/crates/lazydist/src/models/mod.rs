//! The bundled example models, runnable on any of the three backends.
//!
//! Every model is written twice: once against the lazy graph (where a
//! [`BindMode`] selects non-strict or strict sequencing) in [`lazy`], and
//! once against the materializing list baseline in [`list`]. The
//! [`run_model`] entry point dispatches by [`ModelId`] and [`BackendId`]
//! and returns the query probability together with the evaluation
//! statistics of the run — the numbers the benchmark harness reports.
//!
//! A fresh session is created per run, so repeated runs are fully
//! deterministic: same probability, same counters.

use std::fmt;
use std::str::FromStr;

use crate::dist::{BindMode, DistError};
use crate::engine::{EvalError, EvalStats, Session};

pub mod lazy;
pub mod list;

/// A die face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    One,
    Two,
    Three,
    Four,
    Five,
    Six,
}

impl Side {
    pub const ALL: [Side; 6] = [
        Side::One,
        Side::Two,
        Side::Three,
        Side::Four,
        Side::Five,
        Side::Six,
    ];
}

/// One outcome of the sprinkler network: did it rain, was the sprinkler
/// on, is the grass wet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SprinklerWorld {
    pub raining: bool,
    pub sprinkler_on: bool,
    pub grass_wet: bool,
}

/// The models the harness knows about, by their command-line names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelId {
    AllSix,
    AllFiveOrSix,
    Palindrome,
    PalindromeEfficient,
    ConsecutiveBs,
    FlipCoinHeads,
    Sprinkler,
    PartialPattern,
}

impl ModelId {
    pub const ALL: [ModelId; 8] = [
        ModelId::AllSix,
        ModelId::AllFiveOrSix,
        ModelId::Palindrome,
        ModelId::PalindromeEfficient,
        ModelId::ConsecutiveBs,
        ModelId::FlipCoinHeads,
        ModelId::Sprinkler,
        ModelId::PartialPattern,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelId::AllSix => "allsix",
            ModelId::AllFiveOrSix => "allfiveorsix",
            ModelId::Palindrome => "palindrome",
            ModelId::PalindromeEfficient => "palindrome-efficient",
            ModelId::ConsecutiveBs => "consecutivebs",
            ModelId::FlipCoinHeads => "flipcoin-heads",
            ModelId::Sprinkler => "sprinkler",
            ModelId::PartialPattern => "partialpattern",
        }
    }

    /// Smallest meaningful `n`. The dice models need at least one die; the
    /// string and coin models accept the empty case; the two fixed models
    /// ignore `n` entirely.
    pub fn min_n(self) -> u32 {
        match self {
            ModelId::AllSix | ModelId::AllFiveOrSix => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ModelId::ALL.iter().map(|m| m.name()).collect();
                format!("unknown model `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

/// Which representation executes the query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendId {
    /// Lazy graph, non-strict bind — prunes by demand.
    Lazy,
    /// Lazy graph, strict bind — expands every intermediate distribution.
    Strict,
    /// Materialized event–probability pairs.
    List,
}

impl BackendId {
    pub const ALL: [BackendId; 3] = [BackendId::Lazy, BackendId::Strict, BackendId::List];

    pub fn name(self) -> &'static str {
        match self {
            BackendId::Lazy => "lazy",
            BackendId::Strict => "strict",
            BackendId::List => "list",
        }
    }
}

impl fmt::Display for BackendId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BackendId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BackendId::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown backend `{s}` (expected lazy, strict, or list)"))
    }
}

/// Outcome of one model run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunResult {
    pub probability: f64,
    /// For the graph backends: the session counters of the query walk.
    /// For the list baseline: `choice_expansions` carries the number of
    /// materialized pairs the query had to scan (its search-space size),
    /// and no suspensions exist to count.
    pub stats: EvalStats,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    /// `n` below the model's minimum.
    InvalidN { model: ModelId, n: u32, min: u32 },
    /// Conditioning on evidence of probability zero.
    ZeroEvidence,
    Eval(EvalError),
    Dist(DistError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidN { model, n, min } => {
                write!(f, "model `{model}` needs n >= {min}, got {n}")
            }
            ModelError::ZeroEvidence => {
                write!(f, "cannot condition on evidence with probability zero")
            }
            ModelError::Eval(e) => write!(f, "{e}"),
            ModelError::Dist(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ModelError {}

impl From<EvalError> for ModelError {
    fn from(e: EvalError) -> Self {
        ModelError::Eval(e)
    }
}

impl From<DistError> for ModelError {
    fn from(e: DistError) -> Self {
        ModelError::Dist(e)
    }
}

/// Run one model's query on one backend with a fresh session, returning
/// the probability and the cost counters of exactly that run.
pub fn run_model(model: ModelId, backend: BackendId, n: u32) -> Result<RunResult, ModelError> {
    if n < model.min_n() {
        return Err(ModelError::InvalidN {
            model,
            n,
            min: model.min_n(),
        });
    }
    match backend {
        BackendId::Lazy => graph_run(model, BindMode::NonStrict, n),
        BackendId::Strict => graph_run(model, BindMode::Strict, n),
        BackendId::List => list::run(model, n),
    }
}

fn graph_run(model: ModelId, mode: BindMode, n: u32) -> Result<RunResult, ModelError> {
    let sess = Session::new();
    let probability = match model {
        ModelId::AllSix => lazy::all_six(mode, &sess, n)?,
        ModelId::AllFiveOrSix => lazy::all_five_or_six(mode, &sess, n)?,
        ModelId::Palindrome => lazy::palindrome_q(mode, &sess, n)?,
        ModelId::PalindromeEfficient => lazy::palindrome_efficient_q(mode, &sess, n)?,
        ModelId::ConsecutiveBs => lazy::consecutive_bs_q(mode, &sess, n)?,
        ModelId::FlipCoinHeads => lazy::at_least_two_heads_q(mode, &sess, n)?,
        ModelId::Sprinkler => lazy::sprinkler_grass_wet_q(mode, &sess)?,
        ModelId::PartialPattern => lazy::partial_pattern_q(mode, &sess)?,
    };
    Ok(RunResult {
        probability,
        stats: sess.stats(),
    })
}
