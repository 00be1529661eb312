//! One solver run end to end: algorithm selection, validation of the result
//! and the record written by the command line tools.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ils::{self, IlsConfig, IlsError, IlsStats};
use crate::mis::{validate_extension, MisError, MisInstance, NodeId};
use crate::neighborhoods::LsLevel;
use crate::pls::{PlsError, PlsInstance, Triple};

/// A single local search from the greedy start, or the iterated search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ls(LsLevel),
    Ils(LsLevel),
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Ls(LsLevel::L1),
        Algorithm::Ls(LsLevel::L2),
        Algorithm::Ls(LsLevel::L3),
        Algorithm::Ls(LsLevel::Trellis),
        Algorithm::Ils(LsLevel::L1),
        Algorithm::Ils(LsLevel::L2),
        Algorithm::Ils(LsLevel::L3),
        Algorithm::Ils(LsLevel::Trellis),
    ];

    pub fn level(self) -> LsLevel {
        match self {
            Algorithm::Ls(l) | Algorithm::Ils(l) => l,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (level, kind) = match self {
            Algorithm::Ls(l) => (l, "ls"),
            Algorithm::Ils(l) => (l, "ils"),
        };
        match level {
            LsLevel::Trellis => write!(f, "tr-{kind}"),
            _ => write!(f, "{kind}{level}"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown algorithm {s:?} (expected ls1|ls2|ls3|tr-ls|ils1|ils2|ils3|tr-ils)"))
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Ils(#[from] IlsError),
    #[error(transparent)]
    Mis(#[from] MisError),
    #[error(transparent)]
    Pls(#[from] PlsError),
    #[error("solver produced an invalid extension")]
    Invalid,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: Vec<Triple>,
    /// The instance with the solution filled in.
    pub merged: PlsInstance,
    pub stats: IlsStats,
    /// Every cell is filled, so no larger extension exists.
    pub optimal: bool,
}

/// Runs `alg` and validates the result against the instance.
pub fn solve(inst: &PlsInstance, alg: Algorithm, time_limit: Duration, seed: u64) -> Result<SolveOutcome, SolveError> {
    let mis = Arc::new(MisInstance::transform(inst));
    let mut cfg = IlsConfig::new(alg.level(), time_limit, seed);
    if let Algorithm::Ls(_) = alg {
        cfg.max_iterations = Some(1);
    }
    let (best, stats) = ils::run(mis.clone(), &cfg)?;
    let solution: Vec<Triple> = best.iter().map(|&v: &NodeId| mis.triple(v)).collect();
    if !validate_extension(inst, &solution)? {
        return Err(SolveError::Invalid);
    }
    let merged = inst.extended(&solution)?;
    let optimal = merged.is_complete();
    Ok(SolveOutcome {
        solution,
        merged,
        stats,
        optimal,
    })
}

/// Summary of one run, as written to stats documents and bench rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub n: usize,
    pub r: f64,
    pub scheme: String,
    pub alg: String,
    pub seed: u64,
    pub time_limit_s: f64,
    pub given: usize,
    pub init: usize,
    #[serde(rename = "final")]
    pub final_size: usize,
    pub iters: u64,
    pub elapsed_ms: f64,
    pub opt: bool,
}

impl RunRecord {
    pub fn new(instance: &str, scheme: &str, inst: &PlsInstance, alg: Algorithm, seed: u64, time_limit: Duration, out: &SolveOutcome) -> Self {
        let n = inst.n();
        RunRecord {
            instance: instance.to_string(),
            n,
            r: inst.len() as f64 / (n * n) as f64,
            scheme: scheme.to_string(),
            alg: alg.to_string(),
            seed,
            time_limit_s: time_limit.as_secs_f64(),
            given: inst.len(),
            init: out.stats.initial_size,
            final_size: out.stats.best_size,
            iters: out.stats.iterations,
            elapsed_ms: out.stats.elapsed_ms,
            opt: out.optimal,
        }
    }
}

/// Stats document written by `solve`: the run record plus the best-size
/// series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsDocument {
    #[serde(flatten)]
    pub record: RunRecord,
    pub first_ls_improvement: usize,
    pub mean_ls_ms: f64,
    /// `[elapsed_ms, best_size]` pairs.
    pub series: Vec<(f64, usize)>,
}
