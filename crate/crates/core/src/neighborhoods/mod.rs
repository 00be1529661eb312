//! Neighborhood searches over a maximal solution and the local search
//! driver that chains them.
//!
//! Each search either returns an improving [`Move`] or proves that none
//! exists in its neighborhood:
//!
//! * [`search_swap1`]: remove one solution node, insert as many as possible.
//! * [`search_swap2`]: remove two. Requires a 1-maximal solution.
//! * [`search_swap3`]: remove three. Requires a 2-maximal solution.
//! * [`search_trellis`]: remove every solution node of a 2D facet and insert
//!   a maximum independent set of the freed nodes, found by matching.

mod swap1;
mod swap2;
mod swap3;
mod trellis;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::mis::NodeId;
use crate::state::{SolutionState, StateError};

pub use swap1::search_swap1;
pub use swap2::search_swap2;
pub use swap3::search_swap3;
pub use trellis::{search_trellis, TrellisSearch};

pub(crate) use swap1::swap1_unchecked;
pub(crate) use swap2::swap2_unchecked;
pub(crate) use swap3::swap3_unchecked;

/// One swap: drop `removals` from the solution, then add `insertions`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub removals: Vec<NodeId>,
    pub insertions: Vec<NodeId>,
}

impl Move {
    pub fn gain(&self) -> isize {
        self.insertions.len() as isize - self.removals.len() as isize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the solution is not maximal ({0} free nodes)")]
    NotMaximal(usize),
    #[error("the solution is not {0}-maximal")]
    NotPMaximal(u8),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Applies a move. Nodes present in both lists stay in the solution untouched.
pub fn apply_move(state: &mut SolutionState, mv: &Move) -> Result<(), StateError> {
    for &x in &mv.removals {
        if !mv.insertions.contains(&x) {
            state.remove(x)?;
        }
    }
    for &v in &mv.insertions {
        if !mv.removals.contains(&v) {
            state.insert(v)?;
        }
    }
    Ok(())
}

/// Inserts uniformly random free nodes until the solution is maximal.
pub fn maximalize<R: Rng>(state: &mut SolutionState, rng: &mut R) {
    while !state.is_maximal() {
        let free = state.free_nodes();
        let v = free[rng.gen_range(0..free.len())];
        state.insert(v).expect("free node must be insertable");
    }
}

/// First node with tightness 1 on the axis-`d` line through solution node `x`.
pub(crate) fn one_tight_on_line(state: &SolutionState, x: NodeId, d: usize) -> Option<NodeId> {
    state
        .mis()
        .line(x, d)
        .iter()
        .copied()
        .find(|&w| w != x && state.tau(w) == 1)
}

/// Which neighborhoods a local search uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LsLevel {
    L1,
    L2,
    Trellis,
    L3,
}

impl LsLevel {
    pub const ALL: [LsLevel; 4] = [LsLevel::L1, LsLevel::L2, LsLevel::Trellis, LsLevel::L3];

    /// Searches in the order they are tried after maximalization.
    pub fn pipeline(self) -> &'static [Neighborhood] {
        use Neighborhood::*;
        match self {
            LsLevel::L1 => &[Swap1],
            LsLevel::L2 => &[Swap1, Swap2],
            LsLevel::Trellis => &[Swap1, Swap2, Trellis],
            LsLevel::L3 => &[Swap1, Swap2, Swap3],
        }
    }
}

impl fmt::Display for LsLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LsLevel::L1 => "1",
            LsLevel::L2 => "2",
            LsLevel::Trellis => "tr",
            LsLevel::L3 => "3",
        })
    }
}

impl FromStr for LsLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "l1" => Ok(LsLevel::L1),
            "2" | "l2" => Ok(LsLevel::L2),
            "tr" | "trellis" => Ok(LsLevel::Trellis),
            "3" | "l3" => Ok(LsLevel::L3),
            _ => Err(format!("unknown local search level {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Neighborhood {
    Swap1,
    Swap2,
    Swap3,
    Trellis,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LsStats {
    pub initial_size: usize,
    pub final_size: usize,
    /// Improving moves applied, per neighborhood: swap1, swap2, swap3, trellis.
    pub moves: [usize; 4],
    /// Neighborhood searches run, including the final unsuccessful ones.
    pub searches: usize,
}

impl LsStats {
    pub fn improvement(&self) -> usize {
        self.final_size - self.initial_size
    }
}

/// Reusable local search: owns the trellis workspace so repeated runs do not
/// reallocate it.
#[derive(Debug, Default)]
pub struct LocalSearch {
    trellis: TrellisSearch,
}

impl LocalSearch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Maximalizes, then applies improving moves until every search in the
    /// level's pipeline comes back empty. After each move the solution is
    /// maximalized again and the pipeline restarts from its cheapest search.
    pub fn run<R: Rng>(&mut self, state: &mut SolutionState, level: LsLevel, rng: &mut R) -> LsStats {
        let mut stats = LsStats {
            initial_size: state.len(),
            ..Default::default()
        };
        maximalize(state, rng);
        'improve: loop {
            for &nb in level.pipeline() {
                stats.searches += 1;
                let found = match nb {
                    Neighborhood::Swap1 => swap1_unchecked(state),
                    Neighborhood::Swap2 => swap2_unchecked(state),
                    Neighborhood::Swap3 => swap3_unchecked(state),
                    Neighborhood::Trellis => self.trellis.search_unchecked(state),
                };
                if let Some(mv) = found {
                    debug_assert!(mv.gain() >= 1);
                    apply_move(state, &mv).expect("search produced an inapplicable move");
                    stats.moves[nb as usize] += 1;
                    maximalize(state, rng);
                    continue 'improve;
                }
            }
            break;
        }
        stats.final_size = state.len();
        stats
    }
}

/// One local search run with a fresh workspace.
pub fn local_search<R: Rng>(state: &mut SolutionState, level: LsLevel, rng: &mut R) -> LsStats {
    LocalSearch::new().run(state, level, rng)
}
