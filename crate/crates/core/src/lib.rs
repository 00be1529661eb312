//! Partial Latin square extension as maximum independent set: instance
//! model, incremental solution state, swap and trellis neighborhoods,
//! iterated local search, and brute-force references for testing.

pub mod cli;
pub mod generate;
pub mod ils;
pub mod matching;
pub mod mis;
pub mod neighborhoods;
pub mod oracle;
pub mod pls;
pub mod runner;
pub mod state;

pub use generate::{GenScheme, Scheme};
pub use mis::{MisInstance, NodeId};
pub use neighborhoods::{local_search, LsLevel, Move};
pub use pls::{PlsInstance, Triple};
pub use state::SolutionState;
