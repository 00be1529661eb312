use crate::state::SolutionState;

use super::{one_tight_on_line, Move, SearchError};

/// Finds a solution node `x` with 1-tight neighbors on at least two of its
/// lines; dropping `x` frees one node per such line, and nodes on different
/// lines through `x` are never adjacent. `None` means the solution is
/// 1-maximal.
pub fn search_swap1(state: &SolutionState) -> Result<Option<Move>, SearchError> {
    if !state.is_maximal() {
        return Err(SearchError::NotMaximal(state.free_count()));
    }
    Ok(swap1_unchecked(state))
}

pub(crate) fn swap1_unchecked(state: &SolutionState) -> Option<Move> {
    let x = state.solution().iter().copied().find(|&x| state.nu_unchecked(x) >= 2)?;
    let insertions = (0..3)
        .filter(|&d| state.mu(x, d) > 0)
        .map(|d| one_tight_on_line(state, x, d).expect("mu counts a missing 1-tight node"))
        .collect();
    Some(Move {
        removals: vec![x],
        insertions,
    })
}
