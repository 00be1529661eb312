use crate::mis::NodeId;
use crate::state::SolutionState;

use super::{one_tight_on_line, swap1_unchecked, Move, SearchError};

/// Scans 2-tight nodes `u` with solution neighbors `x` (across axis `a`) and
/// `y` (across axis `b`). Dropping both and inserting `u` frees the 1-tight
/// nodes on the four lines `x`-`b`, `x`-`c`, `y`-`a`, `y`-`c`, plus the
/// corner `x + y - u` when it is 2-tight. The corner only counts when neither
/// of its two lines already offers a 1-tight node.
pub fn search_swap2(state: &SolutionState) -> Result<Option<Move>, SearchError> {
    if !state.is_maximal() {
        return Err(SearchError::NotMaximal(state.free_count()));
    }
    if swap1_unchecked(state).is_some() {
        return Err(SearchError::NotPMaximal(1));
    }
    Ok(swap2_unchecked(state))
}

pub(crate) fn swap2_unchecked(state: &SolutionState) -> Option<Move> {
    let mis = state.mis();
    for &u in state.tight_nodes(2) {
        let nb = state.solution_neighbors_raw(u);
        let mut axes = (0..3).filter(|&d| !nb[d].is_none());
        let (a, b) = (axes.next().unwrap(), axes.next().unwrap());
        let c = 3 - a - b;
        let (x, y) = (nb[a], nb[b]);

        // (owner, axis) of the four candidate lines.
        let lines = [(x, b), (x, c), (y, a), (y, c)];
        let mut count = lines.iter().filter(|&&(s, d)| state.mu(s, d) > 0).count();

        let mut corner = None;
        if state.mu(x, b) == 0 && state.mu(y, a) == 0 {
            let mut p = mis.coords(u);
            p[a] = mis.coords(x)[a];
            p[b] = mis.coords(y)[b];
            if let Some(w) = mis.node_at(p) {
                if state.tau(w) == 2 {
                    corner = Some(w);
                    count += 1;
                }
            }
        }

        if count >= 2 {
            let mut insertions: Vec<NodeId> = vec![u];
            for &(s, d) in &lines {
                if state.mu(s, d) > 0 {
                    insertions.push(one_tight_on_line(state, s, d).unwrap());
                }
            }
            insertions.extend(corner);
            return Some(Move {
                removals: vec![x, y],
                insertions,
            });
        }
    }
    None
}
