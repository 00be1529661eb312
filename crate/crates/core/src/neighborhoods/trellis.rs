//! Trellis neighborhood: for each facet (axis `d` fixed to value `k`), drop
//! the solution nodes `R` of the facet and insert a maximum independent set
//! of the nodes this frees.
//!
//! Freed nodes are the 1-tight nodes whose solution neighbor is in `R` and
//! the 2-tight nodes with both neighbors in `R` (those always lie on the
//! facet). Off-facet 1-tight nodes hang on the line through their neighbor
//! perpendicular to the facet; taking one of them per such neighbor is
//! always safe, which retires that neighbor. What remains sits on the facet,
//! where picking nodes with at most one per facet line is a bipartite
//! matching between the two families of facet lines.

use crate::matching::{BipartiteGraph, HopcroftKarp};
use crate::mis::NodeId;
use crate::state::SolutionState;

use super::{Move, SearchError};

#[derive(Debug, Clone, Copy)]
struct Hanging {
    node: NodeId,
    anchor: NodeId,
    on_facet: bool,
}

/// Reusable buffers for the trellis search.
#[derive(Debug, Default)]
pub struct TrellisSearch {
    n: usize,
    solution: Vec<Vec<NodeId>>,
    one_tight: Vec<Vec<Hanging>>,
    two_tight: Vec<Vec<NodeId>>,
    // Facet stamp per anchor node, marking R'' membership.
    stamp: Vec<u32>,
    epoch: u32,
    // Per facet: bit 0 if some candidate sits on a left line not covered by
    // a kept solution node, bit 1 likewise for right lines.
    open: Vec<u8>,
    graph: BipartiteGraph<NodeId>,
    matcher: HopcroftKarp,
    seed: Vec<usize>,
}

impl TrellisSearch {
    pub fn new() -> Self {
        Self::default()
    }

    fn reset(&mut self, state: &SolutionState) {
        let n = state.mis().n();
        let facets = 3 * n;
        if self.n != n || self.solution.len() != facets {
            self.n = n;
            self.solution = vec![Vec::new(); facets];
            self.one_tight = vec![Vec::new(); facets];
            self.two_tight = vec![Vec::new(); facets];
        } else {
            self.solution.iter_mut().for_each(Vec::clear);
            self.one_tight.iter_mut().for_each(Vec::clear);
            self.two_tight.iter_mut().for_each(Vec::clear);
        }
        let space = state.mis().id_space();
        if self.stamp.len() != space {
            self.stamp = vec![0; space];
            self.epoch = 0;
        }
    }

    /// Requires a maximal solution.
    pub fn search(&mut self, state: &SolutionState) -> Result<Option<Move>, SearchError> {
        if !state.is_maximal() {
            return Err(SearchError::NotMaximal(state.free_count()));
        }
        Ok(self.search_unchecked(state))
    }

    pub(crate) fn search_unchecked(&mut self, state: &SolutionState) -> Option<Move> {
        if !self.any_open_facet(state) {
            return None;
        }
        self.reset(state);
        let mis = state.mis();
        let n = mis.n();
        // Facet index: d * n + k.
        for &x in state.solution() {
            let c = mis.coords(x);
            for d in 0..3 {
                self.solution[d * n + c[d]].push(x);
            }
        }
        let mut any = false;
        for &w in state.tight_nodes(1) {
            let (e, r) = state.solution_neighbors(w).next().unwrap();
            let c = mis.coords(r);
            for d in 0..3 {
                let on_facet = d != e;
                any |= on_facet;
                self.one_tight[d * n + c[d]].push(Hanging { node: w, anchor: r, on_facet });
            }
        }
        for &w in state.tight_nodes(2) {
            let nb = state.solution_neighbors_raw(w);
            let c = (0..3).find(|&d| nb[d].is_none()).unwrap();
            self.two_tight[c * n + mis.coords(w)[c]].push(w);
            any = true;
        }
        if !any {
            return None;
        }

        for d in 0..3 {
            for k in 0..n {
                if self.open[d * n + k] == 3 {
                    if let Some(mv) = self.facet_move(state, d, k) {
                        return Some(mv);
                    }
                }
            }
        }
        None
    }

    /// Fills `open` from the tight nodes alone. A facet can only improve if
    /// an augmenting path for the kept matching exists, and such a path
    /// starts and ends with candidates on uncovered lines of each direction.
    /// The only solution nodes on a candidate's facet lines are its own
    /// solution neighbors, and a facet node is dropped from the kept set
    /// exactly when it has a 1-tight neighbor off the facet.
    fn any_open_facet(&mut self, state: &SolutionState) -> bool {
        let mis = state.mis();
        let n = mis.n();
        self.open.clear();
        self.open.resize(3 * n, 0);
        let dropped = |x: NodeId, d: usize| x.is_none() || state.mu(x, d) > 0;
        for &w in state.tight_nodes(1) {
            let nb = state.solution_neighbors_raw(w);
            let c = mis.coords(w);
            for d in 0..3 {
                if nb[d].is_none() {
                    let (a, b) = facet_axes(d);
                    let bits = dropped(nb[b], d) as u8 | (dropped(nb[a], d) as u8) << 1;
                    self.open[d * n + c[d]] |= bits;
                }
            }
        }
        for &w in state.tight_nodes(2) {
            let nb = state.solution_neighbors_raw(w);
            let d = (0..3).find(|&d| nb[d].is_none()).unwrap();
            let (a, b) = facet_axes(d);
            let bits = dropped(nb[b], d) as u8 | (dropped(nb[a], d) as u8) << 1;
            self.open[d * n + mis.coords(w)[d]] |= bits;
        }
        self.open.contains(&3)
    }

    fn facet_move(&mut self, state: &SolutionState, d: usize, k: usize) -> Option<Move> {
        let mis = state.mis();
        let n = mis.n();
        let f = d * n + k;
        let hanging = &self.one_tight[f];
        let twos = &self.two_tight[f];
        if twos.is_empty() && !hanging.iter().any(|h| h.on_facet) {
            return None;
        }

        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        // One off-facet node per distinct anchor: these anchors form R''.
        let mut hung = Vec::new();
        for h in hanging.iter().filter(|h| !h.on_facet) {
            if self.stamp[h.anchor.index()] != self.epoch {
                self.stamp[h.anchor.index()] = self.epoch;
                hung.push(h.node);
            }
        }

        let (a, b) = facet_axes(d);
        self.graph.clear(n, n);
        let mut kept = 0;
        for &x in &self.solution[f] {
            if self.stamp[x.index()] != self.epoch {
                let c = mis.coords(x);
                self.graph.add_edge(c[a], c[b], x);
                kept += 1;
            }
        }
        for h in hanging.iter().filter(|h| h.on_facet) {
            let c = mis.coords(h.node);
            self.graph.add_edge(c[a], c[b], h.node);
        }
        for &w in twos {
            let c = mis.coords(w);
            self.graph.add_edge(c[a], c[b], w);
        }

        // The kept solution nodes sit on distinct facet lines, so they are a
        // matching already; the search only has to grow it.
        self.seed.clear();
        self.seed.extend(0..kept);
        if self.matcher.run(&self.graph, &self.seed) <= kept {
            return None;
        }
        let mut insertions: Vec<NodeId> = self.matcher.matched().map(|e| self.graph.edges()[e].2).collect();
        insertions.extend(hung);
        Some(Move {
            removals: self.solution[f].clone(),
            insertions,
        })
    }
}

/// The two coordinates that vary on a facet with coordinate `d` fixed; the
/// first one indexes the left vertices of the facet's matching graph.
fn facet_axes(d: usize) -> (usize, usize) {
    match d {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Trellis search with a throwaway workspace. Requires a maximal solution.
pub fn search_trellis(state: &SolutionState) -> Result<Option<Move>, SearchError> {
    TrellisSearch::new().search(state)
}
