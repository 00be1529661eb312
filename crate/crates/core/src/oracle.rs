//! Brute-force references for tests: exact maximum independent sets on tiny
//! instances, definitional neighborhood enumerators and a plain augmenting
//! path matcher.
//!
//! Everything here works on `u128` bitsets, so no induced subgraph handed to
//! the exact solver may exceed 128 nodes.

use std::collections::HashMap;

use thiserror::Error;

use crate::matching::BipartiteGraph;
use crate::mis::{MisInstance, NodeId};
use crate::neighborhoods::Move;
use crate::state::SolutionState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Largest node count an exhaustive search accepts.
    pub max_nodes: usize,
    /// Largest grid order accepted.
    pub max_n: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_nodes: 30, max_n: 5 }
    }
}

impl OracleBudget {
    /// The widest budget the bitset representation allows.
    pub fn exhaustive() -> Self {
        OracleBudget { max_nodes: 128, max_n: 5 }
    }

    fn check(&self, mis: &MisInstance) -> Result<(), OracleError> {
        if mis.n() > self.max_n {
            return Err(OracleError::OverBudget(format!("n = {} exceeds {}", mis.n(), self.max_n)));
        }
        if mis.node_count() > self.max_nodes {
            return Err(OracleError::OverBudget(format!(
                "{} nodes exceed {}",
                mis.node_count(),
                self.max_nodes
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("input over oracle budget: {0}")]
    OverBudget(String),
    #[error("p must be 1, 2 or 3, got {0}")]
    BadP(usize),
}

/// Induced subgraph on at most 128 nodes, with its nodes partitioned into
/// grid-line cliques once per axis.
struct BitGraph {
    nodes: Vec<NodeId>,
    adj: Vec<u128>,
    lines: [Vec<u128>; 3],
}

impl BitGraph {
    fn induced(mis: &MisInstance, nodes: Vec<NodeId>) -> Result<Self, OracleError> {
        if nodes.len() > 128 {
            return Err(OracleError::OverBudget(format!("{} candidate nodes", nodes.len())));
        }
        let coords: Vec<[usize; 3]> = nodes.iter().map(|&v| mis.coords(v)).collect();
        let mut adj = vec![0u128; nodes.len()];
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if mis.adjacent(nodes[i], nodes[j]) {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        let lines = std::array::from_fn(|d| {
            let mut keys: HashMap<[usize; 3], u128> = HashMap::new();
            for (i, c) in coords.iter().enumerate() {
                let mut k = *c;
                k[d] = usize::MAX;
                *keys.entry(k).or_default() |= 1 << i;
            }
            keys.into_values().collect()
        });
        Ok(BitGraph { nodes, adj, lines })
    }

    fn all(&self) -> u128 {
        if self.nodes.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.nodes.len()) - 1
        }
    }

    /// Exact maximum independent set within `cand`.
    fn max_independent(&self, cand: u128) -> (usize, Vec<NodeId>) {
        let mut best = self.greedy(cand);
        self.branch(cand, 0, &mut best);
        let set = bits(best).map(|i| self.nodes[i]).collect();
        (best.count_ones() as usize, set)
    }

    fn greedy(&self, mut cand: u128) -> u128 {
        let mut taken = 0;
        while cand != 0 {
            let v = bits(cand)
                .min_by_key(|&i| (self.adj[i] & cand).count_ones())
                .unwrap();
            taken |= 1 << v;
            cand &= !(self.adj[v] | 1 << v);
        }
        taken
    }

    fn branch(&self, cand: u128, taken: u128, best: &mut u128) {
        if cand == 0 {
            if taken.count_ones() > best.count_ones() {
                *best = taken;
            }
            return;
        }
        // Each axis partitions the candidates into cliques; an independent
        // set meets each clique at most once.
        let mut bound = u32::MAX;
        let mut pick = 0u128;
        for d in 0..3 {
            let mut hit = 0;
            for &l in &self.lines[d] {
                let m = l & cand;
                if m != 0 {
                    hit += 1;
                    if pick == 0 || m.count_ones() < pick.count_ones() {
                        pick = m;
                    }
                }
            }
            bound = bound.min(hit);
        }
        if taken.count_ones() + bound <= best.count_ones() {
            return;
        }
        // Either exactly one node of the smallest clique joins, or none does.
        for i in bits(pick) {
            self.branch(cand & !(self.adj[i] | 1 << i), taken | 1 << i, best);
        }
        self.branch(cand & !pick, taken, best);
    }
}

fn bits(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

/// Exact maximum independent set of the whole instance, with one witness.
pub fn brute_force_mis(mis: &MisInstance, budget: &OracleBudget) -> Result<(usize, Vec<NodeId>), OracleError> {
    budget.check(mis)?;
    let g = BitGraph::induced(mis, mis.nodes().to_vec())?;
    let (size, mut set) = g.max_independent(g.all());
    set.sort();
    Ok((size, set))
}

// Exact MIS over `removed` plus every non-solution node whose solution
// neighbors all lie in `removed`.
fn best_replacement(state: &SolutionState, removed: &[NodeId]) -> Result<(usize, Vec<NodeId>), OracleError> {
    let mut cand: Vec<NodeId> = removed.to_vec();
    for &w in state.non_free_nodes() {
        if state.solution_neighbors(w).all(|(_, x)| removed.contains(&x)) {
            cand.push(w);
        }
    }
    let g = BitGraph::induced(state.mis(), cand)?;
    Ok(g.max_independent(g.all()))
}

/// Tries every `p`-subset of the solution as the removal set. Returns the
/// first improving swap found, in lexicographic order of subsets.
pub fn naive_swap_search(state: &SolutionState, p: usize, budget: &OracleBudget) -> Result<Option<Move>, OracleError> {
    if !(1..=3).contains(&p) {
        return Err(OracleError::BadP(p));
    }
    budget.check(state.mis())?;
    let s = state.solution_sorted();
    if s.len() < p {
        return Ok(None);
    }
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        let removed: Vec<NodeId> = idx.iter().map(|&i| s[i]).collect();
        let (size, set) = best_replacement(state, &removed)?;
        if size > p {
            return Ok(Some(Move {
                removals: removed,
                insertions: set,
            }));
        }
        // Next combination.
        let mut k = p;
        while k > 0 && idx[k - 1] == s.len() - p + k - 1 {
            k -= 1;
        }
        if k == 0 {
            return Ok(None);
        }
        idx[k - 1] += 1;
        for j in k..p {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// For every facet, the exact MIS over its solution nodes and the nodes
/// their removal frees. Returns the first facet (axis-major) that improves.
pub fn naive_trellis_search(state: &SolutionState, budget: &OracleBudget) -> Result<Option<Move>, OracleError> {
    budget.check(state.mis())?;
    let mis = state.mis();
    for d in 0..3 {
        for k in 0..mis.n() {
            let removed: Vec<NodeId> = state
                .solution_sorted()
                .into_iter()
                .filter(|&x| mis.coords(x)[d] == k)
                .collect();
            if removed.is_empty() {
                continue;
            }
            let mut cand = removed.clone();
            for &w in state.non_free_nodes() {
                let tau = state.tau(w);
                if (tau == 1 || tau == 2) && state.solution_neighbors(w).all(|(_, x)| removed.contains(&x)) {
                    cand.push(w);
                }
            }
            let g = BitGraph::induced(mis, cand)?;
            let (size, set) = g.max_independent(g.all());
            if size > removed.len() {
                return Ok(Some(Move {
                    removals: removed,
                    insertions: set,
                }));
            }
        }
    }
    Ok(None)
}

/// Maximum matching size by repeated single augmenting paths.
pub fn reference_matching<P: Copy>(g: &BipartiteGraph<P>) -> usize {
    let mut adj = vec![Vec::new(); g.left_count()];
    for &(l, r, _) in g.edges() {
        adj[l as usize].push(r as usize);
    }
    let mut owner = vec![usize::MAX; g.right_count()];
    let mut size = 0;
    for l in 0..g.left_count() {
        let mut seen = vec![false; g.right_count()];
        if try_kuhn(l, &adj, &mut owner, &mut seen) {
            size += 1;
        }
    }
    size
}

fn try_kuhn(l: usize, adj: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    for &r in &adj[l] {
        if !seen[r] {
            seen[r] = true;
            if owner[r] == usize::MAX || try_kuhn(owner[r], adj, owner, seen) {
                owner[r] = l;
                return true;
            }
        }
    }
    false
}
