//! Incremental solution representation.
//!
//! All nodes live in one permutation split into sections:
//! `[solution | free | 1-tight | 2-tight | 3-tight]`, where the last three
//! make up the non-free nodes. For every non-solution node we keep its
//! tightness (number of solution neighbors) and, per axis, the solution
//! neighbor on that axis's line. For every solution node `x` and axis `d`,
//! `mu[x][d]` counts the 1-tight nodes on the axis-`d` line through `x`;
//! it is stored per grid cell, which holds at most one solution node.
//! Insert and remove touch only the `3(n - 1)` neighbors of the moved node.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::mis::{MisInstance, NodeId};

const NOT_IN_GRAPH: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("{0} is not a node of the graph")]
    InvalidNode(NodeId),
    #[error("cannot insert {0}: it is not free")]
    NotFree(NodeId),
    #[error("cannot remove {0}: it is not in the solution")]
    NotInSolution(NodeId),
    #[error("{0} and {1} are adjacent, the set is not independent")]
    NotIndependent(NodeId, NodeId),
    #[error("{0} listed twice")]
    Duplicate(NodeId),
}

#[derive(Debug, Clone)]
pub struct SolutionState {
    mis: Arc<MisInstance>,
    perm: Vec<NodeId>,
    pos: Vec<u32>,
    sol_count: usize,
    free_count: usize,
    // Sizes of the 1-tight and 2-tight sections; 3-tight nodes fill the rest.
    one_count: usize,
    two_count: usize,
    tau: Vec<u8>,
    // Solution neighbor of a non-solution node on each axis, NONE if absent.
    sol_nbr: Vec<[NodeId; 3]>,
    // Indexed by cell (row * n + col).
    mu: Vec<[u16; 3]>,
    n: usize,
    last_out: Vec<u64>,
    step: u64,
}

impl SolutionState {
    /// Empty solution: every node is free.
    pub fn new(mis: Arc<MisInstance>) -> Self {
        let space = mis.id_space();
        let n = mis.n();
        let perm = mis.nodes().to_vec();
        let mut pos = vec![NOT_IN_GRAPH; space];
        for (i, v) in perm.iter().enumerate() {
            pos[v.index()] = i as u32;
        }
        let free_count = perm.len();
        SolutionState {
            mis,
            perm,
            pos,
            sol_count: 0,
            free_count,
            one_count: 0,
            two_count: 0,
            tau: vec![0; space],
            sol_nbr: vec![[NodeId::NONE; 3]; space],
            mu: vec![[0; 3]; n * n],
            n,
            last_out: vec![0; space],
            step: 0,
        }
    }

    /// Recomputes every field directly from the definitions for solution `s`.
    /// `last_out` stays zero and the global step starts at zero.
    pub fn rebuild_from_scratch(mis: Arc<MisInstance>, s: &[NodeId]) -> Result<Self, StateError> {
        let space = mis.id_space();
        let mut in_s = vec![false; space];
        for &x in s {
            if !mis.contains(x) {
                return Err(StateError::InvalidNode(x));
            }
            if in_s[x.index()] {
                return Err(StateError::Duplicate(x));
            }
            in_s[x.index()] = true;
        }
        let mut tau = vec![0u8; space];
        let mut sol_nbr = vec![[NodeId::NONE; 3]; space];
        for &x in s {
            for d in 0..3 {
                for &w in mis.line(x, d) {
                    if w == x {
                        continue;
                    }
                    if in_s[w.index()] {
                        return Err(StateError::NotIndependent(x, w));
                    }
                    tau[w.index()] += 1;
                    sol_nbr[w.index()][d] = x;
                }
            }
        }
        let n = mis.n();
        let mut mu = vec![[0u16; 3]; n * n];
        for &v in mis.nodes() {
            if !in_s[v.index()] && tau[v.index()] == 1 {
                let (d, x) = sol_nbr[v.index()]
                    .iter()
                    .enumerate()
                    .find(|(_, y)| !y.is_none())
                    .map(|(d, y)| (d, *y))
                    .unwrap();
                mu[x.index() / n][d] += 1;
            }
        }
        let mut perm: Vec<NodeId> = s.to_vec();
        perm.extend(mis.nodes().iter().filter(|v| !in_s[v.index()] && tau[v.index()] == 0));
        let free_count = perm.len() - s.len();
        let mut sections = [0; 4];
        for t in 1..=3 {
            let before = perm.len();
            perm.extend(mis.nodes().iter().filter(|v| !in_s[v.index()] && tau[v.index()] == t));
            sections[t as usize] = perm.len() - before;
        }
        let mut pos = vec![NOT_IN_GRAPH; space];
        for (i, v) in perm.iter().enumerate() {
            pos[v.index()] = i as u32;
        }
        Ok(SolutionState {
            mis,
            perm,
            pos,
            sol_count: s.len(),
            free_count,
            one_count: sections[1],
            two_count: sections[2],
            tau,
            sol_nbr,
            mu,
            n,
            last_out: vec![0; space],
            step: 0,
        })
    }

    pub fn mis(&self) -> &Arc<MisInstance> {
        &self.mis
    }

    pub fn len(&self) -> usize {
        self.sol_count
    }

    pub fn is_empty(&self) -> bool {
        self.sol_count == 0
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn solution(&self) -> &[NodeId] {
        &self.perm[..self.sol_count]
    }

    pub fn free_nodes(&self) -> &[NodeId] {
        &self.perm[self.sol_count..self.sol_count + self.free_count]
    }

    pub fn non_free_nodes(&self) -> &[NodeId] {
        &self.perm[self.sol_count + self.free_count..]
    }

    /// Non-solution nodes with exactly `t` solution neighbors, `t` in 1..=3.
    pub fn tight_nodes(&self, t: u8) -> &[NodeId] {
        let one = self.sol_count + self.free_count;
        let two = one + self.one_count;
        let three = two + self.two_count;
        match t {
            1 => &self.perm[one..two],
            2 => &self.perm[two..three],
            3 => &self.perm[three..],
            _ => panic!("tightness {t} out of range"),
        }
    }

    /// Free and non-free nodes together.
    pub fn non_solution_nodes(&self) -> &[NodeId] {
        &self.perm[self.sol_count..]
    }

    /// No free node left: nothing can be inserted without a removal.
    #[inline]
    pub fn is_maximal(&self) -> bool {
        self.free_count == 0
    }

    #[inline]
    pub fn in_solution(&self, v: NodeId) -> bool {
        (self.pos[v.index()] as usize) < self.sol_count
    }

    #[inline]
    pub fn is_free(&self, v: NodeId) -> bool {
        let p = self.pos[v.index()] as usize;
        p >= self.sol_count && p < self.sol_count + self.free_count
    }

    /// Number of solution neighbors. Zero for solution nodes.
    #[inline]
    pub fn tau(&self, v: NodeId) -> u8 {
        self.tau[v.index()]
    }

    /// Solution neighbor of `v` on its axis-`d` line.
    #[inline]
    pub fn solution_neighbor(&self, v: NodeId, d: usize) -> Option<NodeId> {
        let x = self.sol_nbr[v.index()][d];
        (!x.is_none()).then_some(x)
    }

    #[inline]
    pub(crate) fn solution_neighbors_raw(&self, v: NodeId) -> [NodeId; 3] {
        self.sol_nbr[v.index()]
    }

    /// `(axis, node)` pairs of the solution neighbors of `v`.
    pub fn solution_neighbors(&self, v: NodeId) -> impl Iterator<Item = (usize, NodeId)> + '_ {
        self.sol_nbr[v.index()]
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_none())
            .map(|(d, x)| (d, *x))
    }

    /// Count of 1-tight nodes on the axis-`d` line through solution node `x`.
    #[inline]
    pub fn mu(&self, x: NodeId, d: usize) -> u16 {
        self.mu[self.cell(x)][d]
    }

    #[inline]
    fn cell(&self, x: NodeId) -> usize {
        x.index() / self.n
    }

    /// Number of axes through `x` carrying a 1-tight node.
    pub fn nu(&self, x: NodeId) -> Result<u8, StateError> {
        if !self.mis.contains(x) {
            return Err(StateError::InvalidNode(x));
        }
        if !self.in_solution(x) {
            return Err(StateError::NotInSolution(x));
        }
        Ok(self.nu_unchecked(x))
    }

    #[inline]
    pub(crate) fn nu_unchecked(&self, x: NodeId) -> u8 {
        let m = &self.mu[self.cell(x)];
        (m[0] > 0) as u8 + (m[1] > 0) as u8 + (m[2] > 0) as u8
    }

    /// Global step at which `v` last left the solution, 0 if it never did.
    pub fn last_out(&self, v: NodeId) -> u64 {
        self.last_out[v.index()]
    }

    /// Incremented by every insert and remove.
    pub fn step(&self) -> u64 {
        self.step
    }

    #[inline]
    fn swap_positions(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.perm.swap(i, j);
        self.pos[self.perm[i].index()] = i as u32;
        self.pos[self.perm[j].index()] = j as u32;
    }

    /// Inserts a free node.
    pub fn insert(&mut self, x: NodeId) -> Result<(), StateError> {
        if !self.mis.contains(x) {
            return Err(StateError::InvalidNode(x));
        }
        if !self.is_free(x) {
            return Err(StateError::NotFree(x));
        }
        let p = self.pos[x.index()] as usize;
        self.swap_positions(p, self.sol_count);
        self.sol_count += 1;
        self.free_count -= 1;

        let mis = Arc::clone(&self.mis);
        for d in 0..3 {
            for &w in mis.line(x, d) {
                if w == x {
                    continue;
                }
                let wi = w.index();
                let before = self.tau[wi];
                self.tau[wi] = before + 1;
                // Each section boundary moves one slot to the left, taking w
                // from the tail of its section to the head of the next.
                let end = self.sol_count + self.free_count + [0, self.one_count, self.one_count + self.two_count][before as usize];
                self.swap_positions(self.pos[wi] as usize, end - 1);
                match before {
                    0 => {
                        self.free_count -= 1;
                        self.one_count += 1;
                        let c = self.cell(x);
                        self.mu[c][d] += 1;
                    }
                    1 => {
                        self.one_count -= 1;
                        self.two_count += 1;
                        let (d2, y) = self.only_neighbor(w);
                        let c = self.cell(y);
                        self.mu[c][d2] -= 1;
                    }
                    _ => self.two_count -= 1,
                }
                self.sol_nbr[wi][d] = x;
            }
        }
        self.step += 1;
        Ok(())
    }

    /// Removes a solution node; it becomes free.
    pub fn remove(&mut self, x: NodeId) -> Result<(), StateError> {
        if !self.mis.contains(x) {
            return Err(StateError::InvalidNode(x));
        }
        if !self.in_solution(x) {
            return Err(StateError::NotInSolution(x));
        }
        let p = self.pos[x.index()] as usize;
        self.swap_positions(p, self.sol_count - 1);
        self.sol_count -= 1;
        self.free_count += 1;
        self.tau[x.index()] = 0;
        let c = self.cell(x);
        self.mu[c] = [0; 3];

        let mis = Arc::clone(&self.mis);
        for d in 0..3 {
            for &w in mis.line(x, d) {
                if w == x {
                    continue;
                }
                let wi = w.index();
                self.sol_nbr[wi][d] = NodeId::NONE;
                self.tau[wi] -= 1;
                // w moves from the head of its section to the tail of the
                // previous one.
                let after = self.tau[wi];
                let head = self.sol_count + self.free_count + [0, self.one_count, self.one_count + self.two_count][after as usize];
                self.swap_positions(self.pos[wi] as usize, head);
                match after {
                    0 => {
                        self.free_count += 1;
                        self.one_count -= 1;
                    }
                    1 => {
                        self.one_count += 1;
                        self.two_count -= 1;
                        let (d2, y) = self.only_neighbor(w);
                        let c = self.cell(y);
                        self.mu[c][d2] += 1;
                    }
                    _ => self.two_count += 1,
                }
            }
        }
        self.step += 1;
        self.last_out[x.index()] = self.step;
        Ok(())
    }

    #[inline]
    fn only_neighbor(&self, w: NodeId) -> (usize, NodeId) {
        let nb = &self.sol_nbr[w.index()];
        let d = (0..3).find(|&d| !nb[d].is_none()).expect("1-tight node without neighbor");
        (d, nb[d])
    }

    /// Replaces the current solution by `target` using removals and
    /// insertions of the symmetric difference only.
    pub fn restore(&mut self, target: &[NodeId]) -> Result<(), StateError> {
        if let Some(&x) = target.iter().find(|x| !self.mis.contains(**x)) {
            return Err(StateError::InvalidNode(x));
        }
        let sorted;
        let target = if target.windows(2).all(|w| w[0] < w[1]) {
            target
        } else {
            let mut t = target.to_vec();
            t.sort_unstable();
            sorted = t;
            &sorted[..]
        };
        let extra: Vec<NodeId> = self
            .solution()
            .iter()
            .copied()
            .filter(|x| target.binary_search(x).is_err())
            .collect();
        for x in extra {
            self.remove(x)?;
        }
        for &x in target {
            if !self.in_solution(x) {
                self.insert(x)?;
            }
        }
        Ok(())
    }

    /// Solution as a sorted list, for comparisons and snapshots.
    pub fn solution_sorted(&self) -> Vec<NodeId> {
        let mut s = self.solution().to_vec();
        s.sort_unstable();
        s
    }

    /// Field-by-field comparison with another state over the same graph,
    /// ignoring permutation order within sections and `last_out`.
    pub fn structural_diff(&self, other: &SolutionState) -> Option<String> {
        let sizes = |s: &Self| [s.sol_count, s.free_count, s.one_count, s.two_count];
        if sizes(self) != sizes(other) {
            return Some(format!("section sizes {:?} vs {:?}", sizes(self), sizes(other)));
        }
        let set = |s: &[NodeId]| s.iter().copied().collect::<BTreeSet<_>>();
        if set(self.solution()) != set(other.solution()) {
            return Some("solution sets differ".into());
        }
        if set(self.free_nodes()) != set(other.free_nodes()) {
            return Some("free sets differ".into());
        }
        for &v in self.mis.nodes() {
            let i = v.index();
            if self.tau[i] != other.tau[i] {
                return Some(format!("tau({v}) {} vs {}", self.tau[i], other.tau[i]));
            }
            if self.sol_nbr[i] != other.sol_nbr[i] {
                return Some(format!("solution neighbors of {v} differ"));
            }
        }
        for c in 0..self.mu.len() {
            if self.mu[c] != other.mu[c] {
                return Some(format!("mu of cell {c}: {:?} vs {:?}", self.mu[c], other.mu[c]));
            }
        }
        None
    }

    /// Checks section layout and compares against a from-scratch rebuild.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, v) in self.perm.iter().enumerate() {
            if self.pos[v.index()] as usize != i {
                return Err(format!("pos of {v} is stale"));
            }
            let t = self.tau[v.index()];
            let expected = if i < self.sol_count + self.free_count {
                0
            } else if i < self.sol_count + self.free_count + self.one_count {
                1
            } else if i < self.sol_count + self.free_count + self.one_count + self.two_count {
                2
            } else {
                3
            };
            if t != expected {
                return Err(format!("{v} with tau {t} sits in the wrong section"));
            }
        }
        let fresh = SolutionState::rebuild_from_scratch(Arc::clone(&self.mis), self.solution())
            .map_err(|e| e.to_string())?;
        match self.structural_diff(&fresh) {
            Some(diff) => Err(diff),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pls::{PlsInstance, Triple};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> Arc<MisInstance> {
        let inst = PlsInstance::new(2, vec![Triple::new(1, 1, 1)]).unwrap();
        Arc::new(MisInstance::transform(&inst))
    }

    #[test]
    fn fresh_state() {
        let mis = small();
        let st = SolutionState::new(Arc::clone(&mis));
        assert_eq!(st.len(), 0);
        assert_eq!(st.free_count(), 4);
        assert!(!st.is_maximal());
        st.check_invariants().unwrap();
        let empty = SolutionState::rebuild_from_scratch(mis, &[]).unwrap();
        assert!(st.structural_diff(&empty).is_none());
    }

    #[test]
    fn empty_graph_is_maximal() {
        let full = PlsInstance::new(
            2,
            vec![Triple::new(1, 1, 1), Triple::new(1, 2, 2), Triple::new(2, 1, 2), Triple::new(2, 2, 1)],
        )
        .unwrap();
        let st = SolutionState::new(Arc::new(MisInstance::transform(&full)));
        assert!(st.is_maximal());
    }

    #[test]
    fn insert_center_node() {
        let mis = small();
        let mut st = SolutionState::new(Arc::clone(&mis));
        let x = mis.node_of(Triple::new(2, 2, 2)).unwrap();
        st.insert(x).unwrap();
        assert_eq!(st.nu(x).unwrap(), 3);
        for d in 0..3 {
            assert_eq!(st.mu(x, d), 1);
        }
        assert!(st.is_maximal());
        st.check_invariants().unwrap();
        assert_eq!(st.insert(x), Err(StateError::NotFree(x)));

        let before = SolutionState::new(Arc::clone(&mis));
        st.remove(x).unwrap();
        assert!(st.structural_diff(&before).is_none());
        assert_eq!(st.last_out(x), 2);
        assert_eq!(st.remove(x), Err(StateError::NotInSolution(x)));
    }

    #[test]
    fn nu_errors() {
        let mis = small();
        let st = SolutionState::new(Arc::clone(&mis));
        let x = mis.node_of(Triple::new(2, 2, 2)).unwrap();
        assert_eq!(st.nu(x), Err(StateError::NotInSolution(x)));
        assert_eq!(st.nu(NodeId(0)), Err(StateError::InvalidNode(NodeId(0))));
    }

    #[test]
    fn two_tight_becomes_one_tight() {
        // n = 5, empty L. x = (1,1,1) and y = (2,2,1)... need a common
        // neighbor: w = (1,2,1) sees x on axis 1 and y on axis 0.
        let mis = Arc::new(MisInstance::transform(&PlsInstance::empty(5).unwrap()));
        let mut st = SolutionState::new(Arc::clone(&mis));
        let x = mis.node_at([0, 0, 0]).unwrap();
        let y = mis.node_at([1, 1, 0]).unwrap();
        let w = mis.node_at([0, 1, 0]).unwrap();
        st.insert(x).unwrap();
        st.insert(y).unwrap();
        assert_eq!(st.tau(w), 2);
        let mu_y_before = st.mu(y, 0);
        st.remove(x).unwrap();
        assert_eq!(st.tau(w), 1);
        assert_eq!(st.mu(y, 0), mu_y_before + 1);
        st.check_invariants().unwrap();
    }

    #[test]
    fn rebuild_rejects_dependent_set() {
        let mis = small();
        let a = mis.node_of(Triple::new(2, 2, 1)).unwrap();
        let b = mis.node_of(Triple::new(2, 2, 2)).unwrap();
        assert!(matches!(
            SolutionState::rebuild_from_scratch(Arc::clone(&mis), &[a, b]),
            Err(StateError::NotIndependent(..))
        ));
        assert_eq!(
            SolutionState::rebuild_from_scratch(mis, &[a, a]).unwrap_err(),
            StateError::Duplicate(a)
        );
    }

    #[test]
    fn random_fuzz_matches_rebuild() {
        let inst = crate::generate::generate_qc(5, 0.3, 11).unwrap();
        let mis = Arc::new(MisInstance::transform(&inst));
        let mut st = SolutionState::new(Arc::clone(&mis));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for op in 0..1000 {
            let insert = st.is_empty() || (st.free_count() > 0 && rng.gen_bool(0.6));
            if insert {
                let f = st.free_nodes()[rng.gen_range(0..st.free_count())];
                st.insert(f).unwrap();
            } else {
                let x = st.solution()[rng.gen_range(0..st.len())];
                st.remove(x).unwrap();
            }
            if op % 10 == 0 {
                st.check_invariants().unwrap();
            }
        }
        st.check_invariants().unwrap();
    }

    #[test]
    fn restore_reaches_target() {
        let inst = crate::generate::generate_qwh(6, 0.3, 2).unwrap();
        let mis = Arc::new(MisInstance::transform(&inst));
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut st = SolutionState::new(Arc::clone(&mis));
        while !st.is_maximal() {
            let f = st.free_nodes()[rng.gen_range(0..st.free_count())];
            st.insert(f).unwrap();
        }
        let snapshot = st.solution_sorted();
        for _ in 0..5 {
            let x = st.solution()[rng.gen_range(0..st.len())];
            st.remove(x).unwrap();
        }
        while !st.is_maximal() {
            let f = st.free_nodes()[rng.gen_range(0..st.free_count())];
            st.insert(f).unwrap();
        }
        st.restore(&snapshot).unwrap();
        assert_eq!(st.solution_sorted(), snapshot);
        st.check_invariants().unwrap();
    }
}
