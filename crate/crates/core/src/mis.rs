//! The maximum independent set view of an extension instance.
//!
//! Every triple of `[n]^3` is a grid point. The node set `V_L` keeps the
//! points that are neither given nor at Hamming distance one from a given
//! triple; two nodes are adjacent iff they lie on a common grid line. Edges
//! are never stored: adjacency comes from probing the lines.

use std::fmt;

use thiserror::Error;

use crate::pls::{PlsError, PlsInstance, Triple};

/// Dense row-major index of a point of `[n]^3`:
/// `((row - 1) * n + (col - 1)) * n + (symbol - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const NONE: NodeId = NodeId(u32::MAX);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_none(self) -> bool {
        self == NodeId::NONE
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MisError {
    #[error("{0} is not a node of the graph")]
    InvalidNode(NodeId),
    #[error("grid direction must be 0, 1 or 2, got {0}")]
    InvalidDirection(usize),
    #[error(transparent)]
    Pls(#[from] PlsError),
    #[error("graph-side and Latin-side validity checks disagree: {0}")]
    CheckDisagreement(String),
}

/// Number of coordinates in which two 0-based points differ.
#[inline]
pub fn coord_distance(a: [usize; 3], b: [usize; 3]) -> usize {
    (a[0] != b[0]) as usize + (a[1] != b[1]) as usize + (a[2] != b[2]) as usize
}

/// The axis along which two points at distance one differ.
#[inline]
pub fn differing_axis(a: [usize; 3], b: [usize; 3]) -> Option<usize> {
    match (a[0] != b[0], a[1] != b[1], a[2] != b[2]) {
        (true, false, false) => Some(0),
        (false, true, false) => Some(1),
        (false, false, true) => Some(2),
        _ => None,
    }
}

/// Third axis given two distinct ones.
#[inline]
pub fn third_axis(a: usize, b: usize) -> usize {
    3 - a - b
}

/// 3D occupancy table: one slot per point of `[n]^3`, set iff the point is a node.
#[derive(Debug, Clone)]
pub struct CellArray {
    n: usize,
    member: Vec<bool>,
}

impl CellArray {
    #[inline]
    pub fn contains(&self, id: NodeId) -> bool {
        self.member.get(id.index()).copied().unwrap_or(false)
    }

    #[inline]
    pub fn get(&self, p: [usize; 3]) -> Option<NodeId> {
        let id = NodeId(((p[0] * self.n + p[1]) * self.n + p[2]) as u32);
        self.member[id.index()].then_some(id)
    }
}

/// Transformed instance: nodes, the cell array, and per-line node lists.
#[derive(Debug, Clone)]
pub struct MisInstance {
    n: usize,
    instance: PlsInstance,
    cells: CellArray,
    nodes: Vec<NodeId>,
    // Coordinates of every point of the id space.
    coord_table: Vec<[u16; 3]>,
    // Nodes of each grid line in coordinate order, CSR layout per axis.
    // Line key for axis d is the pair of the other two coordinates.
    line_start: [Vec<u32>; 3],
    line_members: [Vec<NodeId>; 3],
}

impl MisInstance {
    /// Builds `V_L = [n]^3 \ (L ∪ N*(L))` in time proportional to `n^3`.
    pub fn transform(instance: &PlsInstance) -> MisInstance {
        let n = instance.n();
        let mut taken_cell = vec![false; n * n];
        let mut taken_row_sym = vec![false; n * n];
        let mut taken_col_sym = vec![false; n * n];
        for t in instance.given() {
            let (r, c, s) = (t.row as usize - 1, t.col as usize - 1, t.symbol as usize - 1);
            taken_cell[r * n + c] = true;
            taken_row_sym[r * n + s] = true;
            taken_col_sym[c * n + s] = true;
        }
        let mut member = vec![false; n * n * n];
        let mut nodes = Vec::new();
        for r in 0..n {
            for c in 0..n {
                if taken_cell[r * n + c] {
                    continue;
                }
                for s in 0..n {
                    if !taken_row_sym[r * n + s] && !taken_col_sym[c * n + s] {
                        let id = (r * n + c) * n + s;
                        member[id] = true;
                        nodes.push(NodeId(id as u32));
                    }
                }
            }
        }
        let cells = CellArray { n, member };
        let mut mis = MisInstance {
            n,
            instance: instance.clone(),
            cells,
            nodes,
            coord_table: (0..n * n * n).map(|i| [i / (n * n), (i / n) % n, i % n].map(|x| x as u16)).collect(),
            line_start: Default::default(),
            line_members: Default::default(),
        };
        mis.build_lines();
        mis
    }

    fn build_lines(&mut self) {
        let n = self.n;
        for d in 0..3 {
            let mut counts = vec![0u32; n * n + 1];
            for &v in &self.nodes {
                counts[self.line_key(self.coords(v), d) + 1] += 1;
            }
            for k in 0..n * n {
                counts[k + 1] += counts[k];
            }
            let mut fill = counts.clone();
            let mut members = vec![NodeId::NONE; self.nodes.len()];
            // Nodes are in ascending id order, so each line comes out sorted
            // by its varying coordinate.
            for &v in &self.nodes {
                let k = self.line_key(self.coords(v), d);
                members[fill[k] as usize] = v;
                fill[k] += 1;
            }
            self.line_start[d] = counts;
            self.line_members[d] = members;
        }
    }

    #[inline]
    fn line_key(&self, p: [usize; 3], d: usize) -> usize {
        match d {
            0 => p[1] * self.n + p[2],
            1 => p[0] * self.n + p[2],
            _ => p[0] * self.n + p[1],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn instance(&self) -> &PlsInstance {
        &self.instance
    }

    pub fn cells(&self) -> &CellArray {
        &self.cells
    }

    /// Nodes of `V_L` in ascending id order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Size of the dense id space, `n^3`.
    pub fn id_space(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn contains(&self, id: NodeId) -> bool {
        self.cells.contains(id)
    }

    /// 0-based coordinates of a point.
    #[inline]
    pub fn coords(&self, id: NodeId) -> [usize; 3] {
        self.coord_table[id.index()].map(usize::from)
    }

    #[inline]
    pub fn id_of(&self, p: [usize; 3]) -> NodeId {
        NodeId(((p[0] * self.n + p[1]) * self.n + p[2]) as u32)
    }

    /// Node at 0-based coordinates, if that point belongs to `V_L`.
    #[inline]
    pub fn node_at(&self, p: [usize; 3]) -> Option<NodeId> {
        self.cells.get(p)
    }

    /// Node for a 1-based triple, if it belongs to `V_L`.
    pub fn node_of(&self, t: Triple) -> Option<NodeId> {
        if !t.in_range(self.n) {
            return None;
        }
        self.node_at([t.row as usize - 1, t.col as usize - 1, t.symbol as usize - 1])
    }

    pub fn triple(&self, id: NodeId) -> Triple {
        let [r, c, s] = self.coords(id);
        Triple::new(r as u16 + 1, c as u16 + 1, s as u16 + 1)
    }

    /// All nodes on the axis-`d` grid line through `id`, `id` included if it
    /// is a node. Sorted by the varying coordinate.
    #[inline]
    pub fn line(&self, id: NodeId, d: usize) -> &[NodeId] {
        let k = self.line_key(self.coords(id), d);
        let start = &self.line_start[d];
        &self.line_members[d][start[k] as usize..start[k + 1] as usize]
    }

    /// Like [`line`](Self::line) but addressed by any point on the line.
    #[inline]
    pub fn line_through(&self, p: [usize; 3], d: usize) -> &[NodeId] {
        let k = self.line_key(p, d);
        let start = &self.line_start[d];
        &self.line_members[d][start[k] as usize..start[k + 1] as usize]
    }

    /// Nodes on the axis-`d` line through `v`, excluding `v`.
    pub fn line_nodes(&self, v: NodeId, d: usize) -> Result<Vec<NodeId>, MisError> {
        self.check(v)?;
        if d > 2 {
            return Err(MisError::InvalidDirection(d));
        }
        Ok(self.line(v, d).iter().copied().filter(|&w| w != v).collect())
    }

    /// All nodes adjacent to `v`: at most `3(n - 1)` of them.
    pub fn neighbors(&self, v: NodeId) -> Result<Vec<NodeId>, MisError> {
        self.check(v)?;
        let mut out = Vec::with_capacity(3 * (self.n - 1));
        self.for_each_neighbor(v, |w, _| out.push(w));
        Ok(out)
    }

    /// Calls `f(w, d)` for every neighbor `w` of `v` sharing the axis-`d` line.
    #[inline]
    pub fn for_each_neighbor(&self, v: NodeId, mut f: impl FnMut(NodeId, usize)) {
        for d in 0..3 {
            for &w in self.line(v, d) {
                if w != v {
                    f(w, d);
                }
            }
        }
    }

    #[inline]
    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        coord_distance(self.coords(a), self.coords(b)) == 1
    }

    fn check(&self, v: NodeId) -> Result<(), MisError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(MisError::InvalidNode(v))
        }
    }
}

/// Checks that `s` is a feasible extension of `inst`, once on the graph side
/// (nodes of `V_L`, pairwise non-adjacent) and once on the Latin side
/// (`L ∪ S` is a PLS set). The two answers must agree.
pub fn validate_extension(inst: &PlsInstance, s: &[Triple]) -> Result<bool, MisError> {
    let n = inst.n();
    if let Some(&t) = s.iter().find(|t| !t.in_range(n)) {
        return Err(PlsError::OutOfRange(t, n).into());
    }

    let mis = MisInstance::transform(inst);
    let graph_ok = {
        let mut in_s = vec![false; mis.id_space()];
        let mut ok = true;
        for &t in s {
            match mis.node_of(t) {
                Some(v) if !in_s[v.index()] => in_s[v.index()] = true,
                _ => ok = false,
            }
        }
        ok && s.iter().all(|&t| {
            let v = mis.node_of(t).unwrap();
            let mut independent = true;
            mis.for_each_neighbor(v, |w, _| independent &= !in_s[w.index()]);
            independent
        })
    };

    let mut union = inst.given().to_vec();
    union.extend_from_slice(s);
    let latin_ok = crate::pls::is_pls_set(n, &union)?;

    if graph_ok != latin_ok {
        return Err(MisError::CheckDisagreement(format!(
            "graph check says {graph_ok}, Latin check says {latin_ok}"
        )));
    }
    Ok(graph_ok)
}
