//! Three-node removals. On a 2-maximal solution an improving 3-swap has one
//! of two shapes: a 3-tight node `u` whose three solution neighbors are
//! removed (case I), or two 2-tight nodes `u`, `v` sharing exactly one
//! solution neighbor `x`, with the union of their neighborhoods removed
//! (case II).

use crate::mis::{coord_distance, MisInstance, NodeId};
use crate::state::SolutionState;

use super::{one_tight_on_line, swap1_unchecked, swap2_unchecked, Move, SearchError};

pub fn search_swap3(state: &SolutionState) -> Result<Option<Move>, SearchError> {
    if !state.is_maximal() {
        return Err(SearchError::NotMaximal(state.free_count()));
    }
    if swap1_unchecked(state).is_some() {
        return Err(SearchError::NotPMaximal(1));
    }
    if swap2_unchecked(state).is_some() {
        return Err(SearchError::NotPMaximal(2));
    }
    Ok(swap3_unchecked(state))
}

pub(crate) fn swap3_unchecked(state: &SolutionState) -> Option<Move> {
    three_tight_case(state).or_else(|| shared_neighbor_case(state))
}

/// Case I. With `s[d]` the solution neighbor of `u` across axis `d`, the six
/// lines `s[i]`-`j` (`i != j`) each offer at most one node, and the corner
/// `s[i] + s[j] - u` shares the lines `s[i]`-`j` and `s[j]`-`i`.
fn three_tight_case(state: &SolutionState) -> Option<Move> {
    let mis = state.mis();
    for &u in state.tight_nodes(3) {
        let s = state.solution_neighbors_raw(u);
        let mut count = 0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j && state.mu(s[i], j) > 0 {
                    count += 1;
                }
            }
        }
        let mut corners = [None; 3];
        let cu = mis.coords(u);
        for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            if state.mu(s[i], j) == 0 && state.mu(s[j], i) == 0 {
                let mut p = cu;
                p[i] = mis.coords(s[i])[i];
                p[j] = mis.coords(s[j])[j];
                if let Some(w) = mis.node_at(p) {
                    if state.tau(w) == 2 {
                        corners[k] = Some(w);
                        count += 1;
                    }
                }
            }
        }
        if count >= 3 {
            let mut insertions = vec![u];
            for i in 0..3 {
                for j in 0..3 {
                    if i != j && state.mu(s[i], j) > 0 {
                        insertions.push(one_tight_on_line(state, s[i], j).unwrap());
                    }
                }
            }
            insertions.extend(corners.iter().flatten());
            return Some(Move {
                removals: s.to_vec(),
                insertions,
            });
        }
    }
    None
}

/// Case II. For each solution node `x`, every pair of 2-tight neighbors
/// `u`, `v` on different lines through `x` whose other solution neighbors
/// `y`, `z` differ. After removing `x, y, z` and inserting `u, v`, freed
/// nodes lie on five lines: one through `x`, two each through `y` and `z`.
/// An O(1) upper bound screens the pair; survivors get an exact count from
/// the nodes on those lines.
fn shared_neighbor_case(state: &SolutionState) -> Option<Move> {
    let mis = state.mis();
    let mut twos: Vec<(NodeId, usize, NodeId)> = Vec::new();
    for &x in state.solution() {
        twos.clear();
        for d in 0..3 {
            for &w in mis.line(x, d) {
                if w != x && state.tau(w) == 2 {
                    let other = state
                        .solution_neighbors(w)
                        .find(|&(e, _)| e != d)
                        .map(|(_, y)| y)
                        .unwrap();
                    twos.push((w, d, other));
                }
            }
        }
        for i in 0..twos.len() {
            for j in i + 1..twos.len() {
                let (u, du, y) = twos[i];
                let (v, dv, z) = twos[j];
                if du == dv || y == z {
                    continue;
                }
                if let Some(mv) = evaluate_pair(state, x, u, v, y, z) {
                    return Some(mv);
                }
            }
        }
    }
    None
}

#[derive(Clone, Copy)]
struct Line {
    owner: NodeId,
    origin: [usize; 3],
    axis: usize,
}

impl Line {
    #[inline]
    fn contains(&self, p: [usize; 3]) -> bool {
        (0..3).all(|e| e == self.axis || p[e] == self.origin[e])
    }
}

/// Crossing point of the axis-`d1` line through `o1` and the axis-`d2` line
/// through `o2`, if they cross.
#[inline]
fn crossing(o1: [usize; 3], d1: usize, o2: [usize; 3], d2: usize) -> Option<[usize; 3]> {
    if d1 == d2 {
        return None;
    }
    let e = 3 - d1 - d2;
    if o1[e] != o2[e] {
        return None;
    }
    let mut p = o1;
    p[d1] = o2[d1];
    Some(p)
}

fn evaluate_pair(
    state: &SolutionState,
    x: NodeId,
    u: NodeId,
    v: NodeId,
    y: NodeId,
    z: NodeId,
) -> Option<Move> {
    let mis = state.mis();
    let (cu, cv) = (mis.coords(u), mis.coords(v));
    let removed = [x, y, z];

    let mut lines = [Line { owner: x, origin: [0; 3], axis: 0 }; 5];
    let mut len = 0;
    for &o in &removed {
        let origin = mis.coords(o);
        for axis in 0..3 {
            let line = Line { owner: o, origin, axis };
            if !line.contains(cu) && !line.contains(cv) {
                lines[len] = line;
                len += 1;
            }
        }
    }
    debug_assert_eq!(len, 5);
    let lines = &lines[..len];

    let blocked = |p: [usize; 3]| {
        let du = coord_distance(p, cu);
        let dv = coord_distance(p, cv);
        du <= 1 || dv <= 1
    };
    let removable_only = |w: NodeId| state.solution_neighbors(w).all(|(_, s)| removed.contains(&s));

    // Upper bound: lines still holding a usable 1-tight node, plus usable
    // multi-tight nodes where two lines cross.
    let mut bound = 0;
    for l in lines {
        let mut ones = state.mu(l.owner, l.axis) as usize;
        if ones == 0 {
            continue;
        }
        let mut seen: [[usize; 3]; 6] = [[usize::MAX; 3]; 6];
        let mut k = 0;
        for c in [cu, cv] {
            for e in 0..3 {
                if let Some(p) = crossing(l.origin, l.axis, c, e) {
                    if p == l.origin || seen[..k].contains(&p) {
                        continue;
                    }
                    seen[k] = p;
                    k += 1;
                    if let Some(w) = mis.node_at(p) {
                        if state.tau(w) == 1 {
                            ones -= 1;
                        }
                    }
                }
            }
        }
        if ones > 0 {
            bound += 1;
        }
    }
    let mut multi: [[usize; 3]; 10] = [[usize::MAX; 3]; 10];
    let mut multi_len = 0;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let Some(p) = crossing(lines[i].origin, lines[i].axis, lines[j].origin, lines[j].axis)
            else {
                continue;
            };
            if multi[..multi_len].contains(&p) || blocked(p) {
                continue;
            }
            if let Some(w) = mis.node_at(p) {
                if state.tau(w) >= 2 && !state.in_solution(w) && removable_only(w) {
                    multi[multi_len] = p;
                    multi_len += 1;
                }
            }
        }
    }
    bound += multi_len;
    if bound < 2 {
        return None;
    }

    // Exact: every freed node on the five lines, then a small exact MIS.
    let mut cands: Vec<NodeId> = Vec::new();
    let mut home: Vec<usize> = Vec::new();
    for (li, l) in lines.iter().enumerate() {
        for &w in mis.line(l.owner, l.axis) {
            if w == l.owner || w == u || w == v || cands.contains(&w) {
                continue;
            }
            if blocked(mis.coords(w)) || !removable_only(w) {
                continue;
            }
            cands.push(w);
            home.push(li);
        }
    }
    let picked = max_independent_on_lines(mis, &cands, &home);
    if picked.len() < 2 {
        return None;
    }
    let mut insertions = vec![u, v];
    insertions.extend(picked.iter().map(|&i| cands[i]));
    Some(Move {
        removals: removed.to_vec(),
        insertions,
    })
}

/// Exact maximum independent set of nodes that each lie on one of a few
/// lines (`home[i]` names one line through node `i`). Nodes sharing a home
/// line form a clique, which gives the pruning bound.
fn max_independent_on_lines(mis: &MisInstance, nodes: &[NodeId], home: &[usize]) -> Vec<usize> {
    let coords: Vec<[usize; 3]> = nodes.iter().map(|&w| mis.coords(w)).collect();
    let k = nodes.len();
    let adj: Vec<Vec<usize>> = (0..k)
        .map(|i| (0..k).filter(|&j| j != i && coord_distance(coords[i], coords[j]) == 1).collect())
        .collect();
    let mut best = Vec::new();
    let mut chosen = Vec::new();
    let avail: Vec<usize> = (0..k).collect();
    mis_rec(&avail, &adj, &coords, home, &mut chosen, &mut best);
    best
}

fn mis_rec(
    avail: &[usize],
    adj: &[Vec<usize>],
    coords: &[[usize; 3]],
    home: &[usize],
    chosen: &mut Vec<usize>,
    best: &mut Vec<usize>,
) {
    let mut lines_used = [false; 8];
    for &i in avail {
        lines_used[home[i]] = true;
    }
    let bound = lines_used.iter().filter(|&&b| b).count();
    if chosen.len() + bound <= best.len() {
        return;
    }
    if avail.is_empty() {
        best.clone_from(chosen);
        return;
    }

    let live = |i: usize| adj[i].iter().copied().filter(move |j| avail.contains(j));
    // A node whose live neighbors all sit on one line through it belongs to
    // some maximum independent set.
    let simplicial = avail.iter().copied().find(|&i| {
        let mut axis = None;
        live(i).all(|j| {
            let a = crate::mis::differing_axis(coords[i], coords[j]);
            match axis {
                None => {
                    axis = a;
                    true
                }
                Some(_) => axis == a,
            }
        })
    });
    if let Some(i) = simplicial {
        let rest: Vec<usize> = avail.iter().copied().filter(|&j| j != i && !adj[i].contains(&j)).collect();
        chosen.push(i);
        mis_rec(&rest, adj, coords, home, chosen, best);
        chosen.pop();
        return;
    }

    let pivot = avail.iter().copied().max_by_key(|&i| live(i).count()).unwrap();
    let with: Vec<usize> = avail.iter().copied().filter(|&j| j != pivot && !adj[pivot].contains(&j)).collect();
    chosen.push(pivot);
    mis_rec(&with, adj, coords, home, chosen, best);
    chosen.pop();
    let without: Vec<usize> = avail.iter().copied().filter(|&j| j != pivot).collect();
    mis_rec(&without, adj, coords, home, chosen, best);
}
