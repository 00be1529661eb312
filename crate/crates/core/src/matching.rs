//! Maximum-cardinality bipartite matching (Hopcroft–Karp).

use std::collections::VecDeque;

/// Bipartite graph with a payload on every edge.
#[derive(Debug, Clone)]
pub struct BipartiteGraph<P = u32> {
    left: usize,
    right: usize,
    edges: Vec<(u32, u32, P)>,
}

impl<P: Copy> BipartiteGraph<P> {
    pub fn new(left: usize, right: usize) -> Self {
        BipartiteGraph {
            left,
            right,
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, l: usize, r: usize, payload: P) {
        assert!(l < self.left && r < self.right, "edge ({l}, {r}) out of range");
        self.edges.push((l as u32, r as u32, payload));
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn edges(&self) -> &[(u32, u32, P)] {
        &self.edges
    }

    pub fn clear(&mut self, left: usize, right: usize) {
        self.left = left;
        self.right = right;
        self.edges.clear();
    }
}

impl<P: Copy> Default for BipartiteGraph<P> {
    fn default() -> Self {
        BipartiteGraph::new(0, 0)
    }
}

const UNMATCHED: u32 = u32::MAX;
const INF: u32 = u32::MAX;

/// Indices (into `g.edges()`) of a maximum matching. Deterministic for a
/// given edge order.
pub fn hopcroft_karp<P: Copy>(g: &BipartiteGraph<P>) -> Vec<usize> {
    let mut hk = HopcroftKarp::default();
    hk.run(g, &[]);
    hk.matched().collect()
}

/// Hopcroft–Karp with buffers kept between calls.
#[derive(Debug, Clone, Default)]
pub struct HopcroftKarp {
    start: Vec<u32>,
    fill: Vec<u32>,
    adj: Vec<u32>,
    match_l: Vec<u32>,
    match_r: Vec<u32>,
    dist: Vec<u32>,
    iter: Vec<u32>,
    queue: VecDeque<usize>,
    stack: Vec<(usize, u32)>,
}

impl HopcroftKarp {
    pub fn new() -> Self {
        Self::default()
    }

    /// Grows `seed`, which must be a matching given as edge indices, into a
    /// maximum matching and returns its size.
    pub fn run<P: Copy>(&mut self, g: &BipartiteGraph<P>, seed: &[usize]) -> usize {
        let (nl, nr) = (g.left, g.right);
        // CSR adjacency from left vertices, preserving edge order.
        self.start.clear();
        self.start.resize(nl + 1, 0);
        for &(l, _, _) in &g.edges {
            self.start[l as usize + 1] += 1;
        }
        for i in 0..nl {
            self.start[i + 1] += self.start[i];
        }
        self.fill.clear();
        self.fill.extend_from_slice(&self.start);
        self.adj.clear();
        self.adj.resize(g.edges.len(), 0);
        for (e, &(l, _, _)) in g.edges.iter().enumerate() {
            self.adj[self.fill[l as usize] as usize] = e as u32;
            self.fill[l as usize] += 1;
        }

        // Matched edge index per vertex side.
        self.match_l.clear();
        self.match_l.resize(nl, UNMATCHED);
        self.match_r.clear();
        self.match_r.resize(nr, UNMATCHED);
        for &e in seed {
            let (l, r, _) = g.edges[e];
            assert!(
                self.match_l[l as usize] == UNMATCHED && self.match_r[r as usize] == UNMATCHED,
                "seed is not a matching"
            );
            self.match_l[l as usize] = e as u32;
            self.match_r[r as usize] = e as u32;
        }
        self.dist.clear();
        self.dist.resize(nl, INF);
        self.iter.clear();
        self.iter.resize(nl, 0);
        let mut size = seed.len();

        loop {
            // BFS layering from free left vertices.
            self.queue.clear();
            for l in 0..nl {
                if self.match_l[l] == UNMATCHED {
                    self.dist[l] = 0;
                    self.queue.push_back(l);
                } else {
                    self.dist[l] = INF;
                }
            }
            let mut found = false;
            while let Some(l) = self.queue.pop_front() {
                for &e in &self.adj[self.start[l] as usize..self.start[l + 1] as usize] {
                    let r = g.edges[e as usize].1 as usize;
                    let m = self.match_r[r];
                    if m == UNMATCHED {
                        found = true;
                    } else {
                        let l2 = g.edges[m as usize].0 as usize;
                        if self.dist[l2] == INF {
                            self.dist[l2] = self.dist[l] + 1;
                            self.queue.push_back(l2);
                        }
                    }
                }
            }
            if !found {
                break;
            }
            self.iter.copy_from_slice(&self.start[..nl]);
            for l in 0..nl {
                if self.match_l[l] == UNMATCHED && self.augment(l, g) {
                    size += 1;
                }
            }
        }
        size
    }

    /// Edge indices of the last computed matching, ascending.
    pub fn matched(&self) -> impl Iterator<Item = usize> + '_ {
        let mut m: Vec<usize> = self
            .match_l
            .iter()
            .filter(|&&e| e != UNMATCHED)
            .map(|&e| e as usize)
            .collect();
        m.sort_unstable();
        m.into_iter()
    }

    // Iterative DFS along the BFS layers; returns whether `root` got matched.
    fn augment<P: Copy>(&mut self, root: usize, g: &BipartiteGraph<P>) -> bool {
        // Stack of (left vertex, edge taken to reach the next left vertex).
        self.stack.clear();
        self.stack.push((root, UNMATCHED));
        while let Some(&(l, _)) = self.stack.last() {
            let mut advanced = false;
            while self.iter[l] < self.start[l + 1] {
                let e = self.adj[self.iter[l] as usize];
                self.iter[l] += 1;
                let r = g.edges[e as usize].1 as usize;
                let m = self.match_r[r];
                if m == UNMATCHED {
                    // Flip the path: every stacked edge plus `e`.
                    self.stack.last_mut().unwrap().1 = e;
                    for &(sl, se) in self.stack.iter() {
                        let sr = g.edges[se as usize].1 as usize;
                        self.match_l[sl] = se;
                        self.match_r[sr] = se;
                    }
                    return true;
                }
                let l2 = g.edges[m as usize].0 as usize;
                if self.dist[l2] == self.dist[l] + 1 {
                    self.stack.last_mut().unwrap().1 = e;
                    self.stack.push((l2, UNMATCHED));
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                self.dist[l] = INF;
                self.stack.pop();
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_matching<P: Copy>(g: &BipartiteGraph<P>, m: &[usize]) -> bool {
        let mut l = vec![false; g.left_count()];
        let mut r = vec![false; g.right_count()];
        m.iter().all(|&e| {
            let (a, b, _) = g.edges()[e];
            !std::mem::replace(&mut l[a as usize], true) && !std::mem::replace(&mut r[b as usize], true)
        })
    }

    #[test]
    fn empty_graph() {
        let g: BipartiteGraph = BipartiteGraph::new(4, 4);
        assert!(hopcroft_karp(&g).is_empty());
    }

    #[test]
    fn biclique_is_perfect() {
        let mut g = BipartiteGraph::new(7, 7);
        for l in 0..7 {
            for r in 0..7 {
                g.add_edge(l, r, 0u32);
            }
        }
        let m = hopcroft_karp(&g);
        assert_eq!(m.len(), 7);
        assert!(is_matching(&g, &m));
    }

    #[test]
    fn needs_augmenting_path() {
        // Greedy would match 0-0 and strand left 1.
        let mut g = BipartiteGraph::new(2, 2);
        g.add_edge(0, 0, 'a');
        g.add_edge(0, 1, 'b');
        g.add_edge(1, 0, 'c');
        let m = hopcroft_karp(&g);
        assert_eq!(m.len(), 2);
        assert!(is_matching(&g, &m));
        let payloads: Vec<char> = m.iter().map(|&e| g.edges()[e].2).collect();
        assert_eq!(payloads, vec!['b', 'c']);
    }

    #[test]
    fn seeded_run_reaches_maximum() {
        // The seed 0-0 blocks left 1 until the path 1-0-0-1 flips it.
        let mut g = BipartiteGraph::new(2, 2);
        g.add_edge(0, 0, ());
        g.add_edge(0, 1, ());
        g.add_edge(1, 0, ());
        let mut hk = HopcroftKarp::new();
        assert_eq!(hk.run(&g, &[0]), 2);
        assert_eq!(hk.matched().collect::<Vec<_>>(), vec![1, 2]);
        // Buffers are reused across graphs of different shapes.
        let mut g = BipartiteGraph::new(5, 3);
        for l in 0..5 {
            g.add_edge(l, l % 3, ());
        }
        assert_eq!(hk.run(&g, &[]), 3);
    }

    #[test]
    #[should_panic(expected = "seed is not a matching")]
    fn bad_seed_panics() {
        let mut g = BipartiteGraph::new(2, 2);
        g.add_edge(0, 0, ());
        g.add_edge(1, 0, ());
        HopcroftKarp::new().run(&g, &[0, 1]);
    }

    #[test]
    fn long_chain() {
        // Path l0-r0-l1-r1-...; edges listed so that the first phase
        // matches l_i with r_i except the last.
        let k = 50;
        let mut g = BipartiteGraph::new(k, k);
        for i in 0..k {
            g.add_edge(i, i, ());
            if i + 1 < k {
                g.add_edge(i + 1, i, ());
            }
        }
        assert_eq!(hopcroft_karp(&g).len(), k);
    }
}
