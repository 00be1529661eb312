//! Iterated local search: greedy start, then local search, acceptance of
//! equal-or-better solutions, and a kick that forces a few non-solution nodes
//! into the incumbent.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mis::{MisInstance, NodeId};
use crate::neighborhoods::{maximalize, LocalSearch, LsLevel};
use crate::state::SolutionState;

/// Look-ahead scores are computed for at most this many minimum-degree
/// candidates per step.
pub const LOOKAHEAD_SAMPLE: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct IlsConfig {
    pub level: LsLevel,
    pub time_limit: Duration,
    pub seed: u64,
    /// Upper bound on forced insertions per kick; `None` means the number of
    /// non-solution nodes.
    pub kick_cap: Option<usize>,
    pub greedy_lookahead: bool,
    /// Stop after this many local search runs even if time remains.
    pub max_iterations: Option<u64>,
}

impl IlsConfig {
    pub fn new(level: LsLevel, time_limit: Duration, seed: u64) -> Self {
        IlsConfig {
            level,
            time_limit,
            seed,
            kick_cap: None,
            greedy_lookahead: true,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IlsStats {
    /// Size of the greedy starting solution.
    pub initial_size: usize,
    pub best_size: usize,
    /// Local search runs.
    pub iterations: u64,
    pub first_ls_improvement: usize,
    /// `(elapsed_ms, best_size)` at the start and at every strict improvement.
    pub series: Vec<(f64, usize)>,
    pub mean_ls_ms: f64,
    pub elapsed_ms: f64,
    /// Local search runs (after a kick) that ended exactly on the incumbent.
    pub returned_to_best: u64,
}

impl IlsStats {
    /// Best size known at `ms` milliseconds into the run.
    pub fn best_at(&self, ms: f64) -> usize {
        self.series
            .iter()
            .take_while(|&&(t, _)| t <= ms)
            .last()
            .map_or(self.initial_size, |&(_, s)| s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IlsError {
    #[error("time limit must be positive")]
    BadTimeLimit,
}

/// Bucket queue of free nodes keyed by residual degree.
struct DegreeBuckets {
    deg: Vec<u32>,
    slot: Vec<u32>,
    buckets: Vec<Vec<NodeId>>,
    min: usize,
}

impl DegreeBuckets {
    fn new(mis: &MisInstance) -> Self {
        let mut deg = vec![0u32; mis.id_space()];
        let mut slot = vec![u32::MAX; mis.id_space()];
        let mut buckets = vec![Vec::new(); 3 * mis.n().max(1)];
        for &v in mis.nodes() {
            let d: usize = (0..3).map(|a| mis.line(v, a).len() - 1).sum();
            deg[v.index()] = d as u32;
            slot[v.index()] = buckets[d].len() as u32;
            buckets[d].push(v);
        }
        DegreeBuckets { deg, slot, buckets, min: 0 }
    }

    fn remove(&mut self, v: NodeId) {
        let d = self.deg[v.index()] as usize;
        let s = self.slot[v.index()] as usize;
        let b = &mut self.buckets[d];
        b.swap_remove(s);
        if s < b.len() {
            self.slot[b[s].index()] = s as u32;
        }
        self.slot[v.index()] = u32::MAX;
    }

    fn contains(&self, v: NodeId) -> bool {
        self.slot[v.index()] != u32::MAX
    }

    fn decrement(&mut self, v: NodeId) {
        self.remove(v);
        let d = self.deg[v.index()] as usize - 1;
        self.deg[v.index()] = d as u32;
        self.slot[v.index()] = self.buckets[d].len() as u32;
        self.buckets[d].push(v);
        self.min = self.min.min(d);
    }

    fn min_bucket(&mut self) -> Option<&[NodeId]> {
        while self.min < self.buckets.len() && self.buckets[self.min].is_empty() {
            self.min += 1;
        }
        self.buckets.get(self.min).map(|b| b.as_slice())
    }
}

/// Minimum residual degree greedy. Degrees count only nodes that are still
/// free. With `lookahead`, ties go to the candidate whose free neighbors have
/// the smallest total residual degree (scored on a random sample of at most
/// [`LOOKAHEAD_SAMPLE`] tied candidates); remaining ties are random.
pub fn greedy_init<R: Rng>(mis: Arc<MisInstance>, rng: &mut R, lookahead: bool) -> SolutionState {
    let mut q = DegreeBuckets::new(&mis);
    let mut state = SolutionState::new(mis.clone());
    let mut closed = Vec::new();
    loop {
        let v = {
            let Some(bucket) = q.min_bucket() else { break };
            if !lookahead || bucket.len() == 1 {
                bucket[rng.gen_range(0..bucket.len())]
            } else {
                let sample: Vec<NodeId> = if bucket.len() <= LOOKAHEAD_SAMPLE {
                    bucket.to_vec()
                } else {
                    bucket.choose_multiple(rng, LOOKAHEAD_SAMPLE).copied().collect()
                };
                let mut best = u64::MAX;
                let mut pick = sample[0];
                let mut ties = 0;
                for &c in &sample {
                    let mut score = 0u64;
                    mis.for_each_neighbor(c, |w, _| {
                        if q.contains(w) {
                            score += q.deg[w.index()] as u64;
                        }
                    });
                    if score < best {
                        best = score;
                        pick = c;
                        ties = 1;
                    } else if score == best {
                        ties += 1;
                        if rng.gen_range(0..ties) == 0 {
                            pick = c;
                        }
                    }
                }
                pick
            }
        };

        closed.clear();
        closed.push(v);
        mis.for_each_neighbor(v, |w, _| {
            if q.contains(w) {
                closed.push(w);
            }
        });
        for &w in &closed {
            q.remove(w);
        }
        for &w in &closed[1..] {
            mis.for_each_neighbor(w, |z, _| {
                if q.contains(z) {
                    q.decrement(z);
                }
            });
        }
        state.insert(v).expect("greedy picked a non-free node");
    }
    debug_assert!(state.is_maximal());
    state
}

/// Geometric kick size: `P(k = κ) = 2^-κ`, truncated at `cap`.
pub fn sample_kick_size<R: Rng>(rng: &mut R, cap: usize) -> usize {
    let mut k = 1;
    while k < cap && rng.gen::<bool>() {
        k += 1;
    }
    k.min(cap)
}

/// The first forced node of a kick: among non-solution nodes adjacent to a
/// solution node that has a 1-tight neighbor, the one that left the solution
/// longest ago (ties random). Without such solution nodes any non-solution
/// node qualifies.
pub fn first_kick_node<R: Rng>(state: &SolutionState, rng: &mut R) -> Option<NodeId> {
    let mis = state.mis();
    let mut best = u64::MAX;
    let mut pick = None;
    let mut ties = 0u32;
    let mut consider = |w: NodeId, rng: &mut R| {
        let t = state.last_out(w);
        if t < best {
            best = t;
            pick = Some(w);
            ties = 1;
        } else if t == best {
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                pick = Some(w);
            }
        }
    };
    let eligible = |x: NodeId| (0..3).any(|d| state.mu(x, d) > 0);
    let mut any = false;
    for &x in state.solution() {
        if !eligible(x) {
            continue;
        }
        any = true;
        for d in 0..3 {
            for &w in mis.line(x, d) {
                // Visit each node once, through its first eligible neighbor.
                let nb = state.solution_neighbors_raw(w);
                if w != x && !nb[..d].iter().any(|&y| !y.is_none() && eligible(y)) {
                    consider(w, rng);
                }
            }
        }
    }
    if !any {
        for &w in state.non_solution_nodes() {
            consider(w, rng);
        }
    }
    pick
}

fn force_insert(state: &mut SolutionState, u: NodeId) {
    for x in state.solution_neighbors_raw(u) {
        if !x.is_none() {
            state.remove(x).expect("solution neighbor must be removable");
        }
    }
    state.insert(u).expect("node must be free after clearing its neighbors");
}

/// Best solution so far, with a membership map so that resetting the state
/// to it and comparing against it need no sorting.
#[derive(Debug, Clone)]
struct Incumbent {
    nodes: Vec<NodeId>,
    member: Vec<bool>,
    scratch: Vec<NodeId>,
}

impl Incumbent {
    fn new(space: usize, nodes: &[NodeId]) -> Self {
        let mut inc = Incumbent {
            nodes: Vec::new(),
            member: vec![false; space],
            scratch: Vec::new(),
        };
        inc.replace(nodes);
        inc
    }

    fn replace(&mut self, nodes: &[NodeId]) {
        for x in self.nodes.drain(..) {
            self.member[x.index()] = false;
        }
        for &x in nodes {
            self.member[x.index()] = true;
        }
        self.nodes.extend_from_slice(nodes);
    }

    /// Whether the incumbent is exactly the current solution.
    fn matches(&self, state: &SolutionState) -> bool {
        state.len() == self.nodes.len() && state.solution().iter().all(|x| self.member[x.index()])
    }

    fn restore(&mut self, state: &mut SolutionState) {
        self.scratch.clear();
        self.scratch
            .extend(state.solution().iter().copied().filter(|x| !self.member[x.index()]));
        for &x in &self.scratch {
            state.remove(x).expect("solution node must be removable");
        }
        for &x in &self.nodes {
            if !state.in_solution(x) {
                state.insert(x).expect("incumbent must be a valid solution");
            }
        }
    }
}

/// Resets `state` to `best` and perturbs it with forced insertions, then
/// maximalizes. Returns `false` (leaving `state` equal to `best`) when no
/// non-solution node exists.
pub fn kick<R: Rng>(state: &mut SolutionState, best: &[NodeId], rng: &mut R, kick_cap: Option<usize>) -> bool {
    let mut inc = Incumbent::new(state.mis().id_space(), best);
    kick_from(state, &mut inc, rng, kick_cap)
}

fn kick_from<R: Rng>(state: &mut SolutionState, best: &mut Incumbent, rng: &mut R, kick_cap: Option<usize>) -> bool {
    best.restore(state);
    let outside = state.non_solution_nodes().len();
    if outside == 0 {
        return false;
    }
    let k = sample_kick_size(rng, kick_cap.unwrap_or(outside).min(outside).max(1));
    let first = first_kick_node(state, rng).expect("a non-solution node exists");
    force_insert(state, first);
    for _ in 1..k {
        let rest = state.non_solution_nodes();
        if rest.is_empty() {
            break;
        }
        let u = rest[rng.gen_range(0..rest.len())];
        force_insert(state, u);
    }
    maximalize(state, rng);
    true
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Runs the search until the time limit, the iteration cap, or a provably
/// optimal solution (every empty cell filled). Returns the best solution,
/// sorted, and run statistics.
pub fn run(mis: Arc<MisInstance>, config: &IlsConfig) -> Result<(Vec<NodeId>, IlsStats), IlsError> {
    if config.time_limit.is_zero() {
        return Err(IlsError::BadTimeLimit);
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = mis.n();
    let complete = n * n - mis.instance().len();
    let mis_space = mis.id_space();
    let mut state = greedy_init(mis, &mut rng, config.greedy_lookahead);
    let mut stats = IlsStats {
        initial_size: state.len(),
        ..Default::default()
    };
    let mut best = Incumbent::new(mis_space, state.solution());
    let mut best_size = state.len();
    stats.series.push((ms(start.elapsed()), best_size));

    let mut ls = LocalSearch::new();
    let mut ls_time = Duration::ZERO;
    loop {
        let t0 = Instant::now();
        ls.run(&mut state, config.level, &mut rng);
        ls_time += t0.elapsed();
        stats.iterations += 1;
        if stats.iterations == 1 {
            stats.first_ls_improvement = state.len() - stats.initial_size;
        }
        if state.len() > best_size {
            best_size = state.len();
            stats.series.push((ms(start.elapsed()), best_size));
            best.replace(state.solution());
        } else if state.len() == best_size {
            if best.matches(&state) {
                if stats.iterations > 1 {
                    stats.returned_to_best += 1;
                }
            } else {
                best.replace(state.solution());
            }
        }
        if best_size == complete
            || start.elapsed() >= config.time_limit
            || config.max_iterations.is_some_and(|m| stats.iterations >= m)
        {
            break;
        }
        if !kick_from(&mut state, &mut best, &mut rng, config.kick_cap) {
            break;
        }
    }
    stats.best_size = best_size;
    stats.mean_ls_ms = ms(ls_time) / stats.iterations as f64;
    stats.elapsed_ms = ms(start.elapsed());
    let mut best = best.nodes;
    best.sort_unstable();
    Ok((best, stats))
}
