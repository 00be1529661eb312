use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use plse::generate::{generate_qc, generate_qwh};
use plse::ils::{greedy_init, kick};
use plse::matching::{hopcroft_karp, BipartiteGraph};
use plse::mis::{validate_extension, MisInstance, NodeId};
use plse::neighborhoods::{
    apply_move, local_search, maximalize, search_swap1, search_trellis, LsLevel, Move,
};
use plse::oracle::reference_matching;
use plse::pls::{is_pls_set, parse_instance, serialize_instance, Triple};
use plse::state::SolutionState;

fn instance(n: usize, ratio: f64, seed: u64, qwh: bool) -> Arc<MisInstance> {
    let inst = if qwh {
        generate_qwh(n, ratio, seed).unwrap()
    } else {
        generate_qc(n, ratio, seed).unwrap()
    };
    Arc::new(MisInstance::transform(&inst))
}

fn is_valid(state: &SolutionState) -> bool {
    let mis = state.mis();
    let triples: Vec<Triple> = state.solution().iter().map(|&v| mis.triple(v)).collect();
    validate_extension(mis.instance(), &triples).unwrap()
}

fn check_move(state: &SolutionState, mv: &Move) -> Result<(), TestCaseError> {
    prop_assert!(mv.gain() >= 1);
    let mut next = state.clone();
    apply_move(&mut next, mv).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(next.len() as isize, state.len() as isize + mv.gain());
    prop_assert!(is_valid(&next));
    prop_assert_eq!(next.check_invariants(), Ok(()));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn state_matches_rebuild_after_random_ops(
        n in 3usize..9,
        ratio in 0.0f64..0.6,
        seed in any::<u64>(),
        ops in prop::collection::vec(any::<u32>(), 1..200),
    ) {
        let mis = instance(n, ratio, seed, true);
        let mut state = SolutionState::new(mis.clone());
        for op in ops {
            let free = state.free_nodes();
            if op % 3 != 0 && !free.is_empty() {
                let v = free[op as usize / 3 % free.len()];
                state.insert(v).unwrap();
            } else if !state.is_empty() {
                let s = state.solution();
                let x = s[op as usize / 3 % s.len()];
                state.remove(x).unwrap();
            }
        }
        prop_assert_eq!(state.check_invariants(), Ok(()));
        let rebuilt = SolutionState::rebuild_from_scratch(mis, &state.solution_sorted()).unwrap();
        prop_assert_eq!(state.structural_diff(&rebuilt), None);
        prop_assert!(is_valid(&state));
    }

    #[test]
    fn independence_matches_latin_condition(
        n in 2usize..6,
        seed in any::<u64>(),
        picks in prop::collection::vec(any::<u32>(), 0..12),
    ) {
        let mis = instance(n, 0.3, seed, true);
        prop_assume!(mis.node_count() > 0);
        let mut set: Vec<NodeId> = picks.iter().map(|&p| mis.nodes()[p as usize % mis.node_count()]).collect();
        set.sort();
        set.dedup();
        let independent = set.iter().enumerate().all(|(i, &a)| set[i + 1..].iter().all(|&b| !mis.adjacent(a, b)));
        let triples: Vec<Triple> = set.iter().map(|&v| mis.triple(v)).collect();
        prop_assert_eq!(validate_extension(mis.instance(), &triples).unwrap(), independent);
        let mut all = triples.clone();
        all.extend_from_slice(mis.instance().given());
        prop_assert_eq!(is_pls_set(n, &all).unwrap(), independent);
    }

    #[test]
    fn instance_text_round_trips(n in 2usize..12, ratio in 0.0f64..1.0, seed in any::<u64>()) {
        let inst = generate_qwh(n, ratio, seed).unwrap();
        let text = serialize_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn corner_is_the_only_shared_two_tight_node(n in 3usize..7, seed in any::<u64>()) {
        let mis = instance(n, 0.3, seed, false);
        let mut state = SolutionState::new(mis.clone());
        maximalize(&mut state, &mut ChaCha8Rng::seed_from_u64(seed));
        let two: Vec<NodeId> = state.tight_nodes(2).to_vec();
        for &u in &two {
            let nb: Vec<NodeId> = state.solution_neighbors(u).map(|(_, x)| x).collect();
            let (cx, cy, cu) = (mis.coords(nb[0]), mis.coords(nb[1]), mis.coords(u));
            let corner = [0, 1, 2].map(|d| cx[d] + cy[d] - cu[d]);
            for &w in &two {
                if w != u {
                    let other: Vec<NodeId> = state.solution_neighbors(w).map(|(_, x)| x).collect();
                    if other.contains(&nb[0]) && other.contains(&nb[1]) {
                        prop_assert_eq!(mis.coords(w), corner);
                    }
                }
            }
        }
    }

    #[test]
    fn local_search_never_shrinks_and_moves_are_sound(
        n in 3usize..10,
        ratio in 0.1f64..0.7,
        seed in any::<u64>(),
        level in prop::sample::select(LsLevel::ALL.to_vec()),
    ) {
        let mis = instance(n, ratio, seed, false);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = SolutionState::new(mis);
        maximalize(&mut state, &mut rng);
        if let Some(mv) = search_swap1(&state).unwrap() {
            check_move(&state, &mv)?;
        }
        if let Some(mv) = search_trellis(&state).unwrap() {
            check_move(&state, &mv)?;
        }
        let before = state.len();
        let stats = local_search(&mut state, level, &mut rng);
        prop_assert!(state.len() >= before);
        prop_assert_eq!(stats.final_size, state.len());
        prop_assert!(state.is_maximal());
        prop_assert!(is_valid(&state));
        prop_assert_eq!(search_swap1(&state).unwrap(), None);
    }

    #[test]
    fn greedy_and_kick_keep_states_maximal(n in 3usize..12, ratio in 0.0f64..0.7, seed in any::<u64>()) {
        let mis = instance(n, ratio, seed, false);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = greedy_init(mis, &mut rng, true);
        prop_assert!(state.is_maximal());
        prop_assert!(is_valid(&state));
        let best = state.solution_sorted();
        if kick(&mut state, &best, &mut rng, None) {
            prop_assert!(state.is_maximal());
            prop_assert!(is_valid(&state));
            prop_assert_eq!(state.check_invariants(), Ok(()));
        } else {
            prop_assert_eq!(state.solution_sorted(), best);
        }
    }

    #[test]
    fn hopcroft_karp_matches_reference(
        l in 0usize..30,
        r in 0usize..30,
        edges in prop::collection::vec((any::<u16>(), any::<u16>()), 0..200),
    ) {
        let mut g = BipartiteGraph::new(l, r);
        if l > 0 && r > 0 {
            for (a, b) in edges {
                g.add_edge(a as usize % l, b as usize % r, ());
            }
        }
        let m = hopcroft_karp(&g);
        prop_assert_eq!(m.len(), reference_matching(&g));
        let mut left = vec![false; l];
        let mut right = vec![false; r];
        for e in m {
            let (a, b, _) = g.edges()[e];
            prop_assert!(!std::mem::replace(&mut left[a as usize], true));
            prop_assert!(!std::mem::replace(&mut right[b as usize], true));
        }
    }
}
