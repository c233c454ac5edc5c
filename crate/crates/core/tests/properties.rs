use hamwalk::evolution::{apply_step, run_walk, StepOptions};
use hamwalk::graph::{builtin_graph, parse_graph, random_regular_bipartite, Graph, Vertex};
use hamwalk::oracle::{count_walks, enumerate_hamiltonian, enumerate_hamiltonian_pruned};
use hamwalk::postselect::{postselect, FilterMode};
use hamwalk::signing::{search_signings, FlipUnitary};
use hamwalk::state::{initial_state, parity_fold};
use hamwalk::{compare_with_quantum, ExactProbability};
use proptest::prelude::*;

/// Held-Karp style counting: `ways[mask][v]` is the number of simple paths
/// from `start` covering exactly `mask` and ending at `v`. Independent of the
/// backtracking oracle.
fn count_paths_and_cycles(g: &Graph, start: Vertex) -> (u64, u64) {
    let n = g.n();
    let full = (1usize << n) - 1;
    let mut ways = vec![vec![0u64; n]; 1 << n];
    ways[1 << (start - 1)][start as usize - 1] = 1;
    for mask in 1..=full {
        for v in 0..n {
            let c = ways[mask][v];
            if c == 0 {
                continue;
            }
            for &w in g.neighbors(v as Vertex + 1) {
                let bit = 1 << (w - 1);
                if mask & bit == 0 {
                    ways[mask | bit][w as usize - 1] += c;
                }
            }
        }
    }
    let paths = ways[full].iter().sum();
    let cycles = (0..n)
        .filter(|&v| g.is_adjacent(v as Vertex + 1, start))
        .map(|v| ways[full][v])
        .sum();
    (paths, cycles)
}

fn random_graph() -> impl Strategy<Value = Graph> {
    (prop_oneof![Just(2usize), Just(3usize)], 3usize..=6, any::<u64>())
        .prop_filter_map("generation failed", |(d, half, seed)| {
            random_regular_bipartite(half, d, seed).ok()
        })
}

#[test]
fn held_karp_agrees_with_backtracking_on_builtins() {
    for name in ["c4", "k33", "cube8", "prism8", "prism12", "heawood", "moebius_kantor"] {
        let g = builtin_graph(name).unwrap();
        let r = enumerate_hamiltonian(&g, 1).unwrap();
        let (paths, cycles) = count_paths_and_cycles(&g, 1);
        assert_eq!(r.ham_paths.len() as u64, paths, "{name}");
        assert_eq!(r.ham_cycles.len() as u64, cycles, "{name}");
    }
}

#[test]
fn k33_cycle_count_matches_closed_form() {
    // K_{m,m} has (m!)^2 / (2m) undirected Hamiltonian cycles.
    let g = builtin_graph("k33").unwrap();
    let r = enumerate_hamiltonian(&g, 1).unwrap();
    assert_eq!(r.undirected_cycle_count(), 36 / 6);
    assert_eq!(r.ham_cycles.len(), 12);
}

#[test]
fn conservation_on_builtins() {
    for name in ["c4", "k33", "cube8", "prism12", "heawood"] {
        let g = builtin_graph(name).unwrap();
        let opts = StepOptions::for_graph(&g).unwrap();
        let mut s = initial_state(&g, 1).unwrap();
        for j in 1..g.n() {
            s = apply_step(&s, &opts).unwrap().0;
            assert_eq!(s.state_count() as u128, count_walks(&g, 1, j).unwrap());
            assert_eq!(s.state_count() as u128, (g.degree() as u128).pow(j as u32));
            assert_eq!(s.norm_squared(), ExactProbability::one(g.degree() as u32), "{name} step {j}");
        }
        s.audit().unwrap();
    }
}

#[test]
fn signings_only_change_signs() {
    let found = search_signings(3).unwrap();
    let g = builtin_graph("cube8").unwrap();
    let reference: Vec<_> = {
        let opts = StepOptions::new(FlipUnitary::from_matrix(found[0].clone(), 3).unwrap());
        let run = run_walk(&g, 1, None, &opts, |_| {}).unwrap();
        postselect(run.state, FilterMode::Path).survivors.terms().collect()
    };
    for m in found.iter().step_by(97) {
        let opts = StepOptions::new(FlipUnitary::from_matrix(m.clone(), 3).unwrap());
        let run = run_walk(&g, 1, None, &opts, |_| {}).unwrap();
        let terms: Vec<_> = postselect(run.state, FilterMode::Path).survivors.terms().collect();
        assert_eq!(terms.len(), reference.len());
        for ((ka, aa), (kb, ab)) in terms.iter().zip(&reference) {
            assert_eq!(ka, kb);
            assert_eq!(aa.halfpow, ab.halfpow);
        }
    }
}

#[test]
fn projection_before_final_step_is_empty() {
    let g = builtin_graph("heawood").unwrap();
    let opts = StepOptions::for_graph(&g).unwrap();
    for steps in 0..g.n() - 1 {
        let run = run_walk(&g, 1, Some(steps), &opts, |_| {}).unwrap();
        assert_eq!(postselect(run.state, FilterMode::Path).survivor_count(), 0, "steps={steps}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn text_round_trip(g in random_graph()) {
        let text = g.to_text();
        let again = parse_graph(&text).unwrap();
        prop_assert_eq!(&again, &g);
        prop_assert_eq!(again.to_text(), text);
    }

    #[test]
    fn survivors_match_oracle(g in random_graph(), start_pick in any::<u32>()) {
        let start = start_pick % g.n() as u32 + 1;
        let oracle = enumerate_hamiltonian(&g, start).unwrap();
        prop_assert_eq!(&oracle, &enumerate_hamiltonian_pruned(&g, start).unwrap());

        let opts = StepOptions::for_graph(&g).unwrap();
        let run = run_walk(&g, start, None, &opts, |_| {}).unwrap();
        let paths = postselect(run.state.clone(), FilterMode::Path);
        let cycles = postselect(run.state, FilterMode::Cycle);
        prop_assert_eq!(paths.walks(), oracle.ham_paths.clone());
        prop_assert_eq!(cycles.walks(), oracle.ham_cycles.clone());
        prop_assert_eq!(
            &paths.success_probability,
            &ExactProbability::new(oracle.ham_paths.len() as u128, g.degree() as u32, g.n() as u32 - 1)
        );
        for (key, _) in paths.survivors.terms() {
            prop_assert_eq!(parity_fold(&key.walk), g.full_mask());
            let mut sorted = key.walk.clone();
            sorted.sort_unstable();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), g.n());
        }
    }

    #[test]
    fn pruning_does_not_change_projection(g in random_graph()) {
        let opts = StepOptions::for_graph(&g).unwrap();
        let plain = run_walk(&g, 1, None, &opts, |_| {}).unwrap();
        let pruned = run_walk(&g, 1, None, &opts.clone().pruned(true), |_| {}).unwrap();
        let a: Vec<_> = postselect(plain.state, FilterMode::Path).survivors.terms().collect();
        let b: Vec<_> = postselect(pruned.state, FilterMode::Path).survivors.terms().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn walks_are_valid_and_alternate(g in random_graph(), steps in 0usize..6) {
        let steps = steps.min(g.n() - 1);
        let opts = StepOptions::for_graph(&g).unwrap();
        let run = run_walk(&g, 1, Some(steps), &opts, |_| {}).unwrap();
        run.state.audit().unwrap();
        prop_assert_eq!(run.state.state_count() as u128, count_walks(&g, 1, steps).unwrap());
        for w in run.state.walks() {
            prop_assert_eq!(g.part_of(*w.last().unwrap()) as usize, steps % 2);
        }
    }

    #[test]
    fn compare_matches_with_any_signing(g in random_graph(), pick in any::<prop::sample::Index>()) {
        if g.degree() <= 3 {
            let signings = search_signings(g.degree()).unwrap();
            let m = pick.get(&signings);
            let r = compare_with_quantum(&g, 1, FilterMode::Cycle, m, false).unwrap();
            prop_assert!(r.matches(), "{:?}", r);
        }
    }
}
