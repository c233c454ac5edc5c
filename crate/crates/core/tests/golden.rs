use hamwalk::evolution::{run_walk, StepOptions};
use hamwalk::graph::builtin_graph;
use hamwalk::oracle::enumerate_hamiltonian;

#[test]
fn c4_three_step_dump() {
    let g = builtin_graph("c4").unwrap();
    let opts = StepOptions::for_graph(&g).unwrap();
    let run = run_walk(&g, 1, Some(3), &opts, |_| {}).unwrap();
    assert_eq!(run.state.dump(), include_str!("golden/c4_step3.txt"));
}

#[test]
fn cube8_oracle_is_stable() {
    let g = builtin_graph("cube8").unwrap();
    let r = enumerate_hamiltonian(&g, 1).unwrap();
    // Every listed path is simple and starts at 1; cycles close back to 1.
    for p in &r.ham_paths {
        let mut s = p.clone();
        s.sort_unstable();
        assert_eq!(s, (1..=8).collect::<Vec<_>>());
        assert_eq!(p[0], 1);
    }
    for c in &r.ham_cycles {
        assert!(g.is_adjacent(*c.last().unwrap(), 1));
    }
    assert!(r.ham_paths.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(r.walk_counts, vec![1, 3, 9, 27, 81, 243, 729, 2187]);
}

#[test]
fn known_cycle_counts() {
    // Q3 has 6 Hamiltonian cycles and the Heawood graph 24; every one passes
    // through vertex 1 in both directions.
    let cube = enumerate_hamiltonian(&builtin_graph("cube8").unwrap(), 1).unwrap();
    assert_eq!(cube.undirected_cycle_count(), 6);
    assert_eq!(cube.ham_paths.len(), 18);
    let heawood = enumerate_hamiltonian(&builtin_graph("heawood").unwrap(), 1).unwrap();
    assert_eq!(heawood.undirected_cycle_count(), 24);
    assert_eq!(heawood.ham_paths.len(), 72);
}
