use super::*;
use crate::grnn::ModelConfig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Example-2 setting: eight observable nodes A..H (ids 0..7), three missing
/// placeholders, edges A-B, B-C, E-F. M1, A, B, E already placed.
fn example2_state() -> CompletionState<f64> {
    let g = Graph::from_edges(8, [(0, 1), (1, 2), (4, 5)]).unwrap();
    let obs = PartialObservation::new(g, 3);
    let mut state = CompletionState::new(obs, 8).unwrap();
    for node in [8usize, 0, 1, 4] {
        state.place(node).unwrap();
    }
    state
}

/// Paper-layout row `[0.9, 0.1, 0.1, 0.2]` (entry j refers to position j)
/// becomes `[0.2, 0.1, 0.1, 0.9]` in the window layout, padded to `M`.
fn example2_phi() -> Vec<f64> {
    let mut phi = vec![0.2, 0.1, 0.1, 0.9];
    phi.resize(8, 0.5);
    phi
}

#[test]
fn node_type_degenerate_pools() {
    let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let state = CompletionState::<f64>::new(PartialObservation::new(g.clone(), 0), 8).unwrap();
    for _ in 0..10 {
        assert_eq!(select_node_type(&state, &mut rng).unwrap(), NodeType::Observable);
    }

    let mut state = CompletionState::<f64>::new(PartialObservation::new(g, 2), 8).unwrap();
    for node in [0usize, 1, 2] {
        state.place(node).unwrap();
    }
    for _ in 0..10 {
        assert_eq!(select_node_type(&state, &mut rng).unwrap(), NodeType::Missing);
    }
}

#[test]
fn node_type_frequency_matches_pool_ratio() {
    // m = 3 missing of |V| = 10 remaining: frequency 0.3 within ±0.02.
    let g = Graph::from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]).unwrap();
    let state = CompletionState::<f64>::new(PartialObservation::new(g, 3), 8).unwrap();
    assert_eq!(state.remaining().len(), 10);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut missing = 0usize;
    for _ in 0..10_000 {
        if select_node_type(&state, &mut rng).unwrap() == NodeType::Missing {
            missing += 1;
        }
    }
    let freq = missing as f64 / 10_000.0;
    assert!((freq - 0.3).abs() < 0.02, "missing frequency {freq}");
}

#[test]
fn example2_scores_and_fallback() {
    let state = example2_state();
    assert_eq!(
        state.frontier().iter().copied().collect::<Vec<_>>(),
        vec![2, 5],
        "frontier must be {{C, F}}"
    );
    let phi = example2_phi();
    let scores = score_candidates(&state, &phi);
    let d_c = scores.iter().find(|(v, _)| *v == 2).unwrap().1;
    let d_f = scores.iter().find(|(v, _)| *v == 5).unwrap().1;
    assert!((d_c - 1.0 / 9.0).abs() < 1e-12, "D_C = {d_c}");
    assert!((d_f - 0.25).abs() < 1e-12, "D_F = {d_f}");

    // Both below one: uniform fallback among D, G, H (ids 3, 6, 7).
    let mut seen = std::collections::BTreeSet::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let (v, fallback) = select_observable_node(&state, &scores, &mut rng).unwrap();
        assert!(fallback);
        assert!([3usize, 6, 7].contains(&v), "picked {v}");
        seen.insert(v);
    }
    assert_eq!(seen.len(), 3, "all three fallback nodes reachable");
}

#[test]
fn example1_likelihoods_and_selection() {
    // A=0, B=1, C=2 observed with A-B, B-C; M1=3, M2=4 missing.
    // Placed: M1 then A. Paper row [0.75, 0.2] -> window [0.2, 0.75].
    let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let obs = PartialObservation::new(g, 2);
    let mut state = CompletionState::<f64>::new(obs, 8).unwrap();
    state.place(3).unwrap();
    state.place(0).unwrap();
    let mut phi = vec![0.2, 0.75];
    phi.resize(8, 0.5);

    let like_b = observable_likelihood(&state, &phi, 1);
    let like_c = observable_likelihood(&state, &phi, 2);
    assert!((like_b - 0.2).abs() < 1e-12);
    assert!((like_c - 0.8).abs() < 1e-12);

    // D_B = 0.25 < 1 and C is outside the frontier, so the fallback picks
    // from {C} deterministically: the likelihood maximizer.
    let scores = score_candidates(&state, &phi);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (v, fallback) = select_observable_node(&state, &scores, &mut rng).unwrap();
    assert_eq!(v, 2);
    assert!(fallback);
}

#[test]
fn argmax_wins_when_frontier_is_whole_pool() {
    // Two observable nodes left, both in the frontier, one with D > 1.
    let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (2, 3)]).unwrap();
    let obs = PartialObservation::new(g, 0);
    let mut state = CompletionState::<f64>::new(obs, 8).unwrap();
    state.place(0).unwrap();
    state.place(1).unwrap();
    // Frontier = {2, 3} = remaining observable pool.
    let pool: Vec<usize> = state.remaining_observable().collect();
    assert_eq!(state.frontier().iter().copied().collect::<Vec<_>>(), pool);
    // phi: lookback 2 (node 0) high for both; make node 3 win via nothing --
    // both have the same neighbors among placed (only node 0), so tie-break.
    let mut phi = vec![0.3, 0.9];
    phi.resize(8, 0.5);
    let scores = score_candidates(&state, &phi);
    assert!(scores.iter().all(|(_, d)| *d > 1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (v, fallback) = select_observable_node(&state, &scores, &mut rng).unwrap();
    assert!(!fallback);
    assert!(pool.contains(&v));
}

#[test]
fn frontier_matches_brute_force_on_random_prefixes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for trial in 0..100 {
        let n_obs = 5 + (trial % 12);
        let missing = trial % 4;
        let mut g = Graph::new(n_obs);
        for u in 0..n_obs {
            for v in (u + 1)..n_obs {
                if rng.gen::<f64>() < 0.25 {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let obs = PartialObservation::new(g, missing);
        let n = obs.total_nodes();
        let mut state = CompletionState::<f64>::new(obs.clone(), 8).unwrap();
        let mut pool: Vec<usize> = (0..n).collect();
        let prefix = 1 + (rng.gen::<usize>() % (n - 1));
        for _ in 0..prefix {
            let idx = rng.gen_range(0..pool.len());
            state.place(pool.swap_remove(idx)).unwrap();
        }
        // Brute force: unplaced nodes with at least one placed observed
        // neighbor in the observation.
        let brute: BTreeSet<usize> = (0..n)
            .filter(|&v| state.position_of(v).is_none())
            .filter(|&v| {
                state.order().iter().any(|&u| {
                    obs.is_observed(u) && obs.is_observed(v) && obs.observed.has_edge(u, v)
                })
            })
            .collect();
        assert_eq!(state.frontier(), &brute, "trial {trial}");
    }
}

#[test]
fn frontier_only_shrinks_on_missing_nodes() {
    let mut state = example2_state();
    let before = state.frontier().clone();
    state.place(9).unwrap(); // a missing node
    assert_eq!(state.frontier(), &before);
}

#[test]
fn likelihood_equal_outside_frontier() {
    // Lemma check at unit scale: every unplaced observed node outside the
    // frontier has the bitwise-identical observable likelihood.
    let mut rng = ChaCha8Rng::seed_from_u64(31415);
    for trial in 0..100 {
        let n_obs = 6 + (trial % 10);
        let mut g = Graph::new(n_obs);
        for u in 0..n_obs {
            for v in (u + 1)..n_obs {
                if rng.gen::<f64>() < 0.2 {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let obs = PartialObservation::new(g, 2);
        let n = obs.total_nodes();
        let mut state = CompletionState::<f64>::new(obs, 6).unwrap();
        let mut pool: Vec<usize> = (0..n).collect();
        let prefix = 1 + (rng.gen::<usize>() % (n - 1));
        for _ in 0..prefix {
            let idx = rng.gen_range(0..pool.len());
            state.place(pool.swap_remove(idx)).unwrap();
        }
        let phi: Vec<f64> = (0..6).map(|_| rng.gen_range(0.05..0.95)).collect();
        let outside: Vec<usize> = state
            .remaining_observable()
            .filter(|v| !state.frontier().contains(v))
            .collect();
        if outside.len() < 2 {
            continue;
        }
        let reference = observable_likelihood(&state, &phi, outside[0]);
        for &v in &outside[1..] {
            let like = observable_likelihood(&state, &phi, v);
            assert!(
                like == reference,
                "trial {trial}: {like} != {reference} for node {v}"
            );
        }
    }
}

#[test]
fn impute_copies_observed_and_draws_missing() {
    // M1 placed first, then A: the single entry touches a missing node and
    // is drawn with probability 0.9.
    let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let obs = PartialObservation::new(g.clone(), 2);
    let mut state = CompletionState::<f64>::new(obs, 8).unwrap();
    state.place(3).unwrap();
    state.place(0).unwrap();
    let mut phi = vec![0.9];
    phi.resize(8, 0.5);
    let mut ones = 0;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if impute_row(&state, &phi, &mut rng)[0] == SeqEntry::One {
            ones += 1;
        }
    }
    assert!((850..=950).contains(&ones), "ones = {ones}");

    // Observed pair: the value comes from the observation, not phi.
    let obs = PartialObservation::new(g, 0);
    let mut state = CompletionState::<f64>::new(obs, 8).unwrap();
    state.place(0).unwrap();
    state.place(1).unwrap();
    let mut phi0 = vec![1e-7];
    phi0.resize(8, 1e-7);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    assert_eq!(impute_row(&state, &phi0, &mut rng), vec![SeqEntry::One]);
}

#[test]
fn impute_at_clamp_floor_rarely_fires() {
    let g = Graph::new(2);
    let obs = PartialObservation::new(g, 1);
    let mut state = CompletionState::<f64>::new(obs, 8).unwrap();
    state.place(2).unwrap();
    state.place(0).unwrap();
    let phi = vec![1e-7; 8];
    let mut ones = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    for _ in 0..10_000 {
        if impute_row(&state, &phi, &mut rng)[0] == SeqEntry::One {
            ones += 1;
        }
    }
    assert!((ones as f64 / 10_000.0) < 1e-3);
}

fn small_model(window: usize, seed: u64) -> ModelParams<f64> {
    let cfg = ModelConfig {
        layer_count: 1,
        hidden_dim: 6,
        mlp_hidden: 5,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ModelParams::init(cfg, window, &mut rng)
}

#[test]
fn greedy_with_nothing_missing_reproduces_observation() {
    let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
    let obs = PartialObservation::new(g.clone(), 0);
    let params = small_model(8, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let result = deepnc_l(&obs, &params, &mut rng).unwrap();
    assert_eq!(result.graph.edges(), g.edges());
}

#[test]
fn greedy_fig3_scenario() {
    let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let obs = PartialObservation::new(g, 2);
    let params = small_model(8, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let result = deepnc_l(&obs, &params, &mut rng).unwrap();
    assert_eq!(result.graph.node_count(), 5);
    assert!(result.graph.has_edge(0, 1));
    assert!(result.graph.has_edge(1, 2));
    assert_eq!(result.ordering.len(), 5);
    assert_eq!(result.decisions.len(), 5);
}

#[test]
fn greedy_is_deterministic() {
    let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
    let obs = PartialObservation::new(g, 2);
    let params = small_model(8, 5);
    let a = deepnc_l(&obs, &params, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    let b = deepnc_l(&obs, &params, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert_eq!(a.graph, b.graph);
    assert_eq!(a.ordering.as_order(), b.ordering.as_order());
    assert_eq!(a.phi_rows, b.phi_rows);
}

#[test]
fn filter_hand_trace() {
    // Three observed nodes, edges A-B and B-C, non-edge (A, C). Ordering
    // (A, B, C); row 3 in paper layout [0.75, 0.2] = window [0.2, 0.75].
    let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let obs = PartialObservation::new(g, 0);
    let ordering = NodeOrdering::identity(3);
    let mut row2 = vec![0.2, 0.75];
    row2.resize(8, 0.5);
    let phi_rows: Vec<Vec<f64>> = vec![vec![], vec![0.5; 8], row2];
    let pz = filter_pair_probs(&ordering, &phi_rows, &obs, 8, OutOfWindowPolicy::HalfRowMean);
    assert_eq!(pz.len(), 1);
    assert!((pz.get(0, 2).unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn filter_on_complete_observation_is_empty() {
    let g = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
    let obs = PartialObservation::new(g, 1);
    let ordering = NodeOrdering::identity(4);
    let phi_rows: Vec<Vec<f64>> = vec![vec![], vec![0.5; 8], vec![0.5; 8], vec![0.5; 8]];
    let pz = filter_pair_probs(&ordering, &phi_rows, &obs, 8, OutOfWindowPolicy::Floor);
    assert!(pz.is_empty());
}

#[test]
fn filter_key_set_is_the_non_edge_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let params = small_model(8, 8);
    for trial in 0..10 {
        let mut g = Graph::new(8);
        for u in 0..8usize {
            for v in (u + 1)..8 {
                if rng.gen::<f64>() < 0.4 {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let obs = PartialObservation::new(g.clone(), 2);
        let run = deepnc_l(&obs, &params, &mut rng).unwrap();
        let pz = filter_pair_probs(
            &run.ordering,
            &run.phi_rows,
            &obs,
            8,
            OutOfWindowPolicy::HalfRowMean,
        );
        let mut expected = 0usize;
        for u in 0..8usize {
            for v in (u + 1)..8 {
                if !g.has_edge(u, v) {
                    expected += 1;
                    assert!(pz.get(u, v).is_some(), "trial {trial}: missing ({u},{v})");
                }
            }
        }
        assert_eq!(pz.len(), expected);
    }
}

#[test]
fn edge_sampling_respects_probabilities() {
    let mut map = BTreeMap::new();
    map.insert((0usize, 1usize), 1e-7f64);
    map.insert((0, 2), 1.0 - 1e-7);
    map.insert((1, 2), 0.5);
    let pz = PairProbabilities { map };

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut count_low = 0;
    let mut count_high = 0;
    let mut total = 0usize;
    for _ in 0..5_000 {
        let edges = sample_missing_edges(&pz, &mut rng);
        total += edges.len();
        if edges.contains(&(0, 1)) {
            count_low += 1;
        }
        if edges.contains(&(0, 2)) {
            count_high += 1;
        }
    }
    assert_eq!(count_low, 0);
    assert_eq!(count_high, 5_000);
    // Expected edges per draw = sum of probabilities = ~1.5; ±5%.
    let mean = total as f64 / 5_000.0;
    assert!((mean - pz.sum()).abs() < 0.05 * pz.sum(), "mean {mean}");
}

#[test]
fn em_without_non_edges_is_one_greedy_run() {
    let g = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
    let obs = PartialObservation::new(g, 2);
    let params = small_model(8, 21);
    let cfg = EmConfig::default();
    let em = deepnc_em(&obs, &params, &cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let plain = deepnc_l(&obs, &params, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert_eq!(em.graph, plain.graph);
    assert!(em.em_trace.is_empty());
}

#[test]
fn em_zero_iterations_still_samples_once() {
    let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    let obs = PartialObservation::new(g.clone(), 1);
    let params = small_model(8, 22);
    let cfg = EmConfig {
        max_iterations: 0,
        ..EmConfig::default()
    };
    let em = deepnc_em(&obs, &params, &cfg, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    assert!(em.em_trace.is_empty());
    assert_eq!(em.graph.node_count(), 5);
    for (u, v) in g.edges() {
        assert!(em.graph.has_edge(u, v));
    }
}

#[test]
fn em_is_deterministic_and_contains_observation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let mut g = Graph::new(12);
    for u in 0..12usize {
        for v in (u + 1)..12 {
            if rng.gen::<f64>() < 0.3 {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    let obs = PartialObservation::new(g.clone(), 3);
    let params = small_model(8, 23);
    let cfg = EmConfig {
        sample_count: 3,
        max_iterations: 2,
        ..EmConfig::default()
    };
    let a = deepnc_em(&obs, &params, &cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let b = deepnc_em(&obs, &params, &cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(a.graph, b.graph);
    assert_eq!(a.em_trace, b.em_trace);
    assert_eq!(a.graph.node_count(), 15);
    for (u, v) in g.edges() {
        assert!(a.graph.has_edge(u, v));
    }
    assert_eq!(a.em_trace.len(), 2);
}
