use super::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn rn_sample_identity_and_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = generate_ba(100, 3, &mut rng).unwrap();

    let (full, map) = rn_sample(&g, 1.0, &mut rng).unwrap();
    assert_eq!(full.node_count(), 100);
    assert_eq!(full.edges(), g.edges());
    assert_eq!(map, (0..100).collect::<Vec<_>>());

    let (sub, map) = rn_sample(&g, 0.7, &mut rng).unwrap();
    assert_eq!(sub.node_count(), 70);
    assert_eq!(map.len(), 70);
    assert!(rn_sample(&g, 0.0, &mut rng).is_err());
    assert!(rn_sample(&g, 1.2, &mut rng).is_err());
}

#[test]
fn rn_sample_inclusion_is_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = Graph::new(20);
    let mut hits = vec![0usize; 20];
    let draws = 5_000;
    for _ in 0..draws {
        let (_, map) = rn_sample(&g, 0.7, &mut rng).unwrap();
        for old in map {
            hits[old] += 1;
        }
    }
    for (v, &h) in hits.iter().enumerate() {
        let freq = h as f64 / draws as f64;
        assert!((freq - 0.7).abs() < 0.02, "node {v}: {freq}");
    }
}

#[test]
fn ff_sample_counts_and_connectivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = generate_ba(200, 4, &mut rng).unwrap();

    let (all, _) = ff_sample(&g, 1.0, 0.7, &mut rng).unwrap();
    assert_eq!(all.node_count(), 200);

    // Forest fire keeps most of its sample connected on a BA graph.
    for trial in 0..10 {
        let (sub, _) = ff_sample(&g, 0.7, 0.7, &mut rng).unwrap();
        assert_eq!(sub.node_count(), 140);
        let (lcc, _) = sub.largest_component();
        assert!(
            lcc.node_count() >= 70,
            "trial {trial}: lcc {} of 140",
            lcc.node_count()
        );
    }
}

#[test]
fn ff_sample_burn_prob_zero_reseeds_uniformly() {
    // With burn probability zero the fire never spreads; every node is a
    // fresh uniform seed, which is random-node sampling.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = generate_ba(50, 2, &mut rng).unwrap();
    let (sub, _) = ff_sample(&g, 0.5, 0.0, &mut rng).unwrap();
    assert_eq!(sub.node_count(), 25);
}

#[test]
fn delete_edges_counts_and_rates() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = generate_ba(104, 2, &mut rng).unwrap();
    assert_eq!(g.edge_count(), 2 * 102 + 1); // c(n-c) + c(c-1)/2

    let same = delete_edges(&g, 1.0, &mut rng).unwrap();
    assert_eq!(same.edges(), g.edges());

    let kept = delete_edges(&g, 0.9, &mut rng).unwrap();
    assert_eq!(kept.edge_count(), (0.9f64 * g.edge_count() as f64).ceil() as usize);
    assert_eq!(kept.node_count(), g.node_count());

    // Per-edge retention frequency over repeated draws.
    let edges = g.edges();
    let mut hits = vec![0usize; edges.len()];
    let draws = 2_000;
    for _ in 0..draws {
        let kept = delete_edges(&g, 0.9, &mut rng).unwrap();
        for (i, &(u, v)) in edges.iter().enumerate() {
            if kept.has_edge(u, v) {
                hits[i] += 1;
            }
        }
    }
    let mean_rate: f64 =
        hits.iter().map(|&h| h as f64 / draws as f64).sum::<f64>() / edges.len() as f64;
    assert!((mean_rate - 0.9).abs() < 0.01, "mean retention {mean_rate}");
    for (i, &h) in hits.iter().enumerate() {
        let rate = h as f64 / draws as f64;
        assert!((rate - 0.9).abs() < 0.05, "edge {i}: {rate}");
    }
}

#[test]
fn corrupt_identity_spec_keeps_everything() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let g = generate_ba(60, 3, &mut rng).unwrap();
    let spec = CorruptionSpec {
        node_fraction: 1.0,
        edge_fraction: 1.0,
        ..CorruptionSpec::default()
    };
    let (obs, map) = corrupt(&g, &spec, &mut rng).unwrap();
    assert_eq!(obs.missing_node_count, 0);
    assert_eq!(obs.observed.edges(), g.edges());
    assert_eq!(map.len(), 60);
}

#[test]
fn corrupt_alignment_maps_edges_into_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = generate_ba(100, 4, &mut rng).unwrap();
    for sampler in [SamplerKind::RandomNode, SamplerKind::ForestFire] {
        let spec = CorruptionSpec {
            sampler,
            ..CorruptionSpec::default()
        };
        let (obs, map) = corrupt(&g, &spec, &mut rng).unwrap();
        assert_eq!(obs.observed.node_count(), 70);
        assert_eq!(obs.missing_node_count, 30);
        for (u, v) in obs.observed.edges() {
            assert!(g.has_edge(map[u], map[v]), "alignment broke an edge");
        }
    }
}

#[test]
fn corrupt_fringe_30_percent() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = generate_ba(100, 4, &mut rng).unwrap();
    let spec = CorruptionSpec {
        node_fraction: 0.3,
        edge_fraction: 1.0,
        ..CorruptionSpec::default()
    };
    let (obs, _) = corrupt(&g, &spec, &mut rng).unwrap();
    assert_eq!(obs.observed.node_count(), 30);
    assert_eq!(obs.missing_node_count, 70);
}

#[test]
fn ba_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    // First step: K_{c+1}.
    let g = generate_ba(5, 4, &mut rng).unwrap();
    assert_eq!(g.edge_count(), 10);

    let g = generate_ba(150, 4, &mut rng).unwrap();
    assert_eq!(g.edge_count(), 4 * 146 + 6);
    assert_eq!(g.largest_component().0.node_count(), 150);

    assert!(generate_ba(4, 4, &mut rng).is_err());
    assert!(generate_ba(10, 0, &mut rng).is_err());

    // Determinism.
    let a = generate_ba(40, 2, &mut ChaCha8Rng::seed_from_u64(10)).unwrap();
    let b = generate_ba(40, 2, &mut ChaCha8Rng::seed_from_u64(10)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ba_degree_tail_is_heavy() {
    // Complementary-CDF log-log slope over pooled degrees of 50 graphs.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut degrees: Vec<usize> = Vec::new();
    for _ in 0..50 {
        let g = generate_ba(1_000, 4, &mut rng).unwrap();
        degrees.extend((0..g.node_count()).map(|v| g.degree(v)));
    }
    let total = degrees.len() as f64;
    let max_d = degrees.iter().copied().max().unwrap();
    let mut counts = vec![0usize; max_d + 1];
    for &d in &degrees {
        counts[d] += 1;
    }
    // ccdf[d] = P(degree >= d); fit from twice the attachment count out to
    // the last degree whose tail still holds at least 20 nodes (the extreme
    // tail is too noisy to regress on).
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut tail = 0usize;
    let mut ccdf = vec![0.0; max_d + 2];
    for d in (0..=max_d).rev() {
        tail += counts[d];
        ccdf[d] = tail as f64 / total;
    }
    let hi = (0..=max_d).rev().find(|&d| ccdf[d] * total >= 20.0).unwrap();
    for d in 8..=hi {
        if ccdf[d] > 0.0 {
            xs.push((d as f64).ln());
            ys.push(ccdf[d].ln());
        }
    }
    let slope = least_squares_slope(&xs, &ys);
    assert!(
        (-3.5..=-2.0).contains(&slope),
        "ccdf log-log slope {slope}"
    );
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[test]
fn planted_partition_edge_count_and_modularity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 120;
    let k = 4;
    let p_in = 0.25;
    let p_out = 0.02;

    // Expected edge count before LCC extraction, Monte Carlo ±5%.
    let within_pairs = k * (n / k) * (n / k - 1) / 2;
    let total_pairs = n * (n - 1) / 2;
    let expected =
        within_pairs as f64 * p_in + (total_pairs - within_pairs) as f64 * p_out;
    let mut total_edges = 0usize;
    let reps = 60;
    for _ in 0..reps {
        let g = generate_planted_partition(n, k, p_in, p_out, &mut rng).unwrap();
        total_edges += g.edge_count();
    }
    let mean = total_edges as f64 / reps as f64;
    // LCC extraction can only drop edges, so allow the mean to sit slightly
    // below the raw expectation.
    assert!(
        (mean - expected).abs() < 0.05 * expected,
        "mean edges {mean}, expected {expected}"
    );

    // Planted blocks beat a random partition on modularity.
    let g = generate_planted_partition(n, k, p_in, p_out, &mut rng).unwrap();
    let labels: Vec<usize> = g
        .labels()
        .unwrap()
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let planted = modularity(&g, &labels);
    let random_labels: Vec<usize> = (0..g.node_count()).map(|v| v % k).collect();
    let random = modularity(&g, &random_labels);
    assert!(
        planted > random,
        "modularity planted {planted} <= random {random}"
    );

    assert!(generate_planted_partition(100, 4, 0.01, 0.2, &mut rng).is_err());
    assert!(generate_planted_partition(100, 0, 0.2, 0.01, &mut rng).is_err());
}

/// Newman modularity of a node partition.
fn modularity(g: &Graph, labels: &[usize]) -> f64 {
    let m = g.edge_count() as f64;
    let mut acc = 0.0;
    for (u, v) in g.edges() {
        if labels[u] == labels[v] {
            acc += 1.0;
        }
    }
    let mut degree_sums = std::collections::HashMap::new();
    for v in 0..g.node_count() {
        *degree_sums.entry(labels[v]).or_insert(0.0) += g.degree(v) as f64;
    }
    let mut expected = 0.0;
    for (_, d) in degree_sums {
        expected += (d / (2.0 * m)).powi(2);
    }
    acc / m - expected
}

#[test]
fn manifest_round_trip_and_validation() {
    let dir = std::env::temp_dir().join("deepnc-manifest-test");
    std::fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = generate_ba(30, 2, &mut rng).unwrap();
    crate::graph::write_edge_list(&g, &dir.join("train0.edges")).unwrap();
    crate::graph::write_edge_list(&g, &dir.join("test0.edges")).unwrap();

    let manifest = DatasetManifest {
        train: vec!["train0.edges".into()],
        test: vec!["test0.edges".into()],
        provenance: "ba n=30 c=2".into(),
        seed: 13,
    };
    let path = dir.join("manifest.json");
    manifest.save(&path).unwrap();
    let loaded = DatasetManifest::load(&path).unwrap();
    let (train, test) = loaded.load_graphs(&dir).unwrap();
    assert_eq!(train.len(), 1);
    assert_eq!(test.len(), 1);
    assert_eq!(train[0].edge_count(), g.edge_count());

    let bad = DatasetManifest {
        train: vec![],
        test: vec![],
        provenance: String::new(),
        seed: 0,
    };
    let bad_path = dir.join("bad.json");
    bad.save(&bad_path).unwrap();
    assert!(DatasetManifest::load(&bad_path).is_err());
}
