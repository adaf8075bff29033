//! Floor baseline: attach every missing node uniformly at random, with the
//! per-node edge budget matched to the training corpus' mean degree.

use deepnc::graph::{Graph, PartialObservation};
use rand::Rng;

/// Each missing node gets `round(mean_degree / 2)` edges (at least one) to
/// uniformly chosen distinct earlier nodes, mirroring how a growth process
/// with that mean degree would wire them.
pub fn random_attach_complete<T: Rng>(
    obs: &PartialObservation,
    train_mean_degree: f64,
    rng: &mut T,
) -> Graph {
    let n_obs = obs.observed.node_count();
    let n = obs.total_nodes();
    let budget = ((train_mean_degree / 2.0).round() as usize).max(1);
    let mut g = Graph::new(n);
    for (u, v) in obs.observed.edges() {
        g.add_edge(u, v).expect("observed edge in range");
    }
    for v in n_obs..n {
        let pool = v; // nodes 0..v already exist
        let picks = budget.min(pool);
        let mut chosen: Vec<usize> = Vec::with_capacity(picks);
        while chosen.len() < picks {
            let t = rng.gen_range(0..pool);
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for t in chosen {
            g.add_edge(v, t).expect("target in range");
        }
    }
    g
}
