//! Seeded synthetic graph generators for tests, examples and offline runs.

use std::collections::HashSet;

use rand::{Rng, RngCore};

use crate::graph::{Graph, NodeId};
use crate::rng::{unit_f64, Purpose, Seed};

/// Node and edge counts of the SNAP ego-Facebook graph.
pub const FACEBOOK_NODES: usize = 4039;
pub const FACEBOOK_EDGES: usize = 88_234;

/// Erdős–Rényi `G(n, prob)`.
pub fn gnp(n: usize, prob: f64, seed: Seed) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        let mut rng = seed.stream(Purpose::Synthetic, u as u64);
        for v in u + 1..n {
            if unit_f64(rng.next_u64()) < prob {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Holme–Kim preferential attachment with triad closure.
///
/// Each arriving node makes `m` links; after a preferential link, the next
/// link closes a triangle with probability `triad_prob`.
pub fn powerlaw_cluster(n: usize, m: usize, triad_prob: f64, seed: Seed) -> Graph {
    assert!(m >= 1 && m < n, "need 1 <= m < n");
    let mut rng = seed.stream(Purpose::Synthetic, u64::MAX);
    let mut neighbors: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut endpoints: Vec<NodeId> = (0..m).collect();
    let mut edges = Vec::with_capacity(n * m);

    for source in m..n {
        let mut chosen: HashSet<NodeId> = HashSet::with_capacity(m);
        let mut last: Option<NodeId> = None;
        while chosen.len() < m {
            let closure = last.and_then(|prev| {
                if rng.random::<f64>() >= triad_prob {
                    return None;
                }
                let cands: Vec<NodeId> = neighbors[prev]
                    .iter()
                    .copied()
                    .filter(|&w| w != source && !chosen.contains(&w))
                    .collect();
                (!cands.is_empty()).then(|| cands[rng.random_range(0..cands.len())])
            });
            let target = match closure {
                Some(t) => t,
                None => {
                    let t = endpoints[rng.random_range(0..endpoints.len())];
                    if chosen.contains(&t) {
                        continue;
                    }
                    t
                }
            };
            chosen.insert(target);
            last = Some(target);
            neighbors[source].push(target);
            neighbors[target].push(source);
            edges.push((source, target));
        }
        for &t in neighbors[source].iter() {
            endpoints.push(t);
        }
        endpoints.extend(std::iter::repeat_n(source, m));
    }
    Graph::from_edges(n, edges)
}

/// Facebook-scale stand-in: 4039 nodes, exactly 88 234 edges, heavy-tailed
/// degrees and strong clustering. Used when the SNAP file is unavailable.
pub fn facebook_surrogate(seed: Seed) -> Graph {
    let g = powerlaw_cluster(FACEBOOK_NODES, 22, 0.95, seed);
    with_edge_count(&g, FACEBOOK_EDGES, seed)
}

/// Randomly drop or add edges until the graph has exactly `target` edges.
pub fn with_edge_count(g: &Graph, target: usize, seed: Seed) -> Graph {
    let n = g.num_nodes();
    let max_edges = n * (n - 1) / 2;
    assert!(target <= max_edges, "cannot fit {target} edges in {n} nodes");
    let mut rng = seed.stream(Purpose::Synthetic, u64::MAX - 1);
    let mut edges: Vec<(NodeId, NodeId)> = g.edges().collect();
    if edges.len() > target {
        let mut keep = rand::seq::index::sample(&mut rng, edges.len(), target).into_vec();
        keep.sort_unstable();
        edges = keep.into_iter().map(|k| edges[k]).collect();
    } else {
        let mut present: HashSet<(NodeId, NodeId)> = edges.iter().copied().collect();
        while present.len() < target {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v && present.insert((u.min(v), u.max(v))) {
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
    Graph::from_edges(n, edges)
}
