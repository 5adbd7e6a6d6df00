//! Exact degree centrality, triangles and clustering on a small graph.
//!
//! `cargo run --example exact_metrics [edge-list]`

use ldp_poison::graph::{
    degree_centrality, graph_stats, load_edge_list_path, local_clustering_coefficient, triangle_count,
    EdgeListOptions,
};
use ldp_poison::synth::powerlaw_cluster;
use ldp_poison::Seed;

fn main() -> ldp_poison::Result<()> {
    let g = match std::env::args().nth(1) {
        Some(path) => load_edge_list_path(path.as_ref(), &EdgeListOptions::default())?,
        None => powerlaw_cluster(300, 4, 0.6, Seed(1)),
    };
    let s = graph_stats(&g)?;
    println!(
        "{} nodes, {} edges, density {:.4}, mean degree {:.2}",
        s.num_nodes, s.edge_count, s.edge_density, s.avg_degree
    );
    println!("node  degree  centrality  triangles  clustering");
    for i in 0..g.num_nodes().min(10) {
        println!(
            "{i:>4}  {:>6}  {:>10.4}  {:>9}  {:>10.4}",
            g.degree(i),
            degree_centrality(&g, i)?,
            triangle_count(&g, i),
            local_clustering_coefficient(&g, i)
        );
    }
    Ok(())
}
