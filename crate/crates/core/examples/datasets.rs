//! Resolve a dataset by registry name, surrogate name or path. Nothing is
//! downloaded unless the name is a registry entry missing from the cache.
//!
//! `cargo run --release --example datasets [name-or-path]`

use ldp_poison::dataset::{default_cache_dir, facebook_or_surrogate, load_dataset, REGISTRY};
use ldp_poison::graph::graph_stats;

fn main() -> ldp_poison::Result<()> {
    for info in REGISTRY {
        println!("registry: {} ({} nodes, {} edges)", info.name, info.nodes, info.edges);
    }
    let cache = default_cache_dir();
    let (g, source) = match std::env::args().nth(1) {
        Some(spec) => load_dataset(&spec, &cache, false)?,
        None => facebook_or_surrogate(&cache)?,
    };
    let s = graph_stats(&g)?;
    println!(
        "loaded {source}: {} nodes, {} edges, mean degree {:.2}",
        s.num_nodes, s.edge_count, s.avg_degree
    );
    Ok(())
}
