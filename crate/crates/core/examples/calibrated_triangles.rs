//! Compare calibrated triangle and clustering estimates with the truth,
//! averaged over repeated collections.
//!
//! `cargo run --release --example calibrated_triangles [epsilon] [runs]`

use ldp_poison::estimator::{assemble_perturbed_graph, estimate_clustering_coefficient, triangle_estimate};
use ldp_poison::graph::{local_clustering_coefficient, triangle_count};
use ldp_poison::ldp::{collect_reports, split_budget, CollectionMode};
use ldp_poison::synth::powerlaw_cluster;
use ldp_poison::Seed;

fn main() -> ldp_poison::Result<()> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().map_or(8.0, |s| s.parse().expect("epsilon"));
    let runs: u64 = args.next().map_or(50, |s| s.parse().expect("runs"));
    let g = powerlaw_cluster(300, 4, 0.7, Seed(4));
    let params = split_budget(epsilon, 0.5)?;
    let mode = CollectionMode::SynchronizedPair;

    let mut nodes: Vec<usize> = (0..g.num_nodes()).collect();
    nodes.sort_by_key(|&i| std::cmp::Reverse(triangle_count(&g, i)));
    nodes.truncate(8);

    let mut raw = vec![0.0; nodes.len()];
    let mut tau = vec![0.0; nodes.len()];
    let mut cc = vec![0.0; nodes.len()];
    for run in 0..runs {
        let reports = collect_reports(&g, &params, mode, Seed(100 + run))?;
        let pg = assemble_perturbed_graph(&reports, mode)?;
        for (k, &i) in nodes.iter().enumerate() {
            let t = triangle_estimate(&pg, params.p, i)?;
            raw[k] += t.raw as f64;
            tau[k] += t.calibrated;
            cc[k] += estimate_clustering_coefficient(&pg, params.p, i)?.value;
        }
    }
    let runs = runs as f64;
    println!("epsilon {epsilon}, p = {:.4}, {runs} collections", params.p);
    println!("node  true_tau  mean_raw  mean_calibrated  true_cc  mean_cc_est");
    for (k, &i) in nodes.iter().enumerate() {
        println!(
            "{i:>4}  {:>8}  {:>8.1}  {:>15.1}  {:>7.4}  {:>11.4}",
            triangle_count(&g, i),
            raw[k] / runs,
            tau[k] / runs,
            local_clustering_coefficient(&g, i),
            cc[k] / runs
        );
    }
    Ok(())
}
