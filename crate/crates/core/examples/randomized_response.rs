//! Collect edge-LDP reports and look at what the collector receives.
//!
//! `cargo run --example randomized_response [epsilon]`

use ldp_poison::estimator::assemble_perturbed_graph;
use ldp_poison::ldp::{collect_reports, split_budget, write_reports_binary, CollectionMode};
use ldp_poison::synth::gnp;
use ldp_poison::Seed;

fn main() -> ldp_poison::Result<()> {
    let epsilon: f64 = std::env::args().nth(1).map_or(4.0, |s| s.parse().expect("epsilon"));
    let g = gnp(500, 0.02, Seed(3));
    let params = split_budget(epsilon, 0.5)?;
    println!(
        "epsilon {epsilon}: keep probability {:.4}, degree noise scale {:.3}",
        params.p, params.laplace_scale
    );

    for mode in [CollectionMode::SynchronizedPair, CollectionMode::DualReportOr] {
        let reports = collect_reports(&g, &params, mode, Seed(9))?;
        let pg = assemble_perturbed_graph(&reports, mode)?;
        let n = g.num_nodes();
        let honest = 2.0 * g.edge_count() as f64 / (n * (n - 1)) as f64;
        println!(
            "{mode}: true density {honest:.4}, perturbed density {:.4}, mean row degree {:.1}",
            pg.edge_density(),
            pg.mean_row_degree()
        );
        let r = &reports[0];
        println!(
            "  node 0: true degree {}, reported {:.2}, {} bits set",
            g.degree(0),
            r.degree,
            r.bits.count_ones()
        );
    }

    let reports = collect_reports(&g, &params, CollectionMode::SynchronizedPair, Seed(9))?;
    let mut buf = Vec::new();
    write_reports_binary(&mut buf, &reports)?;
    println!("binary report file would be {} bytes", buf.len());
    Ok(())
}
