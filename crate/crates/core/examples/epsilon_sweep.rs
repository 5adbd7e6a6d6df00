//! Sweep the privacy budget with the experiment harness and write the
//! results CSV to stdout.
//!
//! `cargo run --release --example epsilon_sweep > sweep.csv`

use ldp_poison::estimator::Metric;
use ldp_poison::harness::{mean_std, run_sweep_on, write_results, ExperimentConfig, SweepParam};
use ldp_poison::synth::powerlaw_cluster;
use ldp_poison::Seed;

fn main() -> ldp_poison::Result<()> {
    let graph = powerlaw_cluster(600, 6, 0.5, Seed(6));
    let cfg = ExperimentConfig {
        dataset: "plc-600".into(),
        metric: Metric::DegreeCentrality,
        trials: 4,
        seed: 3,
        ..ExperimentConfig::default()
    };
    let values = [1.0, 2.0, 4.0, 6.0, 8.0];
    let rows = run_sweep_on(&graph, &cfg, SweepParam::Epsilon, &values)?;
    for &eps in &values {
        let gains: Vec<f64> = rows.iter().filter(|r| r.epsilon == eps).map(|r| r.gain_empirical).collect();
        let (mean, sd) = mean_std(&gains);
        eprintln!("epsilon {eps}: gain {mean:.4} +- {sd:.4}");
    }
    write_results(std::io::stdout().lock(), &rows)
}
