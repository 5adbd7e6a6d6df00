//! RVA, RNA and MGA against the clustering coefficient, with per-target
//! detail for the strongest attack.
//!
//! `cargo run --release --example clustering_attacks`

use ldp_poison::attacks::{AttackKind, FakeInit};
use ldp_poison::estimator::Metric;
use ldp_poison::gain::{BaselineMode, GainOptions, Pairing, Scenario};
use ldp_poison::harness::reference_gain;
use ldp_poison::ldp::{split_budget, CollectionMode};
use ldp_poison::synth::powerlaw_cluster;
use ldp_poison::Seed;

fn main() -> ldp_poison::Result<()> {
    let genuine = powerlaw_cluster(1000, 8, 0.5, Seed(10));
    let params = split_budget(4.0, 0.5)?;
    let sc = Scenario::build(
        &genuine,
        0.05,
        0.05,
        FakeInit::Fresh,
        params,
        CollectionMode::SynchronizedPair,
        Seed(1),
    )?;
    println!(
        "{} genuine + {} fakes, {} targets, cap {} links per fake",
        sc.threat.genuine,
        sc.threat.fakes,
        sc.threat.targets.len(),
        sc.cap()
    );
    let options = GainOptions {
        pairing: Pairing::Paired,
        baseline: BaselineMode::WithFakes,
    };
    for kind in AttackKind::ALL {
        let plan = sc.craft(kind, Metric::ClusteringCoefficient)?;
        let gain = sc.empirical_gain(&plan, options)?;
        println!("{kind}: {} crafted target links, gain {:.4}", plan.links.len(), gain.total);
    }
    let reference = reference_gain(
        Metric::ClusteringCoefficient,
        sc.threat.fakes,
        sc.threat.targets.len(),
        sc.threat.total(),
        params.p,
        sc.knowledge.avg_perturbed_degree,
    );
    println!("closed-form MGA reference: {reference:.4}");

    let plan = sc.craft(AttackKind::Mga, Metric::ClusteringCoefficient)?;
    let gain = sc.empirical_gain(&plan, options)?;
    println!("target  before    after");
    for t in gain.per_target.iter().take(8) {
        println!("{:>6}  {:>6.3}  {:>7.3}", t.target, t.before, t.after);
    }
    Ok(())
}
