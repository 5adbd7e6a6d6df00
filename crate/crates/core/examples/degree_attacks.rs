//! RVA, RNA and MGA against degree centrality on one scenario, with the
//! closed-form MGA reference.
//!
//! `cargo run --release --example degree_attacks`

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
        let plan = sc.craft(kind, Metric::DegreeCentrality)?;
        let gain = sc.empirical_gain(&plan, options)?;
        println!("{kind}: {} crafted target links, gain {:.4}", plan.links.len(), gain.total);
    }
    let reference = reference_gain(
        Metric::DegreeCentrality,
        sc.threat.fakes,
        sc.threat.targets.len(),
        sc.threat.total(),
        params.p,
        sc.knowledge.avg_perturbed_degree,
    );
    println!("closed-form MGA reference: {reference:.4}");
    Ok(())
}
