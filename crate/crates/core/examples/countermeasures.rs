//! Run every countermeasure against one attacked collection and report
//! detection quality and the gain left after cleaning.
//!
//! `cargo run --release --example countermeasures [rva|rna|mga] [degree|cc]`

use ldp_poison::attacks::{AttackKind, FakeInit};
use ldp_poison::defenses::{apply_defense, evaluate_detection, DefenseKind, DetectorConfig};
use ldp_poison::estimator::Metric;
use ldp_poison::gain::{gain_between, BaselineMode, GainOptions, Pairing, Scenario};
use ldp_poison::ldp::{split_budget, CollectionMode};
use ldp_poison::synth::powerlaw_cluster;
use ldp_poison::Seed;

fn main() -> ldp_poison::Result<()> {
    let mut args = std::env::args().skip(1);
    let attack: AttackKind = args.next().as_deref().unwrap_or("rva").parse()?;
    let metric: Metric = args.next().as_deref().unwrap_or("cc").parse()?;

    let genuine = powerlaw_cluster(800, 6, 0.5, Seed(8));
    let params = split_budget(4.0, 0.5)?;
    let mode = CollectionMode::SynchronizedPair;
    let sc = Scenario::build(&genuine, 0.05, 0.05, FakeInit::Fresh, params, mode, Seed(2))?;
    let options = GainOptions {
        pairing: Pairing::Paired,
        baseline: BaselineMode::WithFakes,
    };
    let plan = sc.craft(attack, metric)?;
    let attacked = sc.attack_reports(&plan)?;
    let before = sc.baseline_reports(options)?;
    let fakes = sc.threat.fake_set();
    let mut detector = DetectorConfig::for_reports(&attacked);
    detector.itemset_threshold = 150;

    println!(
        "{attack} on {metric}: {} fakes, gain without defense {:.4}",
        fakes.len(),
        sc.empirical_gain(&plan, options)?.total
    );
    println!("defense  flagged  precision  recall  post_gain");
    for kind in [DefenseKind::Detect1, DefenseKind::Detect2, DefenseKind::Naive1, DefenseKind::Naive2] {
        let detection = apply_defense(kind, &attacked, params.p, params.epsilon2, &detector)?;
        let q = evaluate_detection(&detection.flagged, &fakes);
        let post = gain_between(&before, &detection.cleaned, &sc.threat.targets, metric, params.p, mode)?.total;
        println!(
            "{:<7}  {:>7}  {:>9.3}  {:>6.3}  {:>9.4}",
            kind.to_string(),
            detection.flagged.len(),
            q.precision,
            q.recall,
            post
        );
    }
    Ok(())
}
