//! Turn a beta sweep into an SVG line chart, one line per attack.
//!
//! `cargo run --release --example plotting [out.svg]`

use ldp_poison::attacks::AttackKind;
use ldp_poison::harness::{run_sweep_on, write_results, ExperimentConfig, SweepParam};
use ldp_poison::plot::{render_svg, summarize};
use ldp_poison::synth::gnp;
use ldp_poison::Seed;

fn main() -> ldp_poison::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "beta_sweep.svg".into());
    let graph = gnp(400, 0.03, Seed(12));
    let mut rows = Vec::new();
    for attack in AttackKind::ALL {
        let cfg = ExperimentConfig {
            dataset: "gnp-400".into(),
            attack,
            trials: 3,
            ..ExperimentConfig::default()
        };
        rows.extend(run_sweep_on(&graph, &cfg, SweepParam::Beta, &[0.01, 0.03, 0.05, 0.1])?);
    }
    let mut csv = Vec::new();
    write_results(&mut csv, &rows)?;
    let data = summarize(csv.as_slice(), "beta", "gain_empirical", "attack")?;
    std::fs::write(&out, render_svg(&data, "beta", "gain"))?;
    println!("wrote {out}");
    Ok(())
}
