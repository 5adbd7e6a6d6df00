//! Empirical and theoretical attack gains.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::attacks::{
    connection_budget, plan_threat, AttackContext, AttackKind, AttackPlan, AttackerKnowledge, FakeInit, ThreatModel,
};
use crate::error::{Error, Result};
use crate::estimator::{assemble_perturbed_graph, estimate_metric, Metric};
use crate::graph::{Graph, NodeId};
use crate::ldp::{collect_reports, CollectionMode, PrivacyParams, Report};
use crate::rng::{Purpose, Seed};

/// Whether the honest baseline reuses the attack run's randomness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Same coins and degree noise in both runs; only fake reports differ.
    #[default]
    Paired,
    /// Baseline drawn from an independent seed.
    Unpaired,
}

/// Population the baseline is estimated over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMode {
    /// Honest reports from all `N` nodes, fakes included.
    #[default]
    WithFakes,
    /// Only the `n` genuine users, normalized by `n - 1`.
    GenuineOnly,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GainOptions {
    pub pairing: Pairing,
    pub baseline: BaselineMode,
}

/// One attacked deployment: the augmented graph, who is targeted, what the
/// attacker has observed, and the honest reports of every node.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub graph: Graph,
    pub threat: ThreatModel,
    pub knowledge: AttackerKnowledge,
    pub params: PrivacyParams,
    pub mode: CollectionMode,
    pub protocol_seed: Seed,
    pub baseline: Vec<Report>,
}

impl Scenario {
    /// Inject `ceil(beta n)` fakes into `genuine`, pick targets, run the
    /// honest protocol and record the attacker's view.
    ///
    /// Compromised fakes receive random edges at the observed perturbed
    /// density before the baseline collection.
    pub fn build(
        genuine: &Graph,
        beta: f64,
        gamma: f64,
        fake_init: FakeInit,
        params: PrivacyParams,
        mode: CollectionMode,
        seed: Seed,
    ) -> Result<Scenario> {
        let threat = plan_threat(genuine.num_nodes(), beta, gamma, seed)?.with_fake_init(fake_init);
        let fresh = genuine.augmented(threat.fakes, []);
        let honest = collect_reports(&fresh, &params, mode, seed)?;
        let knowledge = AttackerKnowledge::observe(&assemble_perturbed_graph(&honest, mode)?, params);
        let (graph, baseline) = match fake_init {
            FakeInit::Fresh => (fresh, honest),
            FakeInit::Compromised => {
                let n = threat.total();
                let density = if n > 1 {
                    knowledge.avg_perturbed_degree / (n - 1) as f64
                } else {
                    0.0
                };
                let graph = genuine.augmented(threat.fakes, threat.initial_edges(density, seed));
                let baseline = collect_reports(&graph, &params, mode, seed)?;
                (graph, baseline)
            }
        };
        Ok(Scenario {
            graph,
            threat,
            knowledge,
            params,
            mode,
            protocol_seed: seed,
            baseline,
        })
    }

    pub fn context(&self) -> AttackContext<'_> {
        AttackContext {
            graph: &self.graph,
            threat: &self.threat,
            knowledge: &self.knowledge,
            params: &self.params,
            mode: self.mode,
            protocol_seed: self.protocol_seed,
        }
    }

    pub fn cap(&self) -> usize {
        connection_budget(&self.knowledge)
    }

    /// Craft an attack with a seed derived from the scenario's.
    pub fn craft(&self, kind: AttackKind, metric: Metric) -> Result<AttackPlan> {
        crate::attacks::craft(kind, metric, &self.context(), self.protocol_seed.derive(Purpose::Craft as u64))
    }

    /// The baseline with every fake's report replaced by its crafted one.
    pub fn attack_reports(&self, plan: &AttackPlan) -> Result<Vec<Report>> {
        let n = self.threat.total();
        let mut reports = self.baseline.clone();
        for r in &plan.reports {
            if !self.threat.is_fake(r.node) {
                return Err(Error::Shape(format!("crafted report for genuine node {}", r.node)));
            }
            if r.bits.len() != n {
                return Err(Error::Shape(format!(
                    "crafted report has {} bits, expected {n}",
                    r.bits.len()
                )));
            }
            reports[r.node] = r.clone();
        }
        Ok(reports)
    }

    /// Honest reports used as the "before" side of the gain.
    pub fn baseline_reports(&self, options: GainOptions) -> Result<Vec<Report>> {
        let seed = match options.pairing {
            Pairing::Paired => self.protocol_seed,
            Pairing::Unpaired => self.protocol_seed.derive(Purpose::Unpaired as u64),
        };
        match (options.baseline, options.pairing) {
            (BaselineMode::WithFakes, Pairing::Paired) => Ok(self.baseline.clone()),
            (BaselineMode::WithFakes, Pairing::Unpaired) => collect_reports(&self.graph, &self.params, self.mode, seed),
            (BaselineMode::GenuineOnly, _) => {
                collect_reports(&self.graph.prefix(self.threat.genuine), &self.params, self.mode, seed)
            }
        }
    }

    pub fn empirical_gain(&self, plan: &AttackPlan, options: GainOptions) -> Result<GainReport> {
        let before = self.baseline_reports(options)?;
        let after = self.attack_reports(plan)?;
        let mut report = gain_between(&before, &after, &self.threat.targets, plan.metric, self.params.p, self.mode)?;
        report.attack = Some(plan.kind);
        Ok(report)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetGain {
    pub target: NodeId,
    pub before: f64,
    pub after: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub metric: Metric,
    pub attack: Option<AttackKind>,
    pub per_target: Vec<TargetGain>,
    pub total: f64,
}

/// Gain of `after` over `before` on the target set: the sum of absolute
/// per-target estimate changes. The two report sets may differ in size.
pub fn gain_between(
    before: &[Report],
    after: &[Report],
    targets: &[NodeId],
    metric: Metric,
    p: f64,
    mode: CollectionMode,
) -> Result<GainReport> {
    let pg_before = assemble_perturbed_graph(before, mode)?;
    let pg_after = assemble_perturbed_graph(after, mode)?;
    let per_target = targets
        .iter()
        .map(|&t| {
            let before = estimate_metric(&pg_before, p, metric, t)?.value;
            let after = estimate_metric(&pg_after, p, metric, t)?.value;
            Ok(TargetGain {
                target: t,
                before,
                after,
                delta: (after - before).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = per_target.iter().map(|g| g.delta).sum();
    Ok(GainReport {
        metric,
        attack: None,
        per_target,
        total,
    })
}

/// Write per-target rows followed by a `total` row.
pub fn write_gain_csv<W: Write>(out: W, report: &GainReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["target", "before", "after", "delta"])?;
    for g in &report.per_target {
        w.write_record([
            g.target.to_string(),
            g.before.to_string(),
            g.after.to_string(),
            g.delta.to_string(),
        ])?;
    }
    w.write_record(["total".to_string(), String::new(), String::new(), report.total.to_string()])?;
    w.flush()?;
    Ok(())
}

/// Expected MGA gain on degree centrality for fresh fakes, counted in
/// crafted links (before the `1 / (2p - 1)` estimator rescaling).
///
/// `(m r / (N-1)) * (min(r, floor(d)) / r - d / (N-1))`.
pub fn theoretical_gain_degree(m: usize, r: usize, n: usize, avg_perturbed_degree: f64) -> f64 {
    if r == 0 || n < 2 {
        return 0.0;
    }
    let d = avg_perturbed_degree;
    let n1 = (n - 1) as f64;
    let links = r.min(d.max(0.0).floor() as usize) as f64;
    (m as f64 * r as f64 / n1) * (links / r as f64 - d / n1)
}

/// Expected MGA gain on the clustering coefficient.
///
/// `r * 2 / (p^2 (2p - 1)) * 1 / (d (d - 1)) * m / D` with
/// `D = 2 p'(1-p')^2 + p'^2 (1-p') + 3 (1-p')^3` and `p' = d / (N - 1)`.
pub fn theoretical_gain_cc(m: usize, r: usize, n: usize, p: f64, avg_perturbed_degree: f64) -> Result<f64> {
    if !(p > 0.5 && p <= 1.0) {
        return Err(Error::SingularCalibration { p });
    }
    let d = avg_perturbed_degree;
    if !(d > 1.0) {
        return Err(Error::domain(format!("average perturbed degree must exceed 1, got {d}")));
    }
    if n < 2 {
        return Err(Error::domain("need at least two nodes"));
    }
    let pp = d / (n - 1) as f64;
    let qq = 1.0 - pp;
    let denom = 2.0 * pp * qq * qq + pp * pp * qq + 3.0 * qq.powi(3);
    Ok(r as f64 * 2.0 / (p * p * (2.0 * p - 1.0)) / (d * (d - 1.0)) * m as f64 / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldp::split_budget;
    use crate::synth::gnp;

    #[test]
    fn theorem_values() {
        let a = theoretical_gain_degree(5, 10, 100, 4.0);
        assert!((a - 0.181_614_121_008_060_4).abs() < 1e-14, "{a}");
        let a = theoretical_gain_degree(5, 3, 100, 5.0);
        assert!((a - 0.143_862_871_135_598_4).abs() < 1e-14, "{a}");
        let b = theoretical_gain_cc(5, 10, 100, 0.9, 4.0).unwrap();
        assert!((b - 4.716_120_936_789_570).abs() < 1e-12, "{b}");
        assert_eq!(theoretical_gain_degree(0, 50, 1050, 20.0), 0.0);
        assert!(theoretical_gain_cc(1, 1, 10, 0.5, 3.0).is_err());
        assert!(theoretical_gain_cc(1, 1, 10, 0.8, 1.0).is_err());
    }

    #[test]
    fn zero_fakes_zero_gain() {
        let g = gnp(120, 0.05, Seed(1));
        let params = split_budget(4.0, 0.5).unwrap();
        let sc = Scenario::build(&g, 0.0, 0.1, FakeInit::Fresh, params, CollectionMode::default(), Seed(2)).unwrap();
        for kind in AttackKind::ALL {
            let plan = sc.craft(kind, Metric::DegreeCentrality).unwrap();
            let gain = sc.empirical_gain(&plan, GainOptions::default()).unwrap();
            assert_eq!(gain.total, 0.0);
        }
    }

    #[test]
    fn paired_mga_gain_is_exact_link_count() {
        let g = gnp(200, 0.05, Seed(5));
        let params = split_budget(4.0, 0.5).unwrap();
        let sc = Scenario::build(&g, 0.05, 0.05, FakeInit::Fresh, params, CollectionMode::default(), Seed(6)).unwrap();
        let plan = sc.craft(AttackKind::Mga, Metric::DegreeCentrality).unwrap();
        let gain = sc.empirical_gain(&plan, GainOptions::default()).unwrap();
        let n = sc.threat.total() as f64;
        // Targets keep claiming their honest bits, so a crafted link only
        // matters where the shared coin left the pair unset.
        let mut expected = 0.0;
        for &(u, t) in &plan.links {
            if !sc.baseline[u].bits.get(t) && !sc.baseline[t].bits.get(u) {
                expected += 1.0;
            }
        }
        let expected = expected / ((2.0 * params.p - 1.0) * (n - 1.0));
        assert!((gain.total - expected).abs() < 1e-9, "{} vs {expected}", gain.total);
    }

    #[test]
    fn gain_csv_has_total_row() {
        let report = GainReport {
            metric: Metric::DegreeCentrality,
            attack: Some(AttackKind::Mga),
            per_target: vec![TargetGain {
                target: 3,
                before: 0.25,
                after: 0.5,
                delta: 0.25,
            }],
            total: 0.25,
        };
        let mut buf = Vec::new();
        write_gain_csv(&mut buf, &report).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "target,before,after,delta\n3,0.25,0.5,0.25\ntotal,,,0.25\n"
        );
    }
}
