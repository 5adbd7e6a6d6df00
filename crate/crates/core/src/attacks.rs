//! Fake-user injection and crafted reports for RVA, RNA and MGA.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use log::warn;
use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::estimator::{Metric, PerturbedGraph};
use crate::graph::{Graph, NodeId};
use crate::ldp::{perturb_degree, perturb_row, CollectionMode, PrivacyParams, Report};
use crate::rng::{sample_distinct, unit_f64, Purpose, Seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackKind {
    /// Random value attack.
    Rva,
    /// Random node attack.
    Rna,
    /// Maximal gain attack.
    Mga,
}

impl AttackKind {
    pub const ALL: [AttackKind; 3] = [AttackKind::Rva, AttackKind::Rna, AttackKind::Mga];
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::Rva => "rva",
            AttackKind::Rna => "rna",
            AttackKind::Mga => "mga",
        })
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rva" => Ok(AttackKind::Rva),
            "rna" => Ok(AttackKind::Rna),
            "mga" => Ok(AttackKind::Mga),
            other => Err(Error::Config(format!("unknown attack `{other}`"))),
        }
    }
}

/// How fake identities start out before crafting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FakeInit {
    /// No pre-existing edges.
    #[default]
    Fresh,
    /// Independent random edges of density `avg perturbed degree / (N - 1)`.
    Compromised,
}

impl fmt::Display for FakeInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FakeInit::Fresh => "fresh",
            FakeInit::Compromised => "compromised",
        })
    }
}

impl FromStr for FakeInit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fresh" => Ok(FakeInit::Fresh),
            "compromised" => Ok(FakeInit::Compromised),
            other => Err(Error::Config(format!("unknown fake initialisation `{other}`"))),
        }
    }
}

/// Who is genuine, who is fake, and who is targeted.
///
/// Genuine users occupy `0..n`, fakes `n..n+m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreatModel {
    pub genuine: usize,
    pub beta: f64,
    pub gamma: f64,
    pub fakes: usize,
    /// Sorted, distinct genuine nodes.
    pub targets: Vec<NodeId>,
    pub fake_init: FakeInit,
}

impl ThreatModel {
    pub fn total(&self) -> usize {
        self.genuine + self.fakes
    }

    pub fn fake_ids(&self) -> Range<NodeId> {
        self.genuine..self.total()
    }

    pub fn is_fake(&self, u: NodeId) -> bool {
        self.fake_ids().contains(&u)
    }

    pub fn fake_set(&self) -> BTreeSet<NodeId> {
        self.fake_ids().collect()
    }

    pub fn with_fake_init(mut self, init: FakeInit) -> Self {
        self.fake_init = init;
        self
    }

    /// Random pre-existing edges for compromised fakes, each potential edge
    /// touching a fake present with probability `density`.
    pub fn initial_edges(&self, density: f64, seed: Seed) -> Vec<(NodeId, NodeId)> {
        if self.fake_init == FakeInit::Fresh {
            return Vec::new();
        }
        let mut edges = Vec::new();
        for u in self.fake_ids() {
            let mut rng = seed.stream(Purpose::Compromise, u as u64);
            for v in 0..u {
                if unit_f64(rng.next_u64()) < density {
                    edges.push((v, u));
                }
            }
        }
        edges
    }
}

/// `ceil(x)` that ignores floating-point dust such as `0.05 * 100`.
fn ceil_count(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// Size the attack and sample `ceil(gamma * n)` targets uniformly.
pub fn plan_threat(n: usize, beta: f64, gamma: f64, seed: Seed) -> Result<ThreatModel> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::domain(format!("beta must lie in [0, 1], got {beta}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::domain(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    let fakes = ceil_count(beta * n as f64);
    let r = ceil_count(gamma * n as f64);
    if r > n || n == 0 {
        return Err(Error::domain(format!("cannot pick {r} targets from {n} genuine users")));
    }
    let mut targets = sample_distinct(&mut seed.stream(Purpose::Targets, 0), n, r);
    targets.sort_unstable();
    Ok(ThreatModel {
        genuine: n,
        beta,
        gamma,
        fakes,
        targets,
        fake_init: FakeInit::Fresh,
    })
}

/// What the attacker knows about the deployed protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackerKnowledge {
    /// Average row degree of the perturbed graph.
    pub avg_perturbed_degree: f64,
    pub params: PrivacyParams,
    /// Degrees are reported from `0..=num_nodes - 1`.
    pub num_nodes: usize,
}

impl AttackerKnowledge {
    pub fn observe(pg: &PerturbedGraph, params: PrivacyParams) -> Self {
        AttackerKnowledge {
            avg_perturbed_degree: pg.mean_row_degree(),
            params,
            num_nodes: pg.num_nodes(),
        }
    }
}

/// Per-fake connection cap: the floor of the average perturbed degree.
pub fn connection_budget(k: &AttackerKnowledge) -> usize {
    k.avg_perturbed_degree.max(0.0).floor() as usize
}

/// Crafted reports for every fake identity.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackPlan {
    pub kind: AttackKind,
    pub metric: Metric,
    /// One report per fake, ordered by fake id.
    pub reports: Vec<Report>,
    /// `(fake, target)` pairs whose crafted bit is set.
    pub links: Vec<(NodeId, NodeId)>,
    pub cap: usize,
}

impl AttackPlan {
    fn new(kind: AttackKind, metric: Metric, reports: Vec<Report>, targets: &[NodeId], cap: usize) -> Self {
        let links = reports
            .iter()
            .flat_map(|r| {
                targets
                    .iter()
                    .filter(|&&t| r.bits.get(t))
                    .map(move |&t| (r.node, t))
            })
            .collect();
        AttackPlan {
            kind,
            metric,
            reports,
            links,
            cap,
        }
    }

    /// `x_ut` for a fake `u` and target `t`.
    pub fn connected(&self, fake: NodeId, target: NodeId) -> bool {
        self.links.binary_search(&(fake, target)).is_ok()
    }
}

/// Everything a fake needs to craft its report.
#[derive(Clone, Copy)]
pub struct AttackContext<'a> {
    /// The full `N`-node graph including fakes' initial edges.
    pub graph: &'a Graph,
    pub threat: &'a ThreatModel,
    pub knowledge: &'a AttackerKnowledge,
    pub params: &'a PrivacyParams,
    pub mode: CollectionMode,
    /// Seed of the collection; fakes that run the client draw its coins.
    pub protocol_seed: Seed,
}

impl AttackContext<'_> {
    fn n(&self) -> usize {
        self.graph.num_nodes()
    }

    fn check(&self) -> Result<()> {
        if self.n() != self.threat.total() {
            return Err(Error::Shape(format!(
                "graph has {} nodes but the threat model expects {}",
                self.n(),
                self.threat.total()
            )));
        }
        Ok(())
    }

    fn consistent_degree(&self, bits: &BitRow, fake: NodeId) -> Result<f64> {
        perturb_degree(bits.count_ones() as f64, self.params, self.protocol_seed, fake)
    }
}

fn fake_rng(seed: Seed, fake: NodeId) -> ChaCha8Rng {
    seed.stream(Purpose::Craft, fake as u64)
}

/// `cap` distinct random nodes other than `fake`, keeping up to `cap` of the
/// fake's existing edges first.
fn random_row(ctx: &AttackContext, fake: NodeId, cap: usize, rng: &mut ChaCha8Rng) -> BitRow {
    let n = ctx.n();
    let existing: Vec<NodeId> = ctx.graph.neighbors(fake).collect();
    let mut row = BitRow::new(n);
    if existing.len() >= cap {
        for k in sample_distinct(rng, existing.len(), cap) {
            row.set(existing[k]);
        }
        return row;
    }
    for &v in &existing {
        row.set(v);
    }
    let mut free: Vec<NodeId> = (0..n).filter(|&v| v != fake && !row.get(v)).collect();
    let need = cap - existing.len();
    for k in sample_distinct(rng, free.len(), need) {
        row.set(free[k]);
    }
    free.clear();
    row
}

fn check_cap(ctx: &AttackContext, cap: usize) -> Result<()> {
    if cap >= ctx.n().saturating_sub(1) && cap > 0 {
        return Err(Error::domain(format!(
            "connection cap {cap} leaves no room among {} nodes",
            ctx.n()
        )));
    }
    Ok(())
}

fn craft_rva(ctx: &AttackContext, metric: Metric, seed: Seed) -> Result<AttackPlan> {
    ctx.check()?;
    let cap = connection_budget(ctx.knowledge);
    check_cap(ctx, cap)?;
    let upper = ctx.n().saturating_sub(1) as f64;
    let reports = ctx
        .threat
        .fake_ids()
        .map(|u| {
            let mut rng = fake_rng(seed, u);
            let bits = random_row(ctx, u, cap, &mut rng);
            let degree = match metric {
                Metric::DegreeCentrality => ctx.consistent_degree(&bits, u)?,
                Metric::ClusteringCoefficient => rng.random::<f64>() * upper,
            };
            Ok(Report { node: u, bits, degree })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AttackPlan::new(AttackKind::Rva, metric, reports, &ctx.threat.targets, cap))
}

/// RVA on degree centrality: `cap` unperturbed random edges per fake and a
/// consistent (Laplace-noised) degree.
pub fn craft_rva_degree(ctx: &AttackContext, seed: Seed) -> Result<AttackPlan> {
    craft_rva(ctx, Metric::DegreeCentrality, seed)
}

/// RVA on clustering: random edges as for degree, degree drawn uniformly
/// from `[0, N - 1]`.
pub fn craft_rva_cc(ctx: &AttackContext, seed: Seed) -> Result<AttackPlan> {
    craft_rva(ctx, Metric::ClusteringCoefficient, seed)
}

fn craft_rna(ctx: &AttackContext, metric: Metric, seed: Seed) -> Result<AttackPlan> {
    ctx.check()?;
    let targets = &ctx.threat.targets;
    if targets.is_empty() {
        return Err(Error::domain("RNA needs at least one target"));
    }
    let reports = ctx
        .threat
        .fake_ids()
        .map(|u| {
            let mut rng = fake_rng(seed, u);
            let mut row = ctx.graph.row(u).clone();
            row.set(targets[rng.random_range(0..targets.len())]);
            let degree = ctx.consistent_degree(&row, u)?;
            let bits = perturb_row(&row, u, ctx.params.p, ctx.mode, ctx.protocol_seed)?;
            Ok(Report { node: u, bits, degree })
        })
        .collect::<Result<Vec<_>>>()?;
    let cap = connection_budget(ctx.knowledge);
    Ok(AttackPlan::new(AttackKind::Rna, metric, reports, targets, cap))
}

/// RNA: one random target edge on top of the fake's own edges, then the
/// whole row goes through the protocol.
pub fn craft_rna_degree(ctx: &AttackContext, seed: Seed) -> Result<AttackPlan> {
    craft_rna(ctx, Metric::DegreeCentrality, seed)
}

pub fn craft_rna_cc(ctx: &AttackContext, seed: Seed) -> Result<AttackPlan> {
    craft_rna(ctx, Metric::ClusteringCoefficient, seed)
}

/// Row touching `min(r, cap)` targets. Targets the fake is already linked
/// to are kept first; the rest are sampled uniformly.
fn max_target_row(ctx: &AttackContext, fake: NodeId, cap: usize, rng: &mut ChaCha8Rng) -> BitRow {
    let targets = &ctx.threat.targets;
    let want = targets.len().min(cap);
    let (linked, unlinked): (Vec<NodeId>, Vec<NodeId>) =
        targets.iter().partition(|&&t| ctx.graph.has_edge(fake, t));
    let mut row = BitRow::new(ctx.n());
    if linked.len() >= want {
        for k in sample_distinct(rng, linked.len(), want) {
            row.set(linked[k]);
        }
    } else {
        for &t in &linked {
            row.set(t);
        }
        for k in sample_distinct(rng, unlinked.len(), want - linked.len()) {
            row.set(unlinked[k]);
        }
    }
    row
}

/// MGA on degree centrality: every fake links to as many targets as the cap
/// allows and sends the row unperturbed.
pub fn craft_mga_degree(ctx: &AttackContext, seed: Seed) -> Result<AttackPlan> {
    ctx.check()?;
    let cap = connection_budget(ctx.knowledge);
    let reports = ctx
        .threat
        .fake_ids()
        .map(|u| {
            let bits = max_target_row(ctx, u, cap, &mut fake_rng(seed, u));
            let degree = ctx.consistent_degree(&bits, u)?;
            Ok(Report { node: u, bits, degree })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AttackPlan::new(
        AttackKind::Mga,
        Metric::DegreeCentrality,
        reports,
        &ctx.threat.targets,
        cap,
    ))
}

/// MGA on clustering: fakes are paired, each pair is linked, and both
/// members link to the same `min(cap - 1, r)` targets, so every shared target
/// gains one triangle per pair. Target blocks rotate round-robin over `T`.
/// An unpaired last fake behaves as in [`craft_mga_degree`].
pub fn craft_mga_cc(ctx: &AttackContext, seed: Seed) -> Result<AttackPlan> {
    ctx.check()?;
    let cap = connection_budget(ctx.knowledge);
    let m = ctx.threat.fakes;
    if cap < 2 || m < 2 {
        warn!("MGA on clustering needs cap >= 2 and m >= 2 (cap = {cap}, m = {m}); falling back to MGA on degree");
        let plan = craft_mga_degree(ctx, seed)?;
        return Ok(AttackPlan {
            metric: Metric::ClusteringCoefficient,
            ..plan
        });
    }
    let targets = &ctx.threat.targets;
    let r = targets.len();
    let per_pair = (cap - 1).min(r);
    let fakes: Vec<NodeId> = ctx.threat.fake_ids().collect();
    let mut rows: Vec<BitRow> = vec![BitRow::new(ctx.n()); m];

    for (k, pair) in fakes.chunks(2).enumerate() {
        if let [a, b] = *pair {
            let start = k * per_pair;
            let ia = a - ctx.threat.genuine;
            let ib = b - ctx.threat.genuine;
            rows[ia].set(b);
            rows[ib].set(a);
            for j in 0..per_pair {
                let t = targets[(start + j) % r];
                rows[ia].set(t);
                rows[ib].set(t);
            }
        } else {
            let u = pair[0];
            rows[u - ctx.threat.genuine] = max_target_row(ctx, u, cap, &mut fake_rng(seed, u));
        }
    }
    let reports = fakes
        .iter()
        .zip(rows)
        .map(|(&u, bits)| {
            let degree = ctx.consistent_degree(&bits, u)?;
            Ok(Report { node: u, bits, degree })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AttackPlan::new(
        AttackKind::Mga,
        Metric::ClusteringCoefficient,
        reports,
        targets,
        cap,
    ))
}

pub fn craft(kind: AttackKind, metric: Metric, ctx: &AttackContext, seed: Seed) -> Result<AttackPlan> {
    match (kind, metric) {
        (AttackKind::Rva, Metric::DegreeCentrality) => craft_rva_degree(ctx, seed),
        (AttackKind::Rva, Metric::ClusteringCoefficient) => craft_rva_cc(ctx, seed),
        (AttackKind::Rna, Metric::DegreeCentrality) => craft_rna_degree(ctx, seed),
        (AttackKind::Rna, Metric::ClusteringCoefficient) => craft_rna_cc(ctx, seed),
        (AttackKind::Mga, Metric::DegreeCentrality) => craft_mga_degree(ctx, seed),
        (AttackKind::Mga, Metric::ClusteringCoefficient) => craft_mga_cc(ctx, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::triangle_count;
    use crate::ldp::split_budget;

    struct Fixture {
        graph: Graph,
        threat: ThreatModel,
        knowledge: AttackerKnowledge,
        params: PrivacyParams,
    }

    impl Fixture {
        fn new(n: usize, m: usize, targets: Vec<NodeId>, avg: f64, epsilon: f64) -> Self {
            let params = split_budget(epsilon, 0.5).unwrap();
            let threat = ThreatModel {
                genuine: n,
                beta: m as f64 / n as f64,
                gamma: targets.len() as f64 / n as f64,
                fakes: m,
                targets,
                fake_init: FakeInit::Fresh,
            };
            Fixture {
                graph: Graph::from_edges(n + m, []),
                knowledge: AttackerKnowledge {
                    avg_perturbed_degree: avg,
                    params,
                    num_nodes: n + m,
                },
                threat,
                params,
            }
        }

        fn ctx(&self) -> AttackContext<'_> {
            AttackContext {
                graph: &self.graph,
                threat: &self.threat,
                knowledge: &self.knowledge,
                params: &self.params,
                mode: CollectionMode::SynchronizedPair,
                protocol_seed: Seed(99),
            }
        }
    }

    #[test]
    fn plan_threat_sizes() {
        let tm = plan_threat(4039, 0.05, 0.05, Seed(1)).unwrap();
        assert_eq!(tm.fakes, 202);
        assert_eq!(tm.targets.len(), 202);
        assert_eq!(tm.total(), 4241);
        assert_eq!(plan_threat(100, 0.05, 0.01, Seed(1)).unwrap().targets.len(), 1);
        assert_eq!(plan_threat(100, 0.05, 0.05, Seed(1)).unwrap().fakes, 5);
        assert_eq!(plan_threat(100, 0.0, 0.05, Seed(1)).unwrap().fakes, 0);
        assert_eq!(
            plan_threat(500, 0.1, 0.2, Seed(7)).unwrap(),
            plan_threat(500, 0.1, 0.2, Seed(7)).unwrap()
        );
        assert!(plan_threat(100, 0.05, 0.0, Seed(1)).is_err());
        assert!(plan_threat(0, 0.05, 0.5, Seed(1)).is_err());
        let tm = plan_threat(50, 0.1, 1.0, Seed(3)).unwrap();
        assert_eq!(tm.targets, (0..50).collect::<Vec<_>>());
        assert!(tm.targets.iter().all(|&t| !tm.is_fake(t)));
    }

    #[test]
    fn budget_is_floor() {
        let params = split_budget(4.0, 0.5).unwrap();
        let k = |avg| AttackerKnowledge {
            avg_perturbed_degree: avg,
            params,
            num_nodes: 10,
        };
        assert_eq!(connection_budget(&k(4.7)), 4);
        assert_eq!(connection_budget(&k(4.0)), 4);
    }

    #[test]
    fn rva_degree_shape() {
        let fx = Fixture::new(9, 1, vec![0], 2.5, 4.0);
        let plan = craft_rva_degree(&fx.ctx(), Seed(1)).unwrap();
        assert_eq!(plan.reports.len(), 1);
        let r = &plan.reports[0];
        assert_eq!(r.node, 9);
        assert_eq!(r.bits.count_ones(), 2);
        assert!(!r.bits.get(9));
    }

    #[test]
    fn rva_rejects_saturating_cap() {
        let fx = Fixture::new(9, 1, vec![0], 9.0, 4.0);
        assert!(craft_rva_degree(&fx.ctx(), Seed(1)).is_err());
    }

    #[test]
    fn no_fakes_means_empty_plans() {
        let fx = Fixture::new(20, 0, vec![1, 2], 3.0, 4.0);
        for kind in AttackKind::ALL {
            for metric in [Metric::DegreeCentrality, Metric::ClusteringCoefficient] {
                let plan = craft(kind, metric, &fx.ctx(), Seed(0)).unwrap();
                assert!(plan.reports.is_empty() && plan.links.is_empty());
            }
        }
    }

    #[test]
    fn rva_cc_with_zero_cap_reports_only_degrees() {
        let fx = Fixture::new(30, 4, vec![1], 0.5, 4.0);
        let plan = craft_rva_cc(&fx.ctx(), Seed(3)).unwrap();
        for r in &plan.reports {
            assert_eq!(r.bits.count_ones(), 0);
            assert!((0.0..=33.0).contains(&r.degree));
        }
        assert_eq!(plan, craft_rva_cc(&fx.ctx(), Seed(3)).unwrap());
    }

    #[test]
    fn rna_without_noise_hits_one_target() {
        let mut fx = Fixture::new(20, 3, vec![4], 3.0, f64::INFINITY);
        fx.params = split_budget(f64::INFINITY, 0.5).unwrap();
        let plan = craft_rna_degree(&fx.ctx(), Seed(2)).unwrap();
        for r in &plan.reports {
            assert_eq!(r.bits.iter_ones().collect::<Vec<_>>(), vec![4]);
            assert_eq!(r.degree, 1.0);
        }
        assert_eq!(plan.links, vec![(20, 4), (21, 4), (22, 4)]);
    }

    #[test]
    fn mga_degree_min_rule() {
        let fx = Fixture::new(30, 4, vec![1, 5, 9], 5.0, 4.0);
        let plan = craft_mga_degree(&fx.ctx(), Seed(1)).unwrap();
        for r in &plan.reports {
            assert_eq!(r.bits.iter_ones().collect::<Vec<_>>(), vec![1, 5, 9]);
        }
        let fx = Fixture::new(30, 4, (0..10).collect(), 4.2, 4.0);
        let plan = craft_mga_degree(&fx.ctx(), Seed(1)).unwrap();
        assert_eq!(plan.links.len(), 4 * 4);
        for r in &plan.reports {
            assert_eq!(r.bits.count_ones(), 4);
            assert!(r.bits.iter_ones().all(|t| t < 10));
        }
    }

    #[test]
    fn mga_cc_single_pair_single_target() {
        let fx = Fixture::new(10, 2, vec![3], 2.0, 4.0);
        let plan = craft_mga_cc(&fx.ctx(), Seed(1)).unwrap();
        let (f1, f2) = (10, 11);
        assert_eq!(plan.reports[0].bits.iter_ones().collect::<Vec<_>>(), vec![3, f2]);
        assert_eq!(plan.reports[1].bits.iter_ones().collect::<Vec<_>>(), vec![3, f1]);
        let crafted = Graph::from_edges(12, [(f1, f2), (f1, 3), (f2, 3)]);
        assert_eq!(triangle_count(&crafted, 3), 1);
    }

    #[test]
    fn mga_cc_pair_covers_three_targets() {
        let fx = Fixture::new(10, 2, vec![0, 4, 7], 4.0, 4.0);
        let plan = craft_mga_cc(&fx.ctx(), Seed(1)).unwrap();
        let mut edges = Vec::new();
        for r in &plan.reports {
            edges.extend(r.bits.iter_ones().map(|j| (r.node, j)));
        }
        let crafted = Graph::from_edges(12, edges);
        let gained: u64 = [0, 4, 7].iter().map(|&t| triangle_count(&crafted, t)).sum();
        assert_eq!(gained, 3);
        for t in [0, 4, 7] {
            assert_eq!(triangle_count(&crafted, t), 1);
        }
    }

    #[test]
    fn mga_cc_odd_fake_and_degenerate_cases() {
        let fx = Fixture::new(20, 3, vec![0, 1, 2, 3], 3.0, 4.0);
        let plan = craft_mga_cc(&fx.ctx(), Seed(1)).unwrap();
        assert_eq!(plan.reports[2].bits.count_ones(), 3);
        assert!(plan.reports[2].bits.iter_ones().all(|t| t < 4));

        let fx = Fixture::new(20, 1, vec![0, 1], 3.0, 4.0);
        let plan = craft_mga_cc(&fx.ctx(), Seed(1)).unwrap();
        assert_eq!(plan.metric, Metric::ClusteringCoefficient);
        assert_eq!(plan.reports[0].bits.count_ones(), 2);
    }

    #[test]
    fn compromised_mga_keeps_existing_target_links() {
        let mut fx = Fixture::new(20, 1, vec![2, 3, 4, 5], 2.0, 4.0);
        fx.graph = Graph::from_edges(21, [(20, 5), (20, 11)]);
        let plan = craft_mga_degree(&fx.ctx(), Seed(8)).unwrap();
        let bits = &plan.reports[0].bits;
        assert!(bits.get(5));
        assert!(!bits.get(11));
        assert_eq!(bits.count_ones(), 2);
    }

    #[test]
    fn compromised_edges_follow_density() {
        let tm = ThreatModel {
            genuine: 400,
            beta: 0.25,
            gamma: 0.1,
            fakes: 100,
            targets: vec![0],
            fake_init: FakeInit::Compromised,
        };
        let edges = tm.initial_edges(0.1, Seed(4));
        assert!(edges.iter().all(|&(v, u)| v < u && tm.is_fake(u)));
        let possible: f64 = (400..500).map(|u| u as f64).sum();
        let rate = edges.len() as f64 / possible;
        assert!((rate - 0.1).abs() < 0.005, "{rate}");
        assert!(tm.clone().with_fake_init(FakeInit::Fresh).initial_edges(0.1, Seed(4)).is_empty());
    }
}
