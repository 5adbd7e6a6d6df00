//! Collector-side aggregation and metric estimation.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::graph::{triangles_in_rows, NodeId};
use crate::ldp::{CollectionMode, Report};

/// Graph metric under attack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "degree")]
    DegreeCentrality,
    #[serde(rename = "cc")]
    ClusteringCoefficient,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::DegreeCentrality => "degree",
            Metric::ClusteringCoefficient => "cc",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree" | "degree-centrality" => Ok(Metric::DegreeCentrality),
            "cc" | "clustering" | "clustering-coefficient" => Ok(Metric::ClusteringCoefficient),
            other => Err(Error::Config(format!("unknown metric `{other}`"))),
        }
    }
}

/// The collector's view: the OR-symmetrized matrix of all claimed edges.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedGraph {
    matrix: Vec<BitRow>,
    row_degrees: Vec<usize>,
    reported_degrees: Vec<f64>,
    edge_density: f64,
}

impl PerturbedGraph {
    pub fn num_nodes(&self) -> usize {
        self.matrix.len()
    }

    pub fn row(&self, i: NodeId) -> &BitRow {
        &self.matrix[i]
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.matrix
    }

    pub fn row_degree(&self, i: NodeId) -> usize {
        self.row_degrees[i]
    }

    pub fn row_degrees(&self) -> &[usize] {
        &self.row_degrees
    }

    /// The Laplace-noised degree `d~` node `i` submitted.
    pub fn reported_degree(&self, i: NodeId) -> f64 {
        self.reported_degrees[i]
    }

    /// `theta~ = sum of row degrees / (N (N - 1))`.
    pub fn edge_density(&self) -> f64 {
        self.edge_density
    }

    pub fn mean_row_degree(&self) -> f64 {
        self.row_degrees.iter().sum::<usize>() as f64 / self.num_nodes() as f64
    }
}

/// Build `M~` from one report per node.
///
/// Edge `(i, j)` is present iff either endpoint claims it. For honest
/// synchronized-pair reports both claims agree; a crafted one-sided claim
/// still enters the graph.
pub fn assemble_perturbed_graph(reports: &[Report], _mode: CollectionMode) -> Result<PerturbedGraph> {
    let n = reports.len();
    let mut slots: Vec<Option<&Report>> = vec![None; n];
    for r in reports {
        if r.bits.len() != n {
            return Err(Error::Shape(format!(
                "report {} has {} bits, expected {n}",
                r.node,
                r.bits.len()
            )));
        }
        match slots.get_mut(r.node) {
            Some(slot @ None) => *slot = Some(r),
            Some(Some(_)) => return Err(Error::Shape(format!("duplicate report for node {}", r.node))),
            None => return Err(Error::Shape(format!("report node {} out of range", r.node))),
        }
    }
    let ordered: Vec<&Report> = slots.into_iter().map(|s| s.expect("every node reported")).collect();

    let mut matrix: Vec<BitRow> = ordered.iter().map(|r| r.bits.clone()).collect();
    for (i, r) in ordered.iter().enumerate() {
        for j in r.bits.iter_ones() {
            matrix[j].set(i);
        }
    }
    for (i, row) in matrix.iter_mut().enumerate() {
        row.clear(i);
    }
    let row_degrees: Vec<usize> = matrix.iter().map(BitRow::count_ones).collect();
    let total: usize = row_degrees.iter().sum();
    let edge_density = if n < 2 {
        0.0
    } else {
        total as f64 / (n as f64 * (n - 1) as f64)
    };
    Ok(PerturbedGraph {
        matrix,
        row_degrees,
        reported_degrees: ordered.iter().map(|r| r.degree).collect(),
        edge_density,
    })
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.5 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::SingularCalibration { p })
    }
}

/// Unbiased degree from the perturbed row: `(deg~ - (N-1)(1-p)) / (2p-1)`.
pub fn estimate_degree(pg: &PerturbedGraph, p: f64, i: NodeId) -> Result<f64> {
    check_p(p)?;
    let n = pg.num_nodes() as f64;
    Ok((pg.row_degree(i) as f64 - (n - 1.0) * (1.0 - p)) / (2.0 * p - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricEstimate {
    pub node: NodeId,
    pub kind: Metric,
    /// Unclamped estimate, used for gains.
    pub value: f64,
}

impl MetricEstimate {
    /// The estimate clamped to `[0, 1]` for display.
    pub fn clamped(&self) -> f64 {
        self.value.clamp(0.0, 1.0)
    }
}

pub fn estimate_degree_centrality(pg: &PerturbedGraph, p: f64, i: NodeId) -> Result<MetricEstimate> {
    let n = pg.num_nodes();
    if n < 2 {
        return Err(Error::domain("degree centrality needs at least two nodes"));
    }
    Ok(MetricEstimate {
        node: i,
        kind: Metric::DegreeCentrality,
        value: estimate_degree(pg, p, i)? / (n - 1) as f64,
    })
}

/// Triangles through `i` in `M~`.
pub fn perturbed_triangle_count(pg: &PerturbedGraph, i: NodeId) -> u64 {
    triangles_in_rows(&pg.matrix, i)
}

/// Remove the randomized-response bias from a perturbed triangle count.
///
/// `tau~` is decomposed by how many of the two other corners are reported
/// neighbors of `i`; subtracting the expected spurious triangles and
/// rescaling by `p^2 (2p - 1)` gives the corrected count. The result may be
/// negative.
pub fn calibrate_triangle_count(tau: f64, d: f64, n: usize, p: f64, theta: f64) -> Result<f64> {
    check_p(p)?;
    let n = n as f64;
    let q = 1.0 - p;
    let both = 0.5 * d * (d - 1.0) * p * p * q;
    let one = d * (n - d - 1.0) * p * q * theta;
    let neither = 0.5 * (n - d - 1.0) * (n - d - 2.0) * q * q * theta;
    Ok((tau - both - one - neither) / (p * p * (2.0 * p - 1.0)))
}

/// Raw and calibrated triangle counts for one node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleEstimate {
    pub raw: u64,
    pub calibrated: f64,
    /// Expected perturbed triangles whose other corners are both, one, or
    /// neither of `i`'s neighbors, evaluated at the calibrated count.
    pub components: [f64; 3],
}

pub fn triangle_estimate(pg: &PerturbedGraph, p: f64, i: NodeId) -> Result<TriangleEstimate> {
    let raw = perturbed_triangle_count(pg, i);
    let d = pg.reported_degree(i);
    let n = pg.num_nodes() as f64;
    let theta = pg.edge_density();
    let calibrated = calibrate_triangle_count(raw as f64, d, pg.num_nodes(), p, theta)?;
    let q = 1.0 - p;
    let pairs = 0.5 * d * (d - 1.0);
    Ok(TriangleEstimate {
        raw,
        calibrated,
        components: [
            calibrated * p.powi(3) + (pairs - calibrated) * p * p * q,
            d * (n - d - 1.0) * p * q * theta,
            0.5 * (n - d - 1.0) * (n - d - 2.0) * q * q * theta,
        ],
    })
}

/// Smallest degree used in the clustering denominator.
const MIN_CC_DEGREE: f64 = 2.0;

/// `2 tau / (d~ (d~ - 1))` with `tau` calibrated and `d~` the reported
/// degree clamped to at least 2.
pub fn estimate_clustering_coefficient(pg: &PerturbedGraph, p: f64, i: NodeId) -> Result<MetricEstimate> {
    let tri = triangle_estimate(pg, p, i)?;
    Ok(MetricEstimate {
        node: i,
        kind: Metric::ClusteringCoefficient,
        value: cc_from_triangles(tri.calibrated, pg.reported_degree(i)),
    })
}

fn cc_from_triangles(tau: f64, reported_degree: f64) -> f64 {
    let d = reported_degree.max(MIN_CC_DEGREE);
    2.0 * tau / (d * (d - 1.0))
}

pub fn estimate_metric(pg: &PerturbedGraph, p: f64, metric: Metric, i: NodeId) -> Result<MetricEstimate> {
    match metric {
        Metric::DegreeCentrality => estimate_degree_centrality(pg, p, i),
        Metric::ClusteringCoefficient => estimate_clustering_coefficient(pg, p, i),
    }
}

/// CSV with columns `node_id,kind,value,raw_tau,calibrated_tau,d_tilde`;
/// triangle columns are empty for degree estimates.
pub fn write_estimates_csv<W: Write>(
    out: W,
    pg: &PerturbedGraph,
    p: f64,
    metric: Metric,
    nodes: impl IntoIterator<Item = NodeId>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node_id", "kind", "value", "raw_tau", "calibrated_tau", "d_tilde"])?;
    for i in nodes {
        let est = estimate_metric(pg, p, metric, i)?;
        let (raw, cal) = match metric {
            Metric::ClusteringCoefficient => {
                let t = triangle_estimate(pg, p, i)?;
                (t.raw.to_string(), t.calibrated.to_string())
            }
            Metric::DegreeCentrality => (String::new(), String::new()),
        };
        w.write_record([
            i.to_string(),
            metric.to_string(),
            est.value.to_string(),
            raw,
            cal,
            pg.reported_degree(i).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::ldp::{collect_reports, split_budget};
    use crate::rng::Seed;

    fn honest(g: &Graph) -> Vec<Report> {
        let params = split_budget(f64::INFINITY, 0.5).unwrap();
        collect_reports(g, &params, CollectionMode::SynchronizedPair, Seed(0)).unwrap()
    }

    fn k3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn honest_k3_assembles_exactly() {
        let pg = assemble_perturbed_graph(&honest(&k3()), CollectionMode::SynchronizedPair).unwrap();
        assert_eq!(pg.rows(), k3().rows());
        assert_eq!(pg.edge_density(), 1.0);
        for i in 0..3 {
            assert_eq!(estimate_degree_centrality(&pg, 1.0, i).unwrap().value, 1.0);
            assert_eq!(perturbed_triangle_count(&pg, i), 1);
            assert_eq!(estimate_clustering_coefficient(&pg, 1.0, i).unwrap().value, 1.0);
        }
    }

    #[test]
    fn one_sided_claim_enters_graph() {
        let n = 5;
        let mut reports: Vec<Report> = (0..n)
            .map(|node| Report {
                node,
                bits: BitRow::new(n),
                degree: 0.0,
            })
            .collect();
        reports[4].bits.set(2);
        let pg = assemble_perturbed_graph(&reports, CollectionMode::SynchronizedPair).unwrap();
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| pg.row(i).iter_ones().filter(move |&j| j > i).map(move |j| (i, j)))
            .collect();
        assert_eq!(edges, vec![(2, 4)]);
    }

    #[test]
    fn assembly_shape_errors() {
        let mut reports = honest(&k3());
        reports[1].bits = BitRow::new(4);
        assert!(matches!(
            assemble_perturbed_graph(&reports, CollectionMode::SynchronizedPair),
            Err(Error::Shape(_))
        ));
        let mut dup = honest(&k3());
        dup[2].node = 0;
        assert!(assemble_perturbed_graph(&dup, CollectionMode::SynchronizedPair).is_err());
    }

    #[test]
    fn degree_inversion_examples() {
        // N = 101, raw row degree 10, p = 0.9 -> (10 - 100 * 0.1) / 0.8 = 0
        let n = 101;
        let reports: Vec<Report> = (0..n)
            .map(|node| Report {
                node,
                bits: if node == 0 {
                    BitRow::from_indices(n, 1..=10)
                } else {
                    BitRow::new(n)
                },
                degree: 0.0,
            })
            .collect();
        let pg = assemble_perturbed_graph(&reports, CollectionMode::SynchronizedPair).unwrap();
        assert!(estimate_degree(&pg, 0.9, 0).unwrap().abs() < 1e-12);
        assert!(estimate_degree_centrality(&pg, 0.9, 0).unwrap().value.abs() < 1e-12);
        assert_eq!(estimate_degree(&pg, 1.0, 0).unwrap(), 10.0);
        assert!(estimate_degree(&pg, 0.5, 0).is_err());
    }

    #[test]
    fn calibration_examples() {
        for (tau, d, n, theta) in [(0.0, 0.0, 10, 0.3), (7.0, 4.2, 50, 0.9), (123.0, 17.5, 400, 0.01)] {
            assert_eq!(calibrate_triangle_count(tau, d, n, 1.0, theta).unwrap(), tau);
        }
        // (2 - 0.243 - 0.162 - 0.015) / 0.648
        let r = calibrate_triangle_count(2.0, 3.0, 10, 0.9, 0.1).unwrap();
        assert!((r - 2.438271604938271605).abs() < 1e-12, "{r}");
        assert!(matches!(
            calibrate_triangle_count(1.0, 1.0, 10, 0.5, 0.1),
            Err(Error::SingularCalibration { .. })
        ));
    }

    #[test]
    fn calibration_is_increasing_in_tau() {
        let a = calibrate_triangle_count(3.0, 6.0, 100, 0.8, 0.2).unwrap();
        let b = calibrate_triangle_count(4.0, 6.0, 100, 0.8, 0.2).unwrap();
        assert!((b - a - 1.0 / (0.64 * 0.6)).abs() < 1e-9);
    }

    #[test]
    fn components_sum_to_raw_count() {
        let g = crate::synth::gnp(60, 0.2, Seed(1));
        let params = split_budget(3.0, 0.5).unwrap();
        let reports = collect_reports(&g, &params, CollectionMode::SynchronizedPair, Seed(4)).unwrap();
        let pg = assemble_perturbed_graph(&reports, CollectionMode::SynchronizedPair).unwrap();
        for i in 0..60 {
            let t = triangle_estimate(&pg, params.p, i).unwrap();
            let sum: f64 = t.components.iter().sum();
            assert!((sum - t.raw as f64).abs() < 1e-6 * (1.0 + t.raw as f64));
        }
    }

    #[test]
    fn star_and_chorded_cycle_at_p_one() {
        let star = Graph::from_edges(6, (1..6).map(|l| (0, l)));
        let pg = assemble_perturbed_graph(&honest(&star), CollectionMode::SynchronizedPair).unwrap();
        assert_eq!(perturbed_triangle_count(&pg, 0), 0);
        assert_eq!(estimate_clustering_coefficient(&pg, 1.0, 0).unwrap().value, 0.0);

        let cyc = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let pg = assemble_perturbed_graph(&honest(&cyc), CollectionMode::SynchronizedPair).unwrap();
        assert_eq!(perturbed_triangle_count(&pg, 0), 2);
        let cc = estimate_clustering_coefficient(&pg, 1.0, 0).unwrap();
        assert!((cc.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn clamped_display_value() {
        let e = MetricEstimate {
            node: 0,
            kind: Metric::ClusteringCoefficient,
            value: -0.3,
        };
        assert_eq!(e.clamped(), 0.0);
        assert_eq!(MetricEstimate { value: 4.0, ..e }.clamped(), 1.0);
    }

    #[test]
    fn estimates_csv_columns() {
        let pg = assemble_perturbed_graph(&honest(&k3()), CollectionMode::SynchronizedPair).unwrap();
        let mut buf = Vec::new();
        write_estimates_csv(&mut buf, &pg, 1.0, Metric::ClusteringCoefficient, [0]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "node_id,kind,value,raw_tau,calibrated_tau,d_tilde\n0,cc,1,1,1,2\n");
    }
}
