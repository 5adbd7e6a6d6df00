//! Fake-user detection on the collector side and report cleaning.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::ldp::{Report, DEFAULT_DEGREE_SENSITIVITY};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefenseKind {
    None,
    /// Frequent-itemset mining over reported rows.
    Detect1,
    /// Gap between the claimed degree and the row-based estimate.
    Detect2,
    /// Drop the top degree fraction.
    Naive1,
    /// Drop the top and bottom degree fractions.
    Naive2,
}

impl DefenseKind {
    pub const ALL: [DefenseKind; 5] = [
        DefenseKind::None,
        DefenseKind::Detect1,
        DefenseKind::Detect2,
        DefenseKind::Naive1,
        DefenseKind::Naive2,
    ];
}

impl fmt::Display for DefenseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DefenseKind::None => "none",
            DefenseKind::Detect1 => "detect1",
            DefenseKind::Detect2 => "detect2",
            DefenseKind::Naive1 => "naive1",
            DefenseKind::Naive2 => "naive2",
        })
    }
}

impl FromStr for DefenseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(DefenseKind::None),
            "detect1" | "itemsets" => Ok(DefenseKind::Detect1),
            "detect2" | "degree_gap" | "degree-gap" => Ok(DefenseKind::Detect2),
            "naive1" | "naive_top" => Ok(DefenseKind::Naive1),
            "naive2" | "naive_extremes" => Ok(DefenseKind::Naive2),
            other => Err(Error::Config(format!("unknown defense `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Minimum number of rows an itemset must appear in.
    pub min_support: usize,
    /// Largest itemset size mined.
    pub max_itemset_size: usize,
    /// A row is flagged when it contains more than this many frequent itemsets.
    pub itemset_threshold: usize,
    /// Overrides `max d^ + 3 sigma` when set.
    pub degree_gap_threshold: Option<f64>,
    /// Fraction of nodes dropped at each degree extreme by the naive rules.
    pub naive_fraction: f64,
}

impl DetectorConfig {
    /// Defaults for a population of `n` reports: support `ceil(0.01 n)`,
    /// itemsets of up to three nodes.
    pub fn for_population(n: usize) -> Self {
        DetectorConfig {
            min_support: ((n as f64 * 0.01).ceil() as usize).max(1),
            max_itemset_size: 3,
            itemset_threshold: 100,
            degree_gap_threshold: None,
            naive_fraction: 0.03,
        }
    }

    /// Like [`for_population`](Self::for_population) but with the support
    /// raised above the co-occurrence that randomized response alone
    /// produces. Two columns of density `theta` share about `n theta^2`
    /// rows by chance; the support is set six standard deviations above
    /// that, so noise pairs are not frequent.
    pub fn for_reports(reports: &[Report]) -> Self {
        let mut cfg = Self::for_population(reports.len());
        cfg.min_support = cfg.min_support.max(noise_support_floor(reports));
        cfg
    }
}

/// `ceil(mu + 6 sqrt(mu))` with `mu = n theta^2`, `theta` the mean row
/// density of the reports.
pub fn noise_support_floor(reports: &[Report]) -> usize {
    let n = reports.len();
    if n < 2 {
        return 1;
    }
    let ones: usize = reports.iter().map(|r| r.bits.count_ones()).sum();
    let theta = ones as f64 / (n as f64 * (n - 1) as f64);
    let mu = n as f64 * theta * theta;
    (mu + 6.0 * mu.sqrt()).ceil().max(1.0) as usize
}

/// Outcome of a detector: flagged nodes and the reports after cleaning.
#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub flagged: BTreeSet<NodeId>,
    pub cleaned: Vec<Report>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionQuality {
    pub precision: f64,
    pub recall: f64,
}

/// Precision and recall of `flagged` against the true fakes. Precision is 1
/// when nothing is flagged; recall is 1 when there are no fakes.
pub fn evaluate_detection(flagged: &BTreeSet<NodeId>, fakes: &BTreeSet<NodeId>) -> DetectionQuality {
    let hits = flagged.intersection(fakes).count() as f64;
    DetectionQuality {
        precision: if flagged.is_empty() { 1.0 } else { hits / flagged.len() as f64 },
        recall: if fakes.is_empty() { 1.0 } else { hits / fakes.len() as f64 },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FrequentItemset {
    /// Sorted column ids.
    pub items: Vec<NodeId>,
    pub support: usize,
}

/// Column-major view of the rows: `tidsets[j]` holds the rows containing `j`.
fn tidsets(rows: &[&BitRow], universe: usize) -> Vec<BitRow> {
    let mut cols = vec![BitRow::new(rows.len()); universe];
    for (t, row) in rows.iter().enumerate() {
        for j in row.iter_ones() {
            cols[j].set(t);
        }
    }
    cols
}

fn intersect(cols: &[BitRow], items: &[NodeId]) -> BitRow {
    let mut acc = cols[items[0]].clone();
    for &j in &items[1..] {
        acc.and_assign(&cols[j]);
    }
    acc
}

/// Level-wise Apriori over vertical tidsets. Calls `visit` with every
/// frequent itemset of size `2..=max_size` and the rows containing it.
fn apriori<F>(rows: &[&BitRow], universe: usize, min_support: usize, max_size: usize, mut visit: F)
where
    F: FnMut(&[NodeId], &BitRow),
{
    let min_support = min_support.max(1);
    let cols = tidsets(rows, universe);
    let singles: Vec<NodeId> = (0..universe).filter(|&j| cols[j].count_ones() >= min_support).collect();
    if max_size < 2 {
        return;
    }

    let mut level: Vec<Vec<NodeId>> = singles
        .par_iter()
        .enumerate()
        .flat_map_iter(|(k, &a)| {
            let cols = &cols;
            singles[k + 1..]
                .iter()
                .filter(move |&&b| cols[a].and_count(&cols[b]) >= min_support)
                .map(move |&b| vec![a, b])
        })
        .collect();

    let mut size = 2;
    loop {
        for items in &level {
            visit(items, &intersect(&cols, items));
        }
        if size == max_size || level.len() < 2 {
            break;
        }
        let known: HashSet<&[NodeId]> = level.iter().map(Vec::as_slice).collect();
        let mut candidates = Vec::new();
        let mut start = 0;
        while start < level.len() {
            let prefix = &level[start][..size - 1];
            let end = start + level[start..].iter().take_while(|s| &s[..size - 1] == prefix).count();
            for x in start..end {
                for y in x + 1..end {
                    let mut cand = level[x].clone();
                    cand.push(level[y][size - 1]);
                    let closed = (0..size - 1).all(|drop| {
                        let sub: Vec<NodeId> = cand
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != drop)
                            .map(|(_, &v)| v)
                            .collect();
                        known.contains(sub.as_slice())
                    });
                    if closed {
                        candidates.push(cand);
                    }
                }
            }
            start = end;
        }
        level = candidates
            .into_par_iter()
            .filter(|c| intersect(&cols, c).count_ones() >= min_support)
            .collect();
        size += 1;
    }
}

/// All frequent itemsets of size `2..=max_size` among the reported rows,
/// sorted by size and then lexicographically.
pub fn mine_frequent_itemsets(reports: &[Report], min_support: usize, max_size: usize) -> Vec<FrequentItemset> {
    let rows: Vec<&BitRow> = reports.iter().map(|r| &r.bits).collect();
    let universe = rows.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    apriori(&rows, universe, min_support, max_size, |items, tids| {
        out.push(FrequentItemset {
            items: items.to_vec(),
            support: tids.count_ones(),
        })
    });
    out
}

/// Number of frequent itemsets contained in each report's row, indexed like
/// `reports`.
pub fn itemset_counts(reports: &[Report], config: &DetectorConfig) -> Vec<u64> {
    let rows: Vec<&BitRow> = reports.iter().map(|r| &r.bits).collect();
    let universe = rows.first().map_or(0, |r| r.len());
    let mut counts = vec![0u64; rows.len()];
    apriori(&rows, universe, config.min_support, config.max_itemset_size, |_, tids| {
        for t in tids.iter_ones() {
            counts[t] += 1;
        }
    });
    counts
}

/// Rows containing more than `threshold` frequent itemsets.
pub fn flag_by_counts(reports: &[Report], counts: &[u64], threshold: usize) -> BTreeSet<NodeId> {
    reports
        .iter()
        .zip(counts)
        .filter(|(_, &c)| c > threshold as u64)
        .map(|(r, _)| r.node)
        .collect()
}

/// Detect1: flag rows rich in frequent itemsets and rebuild them from what
/// everyone else claims about them.
pub fn detect_by_itemsets(reports: &[Report], config: &DetectorConfig) -> Detection {
    let counts = itemset_counts(reports, config);
    let flagged = flag_by_counts(reports, &counts, config.itemset_threshold);
    let cleaned = reconstruct_flagged(reports, &flagged);
    Detection { flagged, cleaned }
}

fn position_of(reports: &[Report]) -> Vec<Option<usize>> {
    let n = reports.first().map_or(0, |r| r.bits.len());
    let mut pos = vec![None; n.max(reports.len())];
    for (k, r) in reports.iter().enumerate() {
        if let Some(slot) = pos.get_mut(r.node) {
            *slot = Some(k);
        }
    }
    pos
}

/// Replace each flagged row with the bits unflagged nodes report toward it.
/// Claims between two flagged nodes are dropped.
pub fn reconstruct_flagged(reports: &[Report], flagged: &BTreeSet<NodeId>) -> Vec<Report> {
    let mut cleaned = reports.to_vec();
    let pos = position_of(reports);
    for &u in flagged {
        let Some(k) = pos.get(u).copied().flatten() else { continue };
        let mut row = BitRow::new(reports[k].bits.len());
        for r in reports {
            if !flagged.contains(&r.node) && r.node < row.len() && r.bits.get(u) {
                row.set(r.node);
            }
        }
        cleaned[k].bits = row;
    }
    cleaned
}

/// Empty each flagged row and clear the flagged column in every other row.
pub fn remove_flagged(reports: &[Report], flagged: &BTreeSet<NodeId>) -> Vec<Report> {
    let n = reports.first().map_or(0, |r| r.bits.len());
    let mut mask = BitRow::new(n);
    for &u in flagged {
        if u < n {
            mask.set(u);
        }
    }
    let keep = mask.complement();
    reports
        .iter()
        .map(|r| {
            let mut r = r.clone();
            if flagged.contains(&r.node) {
                r.bits = BitRow::new(n);
            } else {
                r.bits.and_assign(&keep);
            }
            r
        })
        .collect()
}

/// Degree estimate from a node's own reported row.
pub fn row_degree_estimate(report: &Report, p: f64) -> f64 {
    let n = report.bits.len() as f64;
    (report.bits.count_ones() as f64 - (n - 1.0) * (1.0 - p)) / (2.0 * p - 1.0)
}

/// `max d^ + 3 sqrt(2) b` where `b = 2 / epsilon2`.
pub fn degree_gap_threshold(reports: &[Report], p: f64, epsilon2: f64) -> f64 {
    let max_est = reports
        .iter()
        .map(|r| row_degree_estimate(r, p))
        .fold(f64::NEG_INFINITY, f64::max);
    let sigma = std::f64::consts::SQRT_2 * DEFAULT_DEGREE_SENSITIVITY / epsilon2;
    max_est + 3.0 * sigma
}

/// Nodes whose claimed degree differs from their row estimate by more than
/// `threshold`.
pub fn flag_by_degree_gap(reports: &[Report], p: f64, threshold: f64) -> BTreeSet<NodeId> {
    reports
        .iter()
        .filter(|r| (r.degree - row_degree_estimate(r, p)).abs() > threshold)
        .map(|r| r.node)
        .collect()
}

/// Detect2 with the default threshold.
pub fn detect_by_degree_gap(reports: &[Report], p: f64, epsilon2: f64) -> Result<Detection> {
    if !(p > 0.5 && p <= 1.0) {
        return Err(Error::SingularCalibration { p });
    }
    if !(epsilon2 > 0.0) {
        return Err(Error::domain("degree-gap detection needs epsilon2 > 0"));
    }
    let threshold = degree_gap_threshold(reports, p, epsilon2);
    Ok(detect_by_degree_gap_with(reports, p, threshold))
}

pub fn detect_by_degree_gap_with(reports: &[Report], p: f64, threshold: f64) -> Detection {
    let flagged = flag_by_degree_gap(reports, p, threshold);
    let cleaned = remove_flagged(reports, &flagged);
    Detection { flagged, cleaned }
}

/// Rank by row-based degree estimate, ties broken by node id, and flag
/// `ceil(fraction N)` from the top and, for Naive2, the bottom as well.
pub fn detect_naive(reports: &[Report], p: f64, fraction: f64, both_extremes: bool) -> Result<Detection> {
    if !(fraction > 0.0 && fraction < 0.5) {
        return Err(Error::domain(format!("fraction must lie in (0, 0.5), got {fraction}")));
    }
    let mut ranked: Vec<(f64, NodeId)> = reports.iter().map(|r| (row_degree_estimate(r, p), r.node)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let k = ((fraction * reports.len() as f64) - 1e-9).ceil().max(0.0) as usize;
    let mut flagged: BTreeSet<NodeId> = ranked.iter().take(k).map(|&(_, u)| u).collect();
    if both_extremes {
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        flagged.extend(ranked.iter().take(k).map(|&(_, u)| u));
    }
    let cleaned = remove_flagged(reports, &flagged);
    Ok(Detection { flagged, cleaned })
}

/// Per-node CSV with columns `node,flagged,is_fake`.
pub fn write_detection_csv<W: std::io::Write>(
    out: W,
    reports: &[Report],
    flagged: &BTreeSet<NodeId>,
    fakes: &BTreeSet<NodeId>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "flagged", "is_fake"])?;
    for r in reports {
        w.write_record([
            r.node.to_string(),
            flagged.contains(&r.node).to_string(),
            fakes.contains(&r.node).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Run one defense over the attack-run reports.
pub fn apply_defense(
    kind: DefenseKind,
    reports: &[Report],
    p: f64,
    epsilon2: f64,
    config: &DetectorConfig,
) -> Result<Detection> {
    match kind {
        DefenseKind::None => Ok(Detection {
            flagged: BTreeSet::new(),
            cleaned: reports.to_vec(),
        }),
        DefenseKind::Detect1 => Ok(detect_by_itemsets(reports, config)),
        DefenseKind::Detect2 => match config.degree_gap_threshold {
            Some(t) => Ok(detect_by_degree_gap_with(reports, p, t)),
            None => detect_by_degree_gap(reports, p, epsilon2),
        },
        DefenseKind::Naive1 => detect_naive(reports, p, config.naive_fraction, false),
        DefenseKind::Naive2 => detect_naive(reports, p, config.naive_fraction, true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(node: usize, n: usize, ones: &[usize], degree: f64) -> Report {
        Report {
            node,
            bits: BitRow::from_indices(n, ones.iter().copied()),
            degree,
        }
    }

    #[test]
    fn apriori_small_example() {
        let n = 6;
        let reports = vec![
            report(0, n, &[1, 2, 3], 0.0),
            report(1, n, &[1, 2, 3], 0.0),
            report(2, n, &[1, 2], 0.0),
            report(3, n, &[2, 3], 0.0),
            report(4, n, &[4], 0.0),
            report(5, n, &[], 0.0),
        ];
        let sets = mine_frequent_itemsets(&reports, 2, 3);
        let got: Vec<(Vec<usize>, usize)> = sets.into_iter().map(|s| (s.items, s.support)).collect();
        assert_eq!(
            got,
            vec![(vec![1, 2], 3), (vec![1, 3], 2), (vec![2, 3], 3), (vec![1, 2, 3], 2)]
        );
        let cfg = DetectorConfig {
            min_support: 2,
            max_itemset_size: 3,
            itemset_threshold: 3,
            degree_gap_threshold: None,
            naive_fraction: 0.0,
        };
        assert_eq!(itemset_counts(&reports, &cfg), vec![4, 4, 1, 1, 0, 0]);
        assert_eq!(detect_by_itemsets(&reports, &cfg).flagged, BTreeSet::from([0, 1]));
    }

    #[test]
    fn empty_input_yields_nothing() {
        assert!(mine_frequent_itemsets(&[], 1, 3).is_empty());
        assert!(itemset_counts(&[], &DetectorConfig::for_population(0)).is_empty());
    }

    #[test]
    fn reconstruction_uses_unflagged_claims() {
        let n = 4;
        let reports = vec![
            report(0, n, &[1, 3], 0.0),
            report(1, n, &[0], 0.0),
            report(2, n, &[3], 0.0),
            report(3, n, &[0, 1, 2], 0.0),
        ];
        let flagged = BTreeSet::from([0, 3]);
        let cleaned = reconstruct_flagged(&reports, &flagged);
        assert_eq!(cleaned[0].bits.iter_ones().collect::<Vec<_>>(), vec![1]);
        assert_eq!(cleaned[3].bits.iter_ones().collect::<Vec<_>>(), vec![2]);
        assert_eq!(cleaned[1], reports[1]);
    }

    #[test]
    fn degree_gap_threshold_example() {
        let n = 101;
        let mut reports: Vec<Report> = (0..n).map(|i| report(i, n, &[], 0.0)).collect();
        reports[0] = report(0, n, &(1..51).collect::<Vec<_>>(), 50.0);
        let t = degree_gap_threshold(&reports, 1.0, 2.0);
        assert!((t - 54.242_640_687_119_285).abs() < 1e-12, "{t}");
    }

    #[test]
    fn degree_gap_flags_inconsistent_claims() {
        let n = 10;
        let mut reports: Vec<Report> = (0..n).map(|i| report(i, n, &[], 0.0)).collect();
        reports[9] = report(9, n, &[1], 500.0);
        let det = detect_by_degree_gap(&reports, 1.0, 2.0).unwrap();
        assert_eq!(det.flagged, BTreeSet::from([9]));
        assert_eq!(det.cleaned[9].bits.count_ones(), 0);
        assert!(detect_by_degree_gap(&reports, 0.5, 2.0).is_err());
    }

    #[test]
    fn naive_ranks_and_breaks_ties_by_id() {
        let n = 10;
        let reports: Vec<Report> = (0..n)
            .map(|i| report(i, n, &(0..(i % 5)).filter(|&j| j != i).collect::<Vec<_>>(), 0.0))
            .collect();
        assert!(detect_naive(&reports, 1.0, 0.5, false).is_err());
        let top = detect_naive(&reports, 1.0, 0.1, false).unwrap();
        assert_eq!(top.flagged, BTreeSet::from([4]));
        let both = detect_naive(&reports, 1.0, 0.1, true).unwrap();
        assert_eq!(both.flagged, BTreeSet::from([0, 4]));
        for r in &both.cleaned {
            assert!(!r.bits.get(0) && !r.bits.get(4));
        }
    }

    #[test]
    fn noise_floor_tracks_density() {
        let n = 100;
        let reports: Vec<Report> = (0..n)
            .map(|i| report(i, n, &(0..n).filter(|&j| j != i && (i + j) % 2 == 0).collect::<Vec<_>>(), 0.0))
            .collect();
        let floor = noise_support_floor(&reports);
        assert_eq!(floor, 55);
        assert_eq!(DetectorConfig::for_reports(&reports).min_support, floor);
        assert_eq!(DetectorConfig::for_population(4241).min_support, 43);
    }

    #[test]
    fn detection_csv() {
        let n = 3;
        let reports: Vec<Report> = (0..n).map(|i| report(i, n, &[], 0.0)).collect();
        let mut buf = Vec::new();
        write_detection_csv(&mut buf, &reports, &BTreeSet::from([2]), &BTreeSet::from([1, 2])).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "node,flagged,is_fake\n0,false,false\n1,false,true\n2,true,true\n"
        );
    }

    #[test]
    fn quality_edge_cases() {
        let q = evaluate_detection(&BTreeSet::new(), &BTreeSet::from([1]));
        assert_eq!((q.precision, q.recall), (1.0, 0.0));
        let q = evaluate_detection(&BTreeSet::from([1, 2]), &BTreeSet::from([2, 3]));
        assert_eq!((q.precision, q.recall), (0.5, 0.5));
    }

    #[test]
    fn parse_defense_names() {
        for d in DefenseKind::ALL {
            assert_eq!(d.to_string().parse::<DefenseKind>().unwrap(), d);
        }
    }
}
