//! User-side collection: budget split, randomized response on adjacency
//! bits, Laplace noise on degrees, and report (de)serialization.

use std::fmt;
use std::io::{self, Read, Write};
use std::str::FromStr;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::{open_unit_f64, unit_f64, Purpose, Seed};

/// Default L1 sensitivity of a node's degree used for the Laplace scale.
pub const DEFAULT_DEGREE_SENSITIVITY: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrivacyParams {
    pub epsilon: f64,
    pub alpha: f64,
    /// Budget spent on the adjacency bit vector.
    pub epsilon1: f64,
    /// Budget spent on the degree.
    pub epsilon2: f64,
    /// Probability of keeping each bit.
    pub p: f64,
    /// Laplace scale `sensitivity / epsilon2`.
    pub laplace_scale: f64,
}

impl PrivacyParams {
    /// Recompute the Laplace scale with a different degree sensitivity.
    pub fn with_degree_sensitivity(mut self, sensitivity: f64) -> Self {
        self.laplace_scale = sensitivity / self.epsilon2;
        self
    }

    /// Standard deviation of the degree noise, `sqrt(2) * b`.
    pub fn degree_noise_std(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.laplace_scale
    }
}

/// Split `epsilon` into `alpha * epsilon` for bits and the rest for degrees.
///
/// `epsilon = f64::INFINITY` yields a noiseless protocol (`p = 1`, `b = 0`).
pub fn split_budget(epsilon: f64, alpha: f64) -> Result<PrivacyParams> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::domain(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let epsilon1 = alpha * epsilon;
    let epsilon2 = (1.0 - alpha) * epsilon;
    Ok(PrivacyParams {
        epsilon,
        alpha,
        epsilon1,
        epsilon2,
        p: perturbation_probability(epsilon1),
        laplace_scale: DEFAULT_DEGREE_SENSITIVITY / epsilon2,
    })
}

/// Keep probability `e^eps1 / (1 + e^eps1)` of binary randomized response.
pub fn perturbation_probability(epsilon1: f64) -> f64 {
    1.0 / (1.0 + (-epsilon1).exp())
}

/// How the two endpoints' reports of the same potential edge relate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollectionMode {
    /// One keep/flip trial per unordered pair, shared by both rows.
    #[default]
    SynchronizedPair,
    /// Every directed bit is perturbed independently.
    DualReportOr,
}

impl fmt::Display for CollectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollectionMode::SynchronizedPair => "synchronized-pair",
            CollectionMode::DualReportOr => "dual-report-or",
        })
    }
}

impl FromStr for CollectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "synchronized-pair" | "sync" => Ok(CollectionMode::SynchronizedPair),
            "dual-report-or" | "dual" => Ok(CollectionMode::DualReportOr),
            other => Err(Error::Config(format!("unknown collection mode `{other}`"))),
        }
    }
}

/// One user's submission.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub node: NodeId,
    pub bits: BitRow,
    pub degree: f64,
}

fn check_keep_probability(p: f64) -> Result<()> {
    if p > 0.5 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::SingularCalibration { p })
    }
}

/// Whether the protocol keeps bit `(i, j)` unchanged.
///
/// In synchronized-pair mode the coin is shared by `(i, j)` and `(j, i)`.
pub fn keep_coin(seed: Seed, mode: CollectionMode, i: NodeId, j: NodeId, p: f64) -> bool {
    let word = match mode {
        CollectionMode::SynchronizedPair => {
            let (lo, hi) = (i.min(j), i.max(j));
            seed.word_at(Purpose::PairCoin, lo as u64, (hi - lo - 1) as u64)
        }
        CollectionMode::DualReportOr => seed.word_at(Purpose::DirectedCoin, i as u64, j as u64),
    };
    unit_f64(word) < p
}

/// Randomized response over the whole adjacency matrix.
///
/// Output is a pure function of `(graph, p, mode, seed)`; rows may be
/// produced on any number of threads.
pub fn perturb_adjacency(g: &Graph, p: f64, mode: CollectionMode, seed: Seed) -> Result<Vec<BitRow>> {
    check_keep_probability(p)?;
    let n = g.num_nodes();
    match mode {
        CollectionMode::SynchronizedPair => {
            let upper: Vec<Vec<NodeId>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let row = g.row(i);
                    let mut rng = seed.stream(Purpose::PairCoin, i as u64);
                    (i + 1..n)
                        .filter(|&j| {
                            let keep = unit_f64(rng.next_u64()) < p;
                            row.get(j) == keep
                        })
                        .collect()
                })
                .collect();
            let mut rows = vec![BitRow::new(n); n];
            for (i, ones) in upper.into_iter().enumerate() {
                for j in ones {
                    rows[i].set(j);
                    rows[j].set(i);
                }
            }
            Ok(rows)
        }
        CollectionMode::DualReportOr => Ok((0..n)
            .into_par_iter()
            .map(|i| perturb_row_dual(g.row(i), i, p, seed))
            .collect()),
    }
}

fn perturb_row_dual(row: &BitRow, node: NodeId, p: f64, seed: Seed) -> BitRow {
    let n = row.len();
    let mut out = BitRow::new(n);
    let mut rng = seed.stream(Purpose::DirectedCoin, node as u64);
    for j in 0..n {
        let keep = unit_f64(rng.next_u64()) < p;
        if j != node && row.get(j) == keep {
            out.set(j);
        }
    }
    out
}

/// Perturb a single user's row with the protocol's coins.
///
/// For an honest user this reproduces that user's row of
/// [`perturb_adjacency`]; a fake user running the client on a crafted row
/// draws the very same coins.
pub fn perturb_row(row: &BitRow, node: NodeId, p: f64, mode: CollectionMode, seed: Seed) -> Result<BitRow> {
    check_keep_probability(p)?;
    let n = row.len();
    if node >= n {
        return Err(Error::Shape(format!("node {node} outside row of length {n}")));
    }
    Ok(match mode {
        CollectionMode::SynchronizedPair => {
            let mut out = BitRow::new(n);
            for j in 0..node {
                if row.get(j) == keep_coin(seed, mode, j, node, p) {
                    out.set(j);
                }
            }
            let mut rng = seed.stream(Purpose::PairCoin, node as u64);
            for j in node + 1..n {
                let keep = unit_f64(rng.next_u64()) < p;
                if row.get(j) == keep {
                    out.set(j);
                }
            }
            out
        }
        CollectionMode::DualReportOr => perturb_row_dual(row, node, p, seed),
    })
}

/// Zero-mean Laplace draw with scale `b` for `node`'s degree report.
pub fn laplace_noise(scale: f64, seed: Seed, node: NodeId) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    let u = open_unit_f64(seed.stream(Purpose::DegreeNoise, node as u64).next_u64()) - 0.5;
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// `d + Lap(b)` with `b = sensitivity / epsilon2`.
pub fn perturb_degree(d: f64, params: &PrivacyParams, seed: Seed, node: NodeId) -> Result<f64> {
    if !(params.epsilon2 > 0.0) {
        return Err(Error::domain("degree perturbation needs epsilon2 > 0"));
    }
    Ok(d + laplace_noise(params.laplace_scale, seed, node))
}

/// Every node's perturbed report.
pub fn collect_reports(g: &Graph, params: &PrivacyParams, mode: CollectionMode, seed: Seed) -> Result<Vec<Report>> {
    let rows = perturb_adjacency(g, params.p, mode, seed)?;
    rows.into_iter()
        .enumerate()
        .map(|(node, bits)| {
            Ok(Report {
                node,
                degree: perturb_degree(g.degree(node) as f64, params, seed, node)?,
                bits,
            })
        })
        .collect()
}

const MAGIC: &[u8; 4] = b"LDPR";
const FORMAT_VERSION: u32 = 1;

/// Binary layout (little endian): `"LDPR"`, `u32` version, `u64` count, then
/// per report `u64` node, `u64` bit length, the packed `u64` words and an
/// `f64` degree.
pub fn write_reports_binary<W: Write>(mut out: W, reports: &[Report]) -> io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&(reports.len() as u64).to_le_bytes())?;
    for r in reports {
        out.write_all(&(r.node as u64).to_le_bytes())?;
        out.write_all(&(r.bits.len() as u64).to_le_bytes())?;
        for w in r.bits.words() {
            out.write_all(&w.to_le_bytes())?;
        }
        out.write_all(&r.degree.to_le_bytes())?;
    }
    out.flush()
}

pub fn read_reports_binary<R: Read>(mut input: R) -> Result<Vec<Report>> {
    fn u64_from<R: Read>(r: &mut R) -> io::Result<u64> {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)?;
        Ok(u64::from_le_bytes(buf))
    }
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Shape("not a report file".into()));
    }
    let mut version = [0u8; 4];
    input.read_exact(&mut version)?;
    if u32::from_le_bytes(version) != FORMAT_VERSION {
        return Err(Error::Shape("unsupported report format version".into()));
    }
    let count = u64_from(&mut input)? as usize;
    let mut reports = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let node = u64_from(&mut input)? as usize;
        let len = u64_from(&mut input)? as usize;
        let words = (0..len.div_ceil(64))
            .map(|_| u64_from(&mut input))
            .collect::<io::Result<Vec<_>>>()?;
        let bits = BitRow::from_words(len, words)
            .ok_or_else(|| Error::Shape(format!("report {node}: bits set past length {len}")))?;
        let degree = f64::from_bits(u64_from(&mut input)?);
        reports.push(Report { node, bits, degree });
    }
    Ok(reports)
}

/// Debug CSV: `node,degree,neighbors` with neighbors space-separated.
pub fn write_reports_csv<W: Write>(out: W, reports: &[Report]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "degree", "neighbors"])?;
    for r in reports {
        let neighbors: Vec<String> = r.bits.iter_ones().map(|j| j.to_string()).collect();
        w.write_record([r.node.to_string(), r.degree.to_string(), neighbors.join(" ")])?;
    }
    w.flush()?;
    Ok(())
}
