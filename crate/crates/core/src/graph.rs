//! Undirected graphs, edge-list ingestion and exact (non-private) metrics.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::error::{Error, Result};

/// Dense node index in `0..N`.
pub type NodeId = usize;

/// Simple undirected graph stored as symmetric packed adjacency rows.
///
/// Rows are symmetric with a zero diagonal and `degrees[i]` is the
/// population count of row `i`. The graph is immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<BitRow>,
    degrees: Vec<usize>,
    labels: Vec<u128>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub num_nodes: usize,
    pub edge_count: usize,
    pub avg_degree: f64,
    pub edge_density: f64,
}

#[derive(Clone, Debug)]
pub struct EdgeListOptions {
    /// Lines starting with this prefix are skipped.
    pub comment_prefix: String,
    /// Reject label `0` when the file is one-indexed.
    pub one_indexed: bool,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            comment_prefix: "#".to_string(),
            one_indexed: false,
        }
    }
}

impl Graph {
    /// Build from an edge iterator. Self-loops and duplicates are ignored.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut adjacency = vec![BitRow::new(n); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u == v {
                continue;
            }
            adjacency[u].set(v);
            adjacency[v].set(u);
        }
        Self::from_rows_unchecked(adjacency, (0..n as u128).collect())
    }

    /// Build from symmetric rows. Fails if rows are ragged, asymmetric or
    /// carry self-loops.
    pub fn from_rows(rows: Vec<BitRow>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!("row {i} has length {} != {n}", row.len())));
            }
            if row.get(i) {
                return Err(Error::Shape(format!("row {i} has a self-loop")));
            }
            if let Some(j) = row.iter_ones().find(|&j| !rows[j].get(i)) {
                return Err(Error::Shape(format!("bit ({i},{j}) is not symmetric")));
            }
        }
        Ok(Self::from_rows_unchecked(rows, (0..n as u128).collect()))
    }

    fn from_rows_unchecked(adjacency: Vec<BitRow>, labels: Vec<u128>) -> Self {
        let degrees = adjacency.iter().map(BitRow::count_ones).collect();
        Graph {
            adjacency,
            degrees,
            labels,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self, i: NodeId) -> usize {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn row(&self, i: NodeId) -> &BitRow {
        &self.adjacency[i]
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.adjacency
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].get(v)
    }

    pub fn neighbors(&self, i: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency[i].iter_ones()
    }

    pub fn edge_count(&self) -> usize {
        self.degrees.iter().sum::<usize>() / 2
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.num_nodes()).flat_map(move |u| {
            self.adjacency[u].iter_ones().filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    /// Original label of each dense index (identity for generated graphs).
    pub fn labels(&self) -> &[u128] {
        &self.labels
    }

    /// Copy with `extra` appended nodes and additional edges touching them.
    pub fn augmented(&self, extra: usize, new_edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Graph {
        let n = self.num_nodes() + extra;
        let mut rows: Vec<BitRow> = self
            .adjacency
            .iter()
            .map(|r| {
                let mut grown = BitRow::new(n);
                for j in r.iter_ones() {
                    grown.set(j);
                }
                grown
            })
            .collect();
        rows.resize(n, BitRow::new(n));
        for (u, v) in new_edges {
            if u != v {
                rows[u].set(v);
                rows[v].set(u);
            }
        }
        let mut labels = self.labels.clone();
        let next = labels.iter().copied().max().map_or(0, |m| m + 1);
        labels.extend((0..extra as u128).map(|k| next + k));
        Self::from_rows_unchecked(rows, labels)
    }

    /// Subgraph induced by the first `n` nodes.
    pub fn prefix(&self, n: usize) -> Graph {
        let n = n.min(self.num_nodes());
        let rows = self.adjacency[..n]
            .iter()
            .map(|r| BitRow::from_indices(n, r.iter_ones().take_while(|&j| j < n)))
            .collect();
        Self::from_rows_unchecked(rows, self.labels[..n].to_vec())
    }
}

/// Parse a whitespace-separated edge list.
///
/// Labels are remapped to dense indices in order of first appearance;
/// duplicate edges collapse and self-loops are dropped.
pub fn load_edge_list<R: BufRead>(source: R, options: &EdgeListOptions) -> Result<Graph> {
    let mut index: HashMap<u128, NodeId> = HashMap::new();
    let mut labels: Vec<u128> = Vec::new();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();

    for (lineno, line) in source.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty()
            || (!options.comment_prefix.is_empty() && trimmed.starts_with(&options.comment_prefix))
        {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut endpoint = || -> Result<NodeId> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno,
                msg: "expected two node labels".into(),
            })?;
            let label: u128 = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("invalid node label `{tok}`"),
            })?;
            if options.one_indexed && label == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "label 0 in a one-indexed edge list".into(),
                });
            }
            Ok(*index.entry(label).or_insert_with(|| {
                labels.push(label);
                labels.len() - 1
            }))
        };
        let u = endpoint()?;
        let v = endpoint()?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("unexpected token `{extra}`"),
            });
        }
        edges.push((u, v));
    }

    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = labels.len();
    let mut g = Graph::from_edges(n, edges);
    g.labels = labels;
    Ok(g)
}

/// Load an edge list from disk; `.gz` files are decompressed transparently.
pub fn load_edge_list_path(path: &Path, options: &EdgeListOptions) -> Result<Graph> {
    let file = File::open(path)?;
    let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
        Box::new(GzDecoder::new(file))
    } else {
        Box::new(file)
    };
    load_edge_list(BufReader::new(reader), options)
}

/// `d_i / (N - 1)`.
pub fn degree_centrality(g: &Graph, i: NodeId) -> Result<f64> {
    let n = g.num_nodes();
    if n < 2 {
        return Err(Error::domain("degree centrality needs at least two nodes"));
    }
    Ok(g.degree(i) as f64 / (n - 1) as f64)
}

/// Number of triangles through `i`.
pub fn triangle_count(g: &Graph, i: NodeId) -> u64 {
    triangles_in_rows(g.rows(), i)
}

pub(crate) fn triangles_in_rows(rows: &[BitRow], i: NodeId) -> u64 {
    let row = &rows[i];
    let twice: usize = row.iter_ones().map(|j| row.and_count(&rows[j])).sum();
    (twice / 2) as u64
}

/// `2 tau_i / (d_i (d_i - 1))`, or 0 when `d_i < 2`.
pub fn local_clustering_coefficient(g: &Graph, i: NodeId) -> f64 {
    let d = g.degree(i);
    if d < 2 {
        return 0.0;
    }
    2.0 * triangle_count(g, i) as f64 / (d * (d - 1)) as f64
}

pub fn graph_stats(g: &Graph) -> Result<GraphStats> {
    let n = g.num_nodes();
    if n < 2 {
        return Err(Error::domain("graph statistics need at least two nodes"));
    }
    let e = g.edge_count();
    Ok(GraphStats {
        num_nodes: n,
        edge_count: e,
        avg_degree: 2.0 * e as f64 / n as f64,
        edge_density: 2.0 * e as f64 / (n as f64 * (n - 1) as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Graph> {
        load_edge_list(text.as_bytes(), &EdgeListOptions::default())
    }

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|l| (0, l)))
    }

    /// a=0, b=1, c=2, d=3: cycle a-b-c-d-a plus chord a-c.
    fn chorded_cycle() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    }

    #[test]
    fn loads_simple_path() {
        let g = parse("0 1\n1 2\n").unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn dedups_and_drops_self_loops() {
        let g = parse("# c\n5 7\n7 5\n5 5\n").unwrap();
        assert_eq!(g.num_nodes(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.labels(), &[5, 7]);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match parse("0 1\n\n1 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("0 1 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse(""), Err(Error::EmptyInput)));
        assert!(matches!(parse("# only comments\n"), Err(Error::EmptyInput)));
    }

    #[test]
    fn one_indexed_rejects_zero() {
        let opts = EdgeListOptions {
            one_indexed: true,
            ..Default::default()
        };
        assert!(load_edge_list("0 1\n".as_bytes(), &opts).is_err());
        assert_eq!(load_edge_list("1 2\n".as_bytes(), &opts).unwrap().num_nodes(), 2);
    }

    #[test]
    fn large_labels_are_accepted() {
        let g = parse("116374117927631468606 112188647432305746617\n").unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn degree_centrality_examples() {
        let k3 = complete(3);
        for i in 0..3 {
            assert_eq!(degree_centrality(&k3, i).unwrap(), 1.0);
        }
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]);
        assert_eq!(degree_centrality(&path, 0).unwrap(), 0.5);
        assert!(degree_centrality(&Graph::from_edges(1, []), 0).is_err());
    }

    #[test]
    fn triangle_examples() {
        assert_eq!(triangle_count(&complete(3), 0), 1);
        assert_eq!(triangle_count(&star(5), 0), 0);
        assert_eq!(triangle_count(&chorded_cycle(), 0), 2);
    }

    #[test]
    fn clustering_examples() {
        let k4 = complete(4);
        for i in 0..4 {
            assert_eq!(local_clustering_coefficient(&k4, i), 1.0);
        }
        assert_eq!(local_clustering_coefficient(&star(5), 0), 0.0);
        assert_eq!(local_clustering_coefficient(&star(5), 1), 0.0);
        assert!((local_clustering_coefficient(&chorded_cycle(), 0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn stats_examples() {
        let s = graph_stats(&complete(3)).unwrap();
        assert_eq!(s.edge_density, 1.0);
        assert_eq!(s.avg_degree, 2.0);
        let empty = graph_stats(&Graph::from_edges(10, [])).unwrap();
        assert_eq!(empty.edge_density, 0.0);
        assert_eq!(empty.avg_degree, 0.0);
    }

    #[test]
    fn from_rows_validates() {
        let mut rows = vec![BitRow::new(3); 3];
        rows[0].set(1);
        assert!(Graph::from_rows(rows.clone()).is_err());
        rows[1].set(0);
        assert!(Graph::from_rows(rows.clone()).is_ok());
        rows[2].set(2);
        assert!(Graph::from_rows(rows).is_err());
    }

    #[test]
    fn augment_and_prefix_round_trip() {
        let g = chorded_cycle();
        let a = g.augmented(2, [(4, 0), (5, 4)]);
        assert_eq!(a.num_nodes(), 6);
        assert_eq!(a.degree(0), 4);
        assert_eq!(a.degree(4), 2);
        assert_eq!(a.prefix(4), g);
    }
}
