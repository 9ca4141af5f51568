//! Directed interference graphs and edge-list ingestion.
//!
//! Nodes are dense zero-based ids. Files may label nodes arbitrarily (the
//! socfb datasets are one-based); ingestion remaps labels to dense ids in
//! sorted label order and keeps the original labels for reporting.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense zero-based node identifier.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A directed graph with dense node ids and a canonical (sorted) edge order.
///
/// Immutable after construction; all queries take `&self` and the structure
/// is safe to share across simulation workers.
#[derive(Clone, Debug)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    allow_self_loops: bool,
    /// Original input label per node id (identity for programmatic graphs).
    labels: Vec<u64>,
    fingerprint: u64,
}

/// Degree summary of a graph.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub directed_edges: usize,
    /// Number of unordered node pairs connected in either direction.
    pub undirected_edges: usize,
    /// Mean over nodes of `|upstream(i) ∪ downstream(i)|`.
    pub avg_total_degree: f64,
    pub avg_in_degree: f64,
    pub avg_out_degree: f64,
}

/// Options for [`parse_edge_list`].
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ParseOptions {
    /// Declares the file one-based; a zero label becomes a parse error.
    /// Ids are densely remapped either way.
    pub one_based: bool,
    /// Emit both directions for every input edge.
    pub symmetrize: bool,
    /// Skip the first non-comment line (Matrix Market size header).
    pub skip_header: bool,
    /// Accept self-loop edges instead of rejecting the file.
    pub allow_self_loops: bool,
}

/// A parsed graph plus ingestion diagnostics.
#[derive(Debug)]
pub struct ParseReport {
    pub graph: DirectedGraph,
    /// Directed edges dropped by deduplication (after symmetrization).
    pub duplicate_edges: usize,
    pub lines_read: usize,
}

impl DirectedGraph {
    /// Builds a graph from `(src, dst)` pairs with identity labels.
    ///
    /// Duplicate edges are deduplicated; endpoints must lie in `[0, n)`.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
        allow_self_loops: bool,
    ) -> Result<Self> {
        let mut pairs: Vec<(u32, u32)> = edges.into_iter().collect();
        let self_loops = pairs.iter().filter(|(i, j)| i == j).count();
        if self_loops > 0 && !allow_self_loops {
            return Err(Error::SelfLoopsRejected { count: self_loops });
        }
        for &(i, j) in &pairs {
            if i as usize >= n || j as usize >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_canonical(
            n,
            pairs,
            allow_self_loops,
            (0..n as u64).collect(),
        ))
    }

    /// Rejecting variant of [`DirectedGraph::new`] for the common case.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        Self::new(n, edges, false)
    }

    fn from_canonical(
        n: usize,
        pairs: Vec<(u32, u32)>,
        allow_self_loops: bool,
        labels: Vec<u64>,
    ) -> Self {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(i, j) in &pairs {
            out_adj[i as usize].push(NodeId(j));
            in_adj[j as usize].push(NodeId(i));
        }
        for l in in_adj.iter_mut() {
            l.sort_unstable();
        }
        // out_adj is already sorted because pairs are.
        let edges: Vec<(NodeId, NodeId)> =
            pairs.into_iter().map(|(i, j)| (NodeId(i), NodeId(j))).collect();
        let mut h = Fnv1a::new();
        h.write_u64(n as u64);
        for &(i, j) in &edges {
            h.write_u64(i.0 as u64);
            h.write_u64(j.0 as u64);
        }
        Self {
            n,
            edges,
            out_adj,
            in_adj,
            allow_self_loops,
            labels,
            fingerprint: h.finish(),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical (sorted) order. Coefficient vectors are parallel to
    /// this slice.
    #[inline]
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    #[inline]
    pub fn allow_self_loops(&self) -> bool {
        self.allow_self_loops
    }

    /// Position of `(src, dst)` in canonical edge order, if it is an edge.
    pub fn edge_index(&self, src: NodeId, dst: NodeId) -> Option<usize> {
        self.edges.binary_search(&(src, dst)).ok()
    }

    fn check_node(&self, j: NodeId) -> Result<()> {
        if j.index() >= self.n {
            return Err(Error::InvalidArgument(format!(
                "node {j} out of range for n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Nodes with an edge into `j`.
    pub fn upstream(&self, j: NodeId) -> Result<&[NodeId]> {
        self.check_node(j)?;
        Ok(&self.in_adj[j.index()])
    }

    /// Nodes that `j` has an edge into.
    pub fn downstream(&self, j: NodeId) -> Result<&[NodeId]> {
        self.check_node(j)?;
        Ok(&self.out_adj[j.index()])
    }

    /// Number of distinct neighbors of `i` in either direction.
    pub fn total_degree(&self, i: NodeId) -> usize {
        merged_len(&self.in_adj[i.index()], &self.out_adj[i.index()])
    }

    pub fn stats(&self) -> GraphStats {
        let mut union_total = 0usize;
        for i in 0..self.n {
            union_total += merged_len(&self.in_adj[i], &self.out_adj[i]);
        }
        let mut undirected = 0usize;
        for &(i, j) in &self.edges {
            if i <= j || self.edge_index(j, i).is_none() {
                undirected += 1;
            }
        }
        let n = self.n.max(1) as f64;
        GraphStats {
            n: self.n,
            directed_edges: self.edges.len(),
            undirected_edges: undirected,
            avg_total_degree: union_total as f64 / n,
            avg_in_degree: self.edges.len() as f64 / n,
            avg_out_degree: self.edges.len() as f64 / n,
        }
    }

    /// Original input label of a node.
    pub fn label_of(&self, i: NodeId) -> u64 {
        self.labels[i.index()]
    }

    /// Edge set expressed in original input labels.
    pub fn edges_by_label(&self) -> Vec<(u64, u64)> {
        self.edges
            .iter()
            .map(|&(i, j)| (self.labels[i.index()], self.labels[j.index()]))
            .collect()
    }

    /// Serializes to edge-list text using original labels, one edge per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.edges_by_label() {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        f.write_all(self.to_edge_list().as_bytes())?;
        Ok(())
    }

    /// Structural fingerprint (FNV-1a over `n` and the edge list, cached at
    /// construction) used to bind parameter sets to the graph they were
    /// generated for and to stamp run manifests.
    #[inline]
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
}

fn merged_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut ia, mut ib, mut count) = (0, 0, 0);
    while ia < a.len() && ib < b.len() {
        count += 1;
        match a[ia].cmp(&b[ib]) {
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
            std::cmp::Ordering::Equal => {
                ia += 1;
                ib += 1;
            }
        }
    }
    count + (a.len() - ia) + (b.len() - ib)
}

/// 64-bit FNV-1a, used for structural fingerprints.
pub(crate) struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn write_u64(&mut self, x: u64) {
        self.write_bytes(&x.to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

/// Parses whitespace-separated edge-list text.
///
/// Lines starting with `%` or `#` are comments; blank lines are skipped;
/// extra tokens after the first two (Matrix Market weights, timestamps) are
/// ignored. Node labels are remapped to dense zero-based ids in sorted label
/// order.
pub fn parse_edge_list<R: BufRead>(reader: R, options: &ParseOptions) -> Result<ParseReport> {
    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut self_loops = 0usize;
    let mut header_skipped = false;
    let mut lines_read = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        lines_read = lineno;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
            continue;
        }
        if options.skip_header && !header_skipped {
            header_skipped = true;
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let a = parse_label(tokens.next(), lineno, options.one_based)?;
        let b = parse_label(tokens.next(), lineno, options.one_based)?;
        if a == b {
            self_loops += 1;
        }
        raw.push((a, b));
    }

    if self_loops > 0 && !options.allow_self_loops {
        return Err(Error::SelfLoopsRejected { count: self_loops });
    }

    let mut labels: Vec<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
    labels.sort_unstable();
    labels.dedup();
    let id_of = |label: u64| labels.binary_search(&label).expect("label collected") as u32;

    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(if options.symmetrize {
        raw.len() * 2
    } else {
        raw.len()
    });
    for &(a, b) in &raw {
        let (i, j) = (id_of(a), id_of(b));
        pairs.push((i, j));
        if options.symmetrize && i != j {
            pairs.push((j, i));
        }
    }
    let expanded = pairs.len();
    pairs.sort_unstable();
    pairs.dedup();
    let duplicate_edges = expanded - pairs.len();

    let graph =
        DirectedGraph::from_canonical(labels.len(), pairs, options.allow_self_loops, labels);
    Ok(ParseReport {
        graph,
        duplicate_edges,
        lines_read,
    })
}

fn parse_label(token: Option<&str>, lineno: usize, one_based: bool) -> Result<u64> {
    let token = token.ok_or_else(|| Error::Parse {
        line: lineno,
        msg: "expected two integer tokens".into(),
    })?;
    let value: u64 = token.parse().map_err(|_| Error::Parse {
        line: lineno,
        msg: format!("not an integer node label: {token:?}"),
    })?;
    if one_based && value == 0 {
        return Err(Error::Parse {
            line: lineno,
            msg: "label 0 in a file declared one-based".into(),
        });
    }
    Ok(value)
}

/// Reads and parses an edge-list file.
pub fn read_edge_list_file(path: &Path, options: &ParseOptions) -> Result<ParseReport> {
    let file = File::open(path)?;
    parse_edge_list(BufReader::new(file), options)
}
