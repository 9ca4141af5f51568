//! Louvain community detection and cluster-overlap statistics.
//!
//! Louvain runs on the symmetrized weighted projection of the directed graph
//! (pair weight = number of directed edges between the pair) and maximizes
//! resolution-parameterized modularity
//!
//! ```text
//! Q = (1/2m) * sum_ij [A_ij - resolution * k_i k_j / (2m)] * 1{c_i = c_j}
//! ```
//!
//! Local moves accept the highest strictly positive modularity gain, ties
//! broken by the lowest candidate cluster id; the node visit order is
//! shuffled once per aggregation level by the seed. Output is deterministic
//! for a fixed seed.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::design::substream;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Fnv1a};
use crate::model::DyadicParams;
use crate::scalar::Scalar;

/// A disjoint partition of the node set into clusters with dense ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    assignment: Vec<u32>,
    k: usize,
}

impl Clustering {
    /// Builds a clustering from arbitrary labels, remapping them to dense ids
    /// in order of first appearance.
    pub fn from_labels(labels: &[u32]) -> Result<Self> {
        let mut remap: Vec<Option<u32>> = Vec::new();
        let mut assignment = Vec::with_capacity(labels.len());
        let mut next = 0u32;
        for &label in labels {
            let idx = label as usize;
            if idx >= remap.len() {
                remap.resize(idx + 1, None);
            }
            let id = *remap[idx].get_or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            assignment.push(id);
        }
        Ok(Self {
            assignment,
            k: next as usize,
        })
    }

    /// Every node in its own cluster.
    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n as u32).collect(),
            k: n,
        }
    }

    /// One cluster holding the whole graph.
    pub fn whole(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
            k: if n == 0 { 0 } else { 1 },
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn cluster_of(&self, node: usize) -> u32 {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &c in &self.assignment {
            sizes[c as usize] += 1;
        }
        sizes
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_u64(self.k as u64);
        for &c in &self.assignment {
            h.write_u64(c as u64);
        }
        h.finish()
    }

    /// Text form: `node cluster` per line.
    pub fn to_file_string(&self) -> String {
        let mut s = String::from("# node cluster\n");
        for (i, &c) in self.assignment.iter().enumerate() {
            writeln!(s, "{i} {c}").unwrap();
        }
        s
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        f.write_all(self.to_file_string().as_bytes())?;
        Ok(())
    }

    /// Parses `node cluster` text covering every node of an `n`-node graph
    /// exactly once. Cluster labels are remapped to dense ids.
    pub fn parse<R: BufRead>(reader: R, n: usize) -> Result<Self> {
        let mut labels: Vec<Option<u32>> = vec![None; n];
        for (lineno, line) in reader.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let mut next_int = |what: &str| -> Result<u32> {
                tokens
                    .next()
                    .ok_or_else(|| Error::Parse {
                        line: lineno,
                        msg: format!("missing {what}"),
                    })?
                    .parse()
                    .map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("{what} is not an integer"),
                    })
            };
            let node = next_int("node id")?;
            let cluster = next_int("cluster id")?;
            if node as usize >= n {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("node {node} out of range for n = {n}"),
                });
            }
            if labels[node as usize].replace(cluster).is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("node {node} assigned twice"),
                });
            }
        }
        let missing = labels.iter().filter(|x| x.is_none()).count();
        if missing > 0 {
            return Err(Error::InvalidArgument(format!(
                "clustering file leaves {missing} node(s) unassigned"
            )));
        }
        let labels: Vec<u32> = labels.into_iter().map(Option::unwrap).collect();
        Self::from_labels(&labels)
    }

    pub fn read_file(path: &Path, n: usize) -> Result<Self> {
        Self::parse(BufReader::new(File::open(path)?), n)
    }
}

/// Node- and edge-level cluster overlap.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OverlapStats {
    /// Mean over non-isolated nodes of the fraction of their distinct
    /// neighbors sharing their cluster.
    pub sigma_bar_node: f64,
    /// Fraction of directed edges whose endpoints share a cluster.
    pub sigma_edge: f64,
    /// `zeta`-weighted edge fraction (`sum zeta_ij 1{same} / sum zeta_ij`);
    /// absent without parameters or when the weights sum to zero.
    pub sigma_edge_zeta: Option<f64>,
}

/// Unweighted overlap statistics.
pub fn overlap_stats(g: &DirectedGraph, clustering: &Clustering) -> Result<OverlapStats> {
    overlap_impl::<f64>(g, clustering, None)
}

/// Overlap statistics with the `zeta`-weighted edge variant.
pub fn overlap_stats_weighted<T: Scalar>(
    g: &DirectedGraph,
    clustering: &Clustering,
    params: &DyadicParams<T>,
) -> Result<OverlapStats> {
    params.bind_check(g)?;
    overlap_impl(g, clustering, Some(params))
}

fn overlap_impl<T: Scalar>(
    g: &DirectedGraph,
    clustering: &Clustering,
    params: Option<&DyadicParams<T>>,
) -> Result<OverlapStats> {
    check_cover(g, clustering)?;
    let c = clustering.assignment();

    let mut ratio_sum = 0.0;
    let mut counted = 0usize;
    for i in 0..g.n() {
        let (mut d_i, mut same) = (0usize, 0usize);
        let up = g.upstream(crate::graph::NodeId(i as u32))?;
        let down = g.downstream(crate::graph::NodeId(i as u32))?;
        // Merge the two sorted neighbor lists, skipping self entries.
        let (mut a, mut b) = (0usize, 0usize);
        while a < up.len() || b < down.len() {
            let next = match (up.get(a), down.get(b)) {
                (Some(x), Some(y)) if x == y => {
                    a += 1;
                    b += 1;
                    x.0
                }
                (Some(x), Some(y)) if x < y => {
                    a += 1;
                    x.0
                }
                (Some(_), Some(y)) => {
                    b += 1;
                    y.0
                }
                (Some(x), None) => {
                    a += 1;
                    x.0
                }
                (None, Some(y)) => {
                    b += 1;
                    y.0
                }
                (None, None) => unreachable!(),
            };
            if next as usize != i {
                d_i += 1;
                if c[next as usize] == c[i] {
                    same += 1;
                }
            }
        }
        if d_i > 0 {
            ratio_sum += same as f64 / d_i as f64;
            counted += 1;
        }
    }
    if counted == 0 {
        return Err(Error::UndefinedOverlap);
    }

    let mut edges_total = 0usize;
    let mut edges_same = 0usize;
    for &(i, j) in g.edges() {
        if i == j {
            continue;
        }
        edges_total += 1;
        if c[i.index()] == c[j.index()] {
            edges_same += 1;
        }
    }
    if edges_total == 0 {
        return Err(Error::UndefinedOverlap);
    }

    let sigma_edge_zeta = params.and_then(|p| {
        let mut num = 0.0;
        let mut den = 0.0;
        for (&(i, j), coeff) in g.edges().iter().zip(p.coeffs()) {
            if i == j {
                continue;
            }
            let zeta = coeff.zeta.as_real();
            den += zeta;
            if c[i.index()] == c[j.index()] {
                num += zeta;
            }
        }
        (den != 0.0).then(|| num / den)
    });

    Ok(OverlapStats {
        sigma_bar_node: ratio_sum / counted as f64,
        sigma_edge: edges_same as f64 / edges_total as f64,
        sigma_edge_zeta,
    })
}

fn check_cover(g: &DirectedGraph, clustering: &Clustering) -> Result<()> {
    if clustering.len() != g.n() {
        return Err(Error::InvalidArgument(format!(
            "clustering covers {} nodes, graph has {}",
            clustering.len(),
            g.n()
        )));
    }
    Ok(())
}

/// Symmetrized weighted projection used by Louvain and modularity.
struct Projection {
    adj: Vec<Vec<(u32, f64)>>,
    loops: Vec<f64>,
    degree: Vec<f64>,
    m2: f64,
}

impl Projection {
    fn from_graph(g: &DirectedGraph) -> Self {
        let n = g.n();
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(g.edge_count());
        for &(i, j) in g.edges() {
            if i == j {
                continue; // graph-level self edges do not shape communities
            }
            pairs.push((i.0.min(j.0), i.0.max(j.0)));
        }
        pairs.sort_unstable();
        let mut adj = vec![Vec::new(); n];
        let mut idx = 0;
        while idx < pairs.len() {
            let (a, b) = pairs[idx];
            let mut w = 1.0;
            while idx + 1 < pairs.len() && pairs[idx + 1] == (a, b) {
                w += 1.0;
                idx += 1;
            }
            adj[a as usize].push((b, w));
            adj[b as usize].push((a, w));
            idx += 1;
        }
        for l in adj.iter_mut() {
            l.sort_unstable_by_key(|&(nb, _)| nb);
        }
        let loops = vec![0.0; n];
        let degree: Vec<f64> = adj
            .iter()
            .map(|l| l.iter().map(|&(_, w)| w).sum::<f64>())
            .collect();
        let m2 = degree.iter().sum();
        Self {
            adj,
            loops,
            degree,
            m2,
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    /// Modularity of an assignment over this projection.
    fn modularity(&self, assignment: &[u32], k: usize, resolution: f64) -> f64 {
        let mut internal = vec![0.0; k];
        let mut total = vec![0.0; k];
        for i in 0..self.n() {
            let c = assignment[i] as usize;
            total[c] += self.degree[i] + 2.0 * self.loops[i];
            internal[c] += 2.0 * self.loops[i];
            for &(j, w) in &self.adj[i] {
                if assignment[j as usize] == assignment[i] {
                    internal[c] += w;
                }
            }
        }
        (0..k)
            .map(|c| internal[c] / self.m2 - resolution * (total[c] / self.m2).powi(2))
            .sum()
    }

    /// Collapses communities into one node each, preserving modularity.
    fn aggregate(&self, assignment: &[u32], k: usize) -> Projection {
        let mut loops = vec![0.0; k];
        let mut cross: Vec<(u32, u32, f64)> = Vec::new();
        for i in 0..self.n() {
            let ci = assignment[i];
            loops[ci as usize] += self.loops[i];
            for &(j, w) in &self.adj[i] {
                if (j as usize) < i {
                    continue; // visit each undirected pair once
                }
                let cj = assignment[j as usize];
                if ci == cj {
                    // An internal pair of weight w carries ordered weight 2w,
                    // which a loop of weight w reproduces.
                    loops[ci as usize] += w;
                } else {
                    cross.push((ci.min(cj), ci.max(cj), w));
                }
            }
        }
        cross.sort_unstable_by_key(|&(a, b, _)| (a, b));
        let mut adj = vec![Vec::new(); k];
        let mut idx = 0;
        while idx < cross.len() {
            let (a, b, mut w) = cross[idx];
            while idx + 1 < cross.len() && (cross[idx + 1].0, cross[idx + 1].1) == (a, b) {
                w += cross[idx + 1].2;
                idx += 1;
            }
            adj[a as usize].push((b, w));
            adj[b as usize].push((a, w));
            idx += 1;
        }
        for l in adj.iter_mut() {
            l.sort_unstable_by_key(|&(nb, _)| nb);
        }
        let degree: Vec<f64> = adj
            .iter()
            .enumerate()
            .map(|(i, l)| l.iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * loops[i])
            .collect();
        let m2 = self.m2;
        Projection {
            adj,
            loops,
            degree,
            m2,
        }
    }
}

/// One round of local moves. Returns the dense community assignment and
/// whether any node moved.
fn one_level(proj: &Projection, resolution: f64, order: &[u32]) -> (Vec<u32>, usize, bool) {
    let n = proj.n();
    let mut communities: Vec<u32> = (0..n as u32).collect();
    let mut comm_degree: Vec<f64> = proj.degree.clone();
    let mut neighbor_w = vec![0.0f64; n];
    let mut active = vec![false; n];
    let mut touched: Vec<u32> = Vec::new();
    let scale = resolution / proj.m2;
    let mut any_moved = false;

    loop {
        let mut moves = 0;
        for &node in order {
            let i = node as usize;
            let cur = communities[i];
            let k_i = proj.degree[i];

            for &(j, w) in &proj.adj[i] {
                let cj = communities[j as usize];
                if !active[cj as usize] {
                    active[cj as usize] = true;
                    touched.push(cj);
                }
                neighbor_w[cj as usize] += w;
            }
            if !active[cur as usize] {
                active[cur as usize] = true;
                touched.push(cur);
            }
            touched.sort_unstable();

            comm_degree[cur as usize] -= k_i;
            let score =
                |c: u32| neighbor_w[c as usize] - scale * k_i * comm_degree[c as usize];
            let stay = score(cur);
            let mut best = (stay, cur);
            for &cand in &touched {
                if cand == cur {
                    continue;
                }
                let s = score(cand);
                // Strict improvement moves; the ascending candidate order
                // leaves ties with the lowest cluster id.
                if s > best.0 {
                    best = (s, cand);
                }
            }
            let target = best.1;
            comm_degree[target as usize] += k_i;
            if target != cur {
                communities[i] = target;
                moves += 1;
            }

            for &c in &touched {
                neighbor_w[c as usize] = 0.0;
                active[c as usize] = false;
            }
            touched.clear();
        }
        if moves == 0 {
            break;
        }
        any_moved = true;
    }

    // Dense renumbering in order of first appearance.
    let mut remap = vec![u32::MAX; n];
    let mut next = 0u32;
    for c in communities.iter_mut() {
        let idx = *c as usize;
        if remap[idx] == u32::MAX {
            remap[idx] = next;
            next += 1;
        }
        *c = remap[idx];
    }
    (communities, next as usize, any_moved)
}

/// Louvain community detection at the given resolution.
///
/// Deterministic for a fixed seed; graphs without edges come back as
/// singletons.
pub fn louvain(g: &DirectedGraph, resolution: f64, seed: u64) -> Result<Clustering> {
    if g.n() == 0 {
        return Err(Error::InvalidArgument("empty graph".into()));
    }
    if !resolution.is_finite() || resolution <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let mut proj = Projection::from_graph(g);
    if proj.m2 == 0.0 {
        return Ok(Clustering::singletons(g.n()));
    }

    let mut rng = substream(seed, 0);
    // Composition of per-level assignments, starting from the identity.
    let mut final_assignment: Vec<u32> = (0..g.n() as u32).collect();
    let mut k = g.n();

    loop {
        let mut order: Vec<u32> = (0..proj.n() as u32).collect();
        order.shuffle(&mut rng);
        let (assign, level_k, moved) = one_level(&proj, resolution, &order);
        if !moved {
            break;
        }
        for slot in final_assignment.iter_mut() {
            *slot = assign[*slot as usize];
        }
        k = level_k;
        if level_k == proj.n() {
            break;
        }
        proj = proj.aggregate(&assign, level_k);
    }

    Ok(Clustering {
        assignment: final_assignment,
        k,
    })
}

/// Resolution-parameterized modularity of a clustering on the symmetrized
/// projection of `g`.
pub fn modularity(g: &DirectedGraph, clustering: &Clustering, resolution: f64) -> Result<f64> {
    check_cover(g, clustering)?;
    let proj = Projection::from_graph(g);
    if proj.m2 == 0.0 {
        return Err(Error::UndefinedModularity);
    }
    Ok(proj.modularity(clustering.assignment(), clustering.k(), resolution))
}
