//! Finite directed graphs with 0/1 adjacency and the constructions built on
//! them: higher block graphs, power graphs, transposes and essential parts.
//!
//! Vertices are dense indices `0..vertex_count`. Edges are kept sorted by
//! `(source, target)`; the position of an edge in that order is its
//! canonical index, used for masks, labels and sampling everywhere else.

mod scc;
mod walks;

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use scc::{
    component_period, is_irreducible, is_primitive, period, scc_decompose, Component,
    ComponentScan,
};
pub use walks::{
    closed_walk_counts, count_paths, enumerate_paths, enumerate_periodic, Orbit, OrbitSet, Path,
    PathSet,
};

/// Default cap on enumerated paths and constructed edges.
pub const DEFAULT_PATH_CAP: u64 = 10_000_000;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    labels: Option<Vec<String>>,
    /// `out_start[u]..out_start[u + 1]` are the (contiguous) out-edges of `u`.
    out_start: Vec<usize>,
    in_start: Vec<usize>,
    in_edges: Vec<usize>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertex_count", &self.vertex_count)
            .field("edges", &self.edges)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertex_count: usize,
    edges: Vec<[usize; 2]>,
}

impl Graph {
    /// Builds a graph, dropping duplicate edges with a logged warning.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let (g, dups) = Graph::new_reporting(vertex_count, edges)?;
        for (u, v) in dups {
            log::warn!("duplicate edge ({u}, {v}) ignored");
        }
        Ok(g)
    }

    /// Like [`Graph::new`] but hands back the duplicate edges instead of logging them.
    pub fn new_reporting(
        vertex_count: usize,
        edges: &[(usize, usize)],
    ) -> Result<(Graph, Vec<(usize, usize)>)> {
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::EndpointOutOfRange { u, v, vertex_count });
            }
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut dups = Vec::new();
        let mut kept = Vec::with_capacity(edges.len());
        for &e in edges {
            if seen.insert(e) {
                kept.push(e);
            } else {
                dups.push(e);
            }
        }
        kept.sort_unstable();
        Ok((Graph::from_sorted(vertex_count, kept, None), dups))
    }

    /// `edges` must already be sorted and duplicate free.
    pub(crate) fn from_sorted(
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
        labels: Option<Vec<String>>,
    ) -> Graph {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut out_start = vec![0usize; vertex_count + 1];
        let mut in_count = vec![0usize; vertex_count + 1];
        for &(u, v) in &edges {
            out_start[u + 1] += 1;
            in_count[v + 1] += 1;
        }
        for i in 0..vertex_count {
            out_start[i + 1] += out_start[i];
            in_count[i + 1] += in_count[i];
        }
        let in_start = in_count.clone();
        let mut fill = in_count;
        let mut in_edges = vec![0usize; edges.len()];
        // Edges are visited in (u, v) order, so each in-list ends up sorted by source.
        for (idx, &(_, v)) in edges.iter().enumerate() {
            in_edges[fill[v]] = idx;
            fill[v] += 1;
        }
        Graph {
            vertex_count,
            edges,
            labels,
            out_start,
            in_start,
            in_edges,
        }
    }

    /// The full shift on `a` symbols: complete graph on `a` vertices with loops.
    pub fn full(a: usize) -> Graph {
        let edges = (0..a).flat_map(|u| (0..a).map(move |v| (u, v))).collect();
        Graph::from_sorted(a, edges, None)
    }

    /// Golden-mean shift: edges (0,0), (0,1), (1,0).
    pub fn golden() -> Graph {
        Graph::from_sorted(2, vec![(0, 0), (0, 1), (1, 0)], None)
    }

    /// Single directed cycle of length `len` (0 -> 1 -> ... -> 0).
    pub fn cycle(len: usize) -> Graph {
        let mut edges: Vec<_> = (0..len).map(|u| (u, (u + 1) % len)).collect();
        edges.sort_unstable();
        Graph::from_sorted(len, edges, None)
    }

    /// Resolves a built-in name (`golden`, `full:A`, `cycle:L`) or a JSON graph file.
    pub fn from_spec(spec: &str) -> Result<Graph> {
        let parse_arg = |s: &str| -> Result<usize> {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&x| x >= 1)
                .ok_or_else(|| Error::Config(format!("bad size in graph spec {spec:?}")))
        };
        if spec == "golden" {
            Ok(Graph::golden())
        } else if let Some(a) = spec.strip_prefix("full:") {
            Ok(Graph::full(parse_arg(a)?))
        } else if let Some(l) = spec.strip_prefix("cycle:") {
            Ok(Graph::cycle(parse_arg(l)?))
        } else if FsPath::new(spec).exists() {
            Graph::load_json(spec)
        } else {
            Err(Error::Config(format!(
                "unknown graph {spec:?} (expected golden, full:A, cycle:L or a JSON file)"
            )))
        }
    }

    pub fn from_json_str(s: &str) -> Result<Graph> {
        let file: GraphFile = serde_json::from_str(s)?;
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::new(file.vertex_count, &edges)
    }

    pub fn load_json(path: impl AsRef<FsPath>) -> Result<Graph> {
        Graph::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertex_count: self.vertex_count,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        };
        serde_json::to_string(&file).expect("graph serialization cannot fail")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> (usize, usize) {
        self.edges[idx]
    }

    /// Initial vertex of edge `idx`.
    pub fn source(&self, idx: usize) -> usize {
        self.edges[idx].0
    }

    /// Terminal vertex of edge `idx`.
    pub fn target(&self, idx: usize) -> usize {
        self.edges[idx].1
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn out_edges(&self, u: usize) -> Range<usize> {
        self.out_start[u]..self.out_start[u + 1]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[self.in_start[v]..self.in_start[v + 1]]
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges[self.out_edges(u)].iter().map(|&(_, v)| v)
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_start[u + 1] - self.out_start[u]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_start[v + 1] - self.in_start[v]
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.vertex_count {
            return None;
        }
        let range = self.out_edges(u);
        let start = range.start;
        self.edges[range]
            .binary_search_by(|&(_, t)| t.cmp(&v))
            .ok()
            .map(|i| start + i)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// Largest in- or out-degree over all vertices.
    pub fn d_max(&self) -> usize {
        (0..self.vertex_count)
            .map(|u| self.out_degree(u).max(self.in_degree(u)))
            .max()
            .unwrap_or(0)
    }

    /// No vertex without outgoing or without incoming edges.
    pub fn is_nondegenerate(&self) -> bool {
        (0..self.vertex_count).all(|u| self.out_degree(u) > 0 && self.in_degree(u) > 0)
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.vertex_count]; self.vertex_count];
        for &(u, v) in &self.edges {
            a[u][v] = 1;
        }
        a
    }

    /// Subgraph on the same vertex set keeping the edges whose mask bit is set.
    pub fn restrict(&self, mask: &[bool]) -> Result<Graph> {
        if mask.len() != self.edges.len() {
            return Err(Error::MaskMismatch {
                mask: mask.len(),
                edges: self.edges.len(),
            });
        }
        let edges = self
            .edges
            .iter()
            .zip(mask)
            .filter(|(_, &keep)| keep)
            .map(|(&e, _)| e)
            .collect();
        let labels = self.labels.as_ref().map(|ls| {
            ls.iter()
                .zip(mask)
                .filter(|(_, &keep)| keep)
                .map(|(l, _)| l.clone())
                .collect()
        });
        Ok(Graph::from_sorted(self.vertex_count, edges, labels))
    }

    /// Induced subgraph on `vertices` (which must be sorted and distinct),
    /// re-indexed in that order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.vertex_count];
        for (new, &old) in vertices.iter().enumerate() {
            index[old] = new;
        }
        let mut edges = Vec::new();
        let mut labels = self.labels.as_ref().map(|_| Vec::new());
        for (idx, &(u, v)) in self.edges.iter().enumerate() {
            if index[u] != usize::MAX && index[v] != usize::MAX {
                edges.push((index[u], index[v]));
                if let (Some(out), Some(ls)) = (labels.as_mut(), self.labels.as_ref()) {
                    out.push(ls[idx].clone());
                }
            }
        }
        // Re-indexing is monotone, so the (u, v) order survives.
        Graph::from_sorted(vertices.len(), edges, labels)
    }
}

/// Builds a graph from an edge list; see [`Graph::new`].
pub fn build_graph(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Graph> {
    Graph::new(vertex_count, edges)
}

/// Reverses every edge. Labels follow their edges.
pub fn transpose(g: &Graph) -> Graph {
    let mut pairs: Vec<((usize, usize), usize)> = g
        .edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| ((v, u), i))
        .collect();
    pairs.sort_unstable();
    let labels = g
        .labels
        .as_ref()
        .map(|ls| pairs.iter().map(|&(_, i)| ls[i].clone()).collect());
    Graph::from_sorted(g.vertex_count, pairs.into_iter().map(|(e, _)| e).collect(), labels)
}

/// The `n`-block graph: vertices are the paths of length `n - 1`, edges the
/// paths of length `n`, with `i(e) = e[1, n-1]` and `t(e) = e[2, n]`.
///
/// Edge labels spell out the underlying base path as dot-separated base edge
/// indices. `n = 1` returns the graph itself.
pub fn n_block_graph(g: &Graph, n: usize, edge_cap: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Domain("block length must be at least 1".into()));
    }
    if n == 1 {
        return Ok(g.clone());
    }
    // Base paths carried by the current graph's edges.
    let mut paths: Vec<Vec<u32>> = (0..g.edge_count()).map(|e| vec![e as u32]).collect();
    let mut current = g.clone();
    for _ in 1..n {
        let total: u64 = current
            .edges
            .iter()
            .map(|&(_, v)| current.out_degree(v) as u64)
            .sum();
        if total > edge_cap {
            return Err(Error::CapExceeded {
                what: "n-block graph edge count",
                cap: edge_cap,
            });
        }
        // Line graph: vertex per edge, edge per composable pair (e, f).
        let mut edges = Vec::with_capacity(total as usize);
        let mut next_paths = Vec::with_capacity(total as usize);
        for (e, &(_, v)) in current.edges.iter().enumerate() {
            for f in current.out_edges(v) {
                edges.push((e, f));
                let mut p = paths[e].clone();
                p.push(*paths[f].last().expect("nonempty path"));
                next_paths.push(p);
            }
        }
        current = Graph::from_sorted(current.edge_count(), edges, None);
        paths = next_paths;
    }
    let labels = paths
        .iter()
        .map(|p| {
            p.iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(".")
        })
        .collect();
    current.labels = Some(labels);
    Ok(current)
}

/// Adjacency of the `p`-th power graph: entry `(u, v)` counts paths of length
/// `p` from `u` to `v`. Multiplicities above one are expected here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerGraph {
    pub vertex_count: usize,
    pub counts: Vec<Vec<u64>>,
}

pub fn power_graph(g: &Graph, p: usize) -> Result<PowerGraph> {
    if p == 0 {
        return Err(Error::Domain("power must be at least 1".into()));
    }
    let n = g.vertex_count;
    let mut cur: Vec<Vec<u64>> = g
        .adjacency()
        .into_iter()
        .map(|row| row.into_iter().map(u64::from).collect())
        .collect();
    for _ in 1..p {
        let mut next = vec![vec![0u64; n]; n];
        for (u, row) in cur.iter().enumerate() {
            for (x, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for v in g.successors(x) {
                    next[u][v] = next[u][v].checked_add(c).ok_or(Error::CapExceeded {
                        what: "power graph multiplicity",
                        cap: u64::MAX,
                    })?;
                }
            }
        }
        cur = next;
    }
    Ok(PowerGraph {
        vertex_count: n,
        counts: cur,
    })
}

/// Vertices surviving repeated deletion of sources and sinks, in increasing order.
pub fn essential_vertices(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count;
    let mut alive = vec![true; n];
    let mut indeg: Vec<usize> = (0..n).map(|v| g.in_degree(v)).collect();
    let mut outdeg: Vec<usize> = (0..n).map(|v| g.out_degree(v)).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0 || outdeg[v] == 0).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for e in g.out_edges(v) {
            let w = g.target(e);
            if alive[w] && w != v {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        for &e in g.in_edges(v) {
            let w = g.source(e);
            if alive[w] && w != v {
                outdeg[w] -= 1;
                if outdeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

/// Deletes vertices with no incoming or no outgoing edge until none remain.
/// The result carries every bi-infinite walk of `g`.
pub fn essential_subgraph(g: &Graph) -> Graph {
    let keep = essential_vertices(g);
    if keep.len() == g.vertex_count {
        return g.clone();
    }
    g.induced(&keep)
}
