use num_bigint::BigInt;
use num_traits::Zero;

use super::{scc_decompose, Graph};
use crate::error::{Error, Result};

/// A walk given by its start vertex and edge sequence. Length-0 paths are
/// bare vertices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn end(&self, g: &Graph) -> usize {
        self.edges.last().map_or(self.start, |&e| g.target(e))
    }

    /// Vertices traversed, sorted and deduplicated.
    pub fn vertex_set(&self, g: &Graph) -> Vec<usize> {
        let mut vs: Vec<usize> = std::iter::once(self.start)
            .chain(self.edges.iter().map(|&e| g.target(e)))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Checks that consecutive edges compose.
    pub fn is_valid(&self, g: &Graph) -> bool {
        let mut at = self.start;
        if at >= g.vertex_count() {
            return false;
        }
        for &e in &self.edges {
            if e >= g.edge_count() || g.source(e) != at {
                return false;
            }
            at = g.target(e);
        }
        true
    }
}

#[derive(Clone, Debug)]
pub struct PathSet {
    pub length: usize,
    pub paths: Vec<Path>,
}

/// Number of walks of length `k`, saturating at `u64::MAX`.
pub fn count_paths(g: &Graph, k: usize) -> u64 {
    let mut counts = vec![1u64; g.vertex_count()];
    for _ in 0..k {
        let mut next = vec![0u64; g.vertex_count()];
        for (u, slot) in next.iter_mut().enumerate() {
            *slot = g
                .successors(u)
                .fold(0u64, |acc, v| acc.saturating_add(counts[v]));
        }
        counts = next;
    }
    counts.iter().fold(0u64, |acc, &c| acc.saturating_add(c))
}

/// All walks of length `k` in lexicographic edge-index order. `k = 0`
/// yields one empty path per vertex.
pub fn enumerate_paths(g: &Graph, k: usize, cap: u64) -> Result<PathSet> {
    if k == 0 {
        if g.vertex_count() as u64 > cap {
            return Err(Error::CapExceeded {
                what: "path enumeration",
                cap,
            });
        }
        let paths = (0..g.vertex_count())
            .map(|start| Path {
                start,
                edges: Vec::new(),
            })
            .collect();
        return Ok(PathSet { length: 0, paths });
    }
    if count_paths(g, k) > cap {
        return Err(Error::CapExceeded {
            what: "path enumeration",
            cap,
        });
    }
    let mut paths = Vec::new();
    let mut current = Vec::with_capacity(k);
    for e in 0..g.edge_count() {
        current.push(e);
        extend_paths(g, k, &mut current, &mut paths);
        current.pop();
    }
    Ok(PathSet { length: k, paths })
}

fn extend_paths(g: &Graph, k: usize, current: &mut Vec<usize>, out: &mut Vec<Path>) {
    if current.len() == k {
        out.push(Path {
            start: g.source(current[0]),
            edges: current.clone(),
        });
        return;
    }
    let at = g.target(*current.last().expect("nonempty"));
    for e in g.out_edges(at) {
        current.push(e);
        extend_paths(g, k, current, out);
        current.pop();
    }
}

/// One rotation class of closed walks of a fixed length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// Rotation-minimal representative.
    pub edges: Vec<usize>,
    /// Sorted vertex set traversed by the walk.
    pub vertices: Vec<usize>,
    /// Smallest rotation mapping the walk to itself; equals the class size.
    pub least_period: usize,
}

#[derive(Clone, Debug)]
pub struct OrbitSet {
    pub period: usize,
    pub orbits: Vec<Orbit>,
}

impl OrbitSet {
    /// Total number of closed walks of length `period` (sum of class sizes).
    pub fn walk_count(&self) -> u64 {
        self.orbits.iter().map(|o| o.least_period as u64).sum()
    }
}

fn least_rotation_period(w: &[usize]) -> usize {
    let p = w.len();
    (1..=p)
        .find(|&s| p.is_multiple_of(s) && (0..p).all(|i| w[i] == w[(i + s) % p]))
        .unwrap_or(p)
}

fn is_rotation_minimal(w: &[usize]) -> bool {
    let p = w.len();
    (1..p).all(|s| {
        for i in 0..p {
            let a = w[i];
            let b = w[(i + s) % p];
            if a != b {
                return a < b;
            }
        }
        true
    })
}

/// All closed walks of length `p`, grouped into rotation classes. Errors
/// when the number of walks exceeds `cap`.
pub fn enumerate_periodic(g: &Graph, p: usize, cap: u64) -> Result<OrbitSet> {
    if p == 0 {
        return Err(Error::Domain("period must be at least 1".into()));
    }
    let mut orbits = Vec::new();
    let mut walks = 0u64;
    let mut current = Vec::with_capacity(p);
    // The minimal rotation starts at its smallest edge, so every later edge
    // of a representative is >= the first one.
    for first in 0..g.edge_count() {
        current.push(first);
        collect_closed(g, p, first, &mut current, &mut orbits, &mut walks, cap)?;
        current.pop();
    }
    Ok(OrbitSet { period: p, orbits })
}

fn collect_closed(
    g: &Graph,
    p: usize,
    first: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Orbit>,
    walks: &mut u64,
    cap: u64,
) -> Result<()> {
    let at = g.target(*current.last().expect("nonempty"));
    if current.len() == p {
        if at == g.source(first) && is_rotation_minimal(current) {
            let least_period = least_rotation_period(current);
            *walks += least_period as u64;
            if *walks > cap {
                return Err(Error::CapExceeded {
                    what: "periodic orbit enumeration",
                    cap,
                });
            }
            let mut vertices: Vec<usize> = current.iter().map(|&e| g.source(e)).collect();
            vertices.sort_unstable();
            vertices.dedup();
            out.push(Orbit {
                edges: current.clone(),
                vertices,
                least_period,
            });
        }
        return Ok(());
    }
    for e in g.out_edges(at) {
        if e < first {
            continue;
        }
        current.push(e);
        collect_closed(g, p, first, current, out, walks, cap)?;
        current.pop();
    }
    Ok(())
}

/// Exact `tr(A^p)` for `p = 1..=p_max` (index `p - 1`).
///
/// Closed walks never leave a strongly connected component, so the traces
/// are accumulated component by component.
pub fn closed_walk_counts(g: &Graph, p_max: usize) -> Vec<BigInt> {
    let mut total = vec![BigInt::zero(); p_max];
    for comp in scc_decompose(g) {
        let sub = g.induced(&comp.vertices);
        let traces = match traces_u128(&sub, p_max) {
            Some(t) => t.into_iter().map(BigInt::from).collect(),
            None => traces_big(&sub, p_max),
        };
        for (acc, t) in total.iter_mut().zip(traces) {
            *acc += t;
        }
    }
    total
}

// Walks are counted one start vertex at a time, so memory stays O(|V|).
fn traces_u128(g: &Graph, p_max: usize) -> Option<Vec<u128>> {
    let n = g.vertex_count();
    let mut out = vec![0u128; p_max];
    let mut row = vec![0u128; n];
    let mut next = vec![0u128; n];
    for u in 0..n {
        row.fill(0);
        row[u] = 1;
        for tr in out.iter_mut() {
            next.fill(0);
            for (x, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for v in g.successors(x) {
                    next[v] = next[v].checked_add(c)?;
                }
            }
            std::mem::swap(&mut row, &mut next);
            *tr = tr.checked_add(row[u])?;
        }
    }
    Some(out)
}

fn traces_big(g: &Graph, p_max: usize) -> Vec<BigInt> {
    let n = g.vertex_count();
    let mut out = vec![BigInt::zero(); p_max];
    for u in 0..n {
        let mut row = vec![BigInt::zero(); n];
        row[u] = BigInt::from(1);
        for tr in out.iter_mut() {
            let mut next = vec![BigInt::zero(); n];
            for (x, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for v in g.successors(x) {
                    next[v] += c;
                }
            }
            row = next;
            *tr += &row[u];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{n_block_graph, Graph, DEFAULT_PATH_CAP};
    use super::*;

    #[test]
    fn path_examples() {
        let g = Graph::golden();
        assert_eq!(enumerate_paths(&g, 2, DEFAULT_PATH_CAP).unwrap().paths.len(), 5);
        let zero = enumerate_paths(&g, 0, DEFAULT_PATH_CAP).unwrap();
        assert_eq!(zero.paths.len(), 2);
        assert!(zero.paths.iter().all(|p| p.is_empty()));
        assert_eq!(
            enumerate_paths(&Graph::cycle(3), 4, DEFAULT_PATH_CAP)
                .unwrap()
                .paths
                .len(),
            3
        );
        assert!(enumerate_paths(&Graph::full(2), 10, 100).is_err());
    }

    #[test]
    fn paths_are_sorted_valid_walks() {
        let g = Graph::full(2);
        let set = enumerate_paths(&g, 3, DEFAULT_PATH_CAP).unwrap();
        assert_eq!(set.paths.len(), 16);
        assert!(set.paths.windows(2).all(|w| w[0].edges < w[1].edges));
        assert!(set.paths.iter().all(|p| p.len() == 3 && p.is_valid(&g)));
    }

    #[test]
    fn periodic_examples() {
        let g = Graph::golden();
        let counts: Vec<u64> = (1..=3)
            .map(|p| enumerate_periodic(&g, p, DEFAULT_PATH_CAP).unwrap().walk_count())
            .collect();
        assert_eq!(counts, vec![1, 3, 4]);
        for p in 1..=6 {
            let set = enumerate_periodic(&Graph::full(2), p, DEFAULT_PATH_CAP).unwrap();
            assert_eq!(set.walk_count(), 1 << p);
        }
        let c3 = Graph::cycle(3);
        assert_eq!(enumerate_periodic(&c3, 1, 10).unwrap().walk_count(), 0);
        assert_eq!(enumerate_periodic(&c3, 2, 10).unwrap().walk_count(), 0);
        let three = enumerate_periodic(&c3, 3, 10).unwrap();
        assert_eq!(three.walk_count(), 3);
        assert_eq!(three.orbits.len(), 1);
        assert!(enumerate_periodic(&Graph::full(2), 8, 100).is_err());
    }

    #[test]
    fn non_primitive_walks_form_small_classes() {
        // the double traversal of the 3-cycle is its own class of size 3
        let six = enumerate_periodic(&Graph::cycle(3), 6, 100).unwrap();
        assert_eq!(six.orbits.len(), 1);
        assert_eq!(six.orbits[0].least_period, 3);
        assert_eq!(six.walk_count(), 3);
    }

    #[test]
    fn trace_identity_on_small_graphs() {
        let graphs = [
            Graph::golden(),
            Graph::full(2),
            Graph::full(3),
            Graph::cycle(4),
            n_block_graph(&Graph::golden(), 3, DEFAULT_PATH_CAP).unwrap(),
        ];
        for g in &graphs {
            let traces = closed_walk_counts(g, 8);
            for p in 1..=8 {
                let walks = enumerate_periodic(g, p, DEFAULT_PATH_CAP).unwrap().walk_count();
                assert_eq!(BigInt::from(walks), traces[p - 1], "p = {p}");
            }
        }
    }

    #[test]
    fn big_and_small_trace_routes_agree() {
        let g = n_block_graph(&Graph::full(2), 2, DEFAULT_PATH_CAP).unwrap();
        let small: Vec<BigInt> = traces_u128(&g, 12)
            .unwrap()
            .into_iter()
            .map(BigInt::from)
            .collect();
        assert_eq!(small, traces_big(&g, 12));
    }
}
