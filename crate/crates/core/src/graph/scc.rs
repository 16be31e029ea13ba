use num_integer::Integer;

use super::Graph;

/// A nontrivial strongly connected component: it carries at least one cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    /// Canonical indices of the (allowed) edges with both ends in the component.
    pub edges: Vec<usize>,
}

impl Component {
    /// A strongly connected component is a single simple cycle exactly when
    /// it has as many edges as vertices.
    pub fn is_cycle(&self) -> bool {
        self.edges.len() == self.vertices.len()
    }
}

/// Reusable scratch space for repeated SCC scans of one graph under
/// different edge masks.
#[derive(Clone, Debug)]
pub struct ComponentScan {
    index: Vec<u32>,
    lowlink: Vec<u32>,
    on_stack: Vec<bool>,
    comp: Vec<u32>,
    stack: Vec<usize>,
    call: Vec<(usize, usize)>,
}

const UNVISITED: u32 = u32::MAX;

impl ComponentScan {
    pub fn new(vertex_count: usize) -> Self {
        ComponentScan {
            index: vec![UNVISITED; vertex_count],
            lowlink: vec![0; vertex_count],
            on_stack: vec![false; vertex_count],
            comp: vec![UNVISITED; vertex_count],
            stack: Vec::new(),
            call: Vec::new(),
        }
    }

    /// Nontrivial components of `g` restricted to edges with a set mask bit
    /// (all edges when `mask` is `None`), ordered by their smallest vertex.
    pub fn run(&mut self, g: &Graph, mask: Option<&[bool]>) -> Vec<Component> {
        let n = g.vertex_count();
        assert_eq!(self.index.len(), n, "scratch sized for a different graph");
        self.index.fill(UNVISITED);
        self.on_stack.fill(false);
        self.comp.fill(UNVISITED);
        let allowed = |e: usize| mask.is_none_or(|m| m[e]);

        let mut counter = 0u32;
        let mut comp_count = 0u32;
        for root in 0..n {
            if self.index[root] != UNVISITED {
                continue;
            }
            // Iterative Tarjan: (vertex, next out-edge to examine).
            self.call.push((root, g.out_edges(root).start));
            self.index[root] = counter;
            self.lowlink[root] = counter;
            counter += 1;
            self.stack.push(root);
            self.on_stack[root] = true;
            while let Some(&mut (v, ref mut next)) = self.call.last_mut() {
                let end = g.out_edges(v).end;
                let mut descended = false;
                while *next < end {
                    let e = *next;
                    *next += 1;
                    if !allowed(e) {
                        continue;
                    }
                    let w = g.target(e);
                    if self.index[w] == UNVISITED {
                        self.index[w] = counter;
                        self.lowlink[w] = counter;
                        counter += 1;
                        self.stack.push(w);
                        self.on_stack[w] = true;
                        self.call.push((w, g.out_edges(w).start));
                        descended = true;
                        break;
                    } else if self.on_stack[w] {
                        self.lowlink[v] = self.lowlink[v].min(self.index[w]);
                    }
                }
                if descended {
                    continue;
                }
                self.call.pop();
                if let Some(&(parent, _)) = self.call.last() {
                    self.lowlink[parent] = self.lowlink[parent].min(self.lowlink[v]);
                }
                if self.lowlink[v] == self.index[v] {
                    loop {
                        let w = self.stack.pop().expect("tarjan stack underflow");
                        self.on_stack[w] = false;
                        self.comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }

        let mut edges_by_comp: Vec<Vec<usize>> = vec![Vec::new(); comp_count as usize];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if allowed(e) && self.comp[u] == self.comp[v] {
                edges_by_comp[self.comp[u] as usize].push(e);
            }
        }
        let mut verts_by_comp: Vec<Vec<usize>> = vec![Vec::new(); comp_count as usize];
        for v in 0..n {
            let c = self.comp[v] as usize;
            if !edges_by_comp[c].is_empty() {
                verts_by_comp[c].push(v);
            }
        }
        let mut out: Vec<Component> = verts_by_comp
            .into_iter()
            .zip(edges_by_comp)
            .filter(|(_, es)| !es.is_empty())
            .map(|(vertices, edges)| Component { vertices, edges })
            .collect();
        out.sort_by_key(|c| c.vertices[0]);
        out
    }
}

/// Nontrivial strongly connected components (irreducible components).
/// Vertices on no cycle belong to none of them.
pub fn scc_decompose(g: &Graph) -> Vec<Component> {
    ComponentScan::new(g.vertex_count()).run(g, None)
}

/// Period of one component: gcd of its cycle lengths, from BFS levels.
pub fn component_period(g: &Graph, comp: &Component) -> usize {
    if comp.is_cycle() {
        return comp.vertices.len();
    }
    let mut local = std::collections::HashMap::with_capacity(comp.vertices.len());
    for (i, &v) in comp.vertices.iter().enumerate() {
        local.insert(v, i);
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); comp.vertices.len()];
    for &e in &comp.edges {
        let (u, v) = g.edge(e);
        adj[local[&u]].push(local[&v]);
    }
    let mut level = vec![usize::MAX; adj.len()];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut gcd = 0usize;
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            let diff = (level[u] + 1).abs_diff(level[v]);
            gcd = gcd.gcd(&diff);
        }
    }
    gcd
}

/// gcd of the lengths of all cycles, or `None` for an acyclic graph.
pub fn period(g: &Graph) -> Option<usize> {
    scc_decompose(g)
        .iter()
        .map(|c| component_period(g, c))
        .reduce(|a, b| a.gcd(&b))
}

/// One nontrivial component spanning every vertex.
pub fn is_irreducible(g: &Graph) -> bool {
    let comps = scc_decompose(g);
    g.vertex_count() > 0 && comps.len() == 1 && comps[0].vertices.len() == g.vertex_count()
}

pub fn is_primitive(g: &Graph) -> bool {
    is_irreducible(g) && period(g) == Some(1)
}
