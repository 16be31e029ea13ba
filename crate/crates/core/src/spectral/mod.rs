//! Perron–Frobenius data, exact characteristic polynomials, the zeta
//! function, the measure of maximal entropy and entropy itself.

pub mod poly;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{
    essential_vertices, is_irreducible, scc_decompose, Component, Graph, Path,
};
use crate::limits::orbit_counts;

/// Exact characteristic polynomials are only formed up to this many vertices.
pub const CHARPOLY_MAX_VERTICES: usize = 64;
/// Relative gap between the Collatz–Wielandt bounds at which power iteration stops.
pub const RADIUS_TOLERANCE: f64 = 1e-10;
pub const MAX_POWER_ITERATIONS: usize = 100_000;

/// Adjacency of one strongly connected piece in local indices (CSR).
pub(crate) struct LocalAdjacency {
    n: usize,
    start: Vec<usize>,
    targets: Vec<usize>,
}

impl LocalAdjacency {
    /// `local` must map every component vertex to its position in
    /// `comp.vertices`; entries for other vertices are ignored.
    pub(crate) fn from_component(g: &Graph, comp: &Component, local: &mut [usize]) -> Self {
        for (i, &v) in comp.vertices.iter().enumerate() {
            local[v] = i;
        }
        let n = comp.vertices.len();
        let mut start = vec![0usize; n + 1];
        for &e in &comp.edges {
            start[local[g.source(e)] + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        // Component edges arrive sorted by source, and re-indexing is monotone.
        let targets = comp.edges.iter().map(|&e| local[g.target(e)]).collect();
        LocalAdjacency { n, start, targets }
    }

    fn from_graph(g: &Graph) -> Self {
        let n = g.vertex_count();
        let start = (0..=n)
            .map(|u| if u == n { g.edge_count() } else { g.out_edges(u).start })
            .collect();
        let targets = g.edges().iter().map(|&(_, v)| v).collect();
        LocalAdjacency { n, start, targets }
    }

    fn transposed(&self) -> Self {
        let mut start = vec![0usize; self.n + 1];
        for &t in &self.targets {
            start[t + 1] += 1;
        }
        for i in 0..self.n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut targets = vec![0usize; self.targets.len()];
        for u in 0..self.n {
            for &t in &self.targets[self.start[u]..self.start[u + 1]] {
                targets[fill[t]] = u;
                fill[t] += 1;
            }
        }
        LocalAdjacency {
            n: self.n,
            start,
            targets,
        }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for u in 0..self.n {
            let s: f64 = self.targets[self.start[u]..self.start[u + 1]]
                .iter()
                .map(|&t| x[t])
                .sum();
            y[u] = s;
        }
    }

    /// Power iteration on `A + I`; returns the Perron root of `A` and a
    /// positive right eigenvector scaled to max 1. The matrix must be
    /// irreducible.
    pub(crate) fn perron(&self, tol: f64) -> Result<(f64, Vec<f64>)> {
        let n = self.n;
        let mut x = vec![1.0f64; n];
        let mut y = vec![0.0f64; n];
        for _ in 0..MAX_POWER_ITERATIONS {
            self.apply(&x, &mut y);
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            let mut top = 0.0f64;
            for u in 0..n {
                y[u] += x[u];
                let r = y[u] / x[u];
                lo = lo.min(r);
                hi = hi.max(r);
                top = top.max(y[u]);
            }
            for v in y.iter_mut() {
                *v /= top;
            }
            std::mem::swap(&mut x, &mut y);
            if hi - lo <= tol * hi {
                return Ok((0.5 * (lo + hi) - 1.0, x));
            }
        }
        Err(Error::NonConvergence(MAX_POWER_ITERATIONS))
    }
}

/// Perron root of one nontrivial component. Simple cycles are exactly 1.
pub(crate) fn component_radius(g: &Graph, comp: &Component, local: &mut [usize]) -> Result<f64> {
    if comp.is_cycle() {
        return Ok(1.0);
    }
    LocalAdjacency::from_component(g, comp, local)
        .perron(RADIUS_TOLERANCE)
        .map(|(lambda, _)| lambda)
}

/// Spectral radius of the adjacency matrix: the largest Perron root over
/// the irreducible components, 0 when there are none.
pub fn spectral_radius(g: &Graph) -> Result<f64> {
    let mut local = vec![0usize; g.vertex_count()];
    let mut best = 0.0f64;
    for comp in scc_decompose(g) {
        best = best.max(component_radius(g, &comp, &mut local)?);
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct SpectralData {
    pub lambda: f64,
    /// Positive left eigenvector `w`, scaled so that `w . v = 1`.
    pub left: Vec<f64>,
    /// Positive right eigenvector `v`, summing to 1.
    pub right: Vec<f64>,
    /// `det(tI - A)` in ascending powers; `None` above [`CHARPOLY_MAX_VERTICES`].
    pub char_poly: Option<Vec<BigInt>>,
    nonzero_spectrum: Option<Vec<Complex64>>,
}

impl SpectralData {
    /// Nonzero eigenvalues with multiplicity, by decreasing modulus.
    pub fn nonzero_spectrum(&self) -> Result<&[Complex64]> {
        self.nonzero_spectrum.as_deref().ok_or(Error::SizeCap {
            what: "nonzero spectrum",
            limit: CHARPOLY_MAX_VERTICES,
            actual: self.right.len(),
        })
    }

    /// `max w_i / min w_i` and `max v_i / min v_i`.
    pub fn distortion(&self) -> (f64, f64) {
        (ratio(&self.left), ratio(&self.right))
    }
}

fn ratio(x: &[f64]) -> f64 {
    let max = x.iter().cloned().fold(f64::MIN, f64::max);
    let min = x.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

/// Perron root, normalized eigenvectors, characteristic polynomial and
/// nonzero spectrum of an irreducible graph.
pub fn perron_data(g: &Graph) -> Result<SpectralData> {
    if !is_irreducible(g) {
        return Err(Error::NotIrreducible);
    }
    let adj = LocalAdjacency::from_graph(g);
    let (_, mut right) = adj.perron(1e-14).or_else(|_| adj.perron(1e-12))?;
    let (_, mut left) = adj
        .transposed()
        .perron(1e-14)
        .or_else(|_| adj.transposed().perron(1e-12))?;
    let sum: f64 = right.iter().sum();
    right.iter_mut().for_each(|v| *v /= sum);
    let dot: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    left.iter_mut().for_each(|w| *w /= dot);
    // w A v / w v, second-order accurate in the eigenvector error
    let mut av = vec![0.0; g.vertex_count()];
    adj.apply(&right, &mut av);
    let lambda = left.iter().zip(&av).map(|(a, b)| a * b).sum::<f64>()
        / left.iter().zip(&right).map(|(a, b)| a * b).sum::<f64>();

    let (char_poly, nonzero_spectrum) = if g.vertex_count() <= CHARPOLY_MAX_VERTICES {
        let cp = poly::char_poly(g);
        let spectrum = poly::nonzero_roots(&cp);
        (Some(cp), Some(spectrum))
    } else {
        (None, None)
    };
    Ok(SpectralData {
        lambda,
        left,
        right,
        char_poly,
        nonzero_spectrum,
    })
}

/// `det(I - tA)`, factored over the irreducible components (the matrix is
/// block triangular in a topological order of its components).
pub fn det_i_minus_ta(g: &Graph, t: f64) -> f64 {
    scc_decompose(g)
        .iter()
        .map(|comp| {
            if comp.is_cycle() {
                return 1.0 - t.powi(comp.vertices.len() as i32);
            }
            let sub = g.induced(&comp.vertices);
            if sub.vertex_count() <= CHARPOLY_MAX_VERTICES {
                poly::eval_reversed(&poly::char_poly(&sub), t)
            } else {
                dense_det_i_minus_ta(&sub, t)
            }
        })
        .product()
}

fn dense_det_i_minus_ta(g: &Graph, t: f64) -> f64 {
    let n = g.vertex_count();
    let mut m = vec![vec![0.0f64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for &(u, v) in g.edges() {
        m[u][v] -= t;
    }
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&a, &b| m[a][k].abs().partial_cmp(&m[b][k].abs()).unwrap())
            .unwrap();
        if m[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            m.swap(pivot, k);
            det = -det;
        }
        det *= m[k][k];
        let (head, tail) = m.split_at_mut(k + 1);
        let pivot_row = &head[k];
        for row in tail.iter_mut() {
            let f = row[k] / pivot_row[k];
            if f != 0.0 {
                for j in k..n {
                    row[j] -= f * pivot_row[j];
                }
            }
        }
    }
    det
}

/// Artin–Mazur zeta function `1 / det(I - tA)`; `+inf` at or beyond the
/// radius of convergence `1/lambda`.
pub fn zeta_eval(g: &Graph, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("zeta argument must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let lambda = spectral_radius(g)?;
    if lambda > 0.0 && t * lambda >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let det = det_i_minus_ta(g, t);
    Ok(if det <= 0.0 { f64::INFINITY } else { 1.0 / det })
}

/// Truncated orbit product for `1/zeta(t)` with a rigorous tail bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductBound {
    /// `prod_{p <= p_max} (1 - t^p)^{c_p}`, an upper bound for `1/zeta(t)`.
    pub value: f64,
    /// `1/zeta(t)` lies in `[value - tail_bound, value]`.
    pub tail_bound: f64,
}

impl ProductBound {
    pub fn lower(&self) -> f64 {
        self.value - self.tail_bound
    }

    /// Interval membership with a relative allowance for float rounding.
    pub fn contains(&self, x: f64) -> bool {
        let slack = 1e-12 * self.value.abs().max(x.abs());
        x >= self.lower() - slack && x <= self.value + slack
    }
}

/// Partial product of `(1 - t^p)^{c_p}` over orbit periods `p <= p_max`.
///
/// The tail uses `c_p <= N_p / p <= C lambda^p / p` with `C` the number of
/// essential vertices, so `prod_{p > p_max} >= exp(-T)` with
/// `T = C (t lambda)^{p_max+1} / ((p_max+1)(1 - t lambda)(1 - t^{p_max+1}))`.
/// When every component is a simple cycle the orbit set is finite and the
/// missing factors are known exactly.
pub fn zeta_product_truncated(g: &Graph, t: f64, p_max: usize) -> Result<ProductBound> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(ProductBound {
            value: 1.0,
            tail_bound: 0.0,
        });
    }
    let comps = scc_decompose(g);
    let mut local = vec![0usize; g.vertex_count()];
    let mut lambda = 0.0f64;
    for comp in &comps {
        lambda = lambda.max(component_radius(g, comp, &mut local)?);
    }
    if t * lambda >= 1.0 {
        return Err(Error::Domain(format!(
            "t = {t} is not below 1/lambda = {}",
            1.0 / lambda
        )));
    }
    let census = orbit_counts(g, p_max.max(1));
    let value = census.inverse_zeta_partial(t, p_max);

    let tail_factor = if comps.iter().all(Component::is_cycle) {
        comps
            .iter()
            .map(|c| c.vertices.len())
            .filter(|&len| len > p_max)
            .map(|len| 1.0 - t.powi(len as i32))
            .product::<f64>()
    } else {
        let c = essential_vertices(g).len() as f64;
        // slightly inflated radius keeps the bound valid under rounding in lambda
        let rate = t * lambda * (1.0 + 1e-9);
        let next = (p_max + 1) as f64;
        let tail = c * rate.powf(next) / (next * (1.0 - rate) * (1.0 - t.powf(next)));
        (-tail).exp()
    };
    Ok(ProductBound {
        value,
        tail_bound: value * (1.0 - tail_factor),
    })
}

#[derive(Clone, Debug)]
pub struct ParryMeasure {
    pub lambda: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// `mu(u) = w_u v_u`.
    pub vertex_mass: Vec<f64>,
    /// `mu(e) = w_{i(e)} v_{t(e)} / lambda`, in canonical edge order.
    pub edge_mass: Vec<f64>,
}

/// Measure of maximal entropy of an irreducible edge shift.
pub fn parry_measure(g: &Graph) -> Result<ParryMeasure> {
    let data = perron_data(g)?;
    Ok(parry_from_data(g, &data))
}

pub(crate) fn parry_from_data(g: &Graph, data: &SpectralData) -> ParryMeasure {
    let vertex_mass = data
        .left
        .iter()
        .zip(&data.right)
        .map(|(w, v)| w * v)
        .collect();
    let edge_mass = g
        .edges()
        .iter()
        .map(|&(u, v)| data.left[u] * data.right[v] / data.lambda)
        .collect();
    ParryMeasure {
        lambda: data.lambda,
        left: data.left.clone(),
        right: data.right.clone(),
        vertex_mass,
        edge_mass,
    }
}

/// Cylinder mass `w_{i(b_1)} lambda^{-n} v_{t(b_n)}` of an `n`-edge path.
pub fn measure_of_path(m: &ParryMeasure, g: &Graph, b: &Path) -> Result<f64> {
    if !b.is_valid(g) || m.left.len() != g.vertex_count() {
        return Err(Error::InvalidPath(format!("{b:?}")));
    }
    Ok(m.left[b.start] * m.lambda.powi(-(b.len() as i32)) * m.right[b.end(g)])
}

/// Entropy of an edge shift; the empty shift is distinguished.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Entropy {
    Empty,
    Value(f64),
}

/// `beta = exp(h)`: spectral radius of the essential part, 0 when empty.
pub fn beta(g: &Graph) -> Result<f64> {
    // The radius ignores vertices outside cycles already.
    spectral_radius(g)
}

pub fn entropy(g: &Graph) -> Result<Entropy> {
    let b = beta(g)?;
    Ok(if b == 0.0 {
        Entropy::Empty
    } else {
        Entropy::Value(b.ln().max(0.0))
    })
}
