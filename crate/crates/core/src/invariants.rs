//! Structural invariants of a single graph (z, m, U, R, Cheeger constants,
//! spectral gap) and the condition diagnostics for graph sequences.
//!
//! Quantities defined as suprema are searched up to an explicit cap and
//! reported as [`Bounded`]: exact, or only known to be at least the cap.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::graph::{
    enumerate_periodic, essential_subgraph, is_irreducible, period, Graph, DEFAULT_PATH_CAP,
};
use crate::limits::orbit_counts;
use crate::spectral::{parry_from_data, perron_data, spectral_radius, SpectralData};

pub const DEFAULT_Z_CAP: u64 = 64;
pub const DEFAULT_U_CAP: u64 = 32;
pub const CHEEGER_MAX_VERTICES: usize = 24;
/// Traces are compared up to this period at most in [`condition_report`].
pub const TRACE_CHECK_MAX: usize = 64;

/// A supremum searched up to a cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum Bounded {
    Exact(u64),
    /// The property held for every value up to and including the cap.
    AtLeast(u64),
}

impl Bounded {
    pub fn value(self) -> u64 {
        match self {
            Bounded::Exact(v) | Bounded::AtLeast(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Bounded::Exact(_))
    }

    /// Minimum of two bounded quantities, exact only when that is certain.
    pub fn min(self, other: Bounded) -> Bounded {
        use Bounded::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Exact(a.min(b)),
            (Exact(a), AtLeast(b)) | (AtLeast(b), Exact(a)) => {
                if a <= b {
                    Exact(a)
                } else {
                    AtLeast(b)
                }
            }
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
        }
    }
}

impl fmt::Display for Bounded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bounded::Exact(v) => write!(f, "{v}"),
            Bounded::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

impl Serialize for Bounded {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Caps for the searches in this module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    pub z: u64,
    pub u: u64,
    /// Closed walks enumerated per period while computing z.
    pub orbit_walks: u64,
    pub cheeger_vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            z: DEFAULT_Z_CAP,
            u: DEFAULT_U_CAP,
            orbit_walks: DEFAULT_PATH_CAP,
            cheeger_vertices: CHEEGER_MAX_VERTICES,
        }
    }
}

/// `m(G) = ceil(log_lambda |V|)`.
pub fn compute_m(g: &Graph) -> Result<u64> {
    let lambda = spectral_radius(g)?;
    m_from_lambda(lambda, g.vertex_count())
}

fn m_from_lambda(lambda: f64, vertex_count: usize) -> Result<u64> {
    if lambda <= 1.0 + 1e-12 {
        return Err(Error::Domain(format!("m(G) needs lambda > 1, got {lambda}")));
    }
    let x = (vertex_count as f64).ln() / lambda.ln();
    let near = x.round();
    // lambda is only known to ~1e-10, so values this close to an integer
    // are taken to be that integer
    let m = if (x - near).abs() <= 1e-9 * near.max(1.0) {
        near
    } else {
        x.ceil()
    };
    Ok(m.max(0.0) as u64)
}

/// Separation of periodic orbits: the largest `n <= cap` such that distinct
/// periodic orbits of period at most `n` traverse disjoint vertex sets.
///
/// Orbits are added by increasing period with a vertex-owner map. A closed
/// walk that repeats a vertex contains a shorter closed walk of another
/// orbit on those vertices, so the owner map also catches non-simple
/// orbits without comparing every pair.
pub fn compute_z(g: &Graph, cap: u64, walk_cap: u64) -> Result<Bounded> {
    if cap == 0 {
        return Err(Error::Domain("z cap must be at least 1".into()));
    }
    let mut owner = vec![usize::MAX; g.vertex_count()];
    let mut next_id = 0usize;
    for p in 1..=cap {
        let set = enumerate_periodic(g, p as usize, walk_cap)?;
        for orbit in set.orbits.iter().filter(|o| o.least_period == p as usize) {
            if orbit.vertices.iter().any(|&v| owner[v] != usize::MAX) {
                return Ok(Bounded::Exact(p - 1));
            }
            for &v in &orbit.vertices {
                owner[v] = next_id;
            }
            next_id += 1;
        }
    }
    Ok(Bounded::AtLeast(cap))
}

/// Rows `e_u A^k` for `k = 0..=kmax`, entries saturated at 2.
fn saturated_rows(g: &Graph, u: usize, kmax: usize) -> Vec<Vec<u8>> {
    let n = g.vertex_count();
    let mut rows = Vec::with_capacity(kmax + 1);
    let mut row = vec![0u8; n];
    row[u] = 1;
    rows.push(row);
    for k in 1..=kmax {
        let prev = &rows[k - 1];
        let mut next = vec![0u8; n];
        for (x, &c) in prev.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for y in g.successors(x) {
                next[y] = (next[y] + c).min(2);
            }
        }
        rows.push(next);
    }
    rows
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub u1: Bounded,
    pub u2: Bounded,
    pub u: Bounded,
}

/// `U1`, `U2` and `U = min(U1, U2)`.
pub fn compute_u(g: &Graph, cap: u64) -> Result<UniquenessReport> {
    compute_u_with(g, cap, Execution::default())
}

pub fn compute_u_with(g: &Graph, cap: u64, exec: Execution) -> Result<UniquenessReport> {
    if cap == 0 {
        return Err(Error::Domain("U cap must be at least 1".into()));
    }
    let cap_us = cap as usize;

    // U1: largest n <= cap with every entry of A^n at most 1.
    let violated: Vec<Vec<bool>> = map_indexed(g.vertex_count() as u64, exec, |u| {
        saturated_rows(g, u as usize, cap_us)
            .iter()
            .map(|row| row.iter().any(|&c| c >= 2))
            .collect()
    });
    let ok_at = |k: usize| violated.iter().all(|v| !v[k]);
    let largest = (0..=cap_us).rev().find(|&k| ok_at(k)).unwrap_or(0) as u64;
    let u1 = if largest == cap {
        Bounded::AtLeast(cap)
    } else {
        Bounded::Exact(largest)
    };

    // U2 counts words of the shift, i.e. paths in the essential part.
    // Paths of length t from u with b_s = b_t number
    //   sum_x (A^{s-1})[u][x] * (A^{t-s})[x][x].
    let h = essential_subgraph(g);
    let n = h.vertex_count();
    let diag: Vec<Vec<u8>> = map_indexed(n as u64, exec, |x| {
        saturated_rows(&h, x as usize, cap_us.saturating_sub(1))
            .iter()
            .map(|row| row[x as usize])
            .collect()
    });
    let first_bad: Vec<usize> = map_indexed(n as u64, exec, |u| {
        let rows = saturated_rows(&h, u as usize, cap_us.saturating_sub(2));
        for t in 2..=cap_us {
            for s in 1..t {
                let (j, k) = (s - 1, t - s);
                let mut count = 0u32;
                for (x, &r) in rows[j].iter().enumerate() {
                    if r != 0 {
                        count += u32::from(r) * u32::from(diag[x][k]);
                        if count >= 2 {
                            return t;
                        }
                    }
                }
            }
        }
        usize::MAX
    });
    let u2 = match first_bad.into_iter().min() {
        Some(t) if t != usize::MAX => Bounded::Exact(t as u64 - 1),
        _ => Bounded::AtLeast(cap),
    };
    Ok(UniquenessReport {
        u1,
        u2,
        u: u1.min(u2),
    })
}

/// Transition length: the least `n` such that every ordered pair of
/// vertices is joined by a path of some length `1 <= k <= n`.
pub fn compute_r(g: &Graph) -> Result<u64> {
    if !is_irreducible(g) {
        return Err(Error::NotIrreducible);
    }
    let n = g.vertex_count();
    let mut worst = 0usize;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for u in 0..n {
        dist.fill(usize::MAX);
        queue.clear();
        // distances count at least one edge, so u itself is reached by a cycle
        for v in g.successors(u) {
            if dist[v] == usize::MAX {
                dist[v] = 1;
                queue.push_back(v);
            }
        }
        while let Some(x) = queue.pop_front() {
            for y in g.successors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        worst = worst.max(*dist.iter().max().expect("nonempty graph"));
    }
    Ok(worst as u64)
}

fn check_cheeger_size(g: &Graph, limit: usize) -> Result<()> {
    if g.vertex_count() > limit {
        return Err(Error::SizeCap {
            what: "exhaustive Cheeger search",
            limit,
            actual: g.vertex_count(),
        });
    }
    if g.vertex_count() < 2 {
        return Err(Error::Domain("Cheeger constants need at least 2 vertices".into()));
    }
    Ok(())
}

/// Visits every nonempty proper subset in Gray-code order, passing the
/// membership bits and the vertex just toggled.
fn gray_subsets(n: usize, mut visit: impl FnMut(u32, usize)) {
    let mut set = 0u32;
    for i in 1u64..(1u64 << n) {
        let v = i.trailing_zeros() as usize;
        set ^= 1 << v;
        visit(set, v);
    }
}

/// Unweighted Cheeger constant `min |E(S, S^c)| / |S|` over `0 < |S| <= |V|/2`.
pub fn cheeger(g: &Graph) -> Result<Ratio<u64>> {
    check_cheeger_size(g, CHEEGER_MAX_VERTICES)?;
    let n = g.vertex_count();
    let full = (1u32 << n) - 1;
    let mut cut = 0i64;
    let mut best: Option<Ratio<u64>> = None;
    gray_subsets(n, |set, v| {
        let inside = |x: usize| set & (1 << x) != 0;
        let sign = if inside(v) { 1 } else { -1 };
        for w in g.successors(v) {
            if w != v && !inside(w) {
                cut += sign;
            }
        }
        for &e in g.in_edges(v) {
            let w = g.source(e);
            if w != v && inside(w) {
                cut -= sign;
            }
        }
        let size = set.count_ones() as usize;
        if set != full && 2 * size <= n {
            let r = Ratio::new(cut as u64, size as u64);
            if best.is_none_or(|b| r < b) {
                best = Some(r);
            }
        }
    });
    best.ok_or_else(|| Error::Domain("no admissible subset".into()))
}

/// Weighted Cheeger constant with Parry edge masses
/// `min F(S, S^c) / min(F(S), F(S^c))` over proper nonempty `S`.
pub fn weighted_cheeger(g: &Graph) -> Result<f64> {
    check_cheeger_size(g, CHEEGER_MAX_VERTICES)?;
    let data = perron_data(g)?;
    Ok(weighted_cheeger_from(g, &data))
}

fn weighted_cheeger_from(g: &Graph, data: &SpectralData) -> f64 {
    let mu = parry_from_data(g, data);
    let n = g.vertex_count();
    let full = (1u32 << n) - 1;
    let vertex_out: Vec<f64> = (0..n)
        .map(|u| g.out_edges(u).map(|e| mu.edge_mass[e]).sum())
        .collect();
    let total: f64 = vertex_out.iter().sum();
    let mut cut = 0.0f64;
    let mut mass = 0.0f64;
    let mut best = f64::INFINITY;
    gray_subsets(n, |set, v| {
        let inside = |x: usize| set & (1 << x) != 0;
        let sign = if inside(v) { 1.0 } else { -1.0 };
        mass += sign * vertex_out[v];
        for e in g.out_edges(v) {
            let w = g.target(e);
            if w != v && !inside(w) {
                cut += sign * mu.edge_mass[e];
            }
        }
        for &e in g.in_edges(v) {
            let w = g.source(e);
            if w != v && inside(w) {
                cut -= sign * mu.edge_mass[e];
            }
        }
        if set != full {
            let denom = mass.min(total - mass);
            best = best.min(cut.max(0.0) / denom);
        }
    });
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralGap {
    pub value: f64,
    /// True when `lambda` is the only nonzero eigenvalue and the gap is set to 1.
    pub conventional: bool,
}

/// `min 1 - |lambda_i| / lambda` over the nonzero spectrum without `lambda`.
pub fn spectral_gap(g: &Graph) -> Result<SpectralGap> {
    let data = perron_data(g)?;
    gap_from(&data)
}

fn gap_from(data: &SpectralData) -> Result<SpectralGap> {
    let mut spectrum = data.nonzero_spectrum()?.to_vec();
    let lambda = data.lambda;
    let closest = spectrum
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - lambda)
                .norm()
                .total_cmp(&(b.1 - lambda).norm())
        })
        .map(|(i, _)| i);
    if let Some(i) = closest {
        spectrum.swap_remove(i);
    }
    if spectrum.is_empty() {
        return Ok(SpectralGap {
            value: 1.0,
            conventional: true,
        });
    }
    let value = spectrum
        .iter()
        .map(|z| 1.0 - z.norm() / lambda)
        .fold(f64::INFINITY, f64::min);
    // eigenvalues on the circle |z| = lambda come back with rounding noise
    let value = if value.abs() < 1e-9 { 0.0 } else { value };
    Ok(SpectralGap {
        value,
        conventional: false,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub lambda: f64,
    pub d_max: usize,
    /// `None` when `lambda <= 1`.
    pub m: Option<u64>,
    pub z: Bounded,
    pub u1: Bounded,
    pub u2: Bounded,
    pub u: Bounded,
    pub r: u64,
    /// Exact rational, `None` above the vertex cap.
    #[serde(serialize_with = "ser_ratio")]
    pub cheeger: Option<Ratio<u64>>,
    pub weighted_cheeger: Option<f64>,
    /// `None` when the spectrum is too large to compute.
    pub gap: Option<SpectralGap>,
    pub per: usize,
    /// `max w / min w` and `max v / min v` of the Perron eigenvectors.
    pub eigen_distortion: (f64, f64),
    /// `max mu / min mu` over vertices and over edges.
    pub measure_distortion: (f64, f64),
    pub caps: Caps,
}

fn ser_ratio<S: Serializer>(r: &Option<Ratio<u64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.collect_str(r),
        None => s.serialize_none(),
    }
}

/// Every invariant of an irreducible graph.
pub fn analyze(g: &Graph, caps: &Caps) -> Result<InvariantReport> {
    if !is_irreducible(g) {
        return Err(Error::NotIrreducible);
    }
    let data = perron_data(g)?;
    let mu = parry_from_data(g, &data);
    let m = m_from_lambda(data.lambda, g.vertex_count()).ok();
    let z = compute_z(g, caps.z, caps.orbit_walks)?;
    let u = compute_u(g, caps.u)?;
    let r = compute_r(g)?;
    let small = g.vertex_count() <= caps.cheeger_vertices.min(CHEEGER_MAX_VERTICES);
    let (cheeger_c, cheeger_w) = if small && g.vertex_count() >= 2 {
        (Some(cheeger(g)?), Some(weighted_cheeger_from(g, &data)))
    } else {
        (None, None)
    };
    let gap = match gap_from(&data) {
        Ok(gap) => Some(gap),
        Err(e) if e.is_cap_violation() => None,
        Err(e) => return Err(e),
    };
    Ok(InvariantReport {
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        lambda: data.lambda,
        d_max: g.d_max(),
        m,
        z,
        u1: u.u1,
        u2: u.u2,
        u: u.u,
        r,
        cheeger: cheeger_c,
        weighted_cheeger: cheeger_w,
        gap,
        per: period(g).expect("irreducible graphs have a period"),
        eigen_distortion: data.distortion(),
        measure_distortion: (spread(&mu.vertex_mass), spread(&mu.edge_mass)),
        caps: *caps,
    })
}

fn spread(x: &[f64]) -> f64 {
    let max = x.iter().cloned().fold(f64::MIN, f64::max);
    let min = x.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

/// Trend checks over a graph sequence, one per condition.
///
/// Asymptotic conditions can only be checked as trends on a finite prefix:
/// a slack or distortion counts as bounded when its maximum over the second
/// half of the sequence does not exceed its maximum over the first half.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionFlags {
    /// C1: `d_max` constant along the sequence.
    pub bounded_degree: bool,
    /// C2: z nondecreasing and growing from first to last.
    pub z_growing: bool,
    /// C3: `min z/m`, positive when satisfied.
    pub z_over_m: f64,
    pub fast_separation: bool,
    /// C4: `m - U` does not grow.
    pub local_uniqueness: bool,
    /// C5: `R - m` does not grow.
    pub small_diameter: bool,
    /// C6: Parry vertex and edge distortion does not grow.
    pub measure_distortion_bounded: bool,
    /// C7: eigenvector distortion `max(w ratio, v ratio)` does not grow.
    pub eigen_distortion_bounded: bool,
    /// C8: unweighted Cheeger constant positive wherever computed.
    pub expander: bool,
    /// Standing assumption: equal traces `tr(A_n^p)` for `p <= trace_horizon`.
    pub traces_equal: bool,
    pub trace_horizon: usize,
    /// True when the horizon covers every vertex count, so equal traces
    /// mean equal nonzero spectra.
    pub trace_check_complete: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub rows: Vec<InvariantReport>,
    pub flags: ConditionFlags,
}

fn non_growing(xs: &[f64]) -> bool {
    if xs.len() < 2 {
        return true;
    }
    let mid = xs.len() / 2;
    let first = xs[..mid].iter().cloned().fold(f64::MIN, f64::max);
    let second = xs[mid..].iter().cloned().fold(f64::MIN, f64::max);
    second <= first + 1e-9 * first.abs().max(1.0)
}

/// Invariants of each graph plus trend checks of the sequence conditions.
pub fn condition_report(gs: &[Graph], caps: &Caps) -> Result<ConditionReport> {
    condition_report_with(gs, caps, Execution::default())
}

pub fn condition_report_with(gs: &[Graph], caps: &Caps, exec: Execution) -> Result<ConditionReport> {
    if gs.is_empty() {
        return Err(Error::Domain("empty graph sequence".into()));
    }
    let rows = crate::exec::map_slice(gs, exec, |g| analyze(g, caps))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let bounded_degree = rows.iter().all(|r| r.d_max == rows[0].d_max);
    let zs: Vec<u64> = rows.iter().map(|r| r.z.value()).collect();
    let z_growing = zs.windows(2).all(|w| w[0] <= w[1]) && (zs.len() < 2 || zs[0] < zs[zs.len() - 1]);
    let z_over_m = rows
        .iter()
        .filter_map(|r| r.m.filter(|&m| m > 0).map(|m| r.z.value() as f64 / m as f64))
        .fold(f64::INFINITY, f64::min);
    let m_of = |r: &InvariantReport| r.m.unwrap_or(0) as f64;
    let u_slack: Vec<f64> = rows.iter().map(|r| m_of(r) - r.u.value() as f64).collect();
    let r_slack: Vec<f64> = rows.iter().map(|r| r.r as f64 - m_of(r)).collect();
    let mu_dist: Vec<f64> = rows
        .iter()
        .map(|r| r.measure_distortion.0.max(r.measure_distortion.1))
        .collect();
    let eig_dist: Vec<f64> = rows
        .iter()
        .map(|r| r.eigen_distortion.0.max(r.eigen_distortion.1))
        .collect();
    let expander = rows
        .iter()
        .filter_map(|r| r.cheeger)
        .all(|c| !c.is_zero());

    let max_vertices = gs.iter().map(Graph::vertex_count).max().unwrap_or(0);
    let trace_horizon = max_vertices.clamp(1, TRACE_CHECK_MAX);
    let reference = orbit_counts(&gs[0], trace_horizon).traces;
    let traces_equal = gs[1..]
        .iter()
        .all(|g| orbit_counts(g, trace_horizon).traces == reference);

    Ok(ConditionReport {
        flags: ConditionFlags {
            bounded_degree,
            z_growing,
            z_over_m,
            fast_separation: z_over_m > 0.0 && z_over_m.is_finite() || rows.iter().all(|r| r.m.is_none()),
            local_uniqueness: non_growing(&u_slack),
            small_diameter: non_growing(&r_slack),
            measure_distortion_bounded: non_growing(&mu_dist),
            eigen_distortion_bounded: non_growing(&eig_dist),
            expander,
            traces_equal,
            trace_horizon,
            trace_check_complete: trace_horizon >= max_vertices,
        },
        rows,
    })
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One CSV row per graph, numbered from `first_n`.
pub fn write_report_csv<W: Write>(rows: &[InvariantReport], first_n: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n", "|V|", "|E|", "d_max", "m", "z", "U1", "U2", "U", "R", "c", "c_w", "gap", "per",
        "flags",
    ])?;
    for (i, r) in rows.iter().enumerate() {
        let mut flags = Vec::new();
        if r.gap.is_some_and(|g| g.conventional) {
            flags.push("gap_convention");
        }
        if r.gap.is_none() {
            flags.push("gap_skipped");
        }
        if r.cheeger.is_none() {
            flags.push("cheeger_skipped");
        }
        if !r.z.is_exact() {
            flags.push("z_capped");
        }
        if !r.u.is_exact() {
            flags.push("u_capped");
        }
        w.write_record([
            (first_n + i).to_string(),
            r.vertex_count.to_string(),
            r.edge_count.to_string(),
            r.d_max.to_string(),
            opt(r.m),
            r.z.to_string(),
            r.u1.to_string(),
            r.u2.to_string(),
            r.u.to_string(),
            r.r.to_string(),
            opt(r.cheeger),
            opt(r.weighted_cheeger.map(crate::harness::fmt_float)),
            opt(r.gap.map(|g| crate::harness::fmt_float(g.value))),
            r.per.to_string(),
            flags.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Periodic orbits as sets of closed walks, for cross-checks.
#[doc(hidden)]
pub fn primitive_root(walk: &[usize]) -> Vec<usize> {
    let p = walk.len();
    let s = (1..=p)
        .find(|&s| p.is_multiple_of(s) && (0..p).all(|i| walk[i] == walk[(i + s) % p]))
        .unwrap_or(p);
    let root = &walk[..s];
    (0..s)
        .map(|r| {
            let mut rot = root[r..].to_vec();
            rot.extend_from_slice(&root[..r]);
            rot
        })
        .min()
        .expect("nonempty walk")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, n_block_graph, Path};
    use approx::assert_relative_eq;

    fn block(g: &Graph, n: usize) -> Graph {
        n_block_graph(g, n, DEFAULT_PATH_CAP).unwrap()
    }

    #[test]
    fn bounded_min() {
        use Bounded::*;
        assert_eq!(Exact(3).min(AtLeast(5)), Exact(3));
        assert_eq!(Exact(7).min(AtLeast(5)), AtLeast(5));
        assert_eq!(AtLeast(7).min(AtLeast(5)), AtLeast(5));
        assert_eq!(AtLeast(4).to_string(), ">=4");
    }

    #[test]
    fn m_examples() {
        assert_eq!(compute_m(&Graph::full(2)).unwrap(), 1);
        assert_eq!(compute_m(&Graph::full(3)).unwrap(), 1);
        assert!(compute_m(&Graph::cycle(3)).is_err());
        assert_eq!(compute_m(&block(&Graph::full(2), 5)).unwrap(), 5);
    }

    #[test]
    fn z_examples() {
        assert_eq!(compute_z(&Graph::golden(), 64, DEFAULT_PATH_CAP).unwrap(), Bounded::Exact(1));
        // a single orbit never meets another one
        assert_eq!(compute_z(&Graph::cycle(3), 20, DEFAULT_PATH_CAP).unwrap(), Bounded::AtLeast(20));
        assert_eq!(compute_z(&Graph::full(2), 20, DEFAULT_PATH_CAP).unwrap(), Bounded::Exact(1));
        let two_loops = build_graph(2, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(compute_z(&two_loops, 10, DEFAULT_PATH_CAP).unwrap(), Bounded::AtLeast(10));
    }

    /// Direct definition: all pairs of closed walks of length <= n from
    /// distinct orbits must be vertex-disjoint.
    fn z_double_loop(g: &Graph, max_p: usize) -> Bounded {
        let mut walks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for p in 1..=max_p {
            for orbit in enumerate_periodic(g, p, DEFAULT_PATH_CAP).unwrap().orbits {
                // every rotation is its own element of Per_p
                for r in 0..p {
                    let mut w = orbit.edges[r..].to_vec();
                    w.extend_from_slice(&orbit.edges[..r]);
                    walks.push((primitive_root(&w), orbit.vertices.clone()));
                }
            }
            for a in &walks {
                for b in &walks {
                    if a.0 != b.0 && a.1.iter().any(|v| b.1.contains(v)) {
                        return Bounded::Exact(p as u64 - 1);
                    }
                }
            }
        }
        Bounded::AtLeast(max_p as u64)
    }

    #[test]
    fn z_matches_double_loop() {
        let graphs = [
            Graph::golden(),
            Graph::full(2),
            Graph::cycle(3),
            block(&Graph::golden(), 3),
            block(&Graph::golden(), 5),
            block(&Graph::full(2), 4),
            build_graph(4, &[(0, 1), (1, 0), (2, 3), (3, 2), (1, 2)]).unwrap(),
            build_graph(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap(),
        ];
        for g in &graphs {
            assert_eq!(compute_z(g, 6, DEFAULT_PATH_CAP).unwrap(), z_double_loop(g, 6), "{g:?}");
        }
    }

    #[test]
    fn u_examples() {
        let full = compute_u(&Graph::full(2), 16).unwrap();
        assert_eq!(full.u1, Bounded::Exact(1));
        assert_eq!(full.u2, Bounded::Exact(2));
        assert_eq!(full.u, Bounded::Exact(1));
        let c3 = compute_u(&Graph::cycle(3), 16).unwrap();
        assert_eq!(c3.u1, Bounded::AtLeast(16));
        assert_eq!(c3.u, Bounded::AtLeast(16));
    }

    /// U2 straight from its definition by path enumeration.
    fn u2_brute(g: &Graph, cap: usize) -> Bounded {
        for t in 2..=cap {
            let paths = crate::graph::enumerate_paths(g, t, DEFAULT_PATH_CAP).unwrap().paths;
            for u in 0..g.vertex_count() {
                for s in 1..t {
                    let count = paths
                        .iter()
                        .filter(|p: &&Path| p.start == u && p.edges[s - 1] == p.edges[t - 1])
                        .count();
                    if count > 1 {
                        return Bounded::Exact(t as u64 - 1);
                    }
                }
            }
        }
        Bounded::AtLeast(cap as u64)
    }

    #[test]
    fn u2_matches_path_enumeration() {
        for g in [
            Graph::golden(),
            Graph::full(2),
            Graph::full(3),
            block(&Graph::golden(), 3),
            block(&Graph::golden(), 4),
            block(&Graph::full(2), 3),
        ] {
            assert_eq!(compute_u(&g, 9).unwrap().u2, u2_brute(&g, 9), "{g:?}");
        }
    }

    #[test]
    fn r_examples() {
        assert_eq!(compute_r(&Graph::full(2)).unwrap(), 1);
        assert_eq!(compute_r(&Graph::cycle(3)).unwrap(), 3);
        assert_eq!(compute_r(&Graph::golden()).unwrap(), 2);
        assert!(compute_r(&build_graph(2, &[(0, 0), (1, 1)]).unwrap()).is_err());
    }

    #[test]
    fn cheeger_examples() {
        assert_eq!(cheeger(&Graph::full(2)).unwrap(), Ratio::from_integer(1));
        assert_eq!(cheeger(&Graph::cycle(3)).unwrap(), Ratio::from_integer(1));
        assert_relative_eq!(weighted_cheeger(&Graph::full(2)).unwrap(), 0.5, epsilon = 1e-12);
        assert!(cheeger(&Graph::cycle(25)).is_err());
    }

    #[test]
    fn cheeger_matches_direct_subset_scan() {
        let g = block(&Graph::golden(), 4);
        let n = g.vertex_count();
        let mut best = Ratio::from_integer(u64::MAX);
        for set in 1u32..(1 << n) {
            let size = set.count_ones() as u64;
            if 2 * size as usize > n {
                continue;
            }
            let cut = g
                .edges()
                .iter()
                .filter(|&&(u, v)| set & (1 << u) != 0 && set & (1 << v) == 0)
                .count() as u64;
            best = best.min(Ratio::new(cut, size));
        }
        assert_eq!(cheeger(&g).unwrap(), best);
    }

    #[test]
    fn gap_examples() {
        assert_relative_eq!(
            spectral_gap(&Graph::golden()).unwrap().value,
            0.618_033_988_749_895,
            epsilon = 1e-9
        );
        assert_eq!(spectral_gap(&Graph::cycle(3)).unwrap().value, 0.0);
        let full = spectral_gap(&Graph::full(2)).unwrap();
        assert_eq!(full.value, 1.0);
        assert!(full.conventional);
    }

    #[test]
    fn golden_blocks_satisfy_conditions() {
        let gs: Vec<Graph> = (1..=8).map(|n| block(&Graph::golden(), n)).collect();
        let report = condition_report(&gs, &Caps::default()).unwrap();
        let f = &report.flags;
        assert!(f.bounded_degree && f.fast_separation && f.local_uniqueness);
        assert!(f.small_diameter && f.eigen_distortion_bounded && f.traces_equal);
    }

    #[test]
    fn mismatched_traces_are_flagged() {
        let report = condition_report(&[Graph::golden(), Graph::full(2)], &Caps::default()).unwrap();
        assert!(!report.flags.traces_equal);
        let single = condition_report(&[Graph::full(2)], &Caps::default()).unwrap();
        assert!(single.flags.local_uniqueness && single.flags.small_diameter && single.flags.traces_equal);
    }
}
