//! Reference values the random ensemble converges to: periodic-orbit
//! counts, `1/zeta(alpha)`, the two-sided emptiness bounds, the limiting
//! component-count distribution and the limiting entropy.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{closed_walk_counts, essential_vertices, scc_decompose, Component, Graph};
use crate::invariants::{compute_z, Bounded, DEFAULT_Z_CAP};
use crate::spectral::{component_radius, det_i_minus_ta, poly, spectral_radius, CHARPOLY_MAX_VERTICES};

/// Traces `N_p = tr(A^p)` and orbit counts `c_p` (orbits of least period
/// `p`) for `p = 1..=p_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitCensus {
    pub p_max: usize,
    /// `traces[p - 1] = N_p`.
    pub traces: Vec<BigInt>,
    /// `counts[p - 1] = c_p`.
    pub counts: Vec<BigInt>,
}

/// Number-theoretic Möbius function.
pub(crate) fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `N_p` through Newton's identities on the characteristic polynomial.
fn traces_from_char_poly(coeffs: &[BigInt], p_max: usize) -> Vec<BigInt> {
    let n = coeffs.len() - 1;
    // e_k is the coefficient of t^{n-k}
    let e = |k: usize| &coeffs[n - k];
    let mut traces: Vec<BigInt> = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let mut acc = BigInt::zero();
        for k in 1..p.min(n + 1) {
            acc += e(k) * &traces[p - k - 1];
        }
        if p <= n {
            acc += e(p) * BigInt::from(p);
        }
        traces.push(-acc);
    }
    traces
}

fn component_traces(g: &Graph, comp: &Component, p_max: usize) -> Vec<BigInt> {
    if comp.is_cycle() {
        let len = comp.vertices.len();
        return (1..=p_max)
            .map(|p| {
                if p % len == 0 {
                    BigInt::from(len)
                } else {
                    BigInt::zero()
                }
            })
            .collect();
    }
    let sub = g.induced(&comp.vertices);
    if sub.vertex_count() <= CHARPOLY_MAX_VERTICES {
        traces_from_char_poly(&poly::char_poly(&sub), p_max)
    } else {
        closed_walk_counts(&sub, p_max)
    }
}

/// Exact orbit census up to period `p_max`.
pub fn orbit_counts(g: &Graph, p_max: usize) -> OrbitCensus {
    let mut traces = vec![BigInt::zero(); p_max];
    for comp in scc_decompose(g) {
        for (acc, t) in traces.iter_mut().zip(component_traces(g, &comp, p_max)) {
            *acc += t;
        }
    }
    OrbitCensus::from_traces(traces)
}

impl OrbitCensus {
    /// Möbius inversion `c_p = (1/p) sum_{d | p} mu(p/d) N_d`.
    pub fn from_traces(traces: Vec<BigInt>) -> OrbitCensus {
        let p_max = traces.len();
        let counts = (1..=p_max)
            .map(|p| {
                let mut acc = BigInt::zero();
                for d in 1..=p {
                    if p % d == 0 {
                        let mu = mobius(p / d);
                        if mu != 0 {
                            acc += &traces[d - 1] * mu;
                        }
                    }
                }
                let (q, r) = acc.div_rem(&BigInt::from(p));
                debug_assert!(r.is_zero(), "orbit count must be integral");
                q
            })
            .collect();
        OrbitCensus {
            p_max,
            traces,
            counts,
        }
    }

    pub fn count(&self, p: usize) -> &BigInt {
        &self.counts[p - 1]
    }

    pub fn trace(&self, p: usize) -> &BigInt {
        &self.traces[p - 1]
    }

    /// `c_p ln(1 - t^p)`, evaluated in log space so huge `c_p` are safe.
    pub fn log_factor(&self, t: f64, p: usize) -> f64 {
        let c = self.count(p);
        if c.is_zero() || t == 0.0 {
            return 0.0;
        }
        let tp = t.powi(p as i32);
        if tp >= 1.0 {
            return f64::NEG_INFINITY;
        }
        let neg_log = -(-tp).ln_1p();
        if neg_log == 0.0 {
            return 0.0;
        }
        -(big_ln(c) + neg_log.ln()).exp()
    }

    /// `prod_{p <= upto} (1 - t^p)^{c_p}`.
    pub fn inverse_zeta_partial(&self, t: f64, upto: usize) -> f64 {
        assert!(upto <= self.p_max, "census only reaches period {}", self.p_max);
        (1..=upto).map(|p| self.log_factor(t, p)).sum::<f64>().exp()
    }
}

/// Natural log of a positive big integer.
fn big_ln(x: &BigInt) -> f64 {
    debug_assert!(x.is_positive());
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head fits in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `det(I - alpha A)` below the critical value `1/lambda`, 0 at or above it.
pub fn zeta_inverse(g: &Graph, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    let lambda = spectral_radius(g)?;
    if lambda > 0.0 && alpha * lambda >= 1.0 {
        return Ok(0.0);
    }
    Ok(det_i_minus_ta(g, alpha).max(0.0))
}

/// How the lower emptiness bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LowerBoundPath {
    /// Exact product over every period up to `|E|`.
    Exact { periods: usize },
    /// Exact up to `verified`, then a geometric tail factor `exp(-tail)`.
    TailCorrected { verified: usize, tail: f64 },
    /// `alpha >= 1/lambda` beyond the verified range: only the trivial bound 0.
    Trivial { verified: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmptinessBounds {
    pub lower: f64,
    pub upper: f64,
    pub z: Bounded,
    pub lower_path: LowerBoundPath,
}

impl EmptinessBounds {
    /// Builds the bounds from an orbit census of the graph (or of any graph
    /// with the same traces).
    ///
    /// `lambda` and `tail_constant` bound `N_p <= tail_constant * lambda^p`
    /// for periods beyond the census.
    pub fn from_census(
        census: &OrbitCensus,
        z: Bounded,
        edge_count: usize,
        alpha: f64,
        lambda: f64,
        tail_constant: f64,
    ) -> Result<EmptinessBounds> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidAlpha(alpha));
        }
        if alpha == 0.0 {
            return Ok(EmptinessBounds {
                lower: 1.0,
                upper: 1.0,
                z,
                lower_path: LowerBoundPath::Exact {
                    periods: edge_count,
                },
            });
        }
        let z_periods = z.value().min(census.p_max as u64) as usize;
        let upper = census.inverse_zeta_partial(alpha, z_periods);
        let (lower, lower_path) = if edge_count <= census.p_max {
            (
                census.inverse_zeta_partial(alpha, edge_count),
                LowerBoundPath::Exact {
                    periods: edge_count,
                },
            )
        } else {
            let verified = census.p_max;
            let rate = alpha * lambda * (1.0 + 1e-9);
            if rate >= 1.0 {
                (0.0, LowerBoundPath::Trivial { verified })
            } else {
                let next = (verified + 1) as f64;
                let tail = tail_constant * rate.powf(next)
                    / (next * (1.0 - rate) * (1.0 - alpha.powf(next)));
                (
                    census.inverse_zeta_partial(alpha, verified) * (-tail).exp(),
                    LowerBoundPath::TailCorrected { verified, tail },
                )
            }
        };
        Ok(EmptinessBounds {
            lower,
            upper,
            z,
            lower_path,
        })
    }
}

/// Largest period whose census is computed directly for the lower bound
/// when a component is too large for the characteristic polynomial.
pub const LARGE_GRAPH_VERIFIED_PERIODS: usize = 24;

/// `prod_{p <= |E|} (1 - alpha^p)^{c_p} <= P(empty) <= prod_{p <= z(G)} (1 - alpha^p)^{c_p}`.
pub fn emptiness_bounds(g: &Graph, alpha: f64) -> Result<EmptinessBounds> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let z = compute_z(g, DEFAULT_Z_CAP, crate::graph::DEFAULT_PATH_CAP)?;
    let comps = scc_decompose(g);
    let small = comps
        .iter()
        .all(|c| c.is_cycle() || c.vertices.len() <= CHARPOLY_MAX_VERTICES);
    let edge_count = g.edge_count();
    let horizon = if small {
        edge_count.max(1)
    } else {
        edge_count.clamp(1, LARGE_GRAPH_VERIFIED_PERIODS)
    };
    let census = orbit_counts(g, horizon.max(z.value().min(DEFAULT_Z_CAP) as usize));
    let lambda = spectral_radius(g)?;
    let c = essential_vertices(g).len() as f64;
    EmptinessBounds::from_census(&census, z, edge_count, alpha, lambda, c)
}

#[derive(Clone, Debug, Serialize)]
pub struct IInfinityPmf {
    pub alpha: f64,
    /// `probs[k] = P(I_inf = k)` for `k = 0..=k_max`.
    pub probs: Vec<f64>,
    /// Largest orbit period included in the product.
    pub p_max: usize,
    /// Periods with exactly computed orbit counts.
    pub horizon: usize,
    /// Total probability mass missing from `probs`, rigorously bounded.
    pub bound: f64,
}

/// Largest census horizon tried while certifying the tail.
pub const MAX_PMF_HORIZON: usize = 4096;

/// Limiting distribution of the number of irreducible components below the
/// critical value: `P(I = k) = zeta(alpha)^{-1} e_k(r_1, r_2, ...)` with
/// `r = alpha^p / (1 - alpha^p)` over all periodic orbits.
///
/// Orbits sharing a period contribute equal factors, so the elementary
/// symmetric sums come from the truncated product
/// `prod_p (1 + x r_p)^{c_p}`. Orbits of period above `p_max` are dropped;
/// their total `T = sum c_p r_p` is bounded using exact counts up to the
/// horizon and `c_p <= C lambda^p / p` beyond it, and `p_max` is the
/// smallest period keeping `T <= eps`.
pub fn i_infinity_pmf(g: &Graph, alpha: f64, k_max: usize, eps: f64) -> Result<IInfinityPmf> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let comps = scc_decompose(g);
    let mut local = vec![0usize; g.vertex_count()];
    let mut lambda = 0.0f64;
    for comp in &comps {
        lambda = lambda.max(component_radius(g, comp, &mut local)?);
    }
    if lambda > 0.0 && alpha * lambda >= 1.0 {
        return Err(Error::Domain(format!(
            "alpha = {alpha} is not below the critical value 1/lambda = {}",
            1.0 / lambda
        )));
    }
    let zeta_inv = zeta_inverse(g, alpha)?;
    let r = |p: usize| {
        let a = alpha.powi(p as i32);
        a / (1.0 - a)
    };
    let finite = comps.iter().all(Component::is_cycle);

    // Certified horizon.
    let c_const = essential_vertices(g).len() as f64;
    let rate = alpha * lambda * (1.0 + 1e-9);
    let geometric_tail = |h: usize| -> f64 {
        if finite || alpha == 0.0 {
            return 0.0;
        }
        let next = (h + 1) as f64;
        c_const * rate.powf(next) / (next * (1.0 - rate) * (1.0 - alpha.powf(next)))
    };
    let longest_cycle = comps.iter().map(|c| c.vertices.len()).max().unwrap_or(0);
    // Without a characteristic polynomial each period costs a pass over all
    // walks, so large components start from a short horizon.
    let cheap = comps
        .iter()
        .all(|c| c.is_cycle() || c.vertices.len() <= CHARPOLY_MAX_VERTICES);
    let mut horizon = if cheap { (2 * g.vertex_count()).max(16) } else { 16 };
    if finite {
        horizon = horizon.max(longest_cycle);
    }
    while geometric_tail(horizon) > 0.5 * eps {
        horizon *= 2;
        if horizon > MAX_PMF_HORIZON {
            return Err(Error::CapExceeded {
                what: "I_inf tail horizon",
                cap: MAX_PMF_HORIZON as u64,
            });
        }
    }
    let census = orbit_counts(g, horizon);
    let term = |p: usize| -> f64 {
        let c = census.count(p);
        if c.is_zero() || alpha == 0.0 {
            0.0
        } else {
            (big_ln(c) + r(p).ln()).exp()
        }
    };
    let mut suffix = vec![0.0f64; horizon + 2];
    for p in (1..=horizon).rev() {
        suffix[p] = suffix[p + 1] + term(p);
    }
    let tail_geo = geometric_tail(horizon);
    let p_max = (0..=horizon)
        .find(|&p| suffix[p + 1] + tail_geo <= eps)
        .ok_or_else(|| Error::Domain(format!("eps = {eps} unachievable within horizon")))?;
    let truncation = suffix[p_max + 1] + tail_geo;

    // Degree-truncated product and its full mass.
    let mut coef = vec![0.0f64; k_max + 1];
    coef[0] = 1.0;
    let mut log_mass = 0.0f64;
    for p in 1..=p_max {
        let c = census.count(p);
        if c.is_zero() || alpha == 0.0 {
            continue;
        }
        let rp = r(p);
        log_mass -= census.log_factor(alpha, p);
        let c_f = c.to_f64().unwrap_or(f64::INFINITY);
        // binomial expansion of (1 + rp x)^c, truncated at k_max
        let mut binom = vec![0.0f64; k_max + 1];
        binom[0] = 1.0;
        for j in 1..=k_max {
            let factor = (c_f - (j as f64 - 1.0)) / j as f64;
            if factor <= 0.0 {
                break;
            }
            binom[j] = binom[j - 1] * factor * rp;
        }
        let mut next = vec![0.0f64; k_max + 1];
        for (i, &a) in coef.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in binom.iter().enumerate().take(k_max + 1 - i) {
                next[i + j] += a * b;
            }
        }
        coef = next;
    }
    let mut probs: Vec<f64> = coef.iter().map(|c| zeta_inv * c).collect();
    let total: f64 = probs.iter().sum();
    if total > 1.0 {
        // only rounding can push the sum past 1
        probs.iter_mut().for_each(|p| *p /= total);
    }
    let kept: f64 = probs.iter().sum();
    let degree_tail = (zeta_inv * log_mass.exp() - kept).max(0.0);
    let bound = (1.0 - (-truncation).exp()) + degree_tail;
    Ok(IInfinityPmf {
        alpha,
        probs,
        p_max,
        horizon,
        bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitEntropy {
    /// `alpha * lambda`.
    pub beta: f64,
    /// `log(alpha * lambda)`.
    pub entropy: f64,
}

/// Supercritical limit of `beta` and of the entropy.
pub fn limit_entropy(alpha: f64, g: &Graph) -> Result<LimitEntropy> {
    let lambda = spectral_radius(g)?;
    if !(alpha <= 1.0) || alpha * lambda <= 1.0 {
        return Err(Error::Domain(format!(
            "alpha = {alpha} is not in (1/lambda, 1] with lambda = {lambda}"
        )));
    }
    let beta = alpha * lambda;
    Ok(LimitEntropy {
        beta,
        entropy: beta.ln(),
    })
}
