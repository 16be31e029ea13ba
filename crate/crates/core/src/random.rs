//! The random edge model: each edge of a graph is kept independently with
//! probability alpha, and the resulting edge shift is classified.
//!
//! Sampling draws one uniform per edge in canonical order from a per-trial
//! ChaCha8 stream and keeps the edge when the uniform is below alpha. The
//! same `(seed, trial)` pair therefore yields nested masks for increasing
//! alpha.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::graph::{component_period, period, ComponentScan, Graph};
use crate::spectral::{LocalAdjacency, RADIUS_TOLERANCE};

/// Largest edge count accepted by [`exact_enumerate`].
pub const ORACLE_MAX_EDGES: usize = 22;
/// Width of the buckets in the exact distribution of beta.
pub const BETA_BUCKET: f64 = 1e-9;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
pub fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `fin(a ^ fin(b + gamma))`: combines a seed with a stream index.
pub fn mix(a: u64, b: u64) -> u64 {
    splitmix_finalize(a ^ splitmix_finalize(b.wrapping_add(GOLDEN_GAMMA)))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidAlpha(alpha))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaSample {
    pub alpha: f64,
    pub seed: u64,
    pub trial_index: u64,
    /// `allowed[e]` for each canonical edge index.
    pub allowed: Vec<bool>,
}

/// Draws the per-edge uniforms of one trial into `out`.
pub fn trial_uniforms(edge_count: usize, seed: u64, trial_index: u64, out: &mut Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, trial_index));
    out.clear();
    out.extend((0..edge_count).map(|_| rng.gen::<f64>()));
}

pub fn sample_omega(g: &Graph, alpha: f64, seed: u64, trial_index: u64) -> Result<OmegaSample> {
    check_alpha(alpha)?;
    let mut u = Vec::new();
    trial_uniforms(g.edge_count(), seed, trial_index, &mut u);
    Ok(OmegaSample {
        alpha,
        seed,
        trial_index,
        allowed: u.iter().map(|&x| x < alpha).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealizationSummary {
    pub is_empty: bool,
    /// Number of irreducible components.
    pub component_count: usize,
    /// Largest Perron root over the components, 0 when empty.
    pub beta: f64,
    pub zero_entropy: bool,
    pub unique_positive_entropy: bool,
    pub positive_component_period: Option<usize>,
}

/// Reusable buffers for classifying many realizations of one graph.
pub struct Realizer<'g> {
    g: &'g Graph,
    scan: ComponentScan,
    local: Vec<usize>,
}

impl<'g> Realizer<'g> {
    pub fn new(g: &'g Graph) -> Self {
        Realizer {
            g,
            scan: ComponentScan::new(g.vertex_count()),
            local: vec![0; g.vertex_count()],
        }
    }

    pub fn classify(&mut self, allowed: &[bool]) -> Result<RealizationSummary> {
        if allowed.len() != self.g.edge_count() {
            return Err(Error::MaskMismatch {
                mask: allowed.len(),
                edges: self.g.edge_count(),
            });
        }
        let comps = self.scan.run(self.g, Some(allowed));
        let mut beta = 0.0f64;
        let mut positive = Vec::new();
        for comp in &comps {
            let b = if comp.is_cycle() {
                1.0
            } else {
                let (lambda, _) = LocalAdjacency::from_component(self.g, comp, &mut self.local)
                    .perron(RADIUS_TOLERANCE)?;
                positive.push(comp);
                lambda
            };
            beta = beta.max(b);
        }
        let unique = positive.len() == 1;
        Ok(RealizationSummary {
            is_empty: comps.is_empty(),
            component_count: comps.len(),
            beta,
            zero_entropy: positive.is_empty(),
            unique_positive_entropy: unique,
            positive_component_period: unique.then(|| component_period(self.g, positive[0])),
        })
    }
}

/// Classifies the edge shift of the allowed subgraph.
pub fn realize(g: &Graph, w: &OmegaSample) -> Result<RealizationSummary> {
    Realizer::new(g).classify(&w.allowed)
}

/// Exact law of the realization summary, computed over all `2^|E|` masks.
#[derive(Clone, Debug, Serialize)]
pub struct ExactDistribution {
    pub alpha: f64,
    pub edge_count: usize,
    pub p_empty: f64,
    pub p_zero_entropy: f64,
    /// `component_pmf[k] = P(I = k)`.
    pub component_pmf: Vec<f64>,
    /// `(bucket index, probability)` with beta in `[i, i+1) * 1e-9`.
    pub beta_pmf: Vec<(u64, f64)>,
    /// P(unique positive-entropy component whose period equals per(g)).
    pub p_unique: f64,
}

impl ExactDistribution {
    pub fn mean_components(&self) -> f64 {
        self.component_pmf
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    pub fn var_components(&self) -> f64 {
        let mean = self.mean_components();
        self.component_pmf
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - mean).powi(2) * p)
            .sum()
    }
}

/// Per-mask facts, independent of alpha.
#[derive(Clone, Copy)]
struct MaskFacts {
    allowed: u32,
    empty: bool,
    zero_entropy: bool,
    components: usize,
    beta_bucket: u64,
    w_event: bool,
}

pub fn exact_enumerate(g: &Graph, alpha: f64) -> Result<ExactDistribution> {
    Ok(exact_enumerate_many(g, &[alpha], Execution::default())?.remove(0))
}

/// [`exact_enumerate`] for several alphas sharing one pass over the masks.
pub fn exact_enumerate_many(g: &Graph, alphas: &[f64], exec: Execution) -> Result<Vec<ExactDistribution>> {
    for &a in alphas {
        check_alpha(a)?;
    }
    let m = g.edge_count();
    if m > ORACLE_MAX_EDGES {
        return Err(Error::SizeCap {
            what: "exact enumeration",
            limit: ORACLE_MAX_EDGES,
            actual: m,
        });
    }
    let per_g = period(g);
    // chunked so each worker reuses its scan buffers
    let chunk_bits = m.min(10);
    let chunks = 1u64 << (m - chunk_bits);
    let facts: Vec<Result<Vec<MaskFacts>>> = map_indexed(chunks, exec, |c| {
        let mut realizer = Realizer::new(g);
        let mut allowed = vec![false; m];
        let mut out = Vec::with_capacity(1 << chunk_bits);
        for low in 0..(1u64 << chunk_bits) {
            let mask = (c << chunk_bits) | low;
            for (e, a) in allowed.iter_mut().enumerate() {
                *a = mask & (1 << e) != 0;
            }
            let s = realizer.classify(&allowed)?;
            out.push(MaskFacts {
                allowed: mask.count_ones(),
                empty: s.is_empty,
                zero_entropy: s.zero_entropy,
                components: s.component_count,
                beta_bucket: (s.beta / BETA_BUCKET).round() as u64,
                w_event: s.unique_positive_entropy && s.positive_component_period == per_g,
            });
        }
        Ok(out)
    });
    let mut all = Vec::with_capacity(1 << m);
    for f in facts {
        all.extend(f?);
    }
    let max_components = all.iter().map(|f| f.components).max().unwrap_or(0);

    Ok(alphas
        .iter()
        .map(|&alpha| {
            // weight of a mask depends only on its number of allowed edges
            let weights: Vec<f64> = (0..=m)
                .map(|k| alpha.powi(k as i32) * (1.0 - alpha).powi((m - k) as i32))
                .collect();
            let mut p_empty = 0.0;
            let mut p_zero = 0.0;
            let mut p_unique = 0.0;
            let mut pmf = vec![0.0; max_components + 1];
            let mut beta: BTreeMap<u64, f64> = BTreeMap::new();
            for f in &all {
                let w = weights[f.allowed as usize];
                if w == 0.0 {
                    continue;
                }
                if f.empty {
                    p_empty += w;
                }
                if f.zero_entropy {
                    p_zero += w;
                }
                if f.w_event {
                    p_unique += w;
                }
                pmf[f.components] += w;
                *beta.entry(f.beta_bucket).or_default() += w;
            }
            // sums of 2^|E| weights can round a hair past 1
            ExactDistribution {
                alpha,
                edge_count: m,
                p_empty: p_empty.min(1.0),
                p_zero_entropy: p_zero.min(1.0),
                component_pmf: pmf,
                beta_pmf: beta.into_iter().collect(),
                p_unique: p_unique.min(1.0),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, n_block_graph, scc_decompose, DEFAULT_PATH_CAP};
    use crate::spectral::beta;
    use approx::assert_relative_eq;

    #[test]
    fn mixing_is_deterministic_and_spreads() {
        assert_eq!(mix(1, 2), mix(1, 2));
        assert_ne!(mix(1, 2), mix(2, 1));
        assert_ne!(mix(0, 0), mix(0, 1));
        // reference value of the SplitMix64 finalizer
        assert_eq!(splitmix_finalize(GOLDEN_GAMMA), 0xe220_a839_7b1d_cdaf);
    }

    #[test]
    fn sample_extremes_and_replay() {
        let g = Graph::full(3);
        assert!(sample_omega(&g, 1.0, 7, 3).unwrap().allowed.iter().all(|&a| a));
        assert!(sample_omega(&g, 0.0, 7, 3).unwrap().allowed.iter().all(|&a| !a));
        assert_eq!(sample_omega(&g, 0.4, 7, 3).unwrap(), sample_omega(&g, 0.4, 7, 3).unwrap());
        assert!(sample_omega(&g, 1.5, 7, 3).is_err());
    }

    #[test]
    fn realize_examples() {
        let g = Graph::full(2);
        let all = realize(&g, &sample_omega(&g, 1.0, 0, 0).unwrap()).unwrap();
        assert_eq!(all.component_count, 1);
        assert_relative_eq!(all.beta, 2.0, epsilon = 1e-9);
        assert!(all.unique_positive_entropy);
        assert_eq!(all.positive_component_period, Some(1));

        let none = realize(&g, &sample_omega(&g, 0.0, 0, 0).unwrap()).unwrap();
        assert!(none.is_empty && none.component_count == 0 && none.beta == 0.0);

        let golden = Graph::golden();
        let w = OmegaSample {
            alpha: 0.5,
            seed: 0,
            trial_index: 0,
            allowed: vec![false, true, true],
        };
        let s = realize(&golden, &w).unwrap();
        assert_eq!((s.component_count, s.beta, s.zero_entropy, s.is_empty), (1, 1.0, true, false));

        let bad = OmegaSample { allowed: vec![true], ..w };
        assert!(matches!(realize(&golden, &bad), Err(Error::MaskMismatch { .. })));
    }

    #[test]
    fn full_mask_matches_graph_analysis() {
        for g in [
            Graph::golden(),
            Graph::full(3),
            n_block_graph(&Graph::golden(), 4, DEFAULT_PATH_CAP).unwrap(),
            build_graph(5, &[(0, 0), (1, 2), (2, 1), (2, 3), (3, 4), (4, 3), (4, 4)]).unwrap(),
        ] {
            let s = Realizer::new(&g).classify(&vec![true; g.edge_count()]).unwrap();
            assert_eq!(s.component_count, scc_decompose(&g).len());
            assert_relative_eq!(s.beta, beta(&g).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_examples() {
        let c3 = exact_enumerate(&Graph::cycle(3), 0.7).unwrap();
        assert_relative_eq!(c3.p_empty, 1.0 - 0.343, epsilon = 1e-12);
        let golden = exact_enumerate(&Graph::golden(), 0.5).unwrap();
        assert_relative_eq!(golden.p_empty, 0.375, epsilon = 1e-15);
        let one = exact_enumerate(&Graph::full(2), 1.0).unwrap();
        assert_eq!(one.p_empty, 0.0);
        assert_eq!(one.component_pmf[1], 1.0);
        assert_eq!(one.p_unique, 1.0);
        let total: f64 = golden.component_pmf.iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        assert!(exact_enumerate(&Graph::full(5), 0.5).is_err());
    }

    #[test]
    fn multi_alpha_matches_single() {
        let g = n_block_graph(&Graph::golden(), 3, DEFAULT_PATH_CAP).unwrap();
        let many = exact_enumerate_many(&g, &[0.2, 0.6], Execution::Serial).unwrap();
        let single = exact_enumerate(&g, 0.6).unwrap();
        assert_eq!(many[1].p_empty, single.p_empty);
        assert_eq!(many[1].component_pmf, single.component_pmf);
    }
}
