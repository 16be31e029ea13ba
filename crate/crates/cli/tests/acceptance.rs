//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigInt;
use rsft::graph::{closed_walk_counts, n_block_graph, period, Graph, DEFAULT_PATH_CAP};
use rsft::harness::simulate_cell;
use rsft::invariants::{compute_m, compute_r, compute_u, compute_z, DEFAULT_U_CAP, DEFAULT_Z_CAP};
use rsft::limits::{emptiness_bounds, i_infinity_pmf};
use rsft::random::{exact_enumerate, mix, RealizationSummary, ORACLE_MAX_EDGES};
use rsft::spectral::{parry_measure, perron_data, zeta_eval, zeta_product_truncated};
use rsft::Execution;

struct Outcome {
    pass: bool,
    detail: String,
}

fn block(g: &Graph, n: usize) -> Graph {
    n_block_graph(g, n, DEFAULT_PATH_CAP).expect("block graph")
}

fn seed(criterion: u64, cell: u64) -> u64 {
    mix(mix(0x5EED_0000, criterion), cell)
}

fn run(g: &Graph, alpha: f64, s: u64, trials: u64) -> Vec<RealizationSummary> {
    simulate_cell(g, alpha, s, trials, Execution::default()).expect("simulation")
}

fn fraction(runs: &[RealizationSummary], f: impl Fn(&RealizationSummary) -> bool) -> f64 {
    runs.iter().filter(|r| f(r)).count() as f64 / runs.len() as f64
}

fn binomial_se(p: f64, trials: usize) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / trials as f64).sqrt()
}

fn close(est: f64, exact: f64, se: f64) -> bool {
    if se < 1e-12 {
        (est - exact).abs() <= 1e-9
    } else {
        (est - exact).abs() <= 4.0 * se
    }
}

fn exact_oracle() -> Outcome {
    let start = Instant::now();
    let graphs = [
        ("golden", Graph::golden()),
        ("full:2 block", block(&Graph::full(2), 3)),
        ("cycle:4", Graph::cycle(4)),
        ("golden 3-block", block(&Graph::golden(), 3)),
    ];
    let trials = 50_000u64;
    let mut misses = Vec::new();
    let mut cells = 0;
    for (gi, (name, g)) in graphs.iter().enumerate() {
        assert!(g.edge_count() <= ORACLE_MAX_EDGES);
        let per = period(g);
        for (ai, &alpha) in [0.2, 0.5, 0.8].iter().enumerate() {
            cells += 1;
            let exact = exact_enumerate(g, alpha).expect("oracle");
            let runs = run(g, alpha, seed(1, (gi * 3 + ai) as u64), trials);
            let t = runs.len();
            let mean = runs.iter().map(|r| r.component_count as f64).sum::<f64>() / t as f64;
            let checks = [
                ("P(empty)", fraction(&runs, |r| r.is_empty), exact.p_empty, binomial_se(exact.p_empty, t)),
                (
                    "P(zero entropy)",
                    fraction(&runs, |r| r.zero_entropy),
                    exact.p_zero_entropy,
                    binomial_se(exact.p_zero_entropy, t),
                ),
                ("E[I]", mean, exact.mean_components(), (exact.var_components() / t as f64).sqrt()),
                (
                    "P(W)",
                    fraction(&runs, |r| r.unique_positive_entropy && r.positive_component_period == per),
                    exact.p_unique,
                    binomial_se(exact.p_unique, t),
                ),
            ];
            for (what, est, truth, se) in checks {
                if !close(est, truth, se) {
                    misses.push(format!("{name} a={alpha} {what}: {est:.5} vs {truth:.5} (se {se:.2e})"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = misses.is_empty() && secs < 120.0;
    Outcome {
        pass,
        detail: format!("{cells} cells x 4 statistics, {:.1}s; {}", secs, misses.join("; ")),
    }
}

fn emptiness_sandwich() -> Outcome {
    let mut worst = Vec::new();
    let mut pass = true;
    for n in 2..=6 {
        let g = block(&Graph::golden(), n);
        for (ai, &alpha) in [0.1, 0.3, 0.5].iter().enumerate() {
            let b = emptiness_bounds(&g, alpha).expect("bounds");
            let ok = if g.edge_count() <= ORACLE_MAX_EDGES {
                let p = exact_enumerate(&g, alpha).expect("oracle").p_empty;
                b.lower <= p && p <= b.upper
            } else {
                let runs = run(&g, alpha, seed(2, (n * 3 + ai) as u64), 200_000);
                let p = fraction(&runs, |r| r.is_empty);
                let slack = 4.0 * binomial_se(p, runs.len());
                b.lower - slack <= p && p <= b.upper + slack
            };
            if !ok {
                pass = false;
                worst.push(format!("n={n} a={alpha} outside [{:.6}, {:.6}]", b.lower, b.upper));
            }
        }
    }
    Outcome { pass, detail: format!("15 cells (n=6 by Monte Carlo); {}", worst.join("; ")) }
}

fn full2_n12_subcritical() -> (Outcome, Outcome) {
    let start = Instant::now();
    let g = block(&Graph::full(2), 12);
    let alpha = 0.3;
    let runs = run(&g, alpha, seed(3, 0), 20_000);
    let secs = start.elapsed().as_secs_f64();
    let p_empty = fraction(&runs, |r| r.is_empty);
    let c3 = Outcome {
        pass: (p_empty - 0.4).abs() <= 0.05 && secs < 60.0,
        detail: format!("P(empty) = {p_empty:.4}, |diff| = {:.4}, {secs:.1}s", (p_empty - 0.4).abs()),
    };

    let p_zero = fraction(&runs, |r| r.zero_entropy);
    // the limit law depends only on the orbit census, which G_n shares with G_1
    let pmf = i_infinity_pmf(&Graph::full(2), alpha, 12, 1e-6).expect("pmf");
    let mut hist = vec![0.0; pmf.probs.len()];
    let mut above = 0.0;
    for r in &runs {
        match hist.get_mut(r.component_count) {
            Some(h) => *h += 1.0 / runs.len() as f64,
            None => above += 1.0 / runs.len() as f64,
        }
    }
    let missing = (1.0 - pmf.probs.iter().sum::<f64>()).max(0.0);
    let tv = 0.5
        * (hist.iter().zip(&pmf.probs).map(|(h, p)| (h - p).abs()).sum::<f64>()
            + (above - missing).abs());
    let c4 = Outcome {
        pass: p_zero >= 0.97 && tv <= 0.08,
        detail: format!("P(zero entropy) = {p_zero:.4}, TV = {tv:.4}"),
    };
    (c3, c4)
}

fn entropy_concentration() -> Outcome {
    let alpha = 0.9;
    let failure = |n: usize| {
        let g = block(&Graph::full(2), n);
        let runs = run(&g, alpha, seed(5, n as u64), 500);
        fraction(&runs, |r| (r.beta - 1.8).abs() > 0.1)
    };
    let f12 = failure(12);
    let f8 = failure(8);
    let se = (binomial_se(f12, 500).powi(2) + binomial_se(f8, 500).powi(2)).sqrt();
    Outcome {
        pass: 1.0 - f12 >= 0.95 && f12 <= f8 + 2.0 * se,
        detail: format!("within 0.1 of 1.8: {:.3} (n=12); failures n=8 {f8:.3}, n=12 {f12:.3}", 1.0 - f12),
    }
}

fn unique_component() -> Outcome {
    let g = block(&Graph::golden(), 12);
    let runs = run(&g, 0.95, seed(6, 0), 2_000);
    let w = fraction(&runs, |r| r.unique_positive_entropy && r.positive_component_period == Some(1));
    Outcome { pass: w >= 0.98, detail: format!("P(W, period 1) = {w:.4}") }
}

fn block_invariants() -> Outcome {
    let mut bad = Vec::new();
    for (name, g1) in [("golden", Graph::golden()), ("full:2", Graph::full(2))] {
        let r1 = compute_r(&g1).expect("R");
        let traces1 = closed_walk_counts(&g1, 10);
        for n in 2..=8 {
            let g = block(&g1, n);
            let z = compute_z(&g, DEFAULT_Z_CAP, DEFAULT_PATH_CAP).expect("z");
            let u = compute_u(&g, DEFAULT_U_CAP).expect("U").u;
            let r = compute_r(&g).expect("R");
            let m = compute_m(&g).expect("m");
            let mut why = Vec::new();
            if 2 * z.value() + 1 < n as u64 {
                why.push(format!("z={z}"));
            }
            if u.value() + 1 < n as u64 {
                why.push(format!("U={u}"));
            }
            if r > n as u64 + r1 {
                why.push(format!("R={r}"));
            }
            if (m as i64 - n as i64).abs() > 2 {
                why.push(format!("m={m}"));
            }
            if g.d_max() != g1.d_max() {
                why.push(format!("d_max={}", g.d_max()));
            }
            if closed_walk_counts(&g, 10) != traces1 {
                why.push("traces".into());
            }
            if !why.is_empty() {
                bad.push(format!("{name} n={n}: {}", why.join(",")));
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("14 graphs; {}", bad.join("; ")) }
}

fn spectral_units() -> Outcome {
    let mut bad = Vec::new();
    let golden = perron_data(&Graph::golden()).expect("perron");
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    if (golden.lambda - phi).abs() > 1e-9 {
        bad.push(format!("golden lambda {}", golden.lambda));
    }
    for spec in ["golden", "full:2", "full:3", "cycle:1", "cycle:4"] {
        let g = Graph::from_spec(spec).expect("builtin");
        let mu = parry_measure(&g).expect("parry");
        let vs: f64 = mu.vertex_mass.iter().sum();
        let es: f64 = mu.edge_mass.iter().sum();
        if (vs - 1.0).abs() > 1e-12 || (es - 1.0).abs() > 1e-12 {
            bad.push(format!("{spec} parry sums {vs} {es}"));
        }
        let data = perron_data(&g).expect("perron");
        let spectrum = data.nonzero_spectrum().expect("spectrum");
        for s in [0.1, 0.5, 0.9] {
            let t = s / data.lambda;
            let product = spectrum
                .iter()
                .fold(num_complex::Complex64::new(1.0, 0.0), |acc, z| acc * (1.0 - z * t))
                .re;
            let zeta = zeta_eval(&g, t).expect("zeta");
            if (1.0 / zeta - product).abs() > 1e-8 {
                bad.push(format!("{spec} t={t} zeta {zeta} vs product {product}"));
            }
            for p_max in [1, 5, 40] {
                let bound = zeta_product_truncated(&g, t, p_max).expect("product");
                if !bound.contains(1.0 / zeta) {
                    bad.push(format!("{spec} t={t} p_max={p_max} interval misses 1/zeta"));
                }
            }
        }
    }
    // traces 1, 3, 4 in exact integers
    let t = closed_walk_counts(&Graph::golden(), 3);
    if t != [BigInt::from(1), BigInt::from(3), BigInt::from(4)] {
        bad.push(format!("golden traces {t:?}"));
    }
    Outcome { pass: bad.is_empty(), detail: format!("lambda = {:.12}; {}", golden.lambda, bad.join("; ")) }
}

fn determinism() -> Outcome {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let config = root.join("configs/demo.json");
    let dir = std::env::temp_dir().join(format!("rsft-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let simulate = |name: &str, threads: Option<&str>| -> Vec<u8> {
        let out = dir.join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_rsft"));
        cmd.arg("simulate").arg(&config).arg("-o").arg(&out).arg("--no-timestamp");
        if let Some(t) = threads {
            cmd.args(["--threads", t]);
        }
        let status = cmd.status().expect("run rsft");
        assert!(status.success(), "simulate exited with {status}");
        std::fs::read(&out).expect("read results")
    };
    let a = simulate("a.csv", None);
    let b = simulate("b.csv", None);
    let one = simulate("t1.csv", Some("1"));
    let eight = simulate("t8.csv", Some("8"));
    let _ = std::fs::remove_dir_all(&dir);
    Outcome {
        pass: a == b && one == eight && a == one && !a.is_empty(),
        detail: format!("repeat equal: {}, threads 1 vs 8 equal: {}, {} bytes", a == b, one == eight, a.len()),
    }
}

fn main() -> ExitCode {
    let (c3, c4) = full2_n12_subcritical();
    let results = [
        ("exact-oracle equivalence", exact_oracle()),
        ("emptiness sandwich", emptiness_sandwich()),
        ("limit proximity", c3),
        ("subcritical regime", c4),
        ("entropy concentration", entropy_concentration()),
        ("unique component", unique_component()),
        ("block invariant bounds", block_invariants()),
        ("spectral unit checks", spectral_units()),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("criterion {} {name}: {verdict} ({})", i + 1, o.detail.trim_end_matches("; "));
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
