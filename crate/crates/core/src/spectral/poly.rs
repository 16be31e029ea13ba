//! Exact integer characteristic polynomials and numeric roots of integer
//! polynomials.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::graph::Graph;

/// Characteristic polynomial `det(tI - A)` by Faddeev–LeVerrier in big
/// integers. Coefficients are in ascending powers of `t`; the last one is 1.
pub fn char_poly(g: &Graph) -> Vec<BigInt> {
    let n = g.vertex_count();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    // M_0 = 0; M_k = A M_{k-1} + c_{n-k+1} I; c_{n-k} = -tr(A M_k) / k.
    let mut m: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        let mut am = times_adjacency(g, &m);
        let c_prev = coeffs[n - k + 1].clone();
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += &c_prev;
        }
        m = am;
        let a_m = times_adjacency(g, &m);
        let trace: BigInt = (0..n).map(|i| a_m[i][i].clone()).sum();
        let k_big = BigInt::from(k);
        debug_assert!((&trace % &k_big).is_zero(), "Faddeev-LeVerrier division must be exact");
        coeffs[n - k] = -(trace / k_big);
    }
    coeffs
}

fn times_adjacency(g: &Graph, m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = g.vertex_count();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for (u, row) in out.iter_mut().enumerate() {
        for x in g.successors(u) {
            for (slot, val) in row.iter_mut().zip(&m[x]) {
                if !val.is_zero() {
                    *slot += val;
                }
            }
        }
    }
    out
}

/// Evaluates `det(I - tA) = sum_k a_{n-k} t^k` exactly for a dyadic `t`,
/// then rounds to `f64`.
pub fn eval_reversed(coeffs: &[BigInt], t: f64) -> f64 {
    let t = BigRational::from_float(t).expect("finite t");
    let n = coeffs.len() - 1;
    let mut acc = BigRational::zero();
    // reversed polynomial: coefficient of t^k is coeffs[n - k]
    for k in (0..=n).rev() {
        acc = acc * &t + BigRational::from_integer(coeffs[n - k].clone());
    }
    acc.to_f64().unwrap_or(f64::NAN)
}

type QPoly = Vec<BigRational>;

fn trim(p: &mut QPoly) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn degree(p: &QPoly) -> usize {
    p.len().saturating_sub(1)
}

fn is_zero_poly(p: &QPoly) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn monic(mut p: QPoly) -> QPoly {
    trim(&mut p);
    let lead = p.last().cloned().expect("nonempty");
    if !lead.is_zero() {
        for c in p.iter_mut() {
            *c = &*c / &lead;
        }
    }
    p
}

fn derivative(p: &QPoly) -> QPoly {
    if p.len() <= 1 {
        return vec![BigRational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect()
}

fn div_rem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let mut rem = a.clone();
    trim(&mut rem);
    let mut b = b.clone();
    trim(&mut b);
    let db = degree(&b);
    let lead = b[db].clone();
    if rem.len() < b.len() {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let coef = &rem[i + db] / &lead;
        if !coef.is_zero() {
            for (j, bc) in b.iter().enumerate() {
                rem[i + j] = &rem[i + j] - &coef * bc;
            }
        }
        quot[i] = coef;
    }
    rem.truncate(db.max(1));
    trim(&mut rem);
    (quot, rem)
}

fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    trim(&mut a);
    trim(&mut b);
    while !is_zero_poly(&b) {
        let (_, r) = div_rem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

/// Square-free decomposition (Yun): returns `(factor, multiplicity)` pairs
/// with non-constant, monic, pairwise coprime factors.
fn square_free(p: &QPoly) -> Vec<(QPoly, usize)> {
    let f = monic(p.clone());
    let mut out = Vec::new();
    if degree(&f) == 0 {
        return out;
    }
    let df = derivative(&f);
    let a0 = gcd(&f, &df);
    let mut b = div_rem(&f, &a0).0;
    let mut c = div_rem(&df, &a0).0;
    let mut d = sub(&c, &derivative(&b));
    let mut i = 1;
    while degree(&b) > 0 {
        let a = gcd(&b, &d);
        if degree(&a) > 0 {
            out.push((a.clone(), i));
        }
        b = div_rem(&b, &a).0;
        c = div_rem(&d, &a).0;
        d = sub(&c, &derivative(&b));
        i += 1;
    }
    out
}

fn sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] = &out[i] + c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] = &out[i] - c;
    }
    trim(&mut out);
    out
}

/// Nonzero roots of an integer polynomial (ascending coefficients), listed
/// with multiplicity and sorted by decreasing modulus.
pub fn nonzero_roots(coeffs: &[BigInt]) -> Vec<Complex64> {
    let low = coeffs.iter().position(|c| !c.is_zero());
    let Some(low) = low else {
        return Vec::new();
    };
    let deflated: QPoly = coeffs[low..]
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let mut roots = Vec::new();
    for (factor, mult) in square_free(&deflated) {
        let f64_coeffs: Vec<f64> = factor.iter().map(|c| c.to_f64().unwrap_or(0.0)).collect();
        for r in aberth(&f64_coeffs) {
            for _ in 0..mult {
                roots.push(r);
            }
        }
    }
    roots.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(b.re.partial_cmp(&a.re).unwrap_or(std::cmp::Ordering::Equal))
            .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    roots
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Aberth–Ehrlich simultaneous iteration for a square-free monic polynomial.
fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    match n {
        0 => return Vec::new(),
        1 => return vec![Complex64::new(-coeffs[0] / coeffs[1], 0.0)],
        _ => {}
    }
    let lead = coeffs[n].abs();
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.abs() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, angle)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    // Newton polish, then snap near-real roots onto the real axis.
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = horner(coeffs, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *zi -= step;
        }
        if zi.im.abs() < 1e-12 * zi.norm().max(1.0) {
            zi.im = 0.0;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, n_block_graph, Graph};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Fraction-free Bareiss determinant of `xI - A` at an integer point.
    fn det_at(g: &Graph, x: i64) -> BigInt {
        let n = g.vertex_count();
        let adj = g.adjacency();
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let diag = if i == j { x } else { 0 };
                        BigInt::from(diag - adj[i][j] as i64)
                    })
                    .collect()
            })
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        if n == 0 {
            BigInt::one()
        } else {
            sign * &m[n - 1][n - 1]
        }
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&Graph::golden()), ints(&[-1, -1, 1]));
        assert_eq!(char_poly(&Graph::full(2)), ints(&[0, -2, 1]));
        assert_eq!(char_poly(&Graph::cycle(3)), ints(&[-1, 0, 0, 1]));
    }

    #[test]
    fn char_poly_matches_bareiss_determinant() {
        let graphs = [
            n_block_graph(&Graph::golden(), 4, 1000).unwrap(),
            n_block_graph(&Graph::full(2), 3, 1000).unwrap(),
            build_graph(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 3), (4, 4), (1, 1)])
                .unwrap(),
        ];
        for g in &graphs {
            let coeffs = char_poly(g);
            for x in -3..=3i64 {
                let xb = BigInt::from(x);
                let value = coeffs
                    .iter()
                    .rev()
                    .fold(BigInt::zero(), |acc, c| acc * &xb + c);
                assert_eq!(value, det_at(g, x), "x = {x}");
            }
        }
    }

    #[test]
    fn roots_with_multiplicity() {
        // (t - 2)^2 (t + 1) t^3
        let roots = nonzero_roots(&ints(&[0, 0, 0, 4, 0, -3, 1]));
        assert_eq!(roots.len(), 3);
        assert!((roots[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        assert!((roots[2] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cube_roots_of_unity() {
        let roots = nonzero_roots(&ints(&[-1, 0, 0, 1]));
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!((r.norm() - 1.0).abs() < 1e-12);
            assert!((r.powu(3) - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn reversed_evaluation_is_determinant() {
        let coeffs = char_poly(&Graph::golden());
        assert_eq!(eval_reversed(&coeffs, 0.5), 0.25);
        assert_eq!(eval_reversed(&coeffs, 0.0), 1.0);
    }

    #[test]
    fn bareiss_oracle_self_check() {
        assert_eq!(det_at(&Graph::full(2), 5), BigInt::from(15));
        assert!(det_at(&Graph::full(2), 2).is_zero());
        assert!(det_at(&Graph::golden(), 3).is_positive());
    }
}
