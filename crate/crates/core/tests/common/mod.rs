//! Oracles shared by the integration tests and the acceptance target.
#![allow(dead_code)]

use bianchi_core::algebra::singular::Exponent;
use bianchi_core::algebra::{alpha_exponents, rat, singular_profile, ExactScalar, LaurentDatum, Location};
use bianchi_core::model::VeSuite;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub fn reference() -> (Q, Q) {
    (rat(3, 28), rat(9, 7))
}

pub fn conv(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    (0..n).map(|k| a.get(k).cloned().unwrap_or_else(Q::zero) + b.get(k).cloned().unwrap_or_else(Q::zero)).collect()
}

pub fn scale(a: &[Q], s: &Q) -> Vec<Q> {
    a.iter().map(|c| c * s).collect()
}

/// p(x) → p(t²) on ascending coefficient vectors.
pub fn in_t(p: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); 2 * p.len()];
    for (k, c) in p.iter().enumerate() {
        out[2 * k] = c.clone();
    }
    out
}

fn deriv(p: &[Q]) -> Vec<Q> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * Q::from_integer((k as i64).into())).collect()
}

/// Divides by t^k, asserting the low coefficients vanish.
fn shift_down(p: &[Q], k: usize) -> Vec<Q> {
    assert!(p.iter().take(k).all(|c| c.is_zero()), "not divisible by t^{k}");
    p[k.min(p.len())..].to_vec()
}

/// The three-term source times C₂², expanded as a polynomial in t = √x with the
/// quoted η₁′/η₁ = (xC₂′ − C₂ + 2μx^{3/2})/(2xC₂), for one numeric μ.
pub fn expanded_source(l: &Q, e: &Q, mu: &Q) -> Vec<Q> {
    let k = |n: i64| rat(n, 1);
    let z = Q::zero;
    let c2 = vec![k(4) * e, k(210), z(), k(35) * l];
    let a = scale(&[k(14) * e, k(-459), z(), k(52) * l], &rat(-1, 3));
    let b = scale(&[z(), k(-4) * e, k(2) * e + k(12), k(-3), k(-32) * l, k(4) * l], &rat(-2, 3));
    let c = scale(&[k(-2) * e, k(14) * e + k(99), k(-21), k(-4) * l, k(28) * l], &rat(-2, 3));
    let xc2p: Vec<Q> = std::iter::once(z()).chain(deriv(&c2)).collect();
    let mut n = in_t(&add(&xc2p, &scale(&c2, &k(-1))));
    n = add(&n, &[z(), z(), z(), k(2) * mu]);
    let c2t = in_t(&c2);
    // C₂²(A + Bv² + Cv) = [4t⁴ A C₂² + B N² + 2t² C N C₂] / (4t⁴)
    let t2 = [z(), z(), Q::one()];
    let t4 = [z(), z(), z(), z(), Q::one()];
    let term1 = scale(&conv(&conv(&t4, &in_t(&a)), &conv(&c2t, &c2t)), &k(4));
    let term2 = conv(&in_t(&b), &conv(&n, &n));
    let term3 = scale(&conv(&conv(&t2, &in_t(&c)), &conv(&n, &c2t)), &k(2));
    let total = add(&add(&term1, &term2), &term3);
    let mut p = scale(&shift_down(&total, 4), &rat(1, 4));
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

/// aₖ = c₀ + c₁μ + c₂μ² recovered by interpolation at μ = 0, 1, 2.
pub fn expanded_coefficients(l: &Q, e: &Q) -> Vec<[Q; 3]> {
    let p: Vec<Vec<Q>> = (0..3).map(|m| expanded_source(l, e, &rat(m, 1))).collect();
    let len = p.iter().map(|v| v.len()).max().unwrap().max(19);
    let get = |v: &Vec<Q>, k: usize| v.get(k).cloned().unwrap_or_else(Q::zero);
    (0..len)
        .map(|k| {
            let (p0, p1, p2) = (get(&p[0], k), get(&p[1], k), get(&p[2], k));
            let c2 = (&p2 - &p1 * rat(2, 1) + &p0) / rat(2, 1);
            let c1 = &p1 - &p0 - &c2;
            [p0, c1, c2]
        })
        .collect()
}

/// Admissible (λ, E): λ ∈ (0, 1], E ∈ [1/2, 3] with 4E²λ ≠ 1, as small rationals.
pub fn random_params(rng: &mut ChaCha8Rng) -> (Q, Q) {
    loop {
        let l = rat(rng.gen_range(1..=20), 20);
        let e = rat(rng.gen_range(4..=24), 8);
        if rat(4, 1) * &e * &e * &l != Q::one() {
            return (l, e);
        }
    }
}

/// Exact Laurent datum b at a site of g.
pub fn b_at(suite: &VeSuite, loc: &Location) -> ExactScalar {
    let prof = singular_profile(&suite.g);
    let site = prof.iter().find(|s| &s.location == loc).expect("site present");
    match site.b.as_ref().unwrap() {
        LaurentDatum::Exact(v) => v.clone(),
        other => panic!("expected exact datum, got {}", other.render()),
    }
}

pub fn exact_pair(b: &ExactScalar) -> (ExactScalar, ExactScalar) {
    let p = alpha_exponents(&LaurentDatum::Exact(b.clone()));
    match (p.plus, p.minus) {
        (Exponent::Exact(a), Exponent::Exact(c)) => (a, c),
        _ => panic!("rational exponents expected"),
    }
}
