//! Undetermined-coefficient solves: exact over Q(i) and a rank certificate
//! modulo a large prime.

use crate::algebra::{ExactScalar, Polynomial};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Coefficients p₀…p_{d−1} such that Σ p_k·cols[k] + cols[d] = 0, where
/// cols[k] is the image of x^k under a linear operator. `None` if no monic
/// degree-d solution exists.
pub fn monic_solution(cols: &[Polynomial]) -> Option<Vec<ExactScalar>> {
    let d = cols.len() - 1;
    let rows = cols.iter().map(|c| c.coeffs().len()).max().unwrap_or(0);
    if rows == 0 {
        return Some(vec![ExactScalar::zero(); d]);
    }
    let mut m: Vec<Vec<ExactScalar>> = (0..rows)
        .map(|r| {
            let mut row: Vec<ExactScalar> = (0..d).map(|k| cols[k].coeff(r)).collect();
            row.push(-&cols[d].coeff(r));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..d {
        let Some(sel) = (prow..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(prow, sel);
        let inv = m[prow][col].inv().unwrap();
        for v in m[prow].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..rows {
            if r != prow && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=d {
                    let t = &f * &m[prow][c];
                    m[r][c] -= &t;
                }
            }
        }
        pivots.push(col);
        prow += 1;
        if prow == rows {
            break;
        }
    }
    if m[prow..].iter().any(|row| !row[d].is_zero()) {
        return None;
    }
    let mut sol = vec![ExactScalar::zero(); d];
    for (r, &col) in pivots.iter().enumerate() {
        sol[col] = m[r][d].clone();
    }
    Some(sol)
}

pub fn assemble_monic(sol: &[ExactScalar]) -> Polynomial {
    let mut c = sol.to_vec();
    c.push(ExactScalar::one());
    Polynomial::from_coeffs(c)
}

/// The Mersenne prime 2^61 − 1.
pub const PRIME: u64 = (1 << 61) - 1;

pub fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

pub fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= PRIME {
        s - PRIME
    } else {
        s
    }
}

pub fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + PRIME - b
    }
}

pub fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    acc
}

pub fn invmod(a: u64) -> u64 {
    powmod(a, PRIME - 2)
}

fn int_mod(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(PRIME)).to_u64().unwrap()
}

/// Image of a rational in F_p; `None` when the denominator vanishes mod p.
pub fn rat_mod(q: &BigRational) -> Option<u64> {
    let d = int_mod(q.denom());
    (d != 0).then(|| mulmod(int_mod(q.numer()), invmod(d)))
}

/// Dense polynomial over F_p, ascending coefficients (not trimmed).
pub type ModPoly = Vec<u64>;

pub fn poly_mod(p: &Polynomial) -> Option<ModPoly> {
    p.coeffs().iter().map(|c| if c.is_real() { rat_mod(&c.re) } else { None }).collect()
}

pub fn mp_add(a: &ModPoly, b: &ModPoly) -> ModPoly {
    let n = a.len().max(b.len());
    (0..n).map(|k| addmod(*a.get(k).unwrap_or(&0), *b.get(k).unwrap_or(&0))).collect()
}

pub fn mp_sub(a: &ModPoly, b: &ModPoly) -> ModPoly {
    let n = a.len().max(b.len());
    (0..n).map(|k| submod(*a.get(k).unwrap_or(&0), *b.get(k).unwrap_or(&0))).collect()
}

pub fn mp_mul(a: &ModPoly, b: &ModPoly) -> ModPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addmod(out[i + j], mulmod(x, y));
        }
    }
    out
}

pub fn mp_scale(a: &ModPoly, s: u64) -> ModPoly {
    a.iter().map(|&x| mulmod(x, s)).collect()
}

pub fn mp_deriv(a: &ModPoly) -> ModPoly {
    a.iter().enumerate().skip(1).map(|(k, &x)| mulmod(x, k as u64 % PRIME)).collect()
}

/// Rank of the matrix whose columns are the given vectors over F_p.
pub fn rank_mod(cols: &[ModPoly]) -> usize {
    let rows = cols.iter().map(|c| c.len()).max().unwrap_or(0);
    let ncols = cols.len();
    let mut m: Vec<Vec<u64>> = (0..rows).map(|r| (0..ncols).map(|c| *cols[c].get(r).unwrap_or(&0)).collect()).collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(sel) = (rank..rows).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, sel);
        let inv = invmod(m[rank][col]);
        for r in rank + 1..rows {
            if m[r][col] != 0 {
                let f = mulmod(m[r][col], inv);
                for c in col..ncols {
                    let t = mulmod(f, m[rank][c]);
                    m[r][c] = submod(m[r][c], t);
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn solves_monic_system() {
        // Operator P ↦ P′ − 2P has no monic polynomial kernel.
        let cols: Vec<Polynomial> = (0..3)
            .map(|k| {
                let xk = Polynomial::monomial(ExactScalar::one(), k);
                &xk.derivative() - &xk.scale(&ExactScalar::from_int(2))
            })
            .collect();
        assert!(monic_solution(&cols).is_none());
        // P ↦ x·P′ − 2P has kernel x².
        let cols: Vec<Polynomial> = (0..3)
            .map(|k| {
                let xk = Polynomial::monomial(ExactScalar::one(), k);
                &(&Polynomial::x() * &xk.derivative()) - &xk.scale(&ExactScalar::from_int(2))
            })
            .collect();
        let sol = monic_solution(&cols).unwrap();
        assert_eq!(assemble_monic(&sol), Polynomial::monomial(ExactScalar::one(), 2));
    }

    #[test]
    fn modular_arithmetic() {
        let a = rat_mod(&rat(3, 7)).unwrap();
        assert_eq!(mulmod(a, 7), 3);
        assert_eq!(rank_mod(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank_mod(&[vec![1, 2], vec![0, 4]]), 2);
    }
}
