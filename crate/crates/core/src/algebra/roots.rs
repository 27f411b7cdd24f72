//! Root extraction: exact rational roots via Sturm isolation, and certified
//! isolating rectangles for the complex roots of a square-free polynomial.

use super::poly::Polynomial;
use super::scalar::{rat_to_f64, ExactScalar};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};
use serde::Serialize;

/// Axis-aligned square `[c − w, c + w]²` that contains exactly one root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IsolatingRect {
    pub center: ExactScalar,
    pub half_width: BigRational,
}

impl IsolatingRect {
    pub fn contains(&self, z: &ExactScalar) -> bool {
        (&z.re - &self.center.re).abs() <= self.half_width && (&z.im - &self.center.im).abs() <= self.half_width
    }

    pub fn overlaps(&self, o: &IsolatingRect) -> bool {
        let w = &self.half_width + &o.half_width;
        (&self.center.re - &o.center.re).abs() <= w && (&self.center.im - &o.center.im).abs() <= w
    }

    pub fn approx(&self) -> Complex64 {
        self.center.to_c64()
    }

    pub fn width_f64(&self) -> f64 {
        2.0 * rat_to_f64(&self.half_width)
    }
}

impl Serialize for IsolatingRect {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IsolatingRect", 3)?;
        let c = self.approx();
        st.serialize_field("center", &[c.re, c.im])?;
        st.serialize_field("half_width", &rat_to_f64(&self.half_width))?;
        st.end()
    }
}

fn sign_changes(chain: &[Polynomial], a: &BigRational) -> usize {
    let z = ExactScalar::real(a.clone());
    let mut last = 0i8;
    let mut n = 0;
    for p in chain {
        let v = p.eval(&z).re;
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

fn sturm_chain(p: &Polynomial) -> Vec<Polynomial> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        // Positive rescaling keeps signs and tames coefficient growth.
        let lc = r.leading().re.abs();
        chain.push(-&r.scale(&ExactScalar::real(lc.recip())));
    }
    chain
}

fn cauchy_bound(p: &Polynomial) -> BigRational {
    let lc = p.leading().re.abs();
    let mut m = BigRational::zero();
    for c in &p.coeffs()[..p.coeffs().len() - 1] {
        let v = c.re.abs() / &lc;
        if v > m {
            m = v;
        }
    }
    m + BigRational::one()
}

/// Distinct real rational roots of a polynomial, ascending.
pub fn rational_roots(p: &Polynomial) -> Vec<BigRational> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let real = if p.is_real() {
        p.clone()
    } else {
        // A real root of p is a common root of its real and imaginary parts.
        let re = Polynomial::from_coeffs(p.coeffs().iter().map(|c| ExactScalar::real(c.re.clone())).collect());
        let im = Polynomial::from_coeffs(p.coeffs().iter().map(|c| ExactScalar::real(c.im.clone())).collect());
        Polynomial::gcd(&re, &im)
    };
    if real.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (f, _) in real.square_free() {
        out.extend(rational_roots_squarefree(&f));
    }
    out.sort();
    out.dedup();
    out
}

fn rational_roots_squarefree(f: &Polynomial) -> Vec<BigRational> {
    let ints = f.primitive_integer();
    let lc = ints.last().unwrap().abs();
    let fz = Polynomial::from_coeffs(ints.iter().map(|c| ExactScalar::real(BigRational::from_integer(c.clone()))).collect());
    // Any rational root is j/lc for an integer j.
    let grid = BigRational::new(BigInt::one(), lc.clone());
    let lcq = BigRational::from_integer(lc);
    let chain = sturm_chain(&fz);
    let b = cauchy_bound(&fz);
    let mut work = vec![(-b.clone(), b)];
    let mut roots = Vec::new();
    while let Some((lo, hi)) = work.pop() {
        let count = sign_changes(&chain, &lo) - sign_changes(&chain, &hi);
        if count == 0 {
            continue;
        }
        if count == 1 && &hi - &lo < grid {
            let j = (&hi * &lcq).floor();
            let cand = j / &lcq;
            if cand > lo && fz.eval(&ExactScalar::real(cand.clone())).is_zero() {
                roots.push(cand);
            }
            continue;
        }
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        work.push((lo, mid.clone()));
        work.push((mid, hi));
    }
    roots
}

/// Simultaneous Aberth iteration in double precision.
pub fn approximate_roots(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lc = p[n];
    let c: Vec<Complex64> = p.iter().map(|a| a / lc).collect();
    let bound = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let dc: Vec<Complex64> = (1..=n).map(|k| c[k] * k as f64).collect();
    let ev = |cs: &[Complex64], z: Complex64| cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * bound, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let f = ev(&c, z[k]);
            let fp = ev(&dc, z[k]);
            if f.norm() == 0.0 {
                continue;
            }
            let ratio = f / fp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[k] -= w;
            moved = moved.max(w.norm() / (1.0 + z[k].norm()));
        }
        if moved < 1e-17 {
            break;
        }
    }
    z
}

fn rational_sqrt_upper(r2: &BigRational) -> BigRational {
    if r2.is_zero() {
        return BigRational::zero();
    }
    let guess = rat_to_f64(r2).sqrt() * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    let mut w = BigRational::from_f64(guess).unwrap_or_else(|| r2.clone() + BigRational::one());
    while &(&w * &w) < r2 {
        w = &w * BigRational::from_integer(BigInt::from(2));
    }
    w
}

/// Rectangle around `c` certified to hold a root: radius n·|f(c)/f′(c)|.
fn certify_one(f: &Polynomial, fp: &Polynomial, c: &ExactScalar) -> Option<IsolatingRect> {
    let n = f.degree()? as i64;
    let fv = f.eval(c);
    if fv.is_zero() {
        return Some(IsolatingRect { center: c.clone(), half_width: BigRational::zero() });
    }
    let dv = fp.eval(c);
    if dv.is_zero() {
        return None;
    }
    let r2 = fv.norm_sqr() / dv.norm_sqr() * BigRational::from_integer(BigInt::from(n * n));
    Some(IsolatingRect { center: c.clone(), half_width: rational_sqrt_upper(&r2) })
}

fn newton_exact(f: &Polynomial, fp: &Polynomial, c: &ExactScalar, bits: u32) -> ExactScalar {
    let dv = fp.eval(c);
    if dv.is_zero() {
        return c.clone();
    }
    (c - &(&f.eval(c) / &dv)).round_dyadic(bits)
}

/// One simultaneous Aberth correction in exact arithmetic, rounded to dyadics.
fn aberth_exact(f: &Polynomial, fp: &Polynomial, z: &[ExactScalar], bits: u32) -> Vec<ExactScalar> {
    let mut out = z.to_vec();
    for k in 0..z.len() {
        let fv = f.eval(&out[k]);
        if fv.is_zero() {
            continue;
        }
        let dv = fp.eval(&out[k]);
        let mut s = ExactScalar::zero();
        for j in 0..z.len() {
            if j != k {
                if let Some(inv) = (&out[k] - &out[j]).inv() {
                    s += &inv;
                }
            }
        }
        // w = f / (f′ − f·s)
        let denom = &dv - &(&fv * &s);
        let w = match denom.inv() {
            Some(inv) => &fv * &inv,
            None => ExactScalar::new(BigRational::new(BigInt::one(), BigInt::one() << bits), BigRational::zero()),
        };
        out[k] = (&out[k] - &w).round_dyadic(bits);
    }
    out
}

/// Isolating rectangles for every complex root of a square-free polynomial,
/// pairwise disjoint. Order follows (re, im) of the approximations.
pub fn isolate_complex_roots(f: &Polynomial) -> Vec<IsolatingRect> {
    let n = match f.degree() {
        Some(n) if n > 0 => n,
        _ => return Vec::new(),
    };
    let fp = f.derivative();
    let mut approx = approximate_roots(&f.to_c64_coeffs());
    approx.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    let mut centers: Vec<ExactScalar> = approx
        .iter()
        .map(|z| {
            ExactScalar::new(
                BigRational::from_f64(z.re).unwrap_or_else(BigRational::zero),
                BigRational::from_f64(z.im).unwrap_or_else(BigRational::zero),
            )
        })
        .collect();
    let mut bits = 64;
    for _ in 0..40 {
        let rects: Option<Vec<IsolatingRect>> = centers.iter().map(|c| certify_one(f, &fp, c)).collect();
        if let Some(rects) = rects {
            let disjoint = (0..n).all(|i| (i + 1..n).all(|j| !rects[i].overlaps(&rects[j])));
            if disjoint {
                return rects;
            }
        }
        centers = aberth_exact(f, &fp, &centers, bits);
        bits = (bits * 3 / 2).min(4096);
    }
    panic!("complex root isolation did not converge for {f}");
}

/// Shrinks `rect` (an isolating rectangle of a root of `f`) below `width`.
pub fn refine_rect(f: &Polynomial, rect: &IsolatingRect, width: &BigRational) -> IsolatingRect {
    let fp = f.derivative();
    let mut cur = rect.clone();
    let mut bits = 64u32;
    let two = BigRational::from_integer(BigInt::from(2));
    let mut guard = 0;
    while &cur.half_width * &two > *width && guard < 200 {
        guard += 1;
        let c = newton_exact(f, &fp, &cur.center, bits);
        bits = (bits * 3 / 2).min(8192);
        if let Some(r) = certify_one(f, &fp, &c) {
            // Inside the old rectangle means the same root.
            let inside = (&r.center.re - &rect.center.re).abs() + &r.half_width <= rect.half_width
                && (&r.center.im - &rect.center.im).abs() + &r.half_width <= rect.half_width;
            if inside && r.half_width < cur.half_width {
                cur = r;
            }
        }
    }
    cur
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Exact square root in Q(i), when one exists. The root returned has
/// nonnegative real part (and nonnegative imaginary part when purely imaginary).
pub fn gaussian_sqrt(z: &ExactScalar) -> Option<ExactScalar> {
    if z.is_real() {
        if let Some(s) = rational_sqrt(&z.re) {
            return Some(ExactScalar::real(s));
        }
        return rational_sqrt(&(-z.re.clone())).map(|s| ExactScalar::new(BigRational::zero(), s));
    }
    let n = rational_sqrt(&z.norm_sqr())?;
    let two = BigRational::from_integer(BigInt::from(2));
    let u = rational_sqrt(&((&z.re + &n) / &two))?;
    if u.is_zero() {
        return None;
    }
    let v = &z.im / (&two * &u);
    Some(ExactScalar::new(u, v))
}

/// Integer test for a Gaussian rational.
pub fn as_integer(z: &ExactScalar) -> Option<BigInt> {
    (z.is_real() && z.re.is_integer()).then(|| z.re.to_integer())
}

/// gcd of the denominators' lcm, used to scale rational sets onto integers.
pub fn lcm_denominators<'a>(qs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::rat;

    #[test]
    fn rational_roots_of_reference_cubic() {
        // (3/7)(x-1)(x-2)(x+3)
        let f = Polynomial::from_rationals(&[rat(18, 7), rat(-3, 1), rat(0, 1), rat(3, 7)]);
        assert_eq!(rational_roots(&f), vec![rat(-3, 1), rat(1, 1), rat(2, 1)]);
    }

    #[test]
    fn non_integer_rational_roots() {
        // (3x-1)(2x+5)(x^2+1)
        let f = Polynomial::from_ints(&[-1, 3]) * Polynomial::from_ints(&[5, 2]) * Polynomial::from_ints(&[1, 0, 1]);
        assert_eq!(rational_roots(&f), vec![rat(-5, 2), rat(1, 3)]);
        assert!(rational_roots(&Polynomial::from_ints(&[-2, 0, 1])).is_empty());
    }

    #[test]
    fn isolation_is_disjoint_and_contains_roots() {
        let f = Polynomial::from_ints(&[-2, 0, 0, 1]);
        let rects = isolate_complex_roots(&f);
        assert_eq!(rects.len(), 3);
        let cbrt2 = 2f64.powf(1.0 / 3.0);
        assert!(rects.iter().any(|r| (r.approx() - Complex64::new(cbrt2, 0.0)).norm() < 1e-9));
        let tight = refine_rect(&f, &rects[0], &rat(1, 1_000_000_000_000));
        assert!(tight.width_f64() < 1e-12);
        assert!(rects[0].overlaps(&tight));
    }

    #[test]
    fn close_roots_separate() {
        // (x - 1)(x - 1 - 1e-9)
        let a = rat(1_000_000_001, 1_000_000_000);
        let f = Polynomial::linear_root(&ExactScalar::one()) * Polynomial::linear_root(&ExactScalar::real(a));
        let rects = isolate_complex_roots(&f);
        assert!(!rects[0].overlaps(&rects[1]));
    }

    #[test]
    fn square_roots() {
        assert_eq!(rational_sqrt(&rat(25, 16)), Some(rat(5, 4)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        let two_i = ExactScalar::new(rat(0, 1), rat(2, 1));
        let s = gaussian_sqrt(&two_i).unwrap();
        assert_eq!(&s * &s, two_i);
        assert_eq!(gaussian_sqrt(&ExactScalar::from_int(-4)), Some(ExactScalar::new(rat(0, 1), rat(2, 1))));
        assert!(gaussian_sqrt(&ExactScalar::new(rat(1, 1), rat(1, 1))).is_none());
    }
}
