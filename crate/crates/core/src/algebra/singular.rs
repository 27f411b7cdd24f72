//! Pole profiles, Laurent data and the exponent pairs α± used by Kovacic.

use super::poly::Polynomial;
use super::rational::RationalFunction;
use super::roots::{gaussian_sqrt, isolate_complex_roots, rational_roots, IsolatingRect};
use super::scalar::{rat, ExactScalar};
use super::AlgebraError;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Order reported at infinity for the zero function.
pub const ORDER_UNBOUNDED: i64 = i64::MAX;

/// A root of a square-free factor with no rational roots, pinned down by a
/// certified isolating rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraicPoint {
    pub factor: Polynomial,
    pub index: usize,
    pub rect: IsolatingRect,
}

impl AlgebraicPoint {
    pub fn approx(&self) -> Complex64 {
        self.rect.approx()
    }

    /// Same factor and overlapping rectangles.
    pub fn same_point(&self, o: &AlgebraicPoint) -> bool {
        self.factor == o.factor && self.rect.overlaps(&o.rect)
    }

    pub fn refined(&self, width: f64) -> AlgebraicPoint {
        let w = BigRational::from_float(width).unwrap_or_else(|| rat(1, 1 << 40));
        AlgebraicPoint { rect: super::roots::refine_rect(&self.factor, &self.rect, &w), ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Rational(ExactScalar),
    Algebraic(AlgebraicPoint),
    Infinity,
}

impl Location {
    pub fn describe(&self) -> String {
        match self {
            Location::Rational(c) => c.render(),
            Location::Algebraic(a) => {
                let z = a.approx();
                format!("root #{} of {} ≈ {:.12}{:+.12}i", a.index, a.factor.render(), z.re, z.im)
            }
            Location::Infinity => "infinity".to_string(),
        }
    }

    pub fn approx(&self) -> Option<Complex64> {
        match self {
            Location::Rational(c) => Some(c.to_c64()),
            Location::Algebraic(a) => Some(a.approx()),
            Location::Infinity => None,
        }
    }
}

/// Leading Laurent datum; at an algebraic point it is β(c) with β a
/// polynomial reduced modulo the point's factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LaurentDatum {
    Exact(ExactScalar),
    Algebraic { factor: Polynomial, value: Polynomial, approx: Complex64Key },
}

/// Complex64 wrapper giving bitwise Eq/Hash so data types can derive them.
#[derive(Clone, Copy, Debug)]
pub struct Complex64Key(pub Complex64);

impl PartialEq for Complex64Key {
    fn eq(&self, o: &Self) -> bool {
        self.0.re.to_bits() == o.0.re.to_bits() && self.0.im.to_bits() == o.0.im.to_bits()
    }
}
impl Eq for Complex64Key {}
impl std::hash::Hash for Complex64Key {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.0.re.to_bits().hash(h);
        self.0.im.to_bits().hash(h);
    }
}

impl LaurentDatum {
    pub fn exact(&self) -> Option<&ExactScalar> {
        match self {
            LaurentDatum::Exact(c) => Some(c),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            LaurentDatum::Exact(c) => c.render(),
            LaurentDatum::Algebraic { factor, value, approx } => {
                format!("({})(c) mod {} ≈ {:.12}{:+.12}i", value.render(), factor.render(), approx.0.re, approx.0.im)
            }
        }
    }
}

impl Serialize for LaurentDatum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PoleSite {
    pub location: Location,
    pub order: i64,
    /// Order-2 Laurent coefficient (b_∞ at infinity when o∞ ≥ 2).
    pub b: Option<LaurentDatum>,
}

impl Serialize for PoleSite {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PoleSite", 3)?;
        st.serialize_field("location", &self.location.describe())?;
        if self.order == ORDER_UNBOUNDED {
            st.serialize_field("order", "unbounded")?;
        } else {
            st.serialize_field("order", &self.order)?;
        }
        st.serialize_field("b", &self.b)?;
        st.end()
    }
}

/// Finite poles (ascending by factor multiplicity, then location) followed by
/// the entry at infinity.
pub fn singular_profile(f: &RationalFunction) -> Vec<PoleSite> {
    let mut out = Vec::new();
    for (factor, mult) in f.den().square_free() {
        let order = mult as i64;
        let roots = rational_roots(&factor);
        let mut rest = factor.clone();
        for r in &roots {
            let c = ExactScalar::real(r.clone());
            rest = rest.exact_div(&Polynomial::linear_root(&c));
            out.push(PoleSite { location: Location::Rational(c), order, b: None });
        }
        if rest.degree().unwrap_or(0) > 0 {
            for (index, rect) in isolate_complex_roots(&rest).into_iter().enumerate() {
                let ap = AlgebraicPoint { factor: rest.clone(), index, rect };
                out.push(PoleSite { location: Location::Algebraic(ap), order, b: None });
            }
        }
    }
    let order = f.order_at_infinity().unwrap_or(ORDER_UNBOUNDED);
    out.push(PoleSite { location: Location::Infinity, order, b: None });
    for site in out.iter_mut() {
        let wants_b = match site.location {
            Location::Infinity => site.order >= 2,
            _ => site.order == 2,
        };
        if wants_b {
            site.b = laurent_coefficient(f, site).ok();
        }
    }
    out
}

/// Coefficient of (x−c)^(−2) at an order-2 pole, residue at an order-1 pole,
/// and the x^(−2) coefficient of the expansion at infinity.
pub fn laurent_coefficient(f: &RationalFunction, site: &PoleSite) -> Result<LaurentDatum, AlgebraError> {
    match &site.location {
        Location::Infinity => {
            if site.order == ORDER_UNBOUNDED || site.order > 2 {
                return Ok(LaurentDatum::Exact(ExactScalar::zero()));
            }
            if site.order < 1 {
                return Err(AlgebraError::UnsupportedOrder { order: site.order });
            }
            Ok(LaurentDatum::Exact(coefficient_at_infinity(f, 2)))
        }
        _ if site.order > 2 || site.order < 1 => Err(AlgebraError::UnsupportedOrder { order: site.order }),
        Location::Rational(c) => {
            let m = site.order as u32;
            let h = f.den().exact_div(&Polynomial::linear_root(c).pow(m));
            Ok(LaurentDatum::Exact(&f.num().eval(c) / &h.eval(c)))
        }
        Location::Algebraic(a) => {
            let m = site.order as u32;
            let fac = &a.factor;
            let h = f.den().exact_div(&fac.pow(m));
            // (x−c)^m / F(x)^m → 1 / F′(c)^m
            let denom = (&fac.derivative().pow(m) * &h).rem(fac);
            let inv = denom.inverse_mod(fac).expect("factor coprime to cofactor");
            let beta = (&f.num().rem(fac) * &inv).rem(fac);
            if beta.is_constant() {
                return Ok(LaurentDatum::Exact(beta.coeff(0)));
            }
            let approx = beta.eval_c64(refined_approx(a));
            Ok(LaurentDatum::Algebraic { factor: fac.clone(), value: beta, approx: Complex64Key(approx) })
        }
    }
}

fn refined_approx(a: &AlgebraicPoint) -> Complex64 {
    a.refined(1e-30).approx()
}

/// Coefficient c_k of x^(−k) in the expansion of f at infinity.
pub fn coefficient_at_infinity(f: &RationalFunction, k: usize) -> ExactScalar {
    let (n, d) = (f.num(), f.den());
    let (dn, dd) = match (n.degree(), d.degree()) {
        (Some(a), Some(b)) => (a as i64, b as i64),
        _ => return ExactScalar::zero(),
    };
    // Write f = Σ_j s_j x^(dn−dd−j); we need j = k + dn − dd.
    let jmax = k as i64 + dn - dd;
    if jmax < 0 {
        return ExactScalar::zero();
    }
    let lc_inv = d.leading().inv().unwrap();
    let mut s: Vec<ExactScalar> = Vec::new();
    for j in 0..=jmax as usize {
        let mut acc = if (dn as usize) >= j { n.coeff(dn as usize - j) } else { ExactScalar::zero() };
        for (i, si) in s.iter().enumerate() {
            let idx = dd as i64 - (j - i) as i64;
            if idx >= 0 {
                acc -= &(si * &d.coeff(idx as usize));
            }
        }
        s.push(&acc * &lc_inv);
    }
    s.pop().unwrap()
}

/// A Kovacic exponent: exact Gaussian rational, or r₀ + c·√radicand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Exact(ExactScalar),
    Quadratic { rational: BigRational, coeff: BigRational, radicand: ExactScalar },
    Algebraic { approx: Complex64Key },
}

impl Exponent {
    pub fn is_rational(&self) -> bool {
        matches!(self, Exponent::Exact(c) if c.is_real())
    }

    pub fn approx(&self) -> Complex64 {
        match self {
            Exponent::Exact(c) => c.to_c64(),
            Exponent::Quadratic { rational, coeff, radicand } => {
                super::scalar::rat_to_f64(rational) + super::scalar::rat_to_f64(coeff) * radicand.to_c64().sqrt()
            }
            Exponent::Algebraic { approx } => approx.0,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Exponent::Exact(c) => c.render(),
            Exponent::Quadratic { rational, coeff, radicand } => format!(
                "{} {} {}*sqrt({})",
                super::scalar::render_rational(rational),
                if coeff < &BigRational::from_integer(0.into()) { "-" } else { "+" },
                super::scalar::render_rational(&num_traits::Signed::abs(coeff)),
                radicand.render()
            ),
            Exponent::Algebraic { approx } => format!("≈ {:.12}{:+.12}i", approx.0.re, approx.0.im),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AlphaPair {
    pub plus: Exponent,
    pub minus: Exponent,
    pub rational: bool,
}

/// α± = (1 ± √(1+4b))/2, with an exact decision of rationality.
pub fn alpha_exponents(b: &LaurentDatum) -> AlphaPair {
    let half = rat(1, 2);
    match b {
        LaurentDatum::Exact(b) => {
            let disc = &ExactScalar::one() + &b.scale(&rat(4, 1));
            match gaussian_sqrt(&disc) {
                Some(s) => {
                    let h = ExactScalar::real(half);
                    let plus = &(&ExactScalar::one() + &s) * &h;
                    let minus = &(&ExactScalar::one() - &s) * &h;
                    let rational = plus.is_real() && minus.is_real();
                    AlphaPair { plus: Exponent::Exact(plus), minus: Exponent::Exact(minus), rational }
                }
                None => AlphaPair {
                    plus: Exponent::Quadratic { rational: half.clone(), coeff: half.clone(), radicand: disc.clone() },
                    minus: Exponent::Quadratic { rational: half.clone(), coeff: -half, radicand: disc },
                    rational: false,
                },
            }
        }
        // A rational α would force b = α(α − 1) rational, but b has degree > 1.
        LaurentDatum::Algebraic { approx, .. } => {
            let s = (1.0 + 4.0 * approx.0).sqrt();
            AlphaPair {
                plus: Exponent::Algebraic { approx: Complex64Key((1.0 + s) / 2.0) },
                minus: Exponent::Algebraic { approx: Complex64Key((1.0 - s) / 2.0) },
                rational: false,
            }
        }
    }
}

/// √(1+4b) when it is an exact rational number.
pub fn rational_sqrt_disc(b: &LaurentDatum) -> Option<BigRational> {
    let b = b.exact()?;
    if !b.is_real() {
        return None;
    }
    super::roots::rational_sqrt(&(BigRational::from_integer(1.into()) + &b.re * rat(4, 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::parse_expression;

    fn exact(n: i64, d: i64) -> LaurentDatum {
        LaurentDatum::Exact(ExactScalar::from_ratio(n, d))
    }

    #[test]
    fn simple_profiles() {
        let p = singular_profile(&parse_expression("1/x").unwrap());
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].location, Location::Rational(ExactScalar::zero()));
        assert_eq!(p[0].order, 1);
        assert_eq!(p[1].order, 1);
        let q = singular_profile(&parse_expression("x").unwrap());
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].order, -1);
    }

    #[test]
    fn residue_and_b() {
        let f = parse_expression("1/(x-1)").unwrap();
        let prof = singular_profile(&f);
        assert_eq!(laurent_coefficient(&f, &prof[0]).unwrap(), exact(1, 1));
        let g = parse_expression("(3/4)/x^2 + 1/x").unwrap();
        let prof = singular_profile(&g);
        assert_eq!(prof[0].b, Some(exact(3, 4)));
    }

    #[test]
    fn algebraic_location_b() {
        // b at each root of x^2 - 2 of 1/(x^2-2)^2 is 1/(2c)^2 = 1/8.
        let f = parse_expression("1/(x^2-2)^2").unwrap();
        let prof = singular_profile(&f);
        assert!(matches!(prof[0].location, Location::Algebraic(_)));
        assert_eq!(prof[0].b, Some(exact(1, 8)));
        // b = x/(4·2) at roots of x^2-2 is irrational.
        let g = parse_expression("x/(x^2-2)^2").unwrap();
        let prof = singular_profile(&g);
        match prof[0].b.as_ref().unwrap() {
            LaurentDatum::Algebraic { approx, .. } => {
                let c = prof[0].location.approx().unwrap();
                assert!((approx.0 - c / 8.0).norm() < 1e-12);
            }
            other => panic!("expected algebraic datum, got {other:?}"),
        }
    }

    #[test]
    fn infinity_coefficients() {
        let f = parse_expression("(2*x^2 + 1)/(x^4 + x)").unwrap();
        assert_eq!(coefficient_at_infinity(&f, 2), ExactScalar::from_int(2));
        let g = parse_expression("1/(x-1)").unwrap();
        // 1/(x-1) = 1/x + 1/x^2 + ...
        assert_eq!(coefficient_at_infinity(&g, 2), ExactScalar::one());
        let prof = singular_profile(&g);
        assert_eq!(laurent_coefficient(&g, &prof[1]).unwrap(), exact(1, 1));
        let h = parse_expression("x").unwrap();
        let prof = singular_profile(&h);
        assert!(matches!(laurent_coefficient(&h, &prof[0]), Err(AlgebraError::UnsupportedOrder { order: -1 })));
    }

    #[test]
    fn unsupported_finite_order() {
        let f = parse_expression("1/x^3").unwrap();
        let prof = singular_profile(&f);
        assert_eq!(laurent_coefficient(&f, &prof[0]), Err(AlgebraError::UnsupportedOrder { order: 3 }));
    }

    #[test]
    fn alpha_examples() {
        let a = alpha_exponents(&exact(5, 16));
        assert_eq!(a.plus, Exponent::Exact(ExactScalar::from_ratio(5, 4)));
        assert_eq!(a.minus, Exponent::Exact(ExactScalar::from_ratio(-1, 4)));
        let b = alpha_exponents(&exact(2, 1));
        assert_eq!((b.plus, b.minus), (Exponent::Exact(ExactScalar::from_int(2)), Exponent::Exact(ExactScalar::from_int(-1))));
        let z = alpha_exponents(&exact(0, 1));
        assert!(z.rational);
        assert_eq!(z.plus, Exponent::Exact(ExactScalar::one()));
        let irr = alpha_exponents(&exact(1, 1));
        assert!(!irr.rational);
    }
}
