//! Exact coefficient builders for the variational equations along the Taub plane.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{ModelError, ModelParams};
use crate::algebra::{
    isolate_complex_roots, rat, rat_to_f64, singular_profile, ExactScalar, Location, Polynomial, RationalFunction,
};

/// A candidate for the exponent constant: κ > 0 with μ² = −κ and μ = −i√κ.
#[derive(Clone, Debug, PartialEq)]
pub struct MuCandidate {
    pub label: &'static str,
    pub kappa: BigRational,
}

impl MuCandidate {
    pub fn mu_squared(&self) -> BigRational {
        -self.kappa.clone()
    }

    pub fn mu(&self) -> Complex64 {
        let k = rat_to_f64(&self.kappa);
        if k >= 0.0 {
            Complex64::new(0.0, -k.sqrt())
        } else {
            Complex64::new((-k).sqrt(), 0.0)
        }
    }
}

#[derive(Clone, Debug)]
pub struct VeSuite {
    pub params: ModelParams,
    pub c1: Polynomial,
    pub c2: Polynomial,
    pub p: RationalFunction,
    pub q: RationalFunction,
    pub g: RationalFunction,
    pub discriminant: BigRational,
    /// Roots of C₁ ordered by modulus, then argument.
    pub rho: Vec<Location>,
    pub rho_approx: Vec<Complex64>,
    pub c2_roots: Vec<Complex64>,
    pub mu_squared_candidates: Vec<MuCandidate>,
}

fn scalar(q: &BigRational) -> ExactScalar {
    ExactScalar::real(q.clone())
}

fn cubic(a3: &BigRational, a1: &BigRational, a0: &BigRational) -> Polynomial {
    Polynomial::from_rationals(&[a0.clone(), a1.clone(), BigRational::zero(), a3.clone()])
}

pub fn c1_poly(params: &ModelParams) -> Polynomial {
    cubic(&(rat(4, 1) * &params.lambda), &rat(-3, 1), &(rat(2, 1) * &params.energy))
}

pub fn c2_poly(params: &ModelParams) -> Polynomial {
    cubic(&(rat(35, 1) * &params.lambda), &rat(210, 1), &(rat(4, 1) * &params.energy))
}

fn rf(num: Polynomial, den: Polynomial) -> RationalFunction {
    RationalFunction::new(num, den).expect("nonzero denominator")
}

/// The three constants quoted for the exponent, in the order they are tried.
pub fn mu_candidates(params: &ModelParams) -> Vec<MuCandidate> {
    let el = &params.energy * &params.energy * &params.lambda;
    let b = rat(2450, 1);
    vec![
        MuCandidate { label: "486(E^2 lambda + 2450)", kappa: rat(486, 1) * (&el + &b) },
        MuCandidate { label: "486(6E^2 lambda + 2450)", kappa: rat(486, 1) * (rat(6, 1) * &el + &b) },
        MuCandidate { label: "1944(E^2 lambda + 2450)", kappa: rat(1944, 1) * (&el + &b) },
    ]
}

pub fn build_ve_suite(params: &ModelParams) -> Result<VeSuite, ModelError> {
    if params.lambda.is_zero() || params.energy.is_zero() {
        return Err(ModelError::Degenerate("lambda and E must be nonzero".into()));
    }
    let discriminant = params.discriminant().expect("lambda is nonzero");
    if discriminant.is_zero() {
        return Err(ModelError::Degenerate("discriminant of C1 vanishes (4E^2 lambda = 1)".into()));
    }
    let (l, e) = (&params.lambda, &params.energy);
    let c1 = c1_poly(params);
    let c2 = c2_poly(params);
    let x = Polynomial::x();
    // p = (8λx³ − 3x + E)/(x C₁), q = (−8λx³ + 27x − E)/(x² C₁)
    let p = rf(cubic(&(rat(8, 1) * l), &rat(-3, 1), e), &x * &c1);
    let q = rf(cubic(&(rat(-8, 1) * l), &rat(27, 1), &-e.clone()), &(&x * &x) * &c1);
    let quarter = RationalFunction::constant(ExactScalar::from_ratio(1, 4));
    let half = RationalFunction::constant(ExactScalar::from_ratio(1, 2));
    let g = &(&(&quarter * &(&p * &p)) + &(&half * &p.derivative())) - &q;

    let mut rho: Vec<(Location, Complex64)> = singular_profile(&rf(Polynomial::one(), c1.clone()))
        .into_iter()
        .filter(|s| s.location != Location::Infinity)
        .map(|s| {
            let z = s.location.approx().unwrap();
            (s.location, z)
        })
        .collect();
    rho.sort_by(|a, b| {
        let ka = (a.1.norm(), a.1.arg());
        let kb = (b.1.norm(), b.1.arg());
        ka.partial_cmp(&kb).unwrap()
    });
    let c2_roots = isolate_complex_roots(&c2).iter().map(|r| r.approx()).collect();
    Ok(VeSuite {
        params: params.clone(),
        c1,
        c2,
        p,
        q,
        g,
        discriminant,
        rho_approx: rho.iter().map(|r| r.1).collect(),
        rho: rho.into_iter().map(|r| r.0).collect(),
        c2_roots,
        mu_squared_candidates: mu_candidates(params),
    })
}

impl VeSuite {
    pub fn lambda(&self) -> f64 {
        self.params.lambda_f64()
    }

    pub fn energy(&self) -> f64 {
        self.params.energy_f64()
    }

    /// The root of C₁ closest to the origin.
    pub fn rho_star(&self) -> Complex64 {
        self.rho_approx[0]
    }

    /// Finite singular points of the normal form: 0 and the roots of C₁.
    pub fn finite_singularities(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0)];
        v.extend(self.rho_approx.iter().copied());
        v
    }

    /// The analytic value of the Wronskian for a given candidate: W(ξ₁, ξ₂) = −2μ.
    pub fn wronskian_for(&self, cand: &MuCandidate) -> Complex64 {
        -2.0 * cand.mu()
    }

    /// The Wronskian constant as quoted: 18i√(6E²λ + 14700).
    pub fn quoted_wronskian(&self) -> Complex64 {
        let el = self.energy() * self.energy() * self.lambda();
        Complex64::new(0.0, 18.0 * (6.0 * el + 14700.0).sqrt())
    }

    /// Vieta checks on C₁ at exact rational roots: Σρ = 0 and Πρ = −E/(2λ).
    pub fn vieta_exact(&self) -> Option<(ExactScalar, ExactScalar)> {
        let mut sum = ExactScalar::zero();
        let mut prod = ExactScalar::one();
        for loc in &self.rho {
            match loc {
                Location::Rational(c) => {
                    sum += c;
                    prod *= c;
                }
                _ => return None,
            }
        }
        Some((sum, prod))
    }

    pub fn describe_rho(&self) -> Vec<String> {
        self.rho.iter().map(|l| l.describe()).collect()
    }

    pub fn delta_sign(&self) -> i32 {
        if self.discriminant.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn scalar_lambda(&self) -> ExactScalar {
        scalar(&self.params.lambda)
    }

    pub fn scalar_energy(&self) -> ExactScalar {
        scalar(&self.params.energy)
    }
}
