//! Source term of the second variational equation in difference form.
//!
//! Three views of the same quantity f̃ are kept side by side: the quoted
//! coefficient table a₀…a₁₈ of 𝒫(√x), the three-term η₁/η₁′ combination and
//! an exact reduction f̃ = (U + μσV)η₁² with σ = √x/(C₂√C₁).

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::ve::{MuCandidate, VeSuite};
use crate::algebra::{rat, rat_to_f64, ExactScalar, Polynomial, RationalFunction};

/// c₀ + c₁μ + c₂μ² with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuQuadratic {
    pub c: [BigRational; 3],
}

impl MuQuadratic {
    pub fn new(c0: BigRational, c1: BigRational, c2: BigRational) -> Self {
        MuQuadratic { c: [c0, c1, c2] }
    }

    pub fn constant(c0: BigRational) -> Self {
        Self::new(c0, BigRational::zero(), BigRational::zero())
    }

    pub fn linear(c1: BigRational) -> Self {
        Self::new(BigRational::zero(), c1, BigRational::zero())
    }

    pub fn eval(&self, mu: Complex64) -> Complex64 {
        let [a, b, c] = self.c.each_ref().map(rat_to_f64);
        a + mu * (b + mu * c)
    }

    /// (rational part, coefficient of μ) once μ² is fixed.
    pub fn reduce(&self, mu_sq: &BigRational) -> (BigRational, BigRational) {
        (&self.c[0] + &self.c[2] * mu_sq, self.c[1].clone())
    }

    pub fn render(&self) -> String {
        use crate::algebra::render_rational as r;
        format!("({}) + ({})*mu + ({})*mu^2", r(&self.c[0]), r(&self.c[1]), r(&self.c[2]))
    }
}

/// The quoted coefficients a₀…a₁₈ instantiated at (λ, E), as quadratics in μ.
pub fn printed_coefficients(lambda: &BigRational, energy: &BigRational) -> Vec<MuQuadratic> {
    let (l, e) = (lambda, energy);
    let l2 = l * l;
    let l3 = &l2 * l;
    let e2 = e * e;
    let z = BigRational::zero;
    let k = |n: i64| rat(n, 1);
    let mut a = vec![MuQuadratic::constant(z()); 19];
    a[18] = MuQuadratic::constant(rat(-31850, 3) * &l3);
    a[17] = MuQuadratic::constant(z());
    a[16] = MuQuadratic::constant(k(4900) * &l3);
    a[15] = MuQuadratic::linear(k(-560) * &l2);
    a[14] = MuQuadratic::constant(rat(104125, 2) * &l2);
    a[13] = MuQuadratic::linear(rat(-1960, 3) * &l2);
    a[12] = MuQuadratic::new((k(-2835) * e + k(96775)) * &l2, z(), rat(-8, 3) * l);
    a[11] = MuQuadratic::linear(k(-2940) * l);
    a[10] = MuQuadratic::new(k(1120) * &l2 * e + k(1771350) * l, z(), rat(64, 3) * l);
    a[9] = MuQuadratic::linear(k(-344) * l * (e + rat(2975, 172)));
    a[8] = MuQuadratic::new((k(21560) * e + k(632100)) * l, z(), k(2));
    a[7] = MuQuadratic::linear(rat(-364, 3) * l * e + k(2520));
    a[6] = MuQuadratic::new(k(-232) * l * &e2 + k(15400) * l + k(6460650), z(), rat(-4, 3) - k(8));
    a[5] = MuQuadratic::linear(k(-1632) * e - k(12180));
    a[4] = MuQuadratic::new(k(64) * l * &e2 + k(231420) * e + k(1367100), z(), rat(8, 3) * e);
    a[3] = MuQuadratic::linear(k(-32) * e * (e + k(16)));
    a[2] = MuQuadratic::constant(k(1784) * &e2 + k(52080) * e);
    a[1] = MuQuadratic::linear(rat(-16, 3) * &e2);
    a[0] = MuQuadratic::constant(rat(-16, 3) * &e2 * (e - k(93)));
    a
}

/// 𝒫(t) for a given value t of √x.
pub fn eval_p(coeffs: &[MuQuadratic], t: Complex64, mu: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * t + a.eval(mu))
}

#[derive(Clone, Debug)]
pub struct SecondVeSource {
    pub printed: Vec<MuQuadratic>,
    /// f̃ = A η₁² + B (η₁′)² + C η₁η₁′
    pub a: Polynomial,
    pub b: Polynomial,
    pub c: Polynomial,
    /// The eight coefficient polynomials of the unsimplified form, in the order
    /// η₁², η₁η₁′, η₁η₁″, ψ̂₄′η₁, ψ̂₄η₁, ψ̂₄η₁′, ψ̂₄′η₁′, ψ̂₄′η₁″.
    pub eight: [Polynomial; 8],
    pub mu_squared: BigRational,
    pub u: RationalFunction,
    pub v: RationalFunction,
}

fn poly(c: &[BigRational]) -> Polynomial {
    Polynomial::from_rationals(c)
}

fn rf(num: Polynomial, den: Polynomial) -> RationalFunction {
    RationalFunction::new(num, den).expect("nonzero denominator")
}

pub fn second_ve_source(suite: &VeSuite, cand: &MuCandidate) -> SecondVeSource {
    let (l, e) = (&suite.params.lambda, &suite.params.energy);
    let z = BigRational::zero;
    let k = |n: i64| rat(n, 1);
    let third = |p: Polynomial, s: i64| p.scale(&ExactScalar::from_ratio(s, 3));
    // A = −(1/3)(52λx³ − 459x + 14E)
    let a = third(poly(&[k(14) * e, k(-459), z(), k(52) * l]), -1);
    // B = −(2x/3)(4λx⁴ − 32λx³ − 3x² + (2E+12)x − 4E)
    let b = third(poly(&[z(), k(-4) * e, k(2) * e + k(12), k(-3), k(-32) * l, k(4) * l]), -2);
    // C = −(2/3)(28λx⁴ − 4λx³ − 21x² + (14E+99)x − 2E)
    let c = third(poly(&[k(-2) * e, k(14) * e + k(99), k(-21), k(-4) * l, k(28) * l]), -2);

    let x = Polynomial::x();
    let c1 = &suite.c1;
    let x2c1 = &(&x * &x) * c1;
    let eight = [
        poly(&[k(2) * e, k(-27), z(), k(28) * l]),
        poly(&[z(), z(), k(12), z(), k(-48) * l]),
        x2c1.scale(&ExactScalar::from_int(-8)),
        &x * c1,
        poly(&[k(2) * e, k(-54), z(), k(28) * l]),
        -&(&x * &poly(&[k(2) * e, k(-9), z(), k(28) * l])),
        -&x2c1,
        x2c1.scale(&ExactScalar::from_int(-4)),
    ];

    let mu_sq = cand.mu_squared();
    let c2 = &suite.c2;
    // v₀ = C₂′/(2C₂) − 1/(2x) = (xC₂′ − C₂)/(2xC₂)
    let v0 = rf(&(&x * &c2.derivative()) - c2, (&x * c2).scale(&ExactScalar::from_int(2)));
    let sigma2 = rf(x.clone(), &(c2 * c2) * c1);
    let ra = RationalFunction::from(a.clone());
    let rb = RationalFunction::from(b.clone());
    let rc = RationalFunction::from(c.clone());
    let mu_sq_rf = RationalFunction::constant(ExactScalar::real(mu_sq.clone()));
    let u = &(&(&ra + &(&rb * &(&v0 * &v0))) + &(&rc * &v0)) + &(&(&rb * &mu_sq_rf) * &sigma2);
    let two = RationalFunction::constant(ExactScalar::from_int(2));
    let v = &(&two * &(&rb * &v0)) + &rc;
    SecondVeSource { printed: printed_coefficients(l, e), a, b, c, eight, mu_squared: mu_sq, u, v }
}

impl SecondVeSource {
    pub fn three_term(&self, x: Complex64, eta: Complex64, deta: Complex64) -> Complex64 {
        self.a.eval_c64(x) * eta * eta + self.b.eval_c64(x) * deta * deta + self.c.eval_c64(x) * eta * deta
    }

    /// The unsimplified form with independent values for ψ̂₄ and its derivative.
    pub fn eight_term(
        &self,
        x: Complex64,
        eta: [Complex64; 3],
        psi4: Complex64,
        dpsi4: Complex64,
    ) -> Complex64 {
        let [n0, n1, n2] = eta;
        let terms = [n0 * n0, n0 * n1, n0 * n2, dpsi4 * n0, psi4 * n0, psi4 * n1, dpsi4 * n1, dpsi4 * n2];
        self.eight.iter().zip(terms).map(|(p, t)| p.eval_c64(x) * t).sum()
    }

    /// (U + μσV) with σ given by its continued value.
    pub fn corrected_ratio(&self, x: Complex64, mu: Complex64, sigma: Complex64) -> Complex64 {
        self.u.eval_c64(x) + mu * sigma * self.v.eval_c64(x)
    }

    /// 𝒫(√x)/C₂(x)², the quoted ratio f̃/η₁².
    pub fn printed_ratio(&self, c2: &Polynomial, x: Complex64, t: Complex64, mu: Complex64) -> Complex64 {
        let c2x = c2.eval_c64(x);
        eval_p(&self.printed, t, mu) / (c2x * c2x)
    }
}
