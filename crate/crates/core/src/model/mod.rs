//! The axisymmetric Bianchi IX model with cosmological constant.
//!
//! H = P_A P_B/(4B) − A P_A²/(8B²) + 2A − A³/(2B²) − 2λAB², restricted to
//! the Taub plane A = B, P_B = 2P_A and linearized along it.

pub mod eval;
pub mod second_ve;
pub mod ve;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::rat_to_f64;

pub use ve::{build_ve_suite, MuCandidate, VeSuite};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
}

/// (λ, E) kept exact; floating views are derived on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelParams {
    pub lambda: BigRational,
    pub energy: BigRational,
}

impl ModelParams {
    pub fn new(lambda: BigRational, energy: BigRational) -> Self {
        ModelParams { lambda, energy }
    }

    pub fn lambda_f64(&self) -> f64 {
        rat_to_f64(&self.lambda)
    }

    pub fn energy_f64(&self) -> f64 {
        rat_to_f64(&self.energy)
    }

    /// Δ = −27(4E²λ − 1)/(16λ³); `None` when λ = 0.
    pub fn discriminant(&self) -> Option<BigRational> {
        if self.lambda.is_zero() {
            return None;
        }
        let (l, e) = (&self.lambda, &self.energy);
        let four = BigRational::from_integer(4.into());
        let num = -BigRational::from_integer(27.into()) * (four * e * e * l - BigRational::from_integer(1.into()));
        Some(num / (BigRational::from_integer(16.into()) * l * l * l))
    }

    /// Conditions under which the Galois-side constructions are defined.
    pub fn check_admissible(&self) -> Result<(), ModelError> {
        if self.lambda.is_zero() {
            return Err(ModelError::Degenerate("lambda = 0".into()));
        }
        if self.energy.is_zero() {
            return Err(ModelError::Degenerate("E = 0".into()));
        }
        if self.discriminant().is_some_and(|d| d.is_zero()) {
            return Err(ModelError::Degenerate("discriminant of C1 vanishes (4E^2 lambda = 1)".into()));
        }
        if !self.lambda.is_positive() {
            return Err(ModelError::Domain("lambda must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelState {
    pub a: f64,
    pub b: f64,
    pub pa: f64,
    pub pb: f64,
}

impl ModelState {
    pub fn new(a: f64, b: f64, pa: f64, pb: f64) -> Self {
        ModelState { a, b, pa, pb }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.pa, self.pb]
    }

    pub fn from_array(y: [f64; 4]) -> Self {
        ModelState { a: y[0], b: y[1], pa: y[2], pb: y[3] }
    }

    pub fn max_norm(&self) -> f64 {
        self.to_array().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn need_b(s: &ModelState) -> Result<(), ModelError> {
    if s.b == 0.0 || !s.b.is_finite() {
        return Err(ModelError::Domain("B = 0".into()));
    }
    Ok(())
}

pub fn hamiltonian(s: &ModelState, lambda: f64) -> Result<f64, ModelError> {
    need_b(s)?;
    Ok(hamiltonian_unchecked(&s.to_array(), lambda))
}

pub fn hamiltonian_unchecked(y: &[f64; 4], lambda: f64) -> f64 {
    let [a, b, pa, pb] = *y;
    let b2 = b * b;
    pa * pb / (4.0 * b) - a * pa * pa / (8.0 * b2) + 2.0 * a - a * a * a / (2.0 * b2) - 2.0 * lambda * a * b2
}

pub fn vector_field(s: &ModelState, lambda: f64) -> Result<[f64; 4], ModelError> {
    need_b(s)?;
    Ok(vector_field_unchecked(&s.to_array(), lambda))
}

pub fn vector_field_unchecked(y: &[f64; 4], lambda: f64) -> [f64; 4] {
    let [a, b, pa, pb] = *y;
    let b2 = b * b;
    let b3 = b2 * b;
    [
        pb / (4.0 * b) - a * pa / (4.0 * b2),
        pa / (4.0 * b),
        pa * pa / (8.0 * b2) - 2.0 + 1.5 * a * a / b2 + 2.0 * lambda * b2,
        pa * pb / (4.0 * b2) - a * pa * pa / (4.0 * b3) - a * a * a / b3 + 4.0 * lambda * a * b,
    ]
}

pub fn einstein_point(lambda: f64) -> Result<ModelState, ModelError> {
    if !(lambda > 0.0) {
        return Err(ModelError::Domain("the Einstein point needs lambda > 0".into()));
    }
    let x = 1.0 / (4.0 * lambda).sqrt();
    Ok(ModelState::new(x, x, 0.0, 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Spectrum {
    /// ±a real and ±ib imaginary.
    SaddleCenter { a: f64, b: f64 },
    Other,
}

#[derive(Clone, Debug, Serialize)]
pub struct Linearization {
    pub jacobian: [[f64; 4]; 4],
    pub eigenvalues: [Complex64; 4],
    pub spectrum: Spectrum,
}

pub fn jacobian(s: &ModelState, lambda: f64) -> Result<[[f64; 4]; 4], ModelError> {
    need_b(s)?;
    let ModelState { a, b, pa, pb } = *s;
    let (b2, b3, b4) = (b * b, b * b * b, b * b * b * b);
    Ok([
        [-pa / (4.0 * b2), -pb / (4.0 * b2) + a * pa / (2.0 * b3), -a / (4.0 * b2), 1.0 / (4.0 * b)],
        [0.0, -pa / (4.0 * b2), 1.0 / (4.0 * b), 0.0],
        [3.0 * a / b2, -pa * pa / (4.0 * b3) - 3.0 * a * a / b3 + 4.0 * lambda * b, pa / (4.0 * b2), 0.0],
        [
            -pa * pa / (4.0 * b3) - 3.0 * a * a / b3 + 4.0 * lambda * b,
            -pa * pb / (2.0 * b3) + 3.0 * a * pa * pa / (4.0 * b4) + 3.0 * a * a * a / b4 + 4.0 * lambda * a,
            pb / (4.0 * b2) - a * pa / (2.0 * b3),
            pa / (4.0 * b2),
        ],
    ])
}

fn mat_mul(x: &[[f64; 4]; 4], y: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    out
}

fn trace(m: &[[f64; 4]; 4]) -> f64 {
    (0..4).map(|i| m[i][i]).sum()
}

/// Characteristic polynomial coefficients [c0, c1, c2, c3] of s⁴ + c3 s³ + … by Faddeev–LeVerrier.
fn char_poly(m: &[[f64; 4]; 4]) -> [f64; 4] {
    let mut c = [0.0; 5];
    c[4] = 1.0;
    let mut mk = [[0.0; 4]; 4];
    for k in 1..=4 {
        let mut prod = mat_mul(m, &mk);
        for i in 0..4 {
            prod[i][i] += c[5 - k];
        }
        mk = prod;
        let am = mat_mul(m, &mk);
        c[4 - k] = -trace(&am) / k as f64;
    }
    [c[0], c[1], c[2], c[3]]
}

/// Jacobian and its spectrum. Hamiltonian matrices have an even characteristic
/// polynomial, so the eigenvalues are ±√u for the roots u of u² + c₂u + c₀.
pub fn linearize(s: &ModelState, lambda: f64) -> Result<Linearization, ModelError> {
    let j = jacobian(s, lambda)?;
    let c = char_poly(&j);
    let disc = Complex64::new(c[2] * c[2] - 4.0 * c[0], 0.0).sqrt();
    let u1 = (-c[2] + disc) / 2.0;
    let u2 = (-c[2] - disc) / 2.0;
    let (r1, r2) = (u1.sqrt(), u2.sqrt());
    let eigenvalues = [r1, -r1, r2, -r2];
    let scale = c[2].abs().max(c[0].abs().sqrt()).max(1e-300);
    let real = |u: Complex64| u.im.abs() <= 1e-12 * scale;
    let spectrum = if real(u1) && real(u2) && u1.re * u2.re < 0.0 {
        let (pos, neg) = if u1.re > 0.0 { (u1.re, u2.re) } else { (u2.re, u1.re) };
        Spectrum::SaddleCenter { a: pos.sqrt(), b: (-neg).sqrt() }
    } else {
        Spectrum::Other
    };
    Ok(Linearization { jacobian: j, eigenvalues, spectrum })
}

/// Energy on the Taub plane: 3y²/(8x) + (3/2)x − 2λx³ with y = 4xẋ.
pub fn taub_energy(x: f64, xdot: f64, lambda: f64) -> Result<f64, ModelError> {
    if !(x > 0.0) {
        return Err(ModelError::Domain("x must be positive".into()));
    }
    let y = 4.0 * x * xdot;
    Ok(3.0 * y * y / (8.0 * x) + 1.5 * x - 2.0 * lambda * x * x * x)
}

/// 6xẋ² + (3/2)x − 2λx³ − E.
pub fn gamma_constraint(x: f64, xdot: f64, lambda: f64, energy: f64) -> f64 {
    6.0 * x * xdot * xdot + 1.5 * x - 2.0 * lambda * x * x * x - energy
}

/// The point of the full phase space on the Taub plane.
pub fn taub_embedding(x: f64, xdot: f64) -> ModelState {
    ModelState::new(x, x, 4.0 * x * xdot, 8.0 * x * xdot)
}

/// ẍ = −1/(8x) + λx/2 − ẋ²/(2x) on the Taub plane.
pub fn taub_acceleration(x: f64, xdot: f64, lambda: f64) -> f64 {
    -1.0 / (8.0 * x) + lambda * x / 2.0 - xdot * xdot / (2.0 * x)
}
