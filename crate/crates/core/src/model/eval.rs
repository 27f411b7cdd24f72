//! Continued evaluation of the closed-form solutions along declared paths.
//!
//! Every algebraic factor x^a C₁^b C₂^c takes its principal value at the base
//! point of the path and is continued from there through the accumulated
//! changes of log(x − r) over the roots r of x·C₁·C₂. The exponent integral
//! J = ∫ √x/(C₂√C₁) dx and the integral in ψ̂₂ are carried segment by segment.

use num_complex::Complex64;
use std::cell::Cell;
use std::sync::Arc;

use super::second_ve::{eval_p, MuQuadratic};
use super::ve::VeSuite;
use super::ModelError;
use crate::numeric::{cauchy_derivatives, integrate_segment, BranchPoint, Polyline, QuadConfig};

/// Exponents of (x, C₁, C₂).
pub type Powers = [f64; 3];

const Q: Powers = [-0.25, 0.25, 0.0];
const XI: Powers = [-0.25, 0.25, 0.5];
const S: Powers = [0.5, -0.5, -1.0];
const ETA: Powers = [-0.5, 0.0, 0.5];
const PSI1: Powers = [-0.5, 0.5, 0.0];
const PSI2_INTEGRAND: Powers = [0.5, -1.5, 0.0];
const SQRT_X: Powers = [0.5, 0.0, 0.0];
const SOURCE: Powers = [-3.5, -1.25, -2.0];

#[derive(Clone, Debug)]
pub struct PathPoint {
    pub bp: BranchPoint,
    /// ∫ s dx from the base point.
    pub j: Complex64,
    pub j_err: f64,
    /// ∫ √(x/C₁³) dx from the base point (only when tracked).
    pub k: Complex64,
    pub k_err: f64,
}

impl PathPoint {
    pub fn z(&self) -> Complex64 {
        self.bp.z
    }
}

/// Running values of I₁ = ∫ y ξ₁²ξ₂ dx and I₂ = ∫ y ξ₁³ dx with y = 𝒫/(x^{7/2}C₁^{5/4}C₂²).
#[derive(Clone, Copy, Debug, Default)]
pub struct SourceIntegrals {
    pub i1: Complex64,
    pub i2: Complex64,
    pub err1: f64,
    pub err2: f64,
}

#[derive(Clone, Debug)]
pub struct Continuer {
    c1: Vec<Complex64>,
    c2: Vec<Complex64>,
    roots: Arc<Vec<Complex64>>,
    base: Complex64,
    log_base: [Complex64; 3],
    pub mu: Complex64,
    pub quad: QuadConfig,
    pub track_psi2: bool,
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn deriv(c: &[Complex64]) -> Vec<Complex64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect()
}

impl Continuer {
    pub fn new(suite: &VeSuite, mu: Complex64, base: Complex64, quad: QuadConfig) -> Result<Self, ModelError> {
        let mut roots = vec![Complex64::new(0.0, 0.0)];
        roots.extend(suite.rho_approx.iter().copied());
        roots.extend(suite.c2_roots.iter().copied());
        let c1 = suite.c1.to_c64_coeffs();
        let c2 = suite.c2.to_c64_coeffs();
        let this = Continuer {
            log_base: [base.ln(), horner(&c1, base).ln(), horner(&c2, base).ln()],
            c1,
            c2,
            roots: Arc::new(roots),
            base,
            mu,
            quad,
            track_psi2: false,
        };
        if this.clearance(base) < 1e-9 {
            return Err(ModelError::Domain("base point sits on a singular point".into()));
        }
        Ok(this)
    }

    pub fn with_psi2(mut self) -> Self {
        self.track_psi2 = true;
        self
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    /// Distance to the nearest of 0, the roots of C₁ and the roots of C₂.
    pub fn clearance(&self, z: Complex64) -> f64 {
        self.roots.iter().map(|r| (z - r).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn singular_points(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn c1(&self, z: Complex64) -> Complex64 {
        horner(&self.c1, z)
    }

    pub fn c2(&self, z: Complex64) -> Complex64 {
        horner(&self.c2, z)
    }

    pub fn start(&self) -> PathPoint {
        let zero = Complex64::new(0.0, 0.0);
        PathPoint { bp: BranchPoint::base(self.base, self.roots.clone()), j: zero, j_err: 0.0, k: zero, k_err: 0.0 }
    }

    /// x^a C₁^b C₂^c continued to `bp`.
    pub fn power(&self, bp: &BranchPoint, e: Powers) -> Complex64 {
        let d: Vec<Complex64> = (0..7).map(|k| bp.dlog(k)).collect();
        let l = (self.log_base[0] + d[0]) * e[0]
            + (self.log_base[1] + d[1] + d[2] + d[3]) * e[1]
            + (self.log_base[2] + d[4] + d[5] + d[6]) * e[2];
        l.exp()
    }

    pub fn s(&self, bp: &BranchPoint) -> Complex64 {
        self.power(bp, S)
    }

    /// Continue from `from` along the straight segment to `to`.
    pub fn advance(&self, from: &PathPoint, to: Complex64) -> PathPoint {
        let a = from.bp.z;
        if to == a {
            return from.clone();
        }
        let fs = |w: Complex64| self.power(&from.bp.step(w), S);
        let r = integrate_segment(&fs, a, to, &self.quad);
        let (mut k, mut k_err) = (from.k, from.k_err);
        if self.track_psi2 {
            let fk = |w: Complex64| self.power(&from.bp.step(w), PSI2_INTEGRAND);
            let rk = integrate_segment(&fk, a, to, &self.quad);
            k += rk.value;
            k_err += rk.error;
        }
        PathPoint { bp: from.bp.step(to), j: from.j + r.value, j_err: from.j_err + r.error, k, k_err }
    }

    /// Points at every vertex of `path`, which must start at the base point.
    pub fn walk(&self, path: &Polyline) -> Result<Vec<PathPoint>, ModelError> {
        if (path.start() - self.base).norm() > 1e-14 * (1.0 + self.base.norm()) {
            return Err(ModelError::Domain("path does not start at the base point".into()));
        }
        let mut out = vec![self.start()];
        for &v in &path.vertices[1..] {
            if self.clearance(v) < 1e-9 {
                return Err(ModelError::Domain("path meets a singular point".into()));
            }
            let next = self.advance(out.last().unwrap(), v);
            out.push(next);
        }
        Ok(out)
    }

    /// ξ₁ (sign = +1) or ξ₂ (sign = −1): (C₁/x)^{1/4}√C₂ exp(±μJ).
    pub fn xi(&self, pt: &PathPoint, sign: f64) -> Complex64 {
        self.power(&pt.bp, XI) * (self.mu * sign * pt.j).exp()
    }

    /// ξ′/ξ from the closed form: ¼(C₁′/C₁ − 1/x) + C₂′/(2C₂) ± μs.
    pub fn xi_log_derivative(&self, pt: &PathPoint, sign: f64) -> Complex64 {
        let z = pt.z();
        let l1 = horner(&deriv(&self.c1), z) / self.c1(z);
        let l2 = horner(&deriv(&self.c2), z) / self.c2(z);
        (l1 - 1.0 / z) * 0.25 + l2 * 0.5 + self.mu * sign * self.s(&pt.bp)
    }

    /// η = √(C₂/x) exp(±μJ), so that ξ = (xC₁)^{1/4} η.
    pub fn eta(&self, pt: &PathPoint, sign: f64) -> Complex64 {
        self.power(&pt.bp, ETA) * (self.mu * sign * pt.j).exp()
    }

    /// (xC₁)^{1/4} continued, the factor between η and ξ.
    pub fn eta_to_xi(&self, pt: &PathPoint) -> Complex64 {
        self.power(&pt.bp, [0.25, 0.25, 0.0])
    }

    /// (C₁/x)^{1/4}.
    pub fn q(&self, pt: &PathPoint) -> Complex64 {
        self.power(&pt.bp, Q)
    }

    pub fn sqrt_x(&self, pt: &PathPoint) -> Complex64 {
        self.power(&pt.bp, SQRT_X)
    }

    /// First-variational basis as (ψ̂ᵢ, ζ̂ᵢ), i = 1..4. ψ̂₂ needs `with_psi2`.
    pub fn psi_basis(&self, pt: &PathPoint) -> [(Complex64, Complex64); 4] {
        let psi1 = self.power(&pt.bp, PSI1);
        let psi2 = psi1 * pt.k;
        let base = self.power(&pt.bp, ETA) * (2.0 / 3.0);
        let psi3 = base * (self.mu * pt.j).exp();
        let psi4 = base * (-self.mu * pt.j).exp();
        [(psi1, psi1), (psi2, psi2), (psi3, -psi3 / 2.0), (psi4, -psi4 / 2.0)]
    }

    /// The circle radius used for derivative stencils at `z`.
    pub fn stencil_radius(&self, z: Complex64) -> f64 {
        0.25 * self.clearance(z)
    }

    /// (f, f′, f″) at `pt` for a function of the continued state.
    pub fn derivatives<F: Fn(&PathPoint) -> Complex64>(&self, pt: &PathPoint, n: usize, f: F) -> [Complex64; 3] {
        let h = self.stencil_radius(pt.z());
        cauchy_derivatives(pt.z(), h, n, |w| f(&self.advance(pt, w)))
    }

    /// y(x) = 𝒫(√x)/(x^{7/2}C₁^{5/4}C₂²) with 𝒫 given by its coefficients.
    pub fn source_factor(&self, bp: &BranchPoint, coeffs: &[MuQuadratic]) -> Complex64 {
        let t = self.power(bp, SQRT_X);
        eval_p(coeffs, t, self.mu) * self.power(bp, SOURCE)
    }

    /// Continue (state, I₁, I₂) along a straight segment. J at interior nodes
    /// comes from a nested quadrature; its error is propagated through ∫|f|.
    pub fn advance_source(
        &self,
        from: &PathPoint,
        ints: &SourceIntegrals,
        to: Complex64,
        coeffs: &[MuQuadratic],
    ) -> (PathPoint, SourceIntegrals) {
        let a = from.bp.z;
        if to == a {
            return (from.clone(), *ints);
        }
        let worst = Cell::new(0.0f64);
        let mu = self.mu;
        let node = |w: Complex64| {
            let bp = from.bp.step(w);
            let fs = |u: Complex64| self.power(&from.bp.step(u), S);
            let inner = integrate_segment(&fs, a, w, &self.quad);
            let j = from.j + inner.value;
            worst.set(worst.get().max(3.0 * mu.norm() * (from.j_err + inner.error)));
            let xi = self.power(&bp, XI);
            let e = (mu * j).exp();
            (self.source_factor(&bp, coeffs), xi, e)
        };
        let f1 = |w: Complex64| {
            let (y, xi, e) = node(w);
            y * xi * xi * xi * e
        };
        let f2 = |w: Complex64| {
            let (y, xi, e) = node(w);
            y * xi * xi * xi * e * e * e
        };
        let r1 = integrate_segment(&f1, a, to, &self.quad);
        let r2 = integrate_segment(&f2, a, to, &self.quad);
        let prop = worst.get();
        let out = SourceIntegrals {
            i1: ints.i1 + r1.value,
            i2: ints.i2 + r2.value,
            err1: ints.err1 + r1.error + prop * r1.abs_integral,
            err2: ints.err2 + r2.error + prop * r2.abs_integral,
        };
        (self.advance(from, to), out)
    }

    /// ω_p = (−ξ₁I₁ + ξ₂I₂)/W with W = −2μ.
    pub fn omega_p(&self, pt: &PathPoint, ints: &SourceIntegrals) -> Complex64 {
        let w = -2.0 * self.mu;
        (-self.xi(pt, 1.0) * ints.i1 + self.xi(pt, -1.0) * ints.i2) / w
    }

    pub fn g(&self, suite: &VeSuite, z: Complex64) -> Complex64 {
        suite.g.eval_c64(z)
    }
}
