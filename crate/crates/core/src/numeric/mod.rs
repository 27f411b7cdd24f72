//! Floating-point helpers shared by the model evaluators, the evidence
//! harness and the integrator: complex quadrature, polyline paths and
//! continuation of algebraic branches.

pub mod branch;
pub mod path;
pub mod quad;

pub use branch::BranchPoint;
pub use path::Polyline;
pub use quad::{integrate_segment, QuadConfig, QuadResult};

use num_complex::Complex64;
use std::f64::consts::TAU;

/// f, f′ and f″ at `z` from n values on the circle |w − z| = h (trapezoidal
/// Cauchy formula). `value_at` must return the analytic continuation of the
/// function along the radius from `z`.
pub fn cauchy_derivatives<F: FnMut(Complex64) -> Complex64>(z: Complex64, h: f64, n: usize, mut value_at: F) -> [Complex64; 3] {
    let mut s = [Complex64::new(0.0, 0.0); 3];
    for j in 0..n {
        let th = TAU * j as f64 / n as f64;
        let v = value_at(z + Complex64::from_polar(h, th));
        for (k, acc) in s.iter_mut().enumerate() {
            *acc += v * Complex64::from_polar(1.0, -(k as f64) * th);
        }
    }
    let n = n as f64;
    [s[0] / n, s[1] / (n * h), s[2] * 2.0 / (n * h * h)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cauchy_stencil_on_exponential() {
        let z = Complex64::new(0.3, -0.2);
        let d = cauchy_derivatives(z, 0.1, 16, |w| (2.0 * w).exp());
        let e = (2.0 * z).exp();
        assert!((d[0] - e).norm() < 1e-13);
        assert!((d[1] - 2.0 * e).norm() < 1e-11);
        assert!((d[2] - 4.0 * e).norm() < 1e-9);
    }
}
