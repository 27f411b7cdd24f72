//! Continuation of log(x − r) for a fixed set of roots along straight steps.
//!
//! A function Π(x − r_k)^{e_k} is evaluated as its principal value at the
//! base point times exp(Σ e_k Δ_k), where Δ_k is the change of log(x − r_k)
//! accumulated along the path actually taken.

use num_complex::Complex64;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub z: Complex64,
    roots: Arc<Vec<Complex64>>,
    dlog: Vec<Complex64>,
}

impl BranchPoint {
    pub fn base(z: Complex64, roots: Arc<Vec<Complex64>>) -> Self {
        let n = roots.len();
        BranchPoint { z, roots, dlog: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    /// Continue along the straight segment to `to`. Panics if the segment
    /// passes through a root.
    pub fn step(&self, to: Complex64) -> Self {
        let mut dlog = self.dlog.clone();
        for (d, r) in dlog.iter_mut().zip(self.roots.iter()) {
            let ratio = (to - r) / (self.z - r);
            assert!(ratio.is_finite() && ratio.norm() > 0.0, "path meets a branch point");
            *d += ratio.ln();
        }
        BranchPoint { z: to, roots: self.roots.clone(), dlog }
    }

    /// Δ log(x − r_k) since the base point.
    pub fn dlog(&self, k: usize) -> Complex64 {
        self.dlog[k]
    }

    /// exp(Σ w_k Δ_k) for the given root weights.
    pub fn factor(&self, weights: &[(usize, f64)]) -> Complex64 {
        let s: Complex64 = weights.iter().map(|&(k, w)| self.dlog[k] * w).sum();
        s.exp()
    }

    pub fn distance_to_roots(&self) -> f64 {
        self.roots.iter().map(|r| (self.z - r).norm()).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn square_root_changes_sign_around_its_branch_point() {
        let roots = Arc::new(vec![Complex64::new(0.0, 0.0)]);
        let mut p = BranchPoint::base(Complex64::new(1.0, 0.0), roots);
        for k in 1..=64 {
            p = p.step(Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 64.0));
        }
        let f = p.factor(&[(0, 0.5)]);
        assert!((f + 1.0).norm() < 1e-12);
    }
}
