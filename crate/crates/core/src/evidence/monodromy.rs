//! Increments of the variation-of-parameters integrals around closed loops.

use num_complex::Complex64;
use serde::Serialize;

use super::{continuer, EvidenceConfig, EvidenceError};
use crate::model::eval::SourceIntegrals;
use crate::model::second_ve::second_ve_source;
use crate::model::{ModelError, MuCandidate, VeSuite};
use crate::numeric::{Polyline, QuadConfig};

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyReport {
    pub label: String,
    pub path: Polyline,
    pub base: Complex64,
    /// Singular points with nonzero winding number, as "name (winding)".
    pub enclosed: Vec<String>,
    /// γ₁ = ∮ y ξ₁²ξ₂ dx and γ₂ = ∮ y ξ₁³ dx with both integrals zero at the base.
    pub gamma: [Complex64; 2],
    /// Quadrature plus propagated exponent error for each increment.
    pub error: [f64; 2],
    /// |γᵢ| exceeds ten times its error bound.
    pub nonzero: [bool; 2],
    pub quad: QuadConfig,
}

fn named_points(suite: &VeSuite) -> Vec<(String, Complex64)> {
    let mut v = vec![("0".to_string(), Complex64::new(0.0, 0.0))];
    for (k, r) in suite.rho_approx.iter().enumerate() {
        v.push((format!("rho_{}", k + 1), *r));
    }
    for (k, r) in suite.c2_roots.iter().enumerate() {
        v.push((format!("C2 root {}", k + 1), *r));
    }
    v
}

pub fn monodromy_increments(
    suite: &VeSuite,
    cand: &MuCandidate,
    label: &str,
    path: &Polyline,
    cfg: &EvidenceConfig,
) -> Result<MonodromyReport, EvidenceError> {
    if !path.is_closed() {
        return Err(ModelError::Domain("monodromy needs a closed loop".into()).into());
    }
    let singular: Vec<Complex64> = named_points(suite).into_iter().map(|p| p.1).collect();
    let dist = singular.iter().map(|&p| path.distance_to(p)).fold(f64::INFINITY, f64::min);
    if dist < 1e-9 {
        return Err(EvidenceError::TooClose { distance: dist, margin: 1e-9 });
    }
    let cont = continuer(suite, cand, path, cfg)?;
    let coeffs = second_ve_source(suite, cand).printed;
    let mut pt = cont.start();
    let mut ints = SourceIntegrals::default();
    for &v in &path.vertices[1..] {
        (pt, ints) = cont.advance_source(&pt, &ints, v, &coeffs);
    }
    let enclosed = named_points(suite)
        .into_iter()
        .filter_map(|(name, p)| {
            let w = path.winding_number(p);
            (w != 0).then(|| format!("{name} ({w:+})"))
        })
        .collect();
    let gamma = [ints.i1, ints.i2];
    let error = [ints.err1, ints.err2];
    Ok(MonodromyReport {
        label: label.to_string(),
        path: path.clone(),
        base: path.start(),
        enclosed,
        gamma,
        error,
        nonzero: [gamma[0].norm() > 10.0 * error[0], gamma[1].norm() > 10.0 * error[1]],
        quad: cfg.quad,
    })
}

/// Circles of radius ¼ of the smallest distance among {0, ρ₁, ρ₂, ρ₃} around
/// each of those points, and one circle of the same size enclosing nothing.
pub fn default_loops(suite: &VeSuite, cfg: &EvidenceConfig) -> Vec<(String, Polyline)> {
    let pts = suite.finite_singularities();
    let mut dmin = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            dmin = dmin.min((pts[i] - pts[j]).norm());
        }
    }
    let named = named_points(suite);
    let mut r = 0.25 * dmin;
    // keep the circles off the roots of C₂
    let near_ring = |r: f64| {
        pts.iter()
            .any(|&c| named.iter().any(|(_, p)| ((p - c).norm() - r).abs() < 0.1 * r))
    };
    while near_ring(r) {
        r *= 0.8;
    }
    let mut loops: Vec<(String, Polyline)> = pts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let name = if k == 0 { "0".to_string() } else { format!("rho_{k}") };
            (format!("circle around {name}"), Polyline::circle(c, r, cfg.loop_segments, 0.0))
        })
        .collect();
    let rho = suite.rho_star();
    let dir = Complex64::new(0.0, 1.0) * rho / rho.norm();
    let mut center = rho * 0.5 + dir * (0.5 * rho.norm());
    for _ in 0..8 {
        if named.iter().all(|(_, p)| (p - center).norm() > 2.0 * r) {
            break;
        }
        center += dir * r;
    }
    loops.push(("circle enclosing no singular point".into(), Polyline::circle(center, r, cfg.loop_segments, 0.0)));
    loops
}
