mod common;

use bianchi_core::algebra::rat;
use bianchi_core::evidence::*;
use bianchi_core::model::eval::Continuer;
use bianchi_core::model::{build_ve_suite, ModelParams, VeSuite};
use bianchi_core::numeric::{Polyline, QuadConfig};
use common::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reference_suite() -> VeSuite {
    let (l, e) = reference();
    build_ve_suite(&ModelParams::new(l, e)).unwrap()
}

#[test]
fn unique_candidate_at_the_reference_instance() {
    let suite = reference_suite();
    let cfg = EvidenceConfig::default();
    let path = default_path(&suite, &cfg).unwrap();
    let res = resolve_constants(&suite, &path, &cfg).unwrap();
    assert_eq!(res.resolved, Some(0), "{}", res.verdict);
    assert!(res.candidates[0].residual.max_relative_residual <= 1e-8);
    for c in &res.candidates[1..] {
        assert!(c.residual.max_relative_residual > 1e-3, "{}: {}", c.label, c.residual.max_relative_residual);
    }
    let w = res.wronskian.unwrap();
    assert!(w.constant && w.relative_variation <= 1e-8, "{}", w.relative_variation);
    assert!(w.matches_quoted && w.relative_mismatch <= 1e-6, "{}", w.relative_mismatch);
    assert_eq!(res.candidates[0].residual.samples, 50);
    assert_eq!(res.candidates[0].residual.threshold, 1e-8);
}

#[test]
fn identities_at_reference_and_random_parameters() {
    let cfg = EvidenceConfig::default();
    let mut suites = vec![reference_suite()];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..5 {
        let (l, e) = random_params(&mut rng);
        suites.push(build_ve_suite(&ModelParams::new(l, e)).unwrap());
    }
    for suite in &suites {
        let path = default_path(suite, &cfg).unwrap();
        let res = resolve_constants(suite, &path, &cfg).unwrap();
        let cand = res.resolved_candidate(suite).unwrap_or_else(|| panic!("{} at {:?}", res.verdict, suite.params));
        for r in galois_identities(suite, cand, &path, &cfg).unwrap() {
            assert!(r.passed, "{}: {:.3e} at {:?}", r.quantity, r.max_relative_residual, suite.params);
        }
    }
}

#[test]
fn quotient_identity_ignores_the_sign_of_mu() {
    let suite = reference_suite();
    let cfg = EvidenceConfig::default();
    let path = default_path(&suite, &cfg).unwrap();
    let id3 = printed_log_quotient_square(&suite);
    let mu = suite.mu_squared_candidates[0].mu();
    for m in [mu, -mu] {
        let cont = Continuer::new(&suite, m, path.start(), cfg.quad).unwrap();
        let (x1, x2) = (Xi { cont: &cont, sign: 1.0 }, Xi { cont: &cont, sign: -1.0 });
        for s in sample_states(&x1, &path, 10) {
            let d1 = derivatives(&x1, &s, 32);
            let d2 = derivatives(&x2, &s, 32);
            let l = d2[1] / d2[0] - d1[1] / d1[0];
            let r = id3.eval_c64(s.z());
            assert!((l * l - r).norm() <= 1e-8 * r.norm());
        }
    }
}

#[test]
fn linear_solution_of_the_free_equation() {
    let path = Polyline::new(vec![Complex64::new(-1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(3.0, 1.0)]);
    let r = residual_check("y = x", &Entire(|z| z), &bianchi_core::algebra::RationalFunction::zero(), &path, &EvidenceConfig::default(), vec![]);
    assert!(r.passed && r.max_relative_residual < 1e-12);
}

#[test]
fn paths_through_singular_points_are_rejected() {
    let suite = reference_suite();
    let cfg = EvidenceConfig::default();
    let bad = Polyline::segment(Complex64::new(0.5, 0.0), Complex64::new(1.5, 0.0));
    assert!(matches!(resolve_constants(&suite, &bad, &cfg), Err(EvidenceError::TooClose { .. })));
}

#[test]
fn second_variational_source() {
    let suite = reference_suite();
    let cfg = EvidenceConfig::default();
    let path = default_path(&suite, &cfg).unwrap();
    let cand = &suite.mu_squared_candidates[0];
    let rep = second_ve_equivalence(&suite, cand, &path, &cfg).unwrap();
    assert!(rep.corrected.passed, "{:.3e}", rep.corrected.max_relative_residual);
    assert!(rep.sensitivity.passed, "{:.3e}", rep.sensitivity.max_relative_residual);
    assert!(rep.omega_p.passed && rep.omega_p.max_relative_residual <= 1e-6, "{:.3e}", rep.omega_p.max_relative_residual);
    assert_eq!(rep.omega_p.threshold, 1e-6);
}

#[test]
fn eight_term_form_differs_by_the_recorded_term() {
    // f₈ − f₃ = (2/3)(28λx⁴ − 36λx³ − 33x² + (26E+207)x − 6E) η₁η₁′
    let suite = reference_suite();
    let cfg = EvidenceConfig::default();
    let path = default_path(&suite, &cfg).unwrap();
    let cand = &suite.mu_squared_candidates[0];
    let src = bianchi_core::model::second_ve::second_ve_source(&suite, cand);
    let cont = Continuer::new(&suite, cand.mu(), path.start(), cfg.quad).unwrap();
    let (l, e) = (3.0 / 28.0, 9.0 / 7.0);
    for s in sample_states(&Xi { cont: &cont, sign: 1.0 }, &path, 8) {
        let z = s.z();
        let eta = cont.derivatives(&s, 16, |p| cont.eta(p, 1.0));
        let f3 = src.three_term(z, eta[0], eta[1]);
        let f8 = src.eight_term(z, eta, eta[0] * (2.0 / 3.0), eta[1] * (2.0 / 3.0));
        let poly = 28.0 * l * z.powi(4) - 36.0 * l * z.powi(3) - 33.0 * z * z + (26.0 * e + 207.0) * z - 6.0 * e;
        let expect = poly * eta[0] * eta[1] * (2.0 / 3.0);
        assert!((f8 - f3 - expect).norm() <= 1e-8 * f3.norm().max(expect.norm()));
    }
}

#[test]
fn reduction_of_order_integral() {
    // d/dx(ψ̂₂/ψ̂₁) = 1/(xψ̂₁³)
    let suite = reference_suite();
    let cfg = EvidenceConfig::default();
    let path = default_path(&suite, &cfg).unwrap();
    let cont = Continuer::new(&suite, suite.mu_squared_candidates[0].mu(), path.start(), cfg.quad).unwrap().with_psi2();
    for s in sample_states(&Xi { cont: &cont, sign: 1.0 }, &path, 20) {
        let d = cont.derivatives(&s, 16, |p| p.k);
        let psi1 = cont.psi_basis(&s)[0].0;
        let expect = 1.0 / (s.z() * psi1 * psi1 * psi1);
        assert!((d[1] - expect).norm() <= 1e-8 * expect.norm());
        let basis = cont.psi_basis(&s);
        assert_eq!(basis[2].1, -basis[2].0 / 2.0);
        assert_eq!(basis[0].1, basis[0].0);
    }
}

#[test]
fn monodromy_around_rho_and_around_nothing() {
    let suite = reference_suite();
    let cfg = EvidenceConfig::default();
    let cand = &suite.mu_squared_candidates[0];
    let loops = default_loops(&suite, &cfg);
    assert_eq!(loops.len(), 5);
    let (label, rho1) = &loops[1];
    let m = monodromy_increments(&suite, cand, label, rho1, &cfg).unwrap();
    assert_eq!(m.enclosed, vec!["rho_1 (+1)"]);
    assert!(m.nonzero.iter().any(|&b| b), "{:?} {:?}", m.gamma, m.error);
    let (label, none) = loops.last().unwrap();
    let m = monodromy_increments(&suite, cand, label, none, &cfg).unwrap();
    assert!(m.enclosed.is_empty());
    for k in 0..2 {
        assert!(m.gamma[k].norm() <= m.error[k], "{} vs {}", m.gamma[k].norm(), m.error[k]);
    }
}

#[test]
fn loop_then_inverse_cancels() {
    let suite = reference_suite();
    let cfg = EvidenceConfig::default();
    let cand = &suite.mu_squared_candidates[0];
    let rho2 = &default_loops(&suite, &cfg)[2].1;
    let there_and_back = rho2.then(&rho2.reversed());
    let m = monodromy_increments(&suite, cand, "L L^-1", &there_and_back, &cfg).unwrap();
    let single = monodromy_increments(&suite, cand, "L", rho2, &cfg).unwrap();
    for k in 0..2 {
        assert!(m.gamma[k].norm() <= 2.0 * m.error[k] + 1e-12 * single.gamma[k].norm(), "{} vs {}", m.gamma[k], m.error[k]);
    }
}

#[test]
fn increments_add_under_concatenation() {
    let suite = reference_suite();
    let cfg = EvidenceConfig::default();
    let cand = &suite.mu_squared_candidates[0];
    let l1 = &default_loops(&suite, &cfg)[1].1;
    let base = l1.start();
    // a small loop through the same base point that encloses nothing
    let l0 = Polyline::circle(base + 0.05, 0.05, 32, std::f64::consts::PI);
    let l0 = Polyline::new(l0.vertices.iter().map(|&v| if (v - base).norm() < 1e-15 { base } else { v }).collect());
    let g1 = monodromy_increments(&suite, cand, "L1", l1, &cfg).unwrap();
    let g0 = monodromy_increments(&suite, cand, "L0", &l0, &cfg).unwrap();
    let g01 = monodromy_increments(&suite, cand, "L0 L1", &l0.then(l1), &cfg).unwrap();
    for k in 0..2 {
        let bound = g0.error[k] + g1.error[k] + g01.error[k];
        assert!((g01.gamma[k] - g0.gamma[k] - g1.gamma[k]).norm() <= bound, "k = {k}");
    }
}

#[test]
fn tighter_quadrature_stays_within_the_old_bound() {
    let suite = reference_suite();
    let coarse = EvidenceConfig { quad: QuadConfig { rel_tol: 1e-9, ..QuadConfig::default() }, ..Default::default() };
    let fine = EvidenceConfig { quad: QuadConfig { rel_tol: 5e-10, ..QuadConfig::default() }, ..Default::default() };
    let cand = &suite.mu_squared_candidates[0];
    let path = default_path(&suite, &coarse).unwrap();
    let a = resolve_constants(&suite, &path, &coarse).unwrap();
    let b = resolve_constants(&suite, &path, &fine).unwrap();
    assert!(b.candidates[0].residual.max_relative_residual <= a.candidates[0].residual.max_relative_residual + 1e-9);
    let lp = &default_loops(&suite, &coarse)[2].1;
    let ma = monodromy_increments(&suite, cand, "coarse", lp, &coarse).unwrap();
    let mb = monodromy_increments(&suite, cand, "fine", lp, &fine).unwrap();
    for k in 0..2 {
        assert!((ma.gamma[k] - mb.gamma[k]).norm() <= ma.error[k] + mb.error[k]);
    }
}

#[test]
fn reports_serialize() {
    let suite = reference_suite();
    let cfg = EvidenceConfig::default();
    let path = default_path(&suite, &cfg).unwrap();
    let res = resolve_constants(&suite, &path, &cfg).unwrap();
    let v: serde_json::Value = serde_json::to_value(&res).unwrap();
    assert_eq!(v["candidates"][0]["residual"]["threshold"], 1e-8);
    let _ = rat(1, 1);
}
