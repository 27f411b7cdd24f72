//! The second-variational source checked numerically: the three-term form
//! against its exact reduction and against the quoted polynomial, the
//! unsimplified form, a sensitivity control and the particular solution.

use serde::Serialize;

use super::{candidate_constants, continuer, sample_states, EvidenceConfig, EvidenceError, ResidualReport, Xi};
use crate::model::eval::{PathPoint, SourceIntegrals};
use crate::model::second_ve::{eval_p, second_ve_source};
use crate::model::{MuCandidate, VeSuite};
use crate::numeric::{cauchy_derivatives, Polyline};

#[derive(Clone, Debug, Serialize)]
pub struct SecondVeReport {
    /// f̃ from η₁, η₁′ against (U + μσV)η₁².
    pub corrected: ResidualReport,
    /// f̃ against 𝒫(√x)η₁²/C₂² with the quoted coefficients.
    pub printed: ResidualReport,
    /// The eight-term form with ψ̂₄ = (2/3)η₁ against the three-term form.
    /// The two are known to differ; this is a diagnostic.
    pub eight_term: ResidualReport,
    /// Absolute deviation, in units of 𝒫, from the reduction shifted by one.
    /// Passes when the shift is detected.
    pub sensitivity: ResidualReport,
    /// ω_p″ − gω_p − yξ₁² relative to its largest term.
    pub omega_p: ResidualReport,
    /// Largest accumulated quadrature error estimate of I₁, I₂ at the samples.
    pub omega_quadrature_error: f64,
}

pub fn second_ve_equivalence(
    suite: &VeSuite,
    cand: &MuCandidate,
    path: &Polyline,
    cfg: &EvidenceConfig,
) -> Result<SecondVeReport, EvidenceError> {
    let src = second_ve_source(suite, cand);
    let cont = continuer(suite, cand, path, cfg)?;
    let mu = cont.mu;
    let n = cfg.stencil_points;
    let (mut corr, mut printed, mut eight, mut sens) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let x1 = Xi { cont: &cont, sign: 1.0 };
    for s in sample_states(&x1, path, cfg.samples) {
        let z = s.z();
        let eta = cont.derivatives(&s, n, |p| cont.eta(p, 1.0));
        let f3 = src.three_term(z, eta[0], eta[1]);
        let e2 = eta[0] * eta[0];
        let sigma = cont.s(&s.bp);
        let reduced = src.corrected_ratio(z, mu, sigma);
        corr.push((f3 - reduced * e2).norm() / f3.norm());
        let quoted = eval_p(&src.printed, cont.sqrt_x(&s), mu);
        let c2 = cont.c2(z);
        printed.push((f3 - quoted / (c2 * c2) * e2).norm() / f3.norm());
        let f8 = src.eight_term(z, eta, eta[0] * (2.0 / 3.0), eta[1] * (2.0 / 3.0));
        eight.push((f8 - f3).norm() / f3.norm());
        let p_units = f3 / e2 * c2 * c2;
        sens.push((p_units - (reduced * c2 * c2 + 1.0)).norm());
    }
    let c = candidate_constants(cand);
    let (omega, qerr) = omega_residuals(suite, cand, path, cfg)?;
    Ok(SecondVeReport {
        corrected: ResidualReport::new("f = (U + mu sigma V) eta_1^2", path, &corr, cfg.threshold, c.clone()),
        printed: ResidualReport::new("f = P(sqrt x) eta_1^2 / C2^2 (quoted coefficients)", path, &printed, cfg.threshold, c.clone()),
        eight_term: ResidualReport::new("eight-term form = three-term form", path, &eight, cfg.threshold, c.clone()),
        sensitivity: ResidualReport::new("shift by one unit of P is detected", path, &sens, cfg.reject_threshold, c.clone())
            .expect_large(),
        omega_p: ResidualReport::new("omega_p'' - g omega_p - y xi_1^2", path, &omega, cfg.omega_threshold, c),
        omega_quadrature_error: qerr,
    })
}

fn omega_residuals(
    suite: &VeSuite,
    cand: &MuCandidate,
    path: &Polyline,
    cfg: &EvidenceConfig,
) -> Result<(Vec<f64>, f64), EvidenceError> {
    let src = second_ve_source(suite, cand);
    let cont = continuer(suite, cand, path, cfg)?;
    let coeffs = &src.printed;
    let (refined, idx) = path.with_samples(cfg.samples);
    let mut state: (PathPoint, SourceIntegrals) = (cont.start(), SourceIntegrals::default());
    let mut out = Vec::new();
    let mut qerr = 0.0f64;
    let mut next = idx.iter().peekable();
    for (k, &v) in refined.vertices.iter().enumerate().skip(1) {
        state = cont.advance_source(&state.0, &state.1, v, coeffs);
        if next.peek() != Some(&&k) {
            continue;
        }
        next.next();
        let (pt, ints) = &state;
        qerr = qerr.max(ints.err1.max(ints.err2));
        let z = pt.z();
        let h = cont.stencil_radius(z);
        let d = cauchy_derivatives(z, h, cfg.stencil_points, |w| {
            let (p, i) = cont.advance_source(pt, ints, w, coeffs);
            cont.omega_p(&p, &i)
        });
        let xi = cont.xi(pt, 1.0);
        let h_term = cont.source_factor(&pt.bp, coeffs) * xi * xi;
        let g_term = suite.g.eval_c64(z) * d[0];
        let scale = d[2].norm().max(g_term.norm()).max(h_term.norm());
        out.push((d[2] - g_term - h_term).norm() / scale);
    }
    Ok((out, qerr))
}

