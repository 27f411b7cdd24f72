//! The Kovacic algorithm for ξ″ = rξ with r ∈ Q(i)(x).
//!
//! All three cases are attempted for the audit trail; the verdict is the
//! first success in the requested order.

mod cases;
pub mod linalg;

use crate::algebra::singular::ORDER_UNBOUNDED;
use crate::algebra::{singular_profile, LaurentDatum, Location, PoleSite, Polynomial, RationalFunction};
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;

pub use cases::{case1, case2, case3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CaseOrder {
    /// 1 → 2 → 3
    #[default]
    Canonical,
    /// 1 → 3 → 2
    PrimitiveFirst,
}

impl CaseOrder {
    pub fn sequence(self) -> [u8; 3] {
        match self {
            CaseOrder::Canonical => [1, 2, 3],
            CaseOrder::PrimitiveFirst => [1, 3, 2],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Admissibility {
    Admissible,
    NotAdmissible(String),
    Unsupported(String),
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

/// Finite poles sharing one factor: a single rational point, or all roots of
/// an algebraic factor (treated with conjugate-uniform exponent choices).
#[derive(Clone, Debug)]
pub struct SiteGroup {
    pub label: String,
    pub factor: Polynomial,
    pub degree: usize,
    pub order: i64,
    pub b: Option<LaurentDatum>,
}

#[derive(Clone, Debug)]
pub struct KovacicInput {
    pub r: RationalFunction,
    pub profile: Vec<PoleSite>,
    pub groups: Vec<SiteGroup>,
    pub infinity_order: i64,
    pub infinity_b: Option<LaurentDatum>,
}

impl KovacicInput {
    pub fn new(r: RationalFunction) -> Self {
        let profile = singular_profile(&r);
        let mut groups: Vec<SiteGroup> = Vec::new();
        let mut infinity_order = ORDER_UNBOUNDED;
        let mut infinity_b = None;
        for site in &profile {
            match &site.location {
                Location::Infinity => {
                    infinity_order = site.order;
                    infinity_b = site.b.clone();
                }
                Location::Rational(c) => groups.push(SiteGroup {
                    label: c.render(),
                    factor: Polynomial::linear_root(c),
                    degree: 1,
                    order: site.order,
                    b: site.b.clone(),
                }),
                Location::Algebraic(a) => {
                    if groups.iter().any(|g| g.factor == a.factor && g.order == site.order) {
                        continue;
                    }
                    groups.push(SiteGroup {
                        label: format!("roots of {}", a.factor.render()),
                        factor: a.factor.clone(),
                        degree: a.factor.degree().unwrap(),
                        order: site.order,
                        b: site.b.clone(),
                    });
                }
            }
        }
        KovacicInput { r, profile, groups, infinity_order, infinity_b }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseStatuses {
    pub case1: Admissibility,
    pub case2: Admissibility,
    pub case3: Admissibility,
}

impl CaseStatuses {
    pub fn get(&self, case: u8) -> &Admissibility {
        match case {
            1 => &self.case1,
            2 => &self.case2,
            _ => &self.case3,
        }
    }

    pub fn admissible_ids(&self) -> BTreeSet<u8> {
        (1..=3).filter(|&c| self.get(c).is_admissible()).collect()
    }
}

/// Pole-order necessary conditions for each case.
pub fn necessary_conditions(input: &KovacicInput) -> CaseStatuses {
    let orders: Vec<i64> = input.groups.iter().map(|g| g.order).collect();
    let o_inf = input.infinity_order;

    let case1 = if let Some(o) = orders.iter().find(|&&o| o != 1 && o % 2 != 0) {
        Admissibility::NotAdmissible(format!("finite pole of odd order {o} > 1"))
    } else if o_inf != ORDER_UNBOUNDED && o_inf <= 2 && o_inf % 2 != 0 {
        Admissibility::NotAdmissible(format!("order {o_inf} at infinity is odd and below 2"))
    } else if let Some(o) = orders.iter().find(|&&o| o >= 4) {
        Admissibility::Unsupported(format!("finite pole of even order {o} needs Laurent data beyond order 2"))
    } else if o_inf != ORDER_UNBOUNDED && o_inf <= 0 {
        Admissibility::Unsupported(format!("order {o_inf} at infinity needs the polynomial part of √r"))
    } else {
        Admissibility::Admissible
    };

    let case2 = if orders.iter().any(|&o| o == 2 || (o > 2 && o % 2 == 1)) {
        Admissibility::Admissible
    } else {
        Admissibility::NotAdmissible("no finite pole of order 2 or of odd order > 2".into())
    };

    let case3 = if let Some(o) = orders.iter().find(|&&o| o > 2) {
        Admissibility::NotAdmissible(format!("unsupported pole order {o}: case 3 requires finite orders <= 2"))
    } else if o_inf != ORDER_UNBOUNDED && o_inf < 2 {
        Admissibility::NotAdmissible(format!("order {o_inf} at infinity is below 2"))
    } else {
        Admissibility::Admissible
    };

    CaseStatuses { case1, case2, case3 }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentSet {
    pub site: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SkippedFamily {
    pub family: String,
    pub reason: String,
}

/// The d = 0 cubic identity θ″ + 3θθ′ + θ³ − 4rθ − 2r′ evaluated exactly.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub theta: RationalFunction,
    pub residual: RationalFunction,
    pub holds: bool,
}

fn ser_opt_poly<S: Serializer>(p: &Option<Polynomial>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.serialize_some(&p.render()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseAttempt {
    pub case_id: u8,
    pub n: u32,
    pub admissibility: Admissibility,
    pub exponent_sets: Vec<ExponentSet>,
    pub degree_candidates: Vec<u64>,
    pub families_examined: usize,
    pub families_with_degree: usize,
    pub skipped_families: Vec<SkippedFamily>,
    pub theta: Option<RationalFunction>,
    #[serde(serialize_with = "ser_opt_poly")]
    pub witness_polynomial: Option<Polynomial>,
    pub identity_checks: Vec<IdentityCheck>,
    pub notes: Vec<String>,
    pub succeeded: bool,
    /// False when some family could not be decided over the base field.
    pub complete: bool,
}

impl CaseAttempt {
    pub(crate) fn skeleton(case_id: u8, n: u32, admissibility: Admissibility) -> Self {
        CaseAttempt {
            case_id,
            n,
            admissibility,
            exponent_sets: Vec::new(),
            degree_candidates: Vec::new(),
            families_examined: 0,
            families_with_degree: 0,
            skipped_families: Vec::new(),
            theta: None,
            witness_polynomial: None,
            identity_checks: Vec::new(),
            notes: Vec::new(),
            succeeded: false,
            complete: true,
        }
    }
}

/// Data of a successful attempt.
#[derive(Clone, Debug)]
pub struct CaseSuccess {
    pub case_id: u8,
    pub n: u32,
    pub degree: u64,
    pub theta: RationalFunction,
    pub p: Polynomial,
    /// Coefficients of the minimal polynomial of ω, ascending, monic.
    pub omega_min_poly: Vec<RationalFunction>,
    pub solution: SolutionDescription,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SolutionDescription {
    /// η = P·exp(∫θ)
    Exponential { prefactor: String, integrand: RationalFunction, text: String },
    /// ξ± = exp(∫(φ/2 ± √R))
    QuadraticExponential { phi: RationalFunction, radicand: RationalFunction, text: String },
    /// ξ = exp(∫ω) with ω a root of the recorded minimal polynomial.
    Algebraic { degree: u32, text: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GaloisLabel {
    #[serde(rename = "reducible/triangular")]
    Triangular,
    #[serde(rename = "infinite dihedral")]
    InfiniteDihedral,
    #[serde(rename = "finite primitive")]
    FinitePrimitive,
    #[serde(rename = "full SL(2)")]
    FullSL2,
}

impl GaloisLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            GaloisLabel::Triangular => "reducible/triangular",
            GaloisLabel::InfiniteDihedral => "infinite dihedral",
            GaloisLabel::FinitePrimitive => "finite primitive",
            GaloisLabel::FullSL2 => "full SL(2)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Succeeded(u8),
    AllFailed,
    Unsupported(String),
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Outcome::Succeeded(c) => s.serialize_str(&format!("case {c}")),
            Outcome::AllFailed => s.serialize_str("all-failed"),
            Outcome::Unsupported(r) => s.serialize_str(&format!("unsupported: {r}")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KovacicReport {
    pub input: RationalFunction,
    pub order: CaseOrder,
    pub profile: Vec<PoleSite>,
    pub admissibility: CaseStatuses,
    pub attempts: Vec<CaseAttempt>,
    pub outcome: Outcome,
    pub degree: Option<u64>,
    pub omega_data: Option<Vec<RationalFunction>>,
    pub solution: Option<SolutionDescription>,
    pub galois_label: Option<GaloisLabel>,
    pub quadratic_convention: &'static str,
}

pub const CASE2_CONVENTION: &str = "omega^2 - phi*omega + (phi'/2 + phi^2/2 - r) = 0, phi = theta + P'/P";

impl KovacicReport {
    pub fn attempt(&self, case_id: u8, n: u32) -> Option<&CaseAttempt> {
        self.attempts.iter().find(|a| a.case_id == case_id && a.n == n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn run(r: &RationalFunction, order: CaseOrder) -> KovacicReport {
    run_input(&KovacicInput::new(r.clone()), order)
}

pub fn run_input(input: &KovacicInput, order: CaseOrder) -> KovacicReport {
    let statuses = necessary_conditions(input);
    let mut attempts = Vec::new();
    let mut successes: Vec<CaseSuccess> = Vec::new();

    let (a1, s1) = case1(input, &statuses.case1);
    attempts.push(a1);
    successes.extend(s1);
    let (a2, s2) = case2(input, &statuses.case2);
    attempts.push(a2);
    successes.extend(s2);
    let (a3, s3) = case3(input, &statuses.case3);
    attempts.extend(a3);
    successes.extend(s3);

    let winner = order.sequence().iter().find_map(|&c| successes.iter().find(|s| s.case_id == c)).cloned();
    let (outcome, label) = match &winner {
        Some(s) => (
            Outcome::Succeeded(s.case_id),
            Some(match s.case_id {
                1 => GaloisLabel::Triangular,
                2 => GaloisLabel::InfiniteDihedral,
                _ => GaloisLabel::FinitePrimitive,
            }),
        ),
        None => {
            let unsupported: Vec<String> = [1u8, 2, 3]
                .iter()
                .filter_map(|&c| match statuses.get(c) {
                    Admissibility::Unsupported(why) => Some(format!("case {c}: {why}")),
                    _ => None,
                })
                .chain(
                    attempts
                        .iter()
                        .filter(|a| !a.complete)
                        .map(|a| format!("case {} (n = {}): undecided families over the base field", a.case_id, a.n)),
                )
                .collect();
            if unsupported.is_empty() {
                (Outcome::AllFailed, Some(GaloisLabel::FullSL2))
            } else {
                (Outcome::Unsupported(unsupported.join("; ")), None)
            }
        }
    };

    KovacicReport {
        input: input.r.clone(),
        order,
        profile: input.profile.clone(),
        admissibility: statuses,
        attempts,
        outcome,
        degree: winner.as_ref().map(|s| s.degree),
        omega_data: winner.as_ref().map(|s| s.omega_min_poly.clone()),
        solution: winner.map(|s| s.solution),
        galois_label: label,
        quadratic_convention: CASE2_CONVENTION,
    }
}
