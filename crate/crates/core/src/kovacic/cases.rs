use super::linalg::{
    assemble_monic, monic_solution, mp_add, mp_deriv, mp_mul, mp_scale, mp_sub, poly_mod, rank_mod, rat_mod, ModPoly,
    PRIME,
};
use super::{
    Admissibility, CaseAttempt, CaseSuccess, ExponentSet, IdentityCheck, KovacicInput, SiteGroup, SkippedFamily,
    SolutionDescription,
};
use crate::algebra::roots::{as_integer, gaussian_sqrt};
use crate::algebra::singular::{rational_sqrt_disc, ORDER_UNBOUNDED};
use crate::algebra::{alpha_exponents, rat, Exponent, ExactScalar, LaurentDatum, Polynomial, RationalFunction};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::collections::BTreeSet;

/// All index tuples of a mixed-radix counter, first slot slowest.
fn families(sizes: &[usize]) -> Vec<Vec<usize>> {
    if sizes.contains(&0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0; sizes.len()];
    loop {
        out.push(idx.clone());
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn log_derivative(f: &Polynomial) -> RationalFunction {
    RationalFunction::new(f.derivative(), f.clone()).unwrap()
}

fn lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    (a * b).exact_div(&Polynomial::gcd(a, b)).monic()
}

/// Numerators over a common denominator.
fn clear_denominators(fs: &[RationalFunction]) -> Vec<Polynomial> {
    let m = fs.iter().fold(Polynomial::one(), |acc, f| lcm(&acc, f.den()));
    fs.iter().map(|f| (f.num() * &m).exact_div(f.den())).collect()
}

fn render_ints(v: &[i64]) -> Vec<String> {
    v.iter().map(|e| e.to_string()).collect()
}

fn family_label(labels: &[String], choice: &[String]) -> String {
    labels.iter().zip(choice).map(|(l, c)| format!("{l}:{c}")).collect::<Vec<_>>().join(" ")
}

// ---------------------------------------------------------------- case 1

fn case1_choices(order: i64, b: &Option<LaurentDatum>, at_infinity: bool) -> Vec<Exponent> {
    let pair_of = |b: &LaurentDatum| {
        let p = alpha_exponents(b);
        if p.plus == p.minus {
            vec![p.plus]
        } else {
            vec![p.plus, p.minus]
        }
    };
    if at_infinity {
        if order == ORDER_UNBOUNDED || order > 2 {
            return vec![Exponent::Exact(ExactScalar::zero()), Exponent::Exact(ExactScalar::one())];
        }
        return pair_of(b.as_ref().expect("b at infinity"));
    }
    match order {
        1 => vec![Exponent::Exact(ExactScalar::one())],
        _ => pair_of(b.as_ref().expect("b at an order-2 pole")),
    }
}

/// True when Σ cⱼ√rⱼ = 0 exactly, grouping radicands into square classes.
fn surds_cancel(surds: &[(BigRational, ExactScalar)]) -> bool {
    let mut classes: Vec<(ExactScalar, ExactScalar)> = Vec::new();
    for (c, r) in surds {
        if r.is_zero() {
            continue;
        }
        let mut placed = false;
        for (rep, total) in classes.iter_mut() {
            if let Some(q) = gaussian_sqrt(&(r / &*rep)) {
                *total += &q.scale(c);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push((r.clone(), ExactScalar::real(c.clone())));
        }
    }
    classes.iter().all(|(_, t)| t.is_zero())
}

fn case1_search(r: &RationalFunction, theta: &RationalFunction, d: usize) -> Option<Polynomial> {
    // P″ + 2θP′ + (θ′ + θ² − r)P = 0
    let q = &(&theta.derivative() + &(theta * theta)) - r;
    let m = lcm(theta.den(), q.den());
    let tm = (theta.num() * &m).exact_div(theta.den());
    let qm = (q.num() * &m).exact_div(q.den());
    let cols: Vec<Polynomial> = (0..=d)
        .map(|k| {
            let xk = Polynomial::monomial(ExactScalar::one(), k);
            let d1 = xk.derivative();
            let d2 = d1.derivative();
            &(&(&d2 * &m) + &(&d1 * &tm).scale(&ExactScalar::from_int(2))) + &(&xk * &qm)
        })
        .collect();
    monic_solution(&cols).map(|s| assemble_monic(&s))
}

pub fn case1(input: &KovacicInput, status: &Admissibility) -> (CaseAttempt, Option<CaseSuccess>) {
    let mut att = CaseAttempt::skeleton(1, 1, status.clone());
    if !status.is_admissible() {
        return (att, None);
    }
    let mut labels = vec!["infinity".to_string()];
    let mut choices = vec![case1_choices(input.infinity_order, &input.infinity_b, true)];
    for g in &input.groups {
        labels.push(g.label.clone());
        choices.push(case1_choices(g.order, &g.b, false));
    }
    note_conjugate_uniform(&mut att, &input.groups, choices[1..].iter().map(|c| c.len()));
    att.exponent_sets = labels
        .iter()
        .zip(&choices)
        .map(|(l, c)| ExponentSet { site: l.clone(), values: c.iter().map(|e| e.render()).collect() })
        .collect();

    let sizes: Vec<usize> = choices.iter().map(|c| c.len()).collect();
    let mut dset = BTreeSet::new();
    let mut success = None;
    for idx in families(&sizes) {
        att.families_examined += 1;
        let mut exact = ExactScalar::zero();
        let mut surds = Vec::new();
        let mut algebraic = false;
        for (slot, &k) in idx.iter().enumerate() {
            let w = if slot == 0 { rat(1, 1) } else { rat(-(input.groups[slot - 1].degree as i64), 1) };
            match &choices[slot][k] {
                Exponent::Exact(c) => exact += &c.scale(&w),
                Exponent::Quadratic { rational, coeff, radicand } => {
                    exact += &ExactScalar::real(rational * &w);
                    surds.push((coeff * &w, radicand.clone()));
                }
                Exponent::Algebraic { .. } => algebraic = true,
            }
        }
        let label = || {
            family_label(&labels, &idx.iter().map(|&k| if k == 0 { "+".to_string() } else { "-".to_string() }).collect::<Vec<_>>())
        };
        if algebraic {
            att.complete = false;
            att.skipped_families.push(SkippedFamily { family: label(), reason: "exponent outside Q(i)".into() });
            continue;
        }
        if !surds.is_empty() {
            if surds_cancel(&surds) {
                att.complete = false;
                att.skipped_families.push(SkippedFamily {
                    family: label(),
                    reason: "surds cancel in d; omega would need a quadratic extension of Q(i)(x)".into(),
                });
            }
            continue;
        }
        let d = match as_integer(&exact).and_then(|d| d.to_u64()) {
            Some(d) => d,
            None => continue,
        };
        att.families_with_degree += 1;
        dset.insert(d);
        if success.is_some() {
            continue;
        }
        let mut theta = RationalFunction::zero();
        for (slot, g) in input.groups.iter().enumerate() {
            if let Exponent::Exact(a) = &choices[slot + 1][idx[slot + 1]] {
                theta = &theta + &log_derivative(&g.factor).scale(a);
            }
        }
        if let Some(p) = case1_search(&input.r, &theta, d as usize) {
            let omega = &theta + &RationalFunction::new(p.derivative(), p.clone()).unwrap();
            att.theta = Some(theta.clone());
            att.witness_polynomial = Some(p.clone());
            att.succeeded = true;
            success = Some(CaseSuccess {
                case_id: 1,
                n: 1,
                degree: d,
                theta: theta.clone(),
                p: p.clone(),
                omega_min_poly: vec![-omega, RationalFunction::one()],
                solution: SolutionDescription::Exponential {
                    prefactor: p.render(),
                    integrand: theta.clone(),
                    text: format!("({})*exp(integral({}))", p.render(), theta.render()),
                },
            });
        }
    }
    att.degree_candidates = dset.into_iter().collect();
    (att, success)
}

fn note_conjugate_uniform(att: &mut CaseAttempt, groups: &[SiteGroup], sizes: impl Iterator<Item = usize>) {
    for (g, n) in groups.iter().zip(sizes) {
        if g.degree > 1 && n > 1 {
            att.notes.push(format!("exponent choices are uniform over the conjugate {}", g.label));
        }
    }
}

// ---------------------------------------------------------------- case 2

fn case2_set(order: i64, b: &Option<LaurentDatum>, at_infinity: bool) -> Vec<i64> {
    let from_b = |b: &Option<LaurentDatum>| {
        let mut v = vec![2i64];
        if let Some(s) = b.as_ref().and_then(rational_sqrt_disc) {
            for sign in [1, -1] {
                let e = rat(2, 1) + rat(2 * sign, 1) * &s;
                if e.is_integer() {
                    v.push(e.to_integer().to_i64().unwrap());
                }
            }
        }
        v.sort();
        v.dedup();
        v
    };
    if at_infinity {
        return if order == ORDER_UNBOUNDED || order > 2 {
            vec![0, 2, 4]
        } else if order == 2 {
            from_b(b)
        } else {
            vec![order]
        };
    }
    match order {
        1 => vec![4],
        2 => from_b(b),
        o => vec![o],
    }
}

fn case2_columns(r: &RationalFunction, theta: &RationalFunction, d: usize) -> Vec<Polynomial> {
    let two_r = r.scale(&ExactScalar::from_int(2));
    let images: Vec<RationalFunction> = (0..=d)
        .map(|k| {
            let p2 = -RationalFunction::from_poly(Polynomial::monomial(ExactScalar::one(), k));
            let p1 = -&p2.derivative() - theta * &p2;
            let p0 = &(-&p1.derivative() - theta * &p1) - &(&two_r * &p2);
            &(-&p0.derivative() - theta * &p0) - &(&two_r * &p1)
        })
        .collect();
    clear_denominators(&images)
}

/// θ″ + 3θθ′ + θ³ − 4rθ − 2r′
pub fn case2_identity(theta: &RationalFunction, r: &RationalFunction) -> RationalFunction {
    let t1 = theta.derivative();
    let t2 = t1.derivative();
    let three = ExactScalar::from_int(3);
    let four = ExactScalar::from_int(4);
    let two = ExactScalar::from_int(2);
    let cube = &(theta * theta) * theta;
    &(&(&(&t2 + &(theta * &t1).scale(&three)) + &cube) - &(r * theta).scale(&four)) - &r.derivative().scale(&two)
}

pub fn case2(input: &KovacicInput, status: &Admissibility) -> (CaseAttempt, Option<CaseSuccess>) {
    let mut att = CaseAttempt::skeleton(2, 2, status.clone());
    if !status.is_admissible() {
        return (att, None);
    }
    let mut labels = vec!["infinity".to_string()];
    let mut sets = vec![case2_set(input.infinity_order, &input.infinity_b, true)];
    for g in &input.groups {
        labels.push(g.label.clone());
        sets.push(case2_set(g.order, &g.b, false));
    }
    note_conjugate_uniform(&mut att, &input.groups, sets[1..].iter().map(|s| s.len()));
    att.exponent_sets =
        labels.iter().zip(&sets).map(|(l, s)| ExponentSet { site: l.clone(), values: render_ints(s) }).collect();

    let sizes: Vec<usize> = sets.iter().map(|s| s.len()).collect();
    let mut dset = BTreeSet::new();
    let mut success = None;
    for idx in families(&sizes) {
        att.families_examined += 1;
        let mut total = sets[0][idx[0]];
        for (slot, g) in input.groups.iter().enumerate() {
            total -= g.degree as i64 * sets[slot + 1][idx[slot + 1]];
        }
        if total < 0 || total % 2 != 0 {
            continue;
        }
        let d = (total / 2) as u64;
        att.families_with_degree += 1;
        dset.insert(d);
        let mut theta = RationalFunction::zero();
        for (slot, g) in input.groups.iter().enumerate() {
            let e = sets[slot + 1][idx[slot + 1]];
            theta = &theta + &log_derivative(&g.factor).scale(&ExactScalar::from_ratio(e, 2));
        }
        if d == 0 && !att.identity_checks.iter().any(|c| c.theta == theta) {
            let residual = case2_identity(&theta, &input.r);
            att.identity_checks.push(IdentityCheck { theta: theta.clone(), holds: residual.is_zero(), residual });
        }
        if success.is_some() {
            continue;
        }
        let cols = case2_columns(&input.r, &theta, d as usize);
        if let Some(sol) = monic_solution(&cols) {
            let p = assemble_monic(&sol);
            let phi = &theta + &RationalFunction::new(p.derivative(), p.clone()).unwrap();
            let half = ExactScalar::from_ratio(1, 2);
            let quarter = ExactScalar::from_ratio(1, 4);
            let phi1 = phi.derivative();
            let phi2 = &phi * &phi;
            let c0 = &(&phi1.scale(&half) + &phi2.scale(&half)) - &input.r;
            let radicand = &(&input.r - &phi1.scale(&half)) - &phi2.scale(&quarter);
            att.theta = Some(theta.clone());
            att.witness_polynomial = Some(p.clone());
            att.succeeded = true;
            success = Some(CaseSuccess {
                case_id: 2,
                n: 2,
                degree: d,
                theta: theta.clone(),
                p,
                omega_min_poly: vec![c0, -phi.clone(), RationalFunction::one()],
                solution: SolutionDescription::QuadraticExponential {
                    text: format!("exp(integral(phi/2 +- sqrt(R))), phi = {}, R = {}", phi.render(), radicand.render()),
                    phi,
                    radicand,
                },
            });
        }
    }
    att.degree_candidates = dset.into_iter().collect();
    (att, success)
}

// ---------------------------------------------------------------- case 3

fn case3_set(n: u32, order: i64, b: &Option<LaurentDatum>, at_infinity: bool) -> Vec<i64> {
    let s = if at_infinity && (order == ORDER_UNBOUNDED || order > 2) {
        Some(rat(1, 1))
    } else if !at_infinity && order == 1 {
        return vec![12];
    } else {
        b.as_ref().and_then(rational_sqrt_disc)
    };
    let Some(s) = s else { return vec![6] };
    let half = n as i64 / 2;
    let mut v: Vec<i64> = (-half..=half)
        .filter_map(|k| {
            let e = rat(6, 1) + rat(12 * k, n as i64) * &s;
            e.is_integer().then(|| e.to_integer().to_i64().unwrap())
        })
        .collect();
    v.sort();
    v.dedup();
    v
}

struct Case3Data {
    s: Polynomial,
    sp: Polynomial,
    s2r: Polynomial,
    /// F_g′·S/F_g per group, so that Sθ = (n/12)Σ e_g·w_g.
    w: Vec<Polynomial>,
    modular: Option<(ModPoly, ModPoly, ModPoly, Vec<ModPoly>)>,
}

impl Case3Data {
    fn new(input: &KovacicInput) -> Self {
        let s = input.groups.iter().fold(Polynomial::one(), |acc, g| &acc * &g.factor);
        let sp = s.derivative();
        let s2r = (&(&s * &s) * input.r.num()).exact_div(input.r.den());
        let w: Vec<Polynomial> = input.groups.iter().map(|g| &g.factor.derivative() * &s.exact_div(&g.factor)).collect();
        let modular = (|| {
            let ws: Option<Vec<ModPoly>> = w.iter().map(poly_mod).collect();
            Some((poly_mod(&s)?, poly_mod(&sp)?, poly_mod(&s2r)?, ws?))
        })();
        Case3Data { s, sp, s2r, w, modular }
    }

    fn s_theta(&self, n: u32, es: &[i64]) -> Polynomial {
        let mut acc = Polynomial::zero();
        for (w, &e) in self.w.iter().zip(es) {
            acc = &acc + &w.scale(&ExactScalar::from_ratio(n as i64 * e, 12));
        }
        acc
    }

    /// P_n = −P, P_{i−1} = −S P_i′ + ((n−i)S′ − Sθ)P_i − (n−i)(i+1)S²r P_{i+1}.
    fn chain(&self, n: u32, st: &Polynomial, p: &Polynomial) -> Vec<Polynomial> {
        let n = n as i64;
        let mut out = vec![Polynomial::zero(); (n + 2) as usize];
        // out[j] holds P_{j−1}
        out[(n + 1) as usize] = -p;
        for i in (0..=n).rev() {
            let pi = &out[(i + 1) as usize];
            let pnext = if i == n { Polynomial::zero() } else { out[(i + 2) as usize].clone() };
            let a = -(&self.s * &pi.derivative());
            let b = &(&self.sp.scale(&ExactScalar::from_int(n - i)) - st) * pi;
            let c = (&self.s2r * &pnext).scale(&ExactScalar::from_int((n - i) * (i + 1)));
            out[i as usize] = &(&a + &b) - &c;
        }
        out
    }

    fn last_mod(&self, n: u32, st: &ModPoly, k: usize) -> ModPoly {
        let (s, sp, s2r, _) = self.modular.as_ref().unwrap();
        let n = n as u64;
        let mut next: ModPoly = Vec::new();
        let mut cur: ModPoly = vec![0; k + 1];
        cur[k] = PRIME - 1;
        for i in (0..=n).rev() {
            let a = mp_mul(s, &mp_deriv(&cur));
            let b = mp_mul(&mp_sub(&mp_scale(sp, (n - i) % PRIME), st), &cur);
            let c = mp_scale(&mp_mul(s2r, &next), ((n - i) * (i + 1)) % PRIME);
            let prev = mp_sub(&mp_sub(&b, &a), &c);
            next = std::mem::replace(&mut cur, prev);
        }
        cur
    }

    fn s_theta_mod(&self, n: u32, es: &[i64]) -> Option<ModPoly> {
        let (_, _, _, ws) = self.modular.as_ref()?;
        let mut acc: ModPoly = Vec::new();
        for (w, &e) in ws.iter().zip(es) {
            let c = rat_mod(&BigRational::new(BigInt::from(n as i64 * e), BigInt::from(12)))?;
            acc = mp_add(&acc, &mp_scale(w, c));
        }
        Some(acc)
    }

    /// Monic degree-d P with P_{−1} = 0, if any.
    fn search(&self, n: u32, es: &[i64], d: usize) -> Option<Polynomial> {
        if let Some(stm) = self.s_theta_mod(n, es) {
            let cols: Vec<ModPoly> = (0..=d).map(|k| self.last_mod(n, &stm, k)).collect();
            if rank_mod(&cols) == d + 1 {
                return None;
            }
        }
        let st = self.s_theta(n, es);
        let cols: Vec<Polynomial> = (0..=d)
            .map(|k| self.chain(n, &st, &Polynomial::monomial(ExactScalar::one(), k)).swap_remove(0))
            .collect();
        monic_solution(&cols).map(|s| assemble_monic(&s))
    }
}

fn factorial(k: i64) -> i64 {
    (1..=k).product()
}

pub fn case3(input: &KovacicInput, status: &Admissibility) -> (Vec<CaseAttempt>, Option<CaseSuccess>) {
    let mut attempts = Vec::new();
    let mut success = None;
    if !status.is_admissible() {
        for n in [4, 6, 12] {
            attempts.push(CaseAttempt::skeleton(3, n, status.clone()));
        }
        return (attempts, None);
    }
    let data = Case3Data::new(input);
    let mut labels = vec!["infinity".to_string()];
    labels.extend(input.groups.iter().map(|g| g.label.clone()));
    for n in [4u32, 6, 12] {
        let mut att = CaseAttempt::skeleton(3, n, status.clone());
        let mut sets = vec![case3_set(n, input.infinity_order, &input.infinity_b, true)];
        for g in &input.groups {
            sets.push(case3_set(n, g.order, &g.b, false));
        }
        note_conjugate_uniform(&mut att, &input.groups, sets[1..].iter().map(|s| s.len()));
        att.exponent_sets =
            labels.iter().zip(&sets).map(|(l, s)| ExponentSet { site: l.clone(), values: render_ints(s) }).collect();
        let sizes: Vec<usize> = sets.iter().map(|s| s.len()).collect();
        let all = families(&sizes);
        att.families_examined = all.len();
        let candidates: Vec<(u64, Vec<i64>)> = all
            .iter()
            .filter_map(|idx| {
                let mut total = sets[0][idx[0]];
                let es: Vec<i64> = (0..input.groups.len()).map(|slot| sets[slot + 1][idx[slot + 1]]).collect();
                for (g, e) in input.groups.iter().zip(&es) {
                    total -= g.degree as i64 * e;
                }
                let scaled = n as i64 * total;
                (total >= 0 && scaled % 12 == 0).then(|| ((scaled / 12) as u64, es))
            })
            .collect();
        att.families_with_degree = candidates.len();
        att.degree_candidates = candidates.iter().map(|(d, _)| *d).collect::<BTreeSet<_>>().into_iter().collect();
        let found: Vec<Option<Polynomial>> =
            candidates.par_iter().map(|(d, es)| data.search(n, es, *d as usize)).collect();
        let hit = candidates.iter().zip(found).find_map(|((d, es), p)| p.map(|p| (*d, es.clone(), p)));
        if let (Some((d, es, p)), None) = (hit, &success) {
            let st = data.s_theta(n, &es);
            let theta = RationalFunction::new(st.clone(), data.s.clone()).unwrap();
            let chain = data.chain(n, &st, &p);
            debug_assert!(chain[0].is_zero());
            // Σ S^i P_i/(n−i)! ω^i, P_i = chain[i + 1]
            let coeffs: Vec<RationalFunction> = (0..=n as i64)
                .map(|i| {
                    let c = &data.s.pow(i as u32) * &chain[(i + 1) as usize];
                    RationalFunction::from_poly(c.scale(&ExactScalar::from_ratio(1, factorial(n as i64 - i))))
                })
                .collect();
            let lead = coeffs.last().unwrap().clone();
            let monic: Vec<RationalFunction> = coeffs.iter().map(|c| c.checked_div(&lead).unwrap()).collect();
            att.theta = Some(theta.clone());
            att.witness_polynomial = Some(p.clone());
            att.succeeded = true;
            success = Some(CaseSuccess {
                case_id: 3,
                n,
                degree: d,
                theta,
                p,
                omega_min_poly: monic,
                solution: SolutionDescription::Algebraic {
                    degree: n,
                    text: format!("exp(integral(omega)), omega a root of the recorded degree-{n} polynomial"),
                },
            });
        }
        attempts.push(att);
    }
    (attempts, success)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_expression;

    fn input(s: &str) -> KovacicInput {
        KovacicInput::new(parse_expression(s).unwrap())
    }

    #[test]
    fn mixed_radix() {
        assert_eq!(families(&[2, 1, 3]).len(), 6);
        assert_eq!(families(&[2, 2])[1], vec![0, 1]);
        assert!(families(&[2, 0]).is_empty());
    }

    #[test]
    fn case3_sets_for_simple_b() {
        // b = 0: 6 + 12k/n
        let b = Some(LaurentDatum::Exact(ExactScalar::zero()));
        assert_eq!(case3_set(4, 2, &b, false), vec![0, 3, 6, 9, 12]);
        assert_eq!(case3_set(12, 1, &None, false), vec![12]);
        let irr = Some(LaurentDatum::Exact(ExactScalar::one()));
        assert_eq!(case3_set(12, 2, &irr, false), vec![6]);
    }

    #[test]
    fn case2_sets() {
        let b = Some(LaurentDatum::Exact(ExactScalar::from_int(2)));
        assert_eq!(case2_set(2, &b, false), vec![-4, 2, 8]);
        assert_eq!(case2_set(1, &None, false), vec![4]);
        assert_eq!(case2_set(5, &None, false), vec![5]);
        assert_eq!(case2_set(ORDER_UNBOUNDED, &None, true), vec![0, 2, 4]);
    }

    #[test]
    fn surd_classes() {
        let five = ExactScalar::from_int(5);
        let twenty = ExactScalar::from_int(20);
        assert!(surds_cancel(&[(rat(2, 1), five.clone()), (rat(-1, 1), twenty.clone())]));
        assert!(!surds_cancel(&[(rat(1, 1), five), (rat(-1, 1), ExactScalar::from_int(7))]));
    }

    #[test]
    fn case1_power_solution() {
        let inp = input("3/(4*x^2)");
        let (att, s) = case1(&inp, &Admissibility::Admissible);
        let s = s.unwrap();
        assert!(att.succeeded);
        assert_eq!(s.degree, 0);
        assert_eq!(s.theta, parse_expression("(3/2)/x").unwrap());
    }

    #[test]
    fn case2_identity_for_inverse_square() {
        let r = parse_expression("1/x^2").unwrap();
        let theta = parse_expression("1/x").unwrap();
        assert!(case2_identity(&theta, &r).is_zero());
    }
}
