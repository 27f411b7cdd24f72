mod common;

use bianchi_core::algebra::{rat, ExactScalar, Location};
use bianchi_core::model::second_ve::printed_coefficients;
use bianchi_core::model::*;
use common::*;
use nalgebra::Matrix4;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fd_gradient(y: [f64; 4], lambda: f64) -> [f64; 4] {
    let mut g = [0.0; 4];
    for k in 0..4 {
        let h = 1e-6 * (1.0 + y[k].abs());
        let (mut p, mut m) = (y, y);
        p[k] += h;
        m[k] -= h;
        g[k] = (hamiltonian_unchecked(&p, lambda) - hamiltonian_unchecked(&m, lambda)) / (2.0 * h);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vector_field_is_hamiltonian(a in -2.0f64..3.0, b in 0.3f64..3.0, pa in -3.0f64..3.0, pb in -3.0f64..3.0, lambda in 0.0f64..1.0) {
        let y = [a, b, pa, pb];
        let g = fd_gradient(y, lambda);
        let f = vector_field(&ModelState::from_array(y), lambda).unwrap();
        let expect = [g[2], g[3], -g[0], -g[1]];
        for k in 0..4 {
            prop_assert!((f[k] - expect[k]).abs() <= 1e-6 * (1.0 + expect[k].abs()), "{k}: {} vs {}", f[k], expect[k]);
        }
    }

    #[test]
    fn jacobian_matches_differences(a in -2.0f64..3.0, b in 0.3f64..3.0, pa in -3.0f64..3.0, pb in -3.0f64..3.0, lambda in 0.0f64..1.0) {
        let y = [a, b, pa, pb];
        let j = jacobian(&ModelState::from_array(y), lambda).unwrap();
        for col in 0..4 {
            let h = 1e-6 * (1.0 + y[col].abs());
            let (mut p, mut m) = (y, y);
            p[col] += h;
            m[col] -= h;
            let (fp, fm) = (vector_field_unchecked(&p, lambda), vector_field_unchecked(&m, lambda));
            for row in 0..4 {
                let d = (fp[row] - fm[row]) / (2.0 * h);
                prop_assert!((j[row][col] - d).abs() <= 1e-5 * (1.0 + d.abs()), "J[{row}][{col}] = {} vs {d}", j[row][col]);
            }
        }
    }

    #[test]
    fn hamiltonian_spectrum_is_symmetric(a in 0.2f64..3.0, b in 0.3f64..3.0, pa in -2.0f64..2.0, pb in -2.0f64..2.0, lambda in 0.0f64..1.0) {
        let lin = linearize(&ModelState::new(a, b, pa, pb), lambda).unwrap();
        let sum: f64 = lin.eigenvalues.iter().map(|z| z.re).sum();
        let tr: f64 = (0..4).map(|i| lin.jacobian[i][i]).sum();
        prop_assert!(tr.abs() <= 1e-12 * (1.0 + lin.jacobian.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max)));
        prop_assert!(sum.abs() <= 1e-8);
    }
}

#[test]
fn einstein_point_against_nalgebra() {
    for lambda in [0.1, 0.25, 3.0 / 28.0, 1.0] {
        let s = einstein_point(lambda).unwrap();
        let f = vector_field(&s, lambda).unwrap();
        assert!(f.iter().all(|v| v.abs() <= 1e-12), "{f:?}");
        let lin = linearize(&s, lambda).unwrap();
        let m = Matrix4::from_fn(|i, j| lin.jacobian[i][j]);
        let mut oracle: Vec<_> = m.complex_eigenvalues().iter().copied().collect();
        let mut ours = lin.eigenvalues.to_vec();
        let key = |z: &num_complex::Complex64| (z.re * 1e6).round() as i64 * 1_000_000_000 + (z.im * 1e6).round() as i64;
        oracle.sort_by_key(|z| key(&num_complex::Complex64::new(z.re, z.im)));
        ours.sort_by_key(key);
        for (o, u) in oracle.iter().zip(&ours) {
            assert!((o.re - u.re).abs() < 1e-8 && (o.im - u.im).abs() < 1e-8, "{o} vs {u}");
        }
        match lin.spectrum {
            Spectrum::SaddleCenter { a, b } => assert!(a > 0.0 && b > 0.0),
            Spectrum::Other => panic!("expected saddle-center at lambda = {lambda}"),
        }
    }
    assert!(einstein_point(0.0).is_err());
}

#[test]
fn restriction_to_the_taub_plane() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        use rand::Rng;
        let x: f64 = rng.gen_range(0.05..4.0);
        let xd: f64 = rng.gen_range(-2.0..2.0);
        let lambda: f64 = rng.gen_range(0.0..1.0);
        let s = taub_embedding(x, xd);
        let h = hamiltonian(&s, lambda).unwrap();
        let te = taub_energy(x, xd, lambda).unwrap();
        assert!((h - te).abs() <= 1e-12 * (1.0 + h.abs()), "{h} vs {te}");
        assert!(gamma_constraint(x, xd, lambda, te).abs() <= 1e-12 * (1.0 + te.abs()));
        let f = vector_field(&s, lambda).unwrap();
        // d/dt (x, x, 4xẋ, 8xẋ) with ẍ from the reduced equation
        let xdd = taub_acceleration(x, xd, lambda);
        let pdot = 4.0 * xd * xd + 4.0 * x * xdd;
        assert!((f[0] - xd).abs() <= 1e-12 * (1.0 + xd.abs()));
        assert!((f[1] - xd).abs() <= 1e-12 * (1.0 + xd.abs()));
        assert!((f[2] - pdot).abs() <= 1e-10 * (1.0 + pdot.abs()), "{} vs {pdot}", f[2]);
        assert!((f[3] - 2.0 * pdot).abs() <= 1e-10 * (1.0 + pdot.abs()));
    }
}

#[test]
fn laurent_anchors_at_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let zero = Location::Rational(ExactScalar::zero());
    for _ in 0..20 {
        let (l, e) = random_params(&mut rng);
        let suite = build_ve_suite(&ModelParams::new(l.clone(), e.clone())).unwrap();
        let b0 = b_at(&suite, &zero);
        let binf = b_at(&suite, &Location::Infinity);
        assert_eq!(b0, ExactScalar::from_ratio(5, 16), "lambda = {l}, E = {e}");
        assert_eq!(binf, ExactScalar::from_int(2));
        assert_eq!(exact_pair(&b0), (ExactScalar::from_ratio(5, 4), ExactScalar::from_ratio(-1, 4)));
        assert_eq!(exact_pair(&binf), (ExactScalar::from_int(2), ExactScalar::from_int(-1)));
    }
}

#[test]
fn vieta_on_c1() {
    let (l, e) = reference();
    let suite = build_ve_suite(&ModelParams::new(l.clone(), e.clone())).unwrap();
    let (sum, prod) = suite.vieta_exact().expect("rational roots");
    assert!(sum.is_zero());
    assert_eq!(prod, ExactScalar::real(-(e / (l * rat(2, 1)))));
    assert_eq!(suite.describe_rho(), vec!["1", "2", "-3"]);
    // irrational roots: floating sums within the isolation accuracy
    let suite = build_ve_suite(&ModelParams::new(rat(1, 10), rat(1, 4))).unwrap();
    assert!(suite.vieta_exact().is_none());
    let s: num_complex::Complex64 = suite.rho_approx.iter().sum();
    let p: num_complex::Complex64 = suite.rho_approx.iter().product();
    assert!(s.norm() < 1e-10, "{s}");
    assert!((p + 0.25 / 0.2).norm() < 1e-10, "{p}");
}

#[test]
fn discriminant_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let (l, e) = random_params(&mut rng);
        let suite = build_ve_suite(&ModelParams::new(l.clone(), e.clone())).unwrap();
        let expect = rat(-27, 16) * (rat(4, 1) * &e * &e * &l - rat(1, 1)) / (&l * &l * &l);
        assert_eq!(suite.discriminant, expect);
    }
}

#[test]
fn expansion_oracle_is_consistent() {
    // The oracle polynomial evaluated at t must equal C₂²(A + Bv² + Cv) computed in floating point.
    let (l, e) = reference();
    let (lf, ef) = (3.0 / 28.0, 9.0 / 7.0);
    let mu = rat(5, 2);
    let p = expanded_source(&l, &e, &mu);
    let t = 0.7f64;
    let x = t * t;
    let c2 = 35.0 * lf * x.powi(3) + 210.0 * x + 4.0 * ef;
    let c2p = 105.0 * lf * x * x + 210.0;
    let v = (x * c2p - c2 + 2.0 * 2.5 * t.powi(3)) / (2.0 * x * c2);
    let a = -(52.0 * lf * x.powi(3) - 459.0 * x + 14.0 * ef) / 3.0;
    let b = -2.0 * x / 3.0 * (4.0 * lf * x.powi(4) - 32.0 * lf * x.powi(3) - 3.0 * x * x + (2.0 * ef + 12.0) * x - 4.0 * ef);
    let c = -2.0 / 3.0 * (28.0 * lf * x.powi(4) - 4.0 * lf * x.powi(3) - 21.0 * x * x + (14.0 * ef + 99.0) * x - 2.0 * ef);
    let direct = c2 * c2 * (a + b * v * v + c * v);
    let via: f64 = p.iter().rev().fold(0.0, |acc, c| acc * t + bianchi_core::algebra::rat_to_f64(c));
    assert!((direct - via).abs() <= 1e-10 * direct.abs(), "{direct} vs {via}");
}

#[test]
fn quoted_coefficients_that_the_expansion_confirms() {
    let (l, e) = reference();
    let oracle = expanded_coefficients(&l, &e);
    let printed = printed_coefficients(&l, &e);
    assert_eq!(oracle.len(), 19);
    for k in [1usize, 17] {
        assert_eq!(oracle[k], printed[k].c, "a_{k}");
    }
    assert!(printed[17].c.iter().all(|c| c == &rat(0, 1)));
    let one = printed_coefficients(&rat(1, 1), &rat(2, 1));
    assert_eq!(one[18].c[0], rat(-31850, 3));
}
