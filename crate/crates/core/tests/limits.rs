use std::f64::consts::PI;

use ncsphere::halfint::HalfInt;
use ncsphere::limits::*;
use ncsphere::symalg::{eval_scalar, Algebra, NormalForm};
use ncsphere::Error;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn pmn0(n: i64, m: i64) -> NormalForm {
    limit_poly(n, m).unwrap()
}

fn pt(theta: f64, phi: f64) -> SpherePoint {
    SpherePoint::new(theta, phi).unwrap()
}

fn labels(nmax: i64) -> Vec<(i64, i64)> {
    (0..=nmax).flat_map(|n| (-n..=n).map(move |m| (n, m))).collect()
}

#[test]
fn evaluation_examples() {
    let r = 1.7;
    let v = eval_on_sphere(&pmn0(1, 0), pt(0.0, 0.0), r);
    assert!((v - Complex64::new(-2f64.sqrt() * r, 0.0)).norm() < 1e-12);
    let v = eval_on_sphere(&pmn0(1, 1), pt(PI / 2.0, 0.0), r);
    assert!((v.norm() - r).abs() < 1e-12);
    let cas = Algebra::sphere().casimir().at_eps_zero();
    for p in [pt(0.3, 1.1), pt(2.0, 5.0), pt(PI, 0.0)] {
        assert!((eval_on_sphere(&cas, p, r) - Complex64::new(r * r, 0.0)).norm() < 1e-12);
    }
    assert!(SpherePoint::new(-0.1, 0.0).is_err());
    assert!(SpherePoint::new(0.1, 2.0 * PI).is_err());
}

#[test]
fn jet_derivatives_match_finite_differences() {
    let r = 1.3;
    let h = 1e-6;
    for (n, m) in labels(3) {
        let f = pmn0(n, m);
        let p = pt(1.1, 2.3);
        let jet = eval_jet(&f, p, r);
        let dt = (eval_on_sphere(&f, pt(p.theta + h, p.phi), r) - eval_on_sphere(&f, pt(p.theta - h, p.phi), r)) / (2.0 * h);
        let dp = (eval_on_sphere(&f, pt(p.theta, p.phi + h), r) - eval_on_sphere(&f, pt(p.theta, p.phi - h), r)) / (2.0 * h);
        let scale = 1.0 + jet.f.norm();
        assert!((jet.d_theta - dt).norm() < 1e-6 * scale, "({n},{m})");
        assert!((jet.d_phi - dp).norm() < 1e-6 * scale, "({n},{m})");
    }
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let rule = gauss_legendre(6);
    assert!((rule.iter().map(|(_, w)| w).sum::<f64>() - 2.0).abs() < 1e-14);
    for deg in 0..12 {
        let got: f64 = rule.iter().map(|(x, w)| w * x.powi(deg)).sum();
        let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
        assert!((got - want).abs() < 1e-14, "degree {deg}");
    }
}

#[test]
fn quadrature_inner_product_matches_exact_form() {
    let alg = Algebra::sphere();
    let r = 1.25;
    let grid = SphereQuadrature::for_degree(8);
    for (n1, m1) in labels(4) {
        for (n2, m2) in labels(4) {
            if (m1 - m2).abs() > 1 && n1 != n2 {
                continue;
            }
            let f = alg.build_pmn(n1, m1).unwrap();
            let g = alg.build_pmn(n2, m2).unwrap();
            let exact = eval_scalar(&alg.inner(&f, &g).unwrap(), 0.0, r);
            let quad = quad_inner(&f.at_eps_zero(), &g.at_eps_zero(), r, &grid);
            let scale = 1.0 + exact.norm();
            assert!((exact - quad).norm() < 1e-10 * scale, "({n1},{m1}) ({n2},{m2}): {exact} vs {quad}");
        }
    }
}

#[test]
fn poisson_bracket_basic_properties() {
    let r = 1.0;
    let ff = poisson_bracket_coeffs(2, 1, 2, 1, r).unwrap();
    assert!(ff.values().all(|v| v.norm() < 1e-12));
    let ab = poisson_bracket_coeffs(1, 0, 2, 1, r).unwrap();
    let ba = poisson_bracket_coeffs(2, 1, 1, 0, r).unwrap();
    for (key, v) in &ab {
        assert!((v + ba[key]).norm() < 1e-12);
        if key.1 != 1 {
            assert!(v.norm() < 1e-12, "weight {key:?}");
        }
    }
    let with_const = poisson_bracket_coeffs(0, 0, 2, -1, r).unwrap();
    assert!(with_const.values().all(|v| v.norm() < 1e-12));
}

#[test]
fn poisson_leibniz_pointwise() {
    let r = 0.9;
    let alg = Algebra::sphere();
    let f = pmn0(2, 1);
    let g = pmn0(1, -1);
    let hh = pmn0(2, 0);
    let gh = alg.multiply(&g, &hh).at_eps_zero();
    for p in [pt(0.4, 0.2), pt(1.3, 4.0), pt(2.8, 3.3)] {
        let (jf, jg, jh, jgh) = (eval_jet(&f, p, r), eval_jet(&g, p, r), eval_jet(&hh, p, r), eval_jet(&gh, p, r));
        let lhs = poisson_at(&jf, &jgh, p, r);
        let rhs = poisson_at(&jf, &jg, p, r) * jh.f + jg.f * poisson_at(&jf, &jh, p, r);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn symbolic_limit_agrees_with_quadrature() {
    for (n1, m1) in labels(2) {
        for (n2, m2) in labels(2) {
            let rep = commutator_limit_check(n1, m1, n2, m2, 1.1).unwrap();
            assert!(rep.max_abs_dev < 1e-8, "{rep:?}");
        }
    }
    let (s, dev) = measure_poisson_sign(1, 0, 1, 1, 1.0).unwrap();
    assert_eq!(s, POISSON_SIGN);
    assert!(dev < 1e-10);
    let json = serde_json::to_value(commutator_limit_check(1, 0, 1, 1, 1.0).unwrap()).unwrap();
    assert_eq!(json["pair"], serde_json::json!([1, 0, 1, 1]));
    assert_eq!(json["method"], "symbolic");
}

#[test]
fn basic_bracket_structure() {
    // lim (1/iε)[z, J₊] is proportional to -iJ₊
    let lim = symbolic_limit_coeffs(1, 0, 1, 1).unwrap();
    for ((n, m), v) in &lim {
        let val = eval_scalar(v, 0.0, 1.0);
        if (*n, *m) != (1, 1) {
            assert!(val.norm() < 1e-14);
        } else {
            assert!(val.re.abs() < 1e-14 && val.im.abs() > 0.1);
        }
    }
}

#[test]
fn matrix_sequence_deviation_scales_with_eps_squared() {
    let pair = (2, -2, 2, 1);
    let dev = |k: i64| matrix_limit_check(pair.0, pair.1, pair.2, pair.3, HalfInt::int(k), 1.0).unwrap().max_abs_dev;
    let (d8, d16) = (dev(8), dev(16));
    let eps_sq_ratio = (16.0 * 17.0) / (8.0 * 9.0);
    assert!(d16 < d8);
    assert!((d8 / d16 / eps_sq_ratio - 1.0).abs() < 1e-6, "{}", d8 / d16);
    let rep = matrix_limit_check(1, 0, 1, 1, HalfInt::int(8), 1.0).unwrap();
    assert_eq!(rep.method, "matrix");
    assert!(rep.max_abs_dev < 1e-12);
}

#[test]
fn moebius_numeric() {
    let p0 = MoebiusParams { epsilon: 0.0, rhat: 2.0, alpha_sq: 1.0 };
    assert_eq!(moebius(p0, 0.7).unwrap(), 0.7);
    let p = MoebiusParams { epsilon: 0.3, rhat: 2.0, alpha_sq: 1.0 };
    let minus = MoebiusParams { epsilon: -0.3, ..p };
    let double = MoebiusParams { epsilon: 0.6, ..p };
    for x in [0.1, 1.5, 4.0] {
        let y = moebius(p, x).unwrap();
        assert!((moebius(minus, y).unwrap() - x).abs() < 1e-12);
        assert!((moebius(p, y).unwrap() - moebius(double, x).unwrap()).abs() < 1e-11);
    }
    // pole at x = 8R̂³(1 - ε/2R̂)/(εα²)
    let pole = 8.0 * 8.0 * (1.0 - 0.3 / 4.0) / 0.3;
    assert!(matches!(moebius(p, pole), Err(Error::Pole)));
}

#[test]
fn moebius_iteration_is_exact() {
    let checks = moebius_iteration_check(&MoebiusMatrix::new(), 5);
    assert_eq!(checks.len(), 7);
    assert!(checks.iter().all(|c| c.holds), "{checks:?}");
}

#[test]
fn linear_rhat_denominator_breaks_iteration() {
    let checks = moebius_iteration_check(&MoebiusMatrix::with_rhat_denominator(), 2);
    assert!(!checks.iter().find(|c| c.name == "iterate n=2").unwrap().holds);
}

#[test]
fn stereographic_identities_hold() {
    let m = MoebiusMatrix::new();
    for alpha in [None, Some(BigRational::from_integer(1.into())), Some(BigRational::from_integer((-1).into()))] {
        let checks = stereo_consistency_check(&m, alpha);
        assert_eq!(checks.len(), 5);
        assert!(checks.iter().all(|c| c.holds), "{checks:?}");
    }
    let variant = stereo_consistency_check(&MoebiusMatrix::with_rhat_denominator(), None);
    assert!(variant.iter().any(|c| !c.holds));
}

#[test]
fn sphere_generators_satisfy_casimir() {
    let [j0, jp, jm] = sphere_generators(pt(0.8, 2.2), 1.4);
    assert!((j0 * j0 + jp * jm - Complex64::new(1.96, 0.0)).norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn poisson_is_antisymmetric(theta in 0.05f64..3.09, phi in 0.0f64..6.28, i in 0usize..9, j in 0usize..9) {
        let ls = labels(2);
        let (f, g) = (pmn0(ls[i].0, ls[i].1), pmn0(ls[j].0, ls[j].1));
        let p = pt(theta, phi);
        let (jf, jg) = (eval_jet(&f, p, 1.0), eval_jet(&g, p, 1.0));
        prop_assert!((poisson_at(&jf, &jg, p, 1.0) + poisson_at(&jg, &jf, p, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn moebius_group_law(eps in -0.4f64..0.4, delta in -0.4f64..0.4, x in 0.0f64..3.0) {
        let p = |e: f64| MoebiusParams { epsilon: e, rhat: 2.5, alpha_sq: 1.0 };
        let lhs = moebius(p(eps), moebius(p(delta), x).unwrap()).unwrap();
        let rhs = moebius(p(eps + delta), x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
    }
}
