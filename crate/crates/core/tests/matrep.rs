use ncsphere::halfint::{h, HalfInt};
use ncsphere::matrep::*;
use ncsphere::surd::{rat, rat_to_f64};
use ncsphere::symalg::Algebra;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn ks(max_twice: i64) -> impl Iterator<Item = HalfInt> {
    (0..=max_twice).map(HalfInt::from_twice)
}

const EPS: [f64; 2] = [1.0, 0.37];

#[test]
fn pmn_examples() {
    let rep = make_rep(h(1, 1), 1.0).unwrap();
    let p = rep.pmn_matrix(1, 0).unwrap();
    let s = -(2f64.sqrt());
    let mut expect = CMatrix::zeros(3, 3);
    expect[(0, 0)] = c(s);
    expect[(2, 2)] = c(-s);
    assert!(rel_diff(&p, &expect) < 1e-15);
    assert!(rel_diff(&rep.pmn_matrix(0, 0).unwrap(), &rep.identity()) < 1e-15);
    // n = 2k+1 is in the quotient
    for k in 1..=3i64 {
        let rep = make_rep(HalfInt::int(k), 1.0).unwrap();
        let n = 2 * k + 1;
        assert!(rep.quotient_boundary(n));
        for m in -n..=n {
            let p = rep.pmn_matrix(n, m).unwrap();
            assert!(rep.trace_inner(&p, &p).unwrap().norm() < 1e-12);
        }
    }
    assert_eq!(norm_closed_form_k(7, h(3, 1), 0.3), 0.0);
}

#[test]
fn trace_inner_examples() {
    let rep = make_rep(h(1, 1), 1.0).unwrap();
    let p = rep.pmn_matrix(1, 0).unwrap();
    assert!((rep.trace_inner(&p, &p).unwrap() - c(4.0 / 3.0)).norm() < 1e-15);
    assert!((rep.trace_inner(&rep.identity(), &rep.identity()).unwrap() - c(1.0)).norm() < 1e-15);
    assert!(rep.trace_inner(&p, &CMatrix::zeros(2, 2)).is_err());
}

#[test]
fn two_construction_paths_agree() {
    for k in ks(12) {
        for eps in EPS {
            let rep = make_rep(k, eps).unwrap();
            for n in 0..=k.twice() {
                for m in -n..=n {
                    let a = rep.pmn_matrix(n, m).unwrap();
                    let b = rep.pmn_matrix_normal_form(n, m).unwrap();
                    let d = rel_diff(&a, &b);
                    assert!(d < 1e-12, "k={k} ε={eps} P^{m}_{n}: {d:e}");
                }
            }
        }
    }
}

#[test]
fn eigen_ladder_and_laplacian_on_matrices() {
    for k in ks(12) {
        for eps in EPS {
            let rep = make_rep(k, eps).unwrap();
            let ad = |a: &CMatrix, b: &CMatrix| Rep::comm(a, b);
            for n in 0..=k.twice() {
                for m in -n..=n {
                    let p = rep.pmn_matrix(n, m).unwrap();
                    // relative to the size of the operands, ‖ad_J‖ ≤ 2R̂
                    let scale = (max_abs(&p) * rep.rhat).max(1.0);
                    let close = |a: &CMatrix, b: &CMatrix| max_abs(&(a - b)) < 1e-12 * scale;
                    assert!(close(&ad(&rep.j0, &p), &(&p * c(eps * m as f64))));
                    let up = if m < n {
                        rep.pmn_matrix(n, m + 1).unwrap() * c(eps * (((n - m) * (n + m + 1)) as f64).sqrt())
                    } else {
                        CMatrix::zeros(p.nrows(), p.ncols())
                    };
                    assert!(close(&ad(&rep.jp, &p), &up), "k={k} ad J+ P^{m}_{n}");
                    let down = if m > -n {
                        rep.pmn_matrix(n, m - 1).unwrap() * c(eps * (((n + m) * (n - m + 1)) as f64).sqrt())
                    } else {
                        CMatrix::zeros(p.nrows(), p.ncols())
                    };
                    assert!(close(&ad(&rep.jm, &p), &down), "k={k} ad J- P^{m}_{n}");
                    let lap = ad(&rep.j0, &ad(&rep.j0, &p))
                        + (ad(&rep.jp, &ad(&rep.jm, &p)) + ad(&rep.jm, &ad(&rep.jp, &p))) * c(0.5);
                    let expect = &p * c(eps * eps * (n * (n + 1)) as f64);
                    assert!(max_abs(&(&lap - &expect)) < 1e-12 * scale * rep.rhat.max(1.0), "k={k} Δ P^{m}_{n}");
                }
            }
        }
    }
}

#[test]
fn norms_match_closed_form_independent_of_m() {
    for k in ks(12) {
        for eps in EPS {
            let rep = make_rep(k, eps).unwrap();
            for n in 0..=(k.twice() + 1) {
                let expect = norm_closed_form(n, eps, rep.rsq);
                let exact_k = norm_closed_form_k(n, k, eps);
                assert!((expect - exact_k).abs() <= 1e-10 * expect.abs().max(1.0));
                for m in -n..=n {
                    let p = rep.pmn_matrix(n, m).unwrap();
                    let got = rep.trace_inner(&p, &p).unwrap();
                    assert!(got.im.abs() < 1e-10 * expect.max(1.0));
                    assert!((got.re - exact_k).abs() <= 1e-10 * exact_k.max(1.0), "k={k} n={n} m={m}: {} vs {exact_k}", got.re);
                }
            }
        }
    }
}

#[test]
fn conjugation_and_orthogonality_on_matrices() {
    for k in ks(8) {
        let rep = make_rep(k, 0.7).unwrap();
        let labels: Vec<(i64, i64)> = (0..=k.twice()).flat_map(|n| (-n..=n).map(move |m| (n, m))).collect();
        let mats: Vec<CMatrix> = labels.iter().map(|&(n, m)| rep.pmn_matrix(n, m).unwrap()).collect();
        for (i, &(n, m)) in labels.iter().enumerate() {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let j = labels.iter().position(|&l| l == (n, -m)).unwrap();
            assert!(rel_diff(&mats[i].adjoint(), &(&mats[j] * c(sign))) < 1e-12);
            for (j, &(n2, m2)) in labels.iter().enumerate() {
                if (n, m) != (n2, m2) {
                    let scale = (rep.norm_sq(n) * rep.norm_sq(n2)).sqrt();
                    let v = rep.trace_inner(&mats[i], &mats[j]).unwrap().norm();
                    assert!(v < 1e-10 * scale.max(1.0), "k={k} ({n},{m}) ({n2},{m2})");
                }
            }
        }
    }
}

#[test]
fn product_matches_cg_times_reduced_element() {
    for k in ks(10) {
        let eps = 0.8;
        let rep = make_rep(k, eps).unwrap();
        let nmax = k.twice().min(4);
        for n1 in 0..=nmax {
            for n2 in 0..=nmax {
                for m1 in -n1..=n1 {
                    for m2 in -n2..=n2 {
                        let rpt = rep.decompose_product(n1, m1, n2, m2).unwrap();
                        assert!(rpt.residual <= 1e-10, "k={k} residual {:e}", rpt.residual);
                        for t in &rpt.terms {
                            let n = t.n;
                            let cg = cg_f64(HalfInt::int(n1), HalfInt::int(n2), HalfInt::int(n), HalfInt::int(m1), HalfInt::int(m2));
                            let rm = reduced_matrix_element(
                                HalfInt::int(n1),
                                HalfInt::int(n2),
                                HalfInt::int(n),
                                HalfInt::ZERO,
                                HalfInt::ZERO,
                                k,
                                eps,
                            )
                            .unwrap();
                            let got = rpt.coeff(n);
                            let want = cg * rm;
                            assert!(
                                (got - c(want)).norm() <= 1e-9 * want.abs().max(1.0),
                                "k={k} ({n1},{m1})x({n2},{m2}) n={n}: {got} vs {want}"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn decomposition_examples() {
    // (1,0)×(1,0) against the symbolic expansion specialized to the rep
    let alg = Algebra::sphere();
    let p10 = alg.build_pmn(1, 0).unwrap();
    let sym = alg.expand_in_basis(&alg.multiply(&p10, &p10), 2).unwrap();
    for k in 2..=4i64 {
        let eps = rat(1, 2);
        let kk = rat(k * (k + 1), 1);
        let rsq = &eps * &eps * kk;
        let rep = make_rep(HalfInt::int(k), rat_to_f64(&eps)).unwrap();
        let rpt = rep.decompose_product(1, 0, 1, 0).unwrap();
        assert_eq!(rpt.terms.iter().filter(|t| t.coeff[0].abs() > 1e-12).count(), 2);
        for ((n, m), v) in &sym {
            assert_eq!(*m, 0);
            let val = ncsphere::symalg::eval_scalar(v, rat_to_f64(&eps), rsq_sqrt(&rsq));
            assert!((rpt.coeff(*n) - val).norm() < 1e-12, "n={n}");
        }
    }
    // highest weights: single stretched term
    let rep = make_rep(h(3, 1), 1.0).unwrap();
    for (a, b) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
        let rpt = rep.decompose_product(a, a, b, b).unwrap();
        let nonzero: Vec<i64> = rpt.terms.iter().filter(|t| Complex64::new(t.coeff[0], t.coeff[1]).norm() > 1e-12).map(|t| t.n).collect();
        assert_eq!(nonzero, vec![a + b]);
        let prod = rep.pmn_matrix(a, a).unwrap() * rep.pmn_matrix(b, b).unwrap();
        let p = rep.pmn_matrix(a + b, a + b).unwrap();
        let expect = trace_form(&p, &prod) / c(rep.norm_sq(a + b));
        assert!((rpt.coeff(a + b) - expect).norm() < 1e-12);
    }
    assert!(rep.decompose_product(1, 2, 1, 0).is_err());
}

fn rsq_sqrt(r: &num_rational::BigRational) -> f64 {
    rat_to_f64(r).sqrt()
}

#[test]
fn reduced_element_stretched_and_triangle() {
    let z = HalfInt::ZERO;
    for k in [2i64, 3] {
        for kk in [k, k + 1] {
            let rep = make_rep(HalfInt::int(kk), 1.0).unwrap();
            for (a, b) in [(1, 1), (1, 2)] {
                let rm = reduced_matrix_element(HalfInt::int(a), HalfInt::int(b), HalfInt::int(a + b), z, z, HalfInt::int(kk), 1.0).unwrap();
                let rpt = rep.decompose_product(a, a, b, b).unwrap();
                let cg = cg_f64(HalfInt::int(a), HalfInt::int(b), HalfInt::int(a + b), HalfInt::int(a), HalfInt::int(b));
                assert!((rpt.coeff(a + b).re - cg * rm).abs() < 1e-10);
            }
        }
    }
    let rm = reduced_matrix_element(h(1, 1), h(1, 1), h(3, 1), z, z, h(3, 1), 1.0).unwrap();
    assert_eq!(rm, 0.0);
    // n = 2k+1 is excluded by the 6-j triangle before its zero norm is reached
    assert_eq!(reduced_matrix_element(h(1, 1), h(2, 1), h(3, 1), z, z, h(1, 1), 1.0).unwrap(), 0.0);
}

#[test]
fn exact_mode_reproduces_float_mode() {
    for k in ks(4) {
        let eps = rat(2, 3);
        let ex = ExactRep::new(k, eps.clone()).unwrap();
        let fl = make_rep_exact(k, eps.clone()).unwrap();
        assert!((rat_to_f64(&ex.rsq()) - fl.rsq).abs() < 1e-15 * fl.rsq.max(1.0));
        for n in 0..=k.twice() {
            let closed = norm_closed_form_k(n, k, rat_to_f64(&eps));
            assert!((rat_to_f64(&ex.norm_sq(n)) - closed).abs() <= 1e-12 * closed.max(1.0));
            for m in -n..=n {
                let a = ex.pmn_matrix(n, m).unwrap();
                let b = fl.pmn_matrix(n, m).unwrap();
                assert!(rel_diff(&a.to_float(), &b) < 1e-12, "k={k} P^{m}_{n}");
                assert_eq!(a, ex.eval_normal_form(&Algebra::sphere().build_pmn(n, m).unwrap()));
            }
        }
    }
}

#[test]
fn rep_invariants_and_cap() {
    for k in ks(12) {
        let rep = make_rep(k, 0.9).unwrap();
        assert!(rel_diff(&rep.casimir(), &(rep.identity() * c(rep.rsq))) < 1e-12);
        assert!(rel_diff(&rep.jp.adjoint(), &rep.jm) == 0.0);
        assert!((rep.rhat * rep.rhat - rep.rsq - 0.25 * 0.81).abs() < 1e-12);
    }
    assert!(make_rep(h(1, 1), 0.0).is_err());
    assert!(matches!(make_rep(h(200, 1), 1.0), Err(ncsphere::Error::KCap { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_inner_is_sesquilinear_and_positive(
        re in proptest::collection::vec(-2.0f64..2.0, 18),
        im in proptest::collection::vec(-2.0f64..2.0, 18),
        s in -3.0f64..3.0,
        t in -3.0f64..3.0,
    ) {
        let rep = make_rep(h(1, 1), 1.0).unwrap();
        let a = CMatrix::from_fn(3, 3, |i, j| Complex64::new(re[3 * i + j], im[3 * i + j]));
        let b = CMatrix::from_fn(3, 3, |i, j| Complex64::new(re[9 + 3 * i + j], im[9 + 3 * i + j]));
        let z = Complex64::new(s, t);
        let lhs = rep.trace_inner(&a, &(&b * z)).unwrap();
        let rhs = rep.trace_inner(&a, &b).unwrap() * z;
        prop_assert!((lhs - rhs).norm() < 1e-10);
        let lhs = rep.trace_inner(&(&a * z), &b).unwrap();
        let rhs = rep.trace_inner(&a, &b).unwrap() * z.conj();
        prop_assert!((lhs - rhs).norm() < 1e-10);
        let aa = rep.trace_inner(&a, &a).unwrap();
        prop_assert!(aa.re >= 0.0 && aa.im.abs() < 1e-12);
    }
}
