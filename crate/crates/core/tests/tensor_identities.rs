mod support;

use curvlab_core::metric::MetricAtPoint;
use curvlab_core::tensor::*;
use proptest::prelude::*;
use support::{random_curv, random_metric, random_sym, random_vec, rng};

const TOL: f64 = 1e-12;

// Loop transcriptions of the component formulas, kept deliberately naive.

fn q_direct_2(a: &SymTensor2, t: &SymTensor2) -> Tensor4 {
    Tensor4::from_fn(a.n(), |[h, k, l, m]| {
        a.at(h, l) * t.at(k, m) + a.at(k, l) * t.at(h, m) - a.at(h, m) * t.at(k, l)
            - a.at(k, m) * t.at(h, l)
    })
}

fn q_direct_4(a: &SymTensor2, t: &Tensor4) -> Tensor6 {
    Tensor6::from_fn(a.n(), |[h, i, j, k, l, m]| {
        a.at(h, l) * t.get([m, i, j, k])
            + a.at(i, l) * t.get([h, m, j, k])
            + a.at(j, l) * t.get([h, i, m, k])
            + a.at(k, l) * t.get([h, i, j, m])
            - a.at(h, m) * t.get([l, i, j, k])
            - a.at(i, m) * t.get([h, l, j, k])
            - a.at(j, m) * t.get([h, i, l, k])
            - a.at(k, m) * t.get([h, i, j, l])
    })
}

fn action_direct_4(b: &CurvTensor4, t: &Tensor4, g: &MetricAtPoint) -> Tensor6 {
    let n = b.n();
    Tensor6::from_fn(n, |[h, i, j, k, l, m]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                s += g.g_inv.at(p, q)
                    * (t.get([p, i, j, k]) * b.get([q, h, l, m])
                        + t.get([h, p, j, k]) * b.get([q, i, l, m])
                        + t.get([h, i, p, k]) * b.get([q, j, l, m])
                        + t.get([h, i, j, p]) * b.get([q, k, l, m]));
            }
        }
        s
    })
}

fn action_direct_2(b: &CurvTensor4, a: &SymTensor2, g: &MetricAtPoint) -> Tensor4 {
    let n = b.n();
    Tensor4::from_fn(n, |[h, k, l, m]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                s += g.g_inv.at(p, q) * (a.at(p, k) * b.get([q, h, l, m]) + a.at(p, h) * b.get([q, k, l, m]));
            }
        }
        s
    })
}

fn big_g(g: &MetricAtPoint) -> CurvTensor4 {
    kulkarni_nomizu(&g.g, &g.g).unwrap().scale(0.5)
}

fn res(b: Balance) -> f64 {
    b.residual()
}

#[test]
fn products_match_component_formulas() {
    let mut r = rng(7);
    for n in 2..=5 {
        let g = random_metric(&mut r, n, n / 2);
        let a = random_sym(&mut r, n);
        let s = random_sym(&mut r, n);
        let b = random_curv(&mut r, n);
        let t = random_curv(&mut r, n);
        assert!(support::rel_diff(&tachibana(&a, &s).unwrap(), &q_direct_2(&a, &s), 0.0) < TOL);
        // Q(A,T) vanishes identically in dimension 2, so compare against the input scale
        let floor = a.max_abs() * t.max_abs();
        assert!(support::rel_diff(&tachibana(&a, &t).unwrap(), &q_direct_4(&a, &t), floor) < TOL);
        let floor = b.max_abs() * t.max_abs() * g.g_inv.max_abs();
        assert!(
            support::rel_diff(&curv_action(&b, &t, &g).unwrap(), &action_direct_4(&b, &t, &g), floor)
                < TOL
        );
        assert!(
            support::rel_diff(&curv_action(&b, &s, &g).unwrap(), &action_direct_2(&b, &s, &g), 0.0)
                < TOL
        );
        let gg = Tensor4::from_fn(n, |[h, i, j, k]| {
            g.g.at(h, k) * g.g.at(i, j) - g.g.at(h, j) * g.g.at(i, k)
        });
        assert!(support::rel_diff(&big_g(&g), &gg, 0.0) < TOL);
    }
}

#[test]
fn kn_product_of_symmetric_tensors_is_curvature_tensor() {
    let mut r = rng(11);
    for n in 2..=6 {
        let e = random_sym(&mut r, n);
        let f = random_sym(&mut r, n);
        let p = kulkarni_nomizu(&e, &f).unwrap();
        assert!(CurvTensor4::symmetry_defect(&p) < 1e-15);
        assert!(CurvTensor4::from_tensor(p.tensor().clone()).is_ok());
    }
}

#[test]
fn dimension_mismatch_is_an_error() {
    let a = SymTensor2::identity(3);
    let b = SymTensor2::identity(4);
    assert!(kulkarni_nomizu(&a, &b).is_err());
    assert!(tachibana(&a, &b).is_err());
}

#[test]
fn g_wedge_g_is_twice_g_tensor() {
    let mut r = rng(1);
    let g = random_metric(&mut r, 4, 1);
    let gg = kulkarni_nomizu(&g.g, &g.g).unwrap();
    assert!(support::rel_diff(&gg, &big_g(&g).scale(2.0), 0.0) < TOL);
}

#[test]
fn q_of_g_with_g_tensor_vanishes() {
    let mut r = rng(2);
    for n in 3..=6 {
        let g = random_metric(&mut r, n, 1);
        let q = tachibana(&g.g, &big_g(&g)).unwrap();
        assert!(q.max_abs() < 1e-13, "n={n}: {}", q.max_abs());
    }
}

#[test]
fn contractions_of_g_tensor() {
    let mut r = rng(3);
    for n in 2..=6 {
        let g = random_metric(&mut r, n, n - 1);
        let s = ricci_from(&big_g(&g), &g).unwrap();
        assert!(support::rel_diff(&s, &g.g.scale(n as f64 - 1.0), 0.0) < TOL);
        let tr = trace(&s, &g);
        assert!((tr - (n * (n - 1)) as f64).abs() < 1e-12);
    }
}

#[test]
fn power_rejects_other_exponents() {
    let mut r = rng(4);
    let g = random_metric(&mut r, 3, 0);
    let a = random_sym(&mut r, 3);
    assert!(power(&a, &g, 4).is_err());
    assert!(power(&a, &g, 3).is_ok());
}

#[test]
fn rank_examples() {
    assert_eq!(numerical_rank(&SymTensor2::identity(4), DEFAULT_RANK_TOL), 4);
    assert_eq!(numerical_rank(&outer(&[1.0, -2.0, 0.5, 3.0]), DEFAULT_RANK_TOL), 1);
    assert_eq!(numerical_rank(&SymTensor2::zeros(3), DEFAULT_RANK_TOL), 0);
}

#[test]
fn fit_is_exact_on_independent_bases() {
    let mut r = rng(5);
    for n in 3..=5 {
        let x = random_curv(&mut r, n);
        let y = random_curv(&mut r, n);
        let z = random_curv(&mut r, n);
        let t = &(&x.scale(1.5) + &y.scale(-0.25)) + &z.scale(3.0);
        let f = fit_coefficients(&t, &[&x, &y, &z]).unwrap();
        assert!(!f.degenerate);
        assert!(f.residual_rel < 1e-13);
        for (c, w) in f.coeffs.iter().zip([1.5, -0.25, 3.0]) {
            assert!((c - w).abs() < 1e-12);
        }
    }
}

fn rank2(r: &mut rand_chacha::ChaCha8Rng, n: usize, sign: f64) -> SymTensor2 {
    let x = outer(&random_vec(r, n));
    let y = outer(&random_vec(r, n));
    &x + &y.scale(sign)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn q_of_kn_products(seed in any::<u64>(), n in 3usize..=6) {
        let mut r = rng(seed);
        let e = random_sym(&mut r, n);
        let f = random_sym(&mut r, n);
        let ee = kulkarni_nomizu(&e, &e).unwrap();
        let left = tachibana(&e, &kulkarni_nomizu(&e, &f).unwrap()).unwrap();
        let right = tachibana(&f, &ee).unwrap();
        prop_assert!(res(Balance::new().plus(&left).term(0.5, &right)) < TOL);
        let left2 = kulkarni_nomizu(&e, &tachibana(&e, &f).unwrap()).unwrap();
        prop_assert!(res(Balance::new().plus(&left2).term(0.5, &right)) < TOL);
    }

    #[test]
    fn g_wedge_s_products(seed in any::<u64>(), n in 3usize..=6, neg in 0usize..=2) {
        let mut r = rng(seed);
        let g = random_metric(&mut r, n, neg.min(n));
        let s = random_sym(&mut r, n);
        let s2 = power(&s, &g, 2).unwrap();
        let gg = big_g(&g);
        let gs = kulkarni_nomizu(&g.g, &s).unwrap();
        let ss = kulkarni_nomizu(&s, &s).unwrap();
        // Q(S, g∧S) = -½ Q(g, S∧S), Q(g, g∧S) = -Q(S, G)
        let a = tachibana(&s, &gs).unwrap();
        let b = tachibana(&g.g, &ss).unwrap();
        prop_assert!(res(Balance::new().plus(&a).term(0.5, &b)) < TOL);
        let c = tachibana(&g.g, &gs).unwrap();
        let d = tachibana(&s, &gg).unwrap();
        prop_assert!(res(Balance::new().plus(&c).plus(&d)) < TOL);
        // (g∧S)·(g∧S) = -Q(S², G), G·(g∧S) = Q(g, g∧S)
        let e = curv_action(&gs, &gs, &g).unwrap();
        let f = tachibana(&s2, &gg).unwrap();
        prop_assert!(res(Balance::new().plus(&e).plus(&f)) < TOL);
        let h = curv_action(&gg, &gs, &g).unwrap();
        prop_assert!(res(Balance::new().plus(&h).minus(&c)) < TOL);
        // (g∧S)·S = Q(g, S²), G·S = Q(g, S)
        let k = curv_action(&gs, &s, &g).unwrap();
        let l = tachibana(&g.g, &s2).unwrap();
        prop_assert!(res(Balance::new().plus(&k).minus(&l)) < TOL);
        let m = curv_action(&gg, &s, &g).unwrap();
        let q = tachibana(&g.g, &s).unwrap();
        prop_assert!(res(Balance::new().plus(&m).minus(&q)) < TOL);
    }

    #[test]
    fn weyl_splits_of_q_and_action(seed in any::<u64>(), n in 4usize..=6, neg in 0usize..=1) {
        let mut r = rng(seed);
        let g = random_metric(&mut r, n, neg);
        let rr = random_curv(&mut r, n);
        let s = ricci_from(&rr, &g).unwrap();
        let kappa = trace(&s, &g);
        let nf = n as f64;
        let gg = big_g(&g);
        let gs = kulkarni_nomizu(&g.g, &s).unwrap();
        let c = rr.axpy(-1.0 / (nf - 2.0), &gs).axpy(kappa / ((nf - 2.0) * (nf - 1.0)), &gg);
        let ss = kulkarni_nomizu(&s, &s).unwrap();
        let lhs = tachibana(&s, &rr).unwrap();
        let b = Balance::new()
            .plus(&lhs)
            .minus(&tachibana(&s, &c).unwrap())
            .term(0.5 / (nf - 2.0), &tachibana(&g.g, &ss).unwrap())
            .term(kappa / ((nf - 2.0) * (nf - 1.0)), &tachibana(&s, &gg).unwrap());
        prop_assert!(b.residual() < TOL);
        let s2 = power(&s, &g, 2).unwrap();
        let b = Balance::new()
            .plus(&curv_action(&c, &s, &g).unwrap())
            .minus(&curv_action(&rr, &s, &g).unwrap())
            .term(1.0 / (nf - 2.0), &tachibana(&g.g, &s2).unwrap())
            .term(-kappa / ((nf - 2.0) * (nf - 1.0)), &tachibana(&g.g, &s).unwrap());
        prop_assert!(b.residual() < 1e-11);
    }

    #[test]
    fn rank_two_powers_and_products(seed in any::<u64>(), n in 3usize..=6, sign in prop::sample::select(vec![1.0, -1.0]), neg in 0usize..=1) {
        let mut r = rng(seed);
        let g = random_metric(&mut r, n, neg);
        let a = rank2(&mut r, n, sign);
        let a2 = power(&a, &g, 2).unwrap();
        let a3 = power(&a, &g, 3).unwrap();
        let tr = trace(&a, &g);
        let tr2 = trace(&a2, &g);
        let d = tr2 - tr * tr;
        prop_assert!(Balance::new().plus(&a3).term(-tr, &a2).term(-0.5 * d, &a).residual() < 1e-10);
        let aa = kulkarni_nomizu(&a, &a).unwrap();
        let aa2 = kulkarni_nomizu(&a, &a2).unwrap();
        let a2a2 = kulkarni_nomizu(&a2, &a2).unwrap();
        prop_assert!(Balance::new().plus(&aa2).term(-0.5 * tr, &aa).residual() < 1e-10);
        prop_assert!(Balance::new().plus(&a2a2).term(0.5 * d, &aa).residual() < 1e-10);
        let w = &a2 - &a.scale(tr);
        let ww = kulkarni_nomizu(&w, &w).unwrap();
        prop_assert!(Balance::new().plus(&ww).term(0.5 * d, &aa).residual() < 1e-10);
    }

    #[test]
    fn rank_two_six_term_collapse(seed in any::<u64>(), n in 3usize..=6, phis in prop::array::uniform7(-2.0f64..2.0)) {
        let mut r = rng(seed);
        let g = random_metric(&mut r, n, 1);
        let a = rank2(&mut r, n, 1.0);
        let a2 = power(&a, &g, 2).unwrap();
        let tr = trace(&a, &g);
        let d = trace(&a2, &g) - tr * tr;
        let [p0, _, p2, p3, p4, p5, p6] = phis;
        let aa = kulkarni_nomizu(&a, &a).unwrap();
        let ga = kulkarni_nomizu(&g.g, &a).unwrap();
        let ga2 = kulkarni_nomizu(&g.g, &a2).unwrap();
        let aa2 = kulkarni_nomizu(&a, &a2).unwrap();
        let a2a2 = kulkarni_nomizu(&a2, &a2).unwrap();
        let gg = big_g(&g);
        let six = aa.scale(p0 / 2.0).axpy(p2, &ga).axpy(p3, &gg).axpy(p4, &ga2).axpy(p5, &aa2).axpy(p6 / 2.0, &a2a2);
        let p1 = p0 + tr * p5 - 0.5 * d * p6;
        let four = aa.scale(p1 / 2.0).axpy(p2, &ga).axpy(p3, &gg).axpy(p4, &ga2);
        let scale = [&aa, &aa2, &a2a2, &ga, &ga2, &gg].iter().map(|t| t.norm()).fold(0.0, f64::max);
        prop_assert!((&six - &four).norm() < 1e-10 * scale);
    }

    #[test]
    fn dimension_two_identities(seed in any::<u64>(), neg in 0usize..=2) {
        let mut r = rng(seed);
        let g = random_metric(&mut r, 2, neg);
        let b = random_sym(&mut r, 2);
        let b2 = power(&b, &g, 2).unwrap();
        let tr = trace(&b, &g);
        let d = trace(&b2, &g) - tr * tr;
        let gb = kulkarni_nomizu(&g.g, &b).unwrap();
        prop_assert!(Balance::new().plus(&gb).term(-tr, &big_g(&g)).residual() < TOL);
        prop_assert!(Balance::new().plus(&b2).term(-tr, &b).term(-0.5 * d, &g.g).residual() < TOL);
        let q = tachibana(&b, &b2).unwrap();
        let qg = tachibana(&g.g, &b).unwrap();
        prop_assert!(Balance::new().plus(&q).term(0.5 * d, &qg).residual() < TOL);
    }

    #[test]
    fn ricci_trace_commutes_with_action(seed in any::<u64>(), n in 3usize..=5) {
        // traces are scalars and B·f = 0, so g^{hk}(B·A)_{hklm} must vanish
        let mut r = rng(seed);
        let g = random_metric(&mut r, n, 1);
        let b = random_curv(&mut r, n);
        let s = random_sym(&mut r, n);
        let rs = curv_action(&b, &s, &g).unwrap();
        let s2 = power(&s, &g, 2).unwrap();
        let rs2 = curv_action(&b, &s2, &g).unwrap();
        let mut worst = 0.0f64;
        for l in 0..n {
            for m in 0..n {
                let mut t = 0.0;
                let mut direct = 0.0;
                for h in 0..n {
                    for k in 0..n {
                        t += g.g_inv.at(h, k) * rs.get([h, k, l, m]);
                    }
                }
                for h in 0..n {
                    for k in 0..n {
                        direct += g.g_inv.at(h, k) * rs2.get([h, k, l, m]);
                    }
                }
                worst = worst.max(t.abs()).max(direct.abs());
            }
        }
        prop_assert!(worst < 1e-12 * (1.0 + rs.max_abs() + rs2.max_abs()));
    }
}
