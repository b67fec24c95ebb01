mod support;

use std::f64::consts::PI;

use curvlab_core::catalog::NAMES;
use curvlab_core::conditions::{analyze_point, ConditionId};
use curvlab_core::engine::{christoffel, curvature_package, weyl_trace_defect};
use curvlab_core::tensor::{curv_action, tachibana, Balance, Components};
use curvlab_core::CurvError;
use support::{entry, fd_christoffel, fd_riemann, rel_diff, sample_points};

#[test]
fn finite_differences_reproduce_jets_on_every_entry() {
    for name in NAMES {
        let e = entry(name, &[]);
        for x in sample_points(&e, 10, 11) {
            let ch = christoffel(&*e.spec, &x).unwrap();
            let fd = fd_christoffel(&*e.spec, &x, 1e-5);
            let scale = ch.gamma.iter().fold(1e-3f64, |m, v| m.max(v.abs()));
            let gap = ch.gamma.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(gap < 1e-6 * scale.max(1.0), "{name} at {x:?}: gamma gap {gap:e}");

            let pkg = curvature_package(&*e.spec, &x).unwrap();
            let r = fd_riemann(&*e.spec, &x, 1e-4);
            let d = rel_diff(pkg.r.tensor(), &r, 1e-2);
            assert!(d < 1e-4, "{name} at {x:?}: riemann gap {d:e}");
        }
    }
}

#[test]
fn sphere_christoffels() {
    let e = entry("sphere", &[]);
    let (th, ph) = (0.7, 1.1);
    let ch = christoffel(&*e.spec, &[th, ph]).unwrap();
    assert!((ch.at(0, 1, 1) + th.sin() * th.cos()).abs() < 1e-14);
    assert!((ch.at(1, 0, 1) - th.cos() / th.sin()).abs() < 1e-14);
    assert!((ch.at(1, 1, 0) - th.cos() / th.sin()).abs() < 1e-14);
    let fd = fd_christoffel(&*e.spec, &[th, ph], 1e-5);
    assert!((fd[3] + th.sin() * th.cos()).abs() < 1e-6);
    let pkg = curvature_package(&*e.spec, &[th, ph]).unwrap();
    assert!((pkg.kappa - 2.0).abs() < 1e-12);
}

#[test]
fn flat_space_has_no_curvature() {
    let e = entry("flat", &[("negatives", "1")]);
    let pkg = curvature_package(&*e.spec, &[0.3, -1.0, 2.0, 0.5]).unwrap();
    assert!(pkg.gamma.iter().all(|v| *v == 0.0));
    assert_eq!(pkg.r.max_abs(), 0.0);
    assert_eq!(pkg.s.max_abs(), 0.0);
    assert_eq!(pkg.kappa, 0.0);
    assert_eq!(pkg.weyl().unwrap().max_abs(), 0.0);
}

#[test]
fn schwarzschild_is_ricci_flat() {
    let e = entry("schwarzschild", &[]);
    let pkg = curvature_package(&*e.spec, &[0.0, 3.0, PI / 3.0, 0.0]).unwrap();
    assert!(pkg.s.max_abs() < 1e-10, "{:e}", pkg.s.max_abs());
    assert!(pkg.r.max_abs() > 1e-2);
}

#[test]
fn vaidya_with_constant_mass_is_ricci_flat() {
    let e = entry("vaidya", &[("m", "const:0.7")]);
    for x in sample_points(&e, 6, 3) {
        let pkg = curvature_package(&*e.spec, &x).unwrap();
        assert!(pkg.s.max_abs() < 1e-12 * pkg.r.max_abs().max(1.0), "{x:?}");
    }
}

#[test]
fn weyl_is_trace_free_on_every_entry() {
    for name in NAMES {
        let e = entry(name, &[]);
        if e.dim() < 4 {
            continue;
        }
        for x in sample_points(&e, 5, 5) {
            let pkg = curvature_package(&*e.spec, &x).unwrap();
            let c = pkg.weyl().unwrap();
            let gi = &pkg.metric.g_inv;
            let n = pkg.n();
            let mut worst = 0.0f64;
            for a in 0..n {
                for b in 0..n {
                    let (mut t1, mut t2) = (0.0, 0.0);
                    for h in 0..n {
                        for k in 0..n {
                            t1 += gi.at(h, k) * c.get([h, a, b, k]);
                            t2 += gi.at(h, k) * c.get([a, h, k, b]);
                        }
                    }
                    worst = worst.max(t1.abs()).max(t2.abs());
                }
            }
            let d = if worst == 0.0 { 0.0 } else { worst / pkg.r.max_abs() };
            assert!(d < 1e-10, "{name} at {x:?}: trace defect {d:e}");
            assert!(weyl_trace_defect(&pkg).unwrap() < 1e-10);
        }
    }
}

#[test]
fn weyl_refused_below_four_dimensions() {
    let e = entry("constant_curvature", &[("n", "3")]);
    let pkg = curvature_package(&*e.spec, &e.default_points[0]).unwrap();
    assert!(pkg.c.is_none());
    assert_eq!(pkg.weyl().unwrap_err(), CurvError::WeylUndefined(3));
}

#[test]
fn robertson_walker_is_conformally_flat() {
    let e = entry("robertson_walker", &[]);
    for x in sample_points(&e, 8, 17) {
        let pkg = curvature_package(&*e.spec, &x).unwrap();
        let c = pkg.weyl().unwrap().max_abs();
        assert!(c < 1e-10 * pkg.r.max_abs(), "{x:?}: {c:e}");
    }
}

#[test]
fn identity01_on_every_entry_at_sampled_points() {
    for name in NAMES {
        let e = entry(name, &[]);
        if e.dim() < 4 {
            continue;
        }
        for x in sample_points(&e, 6, 23) {
            let a = analyze_point(&*e.spec, None, &x, &[ConditionId::Identity01]).unwrap();
            let r = &a.reports[0];
            assert!(r.holds && !r.degenerate, "{name} at {x:?}: {:e}", r.residual_rel);
            assert!(r.residual_rel < 1e-9, "{name} at {x:?}: {:e}", r.residual_rel);
        }
    }
}

#[test]
fn weyl_action_on_ricci_splits_off() {
    // C·S = R·S - Q(g,S²)/(n-2) + κ Q(g,S)/((n-2)(n-1))
    for name in NAMES {
        let e = entry(name, &[]);
        if e.dim() < 4 {
            continue;
        }
        for x in sample_points(&e, 4, 29) {
            let pkg = curvature_package(&*e.spec, &x).unwrap();
            let nf = pkg.n() as f64;
            let g = &pkg.metric;
            let c = pkg.weyl().unwrap();
            let cs = curv_action(c, &pkg.s, g).unwrap();
            let rs = curv_action(&pkg.r, &pkg.s, g).unwrap();
            let b = Balance::new()
                .plus(&cs)
                .minus(&rs)
                .term(1.0 / (nf - 2.0), &tachibana(&g.g, &pkg.s2).unwrap())
                .term(-pkg.kappa / ((nf - 2.0) * (nf - 1.0)), &tachibana(&g.g, &pkg.s).unwrap());
            let floor = g.g_inv.norm() * pkg.r.norm() * pkg.s.norm();
            let res = b.residual_floor(floor);
            assert!(res < 1e-10, "{name} at {x:?}: {res:e}");
        }
    }
}
