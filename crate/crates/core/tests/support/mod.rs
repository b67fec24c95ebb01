//! Random data and a finite-difference curvature oracle for integration tests.
#![allow(dead_code)]

use curvlab_core::jet::Jet;
use curvlab_core::metric::{MetricAtPoint, MetricSpec};
use curvlab_core::tensor::{kulkarni_nomizu, Components, CurvTensor4, SymTensor2, Tensor4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_sym(r: &mut ChaCha8Rng, n: usize) -> SymTensor2 {
    SymTensor2::from_fn(n, |_, _| r.random_range(-1.0..1.0))
}

pub fn random_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.random_range(-1.0..1.0)).collect()
}

/// `g = Pᵀ diag(±1) P` with `P` near the identity, so `g` is well conditioned.
pub fn random_metric(r: &mut ChaCha8Rng, n: usize, negatives: usize) -> MetricAtPoint {
    let p: Vec<f64> = (0..n * n)
        .map(|k| if k / n == k % n { 1.0 } else { 0.0 } + 0.3 * r.random_range(-1.0..1.0))
        .collect();
    let sig: Vec<i8> = (0..n).map(|i| if i < negatives { -1 } else { 1 }).collect();
    let g = SymTensor2::from_fn(n, |i, j| {
        (0..n).map(|k| p[k * n + i] * sig[k] as f64 * p[k * n + j]).sum()
    });
    MetricAtPoint::new(g, &sig).expect("random metric is nondegenerate")
}

/// A generic curvature tensor as a combination of Kulkarni-Nomizu products.
pub fn random_curv(r: &mut ChaCha8Rng, n: usize) -> CurvTensor4 {
    let mut acc = CurvTensor4::zeros(n);
    for _ in 0..3 {
        let e = random_sym(r, n);
        let f = random_sym(r, n);
        acc = &acc + &kulkarni_nomizu(&e, &f).unwrap();
    }
    acc
}

/// Relative max-norm distance `max|a - b| / max(max|a|, max|b|, floor)`.
pub fn rel_diff(a: &dyn Components, b: &dyn Components, floor: f64) -> f64 {
    let gap = a
        .data()
        .iter()
        .zip(b.data())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    gap / a.max_abs().max(b.max_abs()).max(floor).max(f64::MIN_POSITIVE)
}

fn metric_values(spec: &dyn MetricSpec, x: &[f64]) -> Vec<f64> {
    let jets: Vec<Jet> = x.iter().map(|&v| Jet::constant(v)).collect();
    spec.components(&jets).iter().map(|j| j.value).collect()
}

fn invert(n: usize, a: &[f64]) -> Vec<f64> {
    // Gauss-Jordan, independent of the crate's linear algebra
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a[i * n..(i + 1) * n].to_vec();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .unwrap();
        m.swap(c, p);
        let d = m[c][c];
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                let pivot = m[c].clone();
                for (v, pv) in m[r].iter_mut().zip(pivot) {
                    *v -= f * pv;
                }
            }
        }
    }
    (0..n).flat_map(|i| m[i][n..].to_vec()).collect()
}

/// Γ^h_ij by central differences of the metric values with step `h`.
pub fn fd_christoffel(spec: &dyn MetricSpec, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let g = metric_values(spec, x);
    let gi = invert(n, &g);
    let mut dg = vec![0.0; n * n * n];
    for s in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[s] += h;
        xm[s] -= h;
        let (gp, gm) = (metric_values(spec, &xp), metric_values(spec, &xm));
        for ij in 0..n * n {
            dg[s * n * n + ij] = (gp[ij] - gm[ij]) / (2.0 * h);
        }
    }
    let d = |s: usize, i: usize, j: usize| dg[(s * n + i) * n + j];
    let mut gamma = vec![0.0; n * n * n];
    for a in 0..n {
        for i in 0..n {
            for j in 0..n {
                gamma[(a * n + i) * n + j] = (0..n)
                    .map(|s| 0.5 * gi[a * n + s] * (d(i, j, s) + d(j, i, s) - d(s, i, j)))
                    .sum();
            }
        }
    }
    gamma
}

/// Riemann tensor from finite differences of [`fd_christoffel`].
pub fn fd_riemann(spec: &dyn MetricSpec, x: &[f64], h: f64) -> Tensor4 {
    let n = x.len();
    let gam = fd_christoffel(spec, x, h);
    let g = metric_values(spec, x);
    let mut dgam = vec![0.0; n * n * n * n];
    for k in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let (gp, gm) = (fd_christoffel(spec, &xp, h), fd_christoffel(spec, &xm, h));
        for idx in 0..n * n * n {
            dgam[idx * n + k] = (gp[idx] - gm[idx]) / (2.0 * h);
        }
    }
    let gm = |a: usize, i: usize, j: usize| gam[(a * n + i) * n + j];
    let dgm = |a: usize, i: usize, j: usize, k: usize| dgam[((a * n + i) * n + j) * n + k];
    Tensor4::from_fn(n, |[hh, i, j, k]| {
        let mut v = 0.0;
        for s in 0..n {
            let mut up = dgm(s, i, j, k) - dgm(s, i, k, j);
            for r in 0..n {
                up += gm(r, i, j) * gm(s, r, k) - gm(r, i, k) * gm(s, r, j);
            }
            v += g[hh * n + s] * up;
        }
        v
    })
}

/// `count` points drawn uniformly from the entry's box, kept if in the domain.
pub fn sample_points(e: &curvlab_core::catalog::CatalogEntry, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for _ in 0..10_000 {
        if out.len() == count {
            break;
        }
        let x: Vec<f64> = e.sample_box.iter().map(|&(lo, hi)| r.random_range(lo..hi)).collect();
        if e.spec.in_domain(&x) {
            out.push(x);
        }
    }
    assert_eq!(out.len(), count, "{}: domain too small for sampling", e.name);
    out
}

pub fn entry(name: &str, params: &[(&str, &str)]) -> curvlab_core::catalog::CatalogEntry {
    use curvlab_core::catalog::{build, Param, Params};
    let p: Params = params
        .iter()
        .map(|(k, v)| (k.to_string(), Param::Text(v.to_string())))
        .collect();
    build(name, &p).unwrap_or_else(|e| panic!("{name}: {e}"))
}
