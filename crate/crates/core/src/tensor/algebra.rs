use alloc::vec::Vec;

use super::{CurvTensor4, SymTensor2};
use crate::error::{CurvError, Result};
use crate::linalg;
use crate::metric::MetricAtPoint;

/// Default relative threshold for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Ricci contraction `S_ij = g^{hk} B_{hijk}`.
pub fn ricci_from(b: &CurvTensor4, g: &MetricAtPoint) -> Result<SymTensor2> {
    let n = b.n();
    if g.n() != n {
        return Err(CurvError::DimensionMismatch {
            expected: n,
            got: g.n(),
        });
    }
    Ok(SymTensor2::from_fn(n, |i, j| {
        let mut s = 0.0;
        for h in 0..n {
            for k in 0..n {
                s += g.g_inv.at(h, k) * b.get([h, i, j, k]);
            }
        }
        s
    }))
}

/// `tr A = g^{ij} A_ij`.
pub fn trace(a: &SymTensor2, g: &MetricAtPoint) -> f64 {
    let n = a.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += g.g_inv.at(i, j) * a.at(i, j);
        }
    }
    s
}

/// `A^k` for `k ∈ {2, 3}`, composing through `g^{-1}`: `A²_ij = A_ip g^{pq} A_qj`.
pub fn power(a: &SymTensor2, g: &MetricAtPoint, k: u32) -> Result<SymTensor2> {
    let n = a.n();
    let compose = |x: &SymTensor2, y: &SymTensor2| {
        let xg = linalg::matmul(n, x.as_slice(), g.g_inv.as_slice());
        let m = linalg::matmul(n, &xg, y.as_slice());
        SymTensor2::from_fn(n, |i, j| 0.5 * (m[i * n + j] + m[j * n + i]))
    };
    match k {
        2 => Ok(compose(a, a)),
        3 => Ok(compose(&compose(a, a), a)),
        _ => Err(CurvError::Precondition(alloc::format!(
            "power supports k = 2 or 3, got {k}"
        ))),
    }
}

/// `v ⊗ v`.
pub fn outer(v: &[f64]) -> SymTensor2 {
    SymTensor2::from_fn(v.len(), |i, j| v[i] * v[j])
}

/// Number of singular values above `tol_rel` times the largest one.
pub fn numerical_rank(a: &SymTensor2, tol_rel: f64) -> usize {
    let n = a.n();
    let (ev, _) = linalg::sym_eigen(n, a.as_slice());
    let sv: Vec<f64> = ev.iter().map(|x| x.abs()).collect();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol_rel * top).count()
}
