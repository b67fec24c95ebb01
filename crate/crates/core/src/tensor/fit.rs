use alloc::vec;
use alloc::vec::Vec;

use super::products::same_shape;
use super::Components;
use crate::error::{CurvError, Result};
use crate::linalg;

/// Condition number of the normalized Gram matrix above which a fit is degenerate.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub coeffs: Vec<f64>,
    /// `‖target - Σ c_j basis_j‖ / max(‖target‖, ε)`.
    pub residual_rel: f64,
    pub degenerate: bool,
    pub gram_condition: f64,
}

const EPS: f64 = 1e-300;

/// Least-squares coefficients of `target` over `basis`.
///
/// Columns are scaled to unit norm before the Gram conditioning test, so a
/// basis tensor's overall magnitude never triggers degeneracy by itself.
/// Well-conditioned systems are solved by Householder QR; degenerate ones
/// get the minimum-norm solution in the scaled coordinates.
pub fn fit_coefficients(target: &dyn Components, basis: &[&dyn Components]) -> Result<FitResult> {
    if basis.is_empty() {
        return Err(CurvError::EmptyBasis);
    }
    for b in basis {
        same_shape(target, *b)?;
    }
    let t = target.data();
    let m = t.len();
    let k = basis.len();
    let tnorm = linalg::norm(t);
    let scales: Vec<f64> = basis.iter().map(|b| b.norm()).collect();
    if scales.iter().all(|&s| s == 0.0) {
        return Ok(FitResult {
            coeffs: Vec::new(),
            residual_rel: if tnorm == 0.0 { 0.0 } else { 1.0 },
            degenerate: true,
            gram_condition: f64::INFINITY,
        });
    }
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .zip(&scales)
        .map(|(b, &s)| {
            if s == 0.0 {
                vec![0.0; m]
            } else {
                b.data().iter().map(|v| v / s).collect()
            }
        })
        .collect();
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let d = dot(&cols[i], &cols[j]);
            gram[i * k + j] = d;
            gram[j * k + i] = d;
        }
    }
    let (ev, vecs) = linalg::sym_eigen(k, &gram);
    let lmax = ev.iter().cloned().fold(0.0, f64::max);
    let lmin = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if lmin <= 0.0 { f64::INFINITY } else { lmax / lmin };
    let degenerate = !(cond <= GRAM_CONDITION_LIMIT);

    let y = if degenerate {
        let rhs: Vec<f64> = cols.iter().map(|c| dot(c, t)).collect();
        let mut y = vec![0.0; k];
        for (q, &lam) in ev.iter().enumerate() {
            if lam <= lmax / GRAM_CONDITION_LIMIT {
                continue;
            }
            let proj: f64 = (0..k).map(|i| vecs[i * k + q] * rhs[i]).sum::<f64>() / lam;
            for i in 0..k {
                y[i] += proj * vecs[i * k + q];
            }
        }
        y
    } else {
        qr_solve(&cols, t)
    };
    let coeffs: Vec<f64> = y
        .iter()
        .zip(&scales)
        .map(|(c, &s)| if s == 0.0 { 0.0 } else { c / s })
        .collect();

    let mut r = t.to_vec();
    for (b, c) in basis.iter().zip(&coeffs) {
        for (ri, bi) in r.iter_mut().zip(b.data()) {
            *ri -= c * bi;
        }
    }
    Ok(FitResult {
        coeffs,
        residual_rel: linalg::norm(&r) / tnorm.max(EPS),
        degenerate,
        gram_condition: cond,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Householder QR least squares for a tall matrix given by columns.
fn qr_solve(cols: &[Vec<f64>], t: &[f64]) -> Vec<f64> {
    let k = cols.len();
    let m = t.len();
    let mut a: Vec<Vec<f64>> = cols.to_vec();
    let mut b = t.to_vec();
    let mut diag = vec![0.0; k];
    for j in 0..k {
        let alpha = {
            let s: f64 = a[j][j..].iter().map(|x| x * x).sum();
            let s = libm::sqrt(s);
            if a[j][j] > 0.0 {
                -s
            } else {
                s
            }
        };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|x| x * x).sum();
        diag[j] = alpha;
        if vn == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(j + 1) {
            let f = 2.0 * dot(&v, &col[j..]) / vn;
            for (c, vi) in col[j..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
        let f = 2.0 * dot(&v, &b[j..m]) / vn;
        for (c, vi) in b[j..].iter_mut().zip(&v) {
            *c -= f * vi;
        }
    }
    let mut x = vec![0.0; k];
    for j in (0..k).rev() {
        let mut s = b[j];
        for q in (j + 1)..k {
            s -= a[q][j] * x[q];
        }
        x[j] = s / diag[j];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{SymTensor2, Tensor4};

    #[test]
    fn exact_multiple() {
        let x = SymTensor2::from_fn(3, |i, j| (i + 2 * j) as f64 + 0.5);
        let t = &x * 3.0;
        let f = fit_coefficients(&t, &[&x]).unwrap();
        assert!((f.coeffs[0] - 3.0).abs() < 1e-14);
        assert!(f.residual_rel < 1e-15);
        assert!(!f.degenerate);
    }

    #[test]
    fn zero_basis_is_degenerate() {
        let z = SymTensor2::zeros(3);
        let f = fit_coefficients(&z, &[&z]).unwrap();
        assert!(f.degenerate && f.coeffs.is_empty());
        assert_eq!(f.residual_rel, 0.0);
    }

    #[test]
    fn dependent_basis_gets_min_norm_solution() {
        let x = SymTensor2::from_fn(2, |i, j| 1.0 + (i * j) as f64);
        let y = &x * 2.0;
        let f = fit_coefficients(&x, &[&x, &y]).unwrap();
        assert!(f.degenerate);
        assert!(f.residual_rel < 1e-14);
        assert!((f.coeffs[0] + 2.0 * f.coeffs[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn valence_mismatch_rejected() {
        let x = SymTensor2::identity(2);
        let t = Tensor4::zeros(2);
        assert!(matches!(
            fit_coefficients(&t, &[&x]),
            Err(CurvError::ValenceMismatch { .. })
        ));
        assert!(matches!(fit_coefficients(&t, &[]), Err(CurvError::EmptyBasis)));
    }
}
