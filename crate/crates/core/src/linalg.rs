//! Small dense linear algebra on row-major `f64` slices.
//!
//! Matrices here are at most a few dozen rows (metric components, Gram
//! matrices of fitting bases), so plain Gaussian elimination and cyclic
//! Jacobi sweeps are accurate and fast enough.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Inverse and determinant via LU with partial pivoting; `None` if singular.
pub fn invert(n: usize, a: &[f64]) -> Option<(Vec<f64>, f64)> {
    debug_assert_eq!(a.len(), n * n);
    let mut lu = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| lu[x * n + col].abs().total_cmp(&lu[y * n + col].abs()))
            .unwrap();
        let p = lu[pivot * n + col];
        if p.abs() <= scale * 1e-300 || p == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                lu.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        det *= p;
        let inv_p = 1.0 / p;
        for k in 0..n {
            lu[col * n + k] *= inv_p;
            inv[col * n + k] *= inv_p;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = lu[row * n + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                lu[row * n + k] -= f * lu[col * n + k];
                inv[row * n + k] -= f * inv[col * n + k];
            }
        }
    }
    Some((inv, det))
}

/// Row-major product of two `n x n` matrices.
pub fn matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues (unsorted) and the matching eigenvectors as columns of
/// a row-major matrix.
pub fn sym_eigen(n: usize, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    // enforce exact symmetry before rotating
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = s;
            m[j * n + i] = s;
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        let diag: f64 = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= 1e-30 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[i * n + i]).collect(), v)
}

/// Coefficients `[1, c1, ..., cn]` of `det(λI - M)` by the Faddeev-LeVerrier recursion.
pub fn char_poly(n: usize, m: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    let mut mk = vec![0.0; n * n]; // M_0 = 0
    let mut ck = 1.0;
    for k in 1..=n {
        // M_k = M * M_{k-1} + c_{k-1} I
        let mut next = matmul(n, m, &mk);
        for i in 0..n {
            next[i * n + i] += ck;
        }
        let am = matmul(n, m, &next);
        let tr: f64 = (0..n).map(|i| am[i * n + i]).sum();
        ck = -tr / k as f64;
        coeffs.push(ck);
        mk = next;
    }
    coeffs
}

/// Roots of a monic polynomial `[1, c1, ..., cn]` by Aberth-Ehrlich iteration.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(coeffs[0], 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in &coeffs[1..] {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    // Cauchy bound for the initial circle
    let bound = 1.0 + coeffs[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * core::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::new(libm::cos(ang), libm::sin(ang)) * (0.5 * bound)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm_sqr() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm_sqr() > 0.0 {
                        sum += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * sum;
            let step = if denom.norm_sqr() > 0.0 { ratio / denom } else { ratio };
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm_sqr());
            }
        }
        if max_step <= 1e-34 * bound * bound {
            break;
        }
    }
    z
}

/// Frobenius norm of a slice.
pub fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_recovers_identity() {
        let a = [4.0, -1.0, 0.5, -1.0, 3.0, 2.0, 0.5, 2.0, -5.0];
        let (inv, det) = invert(3, &a).unwrap();
        let id = matmul(3, &a, &inv);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[i * 3 + j] - e).abs() < 1e-14);
            }
        }
        // cofactor expansion
        let d = 4.0 * (3.0 * -5.0 - 4.0) + 1.0 * (5.0 - 1.0) + 0.5 * (-2.0 - 1.5);
        assert!((det - d).abs() < 1e-12);
        assert!(invert(2, &[1.0, 2.0, 2.0, 4.0]).is_none());
    }

    #[test]
    fn jacobi_diagonalises() {
        let a = [2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0];
        let (mut ev, _) = sym_eigen(3, &a);
        ev.sort_by(f64::total_cmp);
        let s2 = core::f64::consts::SQRT_2;
        for (got, want) in ev.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn polynomial_roots_of_known_cubic() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let mut r = poly_roots(&[1.0, 0.0, -7.0, 6.0]);
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (z, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((z.re - want).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
        let cp = char_poly(2, &[1.0, 2.0, 3.0, 4.0]);
        assert!((cp[1] + 5.0).abs() < 1e-14 && (cp[2] + 2.0).abs() < 1e-14);
    }
}
