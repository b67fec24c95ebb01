//! Kulkarni-Nomizu products, Tachibana tensors and the curvature action.
//!
//! `Q(A,T)` and `B·T` are both derivations of `T` by a skew endomorphism
//! `X ∧ Y` pulled into every slot. Writing the endomorphism as a kernel
//! `M[l,m,i,p]` (the `p`-component of the image of `∂_i` under the operator
//! labelled by the last two output slots), both reduce to
//!
//! ```text
//! out[i1..ik, l, m] = Σ_s Σ_p M[l,m,i_s,p] T[i1..p..ik]
//! ```
//!
//! with `M = -A_{mi} δ_{pl} + A_{li} δ_{pm}` for `Q(A,·)` and
//! `M = g^{pq} B_{qilm}` for `B·`. The two kernels agree for `(A,B) = (g,G)`.

use alloc::vec;
use alloc::vec::Vec;

use super::{Components, CurvTensor4, SymTensor2, Tensor4, Tensor6};
use crate::error::{CurvError, Result};
use crate::metric::MetricAtPoint;

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(CurvError::DimensionMismatch {
            expected: a,
            got: b,
        });
    }
    Ok(())
}

/// Right-hand operands of `E ∧ ·`.
pub trait KnOperand {
    type Output;
    fn kn_with(&self, e: &SymTensor2) -> Result<Self::Output>;
}

impl KnOperand for SymTensor2 {
    type Output = CurvTensor4;
    fn kn_with(&self, e: &SymTensor2) -> Result<CurvTensor4> {
        check_dims(e.n(), self.n())?;
        let t = self;
        let out = Tensor4::from_fn(e.n(), |[h, i, j, k]| {
            e.at(h, k) * t.at(i, j) + e.at(i, j) * t.at(h, k)
                - e.at(h, j) * t.at(i, k)
                - e.at(i, k) * t.at(h, j)
        });
        Ok(CurvTensor4::from_trusted(out))
    }
}

impl KnOperand for Tensor4 {
    type Output = Tensor6;
    fn kn_with(&self, e: &SymTensor2) -> Result<Tensor6> {
        check_dims(e.n(), self.n())?;
        let t = self;
        Ok(Tensor6::from_fn(e.n(), |[h, i, j, k, l, m]| {
            e.at(h, k) * t.get([i, j, l, m]) + e.at(i, j) * t.get([h, k, l, m])
                - e.at(h, j) * t.get([i, k, l, m])
                - e.at(i, k) * t.get([h, j, l, m])
        }))
    }
}

impl KnOperand for CurvTensor4 {
    type Output = Tensor6;
    fn kn_with(&self, e: &SymTensor2) -> Result<Tensor6> {
        self.tensor().kn_with(e)
    }
}

/// `E ∧ T`; a `(0,2)` operand gives a curvature tensor, a `(0,4)` operand a
/// `(0,6)` tensor whose last two slots are carried through from `T`.
pub fn kulkarni_nomizu<T: KnOperand + ?Sized>(e: &SymTensor2, t: &T) -> Result<T::Output> {
    t.kn_with(e)
}

/// Tensors that a skew endomorphism kernel can act on slot by slot.
pub trait Derivable {
    type Output;
    fn derive(&self, kernel: &[f64]) -> Self::Output;
    fn operand_dim(&self) -> usize;
}

impl Derivable for SymTensor2 {
    type Output = Tensor4;
    fn derive(&self, kernel: &[f64]) -> Tensor4 {
        self.tensor().derive(kernel)
    }
    fn operand_dim(&self) -> usize {
        self.n()
    }
}

impl Derivable for super::Tensor<2> {
    type Output = Tensor4;
    fn derive(&self, kernel: &[f64]) -> Tensor4 {
        let n = self.n();
        let km = |l: usize, m: usize, i: usize, p: usize| kernel[((l * n + m) * n + i) * n + p];
        Tensor4::from_fn(n, |[a, b, l, m]| {
            let mut s = 0.0;
            for p in 0..n {
                s += km(l, m, a, p) * self.get([p, b]) + km(l, m, b, p) * self.get([a, p]);
            }
            s
        })
    }
    fn operand_dim(&self) -> usize {
        self.n()
    }
}

impl Derivable for Tensor4 {
    type Output = Tensor6;
    fn derive(&self, kernel: &[f64]) -> Tensor6 {
        let n = self.n();
        let t = self.as_slice();
        let n2 = n * n;
        let n3 = n2 * n;
        let mut data = vec![0.0; n.pow(6)];
        for l in 0..n {
            for m in 0..n {
                let km = &kernel[(l * n + m) * n2..(l * n + m + 1) * n2];
                for h in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            for k in 0..n {
                                let mut s = 0.0;
                                for p in 0..n {
                                    s += km[h * n + p] * t[p * n3 + i * n2 + j * n + k]
                                        + km[i * n + p] * t[h * n3 + p * n2 + j * n + k]
                                        + km[j * n + p] * t[h * n3 + i * n2 + p * n + k]
                                        + km[k * n + p] * t[h * n3 + i * n2 + j * n + p];
                                }
                                data[((((h * n + i) * n + j) * n + k) * n + l) * n + m] = s;
                            }
                        }
                    }
                }
            }
        }
        Tensor6::from_data(n, data).expect("sized by construction")
    }
    fn operand_dim(&self) -> usize {
        self.n()
    }
}

impl Derivable for CurvTensor4 {
    type Output = Tensor6;
    fn derive(&self, kernel: &[f64]) -> Tensor6 {
        self.tensor().derive(kernel)
    }
    fn operand_dim(&self) -> usize {
        self.n()
    }
}

fn tachibana_kernel(a: &SymTensor2) -> Vec<f64> {
    let n = a.n();
    let mut k = vec![0.0; n.pow(4)];
    for l in 0..n {
        for m in 0..n {
            for i in 0..n {
                let base = ((l * n + m) * n + i) * n;
                k[base + l] -= a.at(m, i);
                k[base + m] += a.at(l, i);
            }
        }
    }
    k
}

fn action_kernel(b: &CurvTensor4, g_inv: &SymTensor2) -> Vec<f64> {
    let n = b.n();
    let mut k = vec![0.0; n.pow(4)];
    for l in 0..n {
        for m in 0..n {
            for i in 0..n {
                for p in 0..n {
                    let mut s = 0.0;
                    for q in 0..n {
                        s += g_inv.at(p, q) * b.get([q, i, l, m]);
                    }
                    k[((l * n + m) * n + i) * n + p] = s;
                }
            }
        }
    }
    k
}

/// Tachibana tensor `Q(A,T)`.
pub fn tachibana<T: Derivable + ?Sized>(a: &SymTensor2, t: &T) -> Result<T::Output> {
    check_dims(a.n(), t.operand_dim())?;
    Ok(t.derive(&tachibana_kernel(a)))
}

/// Curvature action `B·T` with the index of `B` raised by `g`.
pub fn curv_action<T: Derivable + ?Sized>(
    b: &CurvTensor4,
    t: &T,
    g: &MetricAtPoint,
) -> Result<T::Output> {
    check_dims(b.n(), t.operand_dim())?;
    check_dims(b.n(), g.n())?;
    if !g.det.is_finite() || g.det == 0.0 {
        return Err(CurvError::SingularMetric(g.det));
    }
    Ok(t.derive(&action_kernel(b, &g.g_inv)))
}

/// Convenience for generic code that only has a [`Components`] view.
pub(crate) fn same_shape(a: &dyn Components, b: &dyn Components) -> Result<()> {
    if a.valence() != b.valence() {
        return Err(CurvError::ValenceMismatch {
            expected: a.valence(),
            got: b.valence(),
        });
    }
    check_dims(a.dim(), b.dim())
}
