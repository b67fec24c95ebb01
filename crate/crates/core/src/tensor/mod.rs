//! Dense covariant tensors at a point and the algebra built on them.
//!
//! Storage is row-major over coordinate components: a `(0,k)` tensor in
//! dimension `n` holds `n^k` reals. Two newtypes enforce the symmetries the
//! curvature algebra relies on: [`SymTensor2`] (symmetric `(0,2)`) and
//! [`CurvTensor4`] (generalized curvature tensor).

mod algebra;
mod fit;
mod products;
mod residual;

pub use algebra::{numerical_rank, outer, power, ricci_from, trace, DEFAULT_RANK_TOL};
pub use fit::{fit_coefficients, FitResult, GRAM_CONDITION_LIMIT};
pub use products::{curv_action, kulkarni_nomizu, tachibana, Derivable, KnOperand};
pub use residual::Balance;

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Deref, Mul, Neg, Sub};

use crate::error::{CurvError, Result};

/// Relative defect above which a symmetry projection is treated as an error.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Read access shared by every tensor valence, used by fitting and norms.
pub trait Components {
    fn dim(&self) -> usize;
    fn valence(&self) -> usize;
    fn data(&self) -> &[f64];

    fn norm(&self) -> f64 {
        crate::linalg::norm(self.data())
    }

    fn max_abs(&self) -> f64 {
        self.data().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// A `(0,R)` tensor with no symmetry assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<const R: usize> {
    n: usize,
    data: Vec<f64>,
}

pub type Tensor4 = Tensor<4>;
pub type Tensor6 = Tensor<6>;

impl<const R: usize> Tensor<R> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n.pow(R as u32)],
        }
    }

    pub fn from_data(n: usize, data: Vec<f64>) -> Result<Self> {
        let want = n.pow(R as u32);
        if data.len() != want {
            return Err(CurvError::DimensionMismatch {
                expected: want,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    /// Builds a tensor by evaluating `f` on every multi-index.
    pub fn from_fn(n: usize, mut f: impl FnMut([usize; R]) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for flat in 0..t.data.len() {
            t.data[flat] = f(t.unflatten(flat));
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn flat_index(&self, ix: [usize; R]) -> usize {
        ix.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    #[inline]
    pub fn unflatten(&self, mut flat: usize) -> [usize; R] {
        let mut ix = [0; R];
        for slot in (0..R).rev() {
            ix[slot] = flat % self.n;
            flat /= self.n;
        }
        ix
    }

    #[inline]
    pub fn get(&self, ix: [usize; R]) -> f64 {
        self.data[self.flat_index(ix)]
    }

    #[inline]
    pub fn set(&mut self, ix: [usize; R], v: f64) {
        let f = self.flat_index(ix);
        self.data[f] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.n, other.n, "tensor dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        self.zip(other, |a, b| a + s * b)
    }
}

impl<const R: usize> Components for Tensor<R> {
    fn dim(&self) -> usize {
        self.n
    }
    fn valence(&self) -> usize {
        R
    }
    fn data(&self) -> &[f64] {
        &self.data
    }
}

impl<const R: usize> Add for &Tensor<R> {
    type Output = Tensor<R>;
    fn add(self, rhs: Self) -> Tensor<R> {
        self.zip(rhs, |a, b| a + b)
    }
}

impl<const R: usize> Sub for &Tensor<R> {
    type Output = Tensor<R>;
    fn sub(self, rhs: Self) -> Tensor<R> {
        self.zip(rhs, |a, b| a - b)
    }
}

impl<const R: usize> Add for Tensor<R> {
    type Output = Tensor<R>;
    fn add(self, rhs: Self) -> Tensor<R> {
        &self + &rhs
    }
}

impl<const R: usize> Sub for Tensor<R> {
    type Output = Tensor<R>;
    fn sub(self, rhs: Self) -> Tensor<R> {
        &self - &rhs
    }
}

impl<const R: usize> Neg for &Tensor<R> {
    type Output = Tensor<R>;
    fn neg(self) -> Tensor<R> {
        self.scale(-1.0)
    }
}

impl<const R: usize> Mul<f64> for &Tensor<R> {
    type Output = Tensor<R>;
    fn mul(self, s: f64) -> Tensor<R> {
        self.scale(s)
    }
}

impl<const R: usize> Mul<&Tensor<R>> for f64 {
    type Output = Tensor<R>;
    fn mul(self, t: &Tensor<R>) -> Tensor<R> {
        t.scale(self)
    }
}

impl<const R: usize> Mul<Tensor<R>> for f64 {
    type Output = Tensor<R>;
    fn mul(self, t: Tensor<R>) -> Tensor<R> {
        t.scale(self)
    }
}

/// Symmetric `(0,2)` tensor: metric, Ricci tensor and its powers, `T`, `A`, `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor2(Tensor<2>);

impl SymTensor2 {
    pub fn zeros(n: usize) -> Self {
        Self(Tensor::zeros(n))
    }

    /// Symmetric by construction: only `f(i, j)` with `i <= j` is evaluated.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Tensor::<2>::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                t.set([i, j], v);
                t.set([j, i], v);
            }
        }
        Self(t)
    }

    /// Symmetrizes row-major input, failing if the asymmetric part is large.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        let raw = Tensor::<2>::from_data(n, data)?;
        let sym = Self::from_fn(n, |i, j| 0.5 * (raw.get([i, j]) + raw.get([j, i])));
        let defect = relative_defect(&raw, &sym.0);
        if defect > SYMMETRY_TOL {
            return Err(CurvError::SymmetryDefect {
                what: "SymTensor2",
                defect,
            });
        }
        Ok(sym)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.0.get([i, j])
    }

    pub fn tensor(&self) -> &Tensor<2> {
        &self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        Self(self.0.axpy(s, &other.0))
    }
}

impl Deref for SymTensor2 {
    type Target = Tensor<2>;
    fn deref(&self) -> &Tensor<2> {
        &self.0
    }
}

impl Components for SymTensor2 {
    fn dim(&self) -> usize {
        self.0.n
    }
    fn valence(&self) -> usize {
        2
    }
    fn data(&self) -> &[f64] {
        &self.0.data
    }
}

/// `(0,4)` tensor with the symmetries of the Riemann tensor: skew in each
/// pair, pair-symmetric, and satisfying the first Bianchi identity.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvTensor4(Tensor4);

impl CurvTensor4 {
    pub fn zeros(n: usize) -> Self {
        Self(Tensor4::zeros(n))
    }

    /// Projects onto generalized curvature tensors and checks the defect.
    pub fn from_tensor(raw: Tensor4) -> Result<Self> {
        Self::from_tensor_scaled(raw, 0.0)
    }

    /// As [`from_tensor`](Self::from_tensor), measuring the defect against
    /// `max(max|raw|, floor)` so round-off in a near-zero tensor passes.
    pub fn from_tensor_scaled(raw: Tensor4, floor: f64) -> Result<Self> {
        let (proj, _) = Self::project(&raw);
        let gap = (&raw - proj.tensor()).max_abs();
        let defect = if gap == 0.0 {
            0.0
        } else {
            gap / raw.max_abs().max(floor)
        };
        if defect > SYMMETRY_TOL {
            return Err(CurvError::SymmetryDefect {
                what: "CurvTensor4",
                defect,
            });
        }
        Ok(proj)
    }

    /// Projection plus relative defect `max|raw - proj| / max|raw|`, never failing.
    pub fn project(raw: &Tensor4) -> (Self, f64) {
        let n = raw.n;
        let sym = Tensor4::from_fn(n, |[h, i, j, k]| {
            0.125
                * (raw.get([h, i, j, k]) - raw.get([i, h, j, k]) - raw.get([h, i, k, j])
                    + raw.get([i, h, k, j])
                    + raw.get([j, k, h, i])
                    - raw.get([k, j, h, i])
                    - raw.get([j, k, i, h])
                    + raw.get([k, j, i, h]))
        });
        // remove the cyclic (totally skew) part to enforce first Bianchi
        let proj = Tensor4::from_fn(n, |[h, i, j, k]| {
            let b = (sym.get([h, i, j, k]) + sym.get([j, h, i, k]) + sym.get([i, j, h, k])) / 3.0;
            sym.get([h, i, j, k]) - b
        });
        let defect = relative_defect(raw, &proj);
        (Self(proj), defect)
    }

    /// Wraps a tensor already known to carry curvature symmetries (sums of products).
    pub(crate) fn from_trusted(t: Tensor4) -> Self {
        Self(t)
    }

    pub fn tensor(&self) -> &Tensor4 {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor4 {
        self.0
    }

    /// The maximum violation of the generalized curvature identities.
    pub fn symmetry_defect(t: &Tensor4) -> f64 {
        let n = t.n;
        let scale = t.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for h in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let v = t.get([h, i, j, k]);
                        worst = worst
                            .max((v + t.get([i, h, j, k])).abs())
                            .max((v + t.get([h, i, k, j])).abs())
                            .max((v - t.get([j, k, h, i])).abs())
                            .max((v + t.get([j, h, i, k]) + t.get([i, j, h, k])).abs());
                    }
                }
            }
        }
        worst / scale
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        Self(self.0.axpy(s, &other.0))
    }
}

impl Deref for CurvTensor4 {
    type Target = Tensor4;
    fn deref(&self) -> &Tensor4 {
        &self.0
    }
}

impl Components for CurvTensor4 {
    fn dim(&self) -> usize {
        self.0.n
    }
    fn valence(&self) -> usize {
        4
    }
    fn data(&self) -> &[f64] {
        &self.0.data
    }
}

macro_rules! closed_ops {
    ($ty:ident) => {
        impl Add for &$ty {
            type Output = $ty;
            fn add(self, rhs: Self) -> $ty {
                $ty(&self.0 + &rhs.0)
            }
        }
        impl Sub for &$ty {
            type Output = $ty;
            fn sub(self, rhs: Self) -> $ty {
                $ty(&self.0 - &rhs.0)
            }
        }
        impl Add for $ty {
            type Output = $ty;
            fn add(self, rhs: Self) -> $ty {
                $ty(&self.0 + &rhs.0)
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, rhs: Self) -> $ty {
                $ty(&self.0 - &rhs.0)
            }
        }
        impl Neg for &$ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                $ty(self.0.scale(-1.0))
            }
        }
        impl Mul<f64> for &$ty {
            type Output = $ty;
            fn mul(self, s: f64) -> $ty {
                $ty(self.0.scale(s))
            }
        }
        impl Mul<&$ty> for f64 {
            type Output = $ty;
            fn mul(self, t: &$ty) -> $ty {
                $ty(t.0.scale(self))
            }
        }
        impl Mul<$ty> for f64 {
            type Output = $ty;
            fn mul(self, t: $ty) -> $ty {
                $ty(t.0.scale(self))
            }
        }
    };
}

closed_ops!(SymTensor2);
closed_ops!(CurvTensor4);

fn relative_defect<const R: usize>(raw: &Tensor<R>, proj: &Tensor<R>) -> f64 {
    let scale = raw.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    (raw - proj).max_abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_constructor_rejects_asymmetric_input() {
        assert!(SymTensor2::from_rows(2, alloc::vec![1.0, 2.0, 2.0 + 1e-13, 3.0]).is_ok());
        let err = SymTensor2::from_rows(2, alloc::vec![1.0, 2.0, 2.5, 3.0]).unwrap_err();
        assert!(matches!(err, CurvError::SymmetryDefect { .. }));
        assert!(SymTensor2::from_rows(2, alloc::vec![1.0; 3]).is_err());
    }

    #[test]
    fn curvature_projection_rejects_non_curvature_tensor() {
        let mut t = Tensor4::zeros(3);
        t.set([0, 1, 0, 1], 1.0);
        assert!(CurvTensor4::from_tensor(t).is_err());
        let zero = CurvTensor4::from_tensor(Tensor4::zeros(3)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn flat_index_roundtrip() {
        let t = Tensor6::zeros(3);
        for flat in [0, 5, 100, 728] {
            assert_eq!(t.flat_index(t.unflatten(flat)), flat);
        }
    }
}
