//! Point-local curvature laboratory for semi-Riemannian metrics.
//!
//! The crate computes the curvature package (Christoffel symbols, Riemann,
//! Ricci, scalar and Weyl tensors) of a metric given by smooth component
//! functions, evaluated with second-order Taylor arithmetic. On top of that it
//! provides the tensor algebra used by pseudosymmetry-type curvature
//! conditions (Kulkarni-Nomizu products, Tachibana tensors `Q(A,T)`, the
//! curvature action `B·T`), closed-form curvature of warped products, and
//! fitting/classification of those conditions at a point.
//!
//! Everything is `no_std` with `alloc`; IO, sampling and reporting live in the
//! companion `curvlab` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod catalog;
pub mod conditions;
pub mod engine;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod tensor;
pub mod warped;

pub use engine::{christoffel, curvature_package, Christoffel, CurvaturePackage};
pub use error::{CurvError, Result};
pub use jet::{Jet, MAX_DIM};
pub use metric::{FnMetric, MetricAtPoint, MetricSpec};
pub use tensor::{CurvTensor4, SymTensor2, Tensor, Tensor4, Tensor6};
