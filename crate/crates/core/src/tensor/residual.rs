use alloc::vec::Vec;

use super::Components;
use crate::linalg;

/// Accumulates `Σ c_i T_i` for an identity written as `LHS - RHS = 0`.
///
/// The residual is the norm of the sum over the largest norm of any single
/// scaled term, which keeps cancellations between large terms visible.
#[derive(Clone, Debug, Default)]
pub struct Balance {
    sum: Vec<f64>,
    scale: f64,
    first: Option<f64>,
}

impl Balance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, c: f64, t: &dyn Components) -> Self {
        let d = t.data();
        if self.sum.is_empty() {
            self.sum = alloc::vec![0.0; d.len()];
        }
        assert_eq!(self.sum.len(), d.len(), "balance terms differ in shape");
        let mut sq = 0.0;
        for (s, v) in self.sum.iter_mut().zip(d) {
            *s += c * v;
            sq += (c * v) * (c * v);
        }
        let nrm = libm::sqrt(sq);
        self.first.get_or_insert(nrm);
        self.scale = self.scale.max(nrm);
        self
    }

    pub fn plus(self, t: &dyn Components) -> Self {
        self.term(1.0, t)
    }

    pub fn minus(self, t: &dyn Components) -> Self {
        self.term(-1.0, t)
    }

    /// The accumulated `Σ c_i T_i`, flattened.
    pub fn sum(&self) -> &[f64] {
        &self.sum
    }

    pub fn residual_abs(&self) -> f64 {
        linalg::norm(&self.sum)
    }

    /// Largest norm among the scaled terms.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Norm of the first term added (conventionally the left-hand side).
    pub fn lhs_norm(&self) -> f64 {
        self.first.unwrap_or(0.0)
    }

    pub fn residual(&self) -> f64 {
        self.residual_floor(1e-300)
    }

    /// As [`Balance::residual`], with the denominator bounded below by `floor`.
    pub fn residual_floor(&self, floor: f64) -> f64 {
        let r = self.residual_abs();
        if r == 0.0 {
            0.0
        } else {
            r / self.scale.max(floor).max(1e-300)
        }
    }
}
