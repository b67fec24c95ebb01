//! Metrics given by component functions, and their values at a point.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{CurvError, Result};
use crate::jet::Jet;
use crate::linalg;
use crate::tensor::{Components, SymTensor2};

/// A semi-Riemannian metric on a chart.
///
/// `components` receives one jet per chart coordinate and returns the `n x n`
/// component matrix in row-major order. Taking jets rather than reals lets a
/// warped product feed base coordinates into its base and fibre metrics
/// without re-deriving anything.
pub trait MetricSpec: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    /// Expected signs of the eigenvalues, e.g. `[-1, 1, 1, 1]`.
    fn signature(&self) -> &[i8];
    fn components(&self, x: &[Jet]) -> Vec<Jet>;
    fn in_domain(&self, _x: &[f64]) -> bool {
        true
    }
}

type CompFn = dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync;
type DomainFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A [`MetricSpec`] assembled from closures.
#[derive(Clone)]
pub struct FnMetric {
    name: String,
    signature: Vec<i8>,
    comps: Arc<CompFn>,
    domain: Arc<DomainFn>,
}

impl core::fmt::Debug for FnMetric {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FnMetric")
            .field("name", &self.name)
            .field("signature", &self.signature)
            .finish_non_exhaustive()
    }
}

impl FnMetric {
    pub fn new(
        name: impl Into<String>,
        signature: Vec<i8>,
        comps: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            signature,
            comps: Arc::new(comps),
            domain: Arc::new(|_| true),
        }
    }

    pub fn with_domain(mut self, domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.domain = Arc::new(domain);
        self
    }

    /// Diagonal metric from per-coordinate component functions.
    pub fn diagonal(
        name: impl Into<String>,
        signature: Vec<i8>,
        diag: impl Fn(&[Jet]) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Self {
        let n = signature.len();
        Self::new(name, signature, move |x| {
            let d = diag(x);
            let mut out = alloc::vec![Jet::constant(0.0); n * n];
            for i in 0..n {
                out[i * n + i] = d[i];
            }
            out
        })
    }
}

impl MetricSpec for FnMetric {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.signature.len()
    }
    fn signature(&self) -> &[i8] {
        &self.signature
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        (self.comps)(x)
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        (self.domain)(x)
    }
}

impl<M: MetricSpec + ?Sized> MetricSpec for Arc<M> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn signature(&self) -> &[i8] {
        (**self).signature()
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        (**self).components(x)
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        (**self).in_domain(x)
    }
}

/// Metric components, inverse and determinant at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricAtPoint {
    pub g: SymTensor2,
    pub g_inv: SymTensor2,
    pub det: f64,
    pub signature: Vec<i8>,
}

impl MetricAtPoint {
    /// Inverts `g`, checking nondegeneracy, `g g^{-1} = I` and the eigenvalue signs.
    pub fn new(g: SymTensor2, signature: &[i8]) -> Result<Self> {
        let n = g.n();
        if !signature.is_empty() && signature.len() != n {
            return Err(CurvError::DimensionMismatch {
                expected: n,
                got: signature.len(),
            });
        }
        let (inv, det) = linalg::invert(n, g.as_slice()).ok_or(CurvError::SingularMetric(0.0))?;
        let ginv = SymTensor2::from_fn(n, |i, j| 0.5 * (inv[i * n + j] + inv[j * n + i]));
        let prod = linalg::matmul(n, g.as_slice(), ginv.as_slice());
        let scale = g.max_abs() * ginv.max_abs() * n as f64;
        let mut err = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let e = if i == j { 1.0 } else { 0.0 };
                err = err.max((prod[i * n + j] - e).abs());
            }
        }
        if !det.is_finite() || !(err <= 1e-12 * scale.max(1.0)) {
            return Err(CurvError::SingularMetric(det));
        }
        let sig: Vec<i8> = if signature.is_empty() {
            let (ev, _) = linalg::sym_eigen(n, g.as_slice());
            ev.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect()
        } else {
            let (ev, _) = linalg::sym_eigen(n, g.as_slice());
            let neg = ev.iter().filter(|&&v| v < 0.0).count();
            let want = signature.iter().filter(|&&s| s < 0).count();
            if neg != want {
                return Err(CurvError::Precondition(alloc::format!(
                    "metric has {neg} negative eigenvalues, signature expects {want}"
                )));
            }
            signature.to_vec()
        };
        Ok(Self {
            g,
            g_inv: ginv,
            det,
            signature: sig,
        })
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }

    /// Raises the first index: `(g^{-1} A)^i_j`, row-major.
    pub fn raise(&self, a: &SymTensor2) -> Vec<f64> {
        linalg::matmul(self.n(), self.g_inv.as_slice(), a.as_slice())
    }
}
