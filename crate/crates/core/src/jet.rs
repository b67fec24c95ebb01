//! Second-order forward-mode Taylor arithmetic.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to up to [`MAX_DIM`] chart coordinates. Arithmetic and the
//! elementary functions propagate both orders by the chain rule, so metric
//! components written as ordinary expressions deliver the exact first and
//! second partial derivatives needed for the Riemann tensor.

use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Largest chart dimension supported by the fixed-size jet storage.
pub const MAX_DIM: usize = 8;

/// Value, gradient and (symmetric) Hessian of a scalar function.
///
/// Entries at indices `>= nvars` are always zero, which lets constants
/// (`nvars == 0`) mix freely with seeded variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
    pub hess: [[f64; MAX_DIM]; MAX_DIM],
    nvars: usize,
}

impl Default for Jet {
    fn default() -> Self {
        Self::constant(0.0)
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; MAX_DIM],
            hess: [[0.0; MAX_DIM]; MAX_DIM],
            nvars: 0,
        }
    }

    /// The coordinate function `x^index` at `value`, in a chart of `nvars` coordinates.
    pub fn variable(value: f64, index: usize, nvars: usize) -> Self {
        assert!(index < nvars && nvars <= MAX_DIM, "jet variable index out of range");
        let mut j = Self::constant(value);
        j.nvars = nvars;
        j.grad[index] = 1.0;
        j
    }

    /// Seeds one variable per coordinate of `point`.
    pub fn seed(point: &[f64]) -> alloc::vec::Vec<Jet> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet::variable(x, i, n))
            .collect()
    }

    /// Number of coordinates the derivative parts refer to (0 for constants).
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    #[inline]
    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    #[inline]
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        self.hess[i][j]
    }

    /// Applies a scalar function given its value and first two derivatives at `self.value`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.nvars;
        let mut out = Self::constant(f0);
        out.nvars = n;
        for i in 0..n {
            out.grad[i] = f1 * self.grad[i];
        }
        for i in 0..n {
            for j in i..n {
                let h = f1 * self.hess[i][j] + f2 * self.grad[i] * self.grad[j];
                out.hess[i][j] = h;
                out.hess[j][i] = h;
            }
        }
        out
    }

    pub fn exp(self) -> Self {
        let e = libm::exp(self.value);
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let v = self.value;
        self.chain(libm::log(v), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sin(self) -> Self {
        let (s, c) = (libm::sin(self.value), libm::cos(self.value));
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = (libm::sin(self.value), libm::cos(self.value));
        self.chain(c, -s, -c)
    }

    pub fn sqrt(self) -> Self {
        let r = libm::sqrt(self.value);
        self.chain(r, 0.5 / r, -0.25 / (r * self.value))
    }

    pub fn recip(self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn powi(self, k: i32) -> Self {
        let v = self.value;
        let kf = k as f64;
        let f0 = libm::pow(v, kf);
        let f1 = if k == 0 { 0.0 } else { kf * libm::pow(v, kf - 1.0) };
        let f2 = if k == 0 || k == 1 {
            0.0
        } else {
            kf * (kf - 1.0) * libm::pow(v, kf - 2.0)
        };
        self.chain(f0, f1, f2)
    }

    /// Real power `self^p`; the base must be positive unless `p` is integral.
    pub fn powf(self, p: f64) -> Self {
        if p == libm::trunc(p) && libm::fabs(p) < i32::MAX as f64 {
            return self.powi(p as i32);
        }
        let v = self.value;
        self.chain(
            libm::pow(v, p),
            p * libm::pow(v, p - 1.0),
            p * (p - 1.0) * libm::pow(v, p - 2.0),
        )
    }

    /// General power `self^other` for jet exponents (base must be positive).
    pub fn pow(self, other: Jet) -> Self {
        if other.nvars == 0 {
            return self.powf(other.value);
        }
        (self.ln() * other).exp()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self += rhs;
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        let n = self.nvars.max(rhs.nvars);
        self.value += rhs.value;
        for i in 0..n {
            self.grad[i] += rhs.grad[i];
            for j in 0..n {
                self.hess[i][j] += rhs.hess[i][j];
            }
        }
        self.nvars = n;
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self -= rhs;
        self
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        let n = self.nvars.max(rhs.nvars);
        self.value -= rhs.value;
        for i in 0..n {
            self.grad[i] -= rhs.grad[i];
            for j in 0..n {
                self.hess[i][j] -= rhs.hess[i][j];
            }
        }
        self.nvars = n;
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.value = -self.value;
        for i in 0..self.nvars {
            self.grad[i] = -self.grad[i];
            for j in 0..self.nvars {
                self.hess[i][j] = -self.hess[i][j];
            }
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let n = self.nvars.max(rhs.nvars);
        let mut out = Jet::constant(self.value * rhs.value);
        out.nvars = n;
        for i in 0..n {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        for i in 0..n {
            for j in i..n {
                let h = self.hess[i][j] * rhs.value
                    + self.value * rhs.hess[i][j]
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
                out.hess[i][j] = h;
                out.hess[j][i] = h;
            }
        }
        out
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        self.value *= rhs;
        for i in 0..self.nvars {
            self.grad[i] *= rhs;
            for j in 0..self.nvars {
                self.hess[i][j] *= rhs;
            }
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        rhs.recip() * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(&[Jet]) -> Jet, f64f: impl Fn(&[f64]) -> f64, x: &[f64]) {
        let jets = Jet::seed(x);
        let j = f(&jets);
        let h = 1e-4;
        let n = x.len();
        for i in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            let d = (f64f(&xp) - f64f(&xm)) / 2e-6;
            assert!((d - j.d(i)).abs() < 1e-7, "grad {i}: {d} vs {}", j.d(i));
            for k in 0..n {
                let mut pp = x.to_vec();
                let mut pm = x.to_vec();
                let mut mp = x.to_vec();
                let mut mm = x.to_vec();
                pp[i] += h;
                pp[k] += h;
                pm[i] += h;
                pm[k] -= h;
                mp[i] -= h;
                mp[k] += h;
                mm[i] -= h;
                mm[k] -= h;
                let dd = (f64f(&pp) - f64f(&pm) - f64f(&mp) + f64f(&mm)) / (4.0 * h * h);
                assert!((dd - j.dd(i, k)).abs() < 1e-5, "hess {i}{k}: {dd} vs {}", j.dd(i, k));
            }
        }
    }

    #[test]
    fn elementary_functions_match_finite_differences() {
        fd_check(
            |x| (x[0] * x[1]).sin() + x[1].exp() / (x[0] * x[0] + 1.0),
            |x| libm::sin(x[0] * x[1]) + libm::exp(x[1]) / (x[0] * x[0] + 1.0),
            &[0.7, -0.3],
        );
        fd_check(
            |x| x[0].powf(2.5) * x[2].cos() - x[1].ln() + x[2].sqrt(),
            |x| libm::pow(x[0], 2.5) * libm::cos(x[2]) - libm::log(x[1]) + libm::sqrt(x[2]),
            &[1.3, 0.8, 0.4],
        );
        fd_check(
            |x| x[0].powi(-3) - 2.0 * x[0].powi(4) * x[1],
            |x| libm::pow(x[0], -3.0) - 2.0 * libm::pow(x[0], 4.0) * x[1],
            &[1.1, 0.5],
        );
    }

    #[test]
    fn hessian_is_exactly_symmetric() {
        let x = Jet::seed(&[0.3, 1.2, -0.7]);
        let f = (x[0] * x[1] * x[2]).exp() * (x[0] - x[2]).sin() / (x[1] * x[1] + 2.0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f.hess[i][j], f.hess[j][i]);
            }
        }
    }

    #[test]
    fn constants_mix_with_variables() {
        let x = Jet::variable(2.0, 1, 3);
        let f = 3.0 - x * x + Jet::constant(1.0);
        assert_eq!(f.value, 0.0);
        assert_eq!(f.d(1), -4.0);
        assert_eq!(f.dd(1, 1), -2.0);
        assert_eq!(f.nvars(), 3);
    }
}
