//! Parametric function families used as metric parameters.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{CurvError, Result};
use crate::jet::Jet;

/// A scalar function of one variable, jet-evaluable.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Const(f64),
    /// `c₀ + c₁x + c₂x² + …`
    Poly(Vec<f64>),
    /// `a·exp(b x) + c`
    Exp { a: f64, b: f64, c: f64 },
    /// `a·sin(b x + c) + d`
    Sin { a: f64, b: f64, c: f64, d: f64 },
    Sum(Vec<Profile>),
}

impl Profile {
    pub fn eval(&self, x: Jet) -> Jet {
        match self {
            Profile::Const(c) => Jet::constant(*c),
            Profile::Poly(cs) => {
                let mut acc = Jet::constant(0.0);
                for c in cs.iter().rev() {
                    acc = acc * x + *c;
                }
                acc
            }
            Profile::Exp { a, b, c } => (x * *b).exp() * *a + *c,
            Profile::Sin { a, b, c, d } => (x * *b + *c).sin() * *a + *d,
            Profile::Sum(ps) => ps
                .iter()
                .fold(Jet::constant(0.0), |acc, p| acc + p.eval(x)),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(Jet::constant(x)).value
    }

    /// Value, first and second derivative at `x`.
    pub fn derivs(&self, x: f64) -> (f64, f64, f64) {
        let j = self.eval(Jet::variable(x, 0, 1));
        (j.value, j.d(0), j.dd(0, 0))
    }

    /// Parses `const:c`, `poly:c0,c1,..`, `exp:a,b,c`, `sin:a,b,c,d`, or
    /// several of these joined by `|` (summed). A bare number is a constant.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('|') {
            let parts = s.split('|').map(Profile::parse).collect::<Result<Vec<_>>>()?;
            return Ok(Profile::Sum(parts));
        }
        if let Ok(v) = s.parse::<f64>() {
            return Ok(Profile::Const(v));
        }
        let (kind, args) = s.split_once(':').ok_or_else(|| bad(s, "expected `family:coefficients`"))?;
        let nums = args
            .split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|_| bad(s, "coefficient is not a number")))
            .collect::<Result<Vec<f64>>>()?;
        let want = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(bad(s, &format!("`{kind}` takes {k} coefficients, got {}", nums.len())))
            }
        };
        match kind.trim() {
            "const" => {
                want(1)?;
                Ok(Profile::Const(nums[0]))
            }
            "poly" => Ok(Profile::Poly(nums)),
            "exp" => {
                want(3)?;
                Ok(Profile::Exp { a: nums[0], b: nums[1], c: nums[2] })
            }
            "sin" => {
                want(4)?;
                Ok(Profile::Sin { a: nums[0], b: nums[1], c: nums[2], d: nums[3] })
            }
            other => Err(bad(s, &format!("unknown family `{other}`"))),
        }
    }
}

impl core::fmt::Display for Profile {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let list = |v: &[f64]| v.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(",");
        match self {
            Profile::Const(c) => write!(f, "const:{c}"),
            Profile::Poly(cs) => write!(f, "poly:{}", list(cs)),
            Profile::Exp { a, b, c } => write!(f, "exp:{}", list(&[*a, *b, *c])),
            Profile::Sin { a, b, c, d } => write!(f, "sin:{}", list(&[*a, *b, *c, *d])),
            Profile::Sum(ps) => {
                let s: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                f.write_str(&s.join("|"))
            }
        }
    }
}

/// `Σ aᵢ(u) bᵢ(r)`, a function of two variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile2(pub Vec<(Profile, Profile)>);

impl Profile2 {
    pub fn eval(&self, u: Jet, r: Jet) -> Jet {
        self.0
            .iter()
            .fold(Jet::constant(0.0), |acc, (a, b)| acc + a.eval(u) * b.eval(r))
    }

    /// Parses `a*b` terms joined by `;`; a term without `*` depends on `r` only.
    pub fn parse(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for t in s.split(';') {
            let t = t.trim();
            match t.split_once('*') {
                Some((a, b)) => terms.push((Profile::parse(a)?, Profile::parse(b)?)),
                None => terms.push((Profile::Const(1.0), Profile::parse(t)?)),
            }
        }
        Ok(Profile2(terms))
    }
}

impl core::fmt::Display for Profile2 {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s: Vec<String> = self.0.iter().map(|(a, b)| format!("{a}*{b}")).collect();
        f.write_str(&s.join(";"))
    }
}

fn bad(s: &str, reason: &str) -> CurvError {
    CurvError::InvalidParam {
        name: s.to_string(),
        reason: reason.to_string(),
    }
}
