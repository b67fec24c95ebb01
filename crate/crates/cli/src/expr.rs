//! Expressions over chart coordinates, evaluated in jet arithmetic.
//!
//! Grammar: `+ - * / ^`, parentheses, numbers, `pi`, the functions `exp`,
//! `sin`, `cos`, coordinate names, real parameters, and named one- or
//! two-argument parameter families (catalog profile syntax).

use std::collections::BTreeMap;

use curvlab_core::catalog::{Profile, Profile2};
use curvlab_core::Jet;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    One(Profile),
    Two(Profile2),
}

/// Names an expression may refer to, besides coordinates.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub coords: Vec<String>,
    pub reals: BTreeMap<String, f64>,
    pub families: BTreeMap<String, Family>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Family(Family),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Coord(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>, CliError> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                let mut j = i + 1;
                if j < cs.len() && (cs[j] == '+' || cs[j] == '-') {
                    j += 1;
                }
                if j < cs.len() && cs[j].is_ascii_digit() {
                    i = j;
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = cs[start..i].iter().collect();
            let v = s
                .parse()
                .map_err(|_| CliError::parse(format!("bad number `{s}` in `{src}`")))?;
            out.push(Tok::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
        } else if "+-*/^(),×÷−".contains(c) {
            let op = match c {
                '×' => '*',
                '÷' => '/',
                '−' => '-',
                c => c,
            };
            out.push(Tok::Op(op));
            i += 1;
        } else {
            return Err(CliError::parse(format!("unexpected `{c}` in `{src}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    scope: &'a Scope,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> CliError {
        CliError::parse(format!("{what} in `{}`", self.src))
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, op: char) -> Result<(), CliError> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{op}`")))
        }
    }

    fn sum(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            lhs = if op == '+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, CliError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    // right-associative, binds tighter than unary minus on its left
    fn power(&mut self) -> Result<Expr, CliError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, CliError> {
        let tok = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Op('(')) => {
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => self.ident(name),
            _ => Err(self.err("expected a value")),
        }
    }

    fn ident(&mut self, name: String) -> Result<Expr, CliError> {
        let func = match name.as_str() {
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => self.scope.families.get(&name).cloned().map(Func::Family),
        };
        if let Some(func) = func {
            self.expect('(')?;
            let mut args = vec![self.sum()?];
            while self.peek_op() == Some(',') {
                self.pos += 1;
                args.push(self.sum()?);
            }
            self.expect(')')?;
            let want = match &func {
                Func::Family(Family::Two(_)) => 2,
                _ => 1,
            };
            if args.len() != want {
                return Err(self.err(&format!("`{name}` takes {want} argument(s)")));
            }
            return Ok(Expr::Call(func, args));
        }
        if let Some(i) = self.scope.coords.iter().position(|c| *c == name) {
            return Ok(Expr::Coord(i));
        }
        if let Some(v) = self.scope.reals.get(&name) {
            return Ok(Expr::Num(*v));
        }
        if name == "pi" {
            return Ok(Expr::Num(std::f64::consts::PI));
        }
        Err(self.err(&format!("unknown name `{name}`")))
    }
}

impl Expr {
    pub fn parse(src: &str, scope: &Scope) -> Result<Expr, CliError> {
        let mut p = Parser { toks: lex(src)?, pos: 0, scope, src };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &[Jet]) -> Jet {
        match self {
            Expr::Num(v) => Jet::constant(*v),
            Expr::Coord(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => a.eval(x).pow(b.eval(x)),
            Expr::Call(f, args) => {
                let a = args[0].eval(x);
                match f {
                    Func::Exp => a.exp(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Family(Family::One(p)) => p.eval(a),
                    Func::Family(Family::Two(p)) => p.eval(a, args[1].eval(x)),
                }
            }
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let jets: Vec<Jet> = x.iter().map(|v| Jet::constant(*v)).collect();
        self.eval(&jets).value
    }
}

/// `lhs op rhs` with `op` one of `<`, `<=`, `>`, `>=`.
#[derive(Clone, Debug)]
pub struct Inequality {
    lhs: Expr,
    rhs: Expr,
    op: &'static str,
}

impl Inequality {
    pub fn parse(src: &str, scope: &Scope) -> Result<Self, CliError> {
        for op in ["<=", ">=", "<", ">"] {
            if let Some((l, r)) = src.split_once(op) {
                return Ok(Self {
                    lhs: Expr::parse(l, scope)?,
                    rhs: Expr::parse(r, scope)?,
                    op,
                });
            }
        }
        Err(CliError::parse(format!("domain condition `{src}` has no comparison")))
    }

    pub fn holds(&self, x: &[f64]) -> bool {
        let (l, r) = (self.lhs.value(x), self.rhs.value(x));
        match self.op {
            "<" => l < r,
            "<=" => l <= r,
            ">" => l > r,
            _ => l >= r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scope() -> Scope {
        let mut s = Scope {
            coords: vec!["t".into(), "r".into()],
            ..Default::default()
        };
        s.reals.insert("m".into(), 0.5);
        s.families.insert("F".into(), Family::One(Profile::parse("poly:2,0,1").unwrap()));
        s.families.insert("b".into(), Family::Two(Profile2::parse("poly:0,1*poly:0,0,1").unwrap()));
        s
    }

    #[test]
    fn precedence_and_derivatives() {
        let s = scope();
        let e = Expr::parse("-r^2 + 2*m/r - 3^2^0.5", &s).unwrap();
        let x = Jet::seed(&[0.3, 2.0]);
        let j = e.eval(&x);
        let want = -4.0 + 0.5 - 3f64.powf(2f64.powf(0.5));
        assert!((j.value - want).abs() < 1e-14);
        assert!((j.d(1) - (-4.0 - 0.25)).abs() < 1e-14);
        assert!((j.dd(1, 1) - (-2.0 + 0.25)).abs() < 1e-14);
    }

    #[test]
    fn families_and_functions() {
        let s = scope();
        let e = Expr::parse("F(t) * exp(b(t, r)) + sin(pi/2) × cos(0) − 1", &s).unwrap();
        let (t, r) = (0.3, 2.0);
        let want = (2.0 + t * t) * (t * r * r as f64).exp();
        assert!((e.value(&[t, r]) - want).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let s = scope();
        for bad in ["r +", "q*r", "F(t, r)", "b(t)", "(r", "r $ 2", "1.2.3"] {
            assert!(Expr::parse(bad, &s).is_err(), "{bad}");
        }
        assert!(Inequality::parse("r 2", &s).is_err());
    }

    #[test]
    fn inequalities() {
        let s = scope();
        let d = Inequality::parse("r > 2*m", &s).unwrap();
        assert!(d.holds(&[0.0, 1.5]) && !d.holds(&[0.0, 1.0]));
        let d = Inequality::parse("sin(t) <= 0.5", &s).unwrap();
        assert!(d.holds(&[0.1, 0.0]) && !d.holds(&[1.5, 0.0]));
    }
}
