//! Expression-defined maps `ℝ^m → ℝ^n` with exact second-order jets.
//!
//! Sources are parsed by a small recursive-descent parser over the variables
//! `x1..x9` and the functions `sin cos sinh cosh tanh exp log sqrt atan`.
//! Evaluation propagates value, gradient and Hessian forward through the tree,
//! so immersions built from expressions have exact first and second
//! derivatives.

mod jet;
mod parser;

pub use jet::Jet2;
pub use parser::{parse, BinOp, Expr, Func, Node};

use crate::error::{Error, Result};

fn domain(what: &str, offset: usize) -> Error {
    Error::Domain {
        what: what.to_string(),
        offset,
    }
}

impl Expr {
    /// Plain value at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = match &self.node {
            Node::Num(v) => *v,
            Node::Var(i) => *x
                .get(*i)
                .ok_or_else(|| Error::Dimension(format!("variable x{} not supplied", i + 1)))?,
            Node::Neg(a) => -a.eval(x)?,
            Node::Bin(op, a, b) => {
                let (u, w) = (a.eval(x)?, b.eval(x)?);
                match op {
                    BinOp::Add => u + w,
                    BinOp::Sub => u - w,
                    BinOp::Mul => u * w,
                    BinOp::Div => {
                        if w == 0.0 {
                            return Err(domain("division by zero", self.offset));
                        }
                        u / w
                    }
                    BinOp::Pow => pow_value(u, w, b, self.offset)?,
                }
            }
            Node::Call(f, a) => {
                let u = a.eval(x)?;
                match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Sinh => u.sinh(),
                    Func::Cosh => u.cosh(),
                    Func::Tanh => u.tanh(),
                    Func::Exp => u.exp(),
                    Func::Atan => u.atan(),
                    Func::Log => {
                        if u <= 0.0 {
                            return Err(domain("log of a non-positive number", self.offset));
                        }
                        u.ln()
                    }
                    Func::Sqrt => {
                        if u < 0.0 {
                            return Err(domain("sqrt of a negative number", self.offset));
                        }
                        u.sqrt()
                    }
                }
            }
        };
        if !v.is_finite() {
            return Err(domain("non-finite value", self.offset));
        }
        Ok(v)
    }

    /// Value, gradient and Hessian at `x`, with `x.len()` variables.
    pub fn eval_jet2(&self, x: &[f64]) -> Result<Jet2> {
        let n = x.len();
        let j = match &self.node {
            Node::Num(v) => Jet2::constant(n, *v),
            Node::Var(i) => {
                let v = *x
                    .get(*i)
                    .ok_or_else(|| Error::Dimension(format!("variable x{} not supplied", i + 1)))?;
                Jet2::variable(n, *i, v)
            }
            Node::Neg(a) => -&a.eval_jet2(x)?,
            Node::Bin(op, a, b) => {
                let u = a.eval_jet2(x)?;
                match op {
                    BinOp::Add => &u + &b.eval_jet2(x)?,
                    BinOp::Sub => &u - &b.eval_jet2(x)?,
                    BinOp::Mul => &u * &b.eval_jet2(x)?,
                    BinOp::Div => {
                        let w = b.eval_jet2(x)?;
                        if w.value == 0.0 {
                            return Err(domain("division by zero", self.offset));
                        }
                        &u * &w.recip()
                    }
                    BinOp::Pow => {
                        if !b.uses_variables() {
                            let p = b.eval(x)?;
                            if p.fract() == 0.0 && p.abs() < 1e9 {
                                if p < 0.0 && u.value == 0.0 {
                                    return Err(domain("negative power of zero", self.offset));
                                }
                                u.powi(p as i32)
                            } else {
                                if u.value <= 0.0 {
                                    return Err(domain(
                                        "fractional power of a non-positive base",
                                        self.offset,
                                    ));
                                }
                                u.powf(p)
                            }
                        } else {
                            if u.value <= 0.0 {
                                return Err(domain(
                                    "variable exponent on a non-positive base",
                                    self.offset,
                                ));
                            }
                            let w = b.eval_jet2(x)?;
                            (&w * &u.ln()).exp()
                        }
                    }
                }
            }
            Node::Call(f, a) => {
                let u = a.eval_jet2(x)?;
                match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Sinh => u.sinh(),
                    Func::Cosh => u.cosh(),
                    Func::Tanh => u.tanh(),
                    Func::Exp => u.exp(),
                    Func::Atan => u.atan(),
                    Func::Log => {
                        if u.value <= 0.0 {
                            return Err(domain("log of a non-positive number", self.offset));
                        }
                        u.ln()
                    }
                    Func::Sqrt => {
                        if u.value <= 0.0 {
                            return Err(domain("sqrt jet at a non-positive number", self.offset));
                        }
                        u.sqrt()
                    }
                }
            }
        };
        if !j.is_finite() {
            return Err(domain("non-finite jet", self.offset));
        }
        Ok(j)
    }
}

fn pow_value(u: f64, w: f64, exponent: &Expr, offset: usize) -> Result<f64> {
    if w.fract() == 0.0 && !exponent.uses_variables() && w.abs() < 1e9 {
        if w < 0.0 && u == 0.0 {
            return Err(domain("negative power of zero", offset));
        }
        return Ok(u.powi(w as i32));
    }
    if u < 0.0 || (u == 0.0 && w <= 0.0) {
        return Err(domain("fractional power of a non-positive base", offset));
    }
    Ok(u.powf(w))
}

/// A map `ℝ^m → ℝ^n` given by one expression per output component.
#[derive(Debug, Clone)]
pub struct ExprMap {
    nvars: usize,
    sources: Vec<String>,
    exprs: Vec<Expr>,
}

impl ExprMap {
    pub fn parse<S: AsRef<str>>(sources: &[S], nvars: usize) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::Invalid("an expression map needs at least one component".into()));
        }
        let exprs = sources
            .iter()
            .map(|s| parse(s.as_ref(), nvars))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            nvars,
            sources: sources.iter().map(|s| s.as_ref().to_string()).collect(),
            exprs,
        })
    }

    pub fn from_exprs(exprs: Vec<Expr>, nvars: usize) -> Self {
        let sources = exprs.iter().map(|e| e.to_string()).collect();
        Self {
            nvars,
            sources,
            exprs,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nout(&self) -> usize {
        self.exprs.len()
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.exprs
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.nvars {
            return Err(Error::Dimension(format!(
                "expression map takes {} inputs, got {}",
                self.nvars,
                x.len()
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        self.exprs.iter().map(|e| e.eval(x)).collect()
    }

    pub fn eval_jet2(&self, x: &[f64]) -> Result<Vec<Jet2>> {
        self.check(x)?;
        self.exprs.iter().map(|e| e.eval_jet2(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(src: &str, x: &[f64]) {
        let e = parse(src, x.len()).unwrap();
        let j = e.eval_jet2(x).unwrap();
        let h = 1e-5;
        let n = x.len();
        for i in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let g = (e.eval(&xp).unwrap() - e.eval(&xm).unwrap()) / (2.0 * h);
            assert!((g - j.grad[i]).abs() <= 1e-6 * (1.0 + g.abs()), "{src} grad {i}");
            let jp = e.eval_jet2(&xp).unwrap();
            let jm = e.eval_jet2(&xm).unwrap();
            for k in 0..n {
                let hk = (jp.grad[k] - jm.grad[k]) / (2.0 * h);
                assert!(
                    (hk - j.h(i, k)).abs() <= 1e-5 * (1.0 + hk.abs()),
                    "{src} hess {i}{k}"
                );
            }
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        fd_check("sin(x1*x2) + exp(-x1^2)*cosh(x2)", &[0.3, -0.7]);
        fd_check("log(1 + x1^2 + x2^2) / sqrt(2 + x1)", &[0.4, 1.2]);
        fd_check("atan(x2/x1) * tanh(x1 - x2)", &[1.3, 0.2]);
        fd_check("x1^x2 + x2^2.5", &[1.7, 0.9]);
    }

    #[test]
    fn domain_errors_carry_offsets() {
        let e = parse("1 + log(x1)", 1).unwrap();
        assert!(matches!(e.eval(&[-1.0]), Err(Error::Domain { offset: 4, .. })));
        let e = parse("x1 / (x1 - 1)", 1).unwrap();
        assert!(matches!(e.eval(&[1.0]), Err(Error::Domain { offset: 0, .. })));
        let e = parse("sqrt(x1)", 1).unwrap();
        assert!(e.eval_jet2(&[0.0]).is_err());
        assert_eq!(e.eval(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn integer_powers_of_negative_bases() {
        let e = parse("x1^3", 1).unwrap();
        let j = e.eval_jet2(&[-2.0]).unwrap();
        assert_eq!(j.value, -8.0);
        assert_eq!(j.grad[0], 12.0);
        assert_eq!(j.hess[0], -12.0);
        assert!(parse("x1^0.5", 1).unwrap().eval(&[-1.0]).is_err());
    }

    #[test]
    fn map_dimensions_are_checked() {
        let m = ExprMap::parse(&["x1", "x2", "x1*x2"], 2).unwrap();
        assert_eq!(m.nout(), 3);
        assert_eq!(m.eval(&[2.0, 3.0]).unwrap(), vec![2.0, 3.0, 6.0]);
        assert!(m.eval(&[1.0]).is_err());
    }
}
