//! Tokenizer and recursive-descent parser for scalar expressions.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?          right associative
//! atom  := number | var | func '(' expr ')' | '(' expr ')'
//! ```

use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Atan,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone)]
pub enum Node {
    Num(f64),
    /// Zero-based variable index (`x1` is `Var(0)`).
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Expression tree node with the byte offset of its first token.
#[derive(Debug, Clone)]
pub struct Expr {
    pub node: Node,
    pub offset: usize,
}

/// Structural equality; source offsets are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (&self.node, &other.node) {
            (Node::Num(a), Node::Num(b)) => a.to_bits() == b.to_bits(),
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Neg(a), Node::Neg(b)) => a == b,
            (Node::Bin(o, a, b), Node::Bin(p, c, d)) => o == p && a == c && b == d,
            (Node::Call(f, a), Node::Call(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Expr {
    pub fn uses_variables(&self) -> bool {
        match &self.node {
            Node::Num(_) => false,
            Node::Var(_) => true,
            Node::Neg(a) | Node::Call(_, a) => a.uses_variables(),
            Node::Bin(_, a, b) => a.uses_variables() || b.uses_variables(),
        }
    }

    /// Largest variable index used plus one.
    pub fn arity(&self) -> usize {
        match &self.node {
            Node::Num(_) => 0,
            Node::Var(i) => i + 1,
            Node::Neg(a) | Node::Call(_, a) => a.arity(),
            Node::Bin(_, a, b) => a.arity().max(b.arity()),
        }
    }

    /// Replaces variable `x_{i+1}` with `subs[i]`.
    pub fn substitute(&self, subs: &[Expr]) -> Expr {
        let node = match &self.node {
            Node::Num(v) => Node::Num(*v),
            Node::Var(i) => return subs[*i].clone(),
            Node::Neg(a) => Node::Neg(Box::new(a.substitute(subs))),
            Node::Bin(op, a, b) => {
                Node::Bin(*op, Box::new(a.substitute(subs)), Box::new(b.substitute(subs)))
            }
            Node::Call(f, a) => Node::Call(*f, Box::new(a.substitute(subs))),
        };
        Expr {
            node,
            offset: self.offset,
        }
    }
}

/// Fully parenthesized rendering that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::Num(v) => write!(f, "{v:?}"),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| Error::Parse {
                    offset: start,
                    expected: vec!["number".into()],
                    found: format!("`{text}`"),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(Error::Parse {
                    offset: start,
                    expected: vec!["number".into(), "identifier".into(), "operator".into()],
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    nvars: usize,
}

const OPERAND: [&str; 5] = ["number", "variable", "function", "`(`", "`-`"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::Parse {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let offset = lhs.offset;
            lhs = Expr {
                node: Node::Bin(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            let offset = lhs.offset;
            lhs = Expr {
                node: Node::Bin(op, Box::new(lhs), Box::new(rhs)),
                offset,
            };
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            let (_, offset) = self.bump();
            let inner = self.unary()?;
            return Ok(Expr {
                node: Node::Neg(Box::new(inner)),
                offset,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            let (_, offset) = self.bump();
            let exponent = self.unary()?;
            return Ok(Expr {
                node: Node::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)),
                offset,
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr {
                    node: Node::Num(v),
                    offset,
                })
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.fail(&["`)`", "operator"]);
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return self.fail(&["`(`"]);
                    }
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    if *self.peek() != Tok::RParen {
                        return self.fail(&["`)`", "`,`", "operator"]);
                    }
                    self.bump();
                    if args.len() != 1 {
                        return Err(Error::Arity {
                            name,
                            offset,
                            expected: 1,
                            got: args.len(),
                        });
                    }
                    let arg = args.pop().expect("one argument");
                    return Ok(Expr {
                        node: Node::Call(func, Box::new(arg)),
                        offset,
                    });
                }
                match parse_variable(&name) {
                    Some(i) if i < self.nvars => Ok(Expr {
                        node: Node::Var(i),
                        offset,
                    }),
                    _ => Err(Error::UnknownIdentifier { name, offset }),
                }
            }
            _ => self.fail(&OPERAND),
        }
    }
}

fn parse_variable(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('x')?;
    if rest.len() != 1 {
        return None;
    }
    let d = rest.as_bytes()[0];
    if (b'1'..=b'9').contains(&d) {
        Some((d - b'1') as usize)
    } else {
        None
    }
}

/// Parses `src` as an expression in the variables `x1..x{nvars}` (`nvars <= 9`).
pub fn parse(src: &str, nvars: usize) -> Result<Expr> {
    if nvars > 9 {
        return Err(Error::Invalid(format!(
            "at most 9 variables are supported, got {nvars}"
        )));
    }
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        nvars,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_offset(src: &str) -> usize {
        match parse(src, 3) {
            Err(Error::Parse { offset, .. }) => offset,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn misplaced_operator_reports_its_offset() {
        assert_eq!(err_offset("x1 + * x2"), 5);
        match parse("x1 + * x2", 2) {
            Err(Error::Parse { expected, .. }) => assert!(expected.contains(&"variable".to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unclosed_paren_and_trailing_tokens() {
        assert_eq!(err_offset("(x1 + x2"), 8);
        assert_eq!(err_offset("x1 x2"), 3);
        assert_eq!(err_offset(""), 0);
    }

    #[test]
    fn unknown_names_and_arity() {
        assert!(matches!(
            parse("foo(x1)", 1),
            Err(Error::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(
            parse("x1 + x3", 2),
            Err(Error::UnknownIdentifier { offset: 5, .. })
        ));
        assert!(matches!(
            parse("sin(x1, x2)", 2),
            Err(Error::Arity { got: 2, .. })
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        let a = parse("-x1^2", 1).unwrap();
        let b = parse("-(x1^2)", 1).unwrap();
        assert_eq!(a, b);
        let c = parse("x1^x2^x3", 3).unwrap();
        let d = parse("x1^(x2^x3)", 3).unwrap();
        assert_eq!(c, d);
        let e = parse("x1 - x2 - x3", 3).unwrap();
        let f = parse("(x1 - x2) - x3", 3).unwrap();
        assert_eq!(e, f);
        let g = parse("x1 * x2 + x3 / 2", 3).unwrap();
        let h = parse("(x1 * x2) + (x3 / 2)", 3).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn printing_round_trips() {
        for src in ["sin(x1)*cosh(x2) - 3.5e-2/x1^-2", "-(-x1)", "sqrt(1 - x1^2 - x2^2)"] {
            let e = parse(src, 2).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed, 2).unwrap(), e, "{printed}");
        }
    }
}
