//! A small arithmetic-expression language for user-defined curves and
//! surfaces, evaluated over plain numbers or over Taylor jets.
//!
//! Grammar, loosest to tightest: `+ -`, `* /`, unary `-`, `^` (right
//! associative, constant exponent). Function calls take one argument and the
//! constants `pi` and `e` are predefined. `-x^2` therefore means `-(x^2)`.

mod jet;

use std::fmt;

use thiserror::Error;

use crate::error::{GeoError, Result};

pub use jet::{Jet2x2, Jet3, JetScalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("exponent at byte {offset} is not a constant")]
    NonConstantExponent { offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
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
}

/// Splits `text` into tokens paired with their starting byte offsets.
pub fn tokenize(text: &str) -> std::result::Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b',' => Token::Comma,
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
                let lit = &text[start..i];
                let value = lit.parse::<f64>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number `{lit}`"),
                })?;
                out.push((start, Token::Num(value)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax { offset: start, message: format!("unexpected character `{ch}`") });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

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

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Atan,
    Abs,
}

impl Func {
    pub const ALL: [Func; 11] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Atan,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Atan => "atan",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Value and first three derivatives at `x`, or the reason `x` is outside
    /// the domain. Kinks are only rejected when derivatives are requested.
    fn derivatives(self, x: f64, differentiate: bool) -> std::result::Result<[f64; 4], &'static str> {
        Ok(match self {
            Func::Sin => {
                let (s, c) = x.sin_cos();
                [s, c, -s, -c]
            }
            Func::Cos => {
                let (s, c) = x.sin_cos();
                [c, -s, -c, s]
            }
            Func::Tan => {
                let c = x.cos();
                if c == 0.0 {
                    return Err("tan at a pole");
                }
                let t = x.tan();
                let sec2 = 1.0 + t * t;
                [t, sec2, 2.0 * t * sec2, (2.0 + 6.0 * t * t) * sec2]
            }
            Func::Exp => {
                let e = x.exp();
                [e, e, e, e]
            }
            Func::Ln => {
                if !(x > 0.0) {
                    return Err("ln of a non-positive number");
                }
                let r = 1.0 / x;
                [x.ln(), r, -r * r, 2.0 * r * r * r]
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err("sqrt of a negative number");
                }
                if x == 0.0 {
                    if differentiate {
                        return Err("sqrt is not differentiable at 0");
                    }
                    return Ok([0.0; 4]);
                }
                let s = x.sqrt();
                [s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)]
            }
            Func::Sinh => {
                let (s, c) = (x.sinh(), x.cosh());
                [s, c, s, c]
            }
            Func::Cosh => {
                let (s, c) = (x.sinh(), x.cosh());
                [c, s, c, s]
            }
            Func::Tanh => {
                let t = x.tanh();
                let d = 1.0 - t * t;
                [t, d, -2.0 * t * d, (6.0 * t * t - 2.0) * d]
            }
            Func::Atan => {
                let q = 1.0 + x * x;
                [x.atan(), 1.0 / q, -2.0 * x / (q * q), (6.0 * x * x - 2.0) / (q * q * q)]
            }
            Func::Abs => {
                if x == 0.0 {
                    if differentiate {
                        return Err("abs is not differentiable at 0");
                    }
                    return Ok([0.0; 4]);
                }
                [x.abs(), x.signum(), 0.0, 0.0]
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::E => "e",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Const(Constant),
    /// Index into the owning expression's variable list.
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn uses_var(&self, idx: usize) -> bool {
        match self {
            Node::Var(i) => *i == idx,
            Node::Num(_) | Node::Const(_) => false,
            Node::Neg(a) | Node::Call(_, a) => a.uses_var(idx),
            Node::Bin(_, a, b) => a.uses_var(idx) || b.uses_var(idx),
        }
    }

    fn is_constant(&self) -> bool {
        match self {
            Node::Var(_) => false,
            Node::Num(_) | Node::Const(_) => true,
            Node::Neg(a) | Node::Call(_, a) => a.is_constant(),
            Node::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }
}

/// A parsed expression together with its declared variable names.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    vars: Vec<String>,
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    vars: &'a [String],
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> std::result::Result<T, ParseError> {
        Err(ParseError::Syntax { offset: self.offset(), message: message.into() })
    }

    fn expr(&mut self) -> std::result::Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> std::result::Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> std::result::Result<Node, ParseError> {
        if let Some(Token::Minus) = self.peek() {
            self.bump();
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<Node, ParseError> {
        let base = self.primary()?;
        if let Some(Token::Caret) = self.peek() {
            self.bump();
            let at = self.offset();
            let exponent = self.unary()?;
            if !exponent.is_constant() {
                return Err(ParseError::NonConstantExponent { offset: at });
            }
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> std::result::Result<Node, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Token::Num(v)) => Ok(Node::Num(v)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        self.syntax("expected `)`")
                    }
                }
            }
            Some(Token::Ident(name)) => {
                if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Node::Var(idx));
                }
                if let Some(func) = Func::from_name(&name) {
                    if self.peek() != Some(&Token::LParen) {
                        return self.syntax(format!("expected `(` after `{name}`"));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    return match self.bump() {
                        Some(Token::RParen) => Ok(Node::Call(func, Box::new(arg))),
                        Some(Token::Comma) => {
                            self.pos -= 1;
                            self.syntax(format!("`{name}` takes one argument"))
                        }
                        _ => {
                            self.pos = self.pos.saturating_sub(1);
                            self.syntax("expected `)`")
                        }
                    };
                }
                match name.as_str() {
                    "pi" => Ok(Node::Const(Constant::Pi)),
                    "e" => Ok(Node::Const(Constant::E)),
                    _ => Err(ParseError::UnknownIdentifier { name, offset }),
                }
            }
            Some(tok) => {
                self.pos -= 1;
                self.syntax(format!("unexpected token {tok:?}"))
            }
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parses `text` with the given variable names.
pub fn parse(text: &str, variables: &[&str]) -> std::result::Result<Expr, ParseError> {
    Expr::parse(text, variables)
}

impl Expr {
    pub fn parse(text: &str, variables: &[&str]) -> std::result::Result<Expr, ParseError> {
        let vars: Vec<String> = variables.iter().map(|s| s.to_string()).collect();
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, vars: &vars, len: text.len() };
        let root = p.expr()?;
        if p.pos < p.tokens.len() {
            return p.syntax("trailing input");
        }
        Ok(Expr { root, vars })
    }

    /// Builds an expression from an already-constructed tree.
    pub fn from_node(root: Node, variables: &[&str]) -> Expr {
        Expr { root, vars: variables.iter().map(|s| s.to_string()).collect() }
    }

    pub fn constant(c: f64, variables: &[&str]) -> Expr {
        Expr::from_node(Node::Num(c), variables)
    }

    /// `k · self`, sharing the variable list.
    pub fn scaled(&self, k: f64) -> Expr {
        Expr { root: Node::Bin(BinOp::Mul, Box::new(Node::Num(k)), Box::new(self.root.clone())), vars: self.vars.clone() }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn uses(&self, var: &str) -> bool {
        self.vars.iter().position(|v| v == var).is_some_and(|i| self.root.uses_var(i))
    }

    /// Evaluates over any jet type, one value per declared variable.
    pub fn eval_with<J: JetScalar>(&self, vars: &[J]) -> Result<J> {
        if vars.len() != self.vars.len() {
            return Err(GeoError::InvalidArgument(format!(
                "expression expects {} variables, got {}",
                self.vars.len(),
                vars.len()
            )));
        }
        self.eval_node(&self.root, vars)
    }

    pub fn eval(&self, vars: &[f64]) -> Result<f64> {
        self.eval_with(vars)
    }

    /// Value and three derivatives with respect to `var`; every other declared
    /// variable must be absent from the expression.
    pub fn eval_jet3(&self, var: &str, at: f64) -> Result<Jet3> {
        let inputs = self.single_var_inputs(var, Jet3::variable(at), Jet3::constant(f64::NAN))?;
        self.eval_with(&inputs)
    }

    /// Value, gradient and Hessian with respect to the first two declared variables.
    pub fn eval_jet2x2(&self, u: f64, v: f64) -> Result<Jet2x2> {
        match self.vars.len() {
            2 => self.eval_with(&[Jet2x2::var_u(u), Jet2x2::var_v(v)]),
            n => Err(GeoError::InvalidArgument(format!("bivariate evaluation needs 2 variables, expression has {n}"))),
        }
    }

    fn single_var_inputs<J: JetScalar>(&self, var: &str, seed: J, unused: J) -> Result<Vec<J>> {
        let mut inputs = vec![unused; self.vars.len()];
        let mut found = false;
        for (i, name) in self.vars.iter().enumerate() {
            if name == var {
                inputs[i] = seed;
                found = true;
            } else if self.root.uses_var(i) {
                return Err(GeoError::InvalidArgument(format!("expression uses `{name}` besides `{var}`")));
            }
        }
        if !found && !self.vars.is_empty() {
            return Err(GeoError::InvalidArgument(format!("`{var}` is not a declared variable")));
        }
        Ok(inputs)
    }

    fn domain_error(&self, node: &Node, reason: &str) -> GeoError {
        GeoError::Domain { expr: self.display_node(node), reason: reason.to_string() }
    }

    fn eval_node<J: JetScalar>(&self, node: &Node, vars: &[J]) -> Result<J> {
        Ok(match node {
            Node::Num(v) => J::constant(*v),
            Node::Const(c) => J::constant(c.value()),
            Node::Var(i) => vars[*i],
            Node::Neg(a) => -self.eval_node(a, vars)?,
            Node::Call(func, a) => {
                let x = self.eval_node(a, vars)?;
                let g = func
                    .derivatives(x.value(), J::DIFFERENTIATES)
                    .map_err(|reason| self.domain_error(node, reason))?;
                x.compose(g)
            }
            Node::Bin(op, a, b) => {
                let lhs = self.eval_node(a, vars)?;
                match op {
                    BinOp::Add => lhs + self.eval_node(b, vars)?,
                    BinOp::Sub => lhs - self.eval_node(b, vars)?,
                    BinOp::Mul => lhs * self.eval_node(b, vars)?,
                    BinOp::Div => {
                        let rhs = self.eval_node(b, vars)?;
                        let d = rhs.value();
                        if d == 0.0 {
                            return Err(self.domain_error(node, "division by zero"));
                        }
                        let r = 1.0 / d;
                        lhs * rhs.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
                    }
                    BinOp::Pow => {
                        let c = self.eval_node::<f64>(b, &[])?;
                        let g = pow_derivatives(lhs.value(), c, J::DIFFERENTIATES)
                            .map_err(|reason| self.domain_error(node, reason))?;
                        lhs.compose(g)
                    }
                }
            }
        })
    }

    fn display_node(&self, node: &Node) -> String {
        let mut s = String::new();
        self.write_node(&mut s, node, 0).expect("writing to a String");
        s
    }

    fn write_node(&self, out: &mut impl fmt::Write, node: &Node, min_prec: u8) -> fmt::Result {
        match node {
            Node::Num(v) => {
                if *v < 0.0 || min_prec > 3 && v.fract() != 0.0 {
                    write!(out, "({v})")
                } else {
                    write!(out, "{v}")
                }
            }
            Node::Const(c) => out.write_str(c.name()),
            Node::Var(i) => out.write_str(&self.vars[*i]),
            Node::Call(f, a) => {
                write!(out, "{}(", f.name())?;
                self.write_node(out, a, 0)?;
                out.write_str(")")
            }
            Node::Neg(a) => {
                // unary minus sits between `*` and `^`
                let paren = min_prec > 3;
                if paren {
                    out.write_str("(")?;
                }
                out.write_str("-")?;
                self.write_node(out, a, 3)?;
                if paren {
                    out.write_str(")")?;
                }
                Ok(())
            }
            Node::Bin(op, a, b) => {
                let prec = op.precedence();
                let paren = prec < min_prec;
                if paren {
                    out.write_str("(")?;
                }
                let (lp, rp) = if *op == BinOp::Pow { (prec + 1, 3) } else { (prec, prec + 1) };
                self.write_node(out, a, lp)?;
                write!(out, " {} ", op.symbol())?;
                self.write_node(out, b, rp)?;
                if paren {
                    out.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

fn pow_derivatives(x: f64, c: f64, differentiate: bool) -> std::result::Result<[f64; 4], &'static str> {
    if !c.is_finite() {
        return Err("non-finite exponent");
    }
    if c.fract() == 0.0 && c.abs() < 1e9 {
        let n = c as i32;
        if x == 0.0 && n < 0 {
            return Err("division by zero");
        }
        let mut g = [0.0; 4];
        let mut falling = 1.0;
        for (k, slot) in g.iter_mut().enumerate() {
            if falling != 0.0 {
                *slot = falling * x.powi(n - k as i32);
            }
            falling *= (n - k as i32) as f64;
        }
        return Ok(g);
    }
    if x < 0.0 {
        return Err("fractional power of a negative number");
    }
    if x == 0.0 {
        if differentiate || c < 0.0 {
            return Err("fractional power is not differentiable at 0");
        }
        return Ok([0.0; 4]);
    }
    let p = x.powf(c);
    Ok([p, c * p / x, c * (c - 1.0) * p / (x * x), c * (c - 1.0) * (c - 2.0) * p / (x * x * x)])
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_node(f, &self.root, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn val(text: &str, vars: &[&str], at: &[f64]) -> f64 {
        Expr::parse(text, vars).unwrap().eval(at).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(val("2+3*4", &[], &[]), 14.0);
        assert_eq!(val("-x^2", &["x"], &[3.0]), -9.0);
        assert!((val("sin(pi/2)", &[], &[]) - 1.0).abs() < 1e-15);
        assert_eq!(val("2^3^2", &[], &[]), 512.0);
        assert_eq!(val("2^-1", &[], &[]), 0.5);
        assert_eq!(val("-2*3", &[], &[]), -6.0);
        assert_eq!(val("8/2/2", &[], &[]), 2.0);
        assert_eq!(val("1-2-3", &[], &[]), -4.0);
        assert_eq!(val("1.5e2 + .5", &[], &[]), 150.5);
        assert!((val("e", &[], &[]) - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_position_and_name() {
        assert_eq!(
            Expr::parse("x + y", &["x"]),
            Err(ParseError::UnknownIdentifier { name: "y".into(), offset: 4 })
        );
        match Expr::parse("2 * (x + 1", &["x"]) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 10),
            other => panic!("{other:?}"),
        }
        match Expr::parse("3 $ 4", &[]) {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Expr::parse("x^x", &["x"]), Err(ParseError::NonConstantExponent { offset: 2 })));
        assert!(Expr::parse("sin x", &["x"]).is_err());
        assert!(Expr::parse("", &[]).is_err());
        assert!(Expr::parse("1 2", &[]).is_err());
    }

    #[test]
    fn jet3_examples() {
        let e = Expr::parse("x^3", &["x"]).unwrap();
        assert_eq!(e.eval_jet3("x", 2.0).unwrap().to_array(), [8.0, 12.0, 12.0, 6.0]);
        let e = Expr::parse("sin(x)", &["x"]).unwrap();
        assert_eq!(e.eval_jet3("x", 0.0).unwrap().to_array(), [0.0, 1.0, 0.0, -1.0]);
        let e = Expr::parse("5", &["x"]).unwrap();
        assert_eq!(e.eval_jet3("x", 1.7).unwrap().to_array(), [5.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn jet2x2_examples() {
        let j = Expr::parse("u*v", &["u", "v"]).unwrap().eval_jet2x2(2.0, 3.0).unwrap();
        assert_eq!((j.f, j.f_u, j.f_v, j.f_uu, j.f_uv, j.f_vv), (6.0, 3.0, 2.0, 0.0, 1.0, 0.0));
        let j = Expr::parse("u^2+v^2", &["u", "v"]).unwrap().eval_jet2x2(1.0, 1.0).unwrap();
        assert_eq!((j.f, j.f_u, j.f_v, j.f_uu, j.f_uv, j.f_vv), (2.0, 2.0, 2.0, 2.0, 0.0, 2.0));
        // d/du e^(u - v^2) = e^(..), d/dv = -2v e^(..), d2/dv2 = (4v^2 - 2) e^(..)
        let j = Expr::parse("exp(u-v^2)", &["u", "v"]).unwrap().eval_jet2x2(0.0, 0.0).unwrap();
        assert_eq!((j.f, j.f_u, j.f_v, j.f_uu, j.f_uv, j.f_vv), (1.0, 1.0, 0.0, 1.0, 0.0, -2.0));
    }

    #[test]
    fn domain_errors() {
        let e = Expr::parse("1 + ln(x - 2)", &["x"]).unwrap();
        match e.eval(&[1.0]) {
            Err(GeoError::Domain { expr, .. }) => assert_eq!(expr, "ln(x - 2)"),
            other => panic!("{other:?}"),
        }
        assert!(Expr::parse("sqrt(x)", &["x"]).unwrap().eval(&[-1.0]).is_err());
        assert!(Expr::parse("1/x", &["x"]).unwrap().eval(&[0.0]).is_err());
        // abs: fine as a value at the kink, rejected as a jet
        let a = Expr::parse("abs(x)", &["x"]).unwrap();
        assert_eq!(a.eval(&[0.0]).unwrap(), 0.0);
        assert!(matches!(a.eval_jet3("x", 0.0), Err(GeoError::Domain { .. })));
        assert_eq!(a.eval_jet3("x", -2.0).unwrap().to_array(), [2.0, -1.0, 0.0, 0.0]);
        assert!(Expr::parse("x^0.5", &["x"]).unwrap().eval(&[-4.0]).is_err());
        assert_eq!(Expr::parse("x^2", &["x"]).unwrap().eval_jet3("x", 0.0).unwrap().to_array(), [0.0, 0.0, 2.0, 0.0]);
    }

    #[test]
    fn jet3_function_table_matches_closed_forms() {
        let x = 0.3_f64;
        let cases: &[(&str, [f64; 4])] = &[
            ("exp(x)", [x.exp(); 4]),
            ("ln(x)", [x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)]),
            ("sqrt(x)", [x.sqrt(), 0.5 * x.powf(-0.5), -0.25 * x.powf(-1.5), 0.375 * x.powf(-2.5)]),
            ("x^(-2)", [x.powi(-2), -2.0 * x.powi(-3), 6.0 * x.powi(-4), -24.0 * x.powi(-5)]),
            ("cosh(x)", [x.cosh(), x.sinh(), x.cosh(), x.sinh()]),
        ];
        for (text, want) in cases {
            let got = Expr::parse(text, &["x"]).unwrap().eval_jet3("x", x).unwrap().to_array();
            for k in 0..4 {
                assert!((got[k] - want[k]).abs() < 1e-12 * (1.0 + want[k].abs()), "{text} d{k}: {} vs {}", got[k], want[k]);
            }
        }
    }

    #[test]
    fn printing() {
        for (src, printed) in [
            ("-x^2", "-x ^ 2"),
            ("(-x)^2", "(-x) ^ 2"),
            ("a-(b-c)", "a - (b - c)"),
            ("(a-b)-c", "a - b - c"),
            ("2^3^2", "2 ^ 3 ^ 2"),
            ("(2^3)^2", "(2 ^ 3) ^ 2"),
            ("sin(a*b)/c", "sin(a * b) / c"),
        ] {
            let e = Expr::parse(src, &["a", "b", "c", "x"]).unwrap();
            assert_eq!(e.to_string(), printed);
        }
    }

    fn arb_node(vars: usize, full: bool) -> impl Strategy<Value = Node> {
        let top = if full { 20u32 } else { 8 };
        let leaf = prop_oneof![
            (0..top).prop_map(|k| Node::Num(k as f64 * 0.25)),
            (0..vars).prop_map(Node::Var),
            Just(Node::Const(Constant::Pi)),
        ];
        leaf.prop_recursive(if full { 4 } else { 3 }, 24, 2, move |inner| {
            let funcs: Vec<Func> = if full { Func::ALL.to_vec() } else { vec![Func::Sin, Func::Cos, Func::Exp] };
            let ops: Vec<BinOp> =
                if full { vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div] } else { vec![BinOp::Add, BinOp::Sub, BinOp::Mul] };
            let max_pow = if full { 4u32 } else { 1 };
            prop_oneof![
                inner.clone().prop_map(|a| Node::Neg(Box::new(a))),
                (proptest::sample::select(ops), inner.clone(), inner.clone())
                    .prop_map(|(op, a, b)| Node::Bin(op, Box::new(a), Box::new(b))),
                (proptest::sample::select(funcs), inner.clone()).prop_map(|(f, a)| Node::Call(f, Box::new(a))),
                (inner, 0..max_pow).prop_map(move |(a, k)| {
                    if max_pow > 1 {
                        Node::Bin(BinOp::Pow, Box::new(a), Box::new(Node::Num(k as f64)))
                    } else {
                        a
                    }
                }),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn print_parse_round_trip(node in arb_node(2, true)) {
            let e = Expr::from_node(node, &["u", "v"]);
            let back = Expr::parse(&e.to_string(), &["u", "v"]).unwrap();
            prop_assert_eq!(back.root(), e.root());
        }

        #[test]
        fn jet3_agrees_with_finite_differences(node in arb_node(1, false), x in -1.5..1.5f64) {
            let e = Expr::from_node(node, &["x"]);
            let j = e.eval_jet3("x", x).unwrap();
            let h = 1e-4;
            let f = |t: f64| e.eval(&[t]).unwrap();
            let fd1 = (f(x + h) - f(x - h)) / (2.0 * h);
            let fd_from_d1 = {
                let d1 = |t: f64| e.eval_jet3("x", t).unwrap().d1;
                (d1(x + h) - d1(x - h)) / (2.0 * h)
            };
            let fd_from_d2 = {
                let d2 = |t: f64| e.eval_jet3("x", t).unwrap().d2;
                (d2(x + h) - d2(x - h)) / (2.0 * h)
            };
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-5 * (1.0 + a.abs().max(b.abs()));
            prop_assert!(close(j.d1, fd1), "d1 {} vs {}", j.d1, fd1);
            prop_assert!(close(j.d2, fd_from_d1), "d2 {} vs {}", j.d2, fd_from_d1);
            prop_assert!(close(j.d3, fd_from_d2), "d3 {} vs {}", j.d3, fd_from_d2);
        }
    }
}
