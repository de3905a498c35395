//! Exact coordinate expressions such as `cos(2pi/5)` or `1/2*sqrt(3)`.
//!
//! Expressions are kept symbolic so a polygon can be re-evaluated at any
//! precision when a predicate needs more digits.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::PolygonError;
use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(String),
    Pi,
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Sin,
    Cos,
    Sqrt,
}

/// A parsed expression together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    src: String,
    root: Node,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, PolygonError> {
        let err = |reason: &str| PolygonError::Expr {
            expr: src.to_string(),
            reason: reason.to_string(),
        };
        let toks = tokenize(src).map_err(|r| err(&r))?;
        let mut p = Parser { toks: &toks, pos: 0 };
        let root = p.expr().map_err(|r| err(&r))?;
        if p.pos != toks.len() {
            return Err(err("trailing input"));
        }
        let e = Expr {
            src: src.trim().to_string(),
            root,
        };
        if !e.eval::<f64>().is_finite() {
            return Err(err("does not evaluate to a finite number"));
        }
        Ok(e)
    }

    pub fn from_int(n: i64) -> Self {
        Expr {
            src: n.to_string(),
            root: Node::Num(n.to_string()),
        }
    }

    /// `cos(πp/q)`
    pub fn cos_pi(p: i64, q: i64) -> Self {
        Self::parse(&format!("cos({p}*pi/{q})")).expect("well-formed")
    }

    /// `sin(πp/q)`
    pub fn sin_pi(p: i64, q: i64) -> Self {
        Self::parse(&format!("sin({p}*pi/{q})")).expect("well-formed")
    }

    pub fn source(&self) -> &str {
        &self.src
    }

    pub fn eval<R: Real>(&self) -> R {
        eval(&self.root)
    }
}

fn eval<R: Real>(n: &Node) -> R {
    match n {
        Node::Num(s) => R::from_decimal(s).expect("validated at parse time"),
        Node::Pi => R::pi(),
        Node::Neg(a) => -eval::<R>(a),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval::<R>(a), eval::<R>(b));
            match op {
                '+' => a + b,
                '-' => a - b,
                '*' => a * b,
                _ => a / b,
            }
        }
        Node::Call(f, a) => {
            let a = eval::<R>(a);
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Sqrt => a.sqrt(),
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.src)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Expr::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
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
            let lit: String = cs[st..i].iter().collect();
            if lit.parse::<f64>().is_err() {
                return Err(format!("bad number `{lit}`"));
            }
            out.push(Tok::Num(lit));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphabetic() {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '(' {
            out.push(Tok::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Tok::RParen);
            i += 1;
        } else {
            return Err(format!("unexpected `{c}`"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<Node, String> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, String> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op(op @ ('*' | '/'))) => {
                    let op = *op;
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
                }
                // implicit product: `2pi`, `3sqrt(2)`, `2(1+x)`
                Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let rhs = self.unary()?;
                    lhs = Node::Bin('*', Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, String> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Node, String> {
        let t = self.peek().cloned().ok_or("unexpected end")?;
        self.pos += 1;
        match t {
            Tok::Num(s) => Ok(Node::Num(s)),
            Tok::LParen => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Ident(id) => {
                let f = match id.as_str() {
                    "pi" => return Ok(Node::Pi),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "sqrt" => Func::Sqrt,
                    _ => return Err(format!("unknown name `{id}`")),
                };
                if self.peek() != Some(&Tok::LParen) {
                    return Err(format!("`{id}` needs parentheses"));
                }
                Ok(Node::Call(f, Box::new(self.atom()?)))
            }
            _ => Err("unexpected token".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Hp192;

    #[test]
    fn evaluates_trig_forms() {
        let e = Expr::parse("cos(2pi/5)").unwrap();
        assert!((e.eval::<f64>() - (2.0 * std::f64::consts::PI / 5.0).cos()).abs() < 1e-15);
        let h = Expr::parse("1/2*sqrt(3)").unwrap();
        assert!((h.eval::<f64>() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(Expr::parse("-0.25 + 1").unwrap().eval::<f64>(), 0.75);
    }

    #[test]
    fn high_precision_agrees() {
        let e = Expr::parse("sin(pi/3)").unwrap();
        let hp: Hp192 = e.eval();
        let sq: Hp192 = Expr::parse("sqrt(3)/2").unwrap().eval();
        assert!((hp - sq).abs().to_f64() < 1e-50);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Expr::parse("cos 3").is_err());
        assert!(Expr::parse("foo(1)").is_err());
        assert!(Expr::parse("1/0").is_err());
        assert!(Expr::parse("(1").is_err());
    }
}
