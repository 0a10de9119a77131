//! Field-element expressions: rationals, `y`, names, `+ - * / ^`, parentheses
//! and juxtaposition for products.

use std::sync::Arc;

use num_bigint::BigInt;
use shintani_core::{Element, Rational, Spec};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("{0}")]
    Math(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = vec![];
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            out.push((st, Tok::Int(s[st..i].parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((st, Tok::Ident(s[st..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ExprError::Parse { pos: i, msg: format!("unexpected character `{}`", c) });
        }
    }
    Ok(out)
}

/// Resolves names to elements.
pub trait Env {
    fn lookup(&mut self, name: &str) -> Option<Result<Element, ExprError>>;
}

impl Env for std::collections::BTreeMap<String, Element> {
    fn lookup(&mut self, name: &str) -> Option<Result<Element, ExprError>> {
        self.get(name).cloned().map(Ok)
    }
}

struct Parser<'a, E: Env> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    spec: &'a Arc<Spec>,
    env: &'a mut E,
}

fn math(e: shintani_core::Error) -> ExprError {
    ExprError::Math(e.to_string())
}

impl<'a, E: Env> Parser<'a, E> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ExprError> {
        Err(ExprError::Parse { pos: self.here(), msg: msg.to_string() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Element, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')))
    }

    fn term(&mut self) -> Result<Element, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                acc = acc.div(&d).map_err(math)?;
            } else if self.starts_atom() {
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Element, ExprError> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Element, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let k = self.exponent()?;
        base.pow(k).map_err(math)
    }

    fn exponent(&mut self) -> Result<i64, ExprError> {
        if self.eat('(') {
            let k = self.exponent()?;
            if !self.eat(')') {
                return self.err("expected `)`");
            }
            return Ok(k);
        }
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let v: i64 = n.try_into().map_err(|_| ExprError::Parse { pos: self.here(), msg: "exponent too large".into() })?;
                Ok(if neg { -v } else { v })
            }
            _ => self.err("expected an integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<Element, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Element::from_scalar(self.spec, Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "y" {
                    return Ok(Element::gen(self.spec));
                }
                match self.env.lookup(&name) {
                    Some(r) => r,
                    None => Err(ExprError::UnknownName(name)),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(v)
            }
            Some(_) => self.err("expected a number, a name or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Evaluate `src` exactly in the field of `spec`.
pub fn parse_element<E: Env>(src: &str, spec: &Arc<Spec>, env: &mut E) -> Result<Element, ExprError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len(), spec, env };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(v)
}
