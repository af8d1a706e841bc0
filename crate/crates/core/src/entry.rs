//! Parser for period-matrix entries.
//!
//! ```text
//! entry    := term { "*" term }
//! term     := base [ "^" ( "(" exponent ")" | ["-"] integer ) ]
//! base     := "p" | "zeta" | ident | rational | "(" rational "+" "p" ")" | "(" entry ")"
//! exponent := product { ("+" | "-") product }
//! product  := factor { ("*" | "/") factor }
//! factor   := ["-"] ( integer | "sqrt" "(" rational ")" | "(" exponent ")" )
//! rational := ["-"] digits [ "/" digits ]
//! ```
//!
//! Identifiers name units declared alongside the matrix.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::mult::{MultElement, QpContext};
use crate::quad::QuadNum;

pub type Units = BTreeMap<String, MultElement>;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a QpContext,
    units: &'a Units,
}

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::ParseError { pos, msg: msg.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(perr(self.pos, format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {}
            _ => return None,
        }
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(perr(start, "expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn rational(&mut self) -> Result<BigRational> {
        let neg = self.eat(b'-');
        let num = self.digits()?;
        let mut den = BigInt::from(1);
        if self.eat(b'/') {
            let at = self.pos;
            den = self.digits()?;
            if den.is_zero() {
                return Err(perr(at, "zero denominator"));
            }
        }
        let r = BigRational::new(num, den);
        Ok(if neg { -r } else { r })
    }

    fn entry(&mut self) -> Result<MultElement> {
        let mut acc = self.term()?;
        while self.eat(b'*') {
            let t = self.term()?;
            acc = acc.mul(&t)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultElement> {
        let base = self.base()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        if self.eat(b'(') {
            let e = self.exponent()?;
            self.expect(b')')?;
            return base.pow_quad(&e).map_err(|err| match err {
                Error::IllegalExponent(m) => Error::IllegalExponent(format!("at position {at}: {m}")),
                other => other,
            });
        }
        let neg = self.eat(b'-');
        let k = self.digits()?;
        Ok(base.pow_int(&if neg { -k } else { k }))
    }

    fn base(&mut self) -> Result<MultElement> {
        self.skip_ws();
        let at = self.pos;
        match self.peek() {
            None => Err(perr(at, "unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let save = self.pos;
                if let Ok(r) = self.rational() {
                    if self.eat(b'+') && self.ident().as_deref() == Some("p") && self.eat(b')') {
                        let v = r + BigRational::from_integer(self.ctx.p.into());
                        return MultElement::from_rational(self.ctx, &v).map_err(|_| perr(at, "zero base"));
                    }
                }
                self.pos = save;
                let inner = self.entry()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c == b'-' || c.is_ascii_digit() => {
                let r = self.rational()?;
                MultElement::from_rational(self.ctx, &r).map_err(|_| perr(at, "zero base"))
            }
            Some(_) => {
                let name = self.ident().ok_or_else(|| perr(at, "expected a base"))?;
                match name.as_str() {
                    "p" => Ok(MultElement::uniformizer(self.ctx)),
                    "zeta" => Ok(MultElement::zeta(self.ctx)),
                    _ => self
                        .units
                        .get(&name)
                        .cloned()
                        .ok_or_else(|| perr(at, format!("unknown symbol '{name}'"))),
                }
            }
        }
    }

    fn exponent(&mut self) -> Result<QuadNum> {
        let mut acc = self.product()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.product()?)?;
            } else if self.peek() == Some(b'-') {
                self.pos += 1;
                acc = acc.sub(&self.product()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<QuadNum> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.factor()?)?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let d = self.factor()?;
                acc = acc.div(&d).map_err(|e| match e {
                    Error::DivByZero => perr(at, "division by zero"),
                    other => other,
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<QuadNum> {
        if self.eat(b'-') {
            return Ok(self.factor()?.neg());
        }
        self.skip_ws();
        let at = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.exponent()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(QuadNum::rational(BigRational::from_integer(self.digits()?))),
            Some(_) => match self.ident().as_deref() {
                Some("sqrt") => {
                    self.expect(b'(')?;
                    let r = self.rational()?;
                    self.expect(b')')?;
                    Ok(QuadNum::sqrt_of(&r))
                }
                Some(other) => Err(perr(at, format!("unexpected '{other}' in exponent"))),
                None => Err(perr(at, "expected an exponent")),
            },
            None => Err(perr(at, "unexpected end of input")),
        }
    }
}

/// Parses one entry expression at the context's prime and precision.
pub fn parse_entry(text: &str, ctx: &QpContext, units: &Units) -> Result<MultElement> {
    let mut ps = Parser { src: text.as_bytes(), pos: 0, ctx, units };
    let x = ps.entry()?;
    if ps.peek().is_some() {
        return Err(perr(ps.pos, "trailing input"));
    }
    Ok(x)
}

/// Parses a unit table; definitions may refer to earlier names.
pub fn parse_units(defs: &[(String, String)], ctx: &QpContext) -> Result<Units> {
    let mut units = Units::new();
    for (name, text) in defs {
        if matches!(name.as_str(), "p" | "zeta" | "sqrt") {
            return Err(Error::InvalidInput(format!("reserved unit name '{name}'")));
        }
        let x = parse_entry(text, ctx, &units)?;
        units.insert(name.clone(), x);
    }
    Ok(units)
}
