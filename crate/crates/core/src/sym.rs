//! Polynomials over Q in named p-adic constants, declared Q-linear facts
//! about those constants, and a small scalar expression language.
//!
//! ```text
//! expr  := term { ("+" | "-") term }
//! term  := unary { ("*" | "/") unary }
//! unary := "-" unary | power
//! power := atom [ "^" ["-"] integer ]
//! atom  := integer | ident | ident "(" raw ")" | "(" expr ")"
//! ```
//!
//! Calls: `log(entry)`, `ord(entry)`, `L(entry)` take an entry expression;
//! `sqrt(expr)` takes a scalar.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::entry::{parse_entry, Units};
use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::mult::QpContext;
use crate::padic::PadicNumber;

type Monomial = Vec<(String, u32)>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut m: BTreeMap<String, u32> = a.iter().cloned().collect();
    for (s, e) in b {
        *m.entry(s.clone()).or_insert(0) += e;
    }
    m.into_iter().collect()
}

impl SymPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(r: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(Vec::new(), r);
        }
        SymPoly { terms }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(n.into()))
    }

    pub fn symbol(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![(name.to_string(), 1)], BigRational::one());
        SymPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn symbols(&self) -> Vec<String> {
        let mut s: Vec<String> = self.terms.keys().flat_map(|m| m.iter().map(|(x, _)| x.clone())).collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            let e = terms.entry(m.clone()).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        SymPoly { terms }
    }

    pub fn neg(&self) -> Self {
        SymPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        SymPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let mut t = BTreeMap::new();
                t.insert(mono_mul(ma, mb), ca * cb);
                out = out.add(&SymPoly { terms: t });
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::int(1), |acc, _| acc.mul(self))
    }

    pub fn substitute(&self, name: &str, value: &Self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut t = Self::constant(c.clone());
            for (s, e) in m {
                let f = if s == name { value.pow(*e) } else { SymPoly::symbol(s).pow(*e) };
                t = t.mul(&f);
            }
            out = out.add(&t);
        }
        out
    }

    pub fn eval(&self, values: &BTreeMap<String, PadicNumber>, p: u64, n: u32) -> Result<PadicNumber> {
        let mut acc = PadicNumber::zero(p, n);
        for (m, c) in &self.terms {
            let mut t = PadicNumber::from_rational_unchecked(c, p, n);
            for (s, e) in m {
                let v = values.get(s).ok_or_else(|| Error::InvalidInput(format!("no value for '{s}'")))?;
                t = &t * &v.pow(*e as i64)?;
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            if !first {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            let mono: Vec<String> =
                m.iter().map(|(s, e)| if *e == 1 { s.clone() } else { format!("{s}^{e}") }).collect();
            match (a.is_one(), mono.is_empty()) {
                (_, true) => write!(f, "{a}")?,
                (true, false) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{a}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

impl Serialize for SymPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A declared Q-linear relation among constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Fact {
    /// The listed quantities are linearly independent over Q.
    Independent(Vec<SymPoly>),
    /// The symbol equals the given polynomial.
    Substitute(String, SymPoly),
}

impl Fact {
    /// `x` is irrational: `{1, x}` independent.
    pub fn irrational(x: SymPoly) -> Self {
        Fact::Independent(vec![SymPoly::int(1), x])
    }

    pub fn nonzero(x: SymPoly) -> Self {
        Fact::Independent(vec![x])
    }
}

/// JSON form of a fact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactSpec {
    Independent(Vec<String>),
    Substitute { symbol: String, value: String },
    Irrational(String),
    Nonzero(String),
}

impl FactSpec {
    pub fn to_fact(&self, p: u64, symbols: &[String]) -> Result<Fact> {
        let poly = |s: &str| parse_expr(s).and_then(|e| e.to_poly(p, symbols));
        Ok(match self {
            FactSpec::Independent(xs) => Fact::Independent(xs.iter().map(|x| poly(x)).collect::<Result<_>>()?),
            FactSpec::Substitute { symbol, value } => Fact::Substitute(symbol.clone(), poly(value)?),
            FactSpec::Irrational(x) => Fact::irrational(poly(x)?),
            FactSpec::Nonzero(x) => Fact::nonzero(poly(x)?),
        })
    }
}

fn apply_substitutions(x: &SymPoly, facts: &[Fact]) -> SymPoly {
    let mut cur = x.clone();
    // bounded so that cyclic declarations terminate
    for _ in 0..32 {
        let mut next = cur.clone();
        for f in facts {
            if let Fact::Substitute(s, v) = f {
                next = next.substitute(s, v);
            }
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// Coefficients of `target` over the polynomials `basis`, if it lies in their Q-span.
fn express(target: &SymPoly, basis: &[SymPoly]) -> Option<Vec<BigRational>> {
    let mut monos: Vec<Monomial> = basis.iter().chain(std::iter::once(target)).flat_map(|b| b.terms.keys().cloned()).collect();
    monos.sort();
    monos.dedup();
    let k = basis.len();
    let rows: Vec<Vec<BigRational>> = monos
        .iter()
        .map(|m| {
            let mut r: Vec<BigRational> = basis.iter().map(|b| b.coefficient(m)).collect();
            r.push(target.coefficient(m));
            r
        })
        .collect();
    let (red, pivots) = RationalMatrix::from_rows(rows).rref();
    if pivots.contains(&k) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = red.get(r, k).clone();
    }
    Some(sol)
}

/// Dimension over Q of `{beta in Q^n : sum_j rows[i][j] beta_j = 0 for all i}`,
/// the entries being Q_p-constants described by polynomials and facts.
pub fn rational_nullity(rows: &[Vec<SymPoly>], n: usize, facts: &[Fact]) -> Result<usize> {
    let indep: Vec<Vec<SymPoly>> = facts
        .iter()
        .filter_map(|f| match f {
            Fact::Independent(xs) => Some(xs.iter().map(|x| apply_substitutions(x, facts)).collect::<Vec<_>>()),
            _ => None,
        })
        .collect();
    for set in &indep {
        // a declared family must at least be independent as polynomials
        let m = RationalMatrix::from_rows(
            set.iter()
                .map(|x| {
                    let mut monos: Vec<&Monomial> = set.iter().flat_map(|y| y.terms.keys()).collect();
                    monos.sort();
                    monos.dedup();
                    monos.into_iter().map(|mo| x.coefficient(mo)).collect()
                })
                .collect(),
        );
        if set.is_empty() || m.rank() < set.len() {
            return Err(Error::InvalidInput("declared independent family is dependent after substitution".into()));
        }
    }
    let mut coeff_rows: Vec<Vec<BigRational>> = Vec::new();
    for row in rows {
        let row: Vec<SymPoly> = row.iter().map(|x| apply_substitutions(x, facts)).collect();
        if row.iter().all(|x| x.is_zero()) {
            continue;
        }
        if let Some(c) = row.iter().map(|x| x.as_constant()).collect::<Option<Vec<_>>>() {
            coeff_rows.push(c);
            continue;
        }
        let mut done = false;
        for set in &indep {
            let Some(cols) = row.iter().map(|x| express(x, set)).collect::<Option<Vec<_>>>() else { continue };
            for t in 0..set.len() {
                coeff_rows.push(cols.iter().map(|c| c[t].clone()).collect());
            }
            done = true;
            break;
        }
        if !done {
            let shown: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            return Err(Error::InsufficientFacts(format!("no declared independent family spans [{}]", shown.join(", "))));
        }
    }
    if coeff_rows.is_empty() {
        return Ok(n);
    }
    Ok(n - RationalMatrix::from_rows(coeff_rows).rank())
}

// ---------------------------------------------------------------------------
// expressions

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt),
    Ident(String),
    Call(String, String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::ParseError { pos, msg: msg.into() }
}

impl ExprParser<'_> {
    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
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

    fn integer(&mut self) -> Result<BigInt> {
        self.peek();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(perr(start, "expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap())
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let at = self.pos;
            let k: i64 = self.integer()?.try_into().map_err(|_| perr(at, "exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.pos;
        match self.peek() {
            None => Err(perr(at, "unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(perr(self.pos, "expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Num(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                if self.src.get(self.pos) == Some(&b'(') {
                    // raw argument up to the matching parenthesis
                    let open = self.pos;
                    let mut depth = 0usize;
                    while self.pos < self.src.len() {
                        match self.src[self.pos] {
                            b'(' => depth += 1,
                            b')' => {
                                depth -= 1;
                                if depth == 0 {
                                    break;
                                }
                            }
                            _ => {}
                        }
                        self.pos += 1;
                    }
                    if self.pos == self.src.len() {
                        return Err(perr(open, "unbalanced parenthesis"));
                    }
                    let arg = String::from_utf8_lossy(&self.src[open + 1..self.pos]).into_owned();
                    self.pos += 1;
                    return Ok(Expr::Call(name, arg));
                }
                Ok(Expr::Ident(name))
            }
            Some(c) => Err(perr(at, format!("unexpected '{}'", c as char))),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut ps = ExprParser { src: text.as_bytes(), pos: 0 };
    let e = ps.expr()?;
    if ps.peek().is_some() {
        return Err(perr(ps.pos, "trailing input"));
    }
    Ok(e)
}

impl Expr {
    /// Polynomial in the declared symbols; `p` is the prime.
    pub fn to_poly(&self, p: u64, symbols: &[String]) -> Result<SymPoly> {
        Ok(match self {
            Expr::Num(n) => SymPoly::constant(BigRational::from_integer(n.clone())),
            Expr::Ident(s) if s == "p" => SymPoly::int(p as i64),
            Expr::Ident(s) if symbols.contains(s) => SymPoly::symbol(s),
            Expr::Ident(s) => return Err(Error::InvalidInput(format!("undeclared constant '{s}'"))),
            Expr::Call(f, _) => {
                return Err(Error::InvalidInput(format!("'{f}(...)' must be bound to a named constant")))
            }
            Expr::Neg(a) => a.to_poly(p, symbols)?.neg(),
            Expr::Add(a, b) => a.to_poly(p, symbols)?.add(&b.to_poly(p, symbols)?),
            Expr::Sub(a, b) => a.to_poly(p, symbols)?.sub(&b.to_poly(p, symbols)?),
            Expr::Mul(a, b) => a.to_poly(p, symbols)?.mul(&b.to_poly(p, symbols)?),
            Expr::Div(a, b) => {
                let d = b
                    .to_poly(p, symbols)?
                    .as_constant()
                    .ok_or_else(|| Error::InvalidInput("division by a non-constant".into()))?;
                if d.is_zero() {
                    return Err(Error::DivByZero);
                }
                a.to_poly(p, symbols)?.scale(&d.recip())
            }
            Expr::Pow(a, k) => {
                let base = a.to_poly(p, symbols)?;
                if *k >= 0 {
                    base.pow(*k as u32)
                } else {
                    let c = base.as_constant().ok_or_else(|| Error::InvalidInput("negative power of a non-constant".into()))?;
                    if c.is_zero() {
                        return Err(Error::DivByZero);
                    }
                    SymPoly::constant(c.recip()).pow((-*k) as u32)
                }
            }
        })
    }

    /// Numeric value in Q_p.
    pub fn eval(&self, ctx: &QpContext, values: &BTreeMap<String, PadicNumber>, units: &Units) -> Result<PadicNumber> {
        let (p, n) = (ctx.p, ctx.n);
        Ok(match self {
            Expr::Num(x) => PadicNumber::from_integer(x.clone(), p, n),
            Expr::Ident(s) if s == "p" => PadicNumber::from_integer(p, p, n),
            Expr::Ident(s) => values.get(s).cloned().ok_or_else(|| Error::InvalidInput(format!("undeclared constant '{s}'")))?,
            Expr::Call(f, arg) => match f.as_str() {
                "sqrt" => parse_expr(arg)?.eval(ctx, values, units)?.hensel_sqrt()?,
                "log" | "ord" | "L" => {
                    let x = parse_entry(arg, ctx, units)?;
                    let ord = PadicNumber::from_rational_unchecked(&x.ord_of(), p, n);
                    match f.as_str() {
                        "log" => x.log_of(),
                        "ord" => ord,
                        _ => x.log_of().checked_div(&ord)?,
                    }
                }
                _ => return Err(Error::InvalidInput(format!("unknown function '{f}'"))),
            },
            Expr::Neg(a) => -&a.eval(ctx, values, units)?,
            Expr::Add(a, b) => &a.eval(ctx, values, units)? + &b.eval(ctx, values, units)?,
            Expr::Sub(a, b) => &a.eval(ctx, values, units)? - &b.eval(ctx, values, units)?,
            Expr::Mul(a, b) => &a.eval(ctx, values, units)? * &b.eval(ctx, values, units)?,
            Expr::Div(a, b) => a.eval(ctx, values, units)?.checked_div(&b.eval(ctx, values, units)?)?,
            Expr::Pow(a, k) => a.eval(ctx, values, units)?.pow(*k)?,
        })
    }
}
