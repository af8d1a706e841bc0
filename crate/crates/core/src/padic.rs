//! Capped relative-precision arithmetic in Q_p.
//!
//! A nonzero value is `p^valuation * unit` with `unit` known modulo
//! `p^precision`. Zero is exact and has no valuation.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 64;

thread_local! {
    static POW_CACHE: RefCell<HashMap<(u64, u32), BigInt>> = RefCell::new(HashMap::new());
}

/// `p^k`, memoised per thread.
pub fn ppow(p: u64, k: u32) -> BigInt {
    POW_CACHE.with(|c| {
        c.borrow_mut()
            .entry((p, k))
            .or_insert_with(|| BigInt::from(p).pow(k))
            .clone()
    })
}

/// Checks that `p` is an odd prime and `n >= 1`.
pub fn validate(p: u64, n: u32) -> Result<()> {
    if p == 2 {
        return Err(Error::EvenPrime);
    }
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n < 1 {
        return Err(Error::BadPrecision);
    }
    Ok(())
}

/// `floor(sqrt(p^n / 2))`.
pub fn default_height(p: u64, n: u32) -> BigInt {
    Roots::sqrt(&(ppow(p, n) / 2u32))
}

/// Splits off the p-part of a nonzero integer: `x = p^k * rest`.
pub(crate) fn split_p(x: &BigInt, p: u64) -> (u32, BigInt) {
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut rest = x.clone();
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            return (k, rest);
        }
        rest = q;
        k += 1;
    }
}

pub(crate) fn modinv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossyStep {
    pub op: String,
    pub loss: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionReport {
    pub requested: u32,
    pub effective: u32,
    pub lossy_steps: Vec<LossyStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    p: u64,
    val: Option<i64>,
    unit: BigInt,
    prec: u32,
    req: u32,
}

impl PadicNumber {
    pub fn zero(p: u64, n: u32) -> Self {
        PadicNumber { p, val: None, unit: BigInt::zero(), prec: n, req: n }
    }

    pub fn one(p: u64, n: u32) -> Self {
        PadicNumber { p, val: Some(0), unit: BigInt::one() % ppow(p, n), prec: n, req: n }
    }

    /// Value `p^shift * x` known modulo `p^(shift + rel)`.
    pub(crate) fn normalize(p: u64, shift: i64, x: BigInt, rel: u32, req: u32) -> Self {
        let x = x.mod_floor(&ppow(p, rel));
        if x.is_zero() {
            return PadicNumber::zero(p, req);
        }
        let (k, rest) = split_p(&x, p);
        PadicNumber { p, val: Some(shift + k as i64), unit: rest, prec: rel - k, req }
    }

    /// Embeds an integer with full precision `n`. The prime is not checked.
    pub fn from_integer(x: impl Into<BigInt>, p: u64, n: u32) -> Self {
        let x: BigInt = x.into();
        if x.is_zero() {
            return PadicNumber::zero(p, n);
        }
        let (k, rest) = split_p(&x, p);
        PadicNumber { p, val: Some(k as i64), unit: rest.mod_floor(&ppow(p, n)), prec: n, req: n }
    }

    /// Embeds a rational with full precision `n`. The prime is not checked.
    pub fn from_rational_unchecked(r: &BigRational, p: u64, n: u32) -> Self {
        if r.is_zero() {
            return PadicNumber::zero(p, n);
        }
        let (a, ra) = split_p(r.numer(), p);
        let (b, rb) = split_p(r.denom(), p);
        let m = ppow(p, n);
        let inv = modinv(&rb, &m).expect("denominator is prime to p");
        PadicNumber {
            p,
            val: Some(a as i64 - b as i64),
            unit: (ra * inv).mod_floor(&m),
            prec: n,
            req: n,
        }
    }

    /// The embedding Q -> Q_p at precision `n`.
    pub fn from_rational(r: &BigRational, p: u64, n: u32) -> Result<Self> {
        validate(p, n)?;
        Ok(Self::from_rational_unchecked(r, p, n))
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    /// `None` for exact zero.
    pub fn valuation(&self) -> Option<i64> {
        self.val
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    /// Relative precision (significant digits of the unit part).
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn requested(&self) -> u32 {
        self.req
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    /// `valuation + precision`, i.e. the value is known modulo `p^abs`.
    pub fn abs_precision(&self) -> Option<i64> {
        self.val.map(|v| v + self.prec as i64)
    }

    pub fn is_unit(&self) -> bool {
        self.val == Some(0)
    }

    /// Residue of the unit part modulo p.
    pub fn residue(&self) -> u64 {
        (&self.unit % BigInt::from(self.p)).to_u64().unwrap_or(0)
    }

    /// The rational `p^v * unit`.
    pub fn to_rational(&self) -> BigRational {
        match self.val {
            None => BigRational::zero(),
            Some(v) if v >= 0 => BigRational::from_integer(&self.unit * ppow(self.p, v as u32)),
            Some(v) => BigRational::new(self.unit.clone(), ppow(self.p, (-v) as u32)),
        }
    }

    /// Drops digits so that the relative precision is at most `k`.
    pub fn truncate(&self, k: u32) -> Self {
        if self.is_zero() || k >= self.prec {
            return self.clone();
        }
        let k = k.max(1);
        PadicNumber {
            p: self.p,
            val: self.val,
            unit: self.unit.mod_floor(&ppow(self.p, k)),
            prec: k,
            req: self.req,
        }
    }

    pub fn report(&self) -> PrecisionReport {
        let effective = if self.is_zero() { self.req } else { self.prec };
        let mut lossy_steps = Vec::new();
        if effective < self.req {
            lossy_steps.push(LossyStep { op: "inherited".into(), loss: self.req - effective });
        }
        PrecisionReport { requested: self.req, effective, lossy_steps }
    }

    fn add_impl(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "p-adic operands over different primes");
        let (vx, vy) = match (self.val, other.val) {
            (None, _) => return other.clone(),
            (_, None) => return self.clone(),
            (Some(a), Some(b)) => (a, b),
        };
        let v = vx.min(vy);
        let abs = (vx + self.prec as i64).min(vy + other.prec as i64);
        let rel = (abs - v) as u32;
        let x = &self.unit * ppow(self.p, (vx - v) as u32);
        let y = &other.unit * ppow(self.p, (vy - v) as u32);
        Self::normalize(self.p, v, x + y, rel, self.req.max(other.req))
    }

    fn mul_impl(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "p-adic operands over different primes");
        let req = self.req.max(other.req);
        match (self.val, other.val) {
            (Some(a), Some(b)) => {
                let prec = self.prec.min(other.prec);
                PadicNumber {
                    p: self.p,
                    val: Some(a + b),
                    unit: (&self.unit * &other.unit).mod_floor(&ppow(self.p, prec)),
                    prec,
                    req,
                }
            }
            _ => PadicNumber::zero(self.p, req),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let v = self.val.ok_or(Error::DivByZero)?;
        let m = ppow(self.p, self.prec);
        Ok(PadicNumber {
            p: self.p,
            val: Some(-v),
            unit: modinv(&self.unit, &m).expect("unit is invertible"),
            prec: self.prec,
            req: self.req,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch);
        }
        Ok(self.mul_impl(&other.inverse()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut result = PadicNumber::one(self.p, self.req);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(result)
    }

    /// Equality modulo the coarser of the two absolute precisions.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        self.p == other.p && (self - other).is_zero()
    }

    /// The (p-1)-th root of unity congruent to a unit, by iterated p-th powers.
    pub fn teichmuller(&self) -> Result<Self> {
        if self.val != Some(0) {
            return Err(Error::NotAUnit);
        }
        let m = ppow(self.p, self.prec);
        let pb = BigInt::from(self.p);
        let mut a = self.unit.clone();
        loop {
            let b = a.modpow(&pb, &m);
            if b == a {
                break;
            }
            a = b;
        }
        Ok(PadicNumber { p: self.p, val: Some(0), unit: a, prec: self.prec, req: self.req })
    }

    /// Iwasawa logarithm, normalised by `log(p) = 0`.
    pub fn iwasawa_log(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInput);
        }
        let p = self.p;
        let n = self.prec;
        let m = ppow(p, n);
        // log(u) = log(u^(p-1)) / (p-1) kills the Teichmuller part.
        let z = self.unit.modpow(&BigInt::from(p - 1), &m);
        let l = log_principal(&z, p, n);
        let inv = modinv(&BigInt::from(p - 1), &m).expect("p-1 is a unit");
        Ok(Self::normalize(p, 0, l * inv, n, self.req))
    }

    /// Square root of a unit, residue of the root in `1..=(p-1)/2`.
    pub fn hensel_sqrt(&self) -> Result<Self> {
        if self.val != Some(0) {
            return Err(Error::NotAUnit);
        }
        let p = self.p;
        let r = self.residue();
        let x0 = arith::sqrt_mod(r, p).ok_or(Error::NonResidue)?;
        let x0 = x0.min(p - x0);
        let mut x = BigInt::from(x0);
        let mut k = 1u32;
        while k < self.prec {
            k = (2 * k).min(self.prec);
            let m = ppow(p, k);
            let inv_x = modinv(&x, &m).expect("root is a unit");
            let half = (&m + 1u32) / 2u32;
            x = ((&x + &self.unit * inv_x) * half).mod_floor(&m);
        }
        Ok(PadicNumber { p, val: Some(0), unit: x, prec: self.prec, req: self.req })
    }

    /// Finds `a/b` with `|a|, |b| <= h` congruent to `self`, if one exists.
    pub fn rational_reconstruct(&self, h: &BigInt) -> Result<Option<BigRational>> {
        if self.is_zero() {
            return Ok(Some(BigRational::zero()));
        }
        let p = self.p;
        if BigInt::from(2) * h * h >= ppow(p, self.prec) {
            return Err(Error::HeightTooLarge);
        }
        let v = self.val.unwrap();
        let (modulus, x, a_bound, b_bound, den_shift) = if v >= 0 {
            let abs = (v + self.prec as i64) as u32;
            (ppow(p, abs), &self.unit * ppow(p, v as u32), h.clone(), h.clone(), BigInt::one())
        } else {
            let shift = ppow(p, (-v) as u32);
            (ppow(p, self.prec), self.unit.clone(), h.clone(), h / &shift, shift)
        };
        if b_bound.is_zero() {
            return Ok(None);
        }
        let (mut r0, mut r1) = (modulus.clone(), x.mod_floor(&modulus));
        let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
        while r1 > a_bound {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let t2 = &t0 - &q * &t1;
            r0 = std::mem::replace(&mut r1, r2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if t1.is_zero() || t1.abs() > b_bound || !r1.gcd(&t1).is_one() {
            return Ok(None);
        }
        let (a, b) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
        if !(&b * &x - &a).mod_floor(&modulus).is_zero() {
            return Ok(None);
        }
        Ok(Some(BigRational::new(a, b * den_shift)))
    }
}

/// Series for `log(z)` with `z = 1 (mod p)`, returned modulo `p^n`.
///
/// Terms are `(-1)^(j+1) (z-1)^j / j`. With `k = v(z-1)` every term from
/// index j on has valuation at least `j*k - floor(log_p j)`, which is
/// nondecreasing in j, so the loop stops once that bound reaches n.
pub(crate) fn log_principal(z: &BigInt, p: u64, n: u32) -> BigInt {
    let m = ppow(p, n);
    let t = (z - 1u32).mod_floor(&m);
    if t.is_zero() {
        return BigInt::zero();
    }
    let (k, s) = split_p(&t, p);
    let mut acc = BigInt::zero();
    let mut spow = BigInt::one();
    let mut j: u64 = 1;
    loop {
        if (j as i64) * (k as i64) - arith::ilog(j, p) as i64 >= n as i64 {
            break;
        }
        spow = (&spow * &s).mod_floor(&m);
        let mut vj = 0u32;
        let mut jr = j;
        while jr.is_multiple_of(p) {
            jr /= p;
            vj += 1;
        }
        let e = j as i64 * k as i64 - vj as i64;
        if e < n as i64 {
            let inv = modinv(&BigInt::from(jr), &m).expect("prime to p");
            let term = (ppow(p, e as u32) * &spow * inv).mod_floor(&m);
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        j += 1;
    }
    acc.mod_floor(&m)
}

/// Entry point mirroring `make_padic(r, p, N)`.
pub fn make_padic(r: &BigRational, p: u64, n: u32) -> Result<PadicNumber> {
    PadicNumber::from_rational(r, p, n)
}

/// Arithmetic with an explicit precision report.
pub fn field_arithmetic(
    x: &PadicNumber,
    y: &PadicNumber,
    op: FieldOp,
) -> Result<(PadicNumber, PrecisionReport)> {
    if x.p != y.p {
        return Err(Error::PrimeMismatch);
    }
    let r = match op {
        FieldOp::Add => x + y,
        FieldOp::Sub => x - y,
        FieldOp::Mul => x * y,
        FieldOp::Div => x.checked_div(y)?,
    };
    if !r.is_zero() && r.prec == 0 {
        return Err(Error::PrecisionExhausted("no significant digits left".into()));
    }
    let requested = x.req.max(y.req);
    let mut lossy_steps = Vec::new();
    for (tag, operand) in [("lhs", x), ("rhs", y)] {
        if !operand.is_zero() && operand.prec < requested {
            lossy_steps.push(LossyStep { op: format!("{tag}-inherited"), loss: requested - operand.prec });
        }
    }
    let input_prec = [x, y].iter().filter(|o| !o.is_zero()).map(|o| o.prec).min().unwrap_or(requested);
    if !r.is_zero() && r.prec < input_prec {
        let tag = match op {
            FieldOp::Add => "add-cancellation",
            FieldOp::Sub => "sub-cancellation",
            FieldOp::Mul => "mul",
            FieldOp::Div => "div",
        };
        lossy_steps.push(LossyStep { op: tag.into(), loss: input_prec - r.prec });
    }
    let effective = if r.is_zero() { requested } else { r.prec };
    Ok((r, PrecisionReport { requested, effective, lossy_steps }))
}

impl Add for &PadicNumber {
    type Output = PadicNumber;
    fn add(self, rhs: &PadicNumber) -> PadicNumber {
        self.add_impl(rhs)
    }
}

impl Sub for &PadicNumber {
    type Output = PadicNumber;
    fn sub(self, rhs: &PadicNumber) -> PadicNumber {
        self.add_impl(&-rhs)
    }
}

impl Mul for &PadicNumber {
    type Output = PadicNumber;
    fn mul(self, rhs: &PadicNumber) -> PadicNumber {
        self.mul_impl(rhs)
    }
}

impl Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        if self.is_zero() {
            return self.clone();
        }
        let m = ppow(self.p, self.prec);
        PadicNumber { unit: (-&self.unit).mod_floor(&m), ..self.clone() }
    }
}

impl fmt::Display for PadicNumber {
    /// Prints the rational lift followed by the big-O term, e.g. `22/7 + O(7^39)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.abs_precision() {
            None => write!(f, "0"),
            Some(abs) => write!(f, "{} + O({}^{})", self.to_rational(), self.p, abs),
        }
    }
}

impl Serialize for PadicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn z(a: i64, p: u64, n: u32) -> PadicNumber {
        PadicNumber::from_integer(a, p, n)
    }

    #[test]
    fn embedding_examples() {
        let x = make_padic(&q(7, 1), 7, 8).unwrap();
        assert_eq!(x.valuation(), Some(1));
        assert!(x.unit().is_one());
        let one = make_padic(&q(1, 1), 7, 8).unwrap();
        assert_eq!((one.valuation(), one.unit().clone()), (Some(0), BigInt::one()));
        let y = make_padic(&q(-3, 49), 7, 8).unwrap();
        assert_eq!(y.valuation(), Some(-2));
        assert_eq!(y.unit(), &(ppow(7, 8) - 3));
        assert!(make_padic(&q(0, 1), 7, 8).unwrap().is_zero());
        assert_eq!(make_padic(&q(1, 1), 2, 8), Err(Error::EvenPrime));
        assert_eq!(make_padic(&q(1, 1), 7, 0), Err(Error::BadPrecision));
        assert_eq!(make_padic(&q(1, 1), 9, 8), Err(Error::NotPrime(9)));
    }

    #[test]
    fn arithmetic_examples() {
        let (x, _) = field_arithmetic(&z(7, 7, 8), &z(7, 7, 8), FieldOp::Mul).unwrap();
        assert_eq!(x.valuation(), Some(2));
        let (x, _) = field_arithmetic(&z(1, 7, 8), &z(1, 7, 8), FieldOp::Sub).unwrap();
        assert!(x.is_zero());
        let (x, rep) = field_arithmetic(&z(8, 7, 8), &z(1, 7, 8), FieldOp::Sub).unwrap();
        assert_eq!(x.valuation(), Some(1));
        assert!(x.unit().is_one());
        assert_eq!(rep.effective, 7);
        assert_eq!(rep.lossy_steps[0].loss, 1);
        assert_eq!(field_arithmetic(&z(1, 7, 8), &z(0, 7, 8), FieldOp::Div).unwrap_err(), Error::DivByZero);
    }

    #[test]
    fn rational_field_roundtrip() {
        let a = make_padic(&q(22, 7), 7, 20).unwrap();
        let b = make_padic(&q(-5, 3), 7, 20).unwrap();
        let s = &a + &b;
        assert!(s.eq_at_precision(&make_padic(&q(31, 21), 7, 20).unwrap()));
        let d = a.checked_div(&b).unwrap();
        assert!(d.eq_at_precision(&make_padic(&q(-66, 35), 7, 20).unwrap()));
    }

    #[test]
    fn teichmuller_examples() {
        assert!(z(1, 7, 20).teichmuller().unwrap().eq_at_precision(&z(1, 7, 20)));
        assert!(z(8, 7, 20).teichmuller().unwrap().eq_at_precision(&z(1, 7, 20)));
        let w = z(2, 7, 20).teichmuller().unwrap();
        // oracle: iterate a -> a^7 mod 7^20 from 2 until fixpoint
        let m = BigInt::from(7).pow(20u32);
        let mut a = BigInt::from(2);
        for _ in 0..40 {
            a = a.modpow(&BigInt::from(7), &m);
        }
        assert_eq!(w.unit(), &a);
        assert_eq!(w.residue(), 2);
        assert!(w.pow(6).unwrap().eq_at_precision(&z(1, 7, 20)));
        assert_eq!(z(7, 7, 20).teichmuller(), Err(Error::NotAUnit));
    }

    /// Independent oracle: partial sums of the log series over Q, then embedded.
    fn log1p_oracle(p: u64, n: u32) -> PadicNumber {
        let mut acc = BigRational::zero();
        let pr = BigRational::from_integer(BigInt::from(p));
        let mut pw = BigRational::one();
        for j in 1..=(2 * n as i64 + 10) {
            pw = &pw * &pr;
            let term = &pw / BigRational::from_integer(BigInt::from(j));
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        PadicNumber::from_rational_unchecked(&acc, p, n)
    }

    #[test]
    fn log_examples() {
        for p in [3u64, 5, 7, 13] {
            let n = 30;
            assert!(z(p as i64, p, n).iwasawa_log().unwrap().is_zero());
            assert!(z(1, p, n).iwasawa_log().unwrap().is_zero());
            let l = z(1 + p as i64, p, n).iwasawa_log().unwrap();
            let oracle = log1p_oracle(p, n);
            assert!(l.eq_at_precision(&oracle), "p={p}: {l} vs {oracle}");
            assert_eq!(l.valuation(), Some(1));
            let five = z(1 + p as i64, p, n).pow(5).unwrap().iwasawa_log().unwrap();
            assert!(five.eq_at_precision(&(&z(5, p, n) * &l)));
        }
        assert_eq!(PadicNumber::zero(7, 8).iwasawa_log(), Err(Error::ZeroInput));
    }

    #[test]
    fn log_stops_late_enough_for_p_powers() {
        // p = 3, v(u-1) = 1: the term j = 9 has valuation 7 while j = 8 has 8.
        let n = 8;
        let l = z(4, 3, n).iwasawa_log().unwrap();
        assert!(l.eq_at_precision(&log1p_oracle(3, n)));
    }

    #[test]
    fn sqrt_examples() {
        let r = z(-3, 7, 40).hensel_sqrt().unwrap();
        assert_eq!(r.residue(), 2);
        assert!((&r * &r).eq_at_precision(&z(-3, 7, 40)));
        assert!(z(1, 7, 40).hensel_sqrt().unwrap().eq_at_precision(&z(1, 7, 40)));
        assert_eq!(z(-3, 11, 40).hensel_sqrt(), Err(Error::NonResidue));
        assert_eq!(z(7, 7, 40).hensel_sqrt(), Err(Error::NotAUnit));
    }

    #[test]
    fn reconstruct_examples() {
        let h = BigInt::from(100);
        let x = make_padic(&q(22, 7), 7, 40).unwrap();
        assert_eq!(x.rational_reconstruct(&h).unwrap(), Some(q(22, 7)));
        let s = z(-3, 7, 40).hensel_sqrt().unwrap();
        assert_eq!(s.rational_reconstruct(&BigInt::from(10_000)).unwrap(), None);
        assert_eq!(PadicNumber::zero(7, 40).rational_reconstruct(&h).unwrap(), Some(q(0, 1)));
        let big = default_height(7, 40) + 1;
        assert_eq!(x.rational_reconstruct(&big), Err(Error::HeightTooLarge));
        let y = make_padic(&q(-49, 5), 7, 40).unwrap();
        assert_eq!(y.rational_reconstruct(&h).unwrap(), Some(q(-49, 5)));
    }

    #[test]
    fn display_shows_lift() {
        let x = make_padic(&q(22, 7), 7, 40).unwrap();
        assert_eq!(x.to_string(), "22/7 + O(7^39)");
    }
}
