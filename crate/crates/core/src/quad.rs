//! Exponents of the form `a + b*sqrt(d)` with rational `a`, `b` and a single
//! squarefree radicand `d`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadNum {
    rat: BigRational,
    irr: BigRational,
    radicand: BigInt,
}

impl QuadNum {
    pub fn rational(r: BigRational) -> Self {
        QuadNum { rat: r, irr: BigRational::zero(), radicand: BigInt::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    /// `a + b*sqrt(d)`; `d` must already be squarefree and different from 1.
    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Self {
        if b.is_zero() || d.is_one() {
            return Self::rational(a + b);
        }
        QuadNum { rat: a, irr: b, radicand: d }
    }

    /// `sqrt(r)`. Perfect squares give the positive rational root.
    pub fn sqrt_of(r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        // r = n/m = n*m / m^2
        let prod = r.numer() * r.denom();
        let (s, d) = arith::squarefree_split(&prod);
        let coef = BigRational::new(s, r.denom().clone());
        if d.is_one() {
            return Self::rational(coef);
        }
        QuadNum { rat: BigRational::zero(), irr: coef, radicand: d }
    }

    pub fn rat_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn irr_part(&self) -> &BigRational {
        &self.irr
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.irr.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_zero()
    }

    fn common_radicand(&self, o: &Self) -> Result<BigInt> {
        match (self.is_rational(), o.is_rational()) {
            (true, _) => Ok(o.radicand.clone()),
            (_, true) => Ok(self.radicand.clone()),
            _ if self.radicand == o.radicand => Ok(self.radicand.clone()),
            _ => Err(Error::IllegalExponent(format!(
                "mixed radicands sqrt({}) and sqrt({})",
                self.radicand, o.radicand
            ))),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let d = self.common_radicand(o)?;
        Ok(Self::new(&self.rat + &o.rat, &self.irr + &o.irr, d))
    }

    pub fn neg(&self) -> Self {
        QuadNum { rat: -&self.rat, irr: -&self.irr, radicand: self.radicand.clone() }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let d = self.common_radicand(o)?;
        let dr = BigRational::from_integer(d.clone());
        let a = &self.rat * &o.rat + &self.irr * &o.irr * dr;
        let b = &self.rat * &o.irr + &self.irr * &o.rat;
        Ok(Self::new(a, b, d))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.rat * r, &self.irr * r, self.radicand.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivByZero);
        }
        if !o.is_rational() {
            // multiply by the conjugate
            let conj = QuadNum { rat: o.rat.clone(), irr: -&o.irr, radicand: o.radicand.clone() };
            let norm = o.mul(&conj)?;
            return self.mul(&conj)?.div(&norm);
        }
        Ok(self.scale(&o.rat.recip()))
    }
}

impl fmt::Display for QuadNum {
    /// Parseable by the exponent grammar, e.g. `1/2+3/4*sqrt(-3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.rat);
        }
        let mut out = String::new();
        if !self.rat.is_zero() {
            out.push_str(&self.rat.to_string());
            out.push(if self.irr.is_negative() { '-' } else { '+' });
        } else if self.irr.is_negative() {
            out.push('-');
        }
        let b = self.irr.abs();
        if !b.is_one() {
            out.push_str(&format!("{b}*"));
        }
        out.push_str(&format!("sqrt({})", self.radicand));
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn sqrt_normal_form() {
        let s = QuadNum::sqrt_of(&q(-12, 1));
        assert_eq!((s.irr_part(), s.radicand()), (&q(2, 1), &BigInt::from(-3)));
        let t = QuadNum::sqrt_of(&q(9, 4));
        assert_eq!(t, QuadNum::rational(q(3, 2)));
        let u = QuadNum::sqrt_of(&q(1, 3));
        assert_eq!((u.irr_part(), u.radicand()), (&q(1, 3), &BigInt::from(3)));
    }

    #[test]
    fn field_ops() {
        let s = QuadNum::sqrt_of(&q(-3, 1));
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq, QuadNum::from_int(-3));
        let x = QuadNum::from_int(2).add(&s).unwrap();
        let inv = QuadNum::from_int(1).div(&x).unwrap();
        assert_eq!(x.mul(&inv).unwrap(), QuadNum::from_int(1));
        let r2 = QuadNum::sqrt_of(&q(2, 1));
        assert!(matches!(s.add(&r2), Err(Error::IllegalExponent(_))));
    }

    #[test]
    fn display() {
        let s = QuadNum::new(q(1, 2), q(-3, 4), BigInt::from(-3));
        assert_eq!(s.to_string(), "1/2-3/4*sqrt(-3)");
        assert_eq!(QuadNum::sqrt_of(&q(-3, 1)).to_string(), "sqrt(-3)");
    }
}
