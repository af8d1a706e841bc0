//! Coordinates on Q_p^x and its l-adic completions.
//!
//! An element is `zeta^k * p^m * (1+p)^t`, where `zeta` is the Teichmuller
//! lift of the smallest primitive root. When every ingredient is known
//! exactly (rational bases, rational or `sqrt` exponents) the principal part
//! is also kept as a formal sum `sum c_{a,d} sqrt(d) log(a)` over primes
//! `a != p`. Distinct primes have Q-independent logarithms (the kernel of
//! `log_p` on Q^x is `+-p^Z`), and by Brumer's theorem these stay independent
//! over the algebraic numbers, so equality of such sums is coefficientwise.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::padic::{self, PadicNumber};
use crate::quad::QuadNum;

/// Formal principal-unit exponent: `(prime, radicand) -> coefficient`.
pub type UnitExponents = BTreeMap<(BigInt, BigInt), BigRational>;

thread_local! {
    static LOG1P: RefCell<HashMap<(u64, u32), PadicNumber>> = RefCell::new(HashMap::new());
    static ATOMS: RefCell<HashMap<(u64, u32, BigInt), PadicNumber>> = RefCell::new(HashMap::new());
    static ROOTS: RefCell<HashMap<(u64, u32, BigInt), PadicNumber>> = RefCell::new(HashMap::new());
}

/// `log_p(1+p)`.
pub fn log1p(p: u64, n: u32) -> PadicNumber {
    LOG1P.with(|c| {
        c.borrow_mut()
            .entry((p, n))
            .or_insert_with(|| {
                PadicNumber::from_integer(1 + p, p, n).iwasawa_log().expect("1+p is a unit")
            })
            .clone()
    })
}

/// `log_p(a) / log_p(1+p)` for a prime `a != p`.
fn atom_coord(p: u64, n: u32, a: &BigInt) -> PadicNumber {
    ATOMS.with(|c| {
        c.borrow_mut()
            .entry((p, n, a.clone()))
            .or_insert_with(|| {
                let l = PadicNumber::from_integer(a.clone(), p, n).iwasawa_log().expect("nonzero");
                l.checked_div(&log1p(p, n)).expect("log(1+p) != 0")
            })
            .clone()
    })
}

/// The fixed square root of a squarefree integer in Z_p.
pub fn sqrt_radicand(p: u64, n: u32, d: &BigInt) -> Result<PadicNumber> {
    if d.is_one() {
        return Ok(PadicNumber::one(p, n));
    }
    if let Some(r) = ROOTS.with(|c| c.borrow().get(&(p, n, d.clone())).cloned()) {
        return Ok(r);
    }
    let r = PadicNumber::from_integer(d.clone(), p, n).hensel_sqrt().map_err(|e| match e {
        Error::NotAUnit => Error::NonResidue,
        other => other,
    })?;
    ROOTS.with(|c| c.borrow_mut().insert((p, n, d.clone()), r.clone()));
    Ok(r)
}

/// Image of an exponent in Q_p.
pub fn embed_quad(q: &QuadNum, p: u64, n: u32) -> Result<PadicNumber> {
    let a = PadicNumber::from_rational_unchecked(q.rat_part(), p, n);
    if q.is_rational() {
        return Ok(a);
    }
    let s = sqrt_radicand(p, n, q.radicand())?;
    Ok(&a + &(&PadicNumber::from_rational_unchecked(q.irr_part(), p, n) * &s))
}

/// Prime, precision and the fixed generators.
#[derive(Clone, Debug)]
pub struct QpContext {
    pub p: u64,
    pub n: u32,
    pub root: u64,
}

impl QpContext {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        padic::validate(p, n)?;
        Ok(QpContext { p, n, root: arith::smallest_primitive_root(p) })
    }

    pub fn zeta(&self) -> PadicNumber {
        PadicNumber::from_integer(self.root, self.p, self.n).teichmuller().expect("unit")
    }

    pub fn order(&self) -> u64 {
        self.p - 1
    }
}

#[derive(Clone, Debug)]
pub struct MultElement {
    p: u64,
    n: u32,
    zeta_exp: u64,
    p_exp: BigRational,
    unit_coord: PadicNumber,
    exact: Option<UnitExponents>,
}

fn add_exact(a: &mut UnitExponents, b: &UnitExponents, scale: &BigRational) {
    for (k, v) in b {
        let e = a.entry(k.clone()).or_insert_with(BigRational::zero);
        *e += v * scale;
        if e.is_zero() {
            a.remove(k);
        }
    }
}

fn exact_coord(p: u64, n: u32, ex: &UnitExponents) -> Result<PadicNumber> {
    let mut t = PadicNumber::zero(p, n);
    for ((a, d), c) in ex {
        let s = sqrt_radicand(p, n, d)?;
        let term = &(&PadicNumber::from_rational_unchecked(c, p, n) * &s) * &atom_coord(p, n, a);
        t = &t + &term;
    }
    Ok(t)
}

impl MultElement {
    pub fn identity(ctx: &QpContext) -> Self {
        MultElement {
            p: ctx.p,
            n: ctx.n,
            zeta_exp: 0,
            p_exp: BigRational::zero(),
            unit_coord: PadicNumber::zero(ctx.p, ctx.n),
            exact: Some(UnitExponents::new()),
        }
    }

    /// The uniformizer `p`.
    pub fn uniformizer(ctx: &QpContext) -> Self {
        MultElement { p_exp: BigRational::one(), ..Self::identity(ctx) }
    }

    pub fn zeta(ctx: &QpContext) -> Self {
        MultElement { zeta_exp: 1 % ctx.order(), ..Self::identity(ctx) }
    }

    /// `(1+p)^t` for a p-adic integer `t`.
    pub fn principal(ctx: &QpContext, t: PadicNumber) -> Result<Self> {
        if t.valuation().is_some_and(|v| v < 0) {
            return Err(Error::IllegalExponent("principal coordinate must lie in Z_p".into()));
        }
        Ok(MultElement { unit_coord: t, exact: None, ..Self::identity(ctx) })
    }

    /// Decomposes a nonzero rational into coordinates.
    pub fn from_rational(ctx: &QpContext, r: &BigRational) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::ZeroInput);
        }
        let (p, n) = (ctx.p, ctx.n);
        let x = PadicNumber::from_rational_unchecked(r, p, n);
        let v = x.valuation().unwrap();
        let unit = PadicNumber::from_integer(x.unit().clone(), p, n);
        let zeta_exp = arith::discrete_log(ctx.root, unit.residue(), p);
        let unit_coord = unit.iwasawa_log()?.checked_div(&log1p(p, n))?;
        let mut exact = Some(UnitExponents::new());
        for (part, sign) in [(r.numer(), 1i64), (r.denom(), -1)] {
            let (fac, complete) = arith::factor_bigint(part);
            if !complete {
                exact = None;
                break;
            }
            for (q, e) in fac {
                if q == BigInt::from(p) {
                    continue;
                }
                let ex = exact.as_mut().unwrap();
                let k = (q, BigInt::one());
                let c = ex.entry(k).or_insert_with(BigRational::zero);
                *c += BigRational::from_integer(BigInt::from(sign * e as i64));
            }
        }
        Ok(MultElement {
            p,
            n,
            zeta_exp,
            p_exp: BigRational::from_integer(v.into()),
            unit_coord,
            exact,
        })
    }

    /// Assembles an element from raw coordinates (no exact part).
    pub fn from_coords(ctx: &QpContext, zeta_exp: u64, p_exp: BigRational, unit_coord: PadicNumber) -> Self {
        MultElement {
            p: ctx.p,
            n: ctx.n,
            zeta_exp: zeta_exp % ctx.order(),
            p_exp,
            unit_coord,
            exact: None,
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn zeta_exp(&self) -> u64 {
        self.zeta_exp
    }

    pub fn p_exp(&self) -> &BigRational {
        &self.p_exp
    }

    pub fn unit_coord(&self) -> &PadicNumber {
        &self.unit_coord
    }

    pub fn exact(&self) -> Option<&UnitExponents> {
        self.exact.as_ref()
    }

    pub fn is_principal_unit(&self) -> bool {
        self.zeta_exp == 0 && self.p_exp.is_zero()
    }

    /// True when `p_exp` is an integer, i.e. the element lies in Q_p^x itself.
    pub fn is_genuine(&self) -> bool {
        self.p_exp.is_integer()
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.p != o.p {
            return Err(Error::PrimeMismatch);
        }
        let exact = match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => {
                let mut a = a.clone();
                add_exact(&mut a, b, &BigRational::one());
                Some(a)
            }
            _ => None,
        };
        Ok(MultElement {
            p: self.p,
            n: self.n.max(o.n),
            zeta_exp: (self.zeta_exp + o.zeta_exp) % (self.p - 1),
            p_exp: &self.p_exp + &o.p_exp,
            unit_coord: &self.unit_coord + &o.unit_coord,
            exact,
        })
    }

    pub fn inverse(&self) -> Self {
        self.pow_int(&BigInt::from(-1))
    }

    pub fn pow_int(&self, e: &BigInt) -> Self {
        let m = BigInt::from(self.p - 1);
        let z = (BigInt::from(self.zeta_exp) * e).mod_floor(&m).to_u64().unwrap();
        let er = BigRational::from_integer(e.clone());
        let exact = self.exact.as_ref().map(|x| {
            let mut out = UnitExponents::new();
            add_exact(&mut out, x, &er);
            out
        });
        MultElement {
            p: self.p,
            n: self.n,
            zeta_exp: z,
            p_exp: &self.p_exp * &er,
            unit_coord: &self.unit_coord * &PadicNumber::from_integer(e.clone(), self.p, self.n),
            exact,
        }
    }

    pub fn pow_rational(&self, e: &BigRational) -> Result<Self> {
        if e.is_integer() {
            return Ok(self.pow_int(e.numer()));
        }
        if self.zeta_exp != 0 {
            return Err(Error::FractionalTorsion);
        }
        let t = &self.unit_coord * &PadicNumber::from_rational_unchecked(e, self.p, self.n);
        if t.valuation().is_some_and(|v| v < 0) {
            return Err(Error::IllegalExponent(format!("exponent {e} leaves the principal units")));
        }
        let exact = self.exact.as_ref().map(|x| {
            let mut out = UnitExponents::new();
            add_exact(&mut out, x, e);
            out
        });
        Ok(MultElement { p_exp: &self.p_exp * e, unit_coord: t, exact, ..self.clone() })
    }

    /// Power with an exponent in Q(sqrt d); irrational exponents need a principal unit.
    pub fn pow_quad(&self, e: &QuadNum) -> Result<Self> {
        if e.is_rational() {
            return self.pow_rational(e.rat_part());
        }
        if !self.is_principal_unit() {
            return Err(Error::IllegalExponent(format!("sqrt-valued exponent {e} on a non-principal base")));
        }
        let ep = embed_quad(e, self.p, self.n)?;
        let t = &self.unit_coord * &ep;
        let exact = match &self.exact {
            Some(x) if x.keys().all(|(_, d)| d.is_one()) => {
                let mut out = UnitExponents::new();
                for ((a, _), c) in x {
                    if !e.rat_part().is_zero() {
                        out.insert((a.clone(), BigInt::one()), c * e.rat_part());
                    }
                    out.insert((a.clone(), e.radicand().clone()), c * e.irr_part());
                }
                Some(out)
            }
            _ => None,
        };
        Ok(MultElement { unit_coord: t, exact, ..self.clone() })
    }

    /// Power with a p-adic integer exponent (principal units only).
    pub fn pow_padic(&self, e: &PadicNumber) -> Result<Self> {
        if !self.is_principal_unit() {
            return Err(Error::PadicExponentOnNonunit);
        }
        if e.valuation().is_some_and(|v| v < 0) {
            return Err(Error::IllegalExponent("p-adic exponent must lie in Z_p".into()));
        }
        Ok(MultElement { unit_coord: &self.unit_coord * e, exact: None, ..self.clone() })
    }

    /// `log_p` of the element; roots of unity and `p` contribute nothing.
    pub fn log_of(&self) -> PadicNumber {
        &self.unit_coord * &log1p(self.p, self.n)
    }

    pub fn ord_of(&self) -> BigRational {
        self.p_exp.clone()
    }

    /// Coordinate equality; exact parts are compared when both are present.
    pub fn same_as(&self, o: &Self) -> bool {
        if self.p != o.p || self.zeta_exp != o.zeta_exp || self.p_exp != o.p_exp {
            return false;
        }
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.unit_coord.eq_at_precision(&o.unit_coord),
        }
    }

    /// Recomputes the principal coordinate from the exact part, if present.
    pub fn refresh(&self) -> Result<Self> {
        match &self.exact {
            Some(ex) => Ok(MultElement { unit_coord: exact_coord(self.p, self.n, ex)?, ..self.clone() }),
            None => Ok(self.clone()),
        }
    }

    pub fn gamma(&self, ell: u64) -> CompletionElement {
        let p = self.p;
        if ell == p {
            return CompletionElement {
                ell,
                modulus: p - 1,
                torsion: self.zeta_exp,
                p_exp: self.p_exp.clone(),
                unit_coord: Some(self.unit_coord.clone()),
            };
        }
        let m = arith::prime_to_part(p - 1, ell);
        CompletionElement {
            ell,
            modulus: m,
            torsion: self.zeta_exp % m,
            p_exp: self.p_exp.clone(),
            unit_coord: None,
        }
    }
}

impl fmt::Display for MultElement {
    /// Writes the element back in the entry grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        if self.zeta_exp != 0 {
            terms.push(format!("zeta^{}", self.zeta_exp));
        }
        if !self.p_exp.is_zero() {
            if self.p_exp.is_integer() {
                terms.push(format!("p^{}", self.p_exp));
            } else {
                terms.push(format!("p^({})", self.p_exp));
            }
        }
        let pm1 = self.p - 1;
        match &self.exact {
            Some(ex) => {
                // a^(p-1) is a principal unit, so any exponent is legal on it
                let mut by_key: BTreeMap<(BigInt, BigInt), QuadNum> = BTreeMap::new();
                for ((a, d), c) in ex {
                    let c = c / BigRational::from_integer(pm1.into());
                    let rad = if d.is_one() { (a.clone(), BigInt::one()) } else { (a.clone(), d.clone()) };
                    let q = if d.is_one() {
                        QuadNum::rational(c)
                    } else {
                        QuadNum::new(BigRational::zero(), c, d.clone())
                    };
                    by_key.insert(rad, q);
                }
                for ((a, _), q) in by_key {
                    terms.push(format!("({a}^{pm1})^({q})"));
                }
            }
            None => {
                if !self.unit_coord.is_zero() {
                    terms.push(format!("(1+p)^({})", self.unit_coord.to_rational()));
                }
            }
        }
        if terms.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", terms.join(" * "))
    }
}

impl Serialize for MultElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn rational_str<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Image under the l-adic completion map.
#[derive(Clone, Debug, Serialize)]
pub struct CompletionElement {
    pub ell: u64,
    /// Torsion modulus: prime-to-l part of p-1 (all of p-1 when l = p).
    pub modulus: u64,
    pub torsion: u64,
    #[serde(serialize_with = "rational_str")]
    pub p_exp: BigRational,
    pub unit_coord: Option<PadicNumber>,
}

impl CompletionElement {
    pub fn mul(&self, o: &Self) -> Self {
        let unit_coord = match (&self.unit_coord, &o.unit_coord) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        CompletionElement {
            ell: self.ell,
            modulus: self.modulus,
            torsion: (self.torsion + o.torsion) % self.modulus,
            p_exp: &self.p_exp + &o.p_exp,
            unit_coord,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.torsion == 0
            && self.p_exp.is_zero()
            && self.unit_coord.as_ref().is_none_or(|u| u.is_zero())
    }

    pub fn same_as(&self, o: &Self) -> bool {
        self.ell == o.ell
            && self.modulus == o.modulus
            && self.torsion == o.torsion
            && self.p_exp == o.p_exp
            && match (&self.unit_coord, &o.unit_coord) {
                (Some(a), Some(b)) => a.eq_at_precision(b),
                (None, None) => true,
                _ => false,
            }
    }
}

/// The exact exponent vector of an element over the generator list
/// `["p", (a, d), ...]`; `None` without an exact part.
pub fn exponent_vector(x: &MultElement, gens: &[(BigInt, BigInt)]) -> Option<Vec<BigRational>> {
    let ex = x.exact()?;
    if ex.keys().any(|k| !gens.contains(k)) {
        return None;
    }
    let mut v = vec![x.p_exp().clone()];
    for g in gens {
        v.push(ex.get(g).cloned().unwrap_or_else(BigRational::zero));
    }
    Some(v)
}

/// Sorted union of exact generator keys; `None` if any element lacks an exact part.
pub fn generator_list<'a>(xs: impl IntoIterator<Item = &'a MultElement>) -> Option<Vec<(BigInt, BigInt)>> {
    let mut keys = std::collections::BTreeSet::new();
    for x in xs {
        keys.extend(x.exact()?.keys().cloned());
    }
    Some(keys.into_iter().collect())
}
