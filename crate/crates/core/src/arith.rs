//! Small integer helpers: primality, primitive roots, discrete logs, factoring.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of a 64-bit integer, by trial division.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q.saturating_mul(q) <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn smallest_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let fac = prime_factors_u64(p - 1);
    (2..p)
        .find(|&g| fac.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("a prime has a primitive root")
}

/// Largest divisor of `n` coprime to `ell`.
pub fn prime_to_part(mut n: u64, ell: u64) -> u64 {
    if ell < 2 {
        return n;
    }
    while n.is_multiple_of(ell) && n > 0 {
        n /= ell;
    }
    n
}

/// Baby-step tables keyed by `(g, p)`: giant-step size and the baby steps.
type DlogTables = HashMap<(u64, u64), (u64, HashMap<u64, u64>)>;

thread_local! {
    static DLOG_TABLES: RefCell<DlogTables> = RefCell::new(HashMap::new());
}

/// Discrete log of `x` to base `g` modulo the prime `p` (baby-step giant-step).
pub fn discrete_log(g: u64, x: u64, p: u64) -> u64 {
    let order = p - 1;
    let m = (order as f64).sqrt().ceil() as u64 + 1;
    DLOG_TABLES.with(|cell| {
        let mut tables = cell.borrow_mut();
        let (_, baby) = tables.entry((g, p)).or_insert_with(|| {
            let mut t = HashMap::with_capacity(m as usize);
            let mut cur = 1u64;
            for j in 0..m {
                t.entry(cur).or_insert(j);
                cur = mul_mod(cur, g, p);
            }
            (m, t)
        });
        // giant step factor g^{-m}
        let factor = pow_mod(pow_mod(g, m, p), order - 1, p);
        let mut gamma = x % p;
        for i in 0..=m {
            if let Some(&j) = baby.get(&gamma) {
                return (i * m + j) % order;
            }
            gamma = mul_mod(gamma, factor, p);
        }
        unreachable!("element is not in the group generated by g")
    })
}

/// Square root of a quadratic residue `a` modulo an odd prime `p`.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p < (1 << 16) {
        return (1..p).find(|&x| mul_mod(x, x, p) == a);
    }
    // Tonelli-Shanks
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Factorisation of a positive integer. Returns `(factors, complete)`;
/// if trial division hits its budget, the leftover cofactor is returned as
/// a single (possibly composite) factor and `complete` is false.
pub fn factor_bigint(n: &BigInt) -> (Vec<(BigInt, u32)>, bool) {
    const BUDGET: u64 = 2_000_000;
    let mut n = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    if n.is_zero() {
        return (out, true);
    }
    let mut q = 2u64;
    while q <= BUDGET {
        let qb = BigInt::from(q);
        if &qb * &qb > n {
            break;
        }
        let mut e = 0;
        loop {
            let (d, r) = n.div_rem(&qb);
            if !r.is_zero() {
                break;
            }
            n = d;
            e += 1;
        }
        if e > 0 {
            out.push((qb, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    let mut complete = true;
    if n > BigInt::one() {
        let qb = BigInt::from(q);
        if &qb * &qb <= n {
            complete = false;
        }
        out.push((n, 1));
    }
    (out, complete)
}

/// Writes `n = s^2 * d` with `d` squarefree (sign kept in `d`).
pub fn squarefree_split(n: &BigInt) -> (BigInt, BigInt) {
    let (fac, _) = factor_bigint(n);
    let mut s = BigInt::one();
    let mut d = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for (q, e) in fac {
        s *= q.pow(e / 2);
        if e % 2 == 1 {
            d *= q;
        }
    }
    (s, d)
}

pub fn ilog(n: u64, base: u64) -> u32 {
    let mut k = 0;
    let mut m = n;
    while m >= base {
        m /= base;
        k += 1;
    }
    k
}

pub fn to_u64(x: &BigInt) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(smallest_primitive_root(7), 3);
        assert_eq!(smallest_primitive_root(13), 2);
        assert_eq!(smallest_primitive_root(11), 2);
    }

    #[test]
    fn dlog_roundtrip() {
        for p in [7u64, 13, 101, 65537] {
            let g = smallest_primitive_root(p);
            for x in [1u64, 2, 5, p - 1] {
                let e = discrete_log(g, x, p);
                assert_eq!(pow_mod(g, e, p), x % p);
            }
        }
    }

    #[test]
    fn square_roots() {
        assert_eq!(sqrt_mod(4, 7), Some(2));
        assert_eq!(sqrt_mod(8, 11), None);
        let p = 1_000_000_007u64;
        let a = mul_mod(123_456_789, 123_456_789, p);
        let r = sqrt_mod(a, p).unwrap();
        assert_eq!(mul_mod(r, r, p), a);
    }

    #[test]
    fn squarefree() {
        let (s, d) = squarefree_split(&BigInt::from(-12));
        assert_eq!((s, d), (BigInt::from(2), BigInt::from(-3)));
        assert_eq!(prime_to_part(6, 3), 2);
        assert_eq!(prime_to_part(6, 5), 6);
    }
}
