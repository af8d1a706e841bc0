//! Linear algebra over Q, Z and Q_p.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{ppow, PadicNumber};

/// Guard digits required before a p-adic rank decision counts as certified.
pub const CERT_MARGIN: i64 = 16;

fn rzero() -> BigRational {
    BigRational::zero()
}

fn rint(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![rzero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        RationalMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rint(x)).collect()).collect())
    }

    pub fn from_bigints(rows: &[Vec<BigInt>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigRational> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[BigRational] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = out.get(i, j) + a * o.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            for j in 0..m.cols {
                m.data.swap(r * m.cols + j, piv * m.cols + j);
            }
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Right kernel, as reduced-echelon row vectors.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let (m, pivots) = self.rref();
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![rzero(); self.cols];
            v[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(r, f).clone();
            }
            basis.push(v);
        }
        echelon_rows(basis)
    }

    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| !m.get(i, c).is_zero()) else { return rzero() };
            if piv != c {
                for j in 0..n {
                    m.data.swap(c * n + j, piv * n + j);
                }
                det = -det;
            }
            let pv = m.get(c, c).clone();
            det *= &pv;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) / &pv;
                for j in c..n {
                    let v = m.get(i, j) - &f * m.get(c, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, BigRational::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Integer entries, if integral.
    pub fn to_integers(&self) -> Option<Vec<Vec<BigInt>>> {
        if !self.is_integral() {
            return None;
        }
        Some(self.to_rows().into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect())
    }

    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        (1..=self.rows).all(|k| {
            let mut sub = Self::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    sub.set(i, j, self.get(i, j).clone());
                }
            }
            sub.det().is_positive()
        })
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_rows()
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

/// Reduced echelon form of a list of rational row vectors, zero rows dropped.
pub fn echelon_rows(rows: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    if rows.is_empty() {
        return rows;
    }
    let (m, pivots) = RationalMatrix::from_rows(rows).rref();
    (0..pivots.len()).map(|i| m.row(i)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicMatrix {
    rows: usize,
    cols: usize,
    p: u64,
    n: u32,
    data: Vec<PadicNumber>,
}

impl PadicMatrix {
    pub fn zeros(rows: usize, cols: usize, p: u64, n: u32) -> Self {
        PadicMatrix { rows, cols, p, n, data: vec![PadicNumber::zero(p, n); rows * cols] }
    }

    pub fn identity(k: usize, p: u64, n: u32) -> Self {
        let mut m = Self::zeros(k, k, p, n);
        for i in 0..k {
            m.data[i * k + i] = PadicNumber::one(p, n);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<PadicNumber>>, p: u64, n: u32) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        let data: Vec<PadicNumber> = rows.into_iter().flatten().collect();
        assert!(data.iter().all(|x| x.prime() == p), "mixed primes");
        PadicMatrix { rows: r, cols: c, p, n, data }
    }

    pub fn from_rational(m: &RationalMatrix, p: u64, n: u32) -> Self {
        PadicMatrix {
            rows: m.rows,
            cols: m.cols,
            p,
            n,
            data: m.data.iter().map(|x| PadicNumber::from_rational_unchecked(x, p, n)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &PadicNumber {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PadicNumber) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<PadicNumber> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<PadicNumber> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<PadicNumber>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.p, self.n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, o.cols, self.p, self.n.max(o.n));
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = PadicNumber::zero(self.p, self.n);
                for k in 0..self.cols {
                    acc = &acc + &(self.get(i, k) * o.get(k, j));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[PadicNumber]) -> Vec<PadicNumber> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(PadicNumber::zero(self.p, self.n), |acc, k| &acc + &(self.get(i, k) * &v[k]))
            })
            .collect()
    }

    pub fn sub(&self, o: &Self) -> Self {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        PadicMatrix { data, ..self.clone() }
    }

    pub fn scale(&self, c: &PadicNumber) -> Self {
        PadicMatrix { data: self.data.iter().map(|x| x * c).collect(), ..self.clone() }
    }

    /// Entrywise equality at the available precision.
    pub fn eq_at_precision(&self, o: &Self) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data.iter().zip(&o.data).all(|(a, b)| a.eq_at_precision(b))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Smallest absolute precision among nonzero entries.
    pub fn abs_floor(&self) -> i64 {
        self.data.iter().filter_map(|x| x.abs_precision()).min().unwrap_or(self.n as i64)
    }
}

impl Serialize for PadicMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelResult {
    pub dimension: usize,
    pub rank: usize,
    /// Reduced-echelon basis vectors.
    pub basis: Vec<Vec<PadicNumber>>,
    pub certified: bool,
    pub precision_margin: i64,
}

struct Elimination {
    rank: usize,
    /// Row-reduced copy; pivot `k` sits in row `k`, column `pivot_cols[k]`.
    m: PadicMatrix,
    pivot_cols: Vec<usize>,
    margin: i64,
}

fn abs_of(x: &PadicNumber, tracked: Option<i64>) -> Option<i64> {
    if x.is_zero() {
        tracked
    } else {
        x.abs_precision()
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Gaussian elimination with minimal-valuation full pivoting. Zeros produced
/// by cancellation keep the absolute precision they were known to.
fn eliminate(a: &PadicMatrix) -> Elimination {
    let (rows, cols) = (a.rows, a.cols);
    let mut m = a.clone();
    // absolute precision of entries that have cancelled to zero
    let mut known: Vec<Option<i64>> = vec![None; rows * cols];
    let mut pivot_cols = Vec::new();
    let mut used = vec![false; cols];
    let floor = a.abs_floor();
    let mut max_pivot_val: Option<i64> = None;
    for r in 0..rows.min(cols) {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in r..rows {
            for j in (0..cols).filter(|&j| !used[j]) {
                if let Some(v) = m.get(i, j).valuation() {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        if pi != r {
            for j in 0..cols {
                m.data.swap(r * cols + j, pi * cols + j);
                known.swap(r * cols + j, pi * cols + j);
            }
        }
        used[pj] = true;
        pivot_cols.push(pj);
        max_pivot_val = Some(max_pivot_val.map_or(v, |x: i64| x.max(v)));
        let inv = m.get(r, pj).inverse().expect("pivot is nonzero");
        for i in r + 1..rows {
            if m.get(i, pj).is_zero() {
                continue;
            }
            let f = m.get(i, pj) * &inv;
            for j in (0..cols).filter(|&j| j != pj) {
                let prod = &f * m.get(r, j);
                let abs_prod = if prod.is_zero() {
                    min_opt(
                        abs_of(m.get(r, j), known[r * cols + j]).map(|x| x + f.valuation().unwrap()),
                        None,
                    )
                } else {
                    prod.abs_precision()
                };
                let old_abs = abs_of(m.get(i, j), known[i * cols + j]);
                let new = m.get(i, j) - &prod;
                if new.is_zero() {
                    known[i * cols + j] = min_opt(old_abs, abs_prod);
                }
                m.set(i, j, new);
            }
            m.set(i, pj, PadicNumber::zero(a.p, a.n));
            known[i * cols + pj] = None;
        }
    }
    let rank = pivot_cols.len();
    let mut residual: Option<i64> = None;
    for i in rank..rows {
        for j in (0..cols).filter(|&j| !used[j]) {
            residual = min_opt(residual, known[i * cols + j]);
        }
    }
    let top = residual.map_or(floor, |x| x.min(floor));
    let margin = top - max_pivot_val.unwrap_or(0).max(0);
    Elimination { rank, m, pivot_cols, margin }
}

/// Determinant by elimination with minimal-valuation pivots.
pub fn padic_det(a: &PadicMatrix) -> PadicNumber {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut det = PadicNumber::one(a.p, a.n);
    for c in 0..n {
        let piv = (c..n).filter(|&i| !m.get(i, c).is_zero()).min_by_key(|&i| m.get(i, c).valuation().unwrap());
        let Some(pi) = piv else { return PadicNumber::zero(a.p, a.n) };
        if pi != c {
            for j in 0..n {
                m.data.swap(c * n + j, pi * n + j);
            }
            det = -&det;
        }
        let pv = m.get(c, c).clone();
        det = &det * &pv;
        let inv = pv.inverse().expect("nonzero pivot");
        for i in c + 1..n {
            if m.get(i, c).is_zero() {
                continue;
            }
            let f = m.get(i, c) * &inv;
            for j in c..n {
                let v = m.get(i, j) - &(&f * m.get(c, j));
                m.set(i, j, v);
            }
        }
    }
    det
}

/// Reduced echelon form of p-adic row vectors (leading coefficient 1, leftmost pivot).
pub fn padic_echelon(rows: Vec<Vec<PadicNumber>>) -> Vec<Vec<PadicNumber>> {
    let mut rows = rows;
    let Some(width) = rows.first().map(|r| r.len()) else { return rows };
    let mut out_rank = 0;
    for c in 0..width {
        // minimal valuation in this column for stability
        let mut best: Option<(i64, usize)> = None;
        for (i, r) in rows.iter().enumerate().skip(out_rank) {
            if let Some(v) = r[c].valuation() {
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, i));
                }
            }
        }
        let Some((_, pi)) = best else { continue };
        rows.swap(out_rank, pi);
        let inv = rows[out_rank][c].inverse().expect("nonzero");
        let piv: Vec<PadicNumber> = rows[out_rank].iter().map(|x| x * &inv).collect();
        for (i, r) in rows.iter_mut().enumerate() {
            if i == out_rank || r[c].is_zero() {
                continue;
            }
            let f = r[c].clone();
            for (x, y) in r.iter_mut().zip(&piv) {
                *x = &*x - &(&f * y);
            }
            r[c] = PadicNumber::zero(f.prime(), f.requested());
        }
        rows[out_rank] = piv;
        out_rank += 1;
        if out_rank == rows.len() {
            break;
        }
    }
    rows.truncate(out_rank);
    rows
}

/// Right kernel of a p-adic matrix.
pub fn padic_kernel(a: &PadicMatrix) -> Result<KernelResult> {
    let e = eliminate(a);
    if e.margin <= 0 {
        return Err(Error::PrecisionExhausted(format!(
            "rank decision has no guard digits (margin {})",
            e.margin
        )));
    }
    let cols = a.cols;
    let free: Vec<usize> = (0..cols).filter(|c| !e.pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut x = vec![PadicNumber::zero(a.p, a.n); cols];
        x[f] = PadicNumber::one(a.p, a.n);
        for k in (0..e.rank).rev() {
            let pc = e.pivot_cols[k];
            let mut s = PadicNumber::zero(a.p, a.n);
            for j in (0..cols).filter(|&j| j != pc) {
                if !x[j].is_zero() {
                    s = &s + &(e.m.get(k, j) * &x[j]);
                }
            }
            x[pc] = -&s.checked_div(e.m.get(k, pc))?;
        }
        basis.push(x);
    }
    let basis = padic_echelon(basis);
    Ok(KernelResult {
        dimension: basis.len(),
        rank: e.rank,
        basis,
        certified: e.margin >= CERT_MARGIN,
        precision_margin: e.margin,
    })
}

/// Rank of a set of row vectors, with its margin.
pub fn padic_rank(rows: &[Vec<PadicNumber>], p: u64, n: u32) -> (usize, i64) {
    if rows.is_empty() {
        return (0, n as i64);
    }
    let e = eliminate(&PadicMatrix::from_rows(rows.to_vec(), p, n));
    (e.rank, e.margin)
}

/// Row vectors `w` with `<v, w> = 0` for every given `v`, i.e. the
/// linear forms vanishing on their span.
pub fn annihilator(vectors: &[Vec<PadicNumber>], dim: usize, p: u64, n: u32) -> Result<Vec<Vec<PadicNumber>>> {
    if vectors.is_empty() {
        return Ok((0..dim)
            .map(|i| (0..dim).map(|j| if i == j { PadicNumber::one(p, n) } else { PadicNumber::zero(p, n) }).collect())
            .collect());
    }
    Ok(padic_kernel(&PadicMatrix::from_rows(vectors.to_vec(), p, n))?.basis)
}

/// Kernel of `M -> L_A M - M L_B` on g x h matrices (row-major vectorisation).
pub fn sylvester_kernel(la: &PadicMatrix, lb: &PadicMatrix) -> Result<KernelResult> {
    let (g, h) = (la.rows, lb.rows);
    if la.cols != g || lb.cols != h {
        return Err(Error::DimensionMismatch("Sylvester inputs must be square".into()));
    }
    if la.p != lb.p {
        return Err(Error::PrimeMismatch);
    }
    let (p, n) = (la.p, la.n.max(lb.n));
    let mut sys = PadicMatrix::zeros(g * h, g * h, p, n);
    for i in 0..g {
        for j in 0..h {
            let row = i * h + j;
            for k in 0..g {
                let v = sys.get(row, k * h + j) + la.get(i, k);
                sys.set(row, k * h + j, v);
            }
            for k in 0..h {
                let v = sys.get(row, i * h + k) - lb.get(k, j);
                sys.set(row, i * h + k, v);
            }
        }
    }
    padic_kernel(&sys)
}

/// Height bound used when lifting p-adic spans to Q: `p^floor(prec/4)`,
/// so a chance reconstruction of an irrational entry has probability
/// about `p^(-prec/2)`.
pub fn subspace_height(p: u64, prec: u32) -> BigInt {
    ppow(p, prec / 4)
}

/// Largest rational subspace detected inside a p-adic span: each reduced
/// echelon basis vector is reconstructed entrywise; vectors that fail are
/// dropped, survivors are checked to lie in the span.
pub fn rational_subspace(k: &KernelResult, h: &BigInt) -> Result<Vec<Vec<BigRational>>> {
    let mut out = Vec::new();
    'vec: for v in &k.basis {
        let mut w = Vec::with_capacity(v.len());
        for x in v {
            match x.rational_reconstruct(h)? {
                Some(r) => w.push(r),
                None => continue 'vec,
            }
        }
        out.push(w);
    }
    if let (Some(first), false) = (k.basis.first(), out.is_empty()) {
        let (p, n) = (first[0].prime(), first[0].requested());
        let (base_rank, _) = padic_rank(&k.basis, p, n);
        let mut all = k.basis.clone();
        for w in &out {
            all.push(w.iter().map(|x| PadicNumber::from_rational_unchecked(x, p, n)).collect());
        }
        if padic_rank(&all, p, n).0 != base_rank {
            return Ok(Vec::new());
        }
    }
    Ok(echelon_rows(out))
}

// ---------------------------------------------------------------------------
// integer matrices

pub type IntMatrix = Vec<Vec<BigInt>>;

/// Integers (and nestings of them) serialized as decimal strings.
pub trait AsDecimal {
    type Out: Serialize;
    fn as_decimal(&self) -> Self::Out;
}

impl AsDecimal for BigInt {
    type Out = String;
    fn as_decimal(&self) -> String {
        self.to_string()
    }
}

impl<T: AsDecimal> AsDecimal for Vec<T> {
    type Out = Vec<T::Out>;
    fn as_decimal(&self) -> Self::Out {
        self.iter().map(AsDecimal::as_decimal).collect()
    }
}

impl<T: AsDecimal> AsDecimal for Option<T> {
    type Out = Option<T::Out>;
    fn as_decimal(&self) -> Self::Out {
        self.as_ref().map(AsDecimal::as_decimal)
    }
}

pub fn decimal<T: AsDecimal, S: serde::Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.as_decimal().serialize(s)
}

pub fn int_identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn int_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..m).map(|j| row.iter().zip(b).map(|(x, br)| x * &br[j]).sum()).collect())
        .collect()
}

fn int_det(a: &IntMatrix) -> BigInt {
    RationalMatrix::from_bigints(a).det().to_integer()
}

fn col_op(m: &mut IntMatrix, dst: usize, src: usize, f: &BigInt) {
    for row in m.iter_mut() {
        let v = &row[src] * f;
        row[dst] -= v;
    }
}

fn col_swap(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn col_neg(m: &mut IntMatrix, a: usize) {
    for row in m.iter_mut() {
        row[a] = -&row[a];
    }
}

fn row_op(m: &mut IntMatrix, dst: usize, src: usize, f: &BigInt) {
    let s = m[src].clone();
    for (x, y) in m[dst].iter_mut().zip(&s) {
        *x -= y * f;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HermiteSmith {
    /// Column-style Hermite form `H = A V_h`.
    #[serde(serialize_with = "decimal")]
    pub hermite: IntMatrix,
    #[serde(serialize_with = "decimal")]
    pub hermite_transform: IntMatrix,
    /// Smith form `S = U A V`.
    #[serde(serialize_with = "decimal")]
    pub smith: IntMatrix,
    #[serde(serialize_with = "decimal")]
    pub u: IntMatrix,
    #[serde(serialize_with = "decimal")]
    pub v: IntMatrix,
}

impl HermiteSmith {
    /// Nonzero diagonal entries of the Smith form.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        (0..self.smith.len().min(self.smith.first().map_or(0, |r| r.len())))
            .map(|i| self.smith[i][i].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }
}

/// Column Hermite normal form: returns `(H, V)` with `H = A V`, `V` unimodular.
pub fn hermite_columns(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut h = a.clone();
    let mut v = int_identity(cols);
    let mut c = 0;
    for i in 0..rows {
        if c == cols {
            break;
        }
        loop {
            // smallest absolute value, then leftmost
            let piv = (c..cols)
                .filter(|&j| !h[i][j].is_zero())
                .min_by(|&x, &y| h[i][x].abs().cmp(&h[i][y].abs()).then(x.cmp(&y)));
            let Some(pj) = piv else { break };
            let mut done = true;
            for j in c..cols {
                if j != pj && !h[i][j].is_zero() {
                    let q = h[i][j].div_floor(&h[i][pj]);
                    col_op(&mut h, j, pj, &q);
                    col_op(&mut v, j, pj, &q);
                    if !h[i][j].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                col_swap(&mut h, c, pj);
                col_swap(&mut v, c, pj);
                break;
            }
        }
        if h[i][c].is_zero() {
            continue;
        }
        if h[i][c].is_negative() {
            col_neg(&mut h, c);
            col_neg(&mut v, c);
        }
        for j in 0..c {
            let q = h[i][j].div_floor(&h[i][c]);
            if !q.is_zero() {
                col_op(&mut h, j, c, &q);
                col_op(&mut v, j, c, &q);
            }
        }
        c += 1;
    }
    (h, v)
}

/// Smith normal form `S = U A V` with unimodular `U`, `V`.
pub fn smith(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut s = a.clone();
    let mut u = int_identity(rows);
    let mut v = int_identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(BigInt, usize, usize)> = None;
            for j in t..cols {
                for (i, row) in s.iter().enumerate().skip(t) {
                    let x = row[j].abs();
                    if !x.is_zero() && best.as_ref().is_none_or(|(b, _, _)| x < *b) {
                        best = Some((x, i, j));
                    }
                }
            }
            let Some((_, pi, pj)) = best else { return (s, u, v) };
            s.swap(t, pi);
            u.swap(t, pi);
            col_swap(&mut s, t, pj);
            col_swap(&mut v, t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                let q = s[i][t].div_floor(&s[t][t]);
                row_op(&mut s, i, t, &q);
                row_op(&mut u, i, t, &q);
                clean &= s[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = s[t][j].div_floor(&s[t][t]);
                col_op(&mut s, j, t, &q);
                col_op(&mut v, j, t, &q);
                clean &= s[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s[i][j].is_multiple_of(&s[t][t])));
            match bad {
                Some(i) => {
                    let m1 = -BigInt::one();
                    row_op(&mut s, t, i, &m1);
                    row_op(&mut u, t, i, &m1);
                }
                None => break,
            }
        }
        if s[t][t].is_negative() {
            for x in s[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    (s, u, v)
}

pub fn hermite_smith(a: &IntMatrix) -> HermiteSmith {
    let (hermite, hermite_transform) = hermite_columns(a);
    let (smith, u, v) = smith(a);
    HermiteSmith { hermite, hermite_transform, smith, u, v }
}

/// Z-basis of `{x in Z^n : A x = 0}`.
pub fn integer_kernel(a: &IntMatrix, n: usize) -> Vec<Vec<BigInt>> {
    if a.is_empty() {
        return int_identity(n);
    }
    let (h, v) = hermite_columns(a);
    (0..n).filter(|&j| h.iter().all(|r| r[j].is_zero())).map(|j| v.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Clears denominators row by row.
pub fn integral_rows(rows: &[Vec<BigRational>]) -> IntMatrix {
    rows.iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            r.iter().map(|x| (x * BigRational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

/// Integer points of the Q-span of the given rational vectors.
pub fn saturate(rows: &[Vec<BigRational>], n: usize) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    // span = kernel of its annihilator
    let ann = RationalMatrix::from_rows(rows.to_vec()).kernel();
    let ann = integral_rows(&ann);
    let k = integer_kernel(&ann, n);
    let (h, _) = hermite_columns(&transpose_int(&k));
    // columns of the Hermite form give a canonical basis
    let r = k.len();
    (0..r).map(|j| h.iter().map(|row| row[j].clone()).collect()).filter(|v: &Vec<BigInt>| v.iter().any(|x| !x.is_zero())).collect()
}

pub fn transpose_int(a: &[Vec<BigInt>]) -> IntMatrix {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn is_unimodular(a: &IntMatrix) -> bool {
    a.len() == a.first().map_or(0, |r| r.len()) && int_det(a).abs().is_one()
}

// ---------------------------------------------------------------------------
// exponent lattices

/// Exponent layers of a period matrix over a shared generator list: layer `c`
/// holds the `c`-th coordinate of every entry.
#[derive(Clone, Debug)]
pub struct ExponentLattice {
    pub generators: Vec<String>,
    pub layers: Vec<RationalMatrix>,
}

impl ExponentLattice {
    pub fn size(&self) -> usize {
        self.layers.first().map_or(0, |l| l.rows)
    }
}

/// All rational `M` (g x h) with `E_A M = N E_B` on every layer for some rational `N`.
pub fn exact_span_solve(a: &ExponentLattice, b: &ExponentLattice) -> Result<Vec<RationalMatrix>> {
    if a.generators != b.generators {
        return Err(Error::GeneratorMismatch);
    }
    let (g, h) = (a.size(), b.size());
    let nm = g * h;
    let mut rows = Vec::new();
    for (la, lb) in a.layers.iter().zip(&b.layers) {
        for i in 0..g {
            for j in 0..h {
                let mut r = vec![rzero(); 2 * nm];
                for k in 0..g {
                    r[k * h + j] += la.get(i, k);
                }
                for k in 0..h {
                    r[nm + i * h + k] -= lb.get(k, j);
                }
                rows.push(r);
            }
        }
    }
    let sys = RationalMatrix::from_rows(rows);
    let ker = sys.kernel();
    let projected: Vec<Vec<BigRational>> = ker.into_iter().map(|v| v[..nm].to_vec()).collect();
    let basis = echelon_rows(projected);
    Ok(basis.into_iter().map(|v| RationalMatrix { rows: g, cols: h, data: v }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(x: i64) -> PadicNumber {
        PadicNumber::from_integer(x, 7, 40)
    }

    fn bi(rows: &[Vec<i64>]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn kernel_examples() {
        let k = padic_kernel(&PadicMatrix::zeros(1, 1, 7, 40)).unwrap();
        assert_eq!(k.dimension, 1);
        let k = padic_kernel(&PadicMatrix::identity(3, 7, 40)).unwrap();
        assert_eq!(k.dimension, 0);
        assert!(k.certified);
        let a = PadicMatrix::from_rows(vec![vec![z(1), z(7)], vec![z(7), z(49)]], 7, 40);
        let k = padic_kernel(&a).unwrap();
        assert_eq!(k.dimension, 1);
        // (-p, 1) scaled to a leading 1
        let v = &k.basis[0];
        assert!(v[0].eq_at_precision(&z(1)));
        assert!((&v[1] * &z(-7)).eq_at_precision(&z(1)));
        assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn kernel_detects_missing_guard_digits() {
        // second row equals p^39 times the first up to the last digit
        let a = PadicMatrix::from_rows(vec![vec![z(1), z(1)], vec![PadicNumber::from_integer(BigInt::from(7).pow(39u32), 7, 40), z(0)]], 7, 40);
        let k = padic_kernel(&a).unwrap();
        assert_eq!(k.dimension, 0);
        assert!(!k.certified);
    }

    #[test]
    fn sylvester_examples() {
        let zero = PadicMatrix::zeros(1, 1, 7, 40);
        assert_eq!(sylvester_kernel(&zero, &zero).unwrap().dimension, 1);
        let l = crate::mult::log1p(7, 40);
        let lb = PadicMatrix::from_rows(vec![vec![l]], 7, 40);
        assert_eq!(sylvester_kernel(&zero, &lb).unwrap().dimension, 0);
    }

    #[test]
    fn rational_subspace_examples() {
        let s = z(-3).hensel_sqrt().unwrap();
        let h = BigInt::from(1_000_000);
        let one = z(1);
        let k = KernelResult { dimension: 1, rank: 0, basis: vec![vec![one.clone(), s.clone()]], certified: true, precision_margin: 40 };
        assert!(rational_subspace(&k, &h).unwrap().is_empty());
        let both = padic_echelon(vec![vec![one.clone(), s.clone()], vec![one.clone(), -&s]]);
        let k = KernelResult { dimension: 2, rank: 0, basis: both, certified: true, precision_margin: 40 };
        assert_eq!(rational_subspace(&k, &h).unwrap().len(), 2);
        let r = PadicNumber::from_rational_unchecked(&BigRational::new(22.into(), 7.into()), 7, 40);
        let k = KernelResult { dimension: 1, rank: 0, basis: vec![vec![one, r]], certified: true, precision_margin: 40 };
        assert_eq!(rational_subspace(&k, &h).unwrap()[0][1], BigRational::new(22.into(), 7.into()));
    }

    #[test]
    fn smith_examples() {
        let hs = hermite_smith(&bi(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(hs.elementary_divisors(), vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(int_mul(&int_mul(&hs.u, &bi(&[vec![2, 0], vec![0, 3]])), &hs.v), hs.smith);
        let hs = hermite_smith(&bi(&[vec![0]]));
        assert_eq!(hs.smith, bi(&[vec![0]]));
        let hs = hermite_smith(&int_identity(3));
        assert_eq!(hs.smith, int_identity(3));
        assert_eq!(hs.hermite, int_identity(3));
    }

    #[test]
    fn integer_kernel_and_saturation() {
        let k = integer_kernel(&bi(&[vec![2, 4]]), 2);
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] * 2 + &k[0][1] * 4, BigInt::zero());
        let half = BigRational::new(1.into(), 2.into());
        let sat = saturate(&[vec![BigRational::one(), half]], 2);
        assert_eq!(sat, vec![vec![BigInt::from(2), BigInt::from(1)]]);
    }

    #[test]
    fn exact_span_examples() {
        let gens = vec!["p".to_string()];
        let one = ExponentLattice { generators: gens.clone(), layers: vec![RationalMatrix::from_ints(&[vec![1]])] };
        assert_eq!(exact_span_solve(&one, &one).unwrap().len(), 1);
        let two = ExponentLattice { generators: gens.clone(), layers: vec![RationalMatrix::from_ints(&[vec![2]])] };
        assert_eq!(exact_span_solve(&two, &one).unwrap().len(), 1);
        // q_A = p * eps against q_B = p with eps independent
        let g2 = vec!["p".to_string(), "eps".to_string()];
        let a = ExponentLattice { generators: g2.clone(), layers: vec![RationalMatrix::from_ints(&[vec![1]]), RationalMatrix::from_ints(&[vec![1]])] };
        let b = ExponentLattice { generators: g2, layers: vec![RationalMatrix::from_ints(&[vec![1]]), RationalMatrix::from_ints(&[vec![0]])] };
        assert!(exact_span_solve(&a, &b).unwrap().is_empty());
        assert_eq!(exact_span_solve(&a, &one).unwrap_err(), Error::GeneratorMismatch);
    }
}
