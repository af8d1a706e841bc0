//! Filtered (phi, N)-modules over Q_p with rational structures.
//!
//! Matrices act on column vectors: the `j`-th column of `phi` holds the
//! coordinates of `phi(e_j)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::abeloid::{l_invariant, ord_matrix, HomKind, HomSpaceResult, PeriodMatrix};
use crate::entry::Units;
use crate::error::{Error, Result};
use crate::linalg::{
    annihilator, padic_det, padic_echelon, padic_kernel, padic_rank, rational_subspace, subspace_height,
    sylvester_kernel, KernelResult, PadicMatrix, RationalMatrix,
};
use crate::mult::QpContext;
use crate::padic::PadicNumber;
use crate::sym::{parse_expr, rational_nullity, Fact, FactSpec, SymPoly};

/// Decreasing filtration stored by its jumps: `Fil^i` is the whole space
/// below the smallest index, `steps[k]` for the smallest stored `k >= i`,
/// and zero above the largest index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Filtration {
    steps: BTreeMap<i64, Vec<Vec<PadicNumber>>>,
}

impl Filtration {
    pub fn new(steps: BTreeMap<i64, Vec<Vec<PadicNumber>>>) -> Self {
        let steps = steps.into_iter().map(|(i, vs)| (i, padic_echelon(vs))).collect();
        Filtration { steps }
    }

    pub fn steps(&self) -> &BTreeMap<i64, Vec<Vec<PadicNumber>>> {
        &self.steps
    }

    pub fn min_index(&self) -> Option<i64> {
        self.steps.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.steps.keys().next_back().copied()
    }

    /// `None` stands for the whole space.
    pub fn level(&self, i: i64) -> Option<&[Vec<PadicNumber>]> {
        match self.min_index() {
            Some(lo) if i >= lo => {}
            _ => return None,
        }
        match self.steps.range(i..).next() {
            Some((_, vs)) => Some(vs),
            None => Some(&[]),
        }
    }

    pub fn dim_at(&self, i: i64, dim: usize) -> usize {
        self.level(i).map_or(dim, |v| v.len())
    }

    /// Basis of `Fil^i`, expanding the whole-space case.
    pub fn basis_at(&self, i: i64, dim: usize, p: u64, n: u32) -> Vec<Vec<PadicNumber>> {
        match self.level(i) {
            Some(v) => v.to_vec(),
            None => unit_vectors(dim, p, n),
        }
    }
}

fn unit_vectors(dim: usize, p: u64, n: u32) -> Vec<Vec<PadicNumber>> {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { PadicNumber::one(p, n) } else { PadicNumber::zero(p, n) }).collect())
        .collect()
}

/// Polynomial description of `Fil^1` by linear forms, with values for the symbols.
#[derive(Clone, Debug)]
pub struct SymbolicFil1 {
    pub forms: Vec<Vec<SymPoly>>,
    pub values: BTreeMap<String, PadicNumber>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FilteredPhiNModule {
    p: u64,
    n: u32,
    dim: usize,
    phi: PadicMatrix,
    #[serde(rename = "N")]
    mono: PadicMatrix,
    fil: Filtration,
    #[serde(skip)]
    symbolic: Option<SymbolicFil1>,
}

impl FilteredPhiNModule {
    pub fn new(phi: PadicMatrix, mono: PadicMatrix, fil: Filtration) -> Result<Self> {
        let dim = phi.rows();
        if phi.cols() != dim || mono.rows() != dim || mono.cols() != dim {
            return Err(Error::ShapeMismatch(format!("phi and N must both be {dim}x{dim}")));
        }
        let (p, n) = (phi.prime(), phi.precision());
        if mono.prime() != p {
            return Err(Error::PrimeMismatch);
        }
        for vs in fil.steps.values() {
            if vs.iter().any(|v| v.len() != dim) {
                return Err(Error::ShapeMismatch(format!("filtration vectors must have length {dim}")));
            }
        }
        let lhs = mono.mul(&phi);
        let rhs = phi.mul(&mono).scale(&PadicNumber::from_integer(p, p, n));
        if !lhs.eq_at_precision(&rhs) {
            return Err(Error::InvalidInput("N phi != p phi N".into()));
        }
        let keys: Vec<i64> = fil.steps.keys().copied().collect();
        for w in keys.windows(2) {
            let big = &fil.steps[&w[0]];
            let small = &fil.steps[&w[1]];
            let mut both = big.clone();
            both.extend(small.iter().cloned());
            if padic_rank(&both, p, n).0 != big.len() {
                return Err(Error::ShapeMismatch(format!("Fil^{} is not contained in Fil^{}", w[1], w[0])));
            }
        }
        Ok(FilteredPhiNModule { p, n, dim, phi, mono, fil, symbolic: None })
    }

    pub fn with_symbolic(mut self, s: SymbolicFil1) -> Self {
        self.symbolic = Some(s);
        self
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phi(&self) -> &PadicMatrix {
        &self.phi
    }

    pub fn mono(&self) -> &PadicMatrix {
        &self.mono
    }

    pub fn filtration(&self) -> &Filtration {
        &self.fil
    }

    pub fn symbolic(&self) -> Option<&SymbolicFil1> {
        self.symbolic.as_ref()
    }

    pub fn fil_basis(&self, i: i64) -> Vec<Vec<PadicNumber>> {
        self.fil.basis_at(i, self.dim, self.p, self.n)
    }
}

/// Rational structure `V = A ⊕ B0 ⊕ B1 ⊕ C`, basis listed block by block.
#[derive(Clone, Debug, Serialize)]
pub struct RationalStructure {
    pub labels: Vec<String>,
    /// `(dim A, dim B0, dim B1, dim C)`.
    pub dims: [usize; 4],
    pub phi: RationalMatrix,
    pub mono: RationalMatrix,
}

impl RationalStructure {
    pub fn new(labels: Vec<String>, dims: [usize; 4], phi: RationalMatrix, mono: RationalMatrix, p: u64) -> Result<Self> {
        let d: usize = dims.iter().sum();
        if labels.len() != d || phi.rows() != d || phi.cols() != d || mono.rows() != d || mono.cols() != d {
            return Err(Error::ShapeMismatch(format!("rational structure of total dimension {d}")));
        }
        let s = RationalStructure { labels, dims, phi, mono };
        let pr = BigRational::from_integer(BigInt::from(p));
        let mut expect = RationalMatrix::zeros(d, d);
        for (block, ev) in [(0, BigRational::one()), (1, pr.clone()), (2, pr.clone()), (3, &pr * &pr)] {
            for i in s.range(block) {
                expect.set(i, i, ev.clone());
            }
        }
        if s.phi != expect {
            return Err(Error::InvalidInput("phi must act by 1, p, p, p^2 on A, B0, B1, C".into()));
        }
        let block = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| {
            RationalMatrix::from_rows(rows.map(|i| cols.clone().map(|j| s.mono.get(i, j).clone()).collect()).collect())
        };
        // columns of A and B1 vanish; C lands in B0 and B0 lands in A isomorphically
        for c in s.range(0).chain(s.range(2)) {
            if (0..d).any(|i| !s.mono.get(i, c).is_zero()) {
                return Err(Error::InvalidInput("N must vanish on A and B1".into()));
            }
        }
        let outside = |cols: std::ops::Range<usize>, target: std::ops::Range<usize>| {
            cols.clone().any(|c| (0..d).filter(|i| !target.contains(i)).any(|i| !s.mono.get(i, c).is_zero()))
        };
        let iso = |m: RationalMatrix| m.rows() == m.cols() && m.rows() > 0 && m.rank() == m.rows();
        if outside(s.range(3), s.range(1))
            || outside(s.range(1), s.range(0))
            || !iso(block(s.range(1), s.range(3)))
            || !iso(block(s.range(0), s.range(1)))
        {
            return Err(Error::InvalidInput("N must map C onto B0 and B0 onto A isomorphically".into()));
        }
        Ok(s)
    }

    /// Index range of block `k` (0 = A, 1 = B0, 2 = B1, 3 = C).
    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        let start: usize = self.dims[..k].iter().sum();
        start..start + self.dims[k]
    }

    pub fn check_compatible(&self, d: &FilteredPhiNModule) -> Result<()> {
        let (p, n) = (d.p, d.n);
        if d.dim != self.labels.len()
            || !PadicMatrix::from_rational(&self.phi, p, n).eq_at_precision(&d.phi)
            || !PadicMatrix::from_rational(&self.mono, p, n).eq_at_precision(&d.mono)
        {
            return Err(Error::InvalidInput("rational structure does not match the module's phi and N".into()));
        }
        Ok(())
    }
}

/// The `g` vectors `y_i + sum_j log_p(q_ij) x_j`.
pub fn fil0_vectors(q: &PeriodMatrix) -> Vec<Vec<PadicNumber>> {
    let (g, p, n) = (q.g(), q.prime(), q.precision());
    (0..g)
        .map(|i| {
            let mut v = vec![PadicNumber::zero(p, n); 2 * g];
            for (j, slot) in v.iter_mut().take(g).enumerate() {
                *slot = q.entry(i, j).log_of();
            }
            v[g + i] = PadicNumber::one(p, n);
            v
        })
        .collect()
}

/// `D_st` of `V_p(A)` in the basis `x_1..x_g, y_1..y_g`.
pub fn dst_of_abeloid(q: &PeriodMatrix) -> Result<FilteredPhiNModule> {
    let ord = ord_matrix(q)?;
    let (g, p, n) = (q.g(), q.prime(), q.precision());
    let mut phi = PadicMatrix::zeros(2 * g, 2 * g, p, n);
    let mut mono = PadicMatrix::zeros(2 * g, 2 * g, p, n);
    let pinv = PadicNumber::from_integer(p, p, n).inverse()?;
    for i in 0..g {
        phi.set(i, i, pinv.clone());
        phi.set(g + i, g + i, PadicNumber::one(p, n));
        // N(y_i) = sum_j ord(q_ij) x_j
        for j in 0..g {
            mono.set(j, g + i, PadicNumber::from_rational_unchecked(ord.get(i, j), p, n));
        }
    }
    let vs = fil0_vectors(q);
    if padic_rank(&vs, p, n).0 != g {
        return Err(Error::InvalidInput("Fil^0 vectors are not independent".into()));
    }
    let mut steps = BTreeMap::new();
    steps.insert(0, vs);
    FilteredPhiNModule::new(phi, mono, Filtration::new(steps))
}

/// Morphisms `F: D_A -> D_B` (a `dim_B x dim_A` matrix) of filtered (phi, N)-modules.
pub fn hom_mf(
    da: &FilteredPhiNModule,
    db: &FilteredPhiNModule,
    shortcut: Option<(&PadicMatrix, &PadicMatrix)>,
) -> Result<HomSpaceResult> {
    if da.p != db.p {
        return Err(Error::PrimeMismatch);
    }
    let (p, n) = (da.p, da.n.min(db.n));
    let (ra, rb) = (da.dim, db.dim);
    let idx = |r: usize, c: usize| r * ra + c;
    let mut rows: Vec<Vec<PadicNumber>> = Vec::new();
    for (ma, mb) in [(&da.phi, &db.phi), (&da.mono, &db.mono)] {
        for r in 0..rb {
            for c in 0..ra {
                let mut row = vec![PadicNumber::zero(p, n); ra * rb];
                for k in 0..ra {
                    row[idx(r, k)] = &row[idx(r, k)] + ma.get(k, c);
                }
                for k in 0..rb {
                    row[idx(k, c)] = &row[idx(k, c)] - mb.get(r, k);
                }
                rows.push(row);
            }
        }
    }
    let lo = da.fil.min_index().into_iter().chain(db.fil.min_index()).min().unwrap_or(0) - 1;
    let hi = da.fil.max_index().into_iter().chain(db.fil.max_index()).max().unwrap_or(0) + 1;
    for i in lo..=hi {
        let src = da.fil.basis_at(i, ra, p, n);
        if src.is_empty() || db.fil.level(i).is_none() {
            continue;
        }
        let ann = annihilator(&db.fil.basis_at(i, rb, p, n), rb, p, n)?;
        for u in &src {
            for w in &ann {
                let mut row = vec![PadicNumber::zero(p, n); ra * rb];
                for r in 0..rb {
                    for c in 0..ra {
                        row[idx(r, c)] = &w[r] * &u[c];
                    }
                }
                rows.push(row);
            }
        }
    }
    let k = padic_kernel(&PadicMatrix::from_rows(rows, p, n))?;
    let mut notes = Vec::new();
    let mut cross_check = None;
    if let Some((la, lb)) = shortcut {
        let s = sylvester_kernel(la, lb)?;
        cross_check = Some(s.dimension == k.dimension);
        if s.dimension != k.dimension {
            notes.push(format!("Sylvester shortcut gives dimension {}", s.dimension));
        }
    }
    Ok(HomSpaceResult {
        kind: HomKind::Mf,
        ell: None,
        dimension: k.dimension,
        basis: Vec::new(),
        padic_basis: Some(
            k.basis.iter().map(|v| PadicMatrix::from_rows(v.chunks(ra).map(|c| c.to_vec()).collect(), p, n)).collect(),
        ),
        integral_data: None,
        certified: k.certified,
        precision_margin: Some(k.precision_margin),
        cross_check,
        notes,
    })
}

/// `hom_mf` on two abeloids, cross-checked against their L-invariants.
pub fn hom_mf_abeloid(qa: &PeriodMatrix, qb: &PeriodMatrix) -> Result<HomSpaceResult> {
    let (la, lb) = (l_invariant(qa)?, l_invariant(qb)?);
    hom_mf(&dst_of_abeloid(qa)?, &dst_of_abeloid(qb)?, Some((&la, &lb)))
}

/// `{x : phi(x) = p^m x, N(x) = 0}`.
pub fn phi_n_eigenspace(d: &FilteredPhiNModule, m: i64) -> Result<KernelResult> {
    let (p, n, dim) = (d.p, d.n, d.dim);
    let pm = PadicNumber::from_integer(p, p, n).pow(m)?;
    let mut rows = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        let mut r = d.phi.row(i);
        r[i] = &r[i] - &pm;
        rows.push(r);
    }
    rows.extend(d.mono.to_rows());
    padic_kernel(&PadicMatrix::from_rows(rows, p, n))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct NewtonHodge {
    pub t_n: i64,
    pub t_h: i64,
    pub equal: bool,
}

pub fn newton_hodge(d: &FilteredPhiNModule) -> Result<NewtonHodge> {
    let det = padic_det(&d.phi);
    let t_n = det.valuation().ok_or(Error::SingularPhi)?;
    let t_h = match (d.fil.min_index(), d.fil.max_index()) {
        (Some(lo), Some(hi)) => (lo - 1..=hi)
            .map(|i| i * (d.fil.dim_at(i, d.dim) as i64 - d.fil.dim_at(i + 1, d.dim) as i64))
            .sum(),
        _ => 0,
    };
    Ok(NewtonHodge { t_n, t_h, equal: t_n == t_h })
}

fn block_vectors(r: &RationalStructure, blocks: &[usize], p: u64, n: u32) -> Vec<Vec<PadicNumber>> {
    let dim = r.labels.len();
    blocks
        .iter()
        .flat_map(|&b| r.range(b))
        .map(|i| (0..dim).map(|j| if i == j { PadicNumber::one(p, n) } else { PadicNumber::zero(p, n) }).collect())
        .collect()
}

/// `V = Fil^1 ⊕ A` and `V = Fil^2 ⊕ (A ⊕ B)` over Q_p.
pub fn is_ordinary_weight2(d: &FilteredPhiNModule, r: &RationalStructure) -> Result<bool> {
    if d.fil.dim_at(0, d.dim) != d.dim || d.fil.dim_at(3, d.dim) != 0 {
        return Err(Error::ShapeMismatch("weight-2 filtration needs Fil^0 = V and Fil^3 = 0".into()));
    }
    r.check_compatible(d)?;
    let (p, n) = (d.p, d.n);
    let splits = |fil: Vec<Vec<PadicNumber>>, blocks: &[usize]| {
        let comp = block_vectors(r, blocks, p, n);
        if fil.len() + comp.len() != d.dim {
            return false;
        }
        let mut all = fil;
        all.extend(comp);
        padic_rank(&all, p, n).0 == d.dim
    };
    Ok(splits(d.fil_basis(1), &[0]) && splits(d.fil_basis(2), &[0, 1, 2]))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RaskindVerdict {
    pub dim_q: usize,
    pub dim_qp: usize,
    pub admissible: bool,
    pub certified: bool,
    pub method: String,
    pub notes: Vec<String>,
}

/// `Fil^1 ∩ B1` over Q against `Fil^1 ∩ (B1 ⊗ Q_p)`.
pub fn raskind_check(d: &FilteredPhiNModule, r: &RationalStructure, facts: &[Fact]) -> Result<RaskindVerdict> {
    r.check_compatible(d)?;
    let (p, n) = (d.p, d.n);
    let b1 = r.range(2);
    let nb = b1.len();
    let ann = annihilator(&d.fil_basis(1), d.dim, p, n)?;
    let rows: Vec<Vec<PadicNumber>> = ann.iter().map(|w| w[b1.clone()].to_vec()).collect();
    let kernel = if rows.is_empty() {
        KernelResult {
            dimension: nb,
            rank: 0,
            basis: unit_vectors(nb, p, n),
            certified: true,
            precision_margin: n as i64,
        }
    } else {
        padic_kernel(&PadicMatrix::from_rows(rows, p, n))?
    };
    let dim_qp = kernel.dimension;
    let mut notes = Vec::new();
    if let Some(sym) = &d.symbolic {
        check_symbolic(d, sym)?;
        let srows: Vec<Vec<SymPoly>> = sym.forms.iter().map(|f| f[b1.clone()].to_vec()).collect();
        match rational_nullity(&srows, nb, facts) {
            Ok(dim_q) => {
                if dim_q > dim_qp {
                    return Err(Error::InvalidInput(format!(
                        "declared facts give dim_Q = {dim_q} above dim_Qp = {dim_qp}"
                    )));
                }
                return Ok(RaskindVerdict {
                    dim_q,
                    dim_qp,
                    admissible: dim_q == dim_qp,
                    certified: kernel.certified,
                    method: "symbolic".into(),
                    notes,
                });
            }
            Err(Error::InsufficientFacts(m)) => notes.push(m),
            Err(e) => return Err(e),
        }
    }
    if !kernel.certified {
        return Err(Error::InsufficientFacts(format!(
            "no symbolic certificate and the p-adic rank has only {} guard digits",
            kernel.precision_margin
        )));
    }
    let h = subspace_height(p, n);
    let dim_q = rational_subspace(&kernel, &h)?.len();
    notes.push(format!("rational points found by reconstruction at height {h}; not a proof"));
    Ok(RaskindVerdict {
        dim_q,
        dim_qp,
        admissible: dim_q == dim_qp,
        certified: false,
        method: "reconstruction".into(),
        notes,
    })
}

/// The symbolic forms must cut out the numeric `Fil^1`.
fn check_symbolic(d: &FilteredPhiNModule, sym: &SymbolicFil1) -> Result<()> {
    let (p, n) = (d.p, d.n);
    let forms: Vec<Vec<PadicNumber>> = sym
        .forms
        .iter()
        .map(|f| f.iter().map(|x| x.eval(&sym.values, p, n)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let fil1 = d.fil_basis(1);
    let vanish = forms.iter().all(|f| {
        fil1.iter().all(|u| {
            let s = f.iter().zip(u).fold(PadicNumber::zero(p, n), |acc, (a, b)| &acc + &(a * b));
            s.is_zero()
        })
    });
    let rank = if forms.is_empty() { 0 } else { padic_rank(&forms, p, n).0 };
    if !vanish || rank + fil1.len() != d.dim {
        return Err(Error::InvalidInput("symbolic Fil^1 forms disagree with the numeric filtration".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalStructureSpec {
    #[serde(rename = "A")]
    pub a: Vec<String>,
    #[serde(rename = "B0")]
    pub b0: Vec<String>,
    #[serde(rename = "B1")]
    pub b1: Vec<String>,
    #[serde(rename = "C")]
    pub c: Vec<String>,
}

/// JSON form of a module. Matrix and vector entries are polynomials in the
/// named constants; constants are scalar expressions evaluated in Q_p.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub p: u64,
    pub dim: usize,
    #[serde(default)]
    pub constants: BTreeMap<String, String>,
    pub phi: Vec<Vec<String>>,
    #[serde(rename = "N")]
    pub mono: Vec<Vec<String>>,
    pub fil: BTreeMap<String, Vec<Vec<String>>>,
    /// Pairing; when present without `fil["1"]`, `Fil^1 = (Fil^2)^perp`.
    #[serde(default)]
    pub gram: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub fil1_forms: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub rational_structure: Option<RationalStructureSpec>,
    #[serde(default)]
    pub facts: Vec<FactSpec>,
}

#[derive(Clone, Debug)]
pub struct LoadedModule {
    pub module: FilteredPhiNModule,
    pub structure: Option<RationalStructure>,
    pub facts: Vec<Fact>,
}

fn eval_constants(defs: &BTreeMap<String, String>, ctx: &QpContext) -> Result<BTreeMap<String, PadicNumber>> {
    let mut values = BTreeMap::new();
    let mut pending: Vec<(&String, &String)> = defs.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut last = None;
        let mut rest = Vec::new();
        for (k, v) in pending {
            match parse_expr(v).and_then(|e| e.eval(ctx, &values, &Units::new())) {
                Ok(x) => {
                    values.insert(k.clone(), x);
                }
                Err(e) => {
                    last = Some(e);
                    rest.push((k, v));
                }
            }
        }
        if rest.len() == before {
            return Err(last.unwrap());
        }
        pending = rest;
    }
    Ok(values)
}

fn poly_matrix(rows: &[Vec<String>], p: u64, syms: &[String]) -> Result<Vec<Vec<SymPoly>>> {
    rows.iter()
        .map(|r| r.iter().map(|s| parse_expr(s).and_then(|e| e.to_poly(p, syms))).collect())
        .collect()
}

fn eval_matrix(m: &[Vec<SymPoly>], values: &BTreeMap<String, PadicNumber>, p: u64, n: u32) -> Result<Vec<Vec<PadicNumber>>> {
    m.iter().map(|r| r.iter().map(|x| x.eval(values, p, n)).collect()).collect()
}

/// Linear forms `v^T G` for the given vectors.
pub fn pairing_forms(vs: &[Vec<SymPoly>], gram: &[Vec<SymPoly>]) -> Vec<Vec<SymPoly>> {
    let d = gram.len();
    vs.iter()
        .map(|v| {
            (0..d)
                .map(|j| (0..d).fold(SymPoly::zero(), |acc, i| acc.add(&v[i].mul(&gram[i][j]))))
                .collect()
        })
        .collect()
}

pub fn load_module(spec: &ModuleSpec, n: u32) -> Result<LoadedModule> {
    let ctx = QpContext::new(spec.p, n)?;
    let p = spec.p;
    let values = eval_constants(&spec.constants, &ctx)?;
    let syms: Vec<String> = values.keys().cloned().collect();
    let square = |m: &Vec<Vec<String>>, what: &str| {
        if m.len() != spec.dim || m.iter().any(|r| r.len() != spec.dim) {
            return Err(Error::ShapeMismatch(format!("{what} must be {0}x{0}", spec.dim)));
        }
        Ok(())
    };
    square(&spec.phi, "phi")?;
    square(&spec.mono, "N")?;
    let phi_s = poly_matrix(&spec.phi, p, &syms)?;
    let mono_s = poly_matrix(&spec.mono, p, &syms)?;
    let phi = PadicMatrix::from_rows(eval_matrix(&phi_s, &values, p, n)?, p, n);
    let mono = PadicMatrix::from_rows(eval_matrix(&mono_s, &values, p, n)?, p, n);
    let mut steps = BTreeMap::new();
    let mut sym_steps = BTreeMap::new();
    for (k, vs) in &spec.fil {
        let i: i64 = k.parse().map_err(|_| Error::InvalidInput(format!("filtration index '{k}'")))?;
        let s = poly_matrix(vs, p, &syms)?;
        steps.insert(i, eval_matrix(&s, &values, p, n)?);
        sym_steps.insert(i, s);
    }
    let mut forms = match &spec.fil1_forms {
        Some(f) => Some(poly_matrix(f, p, &syms)?),
        None => None,
    };
    if let Some(g) = &spec.gram {
        square(g, "gram")?;
        let gram = poly_matrix(g, p, &syms)?;
        if !spec.fil.contains_key("1") {
            let v2 = sym_steps.get(&2).ok_or_else(|| Error::InvalidInput("gram needs fil[\"2\"]".into()))?;
            let f = pairing_forms(v2, &gram);
            let num = eval_matrix(&f, &values, p, n)?;
            steps.insert(1, annihilator(&num, spec.dim, p, n)?);
            forms.get_or_insert(f);
        }
    }
    let mut module = FilteredPhiNModule::new(phi, mono, Filtration::new(steps))?;
    if let Some(forms) = forms {
        module = module.with_symbolic(SymbolicFil1 { forms, values: values.clone() });
    }
    let structure = match &spec.rational_structure {
        Some(rs) => {
            let rational = |m: &[Vec<SymPoly>]| -> Result<RationalMatrix> {
                Ok(RationalMatrix::from_rows(
                    m.iter()
                        .map(|r| {
                            r.iter()
                                .map(|x| x.as_constant().ok_or_else(|| Error::InvalidInput("rational structure needs rational phi and N".into())))
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?,
                ))
            };
            let labels: Vec<String> = [&rs.a, &rs.b0, &rs.b1, &rs.c].into_iter().flatten().cloned().collect();
            Some(RationalStructure::new(
                labels,
                [rs.a.len(), rs.b0.len(), rs.b1.len(), rs.c.len()],
                rational(&phi_s)?,
                rational(&mono_s)?,
                p,
            )?)
        }
        None => None,
    };
    let facts = spec.facts.iter().map(|f| f.to_fact(p, &syms)).collect::<Result<Vec<_>>>()?;
    Ok(LoadedModule { module, structure, facts })
}
