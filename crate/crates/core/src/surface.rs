//! `H^2` of a product of two Tate curves as a filtered (phi, N)-module.
//!
//! Basis of `W = ∧^2 (V1 ⊕ V2)`, with `V_i = <e1, e2>`:
//!
//! ```text
//! a  = e1' ∧ e1''          b2 = e1' ∧ e2'
//! b0 = e1' ∧ e2'' + e2' ∧ e1''   b3 = e1'' ∧ e2''
//! b1 = e1' ∧ e2'' - e2' ∧ e1''   c  = e2' ∧ e2''
//! ```
//!
//! Volume form `e1' ∧ e2' ∧ e1'' ∧ e2''`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::abeloid::{tate_curve_criteria, RELATION_BOUND};
use crate::error::{Error, Result};
use crate::linalg::{annihilator, subspace_height, PadicMatrix, RationalMatrix};
use crate::mult::{MultElement, UnitExponents};
use crate::padic::PadicNumber;
use crate::phin::{
    pairing_forms, FilteredPhiNModule, Filtration, ModuleSpec, RationalStructure, RationalStructureSpec, SymbolicFil1,
};
use crate::sym::{rational_nullity, Fact, FactSpec, SymPoly};

pub const LABELS: [&str; 6] = ["a", "b0", "b1", "b2", "b3", "c"];
const A: usize = 0;
const C: usize = 5;

/// Basis 2-vectors as (coefficient, i, j) over `e1', e2', e1'', e2''` = 0..4.
fn basis_bivectors() -> [Vec<(i64, usize, usize)>; 6] {
    [
        vec![(1, 0, 2)],
        vec![(1, 0, 3), (1, 1, 2)],
        vec![(1, 0, 3), (-1, 1, 2)],
        vec![(1, 0, 1)],
        vec![(1, 2, 3)],
        vec![(1, 1, 3)],
    ]
}

/// Sign of the permutation sorting `idx`, zero on repeats.
fn perm_sign(idx: [usize; 4]) -> i64 {
    let mut v = idx;
    let mut sign = 1;
    for i in 0..4 {
        for j in 0..3 - i {
            if v[j] == v[j + 1] {
                return 0;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

/// Gram matrix of `x ∧ y = Q(x, y) · vol`.
pub fn pairing_gram() -> RationalMatrix {
    let b = basis_bivectors();
    let mut g = RationalMatrix::zeros(6, 6);
    for (i, x) in b.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let s: i64 = x
                .iter()
                .flat_map(|&(cx, a1, a2)| y.iter().map(move |&(cy, b1, b2)| cx * cy * perm_sign([a1, a2, b1, b2])))
                .sum();
            g.set(i, j, BigRational::from_integer(s.into()));
        }
    }
    g
}

fn gram_symbolic() -> Vec<Vec<SymPoly>> {
    pairing_gram().to_rows().into_iter().map(|r| r.into_iter().map(SymPoly::constant).collect()).collect()
}

fn pair(x: &[PadicNumber], y: &[PadicNumber]) -> PadicNumber {
    let g = pairing_gram();
    let p = x[0].prime();
    let n = x[0].requested();
    let mut acc = PadicNumber::zero(p, n);
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            if !g.get(i, j).is_zero() {
                let c = PadicNumber::from_rational_unchecked(g.get(i, j), p, n);
                acc = &acc + &(&(xi * &c) * yj);
            }
        }
    }
    acc
}

fn h2_operators(p: u64, n: u32) -> (RationalMatrix, RationalMatrix) {
    let pr = BigRational::from_integer(BigInt::from(p));
    let mut phi = RationalMatrix::zeros(6, 6);
    phi.set(0, 0, BigRational::one());
    for i in 1..5 {
        phi.set(i, i, pr.clone());
    }
    phi.set(5, 5, &pr * &pr);
    let mut mono = RationalMatrix::zeros(6, 6);
    // N(c) = b0, N(b0) = 2a
    mono.set(1, 5, BigRational::one());
    mono.set(0, 1, BigRational::from_integer(2.into()));
    let _ = n;
    (phi, mono)
}

pub fn h2_structure(p: u64) -> RationalStructure {
    let (phi, mono) = h2_operators(p, 0);
    RationalStructure::new(LABELS.iter().map(|s| s.to_string()).collect(), [1, 1, 3, 1], phi, mono, p)
        .expect("the wedge-square structure is valid")
}

#[derive(Clone, Debug)]
pub struct WedgeSquareModule {
    pub module: FilteredPhiNModule,
    pub structure: RationalStructure,
    pub gram: RationalMatrix,
    /// Spanning vector of `Fil^2`, numeric and symbolic.
    pub fil2_vector: Vec<PadicNumber>,
    pub fil2_symbolic: Vec<SymPoly>,
    pub constants: BTreeMap<String, PadicNumber>,
    /// Facts established while building the module.
    pub facts: Vec<Fact>,
    pub notes: Vec<String>,
}

fn assemble(
    p: u64,
    n: u32,
    v: Vec<PadicNumber>,
    vs: Vec<SymPoly>,
    constants: BTreeMap<String, PadicNumber>,
    facts: Vec<Fact>,
    notes: Vec<String>,
) -> Result<WedgeSquareModule> {
    let fil = ordinary_filtration_from_vector(&v)?;
    let (phi, mono) = h2_operators(p, n);
    let forms = pairing_forms(std::slice::from_ref(&vs), &gram_symbolic());
    let module = FilteredPhiNModule::new(
        PadicMatrix::from_rational(&phi, p, n),
        PadicMatrix::from_rational(&mono, p, n),
        fil,
    )?
    .with_symbolic(SymbolicFil1 { forms, values: constants.clone() });
    Ok(WedgeSquareModule {
        module,
        structure: h2_structure(p),
        gram: pairing_gram(),
        fil2_vector: v,
        fil2_symbolic: vs,
        constants,
        facts,
        notes,
    })
}

/// `L = log_p(q) / ord_p(q)` as exact coordinates over the atoms, if known.
fn exact_l(q: &MultElement) -> Option<UnitExponents> {
    let ord = q.ord_of();
    q.exact().map(|ex| ex.iter().map(|(k, c)| (k.clone(), c / &ord)).collect())
}

/// Q-linear relations between `L1` and `L2` read off their exact coordinates.
fn l_facts(q1: &MultElement, q2: &MultElement) -> Vec<Fact> {
    let (Some(x), Some(y)) = (exact_l(q1), exact_l(q2)) else { return Vec::new() };
    let (l1, l2) = (SymPoly::symbol("L1"), SymPoly::symbol("L2"));
    match (x.is_empty(), y.is_empty()) {
        (true, true) => {
            return vec![Fact::Substitute("L1".into(), SymPoly::zero()), Fact::Substitute("L2".into(), SymPoly::zero())]
        }
        (true, false) => return vec![Fact::Substitute("L1".into(), SymPoly::zero()), Fact::nonzero(l2)],
        (false, true) => return vec![Fact::Substitute("L2".into(), SymPoly::zero()), Fact::nonzero(l1)],
        _ => {}
    }
    // proportional exact vectors
    let (k0, c0) = x.iter().next().unwrap();
    let kappa = y.get(k0).cloned().unwrap_or_else(BigRational::zero) / c0;
    let proportional = x.len() == y.len() && x.iter().all(|(k, c)| y.get(k) == Some(&(c * &kappa)));
    if proportional {
        vec![Fact::Substitute("L2".into(), l1.scale(&kappa)), Fact::nonzero(l1)]
    } else {
        vec![Fact::Independent(vec![l1, l2])]
    }
}

fn l_invariant_of(q: &MultElement) -> Result<PadicNumber> {
    let (p, n) = (q.prime(), q.precision());
    q.log_of().checked_div(&PadicNumber::from_rational_unchecked(&q.ord_of(), p, n))
}

/// The module attached to `E(q1) × E(q2)` with its Mazur filtration.
pub fn build_h2(q1: &MultElement, q2: &MultElement) -> Result<WedgeSquareModule> {
    if q1.prime() != q2.prime() {
        return Err(Error::PrimeMismatch);
    }
    for (name, q) in [("q1", q1), ("q2", q2)] {
        if !q.p_exp().is_positive() || !q.is_genuine() {
            return Err(Error::BadPeriod(format!("{name} = {q} needs positive integral valuation")));
        }
    }
    let (p, n) = (q1.prime(), q1.precision().min(q2.precision()));
    let (l1, l2) = (l_invariant_of(q1)?, l_invariant_of(q2)?);
    let half = PadicNumber::from_rational_unchecked(&BigRational::new(1.into(), 2.into()), p, n);
    let zero = PadicNumber::zero(p, n);
    let v = vec![
        &l1 * &l2,
        &(&l1 + &l2) * &half,
        &(&l1 - &l2) * &half,
        zero.clone(),
        zero,
        PadicNumber::one(p, n),
    ];
    let (s1, s2) = (SymPoly::symbol("L1"), SymPoly::symbol("L2"));
    let h = BigRational::new(1.into(), 2.into());
    let vs = vec![
        s1.mul(&s2),
        s1.add(&s2).scale(&h),
        s1.sub(&s2).scale(&h),
        SymPoly::zero(),
        SymPoly::zero(),
        SymPoly::int(1),
    ];
    let mut constants = BTreeMap::new();
    constants.insert("L1".to_string(), l1);
    constants.insert("L2".to_string(), l2);
    let facts = l_facts(q1, q2);
    let mut notes = Vec::new();
    if facts.is_empty() {
        notes.push("no exact coordinates: relations between L1 and L2 must be declared".into());
    }
    assemble(p, n, v, vs, constants, facts, notes)
}

/// Picard rank of `E(q1) × E(q2)`.
pub fn picard_rank(q1: &MultElement, q2: &MultElement, extra: &[Fact]) -> Result<u8> {
    let crit = tate_curve_criteria(q1, q2, RELATION_BOUND)?;
    if crit.relation.is_some() && crit.relation_exact {
        return Ok(3);
    }
    let mut facts = l_facts(q1, q2);
    facts.extend_from_slice(extra);
    let row = vec![vec![SymPoly::symbol("L2").sub(&SymPoly::symbol("L1"))]];
    match rational_nullity(&row, 1, &facts) {
        Ok(1) => Ok(3),
        Ok(_) => Ok(2),
        Err(Error::InsufficientFacts(_)) => Err(Error::Undecided),
        Err(e) => Err(e),
    }
}

/// `Fil^2 = <v>`, `Fil^1 = v^perp` for a normalized isotropic `v`.
pub fn ordinary_filtration_from_vector(v: &[PadicNumber]) -> Result<Filtration> {
    if v.len() != 6 {
        return Err(Error::ShapeMismatch(format!("expected 6 coordinates, got {}", v.len())));
    }
    let (p, n) = (v[0].prime(), v[0].requested());
    if !(&v[C] - &PadicNumber::one(p, n)).is_zero() {
        return Err(Error::NotNormalized);
    }
    if !pair(v, v).is_zero() {
        return Err(Error::NotIsotropic);
    }
    let mut n2c = vec![PadicNumber::zero(p, n); 6];
    n2c[A] = PadicNumber::from_integer(2, p, n);
    if pair(v, &n2c).is_zero() {
        return Err(Error::DegenerateAPairing);
    }
    let g = PadicMatrix::from_rational(&pairing_gram(), p, n);
    let form = g.transpose().mul_vec(v);
    let mut steps = BTreeMap::new();
    steps.insert(1, annihilator(&[form], 6, p, n)?);
    steps.insert(2, vec![v.to_vec()]);
    Ok(Filtration::new(steps))
}

/// The normalized spanning vector of `Fil^2`.
pub fn vector_from_filtration(f: &Filtration) -> Result<Vec<PadicNumber>> {
    let fil2 = f.level(2).ok_or_else(|| Error::ShapeMismatch("Fil^2 is the whole space".into()))?;
    if fil2.len() != 1 {
        return Err(Error::ShapeMismatch(format!("Fil^2 has dimension {}", fil2.len())));
    }
    let v = &fil2[0];
    if v[C].is_zero() {
        return Err(Error::NotNormalized);
    }
    let inv = v[C].inverse()?;
    Ok(v.iter().map(|x| x * &inv).collect())
}

/// Example family with `Fil^2 = <(λ²-γ) a + λ b0 - γ b2 + b3 + c>`.
pub fn example_non_admissible(gamma: &PadicNumber, lambda: &PadicNumber, height: Option<&BigInt>) -> Result<WedgeSquareModule> {
    let (p, n) = (gamma.prime(), gamma.requested());
    let h = height.cloned().unwrap_or_else(|| subspace_height(p, n));
    if let Some(r) = gamma.rational_reconstruct(&h)? {
        return Err(Error::GammaRational(r.to_string()));
    }
    let mut notes = vec![format!("gamma has no rational reconstruction of height <= {h}")];
    let lsq = lambda * lambda;
    let v = vec![
        &lsq - gamma,
        lambda.clone(),
        PadicNumber::zero(p, n),
        -gamma,
        PadicNumber::one(p, n),
        PadicNumber::one(p, n),
    ];
    let (g, l) = (SymPoly::symbol("gamma"), SymPoly::symbol("lambda"));
    let vs = vec![l.mul(&l).sub(&g), l.clone(), SymPoly::zero(), g.neg(), SymPoly::int(1), SymPoly::int(1)];
    let mut constants = BTreeMap::new();
    constants.insert("gamma".to_string(), gamma.clone());
    constants.insert("lambda".to_string(), lambda.clone());
    let mut facts = vec![Fact::irrational(g)];
    if let Some(r) = lambda.rational_reconstruct(&h)? {
        facts.push(Fact::Substitute("lambda".into(), SymPoly::constant(r)));
    }
    if lambda.is_zero() {
        notes.push("lambda = 0 accepted".into());
    }
    assemble(p, n, v, vs, constants, facts, notes)
}

impl WedgeSquareModule {
    /// JSON module description that reloads to the same filtration.
    pub fn to_spec(&self) -> ModuleSpec {
        let p = self.module.prime();
        let rows = |m: &RationalMatrix| -> Vec<Vec<String>> {
            m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
        };
        let (phi, mono) = h2_operators(p, 0);
        let mut fil = BTreeMap::new();
        fil.insert("2".to_string(), vec![self.fil2_symbolic.iter().map(|x| x.to_string()).collect()]);
        let facts = self
            .facts
            .iter()
            .map(|f| match f {
                Fact::Independent(xs) => FactSpec::Independent(xs.iter().map(|x| x.to_string()).collect()),
                Fact::Substitute(s, v) => FactSpec::Substitute { symbol: s.clone(), value: v.to_string() },
            })
            .collect();
        ModuleSpec {
            p,
            dim: 6,
            constants: self.constants.iter().map(|(k, v)| (k.clone(), v.to_rational().to_string())).collect(),
            phi: rows(&phi),
            mono: rows(&mono),
            fil,
            gram: Some(rows(&self.gram)),
            fil1_forms: None,
            rational_structure: Some(RationalStructureSpec {
                a: vec!["a".into()],
                b0: vec!["b0".into()],
                b1: vec!["b1".into(), "b2".into(), "b3".into()],
                c: vec!["c".into()],
            }),
            facts,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceSummary {
    pub gram: RationalMatrix,
    pub fil2_vector: Vec<String>,
    pub fil2_symbolic: Vec<SymPoly>,
    pub fil1_dimension: usize,
    pub facts: Vec<Fact>,
    pub notes: Vec<String>,
}

impl WedgeSquareModule {
    pub fn summary(&self) -> SurfaceSummary {
        SurfaceSummary {
            gram: self.gram.clone(),
            fil2_vector: self.fil2_vector.iter().map(|x| x.to_string()).collect(),
            fil2_symbolic: self.fil2_symbolic.clone(),
            fil1_dimension: self.module.filtration().dim_at(1, 6),
            facts: self.facts.clone(),
            notes: self.notes.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entry::{parse_entry, Units};
    use crate::mult::QpContext;
    use crate::phin::{is_ordinary_weight2, phi_n_eigenspace, raskind_check};

    const N: u32 = 40;

    fn q(s: &str) -> MultElement {
        parse_entry(s, &QpContext::new(7, N).unwrap(), &Units::new()).unwrap()
    }

    fn golden_gram() -> RationalMatrix {
        let text = include_str!("../golden/gram.json");
        let rows: Vec<Vec<i64>> = serde_json::from_str(text).unwrap();
        RationalMatrix::from_ints(&rows)
    }

    #[test]
    fn gram_matches_golden() {
        let g = pairing_gram();
        assert_eq!(g, golden_gram());
        assert!(g.is_symmetric());
        assert!(!g.det().is_zero());
        assert!(g.get(3, 3).is_zero());
    }

    #[test]
    fn product_modules() {
        let m = build_h2(&q("p"), &q("p")).unwrap();
        let c: Vec<PadicNumber> = (0..6).map(|i| PadicNumber::from_integer((i == 5) as i64, 7, N)).collect();
        assert_eq!(m.fil2_vector, c);
        for (a, b) in [("p", "(1+p)*p"), ("p", "p^2"), ("p^3", "(1+p)^2*p")] {
            let m = build_h2(&q(a), &q(b)).unwrap();
            assert!(pair(&m.fil2_vector, &m.fil2_vector).is_zero());
            assert!(is_ordinary_weight2(&m.module, &m.structure).unwrap());
            assert_eq!(phi_n_eigenspace(&m.module, 1).unwrap().dimension, 3);
        }
        let v = raskind_check(&build_h2(&q("p"), &q("(1+p)*p")).unwrap().module, &h2_structure(7), &l_facts(&q("p"), &q("(1+p)*p"))).unwrap();
        assert_eq!((v.dim_q, v.dim_qp, v.admissible), (2, 2, true));
        let m = build_h2(&q("p"), &q("p^2")).unwrap();
        let v = raskind_check(&m.module, &m.structure, &m.facts).unwrap();
        assert_eq!((v.dim_q, v.dim_qp, v.admissible), (3, 3, true));
        assert_eq!(build_h2(&q("1"), &q("p")).unwrap_err().code(), "BAD_PERIOD");
    }

    #[test]
    fn picard_ranks() {
        assert_eq!(picard_rank(&q("p"), &q("p^2"), &[]).unwrap(), 3);
        assert_eq!(picard_rank(&q("p"), &q("(1+p)*p"), &[]).unwrap(), 2);
        assert_eq!(picard_rank(&q("(1+p)*p"), &q("(1+p)*p"), &[]).unwrap(), 3);
        let c = QpContext::new(7, N).unwrap();
        let opaque = MultElement::from_coords(&c, 0, BigRational::one(), PadicNumber::from_integer(3, 7, N));
        assert_eq!(picard_rank(&q("p"), &opaque, &[]).unwrap_err(), Error::Undecided);
    }

    #[test]
    fn ordinary_vectors() {
        let z = |x: i64| PadicNumber::from_integer(x, 7, N);
        let c = vec![z(0), z(0), z(0), z(0), z(0), z(1)];
        let f = ordinary_filtration_from_vector(&c).unwrap();
        assert_eq!(vector_from_filtration(&f).unwrap(), c);
        let v = vec![z(0), z(0), z(0), z(0), z(1), z(1)];
        assert_eq!(vector_from_filtration(&ordinary_filtration_from_vector(&v).unwrap()).unwrap(), v);
        let bad = vec![z(1), z(0), z(0), z(0), z(0), z(1)];
        assert_eq!(ordinary_filtration_from_vector(&bad).unwrap_err(), Error::NotIsotropic);
        let unnorm = vec![z(0), z(0), z(0), z(0), z(0), z(2)];
        assert_eq!(ordinary_filtration_from_vector(&unnorm).unwrap_err(), Error::NotNormalized);
    }

    #[test]
    fn example_family() {
        let gamma = PadicNumber::from_integer(-3, 7, N).hensel_sqrt().unwrap();
        for lambda in [1, 0, 5] {
            let m = example_non_admissible(&gamma, &PadicNumber::from_integer(lambda, 7, N), None).unwrap();
            assert!(pair(&m.fil2_vector, &m.fil2_vector).is_zero());
            let v = raskind_check(&m.module, &m.structure, &m.facts).unwrap();
            assert_eq!((v.dim_q, v.dim_qp, v.admissible), (1, 2, false));
        }
        let two = PadicNumber::from_integer(2, 7, N);
        assert_eq!(example_non_admissible(&two, &two, None).unwrap_err().code(), "GAMMA_RATIONAL");
    }

    #[test]
    fn spec_round_trip() {
        let gamma = PadicNumber::from_integer(-3, 7, N).hensel_sqrt().unwrap();
        let m = example_non_admissible(&gamma, &PadicNumber::from_integer(1, 7, N), None).unwrap();
        let loaded = crate::phin::load_module(&m.to_spec(), N).unwrap();
        let v = raskind_check(&loaded.module, loaded.structure.as_ref().unwrap(), &loaded.facts).unwrap();
        assert_eq!((v.dim_q, v.dim_qp, v.admissible), (1, 2, false));
    }
}
