use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use tate_periods::abeloid::{change_basis, hom_algebraic, l_invariant, tate_curve_criteria, HomMode, PeriodMatrix};
use tate_periods::linalg::{padic_rank, PadicMatrix, RationalMatrix};
use tate_periods::padic::default_height;
use tate_periods::phin::{dst_of_abeloid, fil0_vectors};
use tate_periods::surface::{ordinary_filtration_from_vector, vector_from_filtration};
use tate_periods::PadicNumber;

mod common;
use common::{lattice, tate_period, unimodular, N, P};

fn unit() -> impl Strategy<Value = BigInt> {
    (1i64..1_000_000_000).prop_filter("prime to p", |x| x % P as i64 != 0).prop_map(BigInt::from)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn log_is_additive(a in unit(), b in unit()) {
        let x = PadicNumber::from_integer(a, P, N);
        let y = PadicNumber::from_integer(b, P, N);
        let lhs = (&x * &y).iwasawa_log().unwrap();
        let rhs = &x.iwasawa_log().unwrap() + &y.iwasawa_log().unwrap();
        prop_assert!(lhs.eq_at_precision(&rhs));
    }

    #[test]
    fn log_kills_teichmuller(a in unit()) {
        let w = PadicNumber::from_integer(a, P, N).teichmuller().unwrap();
        prop_assert!(w.iwasawa_log().unwrap().is_zero());
    }

    #[test]
    fn reconstruction_round_trip(a in -1_000_000_000i64..1_000_000_000, b in 1i64..1_000_000_000) {
        prop_assume!(b % P as i64 != 0);
        let r = BigRational::new(a.into(), b.into());
        let h = default_height(P, N);
        prop_assume!(r.numer().magnitude() <= h.magnitude() && r.denom() <= &h);
        let x = PadicNumber::from_rational_unchecked(&r, P, N);
        prop_assert_eq!(x.rational_reconstruct(&h).unwrap(), Some(r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn monodromy_relation(q in lattice()) {
        let d = dst_of_abeloid(&q).unwrap();
        let pp = PadicNumber::from_integer(P, P, N);
        let lhs = d.mono().mul(d.phi());
        let rhs = d.phi().mul(d.mono()).scale(&pp);
        prop_assert!(lhs.eq_at_precision(&rhs));
    }

    #[test]
    fn fil0_spans(q in lattice()) {
        let (rank, _) = padic_rank(&fil0_vectors(&q), P, N);
        prop_assert_eq!(rank, q.g());
    }

    #[test]
    fn l_conjugation((q, m) in lattice().prop_flat_map(|q| { let g = q.g(); (Just(q), unimodular(g)) })) {
        let q2 = change_basis(&q, &m).unwrap();
        let mr = RationalMatrix::from_bigints(&m);
        let expect = PadicMatrix::from_rational(&mr.inverse().unwrap(), P, N)
            .mul(&l_invariant(&q).unwrap())
            .mul(&PadicMatrix::from_rational(&mr, P, N));
        prop_assert!(l_invariant(&q2).unwrap().eq_at_precision(&expect));
    }

    #[test]
    fn tate_criteria_agree(q1 in tate_period(), q2 in tate_period()) {
        let c = tate_curve_criteria(&q1, &q2, 64).unwrap();
        prop_assert_eq!(c.relation.is_some(), c.hom_nonzero);
        prop_assert_eq!(c.hom_nonzero, c.l_equal);
        let a = PeriodMatrix::tate_curve(&q1).unwrap();
        let b = PeriodMatrix::tate_curve(&q2).unwrap();
        prop_assert_eq!(hom_algebraic(&a, &b, HomMode::Rational, None).unwrap().cross_check, Some(true));
    }

    #[test]
    fn ordinary_round_trip(b in proptest::collection::vec(-50i64..50, 4)) {
        let z = |x: i64| PadicNumber::from_integer(x, P, N);
        let a = b[0] * b[0] - b[1] * b[1] + b[2] * b[3];
        let v = vec![z(a), z(b[0]), z(b[1]), z(b[2]), z(b[3]), z(1)];
        let f = ordinary_filtration_from_vector(&v).unwrap();
        prop_assert_eq!(vector_from_filtration(&f).unwrap(), v);
    }
}
