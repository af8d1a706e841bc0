use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use tate_periods::{parse_entry, MultElement, PadicNumber, QpContext, Units};

mod common;
use common::{N, P};

fn nonzero_padic() -> impl Strategy<Value = PadicNumber> {
    (-5i32..6, 1i64..1_000_000_000)
        .prop_filter("unit part", |(_, u)| u % P as i64 != 0)
        .prop_map(|(v, u)| {
            let r = BigRational::new(BigInt::from(u), 1.into()) * BigRational::from_integer(P.into()).pow(v);
            PadicNumber::from_rational_unchecked(&r, P, N)
        })
}

fn element(ctx: QpContext) -> impl Strategy<Value = MultElement> {
    (0u8..6, -4i64..5, -6i64..7, -3i64..4, prop::sample::select(vec!["", "*(1+p)^(sqrt(-3))", "*(1+p)^(2*sqrt(-3))"]))
        .prop_map(move |(z, v, t, w, extra)| {
            let text = format!("zeta^{z}*p^({v})*(1+p)^({t})*(3+p)^({w}){extra}");
            parse_entry(&text, &ctx, &Units::new()).unwrap()
        })
}

fn ctx() -> QpContext {
    QpContext::new(P, N).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn valuation_axioms(x in nonzero_padic(), y in nonzero_padic()) {
        let (vx, vy) = (x.valuation().unwrap(), y.valuation().unwrap());
        prop_assert_eq!((&x * &y).valuation(), Some(vx + vy));
        let s = &x + &y;
        if let Some(vs) = s.valuation() {
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }
    }

    #[test]
    fn hensel_sqrt_squares_back(u in 1i64..1_000_000_000) {
        prop_assume!(u % P as i64 != 0);
        let x = PadicNumber::from_integer(u, P, N);
        let d = &x * &x;
        let r = d.hensel_sqrt().unwrap();
        prop_assert!((&r * &r).eq_at_precision(&d));
    }

    #[test]
    fn gamma_is_multiplicative(x in element(ctx()), y in element(ctx()), ell in prop::sample::select(vec![2u64, 3, 5, 7, 11])) {
        let xy = x.mul(&y).unwrap();
        prop_assert!(xy.gamma(ell).same_as(&x.gamma(ell).mul(&y.gamma(ell))));
    }

    #[test]
    fn gamma_kernels(t in -20i64..20, ell in prop::sample::select(vec![2u64, 3, 5, 11])) {
        let c = ctx();
        let u = parse_entry(&format!("(1+p)^({t})*(8)^(3)"), &c, &Units::new()).unwrap();
        prop_assert!(u.is_principal_unit());
        prop_assert!(u.gamma(ell).is_identity());
        prop_assert_eq!(u.gamma(P).is_identity(), u.same_as(&MultElement::identity(&c)));
    }

    #[test]
    fn log_and_ord_are_homomorphisms(x in element(ctx()), y in element(ctx())) {
        let xy = x.mul(&y).unwrap();
        prop_assert!(xy.log_of().eq_at_precision(&(&x.log_of() + &y.log_of())));
        prop_assert_eq!(xy.ord_of(), x.ord_of() + y.ord_of());
    }

    #[test]
    fn print_parse_round_trip(x in element(ctx())) {
        let back = parse_entry(&x.to_string(), &ctx(), &Units::new()).unwrap();
        prop_assert!(back.same_as(&x), "{} reparsed as {}", x, back);
    }
}
