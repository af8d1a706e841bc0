use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigInt;

use tate_periods::abeloid::{hom_algebraic, l_invariant, HomMode, PeriodMatrix};
use tate_periods::linalg::{hermite_smith, padic_kernel, sylvester_kernel, PadicMatrix, RationalMatrix};
use tate_periods::phin::raskind_check;
use tate_periods::scenarios::{counterexample, DEFAULT_EPSILON};
use tate_periods::surface::{build_h2, example_non_admissible};
use tate_periods::{parse_entry, PadicNumber, QpContext, Units};

const P: u64 = 7;
const N: u32 = 64;

fn padic(c: &mut Criterion) {
    let x = PadicNumber::from_integer(123_456_789, P, N);
    c.bench_function("iwasawa_log", |b| b.iter(|| black_box(&x).iwasawa_log().unwrap()));
    c.bench_function("teichmuller", |b| b.iter(|| black_box(&x).teichmuller().unwrap()));
    let sq = &x * &x;
    c.bench_function("hensel_sqrt", |b| b.iter(|| black_box(&sq).hensel_sqrt().unwrap()));
    let h = BigInt::from(1_000_000);
    let r = PadicNumber::from_integer(-3, P, N).hensel_sqrt().unwrap();
    c.bench_function("rational_reconstruct_fail", |b| b.iter(|| black_box(&r).rational_reconstruct(&h).unwrap()));
}

fn linear_algebra(c: &mut Criterion) {
    let rows: Vec<Vec<i64>> = (0..6).map(|i| (0..6).map(|j| ((i * 7 + j * 3) % 11) as i64 - 5).collect()).collect();
    let a = RationalMatrix::from_ints(&rows);
    let pa = PadicMatrix::from_rational(&a, P, N);
    c.bench_function("padic_kernel_6x6", |b| b.iter(|| padic_kernel(black_box(&pa)).unwrap()));
    let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    c.bench_function("hermite_smith_6x6", |b| b.iter(|| hermite_smith(black_box(&ints))));
    let q = PeriodMatrix::parse(
        P,
        N,
        &[
            &["p", "(1+p)", "zeta"],
            &["(1+p)", "p^2*(2+p)", "1"],
            &["zeta", "1", "p*(1+p)^3"],
        ],
    )
    .unwrap();
    let l = l_invariant(&q).unwrap();
    c.bench_function("sylvester_kernel_g3", |b| b.iter(|| sylvester_kernel(black_box(&l), black_box(&l)).unwrap()));
    c.bench_function("hom_algebraic_g3", |b| b.iter(|| hom_algebraic(&q, &q, HomMode::Rational, None).unwrap()));
}

fn scenarios(c: &mut Criterion) {
    c.bench_function("counterexample_p7", |b| b.iter(|| counterexample(7, N, DEFAULT_EPSILON, None).unwrap()));
    let ctx = QpContext::new(P, N).unwrap();
    let q1 = parse_entry("p", &ctx, &Units::new()).unwrap();
    let q2 = parse_entry("(1+p)*p", &ctx, &Units::new()).unwrap();
    c.bench_function("build_h2_raskind", |b| {
        b.iter(|| {
            let m = build_h2(&q1, &q2).unwrap();
            raskind_check(&m.module, &m.structure, &m.facts).unwrap()
        })
    });
    let gamma = PadicNumber::from_integer(-3, P, N).hensel_sqrt().unwrap();
    let one = PadicNumber::from_integer(1, P, N);
    c.bench_function("non_admissible_raskind", |b| {
        b.iter(|| {
            let m = example_non_admissible(&gamma, &one, None).unwrap();
            raskind_check(&m.module, &m.structure, &m.facts).unwrap()
        })
    });
}

criterion_group!(benches, padic, linear_algebra, scenarios);
criterion_main!(benches);
