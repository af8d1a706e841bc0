//! Acceptance run: one line per criterion, exits non-zero if any is red.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tate_periods::abeloid::{change_basis, hom_algebraic, l_invariant, tate_curve_criteria, HomMode, PeriodMatrix, RELATION_BOUND};
use tate_periods::linalg::{padic_rank, IntMatrix, PadicMatrix, RationalMatrix};
use tate_periods::padic::default_height;
use tate_periods::phin::{dst_of_abeloid, fil0_vectors, raskind_check, RaskindVerdict};
use tate_periods::scenarios::{appendix_tate_pair, counterexample, l_independence, ScenarioReport, DEFAULT_EPSILON};
use tate_periods::surface::{build_h2, example_non_admissible, ordinary_filtration_from_vector, picard_rank, vector_from_filtration};
use tate_periods::{parse_entry, PadicNumber, QpContext, Units};

const P: u64 = 7;
const N: u32 = 64;
const SEED: u64 = 0x7a7e;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn run(id: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|e| ok(false, format!("panicked: {:?}", e.downcast_ref::<String>().cloned().unwrap_or_default())));
    let dt = t.elapsed();
    let in_time = dt <= limit;
    let pass = out.pass && in_time;
    let timing = format!("{:.1} ms, limit {} ms", dt.as_secs_f64() * 1e3, limit.as_millis());
    println!(
        "{} {id}: {} ({timing}{})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        if in_time { "" } else { ", too slow" }
    );
    pass
}

fn quad(r: &ScenarioReport, keys: &[&str]) -> Vec<usize> {
    keys.iter().map(|k| r.value(k).unwrap_or(usize::MAX)).collect()
}

fn check_flag(r: &ScenarioReport, name: &str) -> bool {
    r.checks.iter().any(|c| c.name == name && c.pass)
}

fn criterion1() -> Outcome {
    let keys = ["hom_tate_p", "hom_algebraic", "end_tate_p", "end_algebraic"];
    let mut details = Vec::new();
    let mut pass = true;
    for p in [7, 13] {
        let t = Instant::now();
        match counterexample(p, N, DEFAULT_EPSILON, Some(&BigInt::from(1_000_000))) {
            Ok(r) => {
                let q = quad(&r, &keys);
                let certified = r.measurements.iter().all(|m| m.certified);
                let good = q == [1, 0, 2, 1]
                    && certified
                    && check_flag(&r, "a^2 + b^2 = 1")
                    && check_flag(&r, "b/a is not rational")
                    && t.elapsed() < Duration::from_secs(1);
                pass &= good;
                details.push(format!("p={p} -> {q:?} certified={certified}"));
            }
            Err(e) => {
                pass = false;
                details.push(format!("p={p} -> error {e}"));
            }
        }
    }
    ok(pass, details.join("; "))
}

fn criterion2() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for ell in [2, 3, 5] {
        let r = appendix_tate_pair(P, ell, N).unwrap();
        let got = (r.value("hom_algebraic"), r.value("hom_tate_ell"));
        pass &= got == (Some(0), Some(1)) && r.pass;
        details.push(format!("l={ell} -> {:?}", (got.0.unwrap(), got.1.unwrap())));
    }
    ok(pass, details.join("; "))
}

fn criterion3() -> Outcome {
    let r = l_independence(P, 2, N, None).unwrap();
    let got = (r.value("dim_ell"), r.value("dim_p"));
    ok(got == (Some(3), Some(2)) && r.pass, format!("dim_l = {:?}, dim_p = {:?}", got.0.unwrap(), got.1.unwrap()))
}

fn verdict(v: &RaskindVerdict) -> String {
    format!("({}, {}, {})", v.dim_q, v.dim_qp, v.admissible)
}

fn criterion4() -> Outcome {
    let ctx = QpContext::new(P, N).unwrap();
    let e = |s: &str| parse_entry(s, &ctx, &Units::new()).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for (a, b, want, rho) in [("p", "(1+p)*p", (2, 2, true), 2), ("p", "p^2", (3, 3, true), 3)] {
        let (q1, q2) = (e(a), e(b));
        let m = build_h2(&q1, &q2).unwrap();
        let v = raskind_check(&m.module, &m.structure, &m.facts).unwrap();
        let r = picard_rank(&q1, &q2, &[]).unwrap();
        pass &= (v.dim_q, v.dim_qp, v.admissible) == want && v.method == "symbolic" && v.certified && r == rho;
        details.push(format!("({a}, {b}) -> {} rho={r}", verdict(&v)));
    }
    ok(pass, details.join("; "))
}

fn criterion5() -> Outcome {
    let gamma = PadicNumber::from_integer(-3, P, N).hensel_sqrt().unwrap();
    let m = example_non_admissible(&gamma, &PadicNumber::from_integer(1, P, N), None).unwrap();
    let v = raskind_check(&m.module, &m.structure, &m.facts).unwrap();
    ok(
        (v.dim_q, v.dim_qp, v.admissible) == (1, 2, false) && v.method == "symbolic",
        format!("gamma = sqrt(-3), lambda = 1 -> {}", verdict(&v)),
    )
}

fn unit(rng: &mut ChaCha8Rng) -> i64 {
    loop {
        let x: i64 = rng.random_range(1..1_000_000_000);
        if x % P as i64 != 0 {
            return x;
        }
    }
}

fn random_lattice(rng: &mut ChaCha8Rng, max_g: usize) -> PeriodMatrix {
    loop {
        let g = rng.random_range(1..=max_g);
        let e: Vec<(u8, i64, i64, i64)> = (0..g * g)
            .map(|_| (rng.random_range(0..6), rng.random_range(-2..4), rng.random_range(-3..4), rng.random_range(-2..3)))
            .collect();
        let ord: Vec<Vec<i64>> = e.chunks(g).map(|r| r.iter().map(|x| x.1).collect()).collect();
        if RationalMatrix::from_ints(&ord).det() == BigRational::from_integer(0.into()) {
            continue;
        }
        let text: Vec<Vec<String>> = e
            .chunks(g)
            .map(|r| r.iter().map(|&(z, v, t, w)| format!("zeta^{z}*p^({v})*(1+p)^({t})*(2+p)^({w})")).collect())
            .collect();
        let rows: Vec<Vec<&str>> = text.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        let refs: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
        return PeriodMatrix::parse(P, N, &refs).unwrap();
    }
}

fn random_unimodular(rng: &mut ChaCha8Rng, g: usize) -> IntMatrix {
    let mut m: Vec<Vec<i64>> = (0..g).map(|i| (0..g).map(|j| (i == j) as i64).collect()).collect();
    for _ in 0..rng.random_range(0..8) {
        let (i, j) = (rng.random_range(0..g), rng.random_range(0..g));
        if i == j {
            continue;
        }
        if rng.random_bool(0.3) {
            m.swap(i, j);
        } else {
            let k: i64 = rng.random_range(-3..=3);
            let src = m[j].clone();
            for (x, s) in m[i].iter_mut().zip(&src) {
                *x += k * s;
            }
        }
    }
    m.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
}

/// Runs `count` cases and returns the number of failures.
fn suite(name: &str, count: usize, mut case: impl FnMut(&mut ChaCha8Rng) -> bool) -> (String, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ name.len() as u64);
    let fails = (0..count).filter(|_| !case(&mut rng)).count();
    (format!("{name} {}/{count}", count - fails), fails)
}

fn criterion6() -> Outcome {
    let ctx = QpContext::new(P, N).unwrap();
    let mut parts = Vec::new();
    parts.push(suite("log", 1000, |rng| {
        let x = PadicNumber::from_integer(unit(rng), P, N);
        let y = PadicNumber::from_integer(unit(rng), P, N);
        let add = (&x * &y).iwasawa_log().unwrap().eq_at_precision(&(&x.iwasawa_log().unwrap() + &y.iwasawa_log().unwrap()));
        add && x.teichmuller().unwrap().iwasawa_log().unwrap().is_zero()
    }));
    parts.push(suite("N.Phi=p.Phi.N", 100, |rng| {
        let d = dst_of_abeloid(&random_lattice(rng, 4)).unwrap();
        let pp = PadicNumber::from_integer(P, P, N);
        d.mono().mul(d.phi()).eq_at_precision(&d.phi().mul(d.mono()).scale(&pp))
    }));
    parts.push(suite("L-conjugation", 100, |rng| {
        let q = random_lattice(rng, 4);
        let m = random_unimodular(rng, q.g());
        let mr = RationalMatrix::from_bigints(&m);
        let expect = PadicMatrix::from_rational(&mr.inverse().unwrap(), P, N)
            .mul(&l_invariant(&q).unwrap())
            .mul(&PadicMatrix::from_rational(&mr, P, N));
        l_invariant(&change_basis(&q, &m).unwrap()).unwrap().eq_at_precision(&expect)
    }));
    let pairs: Vec<(String, String)> = {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        (0..100)
            .map(|_| {
                let mut t = || {
                    format!(
                        "zeta^{}*p^({})*(1+p)^({})",
                        rng.random_range(0..6),
                        rng.random_range(1..4),
                        rng.random_range(-2..3)
                    )
                };
                (t(), t())
            })
            .collect()
    };
    let e = |s: &str| parse_entry(s, &ctx, &Units::new()).unwrap();
    let mut it = pairs.iter();
    parts.push(suite("Tate-curve criteria", pairs.len(), |_| {
        let (a, b) = it.next().unwrap();
        let c = tate_curve_criteria(&e(a), &e(b), RELATION_BOUND).unwrap();
        c.relation.is_some() == c.hom_nonzero && c.hom_nonzero == c.l_equal
    }));
    let mut it = pairs.iter();
    parts.push(suite("dual Hom strategies", pairs.len(), |_| {
        let (a, b) = it.next().unwrap();
        let qa = PeriodMatrix::tate_curve(&e(a)).unwrap();
        let qb = PeriodMatrix::tate_curve(&e(b)).unwrap();
        hom_algebraic(&qa, &qb, HomMode::Rational, None).unwrap().cross_check == Some(true)
    }));
    parts.push(suite("ordinary round trip", 100, |rng| {
        let z = |x: i64| PadicNumber::from_integer(x, P, N);
        let b: Vec<i64> = (0..4).map(|_| rng.random_range(-1000..1000)).collect();
        let a = b[0] * b[0] - b[1] * b[1] + b[2] * b[3];
        let v = vec![z(a), z(b[0]), z(b[1]), z(b[2]), z(b[3]), z(1)];
        ordinary_filtration_from_vector(&v).and_then(|f| vector_from_filtration(&f)).is_ok_and(|w| w == v)
    }));
    let h = default_height(P, N);
    parts.push(suite("rational_reconstruct", 1000, |rng| {
        let num: i64 = rng.random_range(-1_000_000_000_000..1_000_000_000_000);
        let den = unit(rng);
        let r = BigRational::new(num.into(), den.into());
        PadicNumber::from_rational_unchecked(&r, P, N).rational_reconstruct(&h).unwrap() == Some(r)
    }));
    let fails: usize = parts.iter().map(|p| p.1).sum();
    ok(fails == 0, parts.into_iter().map(|p| p.0).collect::<Vec<_>>().join(", "))
}

fn criterion7() -> Outcome {
    let (detail, fails) = suite("Fil^0 rank = g", 100, |rng| {
        let q = random_lattice(rng, 4);
        padic_rank(&fil0_vectors(&q), P, N).0 == q.g()
    });
    ok(fails == 0, detail)
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run("1 counterexample (1,0,2,1) at p=7,13", s(2), criterion1),
        run("2 l != p Tate pair (0,1) for l=2,3,5", s(1), criterion2),
        run("3 l-dependence of Tate classes (3,2)", s(1), criterion3),
        run("4 Tate-curve products: Raskind and Picard", s(1), criterion4),
        run("5 non-admissible family (1,2,false)", s(1), criterion5),
        run("6 property suites", s(30), criterion6),
        run("7 Fil^0 spanning", s(5), criterion7),
    ];
    let passed = results.iter().filter(|&&b| b).count();
    println!("{passed}/{} acceptance criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
