#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use tate_periods::abeloid::PeriodMatrix;
use tate_periods::linalg::RationalMatrix;
use tate_periods::{parse_entry, MultElement, QpContext, Units};

pub const P: u64 = 7;
pub const N: u32 = 64;

fn entry_text(z: u8, v: i64, t: i64, w: i64) -> String {
    format!("zeta^{z}*p^({v})*(1+p)^({t})*(2+p)^({w})")
}

/// A g×g period matrix whose ord matrix has nonzero determinant.
pub fn lattice() -> impl Strategy<Value = PeriodMatrix> {
    lattice_of(1..=4)
}

pub fn lattice_of(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = PeriodMatrix> {
    dims
        .prop_flat_map(|g| proptest::collection::vec((0u8..6, -2i64..4, -3i64..4, -2i64..3), g * g).prop_map(move |e| (g, e)))
        .prop_filter_map("singular ord", |(g, e)| {
            let ord = RationalMatrix::from_ints(&e.chunks(g).map(|r| r.iter().map(|x| x.1).collect()).collect::<Vec<_>>());
            if ord.det().is_zero() {
                return None;
            }
            let text: Vec<Vec<String>> = e.chunks(g).map(|r| r.iter().map(|&(z, v, t, w)| entry_text(z, v, t, w)).collect()).collect();
            let rows: Vec<Vec<&str>> = text.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
            let refs: Vec<&[&str]> = rows.iter().map(Vec::as_slice).collect();
            Some(PeriodMatrix::parse(P, N, &refs).unwrap())
        })
}

/// Unimodular matrix as a product of elementary moves.
pub fn unimodular(g: usize) -> impl Strategy<Value = Vec<Vec<BigInt>>> {
    proptest::collection::vec((0..g, 0..g, -3i64..=3, any::<bool>()), 0..8).prop_map(move |ops| {
        let mut m: Vec<Vec<i64>> = (0..g).map(|i| (0..g).map(|j| (i == j) as i64).collect()).collect();
        for (i, j, k, swap) in ops {
            if i == j {
                continue;
            }
            if swap {
                m.swap(i, j);
            } else {
                let src = m[j].clone();
                for (x, s) in m[i].iter_mut().zip(&src) {
                    *x += k * s;
                }
            }
        }
        m.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
    })
}

pub fn tate_period() -> impl Strategy<Value = MultElement> {
    let ctx = QpContext::new(P, N).unwrap();
    (0u8..6, 1i64..4, -2i64..3).prop_map(move |(z, v, t)| {
        parse_entry(&format!("zeta^{z}*p^({v})*(1+p)^({t})"), &ctx, &Units::new()).unwrap()
    })
}

