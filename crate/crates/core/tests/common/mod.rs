#![allow(dead_code)]

use diffops::{DiffOp, FieldSpec, MultiExp, PolyRing, Polynomial};
use proptest::prelude::*;

pub fn ring(p: u64, n: usize) -> PolyRing {
    PolyRing::with_nvars(FieldSpec::new(p).unwrap(), n).unwrap()
}

pub fn any_field() -> impl Strategy<Value = u64> {
    prop_oneof![Just(0u64), Just(2), Just(3), Just(5)]
}

pub fn prime_field() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(5)]
}

/// `(numerator, denominator)`; denominators only matter in characteristic zero.
type RawCoeff = (i64, i64);
type RawPoly = Vec<(Vec<u32>, RawCoeff)>;

fn raw_exp(n: usize, max_degree: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=max_degree, n).prop_map(move |mut e| {
        while e.iter().sum::<u32>() > max_degree {
            let i = (0..e.len()).max_by_key(|&i| e[i]).unwrap();
            e[i] -= 1;
        }
        e
    })
}

fn raw_poly(n: usize, max_degree: u32, max_terms: usize) -> impl Strategy<Value = RawPoly> {
    prop::collection::vec(
        (raw_exp(n, max_degree), (-4i64..=4, 1i64..=3)),
        1..=max_terms,
    )
}

pub fn build_poly(ring: &PolyRing, raw: &RawPoly) -> Polynomial {
    let spec = ring.spec();
    let mut f = ring.zero();
    for (e, (num, den)) in raw {
        let c = if spec.is_zero_char() {
            spec.from_i64(*num)
                .checked_div(&spec.from_i64(*den))
                .unwrap()
        } else {
            spec.from_i64(*num)
        };
        f = f
            .checked_add(&ring.monomial(MultiExp::new(e.clone()), c))
            .unwrap();
    }
    f
}

pub fn poly(
    ring: PolyRing,
    max_degree: u32,
    max_terms: usize,
) -> impl Strategy<Value = Polynomial> {
    raw_poly(ring.nvars(), max_degree, max_terms).prop_map(move |raw| build_poly(&ring, &raw))
}

fn build_op(ring: &PolyRing, raw: &[(Vec<u32>, RawPoly)]) -> DiffOp {
    let mut xi = DiffOp::zero(ring);
    for (alpha, f) in raw {
        let t = DiffOp::term(build_poly(ring, f), MultiExp::new(alpha.clone()));
        xi = xi.checked_add(&t).unwrap();
    }
    xi
}

/// Operators of order ≤ `max_order` with coefficients of degree ≤ `coeff_degree`.
pub fn op(ring: PolyRing, max_order: u32, coeff_degree: u32) -> impl Strategy<Value = DiffOp> {
    let n = ring.nvars();
    prop::collection::vec((raw_exp(n, max_order), raw_poly(n, coeff_degree, 3)), 1..=4)
        .prop_map(move |raw| build_op(&ring, &raw))
}

/// Operators with every divided-power exponent below `bound`.
pub fn op_in_box(ring: PolyRing, bound: u32, coeff_degree: u32) -> impl Strategy<Value = DiffOp> {
    let n = ring.nvars();
    prop::collection::vec(
        (
            prop::collection::vec(0..bound, n),
            raw_poly(n, coeff_degree, 3),
        ),
        1..=4,
    )
    .prop_map(move |raw| build_op(&ring, &raw))
}

/// A ring over one of ℚ, 𝔽₂, 𝔽₃, 𝔽₅ in 1 to 3 variables.
pub fn any_ring() -> impl Strategy<Value = PolyRing> {
    (any_field(), 1usize..=3).prop_map(|(p, n)| ring(p, n))
}
