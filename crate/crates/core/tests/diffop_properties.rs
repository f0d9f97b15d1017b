mod common;

use common::*;
use diffops::{DiffOp, MultiExp, PolyRing};
use proptest::prelude::*;

fn ring_and_ops(
    k: usize,
    max_order: u32,
    coeff_degree: u32,
) -> impl Strategy<Value = (PolyRing, Vec<DiffOp>)> {
    any_ring().prop_flat_map(move |r| {
        (
            Just(r.clone()),
            prop::collection::vec(op(r, max_order, coeff_degree), k),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplication_is_associative((_r, ops) in ring_and_ops(3, 3, 2)) {
        let (a, b, c) = (&ops[0], &ops[1], &ops[2]);
        let left = a.checked_mul(b).unwrap().checked_mul(c).unwrap();
        let right = a.checked_mul(&b.checked_mul(c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn order_is_subadditive((r, ops) in ring_and_ops(2, 4, 3)) {
        let (a, b) = (&ops[0], &ops[1]);
        let prod = a.checked_mul(b).unwrap();
        if a.is_zero() || b.is_zero() {
            prop_assert!(prod.is_zero());
        } else if r.spec().is_zero_char() {
            // Symbols multiply in a domain.
            prop_assert_eq!(prod.order(), a.order() + b.order());
        } else {
            prop_assert!(prod.order() <= a.order() + b.order());
        }
    }

    #[test]
    fn order_matches_bracket_oracle((_r, ops) in ring_and_ops(1, 3, 2)) {
        let xi = &ops[0];
        prop_assume!(!xi.is_zero());
        prop_assert_eq!(xi.order_by_bracket_oracle(2).unwrap(), xi.order());
    }

    #[test]
    fn composition_matches_evaluation((r, ops) in ring_and_ops(2, 3, 2)) {
        let prod = ops[0].checked_mul(&ops[1]).unwrap();
        for e in MultiExp::all_up_to_degree(r.nvars(), 6) {
            let m = r.monomial(e, r.spec().one());
            prop_assert_eq!(prod.apply(&m).unwrap(), ops[0].apply(&ops[1].apply(&m).unwrap()).unwrap());
        }
    }

    #[test]
    fn first_order_operators_split_into_value_and_derivation(
        (r, xi, f, g) in any_ring().prop_flat_map(|r| (Just(r.clone()), op(r.clone(), 1, 3), poly(r.clone(), 3, 3), poly(r, 3, 3)))
    ) {
        let (value, theta) = xi.split_first_order().unwrap();
        prop_assert_eq!(value.clone(), xi.value_at_one());
        prop_assert_eq!(DiffOp::from_poly(&value).checked_add(&theta).unwrap(), xi.clone());
        prop_assert!(theta.is_derivation());
        let lhs = theta.apply(&f.checked_mul(&g).unwrap()).unwrap();
        let rhs = theta.apply(&f).unwrap().checked_mul(&g).unwrap()
            .checked_add(&f.checked_mul(&theta.apply(&g).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(theta.value_at_one(), r.zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn level_matches_commutation_oracle(
        xi in (prime_field(), 1usize..=2).prop_flat_map(|(p, n)| op_in_box(ring(p, n), 5, 2))
    ) {
        prop_assume!(!xi.is_zero());
        let level = xi.level().unwrap();
        for e in 0..=2u32 {
            prop_assert_eq!(xi.level_by_commutation_oracle(e, 3).unwrap(), level <= e, "e = {}, level = {}", e, level);
        }
    }
}

#[test]
fn weyl_relations_hold_in_every_tested_characteristic() {
    for p in [0, 2, 3, 5] {
        let r = ring(p, 3);
        for i in 0..3 {
            for j in 0..3 {
                let d = DiffOp::partial_var(&r, i);
                let x = DiffOp::from_poly(&r.var(j));
                let expected = if i == j {
                    DiffOp::one(&r)
                } else {
                    DiffOp::zero(&r)
                };
                assert_eq!(d.bracket(&x).unwrap(), expected);
                let dj = DiffOp::partial_var(&r, j);
                assert!(d.bracket(&dj).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn divided_powers_compose_by_binomials() {
    // ∂^[a] ∂^[b] = C(a+b, a) ∂^[a+b]; in characteristic 2, ∂ ∂ = 2 ∂^[2] = 0.
    let r = ring(0, 1);
    let d = |a: u32| DiffOp::partial(&r, MultiExp::new(vec![a])).unwrap();
    assert_eq!(
        d(2).checked_mul(&d(3)).unwrap(),
        d(5).scale(&r.spec().from_i64(10))
    );
    let r2 = ring(2, 1);
    let d1 = DiffOp::partial_var(&r2, 0);
    assert!(d1.checked_mul(&d1).unwrap().is_zero());
}
