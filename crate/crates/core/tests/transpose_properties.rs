mod common;

use common::*;
use diffops::invariants::GroupElement;
use diffops::transpose::{involutive_on_one, level_one_rigidity_search, transport};
use diffops::{
    standard_transpose, AntiAutomorphism, DiffOp, FieldSpec, MultiExp, PolyRing, Polynomial,
};
use proptest::prelude::*;

fn twist(r: PolyRing) -> impl Strategy<Value = Vec<Polynomial>> {
    let n = r.nvars();
    prop::collection::vec(prop::collection::vec(-3i64..=3, 0..=3), n).prop_map(move |coeffs| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, cs)| {
                let mut f = r.zero();
                for (d, c) in cs.iter().enumerate() {
                    let m = r.monomial(MultiExp::unit(n, i).scale(d as u32), r.spec().from_i64(*c));
                    f = f.checked_add(&m).unwrap();
                }
                f
            })
            .collect()
    })
}

fn standard_case() -> impl Strategy<Value = (DiffOp, DiffOp, Polynomial)> {
    any_ring().prop_flat_map(|r| (op(r.clone(), 4, 3), op(r.clone(), 3, 2), poly(r, 4, 4)))
}

fn twisted_case() -> impl Strategy<Value = (AntiAutomorphism, DiffOp, DiffOp)> {
    (1usize..=2).prop_flat_map(|n| {
        let r = ring(0, n);
        (
            twist(r.clone()),
            op(r.clone(), 3, 2),
            op(r.clone(), 2, 2),
            Just(r),
        )
            .prop_map(|(t, a, b, r)| (AntiAutomorphism::twisted(&r, t).unwrap(), a, b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn standard_transposition_is_an_involutive_anti_automorphism((xi, eta, f) in standard_case()) {
        let phi = standard_transpose(&xi);
        prop_assert_eq!(standard_transpose(&phi), xi.clone());
        prop_assert_eq!(
            standard_transpose(&xi.checked_mul(&eta).unwrap()),
            standard_transpose(&eta).checked_mul(&phi).unwrap()
        );
        prop_assert_eq!(standard_transpose(&DiffOp::from_poly(&f)), DiffOp::from_poly(&f));
        prop_assert_eq!(phi.order(), xi.order());
        if !xi.ring().spec().is_zero_char() && !xi.is_zero() {
            prop_assert_eq!(phi.level().unwrap(), xi.level().unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn twisted_transposition_is_an_involutive_anti_automorphism((phi, xi, eta) in twisted_case()) {
        let image = phi.apply(&xi).unwrap();
        prop_assert_eq!(phi.apply(&image).unwrap(), xi.clone());
        prop_assert_eq!(
            phi.apply(&xi.checked_mul(&eta).unwrap()).unwrap(),
            phi.apply(&eta).unwrap().checked_mul(&image).unwrap()
        );
        prop_assert_eq!(image.order(), xi.order());
        prop_assert!(phi.respects_weyl_relations(xi.ring()).unwrap());
    }

    #[test]
    fn check_on_one_agrees_with_full_involutivity((xi, _eta, _f) in standard_case()) {
        let phi = AntiAutomorphism::Standard;
        let full = phi.apply(&phi.apply(&xi).unwrap()).unwrap() == xi;
        prop_assert!(involutive_on_one(&xi, &phi).unwrap());
        prop_assert!(full);
    }

    #[test]
    fn standard_transposition_commutes_with_linear_coordinate_changes(
        (rows, xi) in prime_field().prop_flat_map(|p| {
            let r = ring(p, 2);
            (prop::collection::vec(prop::collection::vec(0..p as i64, 2), 2), op_in_box(r, p.min(4) as u32 + 1, 2))
        })
    ) {
        let spec = xi.ring().spec();
        let rows: Vec<Vec<_>> = rows.iter().map(|r| r.iter().map(|&v| spec.from_i64(v)).collect()).collect();
        let g = GroupElement::from_rows(spec, rows);
        prop_assume!(g.is_ok());
        let m = g.unwrap().ring_map(xi.ring()).unwrap();
        let m_inv = m.inverse().unwrap();
        let conjugated = transport(&m, &standard_transpose(&transport(&m_inv, &xi).unwrap())).unwrap();
        prop_assert_eq!(conjugated, standard_transpose(&xi));
    }
}

#[test]
fn twist_by_x_squared_differs_from_the_standard_transposition() {
    let r = ring(0, 1);
    let x2 = r.var(0).pow(2);
    let phi = AntiAutomorphism::twisted(&r, vec![x2.clone()]).unwrap();
    let d = DiffOp::partial_var(&r, 0);
    let expected = DiffOp::from_poly(&x2).checked_sub(&d).unwrap();
    assert_eq!(phi.apply(&d).unwrap(), expected);
    assert_ne!(phi.apply(&d).unwrap(), standard_transpose(&d));
}

#[test]
fn twisting_is_refused_in_positive_characteristic() {
    let r = PolyRing::with_nvars(FieldSpec::prime(3).unwrap(), 1).unwrap();
    assert!(AntiAutomorphism::twisted(&r, vec![r.var(0)]).is_err());
}

#[test]
fn twist_must_depend_on_its_own_variable() {
    let r = ring(0, 2);
    assert!(AntiAutomorphism::twisted(&r, vec![r.var(1), r.zero()]).is_err());
}

#[test]
fn level_one_search_rejects_every_twist() {
    for bound in [0, 1, 5, 16] {
        let report = level_one_rigidity_search(bound).unwrap();
        assert!(report.no_twist(), "bound {bound}: {report:?}");
        let j = if bound >= 1 { 1 } else { usize::MAX };
        assert!(report.recursion.contains(&(0, j)));
    }
}
