//! Property tests for the polynomial layer.

use proptest::prelude::*;

use workbench_core::polyalg::{vanishing_order, Flat, VanishingOrder};
use workbench_core::{FieldElem, FieldTag, SparsePoly};

fn arb_poly(nvars: usize, max_deg: u16, max_terms: usize) -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_deg, nvars), -9i64..=9),
        1..=max_terms,
    )
    .prop_map(move |terms| {
        SparsePoly::from_terms(
            nvars,
            FieldTag::Rational,
            terms
                .into_iter()
                .map(|(exp, c)| (exp, FieldElem::from_integer(c))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_distributivity(
        f in arb_poly(2, 4, 4),
        g in arb_poly(2, 4, 4),
        h in arb_poly(2, 3, 3),
    ) {
        let lhs = f.try_add(&g).unwrap().try_mul(&h).unwrap();
        let rhs = f.try_mul(&h).unwrap().try_add(&g.try_mul(&h).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplication_commutes(f in arb_poly(3, 4, 4), g in arb_poly(3, 4, 4)) {
        prop_assert_eq!(f.try_mul(&g).unwrap(), g.try_mul(&f).unwrap());
    }

    #[test]
    fn mixed_partials_commute(f in arb_poly(2, 6, 5)) {
        let a = f.differentiate(0).differentiate(1);
        let b = f.differentiate(1).differentiate(0);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn exact_division_roundtrip(f in arb_poly(2, 4, 4), g in arb_poly(2, 3, 3)) {
        prop_assume!(!g.is_zero());
        let prod = f.try_mul(&g).unwrap();
        prop_assert_eq!(prod.divide_exact(&g).unwrap(), f);
    }

    #[test]
    fn compose_respects_products(
        f in arb_poly(2, 3, 3),
        g in arb_poly(2, 3, 3),
        p0 in arb_poly(2, 2, 3),
        p1 in arb_poly(2, 2, 3),
    ) {
        let subs = vec![p0, p1];
        let lhs = f.try_mul(&g).unwrap().compose(&subs).unwrap();
        let rhs = f.compose(&subs).unwrap().try_mul(&g.compose(&subs).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn vanishing_order_is_additive(
        f in arb_poly(2, 4, 3),
        g in arb_poly(2, 4, 3),
        slope in -3i64..=3,
    ) {
        let flat = Flat::from_forms(
            2,
            &[vec![FieldElem::from_integer(1), FieldElem::from_integer(slope)]],
            FieldTag::Rational,
        );
        let expected = match (vanishing_order(&f, &flat), vanishing_order(&g, &flat)) {
            (VanishingOrder::Finite(a), VanishingOrder::Finite(b)) => VanishingOrder::Finite(a + b),
            _ => VanishingOrder::Infinite,
        };
        prop_assert_eq!(vanishing_order(&f.try_mul(&g).unwrap(), &flat), expected);
    }

    #[test]
    fn serialization_roundtrip(f in arb_poly(3, 5, 6)) {
        let s = workbench_core::polyalg::json::poly_to_json_string(&f);
        let back = workbench_core::polyalg::json::poly_from_json_str(&s).unwrap();
        prop_assert_eq!(f, back);
    }
}
