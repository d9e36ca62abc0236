use std::str::FromStr;
use std::sync::Arc;

use super::*;
use crate::coxeter::{build_group, CoxeterTypeSpec};
use crate::polyalg::FieldTag;

fn map(spec: &str) -> ChevalleyMap {
    let g = build_group(CoxeterTypeSpec::from_str(spec).unwrap()).unwrap();
    basic_invariants(Arc::new(g)).unwrap()
}

fn x(n: usize, i: usize) -> SparsePoly {
    SparsePoly::var(n, i, FieldTag::Rational)
}

fn int(c: i64, n: usize) -> SparsePoly {
    SparsePoly::constant(n, FieldElem::from_integer(c))
}

fn b2_p2() -> SparsePoly {
    x(2, 0).pow(4).try_add(&x(2, 1).pow(4)).unwrap()
}

#[test]
fn b2_degree_bookkeeping() {
    let c = map("B2");
    assert_eq!(c.degrees(), &[2, 4]);
    assert_eq!(c.reflection_count(), 4);
    assert_eq!(c.minor_degrees(), &[3, 1]);
    assert_eq!(c.min_minor_degree(), 1);
    assert_eq!(c.coxeter_number(), 4);
    let p1 = x(2, 0).pow(2).try_add(&x(2, 1).pow(2)).unwrap();
    assert_eq!(c.coordinates()[0], p1);
    assert_eq!(c.coordinates()[1], b2_p2());
}

#[test]
fn a1_chevalley_map() {
    let c = map("A1");
    assert_eq!(c.degrees(), &[2]);
    assert_eq!(c.reflection_count(), 1);
    assert_eq!(c.coxeter_number(), 2);
    assert_eq!(c.coordinates()[0], x(1, 0).pow(2));
}

#[test]
fn h3_degree_bookkeeping() {
    let c = map("H3");
    assert_eq!(c.degrees(), &[2, 6, 10]);
    assert_eq!(c.reflection_count(), 15);
    assert_eq!(c.min_minor_degree(), 6);
    assert_eq!(c.coxeter_number(), 10);
}

#[test]
fn reynolds_on_a1() {
    let c = map("A1");
    // odd monomial averages to zero
    assert!(c.reynolds(&x(1, 0)).unwrap().is_zero());
    // invariants are fixed
    let f = x(1, 0).pow(2);
    assert_eq!(c.reynolds(&f).unwrap(), f);
}

#[test]
fn reynolds_on_b2_averages_signed_permutations() {
    let c = map("B2");
    let got = c.reynolds(&x(2, 0).pow(4)).unwrap();
    let want = b2_p2().scale(&FieldElem::from_ratio(1, 2));
    assert_eq!(got, want);
}

#[test]
fn reynolds_is_idempotent() {
    // A₂ acts essentially on two coordinates
    let c = map("A2");
    let f = x(2, 0)
        .pow(3)
        .try_add(&x(2, 0).try_mul(&x(2, 1)).unwrap())
        .unwrap();
    let once = c.reynolds(&f).unwrap();
    let twice = c.reynolds(&once).unwrap();
    assert_eq!(once, twice);
    assert!(c.group().is_invariant(&once));
}

#[test]
fn b2_jacobian_factorization() {
    let c = map("B2");
    // J = det [[2x, 2y], [4x³, 4y³]] = 8xy³ − 8x³y
    let j = c.jacobian_determinant();
    let want = int(8, 2)
        .try_mul(&x(2, 0))
        .unwrap()
        .try_mul(&x(2, 1).pow(3))
        .unwrap()
        .try_sub(
            &int(8, 2)
                .try_mul(&x(2, 0).pow(3))
                .unwrap()
                .try_mul(&x(2, 1))
                .unwrap(),
        )
        .unwrap();
    assert_eq!(j, want);
    let fact = c.jacobian_factorization().unwrap();
    assert_eq!(fact.c, FieldElem::from_integer(-8));
    assert_eq!(fact.factors.len(), 4);
    // c · ∏λ = J exactly
    let mut prod = SparsePoly::constant(2, fact.c.clone());
    for f in &fact.factors {
        prod = prod.try_mul(f).unwrap();
    }
    assert_eq!(prod, j);
}

#[test]
fn a1_jacobian_factorization() {
    let c = map("A1");
    let fact = c.jacobian_factorization().unwrap();
    assert_eq!(fact.c, FieldElem::from_integer(2));
    assert_eq!(fact.factors.len(), 1);
}

#[test]
fn h3_jacobian_factorization_is_exact() {
    let c = map("H3");
    let fact = c.jacobian_factorization().unwrap();
    assert_eq!(fact.factors.len(), 15);
    assert!(!fact.c.is_zero());
    assert_eq!(fact.c.tag(), FieldTag::QuadExt(5));
}

#[test]
fn a1_discriminant_is_4u() {
    let c = map("A1");
    let delta = c.discriminant().unwrap();
    // J² = 4x² = 4·p₁
    assert_eq!(delta, int(4, 1).try_mul(&x(1, 0)).unwrap());
}

#[test]
fn b2_discriminant_roundtrip_and_mirror_zero() {
    let c = map("B2");
    let delta = c.discriminant().unwrap();
    let j = c.jacobian_determinant();
    let j2 = j.try_mul(&j).unwrap();
    assert_eq!(c.compose_with_basis(&delta).unwrap(), j2);
    // Δ(P(x)) = 0 for x on the mirror x = y
    let p_at = c
        .evaluate(&[FieldElem::from_integer(3), FieldElem::from_integer(3)])
        .unwrap();
    assert!(delta.evaluate(&p_at).unwrap().is_zero());
}

#[test]
fn b2_rewrite_basis_element() {
    let c = map("B2");
    let res = c.rewrite_invariant(&b2_p2()).unwrap();
    assert_eq!(res.target, x(2, 1)); // F = u₂
    assert_eq!(res.weighted_degree, 4);
}

#[test]
fn b2_rewrite_x2y2() {
    // x²y² = (u₁² − u₂)/2: solve the 2-unknown system over {x⁴, x²y²}
    let c = map("B2");
    let f = x(2, 0).pow(2).try_mul(&x(2, 1).pow(2)).unwrap();
    let res = c.rewrite_invariant(&f).unwrap();
    let want = x(2, 0)
        .pow(2)
        .try_sub(&x(2, 1))
        .unwrap()
        .scale(&FieldElem::from_ratio(1, 2));
    assert_eq!(res.target, want);
    assert_eq!(c.compose_with_basis(&res.target).unwrap(), f);
}

#[test]
fn a1_rewrite_degree_bound() {
    let c = map("A1");
    let f = x(1, 0).pow(6);
    let res = c.rewrite_invariant(&f).unwrap();
    assert_eq!(res.target, x(1, 0).pow(3)); // F = u³
    let dmax = res.target.terms().map(|(m, _)| m.0[0]).max().unwrap();
    assert_eq!(dmax as u32, 6 / c.coxeter_number()); // [r/h] = 3
}

#[test]
fn rewrite_rejects_non_invariants() {
    let c = map("B2");
    assert!(matches!(
        c.rewrite_invariant(&x(2, 0)),
        Err(ChevalleyError::NotInvariant)
    ));
}

#[test]
fn a1_gradient_system() {
    let c = map("A1");
    let f = x(1, 0).pow(4);
    let g = c.gradient_system(&f).unwrap();
    assert_eq!(g, vec![int(2, 1).try_mul(&x(1, 0).pow(2)).unwrap()]);
    // matches (∂F/∂u)∘P with F = u²
    let res = c.rewrite_invariant(&f).unwrap();
    let df = res.target.differentiate(0);
    assert_eq!(c.compose_with_basis(&df).unwrap(), g[0]);
}

#[test]
fn b2_gradient_of_basis_element() {
    let c = map("B2");
    let g = c.gradient_system(&b2_p2()).unwrap();
    assert!(g[0].is_zero());
    assert_eq!(g[1], int(1, 2));
}

#[test]
fn b2_gradient_of_x2y2() {
    let c = map("B2");
    let f = x(2, 0).pow(2).try_mul(&x(2, 1).pow(2)).unwrap();
    let g = c.gradient_system(&f).unwrap();
    // F = (u₁²−u₂)/2 ⇒ g₁ = u₁∘P = x²+y², g₂ = −1/2
    assert_eq!(g[0], x(2, 0).pow(2).try_add(&x(2, 1).pow(2)).unwrap());
    assert_eq!(g[1], SparsePoly::constant(2, FieldElem::from_ratio(-1, 2)));
    // chain rule read forward: Σ_j (∂p_j/∂z_i)·g_j = ∂f/∂z_i
    for i in 0..2 {
        let mut acc = SparsePoly::zero(2, FieldTag::Rational);
        for (j, gj) in g.iter().enumerate() {
            acc = acc
                .try_add(&c.coordinates()[j].differentiate(i).try_mul(gj).unwrap())
                .unwrap();
        }
        assert_eq!(acc, f.differentiate(i));
    }
}

#[test]
fn orbit_separation_examples() {
    let c = map("B2");
    let p = |a: i64, b: i64| vec![FieldElem::from_integer(a), FieldElem::from_integer(b)];
    // (−2, 1) is a signed permutation image of (1, 2)
    assert_eq!(
        c.orbit_separation_check(&p(1, 2), &p(-2, 1)).unwrap(),
        (true, true)
    );
    // p₁ differs: 5 vs 10
    assert_eq!(
        c.orbit_separation_check(&p(1, 2), &p(1, 3)).unwrap(),
        (false, false)
    );
    // x = y trivially
    assert_eq!(
        c.orbit_separation_check(&p(1, 2), &p(1, 2)).unwrap(),
        (true, true)
    );
}

#[test]
fn weighted_derivative_orders() {
    let b2 = map("B2");
    assert_eq!(b2.weighted_derivative_order(&[1, 0]), 2);
    assert_eq!(b2.weighted_derivative_order(&[0, 1]), 4);
    let h3 = map("H3");
    assert_eq!(h3.weighted_derivative_order(&[1, 1, 1]), 18);
}

#[test]
fn probe_invariants_are_positive_definite() {
    for spec in ["A1", "A3", "B2", "B3", "D4", "I2(4)", "I2(6)", "H3"] {
        let c = map(spec);
        let q = c.probe_invariant().unwrap();
        assert_eq!(
            q.is_homogeneous(),
            Some(c.coxeter_number()),
            "probe invariant degree for {spec}"
        );
        assert!(c.group().is_invariant(&q), "invariance for {spec}");
        // positive at a handful of nonzero points
        let mut rng = crate::rng::SplitMix64::new(11);
        for _ in 0..20 {
            let v: Vec<f64> = (0..c.dim()).map(|_| rng.unit_f64() + 0.1).collect();
            assert!(q.evaluate_f64(&v) > 0.0, "positivity for {spec}");
        }
    }
    // A₂ has odd highest degree, I₂(5) has odd bond: both unsupported
    assert!(map("A2").probe_invariant().is_err());
    assert!(map("I2(5)").probe_invariant().is_err());
}

#[test]
fn exact_only_operations_reject_numeric_groups() {
    let c = map("I2(7)");
    let f = c.coordinates()[0].clone();
    assert!(matches!(
        c.gradient_system(&f),
        Err(ChevalleyError::NumericBackend)
    ));
    assert!(matches!(
        c.discriminant(),
        Err(ChevalleyError::NumericBackend)
    ));
}

#[test]
fn orbit_separation_on_the_numeric_backend() {
    let c = map("I2(7)");
    let x = vec![FieldElem::Numeric(0.3), FieldElem::Numeric(0.8)];
    let w = &c.group().enumerate_elements().unwrap()[5];
    let y = w.apply(&x);
    assert_eq!(c.orbit_separation_check(&x, &y).unwrap(), (true, true));
    let z = vec![FieldElem::Numeric(0.31), FieldElem::Numeric(0.8)];
    assert_eq!(c.orbit_separation_check(&x, &z).unwrap(), (false, false));
}

#[test]
fn reynolds_mirrors_onto_invariants_numerically() {
    let c = map("I2(5)");
    // no invariant linear forms exist, so a coordinate averages to ~0
    let averaged = c.reynolds(&x(2, 0)).unwrap();
    assert!(averaged.max_abs_coeff() <= 1e-9);
    // the quadratic invariant is fixed up to roundoff
    let p1 = c.coordinates()[0].clone();
    let averaged = c.reynolds(&p1).unwrap();
    assert!(averaged.approx_eq(&p1.promote(FieldTag::Numeric), 1e-9));
}

#[test]
fn i2_numeric_jacobian_check() {
    for spec in ["I2(5)", "I2(7)"] {
        let c = map(spec);
        assert!(matches!(
            c.jacobian_factorization(),
            Err(ChevalleyError::NumericBackend)
        ));
        let report = c.jacobian_numeric_check(100, 1e-9, 0);
        assert!(report.pass, "{spec}: max err {}", report.max_abs_error);
        assert!(report.c.abs() > 1e-6);
    }
}
