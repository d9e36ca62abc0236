//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test --test acceptance -- --nocapture` to see them.

use std::str::FromStr;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use workbench_core::chevalley::{basic_invariants, ChevalleyMap, RewriteResult};
use workbench_core::coxeter::{build_group, CoxeterTypeSpec};
use workbench_core::polyalg::{vanishing_order, Flat, Monomial};
use workbench_core::rng::SplitMix64;
use workbench_core::selftest::random_poly;
use workbench_core::whitney::{
    self, lemma1_product_check, JetField, Lemma1Options, ProbeConfig, RegularityExponent,
};
use workbench_core::{FieldElem, SparsePoly};

const EXACT_GROUPS: [&str; 9] = ["A2", "A3", "B2", "B3", "B4", "D4", "I2(4)", "I2(6)", "H3"];

fn map_for(spec: &str) -> ChevalleyMap {
    let g = build_group(CoxeterTypeSpec::from_str(spec).unwrap()).unwrap();
    basic_invariants(Arc::new(g)).unwrap()
}

/// Shared fixture for criteria 3 and 4: 50 seeded Reynolds-averaged
/// invariants per group with their exact rewrites.
struct SuiteEntry {
    spec: String,
    map: ChevalleyMap,
    cases: Vec<(SparsePoly, RewriteResult)>,
}

static INVARIANT_SUITE: OnceLock<Vec<SuiteEntry>> = OnceLock::new();

fn invariant_suite() -> &'static [SuiteEntry] {
    INVARIANT_SUITE.get_or_init(|| {
        let mut out = Vec::new();
        let mut groups: Vec<&str> = vec!["A1"];
        groups.extend(EXACT_GROUPS);
        for (gi, spec) in groups.iter().enumerate() {
            let map = map_for(spec);
            let n = map.dim();
            let max_deg = if *spec == "A1" { 20 } else { 12 };
            let mut cases = Vec::with_capacity(50);
            for case in 0..50u64 {
                let mut rng = SplitMix64::new(1000 + case).fork(gi as u64);
                // retry until the Reynolds average is nonzero
                let f = loop {
                    let raw = random_poly(&mut rng, n, max_deg, 4);
                    let averaged = map.reynolds(&raw).expect("reynolds");
                    if !averaged.is_zero() {
                        break averaged;
                    }
                };
                let rewrite = map.rewrite_invariant(&f).expect("rewrite");
                cases.push((f, rewrite));
            }
            out.push(SuiteEntry {
                spec: spec.to_string(),
                map,
                cases,
            });
        }
        out
    })
}

#[test]
fn criterion_1_degree_bookkeeping() {
    let start = Instant::now();
    for spec_str in EXACT_GROUPS {
        let map = map_for(spec_str);
        let d_from_degrees: u32 = map.degrees().iter().map(|k| k - 1).sum();
        assert_eq!(
            map.reflection_count(),
            d_from_degrees,
            "{spec_str}: reflection count vs degree sum"
        );
        assert_eq!(
            map.group().reflections().len() as u32,
            map.reflection_count(),
            "{spec_str}: arrangement size"
        );
        assert_eq!(
            map.coxeter_number(),
            1 + map.reflection_count() - map.min_minor_degree(),
            "{spec_str}: h = 1 + d − s"
        );
    }
    let h3 = map_for("H3");
    assert_eq!(
        (
            h3.reflection_count(),
            h3.min_minor_degree(),
            h3.coxeter_number()
        ),
        (15, 6, 10),
        "H3 (d, s, h)"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "budget: {elapsed:?}");
    println!("criterion 1 PASS (degree bookkeeping, {elapsed:?})");
}

#[test]
fn criterion_2_jacobian_factorization() {
    let start = Instant::now();
    for spec_str in EXACT_GROUPS {
        let map = map_for(spec_str);
        let fact = map.jacobian_factorization().unwrap_or_else(|e| {
            panic!("{spec_str}: factorization failed: {e}");
        });
        assert!(!fact.c.is_zero(), "{spec_str}: constant is zero");
        assert_eq!(
            fact.factors.len() as u32,
            map.reflection_count(),
            "{spec_str}: factor multiset size"
        );
        if spec_str == "B2" {
            assert_eq!(fact.c, FieldElem::from_integer(-8), "B2 constant");
            let mut forms: Vec<String> = fact.factors.iter().map(|f| f.to_string()).collect();
            forms.sort();
            // expected hyperplanes: x, y, x−y, x+y
            let mut want: Vec<String> = [[1i64, 0], [0, 1], [1, -1], [1, 1]]
                .iter()
                .map(|coeffs| {
                    SparsePoly::linear_form(&[
                        FieldElem::from_integer(coeffs[0]),
                        FieldElem::from_integer(coeffs[1]),
                    ])
                    .to_string()
                })
                .collect();
            want.sort();
            assert_eq!(forms, want, "B2 factor forms");
        }
    }
    for spec_str in ["I2(5)", "I2(7)"] {
        let map = map_for(spec_str);
        let report = map.jacobian_numeric_check(100, 1e-9, 0);
        assert!(
            report.pass,
            "{spec_str}: |J − c∏λ| = {} > 1e-9",
            report.max_abs_error
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "budget: {elapsed:?}");
    println!("criterion 2 PASS (Jacobian factorization, {elapsed:?})");
}

#[test]
fn criterion_3_rewrite_round_trip() {
    let start = Instant::now();
    let suite = invariant_suite();
    for entry in suite {
        for (i, (f, rewrite)) in entry.cases.iter().enumerate() {
            let back = entry
                .map
                .compose_with_basis(&rewrite.target)
                .expect("compose");
            assert!(
                back.try_sub(f).unwrap().is_zero(),
                "{} case {i}: compose(F, p) != f",
                entry.spec
            );
            let deg_f = f.degree().finite().expect("nonzero invariant");
            assert!(
                rewrite.weighted_degree <= deg_f,
                "{} case {i}: weighted degree exceeds deg f",
                entry.spec
            );
            let h = entry.map.coxeter_number();
            let n = entry.map.dim();
            let max_un = rewrite
                .target
                .terms()
                .map(|(m, _)| m.0[n - 1] as u32)
                .max()
                .unwrap_or(0);
            assert!(
                max_un <= deg_f / h,
                "{} case {i}: deg_un = {max_un} > [{deg_f}/{h}]",
                entry.spec
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "budget: {elapsed:?}");
    println!(
        "criterion 3 PASS (rewrite round trip, {} groups x 50 cases, {elapsed:?})",
        suite.len()
    );
}

#[test]
fn criterion_4_gradient_system_consistency() {
    let start = Instant::now();
    let suite = invariant_suite();
    for entry in suite {
        let n = entry.map.dim();
        for (i, (f, rewrite)) in entry.cases.iter().enumerate() {
            // divisibility by every hyperplane form is enforced inside
            let g = entry
                .map
                .gradient_system(f)
                .unwrap_or_else(|e| panic!("{} case {i}: gradient system failed: {e}", entry.spec));
            for (j, gj) in g.iter().enumerate().take(n) {
                let df = rewrite.target.differentiate(j);
                let expect = entry.map.compose_with_basis(&df).expect("compose");
                assert!(
                    gj.try_sub(&expect).unwrap().is_zero(),
                    "{} case {i}: g_{j} != (∂F/∂u_{j})∘P",
                    entry.spec
                );
            }
        }
    }
    let elapsed = start.elapsed();
    println!("criterion 4 PASS (Cramer gradient consistency, exact, {elapsed:?})");
}

#[test]
fn criterion_5_stratification() {
    let start = Instant::now();
    for spec_str in ["B2", "A3", "B3", "D4"] {
        let g = Arc::new(build_group(CoxeterTypeSpec::from_str(spec_str).unwrap()).unwrap());
        let lattice = workbench_core::intersection_lattice(&g).unwrap();
        let map = basic_invariants(Arc::clone(&g)).unwrap();
        let flatness = workbench_core::strata::minor_flatness_check(&map, &lattice);
        assert!(
            flatness.pass(),
            "{spec_str}: flatness violations {:?}",
            flatness.violations
        );
        let mono = workbench_core::strata::monotonicity_check(&lattice);
        assert!(
            mono.pass(),
            "{spec_str}: monotonicity violations {:?}",
            mono.violations
        );
    }
    let elapsed = start.elapsed();
    println!("criterion 5 PASS (stratification: flatness + monotonicity, {elapsed:?})");
}

#[test]
fn criterion_6_counterexample_exponents() {
    let start = Instant::now();
    let a1 = map_for("A1");
    let report = whitney::counterexample_probe(&a1, &ProbeConfig::default()).unwrap();
    for (k, fit) in report.orders.iter().enumerate() {
        let want = 2.4 - k as f64;
        assert!(
            (fit.slope - want).abs() < 0.05,
            "A1 k = {k}: slope {} expected {want}",
            fit.slope
        );
    }
    assert_eq!(report.class_verdict, "C2 not C3", "A1 verdict");

    let b2 = map_for("B2");
    let config = ProbeConfig {
        ray: Some(vec![1.0, 1.0]),
        ..ProbeConfig::default()
    };
    let report = whitney::counterexample_probe(&b2, &config).unwrap();
    let k5 = &report.orders[5];
    assert!(
        (k5.slope - (-0.2)).abs() < 0.05,
        "B2 slope at k = 5: {}",
        k5.slope
    );
    assert_eq!(report.class_verdict, "C4 not C5", "B2 verdict");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "budget: {elapsed:?}");
    println!("criterion 6 PASS (counterexample exponents, {elapsed:?})");
}

#[test]
fn criterion_7_whitney_machinery() {
    let start = Instant::now();
    // Taylor fields of degree-≤m polynomials: all remainders exactly zero
    let mut rng = SplitMix64::new(77);
    for _ in 0..10 {
        let f = random_poly(&mut rng, 2, 5, 5);
        let points: Vec<Vec<FieldElem>> = (0..4)
            .map(|_| {
                (0..2)
                    .map(|_| FieldElem::from_ratio(rng.int_in(-9, 9), 4))
                    .collect()
            })
            .collect();
        let jet = JetField::taylor(&f, &points, 5).unwrap();
        for i in 0..points.len() {
            for j in 0..points.len() {
                if i == j {
                    continue;
                }
                for q in whitney::multi_indices(2, 5) {
                    let r = jet.remainder_by_index(i, j, &q).unwrap();
                    assert!(r.is_zero(), "nonzero Taylor remainder at {:?}", q.0);
                }
            }
        }
    }
    // regularity exponent recovers γ − |q| within 0.02 on t^γ fields
    for gamma in [1.5f64, 2.5, 3.25] {
        let mut points = vec![vec![FieldElem::Numeric(0.0)]];
        let order = 2u32;
        let mut coeffs = vec![std::collections::BTreeMap::from([
            (Monomial(vec![0]), FieldElem::Numeric(0.0)),
            (Monomial(vec![1]), FieldElem::Numeric(0.0)),
            (Monomial(vec![2]), FieldElem::Numeric(0.0)),
        ])];
        for i in 0..25 {
            let t: f64 = 10f64.powf(-3.0 + 2.0 * i as f64 / 24.0);
            points.push(vec![FieldElem::Numeric(t)]);
            coeffs.push(std::collections::BTreeMap::from([
                (Monomial(vec![0]), FieldElem::Numeric(t.powf(gamma))),
                (
                    Monomial(vec![1]),
                    FieldElem::Numeric(gamma * t.powf(gamma - 1.0)),
                ),
                (
                    Monomial(vec![2]),
                    FieldElem::Numeric(gamma * (gamma - 1.0) * t.powf(gamma - 2.0)),
                ),
            ]));
        }
        let jet = JetField::from_data(1, order, points, coeffs);
        let pairs: Vec<(usize, usize)> = (1..=25).map(|j| (0, j)).collect();
        for q in [0u16, 1] {
            match whitney::regularity_exponent(&jet, &pairs, &Monomial(vec![q])).unwrap() {
                RegularityExponent::Fit { slope, .. } => {
                    let want = gamma - q as f64;
                    assert!(
                        (slope - want).abs() < 0.02,
                        "gamma {gamma}, q {q}: slope {slope}"
                    );
                }
                RegularityExponent::Infinite => panic!("unexpected zero remainders"),
            }
        }
    }
    // strict product-field remainder orders on 20 seeded instances per group
    for (gi, spec_str) in EXACT_GROUPS.iter().enumerate() {
        let map = map_for(spec_str);
        let group = map.group();
        let n = map.dim();
        let tag = group.field();
        for case in 0..20u64 {
            let mut rng = SplitMix64::new(9000 + case).fork(gi as u64);
            // flat: a mirror hyperplane or the origin
            let use_origin = rng.below(3) == 0;
            let (flat, s) = if use_origin {
                (Flat::origin(n, tag), 2u32)
            } else {
                let idx = rng.below(group.reflections().len() as u64) as usize;
                let form = group.reflections()[idx].lambda.clone();
                (Flat::from_forms(n, &[form], tag), 1u32)
            };
            // Q with vanishing order ≥ s on the flat
            let q_poly = if use_origin {
                let mono = SparsePoly::var(n, rng.below(n as u64) as usize, tag)
                    .try_mul(&SparsePoly::var(n, rng.below(n as u64) as usize, tag))
                    .unwrap();
                mono.try_mul(&random_poly(&mut rng, n, 2, 2).promote(tag))
                    .unwrap()
            } else {
                let idx = rng.below(group.reflections().len() as u64) as usize;
                let chosen = group
                    .reflections()
                    .iter()
                    .find(|r| flat.contains_in_kernel(&r.lambda))
                    .unwrap_or(&group.reflections()[idx]);
                chosen
                    .form_poly()
                    .try_mul(&random_poly(&mut rng, n, 2, 2).promote(tag))
                    .unwrap()
            };
            if !vanishing_order(&q_poly, &flat).at_least(s) {
                continue; // random factor vanished; instance degenerate
            }
            let r = 1 + rng.below(2) as u32;
            let a_poly = random_poly(&mut rng, n, r + 2, 3).promote(tag);
            let report = lemma1_product_check(
                &q_poly,
                &a_poly,
                &flat,
                r,
                s,
                &Lemma1Options {
                    basepoints: 1,
                    rays: 1,
                    seed: case,
                },
            )
            .unwrap();
            assert!(
                report.pass(),
                "{spec_str} case {case}: {:?}",
                report.violations
            );
        }
    }
    let elapsed = start.elapsed();
    println!("criterion 7 PASS (jet machinery: exact remainders, exponent fits, product orders, {elapsed:?})");
}

#[test]
fn criterion_8_orbit_separation() {
    let start = Instant::now();
    for (gi, spec_str) in EXACT_GROUPS.iter().enumerate() {
        let map = map_for(spec_str);
        let group = map.group();
        let n = map.dim();
        let elements = group.enumerate_elements().unwrap();
        for case in 0..200u64 {
            let mut rng = SplitMix64::new(40_000 + case).fork(gi as u64);
            let x: Vec<FieldElem> = (0..n)
                .map(|_| FieldElem::from_ratio(rng.int_in(-12, 12), 5))
                .collect();
            let y: Vec<FieldElem> = if case % 2 == 0 {
                // image of x under a random group element
                let w = &elements[rng.below(elements.len() as u64) as usize];
                w.apply(&x)
            } else {
                (0..n)
                    .map(|_| FieldElem::from_ratio(rng.int_in(-12, 12), 5))
                    .collect()
            };
            let (same_p, same_orbit) = map.orbit_separation_check(&x, &y).unwrap();
            assert_eq!(
                same_p, same_orbit,
                "{spec_str} case {case}: same_P = {same_p} but same_orbit = {same_orbit}"
            );
            if case % 2 == 0 {
                assert!(same_orbit, "{spec_str} case {case}: orbit image missed");
            }
        }
    }
    let elapsed = start.elapsed();
    println!("criterion 8 PASS (orbit separation, 9 groups x 200 pairs, {elapsed:?})");
}
