//! Seeded property suites over randomized instances. Each suite returns the
//! violations it found instead of panicking, so the CLI can aggregate them
//! into a machine-readable report.

use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::chevalley::basic_invariants;
use crate::coxeter::{build_group, CoxeterTypeSpec};
use crate::polyalg::{
    determinant, determinant_bareiss, vanishing_order, FieldElem, FieldTag, Flat, Monomial,
    SparsePoly, VanishingOrder,
};
use crate::rng::SplitMix64;
use crate::whitney;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Groups,
    Strata,
    Whitney,
    All,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "algebra" => Ok(Suite::Algebra),
            "groups" => Ok(Suite::Groups),
            "strata" => Ok(Suite::Strata),
            "whitney" => Ok(Suite::Whitney),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite {other:?}")),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub violations: Vec<String>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Random sparse polynomial with small integer coefficients.
pub fn random_poly(
    rng: &mut SplitMix64,
    nvars: usize,
    max_deg: u32,
    max_terms: usize,
) -> SparsePoly {
    let terms = 1 + rng.below(max_terms as u64) as usize;
    let mut p = SparsePoly::zero(nvars, FieldTag::Rational);
    for _ in 0..terms {
        let mut exp = vec![0u16; nvars];
        let deg = rng.below(max_deg as u64 + 1) as u32;
        for _ in 0..deg {
            let v = rng.below(nvars as u64) as usize;
            exp[v] += 1;
        }
        p.add_term(Monomial(exp), FieldElem::from_integer(rng.nonzero_int(9)));
    }
    p
}

pub fn run_suite(suite: Suite, seed: u64) -> Vec<SuiteReport> {
    match suite {
        Suite::Algebra => vec![algebra_suite(seed)],
        Suite::Groups => vec![groups_suite(seed)],
        Suite::Strata => vec![strata_suite(seed)],
        Suite::Whitney => vec![whitney_suite(seed)],
        Suite::All => vec![
            algebra_suite(seed),
            groups_suite(seed),
            strata_suite(seed),
            whitney_suite(seed),
        ],
    }
}

fn algebra_suite(seed: u64) -> SuiteReport {
    let mut rng = SplitMix64::new(seed).fork(1);
    let mut violations = Vec::new();
    let mut cases = 0;
    for case in 0..40 {
        let nvars = 1 + rng.below(3) as usize;
        let f = random_poly(&mut rng, nvars, 5, 4);
        let g = random_poly(&mut rng, nvars, 5, 4);
        let h = random_poly(&mut rng, nvars, 4, 3);
        cases += 1;
        // distributivity and commutativity
        let lhs = f.try_add(&g).unwrap().try_mul(&h).unwrap();
        let rhs = f
            .try_mul(&h)
            .unwrap()
            .try_add(&g.try_mul(&h).unwrap())
            .unwrap();
        if lhs != rhs {
            violations.push(format!("case {case}: (f+g)h != fh+gh"));
        }
        if f.try_mul(&g).unwrap() != g.try_mul(&f).unwrap() {
            violations.push(format!("case {case}: multiplication not commutative"));
        }
        // mixed partials commute
        if nvars >= 2 {
            let d01 = f.differentiate(0).differentiate(1);
            let d10 = f.differentiate(1).differentiate(0);
            if d01 != d10 {
                violations.push(format!("case {case}: mixed partials differ"));
            }
        }
        // exact division round trip (g may be zero; skip that)
        if !g.is_zero() {
            let prod = f.try_mul(&g).unwrap();
            match prod.divide_exact(&g) {
                Ok(q) if q == f => {}
                other => violations.push(format!(
                    "case {case}: divide_exact(f*g, g) failed: {:?}",
                    other.err()
                )),
            }
        }
        // compose respects products
        let subs: Vec<SparsePoly> = (0..nvars).map(|_| random_poly(&mut rng, 2, 3, 3)).collect();
        let fg = f.try_mul(&g).unwrap();
        let via_prod = fg.compose(&subs).unwrap();
        let sep = f
            .compose(&subs)
            .unwrap()
            .try_mul(&g.compose(&subs).unwrap())
            .unwrap();
        if via_prod != sep {
            violations.push(format!("case {case}: compose does not respect products"));
        }
    }
    // vanishing order additivity on hyperplanes through 0
    for case in 0..20 {
        cases += 1;
        let f = random_poly(&mut rng, 2, 4, 3);
        let g = random_poly(&mut rng, 2, 4, 3);
        let flat = Flat::from_forms(
            2,
            &[vec![
                FieldElem::from_integer(1),
                FieldElem::from_integer(rng.int_in(-3, 3)),
            ]],
            FieldTag::Rational,
        );
        let sum = match (vanishing_order(&f, &flat), vanishing_order(&g, &flat)) {
            (VanishingOrder::Finite(a), VanishingOrder::Finite(b)) => VanishingOrder::Finite(a + b),
            _ => VanishingOrder::Infinite,
        };
        let prod = vanishing_order(&f.try_mul(&g).unwrap(), &flat);
        if prod != sum {
            violations.push(format!("case {case}: vanishing order not additive"));
        }
    }
    // two determinant routes agree on random 3×3 matrices
    for case in 0..10 {
        cases += 1;
        let m: Vec<Vec<SparsePoly>> = (0..3)
            .map(|_| (0..3).map(|_| random_poly(&mut rng, 2, 2, 2)).collect())
            .collect();
        let a = determinant(&m);
        let b = determinant_bareiss(&m).expect("bareiss");
        if a != b {
            violations.push(format!(
                "case {case}: Bareiss and cofactor determinants differ"
            ));
        }
    }
    SuiteReport {
        suite: "algebra".into(),
        cases,
        violations,
    }
}

const GROUP_LIST: [&str; 10] = [
    "A1", "A2", "A3", "B2", "B3", "D4", "I2(4)", "I2(6)", "I2(5)", "H3",
];

fn groups_suite(seed: u64) -> SuiteReport {
    let mut rng = SplitMix64::new(seed).fork(2);
    let mut violations = Vec::new();
    let mut cases = 0;
    for spec_str in GROUP_LIST {
        cases += 1;
        let spec = CoxeterTypeSpec::from_str(spec_str).unwrap();
        let g = match build_group(spec) {
            Ok(g) => g,
            Err(e) => {
                violations.push(format!("{spec_str}: build failed: {e}"));
                continue;
            }
        };
        let d: u32 = spec.degrees().iter().map(|k| k - 1).sum();
        if g.reflections().len() as u32 != d {
            violations.push(format!("{spec_str}: reflection count != Σ(k−1)"));
        }
        let elements = match g.enumerate_elements() {
            Ok(e) => e,
            Err(e) => {
                violations.push(format!("{spec_str}: enumeration failed: {e}"));
                continue;
            }
        };
        if elements.len() as u64 != spec.order() {
            violations.push(format!("{spec_str}: order != ∏k"));
        }
        let gram = g.gram();
        for w in elements {
            let lhs = w.transpose().mul(&gram).mul(w);
            if !lhs.approx_eq(&gram, 1e-9) {
                violations.push(format!(
                    "{spec_str}: element not orthogonal for the model form"
                ));
                break;
            }
        }
        match g.involutions() {
            Ok(inv) => {
                if !inv.iter().all(|w| w.mul(w).is_identity(1e-9)) {
                    violations.push(format!("{spec_str}: non-involution reported"));
                }
            }
            Err(e) => violations.push(format!("{spec_str}: involutions failed: {e}")),
        }
        // orbit of a generic point has the full group order
        let x: Vec<FieldElem> = (0..g.dim())
            .map(|i| FieldElem::from_ratio(rng.nonzero_int(50) + 60, 7 + i as i64))
            .collect();
        let x = if g.field().is_exact() {
            x
        } else {
            x.iter().map(|c| c.promote(FieldTag::Numeric)).collect()
        };
        match g.orbit(&x) {
            Ok(orbit) => {
                if spec.order() % orbit.len() as u64 != 0 {
                    violations.push(format!("{spec_str}: orbit size does not divide |W|"));
                }
                if orbit.len() as u64 != spec.order() {
                    violations.push(format!(
                        "{spec_str}: generic orbit has size {} != |W| = {}",
                        orbit.len(),
                        spec.order()
                    ));
                }
            }
            Err(e) => violations.push(format!("{spec_str}: orbit failed: {e}")),
        }
        // classification of the full reflection set recovers the type
        let all: Vec<usize> = (0..g.reflections().len()).collect();
        match g
            .coxeter_graph(&all)
            .and_then(|gr| crate::coxeter::classify(&gr))
        {
            Ok(types) => {
                if types.len() != 1 || types[0].canonical() != spec.canonical() {
                    violations.push(format!("{spec_str}: classified as {types:?}"));
                }
            }
            Err(e) => violations.push(format!("{spec_str}: classification failed: {e}")),
        }
    }
    SuiteReport {
        suite: "groups".into(),
        cases,
        violations,
    }
}

fn strata_suite(_seed: u64) -> SuiteReport {
    let mut violations = Vec::new();
    let mut cases = 0;
    let expected_counts = [("A2", 5usize), ("B2", 6), ("A3", 15)];
    for (spec_str, count) in expected_counts {
        cases += 1;
        let g = Arc::new(build_group(CoxeterTypeSpec::from_str(spec_str).unwrap()).unwrap());
        match crate::strata::intersection_lattice(&g) {
            Ok(l) => {
                if l.strata.len() != count {
                    violations.push(format!(
                        "{spec_str}: lattice has {} flats, expected {count}",
                        l.strata.len()
                    ));
                }
            }
            Err(e) => violations.push(format!("{spec_str}: lattice failed: {e}")),
        }
    }
    for spec_str in ["B2", "A3", "B3"] {
        cases += 1;
        let g = Arc::new(build_group(CoxeterTypeSpec::from_str(spec_str).unwrap()).unwrap());
        let lattice = match crate::strata::intersection_lattice(&g) {
            Ok(l) => l,
            Err(e) => {
                violations.push(format!("{spec_str}: lattice failed: {e}"));
                continue;
            }
        };
        let map = basic_invariants(Arc::clone(&g)).unwrap();
        let origin = lattice
            .strata
            .iter()
            .find(|s| s.codim == g.dim())
            .expect("origin");
        if (origin.d_z, origin.s_z, origin.h_z)
            != (
                map.reflection_count(),
                map.min_minor_degree(),
                map.coxeter_number(),
            )
        {
            violations.push(format!("{spec_str}: origin isotropy data mismatch"));
        }
        let flatness = crate::strata::minor_flatness_check(&map, &lattice);
        violations.extend(
            flatness
                .violations
                .iter()
                .map(|v| format!("{spec_str}: {v}")),
        );
        let mono = crate::strata::monotonicity_check(&lattice);
        violations.extend(mono.violations.iter().map(|v| format!("{spec_str}: {v}")));
    }
    SuiteReport {
        suite: "strata".into(),
        cases,
        violations,
    }
}

fn whitney_suite(seed: u64) -> SuiteReport {
    let mut rng = SplitMix64::new(seed).fork(3);
    let mut violations = Vec::new();
    let mut cases = 0;
    // Taylor fields of degree-≤m polynomials have zero remainders
    for case in 0..10 {
        cases += 1;
        let f = random_poly(&mut rng, 2, 4, 4);
        let points: Vec<Vec<FieldElem>> = (0..4)
            .map(|_| {
                (0..2)
                    .map(|_| FieldElem::from_ratio(rng.int_in(-6, 6), 3))
                    .collect()
            })
            .collect();
        let jet = match whitney::JetField::taylor(&f, &points, 4) {
            Ok(j) => j,
            Err(e) => {
                violations.push(format!("taylor case {case}: {e}"));
                continue;
            }
        };
        'outer: for i in 0..points.len() {
            for j in 0..points.len() {
                if i == j {
                    continue;
                }
                for q in whitney::multi_indices(2, 4) {
                    match jet.remainder_by_index(i, j, &q) {
                        Ok(r) if r.is_zero() => {}
                        Ok(_) => {
                            violations.push(format!(
                                "taylor case {case}: nonzero remainder at {:?}",
                                q.0
                            ));
                            break 'outer;
                        }
                        Err(e) => {
                            violations.push(format!("taylor case {case}: {e}"));
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    // the chain-rule assembly of integer powers matches direct differentiation
    for case in 0..10 {
        cases += 1;
        let p = random_poly(&mut rng, 2, 3, 3);
        let x0 = [0.3 + rng.unit_f64(), 0.4 + rng.unit_f64()];
        let v = [1.0, 0.5 + rng.unit_f64()];
        let direct = {
            let p3 = p.pow(3);
            // third directional derivative along v at x0 via line restriction
            let coeffs = whitney::restrict_to_ray(&p3, &x0, &v);
            6.0 * coeffs.get(3).copied().unwrap_or(0.0)
        };
        match whitney::faa_di_bruno(&p, 3.0, 3, &x0, &v) {
            Ok(got) => {
                if (got - direct).abs() > 1e-8 * direct.abs().max(1.0) {
                    violations.push(format!(
                        "faa case {case}: integer power mismatch {got} vs {direct}"
                    ));
                }
            }
            Err(e) => violations.push(format!("faa case {case}: {e}")),
        }
    }
    // probe slope law on the rank-one group
    cases += 1;
    let a1 = basic_invariants(Arc::new(
        build_group(CoxeterTypeSpec::from_str("A1").unwrap()).unwrap(),
    ))
    .unwrap();
    match whitney::counterexample_probe(&a1, &whitney::ProbeConfig::default()) {
        Ok(report) => {
            for fit in &report.orders {
                let want = report.expected_exponent_base - fit.k as f64;
                if (fit.slope - want).abs() > 0.05 {
                    violations.push(format!(
                        "probe order {}: slope {} expected {want}",
                        fit.k, fit.slope
                    ));
                }
            }
        }
        Err(e) => violations.push(format!("probe failed: {e}")),
    }
    SuiteReport {
        suite: "whitney".into(),
        cases,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_with_default_seed() {
        for report in run_suite(Suite::All, 0) {
            assert!(
                report.pass(),
                "suite {} violations: {:?}",
                report.suite,
                report.violations
            );
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let a = run_suite(Suite::Algebra, 7);
        let b = run_suite(Suite::Algebra, 7);
        assert_eq!(a[0].cases, b[0].cases);
        assert_eq!(a[0].violations, b[0].violations);
    }
}
