//! The intersection lattice of a reflection arrangement, the isotropy data
//! (d_z, s_z, h_z) carried by each flat, and the verification passes built
//! on them: minor flatness and Coxeter-number monotonicity along closures.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::chevalley::ChevalleyMap;
use crate::coxeter::{classify, CoxeterError, CoxeterTypeSpec, ReflectionGroup};
use crate::polyalg::{vanishing_order, Flat};

#[derive(Debug, Error)]
pub enum StrataError {
    #[error("lattice too large: dimension {dim} with {hyperplanes} hyperplanes")]
    LatticeTooLarge { dim: usize, hyperplanes: usize },
    #[error("isotropy classification failed: {0}")]
    ClassificationFailure(String),
    #[error(transparent)]
    Group(#[from] CoxeterError),
}

/// One flat of the arrangement with its isotropy subgroup invariants.
/// d_z counts the reflections fixing the flat, h_z is the largest component
/// Coxeter number, and s_z = d_z − h_z + 1 (checked against the independent
/// degree-sum route).
#[derive(Debug)]
pub struct StratumData {
    pub flat: Flat,
    pub codim: usize,
    /// Saturated set: every hyperplane containing the flat.
    pub hyperplanes: BTreeSet<usize>,
    pub isotropy_type: Vec<CoxeterTypeSpec>,
    pub d_z: u32,
    pub s_z: u32,
    pub h_z: u32,
}

#[derive(Debug)]
pub struct LatticeReport {
    /// All flats, ordered by codimension then by hyperplane set.
    pub strata: Vec<StratumData>,
    /// Pairs (i, j) with flat_i ⊋ flat_j (flat_j lies in the closure
    /// boundary of flat_i's stratum).
    pub closure_pairs: Vec<(usize, usize)>,
}

/// All distinct intersections of mirror subsets, each saturated with every
/// hyperplane containing it and tagged with its isotropy data.
pub fn intersection_lattice(group: &ReflectionGroup) -> Result<LatticeReport, StrataError> {
    let n = group.dim();
    let count = group.reflections().len();
    if n > 4 && count > 30 {
        return Err(StrataError::LatticeTooLarge {
            dim: n,
            hyperplanes: count,
        });
    }
    let tag = group.field();
    let forms: Vec<Vec<_>> = group
        .reflections()
        .iter()
        .map(|r| r.lambda.clone())
        .collect();

    let saturate = |flat: &Flat| -> BTreeSet<usize> {
        (0..count)
            .filter(|&i| flat.contains_in_kernel(&forms[i]))
            .collect()
    };

    let whole = Flat::whole_space(n, tag);
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut flats: Vec<(BTreeSet<usize>, Flat)> = Vec::new();
    let root_key = saturate(&whole);
    seen.insert(root_key.clone());
    flats.push((root_key, whole));
    let mut head = 0;
    while head < flats.len() {
        let (ids, _) = flats[head].clone();
        head += 1;
        for h in 0..count {
            if ids.contains(&h) {
                continue;
            }
            let mut next_forms: Vec<Vec<_>> = ids.iter().map(|&i| forms[i].clone()).collect();
            next_forms.push(forms[h].clone());
            let flat = Flat::from_forms(n, &next_forms, tag);
            let key = saturate(&flat);
            if seen.insert(key.clone()) {
                flats.push((key, flat));
            }
        }
    }
    flats.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));

    let mut strata = Vec::with_capacity(flats.len());
    for (ids, flat) in flats {
        strata.push(stratum_data(group, flat, ids)?);
    }
    let mut closure_pairs = Vec::new();
    for i in 0..strata.len() {
        for j in 0..strata.len() {
            if i != j
                && strata[i].hyperplanes.is_subset(&strata[j].hyperplanes)
                && strata[i].hyperplanes.len() < strata[j].hyperplanes.len()
            {
                closure_pairs.push((i, j));
            }
        }
    }
    Ok(LatticeReport {
        strata,
        closure_pairs,
    })
}

/// Isotropy data of one flat: collect the reflections fixing it pointwise,
/// classify them, and derive (d_z, s_z, h_z) twice — via the Coxeter number
/// and via the degree sums — insisting the two routes agree.
pub fn isotropy(group: &ReflectionGroup, flat: Flat) -> Result<StratumData, StrataError> {
    let hyperplanes: BTreeSet<usize> = group
        .reflections()
        .iter()
        .enumerate()
        .filter(|(_, r)| flat.contains_in_kernel(&r.lambda))
        .map(|(i, _)| i)
        .collect();
    stratum_data(group, flat, hyperplanes)
}

fn stratum_data(
    group: &ReflectionGroup,
    flat: Flat,
    hyperplanes: BTreeSet<usize>,
) -> Result<StratumData, StrataError> {
    let ids: Vec<usize> = hyperplanes.iter().copied().collect();
    let graph = group
        .coxeter_graph(&ids)
        .map_err(|e| StrataError::ClassificationFailure(e.to_string()))?;
    if graph.saturated.len() != ids.len() {
        return Err(StrataError::ClassificationFailure(format!(
            "saturation mismatch: {} mirrors contain the flat, subgroup closure found {}",
            ids.len(),
            graph.saturated.len()
        )));
    }
    let isotropy_type =
        classify(&graph).map_err(|e| StrataError::ClassificationFailure(e.to_string()))?;
    let mut all_degrees: Vec<u32> = Vec::new();
    for t in &isotropy_type {
        all_degrees.extend(t.degrees());
    }
    let d_z: u32 = all_degrees.iter().map(|k| k - 1).sum();
    if d_z as usize != ids.len() {
        return Err(StrataError::ClassificationFailure(format!(
            "degree bookkeeping: Σ(k−1) = {d_z} but {} reflections fix the flat",
            ids.len()
        )));
    }
    let h_z = all_degrees.iter().copied().max().unwrap_or(1);
    // route 1: s_z = d_z − (h_z − 1)
    let s_via_h = d_z - (h_z - 1);
    // route 2: drop one maximal degree, sum k−1 over the rest
    let s_via_degrees = {
        let mut ds = all_degrees.clone();
        if let Some(pos) = ds.iter().position(|&k| k == h_z) {
            ds.remove(pos);
        }
        ds.iter().map(|k| k - 1).sum::<u32>()
    };
    if s_via_h != s_via_degrees {
        return Err(StrataError::ClassificationFailure(format!(
            "s_z routes disagree: {s_via_h} vs {s_via_degrees}"
        )));
    }
    Ok(StratumData {
        codim: flat.codim(),
        flat,
        hyperplanes,
        isotropy_type,
        d_z,
        s_z: s_via_h,
        h_z,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatnessRow {
    pub stratum: usize,
    pub codim: usize,
    pub minor_i: usize,
    pub minor_j: usize,
    pub order: String,
    pub required: u32,
    pub ok: bool,
}

#[derive(Debug)]
pub struct FlatnessReport {
    pub rows: Vec<FlatnessRow>,
    pub violations: Vec<String>,
}

impl FlatnessReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check that every Jacobian minor M_{i,j} vanishes to order at least s_z
/// along every flat.
pub fn minor_flatness_check(map: &ChevalleyMap, lattice: &LatticeReport) -> FlatnessReport {
    let n = map.dim();
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for (idx, stratum) in lattice.strata.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let order = vanishing_order(map.jacobian_minor(i, j), &stratum.flat);
                let ok = order.at_least(stratum.s_z);
                if !ok {
                    violations.push(format!(
                        "minor M[{},{}] has order {} < s_z = {} on stratum {}",
                        i + 1,
                        j + 1,
                        order,
                        stratum.s_z,
                        idx
                    ));
                }
                rows.push(FlatnessRow {
                    stratum: idx,
                    codim: stratum.codim,
                    minor_i: i,
                    minor_j: j,
                    order: order.to_string(),
                    required: stratum.s_z,
                    ok,
                });
            }
        }
    }
    FlatnessReport { rows, violations }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityRow {
    pub upper: usize,
    pub lower: usize,
    pub h_upper: u32,
    pub h_lower: u32,
    pub excess_upper: i64,
    pub excess_lower: i64,
    pub ok: bool,
}

#[derive(Debug)]
pub struct MonotonicityReport {
    pub rows: Vec<MonotonicityRow>,
    pub violations: Vec<String>,
}

impl MonotonicityReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Along every closure-ordered pair flat ⊋ flat′: h_z ≤ h_z′, equivalently
/// d_z − s_z ≤ d_z′ − s_z′. Both forms are asserted.
pub fn monotonicity_check(lattice: &LatticeReport) -> MonotonicityReport {
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &(i, j) in &lattice.closure_pairs {
        let a = &lattice.strata[i];
        let b = &lattice.strata[j];
        let ex_a = a.d_z as i64 - a.s_z as i64;
        let ex_b = b.d_z as i64 - b.s_z as i64;
        let ok = a.h_z <= b.h_z && ex_a <= ex_b;
        if !ok {
            violations.push(format!(
                "monotonicity fails between strata {i} (h = {}) and {j} (h = {})",
                a.h_z, b.h_z
            ));
        }
        rows.push(MonotonicityRow {
            upper: i,
            lower: j,
            h_upper: a.h_z,
            h_lower: b.h_z,
            excess_upper: ex_a,
            excess_lower: ex_b,
            ok,
        });
    }
    MonotonicityReport { rows, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::basic_invariants;
    use crate::coxeter::{build_group, Family};
    use std::str::FromStr;
    use std::sync::Arc;

    fn lattice(spec: &str) -> (Arc<ReflectionGroup>, LatticeReport) {
        let g = Arc::new(build_group(CoxeterTypeSpec::from_str(spec).unwrap()).unwrap());
        let l = intersection_lattice(&g).unwrap();
        (g, l)
    }

    #[test]
    fn a1_has_two_flats() {
        let (_, l) = lattice("A1");
        assert_eq!(l.strata.len(), 2);
        assert_eq!(l.strata[0].codim, 0);
        assert_eq!(l.strata[1].codim, 1);
    }

    #[test]
    fn b2_lattice_counts() {
        // four distinct lines through 0 pairwise intersect in the origin:
        // whole plane + 4 lines + origin = 6 flats
        let (_, l) = lattice("B2");
        assert_eq!(l.strata.len(), 6);
        let by_codim: Vec<usize> = (0..=2)
            .map(|c| l.strata.iter().filter(|s| s.codim == c).count())
            .collect();
        assert_eq!(by_codim, vec![1, 4, 1]);
    }

    #[test]
    fn a2_lattice_counts() {
        let (_, l) = lattice("A2");
        assert_eq!(l.strata.len(), 5); // plane, 3 lines, origin
    }

    #[test]
    fn a3_lattice_isotropy_types() {
        let (_, l) = lattice("A3");
        // codim 2 flats split into A₂ triples and A₁×A₁ pairs
        let a1 = CoxeterTypeSpec::new(Family::A, 1).unwrap();
        let a2 = CoxeterTypeSpec::new(Family::A, 2).unwrap();
        let a3 = CoxeterTypeSpec::new(Family::A, 3).unwrap();
        for s in &l.strata {
            match s.codim {
                0 => assert!(s.isotropy_type.is_empty()),
                1 => assert_eq!(s.isotropy_type, vec![a1]),
                2 => assert!(
                    s.isotropy_type == vec![a2] || s.isotropy_type == vec![a1, a1],
                    "unexpected codim-2 isotropy {:?}",
                    s.isotropy_type
                ),
                3 => assert_eq!(s.isotropy_type, vec![a3]),
                _ => panic!("unexpected codim"),
            }
        }
        // partition-lattice counts: 1 + 6 + (4 + 3) + 1
        assert_eq!(l.strata.len(), 15);
        let codim2 = l.strata.iter().filter(|s| s.codim == 2).count();
        assert_eq!(codim2, 7);
    }

    #[test]
    fn b2_isotropy_data() {
        let (_, l) = lattice("B2");
        // the diagonal line x = y has isotropy A₁
        let diag = l
            .strata
            .iter()
            .find(|s| {
                s.codim == 1
                    && s.flat.directions()[0]
                        .iter()
                        .map(|c| c.to_f64())
                        .all(|v| (v - s.flat.directions()[0][0].to_f64()).abs() < 1e-12)
            })
            .expect("diagonal line");
        assert_eq!(diag.d_z, 1);
        assert_eq!(diag.s_z, 0);
        assert_eq!(diag.h_z, 2);
        // the origin carries the whole group
        let origin = l.strata.last().unwrap();
        assert_eq!(origin.codim, 2);
        assert_eq!((origin.d_z, origin.s_z, origin.h_z), (4, 1, 4));
    }

    #[test]
    fn isotropy_of_a_flat_given_directly() {
        use crate::polyalg::{FieldElem, FieldTag};
        let g = build_group(CoxeterTypeSpec::from_str("B2").unwrap()).unwrap();
        // the line x = y: one reflection fixes it, isotropy A₁
        let diag = Flat::from_forms(
            2,
            &[vec![
                FieldElem::from_integer(1),
                FieldElem::from_integer(-1),
            ]],
            FieldTag::Rational,
        );
        let s = isotropy(&g, diag).unwrap();
        assert_eq!((s.d_z, s.s_z, s.h_z), (1, 0, 2));
        assert_eq!(
            s.isotropy_type,
            vec![CoxeterTypeSpec::new(Family::A, 1).unwrap()]
        );
        // the origin: the whole group
        let s = isotropy(&g, Flat::origin(2, FieldTag::Rational)).unwrap();
        assert_eq!((s.d_z, s.s_z, s.h_z), (4, 1, 4));
    }

    #[test]
    fn numeric_backend_lattices_match_exact_ones() {
        use crate::coxeter::{build_group_with_backend, Backend};
        for spec_str in ["I2(5)", "I2(7)", "A3", "B3"] {
            let spec = CoxeterTypeSpec::from_str(spec_str).unwrap();
            let g = build_group_with_backend(spec, Backend::Numeric).unwrap();
            let lattice = intersection_lattice(&g).unwrap();
            let expected = match spec_str {
                "I2(5)" => 7, // plane, 5 lines, origin
                "I2(7)" => 9,
                "A3" => 15,
                "B3" => 1 + 9 + 13 + 1,
                _ => unreachable!(),
            };
            assert_eq!(lattice.strata.len(), expected, "{spec_str} numeric lattice");
            let mono = monotonicity_check(&lattice);
            assert!(mono.pass(), "{spec_str}: {:?}", mono.violations);
        }
    }

    #[test]
    fn codim0_has_trivial_isotropy() {
        let (_, l) = lattice("B3");
        let open = &l.strata[0];
        assert_eq!(open.codim, 0);
        assert_eq!((open.d_z, open.s_z, open.h_z), (0, 0, 1));
    }

    #[test]
    fn origin_matches_group_data() {
        for spec in ["B2", "A3", "B3", "D4"] {
            let g = Arc::new(build_group(CoxeterTypeSpec::from_str(spec).unwrap()).unwrap());
            let l = intersection_lattice(&g).unwrap();
            let c = basic_invariants(Arc::clone(&g)).unwrap();
            let origin = l
                .strata
                .iter()
                .find(|s| s.codim == g.dim())
                .expect("origin stratum");
            assert_eq!(origin.d_z, c.reflection_count(), "{spec}");
            assert_eq!(origin.s_z, c.min_minor_degree(), "{spec}");
            assert_eq!(origin.h_z, c.coxeter_number(), "{spec}");
        }
    }

    #[test]
    fn b2_minor_flatness_orders_at_origin() {
        let (g, l) = lattice("B2");
        let c = basic_invariants(g).unwrap();
        let report = minor_flatness_check(&c, &l);
        assert!(report.pass());
        // at the origin the minors {4y³, 4x³, 2y, 2x} have orders {3,3,1,1}
        let origin_idx = l.strata.iter().position(|s| s.codim == 2).unwrap();
        let mut orders: Vec<String> = report
            .rows
            .iter()
            .filter(|r| r.stratum == origin_idx)
            .map(|r| r.order.clone())
            .collect();
        orders.sort();
        assert_eq!(orders, vec!["1", "1", "3", "3"]);
    }

    #[test]
    fn b2_monotonicity() {
        let (_, l) = lattice("B2");
        let report = monotonicity_check(&l);
        assert!(report.pass());
        // line (h = 2) against origin (h = 4)
        assert!(report.rows.iter().any(|r| r.h_upper == 2 && r.h_lower == 4));
        // codim-0 pairs always satisfy 1 ≤ h
        assert!(report.rows.iter().all(|r| r.h_upper >= 1));
    }

    #[test]
    fn a3_monotone_chain_of_coxeter_numbers() {
        let (_, l) = lattice("A3");
        let report = monotonicity_check(&l);
        assert!(report.pass());
        let mut hs: Vec<u32> = l.strata.iter().map(|s| s.h_z).collect();
        hs.sort_unstable();
        hs.dedup();
        assert_eq!(hs, vec![1, 2, 3, 4]); // Coxeter numbers of A_k are k+1
    }
}
