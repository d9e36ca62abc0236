//! Root-system constructions for the supported families.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::polyalg::{FieldElem, FieldTag, Matrix, QuadElem};

use super::{
    normalize_form, Backend, CoxeterError, CoxeterTypeSpec, Family, Reflection, ReflectionGroup,
};

pub fn preferred_backend(spec: CoxeterTypeSpec) -> Backend {
    match spec.family {
        Family::I2 if !matches!(spec.bond, 3 | 4 | 6) => Backend::Numeric,
        _ => Backend::Exact,
    }
}

pub fn build(spec: CoxeterTypeSpec, backend: Backend) -> Result<ReflectionGroup, CoxeterError> {
    spec_guard(spec)?;
    match backend {
        Backend::Exact => build_exact(spec),
        Backend::Numeric => build_numeric(spec),
    }
}

fn spec_guard(spec: CoxeterTypeSpec) -> Result<(), CoxeterError> {
    // re-validate; specs can be constructed directly
    CoxeterTypeSpec::new(spec.family, spec.rank)
        .map(|_| ())
        .or_else(|_| {
            if spec.family == Family::I2 {
                CoxeterTypeSpec::dihedral(spec.bond).map(|_| ())
            } else {
                Err(CoxeterError::UnsupportedRank {
                    family: spec.family,
                    rank: spec.rank,
                })
            }
        })
}

fn build_exact(spec: CoxeterTypeSpec) -> Result<ReflectionGroup, CoxeterError> {
    match spec.family {
        Family::A => Ok(build_a(spec)),
        Family::B => Ok(build_bd(spec, true)),
        Family::D => Ok(build_bd(spec, false)),
        Family::I2 => build_i2_exact(spec),
        Family::H3 => Ok(build_h3(spec)),
    }
}

fn rat(n: i64) -> FieldElem {
    FieldElem::from_integer(n)
}

fn finish(
    spec: CoxeterTypeSpec,
    field: FieldTag,
    dim: usize,
    raw: Vec<(Vec<FieldElem>, Matrix)>,
    gram: Option<Matrix>,
    model_forms: Option<Vec<Vec<FieldElem>>>,
) -> ReflectionGroup {
    // normalize forms, dedup hyperplanes, key them in canonical sorted order;
    // promote every entry to the group field so structural comparison works
    let mut items: Vec<(Vec<FieldElem>, Matrix)> = Vec::new();
    for (form, m) in raw {
        let form: Vec<FieldElem> = form.iter().map(|c| c.promote(field)).collect();
        let m = promote_matrix(&m, field);
        let norm = normalize_form(&form);
        let dup = items.iter().any(|(f, _)| forms_equal(f, &norm, field));
        if !dup {
            items.push((norm, m));
        }
    }
    items.sort_by(|(a, _), (b, _)| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.cmp_total(y))
            .find(|o| *o != std::cmp::Ordering::Equal)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let reflections = items
        .into_iter()
        .enumerate()
        .map(|(id, (lambda, matrix))| Reflection {
            lambda,
            matrix,
            hyperplane_id: id,
        })
        .collect::<Vec<_>>();
    debug_assert_eq!(reflections.len() as u32, spec.reflection_count());
    ReflectionGroup::from_parts(spec, field, dim, reflections, gram, model_forms)
}

fn forms_equal(a: &[FieldElem], b: &[FieldElem], field: FieldTag) -> bool {
    if field.is_exact() {
        a == b
    } else {
        a.iter()
            .zip(b)
            .all(|(x, y)| (x.to_f64() - y.to_f64()).abs() <= super::NUMERIC_TOL)
    }
}

/// Reflection about the hyperplane normal to `v`, standard inner product:
/// R = I − 2·v·vᵀ/(v·v).
fn reflection_from_root(v: &[FieldElem], field: FieldTag) -> Matrix {
    let n = v.len();
    let mut vv = FieldElem::zero(field);
    for c in v {
        vv = vv.add(&c.mul(c));
    }
    let scale = FieldElem::from_integer(2).promote(field).div(&vv);
    let mut m = Matrix::identity(n, field);
    for i in 0..n {
        for j in 0..n {
            let adj = scale.mul(&v[i]).mul(&v[j]);
            *m.get_mut(i, j) = m.get(i, j).sub(&adj);
        }
    }
    m
}

/// Essential model of A_n: the permutation action of S_{n+1} restricted to
/// the hyperplane Σx_i = 0, in the simple-root basis b_i = e_i − e_{i+1}.
/// Matrices are rational; orthogonality holds for the Gram form BᵀB.
fn build_a(spec: CoxeterTypeSpec) -> ReflectionGroup {
    let n = spec.rank;
    let tag = FieldTag::Rational;
    if n == 1 {
        // x ↦ −x on the line; the invariant construction uses the single
        // coordinate form, so p₁ = x²
        let refl = vec![(vec![rat(1)], Matrix::from_rows(vec![vec![rat(-1)]]))];
        let forms = vec![vec![rat(1)]];
        return finish(spec, tag, 1, refl, None, Some(forms));
    }
    // B: (n+1)×n, column k = e_k − e_{k+1}
    let mut b = Matrix::zero(n + 1, n, tag);
    for k in 0..n {
        *b.get_mut(k, k) = rat(1);
        *b.get_mut(k + 1, k) = rat(-1);
    }
    let bt = b.transpose();
    let gram = bt.mul(&b);
    let pseudo = gram.inverse().expect("Gram is positive definite").mul(&bt);
    let mut raw = Vec::new();
    for i in 0..=n {
        for j in i + 1..=n {
            // swap coordinates i and j of the ambient space
            let mut sigma = Matrix::identity(n + 1, tag);
            *sigma.get_mut(i, i) = rat(0);
            *sigma.get_mut(j, j) = rat(0);
            *sigma.get_mut(i, j) = rat(1);
            *sigma.get_mut(j, i) = rat(1);
            let c = pseudo.mul(&sigma).mul(&b);
            debug_assert!(c.mul(&c).is_identity(0.0));
            let lambda: Vec<FieldElem> = (0..n).map(|k| b.get(i, k).sub(b.get(j, k))).collect();
            raw.push((lambda, c));
        }
    }
    // ambient coordinate forms x_i(z) = row i of B
    let model_forms = Some(b.row_vecs());
    finish(spec, tag, n, raw, Some(gram), model_forms)
}

/// B_n (with sign flips) or D_n (without): roots e_i, e_i ± e_j.
fn build_bd(spec: CoxeterTypeSpec, with_signs: bool) -> ReflectionGroup {
    let n = spec.rank;
    let tag = FieldTag::Rational;
    let mut raw = Vec::new();
    let root = |v: Vec<i64>| {
        let fe: Vec<FieldElem> = v.into_iter().map(rat).collect();
        let m = reflection_from_root(&fe, tag);
        (fe, m)
    };
    if with_signs {
        for i in 0..n {
            let mut v = vec![0i64; n];
            v[i] = 1;
            raw.push(root(v));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for sign in [1i64, -1] {
                let mut v = vec![0i64; n];
                v[i] = 1;
                v[j] = sign;
                raw.push(root(v));
            }
        }
    }
    finish(spec, tag, n, raw, None, None)
}

/// √3/2 with sign, as an element of ℚ(√3).
fn root3_half(s: i64, d3: u32) -> FieldElem {
    FieldElem::Quad(QuadElem::new(
        BigRational::from_integer(BigInt::from(0)),
        BigRational::new(BigInt::from(s), BigInt::from(2)),
        d3,
    ))
}

/// Exact cos(mπ/6) in ℚ(√3).
fn cos_pi6(m: i64, d3: u32) -> FieldElem {
    match m.rem_euclid(12) {
        0 => rat(1),
        1 | 11 => root3_half(1, d3),
        2 | 10 => FieldElem::from_ratio(1, 2),
        3 | 9 => rat(0),
        4 | 8 => FieldElem::from_ratio(-1, 2),
        5 | 7 => root3_half(-1, d3),
        6 => rat(-1),
        _ => unreachable!(),
    }
}

/// Exact sin(mπ/6) in ℚ(√3).
fn sin_pi6(m: i64, d3: u32) -> FieldElem {
    cos_pi6(m - 3, d3)
}

fn build_i2_exact(spec: CoxeterTypeSpec) -> Result<ReflectionGroup, CoxeterError> {
    let k = spec.bond;
    match k {
        4 => {
            // mirrors x = 0, y = 0, x = ±y; all data rational
            let tag = FieldTag::Rational;
            let mk = |form: Vec<i64>, rows: [[i64; 2]; 2]| {
                (
                    form.into_iter().map(rat).collect::<Vec<_>>(),
                    Matrix::from_rows(
                        rows.iter()
                            .map(|r| r.iter().map(|&x| rat(x)).collect())
                            .collect(),
                    ),
                )
            };
            let raw = vec![
                mk(vec![0, 1], [[1, 0], [0, -1]]),
                mk(vec![1, -1], [[0, 1], [1, 0]]),
                mk(vec![1, 0], [[-1, 0], [0, 1]]),
                mk(vec![1, 1], [[0, -1], [-1, 0]]),
            ];
            Ok(finish(spec, tag, 2, raw, None, None))
        }
        3 | 6 => {
            // mirror angles are multiples of π/6, so everything lives in ℚ(√3)
            let d3 = 3;
            let tag = FieldTag::QuadExt(d3);
            let unit = (6 / k) as i64; // angle step in π/6 units
            let mut raw = Vec::new();
            for j in 0..k as i64 {
                let m_theta = j * unit;
                let c2 = cos_pi6(2 * m_theta, d3);
                let s2 = sin_pi6(2 * m_theta, d3);
                let matrix = Matrix::from_rows(vec![
                    vec![c2.clone(), s2.clone()],
                    vec![s2.clone(), c2.neg()],
                ]);
                // normal to the mirror at angle θ is (−sin θ, cos θ)
                let lambda = vec![sin_pi6(m_theta, d3).neg(), cos_pi6(m_theta, d3)];
                raw.push((lambda, matrix));
            }
            Ok(finish(spec, tag, 2, raw, None, None))
        }
        _ => Err(CoxeterError::UnsupportedFieldExact(spec.to_string())),
    }
}

/// H₃ over ℚ(√5): roots are ±e_i together with all sign patterns of the
/// cyclic shifts of (τ−1, τ, 1)/2, where τ is the golden ratio.
fn build_h3(spec: CoxeterTypeSpec) -> ReflectionGroup {
    let d5 = 5;
    let tag = FieldTag::QuadExt(d5);
    let tau = FieldElem::quad((1, 2), (1, 2), d5);
    let tau1 = FieldElem::quad((-1, 2), (1, 2), d5); // τ − 1 = 1/τ
    let one = FieldElem::one(tag);
    let mut raw = Vec::new();
    for i in 0..3 {
        let mut v = vec![FieldElem::zero(tag); 3];
        v[i] = one.clone();
        let m = reflection_from_root(&v, tag);
        raw.push((v, m));
    }
    let base = [tau1.clone(), tau.clone(), one.clone()];
    for shift in 0..3 {
        for signs in 0..8u32 {
            let mut v = Vec::with_capacity(3);
            for idx in 0..3 {
                let c = base[(idx + shift) % 3].clone();
                let c = if signs >> idx & 1 == 1 { c.neg() } else { c };
                v.push(c);
            }
            let m = reflection_from_root(&v, tag);
            raw.push((v, m));
        }
    }
    // icosahedron vertex axes: cyclic shifts of (0, 1, τ) up to sign
    let zero = FieldElem::zero(tag);
    let axes = vec![
        vec![zero.clone(), one.clone(), tau.clone()],
        vec![zero.clone(), one.clone(), tau.neg()],
        vec![one.clone(), tau.clone(), zero.clone()],
        vec![one.clone(), tau.neg(), zero.clone()],
        vec![tau.clone(), zero.clone(), one.clone()],
        vec![tau.neg(), zero.clone(), one.clone()],
    ];
    finish(spec, tag, 3, raw, None, Some(axes))
}

fn build_numeric(spec: CoxeterTypeSpec) -> Result<ReflectionGroup, CoxeterError> {
    match spec.family {
        Family::I2 => Ok(build_i2_numeric(spec)),
        _ => {
            // numeric mirror of the exact model
            let exact = build_exact(spec)?;
            let tag = FieldTag::Numeric;
            let reflections = exact
                .reflections()
                .iter()
                .map(|r| Reflection {
                    lambda: r.lambda.iter().map(|c| c.promote(tag)).collect(),
                    matrix: promote_matrix(&r.matrix, tag),
                    hyperplane_id: r.hyperplane_id,
                })
                .collect();
            let gram = if exact.gram().is_identity(0.0) {
                None
            } else {
                Some(promote_matrix(&exact.gram(), tag))
            };
            let model_forms = exact.model_forms().map(|fs| {
                fs.iter()
                    .map(|f| f.iter().map(|c| c.promote(tag)).collect())
                    .collect()
            });
            Ok(ReflectionGroup::from_parts(
                spec,
                tag,
                exact.dim(),
                reflections,
                gram,
                model_forms,
            ))
        }
    }
}

fn promote_matrix(m: &Matrix, tag: FieldTag) -> Matrix {
    Matrix::from_rows(
        m.row_vecs()
            .iter()
            .map(|row| row.iter().map(|c| c.promote(tag)).collect())
            .collect(),
    )
}

fn build_i2_numeric(spec: CoxeterTypeSpec) -> ReflectionGroup {
    let k = spec.bond;
    let tag = FieldTag::Numeric;
    let mut raw = Vec::new();
    for j in 0..k {
        let theta = std::f64::consts::PI * j as f64 / k as f64;
        let (s2, c2) = (2.0 * theta).sin_cos();
        let matrix = Matrix::from_rows(vec![
            vec![FieldElem::Numeric(c2), FieldElem::Numeric(s2)],
            vec![FieldElem::Numeric(s2), FieldElem::Numeric(-c2)],
        ]);
        let (st, ct) = theta.sin_cos();
        let lambda = vec![FieldElem::Numeric(-st), FieldElem::Numeric(ct)];
        raw.push((lambda, matrix));
    }
    finish(spec, tag, 2, raw, None, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn group(s: &str) -> ReflectionGroup {
        build(
            CoxeterTypeSpec::from_str(s).unwrap(),
            preferred_backend(CoxeterTypeSpec::from_str(s).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn b2_hyperplanes_from_root_enumeration() {
        // oracle: roots ±e_i, ±e_i±e_j of B₂ give mirrors x, y, x−y, x+y
        let g = group("B2");
        let forms: Vec<String> = g
            .reflections()
            .iter()
            .map(|r| {
                r.lambda
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        let mut expect = vec!["0,1", "1,-1", "1,0", "1,1"];
        expect.sort();
        let mut got = forms.clone();
        got.sort();
        assert_eq!(got, expect);
        assert_eq!(g.reflections().len(), 4);
    }

    #[test]
    fn a1_is_the_sign_flip() {
        let g = group("A1");
        assert_eq!(g.order(), 2);
        assert_eq!(g.reflections().len(), 1);
        let m = &g.reflections()[0].matrix;
        assert_eq!(*m.get(0, 0), FieldElem::from_integer(-1));
    }

    #[test]
    fn h3_has_fifteen_mirrors_over_quad5() {
        let g = group("H3");
        assert_eq!(g.reflections().len(), 15);
        assert_eq!(g.field(), FieldTag::QuadExt(5));
        assert_eq!(g.order(), 120); // = 2·6·10
        for r in g.reflections() {
            assert!(r.matrix.mul(&r.matrix).is_identity(0.0));
        }
    }

    #[test]
    fn a2_matrices_are_involutions_fixing_their_mirror() {
        let g = group("A2");
        assert_eq!(g.reflections().len(), 3);
        for r in g.reflections() {
            assert!(r.matrix.mul(&r.matrix).is_identity(0.0));
            // the matrix fixes the kernel of λ pointwise
            let lambda = Matrix::from_rows(vec![r.lambda.clone()]);
            for v in lambda.null_space() {
                let img = r.matrix.apply(&v);
                assert_eq!(img, v);
            }
        }
    }

    #[test]
    fn gram_orthogonality_for_essential_a3() {
        let g = group("A3");
        let gram = g.gram();
        for r in g.reflections() {
            let m = &r.matrix;
            let lhs = m.transpose().mul(&gram).mul(m);
            assert!(lhs.approx_eq(&gram, 0.0));
        }
    }

    #[test]
    fn i2_exact_fields() {
        assert_eq!(group("I2(4)").field(), FieldTag::Rational);
        assert_eq!(group("I2(6)").field(), FieldTag::QuadExt(3));
        assert_eq!(group("I2(3)").field(), FieldTag::QuadExt(3));
        assert_eq!(group("I2(5)").field(), FieldTag::Numeric);
        assert_eq!(group("I2(7)").reflections().len(), 7);
    }

    #[test]
    fn i2_exact_requested_for_unsupported_k_errors() {
        let spec = CoxeterTypeSpec::dihedral(5).unwrap();
        assert!(matches!(
            build(spec, Backend::Exact),
            Err(CoxeterError::UnsupportedFieldExact(_))
        ));
    }

    #[test]
    fn d_rank_guard() {
        assert!(CoxeterTypeSpec::new(Family::D, 2).is_err());
        assert!(CoxeterTypeSpec::new(Family::D, 1).is_err());
        assert!(CoxeterTypeSpec::new(Family::D, 3).is_ok());
    }

    #[test]
    fn reflection_counts_match_degree_sums() {
        for s in ["A2", "A3", "B2", "B3", "B4", "D4", "I2(4)", "I2(6)", "H3"] {
            let g = group(s);
            let d: u32 = g.spec().degrees().iter().map(|k| k - 1).sum();
            assert_eq!(g.reflections().len() as u32, d, "group {s}");
        }
    }
}
