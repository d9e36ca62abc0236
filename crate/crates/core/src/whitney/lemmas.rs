//! Exact product and division checks on polynomial jet instances.
//!
//! The product check: multiply the full jet of a polynomial Q that vanishes
//! to order ≥ s on a flat by the order-r truncated Taylor field of a
//! polynomial. Every Whitney remainder of the product field, restricted to
//! a ray through a point of the flat, must vanish in t to order at least
//! r − |q| + s + 1 — the strict little-o bound made exact.

use serde::Serialize;

use crate::polyalg::{vanishing_order, FieldElem, Flat, Monomial, SparsePoly, VanishingOrder};
use crate::rng::SplitMix64;

use super::{multi_factorial, multi_indices, JetField, WhitneyError};

#[derive(Debug, Clone)]
pub struct Lemma1Options {
    /// Sample points on the flat.
    pub basepoints: usize,
    /// Sample ray directions per basepoint.
    pub rays: usize,
    pub seed: u64,
}

impl Default for Lemma1Options {
    fn default() -> Self {
        Lemma1Options {
            basepoints: 2,
            rays: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma1Row {
    pub basepoint: usize,
    pub ray: usize,
    pub q: Vec<u16>,
    /// Minimal t-order of the remainder ("inf" when identically zero).
    pub order: String,
    pub required: u32,
    pub ok: bool,
}

#[derive(Debug)]
pub struct Lemma1Report {
    pub rows: Vec<Lemma1Row>,
    pub violations: Vec<String>,
}

impl Lemma1Report {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

fn multi_binomial(q: &[u16], j: &[u16]) -> u64 {
    q.iter()
        .zip(j)
        .map(|(&a, &b)| {
            let mut acc = 1u64;
            for i in 0..b as u64 {
                acc = acc * (a as u64 - i) / (i + 1);
            }
            acc
        })
        .product()
}

/// D^k f as a polynomial, iterated one variable at a time.
fn derivative_poly(f: &SparsePoly, k: &[u16]) -> SparsePoly {
    f.differentiate_multi(k)
}

/// Truncated Taylor polynomial of `f` at `z0`, order r, as a polynomial in
/// the original variables.
fn taylor_truncation(f: &SparsePoly, z0: &[FieldElem], r: u32) -> SparsePoly {
    let n = f.nvars();
    let tag = f.field();
    let shifts: Vec<SparsePoly> = (0..n)
        .map(|i| {
            SparsePoly::var(n, i, tag)
                .try_sub(&SparsePoly::constant(n, z0[i].clone()))
                .expect("shift arity")
        })
        .collect();
    let mut acc = SparsePoly::zero(n, tag);
    for k in multi_indices(n, r) {
        let dk = derivative_poly(f, &k.0).evaluate(z0).expect("taylor eval");
        if dk.is_zero() {
            continue;
        }
        let mut term = SparsePoly::constant(
            n,
            dk.div(&FieldElem::from_integer(multi_factorial(&k.0) as i64)),
        );
        for (i, &e) in k.0.iter().enumerate() {
            if e > 0 {
                term = term
                    .try_mul(&shifts[i].pow(e as u32))
                    .expect("taylor arity");
            }
        }
        acc = acc.try_add(&term).expect("taylor arity");
    }
    acc
}

/// Restrict a polynomial to the line z0 + t·v, exactly.
fn restrict_line(f: &SparsePoly, z0: &[FieldElem], v: &[FieldElem]) -> SparsePoly {
    let subs: Vec<SparsePoly> = z0
        .iter()
        .zip(v)
        .map(|(a, b)| {
            SparsePoly::constant(1, a.clone())
                .try_add(&SparsePoly::var(1, 0, b.tag()).scale(b))
                .expect("line arity")
        })
        .collect();
    f.compose(&subs).expect("line restriction")
}

fn min_t_order(f: &SparsePoly) -> VanishingOrder {
    if f.is_zero() {
        return VanishingOrder::Infinite;
    }
    VanishingOrder::Finite(
        f.terms()
            .map(|(m, _)| m.total_degree())
            .min()
            .expect("nonzero"),
    )
}

/// Verify the strict remainder orders for the product field Q·(Taylor_r A)
/// at sampled points of the flat and sampled rays: for every |q| ≤ r the
/// remainder, an exact univariate polynomial in t, vanishes to order at
/// least r − |q| + s + 1.
pub fn lemma1_product_check(
    q_poly: &SparsePoly,
    a_poly: &SparsePoly,
    flat: &Flat,
    r: u32,
    s: u32,
    options: &Lemma1Options,
) -> Result<Lemma1Report, WhitneyError> {
    let n = q_poly.nvars();
    assert_eq!(a_poly.nvars(), n);
    let actual = vanishing_order(q_poly, flat);
    if !actual.at_least(s) {
        return Err(WhitneyError::InsufficientFlatness {
            order: actual.to_string(),
            required: s,
        });
    }
    let mut rng = SplitMix64::new(options.seed).fork(0x1e44a1);
    let tag = q_poly.field().join(a_poly.field())?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for bp in 0..options.basepoints {
        // exact rational point on the flat
        let z0: Vec<FieldElem> = if flat.dim() == 0 {
            vec![FieldElem::zero(tag); n]
        } else {
            let t: Vec<FieldElem> = (0..flat.dim())
                .map(|_| FieldElem::from_ratio(rng.nonzero_int(7), 3))
                .collect();
            flat.point_from_tangential(&t)
        };
        let truncated = taylor_truncation(a_poly, &z0, r);
        let product = q_poly.try_mul(&truncated)?;
        for ray_idx in 0..options.rays {
            let v: Vec<FieldElem> = (0..n)
                .map(|_| FieldElem::from_integer(rng.nonzero_int(5)))
                .collect();
            for q in multi_indices(n, r) {
                // field coefficient g_q(z) = Σ_{j ≤ q} C(q,j) D^jQ(z)·D^{q−j}A(z),
                // the Leibniz product of Q's full jet with A's r-jet
                let mut g_q = SparsePoly::zero(n, tag);
                for j in multi_indices(n, q.total_degree()) {
                    let Some(rest) = q.checked_div(&j) else {
                        continue;
                    };
                    if rest.total_degree() > r {
                        continue;
                    }
                    let piece = derivative_poly(q_poly, &j.0)
                        .try_mul(&derivative_poly(a_poly, &rest.0))?
                        .scale(&FieldElem::from_integer(multi_binomial(&q.0, &j.0) as i64));
                    g_q = g_q.try_add(&piece)?;
                }
                let lead = restrict_line(&g_q, &z0, &v);
                let tail = restrict_line(&derivative_poly(&product, &q.0), &z0, &v);
                let remainder = lead.try_sub(&tail)?;
                let order = min_t_order(&remainder);
                let required = r - q.total_degree() + s + 1;
                let ok = order.at_least(required);
                if !ok {
                    violations.push(format!(
                        "remainder at q = {:?} has t-order {} < {}",
                        q.0, order, required
                    ));
                }
                rows.push(Lemma1Row {
                    basepoint: bp,
                    ray: ray_idx,
                    q: q.0.clone(),
                    order: order.to_string(),
                    required,
                    ok,
                });
            }
        }
    }
    Ok(Lemma1Report { rows, violations })
}

#[derive(Debug)]
pub struct Lemma2Report {
    pub quotient: SparsePoly,
    pub norm_dividend: f64,
    pub norm_quotient: f64,
    /// ‖B‖^{r−1} / ‖A‖^r on the sampled compact.
    pub bound_constant: f64,
}

/// Division of a polynomial field by a linear form: requires the dividend
/// to vanish identically on the hyperplane, returns the exact quotient and
/// the seminorm ratio on the sampled points.
pub fn lemma2_division_check(
    lambda: &SparsePoly,
    a_poly: &SparsePoly,
    sample: &[Vec<FieldElem>],
    r: u32,
) -> Result<Lemma2Report, WhitneyError> {
    assert!(r >= 1, "division drops one order; need r >= 1");
    let n = lambda.nvars();
    let coeffs: Vec<FieldElem> = (0..n).map(|i| lambda.coeff(&Monomial::var(n, i))).collect();
    let hyperplane = Flat::from_forms(n, &[coeffs], lambda.field());
    // exact restriction: A must vanish identically on ker λ
    if !vanishing_order(a_poly, &hyperplane).at_least(1) {
        let remainder = Box::new(a_poly.clone());
        return Err(WhitneyError::Poly(
            crate::polyalg::PolyError::NotDivisible { remainder },
        ));
    }
    let quotient = a_poly.divide_exact(lambda)?;
    debug_assert_eq!(quotient.try_mul(lambda).unwrap(), *a_poly);
    let jet_a = JetField::taylor(a_poly, sample, r)?;
    let jet_b = JetField::taylor(&quotient, sample, r.saturating_sub(1))?;
    let all: Vec<usize> = (0..sample.len()).collect();
    let norm_dividend = jet_a.seminorm(&all, r)?;
    let norm_quotient = jet_b.seminorm(&all, r - 1)?;
    let bound_constant = if norm_dividend > 0.0 {
        norm_quotient / norm_dividend
    } else {
        0.0
    };
    Ok(Lemma2Report {
        quotient,
        norm_dividend,
        norm_quotient,
        bound_constant,
    })
}
