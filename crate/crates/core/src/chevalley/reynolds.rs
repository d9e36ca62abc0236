//! Group averaging f ↦ (1/|W|) Σ_w f∘w, factored through the subgroup D of
//! diagonal ±1 elements: averaging over D is a parity filter on exponents,
//! which shrinks the input before the dense sum over a right-coset
//! transversal. For the signed-permutation families the transversal acts by
//! exponent permutation, so the whole average never multiplies polynomials.

use std::collections::BTreeMap;

use crate::coxeter::{CoxeterError, ReflectionGroup, NUMERIC_TOL};
use crate::polyalg::matrix::MatrixOrd;
use crate::polyalg::{FieldElem, Matrix, PolyError, SparsePoly};

pub struct ReynoldsOperator {
    /// Sign patterns of the diagonal subgroup D (entries ±1).
    diag_signs: Vec<Vec<i8>>,
    /// Right-coset transversal: W = ⊔ D·t.
    transversal: Vec<Matrix>,
    order: u64,
}

impl ReynoldsOperator {
    pub fn new(group: &ReflectionGroup) -> Result<Self, CoxeterError> {
        let elements = group.enumerate_elements()?;
        let exact = group.field().is_exact();
        let n = group.dim();
        let mut diag = Vec::new();
        let mut diag_signs = Vec::new();
        for w in elements {
            if let Some(signs) = diagonal_signs(w, n, exact) {
                diag.push(w.clone());
                diag_signs.push(signs);
            }
        }
        // greedy transversal of the right cosets D·t, in enumeration order
        let mut transversal = Vec::new();
        if exact {
            let mut covered: BTreeMap<MatrixOrd, ()> = BTreeMap::new();
            for w in elements {
                if covered.contains_key(&MatrixOrd(w.clone())) {
                    continue;
                }
                transversal.push(w.clone());
                for d in &diag {
                    covered.insert(MatrixOrd(d.mul(w)), ());
                }
            }
        } else {
            let mut covered: Vec<Matrix> = Vec::new();
            for w in elements {
                if covered.iter().any(|m| m.approx_eq(w, NUMERIC_TOL)) {
                    continue;
                }
                transversal.push(w.clone());
                for d in &diag {
                    covered.push(d.mul(w));
                }
            }
        }
        debug_assert_eq!(diag.len() * transversal.len(), elements.len());
        Ok(ReynoldsOperator {
            diag_signs,
            transversal,
            order: group.order(),
        })
    }

    pub fn group_order(&self) -> u64 {
        self.order
    }

    /// (1/|W|) Σ_w f∘w. Idempotent; the image is exactly the invariants.
    pub fn apply(&self, f: &SparsePoly) -> Result<SparsePoly, PolyError> {
        let filtered = self.diagonal_average(f);
        let mut acc = SparsePoly::zero(f.nvars(), filtered.field());
        for t in &self.transversal {
            acc = acc.try_add(&filtered.act_linear(&t.row_vecs()))?;
        }
        let count = FieldElem::from_integer(self.transversal.len() as i64)
            .promote(acc.field())
            .inverse();
        Ok(acc.scale(&count))
    }

    /// Average over D: keep a monomial iff its exponent parity pattern is
    /// fixed by every sign pattern in D.
    fn diagonal_average(&self, f: &SparsePoly) -> SparsePoly {
        let mut out = SparsePoly::zero(f.nvars(), f.field());
        'term: for (m, c) in f.terms() {
            for signs in &self.diag_signs {
                let mut chi = 1i8;
                for (&e, &s) in m.0.iter().zip(signs) {
                    if s < 0 && e % 2 == 1 {
                        chi = -chi;
                    }
                }
                if chi < 0 {
                    continue 'term;
                }
            }
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

fn diagonal_signs(w: &Matrix, n: usize, exact: bool) -> Option<Vec<i8>> {
    let mut signs = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            let x = w.get(i, j);
            if i == j {
                let v = x.to_f64();
                let is_one = if exact {
                    x.is_one()
                } else {
                    (v - 1.0).abs() <= NUMERIC_TOL
                };
                let is_neg_one = if exact {
                    x.add(&FieldElem::from_integer(1)).is_zero()
                } else {
                    (v + 1.0).abs() <= NUMERIC_TOL
                };
                if is_one {
                    signs.push(1);
                } else if is_neg_one {
                    signs.push(-1);
                } else {
                    return None;
                }
            } else {
                let zero = if exact {
                    x.is_zero()
                } else {
                    x.to_f64().abs() <= NUMERIC_TOL
                };
                if !zero {
                    return None;
                }
            }
        }
    }
    Some(signs)
}
