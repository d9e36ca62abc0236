//! Linear flats (intersections of hyperplanes through the origin) and
//! exact vanishing orders of polynomials along them.

use super::field::{FieldElem, FieldTag};
use super::matrix::Matrix;
use super::poly::SparsePoly;

/// A linear subspace given by a spanning basis and a complementary normal
/// basis. All flats used here pass through the origin.
#[derive(Debug, Clone)]
pub struct Flat {
    basepoint: Vec<FieldElem>,
    directions: Vec<Vec<FieldElem>>,
    normals: Vec<Vec<FieldElem>>,
}

impl Flat {
    pub fn new(
        basepoint: Vec<FieldElem>,
        directions: Vec<Vec<FieldElem>>,
        normals: Vec<Vec<FieldElem>>,
    ) -> Self {
        let n = basepoint.len();
        assert!(directions.iter().all(|v| v.len() == n));
        assert!(normals.iter().all(|v| v.len() == n));
        let mut all = directions.clone();
        all.extend(normals.iter().cloned());
        assert_eq!(
            Matrix::from_rows(all.clone()).rank(),
            n,
            "direction and normal bases must jointly span"
        );
        Flat {
            basepoint,
            directions,
            normals,
        }
    }

    /// The flat cut out by the kernels of the given linear forms.
    /// Directions span the common kernel; normals span the row space.
    pub fn from_forms(nvars: usize, forms: &[Vec<FieldElem>], tag: FieldTag) -> Self {
        if forms.is_empty() {
            let dirs = Matrix::identity(nvars, tag).row_vecs();
            return Flat::new(vec![FieldElem::zero(tag); nvars], dirs, Vec::new());
        }
        let m = Matrix::from_rows(forms.to_vec());
        let directions = m.null_space();
        // independent subset of the forms as the normal basis
        let mut normals: Vec<Vec<FieldElem>> = Vec::new();
        for f in forms {
            let mut candidate = normals.clone();
            candidate.push(f.clone());
            if Matrix::from_rows(candidate.clone()).rank() == candidate.len() {
                normals = candidate;
            }
        }
        Flat::new(vec![FieldElem::zero(tag); nvars], directions, normals)
    }

    pub fn whole_space(nvars: usize, tag: FieldTag) -> Self {
        Flat::from_forms(nvars, &[], tag)
    }

    pub fn origin(nvars: usize, tag: FieldTag) -> Self {
        let forms = Matrix::identity(nvars, tag).row_vecs();
        Flat::from_forms(nvars, &forms, tag)
    }

    pub fn nvars(&self) -> usize {
        self.basepoint.len()
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn codim(&self) -> usize {
        self.normals.len()
    }

    pub fn basepoint(&self) -> &[FieldElem] {
        &self.basepoint
    }

    pub fn directions(&self) -> &[Vec<FieldElem>] {
        &self.directions
    }

    pub fn normals(&self) -> &[Vec<FieldElem>] {
        &self.normals
    }

    /// A point of the flat given tangential coordinates.
    pub fn point_from_tangential(&self, t: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(t.len(), self.dim());
        let n = self.nvars();
        let tag = self
            .directions
            .iter()
            .flatten()
            .chain(t.iter())
            .fold(FieldTag::Rational, |a, x| {
                a.join(x.tag()).expect("flat fields")
            });
        let mut out = vec![FieldElem::zero(tag); n];
        for (coef, dir) in t.iter().zip(&self.directions) {
            for i in 0..n {
                out[i] = out[i].add(&coef.mul(&dir[i]));
            }
        }
        out
    }

    /// Does a linear form vanish identically on the flat?
    /// Does a linear form vanish identically on the flat? Exact for exact
    /// data; numeric data compares against a scale-relative tolerance.
    pub fn contains_in_kernel(&self, form: &[FieldElem]) -> bool {
        let exact = form.iter().all(|c| c.tag().is_exact())
            && self
                .directions
                .iter()
                .all(|dir| dir.iter().all(|c| c.tag().is_exact()));
        self.directions.iter().all(|dir| {
            let mut acc = FieldElem::zero(FieldTag::Rational);
            for (a, b) in form.iter().zip(dir) {
                acc = acc.add(&a.mul(b));
            }
            if exact {
                acc.is_zero()
            } else {
                let scale = form
                    .iter()
                    .zip(dir)
                    .map(|(a, b)| (a.to_f64() * b.to_f64()).abs())
                    .fold(0.0f64, f64::max);
                acc.to_f64().abs() <= NUMERIC_KERNEL_TOL * (1.0 + scale)
            }
        })
    }
}

/// Tolerance for kernel membership of binary64 data, relative to the term
/// scale of the dot product.
const NUMERIC_KERNEL_TOL: f64 = 1e-9;

/// Vanishing order along a flat, with +∞ for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VanishingOrder {
    Finite(u32),
    Infinite,
}

impl VanishingOrder {
    pub fn at_least(self, m: u32) -> bool {
        match self {
            VanishingOrder::Infinite => true,
            VanishingOrder::Finite(k) => k >= m,
        }
    }
}

impl std::fmt::Display for VanishingOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VanishingOrder::Finite(k) => write!(f, "{k}"),
            VanishingOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// Minimal normal-coordinate degree of `f` after the exact linear change of
/// variables x = T·t + N·u splitting the space into tangential and normal
/// parts. `f` is (m−1)-flat on the flat iff the result is at least m.
pub fn vanishing_order(f: &SparsePoly, flat: &Flat) -> VanishingOrder {
    assert_eq!(f.nvars(), flat.nvars());
    if f.is_zero() {
        return VanishingOrder::Infinite;
    }
    let n = f.nvars();
    let k = flat.dim();
    if k == 0 {
        // flat is the origin: order is the lowest total degree present
        let min = f
            .terms()
            .map(|(m, _)| m.total_degree())
            .min()
            .expect("nonzero poly");
        return VanishingOrder::Finite(min);
    }
    if flat.codim() == 0 {
        // order 0 unless identically zero, handled above
        return VanishingOrder::Finite(0);
    }
    let tag = f.field();
    // substitution x_i = Σ_j T[j][i] t_j + Σ_l N[l][i] u_l in n' = k + codim vars
    let n_new = k + flat.codim();
    let subs: Vec<SparsePoly> = (0..n)
        .map(|i| {
            let mut coeffs = vec![FieldElem::zero(tag); n_new];
            for (j, dir) in flat.directions().iter().enumerate() {
                coeffs[j] = dir[i].clone();
            }
            for (l, nor) in flat.normals().iter().enumerate() {
                coeffs[k + l] = nor[i].clone();
            }
            SparsePoly::linear_form(&coeffs)
        })
        .collect();
    let g = f.compose(&subs).expect("vanishing_order substitution");
    // numeric substitution leaves roundoff residue on terms that cancel
    // exactly over the reals; drop them before reading off the order
    let junk_floor = if g.field().is_exact() {
        0.0
    } else {
        NUMERIC_KERNEL_TOL * (1.0 + g.max_abs_coeff())
    };
    let min_u = g
        .terms()
        .filter(|(_, c)| junk_floor == 0.0 || c.to_f64().abs() > junk_floor)
        .map(|(m, _)| m.0[k..].iter().map(|&e| e as u32).sum::<u32>())
        .min();
    match min_u {
        None => VanishingOrder::Infinite,
        Some(u) => VanishingOrder::Finite(u),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::field::FieldTag;

    fn x(n: usize, i: usize) -> SparsePoly {
        SparsePoly::var(n, i, FieldTag::Rational)
    }

    fn form(v: &[i64]) -> Vec<FieldElem> {
        v.iter().map(|&c| FieldElem::from_integer(c)).collect()
    }

    #[test]
    fn order_on_hyperplane() {
        // f = x on {x = 0} has order 1
        let flat = Flat::from_forms(2, &[form(&[1, 0])], FieldTag::Rational);
        assert_eq!(vanishing_order(&x(2, 0), &flat), VanishingOrder::Finite(1));
    }

    #[test]
    fn order_at_origin() {
        // 4x³ at the origin has order 3
        let flat = Flat::origin(2, FieldTag::Rational);
        let f = SparsePoly::constant(2, FieldElem::from_integer(4))
            .try_mul(&x(2, 0).pow(3))
            .unwrap();
        assert_eq!(vanishing_order(&f, &flat), VanishingOrder::Finite(3));
    }

    #[test]
    fn order_zero_when_not_vanishing() {
        // 2x on {x = y}: substituting x = t, y = t leaves 2t, order 0
        let flat = Flat::from_forms(2, &[form(&[1, -1])], FieldTag::Rational);
        let f = SparsePoly::constant(2, FieldElem::from_integer(2))
            .try_mul(&x(2, 0))
            .unwrap();
        assert_eq!(vanishing_order(&f, &flat), VanishingOrder::Finite(0));
    }

    #[test]
    fn zero_poly_is_infinitely_flat() {
        let flat = Flat::origin(2, FieldTag::Rational);
        assert_eq!(
            vanishing_order(&SparsePoly::zero(2, FieldTag::Rational), &flat),
            VanishingOrder::Infinite
        );
    }

    #[test]
    fn order_is_additive() {
        // x·(x−y) on {x=0}: order 1 + 0
        let flat = Flat::from_forms(2, &[form(&[1, 0])], FieldTag::Rational);
        let f = x(2, 0)
            .try_mul(&x(2, 0).try_sub(&x(2, 1)).unwrap())
            .unwrap();
        assert_eq!(vanishing_order(&f, &flat), VanishingOrder::Finite(1));
    }
}
