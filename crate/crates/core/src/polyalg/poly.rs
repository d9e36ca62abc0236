//! Exact sparse multivariate polynomials.
//!
//! Terms are kept in a `BTreeMap` keyed by graded-lex monomial order, so
//! iteration and serialization are canonical and the leading term is the
//! last entry. No zero coefficients are ever stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::field::{FieldElem, FieldTag};
use super::PolyError;

/// Exponent multi-index. Ordered by total degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect())
    }

    /// Componentwise difference, if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (&a, &b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Total degree with a dedicated value for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    /// Degree of the zero polynomial.
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl PartialOrd for Degree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Degree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Degree::NegInfinity, Degree::NegInfinity) => Ordering::Equal,
            (Degree::NegInfinity, _) => Ordering::Less,
            (_, Degree::NegInfinity) => Ordering::Greater,
            (Degree::Finite(a), Degree::Finite(b)) => a.cmp(b),
        }
    }
}

/// Sparse multivariate polynomial over one of the supported fields.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly {
    nvars: usize,
    field: FieldTag,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl SparsePoly {
    pub fn zero(nvars: usize, field: FieldTag) -> Self {
        SparsePoly {
            nvars,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: FieldElem) -> Self {
        let field = c.tag();
        let mut p = SparsePoly::zero(nvars, field);
        p.add_term(Monomial::constant(nvars), c);
        p
    }

    pub fn var(nvars: usize, idx: usize, field: FieldTag) -> Self {
        assert!(idx < nvars);
        let mut p = SparsePoly::zero(nvars, field);
        p.add_term(Monomial::var(nvars, idx), FieldElem::one(field));
        p
    }

    /// Linear form c₁x₁ + … + cₙxₙ.
    pub fn linear_form(coeffs: &[FieldElem]) -> Self {
        let nvars = coeffs.len();
        let field = coeffs.iter().fold(FieldTag::Rational, |t, c| {
            t.join(c.tag()).expect("mixed fields in form")
        });
        let mut p = SparsePoly::zero(nvars, field);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(nvars, i), c.promote(field));
        }
        p
    }

    pub fn from_terms(
        nvars: usize,
        field: FieldTag,
        terms: impl IntoIterator<Item = (Vec<u16>, FieldElem)>,
    ) -> Self {
        let mut p = SparsePoly::zero(nvars, field);
        for (exp, c) in terms {
            assert_eq!(exp.len(), nvars, "exponent arity mismatch");
            p.add_term(Monomial(exp), c.promote(field));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded-lex order, lowest first.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> FieldElem {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(self.field))
    }

    pub fn constant_term(&self) -> FieldElem {
        self.coeff(&Monomial::constant(self.nvars))
    }

    pub fn degree(&self) -> Degree {
        match self.terms.keys().next_back() {
            None => Degree::NegInfinity,
            Some(m) => Degree::Finite(m.total_degree()),
        }
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &FieldElem)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: FieldElem) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let c = c.promote(self.field);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Re-tag the coefficients into a larger field.
    pub fn promote(&self, field: FieldTag) -> SparsePoly {
        if field == self.field {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.promote(field)))
            .collect();
        SparsePoly {
            nvars: self.nvars,
            field,
            terms,
        }
    }

    fn joined(f: &SparsePoly, g: &SparsePoly) -> Result<(SparsePoly, SparsePoly), PolyError> {
        if f.nvars != g.nvars {
            return Err(PolyError::ArityMismatch {
                expected: f.nvars,
                got: g.nvars,
            });
        }
        let tag = f.field.join(g.field)?;
        Ok((f.promote(tag), g.promote(tag)))
    }

    pub fn try_add(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        let (mut a, b) = Self::joined(self, other)?;
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        Ok(a)
    }

    pub fn try_sub(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        let (a, b) = Self::joined(self, other)?;
        let mut out = SparsePoly::zero(a.nvars, a.field);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> SparsePoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.neg()))
            .collect();
        SparsePoly {
            nvars: self.nvars,
            field: self.field,
            terms,
        }
    }

    pub fn scale(&self, c: &FieldElem) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.nvars, self.field);
        }
        let tag = self.field.join(c.tag()).expect("field mismatch in scale");
        let mut out = SparsePoly::zero(self.nvars, tag);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.mul(c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::constant(self.nvars, FieldElem::one(self.field));
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base).expect("pow arity");
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base).expect("pow arity");
            }
        }
        acc
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn differentiate(&self, var: usize) -> SparsePoly {
        assert!(var < self.nvars, "derivative variable out of range");
        let mut out = SparsePoly::zero(self.nvars, self.field);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exp = m.0.clone();
            exp[var] -= 1;
            out.add_term(Monomial(exp), c.mul(&FieldElem::from_integer(e as i64)));
        }
        out
    }

    /// Iterated derivative D^q.
    pub fn differentiate_multi(&self, q: &[u16]) -> SparsePoly {
        let mut out = self.clone();
        for (var, &reps) in q.iter().enumerate() {
            for _ in 0..reps {
                out = out.differentiate(var);
            }
        }
        out
    }

    /// Substitute `subs[i]` for variable i. All `subs` must share an arity.
    pub fn compose(&self, subs: &[SparsePoly]) -> Result<SparsePoly, PolyError> {
        if subs.len() != self.nvars {
            return Err(PolyError::ArityMismatch {
                expected: self.nvars,
                got: subs.len(),
            });
        }
        let out_nvars = subs.first().map(|p| p.nvars).unwrap_or(0);
        let mut tag = self.field;
        for s in subs {
            if s.nvars != out_nvars {
                return Err(PolyError::ArityMismatch {
                    expected: out_nvars,
                    got: s.nvars,
                });
            }
            tag = tag.join(s.field)?;
        }
        if self.nvars == 0 {
            // constants only
            return Ok(match self.terms.values().next() {
                None => SparsePoly::zero(out_nvars, tag),
                Some(c) => SparsePoly::constant(out_nvars, c.promote(tag)),
            });
        }
        // cache powers of each substituted polynomial
        let mut powers: Vec<Vec<SparsePoly>> = (0..subs.len())
            .map(|_| vec![SparsePoly::constant(out_nvars, FieldElem::one(tag))])
            .collect();
        let mut out = SparsePoly::zero(out_nvars, tag);
        for (m, c) in &self.terms {
            let mut term = SparsePoly::constant(out_nvars, c.promote(tag));
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i]
                        .last()
                        .unwrap()
                        .try_mul(&subs[i].promote(tag))
                        .expect("compose powers");
                    powers[i].push(next);
                }
                term = term.try_mul(&powers[i][e as usize])?;
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Evaluate at a point; exact when both are exact.
    pub fn evaluate(&self, point: &[FieldElem]) -> Result<FieldElem, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::ArityMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut tag = self.field;
        for x in point {
            tag = tag.join(x.tag())?;
        }
        // per-variable power cache
        let mut powers: Vec<Vec<FieldElem>> = point
            .iter()
            .map(|x| vec![FieldElem::one(tag), x.promote(tag)])
            .collect();
        let mut acc = FieldElem::zero(tag);
        for (m, c) in &self.terms {
            let mut v = c.promote(tag);
            for (i, &e) in m.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&powers[i][1]);
                    powers[i].push(next);
                }
                if e > 0 {
                    v = v.mul(&powers[i][e as usize]);
                }
            }
            acc = acc.add(&v);
        }
        Ok(acc)
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        let pt: Vec<FieldElem> = point.iter().map(|&x| FieldElem::Numeric(x)).collect();
        self.evaluate(&pt).map(|v| v.to_f64()).unwrap_or(f64::NAN)
    }

    /// Exact quotient `self / g`. Fails with the nonzero remainder when the
    /// division does not come out even. Division steps follow graded-lex
    /// leading terms, so a zero remainder certifies exactness.
    pub fn divide_exact(&self, g: &SparsePoly) -> Result<SparsePoly, PolyError> {
        if g.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let (mut f, g) = Self::joined(self, g)?;
        let tol = if f.field.is_exact() { 0.0 } else { 1e-9 };
        let (gm, gc) = g.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let gc_inv = gc.inverse();
        let mut q = SparsePoly::zero(f.nvars, f.field);
        let mut r = SparsePoly::zero(f.nvars, f.field);
        while let Some((fm, fc)) = f.leading().map(|(m, c)| (m.clone(), c.clone())) {
            match fm.checked_div(&gm) {
                Some(dm) => {
                    let dc = fc.mul(&gc_inv);
                    q.add_term(dm.clone(), dc.clone());
                    let piece = g.scale(&dc.neg()).mul_monomial(&dm);
                    f = f.try_add(&piece)?;
                }
                None => {
                    r.add_term(fm.clone(), fc.clone());
                    f.terms.remove(&fm);
                }
            }
        }
        let remainder_negligible = if tol == 0.0 {
            r.is_zero()
        } else {
            r.terms.values().all(|c| c.to_f64().abs() <= tol)
        };
        if remainder_negligible {
            Ok(q)
        } else {
            Err(PolyError::NotDivisible {
                remainder: Box::new(r),
            })
        }
    }

    fn mul_monomial(&self, m: &Monomial) -> SparsePoly {
        let terms = self
            .terms
            .iter()
            .map(|(mm, c)| (mm.mul(m), c.clone()))
            .collect();
        SparsePoly {
            nvars: self.nvars,
            field: self.field,
            terms,
        }
    }

    /// Split into homogeneous components, keyed by total degree.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, SparsePoly> {
        let mut out: BTreeMap<u32, SparsePoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.total_degree())
                .or_insert_with(|| SparsePoly::zero(self.nvars, self.field))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn is_homogeneous(&self) -> Option<u32> {
        let mut deg = None;
        for m in self.terms.keys() {
            match deg {
                None => deg = Some(m.total_degree()),
                Some(d) if d == m.total_degree() => {}
                _ => return None,
            }
        }
        deg
    }

    /// Apply a linear change of variables: f(M·x) for a square matrix given
    /// as rows of coefficients. Signed permutation rows take a fast path.
    pub fn act_linear(&self, rows: &[Vec<FieldElem>]) -> SparsePoly {
        assert_eq!(rows.len(), self.nvars);
        if let Some(perm) = monomial_rows(rows) {
            // (M x)_i = c_i x_{j_i}: monomials map to monomials
            let mut tag = self.field;
            for (_, c) in &perm {
                tag = tag.join(c.tag()).expect("field mismatch in act_linear");
            }
            let mut out = SparsePoly::zero(self.nvars, tag);
            for (m, coef) in &self.terms {
                let mut exp = vec![0u16; self.nvars];
                let mut c = coef.promote(tag);
                for (i, &e) in m.0.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let (j, ref scale) = perm[i];
                    exp[j] += e;
                    if !scale.is_one() {
                        c = c.mul(&scale.pow(e as u32));
                    }
                }
                out.add_term(Monomial(exp), c);
            }
            return out;
        }
        let subs: Vec<SparsePoly> = rows.iter().map(|r| SparsePoly::linear_form(r)).collect();
        self.compose(&subs).expect("act_linear arity")
    }

    /// Max |coefficient| in f64, for numeric comparisons.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &SparsePoly, tol: f64) -> bool {
        if self.field.is_exact() && other.field.is_exact() {
            if let Ok(d) = self.try_sub(other) {
                return d.is_zero();
            }
            return false;
        }
        match self.try_sub(other) {
            Ok(d) => d.max_abs_coeff() <= tol,
            Err(_) => false,
        }
    }
}

fn monomial_rows(rows: &[Vec<FieldElem>]) -> Option<Vec<(usize, FieldElem)>> {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut found = None;
        for (j, c) in row.iter().enumerate() {
            if !c.is_zero() {
                if found.is_some() {
                    return None;
                }
                found = Some((j, c.clone()));
            }
        }
        out.push(found?);
    }
    Some(out)
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{e}")?,
                }
            }
        }
        Ok(())
    }
}
