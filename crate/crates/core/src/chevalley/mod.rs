//! Integrity bases, the Chevalley map P = (p₁,…,pₙ), and the algebra built
//! on it: Jacobian factorization into hyperplane forms, the discriminant,
//! rewriting invariants as polynomials in P, and the Cramer solution of the
//! gradient system.

mod reynolds;

pub use reynolds::ReynoldsOperator;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::coxeter::{CoxeterError, Family, ReflectionGroup, NUMERIC_TOL};
use crate::polyalg::{
    determinant, minor, FieldElem, FieldTag, Matrix, Monomial, PolyError, PolyMatrix, SparsePoly,
};
use crate::rng::SplitMix64;

#[derive(Debug, Error)]
pub enum ChevalleyError {
    #[error("polynomial is not invariant under the group")]
    NotInvariant,
    #[error("rewrite system has no exact solution: {0}")]
    RewriteInconsistent(String),
    #[error("Jacobian factorization failed: {0}")]
    FactorizationFailure(String),
    #[error("hyperplane form does not divide the Cramer numerator for component {component}")]
    DivisibilityFailure { component: usize },
    #[error("operation needs an exact field backend; this group is numeric")]
    NumericBackend,
    #[error("no probe invariant for {0}: the highest degree must be even with a definite power-sum model")]
    UnsupportedGroupForProbe(String),
    #[error(transparent)]
    Group(#[from] CoxeterError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// An integrity basis with its degree bookkeeping. For an irreducible group
/// the degrees satisfy 2 = k₁ ≤ … ≤ kₙ = h, the reflection count is
/// d = Σ(kᵢ−1), the minor degrees are sⱼ = Σ_{u≠j}(kᵤ−1), and h = 1 + d − s.
pub struct ChevalleyMap {
    group: Arc<ReflectionGroup>,
    p: Vec<SparsePoly>,
    degrees: Vec<u32>,
    d: u32,
    s_j: Vec<u32>,
    s: u32,
    h: u32,
    jacobian: OnceLock<PolyMatrix>,
    minors: OnceLock<Vec<Vec<SparsePoly>>>,
    reynolds: OnceLock<ReynoldsOperator>,
    power_cache: Mutex<BTreeMap<(usize, u32), SparsePoly>>,
}

impl std::fmt::Debug for ChevalleyMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChevalleyMap")
            .field("group", &self.group.spec().to_string())
            .field("degrees", &self.degrees)
            .field("d", &self.d)
            .field("s", &self.s)
            .field("h", &self.h)
            .finish()
    }
}

/// Exact factorization J_P = c·∏ λ_τ with each normalized hyperplane form
/// appearing exactly once.
#[derive(Debug, Clone)]
pub struct JacobianFactorization {
    pub c: FieldElem,
    pub factors: Vec<SparsePoly>,
}

/// Pointwise verification of the factorization on a numeric backend.
#[derive(Debug, Clone)]
pub struct NumericJacobianReport {
    pub c: f64,
    pub points: usize,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Result of expressing an invariant as F(p₁,…,pₙ).
#[derive(Debug, Clone)]
pub struct RewriteResult {
    /// Polynomial in the target variables u₁…uₙ with compose(F, p) = f.
    pub target: SparsePoly,
    /// Max over terms of Σ mᵢkᵢ; never exceeds deg f.
    pub weighted_degree: u32,
}

/// Build the canonical integrity basis for the group's family.
pub fn basic_invariants(group: Arc<ReflectionGroup>) -> Result<ChevalleyMap, ChevalleyError> {
    let spec = group.spec();
    let n = group.dim();
    let p: Vec<SparsePoly> = match spec.family {
        Family::A => {
            // power sums of the ambient coordinates restricted to Σx = 0
            let forms = group
                .model_forms()
                .expect("A-family model carries coordinate forms");
            let form_polys: Vec<SparsePoly> =
                forms.iter().map(|f| SparsePoly::linear_form(f)).collect();
            (2..=spec.rank as u32 + 1)
                .map(|k| power_sum(&form_polys, k, n))
                .collect()
        }
        Family::B => {
            let xs: Vec<SparsePoly> = (0..n)
                .map(|i| SparsePoly::var(n, i, FieldTag::Rational))
                .collect();
            (1..=spec.rank as u32)
                .map(|i| power_sum(&xs, 2 * i, n))
                .collect()
        }
        Family::D => {
            let xs: Vec<SparsePoly> = (0..n)
                .map(|i| SparsePoly::var(n, i, FieldTag::Rational))
                .collect();
            let mut p: Vec<SparsePoly> = (1..spec.rank as u32)
                .map(|i| power_sum(&xs, 2 * i, n))
                .collect();
            let product = xs.iter().fold(
                SparsePoly::constant(n, FieldElem::from_integer(1)),
                |acc, x| acc.try_mul(x).expect("product arity"),
            );
            p.push(product);
            p.sort_by_key(|q| q.is_homogeneous().expect("homogeneous invariant"));
            p
        }
        Family::I2 => {
            let k = spec.bond;
            let p1 = SparsePoly::from_terms(
                2,
                FieldTag::Rational,
                vec![
                    (vec![2, 0], FieldElem::from_integer(1)),
                    (vec![0, 2], FieldElem::from_integer(1)),
                ],
            );
            // Re((x+iy)^k) = Σ_{j even} (−1)^{j/2} C(k,j) x^{k−j} y^j
            let mut terms = Vec::new();
            for j in (0..=k).step_by(2) {
                let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
                let coef = binomial(k as u64, j as u64) as i64 * sign;
                terms.push((
                    vec![(k - j) as u16, j as u16],
                    FieldElem::from_integer(coef),
                ));
            }
            let p2 = SparsePoly::from_terms(2, FieldTag::Rational, terms);
            vec![p1, p2]
        }
        Family::H3 => {
            // power sums over the six icosahedral vertex axes
            let axes = group.model_forms().expect("H3 model carries axis forms");
            let axis_polys: Vec<SparsePoly> =
                axes.iter().map(|f| SparsePoly::linear_form(f)).collect();
            [2u32, 6, 10]
                .iter()
                .map(|&k| power_sum(&axis_polys, k, n))
                .collect()
        }
    };
    ChevalleyMap::new(group, p)
}

fn power_sum(forms: &[SparsePoly], k: u32, nvars: usize) -> SparsePoly {
    let mut acc = SparsePoly::zero(nvars, forms[0].field());
    for f in forms {
        acc = acc.try_add(&f.pow(k)).expect("power sum arity");
    }
    acc
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Multi-indices m with Σ mᵢ·ks[i] = target.
fn weighted_monomials(ks: &[u32], target: u32) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut current = vec![0u16; ks.len()];
    fn rec(
        ks: &[u32],
        pos: usize,
        remaining: u32,
        current: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
    ) {
        if pos == ks.len() {
            if remaining == 0 {
                out.push(current.clone());
            }
            return;
        }
        let max = remaining / ks[pos];
        for e in 0..=max {
            current[pos] = e as u16;
            rec(ks, pos + 1, remaining - e * ks[pos], current, out);
        }
        current[pos] = 0;
    }
    rec(ks, 0, target, &mut current, &mut out);
    out
}

impl ChevalleyMap {
    /// Wrap a candidate basis, verifying homogeneity, invariance and the
    /// degree bookkeeping before accepting it.
    pub fn new(group: Arc<ReflectionGroup>, p: Vec<SparsePoly>) -> Result<Self, ChevalleyError> {
        let spec = group.spec();
        let degrees = spec.degrees();
        assert_eq!(p.len(), degrees.len());
        for (i, q) in p.iter().enumerate() {
            let deg = q.is_homogeneous().ok_or_else(|| {
                ChevalleyError::FactorizationFailure(format!("p_{} is not homogeneous", i + 1))
            })?;
            if deg != degrees[i] {
                return Err(ChevalleyError::FactorizationFailure(format!(
                    "p_{} has degree {deg}, expected {}",
                    i + 1,
                    degrees[i]
                )));
            }
            if !group.is_invariant(q) {
                return Err(ChevalleyError::NotInvariant);
            }
        }
        let d: u32 = degrees.iter().map(|k| k - 1).sum();
        debug_assert_eq!(d as usize, group.reflections().len());
        let s_j: Vec<u32> = degrees.iter().map(|k| d - (k - 1)).collect();
        let s = *s_j.iter().min().expect("nonempty degrees");
        let h = 1 + d - s;
        debug_assert_eq!(h, *degrees.last().unwrap());
        Ok(ChevalleyMap {
            group,
            p,
            degrees,
            d,
            s_j,
            s,
            h,
            jacobian: OnceLock::new(),
            minors: OnceLock::new(),
            reynolds: OnceLock::new(),
            power_cache: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn group(&self) -> &ReflectionGroup {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<ReflectionGroup> {
        Arc::clone(&self.group)
    }

    pub fn coordinates(&self) -> &[SparsePoly] {
        &self.p
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn reflection_count(&self) -> u32 {
        self.d
    }

    pub fn minor_degrees(&self) -> &[u32] {
        &self.s_j
    }

    pub fn min_minor_degree(&self) -> u32 {
        self.s
    }

    pub fn coxeter_number(&self) -> u32 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    fn exact(&self) -> bool {
        self.group.field().is_exact()
    }

    /// P(x), evaluated exactly when the point is exact.
    pub fn evaluate(&self, x: &[FieldElem]) -> Result<Vec<FieldElem>, ChevalleyError> {
        self.p
            .iter()
            .map(|q| q.evaluate(x).map_err(ChevalleyError::from))
            .collect()
    }

    /// Group averaging onto invariants; cached factorized form.
    pub fn reynolds_operator(&self) -> Result<&ReynoldsOperator, ChevalleyError> {
        if let Some(op) = self.reynolds.get() {
            return Ok(op);
        }
        let op = ReynoldsOperator::new(&self.group)?;
        let _ = self.reynolds.set(op);
        Ok(self.reynolds.get().expect("just set"))
    }

    pub fn reynolds(&self, f: &SparsePoly) -> Result<SparsePoly, ChevalleyError> {
        Ok(self.reynolds_operator()?.apply(f)?)
    }

    /// pᵢ^e with caching across calls.
    fn basis_power(&self, i: usize, e: u32) -> SparsePoly {
        if e == 0 {
            return SparsePoly::constant(self.dim(), FieldElem::one(self.p[i].field()));
        }
        if e == 1 {
            return self.p[i].clone();
        }
        let mut cache = self.power_cache.lock().expect("power cache");
        if let Some(hit) = cache.get(&(i, e)) {
            return hit.clone();
        }
        let mut best = e;
        while best > 1 && !cache.contains_key(&(i, best - 1)) {
            best -= 1;
        }
        let mut acc = if best > 1 {
            cache.get(&(i, best - 1)).expect("cached").clone()
        } else {
            self.p[i].clone()
        };
        let start = if best > 1 { best } else { 2 };
        for cur in start..=e {
            acc = acc.try_mul(&self.p[i]).expect("power arity");
            cache.insert((i, cur), acc.clone());
        }
        acc
    }

    /// ∏ pᵢ^{m_i} for a target-variable monomial m.
    fn basis_monomial(&self, m: &[u16]) -> SparsePoly {
        let mut acc = SparsePoly::constant(self.dim(), FieldElem::one(self.p[0].field()));
        for (i, &e) in m.iter().enumerate() {
            if e > 0 {
                acc = acc
                    .try_mul(&self.basis_power(i, e as u32))
                    .expect("basis monomial arity");
            }
        }
        acc
    }

    /// compose(F, p) through the shared power cache.
    pub fn compose_with_basis(&self, target: &SparsePoly) -> Result<SparsePoly, ChevalleyError> {
        assert_eq!(target.nvars(), self.p.len());
        let tag = target.field().join(self.p[0].field())?;
        let mut acc = SparsePoly::zero(self.dim(), tag);
        for (m, c) in target.terms() {
            let piece = self.basis_monomial(&m.0).scale(c);
            acc = acc.try_add(&piece)?;
        }
        Ok(acc)
    }

    /// Jacobian matrix (∂pᵢ/∂zⱼ): row i is the gradient of pᵢ.
    pub fn jacobian_matrix(&self) -> &PolyMatrix {
        self.jacobian.get_or_init(|| {
            self.p
                .iter()
                .map(|q| (0..self.dim()).map(|j| q.differentiate(j)).collect())
                .collect()
        })
    }

    pub fn jacobian_determinant(&self) -> SparsePoly {
        determinant(self.jacobian_matrix())
    }

    /// Minor M_{i,j}: the Jacobian with row j (the p_j row) and column i
    /// (the z_i column) deleted; homogeneous of degree sⱼ.
    pub fn jacobian_minor(&self, i: usize, j: usize) -> &SparsePoly {
        let n = self.dim();
        let minors = self.minors.get_or_init(|| {
            let jac = self.jacobian_matrix();
            (0..n)
                .map(|i| (0..n).map(|j| minor(jac, j, i)).collect())
                .collect()
        });
        &minors[i][j]
    }

    /// Divide J_P exactly by every normalized hyperplane form; the quotient
    /// must be a nonzero constant. Exact backends only — numeric groups go
    /// through `jacobian_numeric_check`.
    pub fn jacobian_factorization(&self) -> Result<JacobianFactorization, ChevalleyError> {
        if !self.exact() {
            return Err(ChevalleyError::NumericBackend);
        }
        let mut q = self.jacobian_determinant();
        let mut factors = Vec::new();
        for r in self.group.reflections() {
            let form = r.form_poly();
            q = q.divide_exact(&form).map_err(|e| {
                ChevalleyError::FactorizationFailure(format!(
                    "hyperplane {} does not divide the Jacobian: {e}",
                    r.hyperplane_id
                ))
            })?;
            factors.push(form);
        }
        match q.is_homogeneous() {
            Some(0) => {}
            _ => {
                return Err(ChevalleyError::FactorizationFailure(format!(
                    "quotient after all hyperplane divisions has degree {:?}",
                    q.degree()
                )))
            }
        }
        let c = q.constant_term();
        if c.is_zero() {
            return Err(ChevalleyError::FactorizationFailure(
                "constant factor is zero".into(),
            ));
        }
        Ok(JacobianFactorization { c, factors })
    }

    /// |J(x) − c·∏λ(x)| at random unit-scale points, c fitted at the first
    /// regular point.
    pub fn jacobian_numeric_check(
        &self,
        points: usize,
        tolerance: f64,
        seed: u64,
    ) -> NumericJacobianReport {
        let mut rng = SplitMix64::new(seed).fork(0x9ac0);
        let n = self.dim();
        let jac = self.jacobian_determinant();
        let forms: Vec<&[FieldElem]> = self
            .group
            .reflections()
            .iter()
            .map(|r| r.lambda.as_slice())
            .collect();
        let prod_at = |x: &[f64]| -> f64 {
            forms
                .iter()
                .map(|f| f.iter().zip(x).map(|(c, xi)| c.to_f64() * xi).sum::<f64>())
                .product()
        };
        let mut c = 0.0;
        let mut max_err: f64 = 0.0;
        let mut sampled = 0;
        while sampled < points {
            let x: Vec<f64> = (0..n).map(|_| 2.0 * rng.unit_f64() - 1.0).collect();
            let pl = prod_at(&x);
            if c == 0.0 {
                if pl.abs() < 1e-3 {
                    continue; // need a clearly regular point to fit c
                }
                c = jac.evaluate_f64(&x) / pl;
            }
            let err = (jac.evaluate_f64(&x) - c * pl).abs();
            max_err = max_err.max(err);
            sampled += 1;
        }
        NumericJacobianReport {
            c,
            points: sampled,
            max_abs_error: max_err,
            tolerance,
            pass: max_err <= tolerance,
        }
    }

    /// Express an invariant exactly as F(p₁,…,pₙ), one graded linear solve
    /// per homogeneous degree. The solution must exist and be unique.
    pub fn rewrite_invariant(&self, f: &SparsePoly) -> Result<RewriteResult, ChevalleyError> {
        assert_eq!(f.nvars(), self.dim());
        if !self.group.is_invariant(f) {
            return Err(ChevalleyError::NotInvariant);
        }
        let n = self.p.len();
        let tag = f.field().join(self.p[0].field())?;
        let mut target = SparsePoly::zero(n, tag);
        for (r, fr) in f.homogeneous_components() {
            let monos = weighted_monomials(&self.degrees, r);
            if monos.is_empty() {
                return Err(ChevalleyError::RewriteInconsistent(format!(
                    "no basis monomials of weighted degree {r}"
                )));
            }
            let columns: Vec<SparsePoly> = monos.iter().map(|m| self.basis_monomial(m)).collect();
            // row space: every x-monomial appearing in any column or in f_r
            let mut row_index: BTreeMap<Monomial, usize> = BTreeMap::new();
            for col in columns.iter().chain(std::iter::once(&fr)) {
                for (m, _) in col.terms() {
                    let next = row_index.len();
                    row_index.entry(m.clone()).or_insert(next);
                }
            }
            let rows = row_index.len();
            let mut a = Matrix::zero(rows, monos.len(), tag);
            for (j, col) in columns.iter().enumerate() {
                for (m, c) in col.terms() {
                    *a.get_mut(row_index[m], j) = c.promote(tag);
                }
            }
            let mut b = vec![FieldElem::zero(tag); rows];
            for (m, c) in fr.terms() {
                b[row_index[m]] = c.promote(tag);
            }
            let Some((solution, free)) = a.solve(&b) else {
                return Err(ChevalleyError::RewriteInconsistent(format!(
                    "inconsistent system at degree {r}"
                )));
            };
            if free > 0 {
                return Err(ChevalleyError::RewriteInconsistent(format!(
                    "underdetermined system at degree {r}: {free} free unknowns"
                )));
            }
            for (m, c) in monos.iter().zip(solution) {
                target.add_term(Monomial(m.clone()), c);
            }
        }
        let weighted_degree = target
            .terms()
            .map(|(m, _)| {
                m.0.iter()
                    .zip(&self.degrees)
                    .map(|(&e, &k)| e as u32 * k)
                    .sum()
            })
            .max()
            .unwrap_or(0);
        Ok(RewriteResult {
            target,
            weighted_degree,
        })
    }

    /// Discriminant Δ in the target variables: Δ∘P = J_P² exactly.
    pub fn discriminant(&self) -> Result<SparsePoly, ChevalleyError> {
        if !self.exact() {
            return Err(ChevalleyError::NumericBackend);
        }
        let j = self.jacobian_determinant();
        let j2 = j.try_mul(&j)?;
        Ok(self.rewrite_invariant(&j2)?.target)
    }

    /// Cramer solution of the gradient system: gⱼ = RHSⱼ / (c·∏λ) with
    /// RHSⱼ = Σᵢ (−1)^{i+j} M_{i,j} ∂f/∂zᵢ. Every hyperplane form must
    /// divide RHSⱼ exactly; gⱼ equals (∂F/∂uⱼ)∘P for the rewritten F.
    pub fn gradient_system(&self, f: &SparsePoly) -> Result<Vec<SparsePoly>, ChevalleyError> {
        if !self.exact() {
            return Err(ChevalleyError::NumericBackend);
        }
        if !self.group.is_invariant(f) {
            return Err(ChevalleyError::NotInvariant);
        }
        let n = self.dim();
        let factorization = self.jacobian_factorization()?;
        let partials: Vec<SparsePoly> = (0..n).map(|i| f.differentiate(i)).collect();
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let tag = f.field().join(self.p[0].field())?;
            let mut rhs = SparsePoly::zero(n, tag);
            for i in 0..n {
                let piece = self.jacobian_minor(i, j).try_mul(&partials[i])?;
                rhs = if (i + j) % 2 == 0 {
                    rhs.try_add(&piece)?
                } else {
                    rhs.try_sub(&piece)?
                };
            }
            for form in &factorization.factors {
                rhs = rhs
                    .divide_exact(form)
                    .map_err(|_| ChevalleyError::DivisibilityFailure { component: j })?;
            }
            out.push(rhs.scale(&factorization.c.inverse()));
        }
        Ok(out)
    }

    /// (same P value, same orbit) for a pair of points. The two agree on
    /// every input because P separates orbits.
    pub fn orbit_separation_check(
        &self,
        x: &[FieldElem],
        y: &[FieldElem],
    ) -> Result<(bool, bool), ChevalleyError> {
        let px = self.evaluate(x)?;
        let py = self.evaluate(y)?;
        let tol = if self.exact() { 0.0 } else { NUMERIC_TOL };
        let same_p = px.iter().zip(&py).all(|(a, b)| a.approx_eq(b, tol));
        let orbit = self.group.orbit(x)?;
        let same_orbit = orbit
            .iter()
            .any(|z| z.iter().zip(y).all(|(a, b)| a.approx_eq(b, NUMERIC_TOL)));
        Ok((same_p, same_orbit))
    }

    /// Invariant weight Σ mᵢkᵢ of a derivative multi-index in the target
    /// variables; it governs which ∂^{|m|}F/∂p^m stay continuous.
    pub fn weighted_derivative_order(&self, m: &[u16]) -> u32 {
        assert_eq!(m.len(), self.degrees.len());
        m.iter()
            .zip(&self.degrees)
            .map(|(&e, &k)| e as u32 * k)
            .sum()
    }

    /// The invariant the differentiability-loss probe raises to a fractional
    /// power: homogeneous of even degree h and positive away from the origin.
    /// For families whose basis already ends in an even power sum this is pₙ;
    /// I₂(2m) substitutes the unit-normal power sum over the mirrors.
    pub fn probe_invariant(&self) -> Result<SparsePoly, ChevalleyError> {
        let spec = self.group.spec();
        let err = || ChevalleyError::UnsupportedGroupForProbe(spec.to_string());
        if !self.h.is_multiple_of(2) {
            return Err(err());
        }
        match spec.family {
            Family::A | Family::B | Family::D | Family::H3 => {
                Ok(self.p.last().expect("nonempty basis").clone())
            }
            Family::I2 => {
                // Σ_τ λ_τ^k / |λ_τ|^k stays inside the group's field for even k
                let k = spec.bond;
                let n = self.dim();
                let tag = self.group.field();
                let mut acc = SparsePoly::zero(n, tag);
                for r in self.group.reflections() {
                    let norm2 = r
                        .lambda
                        .iter()
                        .fold(FieldElem::zero(tag), |a, c| a.add(&c.mul(c)));
                    let scale = norm2.pow(k / 2).inverse();
                    acc = acc.try_add(&r.form_poly().pow(k).scale(&scale))?;
                }
                Ok(acc)
            }
        }
    }
}

#[cfg(test)]
mod tests;
