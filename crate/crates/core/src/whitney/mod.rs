//! Finite-sample jet machinery: Taylor fields of polynomials over a point
//! set, Whitney remainders, the jet seminorm, and log-log regularity fits.

mod faa;
mod lemmas;
mod probe;

pub use faa::{faa_di_bruno, faa_di_bruno_univariate, restrict_to_ray};
pub use lemmas::{
    lemma1_product_check, lemma2_division_check, Lemma1Options, Lemma1Report, Lemma2Report,
};
pub use probe::{counterexample_probe, OrderFit, ProbeConfig, ProbeReport, SlopeVerdict};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chevalley::ChevalleyError;
use crate::polyalg::{FieldElem, FieldTag, Monomial, PolyError, SparsePoly};

#[derive(Debug, Error)]
pub enum WhitneyError {
    #[error("point is not in the field's sample set")]
    PointNotInField,
    #[error("seminorm over an empty compact")]
    EmptyCompact,
    #[error("invalid sampling plan: {0}")]
    InvalidSamplingPlan(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("fractional power of a nonpositive base")]
    NonpositiveBase,
    #[error("the probed invariant degenerates along the chosen ray")]
    RayOnMirror,
    #[error("polynomial is only {order}-fold vanishing on the flat; need {required}")]
    InsufficientFlatness { order: String, required: u32 },
    #[error(transparent)]
    Chevalley(#[from] ChevalleyError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// All exponent multi-indices with |k| ≤ max, in graded-lex order.
pub fn multi_indices(nvars: usize, max_total: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u16; nvars];
    fn rec(nvars: usize, pos: usize, left: u32, current: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if pos == nvars {
            out.push(Monomial(current.clone()));
            return;
        }
        for e in 0..=left {
            current[pos] = e as u16;
            rec(nvars, pos + 1, left - e, current, out);
        }
        current[pos] = 0;
    }
    rec(nvars, 0, max_total, &mut current, &mut out);
    out.sort();
    out
}

fn factorial_u(n: u64) -> u64 {
    (1..=n).product::<u64>().max(1)
}

/// k! for a multi-index.
pub fn multi_factorial(k: &[u16]) -> u64 {
    k.iter().map(|&e| factorial_u(e as u64)).product()
}

/// An order-m jet over a finite sample set: per point, one coefficient
/// a_k(x) per multi-index |k| ≤ m. For Taylor fields a_k(x) = D^k f(x), so
/// the induced polynomial at x is Σ a_k(x)(X−x)^k / k!.
#[derive(Debug, Clone)]
pub struct JetField {
    nvars: usize,
    order: u32,
    points: Vec<Vec<FieldElem>>,
    coeffs: Vec<BTreeMap<Monomial, FieldElem>>,
}

impl JetField {
    /// Taylor field of a polynomial: a_k(x) = D^k f(x), exactly.
    pub fn taylor(
        f: &SparsePoly,
        points: &[Vec<FieldElem>],
        order: u32,
    ) -> Result<Self, WhitneyError> {
        let nvars = f.nvars();
        let idxs = multi_indices(nvars, order);
        // iterated derivative cache keyed by multi-index
        let mut derivs: BTreeMap<Monomial, SparsePoly> = BTreeMap::new();
        derivs.insert(Monomial::constant(nvars), f.clone());
        for k in &idxs {
            if derivs.contains_key(k) {
                continue;
            }
            let var = k.0.iter().position(|&e| e > 0).expect("nonconstant index");
            let mut prev = k.0.clone();
            prev[var] -= 1;
            let next = derivs[&Monomial(prev)].differentiate(var);
            derivs.insert(k.clone(), next);
        }
        let mut coeffs = Vec::with_capacity(points.len());
        for x in points {
            let mut per_point = BTreeMap::new();
            for k in &idxs {
                let v = derivs[k].evaluate(x)?;
                per_point.insert(k.clone(), v);
            }
            coeffs.push(per_point);
        }
        Ok(JetField {
            nvars,
            order,
            points: points.to_vec(),
            coeffs,
        })
    }

    /// A jet from explicit coefficient data (not necessarily polynomial).
    /// Missing indices count as zero coefficients.
    pub fn from_data(
        nvars: usize,
        order: u32,
        points: Vec<Vec<FieldElem>>,
        coeffs: Vec<BTreeMap<Monomial, FieldElem>>,
    ) -> Self {
        assert_eq!(points.len(), coeffs.len());
        for per_point in &coeffs {
            for k in per_point.keys() {
                assert_eq!(k.0.len(), nvars);
                assert!(k.total_degree() <= order, "coefficient beyond jet order");
            }
        }
        JetField {
            nvars,
            order,
            points,
            coeffs,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn points(&self) -> &[Vec<FieldElem>] {
        &self.points
    }

    pub fn coeff(&self, point: usize, k: &Monomial) -> FieldElem {
        self.coeffs[point]
            .get(k)
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(FieldTag::Rational))
    }

    pub fn find_point(&self, x: &[FieldElem]) -> Result<usize, WhitneyError> {
        self.points
            .iter()
            .position(|p| p.iter().zip(x).all(|(a, b)| a.approx_eq(b, 1e-12)))
            .ok_or(WhitneyError::PointNotInField)
    }

    /// (D^q A)_x evaluated at y: Σ_{k ≥ q, |k| ≤ m} a_k(x)·(y−x)^{k−q}/(k−q)!.
    pub fn formal_derivative_at(&self, point: usize, q: &Monomial, y: &[FieldElem]) -> FieldElem {
        let x = &self.points[point];
        let mut acc = FieldElem::zero(FieldTag::Rational);
        for (k, a) in &self.coeffs[point] {
            let Some(diff) = k.checked_div(q) else {
                continue;
            };
            let mut term = a.clone();
            for (i, &e) in diff.0.iter().enumerate() {
                if e > 0 {
                    let dx = y[i].sub(&x[i]);
                    term = term.mul(&dx.pow(e as u32));
                }
            }
            let fact = FieldElem::from_integer(multi_factorial(&diff.0) as i64);
            acc = acc.add(&term.div(&fact));
        }
        acc
    }

    /// Whitney remainder (R_x A)^q(x') = (D^qA)_{x'}(x') − (D^qA)_x(x').
    pub fn remainder_by_index(
        &self,
        x: usize,
        x_prime: usize,
        q: &Monomial,
    ) -> Result<FieldElem, WhitneyError> {
        if q.total_degree() > self.order {
            return Err(WhitneyError::InvalidSamplingPlan(format!(
                "derivative order {} exceeds the jet order {}",
                q.total_degree(),
                self.order
            )));
        }
        let y = self.points[x_prime].clone();
        let lead = self.coeff(x_prime, q);
        let tail = self.formal_derivative_at(x, q, &y);
        Ok(lead.sub(&tail))
    }

    pub fn remainder(
        &self,
        x: &[FieldElem],
        x_prime: &[FieldElem],
        q: &Monomial,
    ) -> Result<FieldElem, WhitneyError> {
        let i = self.find_point(x)?;
        let j = self.find_point(x_prime)?;
        self.remainder_by_index(i, j, q)
    }

    fn distance(&self, i: usize, j: usize) -> f64 {
        self.points[i]
            .iter()
            .zip(&self.points[j])
            .map(|(a, b)| {
                let d = a.to_f64() - b.to_f64();
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// The jet seminorm over a compact K ⊆ E:
    /// sup |a_k/k!| over K, |k| ≤ m, plus sup |R^q| / |x−x'|^{r−|q|} over
    /// distinct pairs and |q| ≤ r.
    pub fn seminorm(&self, k_indices: &[usize], r: u32) -> Result<f64, WhitneyError> {
        if k_indices.is_empty() {
            return Err(WhitneyError::EmptyCompact);
        }
        assert!(r <= self.order, "seminorm needs r ≤ jet order");
        let mut coeff_sup = 0.0f64;
        for &i in k_indices {
            for (k, a) in &self.coeffs[i] {
                let v = a.to_f64().abs() / multi_factorial(&k.0) as f64;
                coeff_sup = coeff_sup.max(v);
            }
        }
        let qs = multi_indices(self.nvars, r);
        let mut rem_sup = 0.0f64;
        for &i in k_indices {
            for &j in k_indices {
                if i == j {
                    continue;
                }
                let dist = self.distance(i, j);
                if dist == 0.0 {
                    continue;
                }
                for q in &qs {
                    let rem = self.remainder_by_index(i, j, q)?.to_f64().abs();
                    let denom = dist.powi((r - q.total_degree()) as i32);
                    rem_sup = rem_sup.max(rem / denom);
                }
            }
        }
        Ok(coeff_sup + rem_sup)
    }
}

/// One sampled Whitney remainder: (R_x A)^q(x′) together with the pair
/// separation it is measured against.
#[derive(Debug, Clone)]
pub struct RemainderSample {
    pub q: Monomial,
    pub x: Vec<FieldElem>,
    pub x_prime: Vec<FieldElem>,
    pub value: FieldElem,
    pub separation: f64,
}

/// Evaluate the remainder over a sampling plan of point-index pairs.
pub fn remainder_samples(
    field: &JetField,
    pairs: &[(usize, usize)],
    q: &Monomial,
) -> Result<Vec<RemainderSample>, WhitneyError> {
    pairs
        .iter()
        .map(|&(i, j)| {
            Ok(RemainderSample {
                q: q.clone(),
                x: field.points()[i].clone(),
                x_prime: field.points()[j].clone(),
                value: field.remainder_by_index(i, j, q)?,
                separation: field.distance(i, j),
            })
        })
        .collect()
}

/// A fitted regularity exponent, or the all-zero-remainder sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularityExponent {
    /// Every sampled remainder was exactly zero.
    Infinite,
    Fit {
        slope: f64,
        residual: f64,
    },
}

/// Least-squares slope of log|remainder| against log separation over a
/// sampling plan of point-index pairs.
pub fn regularity_exponent(
    field: &JetField,
    pairs: &[(usize, usize)],
    q: &Monomial,
) -> Result<RegularityExponent, WhitneyError> {
    if pairs.len() < 10 {
        return Err(WhitneyError::InvalidSamplingPlan(format!(
            "need at least 10 pairs, got {}",
            pairs.len()
        )));
    }
    let samples = remainder_samples(field, pairs, q)?;
    let max = samples.iter().map(|s| s.separation).fold(0.0f64, f64::max);
    let min = samples
        .iter()
        .map(|s| s.separation)
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() || min <= 0.0 || (max / min).log10() < 2.0 - 1e-9 {
        return Err(WhitneyError::InvalidSamplingPlan(
            "separations must span at least two decades".into(),
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for sample in &samples {
        let rem = sample.value.to_f64().abs();
        if rem > 0.0 {
            xs.push(sample.separation.ln());
            ys.push(rem.ln());
        }
    }
    if xs.is_empty() {
        return Ok(RegularityExponent::Infinite);
    }
    if xs.len() < 10 {
        return Err(WhitneyError::DegenerateFit(format!(
            "only {} nonzero remainders out of {} pairs",
            xs.len(),
            pairs.len()
        )));
    }
    let (slope, residual) = least_squares_slope(&xs, &ys);
    Ok(RegularityExponent::Fit { slope, residual })
}

/// OLS slope with RMS residual.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    (slope, (rss / n).sqrt())
}
