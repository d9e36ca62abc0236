//! JSON wire format for polynomials and points.
//!
//! Format: `{"nvars": n, "terms": [{"exp": [e₁,…,eₙ], "coef": C}]}` where a
//! coefficient C is a rational string "p/q", an object
//! `{"a": "p/q", "b": "p/q", "d": 5}` for a + b√d, or a bare float.
//! Terms are written in graded-lex order; readers accept any order.

use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::field::{FieldElem, FieldTag, QuadElem};
use super::poly::SparsePoly;
use super::PolyError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefJson {
    Rational(String),
    Quad { a: String, b: String, d: u32 },
    Float(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u16>,
    pub coef: CoefJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyJson {
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

impl CoefJson {
    pub fn to_elem(&self) -> Result<FieldElem, PolyError> {
        match self {
            CoefJson::Rational(s) => FieldElem::from_str(s),
            CoefJson::Quad { a, b, d } => {
                let pa = BigRational::from_str(a)
                    .map_err(|_| PolyError::Parse(format!("bad rational: {a:?}")))?;
                let pb = BigRational::from_str(b)
                    .map_err(|_| PolyError::Parse(format!("bad rational: {b:?}")))?;
                if !super::field::is_valid_quad_d(*d) {
                    return Err(PolyError::Parse(format!("d = {d} is not square-free")));
                }
                Ok(FieldElem::Quad(QuadElem::new(pa, pb, *d)))
            }
            CoefJson::Float(x) => Ok(FieldElem::Numeric(*x)),
        }
    }

    pub fn from_elem(e: &FieldElem) -> CoefJson {
        match e {
            FieldElem::Rational(r) => CoefJson::Rational(r.to_string()),
            FieldElem::Quad(q) => CoefJson::Quad {
                a: q.a.to_string(),
                b: q.b.to_string(),
                d: q.d,
            },
            FieldElem::Numeric(x) => CoefJson::Float(*x),
        }
    }
}

impl PolyJson {
    pub fn from_poly(p: &SparsePoly) -> PolyJson {
        PolyJson {
            nvars: p.nvars(),
            terms: p
                .terms()
                .map(|(m, c)| TermJson {
                    exp: m.0.clone(),
                    coef: CoefJson::from_elem(c),
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<SparsePoly, PolyError> {
        let mut tag = FieldTag::Rational;
        let mut parsed = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.exp.len() != self.nvars {
                return Err(PolyError::ArityMismatch {
                    expected: self.nvars,
                    got: t.exp.len(),
                });
            }
            let c = t.coef.to_elem()?;
            tag = tag.join(c.tag())?;
            parsed.push((t.exp.clone(), c));
        }
        Ok(SparsePoly::from_terms(self.nvars, tag, parsed))
    }
}

pub fn poly_to_json_string(p: &SparsePoly) -> String {
    serde_json::to_string(&PolyJson::from_poly(p)).expect("poly serialization")
}

pub fn poly_from_json_str(s: &str) -> Result<SparsePoly, PolyError> {
    let pj: PolyJson = serde_json::from_str(s)
        .map_err(|e| PolyError::Parse(format!("bad polynomial JSON: {e}")))?;
    pj.to_poly()
}

/// Point list format: `{"points": [[C, …], …]}` with the same coefficient
/// encodings as polynomials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointsJson {
    pub points: Vec<Vec<CoefJson>>,
}

impl PointsJson {
    pub fn to_points(&self) -> Result<Vec<Vec<FieldElem>>, PolyError> {
        self.points
            .iter()
            .map(|p| p.iter().map(|c| c.to_elem()).collect())
            .collect()
    }

    pub fn from_points(pts: &[Vec<FieldElem>]) -> PointsJson {
        PointsJson {
            points: pts
                .iter()
                .map(|p| p.iter().map(CoefJson::from_elem).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_rational_poly() {
        let p = SparsePoly::from_terms(
            2,
            FieldTag::Rational,
            vec![
                (vec![2, 0], FieldElem::from_integer(1)),
                (vec![0, 2], FieldElem::from_ratio(-3, 4)),
            ],
        );
        let s = poly_to_json_string(&p);
        let q = poly_from_json_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn roundtrip_quad_poly() {
        let p = SparsePoly::from_terms(
            1,
            FieldTag::QuadExt(5),
            vec![(vec![1], FieldElem::quad((1, 2), (3, 1), 5))],
        );
        let s = poly_to_json_string(&p);
        let q = poly_from_json_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn readers_accept_any_term_order() {
        let s = r#"{"nvars":1,"terms":[{"exp":[3],"coef":"1"},{"exp":[0],"coef":"2"}]}"#;
        let p = poly_from_json_str(s).unwrap();
        let exps: Vec<u32> = p.terms().map(|(m, _)| m.total_degree()).collect();
        assert_eq!(exps, vec![0, 3]); // canonical graded-lex order after parse
    }

    #[test]
    fn rejects_mixed_quadratic_fields() {
        let s = r#"{"nvars":1,"terms":[
            {"exp":[1],"coef":{"a":"1","b":"1","d":3}},
            {"exp":[0],"coef":{"a":"1","b":"1","d":5}}]}"#;
        assert!(poly_from_json_str(s).is_err());
    }
}
