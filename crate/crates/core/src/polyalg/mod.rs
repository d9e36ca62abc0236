//! Exact sparse multivariate polynomial arithmetic over ℚ and ℚ(√d),
//! with a numeric mirror, plus the linear algebra and flat machinery
//! built on top of it.

pub mod field;
pub mod flat;
pub mod json;
pub mod matrix;
pub mod poly;
pub mod polymat;

pub use field::{FieldElem, FieldTag, QuadElem};
pub use flat::{vanishing_order, Flat, VanishingOrder};
pub use matrix::Matrix;
pub use poly::{Degree, Monomial, SparsePoly};
pub use polymat::{determinant, determinant_bareiss, minor, PolyMatrix};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: FieldTag, right: FieldTag },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("not divisible; remainder has {} terms", remainder.num_terms())]
    NotDivisible { remainder: Box<SparsePoly> },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Binary operation selector for the generic arithmetic entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked polynomial arithmetic: validates arity and field compatibility.
pub fn arith(f: &SparsePoly, g: &SparsePoly, op: ArithOp) -> Result<SparsePoly, PolyError> {
    match op {
        ArithOp::Add => f.try_add(g),
        ArithOp::Sub => f.try_sub(g),
        ArithOp::Mul => f.try_mul(g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arith_dispatches_and_checks_fields() {
        let x = SparsePoly::var(2, 0, FieldTag::Rational);
        let y = SparsePoly::var(2, 1, FieldTag::Rational);
        let sum = arith(&x, &y, ArithOp::Add).unwrap();
        let diff = arith(&sum, &y, ArithOp::Sub).unwrap();
        assert_eq!(diff, x);
        let prod = arith(&x, &y, ArithOp::Mul).unwrap();
        assert_eq!(prod.degree(), Degree::Finite(2));
        let q3 = SparsePoly::constant(2, FieldElem::quad((1, 1), (1, 1), 3));
        let q5 = SparsePoly::constant(2, FieldElem::quad((1, 1), (1, 1), 5));
        assert!(matches!(
            arith(&q3, &q5, ArithOp::Add),
            Err(PolyError::FieldMismatch { .. })
        ));
    }
}
