//! Coefficient fields: exact rationals, real quadratic extensions ℚ(√d),
//! and a binary64 backend for groups without a usable exact model.
//!
//! Rationals embed into any ℚ(√d), and both embed into the numeric backend.
//! Mixing two distinct quadratic extensions is an error.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PolyError;

/// Identifies which field a value (or a polynomial's coefficients) lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldTag {
    Rational,
    /// ℚ(√d) for a square-free d ≥ 2.
    QuadExt(u32),
    Numeric,
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rational => write!(f, "rational"),
            FieldTag::QuadExt(d) => write!(f, "quadext({d})"),
            FieldTag::Numeric => write!(f, "numeric"),
        }
    }
}

impl FieldTag {
    /// Least common field containing both operands, if one exists.
    pub fn join(self, other: FieldTag) -> Result<FieldTag, PolyError> {
        use FieldTag::*;
        match (self, other) {
            (a, b) if a == b => Ok(a),
            (Rational, QuadExt(d)) | (QuadExt(d), Rational) => Ok(QuadExt(d)),
            (Numeric, _) | (_, Numeric) => Ok(Numeric),
            (QuadExt(a), QuadExt(b)) => Err(PolyError::FieldMismatch {
                left: QuadExt(a),
                right: QuadExt(b),
            }),
            _ => unreachable!(),
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, FieldTag::Numeric)
    }
}

/// Element a + b√d of ℚ(√d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadElem {
    pub a: BigRational,
    pub b: BigRational,
    pub d: u32,
}

impl QuadElem {
    pub fn new(a: BigRational, b: BigRational, d: u32) -> Self {
        debug_assert!(is_valid_quad_d(d), "d must be square-free and >= 2");
        QuadElem { a, b, d }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Field inverse via the conjugate: 1/(a+b√d) = (a−b√d)/(a²−b²d).
    /// The norm a²−b²d vanishes only at zero because d is not a square.
    pub fn inverse(&self) -> QuadElem {
        let d_rat = BigRational::from_integer(BigInt::from(self.d));
        let norm = &self.a * &self.a - &self.b * &self.b * &d_rat;
        assert!(!norm.is_zero(), "inverse of zero in QuadExt");
        QuadElem::new(&self.a / &norm, -(&self.b / &norm), self.d)
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// Exact sign of a + b√d, using a² vs b²d when the parts disagree.
    pub fn sign(&self) -> i8 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        let d_rat = BigRational::from_integer(BigInt::from(self.d));
        let cmp = (&self.a * &self.a).cmp(&(&self.b * &self.b * d_rat));
        match cmp {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            // a² = b²d with a, b ≠ 0 is impossible for non-square d
            Ordering::Equal => unreachable!("quadratic norm collision"),
        }
    }
}

fn rational_sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// d is admissible for ℚ(√d): at least 2 and square-free.
pub fn is_valid_quad_d(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut m = d;
    let mut p = 2u32;
    while p * p <= m {
        if m.is_multiple_of(p * p) {
            return false;
        }
        while m.is_multiple_of(p) {
            m /= p;
        }
        p += 1;
    }
    true
}

/// A scalar from one of the supported coefficient fields.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldElem {
    Rational(BigRational),
    Quad(QuadElem),
    Numeric(f64),
}

impl FieldElem {
    pub fn zero(tag: FieldTag) -> FieldElem {
        match tag {
            FieldTag::Rational => FieldElem::Rational(BigRational::zero()),
            FieldTag::QuadExt(d) => {
                FieldElem::Quad(QuadElem::new(BigRational::zero(), BigRational::zero(), d))
            }
            FieldTag::Numeric => FieldElem::Numeric(0.0),
        }
    }

    pub fn one(tag: FieldTag) -> FieldElem {
        FieldElem::from_integer(1).promote(tag)
    }

    pub fn from_integer(n: i64) -> FieldElem {
        FieldElem::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> FieldElem {
        FieldElem::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// a + b√d from small integers.
    pub fn quad(a: (i64, i64), b: (i64, i64), d: u32) -> FieldElem {
        FieldElem::Quad(QuadElem::new(
            BigRational::new(BigInt::from(a.0), BigInt::from(a.1)),
            BigRational::new(BigInt::from(b.0), BigInt::from(b.1)),
            d,
        ))
    }

    pub fn tag(&self) -> FieldTag {
        match self {
            FieldElem::Rational(_) => FieldTag::Rational,
            FieldElem::Quad(q) => FieldTag::QuadExt(q.d),
            FieldElem::Numeric(_) => FieldTag::Numeric,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rational(r) => r.is_zero(),
            FieldElem::Quad(q) => q.is_zero(),
            FieldElem::Numeric(x) => *x == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rational(r) => r.is_one(),
            FieldElem::Quad(q) => q.a.is_one() && q.b.is_zero(),
            FieldElem::Numeric(x) => *x == 1.0,
        }
    }

    /// Embed into a larger field. Panics on an impossible embedding;
    /// callers are expected to have joined tags first.
    pub fn promote(&self, tag: FieldTag) -> FieldElem {
        match (self, tag) {
            (FieldElem::Rational(r), FieldTag::Rational) => FieldElem::Rational(r.clone()),
            (FieldElem::Rational(r), FieldTag::QuadExt(d)) => {
                FieldElem::Quad(QuadElem::new(r.clone(), BigRational::zero(), d))
            }
            (FieldElem::Quad(q), FieldTag::QuadExt(d)) if q.d == d => FieldElem::Quad(q.clone()),
            (x, FieldTag::Numeric) => FieldElem::Numeric(x.to_f64()),
            (x, t) => panic!("cannot promote {:?} into {}", x.tag(), t),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            FieldElem::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            FieldElem::Quad(q) => q.to_f64(),
            FieldElem::Numeric(x) => *x,
        }
    }

    /// Exact sign for exact fields; f64 sign for the numeric backend.
    pub fn sign(&self) -> i8 {
        match self {
            FieldElem::Rational(r) => rational_sign(r),
            FieldElem::Quad(q) => q.sign(),
            FieldElem::Numeric(x) => {
                if *x == 0.0 {
                    0
                } else if *x > 0.0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn abs(&self) -> FieldElem {
        if self.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    fn binop(
        &self,
        other: &FieldElem,
        rat: impl Fn(&BigRational, &BigRational) -> BigRational,
        quad: impl Fn(&QuadElem, &QuadElem) -> QuadElem,
        num: impl Fn(f64, f64) -> f64,
    ) -> FieldElem {
        let tag = self
            .tag()
            .join(other.tag())
            .unwrap_or_else(|e| panic!("field mismatch in scalar arithmetic: {e}"));
        let a = self.promote(tag);
        let b = other.promote(tag);
        match (a, b) {
            (FieldElem::Rational(x), FieldElem::Rational(y)) => FieldElem::Rational(rat(&x, &y)),
            (FieldElem::Quad(x), FieldElem::Quad(y)) => FieldElem::Quad(quad(&x, &y)),
            (FieldElem::Numeric(x), FieldElem::Numeric(y)) => FieldElem::Numeric(num(x, y)),
            _ => unreachable!(),
        }
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        self.binop(
            other,
            |x, y| x + y,
            |x, y| QuadElem::new(&x.a + &y.a, &x.b + &y.b, x.d),
            |x, y| x + y,
        )
    }

    pub fn sub(&self, other: &FieldElem) -> FieldElem {
        self.binop(
            other,
            |x, y| x - y,
            |x, y| QuadElem::new(&x.a - &y.a, &x.b - &y.b, x.d),
            |x, y| x - y,
        )
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        self.binop(
            other,
            |x, y| x * y,
            |x, y| {
                let d_rat = BigRational::from_integer(BigInt::from(x.d));
                QuadElem::new(
                    &x.a * &y.a + &x.b * &y.b * &d_rat,
                    &x.a * &y.b + &x.b * &y.a,
                    x.d,
                )
            },
            |x, y| x * y,
        )
    }

    pub fn neg(&self) -> FieldElem {
        match self {
            FieldElem::Rational(r) => FieldElem::Rational(-r),
            FieldElem::Quad(q) => FieldElem::Quad(QuadElem::new(-&q.a, -&q.b, q.d)),
            FieldElem::Numeric(x) => FieldElem::Numeric(-x),
        }
    }

    pub fn inverse(&self) -> FieldElem {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            FieldElem::Rational(r) => FieldElem::Rational(r.recip()),
            FieldElem::Quad(q) => FieldElem::Quad(q.inverse()),
            FieldElem::Numeric(x) => FieldElem::Numeric(1.0 / x),
        }
    }

    pub fn div(&self, other: &FieldElem) -> FieldElem {
        self.mul(&other.inverse())
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        let mut acc = FieldElem::one(self.tag());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// |self − other| ≤ tol after embedding into f64. Exact fields compare
    /// exactly, across representations (a rational equals its image in any
    /// quadratic extension).
    pub fn approx_eq(&self, other: &FieldElem, tol: f64) -> bool {
        if self.tag().is_exact() && other.tag().is_exact() {
            return match self.tag().join(other.tag()) {
                Ok(tag) => self.promote(tag) == other.promote(tag),
                Err(_) => false,
            };
        }
        (self.to_f64() - other.to_f64()).abs() <= tol
    }

    /// Total order usable as a dedup key. Structural (not the numeric order
    /// of the underlying reals) but consistent with equality.
    pub fn cmp_total(&self, other: &FieldElem) -> Ordering {
        fn rank(e: &FieldElem) -> u8 {
            match e {
                FieldElem::Rational(_) => 0,
                FieldElem::Quad(_) => 1,
                FieldElem::Numeric(_) => 2,
            }
        }
        match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => a.cmp(b),
            (FieldElem::Quad(a), FieldElem::Quad(b)) => {
                a.d.cmp(&b.d)
                    .then_with(|| a.a.cmp(&b.a))
                    .then_with(|| a.b.cmp(&b.b))
            }
            (FieldElem::Numeric(a), FieldElem::Numeric(b)) => a.total_cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rational(r) => write!(f, "{r}"),
            FieldElem::Quad(q) => write!(f, "{}+{}*sqrt({})", q.a, q.b, q.d),
            FieldElem::Numeric(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for FieldElem {
    type Err = PolyError;

    /// Parses "p/q" or "p" as an exact rational.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BigRational::from_str(s.trim())
            .map(FieldElem::Rational)
            .map_err(|_| PolyError::Parse(format!("bad rational literal: {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_exact() {
        let a = FieldElem::from_ratio(1, 3);
        let b = FieldElem::from_ratio(1, 6);
        assert_eq!(a.add(&b), FieldElem::from_ratio(1, 2));
        assert_eq!(a.sub(&b), FieldElem::from_ratio(1, 6));
        assert_eq!(a.mul(&b), FieldElem::from_ratio(1, 18));
        assert_eq!(a.div(&b), FieldElem::from_integer(2));
    }

    #[test]
    fn quad_inverse_roundtrip() {
        // (1 + 2√5)⁻¹ · (1 + 2√5) = 1
        let x = FieldElem::quad((1, 1), (2, 1), 5);
        let prod = x.mul(&x.inverse());
        assert!(prod.is_one());
    }

    #[test]
    fn quad_sign_is_exact() {
        // 7 − 3√5 ≈ 0.29 > 0, 2 − √5 ≈ −0.24 < 0
        assert_eq!(FieldElem::quad((7, 1), (-3, 1), 5).sign(), 1);
        assert_eq!(FieldElem::quad((2, 1), (-1, 1), 5).sign(), -1);
        assert_eq!(FieldElem::quad((0, 1), (0, 1), 5).sign(), 0);
    }

    #[test]
    fn promotion_lattice() {
        assert_eq!(
            FieldTag::Rational.join(FieldTag::QuadExt(5)).unwrap(),
            FieldTag::QuadExt(5)
        );
        assert_eq!(
            FieldTag::QuadExt(3).join(FieldTag::Numeric).unwrap(),
            FieldTag::Numeric
        );
        assert!(FieldTag::QuadExt(3).join(FieldTag::QuadExt(5)).is_err());
    }

    #[test]
    fn squarefree_check() {
        assert!(is_valid_quad_d(2));
        assert!(is_valid_quad_d(3));
        assert!(is_valid_quad_d(5));
        assert!(!is_valid_quad_d(4));
        assert!(!is_valid_quad_d(12));
        assert!(!is_valid_quad_d(1));
    }
}
