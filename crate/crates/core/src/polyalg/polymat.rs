//! Determinants and minors of square matrices of polynomials.
//!
//! Two independent routes are provided: cofactor expansion and the
//! fraction-free Bareiss elimination. They must agree exactly, which the
//! property suite checks.

use super::field::{FieldElem, FieldTag};
use super::poly::SparsePoly;
use super::PolyError;

/// Square polynomial matrix as rows.
pub type PolyMatrix = Vec<Vec<SparsePoly>>;

fn shape(m: &PolyMatrix) -> (usize, usize, FieldTag) {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    let nvars = m
        .first()
        .and_then(|r| r.first())
        .map(|p| p.nvars())
        .unwrap_or(0);
    let mut tag = FieldTag::Rational;
    for row in m {
        for p in row {
            tag = tag.join(p.field()).expect("mixed fields in matrix");
        }
    }
    (n, nvars, tag)
}

/// Determinant by cofactor expansion along the first column.
pub fn determinant(m: &PolyMatrix) -> SparsePoly {
    let (n, nvars, tag) = shape(m);
    if n == 0 {
        return SparsePoly::constant(nvars, FieldElem::one(tag));
    }
    det_cofactor(m, &(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>())
}

fn det_cofactor(m: &PolyMatrix, rows: &[usize], cols: &[usize]) -> SparsePoly {
    let (_, nvars, tag) = shape(m);
    let n = rows.len();
    if n == 0 {
        return SparsePoly::constant(nvars, FieldElem::one(tag));
    }
    if n == 1 {
        return m[rows[0]][cols[0]].clone();
    }
    let mut acc = SparsePoly::zero(nvars, tag);
    for (k, &r) in rows.iter().enumerate() {
        let entry = &m[r][cols[0]];
        if entry.is_zero() {
            continue;
        }
        let sub_rows: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
        let minor = det_cofactor(m, &sub_rows, &cols[1..]);
        let term = entry.try_mul(&minor).expect("det arity");
        acc = if k % 2 == 0 {
            acc.try_add(&term).expect("det arity")
        } else {
            acc.try_sub(&term).expect("det arity")
        };
    }
    acc
}

/// Determinant by one-step fraction-free (Bareiss) elimination. Every
/// division is exact; a failed division signals corrupted input.
pub fn determinant_bareiss(m: &PolyMatrix) -> Result<SparsePoly, PolyError> {
    let (n, nvars, tag) = shape(m);
    if n == 0 {
        return Ok(SparsePoly::constant(nvars, FieldElem::one(tag)));
    }
    let mut a: PolyMatrix = m
        .iter()
        .map(|row| row.iter().map(|p| p.promote(tag)).collect())
        .collect();
    let mut sign = false;
    let mut prev = SparsePoly::constant(nvars, FieldElem::one(tag));
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            // swap in a row with a nonzero pivot
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(SparsePoly::zero(nvars, tag));
            };
            a.swap(k, swap);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j]
                    .try_mul(&a[k][k])?
                    .try_sub(&a[i][k].try_mul(&a[k][j])?)?;
                a[i][j] = num.divide_exact(&prev)?;
            }
        }
        for i in k + 1..n {
            a[i][k] = SparsePoly::zero(nvars, tag);
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign { det.neg() } else { det })
}

/// Determinant of the matrix with row `row` and column `col` deleted.
pub fn minor(m: &PolyMatrix, row: usize, col: usize) -> SparsePoly {
    let (n, _, _) = shape(m);
    assert!(row < n && col < n);
    let rows: Vec<usize> = (0..n).filter(|&r| r != row).collect();
    let cols: Vec<usize> = (0..n).filter(|&c| c != col).collect();
    det_cofactor(m, &rows, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::field::FieldTag;

    fn x(n: usize, i: usize) -> SparsePoly {
        SparsePoly::var(n, i, FieldTag::Rational)
    }

    fn c(v: i64, n: usize) -> SparsePoly {
        SparsePoly::constant(n, FieldElem::from_integer(v))
    }

    fn b2_jacobian() -> PolyMatrix {
        // [[2x, 2y], [4x³, 4y³]]
        vec![
            vec![
                c(2, 2).try_mul(&x(2, 0)).unwrap(),
                c(2, 2).try_mul(&x(2, 1)).unwrap(),
            ],
            vec![
                c(4, 2).try_mul(&x(2, 0).pow(3)).unwrap(),
                c(4, 2).try_mul(&x(2, 1).pow(3)).unwrap(),
            ],
        ]
    }

    #[test]
    fn det_of_jacobian() {
        // 2x·4y³ − 2y·4x³ = 8xy³ − 8x³y
        let d = determinant(&b2_jacobian());
        let want = c(8, 2)
            .try_mul(&x(2, 0))
            .unwrap()
            .try_mul(&x(2, 1).pow(3))
            .unwrap()
            .try_sub(
                &c(8, 2)
                    .try_mul(&x(2, 0).pow(3))
                    .unwrap()
                    .try_mul(&x(2, 1))
                    .unwrap(),
            )
            .unwrap();
        assert_eq!(d, want);
        assert_eq!(determinant_bareiss(&b2_jacobian()).unwrap(), want);
    }

    #[test]
    fn det_of_constant_identity() {
        let id: PolyMatrix = vec![vec![c(1, 1), c(0, 1)], vec![c(0, 1), c(1, 1)]];
        assert_eq!(determinant(&id), c(1, 1));
    }

    #[test]
    fn minor_is_single_entry() {
        // deleting row 1 (0-based) and col 0 of the Jacobian leaves [2y]
        let m = minor(&b2_jacobian(), 1, 0);
        assert_eq!(m, c(2, 2).try_mul(&x(2, 1)).unwrap());
    }
}
