//! Dense matrices over `FieldElem` with the exact linear algebra the rest
//! of the crate needs: products, rank, null spaces, solving, inversion.

use std::cmp::Ordering;

use super::field::{FieldElem, FieldTag};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<FieldElem>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix::new(r, c, data)
    }

    pub fn zero(rows: usize, cols: usize, tag: FieldTag) -> Self {
        Matrix::new(rows, cols, vec![FieldElem::zero(tag); rows * cols])
    }

    pub fn identity(n: usize, tag: FieldTag) -> Self {
        let mut m = Matrix::zero(n, n, tag);
        for i in 0..n {
            *m.get_mut(i, i) = FieldElem::one(tag);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElem {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut FieldElem {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn tag(&self) -> FieldTag {
        self.data.iter().fold(FieldTag::Rational, |t, x| {
            t.join(x.tag()).expect("mixed fields in matrix")
        })
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.cols, self.rows, FieldTag::Rational);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.get_mut(j, i) = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let tag = self.tag().join(other.tag()).expect("matrix product fields");
        let mut out = Matrix::zero(self.rows, other.cols, tag);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = FieldElem::zero(tag);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                *out.get_mut(i, j) = acc;
            }
        }
        out
    }

    pub fn apply(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = FieldElem::zero(self.tag());
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { 1.0 } else { 0.0 };
                let x = self.get(i, j);
                if x.tag().is_exact() {
                    let ok = if i == j { x.is_one() } else { x.is_zero() };
                    if !ok {
                        return false;
                    }
                } else if (x.to_f64() - want).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        self.data
            .iter()
            .zip(&other.data)
            .all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn cmp_total(&self, other: &Matrix) -> Ordering {
        self.rows
            .cmp(&other.rows)
            .then(self.cols.cmp(&other.cols))
            .then_with(|| {
                for (a, b) in self.data.iter().zip(&other.data) {
                    let o = a.cmp_total(b);
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
    }

    /// Reduced row echelon form in place; returns pivot column indices.
    /// Exact pivoting for exact fields, magnitude pivoting for numeric.
    pub fn rref(&mut self) -> Vec<usize> {
        let numeric = !self.tag().is_exact();
        let tol = 1e-12;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r >= self.rows {
                break;
            }
            // choose pivot row
            let mut best: Option<usize> = None;
            for i in r..self.rows {
                let x = self.get(i, c);
                let usable = if numeric {
                    x.to_f64().abs() > tol
                } else {
                    !x.is_zero()
                };
                if usable {
                    match best {
                        None => best = Some(i),
                        Some(b) if numeric && x.to_f64().abs() > self.get(b, c).to_f64().abs() => {
                            best = Some(i)
                        }
                        _ => {}
                    }
                    if !numeric {
                        break;
                    }
                }
            }
            let Some(p) = best else { continue };
            self.swap_rows(r, p);
            let inv = self.get(r, c).inverse();
            for j in 0..self.cols {
                let v = self.get(r, j).mul(&inv);
                *self.get_mut(r, j) = v;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..self.cols {
                    let v = self.get(i, j).sub(&factor.mul(self.get(r, j)));
                    *self.get_mut(i, j) = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right null space {v : Mv = 0}.
    pub fn null_space(&self) -> Vec<Vec<FieldElem>> {
        let tag = self.tag();
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::new();
        for &f in &free {
            let mut v = vec![FieldElem::zero(tag); self.cols];
            v[f] = FieldElem::one(tag);
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = m.get(r, f).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve M x = b; `None` when inconsistent, `Some((x, free))` otherwise,
    /// with `free` the count of free variables (0 means the solution is unique).
    pub fn solve(&self, b: &[FieldElem]) -> Option<(Vec<FieldElem>, usize)> {
        assert_eq!(b.len(), self.rows);
        let tag = self
            .tag()
            .join(b.iter().fold(FieldTag::Rational, |t, x| {
                t.join(x.tag()).expect("solve fields")
            }))
            .expect("solve fields");
        let mut aug = Matrix::zero(self.rows, self.cols + 1, tag);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.get_mut(i, j) = self.get(i, j).promote(tag);
            }
            *aug.get_mut(i, self.cols) = b[i].promote(tag);
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the augmented column
        }
        let mut x = vec![FieldElem::zero(tag); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = aug.get(r, self.cols).clone();
        }
        Some((x, self.cols - pivots.len()))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let tag = self.tag();
        let mut aug = Matrix::zero(n, 2 * n, tag);
        for i in 0..n {
            for j in 0..n {
                *aug.get_mut(i, j) = self.get(i, j).promote(tag);
            }
            *aug.get_mut(i, n + i) = FieldElem::one(tag);
        }
        let pivots = aug.rref();
        if pivots.len() < n {
            return None;
        }
        let mut out = Matrix::zero(n, n, tag);
        for i in 0..n {
            for j in 0..n {
                *out.get_mut(i, j) = aug.get(i, n + j).clone();
            }
        }
        Some(out)
    }
}

/// Ordering wrapper so matrices can key `BTreeMap`/`BTreeSet` collections.
#[derive(Debug, Clone)]
pub struct MatrixOrd(pub Matrix);

impl PartialEq for MatrixOrd {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp_total(&other.0) == Ordering::Equal
    }
}
impl Eq for MatrixOrd {}
impl PartialOrd for MatrixOrd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for MatrixOrd {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp_total(&other.0)
    }
}
