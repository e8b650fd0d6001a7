use std::collections::BTreeMap;
use std::fmt;

use crate::field::{FieldElement, FieldSpec};

use super::MatrixError;

/// Sparse column vector: row index → nonzero entry.
pub type SparseVec = BTreeMap<usize, FieldElement>;

/// The standard basis column `e_j`.
pub fn basis(spec: FieldSpec, j: usize) -> SparseVec {
    SparseVec::from([(j, FieldElement::one(spec))])
}

/// `acc += c · v`, dropping cancelled entries.
pub(crate) fn axpy(acc: &mut SparseVec, c: &FieldElement, v: &SparseVec) {
    for (&i, x) in v {
        let add = c * x;
        match acc.get_mut(&i) {
            Some(slot) => {
                *slot = &*slot + &add;
                if slot.is_zero() {
                    acc.remove(&i);
                }
            }
            None => {
                if !add.is_zero() {
                    acc.insert(i, add);
                }
            }
        }
    }
}

/// Row-major dense matrix over a single field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl DenseMatrix {
    pub fn zeros(spec: FieldSpec, rows: usize, cols: usize) -> Self {
        DenseMatrix { spec, rows, cols, data: vec![FieldElement::zero(spec); rows * cols] }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(spec, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::one(spec));
        }
        m
    }

    pub fn from_rows(spec: FieldSpec, rows: Vec<Vec<FieldElement>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(MatrixError::Shape(format!("ragged rows: expected {c} entries, found {}", row.len())));
            }
            for x in row {
                x.spec().ensure_same(&spec)?;
                data.push(x);
            }
        }
        Ok(DenseMatrix { spec, rows: r, cols: c, data })
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(spec: FieldSpec, rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&v| FieldElement::from_int(spec, v)).collect()).collect();
        Self::from_rows(spec, rows).expect("rectangular integer rows")
    }

    pub fn diagonal(spec: FieldSpec, diag: &[FieldElement]) -> Self {
        let mut m = Self::zeros(spec, diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> SparseVec {
        (0..self.rows)
            .filter(|&i| !self.get(i, j).is_zero())
            .map(|i| (i, self.get(i, j).clone()))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.spec, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        DenseMatrix { spec: self.spec, rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| c * x).collect() }
    }

    pub fn try_mul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix, MatrixError> {
        self.spec.ensure_same(&rhs.spec)?;
        if self.cols != rhs.rows {
            return Err(MatrixError::Shape(format!("{}×{} times {}×{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        let mut out = Self::zeros(self.spec, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Panics on shape or field mismatch.
    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_mul(rhs).expect("dense product")
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        DenseMatrix { spec: self.spec, rows: self.rows, cols: self.cols, data }
    }

    /// The leading `r×c` block, padded with identity entries when larger.
    pub fn resized(&self, r: usize, c: usize) -> Self {
        let mut m = Self::zeros(self.spec, r, c);
        for i in 0..r {
            for j in 0..c {
                let v = if i < self.rows && j < self.cols {
                    self.get(i, j).clone()
                } else if i == j {
                    FieldElement::one(self.spec)
                } else {
                    continue;
                };
                m.set(i, j, v);
            }
        }
        m
    }

    /// Exact determinant by exact Gaussian elimination.
    pub fn det(&self) -> FieldElement {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = FieldElement::one(self.spec);
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a.get(r, c).is_zero()) else {
                return FieldElement::zero(self.spec);
            };
            if p != c {
                a.swap_rows(p, c);
                det = -&det;
            }
            let pivot = a.get(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            for r in c + 1..n {
                if a.get(r, c).is_zero() {
                    continue;
                }
                let f = a.get(r, c) * &inv;
                a.row_axpy(r, &f, c, c);
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && !self.det().is_zero()
    }

    /// Gauss–Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<DenseMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(self.spec, n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a.get(r, c).is_zero())?;
            if p != c {
                a.swap_rows(p, c);
                inv.swap_rows(p, c);
            }
            let pinv = a.get(c, c).inv().ok()?;
            a.scale_row(c, &pinv);
            inv.scale_row(c, &pinv);
            for r in 0..n {
                if r == c || a.get(r, c).is_zero() {
                    continue;
                }
                let f = a.get(r, c).clone();
                a.row_axpy(r, &f, c, 0);
                inv.row_axpy(r, &f, c, 0);
            }
        }
        Some(inv)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Basis of the right null space `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<FieldElement>> {
        let (r, pivots) = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![FieldElement::zero(self.spec); self.cols];
                x[f] = FieldElement::one(self.spec);
                for (k, &pc) in pivots.iter().enumerate() {
                    x[pc] = -r.get(k, f);
                }
                x
            })
            .collect()
    }

    /// Reduced row echelon form and its pivot columns.
    fn echelon(&self) -> (DenseMatrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..self.cols {
            let Some(p) = (pr..self.rows).find(|&r| !a.get(r, c).is_zero()) else { continue };
            a.swap_rows(p, pr);
            let pinv = a.get(pr, c).inv().expect("nonzero pivot");
            a.scale_row(pr, &pinv);
            for r in 0..self.rows {
                if r != pr && !a.get(r, c).is_zero() {
                    let f = a.get(r, c).clone();
                    a.row_axpy(r, &f, pr, 0);
                }
            }
            pivots.push(c);
            pr += 1;
            if pr == self.rows {
                break;
            }
        }
        (a, pivots)
    }

    /// The common diagonal value when the matrix is `c·I`.
    pub fn scalar_value(&self) -> Option<FieldElement> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let c = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if (i == j && *v != c) || (i != j && !v.is_zero()) {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &FieldElement) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            if !self.data[idx].is_zero() {
                self.data[idx] = &self.data[idx] * c;
            }
        }
    }

    /// row[dst] -= f · row[src] for columns from `from` on.
    fn row_axpy(&mut self, dst: usize, f: &FieldElement, src: usize, from: usize) {
        for j in from..self.cols {
            let s = &self.data[src * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let t = f * s;
            let idx = dst * self.cols + j;
            self.data[idx] = &self.data[idx] - &t;
        }
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}
