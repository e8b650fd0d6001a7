use std::collections::BTreeMap;
use std::fmt;

use crate::field::{FieldElement, FieldSpec};

use super::dense::{DenseMatrix, SparseVec};
use super::MatrixError;

/// `E + A` with `A` finitely supported and the leading window corner invertible.
///
/// The stored window is always the least `n` with `supp(A) ⊆ [0,n)×[0,n)`, so
/// derived equality compares canonical forms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinitaryMatrix {
    spec: FieldSpec,
    delta: BTreeMap<(usize, usize), FieldElement>,
    window: usize,
}

impl FinitaryMatrix {
    pub fn identity(spec: FieldSpec) -> Self {
        FinitaryMatrix { spec, delta: BTreeMap::new(), window: 0 }
    }

    /// Builds `E + A` from the entries of `A`. Zero entries are dropped;
    /// repeated positions are rejected.
    pub fn from_delta<I>(spec: FieldSpec, entries: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize, FieldElement)>,
    {
        let mut delta = BTreeMap::new();
        for (i, j, v) in entries {
            v.spec().ensure_same(&spec)?;
            if delta.contains_key(&(i, j)) {
                return Err(MatrixError::DuplicateEntry(i, j));
            }
            if !v.is_zero() {
                delta.insert((i, j), v);
            }
        }
        Self::checked(spec, delta)
    }

    /// The matrix equal to `corner` on its leading block and to `E` elsewhere.
    pub fn from_corner(corner: &DenseMatrix) -> Result<Self, MatrixError> {
        if !corner.is_square() {
            return Err(MatrixError::Shape("corner must be square".into()));
        }
        let spec = corner.spec();
        let mut delta = BTreeMap::new();
        for i in 0..corner.rows() {
            for j in 0..corner.cols() {
                let mut v = corner.get(i, j).clone();
                if i == j {
                    v = &v - &FieldElement::one(spec);
                }
                if !v.is_zero() {
                    delta.insert((i, j), v);
                }
            }
        }
        Self::checked(spec, delta)
    }

    /// `E + c·e_{ij}`, `i ≠ j`.
    pub fn transvection(spec: FieldSpec, i: usize, j: usize, c: FieldElement) -> Result<Self, MatrixError> {
        if i == j {
            return Err(MatrixError::Shape(format!("transvection needs distinct indices, got ({i},{i})")));
        }
        Self::from_delta(spec, [(i, j, c)])
    }

    /// `diag(d₀, d₁, …, 1, 1, …)`.
    pub fn diagonal(spec: FieldSpec, diag: &[FieldElement]) -> Result<Self, MatrixError> {
        Self::from_corner(&DenseMatrix::diagonal(spec, diag))
    }

    /// The permutation matrix exchanging basis vectors `a` and `b`.
    pub fn swap(spec: FieldSpec, a: usize, b: usize) -> Self {
        let n = a.max(b) + 1;
        let mut m = DenseMatrix::identity(spec, n);
        if a != b {
            m.set(a, a, FieldElement::zero(spec));
            m.set(b, b, FieldElement::zero(spec));
            m.set(a, b, FieldElement::one(spec));
            m.set(b, a, FieldElement::one(spec));
        }
        Self::from_corner(&m).expect("permutations are invertible")
    }

    fn checked(spec: FieldSpec, delta: BTreeMap<(usize, usize), FieldElement>) -> Result<Self, MatrixError> {
        let window = delta.keys().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
        let m = FinitaryMatrix { spec, delta, window };
        if !m.corner(window).is_invertible() {
            return Err(MatrixError::NotInvertible);
        }
        Ok(m)
    }

    pub(crate) fn from_corner_unchecked(corner: &DenseMatrix) -> Self {
        let spec = corner.spec();
        let mut delta = BTreeMap::new();
        for i in 0..corner.rows() {
            for j in 0..corner.cols() {
                let mut v = corner.get(i, j).clone();
                if i == j {
                    v = &v - &FieldElement::one(spec);
                }
                if !v.is_zero() {
                    delta.insert((i, j), v);
                }
            }
        }
        let window = delta.keys().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
        FinitaryMatrix { spec, delta, window }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Least `n` such that the matrix is `E` outside the leading `n×n` corner.
    pub fn window(&self) -> usize {
        self.window
    }

    /// Nonzero entries of `A` in `E + A`.
    pub fn delta(&self) -> &BTreeMap<(usize, usize), FieldElement> {
        &self.delta
    }

    pub fn is_identity(&self) -> bool {
        self.delta.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        let base = if i == j { FieldElement::one(self.spec) } else { FieldElement::zero(self.spec) };
        match self.delta.get(&(i, j)) {
            Some(d) => &base + d,
            None => base,
        }
    }

    /// The leading `n×n` block (any `n`, including beyond the window).
    pub fn corner(&self, n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::identity(self.spec, n);
        for (&(i, j), v) in &self.delta {
            if i < n && j < n {
                m.set(i, j, m.get(i, j) + v);
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> SparseVec {
        let mut col = SparseVec::new();
        if j >= self.window {
            col.insert(j, FieldElement::one(self.spec));
            return col;
        }
        col.insert(j, FieldElement::one(self.spec));
        for (&(i, jj), v) in self.delta.range((0, j)..) {
            if jj == j {
                let e = col.entry(i).or_insert_with(|| FieldElement::zero(self.spec));
                *e = &*e + v;
            }
        }
        col.retain(|_, v| !v.is_zero());
        col
    }

    pub fn try_mul(&self, rhs: &FinitaryMatrix) -> Result<FinitaryMatrix, MatrixError> {
        self.spec.ensure_same(&rhs.spec)?;
        let n = self.window.max(rhs.window);
        Ok(Self::from_corner_unchecked(&self.corner(n).mul(&rhs.corner(n))))
    }

    /// Panics on a field mismatch.
    pub fn mul(&self, rhs: &FinitaryMatrix) -> FinitaryMatrix {
        self.try_mul(rhs).expect("finitary product")
    }

    pub fn inverse(&self) -> FinitaryMatrix {
        let inv = self.corner(self.window).inverse().expect("finitary matrices are invertible");
        Self::from_corner_unchecked(&inv)
    }

    /// `det` of the leading window corner; padding contributes only ones.
    pub fn corner_det(&self) -> FieldElement {
        self.corner(self.window).det()
    }

    /// `Some((i, j, c))` when the matrix is the elementary transvection `E + c·e_{ij}`.
    pub fn as_transvection(&self) -> Option<(usize, usize, FieldElement)> {
        match self.delta.iter().next() {
            Some((&(i, j), c)) if self.delta.len() == 1 && i != j => Some((i, j, c.clone())),
            _ => None,
        }
    }

    /// Row `row` multiplied by `c`, i.e. the product `diag(1,…,c,…,1)·self`.
    pub fn scale_row(&self, row: usize, c: &FieldElement) -> Result<FinitaryMatrix, MatrixError> {
        let n = self.window.max(row + 1);
        let mut m = self.corner(n);
        for j in 0..n {
            let v = m.get(row, j) * c;
            m.set(row, j, v);
        }
        Self::from_corner(&m)
    }
}

impl fmt::Debug for FinitaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E")?;
        for (&(i, j), v) in &self.delta {
            write!(f, " + {v}·e[{i},{j}]")?;
        }
        Ok(())
    }
}

/// `α·h`: an element of `D_sc × GL_fr`. The split is unique since the only
/// finitary scalar matrix is `E`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ScaledFinitary {
    scalar: FieldElement,
    body: FinitaryMatrix,
}

impl ScaledFinitary {
    pub fn new(scalar: FieldElement, body: FinitaryMatrix) -> Result<Self, MatrixError> {
        scalar.spec().ensure_same(&body.spec())?;
        if scalar.is_zero() {
            return Err(MatrixError::NotInvertible);
        }
        Ok(ScaledFinitary { scalar, body })
    }

    pub fn scalar_matrix(scalar: FieldElement) -> Result<Self, MatrixError> {
        let spec = scalar.spec();
        Self::new(scalar, FinitaryMatrix::identity(spec))
    }

    pub fn from_finitary(body: FinitaryMatrix) -> Self {
        ScaledFinitary { scalar: FieldElement::one(body.spec()), body }
    }

    pub fn spec(&self) -> FieldSpec {
        self.body.spec()
    }

    pub fn scalar(&self) -> &FieldElement {
        &self.scalar
    }

    pub fn body(&self) -> &FinitaryMatrix {
        &self.body
    }

    pub fn into_parts(self) -> (FieldElement, FinitaryMatrix) {
        (self.scalar, self.body)
    }

    pub fn is_scalar(&self) -> bool {
        self.body.is_identity()
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.scalar.is_one()
    }

    pub fn column(&self, j: usize) -> SparseVec {
        self.body.column(j).into_iter().map(|(i, v)| (i, &self.scalar * &v)).collect()
    }

    pub fn try_mul(&self, rhs: &ScaledFinitary) -> Result<ScaledFinitary, MatrixError> {
        Ok(ScaledFinitary { scalar: self.scalar.try_mul(&rhs.scalar)?, body: self.body.try_mul(&rhs.body)? })
    }

    pub fn mul(&self, rhs: &ScaledFinitary) -> ScaledFinitary {
        self.try_mul(rhs).expect("scaled product")
    }

    pub fn inverse(&self) -> ScaledFinitary {
        ScaledFinitary { scalar: self.scalar.inv().expect("nonzero scalar"), body: self.body.inverse() }
    }
}
