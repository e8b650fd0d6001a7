use std::fmt;

use crate::field::{FieldElement, FieldSpec};

use super::dense::{basis, DenseMatrix, SparseVec};
use super::MatrixError;

/// What follows the explicitly listed blocks of a string.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Tail {
    /// `1×1` identity blocks forever.
    Identity,
    /// The same block repeated forever.
    Periodic(DenseMatrix),
}

/// Block-diagonal matrix with finite invertible blocks.
///
/// The shape is `(n₁, …, n_t)` for the listed blocks followed by either
/// `(1, 1, …)` or `(b, b, …)` for a periodic tail block of size `b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StringMatrix {
    spec: FieldSpec,
    blocks: Vec<DenseMatrix>,
    offsets: Vec<usize>,
    tail: Tail,
}

/// Where a column falls inside a string.
pub(crate) struct Located<'a> {
    pub start: usize,
    pub block: Option<&'a DenseMatrix>,
}

fn check_block(spec: FieldSpec, b: &DenseMatrix) -> Result<(), MatrixError> {
    b.spec().ensure_same(&spec)?;
    if !b.is_square() || b.rows() == 0 {
        return Err(MatrixError::Shape(format!("string blocks must be nonempty and square, got {}×{}", b.rows(), b.cols())));
    }
    if !b.is_invertible() {
        return Err(MatrixError::NotInvertible);
    }
    Ok(())
}

impl StringMatrix {
    pub fn new(spec: FieldSpec, blocks: Vec<DenseMatrix>, tail: Tail) -> Result<Self, MatrixError> {
        for b in &blocks {
            check_block(spec, b)?;
        }
        if let Tail::Periodic(b) = &tail {
            check_block(spec, b)?;
        }
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut at = 0;
        for b in &blocks {
            offsets.push(at);
            at += b.rows();
        }
        offsets.push(at);
        Ok(StringMatrix { spec, blocks, offsets, tail })
    }

    /// The diagonal string `diag(d₀, …, d_k, tail)`.
    pub fn diagonal(spec: FieldSpec, diag: &[FieldElement], tail: Tail) -> Result<Self, MatrixError> {
        let blocks = diag.iter().map(|d| DenseMatrix::diagonal(spec, std::slice::from_ref(d))).collect();
        Self::new(spec, blocks, tail)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Total size of the listed blocks.
    pub fn prefix_len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn tail_size(&self) -> usize {
        match &self.tail {
            Tail::Identity => 1,
            Tail::Periodic(b) => b.rows(),
        }
    }

    /// The infinite shape sequence `(n₁, n₂, …)`.
    pub fn shape(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(DenseMatrix::rows).chain(std::iter::repeat(self.tail_size()))
    }

    /// Least `t ≥ 1` with `m = n₁ + … + n_t ≥ n`, returned as `(t, m)`.
    pub fn minimal_alignment(&self, n: usize) -> (usize, usize) {
        let mut m = 0;
        for (t, size) in self.shape().enumerate() {
            m += size;
            if m >= n {
                return (t + 1, m);
            }
        }
        unreachable!("shape is infinite")
    }

    /// The scalar `c` when the tail is `c·I` (identity tails give `1`).
    pub fn tail_scalar(&self) -> Option<FieldElement> {
        match &self.tail {
            Tail::Identity => Some(FieldElement::one(self.spec)),
            Tail::Periodic(b) => b.scalar_value(),
        }
    }

    pub(crate) fn locate(&self, j: usize) -> Located<'_> {
        let prefix = self.prefix_len();
        if j < prefix {
            let k = self.offsets.partition_point(|&o| o <= j) - 1;
            return Located { start: self.offsets[k], block: Some(&self.blocks[k]) };
        }
        match &self.tail {
            Tail::Identity => Located { start: j, block: None },
            Tail::Periodic(b) => {
                let size = b.rows();
                Located { start: prefix + (j - prefix) / size * size, block: Some(b) }
            }
        }
    }

    pub fn column(&self, j: usize) -> SparseVec {
        let at = self.locate(j);
        match at.block {
            None => basis(self.spec, j),
            Some(b) => b.column(j - at.start).into_iter().map(|(i, v)| (i + at.start, v)).collect(),
        }
    }

    /// Blockwise inverse: same shape, same tail kind.
    pub fn inverse(&self) -> StringMatrix {
        let inv = |b: &DenseMatrix| b.inverse().expect("string blocks are invertible");
        StringMatrix {
            spec: self.spec,
            blocks: self.blocks.iter().map(inv).collect(),
            offsets: self.offsets.clone(),
            tail: match &self.tail {
                Tail::Identity => Tail::Identity,
                Tail::Periodic(b) => Tail::Periodic(inv(b)),
            },
        }
    }

    /// The leading `m×m` block; exact when `m` is a partial sum of the shape.
    pub fn leading(&self, m: usize) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.spec, m, m);
        for j in 0..m {
            for (i, v) in self.column(j) {
                if i < m {
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl fmt::Debug for StringMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "String(")?;
        for b in &self.blocks {
            write!(f, "{b:?} ")?;
        }
        match &self.tail {
            Tail::Identity => write!(f, "| E)"),
            Tail::Periodic(b) => write!(f, "| {b:?}…)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    #[test]
    fn inverse_examples() {
        let swap = DenseMatrix::from_ints(q(), &[&[0, 1], &[1, 0]]);
        let s = StringMatrix::new(q(), vec![swap], Tail::Identity).unwrap();
        assert_eq!(s.inverse(), s);

        let two = StringMatrix::diagonal(q(), &[FieldElement::from_int(q(), 2)], Tail::Identity).unwrap();
        let half = StringMatrix::diagonal(q(), &[FieldElement::from_ratio(q(), 1, 2).unwrap()], Tail::Identity).unwrap();
        assert_eq!(two.inverse(), half);

        let u = StringMatrix::new(q(), vec![], Tail::Periodic(DenseMatrix::from_ints(q(), &[&[1, 1], &[0, 1]]))).unwrap();
        let expected = StringMatrix::new(q(), vec![], Tail::Periodic(DenseMatrix::from_ints(q(), &[&[1, -1], &[0, 1]]))).unwrap();
        assert_eq!(u.inverse(), expected);
    }

    #[test]
    fn shape_and_alignment() {
        let b = DenseMatrix::identity(q(), 2);
        let s = StringMatrix::new(q(), vec![b.clone(), DenseMatrix::identity(q(), 1)], Tail::Periodic(DenseMatrix::identity(q(), 3))).unwrap();
        assert_eq!(s.shape().take(5).collect::<Vec<_>>(), vec![2, 1, 3, 3, 3]);
        assert_eq!(s.minimal_alignment(0), (1, 2));
        assert_eq!(s.minimal_alignment(2), (1, 2));
        assert_eq!(s.minimal_alignment(3), (2, 3));
        assert_eq!(s.minimal_alignment(4), (3, 6));
        assert_eq!(s.minimal_alignment(10), (5, 12));
        let p3 = StringMatrix::new(q(), vec![], Tail::Periodic(DenseMatrix::identity(q(), 3))).unwrap();
        assert_eq!(p3.minimal_alignment(2), (1, 3));
    }

    #[test]
    fn columns_follow_blocks() {
        let tail = DenseMatrix::from_ints(q(), &[&[0, 1], &[1, 0]]);
        let s = StringMatrix::new(q(), vec![DenseMatrix::from_ints(q(), &[&[3]])], Tail::Periodic(tail)).unwrap();
        let one = FieldElement::one(q());
        assert_eq!(s.column(0), SparseVec::from([(0, FieldElement::from_int(q(), 3))]));
        assert_eq!(s.column(1), SparseVec::from([(2, one.clone())]));
        assert_eq!(s.column(2), SparseVec::from([(1, one.clone())]));
        assert_eq!(s.column(101), SparseVec::from([(102, one)]));
        assert_eq!(s.tail_scalar(), None);
    }

    #[test]
    fn rejects_singular_blocks() {
        let bad = DenseMatrix::from_ints(q(), &[&[1, 1], &[1, 1]]);
        assert_eq!(StringMatrix::new(q(), vec![bad.clone()], Tail::Identity), Err(MatrixError::NotInvertible));
        assert_eq!(StringMatrix::new(q(), vec![], Tail::Periodic(bad)), Err(MatrixError::NotInvertible));
    }
}
