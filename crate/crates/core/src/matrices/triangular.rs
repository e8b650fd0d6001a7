use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use crate::field::{FieldElement, FieldSpec};

use super::dense::{basis, DenseMatrix, SparseVec};
use super::MatrixError;

/// Column rule of a custom banded oracle: column `j` as a sparse vector.
pub type ColumnRule = Arc<dyn Fn(usize) -> SparseVec + Send + Sync>;

#[derive(Clone)]
pub enum BandRule {
    /// Constant diagonals: `u[j][j] = diagonal`, `u[j-k][j] = superdiagonals[k-1]`.
    Toeplitz { diagonal: FieldElement, superdiagonals: Vec<FieldElement> },
    /// An arbitrary pure rule; must keep column `j` inside rows `≤ j` with a nonzero diagonal.
    Custom(ColumnRule),
}

#[derive(Clone)]
pub enum Presentation {
    /// Dense upper-triangular `N×N` prefix, identity beyond.
    ExplicitPrefix(DenseMatrix),
    /// Column `j` supported on rows `[j - bandwidth, j]`; `None` when no bound is known.
    Banded { bandwidth: Option<usize>, rule: BandRule },
}

/// An infinite upper-triangular matrix with nonzero diagonal, given column by column.
///
/// Clones share the probe counter, which records every column request.
#[derive(Clone)]
pub struct UpperTriangularOracle {
    spec: FieldSpec,
    presentation: Presentation,
    probes: Arc<AtomicUsize>,
}

/// Columns of custom rules checked eagerly at construction.
const CUSTOM_CHECKED_COLUMNS: usize = 8;

impl UpperTriangularOracle {
    pub fn explicit(prefix: DenseMatrix) -> Result<Self, MatrixError> {
        if !prefix.is_square() || !prefix.is_upper_triangular() {
            return Err(MatrixError::InvalidTriangular("prefix must be square upper-triangular".into()));
        }
        if (0..prefix.rows()).any(|i| prefix.get(i, i).is_zero()) {
            return Err(MatrixError::InvalidTriangular("zero on the diagonal".into()));
        }
        Ok(Self::wrap(prefix.spec(), Presentation::ExplicitPrefix(prefix)))
    }

    pub fn toeplitz(diagonal: FieldElement, superdiagonals: Vec<FieldElement>) -> Result<Self, MatrixError> {
        let spec = diagonal.spec();
        for s in &superdiagonals {
            s.spec().ensure_same(&spec)?;
        }
        if diagonal.is_zero() {
            return Err(MatrixError::InvalidTriangular("zero on the diagonal".into()));
        }
        let bandwidth = Some(superdiagonals.len());
        Ok(Self::wrap(spec, Presentation::Banded { bandwidth, rule: BandRule::Toeplitz { diagonal, superdiagonals } }))
    }

    /// A custom rule, validated on its first few columns and on every later probe.
    pub fn custom(spec: FieldSpec, bandwidth: Option<usize>, rule: ColumnRule) -> Result<Self, MatrixError> {
        for j in 0..CUSTOM_CHECKED_COLUMNS {
            check_column(spec, j, bandwidth, &rule(j))?;
        }
        Ok(Self::wrap(spec, Presentation::Banded { bandwidth, rule: BandRule::Custom(rule) }))
    }

    fn wrap(spec: FieldSpec, presentation: Presentation) -> Self {
        UpperTriangularOracle { spec, presentation, probes: Arc::new(AtomicUsize::new(0)) }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn probe_count(&self) -> usize {
        self.probes.load(Ordering::Relaxed)
    }

    pub fn reset_probes(&self) {
        self.probes.store(0, Ordering::Relaxed);
    }

    /// Upper bound on the band width; `None` when unknown.
    pub fn bandwidth(&self) -> Option<usize> {
        match &self.presentation {
            Presentation::ExplicitPrefix(p) => Some(p.rows().saturating_sub(1)),
            Presentation::Banded { bandwidth, .. } => *bandwidth,
        }
    }

    /// Least `b` such that every column `j ≥ b` has no entry in rows `< n`.
    pub fn column_bound(&self, n: usize) -> Option<usize> {
        match &self.presentation {
            Presentation::ExplicitPrefix(p) => Some(n.max(p.rows())),
            Presentation::Banded { bandwidth, .. } => bandwidth.map(|b| n + b),
        }
    }

    pub fn column(&self, j: usize) -> SparseVec {
        self.probes.fetch_add(1, Ordering::Relaxed);
        match &self.presentation {
            Presentation::ExplicitPrefix(p) => {
                if j < p.rows() {
                    p.column(j)
                } else {
                    basis(self.spec, j)
                }
            }
            Presentation::Banded { rule: BandRule::Toeplitz { diagonal, superdiagonals }, .. } => {
                let mut col = SparseVec::new();
                col.insert(j, diagonal.clone());
                for (k, s) in superdiagonals.iter().enumerate() {
                    if k < j && !s.is_zero() {
                        col.insert(j - k - 1, s.clone());
                    }
                }
                col
            }
            Presentation::Banded { rule: BandRule::Custom(f), bandwidth } => {
                let col = f(j);
                if let Err(e) = check_column(self.spec, j, *bandwidth, &col) {
                    panic!("custom triangular rule broke its contract: {e}");
                }
                col
            }
        }
    }

    /// Column `j` of the inverse by back-substitution on the leading `(j+1)×(j+1)` block.
    pub fn inverse_column(&self, j: usize) -> SparseVec {
        self.solve(&basis(self.spec, j))
    }

    /// `u⁻¹ v`; the solution is supported on rows `≤ max supp(v)`.
    pub fn solve(&self, v: &SparseVec) -> SparseVec {
        let Some((&top, _)) = v.iter().next_back() else {
            return SparseVec::new();
        };
        if let Presentation::ExplicitPrefix(p) = &self.presentation {
            if v.keys().all(|&i| i >= p.rows()) {
                return v.clone();
            }
        }
        let cols: Vec<SparseVec> = (0..=top).map(|k| self.column(k)).collect();
        let mut x: Vec<FieldElement> = vec![FieldElement::zero(self.spec); top + 1];
        for i in (0..=top).rev() {
            let mut acc = v.get(&i).cloned().unwrap_or_else(|| FieldElement::zero(self.spec));
            for (k, col) in cols.iter().enumerate().skip(i + 1) {
                if x[k].is_zero() {
                    continue;
                }
                if let Some(u) = col.get(&i) {
                    acc = &acc - &(u * &x[k]);
                }
            }
            if !acc.is_zero() {
                x[i] = &acc / &cols[i][&i];
            }
        }
        x.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// The leading `n×n` block.
    pub fn leading(&self, n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.spec, n, n);
        for j in 0..n {
            for (i, v) in self.column(j) {
                m.set(i, j, v);
            }
        }
        m
    }
}

fn check_column(spec: FieldSpec, j: usize, bandwidth: Option<usize>, col: &SparseVec) -> Result<(), MatrixError> {
    for (&i, v) in col {
        v.spec().ensure_same(&spec)?;
        if i > j {
            return Err(MatrixError::InvalidTriangular(format!("column {j} has an entry below the diagonal")));
        }
        if let Some(b) = bandwidth {
            if i + b < j {
                return Err(MatrixError::InvalidTriangular(format!("column {j} leaves the declared band")));
            }
        }
    }
    match col.get(&j) {
        Some(d) if !d.is_zero() => Ok(()),
        _ => Err(MatrixError::InvalidTriangular(format!("column {j} has a zero diagonal entry"))),
    }
}

impl fmt::Debug for UpperTriangularOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.presentation {
            Presentation::ExplicitPrefix(p) => write!(f, "Upper({p:?} | E)"),
            Presentation::Banded { rule: BandRule::Toeplitz { diagonal, superdiagonals }, .. } => {
                write!(f, "Upper(toeplitz {diagonal:?} {superdiagonals:?})")
            }
            Presentation::Banded { bandwidth, .. } => write!(f, "Upper(custom, band {bandwidth:?})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::rationals()
    }

    fn int(v: i64) -> FieldElement {
        FieldElement::from_int(q(), v)
    }

    #[test]
    fn explicit_inverse_column() {
        let u = UpperTriangularOracle::explicit(DenseMatrix::from_ints(q(), &[&[1, 1], &[0, 1]])).unwrap();
        assert_eq!(u.inverse_column(1), SparseVec::from([(0, int(-1)), (1, int(1))]));
        assert_eq!(u.inverse_column(4), SparseVec::from([(4, int(1))]));
    }

    #[test]
    fn toeplitz_inverse_is_geometric() {
        // (E + S)⁻¹ = E - S + S² - … for the shift S
        let u = UpperTriangularOracle::toeplitz(int(1), vec![int(1)]).unwrap();
        let col = u.inverse_column(3);
        let expected: SparseVec = (0..=3).map(|i| (i, int(if (3 - i) % 2 == 0 { 1 } else { -1 }))).collect();
        assert_eq!(col, expected);
        assert_eq!(u.column(0), SparseVec::from([(0, int(1))]));
        assert_eq!(u.column_bound(3), Some(4));
    }

    #[test]
    fn probes_are_counted() {
        let u = UpperTriangularOracle::toeplitz(int(2), vec![int(1), int(3)]).unwrap();
        u.column(10);
        u.inverse_column(5);
        assert_eq!(u.probe_count(), 1 + 6);
        u.reset_probes();
        assert_eq!(u.probe_count(), 0);
    }

    #[test]
    fn rejects_bad_presentations() {
        assert!(UpperTriangularOracle::explicit(DenseMatrix::from_ints(q(), &[&[1, 0], &[1, 1]])).is_err());
        assert!(UpperTriangularOracle::explicit(DenseMatrix::from_ints(q(), &[&[0, 1], &[0, 1]])).is_err());
        assert!(UpperTriangularOracle::toeplitz(int(0), vec![]).is_err());
        let lower: ColumnRule = Arc::new(|j| SparseVec::from([(j, int(1)), (j + 1, int(1))]));
        assert!(UpperTriangularOracle::custom(q(), Some(1), lower).is_err());
        let wide: ColumnRule = Arc::new(|j| SparseVec::from([(0, int(1)), (j, int(1))]));
        assert!(UpperTriangularOracle::custom(q(), Some(1), wide.clone()).is_err());
        assert!(UpperTriangularOracle::custom(q(), None, wide).is_ok());
    }

    #[test]
    fn solve_round_trip() {
        let u = UpperTriangularOracle::toeplitz(int(3), vec![int(-1), int(2)]).unwrap();
        let v = SparseVec::from([(1, int(4)), (5, int(-2))]);
        let x = u.solve(&v);
        let mut back = SparseVec::new();
        for (k, c) in &x {
            super::super::dense::axpy(&mut back, c, &u.column(*k));
        }
        assert_eq!(back, v);
    }
}
