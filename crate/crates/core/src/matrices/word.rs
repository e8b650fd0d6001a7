use num_integer::Integer;

use crate::field::{FieldElement, FieldSpec};

use super::dense::{axpy, basis, DenseMatrix, SparseVec};
use super::finitary::{FinitaryMatrix, ScaledFinitary};
use super::string::StringMatrix;
use super::triangular::{BandRule, Presentation, UpperTriangularOracle};
use super::MatrixError;

/// The generator classes a word may use.
#[derive(Clone, Debug)]
pub enum Generator {
    Finitary(FinitaryMatrix),
    Scaled(ScaledFinitary),
    String(StringMatrix),
    Triangular(UpperTriangularOracle),
}

impl Generator {
    pub fn spec(&self) -> FieldSpec {
        match self {
            Generator::Finitary(m) => m.spec(),
            Generator::Scaled(m) => m.spec(),
            Generator::String(m) => m.spec(),
            Generator::Triangular(m) => m.spec(),
        }
    }

    fn column(&self, j: usize) -> SparseVec {
        match self {
            Generator::Finitary(m) => m.column(j),
            Generator::Scaled(m) => m.column(j),
            Generator::String(m) => m.column(j),
            Generator::Triangular(m) => m.column(j),
        }
    }

    /// `M v` as a combination of the columns of `M`.
    fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&k, c) in v {
            axpy(&mut out, c, &self.column(k));
        }
        out
    }

    fn inverse(&self) -> Option<Generator> {
        match self {
            Generator::Finitary(m) => Some(Generator::Finitary(m.inverse())),
            Generator::Scaled(m) => Some(Generator::Scaled(m.inverse())),
            Generator::String(m) => Some(Generator::String(m.inverse())),
            Generator::Triangular(_) => None,
        }
    }
}

/// Large-index behaviour of a letter: beyond `start` it commutes with the
/// shift by `period`, and maps `e_j` into `span` consecutive coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct TailProfile {
    start: usize,
    period: usize,
    span: usize,
}

#[derive(Clone, Debug)]
pub struct Letter {
    generator: Generator,
    inverted: bool,
    inverse: Option<Generator>,
}

impl Letter {
    pub fn new(generator: Generator, inverted: bool) -> Self {
        let inverse = if inverted { generator.inverse() } else { None };
        Letter { generator, inverted, inverse }
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn inverted(&self) -> bool {
        self.inverted
    }

    fn apply(&self, v: &SparseVec) -> SparseVec {
        match (&self.generator, self.inverted, &self.inverse) {
            (_, false, _) => self.generator.apply(v),
            (_, true, Some(inv)) => inv.apply(v),
            (Generator::Triangular(u), true, None) => u.solve(v),
            _ => unreachable!("inverse cached for every non-triangular letter"),
        }
    }

    fn tail_profile(&self) -> Option<TailProfile> {
        let flat = |start| Some(TailProfile { start, period: 1, span: 1 });
        match &self.generator {
            Generator::Finitary(m) => flat(m.window()),
            Generator::Scaled(m) => flat(m.body().window()),
            Generator::String(s) => {
                let b = s.tail_size();
                Some(TailProfile { start: s.prefix_len(), period: b, span: b })
            }
            Generator::Triangular(u) => match u.presentation() {
                Presentation::ExplicitPrefix(p) => flat(p.rows()),
                Presentation::Banded { rule: BandRule::Toeplitz { superdiagonals, .. }, .. } => {
                    let b = superdiagonals.len();
                    // the inverse of a banded Toeplitz matrix is not banded
                    if self.inverted && superdiagonals.iter().any(|s| !s.is_zero()) {
                        None
                    } else {
                        Some(TailProfile { start: b, period: 1, span: b + 1 })
                    }
                }
                Presentation::Banded { rule: BandRule::Custom(_), .. } => None,
            },
        }
    }
}

/// A product of generator letters, evaluated lazily column by column.
#[derive(Clone, Debug)]
pub struct GroupWord {
    spec: FieldSpec,
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn new(spec: FieldSpec) -> Self {
        GroupWord { spec, letters: Vec::new() }
    }

    pub fn from_letters(spec: FieldSpec, letters: Vec<(Generator, bool)>) -> Result<Self, MatrixError> {
        let mut w = Self::new(spec);
        for (g, inv) in letters {
            w.push(g, inv)?;
        }
        Ok(w)
    }

    pub fn push(&mut self, generator: Generator, inverted: bool) -> Result<(), MatrixError> {
        generator.spec().ensure_same(&self.spec)?;
        self.letters.push(Letter::new(generator, inverted));
        Ok(())
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        let letters = self.letters.iter().rev().map(|l| Letter::new(l.generator.clone(), !l.inverted)).collect();
        GroupWord { spec: self.spec, letters }
    }

    /// `M v` for the product `M` (letters applied right to left).
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        self.letters.iter().rev().fold(v.clone(), |acc, l| l.apply(&acc))
    }

    /// Column `j` of the product.
    pub fn column(&self, j: usize) -> SparseVec {
        self.apply(&basis(self.spec, j))
    }

    /// Leading `n×n` block of the product, assembled from its columns.
    pub fn window_project(&self, n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.spec, n, n);
        for j in 0..n {
            for (i, v) in self.column(j) {
                if i < n {
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    /// Decides membership in `D_sc × GL_fr` by exploiting eventual periodicity.
    ///
    /// Beyond `O = max start + Σ(span − 1)` every letter acts through its
    /// periodic tail, so columns repeat with period `L = lcm(periods)`. The
    /// product is scalar there iff columns `O..O+L` are `α·e_j` for one `α`.
    pub fn normalize(&self) -> Result<Normal, MatrixError> {
        let mut profiles = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            profiles.push(l.tail_profile().ok_or_else(|| {
                MatrixError::Undecidable(format!("letter {:?} has no periodic tail certificate", l.generator))
            })?);
        }
        let start = profiles.iter().map(|p| p.start).max().unwrap_or(0);
        let spread: usize = profiles.iter().map(|p| p.span - 1).sum();
        let period = profiles.iter().fold(1usize, |acc, p| acc.lcm(&p.period));
        let far = start + spread;

        let mut alpha: Option<FieldElement> = None;
        for j in far..far + period {
            let col = self.column(j);
            let scalar = match col.get(&j) {
                Some(v) if col.len() == 1 => v.clone(),
                _ => return Ok(Normal::Outside { scan_limit: far + period }),
            };
            match &alpha {
                Some(a) if *a != scalar => return Ok(Normal::Outside { scan_limit: far + period }),
                Some(_) => {}
                None => alpha = Some(scalar),
            }
        }
        let alpha = alpha.unwrap_or_else(|| FieldElement::one(self.spec));
        let inv = alpha.inv().expect("invertible product");
        let mut delta = Vec::new();
        for j in 0..far {
            let mut col = self.column(j);
            for v in col.values_mut() {
                *v = &*v * &inv;
            }
            axpy(&mut col, &FieldElement::from_int(self.spec, -1), &basis(self.spec, j));
            delta.extend(col.into_iter().map(|(i, v)| (i, j, v)));
        }
        let body = FinitaryMatrix::from_delta(self.spec, delta)?;
        Ok(Normal::InProduct(ScaledFinitary::new(alpha, body)?))
    }
}

/// Result of deciding membership in `D_sc × GL_fr`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normal {
    /// The element `α·h`.
    InProduct(ScaledFinitary),
    /// Not in the product; scanning columns `< scan_limit` exposes non-scalar behaviour.
    Outside { scan_limit: usize },
}

/// Elements whose position in the lattice can be decided.
#[derive(Clone, Debug)]
pub enum Element {
    Finitary(FinitaryMatrix),
    Scaled(ScaledFinitary),
    String(StringMatrix),
    Word(GroupWord),
}

impl Element {
    pub fn spec(&self) -> FieldSpec {
        match self {
            Element::Finitary(m) => m.spec(),
            Element::Scaled(m) => m.spec(),
            Element::String(m) => m.spec(),
            Element::Word(w) => w.spec(),
        }
    }

    pub fn column(&self, j: usize) -> SparseVec {
        match self {
            Element::Finitary(m) => m.column(j),
            Element::Scaled(m) => m.column(j),
            Element::String(m) => m.column(j),
            Element::Word(w) => w.column(j),
        }
    }

    /// `M v` as a combination of columns.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        if let Element::Word(w) = self {
            return w.apply(v);
        }
        let mut out = SparseVec::new();
        for (&k, c) in v {
            axpy(&mut out, c, &self.column(k));
        }
        out
    }

    pub fn to_word(&self) -> GroupWord {
        let g = match self {
            Element::Finitary(m) => Generator::Finitary(m.clone()),
            Element::Scaled(m) => Generator::Scaled(m.clone()),
            Element::String(m) => Generator::String(m.clone()),
            Element::Word(w) => return w.clone(),
        };
        GroupWord::from_letters(self.spec(), vec![(g, false)]).expect("single letter")
    }

    pub fn normalize(&self) -> Result<Normal, MatrixError> {
        match self {
            Element::Finitary(m) => Ok(Normal::InProduct(ScaledFinitary::from_finitary(m.clone()))),
            Element::Scaled(m) => Ok(Normal::InProduct(m.clone())),
            Element::String(s) => match s.tail_scalar() {
                Some(c) => {
                    let n = s.prefix_len();
                    let inv = c.inv().expect("invertible tail");
                    let body = FinitaryMatrix::from_corner(&s.leading(n).scale(&inv))?;
                    Ok(Normal::InProduct(ScaledFinitary::new(c, body)?))
                }
                None => Ok(Normal::Outside { scan_limit: s.prefix_len() + s.tail_size() }),
            },
            Element::Word(w) => w.normalize(),
        }
    }
}

impl From<FinitaryMatrix> for Element {
    fn from(m: FinitaryMatrix) -> Self {
        Element::Finitary(m)
    }
}

impl From<ScaledFinitary> for Element {
    fn from(m: ScaledFinitary) -> Self {
        Element::Scaled(m)
    }
}

impl From<StringMatrix> for Element {
    fn from(m: StringMatrix) -> Self {
        Element::String(m)
    }
}

impl From<GroupWord> for Element {
    fn from(w: GroupWord) -> Self {
        Element::Word(w)
    }
}
