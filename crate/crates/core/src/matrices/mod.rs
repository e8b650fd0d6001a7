//! Matrix classes: dense blocks, finitary, strings, triangular oracles and words.

mod dense;
mod finitary;
mod string;
mod triangular;
mod word;

use thiserror::Error;

use crate::field::FieldError;

pub use dense::{basis, DenseMatrix, SparseVec};
pub use finitary::{FinitaryMatrix, ScaledFinitary};
pub use string::{StringMatrix, Tail};
pub use triangular::{BandRule, ColumnRule, Presentation, UpperTriangularOracle};
pub use word::{Element, Generator, GroupWord, Letter, Normal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("entry ({0},{1}) listed twice")]
    DuplicateEntry(usize, usize),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid triangular oracle: {0}")]
    InvalidTriangular(String),
    #[error("undecidable: {0}")]
    Undecidable(String),
}
