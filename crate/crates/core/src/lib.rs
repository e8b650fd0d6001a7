//! Exact computations in the group of invertible column-finite ℕ×ℕ matrices.

pub mod field;
pub mod format;
mod hnf;
pub mod lattice;
pub mod matrices;
pub mod procedures;
pub mod unit_groups;
pub mod verify;

pub use field::{FieldElement, FieldError, FieldSpec};
pub use format::FormatError;
pub use lattice::{classify_minimal_node, closure_witness, normal_closure, ClosureWitness, LatticeError, LatticeNode, NormalSubgroupDescriptor};
pub use matrices::{DenseMatrix, Element, FinitaryMatrix, GroupWord, MatrixError, ScaledFinitary, StringMatrix, Tail, UpperTriangularOracle};
pub use procedures::{transvection_witness, ProcedureError, TransvectionWitness};
pub use unit_groups::{PairSubgroup, UnitSubgroup};
