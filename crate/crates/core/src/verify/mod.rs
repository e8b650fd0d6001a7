//! Brute-force oracles and seeded property suites.

pub mod oracle;
pub mod sample;
mod suites;

use thiserror::Error;

use crate::field::FieldError;
use crate::lattice::LatticeError;
use crate::matrices::MatrixError;
use crate::procedures::ProcedureError;
use crate::unit_groups::UnitGroupError;

pub use oracle::{brute_force_closure, gl_order, SmallGl, MAX_AMBIENT_ORDER};
pub use suites::{run_suite, trial_rng, Failure, SuiteParams, SuiteReport, SUITES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("GL({n}, F_{p}) has order {order}, above the enumeration limit")]
    AmbientTooLarge { n: usize, p: u64, order: u64 },
    #[error("unknown suite {0:?}; known suites: {known}", known = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unsound sample: {0}")]
    Unsound(String),
}

impl From<MatrixError> for VerifyError {
    fn from(e: MatrixError) -> Self {
        VerifyError::Lattice(e.into())
    }
}

impl From<ProcedureError> for VerifyError {
    fn from(e: ProcedureError) -> Self {
        VerifyError::Lattice(e.into())
    }
}

impl From<UnitGroupError> for VerifyError {
    fn from(e: UnitGroupError) -> Self {
        VerifyError::Lattice(e.into())
    }
}
