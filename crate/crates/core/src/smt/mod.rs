//! Validity checking of generated formulas with an external SMT solver.

mod encode;
mod solver;
mod sorts;

pub use encode::{encode_formula, encode_term};
pub use solver::{check_validity, num_jobs, parse_answer, Solver, SolverConfig, DEFAULT_SOLVER};
pub use sorts::SortEnv;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownReason {
    Timeout,
    SolverUnknown,
    ProcessError(String),
    Encoding(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverVerdict {
    Valid,
    Invalid,
    Unknown(UnknownReason),
}

impl SolverVerdict {
    pub fn is_valid(&self) -> bool {
        *self == SolverVerdict::Valid
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("no solver sort for type `{0}`")]
    UnresolvableType(String),
    #[error("not a term: {0}")]
    NonTermInput(String),
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
    #[error("variable {0} has no type in the context")]
    UnboundVariable(String),
}
