use thiserror::Error;

use crate::families::{Const, FamilyTag};
use crate::types::ParamSet;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{tag}: constant {constant} is required but missing")]
    MissingConstant { tag: FamilyTag, constant: Const },

    #[error("{tag}: constant {constant} must be nonzero (its inverse appears in the family)")]
    ZeroConstantRequiringInverse { tag: FamilyTag, constant: Const },

    #[error("{tag}: constant {constant} is not a parameter of this family")]
    UnexpectedConstant { tag: FamilyTag, constant: Const },

    #[error("{tag}: expected {expected} base vectors, got {got}")]
    BaseCount {
        tag: FamilyTag,
        expected: usize,
        got: usize,
    },

    #[error("{tag}: base vector is zero, no rank-1 restriction exists")]
    DegenerateBase { tag: FamilyTag },

    #[error("{tag}: generic rank is {rank}, rank-1 restriction applies to rank-2 families only")]
    NotRankTwo { tag: FamilyTag, rank: usize },

    #[error("{tag}: product left the family (residual {residual:.3e})")]
    ClosureViolation {
        tag: FamilyTag,
        residual: f64,
        left: Box<ParamSet>,
        right: Box<ParamSet>,
    },
}
