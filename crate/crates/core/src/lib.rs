//! Finite-rank stratified hypernatural models.
//!
//! The universe is `[0, M]` with thresholds `t_0 < t_1 < ... < M`; `[0, t_0)`
//! plays the standard naturals and `[t_k, M]` the `k`-infinite numbers. On top
//! of that: bounded formula evaluation, omega-invariance checking, the
//! transfer predicate, hyperconnectives, exact reals and the reductions
//! between omniscience principles.

pub mod crm;
pub mod demo;
pub mod formula;
pub mod hyperlogic;
pub mod model;
pub mod omega;
pub mod reals;
pub mod report;
pub mod transfer;

use thiserror::Error;

pub use model::{Band, HyperModel, HyperNat, Level, ModelError};

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] formula::ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] formula::EvalError),
    #[error(transparent)]
    Omega(#[from] omega::OmegaError),
    #[error(transparent)]
    Transfer(#[from] transfer::TransferError),
    #[error(transparent)]
    Real(#[from] reals::RealError),
    #[error(transparent)]
    Hyper(#[from] hyperlogic::HyperError),
    #[error(transparent)]
    Crm(#[from] crm::CrmError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

/// How an error should be reported to a caller that distinguishes bad input
/// from a computation that could not proceed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input.
    Usage,
    /// A budget, cap or precondition stopped the computation.
    Precondition,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use crm::CrmError as C;
        use omega::OmegaError as O;
        use reals::RealError as R;
        match self {
            Error::Parse(_) | Error::Model(_) | Error::Usage(_) | Error::Json(_) => ErrorClass::Usage,
            Error::Omega(O::ParamClash(_) | O::StrayVariable(_) | O::Model(_) | O::Arity { .. }) => ErrorClass::Usage,
            Error::Real(R::Syntax(_) | R::UnboundIndicator(..)) => ErrorClass::Usage,
            Error::Crm(C::Input(_)) => ErrorClass::Usage,
            _ => ErrorClass::Precondition,
        }
    }
}
