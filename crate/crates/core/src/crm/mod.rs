//! Reductions between omniscience principles, run as programs.
//!
//! Each reduction treats the assumed principle as an oracle. Every answer an
//! oracle gives is re-checked in the model before it is used; a wrong answer
//! is a [`CrmError::Soundness`] error, a refusal is a negative verdict.

pub mod forms;
pub mod lpo;
pub mod lpr;
pub mod markov;
pub mod mct;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{Compiled, EvalError, Formula, Quantifier, Statement};
use crate::hyperlogic::HyperError;
use crate::model::{HyperModel, Level};
use crate::omega::{OmegaError, DEFAULT_ARITY_CAP};
use crate::reals::RealError;
use crate::transfer::TransferError;

pub use forms::{llpo, llpr, nil, wlpo, wlpo_real};
pub use lpo::{lpo_witness_from_transfer, transfer_from_lpo, transfer_from_lpo_all, OracleLpo, TransferLpo};
pub use lpr::{decide_real_sign, transfer_from_lpr, HonestLpr, OracleLpr, SignDecision};
pub use markov::{mp_from_mpr, mp_reduce, pi1_dne, DneReport, HonestMpr, MpReduction, OracleMpr};
pub use mct::{
    mct_limit, transfer_from_mct, HonestMct, MctAnswer, MctLimit, MctOptions, MonotoneSequence, OracleMct,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrmError {
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error(transparent)]
    Real(#[from] RealError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("oracle answer is unsound: {0}")]
    Soundness(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("truncation artifact: {0}")]
    Truncation(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// A bounded formula `phi(var, params)` read as the statement
/// `EX var in N . phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sigma1Instance {
    pub phi: Formula,
    pub var: String,
    pub params: Vec<String>,
}

impl Sigma1Instance {
    /// Every free variable other than `var` becomes a parameter.
    pub fn new(phi: Formula, var: &str) -> Result<Self, CrmError> {
        let params: Vec<String> = phi.free_vars().into_iter().filter(|v| v != var).collect();
        if params.len() > DEFAULT_ARITY_CAP {
            return Err(CrmError::Input(format!("{} parameters exceed the cap of {DEFAULT_ARITY_CAP}", params.len())));
        }
        Ok(Sigma1Instance { phi, var: var.to_string(), params })
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// `EX var in sort . phi` with the parameters declared but unassigned.
    pub fn statement(&self, sort: Level) -> Statement {
        let mut s = Statement::single(Quantifier::Exists, &self.var, sort, self.phi.clone());
        for p in &self.params {
            s = s.with_param(p, None);
        }
        s
    }

    pub fn values(&self, x: &[u64]) -> BTreeMap<String, u64> {
        self.params.iter().cloned().zip(x.iter().copied()).collect()
    }

    /// `phi` compiled with inputs `params ++ [var]`.
    pub fn compile(&self, model: &HyperModel) -> Result<Compiled, CrmError> {
        let mut inputs = self.params.clone();
        inputs.push(self.var.clone());
        Ok(Compiled::plain(model, &self.phi, &inputs)?)
    }

    fn require_closed(&self) -> Result<(), CrmError> {
        if self.params.is_empty() {
            Ok(())
        } else {
            Err(CrmError::Input(format!("expected a formula in `{}` alone, found parameters {:?}", self.var, self.params)))
        }
    }
}

impl fmt::Display for Sigma1Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EX {} in N . {}", self.var, self.phi)
    }
}

/// Least `n < end` with `phi(x, n)`.
pub(crate) fn least_witness(c: &Compiled, x: &[u64], end: u64) -> Result<Option<u64>, CrmError> {
    let mut args = x.to_vec();
    args.push(0);
    let k = x.len();
    for n in 0..end {
        args[k] = n;
        if c.eval(&args)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// How a reduction reached its verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Path {
    /// The conclusion holds because its hypothesis fails in the model.
    Vacuous,
    /// A standard witness was produced and checked.
    Witness,
    /// The negative side was taken and its transfer evidence checked.
    Negative,
    /// The oracle refused to answer.
    Declined,
    /// The oracle's evidence contradicts the hypothesis; the reduction fails.
    Contradiction,
}

/// Outcome of running one direction of an equivalence proof.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub verdict: bool,
    pub path: Path,
    pub witness: Option<u64>,
    pub note: Option<String>,
}

impl Derivation {
    fn new(verdict: bool, path: Path) -> Self {
        Derivation { verdict, path, witness: None, note: None }
    }

    fn with_witness(mut self, w: u64) -> Self {
        self.witness = Some(w);
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}
