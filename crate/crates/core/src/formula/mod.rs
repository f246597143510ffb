//! Bounded arithmetic formulas and sorted statements: syntax, parsing,
//! printing and evaluation.

mod ast;
mod eval;
mod parse;

pub use ast::{classify_prefix, Binder, Formula, Quantifier, Shape, Statement, Term};
pub use eval::{
    eval_delta0, eval_direct, eval_statement, quantify, BoundStatement, Compiled, Env, EvalError, SetParam, Value,
    MAX_POW2_EXPONENT,
};
pub use parse::{
    parse_formula, parse_formula_file, parse_statement, parse_statement_file, parse_statement_with_params,
    parse_term, ParseError,
};

use crate::model::HyperModel;

/// Shape of a statement's quantifier prefix.
pub fn classify(stmt: &Statement) -> Shape {
    stmt.classify()
}

pub fn star_map(stmt: &Statement) -> Statement {
    stmt.star_map()
}

/// Enumerates every assignment of `arity` values from `[0, bound)` in
/// lexicographic order.
pub fn assignments(arity: usize, bound: u64) -> impl Iterator<Item = Vec<u64>> {
    let total = bound.checked_pow(arity as u32).unwrap_or(u64::MAX);
    (0..total).map(move |mut idx| {
        let mut out = vec![0; arity];
        for slot in out.iter_mut().rev() {
            *slot = idx % bound;
            idx /= bound;
        }
        out
    })
}

/// Convenience: the set of standard parameter assignments of a model.
pub fn standard_assignments(model: &HyperModel, arity: usize) -> impl Iterator<Item = Vec<u64>> {
    assignments(arity, model.standard_bound())
}
