//! The transfer predicate on statement shapes, universal transfer and its
//! level-limited variants.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{
    assignments, classify_prefix, eval_delta0, eval_direct, BoundStatement, Compiled, Env, EvalError, Formula,
    Quantifier, SetParam, Shape, Statement,
};
use crate::model::{HyperModel, Level};
use crate::omega::DEFAULT_ARITY_CAP;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("transfer is not defined for the prefix `{0}`")]
    ShapeNotCovered(String),
    #[error("{arity} standard parameters exceed the cap of {cap}")]
    ArityCap { arity: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransferVerdict {
    pub shape: Shape,
    pub trivial: bool,
    pub holds: bool,
    /// Prefix values explaining the verdict. On failure: the universe-level
    /// evidence that breaks the implication. On success of an existential
    /// shape: the least low-level witness, if any.
    pub witness: Option<Vec<u64>>,
}

impl TransferVerdict {
    fn trivial(shape: Shape) -> Self {
        TransferVerdict { shape, trivial: true, holds: true, witness: None }
    }
}

/// Exclusive bound on the numbers that are `n`-finite: `t_{level(n)}`, or the
/// whole universe when `n` is at the top level.
pub fn n_finite_bound(model: &HyperModel, n: u64) -> u64 {
    let level = model.thresholds().iter().position(|&t| n < t).map(Level::Finite).unwrap_or(Level::Top);
    model.level_bound(level)
}

fn least<E>(end: u64, mut f: impl FnMut(u64) -> Result<bool, E>) -> Result<Option<u64>, E> {
    for v in 0..end {
        if f(v)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

fn prefix_text(sig: &[(Quantifier, Level)]) -> String {
    sig.iter().map(|(q, l)| format!("{q} {l}")).collect::<Vec<_>>().join(", ")
}

/// Membership in T for an arbitrary prefix over a matrix closure. The closure
/// receives the prefix values in order.
pub fn in_t_with<E: From<TransferError>>(
    model: &HyperModel,
    sig: &[(Quantifier, Level)],
    matrix: &mut dyn FnMut(&[u64]) -> Result<bool, E>,
) -> Result<TransferVerdict, E> {
    use Quantifier::{Exists, Forall};
    let shape = classify_prefix(sig);
    let t0 = model.standard_bound();
    let t1 = model.first_extension_bound();
    let all = model.max_element() + 1;
    let mut one = |n: u64| matrix(&[n]);
    let verdict = match shape {
        Shape::Delta0 | Shape::Sigma1Std => TransferVerdict::trivial(shape),
        Shape::Pi1 => universal(shape, t0, all, &mut one)?,
        Shape::Sigma1Star => {
            let w = least(all, &mut one)?;
            let holds = w.map_or(true, |n| n < t1);
            TransferVerdict { shape, trivial: false, holds, witness: w.map(|n| vec![n]) }
        }
        Shape::Pi2 => {
            let antecedent = least(t0, |n| Ok::<bool, E>(least(t0, |m| matrix(&[n, m]))?.is_none()))?.is_none();
            let failure = least(all, |n| Ok::<bool, E>(least(n_finite_bound(model, n), |m| matrix(&[n, m]))?.is_none()))?;
            TransferVerdict { shape, trivial: false, holds: !antecedent || failure.is_none(), witness: failure.map(|n| vec![n]) }
        }
        Shape::Sigma2 => {
            let w = least(all, |n| Ok::<bool, E>(least(all, |m| Ok::<bool, E>(!matrix(&[n, m])?))?.is_none()))?;
            let holds = w.map_or(true, |n| n < t1);
            TransferVerdict { shape, trivial: false, holds, witness: w.map(|n| vec![n]) }
        }
        Shape::Other => match sig {
            [(Exists, Level::Finite(_))] | [(Forall, Level::Top)] => TransferVerdict::trivial(shape),
            [(Forall, Level::Finite(k))] => universal(shape, model.level_bound(Level::Finite(*k)), all, &mut one)?,
            _ => return Err(TransferError::ShapeNotCovered(prefix_text(sig)).into()),
        },
    };
    Ok(verdict)
}

/// `(ALL n < low) phi -> (ALL n < high) phi`.
fn universal<E>(
    shape: Shape,
    low: u64,
    high: u64,
    phi: &mut dyn FnMut(u64) -> Result<bool, E>,
) -> Result<TransferVerdict, E> {
    let failure = least(high, |n| Ok(!phi(n)?))?;
    let holds = failure.map_or(true, |n| n < low);
    Ok(TransferVerdict { shape, trivial: false, holds, witness: failure.map(|n| vec![n]) })
}

/// Membership in T of a statement whose parameters are all assigned.
pub fn in_t(model: &HyperModel, stmt: &Statement) -> Result<TransferVerdict, TransferError> {
    let sig = stmt.signature();
    if classify_prefix(&sig) == Shape::Other {
        // reject uncovered shapes before asking for parameter values
        in_t_with::<TransferError>(model, &sig, &mut |_| Ok(true))?;
    }
    let bound = BoundStatement::new(model, stmt)?;
    in_t_with(model, &sig, &mut |v: &[u64]| Ok::<bool, TransferError>(bound.matrix(v)?))
}

/// A failure of universal transfer: standard parameter values and the least
/// `n` at which `phi` fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pi1Failure {
    pub params: BTreeMap<String, u64>,
    pub n: u64,
}

/// `(ALL n in N) phi -> (ALL n in level) phi` for every standard assignment of
/// the other free variables. Returns the first failure in lexicographic order
/// of the parameters.
pub fn pi1_trans_detail(
    model: &HyperModel,
    phi: &Formula,
    var: &str,
    level: Level,
) -> Result<Option<Pi1Failure>, TransferError> {
    let params: Vec<String> = phi.free_vars().into_iter().filter(|v| v != var).collect();
    if params.len() > DEFAULT_ARITY_CAP {
        return Err(TransferError::ArityCap { arity: params.len(), cap: DEFAULT_ARITY_CAP });
    }
    let mut inputs = params.clone();
    inputs.push(var.to_string());
    let compiled = Compiled::plain(model, phi, &inputs)?;
    let t0 = model.standard_bound();
    let high = model.level_bound(level);
    let k = params.len();
    let mut args = vec![0; k + 1];
    for a in assignments(k, t0) {
        args[..k].copy_from_slice(&a);
        let mut at = |n: u64| {
            args[k] = n;
            compiled.eval(&args)
        };
        if let Some(n) = least(high, |n| Ok::<bool, EvalError>(!at(n)?))? {
            if n < t0 {
                continue;
            }
            return Ok(Some(Pi1Failure { params: params.iter().cloned().zip(a).collect(), n }));
        }
    }
    Ok(None)
}

/// Universal transfer for `phi` in `var`, all other free variables standard.
pub fn pi1_trans(model: &HyperModel, phi: &Formula, var: &str) -> Result<bool, TransferError> {
    Ok(pi1_trans_detail(model, phi, var, Level::Top)?.is_none())
}

/// Universal transfer limited to `N_k`: `(ALL n < t_0) phi -> (ALL n < t_k) phi`.
pub fn pi1_trans_level(model: &HyperModel, phi: &Formula, var: &str, level: Level) -> Result<bool, TransferError> {
    Ok(pi1_trans_detail(model, phi, var, level)?.is_none())
}

/// Checks that a bounded formula has the same truth value under the standard
/// and the starred reading for every standard assignment of its free
/// variables. The two readings are computed by independent evaluators.
pub fn delta0_trans_check(
    model: &HyperModel,
    phi: &Formula,
    sets: &BTreeMap<String, SetParam>,
) -> Result<bool, TransferError> {
    let vars: Vec<String> = phi.free_vars().into_iter().collect();
    if vars.len() > DEFAULT_ARITY_CAP {
        return Err(TransferError::ArityCap { arity: vars.len(), cap: DEFAULT_ARITY_CAP });
    }
    for a in assignments(vars.len(), model.standard_bound()) {
        let env = Env { vars: vars.iter().cloned().zip(a).collect(), sets: sets.clone() };
        if eval_delta0(model, phi, &env)? != eval_direct(model, phi, &env)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, parse_statement};

    fn m() -> HyperModel {
        HyperModel::default_model()
    }

    fn t(src: &str) -> TransferVerdict {
        in_t(&m(), &parse_statement(src).unwrap()).unwrap()
    }

    #[test]
    fn in_t_examples() {
        let v = t("ALL n in N . n <= 2048");
        assert_eq!((v.shape, v.trivial, v.holds), (Shape::Pi1, false, true));
        let v = t("ALL n in N . n < 16");
        assert_eq!((v.shape, v.holds, v.witness), (Shape::Pi1, false, Some(vec![16])));
        let v = t("EX n in *N . n = 100");
        assert_eq!((v.shape, v.holds, v.witness), (Shape::Sigma1Star, true, Some(vec![100])));
        let v = t("EX n in *N . n = 500");
        assert!(!v.holds);
    }

    #[test]
    fn trivial_shapes() {
        for src in ["EX n in N . n = 5", "EX n in N1 . n = 100", "0 = 1", "ALL n in *N . n < 3"] {
            let v = t(src);
            assert!(v.trivial && v.holds, "{src}");
        }
        let e = in_t(&m(), &parse_statement("EX n in N . ALL m in N . m = n").unwrap()).unwrap_err();
        assert!(matches!(e, TransferError::ShapeNotCovered(_)));
    }

    #[test]
    fn level_universal_transfers_to_the_top() {
        let v = t("ALL n in N1 . n < 128");
        assert_eq!((v.shape, v.trivial, v.holds), (Shape::Other, false, false));
        assert!(t("ALL n in N1 . n < 4000").holds);
    }

    #[test]
    fn pi2_uses_n_finite_witnesses() {
        let v = t("ALL n in N . EX m in N . n < 16 & m = 0");
        assert!(!v.holds);
        assert_eq!(v.witness, Some(vec![16]));
        // successor: the standard antecedent already fails at n = 15
        assert!(t("ALL n in N . EX m in N . m = n + 1").holds);
        let v = t("ALL n in N . EX m in N . m <= n");
        assert!(v.holds && v.witness.is_none());
        // vacuous when the standard antecedent fails
        assert!(t("ALL n in N . EX m in N . m = n + 100").holds);
    }

    #[test]
    fn sigma2() {
        let v = t("EX n in *N . ALL m in *N . m <= n");
        assert_eq!((v.holds, v.witness), (false, Some(vec![2048])));
        let v = t("EX n in *N . ALL m in *N . n <= m");
        assert_eq!((v.holds, v.witness), (true, Some(vec![0])));
    }

    #[test]
    fn n_finite_reading() {
        assert_eq!(n_finite_bound(&m(), 3), 16);
        assert_eq!(n_finite_bound(&m(), 16), 128);
        assert_eq!(n_finite_bound(&m(), 500), 2049);
    }

    #[test]
    fn pi1_examples() {
        let f = |s: &str| parse_formula(s).unwrap();
        assert!(pi1_trans(&m(), &f("0 <= n"), "n").unwrap());
        assert!(!pi1_trans(&m(), &f("n < 16"), "n").unwrap());
        assert!(pi1_trans(&m(), &f("(EX k <= n . 2 * k = n) | (EX k <= n . 2 * k + 1 = n)"), "n").unwrap());
        assert!(pi1_trans_level(&m(), &f("n < 128"), "n", Level::Finite(1)).unwrap());
        assert!(!pi1_trans(&m(), &f("n < 128"), "n").unwrap());
        assert!(!pi1_trans_level(&m(), &f("n < 16"), "n", Level::Finite(1)).unwrap());
        assert!(pi1_trans_level(&m(), &f("0 = 0"), "n", Level::Finite(1)).unwrap());
        let fail = pi1_trans_detail(&m(), &f("n < x + 20"), "n", Level::Top).unwrap().unwrap();
        assert_eq!(fail.params["x"], 0);
        assert_eq!(fail.n, 20);
    }

    #[test]
    fn delta0_transfer_examples() {
        let mut sets = BTreeMap::new();
        sets.insert("X".to_string(), SetParam::from_members(16, &[2]));
        assert!(delta0_trans_check(&m(), &parse_formula("n in X").unwrap(), &sets).unwrap());
        let two = Env::new().with("n", 2).with_set("X", SetParam::from_members(16, &[2]));
        assert!(eval_delta0(&m(), &parse_formula("n in X").unwrap(), &two).unwrap());
        let zero = Env::new().with("n", 0).with_set("X", SetParam::from_members(16, &[]));
        assert!(!eval_delta0(&m(), &parse_formula("n in X").unwrap(), &zero).unwrap());
        assert!(delta0_trans_check(&m(), &parse_formula("EX k <= 2^n . k * k = n + x").unwrap(), &BTreeMap::new()).unwrap());
    }
}
