//! Truth of bounded formulas and statements in a [`HyperModel`].
//!
//! Terms evaluate to exact naturals. Only the ranges of bounded quantifiers are
//! clamped to the universe: `(Q v <= t)` ranges over `[0, min(t, M)]`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use super::ast::{Formula, Quantifier, Statement, Term};
use crate::model::HyperModel;

/// Exponents of `2^t` above this are refused rather than materialised.
pub const MAX_POW2_EXPONENT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` has no value")]
    UnboundVariable(String),
    #[error("set parameter `{0}` has no value")]
    UnboundSet(String),
    #[error("parameter `{0}` is declared but not assigned")]
    UnassignedParameter(String),
    #[error("2^{exponent} is too large to evaluate exactly")]
    TermTooLarge { exponent: String },
}

/// An exact natural with a machine-word fast path. `Big` only holds values
/// above `u64::MAX`, so the derived ordering is numeric.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Small(u64),
    Big(BigUint),
}

impl Value {
    fn from_big(b: BigUint) -> Value {
        match b.to_u64() {
            Some(v) => Value::Small(v),
            None => Value::Big(b),
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match self {
            Value::Small(v) => BigUint::from(*v),
            Value::Big(b) => b.clone(),
        }
    }

    pub fn add(&self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Small(a), Value::Small(b)) => match a.checked_add(*b) {
                Some(v) => Value::Small(v),
                None => Value::Big(BigUint::from(*a) + *b),
            },
            _ => Value::from_big(self.to_biguint() + rhs.to_biguint()),
        }
    }

    pub fn mul(&self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Small(a), Value::Small(b)) => match a.checked_mul(*b) {
                Some(v) => Value::Small(v),
                None => Value::Big(BigUint::from(*a) * *b),
            },
            _ => Value::from_big(self.to_biguint() * rhs.to_biguint()),
        }
    }

    pub fn monus(&self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Small(a), Value::Small(b)) => Value::Small(a.saturating_sub(*b)),
            _ if self <= rhs => Value::Small(0),
            _ => Value::from_big(self.to_biguint() - rhs.to_biguint()),
        }
    }

    pub fn pow2(&self) -> Result<Value, EvalError> {
        match self {
            Value::Small(e) if *e < 64 => Ok(Value::Small(1u64 << e)),
            Value::Small(e) if *e <= MAX_POW2_EXPONENT => Ok(Value::Big(BigUint::from(1u8) << *e)),
            other => Err(EvalError::TermTooLarge { exponent: other.to_string() }),
        }
    }

    /// `min(self, cap)` as a machine word.
    pub fn clamp_to(&self, cap: u64) -> u64 {
        match self {
            Value::Small(v) => (*v).min(cap),
            Value::Big(_) => cap,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Small(v) => v.fmt(f),
            Value::Big(b) => b.fmt(f),
        }
    }
}

/// A set of naturals given by a characteristic bit-vector over `[0, bits.len())`
/// and one default bit for everything above.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SetParam {
    pub bits: Vec<bool>,
    pub default: bool,
}

impl SetParam {
    pub fn new(bits: Vec<bool>, default: bool) -> Self {
        SetParam { bits, default }
    }

    /// The finite set `members` encoded over `[0, width)`.
    pub fn from_members(width: u64, members: &[u64]) -> Self {
        let bits = (0..width).map(|i| members.contains(&i)).collect();
        SetParam { bits, default: false }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match v {
            Value::Small(i) if (*i as usize) < self.bits.len() && *i < usize::MAX as u64 => self.bits[*i as usize],
            _ => self.default,
        }
    }

    pub fn members(&self) -> Vec<u64> {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i as u64).collect()
    }
}

/// Values for free variables and set parameters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    pub vars: BTreeMap<String, u64>,
    pub sets: BTreeMap<String, SetParam>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn with(mut self, name: &str, value: u64) -> Self {
        self.vars.insert(name.to_string(), value);
        self
    }

    pub fn with_set(mut self, name: &str, set: SetParam) -> Self {
        self.sets.insert(name.to_string(), set);
        self
    }
}

// ---- compiled evaluation ----

#[derive(Debug, Clone)]
enum CTerm {
    Slot(usize),
    Const(Value),
    Add(Box<CTerm>, Box<CTerm>),
    Mul(Box<CTerm>, Box<CTerm>),
    Monus(Box<CTerm>, Box<CTerm>),
    Pow2(Box<CTerm>),
    Ind(Box<CFormula>),
}

#[derive(Debug, Clone)]
enum CFormula {
    Eq(CTerm, CTerm),
    Le(CTerm, CTerm),
    Lt(CTerm, CTerm),
    Member(CTerm, usize),
    Not(Box<CFormula>),
    And(Box<CFormula>, Box<CFormula>),
    Or(Box<CFormula>, Box<CFormula>),
    Implies(Box<CFormula>, Box<CFormula>),
    Bounded { exists: bool, slot: usize, bound: CTerm, body: Box<CFormula> },
}

/// A formula with its variables resolved to slot indices. The first
/// `arity()` slots are the inputs, in the order given to [`Compiled::new`].
#[derive(Debug, Clone)]
pub struct Compiled {
    root: CFormula,
    inputs: Vec<String>,
    slots: usize,
    sets: Vec<SetParam>,
    max: u64,
}

struct Compiler<'a> {
    scope: Vec<String>,
    set_names: Vec<String>,
    set_source: &'a BTreeMap<String, SetParam>,
    sets: Vec<SetParam>,
    high_water: usize,
}

impl Compiler<'_> {
    fn lookup(&self, v: &str) -> Result<usize, EvalError> {
        self.scope.iter().rposition(|s| s == v).ok_or_else(|| EvalError::UnboundVariable(v.to_string()))
    }

    fn term(&mut self, t: &Term) -> Result<CTerm, EvalError> {
        Ok(match t {
            Term::Var(v) => CTerm::Slot(self.lookup(v)?),
            Term::Const(c) => CTerm::Const(Value::from_big(c.clone())),
            Term::Add(a, b) => CTerm::Add(Box::new(self.term(a)?), Box::new(self.term(b)?)),
            Term::Mul(a, b) => CTerm::Mul(Box::new(self.term(a)?), Box::new(self.term(b)?)),
            Term::Monus(a, b) => CTerm::Monus(Box::new(self.term(a)?), Box::new(self.term(b)?)),
            Term::Pow2(a) => CTerm::Pow2(Box::new(self.term(a)?)),
            Term::Indicator(phi) => CTerm::Ind(Box::new(self.formula(phi)?)),
        })
    }

    fn set(&mut self, name: &str) -> Result<usize, EvalError> {
        if let Some(i) = self.set_names.iter().position(|s| s == name) {
            return Ok(i);
        }
        let value = self.set_source.get(name).ok_or_else(|| EvalError::UnboundSet(name.to_string()))?;
        self.set_names.push(name.to_string());
        self.sets.push(value.clone());
        Ok(self.sets.len() - 1)
    }

    fn formula(&mut self, phi: &Formula) -> Result<CFormula, EvalError> {
        let bin = |c: &mut Self, a: &Formula, b: &Formula| -> Result<(Box<CFormula>, Box<CFormula>), EvalError> {
            Ok((Box::new(c.formula(a)?), Box::new(c.formula(b)?)))
        };
        Ok(match phi {
            Formula::Eq(a, b) => CFormula::Eq(self.term(a)?, self.term(b)?),
            Formula::Le(a, b) => CFormula::Le(self.term(a)?, self.term(b)?),
            Formula::Lt(a, b) => CFormula::Lt(self.term(a)?, self.term(b)?),
            Formula::Member(t, x) => CFormula::Member(self.term(t)?, self.set(x)?),
            Formula::Not(a) => CFormula::Not(Box::new(self.formula(a)?)),
            Formula::And(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CFormula::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CFormula::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(self, a, b)?;
                CFormula::Implies(a, b)
            }
            Formula::Bounded { quant, var, bound, body } => {
                let bound = self.term(bound)?;
                let slot = self.scope.len();
                self.scope.push(var.clone());
                self.high_water = self.high_water.max(self.scope.len());
                let body = self.formula(body)?;
                self.scope.pop();
                CFormula::Bounded { exists: *quant == Quantifier::Exists, slot, bound, body: Box::new(body) }
            }
        })
    }
}

impl Compiled {
    /// Compiles `phi` with `inputs` as its input slots. Every free variable must
    /// be an input and every set name must be in `sets`.
    pub fn new(
        model: &HyperModel,
        phi: &Formula,
        inputs: &[String],
        sets: &BTreeMap<String, SetParam>,
    ) -> Result<Compiled, EvalError> {
        let mut c = Compiler {
            scope: inputs.to_vec(),
            set_names: Vec::new(),
            set_source: sets,
            sets: Vec::new(),
            high_water: inputs.len(),
        };
        let root = c.formula(phi)?;
        Ok(Compiled { root, inputs: inputs.to_vec(), slots: c.high_water, sets: c.sets, max: model.max_element() })
    }

    /// Compiles with no set parameters.
    pub fn plain(model: &HyperModel, phi: &Formula, inputs: &[String]) -> Result<Compiled, EvalError> {
        Compiled::new(model, phi, inputs, &BTreeMap::new())
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    /// Scratch space of the right size for [`Compiled::eval_slots`].
    pub fn scratch(&self) -> Vec<u64> {
        vec![0; self.slots.max(1)]
    }

    /// Evaluates with the inputs already written to `slots[..arity]`.
    pub fn eval_slots(&self, slots: &mut [u64]) -> Result<bool, EvalError> {
        match self.fast(&self.root, slots) {
            Some(b) => Ok(b),
            None => self.formula(&self.root, slots),
        }
    }

    pub fn eval(&self, args: &[u64]) -> Result<bool, EvalError> {
        debug_assert_eq!(args.len(), self.arity());
        let mut slots = self.scratch();
        slots[..args.len()].copy_from_slice(args);
        self.eval_slots(&mut slots)
    }

    fn term(&self, t: &CTerm, slots: &mut [u64]) -> Result<Value, EvalError> {
        Ok(match t {
            CTerm::Slot(i) => Value::Small(slots[*i]),
            CTerm::Const(v) => v.clone(),
            CTerm::Add(a, b) => self.term(a, slots)?.add(&self.term(b, slots)?),
            CTerm::Mul(a, b) => self.term(a, slots)?.mul(&self.term(b, slots)?),
            CTerm::Monus(a, b) => self.term(a, slots)?.monus(&self.term(b, slots)?),
            CTerm::Pow2(a) => self.term(a, slots)?.pow2()?,
            CTerm::Ind(phi) => Value::Small(u64::from(self.formula(phi, slots)?)),
        })
    }

    /// Word-sized value of `t`, or `None` when it overflows or needs the
    /// general path.
    fn small(t: &CTerm, slots: &[u64]) -> Option<u64> {
        match t {
            CTerm::Slot(i) => Some(slots[*i]),
            CTerm::Const(Value::Small(v)) => Some(*v),
            CTerm::Add(a, b) => Self::small(a, slots)?.checked_add(Self::small(b, slots)?),
            CTerm::Mul(a, b) => Self::small(a, slots)?.checked_mul(Self::small(b, slots)?),
            CTerm::Monus(a, b) => Some(Self::small(a, slots)?.saturating_sub(Self::small(b, slots)?)),
            CTerm::Pow2(a) => Self::small(a, slots).filter(|e| *e < 64).map(|e| 1u64 << e),
            CTerm::Const(Value::Big(_)) | CTerm::Ind(_) => None,
        }
    }

    fn small_ind(&self, t: &CTerm, slots: &mut [u64]) -> Option<u64> {
        Some(match t {
            CTerm::Slot(i) => slots[*i],
            CTerm::Const(Value::Small(v)) => *v,
            CTerm::Add(a, b) => self.small_ind(a, slots)?.checked_add(self.small_ind(b, slots)?)?,
            CTerm::Mul(a, b) => self.small_ind(a, slots)?.checked_mul(self.small_ind(b, slots)?)?,
            CTerm::Monus(a, b) => self.small_ind(a, slots)?.saturating_sub(self.small_ind(b, slots)?),
            CTerm::Pow2(a) => match self.small_ind(a, slots)? {
                e if e < 64 => 1u64 << e,
                _ => return None,
            },
            CTerm::Ind(phi) => u64::from(self.fast(phi, slots)?),
            CTerm::Const(Value::Big(_)) => return None,
        })
    }

    /// Evaluation in machine words. `None` means some intermediate value left
    /// `u64` and the general path has to decide.
    fn fast(&self, phi: &CFormula, slots: &mut [u64]) -> Option<bool> {
        Some(match phi {
            CFormula::Eq(a, b) => self.small_ind(a, slots)? == self.small_ind(b, slots)?,
            CFormula::Le(a, b) => self.small_ind(a, slots)? <= self.small_ind(b, slots)?,
            CFormula::Lt(a, b) => self.small_ind(a, slots)? < self.small_ind(b, slots)?,
            CFormula::Member(t, x) => self.sets[*x].contains(&Value::Small(self.small_ind(t, slots)?)),
            CFormula::Not(a) => !self.fast(a, slots)?,
            CFormula::And(a, b) => self.fast(a, slots)? && self.fast(b, slots)?,
            CFormula::Or(a, b) => self.fast(a, slots)? || self.fast(b, slots)?,
            CFormula::Implies(a, b) => !self.fast(a, slots)? || self.fast(b, slots)?,
            CFormula::Bounded { exists, slot, bound, body } => {
                let hi = self.small_ind(bound, slots)?.min(self.max);
                let mut v = 0;
                loop {
                    slots[*slot] = v;
                    if self.fast(body, slots)? == *exists {
                        return Some(*exists);
                    }
                    if v == hi {
                        return Some(!*exists);
                    }
                    v += 1;
                }
            }
        })
    }

    fn compare(&self, a: &CTerm, b: &CTerm, slots: &mut [u64]) -> Result<Ordering, EvalError> {
        if let (Some(x), Some(y)) = (Self::small(a, slots), Self::small(b, slots)) {
            return Ok(x.cmp(&y));
        }
        Ok(self.term(a, slots)?.cmp(&self.term(b, slots)?))
    }

    fn formula(&self, phi: &CFormula, slots: &mut [u64]) -> Result<bool, EvalError> {
        Ok(match phi {
            CFormula::Eq(a, b) => self.compare(a, b, slots)?.is_eq(),
            CFormula::Le(a, b) => self.compare(a, b, slots)?.is_le(),
            CFormula::Lt(a, b) => self.compare(a, b, slots)?.is_lt(),
            CFormula::Member(t, x) => self.sets[*x].contains(&self.term(t, slots)?),
            CFormula::Not(a) => !self.formula(a, slots)?,
            CFormula::And(a, b) => self.formula(a, slots)? && self.formula(b, slots)?,
            CFormula::Or(a, b) => self.formula(a, slots)? || self.formula(b, slots)?,
            CFormula::Implies(a, b) => !self.formula(a, slots)? || self.formula(b, slots)?,
            CFormula::Bounded { exists, slot, bound, body } => {
                let hi = match Self::small(bound, slots) {
                    Some(v) => v.min(self.max),
                    None => self.term(bound, slots)?.clamp_to(self.max),
                };
                let mut v = 0;
                loop {
                    slots[*slot] = v;
                    if self.formula(body, slots)? == *exists {
                        return Ok(*exists);
                    }
                    if v == hi {
                        return Ok(!*exists);
                    }
                    v += 1;
                }
            }
        })
    }
}

/// Truth of `phi` in `model` under `env`, which must cover the free variables.
pub fn eval_delta0(model: &HyperModel, phi: &Formula, env: &Env) -> Result<bool, EvalError> {
    let inputs: Vec<String> = phi.free_vars().into_iter().collect();
    let args = inputs
        .iter()
        .map(|v| env.vars.get(v).copied().ok_or_else(|| EvalError::UnboundVariable(v.clone())))
        .collect::<Result<Vec<u64>, _>>()?;
    Compiled::new(model, phi, &inputs, &env.sets)?.eval(&args)
}

// ---- direct evaluation ----

/// Evaluates by walking the syntax tree with a name-indexed environment.
/// Slower than [`eval_delta0`]; kept as a second, structurally different
/// evaluation route.
pub fn eval_direct(model: &HyperModel, phi: &Formula, env: &Env) -> Result<bool, EvalError> {
    let mut stack: Vec<(String, u64)> = env.vars.iter().map(|(k, v)| (k.clone(), *v)).collect();
    direct_formula(model, phi, &mut stack, &env.sets)
}

fn direct_lookup(stack: &[(String, u64)], v: &str) -> Result<u64, EvalError> {
    stack
        .iter()
        .rev()
        .find(|(k, _)| k == v)
        .map(|(_, val)| *val)
        .ok_or_else(|| EvalError::UnboundVariable(v.to_string()))
}

fn direct_term(
    model: &HyperModel,
    t: &Term,
    stack: &mut Vec<(String, u64)>,
    sets: &BTreeMap<String, SetParam>,
) -> Result<Value, EvalError> {
    Ok(match t {
        Term::Var(v) => Value::Small(direct_lookup(stack, v)?),
        Term::Const(c) => Value::from_big(c.clone()),
        Term::Add(a, b) => direct_term(model, a, stack, sets)?.add(&direct_term(model, b, stack, sets)?),
        Term::Mul(a, b) => direct_term(model, a, stack, sets)?.mul(&direct_term(model, b, stack, sets)?),
        Term::Monus(a, b) => direct_term(model, a, stack, sets)?.monus(&direct_term(model, b, stack, sets)?),
        Term::Pow2(a) => direct_term(model, a, stack, sets)?.pow2()?,
        Term::Indicator(phi) => Value::Small(u64::from(direct_formula(model, phi, stack, sets)?)),
    })
}

fn direct_formula(
    model: &HyperModel,
    phi: &Formula,
    stack: &mut Vec<(String, u64)>,
    sets: &BTreeMap<String, SetParam>,
) -> Result<bool, EvalError> {
    Ok(match phi {
        Formula::Eq(a, b) => direct_term(model, a, stack, sets)? == direct_term(model, b, stack, sets)?,
        Formula::Le(a, b) => direct_term(model, a, stack, sets)? <= direct_term(model, b, stack, sets)?,
        Formula::Lt(a, b) => direct_term(model, a, stack, sets)? < direct_term(model, b, stack, sets)?,
        Formula::Member(t, x) => {
            let set = sets.get(x).ok_or_else(|| EvalError::UnboundSet(x.clone()))?;
            set.contains(&direct_term(model, t, stack, sets)?)
        }
        Formula::Not(a) => !direct_formula(model, a, stack, sets)?,
        Formula::And(a, b) => {
            let l = direct_formula(model, a, stack, sets)?;
            l && direct_formula(model, b, stack, sets)?
        }
        Formula::Or(a, b) => {
            let l = direct_formula(model, a, stack, sets)?;
            l || direct_formula(model, b, stack, sets)?
        }
        Formula::Implies(a, b) => {
            let l = direct_formula(model, a, stack, sets)?;
            !l || direct_formula(model, b, stack, sets)?
        }
        Formula::Bounded { quant, var, bound, body } => {
            let hi = direct_term(model, bound, stack, sets)?.clamp_to(model.max_element());
            let want = *quant == Quantifier::Exists;
            let mut found = !want;
            for v in 0..=hi {
                stack.push((var.clone(), v));
                let r = direct_formula(model, body, stack, sets);
                stack.pop();
                if r? == want {
                    found = want;
                    break;
                }
            }
            found
        }
    })
}

// ---- statements ----

/// A statement with its parameters fixed and its matrix compiled. The matrix
/// inputs are the prefix variables in prefix order.
#[derive(Debug, Clone)]
pub struct BoundStatement {
    compiled: Compiled,
    params: Vec<u64>,
}

impl BoundStatement {
    pub fn new(model: &HyperModel, stmt: &Statement) -> Result<Self, EvalError> {
        let mut inputs: Vec<String> = Vec::new();
        let mut params = Vec::new();
        for (name, value) in &stmt.params {
            inputs.push(name.clone());
            params.push(value.ok_or_else(|| EvalError::UnassignedParameter(name.clone()))?);
        }
        inputs.extend(stmt.prefix.iter().map(|b| b.var.clone()));
        let compiled = Compiled::plain(model, &stmt.matrix, &inputs)?;
        Ok(BoundStatement { compiled, params })
    }

    /// The matrix at the given values of the prefix variables.
    pub fn matrix(&self, prefix_values: &[u64]) -> Result<bool, EvalError> {
        let mut slots = self.compiled.scratch();
        slots[..self.params.len()].copy_from_slice(&self.params);
        slots[self.params.len()..self.params.len() + prefix_values.len()].copy_from_slice(prefix_values);
        self.compiled.eval_slots(&mut slots)
    }
}

/// Tarskian truth: a quantifier over `N_k` ranges over `[0, t_k)`, over `*N`
/// over `[0, M]`.
pub fn eval_statement(model: &HyperModel, stmt: &Statement) -> Result<bool, EvalError> {
    let bound = BoundStatement::new(model, stmt)?;
    let ranges: Vec<(Quantifier, u64)> =
        stmt.prefix.iter().map(|b| (b.quant, model.level_bound(b.sort))).collect();
    let mut values = Vec::with_capacity(ranges.len());
    quantify(&ranges, &mut values, &mut |vals| bound.matrix(vals))
}

/// Evaluates a prefix of `(quantifier, exclusive upper bound)` pairs over a
/// matrix closure.
pub fn quantify<E>(
    ranges: &[(Quantifier, u64)],
    values: &mut Vec<u64>,
    matrix: &mut dyn FnMut(&[u64]) -> Result<bool, E>,
) -> Result<bool, E> {
    let Some(((quant, end), rest)) = ranges.split_first() else {
        return matrix(values);
    };
    let want = *quant == Quantifier::Exists;
    for v in 0..*end {
        values.push(v);
        let r = quantify(rest, values, matrix);
        values.pop();
        if r? == want {
            return Ok(want);
        }
    }
    Ok(!want)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, parse_statement};

    fn m() -> HyperModel {
        HyperModel::default_model()
    }

    fn ev(src: &str, env: &Env) -> bool {
        let phi = parse_formula(src).unwrap();
        let a = eval_delta0(&m(), &phi, env).unwrap();
        assert_eq!(a, eval_direct(&m(), &phi, env).unwrap(), "routes disagree on {src}");
        a
    }

    #[test]
    fn spec_examples() {
        assert!(ev("EX n <= 10 . n * n = 49", &Env::new()));
        assert!(ev("ALL n <= w . n <= w", &Env::new().with("w", 2048)));
        assert!(ev("EX n <= w . 2^n = w", &Env::new().with("w", 1024)));
        assert!(!ev("EX n <= w . 2^n = w", &Env::new().with("w", 1000)));
    }

    #[test]
    fn ranges_are_clamped_but_terms_are_exact() {
        // the bound 2^w is astronomically large; the range stops at M
        assert!(ev("ALL n <= 2^w . n <= 2048", &Env::new().with("w", 2048)));
        assert!(ev("2^(w -. 1) < 2^w", &Env::new().with("w", 2048)));
        assert!(ev("2^64 = 2^63 + 2^63", &Env::new()));
        assert!(ev("3 -. 5 = 0", &Env::new()));
    }

    #[test]
    fn indicator_and_sets() {
        assert!(ev("ind(3 < 4) + ind(4 < 3) = 1", &Env::new()));
        let x = SetParam::from_members(16, &[2]);
        let env = Env::new().with_set("X", x).with("n", 2);
        assert!(ev("n in X", &env));
        assert!(!ev("n + 1 in X", &env));
        let cofinite = SetParam::new(vec![false; 16], true);
        assert!(ev("100 in X", &Env::new().with_set("X", cofinite)));
    }

    #[test]
    fn missing_bindings() {
        let phi = parse_formula("n = 1").unwrap();
        assert_eq!(eval_delta0(&m(), &phi, &Env::new()), Err(EvalError::UnboundVariable("n".into())));
        let phi = parse_formula("1 in Y").unwrap();
        assert_eq!(eval_delta0(&m(), &phi, &Env::new()), Err(EvalError::UnboundSet("Y".into())));
        let phi = parse_formula("2^(2^30) = 1").unwrap();
        assert!(matches!(eval_delta0(&m(), &phi, &Env::new()), Err(EvalError::TermTooLarge { .. })));
    }

    #[test]
    fn statements() {
        let t = |s: &str| eval_statement(&m(), &parse_statement(s).unwrap()).unwrap();
        assert!(t("ALL n in N . n < 16"));
        assert!(!t("ALL n in *N . n < 16"));
        assert!(t("EX n in N1 . n = 100"));
        assert!(t("ALL n in N . EX m in N . n <= m"));
        assert!(!t("ALL n in N . EX m in N . n < m"));
        let s = parse_statement("ALL n in N . 0 <= n").unwrap().with_param("k", None);
        assert_eq!(eval_statement(&m(), &s), Err(EvalError::UnassignedParameter("k".into())));
    }
}
