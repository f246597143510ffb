//! Hyperimplication, hypernegation and hyperdisjunction.
//!
//! * `A => B` is `[A & A in T] -> [B & B in T]`,
//! * `~A` is `A => 0 = 1`,
//! * `A v B` (witnessed) holds when an omega-invariant `psi(x, w)` picks, for
//!   every standard `x`, a disjunct that is true and in T,
//! * `A V B` (alternative) is `[A | B] & [A -> A in T] & [B -> B in T]`.
//!
//! T-membership of a hypernegation is the T-membership of its normal form when
//! one exists; every other compound is trivially in T.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{assignments, quantify, BoundStatement, EvalError, Quantifier, Shape, Statement};
use crate::model::{HyperModel, Level};
use crate::omega::OmegaError;
pub use crate::omega::WitnessProcedure;
use crate::reals::{dyadic, ConstructiveReal, Rational};
use crate::transfer::{in_t_with, TransferError, TransferVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperError {
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error("witness procedure has not been verified omega-invariant")]
    UnverifiedWitness,
    #[error("disjunct parameters {found:?} are not among the witness parameters {expected:?}")]
    ArityMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("{0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl From<EvalError> for HyperError {
    fn from(e: EvalError) -> Self {
        HyperError::Transfer(TransferError::Eval(e))
    }
}

/// A pointwise predicate on the sequence of a real.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RealPred {
    /// `q_n > 1/2^n`
    Pos,
    /// `q_n < -1/2^n`
    Neg,
    /// `|q_n| <= 1/2^(n-1)`
    Zero,
}

impl RealPred {
    fn at(self, x: &ConstructiveReal, n: u64) -> bool {
        let q = x.at(n);
        match self {
            RealPred::Pos => q > dyadic(n),
            RealPred::Neg => q < -dyadic(n),
            RealPred::Zero => {
                let b = dyadic(n) * Rational::from_integer(2.into());
                -b.clone() <= q && q <= b
            }
        }
    }
}

/// `Q n in sort . [!] pred(x, n)`.
#[derive(Debug, Clone)]
pub struct RealSentence {
    pub quant: Quantifier,
    pub sort: Level,
    pub pred: RealPred,
    pub negated: bool,
    pub real: ConstructiveReal,
}

impl RealSentence {
    /// `x > 0`: `EX n in N . q_n > 1/2^n`.
    pub fn positive(x: &ConstructiveReal) -> Self {
        RealSentence { quant: Quantifier::Exists, sort: Level::STANDARD, pred: RealPred::Pos, negated: false, real: x.clone() }
    }

    /// `x < 0`: `EX n in N . q_n < -1/2^n`.
    pub fn negative(x: &ConstructiveReal) -> Self {
        RealSentence { pred: RealPred::Neg, ..RealSentence::positive(x) }
    }

    /// `x = 0`: `ALL n in N . |q_n| <= 1/2^(n-1)`.
    pub fn zero(x: &ConstructiveReal) -> Self {
        RealSentence { quant: Quantifier::Forall, sort: Level::STANDARD, pred: RealPred::Zero, negated: false, real: x.clone() }
    }

    fn matrix(&self, n: u64) -> bool {
        self.pred.at(&self.real, n) != self.negated
    }
}

impl fmt::Display for RealSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = match self.pred {
            RealPred::Pos => "q_n > 1/2^n",
            RealPred::Neg => "q_n < -1/2^n",
            RealPred::Zero => "|q_n| <= 1/2^(n-1)",
        };
        let not = if self.negated { "!" } else { "" };
        write!(f, "{} n in {} . {not}({body}) where q = {}", self.quant, self.sort, self.real)
    }
}

#[derive(Debug, Clone)]
pub enum Sentence {
    Arith(Statement),
    Real(RealSentence),
}

impl Sentence {
    pub fn signature(&self) -> Vec<(Quantifier, Level)> {
        match self {
            Sentence::Arith(s) => s.signature(),
            Sentence::Real(r) => vec![(r.quant, r.sort)],
        }
    }

    pub fn shape(&self) -> Shape {
        crate::formula::classify_prefix(&self.signature())
    }

    fn unassigned(&self) -> BTreeSet<String> {
        match self {
            Sentence::Arith(s) => s.params.iter().filter(|(_, v)| v.is_none()).map(|(k, _)| k.clone()).collect(),
            Sentence::Real(_) => BTreeSet::new(),
        }
    }

    fn bind(&self, values: &BTreeMap<String, u64>) -> Sentence {
        match self {
            Sentence::Arith(s) => Sentence::Arith(s.bind(values)),
            Sentence::Real(r) => Sentence::Real(r.clone()),
        }
    }

    pub fn eval(&self, model: &HyperModel) -> Result<bool, HyperError> {
        let ranges: Vec<(Quantifier, u64)> =
            self.signature().into_iter().map(|(q, l)| (q, model.level_bound(l))).collect();
        let mut values = Vec::new();
        match self {
            Sentence::Arith(s) => {
                let bound = BoundStatement::new(model, s)?;
                Ok(quantify(&ranges, &mut values, &mut |v| bound.matrix(v))?)
            }
            Sentence::Real(r) => Ok(quantify::<EvalError>(&ranges, &mut values, &mut |v| Ok(r.matrix(v[0])))?),
        }
    }

    pub fn in_t(&self, model: &HyperModel) -> Result<TransferVerdict, HyperError> {
        let sig = self.signature();
        match self {
            Sentence::Arith(s) => Ok(crate::transfer::in_t(model, s)?),
            Sentence::Real(r) => Ok(in_t_with::<TransferError>(model, &sig, &mut |v| Ok(r.matrix(v[0])))?),
        }
    }

    /// Same matrix (negated when `negate`), new prefix signature.
    fn reprefix(&self, sig: &[(Quantifier, Level)], negate: bool) -> Sentence {
        match self {
            Sentence::Arith(s) => {
                let mut out = s.clone();
                for (b, (q, l)) in out.prefix.iter_mut().zip(sig) {
                    b.quant = *q;
                    b.sort = *l;
                }
                if negate {
                    out.matrix = out.matrix.negate();
                }
                Sentence::Arith(out)
            }
            Sentence::Real(r) => {
                let mut out = r.clone();
                out.quant = sig[0].0;
                out.sort = sig[0].1;
                out.negated ^= negate;
                Sentence::Real(out)
            }
        }
    }

    /// Normal form of `~self`. `A & A in T` is first simplified (a universal in
    /// T is its star form, an existential in T its level-1 form), then the
    /// prefix is dualised and the matrix negated.
    pub fn hypernegation(&self) -> Option<Sentence> {
        use Quantifier::{Exists, Forall};
        let n1 = Level::Finite(1);
        let sig = self.signature();
        let trivial = |sig: &[(Quantifier, Level)]| -> Vec<(Quantifier, Level)> {
            sig.iter().map(|(q, l)| (q.dual(), *l)).collect()
        };
        let new_sig = match (self.shape(), sig.as_slice()) {
            (Shape::Delta0 | Shape::Sigma1Std, _) => trivial(&sig),
            (Shape::Pi1, _) => vec![(Exists, Level::Top)],
            (Shape::Sigma1Star, _) => vec![(Forall, n1)],
            (Shape::Sigma2, _) => vec![(Forall, n1), (Exists, Level::Top)],
            (Shape::Pi2, _) => return None,
            (Shape::Other, [(Exists, Level::Finite(_))] | [(Forall, Level::Top)]) => trivial(&sig),
            (Shape::Other, [(Forall, Level::Finite(_))]) => vec![(Exists, Level::Top)],
            (Shape::Other, _) => return None,
        };
        Some(self.reprefix(&new_sig, true))
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sentence::Arith(s) => write!(f, "{s}"),
            Sentence::Real(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum HyperFormula {
    Sentence(Sentence),
    And(Box<HyperFormula>, Box<HyperFormula>),
    /// `a => b`
    Implies(Box<HyperFormula>, Box<HyperFormula>),
    /// `~a`
    Not(Box<HyperFormula>),
    /// Witnessed hyperdisjunction; quantifies the witness's standard
    /// parameters itself.
    Or(Box<HyperFormula>, Box<HyperFormula>, WitnessProcedure),
    /// The alternative disjunction.
    AltOr(Box<HyperFormula>, Box<HyperFormula>),
}

impl From<Statement> for HyperFormula {
    fn from(s: Statement) -> Self {
        HyperFormula::Sentence(Sentence::Arith(s))
    }
}

impl From<RealSentence> for HyperFormula {
    fn from(s: RealSentence) -> Self {
        HyperFormula::Sentence(Sentence::Real(s))
    }
}

impl HyperFormula {
    pub fn falsum() -> Self {
        Statement::falsum().into()
    }

    pub fn implies(a: impl Into<HyperFormula>, b: impl Into<HyperFormula>) -> Self {
        HyperFormula::Implies(Box::new(a.into()), Box::new(b.into()))
    }

    pub fn not(a: impl Into<HyperFormula>) -> Self {
        HyperFormula::Not(Box::new(a.into()))
    }

    pub fn and(a: impl Into<HyperFormula>, b: impl Into<HyperFormula>) -> Self {
        HyperFormula::And(Box::new(a.into()), Box::new(b.into()))
    }

    pub fn or(a: impl Into<HyperFormula>, b: impl Into<HyperFormula>, w: WitnessProcedure) -> Self {
        HyperFormula::Or(Box::new(a.into()), Box::new(b.into()), w)
    }

    pub fn alt_or(a: impl Into<HyperFormula>, b: impl Into<HyperFormula>) -> Self {
        HyperFormula::AltOr(Box::new(a.into()), Box::new(b.into()))
    }

    /// Parameters without values, excluding those a witnessed disjunction
    /// quantifies.
    pub fn unassigned(&self) -> BTreeSet<String> {
        match self {
            HyperFormula::Sentence(s) => s.unassigned(),
            HyperFormula::And(a, b) | HyperFormula::Implies(a, b) | HyperFormula::AltOr(a, b) => {
                a.unassigned().union(&b.unassigned()).cloned().collect()
            }
            HyperFormula::Not(a) => a.unassigned(),
            HyperFormula::Or(a, b, w) => {
                let mut u: BTreeSet<String> = a.unassigned().union(&b.unassigned()).cloned().collect();
                for p in &w.psi.standard_params {
                    u.remove(p);
                }
                u
            }
        }
    }

    pub fn bind(&self, values: &BTreeMap<String, u64>) -> HyperFormula {
        let bx = |a: &HyperFormula| Box::new(a.bind(values));
        match self {
            HyperFormula::Sentence(s) => HyperFormula::Sentence(s.bind(values)),
            HyperFormula::And(a, b) => HyperFormula::And(bx(a), bx(b)),
            HyperFormula::Implies(a, b) => HyperFormula::Implies(bx(a), bx(b)),
            HyperFormula::Not(a) => HyperFormula::Not(bx(a)),
            HyperFormula::Or(a, b, w) => HyperFormula::Or(bx(a), bx(b), w.clone()),
            HyperFormula::AltOr(a, b) => HyperFormula::AltOr(bx(a), bx(b)),
        }
    }

    /// The sentence this formula reduces to, if any: a sentence is its own
    /// normal form, `~a` is the hypernegation of the normal form of `a`.
    pub fn normal_form(&self) -> Option<Sentence> {
        match self {
            HyperFormula::Sentence(s) => Some(s.clone()),
            HyperFormula::Not(a) => a.normal_form()?.hypernegation(),
            _ => None,
        }
    }

    pub fn in_t(&self, model: &HyperModel) -> Result<TransferVerdict, HyperError> {
        match self.normal_form() {
            Some(s) => s.in_t(model),
            None => Ok(TransferVerdict { shape: Shape::Other, trivial: true, holds: true, witness: None }),
        }
    }

    pub fn holds(&self, model: &HyperModel) -> Result<bool, HyperError> {
        Ok(self.verdict(model)?.holds)
    }

    /// `self & self in T`.
    pub fn holds_in_t(&self, model: &HyperModel) -> Result<bool, HyperError> {
        Ok(self.holds(model)? && self.in_t(model)?.holds)
    }

    pub fn verdict(&self, model: &HyperModel) -> Result<HyperVerdict, HyperError> {
        match self {
            HyperFormula::Sentence(s) => {
                let holds = s.eval(model)?;
                Ok(HyperVerdict::from_bool(holds, || FailingPart::new(format!("`{s}` is false"))))
            }
            HyperFormula::And(a, b) => {
                let va = a.verdict(model)?;
                if !va.holds {
                    return Ok(va);
                }
                b.verdict(model)
            }
            HyperFormula::Implies(a, b) => implies_verdict(model, a, b),
            HyperFormula::Not(a) => implies_verdict(model, a, &HyperFormula::falsum()),
            HyperFormula::Or(a, b, w) => or_verdict(model, a, b, w),
            HyperFormula::AltOr(a, b) => {
                let (ha, hb) = (a.holds(model)?, b.holds(model)?);
                if !ha && !hb {
                    return Ok(HyperVerdict::fail("neither disjunct holds"));
                }
                if ha && !a.in_t(model)?.holds {
                    return Ok(HyperVerdict::fail("first disjunct holds but is not in T"));
                }
                if hb && !b.in_t(model)?.holds {
                    return Ok(HyperVerdict::fail("second disjunct holds but is not in T"));
                }
                Ok(HyperVerdict::pass())
            }
        }
    }
}

impl fmt::Display for HyperFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperFormula::Sentence(s) => write!(f, "[{s}]"),
            HyperFormula::And(a, b) => write!(f, "({a} & {b})"),
            HyperFormula::Implies(a, b) => write!(f, "({a} => {b})"),
            HyperFormula::Not(a) => write!(f, "~{a}"),
            HyperFormula::Or(a, b, w) => write!(f, "({a} v {b} by {})", w.psi),
            HyperFormula::AltOr(a, b) => write!(f, "({a} V {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailingPart {
    pub part: String,
    pub assignment: BTreeMap<String, u64>,
}

impl FailingPart {
    fn new(part: String) -> Self {
        FailingPart { part, assignment: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperVerdict {
    pub holds: bool,
    pub failing_part: Option<FailingPart>,
}

impl HyperVerdict {
    fn pass() -> Self {
        HyperVerdict { holds: true, failing_part: None }
    }

    fn fail(part: impl Into<String>) -> Self {
        HyperVerdict { holds: false, failing_part: Some(FailingPart::new(part.into())) }
    }

    fn from_bool(holds: bool, part: impl FnOnce() -> FailingPart) -> Self {
        HyperVerdict { holds, failing_part: (!holds).then(part) }
    }
}

fn implies_verdict(model: &HyperModel, a: &HyperFormula, b: &HyperFormula) -> Result<HyperVerdict, HyperError> {
    if !a.holds_in_t(model)? {
        return Ok(HyperVerdict::pass());
    }
    if !b.holds(model)? {
        return Ok(HyperVerdict::fail(format!("antecedent holds and is in T, consequent {b} is false")));
    }
    if !b.in_t(model)?.holds {
        return Ok(HyperVerdict::fail(format!("antecedent holds and is in T, consequent {b} is not in T")));
    }
    Ok(HyperVerdict::pass())
}

fn or_verdict(model: &HyperModel, a: &HyperFormula, b: &HyperFormula, w: &WitnessProcedure) -> Result<HyperVerdict, HyperError> {
    if !w.verified() {
        return Err(HyperError::UnverifiedWitness);
    }
    let params = &w.psi.standard_params;
    let used: BTreeSet<String> = a.unassigned().union(&b.unassigned()).cloned().collect();
    if !used.iter().all(|p| params.contains(p)) {
        return Err(HyperError::ArityMismatch { expected: params.clone(), found: used.into_iter().collect() });
    }
    for x in assignments(params.len(), model.standard_bound()) {
        let values: BTreeMap<String, u64> = params.iter().cloned().zip(x.iter().copied()).collect();
        let (side, name) = if w.decide(model, &x)? { (a, "first") } else { (b, "second") };
        let side = side.bind(&values);
        let problem = if !side.holds(model)? {
            Some("is false")
        } else if !side.in_t(model)?.holds {
            Some("is not in T")
        } else {
            None
        };
        if let Some(problem) = problem {
            return Ok(HyperVerdict {
                holds: false,
                failing_part: Some(FailingPart {
                    part: format!("witness selects the {name} disjunct, which {problem}"),
                    assignment: values,
                }),
            });
        }
    }
    Ok(HyperVerdict::pass())
}

pub fn hyper_implies(model: &HyperModel, a: &Statement, b: &Statement) -> Result<HyperVerdict, HyperError> {
    HyperFormula::implies(a.clone(), b.clone()).verdict(model)
}

pub fn hyper_not(model: &HyperModel, a: &Statement) -> Result<HyperVerdict, HyperError> {
    HyperFormula::not(a.clone()).verdict(model)
}

pub fn hyper_or_witnessed(
    model: &HyperModel,
    a: &HyperFormula,
    b: &HyperFormula,
    w: &WitnessProcedure,
) -> Result<HyperVerdict, HyperError> {
    or_verdict(model, a, b, w)
}

pub fn hyper_or_alt(model: &HyperModel, a: &Statement, b: &Statement) -> Result<HyperVerdict, HyperError> {
    HyperFormula::alt_or(a.clone(), b.clone()).verdict(model)
}

/// `~~P` for `P` of shape `EX n in N` (giving `EX n in *N`) or `ALL n in N`
/// (giving `ALL n in N1`). The result is checked against the definition of `~`
/// at every standard assignment of unassigned parameters.
pub fn compute_double_hypernegation(model: &HyperModel, p: &Statement) -> Result<Statement, HyperError> {
    if !matches!(p.classify(), Shape::Sigma1Std | Shape::Pi1) {
        return Err(HyperError::Unsupported(format!("double hypernegation of a {} statement", p.classify())));
    }
    let nn = HyperFormula::not(HyperFormula::not(p.clone()));
    let Some(Sentence::Arith(nf)) = nn.normal_form() else {
        return Err(HyperError::Inconsistent("no normal form".to_string()));
    };
    let params: Vec<String> = nn.unassigned().into_iter().collect();
    for x in assignments(params.len(), model.standard_bound()) {
        let values: BTreeMap<String, u64> = params.iter().cloned().zip(x).collect();
        let by_definition = nn.bind(&values).holds(model)?;
        let by_normal_form = Sentence::Arith(nf.bind(&values)).eval(model)?;
        if by_definition != by_normal_form {
            return Err(HyperError::Inconsistent(format!("~~P and `{nf}` differ at {values:?}")));
        }
    }
    Ok(nf)
}
