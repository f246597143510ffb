use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use serde::Serialize;

use crate::model::Level;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(BigUint),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    /// Truncated subtraction, written `-.`.
    Monus(Box<Term>, Box<Term>),
    Pow2(Box<Term>),
    /// 1 if the formula is true under the current environment, else 0.
    Indicator(Box<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Quantifier {
    #[serde(rename = "ALL")]
    Forall,
    #[serde(rename = "EX")]
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::Forall => "ALL",
            Quantifier::Exists => "EX",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Le(Term, Term),
    Lt(Term, Term),
    /// `t in X` for a set parameter `X`.
    Member(Term, String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `(Q var <= bound) body`; `bound` never mentions `var`.
    Bounded { quant: Quantifier, var: String, bound: Term, body: Box<Formula> },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn nat(v: u64) -> Term {
        Term::Const(BigUint::from(v))
    }

    pub fn add(self, rhs: Term) -> Term {
        Term::Add(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: Term) -> Term {
        Term::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn monus(self, rhs: Term) -> Term {
        Term::Monus(Box::new(self), Box::new(rhs))
    }

    pub fn pow2(self) -> Term {
        Term::Pow2(Box::new(self))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::Add(a, b) | Term::Mul(a, b) | Term::Monus(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Term::Pow2(a) => a.collect_free(bound, out),
            Term::Indicator(phi) => phi.collect_free(bound, out),
        }
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Le(a, b)
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Lt(a, b)
    }

    /// `0 = 0`.
    pub fn verum() -> Formula {
        Formula::Eq(Term::nat(0), Term::nat(0))
    }

    /// `0 = 1`.
    pub fn falsum() -> Formula {
        Formula::Eq(Term::nat(0), Term::nat(1))
    }

    pub fn and(self, rhs: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    /// Negation that cancels an outer `!` instead of stacking a second one.
    pub fn negate(self) -> Formula {
        match self {
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn forall_le(var: &str, bound: Term, body: Formula) -> Formula {
        Formula::Bounded { quant: Quantifier::Forall, var: var.to_string(), bound, body: Box::new(body) }
    }

    pub fn exists_le(var: &str, bound: Term, body: Formula) -> Formula {
        Formula::Bounded { quant: Quantifier::Exists, var: var.to_string(), bound, body: Box::new(body) }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) | Formula::Le(a, b) | Formula::Lt(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Member(t, _) => t.collect_free(bound, out),
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Bounded { var, bound: t, body, .. } => {
                t.collect_free(bound, out);
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Names of set parameters used in membership atoms.
    pub fn set_names(&self) -> BTreeSet<String> {
        fn walk_t(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(_) | Term::Const(_) => {}
                Term::Add(a, b) | Term::Mul(a, b) | Term::Monus(a, b) => {
                    walk_t(a, out);
                    walk_t(b, out);
                }
                Term::Pow2(a) => walk_t(a, out),
                Term::Indicator(f) => walk_f(f, out),
            }
        }
        fn walk_f(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Formula::Eq(a, b) | Formula::Le(a, b) | Formula::Lt(a, b) => {
                    walk_t(a, out);
                    walk_t(b, out);
                }
                Formula::Member(t, x) => {
                    walk_t(t, out);
                    out.insert(x.clone());
                }
                Formula::Not(a) => walk_f(a, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    walk_f(a, out);
                    walk_f(b, out);
                }
                Formula::Bounded { bound, body, .. } => {
                    walk_t(bound, out);
                    walk_f(body, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk_f(self, &mut out);
        out
    }
}

/// One entry of a statement's sorted quantifier prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Binder {
    pub quant: Quantifier,
    pub var: String,
    pub sort: Level,
}

/// A sorted quantifier prefix over a bounded matrix, with named parameters.
/// A parameter without a value must be bound before evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub prefix: Vec<Binder>,
    pub matrix: Formula,
    pub params: BTreeMap<String, Option<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Shape {
    Delta0,
    Pi1,
    Sigma1Std,
    Sigma1Star,
    Pi2,
    Sigma2,
    Other,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Delta0 => "DELTA0",
            Shape::Pi1 => "PI1",
            Shape::Sigma1Std => "SIGMA1_STD",
            Shape::Sigma1Star => "SIGMA1_STAR",
            Shape::Pi2 => "PI2",
            Shape::Sigma2 => "SIGMA2",
            Shape::Other => "OTHER",
        })
    }
}

impl Statement {
    /// A statement with an empty prefix.
    pub fn delta0(matrix: Formula) -> Statement {
        Statement { prefix: Vec::new(), matrix, params: BTreeMap::new() }
    }

    pub fn single(quant: Quantifier, var: &str, sort: Level, matrix: Formula) -> Statement {
        Statement {
            prefix: vec![Binder { quant, var: var.to_string(), sort }],
            matrix,
            params: BTreeMap::new(),
        }
    }

    /// `0 = 1` as a statement.
    pub fn falsum() -> Statement {
        Statement::delta0(Formula::falsum())
    }

    /// Declares `name` as a parameter, optionally with a value.
    pub fn with_param(mut self, name: &str, value: Option<u64>) -> Statement {
        self.params.insert(name.to_string(), value);
        self
    }

    /// Assigns values to declared parameters; unknown names are ignored.
    pub fn bind(&self, values: &BTreeMap<String, u64>) -> Statement {
        let mut out = self.clone();
        for (k, v) in out.params.iter_mut() {
            if let Some(val) = values.get(k) {
                *v = Some(*val);
            }
        }
        out
    }

    pub fn classify(&self) -> Shape {
        classify_prefix(&self.signature())
    }

    /// The prefix as `(quantifier, sort)` pairs.
    pub fn signature(&self) -> Vec<(Quantifier, Level)> {
        self.prefix.iter().map(|b| (b.quant, b.sort)).collect()
    }

    /// Replaces every standard sort `N` in the prefix by `*N`. The matrix is
    /// untouched: the star map is the identity on bounded formulas.
    pub fn star_map(&self) -> Statement {
        let mut out = self.clone();
        for b in out.prefix.iter_mut() {
            if b.sort == Level::STANDARD {
                b.sort = Level::Top;
            }
        }
        out
    }

    /// Same prefix variables and parameters, new matrix.
    pub fn with_matrix(&self, matrix: Formula) -> Statement {
        Statement { prefix: self.prefix.clone(), matrix, params: self.params.clone() }
    }
}


/// Shape of a prefix given as `(quantifier, sort)` pairs.
pub fn classify_prefix(sig: &[(Quantifier, Level)]) -> Shape {
    use Level::{Finite, Top};
    use Quantifier::{Exists, Forall};
    match sig {
        [] => Shape::Delta0,
        [(Forall, Finite(0))] => Shape::Pi1,
        [(Exists, Finite(0))] => Shape::Sigma1Std,
        [(Exists, Top)] => Shape::Sigma1Star,
        [(Forall, Finite(0)), (Exists, Finite(0))] => Shape::Pi2,
        [(Exists, Top), (Forall, Top)] => Shape::Sigma2,
        _ => Shape::Other,
    }
}

// ---- printing ----

const T_SUM: u8 = 1;
const T_PROD: u8 = 2;
const T_POW: u8 = 3;

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Monus(..) => T_SUM,
        Term::Mul(..) => T_PROD,
        Term::Pow2(..) => T_POW,
        _ => 4,
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    let paren = term_prec(t) < min;
    if paren {
        f.write_str("(")?;
    }
    match t {
        Term::Var(v) => f.write_str(v)?,
        Term::Const(c) => write!(f, "{c}")?,
        Term::Add(a, b) => {
            write_term(f, a, T_SUM)?;
            f.write_str(" + ")?;
            write_term(f, b, T_PROD)?;
        }
        Term::Monus(a, b) => {
            write_term(f, a, T_SUM)?;
            f.write_str(" -. ")?;
            write_term(f, b, T_PROD)?;
        }
        Term::Mul(a, b) => {
            write_term(f, a, T_PROD)?;
            f.write_str(" * ")?;
            write_term(f, b, T_POW)?;
        }
        Term::Pow2(a) => {
            f.write_str("2^")?;
            write_term(f, a, T_POW)?;
        }
        Term::Indicator(phi) => write!(f, "ind({phi})")?,
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}

const F_QUANT: u8 = 0;
const F_IMP: u8 = 1;
const F_OR: u8 = 2;
const F_AND: u8 = 3;
const F_NOT: u8 = 4;

fn formula_prec(phi: &Formula) -> u8 {
    match phi {
        Formula::Bounded { .. } => F_QUANT,
        Formula::Implies(..) => F_IMP,
        Formula::Or(..) => F_OR,
        Formula::And(..) => F_AND,
        Formula::Not(..) => F_NOT,
        _ => 5,
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    let paren = formula_prec(phi) < min;
    if paren {
        f.write_str("(")?;
    }
    match phi {
        Formula::Eq(a, b) => write!(f, "{a} = {b}")?,
        Formula::Le(a, b) => write!(f, "{a} <= {b}")?,
        Formula::Lt(a, b) => write!(f, "{a} < {b}")?,
        Formula::Member(t, x) => write!(f, "{t} in {x}")?,
        Formula::Not(a) => {
            f.write_str("!")?;
            write_formula(f, a, F_NOT)?;
        }
        Formula::And(a, b) => {
            write_formula(f, a, F_AND)?;
            f.write_str(" & ")?;
            write_formula(f, b, F_NOT)?;
        }
        Formula::Or(a, b) => {
            write_formula(f, a, F_OR)?;
            f.write_str(" | ")?;
            write_formula(f, b, F_AND)?;
        }
        Formula::Implies(a, b) => {
            write_formula(f, a, F_OR)?;
            f.write_str(" -> ")?;
            write_formula(f, b, F_IMP)?;
        }
        Formula::Bounded { quant, var, bound, body } => {
            write!(f, "{quant} {var} <= {bound} . ")?;
            write_formula(f, body, F_QUANT)?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, F_QUANT)
    }
}

impl fmt::Display for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} in {} .", self.quant, self.var, self.sort)
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.prefix {
            write!(f, "{b} ")?;
        }
        write!(f, "{}", self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_respects_associativity() {
        let t = Term::var("a").add(Term::var("b").add(Term::var("c")));
        assert_eq!(t.to_string(), "a + (b + c)");
        let t = Term::var("a").add(Term::var("b")).add(Term::var("c"));
        assert_eq!(t.to_string(), "a + b + c");
        let t = Term::nat(2).mul(Term::var("k")).add(Term::nat(1));
        assert_eq!(t.to_string(), "2 * k + 1");
        let t = Term::var("n").add(Term::nat(1)).pow2();
        assert_eq!(t.to_string(), "2^(n + 1)");
    }

    #[test]
    fn classify_prefixes() {
        let phi = Formula::verum();
        let pi1 = Statement::single(Quantifier::Forall, "n", Level::STANDARD, phi.clone());
        assert_eq!(pi1.classify(), Shape::Pi1);
        let s1 = Statement::single(Quantifier::Exists, "n", Level::Top, phi.clone());
        assert_eq!(s1.classify(), Shape::Sigma1Star);
        let other = Statement::single(Quantifier::Exists, "n", Level::Finite(1), phi.clone());
        assert_eq!(other.classify(), Shape::Other);
        assert_eq!(Statement::delta0(phi).classify(), Shape::Delta0);
    }

    #[test]
    fn negate_cancels() {
        let phi = Formula::lt(Term::var("n"), Term::nat(3));
        assert_eq!(phi.clone().negate().negate(), phi);
    }
}
