//! Constructive reals as fast-converging rational sequences.
//!
//! A real is a map `n -> q_n` with `|q_k - q_{k+i}| < 1/2^k`. Equality and order
//! follow the usual fast-Cauchy definitions:
//!
//! * `x = y` iff `|q_k - r_k| <= 1/2^(k-1)` for all `k`,
//! * `x < y` iff `q_k + 1/2^k < r_k` for some `k`,
//! * `x > 0` iff `q_n > 1/2^n` for some `n`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::formula::{parse_formula, Compiled, Env, EvalError, Formula};
use crate::model::{HyperModel, Level};

pub type Rational = BigRational;

/// Default validation depth.
pub const DEFAULT_DEPTH: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("product needs a declared magnitude bound on both factors")]
    MissingBound,
    #[error("indicator formula has free variables {0:?} besides `{1}` without values")]
    UnboundIndicator(Vec<String>, String),
    #[error("malformed real `{0}`")]
    Syntax(String),
}

type Seq = Arc<dyn Fn(u64) -> Rational + Send + Sync>;

/// A fast-converging rational sequence. `bound_exp = Some(b)` declares
/// `|q_n| <= 2^b` for every `n`.
#[derive(Clone)]
pub struct ConstructiveReal {
    seq: Seq,
    pub bound_exp: Option<u32>,
    pub provenance: String,
}

impl fmt::Debug for ConstructiveReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstructiveReal")
            .field("provenance", &self.provenance)
            .field("bound_exp", &self.bound_exp)
            .finish()
    }
}

impl fmt::Display for ConstructiveReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.provenance)
    }
}

/// `1 / 2^k`.
pub fn dyadic(k: u64) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Least `b >= 0` with `|q| <= 2^b`.
pub fn bound_of(q: &Rational) -> u32 {
    let a = q.abs();
    let mut b = 0u32;
    let mut p = Rational::one();
    while a > p {
        p *= Rational::from_integer(BigInt::from(2));
        b += 1;
    }
    b
}

impl ConstructiveReal {
    pub fn new(provenance: impl Into<String>, bound_exp: Option<u32>, seq: impl Fn(u64) -> Rational + Send + Sync + 'static) -> Self {
        ConstructiveReal { seq: Arc::new(seq), bound_exp, provenance: provenance.into() }
    }

    /// `q_n`. Indices are hypernatural: any `n` up to the model's `M` is fine.
    pub fn at(&self, n: u64) -> Rational {
        (self.seq)(n)
    }

    pub fn from_rational(q: Rational) -> Self {
        let b = bound_of(&q);
        let name = format!("rat:{q}");
        ConstructiveReal::new(name, Some(b), move |_| q.clone())
    }

    pub fn from_integer(v: i64) -> Self {
        ConstructiveReal::from_rational(Rational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        ConstructiveReal::from_integer(0)
    }

    /// `q_n > 1/2^n`.
    pub fn positive_at(&self, n: u64) -> bool {
        self.at(n) > dyadic(n)
    }
}

pub fn real_add(x: &ConstructiveReal, y: &ConstructiveReal) -> ConstructiveReal {
    let (a, b) = (x.clone(), y.clone());
    let bound = x.bound_exp.zip(y.bound_exp).map(|(p, q)| p.max(q) + 1);
    ConstructiveReal::new(format!("add({x}, {y})"), bound, move |n| a.at(n + 2) + b.at(n + 2))
}

pub fn real_neg(x: &ConstructiveReal) -> ConstructiveReal {
    let a = x.clone();
    ConstructiveReal::new(format!("neg({x})"), x.bound_exp, move |n| -a.at(n))
}

pub fn real_mul(x: &ConstructiveReal, y: &ConstructiveReal) -> Result<ConstructiveReal, RealError> {
    let (bx, by) = x.bound_exp.zip(y.bound_exp).ok_or(RealError::MissingBound)?;
    let shift = u64::from(bx + by + 2);
    let (a, b) = (x.clone(), y.clone());
    Ok(ConstructiveReal::new(format!("mul({x}, {y})"), Some(bx + by), move |n| a.at(n + shift) * b.at(n + shift)))
}

/// `q_n = sum_{i <= n} 2^-i * T(i)` where `T(i)` is the indicator of
/// `(EX m <= i) phi(m)`. The other free variables of `phi` take their values
/// from `env`.
///
/// With `f` the least `m <= M` satisfying `phi`, `q_n` is 0 below `f` and
/// `2^(1-f) - 2^-n` from `f` on.
pub fn from_indicator(model: &HyperModel, phi: &Formula, var: &str, env: &Env) -> Result<ConstructiveReal, RealError> {
    let missing: Vec<String> = phi.free_vars().into_iter().filter(|v| v != var && !env.vars.contains_key(v)).collect();
    if !missing.is_empty() {
        return Err(RealError::UnboundIndicator(missing, var.to_string()));
    }
    let mut inputs: Vec<String> = env.vars.keys().filter(|k| *k != var).cloned().collect();
    let mut args: Vec<u64> = inputs.iter().map(|k| env.vars[k]).collect();
    inputs.push(var.to_string());
    let compiled = Compiled::new(model, phi, &inputs, &env.sets)?;
    args.push(0);
    let mut first = None;
    for m in 0..=model.max_element() {
        *args.last_mut().unwrap() = m;
        if compiled.eval(&args)? {
            first = Some(m);
            break;
        }
    }
    let name = format!("indicator({phi})");
    Ok(match first {
        None => ConstructiveReal::new(name, Some(0), |_| Rational::zero()),
        Some(f) => {
            let head = Rational::new(BigInt::from(2), BigInt::one() << f);
            ConstructiveReal::new(name, Some(1), move |n| if n < f { Rational::zero() } else { &head - dyadic(n) })
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CauchyReport {
    pub valid: bool,
    /// First `(k, i)` with `|q_k - q_{k+i}| >= 1/2^k`.
    pub violation: Option<(u64, u64)>,
    pub depth: u64,
}

/// Checks `|q_k - q_{k+i}| < 1/2^k` for all `k < depth`, `k + i <= depth`.
pub fn validate_fast_cauchy(x: &ConstructiveReal, depth: u64) -> CauchyReport {
    let q: Vec<Rational> = (0..=depth).map(|n| x.at(n)).collect();
    for k in 0..depth {
        let tol = dyadic(k);
        for j in k + 1..=depth {
            if (&q[k as usize] - &q[j as usize]).abs() >= tol {
                return CauchyReport { valid: false, violation: Some((k, j - k)), depth };
            }
        }
    }
    CauchyReport { valid: true, violation: None, depth }
}

/// `|q_k - r_k| <= 1/2^(k-1)` for all `k <= depth`.
pub fn real_eq(x: &ConstructiveReal, y: &ConstructiveReal, depth: u64) -> bool {
    first_inequality(x, y, depth).is_none()
}

/// First `k <= depth` at which the equality bound fails.
pub fn first_inequality(x: &ConstructiveReal, y: &ConstructiveReal, depth: u64) -> Option<u64> {
    let two = Rational::from_integer(BigInt::from(2));
    (0..=depth).find(|&k| (x.at(k) - y.at(k)).abs() > &two * dyadic(k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OrderVerdict {
    True { witness: u64 },
    /// A witness for the reverse strict inequality was found at `depth`, so
    /// the searched one cannot exist.
    FalseUpToDepth { depth: u64 },
    Exhausted { budget: u64 },
}

impl OrderVerdict {
    pub fn is_true(&self) -> bool {
        matches!(self, OrderVerdict::True { .. })
    }

    pub fn witness(&self) -> Option<u64> {
        match self {
            OrderVerdict::True { witness } => Some(*witness),
            _ => None,
        }
    }
}

/// `q_k + 1/2^k < r_k`.
pub fn lt_at(x: &ConstructiveReal, y: &ConstructiveReal, k: u64) -> bool {
    x.at(k) + dyadic(k) < y.at(k)
}

/// Searches `k <= budget` for a witness of `x < y`.
pub fn real_lt(x: &ConstructiveReal, y: &ConstructiveReal, budget: u64) -> OrderVerdict {
    for k in 0..=budget {
        if lt_at(x, y, k) {
            return OrderVerdict::True { witness: k };
        }
        if lt_at(y, x, k) {
            return OrderVerdict::FalseUpToDepth { depth: k };
        }
    }
    OrderVerdict::Exhausted { budget }
}

/// Searches `n` over the given level (`[0, t_k)`, or `[0, M]` at the top) for
/// `q_n > 1/2^n`.
pub fn pos_at_level(model: &HyperModel, x: &ConstructiveReal, level: Level) -> OrderVerdict {
    let end = model.level_bound(level);
    match (0..end).find(|&n| x.positive_at(n)) {
        Some(n) => OrderVerdict::True { witness: n },
        None => OrderVerdict::Exhausted { budget: end },
    }
}

/// Splits at top-level commas.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().ok()?;
            let d: BigInt = b.trim().parse().ok()?;
            (!d.is_zero()).then(|| Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Parses a real spec:
///
/// ```text
/// real := "zero" | "rat:" p ["/" q] | "indicator:" formula
///       | ("add" | "mul") ":(" real "," real ")" | "neg:(" real ")"
/// ```
///
/// An indicator formula must have exactly one free variable.
pub fn parse_real(model: &HyperModel, text: &str) -> Result<ConstructiveReal, RealError> {
    let text = text.trim();
    let syntax = || RealError::Syntax(text.to_string());
    if text == "zero" {
        return Ok(ConstructiveReal::zero());
    }
    let (head, rest) = text.split_once(':').ok_or_else(syntax)?;
    match head.trim() {
        "rat" => Ok(ConstructiveReal::from_rational(parse_rational(rest).ok_or_else(syntax)?)),
        "indicator" => {
            let phi = parse_formula(rest).map_err(|e| RealError::Syntax(format!("{text}: {e}")))?;
            let free: Vec<String> = phi.free_vars().into_iter().collect();
            if free.len() != 1 {
                return Err(RealError::Syntax(format!("{text}: indicator needs exactly one free variable")));
            }
            from_indicator(model, &phi, &free[0], &Env::new())
        }
        op @ ("add" | "mul" | "neg") => {
            let inner = rest.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(syntax)?;
            let args = split_args(inner);
            let parsed: Vec<ConstructiveReal> = args.iter().map(|a| parse_real(model, a)).collect::<Result<_, _>>()?;
            match (op, parsed.as_slice()) {
                ("add", [a, b]) => Ok(real_add(a, b)),
                ("mul", [a, b]) => real_mul(a, b),
                ("neg", [a]) => Ok(real_neg(a)),
                _ => Err(syntax()),
            }
        }
        _ => Err(syntax()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> HyperModel {
        HyperModel::default_model()
    }

    fn r(num: i64, den: i64) -> Rational {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn ind(src: &str) -> ConstructiveReal {
        from_indicator(&m(), &parse_formula(src).unwrap(), "m", &Env::new()).unwrap()
    }

    #[test]
    fn fast_cauchy_examples() {
        let halves = ConstructiveReal::new("1/2^n", Some(0), dyadic);
        assert!(validate_fast_cauchy(&halves, 64).valid);
        let divergent = ConstructiveReal::new("n", None, |n| Rational::from_integer(BigInt::from(n)));
        assert_eq!(validate_fast_cauchy(&divergent, 3).violation, Some((0, 1)));
        assert!(validate_fast_cauchy(&ConstructiveReal::from_integer(7), 64).valid);
    }

    #[test]
    fn order_and_equality_examples() {
        let halves = ConstructiveReal::new("1/2^n", Some(0), dyadic);
        assert!(real_eq(&halves, &ConstructiveReal::zero(), 64));
        let (zero, one) = (ConstructiveReal::zero(), ConstructiveReal::from_integer(1));
        assert_eq!(real_lt(&zero, &one, 10), OrderVerdict::True { witness: 1 });
        assert_eq!(real_lt(&one, &zero, 10), OrderVerdict::FalseUpToDepth { depth: 1 });
        let five = ConstructiveReal::from_integer(5);
        assert_eq!(real_lt(&five, &five, 40), OrderVerdict::Exhausted { budget: 40 });
        assert!(!real_eq(&zero, &one, 5));
    }

    #[test]
    fn arithmetic_examples() {
        let (zero, one) = (ConstructiveReal::zero(), ConstructiveReal::from_integer(1));
        let s = real_add(&zero, &one);
        assert!((0..20).all(|n| s.at(n) == Rational::one()));
        let five = ConstructiveReal::from_integer(5);
        let d = real_add(&five, &real_neg(&five));
        assert!((0..20).all(|n| d.at(n).is_zero()));
        assert!(real_eq(&d, &zero, 64));
        let p = real_mul(&ConstructiveReal::from_integer(3), &ConstructiveReal::from_integer(4)).unwrap();
        assert!((0..20).all(|n| p.at(n) == Rational::from_integer(BigInt::from(12))));
        let unbounded = ConstructiveReal::new("n", None, |_| Rational::zero());
        assert_eq!(real_mul(&unbounded, &one).unwrap_err(), RealError::MissingBound);
    }

    #[test]
    fn shifted_arithmetic_stays_fast() {
        let halves = ConstructiveReal::new("1/2^n", Some(0), dyadic);
        let x = real_add(&halves, &ConstructiveReal::from_rational(r(-7, 3)));
        assert!(validate_fast_cauchy(&x, 64).valid);
        let y = real_mul(&x, &ind("m = 3")).unwrap();
        assert!(validate_fast_cauchy(&y, 64).valid);
    }

    #[test]
    fn indicator_examples() {
        let z = ind("0 = 1 & m = m");
        assert!((0..70).all(|n| z.at(n).is_zero()));
        let x = ind("m = 3");
        assert_eq!((0..6).map(|n| x.at(n)).collect::<Vec<_>>(), vec![r(0, 1), r(0, 1), r(0, 1), r(1, 8), r(3, 16), r(7, 32)]);
        assert!(validate_fast_cauchy(&x, 64).valid);
        assert_eq!(pos_at_level(&m(), &x, Level::STANDARD), OrderVerdict::True { witness: 4 });
    }

    #[test]
    fn positivity_by_level() {
        assert_eq!(pos_at_level(&m(), &ConstructiveReal::zero(), Level::Top), OrderVerdict::Exhausted { budget: 2049 });
        let x = ind("m = 20");
        assert_eq!(pos_at_level(&m(), &x, Level::STANDARD), OrderVerdict::Exhausted { budget: 16 });
        assert_eq!(pos_at_level(&m(), &x, Level::Finite(1)), OrderVerdict::True { witness: 21 });
    }

    #[test]
    fn real_specs() {
        let x = parse_real(&m(), "add:(rat:1/2, neg:(rat:3/4))").unwrap();
        assert_eq!(x.at(5), r(-1, 4));
        let y = parse_real(&m(), "mul:(rat:3, indicator:m = 3)").unwrap();
        assert!(validate_fast_cauchy(&y, 32).valid);
        assert!(parse_real(&m(), "rat:1/0").is_err());
        assert!(parse_real(&m(), "pow:(zero)").is_err());
    }
}
