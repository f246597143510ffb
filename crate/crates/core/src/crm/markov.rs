//! Markov's principle, its real form, and double negation elimination for
//! universal statements.

use serde::Serialize;

use super::{least_witness, CrmError, Derivation, Path, Sigma1Instance};
use crate::formula::{eval_statement, Env, Quantifier, Statement};
use crate::hyperlogic::{compute_double_hypernegation, HyperFormula, RealSentence};
use crate::model::{HyperModel, Level};
use crate::reals::{from_indicator, ConstructiveReal};

/// What the MP instance `~~P => P` for `P = EX n in N . phi` computes to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MpReduction {
    /// `(EX n in N1) phi -> (EX n in N) phi`.
    pub mp_instance: bool,
    /// `~~P in T`: `(EX n in *N) phi -> (EX n in N1) phi`.
    pub double_neg_in_t: bool,
    pub standard_witness: Option<u64>,
    pub level1_witness: Option<u64>,
    pub star_witness: Option<u64>,
}

pub fn mp_reduce(model: &HyperModel, inst: &Sigma1Instance) -> Result<MpReduction, CrmError> {
    inst.require_closed()?;
    let c = inst.compile(model)?;
    let star_witness = least_witness(&c, &[], model.max_element() + 1)?;
    let below = |end: u64| star_witness.filter(|&n| n < end);
    let standard_witness = below(model.standard_bound());
    let level1_witness = below(model.level_bound(Level::Finite(1)));
    let r = MpReduction {
        mp_instance: level1_witness.is_none() || standard_witness.is_some(),
        double_neg_in_t: star_witness.is_none() || level1_witness.is_some(),
        standard_witness,
        level1_witness,
        star_witness,
    };
    let p = inst.statement(Level::STANDARD);
    let by_definition = HyperFormula::implies(HyperFormula::not(HyperFormula::not(p.clone())), p).holds(model)?;
    if by_definition != r.mp_instance {
        return Err(CrmError::Inconsistent(format!(
            "~~P => P evaluates to {by_definition}, its reduction to {}",
            r.mp_instance
        )));
    }
    Ok(r)
}

/// Given `x` with `~~(x > 0)`, returns a standard `n` with `q_n > 1/2^n`, or
/// declines.
pub trait OracleMpr {
    fn positive(&self, model: &HyperModel, x: &ConstructiveReal, evidence: u64) -> Option<u64>;
}

impl<F> OracleMpr for F
where
    F: Fn(&HyperModel, &ConstructiveReal, u64) -> Option<u64>,
{
    fn positive(&self, model: &HyperModel, x: &ConstructiveReal, evidence: u64) -> Option<u64> {
        self(model, x, evidence)
    }
}

/// Searches the standard indices.
#[derive(Debug, Clone, Copy, Default)]
pub struct HonestMpr;

impl OracleMpr for HonestMpr {
    fn positive(&self, model: &HyperModel, x: &ConstructiveReal, _evidence: u64) -> Option<u64> {
        (0..model.standard_bound()).find(|&n| x.positive_at(n))
    }
}

/// Derives the MP instance for `phi` from a positivity oracle. A level-1
/// witness `n1` of `phi` is the evidence for `~~(x > 0)` on the indicator real
/// `x`, through `q_(n1+1) > 1/2^(n1+1)`.
pub fn mp_from_mpr(model: &HyperModel, oracle: &dyn OracleMpr, inst: &Sigma1Instance) -> Result<Derivation, CrmError> {
    inst.require_closed()?;
    let c = inst.compile(model)?;
    let Some(n1) = least_witness(&c, &[], model.level_bound(Level::Finite(1)))? else {
        return Err(CrmError::Precondition("phi has no witness in N1, so ~~P has no T-evidence".to_string()));
    };
    let x = from_indicator(model, &inst.phi, &inst.var, &Env::new())?;
    let e = n1 + 1;
    if !x.positive_at(e) {
        return Err(CrmError::Inconsistent(format!("q_{e} is not above 1/2^{e}")));
    }
    if e >= model.level_bound(Level::Finite(1)) {
        return Err(CrmError::Precondition(format!(
            "the level-1 witness {n1} is the last element of N1, so the positivity evidence q_{e} lies outside it"
        )));
    }
    let nn = HyperFormula::not(HyperFormula::not(RealSentence::positive(&x)));
    if !nn.holds_in_t(model)? {
        return Err(CrmError::Inconsistent("~~(x > 0) or its transfer fails despite the evidence".to_string()));
    }
    let Some(n) = oracle.positive(model, &x, e) else {
        return Ok(Derivation::new(false, Path::Declined)
            .with_note(format!("no standard positivity witness; phi first holds at n={n1} in N1")));
    };
    if n >= model.standard_bound() || !x.positive_at(n) {
        return Err(CrmError::Soundness(format!("n={n} is not a standard positivity witness")));
    }
    let Some(i) = least_witness(&c, &[], n + 1)? else {
        return Err(CrmError::Inconsistent(format!("q_{n} is positive but phi has no witness up to {n}")));
    };
    Ok(Derivation::new(true, Path::Witness).with_witness(i))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DneReport {
    /// The normal form of `~~R`.
    pub normal_form: String,
    pub double_neg: bool,
    pub r: bool,
    /// `~~R -> R`.
    pub plain_implication: bool,
    /// `~~R => R`.
    pub hyper_implication: bool,
}

/// `~~R -> R` and `~~R => R` for `R = ALL n in N . phi`.
pub fn pi1_dne(model: &HyperModel, inst: &Sigma1Instance) -> Result<DneReport, CrmError> {
    inst.require_closed()?;
    let r_stmt = Statement::single(Quantifier::Forall, &inst.var, Level::STANDARD, inst.phi.clone());
    let nf = compute_double_hypernegation(model, &r_stmt)?;
    let double_neg = eval_statement(model, &nf)?;
    let r = eval_statement(model, &r_stmt)?;
    let hyper_implication =
        HyperFormula::implies(HyperFormula::not(HyperFormula::not(r_stmt.clone())), r_stmt).holds(model)?;
    Ok(DneReport { normal_form: nf.to_string(), double_neg, r, plain_implication: !double_neg || r, hyper_implication })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn m() -> HyperModel {
        HyperModel::default_model()
    }

    fn inst(src: &str) -> Sigma1Instance {
        Sigma1Instance::new(parse_formula(src).unwrap(), "n").unwrap()
    }

    #[test]
    fn level_reduction() {
        let r = mp_reduce(&m(), &inst("n = 5")).unwrap();
        assert!(r.mp_instance && r.double_neg_in_t);
        let r = mp_reduce(&m(), &inst("n = 20")).unwrap();
        assert!(!r.mp_instance && r.double_neg_in_t);
        assert_eq!(r.level1_witness, Some(20));
        let r = mp_reduce(&m(), &inst("n = 500")).unwrap();
        assert!(r.mp_instance && !r.double_neg_in_t);
    }

    #[test]
    fn mp_from_positivity_oracle() {
        let d = mp_from_mpr(&m(), &HonestMpr, &inst("n = 5")).unwrap();
        assert_eq!((d.verdict, d.witness), (true, Some(5)));
        let d = mp_from_mpr(&m(), &HonestMpr, &inst("n = 20")).unwrap();
        assert_eq!((d.verdict, d.path), (false, Path::Declined));
        assert!(matches!(mp_from_mpr(&m(), &HonestMpr, &inst("0 = 1")), Err(CrmError::Precondition(_))));
        let liar = |_: &HyperModel, _: &ConstructiveReal, _: u64| Some(3);
        assert!(matches!(mp_from_mpr(&m(), &liar, &inst("n = 20")), Err(CrmError::Soundness(_))));
    }

    #[test]
    fn double_negation_elimination() {
        let r = pi1_dne(&m(), &inst("n < 128")).unwrap();
        assert!(r.double_neg && r.r && r.plain_implication && r.hyper_implication);
        assert!(r.normal_form.contains("N1"), "{}", r.normal_form);
        let r = pi1_dne(&m(), &inst("n < 16")).unwrap();
        assert!(!r.double_neg && r.r && r.plain_implication && r.hyper_implication);
        let r = pi1_dne(&m(), &inst("0 = 0")).unwrap();
        assert!(r.double_neg && r.r);
    }
}
