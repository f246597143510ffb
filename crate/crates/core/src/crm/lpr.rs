//! LPR against universal transfer.

use num_traits::Zero;
use serde::Serialize;

use super::{least_witness, CrmError, Derivation, Path, Sigma1Instance};
use crate::formula::{Env, Quantifier};
use crate::hyperlogic::{RealPred, RealSentence, Sentence};
use crate::model::{HyperModel, Level};
use crate::reals::{from_indicator, ConstructiveReal, Rational};
use crate::transfer::TransferVerdict;

/// An answer to `x > 0 v ~(x > 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "sign", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignDecision {
    /// `q_witness > 1/2^witness` at a standard index.
    Positive { witness: u64 },
    /// `~(x > 0)` holds and transfers.
    Hyperneg { evidence: TransferVerdict },
}

pub trait OracleLpr {
    fn sign(&self, model: &HyperModel, x: &ConstructiveReal) -> Option<SignDecision>;
}

impl<F> OracleLpr for F
where
    F: Fn(&HyperModel, &ConstructiveReal) -> Option<SignDecision>,
{
    fn sign(&self, model: &HyperModel, x: &ConstructiveReal) -> Option<SignDecision> {
        self(model, x)
    }
}

/// Answers with [`decide_real_sign`], declining when its precondition fails.
#[derive(Debug, Clone, Copy, Default)]
pub struct HonestLpr;

impl OracleLpr for HonestLpr {
    fn sign(&self, model: &HyperModel, x: &ConstructiveReal) -> Option<SignDecision> {
        decide_real_sign(model, x).ok()
    }
}

/// `ALL n in N . !(q_n > 1/2^n)`, the normal form of `~(x > 0)`.
fn not_positive(x: &ConstructiveReal) -> Sentence {
    Sentence::Real(RealSentence {
        quant: Quantifier::Forall,
        sort: Level::STANDARD,
        pred: RealPred::Pos,
        negated: true,
        real: x.clone(),
    })
}

/// Decides `x > 0 v ~(x > 0)` with the witness `EX n <= w . q_n > 1/2^n` read
/// at the reference omega. Requires universal transfer of `q_n <= 1/2^n`.
pub fn decide_real_sign(model: &HyperModel, x: &ConstructiveReal) -> Result<SignDecision, CrmError> {
    let evidence = not_positive(x).in_t(model)?;
    if !evidence.holds {
        let at = evidence.witness.as_ref().and_then(|w| w.first().copied());
        return Err(CrmError::Precondition(match at {
            Some(n) => format!("q_n <= 1/2^n holds at every standard n but fails at n={n}"),
            None => "q_n <= 1/2^n does not transfer".to_string(),
        }));
    }
    let reference = model.standard_bound();
    match (0..=reference).find(|&n| x.positive_at(n)) {
        Some(n) if n < reference => Ok(SignDecision::Positive { witness: n }),
        Some(n) => Err(CrmError::Inconsistent(format!("positivity first seen at the reference omega {n}"))),
        None => Ok(SignDecision::Hyperneg { evidence }),
    }
}

/// Derives universal transfer of `!phi` from the oracle's answer for the
/// indicator real of `phi`.
///
/// A positive answer yields a standard witness of `phi`, so the hypothesis of
/// transfer is false. A hypernegative answer, once its evidence is re-checked,
/// gives `!phi` on the whole universe. A refusal gives a false verdict.
pub fn transfer_from_lpr(model: &HyperModel, oracle: &dyn OracleLpr, inst: &Sigma1Instance) -> Result<Derivation, CrmError> {
    inst.require_closed()?;
    let x = from_indicator(model, &inst.phi, &inst.var, &Env::new())?;
    let Some(answer) = oracle.sign(model, &x) else {
        return Ok(Derivation::new(false, Path::Declined).with_note("oracle declined"));
    };
    let c = inst.compile(model)?;
    let t0 = model.standard_bound();
    match answer {
        SignDecision::Positive { witness } => {
            if witness >= t0 {
                return Err(CrmError::Soundness(format!("positivity witness {witness} is not standard")));
            }
            if !x.positive_at(witness) {
                return Err(CrmError::Soundness(format!(
                    "q_{witness} = {} is not above 1/2^{witness}",
                    x.at(witness)
                )));
            }
            // T(i) is 1 from the least witness of phi on, so the least i with
            // q_i > 0 is that witness.
            let i = (0..=witness).find(|&i| x.at(i) > Rational::zero());
            let Some(i) = i else {
                return Err(CrmError::Inconsistent("positive real with no nonzero term".to_string()));
            };
            let n = least_witness(&c, &[], witness + 1)?;
            if n != Some(i) {
                return Err(CrmError::Inconsistent(format!("indicator starts at {i}, least witness is {n:?}")));
            }
            Ok(Derivation::new(true, Path::Vacuous).with_witness(i).with_note("phi has a standard witness"))
        }
        SignDecision::Hyperneg { evidence } => {
            let recheck = not_positive(&x).in_t(model)?;
            let standard = (0..t0).all(|n| !x.positive_at(n));
            if !standard {
                let n = (0..t0).find(|&n| x.positive_at(n)).unwrap();
                return Err(CrmError::Soundness(format!("~(x > 0) claimed, but q_{n} > 1/2^{n}")));
            }
            if !recheck.holds || !evidence.holds {
                let at = recheck.witness.as_ref().and_then(|w| w.first().copied());
                return Err(CrmError::Soundness(match at {
                    Some(n) => format!("transfer evidence for ~(x > 0) fails at n={n}"),
                    None => "transfer evidence for ~(x > 0) fails".to_string(),
                }));
            }
            if let Some(n) = least_witness(&c, &[], model.max_element() + 1)? {
                return Err(CrmError::Truncation(format!(
                    "phi holds at n={n}, the last element, where the indicator real cannot see it"
                )));
            }
            Ok(Derivation::new(true, Path::Negative))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::transfer::pi1_trans;

    fn m() -> HyperModel {
        HyperModel::default_model()
    }

    fn inst(src: &str) -> Sigma1Instance {
        Sigma1Instance::new(parse_formula(src).unwrap(), "n").unwrap()
    }

    fn real(src: &str) -> ConstructiveReal {
        from_indicator(&m(), &parse_formula(src).unwrap(), "n", &Env::new()).unwrap()
    }

    #[test]
    fn sign_of_indicator_reals() {
        assert_eq!(decide_real_sign(&m(), &real("n = 3")).unwrap(), SignDecision::Positive { witness: 4 });
        assert!(matches!(decide_real_sign(&m(), &real("0 = 1")).unwrap(), SignDecision::Hyperneg { .. }));
        assert!(matches!(decide_real_sign(&m(), &real("n = 20")), Err(CrmError::Precondition(_))));
    }

    #[test]
    fn derivation_matches_exhaustive_transfer() {
        for src in ["n = 3", "0 = 1", "n = 20", "n * n = 49", "n = 500", "n + 1 = 0"] {
            let i = inst(src);
            let d = transfer_from_lpr(&m(), &HonestLpr, &i).unwrap();
            let exhaustive = pi1_trans(&m(), &i.phi.clone().negate(), "n").unwrap();
            assert_eq!(d.verdict, exhaustive, "{src}");
        }
        let d = transfer_from_lpr(&m(), &HonestLpr, &inst("n = 3")).unwrap();
        assert_eq!(d.witness, Some(3));
    }

    #[test]
    fn lying_oracle_is_caught() {
        let i = inst("n = 3");
        let x = real("n = 3");
        let bogus = TransferVerdict { shape: crate::formula::Shape::Pi1, trivial: false, holds: true, witness: None };
        let liar = move |_: &HyperModel, _: &ConstructiveReal| Some(SignDecision::Hyperneg { evidence: bogus.clone() });
        let err = transfer_from_lpr(&m(), &liar, &i).unwrap_err();
        let CrmError::Soundness(msg) = err else { panic!("{err:?}") };
        assert!(msg.contains("q_4"), "{msg}");
        assert!(x.positive_at(4));
        let wrong = |_: &HyperModel, _: &ConstructiveReal| Some(SignDecision::Positive { witness: 2 });
        assert!(matches!(transfer_from_lpr(&m(), &wrong, &i), Err(CrmError::Soundness(_))));
    }

    #[test]
    fn witness_at_the_last_element_is_flagged() {
        let err = transfer_from_lpr(&m(), &HonestLpr, &inst("n = 2048")).unwrap_err();
        assert!(matches!(err, CrmError::Truncation(_)), "{err:?}");
    }
}
