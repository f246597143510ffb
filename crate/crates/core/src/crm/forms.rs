//! Builders for the weaker omniscience statements. Each returns a hyperformula
//! wired to a caller-supplied witness; evaluate it with
//! [`HyperFormula::verdict`].

use crate::formula::Statement;
use crate::hyperlogic::{HyperFormula, RealSentence, WitnessProcedure};
use crate::reals::{real_mul, ConstructiveReal, RealError};

/// `~(P & Q) => ~P v ~Q`.
pub fn llpo(p: &Statement, q: &Statement, w: WitnessProcedure) -> HyperFormula {
    HyperFormula::implies(
        HyperFormula::not(HyperFormula::and(p.clone(), q.clone())),
        HyperFormula::or(HyperFormula::not(p.clone()), HyperFormula::not(q.clone()), w),
    )
}

/// `~(x > 0) v ~(x < 0)`.
pub fn llpr(x: &ConstructiveReal, w: WitnessProcedure) -> HyperFormula {
    HyperFormula::or(
        HyperFormula::not(RealSentence::positive(x)),
        HyperFormula::not(RealSentence::negative(x)),
        w,
    )
}

/// `xy = 0 => x = 0 v y = 0`.
pub fn nil(x: &ConstructiveReal, y: &ConstructiveReal, w: WitnessProcedure) -> Result<HyperFormula, RealError> {
    let xy = real_mul(x, y)?;
    Ok(HyperFormula::implies(
        RealSentence::zero(&xy),
        HyperFormula::or(RealSentence::zero(x), RealSentence::zero(y), w),
    ))
}

/// `~~P v P`.
pub fn wlpo(p: &Statement, w: WitnessProcedure) -> HyperFormula {
    HyperFormula::or(HyperFormula::not(HyperFormula::not(p.clone())), p.clone(), w)
}

/// `~~(x > 0) v x > 0`.
pub fn wlpo_real(x: &ConstructiveReal, w: WitnessProcedure) -> HyperFormula {
    HyperFormula::or(
        HyperFormula::not(HyperFormula::not(RealSentence::positive(x))),
        RealSentence::positive(x),
        w,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_formula, parse_statement};
    use crate::model::{HyperModel, Level};
    use crate::omega::{OmegaParamFormula, ScanOptions};

    fn m() -> HyperModel {
        HyperModel::default_model()
    }

    fn constant(src: &str) -> WitnessProcedure {
        let psi = OmegaParamFormula::new(parse_formula(src).unwrap(), vec![], "w", Level::STANDARD).unwrap();
        WitnessProcedure::verify(&m(), psi, &ScanOptions::default()).unwrap()
    }

    #[test]
    fn llpo_vacuous() {
        let p = parse_statement("EX n in N . n = 5").unwrap();
        let v = llpo(&p, &p, constant("0 = 0")).verdict(&m()).unwrap();
        assert!(v.holds);
    }

    #[test]
    fn nil_takes_the_first_branch() {
        let x = ConstructiveReal::zero();
        let y = ConstructiveReal::from_integer(1);
        assert!(nil(&x, &y, constant("0 = 0")).unwrap().holds(&m()).unwrap());
        assert!(!nil(&x, &y, constant("0 = 1")).unwrap().holds(&m()).unwrap());
    }

    #[test]
    fn wlpo_with_false_p_fails_for_either_witness() {
        let p = parse_statement("EX n in N . 0 = 1").unwrap();
        for w in ["0 = 0", "0 = 1"] {
            assert!(!wlpo(&p, constant(w)).holds(&m()).unwrap(), "{w}");
        }
        let p = parse_statement("EX n in N . n = 5").unwrap();
        assert!(wlpo(&p, constant("0 = 1")).holds(&m()).unwrap());
    }

    #[test]
    fn llpr_on_zero() {
        let v = llpr(&ConstructiveReal::zero(), constant("0 = 0")).verdict(&m()).unwrap();
        assert!(v.holds);
    }
}
