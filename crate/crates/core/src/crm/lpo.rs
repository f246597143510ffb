//! LPO against universal transfer.

use std::collections::BTreeSet;

use super::{least_witness, CrmError, Derivation, Path, Sigma1Instance};
use crate::formula::{assignments, Formula, Term};
use crate::hyperlogic::{hyper_or_witnessed, HyperFormula};
use crate::model::{HyperModel, Level};
use crate::omega::{fresh_var, OmegaParamFormula, ScanOptions, WitnessProcedure};
use crate::transfer::pi1_trans_detail;

/// Supplies a witness procedure deciding `P v ~P` for a Sigma1 instance `P`,
/// or declines.
pub trait OracleLpo {
    fn witness(&self, model: &HyperModel, inst: &Sigma1Instance) -> Option<WitnessProcedure>;
}

impl<F> OracleLpo for F
where
    F: Fn(&HyperModel, &Sigma1Instance) -> Option<WitnessProcedure>,
{
    fn witness(&self, model: &HyperModel, inst: &Sigma1Instance) -> Option<WitnessProcedure> {
        self(model, inst)
    }
}

/// The oracle that builds its witness from universal transfer.
#[derive(Debug, Clone, Default)]
pub struct TransferLpo {
    pub opts: ScanOptions,
}

impl OracleLpo for TransferLpo {
    fn witness(&self, model: &HyperModel, inst: &Sigma1Instance) -> Option<WitnessProcedure> {
        lpo_witness_from_transfer(model, inst, &self.opts).ok()
    }
}

/// `psi(x, w) = EX n <= w . phi(n, x)`.
pub fn search_formula(inst: &Sigma1Instance) -> Result<OmegaParamFormula, CrmError> {
    let taken: BTreeSet<String> = inst.phi.free_vars().into_iter().chain([inst.var.clone()]).collect();
    let w = fresh_var("w", &taken);
    let body = Formula::exists_le(&inst.var, Term::var(&w), inst.phi.clone());
    Ok(OmegaParamFormula::new(body, inst.params.clone(), &w, Level::STANDARD)?)
}

/// `P` and `~P` for the instance, parameters unassigned.
fn disjuncts(inst: &Sigma1Instance) -> (HyperFormula, HyperFormula) {
    let p = inst.statement(Level::STANDARD);
    (HyperFormula::from(p.clone()), HyperFormula::not(p))
}

/// Builds and checks the witness for `P v ~P` where `P = EX n in N . phi`,
/// assuming universal transfer of `!phi`.
///
/// When transfer fails the error names the failing assignment and says what
/// goes wrong with the search witness: either it is not omega-invariant or it
/// selects a disjunct that does not hold.
pub fn lpo_witness_from_transfer(
    model: &HyperModel,
    inst: &Sigma1Instance,
    opts: &ScanOptions,
) -> Result<WitnessProcedure, CrmError> {
    let not_phi = inst.phi.clone().negate();
    let failure = pi1_trans_detail(model, &not_phi, &inst.var, Level::Top)?;
    let psi = search_formula(inst)?;
    let procedure = WitnessProcedure::verify(model, psi, opts)?;
    let (a, b) = disjuncts(inst);
    if let Some(f) = failure {
        let consequence = if !procedure.verified() {
            let cx = procedure.report.as_ref().and_then(|r| r.counterexample.clone());
            match cx {
                Some(cx) => format!("the search witness is not omega-invariant ({cx})"),
                None => "the search witness is not omega-invariant".to_string(),
            }
        } else {
            let v = hyper_or_witnessed(model, &a, &b, &procedure)?;
            if v.holds {
                return Err(CrmError::Inconsistent(format!(
                    "transfer of !phi fails at {:?} yet the search witness decides P v ~P",
                    f.params
                )));
            }
            match v.failing_part {
                Some(p) => format!("the search witness fails: {} at {:?}", p.part, p.assignment),
                None => "the search witness fails".to_string(),
            }
        };
        return Err(CrmError::Precondition(format!(
            "!phi does not transfer: at {:?} phi has no standard witness but holds at n={}; {consequence}",
            f.params, f.n
        )));
    }
    if !procedure.verified() {
        return Err(CrmError::Inconsistent("!phi transfers but the search witness is not omega-invariant".to_string()));
    }
    let v = hyper_or_witnessed(model, &a, &b, &procedure)?;
    if !v.holds {
        return Err(CrmError::Inconsistent(format!(
            "!phi transfers but the search witness fails: {:?}",
            v.failing_part
        )));
    }
    Ok(procedure)
}

/// Derives `(EX n in *N) phi(n, x0) -> (EX n in N) phi(n, x0)` from the
/// oracle's answer for the instance.
///
/// The witness is decided at `x0`. If it picks `P`, a standard witness must
/// exist. If it picks `~P`, the transfer part of `~P` requires `!phi` on the
/// whole universe, so a non-standard witness refutes the oracle. A refusal
/// gives a false verdict.
pub fn transfer_from_lpo(
    model: &HyperModel,
    oracle: &dyn OracleLpo,
    inst: &Sigma1Instance,
    x0: &[u64],
) -> Result<Derivation, CrmError> {
    if x0.len() != inst.arity() {
        return Err(CrmError::Input(format!("expected {} parameter values, got {}", inst.arity(), x0.len())));
    }
    let t0 = model.standard_bound();
    if let Some(v) = x0.iter().find(|&&v| v >= t0) {
        return Err(CrmError::Input(format!("parameter value {v} is not standard")));
    }
    let Some(w) = oracle.witness(model, inst) else {
        return Ok(Derivation::new(false, Path::Declined).with_note("oracle declined"));
    };
    check_witness_shape(inst, &w)?;
    derive_at(model, inst, &w, x0)
}

/// [`transfer_from_lpo`] at every standard parameter assignment. The verdict
/// is the conjunction; the first failing assignment is noted.
pub fn transfer_from_lpo_all(
    model: &HyperModel,
    oracle: &dyn OracleLpo,
    inst: &Sigma1Instance,
) -> Result<Derivation, CrmError> {
    let Some(w) = oracle.witness(model, inst) else {
        return Ok(Derivation::new(false, Path::Declined).with_note("oracle declined"));
    };
    check_witness_shape(inst, &w)?;
    let mut last = Derivation::new(true, Path::Vacuous);
    for x in assignments(inst.arity(), model.standard_bound()) {
        let d = derive_at(model, inst, &w, &x)?;
        if !d.verdict {
            return Ok(d.with_note(format!("fails at {:?}", inst.values(&x))));
        }
        last = d;
    }
    Ok(last)
}

fn check_witness_shape(inst: &Sigma1Instance, w: &WitnessProcedure) -> Result<(), CrmError> {
    if !w.verified() {
        return Err(CrmError::Soundness("witness procedure is not verified omega-invariant".to_string()));
    }
    if w.psi.standard_params != inst.params {
        return Err(CrmError::Soundness(format!(
            "witness parameters {:?} do not match the instance parameters {:?}",
            w.psi.standard_params, inst.params
        )));
    }
    Ok(())
}

fn derive_at(model: &HyperModel, inst: &Sigma1Instance, w: &WitnessProcedure, x0: &[u64]) -> Result<Derivation, CrmError> {
    let c = inst.compile(model)?;
    let standard = least_witness(&c, x0, model.standard_bound())?;
    let universe = least_witness(&c, x0, model.max_element() + 1)?;
    let at = inst.values(x0);
    if w.decide(model, x0)? {
        let Some(n) = standard else {
            return Err(CrmError::Soundness(format!(
                "witness selects `{inst}` at {at:?}, but phi has no standard witness"
            )));
        };
        let d = Derivation::new(true, Path::Witness).with_witness(n);
        return Ok(if universe.is_some() { d } else { d.with_note("hypothesis false") });
    }
    if let Some(n) = standard {
        return Err(CrmError::Soundness(format!(
            "witness selects ~P at {at:?}, but phi holds at the standard n={n}"
        )));
    }
    if let Some(n) = universe {
        return Err(CrmError::Soundness(format!(
            "witness selects ~P at {at:?}, whose transfer part needs !phi everywhere, but phi holds at n={n}"
        )));
    }
    Ok(Derivation::new(true, Path::Negative))
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

    fn constant(src: &str, params: &[&str]) -> WitnessProcedure {
        let body = parse_formula(src).unwrap();
        let psi = OmegaParamFormula::new(body, params.iter().map(|s| s.to_string()).collect(), "w", Level::STANDARD).unwrap();
        WitnessProcedure::verify(&m(), psi, &ScanOptions::default()).unwrap()
    }

    #[test]
    fn transferring_instance_gets_a_witness() {
        let i = inst("n * n = x");
        let w = lpo_witness_from_transfer(&m(), &i, &ScanOptions::default()).unwrap();
        assert!(w.verified());
        assert!(w.decide(&m(), &[9]).unwrap());
        assert!(!w.decide(&m(), &[8]).unwrap());
    }

    #[test]
    fn non_transferring_instance_is_diagnosed() {
        let err = lpo_witness_from_transfer(&m(), &inst("n = x + 20"), &ScanOptions::default()).unwrap_err();
        let CrmError::Precondition(msg) = err else { panic!("{err:?}") };
        assert!(msg.contains("n=20"), "{msg}");
        assert!(msg.contains("not omega-invariant"), "{msg}");
    }

    #[test]
    fn derivation_matches_exhaustive_transfer() {
        let oracle = TransferLpo::default();
        for (src, expected) in [("n * n = x", true), ("n = 5", true), ("n = 20", false), ("n = x + 20", false)] {
            let d = transfer_from_lpo_all(&m(), &oracle, &inst(src)).unwrap();
            assert_eq!(d.verdict, expected, "{src}");
        }
        let d = transfer_from_lpo(&m(), &oracle, &inst("n = 5"), &[]).unwrap();
        assert_eq!((d.path, d.witness), (Path::Witness, Some(5)));
    }

    #[test]
    fn lying_oracle_is_caught() {
        let i = inst("n = 20");
        let liar = |_: &HyperModel, _: &Sigma1Instance| Some(constant("0 = 0", &[]));
        let err = transfer_from_lpo(&m(), &liar, &i, &[]).unwrap_err();
        assert!(matches!(err, CrmError::Soundness(_)), "{err:?}");
        let other = |_: &HyperModel, _: &Sigma1Instance| Some(constant("0 = 1", &[]));
        let err = transfer_from_lpo(&m(), &other, &i, &[]).unwrap_err();
        let CrmError::Soundness(msg) = err else { panic!() };
        assert!(msg.contains("n=20"), "{msg}");
    }

    #[test]
    fn decline_is_a_false_verdict() {
        let none = |_: &HyperModel, _: &Sigma1Instance| None;
        let d = transfer_from_lpo(&m(), &none, &inst("n = 5"), &[]).unwrap();
        assert_eq!((d.verdict, d.path), (false, Path::Declined));
    }
}
