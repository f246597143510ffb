//! MCT against LPO: limits of bounded monotone sequences by interval halving,
//! and the jump construction that turns a limit oracle into transfer.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;

use super::{CrmError, Derivation, Path, Sigma1Instance};
use crate::model::HyperModel;
use crate::reals::{bound_of, dyadic, real_add, real_lt, real_mul, real_neg, ConstructiveReal, Rational};

/// `n -> w_n`, declared non-decreasing and bounded by `bound`.
#[derive(Clone)]
pub struct MonotoneSequence {
    terms: Arc<dyn Fn(u64) -> ConstructiveReal + Send + Sync>,
    pub bound: Rational,
    pub provenance: String,
}

impl fmt::Debug for MonotoneSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonotoneSequence({}, B = {})", self.provenance, self.bound)
    }
}

impl MonotoneSequence {
    pub fn new(
        provenance: impl Into<String>,
        bound: Rational,
        terms: impl Fn(u64) -> ConstructiveReal + Send + Sync + 'static,
    ) -> Self {
        MonotoneSequence { terms: Arc::new(terms), bound, provenance: provenance.into() }
    }

    /// A sequence of rational constants.
    pub fn from_rationals(
        provenance: impl Into<String>,
        bound: Rational,
        terms: impl Fn(u64) -> Rational + Send + Sync + 'static,
    ) -> Self {
        MonotoneSequence::new(provenance, bound, move |n| ConstructiveReal::from_rational(terms(n)))
    }

    pub fn term(&self, n: u64) -> ConstructiveReal {
        (self.terms)(n)
    }

    /// Looks for `w_(n+1) < w_n` or `B < w_n` with `n < count`, deciding each
    /// comparison up to `budget`.
    pub fn spot_check(&self, count: u64, budget: u64) -> Result<(), CrmError> {
        let b = ConstructiveReal::from_rational(self.bound.clone());
        let mut cur = self.term(0);
        for n in 0..count {
            if real_lt(&b, &cur, budget).is_true() {
                return Err(CrmError::Input(format!("w_{n} exceeds the bound {}", self.bound)));
            }
            let next = self.term(n + 1);
            if real_lt(&next, &cur, budget).is_true() {
                return Err(CrmError::Input(format!("sequence decreases at n={n}: w_{} < w_{n}", n + 1)));
            }
            cur = next;
        }
        Ok(())
    }
}

/// `w_n = 1 - 1/2^(n+1)` with `B = 1`.
pub fn geometric_to_one() -> MonotoneSequence {
    MonotoneSequence::from_rationals("1 - 1/2^(n+1)", Rational::from_integer(1.into()), |n| {
        Rational::from_integer(1.into()) - dyadic(n + 1)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MctOptions {
    /// Halving steps. `None` picks `t_0 - 4` when transfer is checked, which
    /// keeps the comparison witnesses of a geometrically converging sequence
    /// standard, and `2 t_0` otherwise.
    pub depth: Option<u64>,
    pub k_max: u64,
    /// Check transfer for every comparison query and the omega-invariance of
    /// the modulus. Without it queries and moduli are read over the standard
    /// indices only.
    pub check_transfer: bool,
    pub spot_check: u64,
    pub budget: u64,
}

impl Default for MctOptions {
    fn default() -> Self {
        MctOptions { depth: None, k_max: 10, check_transfer: true, spot_check: 64, budget: 64 }
    }
}

impl MctOptions {
    pub fn standard() -> Self {
        MctOptions { check_transfer: false, ..MctOptions::default() }
    }

    fn depth(&self, model: &HyperModel) -> u64 {
        let t0 = model.standard_bound();
        self.depth.unwrap_or(if self.check_transfer { t0.saturating_sub(4).max(1) } else { 2 * t0 })
    }
}

#[derive(Debug, Clone)]
pub struct MctLimit {
    pub limit: ConstructiveReal,
    /// The value the limit's sequence settles on.
    pub value: Rational,
    /// `modulus[k]`: from this index on, `|w_m - x| <= 1/2^k`.
    pub modulus: Vec<u64>,
    pub queries: u64,
}

/// `sup_j w_j > c` as `EX j . q^(j)_j > c + 1/2^j`, the witness search cut at
/// `end`.
fn sup_above(seq: &MonotoneSequence, c: &Rational, start: u64, end: u64) -> Option<u64> {
    (start..end).find(|&j| seq.term(j).at(j) > c + dyadic(j))
}

/// `|q^(m)_(k+4) - v| + 1/2^(k+4) <= 1/2^k`, which implies `|w_m - v| <= 1/2^k`.
fn close(seq: &MonotoneSequence, m: u64, v: &Rational, k: u64) -> bool {
    let d = k + 4;
    (seq.term(m).at(d) - v).abs() + dyadic(d) <= dyadic(k)
}

/// Least `N` with `close(m)` for every `m` in `[N, omega]`.
fn least_stable(seq: &MonotoneSequence, v: &Rational, k: u64, omega: u64) -> u64 {
    let mut n = omega + 1;
    while n > 0 && close(seq, n - 1, v, k) {
        n -= 1;
    }
    n
}

/// Limit and modulus of a bounded non-decreasing sequence.
///
/// Each halving step asks whether the supremum exceeds the midpoint. The
/// question is Sigma1; it is answered by searching the standard indices,
/// which is the reading at the reference omega once its transfer has been
/// checked on the whole universe. The limit is the sequence of midpoints,
/// resolved to `depth` steps.
///
/// `modulus[k]` is the least `N` such that every `m` in `[N, t_0]` is within
/// `1/2^k` of the limit; with transfer checking on, the same search up to `M`
/// must give the same `N`.
pub fn mct_limit(model: &HyperModel, seq: &MonotoneSequence, opts: &MctOptions) -> Result<MctLimit, CrmError> {
    let t0 = model.standard_bound();
    let top = model.max_element();
    seq.spot_check(opts.spot_check.min(top), opts.budget)?;
    let depth = opts.depth(model);
    let mut lo = seq.term(0).at(0) - Rational::from_integer(1.into());
    let mut hi = seq.bound.clone();
    if lo > hi {
        return Err(CrmError::Input(format!("w_0 exceeds the bound {hi}")));
    }
    let width = &hi - &lo;
    let b = u64::from(bound_of(&width));
    let bound_exp = bound_of(&lo.abs().max(hi.abs()));
    let two = Rational::from_integer(BigInt::from(2));
    let mut mids = Vec::with_capacity(depth as usize + 1);
    mids.push((&lo + &hi) / &two);
    let mut queries = 0;
    for _ in 0..depth {
        let c = (&lo + &hi) / &two;
        queries += 1;
        let above = sup_above(seq, &c, 0, t0).is_some();
        if !above && opts.check_transfer {
            if let Some(j) = sup_above(seq, &c, t0, top + 1) {
                return Err(CrmError::Precondition(format!(
                    "the comparison sup > {c} has no standard witness but holds at j={j}"
                )));
            }
        }
        if above {
            lo = c;
        } else {
            hi = c;
        }
        mids.push((&lo + &hi) / &two);
    }
    let value = mids[depth as usize].clone();
    let mids = Arc::new(mids);
    let limit = ConstructiveReal::new(format!("lim {}", seq.provenance), Some(bound_exp), move |n| {
        mids[(n + b + 2).min(depth) as usize].clone()
    });
    let omega = if opts.check_transfer { t0 } else { t0 - 1 };
    let mut modulus = Vec::with_capacity(opts.k_max as usize + 1);
    for k in 0..=opts.k_max {
        let n = least_stable(seq, &value, k, omega);
        if opts.check_transfer {
            let far = least_stable(seq, &value, k, top);
            if far != n {
                return Err(CrmError::Precondition(format!(
                    "modulus at 1/2^{k} is {n} at the reference omega but {far} at {top}"
                )));
            }
        }
        if n >= t0 {
            return Err(CrmError::Precondition(format!("no standard modulus at 1/2^{k}")));
        }
        modulus.push(n);
    }
    Ok(MctLimit { limit, value, modulus, queries })
}

/// A limit with its modulus, plus the claim that the modulus bounds the
/// sequence at every hypernatural index too.
#[derive(Debug, Clone)]
pub struct MctAnswer {
    pub limit: ConstructiveReal,
    pub modulus: Vec<u64>,
    pub hyper_valid: bool,
}

pub trait OracleMct {
    fn limit(&self, model: &HyperModel, seq: &MonotoneSequence) -> Option<MctAnswer>;
}

impl<F> OracleMct for F
where
    F: Fn(&HyperModel, &MonotoneSequence) -> Option<MctAnswer>,
{
    fn limit(&self, model: &HyperModel, seq: &MonotoneSequence) -> Option<MctAnswer> {
        self(model, seq)
    }
}

/// Computes the limit over the standard indices and reports truthfully
/// whether its modulus survives up to `M`.
#[derive(Debug, Clone, Copy)]
pub struct HonestMct {
    pub opts: MctOptions,
}

impl Default for HonestMct {
    fn default() -> Self {
        HonestMct { opts: MctOptions::standard() }
    }
}

impl OracleMct for HonestMct {
    fn limit(&self, model: &HyperModel, seq: &MonotoneSequence) -> Option<MctAnswer> {
        let r = mct_limit(model, seq, &self.opts).ok()?;
        let last = seq.term(model.max_element());
        let hyper_valid = r.modulus.iter().enumerate().all(|(k, &n)| {
            let shifted = real_add(&seq.term(n), &ConstructiveReal::from_rational(dyadic(k as u64)));
            !real_lt(&shifted, &last, self.opts.budget).is_true()
        });
        Some(MctAnswer { limit: r.limit, modulus: r.modulus, hyper_valid })
    }
}

/// `z_n = w_n` while `phi` holds on `[0, n]`, and
/// `w + (B + 1 - w)(1 - 1/2^n)` from the first failure on.
pub fn jump_sequence(
    model: &HyperModel,
    inst: &Sigma1Instance,
    seq: &MonotoneSequence,
    w: &ConstructiveReal,
) -> Result<(MonotoneSequence, Option<u64>), CrmError> {
    let failure = first_failure(model, inst)?;
    if w.bound_exp.is_none() {
        return Err(CrmError::Input("the limit w needs a bound".to_string()));
    }
    let one = Rational::from_integer(1.into());
    let gap = real_add(&ConstructiveReal::from_rational(&seq.bound + &one), &real_neg(w));
    let (inner, w) = (seq.clone(), w.clone());
    let z = MonotoneSequence::new(format!("jump({}, {})", seq.provenance, inst.phi), &seq.bound + &one, move |n| {
        match failure {
            Some(f) if n >= f => {
                let c = ConstructiveReal::from_rational(Rational::from_integer(1.into()) - dyadic(n));
                real_add(&w, &real_mul(&c, &gap).expect("bounded factors"))
            }
            _ => inner.term(n),
        }
    });
    Ok((z, failure))
}

fn first_failure(model: &HyperModel, inst: &Sigma1Instance) -> Result<Option<u64>, CrmError> {
    let c = inst.compile(model)?;
    for n in 0..=model.max_element() {
        if !c.eval(&[n])? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Derives universal transfer of `phi` from a limit oracle.
///
/// The oracle is asked for the limit of the jump sequence. Its modulus at
/// tolerance 1/2 gives a standard `M2`. A failure of `phi` at `n0` puts
/// `z_n0` above `w + 1/2` while `z_M2 <= w`, which contradicts the modulus at
/// hypernatural indices: an oracle claiming otherwise is unsound, an honest
/// one has already conceded, and transfer fails.
pub fn transfer_from_mct(
    model: &HyperModel,
    oracle: &dyn OracleMct,
    inst: &Sigma1Instance,
    seq: &MonotoneSequence,
    w: &ConstructiveReal,
) -> Result<Derivation, CrmError> {
    inst.require_closed()?;
    let t0 = model.standard_bound();
    let (z, failure) = jump_sequence(model, inst, seq, w)?;
    if let Some(f) = failure.filter(|&f| f < t0) {
        return Ok(Derivation::new(true, Path::Vacuous).with_note(format!("phi fails at the standard n={f}")));
    }
    let Some(answer) = oracle.limit(model, &z) else {
        return Ok(Derivation::new(false, Path::Declined).with_note("oracle declined"));
    };
    let Some(&m2) = answer.modulus.get(1) else {
        return Err(CrmError::Soundness("modulus has no entry for tolerance 1/2".to_string()));
    };
    if m2 >= t0 {
        return Err(CrmError::Soundness(format!("modulus at tolerance 1/2 is {m2}, not standard")));
    }
    let half = ConstructiveReal::from_rational(dyadic(1));
    let budget = 64;
    for m in m2..t0 {
        let zm = z.term(m);
        if real_lt(&real_add(&zm, &half), &answer.limit, budget).is_true()
            || real_lt(&real_add(&answer.limit, &half), &zm, budget).is_true()
        {
            return Err(CrmError::Soundness(format!("|z_{m} - x| > 1/2 although {m} >= M2 = {m2}")));
        }
    }
    let Some(n0) = failure else {
        return Ok(Derivation::new(true, Path::Witness).with_note("phi holds on the whole universe, z = w"));
    };
    let zn0 = z.term(n0);
    if !real_lt(&real_add(w, &half), &zn0, budget).is_true() {
        return Err(CrmError::Inconsistent(format!("z_{n0} is not above w + 1/2")));
    }
    if !real_lt(&real_add(&z.term(m2), &half), &zn0, budget).is_true() {
        return Err(CrmError::Inconsistent(format!("no gap between z_{m2} and z_{n0}")));
    }
    if answer.hyper_valid {
        return Err(CrmError::Soundness(format!(
            "modulus claims |z_m - z_m'| <= 1/2 for all m, m' >= {m2}, but |z_{n0} - z_{m2}| > 1/2"
        )));
    }
    Ok(Derivation::new(false, Path::Contradiction)
        .with_witness(n0)
        .with_note(format!("phi fails at n={n0}; |z_{n0} - w| > 1/2 and |z_{n0} - z_{m2}| > 1/2")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::reals::real_eq;

    fn wide() -> HyperModel {
        HyperModel::new(1024, vec![64, 256]).unwrap()
    }

    fn rat(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn geometric_limit_and_modulus() {
        let model = wide();
        let seq = geometric_to_one();
        let r = mct_limit(&model, &seq, &MctOptions::default()).unwrap();
        assert!(real_eq(&r.limit, &ConstructiveReal::from_integer(1), 32));
        for (k, &f) in r.modulus.iter().enumerate() {
            assert!(f <= k as u64 + 1, "f({k}) = {f}");
            for m in f..=64 {
                let wm = rat(1) - dyadic(m + 1);
                assert!((wm - &r.value).abs() <= dyadic(k as u64));
            }
        }
    }

    #[test]
    fn constant_sequence() {
        let seq = MonotoneSequence::from_rationals("5", rat(5), |_| rat(5));
        let r = mct_limit(&wide(), &seq, &MctOptions::default()).unwrap();
        assert!(real_eq(&r.limit, &ConstructiveReal::from_integer(5), 32));
        assert!(r.modulus.iter().all(|&f| f == 0));
    }

    #[test]
    fn non_monotone_input_is_rejected() {
        let seq = MonotoneSequence::from_rationals("(-1)^n", rat(1), |n| if n % 2 == 0 { rat(1) } else { rat(-1) });
        let err = mct_limit(&wide(), &seq, &MctOptions::default()).unwrap_err();
        let CrmError::Input(msg) = err else { panic!("{err:?}") };
        assert!(msg.contains("n=0"), "{msg}");
    }

    #[test]
    fn slow_sequence_fails_transfer() {
        let seq = MonotoneSequence::from_rationals("1 - 1/(n+1)", rat(1), |n| {
            rat(1) - Rational::new(1.into(), BigInt::from(n + 1))
        });
        assert!(matches!(mct_limit(&wide(), &seq, &MctOptions::default()), Err(CrmError::Precondition(_))));
    }

    #[test]
    fn jump_detects_failed_transfer() {
        let model = HyperModel::default_model();
        let one = ConstructiveReal::from_integer(1);
        let inst = Sigma1Instance::new(parse_formula("n < 16").unwrap(), "n").unwrap();
        let seq = geometric_to_one();
        let (z, f) = jump_sequence(&model, &inst, &seq, &one).unwrap();
        assert_eq!(f, Some(16));
        let three_halves = ConstructiveReal::from_rational(Rational::new(3.into(), 2.into()));
        assert!(!real_lt(&z.term(16), &three_halves, 64).is_true());
        let d = transfer_from_mct(&model, &HonestMct::default(), &inst, &seq, &one).unwrap();
        assert_eq!((d.verdict, d.path, d.witness), (false, Path::Contradiction, Some(16)));

        let liar = |m: &HyperModel, s: &MonotoneSequence| {
            HonestMct::default().limit(m, s).map(|a| MctAnswer { hyper_valid: true, ..a })
        };
        assert!(matches!(transfer_from_mct(&model, &liar, &inst, &seq, &one), Err(CrmError::Soundness(_))));
    }

    #[test]
    fn true_everywhere_transfers() {
        let model = HyperModel::default_model();
        let one = ConstructiveReal::from_integer(1);
        let inst = Sigma1Instance::new(parse_formula("0 <= n").unwrap(), "n").unwrap();
        let d = transfer_from_mct(&model, &HonestMct::default(), &inst, &geometric_to_one(), &one).unwrap();
        assert!(d.verdict);
        let inst = Sigma1Instance::new(parse_formula("n < 3").unwrap(), "n").unwrap();
        let d = transfer_from_mct(&model, &HonestMct::default(), &inst, &geometric_to_one(), &one).unwrap();
        assert_eq!((d.verdict, d.path), (true, Path::Vacuous));
    }
}
