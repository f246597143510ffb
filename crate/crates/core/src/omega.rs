//! Omega-invariance, stabilisation moduli and comprehension over omega-invariant
//! formulas.
//!
//! A formula `psi(x, w)` is omega-invariant at level `k` when, for every standard
//! assignment of `x`, its truth value is the same for every `w` in the band
//! `[t_k, M]`. Scans compare each `w'` against the reference `w = t_k`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{assignments, Compiled, Env, EvalError, Formula, Term};
use crate::model::{Band, HyperModel, Level, ModelError};

/// Default cap on `t_0^k * |band|^2` for exhaustive scans.
pub const DEFAULT_BUDGET: u64 = 1 << 32;
/// Default cap on the number of standard parameters.
pub const DEFAULT_ARITY_CAP: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OmegaError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("`{0}` is both a standard parameter and the omega variable")]
    ParamClash(String),
    #[error("free variable `{0}` is neither a parameter nor the omega variable")]
    StrayVariable(String),
    #[error("{arity} standard parameters exceed the cap of {cap}")]
    ArityCap { arity: usize, cap: usize },
    #[error("exhaustive scan costs {cost} evaluations, over the budget of {budget}")]
    Budget { cost: u128, budget: u64 },
    #[error("formula is not omega-invariant: {0}")]
    NotInvariant(Counterexample),
    #[error("{omega} is outside the band [{lo}, {hi}]")]
    OutsideBand { omega: u64, lo: u64, hi: u64 },
    #[error("expected exactly {expected} standard parameter(s), got {got}")]
    Arity { expected: usize, got: usize },
    #[error("{0}")]
    Precondition(String),
}

/// A bounded formula with standard parameters and one distinguished omega
/// variable. The omega variable may be vacuous, so constant formulas such as
/// `0 = 0` are procedures too.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaParamFormula {
    pub body: Formula,
    pub standard_params: Vec<String>,
    pub omega_param: String,
    pub level: Level,
}

impl OmegaParamFormula {
    pub fn new(body: Formula, standard_params: Vec<String>, omega_param: &str, level: Level) -> Result<Self, OmegaError> {
        let free = body.free_vars();
        if let Some(p) = standard_params.iter().find(|p| *p == omega_param) {
            return Err(OmegaError::ParamClash(p.clone()));
        }
        if let Some(stray) = free.iter().find(|v| *v != omega_param && !standard_params.contains(v)) {
            return Err(OmegaError::StrayVariable(stray.clone()));
        }
        Ok(OmegaParamFormula { body, standard_params, omega_param: omega_param.to_string(), level })
    }

    /// Every free variable other than `omega_param` becomes a standard
    /// parameter, in sorted order. Level 0.
    pub fn infer(body: Formula, omega_param: &str) -> Result<Self, OmegaError> {
        let params: Vec<String> = body.free_vars().into_iter().filter(|v| v != omega_param).collect();
        OmegaParamFormula::new(body, params, omega_param, Level::STANDARD)
    }

    pub fn arity(&self) -> usize {
        self.standard_params.len()
    }

    pub fn at_level(mut self, level: Level) -> Self {
        self.level = level;
        self
    }

    /// Compiled with inputs `standard_params ++ [omega_param]`.
    pub fn compile(&self, model: &HyperModel) -> Result<Compiled, OmegaError> {
        let mut inputs = self.standard_params.clone();
        inputs.push(self.omega_param.clone());
        Ok(Compiled::plain(model, &self.body, &inputs)?)
    }

    pub fn band(&self, model: &HyperModel) -> Result<Band, OmegaError> {
        Ok(model.omega_band(self.level)?)
    }

    /// Truth at one assignment and one omega.
    pub fn eval(&self, model: &HyperModel, assignment: &[u64], omega: u64) -> Result<bool, OmegaError> {
        let c = self.compile(model)?;
        let mut args = assignment.to_vec();
        args.push(omega);
        Ok(c.eval(&args)?)
    }
}

impl fmt::Display for OmegaParamFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "psi({}; {}) = {}", self.standard_params.join(", "), self.omega_param, self.body)
    }
}

/// A name not among `taken`, trying `base`, then `base1`, `base2`, ...
pub fn fresh_var(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}{i}")).find(|c| !taken.contains(c)).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScanMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

impl fmt::Display for ScanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanMode::Exhaustive => write!(f, "exhaustive"),
            ScanMode::Sampled { count, seed } => write!(f, "sampled(count={count}, seed={seed})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub mode: ScanMode,
    pub budget: u64,
    pub arity_cap: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { mode: ScanMode::Exhaustive, budget: DEFAULT_BUDGET, arity_cap: DEFAULT_ARITY_CAP }
    }
}

impl ScanOptions {
    pub fn sampled(count: usize, seed: u64) -> Self {
        ScanOptions { mode: ScanMode::Sampled { count, seed }, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub assignment: Vec<u64>,
    pub omega: u64,
    pub omega_prime: u64,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {:?} the value differs between w={} and w'={}", self.assignment, self.omega, self.omega_prime)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OmegaReport {
    pub invariant: bool,
    pub counterexample: Option<Counterexample>,
    pub mode: ScanMode,
    pub checked_pairs: u64,
}

fn check_arity(psi: &OmegaParamFormula, opts: &ScanOptions) -> Result<(), OmegaError> {
    if psi.arity() > opts.arity_cap {
        return Err(OmegaError::ArityCap { arity: psi.arity(), cap: opts.arity_cap });
    }
    Ok(())
}

/// Number of assignments handed to the thread pool at a time; scanning stops
/// after the first chunk containing a counterexample.
const CHUNK: usize = 64;

pub fn check_omega_invariance(
    model: &HyperModel,
    psi: &OmegaParamFormula,
    opts: &ScanOptions,
) -> Result<OmegaReport, OmegaError> {
    check_arity(psi, opts)?;
    let band = psi.band(model)?;
    let t0 = model.standard_bound();
    let omegas: Vec<u64> = match opts.mode {
        ScanMode::Exhaustive => {
            let cost = (t0 as u128).pow(psi.arity() as u32) * (band.len() as u128).pow(2);
            if cost > opts.budget as u128 {
                return Err(OmegaError::Budget { cost, budget: opts.budget });
            }
            (band.lo + 1..=band.hi).collect()
        }
        ScanMode::Sampled { count, seed } => model
            .sample_omegas(psi.level, count, seed)?
            .into_iter()
            .map(|h| h.value())
            .filter(|&w| w != band.lo)
            .collect(),
    };
    let compiled = psi.compile(model)?;
    let reference = band.lo;

    let scan_one = |a: &Vec<u64>| -> Result<(u64, Option<u64>), OmegaError> {
        let mut slots = compiled.scratch();
        let k = a.len();
        let at = |w: u64, slots: &mut [u64]| -> Result<bool, EvalError> {
            slots[..k].copy_from_slice(a);
            slots[k] = w;
            compiled.eval_slots(slots)
        };
        let base = at(reference, &mut slots)?;
        for (i, &w) in omegas.iter().enumerate() {
            if at(w, &mut slots)? != base {
                return Ok((i as u64 + 1, Some(w)));
            }
        }
        Ok((omegas.len() as u64, None))
    };

    let all: Vec<Vec<u64>> = assignments(psi.arity(), t0).collect();
    let mut checked = 0u64;
    for chunk in all.chunks(CHUNK) {
        let results: Vec<Result<(u64, Option<u64>), OmegaError>> = chunk.par_iter().map(scan_one).collect();
        for (a, r) in chunk.iter().zip(results) {
            let (n, hit) = r?;
            checked += n;
            if let Some(w) = hit {
                let cx = Counterexample { assignment: a.clone(), omega: reference, omega_prime: w };
                debug_assert_ne!(psi.eval(model, a, reference)?, psi.eval(model, a, w)?);
                return Ok(OmegaReport { invariant: false, counterexample: Some(cx), mode: opts.mode, checked_pairs: checked });
            }
        }
    }
    Ok(OmegaReport { invariant: true, counterexample: None, mode: opts.mode, checked_pairs: checked })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModulusEntry {
    pub assignment: Vec<u64>,
    pub m0: u64,
    pub stable_value: bool,
}

/// Least stabilisation points, one per standard assignment, in lexicographic
/// order of the assignments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Modulus {
    pub entries: Vec<ModulusEntry>,
}

impl Modulus {
    pub fn get(&self, assignment: &[u64]) -> Option<&ModulusEntry> {
        self.entries.iter().find(|e| e.assignment == assignment)
    }
}

/// Least `m0` such that `psi(assignment, .)` is constant on `[m0, M]`, with that
/// constant value. Needs no invariance.
pub fn modulus_at(model: &HyperModel, psi: &OmegaParamFormula, assignment: &[u64]) -> Result<(u64, bool), OmegaError> {
    let compiled = psi.compile(model)?;
    modulus_compiled(model, &compiled, assignment)
}

fn modulus_compiled(model: &HyperModel, compiled: &Compiled, assignment: &[u64]) -> Result<(u64, bool), OmegaError> {
    scan_down(compiled, assignment, model.max_element())
}

/// Least `m0 <= top` with `psi(assignment, .)` constant on `[m0, top]`.
fn scan_down(compiled: &Compiled, assignment: &[u64], top: u64) -> Result<(u64, bool), OmegaError> {
    let k = assignment.len();
    let mut slots = compiled.scratch();
    let mut at = |m: u64| -> Result<bool, EvalError> {
        slots[..k].copy_from_slice(assignment);
        slots[k] = m;
        compiled.eval_slots(&mut slots)
    };
    let stable = at(top)?;
    let mut m0 = top;
    while m0 > 0 && at(m0 - 1)? == stable {
        m0 -= 1;
    }
    Ok((m0, stable))
}

pub fn extract_modulus(model: &HyperModel, psi: &OmegaParamFormula, opts: &ScanOptions) -> Result<Modulus, OmegaError> {
    let exhaustive = ScanOptions { mode: ScanMode::Exhaustive, ..*opts };
    let report = check_omega_invariance(model, psi, &exhaustive)?;
    if let Some(cx) = report.counterexample {
        return Err(OmegaError::NotInvariant(cx));
    }
    let compiled = psi.compile(model)?;
    // invariance makes psi constant on the band, so the scan starts at its bottom
    let start = psi.band(model)?.lo;
    let all: Vec<Vec<u64>> = assignments(psi.arity(), model.standard_bound()).collect();
    let entries = all
        .par_iter()
        .map(|a| {
            let (m0, stable_value) = scan_down(&compiled, a, start)?;
            Ok(ModulusEntry { assignment: a.clone(), m0, stable_value })
        })
        .collect::<Result<Vec<_>, OmegaError>>()?;
    Ok(Modulus { entries })
}

/// A standard set given by its characteristic bits over `[0, t_0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecidableSet {
    pub bits: Vec<bool>,
    pub omega: u64,
    pub recheck_omega: u64,
}

impl DecidableSet {
    pub fn contains(&self, n: u64) -> bool {
        self.bits.get(n as usize).copied().unwrap_or(false)
    }

    pub fn members(&self) -> Vec<u64> {
        (0..self.bits.len() as u64).filter(|&n| self.bits[n as usize]).collect()
    }
}

fn bits_at(model: &HyperModel, compiled: &Compiled, omega: u64) -> Result<Vec<bool>, OmegaError> {
    (0..model.standard_bound()).map(|n| Ok(compiled.eval(&[n, omega])?)).collect()
}

/// The standard set `{n : psi(n, omega)}` for an omega-invariant `psi` with one
/// standard parameter.
pub fn omega_ca(
    model: &HyperModel,
    psi: &OmegaParamFormula,
    omega: u64,
    opts: &ScanOptions,
) -> Result<DecidableSet, OmegaError> {
    if psi.arity() != 1 {
        return Err(OmegaError::Arity { expected: 1, got: psi.arity() });
    }
    let band = psi.band(model)?;
    if !band.contains(omega) {
        return Err(OmegaError::OutsideBand { omega, lo: band.lo, hi: band.hi });
    }
    let report = check_omega_invariance(model, psi, opts)?;
    if let Some(cx) = report.counterexample {
        return Err(OmegaError::NotInvariant(cx));
    }
    let compiled = psi.compile(model)?;
    let bits = bits_at(model, &compiled, omega)?;
    let recheck_omega = if omega == band.hi { band.lo } else { band.hi };
    if bits_at(model, &compiled, recheck_omega)? != bits {
        return Err(OmegaError::Precondition(format!(
            "comprehension differs between w={omega} and w={recheck_omega}"
        )));
    }
    Ok(DecidableSet { bits, omega, recheck_omega })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnderspillReport {
    pub holds_on_band: bool,
    /// Least band element where the formula fails, if any.
    pub band_failure: Option<u64>,
    /// Least standard element where the formula holds, if any.
    pub witness: Option<u64>,
    /// The formula holds on the whole band but at no standard element.
    pub violation: bool,
}

/// Checks `(for all w in Omega) phi(w) -> (exists m in N) phi(m)` for `phi` in
/// the distinguished variable `var`, other free variables taken from `env`.
pub fn underspill_check(model: &HyperModel, phi: &Formula, var: &str, env: &Env) -> Result<UnderspillReport, OmegaError> {
    let mut inputs: Vec<String> = env.vars.keys().filter(|k| *k != var).cloned().collect();
    let fixed: Vec<u64> = inputs.iter().map(|k| env.vars[k]).collect();
    inputs.push(var.to_string());
    let compiled = Compiled::new(model, phi, &inputs, &env.sets)?;
    let at = |m: u64| -> Result<bool, EvalError> {
        let mut args = fixed.clone();
        args.push(m);
        compiled.eval(&args)
    };
    let band = model.omega_band(Level::STANDARD)?;
    let mut band_failure = None;
    for w in band.lo..=band.hi {
        if !at(w)? {
            band_failure = Some(w);
            break;
        }
    }
    let holds_on_band = band_failure.is_none();
    let mut witness = None;
    for m in 0..model.standard_bound() {
        if at(m)? {
            witness = Some(m);
            break;
        }
    }
    Ok(UnderspillReport { holds_on_band, band_failure, witness, violation: holds_on_band && witness.is_none() })
}

/// An omega-parameterised formula offered as a decision procedure, with the
/// result of its invariance check once verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessProcedure {
    pub psi: OmegaParamFormula,
    pub report: Option<OmegaReport>,
}

impl WitnessProcedure {
    pub fn unverified(psi: OmegaParamFormula) -> Self {
        WitnessProcedure { psi, report: None }
    }

    /// Runs the invariance check. The procedure is returned either way; see
    /// [`WitnessProcedure::verified`].
    pub fn verify(model: &HyperModel, psi: OmegaParamFormula, opts: &ScanOptions) -> Result<Self, OmegaError> {
        let report = check_omega_invariance(model, &psi, opts)?;
        Ok(WitnessProcedure { psi, report: Some(report) })
    }

    pub fn verified(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.invariant)
    }

    /// The reference omega of the procedure's level.
    pub fn reference_omega(&self, model: &HyperModel) -> Result<u64, OmegaError> {
        Ok(self.psi.band(model)?.lo)
    }

    /// `psi(assignment, w)` at the reference omega.
    pub fn decide(&self, model: &HyperModel, assignment: &[u64]) -> Result<bool, OmegaError> {
        self.psi.eval(model, assignment, self.reference_omega(model)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalDecision {
    pub procedure: WitnessProcedure,
    /// `(for all n in N) phi(n)`.
    pub verdict: bool,
    pub least_counterexample: Option<u64>,
}

/// `psi(w) = (ALL n <= w) phi(n)` as a decision procedure for
/// `(for all n in N) phi(n)`, with both directions checked at the reference
/// omega.
pub fn universal_decision(
    model: &HyperModel,
    phi: &Formula,
    var: &str,
    opts: &ScanOptions,
) -> Result<UniversalDecision, OmegaError> {
    let mut free = phi.free_vars();
    free.remove(var);
    if let Some(stray) = free.into_iter().next() {
        return Err(OmegaError::StrayVariable(stray));
    }
    let compiled = Compiled::plain(model, phi, &[var.to_string()])?;
    let mut least_counterexample = None;
    for n in 0..model.standard_bound() {
        if !compiled.eval(&[n])? {
            least_counterexample = Some(n);
            break;
        }
    }
    let taken: BTreeSet<String> = phi.free_vars().into_iter().chain([var.to_string()]).collect();
    let w = fresh_var("w", &taken);
    let body = Formula::forall_le(var, Term::var(&w), phi.clone());
    let psi = OmegaParamFormula::new(body, Vec::new(), &w, Level::STANDARD)?;
    let procedure = WitnessProcedure::verify(model, psi, opts)?;
    let decided = procedure.decide(model, &[])?;
    let verdict = least_counterexample.is_none();
    if decided && !verdict {
        return Err(OmegaError::Precondition(format!(
            "psi(w) holds at the reference omega but phi fails at the standard n={}",
            least_counterexample.unwrap()
        )));
    }
    if !decided && verdict {
        return Err(OmegaError::Precondition(
            "psi(w) fails at the reference omega but phi holds at every standard n: the universal statement does not transfer"
                .to_string(),
        ));
    }
    if !procedure.verified() {
        let cx = procedure.report.as_ref().and_then(|r| r.counterexample.clone()).unwrap();
        return Err(OmegaError::NotInvariant(cx));
    }
    Ok(UniversalDecision { procedure, verdict, least_counterexample })
}
