//! The round-trip suite behind `crm demo`: every result the crate implements,
//! run on small corpora and tallied.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::crm::{
    self, decide_real_sign, lpo_witness_from_transfer, mct_limit, mp_from_mpr, mp_reduce, pi1_dne, transfer_from_lpo_all,
    transfer_from_lpr, transfer_from_mct, CrmError, HonestLpr, HonestMct, HonestMpr, MctOptions, Path, Sigma1Instance,
    SignDecision, TransferLpo,
};
use crate::formula::{eval_statement, parse_formula, parse_statement, Env, Quantifier, Statement};
use crate::hyperlogic::{hyper_implies, hyper_not, HyperFormula};
use crate::model::{HyperModel, Level};
use crate::omega::{
    check_omega_invariance, extract_modulus, omega_ca, underspill_check, OmegaParamFormula, ScanOptions, WitnessProcedure,
};
use crate::reals::{dyadic, from_indicator, real_eq, validate_fast_cauchy, ConstructiveReal, Rational};
use crate::report::RunConfig;
use crate::transfer::{delta0_trans_check, in_t, pi1_trans, pi1_trans_level};
use crate::Error;

/// Omega-invariant formulas in the standard parameter `n` and omega `w`.
pub const MODULUS_CORPUS: &[&str] = &[
    "EX k <= w . k * k = n",
    "EX k <= w . k + k = n",
    "EX k <= w . 3 * k = n",
    "n < w",
    "n <= w",
    "EX k <= w . k * k * k = n",
    "ALL k <= w . !(k * k = n + 2)",
    "EX k <= w . k = n",
    "ALL k <= w . (k < n | n <= k)",
    "EX k <= w . k * k = n + 1",
    "EX k <= w . n + k = 15",
    "ALL k <= w . (k * k = n -> k < 3)",
    "EX k <= w . (k < n & n < 2 * k)",
    "n < 8",
    "EX k <= w . 5 * k = n + 2",
    "EX k <= w . k * (k + 1) = n",
    "0 = 0",
    "0 = 1",
    "EX k <= n . 2^k = n",
    "ALL k <= w . (n < k | k * 2 <= n + n)",
    "EX k <= w . (k <= n & EX j <= n . (k * j = n & 1 < k & 1 < j))",
];

/// Matrices `phi(n)` with no other free variable.
pub const CLOSED_CORPUS: &[&str] = &[
    "n = 5",
    "n = 20",
    "n = 500",
    "0 = 1",
    "0 = 0",
    "n * n = 49",
    "n * n = 50",
    "n * n = 289",
    "n = 2047",
    "n + 3 = 10",
    "2^n = 64",
    "n * 3 = 45",
    "n * 3 = 48",
    "n -. 10 = 5",
    "n -. 10 = 6",
    "n = 15",
    "n = 16",
    "15 < n",
    "n < 3",
    "n * n * n = 27",
    "n * n * n = 4096",
    "n + n = 31",
    "n + n = 32",
    "n = 100",
    "n = 127",
    "n = 128",
    "n * n = 400",
    "n * n = 16384",
    "n = 1000",
    "EX k <= n . (k * k = n & 3 < k)",
];

/// Matrices `phi(n, x)` or `phi(n, x, y)`.
pub const PARAM_CORPUS: &[&str] = &[
    "n = x",
    "n = x + 20",
    "n * n = x",
    "n = x * x",
    "n + x = 15",
    "n + x = 16",
    "2 * n = x",
    "n = x + y",
];

/// Matrices for double negation elimination.
pub const DNE_CORPUS: &[&str] = &[
    "n < 128",
    "n < 16",
    "0 = 0",
    "0 = 1",
    "!(n = 20)",
    "!(n = 500)",
    "!(n = 3)",
    "n * n < 1000000",
    "n < 2000",
    "!(n * n = 289)",
    "n + n < 300",
    "n -. 100 < 50",
    "!(2^n = 1024)",
    "n < 17",
    "n < 129",
    "!(n = 2048)",
    "n * 0 = 0",
    "n < 3 | 2 < n",
    "!(n * n * n = 3375)",
    "n <= 2048",
];

/// Outcome of one result's checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub theorem: String,
    pub checks: usize,
    pub passed: usize,
    pub notes: Vec<String>,
}

impl Entry {
    fn new(theorem: &str) -> Self {
        Entry { theorem: theorem.to_string(), checks: 0, passed: 0, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if ok {
            self.passed += 1;
        } else {
            self.notes.push(format!("FAILED: {}", what()));
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn ok(&self) -> bool {
        self.checks == self.passed
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scoreboard {
    pub entries: Vec<Entry>,
    pub caveat: &'static str,
}

const CAVEAT: &str = "Separations are instance-level failures in one finite model, not independence results.";

impl Scoreboard {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(Entry::ok)
    }
}

impl fmt::Display for Scoreboard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.entries.iter().map(|e| e.theorem.len()).max().unwrap_or(0);
        for e in &self.entries {
            let status = if e.ok() { "PASS" } else { "FAIL" };
            writeln!(f, "{status}  {:<width$}  {}/{}", e.theorem, e.passed, e.checks)?;
            for n in &e.notes {
                writeln!(f, "      {n}")?;
            }
        }
        writeln!(f, "note: {}", self.caveat)
    }
}

fn inst(src: &str) -> Result<Sigma1Instance, Error> {
    Ok(Sigma1Instance::new(parse_formula(src)?, "n")?)
}

fn closed(src: &str) -> Result<Sigma1Instance, Error> {
    let i = inst(src)?;
    if i.arity() != 0 {
        return Err(Error::Usage(format!("`{src}` has parameters")));
    }
    Ok(i)
}

/// Runs every block against the configured model.
pub fn run_demo(cfg: &RunConfig) -> Result<Scoreboard, Error> {
    let m = &cfg.model;
    let opts = cfg.scan_options();
    let entries = vec![
        modulus_lemma(m, &opts)?,
        omega_ca_block(m, &opts)?,
        delta0_trans(m)?,
        underspill(m)?,
        transfer_shapes(m)?,
        hyperconnectives(m)?,
        lpo_block(m, &opts)?,
        lpr_block(m, cfg.depth)?,
        mct_block(m)?,
        mp_block(m)?,
        dne_block(m, cfg.seed)?,
        forms_block(m, &opts)?,
    ];
    Ok(Scoreboard { entries, caveat: CAVEAT })
}

fn modulus_lemma(m: &HyperModel, opts: &ScanOptions) -> Result<Entry, Error> {
    let mut e = Entry::new("Modulus lemma");
    for src in [0, 3, 7, 10, 12, 17].map(|i| MODULUS_CORPUS[i]) {
        let psi = OmegaParamFormula::new(parse_formula(src)?, vec!["n".into()], "w", Level::STANDARD)?;
        let modulus = extract_modulus(m, &psi, opts)?;
        let c = psi.compile(m)?;
        let mut ok = true;
        for entry in &modulus.entries {
            let n = entry.assignment[0];
            let stable = (entry.m0..=m.max_element()).all(|w| c.eval(&[n, w]) == Ok(entry.stable_value));
            let minimal = entry.m0 == 0 || c.eval(&[n, entry.m0 - 1]) != Ok(entry.stable_value);
            ok &= stable && minimal;
        }
        e.check(ok, || format!("`{src}` modulus does not stabilise minimally"));
    }
    Ok(e)
}

fn omega_ca_block(m: &HyperModel, opts: &ScanOptions) -> Result<Entry, Error> {
    let mut e = Entry::new("Omega-CA");
    let psi = OmegaParamFormula::new(parse_formula("EX k <= w . k * k = n")?, vec!["n".into()], "w", Level::STANDARD)?;
    let band = psi.band(m)?;
    let set = omega_ca(m, &psi, band.midpoint(), opts)?;
    let squares: Vec<u64> = (0..m.standard_bound()).filter(|n| (0..=*n).any(|k| k * k == *n)).collect();
    e.check(set.members() == squares, || format!("squares below t0 come out as {:?}", set.members()));
    let bad = OmegaParamFormula::new(parse_formula("EX k <= w . 2 * k = w")?, vec![], "w", Level::STANDARD)?;
    let r = check_omega_invariance(m, &bad, opts)?;
    e.check(!r.invariant, || "a formula depending on w passed the invariance check".into());
    Ok(e)
}

fn delta0_trans(m: &HyperModel) -> Result<Entry, Error> {
    let mut e = Entry::new("Delta0-TRANS");
    for src in ["EX k <= x . k * k = y", "ALL k <= x . k + y <= 2 * x + y", "x * y = y * x", "x -. y <= x", "2^x = y"] {
        let ok = delta0_trans_check(m, &parse_formula(src)?, &Default::default())?;
        e.check(ok, || format!("`{src}` reads differently under the star map"));
    }
    Ok(e)
}

fn underspill(m: &HyperModel) -> Result<Entry, Error> {
    let mut e = Entry::new("Delta0-underspill (reported, not enforced)");
    let t0 = m.standard_bound();
    let cases = [("n = n".to_string(), false), (format!("{t0} <= n"), true), ("n * n = n | 100 < n".to_string(), false)];
    for (src, violation) in cases {
        let r = underspill_check(m, &parse_formula(&src)?, "n", &Env::new())?;
        e.check(r.violation == violation, || format!("`{src}`: violation = {}", r.violation));
        if r.violation {
            e.note(format!("`{src}` holds on the whole band but at no standard number"));
        }
    }
    Ok(e)
}

fn transfer_shapes(m: &HyperModel) -> Result<Entry, Error> {
    let mut e = Entry::new("Pi1-TRANS and the set T");
    let t0 = m.standard_bound();
    let cases = [
        (format!("ALL n in N . n < {t0}"), false),
        ("ALL n in N . 0 <= n".to_string(), true),
        (format!("EX n in *N . n = {}", t0 + 4), t0 + 4 < m.level_bound(Level::Finite(1))),
        (format!("EX n in *N . n = {}", m.max_element()), m.level_count() == 1),
        ("EX n in N . n = 3".to_string(), true),
    ];
    for (src, expected) in cases {
        let v = in_t(m, &parse_statement(&src)?)?;
        e.check(v.holds == expected, || format!("`{src}` in T = {}", v.holds));
    }
    Ok(e)
}

fn hyperconnectives(m: &HyperModel) -> Result<Entry, Error> {
    let mut e = Entry::new("Hyperconnectives");
    let t0 = m.standard_bound();
    let p5 = parse_statement("EX n in N . n = 3")?;
    let pbig = parse_statement(&format!("EX n in N . n = {}", t0 + 4))?;
    e.check(!hyper_not(m, &p5)?.holds, || "~P holds although P has a standard witness".into());
    e.check(hyper_not(m, &pbig)?.holds, || "~P fails although P is false".into());
    let all = parse_statement("ALL n in N . 0 <= n")?;
    e.check(hyper_implies(m, &all, &p5)?.holds, || "true => true fails".into());
    e.check(!hyper_implies(m, &all, &pbig)?.holds, || "true => false holds".into());
    Ok(e)
}

fn lpo_block(m: &HyperModel, opts: &ScanOptions) -> Result<Entry, Error> {
    let mut e = Entry::new("LPO <=> Pi1-TRANS");
    let oracle = TransferLpo { opts: *opts };
    let corpus = CLOSED_CORPUS.iter().chain(PARAM_CORPUS.iter().filter(|s| !s.contains('y')));
    for src in corpus {
        let i = inst(src)?;
        let exhaustive = pi1_trans(m, &i.phi.clone().negate(), "n")?;
        let witness = lpo_witness_from_transfer(m, &i, opts);
        e.check(witness.is_ok() == exhaustive, || format!("`{src}`: witness built = {}", witness.is_ok()));
        let d = transfer_from_lpo_all(m, &oracle, &i)?;
        e.check(d.verdict == exhaustive, || format!("`{src}`: derived {} against {exhaustive}", d.verdict));
    }
    let liar = |_: &HyperModel, _: &Sigma1Instance| {
        let psi = OmegaParamFormula::new(parse_formula("0 = 0").ok()?, vec![], "w", Level::STANDARD).ok()?;
        WitnessProcedure::verify(m, psi, opts).ok()
    };
    let target = closed(&format!("n = {}", m.standard_bound() + 4))?;
    let caught = matches!(crm::transfer_from_lpo(m, &liar, &target, &[]), Err(CrmError::Soundness(_)));
    e.check(caught, || "constant-true witness was not caught".into());
    Ok(e)
}

fn lpr_block(m: &HyperModel, depth: u64) -> Result<Entry, Error> {
    let mut e = Entry::new("LPO <=> LPR");
    let t0 = m.standard_bound();
    for src in CLOSED_CORPUS {
        let i = closed(src)?;
        let x = from_indicator(m, &i.phi, "n", &Env::new())?;
        let cauchy = validate_fast_cauchy(&x, depth);
        e.check(cauchy.valid, || format!("`{src}`: indicator real is not fast Cauchy at {:?}", cauchy.violation));
        let first = crm::least_witness(&i.compile(m)?, &[], m.max_element() + 1)?;
        if let Some(f) = first.filter(|&f| f + 1 == t0 || f == m.max_element()) {
            // The indicator real turns positive one index after the witness.
            let declined = matches!(transfer_from_lpr(m, &HonestLpr, &i), Ok(d) if d.path == Path::Declined)
                || matches!(transfer_from_lpr(m, &HonestLpr, &i), Err(CrmError::Truncation(_)));
            e.check(declined, || format!("`{src}`: boundary witness {f} was not reported"));
            e.note(format!("`{src}`: witness {f} sits on a boundary, positivity is only visible at {}", f + 1));
            continue;
        }
        let exhaustive = pi1_trans(m, &i.phi.clone().negate(), "n")?;
        if exhaustive {
            let sign = decide_real_sign(m, &x)?;
            let brute = first.is_some_and(|f| f < t0);
            let positive = matches!(sign, SignDecision::Positive { .. });
            e.check(positive == brute, || format!("`{src}`: sign {positive} against {brute}"));
        }
        let d = transfer_from_lpr(m, &HonestLpr, &i)?;
        e.check(d.verdict == exhaustive, || format!("`{src}`: derived {} against {exhaustive}", d.verdict));
    }
    Ok(e)
}

fn mct_block(m: &HyperModel) -> Result<Entry, Error> {
    let mut e = Entry::new("MCT <=> LPO");
    let t0 = m.standard_bound();
    let seq = crm::mct::geometric_to_one();
    let one = ConstructiveReal::from_integer(1);
    match mct_limit(m, &seq, &MctOptions::default()) {
        Ok(r) => {
            let depth = (t0 / 2).min(32);
            e.check(real_eq(&r.limit, &one, depth), || format!("limit differs from 1 at depth {depth}"));
            let mut sound = true;
            for (k, &f) in r.modulus.iter().enumerate() {
                let k = k as u64;
                sound &= f <= k + 2;
                sound &= (f..=t0).all(|m| {
                    let wm = Rational::from_integer(1.into()) - dyadic(m + 1);
                    num_traits::Signed::abs(&(wm - &r.value)) <= dyadic(k)
                });
            }
            e.check(sound, || format!("modulus {:?} is unsound or too large", r.modulus));
        }
        Err(err) => e.check(false, || format!("limit of 1 - 1/2^(n+1): {err}")),
    }
    let jump = closed(&format!("n < {t0}"))?;
    let d = transfer_from_mct(m, &HonestMct::default(), &jump, &seq, &one)?;
    e.check(!d.verdict && d.path == Path::Contradiction && d.witness == Some(t0), || {
        format!("`n < {t0}` gave {d:?}")
    });
    let d = transfer_from_mct(m, &HonestMct::default(), &closed("0 <= n")?, &seq, &one)?;
    e.check(d.verdict, || "`0 <= n` did not transfer".into());
    Ok(e)
}

fn mp_block(m: &HyperModel) -> Result<Entry, Error> {
    let mut e = Entry::new("MP <=> MPR <=> level-1 Pi1-TRANS");
    for src in CLOSED_CORPUS {
        let i = closed(src)?;
        let r = mp_reduce(m, &i)?;
        let level = pi1_trans_level(m, &i.phi.clone().negate(), "n", Level::Finite(1))?;
        e.check(r.mp_instance == level, || format!("`{src}`: MP {} against level-1 transfer {level}", r.mp_instance));
        match mp_from_mpr(m, &HonestMpr, &i) {
            Ok(d) if r.standard_witness.is_some_and(|n| n + 1 == m.standard_bound()) => {
                let n = m.standard_bound() - 1;
                e.note(format!("`{src}`: standard witness {n} sits on a boundary, positivity is only visible at {}", n + 1));
                e.check(d.path == Path::Declined, || format!("`{src}`: boundary witness was not reported"))
            }
            Ok(d) => e.check(d.verdict == r.mp_instance, || format!("`{src}`: MPR derived {}", d.verdict)),
            Err(CrmError::Precondition(_)) => {
                let t1 = m.level_bound(Level::Finite(1));
                let boundary = r.level1_witness.is_some_and(|n| n + 1 == t1);
                if boundary {
                    e.note(format!("`{src}`: level-1 witness {} sits on a boundary, no positivity evidence in N1", t1 - 1));
                }
                e.check(r.level1_witness.is_none() || boundary, || format!("`{src}`: spurious precondition"))
            }
            Err(err) => return Err(err.into()),
        }
    }
    let t0 = m.standard_bound();
    let t1 = m.level_bound(Level::Finite(1));
    if t0 + 4 < t1 {
        let r = mp_reduce(m, &closed(&format!("n = {}", t0 + 4))?)?;
        e.check(!r.mp_instance, || "witness just above t0 does not break MP".into());
        e.note(format!("MP fails for `n = {}`: its witness lies in N1 but not in N", t0 + 4));
    }
    if t1 <= m.max_element() {
        let n = t1 + (m.max_element() - t1) / 2;
        let r = mp_reduce(m, &closed(&format!("n = {n}"))?)?;
        e.check(!r.double_neg_in_t, || "witness above t1 keeps ~~P in T".into());
        e.note(format!("~~P is not in T for `n = {n}`"));
    }
    Ok(e)
}

/// A random model with `2 <= t0 < t1 < M <= 512`.
pub fn random_model(rng: &mut impl Rng) -> HyperModel {
    let max = rng.gen_range(8..=512u64);
    let t0 = rng.gen_range(2..max - 1);
    let t1 = rng.gen_range(t0 + 1..max);
    HyperModel::new(max, vec![t0, t1]).expect("thresholds are ordered")
}

/// Double negation elimination on the configured model and 8 random ones.
fn dne_block(m: &HyperModel, seed: u64) -> Result<Entry, Error> {
    let mut e = Entry::new("Pi1 double negation elimination");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut models = vec![m.clone()];
    models.extend((0..8).map(|_| random_model(&mut rng)));
    for model in &models {
        for src in DNE_CORPUS {
            let i = closed(src)?;
            let r = pi1_dne(model, &i)?;
            let n1 = Statement::single(Quantifier::Forall, "n", Level::Finite(1), i.phi.clone());
            let same = eval_statement(model, &n1)? == r.double_neg;
            e.check(same && r.plain_implication && r.hyper_implication, || format!("`{src}` in {model}: {r:?}"));
        }
    }
    Ok(e)
}

fn forms_block(m: &HyperModel, opts: &ScanOptions) -> Result<Entry, Error> {
    let mut e = Entry::new("Statement forms (LLPO, LLPR, NIL, WLPO)");
    let constant = |src: &str| -> Result<WitnessProcedure, Error> {
        let psi = OmegaParamFormula::new(parse_formula(src)?, vec![], "w", Level::STANDARD)?;
        Ok(WitnessProcedure::verify(m, psi, opts)?)
    };
    let p = parse_statement("EX n in N . n = 3")?;
    e.check(crm::llpo(&p, &p, constant("0 = 0")?).holds(m)?, || "LLPO with P = Q true".into());
    let zero = ConstructiveReal::zero();
    e.check(crm::llpr(&zero, constant("0 = 0")?).holds(m)?, || "LLPR at 0".into());
    let one = ConstructiveReal::from_integer(1);
    e.check(crm::nil(&zero, &one, constant("0 = 0")?)?.holds(m)?, || "NIL with x = 0, y = 1".into());
    e.check(crm::wlpo(&p, constant("0 = 1")?).holds(m)?, || "WLPO with P true".into());
    let falsum = parse_statement("EX n in N . 0 = 1")?;
    let fails = !crm::wlpo(&falsum, constant("0 = 0")?).holds(m)? && !crm::wlpo(&falsum, constant("0 = 1")?).holds(m)?;
    e.check(fails, || "WLPO with P false held".into());
    e.note("WLPO with P false fails for every witness: ~~P and P are both false");
    let dn = HyperFormula::not(HyperFormula::not(p.clone()));
    e.check(dn.holds(m)?, || "~~P fails for P with a standard witness".into());
    Ok(e)
}
