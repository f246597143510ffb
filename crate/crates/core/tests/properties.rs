use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperproc::crm::{pi1_dne, Sigma1Instance};
use hyperproc::formula::{
    eval_statement, parse_formula, parse_statement, star_map, Env, Formula, Quantifier, Statement, Term,
};
use hyperproc::hyperlogic::{hyper_implies, hyper_not, hyper_or_witnessed, HyperFormula, WitnessProcedure};
use hyperproc::omega::{
    check_omega_invariance, extract_modulus, omega_ca, OmegaParamFormula, ScanMode, ScanOptions,
};
use hyperproc::reals::{dyadic, from_indicator, real_lt, validate_fast_cauchy, ConstructiveReal};
use hyperproc::report::{render, RunConfig};
use hyperproc::transfer::{in_t, pi1_trans, pi1_trans_level};
use hyperproc::{HyperModel, Level};

fn model() -> impl Strategy<Value = HyperModel> {
    (8u64..=200)
        .prop_flat_map(|max| (Just(max), 2..max - 1))
        .prop_flat_map(|(max, t0)| (Just(max), Just(t0), t0 + 1..max))
        .prop_map(|(max, t0, t1)| HyperModel::new(max, vec![t0, t1]).unwrap())
}

const TEMPLATES: &[&str] = &["n = C", "n * n = C", "C < n", "n < C", "n + n = C", "!(n = C)", "n -. C < 3", "0 = 0"];

fn matrix() -> impl Strategy<Value = Formula> {
    (0..TEMPLATES.len(), 0u64..=220).prop_map(|(i, c)| parse_formula(&TEMPLATES[i].replace('C', &c.to_string())).unwrap())
}

fn holds_below(m: &HyperModel, phi: &Formula, end: u64) -> Vec<bool> {
    let c = hyperproc::formula::Compiled::plain(m, phi, &["n".into()]).unwrap();
    (0..end).map(|n| c.eval(&[n]).unwrap()).collect()
}

fn stmt(q: Quantifier, sort: Level, phi: &Formula) -> Statement {
    Statement::single(q, "n", sort, phi.clone())
}

/// Random formula over `x` and bound variables, in the printer's language.
fn random_formula(rng: &mut ChaCha8Rng, depth: u32, scope: &mut Vec<String>) -> Formula {
    fn term(rng: &mut ChaCha8Rng, depth: u32, scope: &[String]) -> Term {
        if depth == 0 || rng.gen_bool(0.4) {
            return if rng.gen_bool(0.5) {
                Term::var(&scope[rng.gen_range(0..scope.len())])
            } else {
                Term::nat(rng.gen_range(0..1000))
            };
        }
        let (a, b) = (term(rng, depth - 1, scope), term(rng, depth - 1, scope));
        match rng.gen_range(0..4) {
            0 => a.add(b),
            1 => a.mul(b),
            2 => a.monus(b),
            _ => Term::Pow2(Box::new(a)),
        }
    }
    if depth == 0 || rng.gen_bool(0.3) {
        let (a, b) = (term(rng, 2, scope), term(rng, 2, scope));
        return match rng.gen_range(0..4) {
            0 => Formula::Eq(a, b),
            1 => Formula::Le(a, b),
            2 => Formula::Lt(a, b),
            _ => Formula::Member(a, "X".into()),
        };
    }
    let mut sub = |rng: &mut ChaCha8Rng| Box::new(random_formula(rng, depth - 1, scope));
    match rng.gen_range(0..5) {
        0 => Formula::Not(sub(rng)),
        1 => Formula::And(sub(rng), sub(rng)),
        2 => Formula::Or(sub(rng), sub(rng)),
        3 => Formula::Implies(sub(rng), sub(rng)),
        _ => {
            let var = format!("k{}", scope.len());
            let bound = term(rng, 1, scope);
            let quant = if rng.gen_bool(0.5) { Quantifier::Exists } else { Quantifier::Forall };
            scope.push(var.clone());
            let body = Box::new(random_formula(rng, depth - 1, scope));
            scope.pop();
            Formula::Bounded { quant, var, bound, body }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // ---- model ----

    #[test]
    fn levels_are_monotone(m in model(), a in 0u64..=200, b in 0u64..=200) {
        let (a, b) = (a.min(m.max_element()), b.min(m.max_element()));
        let (lo, hi) = (a.min(b), a.max(b));
        let la = m.level_of(m.hypernat(lo).unwrap()).unwrap();
        let lb = m.level_of(m.hypernat(hi).unwrap()).unwrap();
        prop_assert!(la <= lb);
    }

    #[test]
    fn levels_are_properly_nested(m in model()) {
        for (k, &t) in m.thresholds().iter().enumerate() {
            let level = m.level_of(m.hypernat(t).unwrap()).unwrap();
            prop_assert!(level > Level::Finite(k));
            prop_assert_eq!(m.level_of(m.hypernat(t - 1).unwrap()).unwrap(), Level::Finite(k));
        }
        let band = m.omega_band(Level::STANDARD).unwrap();
        prop_assert!(m.standard_bound() - 1 < band.lo);
    }

    // ---- formula ----

    #[test]
    fn universal_ranges_are_nested(m in model(), phi in matrix()) {
        let star = eval_statement(&m, &stmt(Quantifier::Forall, Level::Top, &phi)).unwrap();
        if star {
            prop_assert!(eval_statement(&m, &stmt(Quantifier::Forall, Level::Finite(1), &phi)).unwrap());
            prop_assert!(eval_statement(&m, &stmt(Quantifier::Forall, Level::STANDARD, &phi)).unwrap());
        }
    }

    #[test]
    fn printer_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = random_formula(&mut rng, 4, &mut vec!["x".into()]);
        let text = phi.to_string();
        prop_assert_eq!(parse_formula(&text).unwrap(), phi, "{}", text);
    }

    // ---- transfer ----

    #[test]
    fn pi1_membership_matches_pi1_trans(m in model(), phi in matrix()) {
        let v = in_t(&m, &stmt(Quantifier::Forall, Level::STANDARD, &phi)).unwrap();
        prop_assert_eq!(v.holds, pi1_trans(&m, &phi, "n").unwrap());
    }

    #[test]
    fn full_transfer_implies_level_transfer(m in model(), phi in matrix()) {
        if pi1_trans(&m, &phi, "n").unwrap() {
            for k in 0..m.level_count() {
                prop_assert!(pi1_trans_level(&m, &phi, "n", Level::Finite(k)).unwrap());
            }
            prop_assert!(pi1_trans_level(&m, &phi, "n", Level::Top).unwrap());
        }
    }

    #[test]
    fn trivial_shapes_and_star_map(m in model(), phi in matrix()) {
        let sigma = in_t(&m, &stmt(Quantifier::Exists, Level::STANDARD, &phi)).unwrap();
        prop_assert!(sigma.trivial && sigma.holds);
        let r = stmt(Quantifier::Forall, Level::STANDARD, &phi);
        if in_t(&m, &r).unwrap().holds {
            prop_assert_eq!(eval_statement(&m, &r).unwrap(), eval_statement(&m, &star_map(&r)).unwrap());
        }
    }

    // ---- hyperlogic ----

    #[test]
    fn negation_is_implication_to_falsum(m in model(), phi in matrix(), q in any::<bool>()) {
        let a = stmt(if q { Quantifier::Exists } else { Quantifier::Forall }, Level::STANDARD, &phi);
        prop_assert_eq!(hyper_not(&m, &a).unwrap(), hyper_implies(&m, &a, &Statement::falsum()).unwrap());
    }

    #[test]
    fn double_negation_of_sigma1_is_star_existential(m in model(), phi in matrix()) {
        let p = stmt(Quantifier::Exists, Level::STANDARD, &phi);
        let nn = HyperFormula::not(HyperFormula::not(p)).holds(&m).unwrap();
        let star = holds_below(&m, &phi, m.max_element() + 1).into_iter().any(|b| b);
        prop_assert_eq!(nn, star);
    }

    #[test]
    fn pi1_double_negation_eliminates(m in model(), phi in matrix()) {
        let inst = Sigma1Instance::new(phi, "n").unwrap();
        let r = pi1_dne(&m, &inst).unwrap();
        prop_assert!(r.plain_implication && r.hyper_implication);
    }

    #[test]
    fn degenerate_witness_law(m in model(), phi in matrix(), q in any::<bool>()) {
        let a: HyperFormula = stmt(if q { Quantifier::Exists } else { Quantifier::Forall }, Level::STANDARD, &phi).into();
        let psi = OmegaParamFormula::new(parse_formula("0 = 0").unwrap(), vec![], "w", Level::STANDARD).unwrap();
        let w = WitnessProcedure::verify(&m, psi, &ScanOptions::default()).unwrap();
        let v = hyper_or_witnessed(&m, &a, &HyperFormula::falsum(), &w).unwrap();
        prop_assert_eq!(v.holds, a.holds_in_t(&m).unwrap());
    }

    // ---- reals ----

    #[test]
    fn indicator_reals_are_fast_cauchy_and_monotone(m in model(), phi in matrix()) {
        let x = from_indicator(&m, &phi, "n", &Env::new()).unwrap();
        prop_assert!(validate_fast_cauchy(&x, 64).valid);
        for n in 0..64 {
            prop_assert!(x.at(n) <= x.at(n + 1));
        }
        for a in 0..64u64 {
            for b in a + 1..=64 {
                let d = x.at(b) - x.at(a);
                prop_assert!(d < dyadic(a), "|q_{} - q_{}| = {}", b, a, d);
            }
        }
    }

    #[test]
    fn order_is_asymmetric(m in model(), p in matrix(), q in matrix()) {
        let x = from_indicator(&m, &p, "n", &Env::new()).unwrap();
        let y = from_indicator(&m, &q, "n", &Env::new()).unwrap();
        prop_assert!(!(real_lt(&x, &y, 64).is_true() && real_lt(&y, &x, 64).is_true()));
        let c = ConstructiveReal::from_rational(dyadic(3));
        prop_assert!(!(real_lt(&x, &c, 64).is_true() && real_lt(&c, &x, 64).is_true()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // ---- omega ----

    #[test]
    fn modulus_is_stable_and_minimal(c in 0u64..40, which in 0usize..4) {
        let m = HyperModel::new(160, vec![12, 60]).unwrap();
        let src = ["EX k <= w . k * k = n + C", "n + C < w", "EX k <= w . k + k = n + C", "ALL k <= w . !(k * 3 = n + C)"][which]
            .replace('C', &c.to_string());
        let psi = OmegaParamFormula::new(parse_formula(&src).unwrap(), vec!["n".into()], "w", Level::STANDARD).unwrap();
        let Ok(modulus) = extract_modulus(&m, &psi, &ScanOptions::default()) else {
            prop_assert!(!check_omega_invariance(&m, &psi, &ScanOptions::default()).unwrap().invariant);
            return Ok(());
        };
        for e in &modulus.entries {
            let n = e.assignment[0];
            for w in e.m0..=m.max_element() {
                prop_assert_eq!(psi.eval(&m, &[n], w).unwrap(), e.stable_value);
            }
            prop_assert!(e.m0 == 0 || psi.eval(&m, &[n], e.m0 - 1).unwrap() != e.stable_value);
        }
        let band = psi.band(&m).unwrap();
        let lo = omega_ca(&m, &psi, band.lo, &ScanOptions::default()).unwrap();
        let hi = omega_ca(&m, &psi, band.hi, &ScanOptions::default()).unwrap();
        prop_assert_eq!(lo.bits, hi.bits);
    }

    #[test]
    fn sampled_counterexamples_are_genuine(c in 0u64..40, seed in any::<u64>()) {
        let m = HyperModel::new(160, vec![12, 60]).unwrap();
        let src = format!("EX k <= w . k + k = w + n * {c}");
        let psi = OmegaParamFormula::new(parse_formula(&src).unwrap(), vec!["n".into()], "w", Level::STANDARD).unwrap();
        let opts = ScanOptions { mode: ScanMode::Sampled { count: 32, seed }, ..ScanOptions::default() };
        let r = check_omega_invariance(&m, &psi, &opts).unwrap();
        prop_assert_eq!(r.invariant, r.counterexample.is_none());
        if let Some(cx) = r.counterexample {
            prop_assert_ne!(psi.eval(&m, &cx.assignment, cx.omega).unwrap(), psi.eval(&m, &cx.assignment, cx.omega_prime).unwrap());
        }
    }

    // ---- report ----

    #[test]
    fn reports_are_deterministic_and_self_describing(seed in any::<u64>(), m in model()) {
        let cfg = RunConfig { seed, model: m.clone(), ..RunConfig::default() };
        let result = parse_statement("EX n in N . n = 3").unwrap().to_string();
        let a = render("eval", &cfg, &result).unwrap();
        prop_assert_eq!(&a, &render("eval", &cfg, &result).unwrap());
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        prop_assert_eq!(v["config"]["seed"].as_u64(), Some(seed));
        prop_assert_eq!(v["config"]["model"]["max_element"].as_u64(), Some(m.max_element()));
        prop_assert_eq!(v["version"].as_str(), Some(hyperproc::report::VERSION));
    }
}
