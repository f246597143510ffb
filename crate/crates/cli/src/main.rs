use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hyperproc::crm::mct::geometric_to_one;
use hyperproc::crm::{
    self, decide_real_sign, lpo_witness_from_transfer, mct_limit, mp_from_mpr, mp_reduce, pi1_dne, transfer_from_lpo_all,
    transfer_from_lpr, transfer_from_mct, HonestLpr, HonestMct, HonestMpr, MctOptions, Sigma1Instance, TransferLpo,
};
use hyperproc::demo::run_demo;
use hyperproc::formula::{eval_statement, parse_formula, parse_statement_file, Formula, Statement};
use hyperproc::hyperlogic::{hyper_implies, hyper_not, hyper_or_alt, hyper_or_witnessed, HyperFormula, WitnessProcedure};
use hyperproc::omega::{check_omega_invariance, extract_modulus, omega_ca, OmegaParamFormula};
use hyperproc::reals::{parse_real, pos_at_level, real_eq, real_lt, validate_fast_cauchy, ConstructiveReal};
use hyperproc::report::{self, Format, Mode, RunConfig};
use hyperproc::transfer::{in_t, pi1_trans_detail};
use hyperproc::{Error, ErrorClass, HyperModel, Level};

#[derive(Parser)]
#[command(name = "hyperproc", version, about = "Omega-invariant procedures on finite hypernatural models")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Model literal, e.g. `M=2048,levels=16,128`.
    #[arg(long, global = true, default_value = "M=2048,levels=16,128")]
    model: String,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample count in sampled mode.
    #[arg(long, global = true, default_value_t = 4096)]
    samples: usize,
    #[arg(long, global = true, default_value_t = hyperproc::reals::DEFAULT_DEPTH)]
    depth: u64,
    #[arg(long, global = true, default_value_t = hyperproc::omega::DEFAULT_BUDGET)]
    budget: u64,
    /// Also write the structured report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Doc,
}

#[derive(Subcommand)]
enum Command {
    /// Describe the model: thresholds, levels and omega bands.
    Model,
    /// Evaluate statements, one per line.
    Eval {
        #[arg(long)]
        stmt: String,
        /// Parameter binding `x=5`; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Omega-invariance, moduli and comprehension.
    Omega {
        #[command(subcommand)]
        op: OmegaOp,
    },
    /// Membership in T and universal transfer.
    Transfer {
        #[command(subcommand)]
        op: TransferOp,
    },
    /// Hyperconnectives.
    Hyper {
        #[command(subcommand)]
        op: HyperOp,
    },
    /// Constructive reals.
    Real {
        #[command(subcommand)]
        op: RealOp,
    },
    /// Reductions between omniscience principles.
    Crm {
        #[command(subcommand)]
        op: CrmOp,
    },
    /// Same as `crm demo`.
    Demo,
}

#[derive(Args)]
struct PsiArgs {
    /// Formula `psi(params, w)`, as a file or literal text.
    #[arg(long)]
    psi: String,
    #[arg(long, default_value = "w")]
    omega_var: String,
    /// Level of the omega parameter.
    #[arg(long, default_value = "N")]
    level: String,
}

#[derive(Subcommand)]
enum OmegaOp {
    Check(PsiArgs),
    Modulus(PsiArgs),
    Ca {
        #[command(flatten)]
        psi: PsiArgs,
        /// Omega to read the set at; defaults to the middle of the band.
        #[arg(long)]
        at: Option<u64>,
    },
}

#[derive(Subcommand)]
enum TransferOp {
    #[command(name = "inT", alias = "in-t")]
    InT {
        #[arg(long)]
        stmt: String,
        #[arg(long = "param")]
        params: Vec<String>,
    },
    Pi1 {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "n")]
        var: String,
        /// Transfer up to this level instead of the whole universe.
        #[arg(long)]
        level: Option<String>,
    },
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: Option<String>,
    #[arg(long = "param")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum HyperOp {
    Implies(PairArgs),
    Not(PairArgs),
    Or {
        #[command(flatten)]
        pair: PairArgs,
        /// Witness formula `psi(params, w)`.
        #[arg(long)]
        witness: Option<String>,
        #[arg(long, default_value = "w")]
        omega_var: String,
        /// Use the alternative disjunction instead of a witness.
        #[arg(long)]
        alt: bool,
    },
}

#[derive(Subcommand)]
enum RealOp {
    Validate {
        #[arg(long)]
        x: String,
    },
    Cmp {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    Pos {
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "N")]
        level: String,
    },
}

#[derive(Args)]
struct PhiArgs {
    /// Matrix `phi(n)`, as a file or literal text.
    #[arg(long)]
    phi: String,
    #[arg(long, default_value = "n")]
    var: String,
}

#[derive(Subcommand)]
enum CrmOp {
    LpoTransfer(PhiArgs),
    Lpr(PhiArgs),
    Mct {
        /// Without a matrix, computes the limit of `1 - 1/2^(n+1)`.
        #[arg(long)]
        phi: Option<String>,
        #[arg(long, default_value = "n")]
        var: String,
    },
    Mp(PhiArgs),
    Dne(PhiArgs),
    Demo,
}

/// What a command produced: its verdict, the structured result and the text
/// shown in text mode.
struct Outcome {
    verdict: bool,
    result: Value,
    text: String,
}

impl Outcome {
    fn new(verdict: bool, result: Value, text: impl Into<String>) -> Self {
        Outcome { verdict, result, text: text.into() }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

/// The contents of `arg` if it names a readable file, else `arg` itself.
fn source(arg: &str) -> Result<String, Error> {
    let path = std::path::Path::new(arg);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(|e| usage(format!("{arg}: {e}")));
    }
    Ok(arg.to_string())
}

/// Drops blank lines and `#` comments, and requires exactly one line left.
fn single_line(arg: &str) -> Result<String, Error> {
    let text = source(arg)?;
    let lines: Vec<&str> =
        text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()).collect();
    match lines.as_slice() {
        [one] => Ok(one.to_string()),
        [] => Err(usage(format!("`{arg}` is empty"))),
        _ => Err(usage(format!("`{arg}` has {} lines, expected one", lines.len()))),
    }
}

fn formula(arg: &str) -> Result<Formula, Error> {
    Ok(parse_formula(&single_line(arg)?)?)
}

fn params(bindings: &[String]) -> Result<BTreeMap<String, Option<u64>>, Error> {
    bindings
        .iter()
        .map(|b| {
            let (k, v) = b.split_once('=').ok_or_else(|| usage(format!("parameter `{b}` is not of the form x=5")))?;
            let v = v.trim().parse::<u64>().map_err(|_| usage(format!("parameter `{b}` needs a natural value")))?;
            Ok((k.trim().to_string(), Some(v)))
        })
        .collect()
}

fn statements(arg: &str, bindings: &[String]) -> Result<Vec<Statement>, Error> {
    let stmts = parse_statement_file(&source(arg)?, &params(bindings)?)?;
    if stmts.is_empty() {
        return Err(usage(format!("`{arg}` contains no statement")));
    }
    Ok(stmts)
}

fn statement(arg: &str, bindings: &[String]) -> Result<Statement, Error> {
    let mut s = statements(arg, bindings)?;
    if s.len() > 1 {
        return Err(usage(format!("`{arg}` has {} statements, expected one", s.len())));
    }
    Ok(s.remove(0))
}

fn level(text: &str) -> Result<Level, Error> {
    let t = text.trim();
    match t {
        "N" | "0" => Ok(Level::STANDARD),
        "*N" | "top" => Ok(Level::Top),
        _ => {
            let k = t.strip_prefix('N').unwrap_or(t);
            k.parse::<usize>().map(Level::Finite).map_err(|_| usage(format!("bad level `{text}`")))
        }
    }
}

fn psi(model: &HyperModel, args: &PsiArgs) -> Result<OmegaParamFormula, Error> {
    let level = level(&args.level)?;
    let psi = OmegaParamFormula::infer(formula(&args.psi)?, &args.omega_var)?.at_level(level);
    psi.band(model)?;
    Ok(psi)
}

fn instance(args: &PhiArgs) -> Result<Sigma1Instance, Error> {
    Ok(Sigma1Instance::new(formula(&args.phi)?, &args.var)?)
}

fn to_json(v: &impl serde::Serialize) -> Result<Value, Error> {
    Ok(serde_json::to_value(v)?)
}

fn yes(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn run(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, Error> {
    let m = &cfg.model;
    let opts = cfg.scan_options();
    match cmd {
        Command::Model => {
            let bands: Vec<Value> = (0..m.level_count())
                .map(|k| {
                    let b = m.omega_band(Level::Finite(k))?;
                    Ok(json!({ "level": k, "lo": b.lo, "hi": b.hi }))
                })
                .collect::<Result<_, Error>>()?;
            let result = json!({ "model": m.to_string(), "levels": m.level_count(), "bands": bands });
            let mut text = format!("{m}\n");
            for (k, t) in m.thresholds().iter().enumerate() {
                text += &format!("{}: [0, {t})\n", Level::Finite(k));
            }
            text += &format!("*N: [0, {}]", m.max_element());
            Ok(Outcome::new(true, result, text))
        }
        Command::Eval { stmt, params } => {
            let mut rows = Vec::new();
            let mut text = Vec::new();
            let mut all = true;
            for s in statements(stmt, params)? {
                let v = eval_statement(m, &s)?;
                all &= v;
                text.push(format!("{}  {s}", yes(v)));
                rows.push(json!({ "statement": s.to_string(), "value": v }));
            }
            let text = if rows.len() == 1 { yes(all).to_string() } else { text.join("\n") };
            Ok(Outcome::new(all, json!({ "statements": rows, "all_true": all }), text))
        }
        Command::Omega { op } => omega(m, op, &opts),
        Command::Transfer { op } => transfer(m, op),
        Command::Hyper { op } => hyper(m, op, &opts),
        Command::Real { op } => real(m, op, cfg.depth),
        Command::Crm { op } => crm_command(op, cfg),
        Command::Demo => crm_command(&CrmOp::Demo, cfg),
    }
}

fn omega(m: &HyperModel, op: &OmegaOp, opts: &hyperproc::omega::ScanOptions) -> Result<Outcome, Error> {
    match op {
        OmegaOp::Check(args) => {
            let psi = psi(m, args)?;
            let r = check_omega_invariance(m, &psi, opts)?;
            let text = match &r.counterexample {
                None => format!("invariant ({} pairs checked)", r.checked_pairs),
                Some(cx) => format!(
                    "not invariant: at {:?} psi differs between w={} and w={}",
                    cx.assignment, cx.omega, cx.omega_prime
                ),
            };
            Ok(Outcome::new(r.invariant, to_json(&r)?, text))
        }
        OmegaOp::Modulus(args) => {
            let psi = psi(m, args)?;
            let r = extract_modulus(m, &psi, opts)?;
            let mut text = format!("{:<16} m0    value\n", psi.standard_params.join(","));
            for e in &r.entries {
                text += &format!("{:<16} {:<5} {}\n", format!("{:?}", e.assignment), e.m0, e.stable_value);
            }
            Ok(Outcome::new(true, to_json(&r)?, text.trim_end()))
        }
        OmegaOp::Ca { psi: args, at } => {
            let psi = psi(m, args)?;
            let at = match at {
                Some(w) => *w,
                None => psi.band(m)?.midpoint(),
            };
            let set = omega_ca(m, &psi, at, opts)?;
            let text = format!("{:?}", set.members());
            Ok(Outcome::new(true, json!({ "members": set.members(), "set": to_json(&set)? }), text))
        }
    }
}

fn transfer(m: &HyperModel, op: &TransferOp) -> Result<Outcome, Error> {
    match op {
        TransferOp::InT { stmt, params } => {
            let s = statement(stmt, params)?;
            let v = in_t(m, &s)?;
            let mut text = format!("{} ({}{})", yes(v.holds), v.shape.to_string().to_lowercase(), if v.trivial { ", trivial" } else { "" });
            if let Some(w) = &v.witness {
                text += &format!("\nwitness: {w:?}");
            }
            Ok(Outcome::new(v.holds, json!({ "statement": s.to_string(), "verdict": to_json(&v)? }), text))
        }
        TransferOp::Pi1 { phi, var, level: lvl } => {
            let phi = formula(phi)?;
            let lvl = match lvl {
                Some(l) => level(l)?,
                None => Level::Top,
            };
            let failure = pi1_trans_detail(m, &phi, var, lvl)?;
            let text = match &failure {
                None => "true".to_string(),
                Some(f) => format!("false: at {:?} phi holds on N but fails at {var}={}", f.params, f.n),
            };
            let result = json!({ "phi": phi.to_string(), "level": lvl.to_string(), "holds": failure.is_none(), "failure": to_json(&failure)? });
            Ok(Outcome::new(failure.is_none(), result, text))
        }
    }
}

fn hyper(m: &HyperModel, op: &HyperOp, opts: &hyperproc::omega::ScanOptions) -> Result<Outcome, Error> {
    let second = |p: &PairArgs| -> Result<Statement, Error> {
        let b = p.b.as_deref().ok_or_else(|| usage("--b is required"))?;
        statement(b, &p.params)
    };
    let (name, v) = match op {
        HyperOp::Implies(p) => ("implies", hyper_implies(m, &statement(&p.a, &p.params)?, &second(p)?)?),
        HyperOp::Not(p) => ("not", hyper_not(m, &statement(&p.a, &p.params)?)?),
        HyperOp::Or { pair, witness, omega_var, alt } => {
            let (a, b) = (statement(&pair.a, &pair.params)?, second(pair)?);
            if *alt {
                ("alt-or", hyper_or_alt(m, &a, &b)?)
            } else {
                let w = witness.as_deref().ok_or_else(|| usage("--witness is required unless --alt is given"))?;
                let psi = OmegaParamFormula::infer(formula(w)?, omega_var)?;
                let w = WitnessProcedure::verify(m, psi, opts)?;
                ("or", hyper_or_witnessed(m, &HyperFormula::from(a), &HyperFormula::from(b), &w)?)
            }
        }
    };
    let text = match &v.failing_part {
        None => "true".to_string(),
        Some(p) if p.assignment.is_empty() => format!("false: {}", p.part),
        Some(p) => format!("false: {} at {:?}", p.part, p.assignment),
    };
    Ok(Outcome::new(v.holds, json!({ "connective": name, "verdict": to_json(&v)? }), text))
}

fn real(m: &HyperModel, op: &RealOp, depth: u64) -> Result<Outcome, Error> {
    let parse = |s: &str| -> Result<ConstructiveReal, Error> { Ok(parse_real(m, &single_line(s)?)?) };
    match op {
        RealOp::Validate { x } => {
            let r = validate_fast_cauchy(&parse(x)?, depth);
            let text = match r.violation {
                None => format!("fast Cauchy to depth {depth}"),
                Some((k, i)) => format!("not fast Cauchy: |q_{k} - q_{}| >= 1/2^{k}", k + i),
            };
            Ok(Outcome::new(r.valid, to_json(&r)?, text))
        }
        RealOp::Cmp { x, y } => {
            let (x, y) = (parse(x)?, parse(y)?);
            let lt = real_lt(&x, &y, depth);
            let gt = real_lt(&y, &x, depth);
            let eq = real_eq(&x, &y, depth);
            let text = if lt.is_true() {
                "x < y"
            } else if gt.is_true() {
                "x > y"
            } else if eq {
                "x = y up to the depth"
            } else {
                "undecided"
            };
            let result = json!({ "lt": to_json(&lt)?, "gt": to_json(&gt)?, "eq_at_depth": eq, "depth": depth });
            Ok(Outcome::new(lt.is_true(), result, text))
        }
        RealOp::Pos { x, level: l } => {
            let l = level(l)?;
            let v = pos_at_level(m, &parse(x)?, l);
            let text = match &v {
                v if v.is_true() => format!("positive at level {l}: {}", serde_json::to_string(v)?),
                _ => format!("no positivity witness below the bound of {l}"),
            };
            Ok(Outcome::new(v.is_true(), json!({ "level": l.to_string(), "verdict": to_json(&v)? }), text))
        }
    }
}

fn derivation_text(d: &crm::Derivation) -> String {
    let mut t = format!("{} ({:?})", yes(d.verdict), d.path);
    if let Some(w) = d.witness {
        t += &format!(" witness {w}");
    }
    if let Some(n) = &d.note {
        t += &format!("; {n}");
    }
    t
}

fn crm_command(op: &CrmOp, cfg: &RunConfig) -> Result<Outcome, Error> {
    let m = &cfg.model;
    let opts = cfg.scan_options();
    match op {
        CrmOp::LpoTransfer(args) => {
            let inst = instance(args)?;
            let witness = match lpo_witness_from_transfer(m, &inst, &opts) {
                Ok(w) => json!({ "psi": w.psi.body.to_string(), "verified": w.verified() }),
                Err(crm::CrmError::Precondition(msg)) => json!({ "declined": msg }),
                Err(e) => return Err(e.into()),
            };
            let d = transfer_from_lpo_all(m, &TransferLpo { opts }, &inst)?;
            let result = json!({ "instance": inst.to_string(), "witness": witness, "derivation": to_json(&d)? });
            Ok(Outcome::new(d.verdict, result, derivation_text(&d)))
        }
        CrmOp::Lpr(args) => {
            let inst = instance(args)?;
            let x = hyperproc::reals::from_indicator(m, &inst.phi, &inst.var, &Default::default())?;
            let sign = match decide_real_sign(m, &x) {
                Ok(s) => to_json(&s)?,
                Err(crm::CrmError::Precondition(msg)) => json!({ "declined": msg }),
                Err(e) => return Err(e.into()),
            };
            let d = transfer_from_lpr(m, &HonestLpr, &inst)?;
            let result = json!({ "instance": inst.to_string(), "sign": sign, "derivation": to_json(&d)? });
            Ok(Outcome::new(d.verdict, result, derivation_text(&d)))
        }
        CrmOp::Mct { phi, var } => {
            let seq = geometric_to_one();
            match phi {
                None => {
                    let r = mct_limit(m, &seq, &MctOptions::default())?;
                    let result = json!({
                        "sequence": seq.provenance,
                        "value": r.value.to_string(),
                        "modulus": r.modulus,
                        "queries": r.queries,
                    });
                    let text = format!("limit ~ {}\nmodulus {:?}", r.value, r.modulus);
                    Ok(Outcome::new(true, result, text))
                }
                Some(phi) => {
                    let inst = instance(&PhiArgs { phi: phi.clone(), var: var.clone() })?;
                    let one = ConstructiveReal::from_integer(1);
                    let d = transfer_from_mct(m, &HonestMct::default(), &inst, &seq, &one)?;
                    let result = json!({ "instance": inst.to_string(), "derivation": to_json(&d)? });
                    Ok(Outcome::new(d.verdict, result, derivation_text(&d)))
                }
            }
        }
        CrmOp::Mp(args) => {
            let inst = instance(args)?;
            let r = mp_reduce(m, &inst)?;
            let mpr = match mp_from_mpr(m, &HonestMpr, &inst) {
                Ok(d) => to_json(&d)?,
                Err(crm::CrmError::Precondition(msg)) => json!({ "declined": msg }),
                Err(e) => return Err(e.into()),
            };
            let text = format!(
                "MP instance {}; ~~P in T {}; witnesses N={:?} N1={:?} *N={:?}",
                yes(r.mp_instance),
                yes(r.double_neg_in_t),
                r.standard_witness,
                r.level1_witness,
                r.star_witness
            );
            let result = json!({ "instance": inst.to_string(), "reduction": to_json(&r)?, "mpr": mpr });
            Ok(Outcome::new(r.mp_instance, result, text))
        }
        CrmOp::Dne(args) => {
            let inst = instance(args)?;
            let r = pi1_dne(m, &inst)?;
            let text = format!(
                "~~R = {} is {}; R is {}; ~~R -> R {}; ~~R => R {}",
                r.normal_form,
                yes(r.double_neg),
                yes(r.r),
                yes(r.plain_implication),
                yes(r.hyper_implication)
            );
            Ok(Outcome::new(r.hyper_implication && r.plain_implication, to_json(&r)?, text))
        }
        CrmOp::Demo => {
            let board = run_demo(cfg)?;
            Ok(Outcome::new(board.all_passed(), to_json(&board)?, board.to_string().trim_end()))
        }
    }
}

fn command_name(cmd: &Command) -> String {
    let sub = match cmd {
        Command::Model => return "model".into(),
        Command::Eval { .. } => return "eval".into(),
        Command::Demo => return "demo".into(),
        Command::Omega { op } => match op {
            OmegaOp::Check(_) => "omega check",
            OmegaOp::Modulus(_) => "omega modulus",
            OmegaOp::Ca { .. } => "omega ca",
        },
        Command::Transfer { op } => match op {
            TransferOp::InT { .. } => "transfer inT",
            TransferOp::Pi1 { .. } => "transfer pi1",
        },
        Command::Hyper { op } => match op {
            HyperOp::Implies(_) => "hyper implies",
            HyperOp::Not(_) => "hyper not",
            HyperOp::Or { .. } => "hyper or",
        },
        Command::Real { op } => match op {
            RealOp::Validate { .. } => "real validate",
            RealOp::Cmp { .. } => "real cmp",
            RealOp::Pos { .. } => "real pos",
        },
        Command::Crm { op } => match op {
            CrmOp::LpoTransfer(_) => "crm lpo-transfer",
            CrmOp::Lpr(_) => "crm lpr",
            CrmOp::Mct { .. } => "crm mct",
            CrmOp::Mp(_) => "crm mp",
            CrmOp::Dne(_) => "crm dne",
            CrmOp::Demo => "crm demo",
        },
    };
    sub.to_string()
}

fn config(g: &GlobalArgs) -> Result<RunConfig, Error> {
    Ok(RunConfig {
        model: g.model.parse::<HyperModel>()?,
        mode: match g.mode {
            ModeArg::Exhaustive => Mode::Exhaustive,
            ModeArg::Sampled => Mode::Sampled,
        },
        seed: g.seed,
        samples: g.samples,
        depth: g.depth,
        budget: g.budget,
        report: g.report.clone(),
        format: match g.format {
            FormatArg::Text => Format::Text,
            FormatArg::Doc => Format::Doc,
        },
    })
}

fn execute(cli: &Cli) -> Result<bool, Error> {
    let cfg = config(&cli.global)?;
    let out = run(&cli.command, &cfg)?;
    let doc = report::render(&command_name(&cli.command), &cfg, &out.result)?;
    if let Some(path) = &cfg.report {
        std::fs::write(path, &doc).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    match cfg.format {
        Format::Doc => print!("{doc}"),
        Format::Text => println!("{}", out.text),
    }
    Ok(out.verdict)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => 2,
                ErrorClass::Precondition => 3,
            })
        }
    }
}
