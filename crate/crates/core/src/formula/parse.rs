//! Line-oriented ASCII grammar for terms, bounded formulas and statements.
//!
//! ```text
//! statement := (quant)* formula
//! quant     := ("ALL" | "EX") ident "in" ("N" | "N1".."N9" | "*N") "."
//! formula   := bounded-quant | formula ("->" | "|" | "&") formula | "!" formula | atom | "(" formula ")"
//! bounded   := ("ALL" | "EX") ident "<=" term "." formula
//! atom      := term ("=" | "<=" | "<") term | term "in" SET
//! term      := ident | nat | term ("+" | "*" | "-.") term | "2^" term | "ind(" formula ")" | "(" term ")"
//! ```
//!
//! `->` is right associative and binds loosest, then `|`, `&`, `!`. A bounded
//! quantifier's body extends as far right as possible. `#` starts a comment.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use thiserror::Error;

use super::ast::{Binder, Formula, Quantifier, Statement, Term};
use crate::model::Level;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(BigUint),
    Le,
    Lt,
    Eq,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Monus,
    Plus,
    Star,
    Caret,
    LParen,
    RParen,
    Dot,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::End => "end of input".to_string(),
            other => format!("`{}`", symbol(other)),
        }
    }
}

fn symbol(t: &Tok) -> &'static str {
    match t {
        Tok::Le => "<=",
        Tok::Lt => "<",
        Tok::Eq => "=",
        Tok::Bang => "!",
        Tok::Amp => "&",
        Tok::Pipe => "|",
        Tok::Arrow => "->",
        Tok::Monus => "-.",
        Tok::Plus => "+",
        Tok::Star => "*",
        Tok::Caret => "^",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::Dot => ".",
        _ => "?",
    }
}

const KEYWORDS: [&str; 4] = ["ALL", "EX", "in", "ind"];

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str, first_line: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = first_line;
    let mut col = 1;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start_col = col;
        let err = |msg: String| ParseError { line, column: start_col, message: msg };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (tok, len) = if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            (Tok::Nat(digits.parse::<BigUint>().map_err(|e| err(e.to_string()))?), j - i)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else {
            let next = chars.get(i + 1).copied();
            match (c, next) {
                ('<', Some('=')) => (Tok::Le, 2),
                ('<', _) => (Tok::Lt, 1),
                ('=', _) => (Tok::Eq, 1),
                ('!', _) => (Tok::Bang, 1),
                ('&', _) => (Tok::Amp, 1),
                ('|', _) => (Tok::Pipe, 1),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('-', Some('.')) => (Tok::Monus, 2),
                ('+', _) => (Tok::Plus, 1),
                ('*', _) => (Tok::Star, 1),
                ('^', _) => (Tok::Caret, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('.', _) => (Tok::Dot, 1),
                _ => return Err(err(format!("unexpected character `{c}`"))),
            }
        };
        out.push(Spanned { tok, line, column: start_col });
        i += len;
        col += len;
    }
    out.push(Spanned { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    /// First position at which each identifier was seen, for diagnostics.
    seen: HashMap<String, (usize, usize)>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str, first_line: usize) -> PResult<Self> {
        Ok(Parser { toks: lex(text, first_line)?, pos: 0, seen: HashMap::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError { line: s.line, column: s.column, message: message.into() }
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{}`, found {}", symbol(&want), self.peek().describe())))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn is_kw_at(&self, ahead: usize, kw: &str) -> bool {
        matches!(self.peek_at(ahead), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let sp = &self.toks[self.pos];
                self.seen.entry(s.clone()).or_insert((sp.line, sp.column));
                self.bump();
                Ok(s)
            }
            other => Err(self.error_here(format!("expected identifier, found {}", other.describe()))),
        }
    }

    fn at_end(&self) -> PResult<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error_here(format!("unexpected {}", self.peek().describe())))
        }
    }

    // ---- terms ----

    fn term(&mut self) -> PResult<Term> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = lhs.add(self.product()?);
                }
                Tok::Monus => {
                    self.bump();
                    lhs = lhs.monus(self.product()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut lhs = self.power()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = lhs.mul(self.power()?);
        }
        Ok(lhs)
    }

    fn power(&mut self) -> PResult<Term> {
        if let (Tok::Nat(n), Tok::Caret) = (self.peek().clone(), self.peek_at(1).clone()) {
            if n != BigUint::from(2u32) {
                return Err(self.error_here("only base-2 exponentiation `2^` is supported"));
            }
            self.bump();
            self.bump();
            return Ok(self.power()?.pow2());
        }
        self.term_atom()
    }

    fn term_atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(Term::Const(n))
            }
            Tok::Ident(s) if s == "ind" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let phi = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(Term::Indicator(Box::new(phi)))
            }
            Tok::Ident(_) => Ok(Term::Var(self.ident()?)),
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err(self.error_here(format!("expected term, found {}", other.describe()))),
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.is_kw("ALL") || self.is_kw("EX") {
            return self.bounded();
        }
        if *self.peek() == Tok::LParen {
            // `(` opens either a term (as in `(n + 1) = m`) or a formula.
            let save = self.pos;
            if let Ok(atom) = self.atom() {
                return Ok(atom);
            }
            self.pos = save;
            self.bump();
            let inner = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(inner);
        }
        self.atom()
    }

    fn bounded(&mut self) -> PResult<Formula> {
        let quant = if self.is_kw("ALL") { Quantifier::Forall } else { Quantifier::Exists };
        self.bump();
        let var = self.ident()?;
        if self.is_kw("in") {
            return Err(self.error_here("sorted quantifiers may only appear in the statement prefix"));
        }
        self.expect(Tok::Le)?;
        let bound_at = self.pos;
        let bound = self.term()?;
        if bound.free_vars().contains(&var) {
            let s = &self.toks[bound_at];
            return Err(ParseError {
                line: s.line,
                column: s.column,
                message: format!("bound of `{var}` mentions the quantified variable"),
            });
        }
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        Ok(Formula::Bounded { quant, var, bound, body: Box::new(body) })
    }

    fn atom(&mut self) -> PResult<Formula> {
        let lhs = self.term()?;
        if self.is_kw("in") {
            self.bump();
            let set = self.ident()?;
            return Ok(Formula::Member(lhs, set));
        }
        let op = self.bump();
        let rhs = match op {
            Tok::Eq | Tok::Le | Tok::Lt => self.term()?,
            other => {
                self.pos -= usize::from(other != Tok::End);
                return Err(self.error_here(format!("expected `=`, `<=` or `<`, found {}", other.describe())));
            }
        };
        Ok(match op {
            Tok::Eq => Formula::Eq(lhs, rhs),
            Tok::Le => Formula::Le(lhs, rhs),
            _ => Formula::Lt(lhs, rhs),
        })
    }

    // ---- statements ----

    fn sort(&mut self) -> PResult<Level> {
        if *self.peek() == Tok::Star {
            self.bump();
            return match self.bump() {
                Tok::Ident(s) if s == "N" => Ok(Level::Top),
                _ => Err(self.error_here("expected `*N`")),
            };
        }
        match self.peek().clone() {
            Tok::Ident(s) if s == "N" => {
                self.bump();
                Ok(Level::STANDARD)
            }
            Tok::Ident(s) if s.len() == 2 && s.starts_with('N') && s.as_bytes()[1].is_ascii_digit() && s != "N0" => {
                self.bump();
                Ok(Level::Finite((s.as_bytes()[1] - b'0') as usize))
            }
            other => Err(self.error_here(format!("expected sort N, N1..N9 or *N, found {}", other.describe()))),
        }
    }

    fn statement(&mut self, params: &BTreeMap<String, Option<u64>>) -> PResult<Statement> {
        let start = (self.toks[self.pos].line, self.toks[self.pos].column);
        let mut prefix: Vec<Binder> = Vec::new();
        while (self.is_kw("ALL") || self.is_kw("EX")) && self.is_kw_at(2, "in") {
            let quant = if self.is_kw("ALL") { Quantifier::Forall } else { Quantifier::Exists };
            self.bump();
            let var_at = self.pos;
            let var = self.ident()?;
            if prefix.iter().any(|b| b.var == var) || params.contains_key(&var) {
                let s = &self.toks[var_at];
                return Err(ParseError {
                    line: s.line,
                    column: s.column,
                    message: format!("variable `{var}` is bound twice"),
                });
            }
            self.bump(); // `in`
            let sort = self.sort()?;
            self.expect(Tok::Dot)?;
            prefix.push(Binder { quant, var, sort });
        }
        let matrix = self.formula()?;
        self.at_end()?;
        for v in matrix.free_vars() {
            if !prefix.iter().any(|b| b.var == v) && !params.contains_key(&v) {
                let (line, column) = self.seen.get(&v).copied().unwrap_or(start);
                return Err(ParseError { line, column, message: format!("unbound variable `{v}`") });
            }
        }
        Ok(Statement { prefix, matrix, params: params.clone() })
    }
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, 1)?;
    let t = p.term()?;
    p.at_end()?;
    Ok(t)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, 1)?;
    let f = p.formula()?;
    p.at_end()?;
    Ok(f)
}

/// Parses a statement whose matrix may only mention prefix variables.
pub fn parse_statement(text: &str) -> Result<Statement, ParseError> {
    parse_statement_with_params(text, &BTreeMap::new())
}

/// Parses a statement whose matrix may also mention the given parameters.
pub fn parse_statement_with_params(
    text: &str,
    params: &BTreeMap<String, Option<u64>>,
) -> Result<Statement, ParseError> {
    Parser::new(text, 1)?.statement(params)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        (!body.trim().is_empty()).then_some((i + 1, body))
    })
}

/// One formula per line; blank lines and `#` comments are skipped.
pub fn parse_formula_file(text: &str) -> Result<Vec<Formula>, ParseError> {
    content_lines(text)
        .map(|(no, line)| {
            let mut p = Parser::new(line, no)?;
            let f = p.formula()?;
            p.at_end()?;
            Ok(f)
        })
        .collect()
}

/// One statement per line; blank lines and `#` comments are skipped.
pub fn parse_statement_file(
    text: &str,
    params: &BTreeMap<String, Option<u64>>,
) -> Result<Vec<Statement>, ParseError> {
    content_lines(text).map(|(no, line)| Parser::new(line, no)?.statement(params)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_existential() {
        let f = parse_formula("EX n <= w . n = 5").unwrap();
        assert_eq!(f, Formula::exists_le("n", Term::var("w"), Formula::eq(Term::var("n"), Term::nat(5))));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec!["w".to_string()]);
    }

    #[test]
    fn statement_prefix() {
        let s = parse_statement("ALL n in N . EX m in N . m = n + 1").unwrap();
        assert_eq!(s.prefix.len(), 2);
        assert_eq!(s.prefix[0], Binder { quant: Quantifier::Forall, var: "n".into(), sort: Level::STANDARD });
        assert_eq!(s.prefix[1], Binder { quant: Quantifier::Exists, var: "m".into(), sort: Level::STANDARD });
        assert_eq!(s.matrix, Formula::eq(Term::var("m"), Term::var("n").add(Term::nat(1))));
    }

    #[test]
    fn sorts() {
        let s = parse_statement("EX n in *N . ALL m in N1 . n <= m").unwrap();
        assert_eq!(s.prefix[0].sort, Level::Top);
        assert_eq!(s.prefix[1].sort, Level::Finite(1));
        assert!(parse_statement("EX n in N0 . n = n").is_err());
        assert!(parse_statement("EX n in X . n = n").is_err());
    }

    #[test]
    fn self_bounded_quantifier_rejected() {
        let e = parse_formula("ALL n <= n . 0 = 0").unwrap_err();
        assert_eq!((e.line, e.column), (1, 10));
        assert!(e.message.contains("mentions the quantified variable"));
    }

    #[test]
    fn unbound_variable_rejected() {
        let e = parse_statement("ALL n in N . n < k").unwrap_err();
        assert_eq!(e.column, 18);
        let mut params = BTreeMap::new();
        params.insert("k".to_string(), Some(3));
        let s = parse_statement_with_params("ALL n in N . n < k", &params).unwrap();
        assert_eq!(s.params["k"], Some(3));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("!a = 1 & b = 2 | c = 3 -> d = 4 -> e = 5").unwrap();
        let expected = Formula::Not(Box::new(Formula::eq(Term::var("a"), Term::nat(1))))
            .and(Formula::eq(Term::var("b"), Term::nat(2)))
            .or(Formula::eq(Term::var("c"), Term::nat(3)))
            .implies(Formula::eq(Term::var("d"), Term::nat(4)).implies(Formula::eq(Term::var("e"), Term::nat(5))));
        assert_eq!(f, expected);
    }

    #[test]
    fn parenthesised_terms_and_formulas() {
        let f = parse_formula("(n + 1) * 2 = m").unwrap();
        assert_eq!(f, Formula::eq(Term::var("n").add(Term::nat(1)).mul(Term::nat(2)), Term::var("m")));
        let f = parse_formula("(n = 1 | n = 2) & n < 5").unwrap();
        assert!(matches!(f, Formula::And(..)));
        let f = parse_formula("2^2^n = ind(n < 3) + 1").unwrap();
        assert_eq!(f.to_string(), "2^2^n = ind(n < 3) + 1");
        let f = parse_formula("k -. 3 in X").unwrap();
        assert_eq!(f, Formula::Member(Term::var("k").monus(Term::nat(3)), "X".into()));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_formula("n = ").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_formula("n ? 3").unwrap_err();
        assert_eq!(e.column, 3);
        assert!(parse_term("3^n").is_err());
        let e = parse_formula_file("n = 1\n\n# c\nn < \n").unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn files() {
        let fs = parse_formula_file("# header\nn = 1  # trailing\n\nEX k <= n . k + k = n\n").unwrap();
        assert_eq!(fs.len(), 2);
        let ss = parse_statement_file("ALL n in N . 0 <= n\nEX n in *N . n = 3\n", &BTreeMap::new()).unwrap();
        assert_eq!(ss.len(), 2);
    }

    #[test]
    fn print_parse_is_whitespace_normalisation() {
        let src = "ALL  n in N .  EX m   in *N . (m = n+1 | !(n<=3)) ->  EX k<=2^n . k*k = m";
        let s = parse_statement(src).unwrap();
        let printed = s.to_string();
        assert_eq!(printed, "ALL n in N . EX m in *N . m = n + 1 | !n <= 3 -> (EX k <= 2^n . k * k = m)");
        assert_eq!(parse_statement(&printed).unwrap(), s);
    }
}
