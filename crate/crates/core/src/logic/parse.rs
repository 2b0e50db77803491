//! Concrete syntax for formulas.
//!
//! ```text
//! formula  ::= iff
//! iff      ::= implies { "<->" implies }
//! implies  ::= disj [ "->" implies ]
//! disj     ::= conj { "or" conj }
//! conj     ::= unary { "and" unary }
//! unary    ::= "not" unary | quant | "(" formula ")" | atom
//! quant    ::= ( "exists" | "forall" ) IDENT { IDENT } "." formula
//! atom     ::= "true" | "false"
//!            | term "=" term | term "!=" term
//!            | term "in" SETVAR
//!            | "Card" NUM "(" SETVAR ")"
//!            | "dist" "<=" NUM "(" term "," term ")"
//!            | "dp" NUM "(" terms ")"
//!            | "sdp" NUM "," NUM "(" terms ")"
//!            | REL "(" terms ")"
//! terms    ::= term { "," term }
//! term     ::= IDENT            (lower-case initial or `_`)
//! SETVAR   ::= IDENT            (upper-case initial)
//! ```
//!
//! `Card2`, `dp2` and `sdp1,2` are written without spaces. A quantifier body
//! extends as far right as possible. Comments run from `#` to end of line.

use crate::error::{Error, Result};
use crate::structure::Vocabulary;

use super::ast::{is_set_variable, Formula, Term};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u32),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Neq,
    Le,
    Arrow,
    DArrow,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: l0, col: c0 });
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
        let rest = |k: usize| chars.get(i + k).copied();
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Dot, 1),
            '=' => (Tok::Eq, 1),
            '!' if rest(1) == Some('=') => (Tok::Neq, 2),
            '<' if rest(1) == Some('=') => (Tok::Le, 2),
            '<' if rest(1) == Some('-') && rest(2) == Some('>') => (Tok::DArrow, 3),
            '-' if rest(1) == Some('>') => (Tok::Arrow, 2),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let n = s.parse().map_err(|_| Error::Syntax {
                    line,
                    column: col,
                    message: "number too large".into(),
                })?;
                (Tok::Num(n), j - i)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        push(&mut out, tok);
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const KEYWORDS: &[&str] = &["exists", "forall", "not", "and", "or", "in", "true", "false", "dist"];

/// Splits `Card2` / `dp3` / `sdp1` into prefix and number.
fn numbered(ident: &str, prefix: &str) -> Option<u32> {
    let rest = ident.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    vocab: Option<&'a Vocabulary>,
    bound: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Syntax {
            line: t.line,
            column: t.col,
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conj()?];
        while self.is_kw("or") {
            self.bump();
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one")
        } else {
            Formula::Or(parts)
        })
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while self.is_kw("and") {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one")
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.is_kw("not") {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_kw("exists") || self.is_kw("forall") {
            return self.quant();
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let f = self.formula()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        self.atom()
    }

    fn quant(&mut self) -> Result<Formula> {
        let universal = self.is_kw("forall");
        self.bump();
        let mut vars = Vec::new();
        while let Tok::Ident(v) = self.peek().clone() {
            if KEYWORDS.contains(&v.as_str()) {
                return self.err(format!("keyword `{v}` cannot be a variable"));
            }
            vars.push(v);
            self.bump();
        }
        if vars.is_empty() {
            return self.err("expected a variable after quantifier");
        }
        self.expect(Tok::Dot, "`.` after quantified variables")?;
        let depth = self.bound.len();
        self.bound.extend(vars.iter().cloned());
        let body = self.formula();
        self.bound.truncate(depth);
        let mut f = body?;
        for v in vars.iter().rev() {
            f = if universal {
                Formula::forall(v, f)
            } else {
                Formula::exists(v, f)
            };
        }
        Ok(f)
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                if is_set_variable(&name) {
                    return self.err(format!("`{name}` is a set variable, expected a term"));
                }
                self.bump();
                let is_const = !self.bound.contains(&name) && self.vocab.is_some_and(|v| v.has_constant(&name));
                Ok(if is_const { Term::Const(name) } else { Term::Var(name) })
            }
            _ => self.err("expected a term"),
        }
    }

    fn set_var(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(name) if is_set_variable(&name) => {
                self.bump();
                Ok(name)
            }
            _ => self.err("expected a set variable (upper-case identifier)"),
        }
    }

    fn terms(&mut self) -> Result<Vec<Term>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut ts = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            ts.push(self.term()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(ts)
    }

    fn atom(&mut self) -> Result<Formula> {
        let Tok::Ident(name) = self.peek().clone() else {
            return self.err("expected a formula");
        };
        match name.as_str() {
            "true" => {
                self.bump();
                return Ok(Formula::True);
            }
            "false" => {
                self.bump();
                return Ok(Formula::False);
            }
            "dist" => {
                self.bump();
                self.expect(Tok::Le, "`<=` after dist")?;
                let Tok::Num(r) = self.bump() else {
                    self.pos -= 1;
                    return self.err("expected a radius");
                };
                let ts = self.terms()?;
                if ts.len() != 2 {
                    return self.err("dist takes two terms");
                }
                let mut it = ts.into_iter();
                let a = it.next().expect("two");
                let b = it.next().expect("two");
                return Ok(Formula::DistLeq(a, b, r));
            }
            _ => {}
        }
        if *self.peek_at(1) == Tok::LParen || *self.peek_at(1) == Tok::Comma {
            if let Some(p) = numbered(&name, "Card") {
                self.bump();
                if p < 2 {
                    return self.err("Card modulus must be at least 2");
                }
                self.expect(Tok::LParen, "`(`")?;
                let x = self.set_var()?;
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Formula::Card(p, x));
            }
            if let Some(k) = numbered(&name, "dp") {
                self.bump();
                let ts = self.terms()?;
                return self.path_atom(k, ts, None);
            }
            if let Some(s) = numbered(&name, "sdp") {
                self.bump();
                self.expect(Tok::Comma, "`,k` after sdp<s>")?;
                let Tok::Num(k) = self.bump() else {
                    self.pos -= 1;
                    return self.err("expected path count");
                };
                let ts = self.terms()?;
                return self.path_atom(k, ts, Some(s));
            }
        }
        if *self.peek_at(1) == Tok::LParen {
            self.bump();
            let ts = self.terms()?;
            if let Some(v) = self.vocab {
                match v.arity(&name) {
                    None => return Err(Error::UnknownSymbol(name)),
                    Some(a) if a != ts.len() => {
                        return Err(Error::ArityMismatch {
                            symbol: name,
                            expected: a,
                            found: ts.len(),
                        })
                    }
                    _ => {}
                }
            }
            return Ok(Formula::Rel(name, ts));
        }
        let lhs = self.term()?;
        if self.is_kw("in") {
            self.bump();
            let x = self.set_var()?;
            return Ok(Formula::In(lhs, x));
        }
        match self.peek() {
            Tok::Eq => {
                self.bump();
                Ok(Formula::Eq(lhs, self.term()?))
            }
            Tok::Neq => {
                self.bump();
                Ok(Formula::not(Formula::Eq(lhs, self.term()?)))
            }
            _ => self.err("expected `=`, `!=` or `in`"),
        }
    }

    fn path_atom(&self, k: u32, ts: Vec<Term>, s: Option<u32>) -> Result<Formula> {
        if k == 0 || ts.len() != 2 * k as usize {
            return self.err(format!("path atom with k = {k} needs {} terms", 2 * k));
        }
        Ok(match s {
            Some(s) => Formula::Sdp(s, ts),
            None => Formula::Dp(ts),
        })
    }
}

/// Parses a formula; every identifier in term position is a variable.
pub fn parse_formula(text: &str) -> Result<Formula> {
    parse(text, None)
}

/// Parses against a vocabulary: constant names become constant terms unless
/// bound, and relation atoms are checked for existence and arity.
pub fn parse_formula_with(text: &str, vocab: &Vocabulary) -> Result<Formula> {
    parse(text, Some(vocab))
}

fn parse(text: &str, vocab: Option<&Vocabulary>) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        vocab,
        bound: Vec::new(),
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}
