use std::fmt;

use crate::error::{Error, Result};
use crate::logic::parse_formula;
use crate::minors::{named_graph, ObstructionSet};

use super::{Body, ThetaSentence};

/// Concrete syntax accepted by [`parse_theta`].
pub const THETA_GRAMMAR: &str = r#"theta    = base | compound ;
base     = "base" "(" formula [ ";" excl ] [ ";" "dp" ] ")" ;
excl     = "excl" "{" name { "," name } "}" [ "c" "=" int ] ;
compound = "mod" "(" formula ";" "tw" "=" int ")" "|>" "(" body ")" ;
body     = conj { "or" conj } ;
conj     = item { "and" item } ;
item     = "cc" "(" theta ")" | theta | "(" body ")" ;
formula  = text up to the first ";" or unbalanced ")" ;
name     = "K" int | "K33" | "K" int "_" int | "P" int | "C" int | "S" int | "M" int ;
"#;

/// Parses a sentence written in [`THETA_GRAMMAR`].
pub fn parse_theta(text: &str) -> Result<ThetaSentence> {
    let mut c = Cursor { text, pos: 0 };
    let t = c.theta()?;
    c.ws();
    if c.pos < text.len() {
        return c.err("trailing input");
    }
    Ok(t)
}

/// Parses one sentence starting at byte `pos` of `text`; returns it with the
/// byte offset just past it. Error positions refer to the whole text.
pub(crate) fn parse_theta_at(text: &str, pos: usize) -> Result<(ThetaSentence, usize)> {
    let mut c = Cursor { text, pos };
    let t = c.theta()?;
    Ok((t, c.pos))
}

/// Parses `excl{…}` (without the keyword) starting at byte `pos`.
pub(crate) fn parse_excl_at(text: &str, pos: usize) -> Result<(ObstructionSet, usize)> {
    let mut c = Cursor { text, pos };
    let o = c.excl()?;
    Ok((o, c.pos))
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let before = &self.text[..pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.location(self.pos);
        Err(Error::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn peek_word(&mut self, w: &str) -> bool {
        self.ws();
        let r = self.rest();
        r.starts_with(w)
            && !r[w.len()..]
                .chars()
                .next()
                .is_some_and(|ch| ch.is_alphanumeric() || ch == '_')
    }

    fn word(&mut self, w: &str) -> bool {
        if self.peek_word(w) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn punct(&mut self, p: &str) -> bool {
        self.ws();
        if self.rest().starts_with(p) {
            self.pos += p.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<()> {
        if self.punct(p) {
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn int(&mut self) -> Result<usize> {
        self.ws();
        let digits = self.rest().chars().take_while(|c| c.is_ascii_digit()).count();
        if digits == 0 {
            return self.err("expected a number");
        }
        let v = self.rest()[..digits]
            .parse()
            .or_else(|_| self.err("number out of range"))?;
        self.pos += digits;
        Ok(v)
    }

    fn theta(&mut self) -> Result<ThetaSentence> {
        let start = self.pos;
        if self.word("base") {
            self.expect("(")?;
            let sigma = self.formula()?;
            let mut obstructions = None;
            let mut paths = false;
            while self.punct(";") {
                if self.word("excl") {
                    obstructions = Some(self.excl()?);
                } else if self.word("dp") {
                    paths = true;
                } else {
                    return self.err("expected `excl` or `dp`");
                }
            }
            self.expect(")")?;
            let built = if paths {
                ThetaSentence::base_with_paths(sigma, obstructions)
            } else {
                ThetaSentence::base(sigma, obstructions)
            };
            return built.or_else(|e| self.at(start, e));
        }
        if self.word("mod") {
            self.expect("(")?;
            let beta = self.formula()?;
            self.expect(";")?;
            if !self.word("tw") {
                return self.err("expected `tw`");
            }
            self.expect("=")?;
            let tw = self.int()?;
            self.expect(")")?;
            self.expect("|>")?;
            self.expect("(")?;
            let body = self.body()?;
            self.expect(")")?;
            return ThetaSentence::compound(beta, tw, body).or_else(|e| self.at(start, e));
        }
        self.err("expected `base` or `mod`")
    }

    fn at<T>(&self, pos: usize, e: Error) -> Result<T> {
        match e {
            Error::Syntax { .. } => Err(e),
            other => {
                let (line, column) = self.location(pos);
                Err(Error::Syntax {
                    line,
                    column,
                    message: other.to_string(),
                })
            }
        }
    }

    fn excl(&mut self) -> Result<ObstructionSet> {
        self.expect("{")?;
        let mut graphs = Vec::new();
        loop {
            self.ws();
            let start = self.pos;
            let len = self
                .rest()
                .chars()
                .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
                .count();
            let name = &self.text[start..start + len];
            let g = named_graph(name).or_else(|e| self.at(start, e))?;
            self.pos += len;
            graphs.push((name.to_string(), g));
            if !self.punct(",") {
                break;
            }
        }
        self.expect("}")?;
        let start = self.pos;
        let bound = if self.word("c") {
            self.expect("=")?;
            Some(self.int()?)
        } else {
            None
        };
        ObstructionSet::new(graphs, bound).or_else(|e| self.at(start, e))
    }

    fn formula(&mut self) -> Result<crate::logic::Formula> {
        self.ws();
        let start = self.pos;
        let mut depth = 0usize;
        let mut end = self.text.len();
        for (i, ch) in self.rest().char_indices() {
            match ch {
                '(' => depth += 1,
                ')' if depth == 0 => {
                    end = start + i;
                    break;
                }
                ')' => depth -= 1,
                ';' if depth == 0 => {
                    end = start + i;
                    break;
                }
                _ => {}
            }
        }
        let snippet = &self.text[start..end];
        let f = parse_formula(snippet).map_err(|e| match e {
            Error::Syntax { line, column, message } => {
                let (l0, c0) = self.location(start);
                let column = if line == 1 { column + c0 - 1 } else { column };
                Error::Syntax {
                    line: line + l0 - 1,
                    column,
                    message,
                }
            }
            other => other,
        })?;
        self.pos = end;
        Ok(f)
    }

    fn body(&mut self) -> Result<Body> {
        let mut parts = vec![self.conj()?];
        while self.word("or") {
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            Body::Or(parts)
        })
    }

    fn conj(&mut self) -> Result<Body> {
        let mut parts = vec![self.item()?];
        while self.word("and") {
            parts.push(self.item()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            Body::And(parts)
        })
    }

    fn item(&mut self) -> Result<Body> {
        if self.word("cc") {
            self.expect("(")?;
            let t = self.theta()?;
            self.expect(")")?;
            return Ok(Body::closed(t));
        }
        if self.punct("(") {
            let b = self.body()?;
            self.expect(")")?;
            return Ok(b);
        }
        Ok(Body::leaf(self.theta()?))
    }
}

impl fmt::Display for ThetaSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaSentence::Base(b) => {
                write!(f, "base({}", b.sigma)?;
                if let Some(o) = &b.obstructions {
                    write!(f, " ; excl{{{}}}", o.names().join(","))?;
                    let default = o.graphs().iter().map(|(_, g)| g.n()).max().unwrap_or(0);
                    if o.clique_bound() != default {
                        write!(f, " c={}", o.clique_bound())?;
                    }
                }
                if b.paths {
                    write!(f, " ; dp")?;
                }
                write!(f, ")")
            }
            ThetaSentence::Compound(c) => {
                write!(
                    f,
                    "mod({} ; tw={}) |> ({})",
                    c.modulator.formula, c.modulator.declared_tw, c.body
                )
            }
        }
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, bs: &[Body], op: &str| {
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                match b {
                    Body::Leaf { .. } => write!(f, "{b}")?,
                    _ => write!(f, "({b})")?,
                }
            }
            Ok(())
        };
        match self {
            Body::Leaf { theta, closed: true } => write!(f, "cc({theta})"),
            Body::Leaf { theta, closed: false } => write!(f, "{theta}"),
            Body::And(bs) => join(f, bs, "and"),
            Body::Or(bs) => join(f, bs, "or"),
        }
    }
}
