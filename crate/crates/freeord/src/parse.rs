//! Concrete syntax: a hand-rolled lexer and recursive-descent parsers for
//! terms and sequents, plus the pretty-printer.
//!
//! Grammar (ASCII): atom `[a-zA-Z][a-zA-Z0-9_]*` with optional index
//! `name(x)` / `name(3)`; meet `&` (flat, n-ary); negation prefix `~`;
//! omega-meet `/\ VAR . TERM`; parentheses.  Sequents are
//! `TERMLIST |- TERM?` with a comma-separated antecedent; both sides may
//! be empty.  Decimal numerals are sugar for stroke notation.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::sequent::Sequent;
use crate::term::{Formula, Index, NumVar, Numeral, PrimeAtom, PrimeTerm, Term};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at byte {offset}: {msg}")]
pub struct ParseError {
    pub offset: usize,
    pub msg: String,
}

fn err<T>(offset: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        offset,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Num(u32),
    Amp,
    Tilde,
    Lambda,
    Dot,
    LParen,
    RParen,
    Comma,
    Turnstile,
    Pipe,
    Quote,
    Plus,
    Eq,
    Lt,
}

pub(crate) struct Lexer {
    pub toks: Vec<(usize, Tok)>,
    pub end: usize,
    pub pos: usize,
}

impl Lexer {
    pub fn new(text: &str) -> Result<Lexer, ParseError> {
        let bytes = text.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '&' => {
                    toks.push((i, Tok::Amp));
                    i += 1;
                }
                '~' => {
                    toks.push((i, Tok::Tilde));
                    i += 1;
                }
                '.' => {
                    toks.push((i, Tok::Dot));
                    i += 1;
                }
                '(' => {
                    toks.push((i, Tok::LParen));
                    i += 1;
                }
                ')' => {
                    toks.push((i, Tok::RParen));
                    i += 1;
                }
                ',' => {
                    toks.push((i, Tok::Comma));
                    i += 1;
                }
                '\'' => {
                    toks.push((i, Tok::Quote));
                    i += 1;
                }
                '+' => {
                    toks.push((i, Tok::Plus));
                    i += 1;
                }
                '=' => {
                    toks.push((i, Tok::Eq));
                    i += 1;
                }
                '<' => {
                    toks.push((i, Tok::Lt));
                    i += 1;
                }
                '/' => {
                    if bytes.get(i + 1) == Some(&b'\\') {
                        toks.push((i, Tok::Lambda));
                        i += 2;
                    } else {
                        return err(i, "expected `/\\`");
                    }
                }
                '|' => {
                    if bytes.get(i + 1) == Some(&b'-') {
                        toks.push((i, Tok::Turnstile));
                        i += 2;
                    } else {
                        toks.push((i, Tok::Pipe));
                        i += 1;
                    }
                }
                c if c.is_ascii_alphabetic() => {
                    let start = i;
                    while i < bytes.len()
                        && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    toks.push((start, Tok::Ident(text[start..i].to_string())));
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                    let v: u32 = text[start..i]
                        .parse()
                        .map_err(|_| ParseError {
                            offset: start,
                            msg: "numeral too large".into(),
                        })?;
                    toks.push((start, Tok::Num(v)));
                }
                _ => return err(i, format!("unexpected character `{c}`")),
            }
        }
        Ok(Lexer {
            toks,
            end: bytes.len(),
            pos: 0,
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    pub fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    pub fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let off = self.offset();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => err(off, format!("expected {what}")),
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

struct TermParser<'a> {
    lx: &'a mut Lexer,
    /// Binders currently in scope, innermost last.
    scope: Vec<String>,
    /// Every identifier occurring in the input; used to rename shadowing
    /// binders apart without clashing.
    used: BTreeSet<String>,
}

impl<'a> TermParser<'a> {
    fn new(lx: &'a mut Lexer) -> TermParser<'a> {
        let used = lx
            .toks
            .iter()
            .filter_map(|(_, t)| match t {
                Tok::Ident(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        TermParser {
            lx,
            scope: Vec::new(),
            used,
        }
    }

    fn fresh(&mut self, base: &str) -> String {
        let mut k = 1;
        loop {
            let cand = format!("{base}_{k}");
            if !self.used.contains(&cand) {
                self.used.insert(cand.clone());
                return cand;
            }
            k += 1;
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let first = self.unary()?;
        let mut parts = vec![first];
        while self.lx.peek() == Some(&Tok::Amp) {
            self.lx.next();
            parts.push(self.unary()?);
        }
        Ok(Formula::meet(parts))
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        let off = self.lx.offset();
        match self.lx.peek() {
            Some(Tok::Tilde) => {
                self.lx.next();
                Ok(Formula::neg(self.unary()?))
            }
            Some(Tok::Lambda) => {
                self.lx.next();
                let voff = self.lx.offset();
                let name = match self.lx.next() {
                    Some(Tok::Ident(s)) => s,
                    _ => return err(voff, "expected binder variable after `/\\`"),
                };
                self.lx.expect(Tok::Dot, "`.` after binder variable")?;
                // Rename shadowing binders apart so every binder in a
                // term is distinct.
                let bound = if self.scope.contains(&name) {
                    self.fresh(&name)
                } else {
                    name.clone()
                };
                self.scope.push(name.clone());
                let rename = bound != name;
                let body = self.term()?;
                self.scope.pop();
                let body = if rename {
                    rename_var(&body, &NumVar::new(name), &NumVar::new(bound.clone()))
                } else {
                    body
                };
                Ok(Formula::omega(NumVar::new(bound), body))
            }
            Some(Tok::LParen) => {
                self.lx.next();
                let t = self.term()?;
                self.lx.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::Ident(_)) => {
                let name = match self.lx.next() {
                    Some(Tok::Ident(s)) => s,
                    _ => unreachable!(),
                };
                if self.scope.contains(&name) {
                    return err(off, format!("numeral variable `{name}` used as generator"));
                }
                if self.lx.peek() == Some(&Tok::LParen) {
                    self.lx.next();
                    let ioff = self.lx.offset();
                    let index = match self.lx.next() {
                        Some(Tok::Ident(v)) => {
                            if !self.scope.contains(&v) {
                                return err(ioff, format!("unbound numeral variable `{v}`"));
                            }
                            Index::Var(NumVar::new(v))
                        }
                        Some(Tok::Num(n)) => {
                            let mut n = n;
                            while self.lx.peek() == Some(&Tok::Quote) {
                                self.lx.next();
                                n += 1;
                            }
                            match Numeral::new(n) {
                                Some(n) => Index::Num(n),
                                None => return err(ioff, "numeral must be positive"),
                            }
                        }
                        _ => return err(ioff, "expected index variable or numeral"),
                    };
                    self.lx.expect(Tok::RParen, "`)` after index")?;
                    Ok(Formula::Prime(PrimeAtom {
                        name,
                        index: Some(index),
                    }))
                } else {
                    Ok(Formula::prime(PrimeAtom::plain(name)))
                }
            }
            _ => err(off, "expected a term"),
        }
    }
}

fn rename_var(t: &Term, from: &NumVar, to: &NumVar) -> Term {
    match t {
        Formula::Prime(p) => match &p.index {
            Some(Index::Var(v)) if v == from => {
                Formula::Prime(PrimeAtom::indexed_var(p.name.clone(), to.clone()))
            }
            _ => t.clone(),
        },
        Formula::Meet(parts) => {
            Formula::Meet(parts.iter().map(|x| rename_var(x, from, to)).collect())
        }
        Formula::Neg(b) => Formula::neg(rename_var(b, from, to)),
        Formula::Omega { var, body } => {
            if var == from {
                t.clone()
            } else {
                Formula::omega(var.clone(), rename_var(body, from, to))
            }
        }
    }
}

/// Parses a closed core-language term.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut lx = Lexer::new(text)?;
    let t = TermParser::new(&mut lx).term()?;
    if !lx.at_end() {
        return err(lx.offset(), "trailing input after term");
    }
    Ok(t)
}

/// Parses a sequent `A, B |- C` / `|- C` / `A |-` / `|-`.
pub fn parse_sequent(text: &str) -> Result<Sequent<PrimeAtom>, ParseError> {
    let mut lx = Lexer::new(text)?;
    let mut ante = Vec::new();
    if !matches!(lx.peek(), Some(Tok::Turnstile)) {
        loop {
            ante.push(TermParser::new(&mut lx).term()?);
            match lx.peek() {
                Some(Tok::Comma) => {
                    lx.next();
                }
                Some(Tok::Turnstile) => break,
                _ => return err(lx.offset(), "expected `,` or `|-`"),
            }
        }
    }
    lx.expect(Tok::Turnstile, "`|-`")?;
    let succ = if lx.at_end() {
        None
    } else {
        Some(TermParser::new(&mut lx).term()?)
    };
    if !lx.at_end() {
        return err(lx.offset(), "trailing input after sequent");
    }
    Ok(Sequent::new(ante, succ))
}

/// Pretty-prints a formula; inverse of the parser up to structural
/// equality.
pub fn print_formula<P: PrimeTerm>(t: &Formula<P>) -> String {
    let mut s = String::new();
    write_formula(t, &mut s);
    s
}

fn write_formula<P: PrimeTerm>(t: &Formula<P>, out: &mut String) {
    match t {
        Formula::Prime(p) => {
            let _ = write!(out, "{p}");
        }
        Formula::Meet(parts) => {
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                // nested meets and omegas need parentheses inside a meet
                if matches!(part, Formula::Meet(_) | Formula::Omega { .. }) {
                    out.push('(');
                    write_formula(part, out);
                    out.push(')');
                } else {
                    write_formula(part, out);
                }
            }
        }
        Formula::Neg(b) => {
            out.push('~');
            if matches!(**b, Formula::Meet(_) | Formula::Omega { .. }) {
                out.push('(');
                write_formula(b, out);
                out.push(')');
            } else {
                write_formula(b, out);
            }
        }
        Formula::Omega { var, body } => {
            if P::lambda_binder() {
                let _ = write!(out, "/\\{var}. ");
            } else {
                let _ = write!(out, "({var}) ");
            }
            write_formula(body, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_meet_and_negation() {
        let t = parse_term("a & ~b").unwrap();
        assert_eq!(
            t,
            Formula::meet(vec![
                Formula::prime(PrimeAtom::plain("a")),
                Formula::neg(Formula::prime(PrimeAtom::plain("b"))),
            ])
        );
    }

    #[test]
    fn parse_omega_schema() {
        let t = parse_term("/\\x. a(x)").unwrap();
        let x = NumVar::new("x");
        assert_eq!(
            t,
            Formula::omega(x.clone(), Formula::prime(PrimeAtom::indexed_var("a", x)))
        );
    }

    #[test]
    fn omega_body_extends_over_meet() {
        let t = parse_term("/\\x. a(x) & b").unwrap();
        match t {
            Formula::Omega { body, .. } => assert!(matches!(*body, Formula::Meet(_))),
            other => panic!("expected omega, got {other:?}"),
        }
    }

    #[test]
    fn unbound_index_variable_rejected() {
        let e = parse_term("a(x)").unwrap_err();
        assert!(e.msg.contains("unbound"));
    }

    #[test]
    fn binder_variable_not_a_generator() {
        let e = parse_term("/\\x. x").unwrap_err();
        assert!(e.msg.contains("used as generator"));
    }

    #[test]
    fn shadowing_binders_renamed_apart() {
        let t = parse_term("/\\x. /\\x. a(x) & b(x)").unwrap();
        let Formula::Omega { var: outer, body } = &t else {
            panic!()
        };
        let Formula::Omega { var: inner, .. } = &**body else {
            panic!()
        };
        assert_ne!(outer, inner);
        // round trip survives the renaming
        let printed = print_formula(&t);
        assert_eq!(parse_term(&printed).unwrap(), t);
    }

    #[test]
    fn error_reports_offset() {
        let e = parse_term("a & ]").unwrap_err();
        assert_eq!(e.offset, 4);
    }

    #[test]
    fn sequent_forms() {
        let s = parse_sequent("a, ~b |- c").unwrap();
        assert_eq!(s.ante().len(), 2);
        assert!(s.succ().is_some());

        let s = parse_sequent("|- c").unwrap();
        assert!(s.ante().is_empty());

        let s = parse_sequent("a |-").unwrap();
        assert!(s.succ().is_none());

        let s = parse_sequent("|-").unwrap();
        assert_eq!(s, Sequent::absurd());
    }

    #[test]
    fn duplicate_antecedents_collapse() {
        let s = parse_sequent("a, a |- b").unwrap();
        assert_eq!(s.ante().len(), 1);
    }

    #[test]
    fn decimal_numerals_in_index() {
        let t = parse_term("/\\x. a(3)").unwrap();
        let Formula::Omega { body, .. } = &t else {
            panic!()
        };
        assert_eq!(
            **body,
            Formula::prime(PrimeAtom::indexed_num("a", Numeral::new(3).unwrap()))
        );
    }

    #[test]
    fn print_parenthesizes_nested_structure() {
        let t = parse_term("(a & b) & ~(a & b)").unwrap();
        let printed = print_formula(&t);
        assert_eq!(parse_term(&printed).unwrap(), t);
        assert_eq!(printed, "(a & b) & ~(a & b)");
    }
}
