//! The number-theoretic calculus: decidable prime formulas over stroke
//! numerals, the free-variable rule, double negation, complete induction
//! and the consistency harness.
//!
//! Primes are comparisons `s = t` / `s < t` between numeral terms built
//! from `1`, successor and addition.  Base relations are read off by
//! evaluation, so derivability is conservative over arithmetic truth on
//! primes and the empty sequent is the consistency target.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::calculus::{self, BaseSystem, Engine};
use crate::derivation::{CheckError, Derivation, Family, Rule};
use crate::exec::ExecMode;
use crate::parse::{Lexer, ParseError, Tok};
use crate::sequent::Sequent;
use crate::term::{Formula, NumVar, Numeral, PrimeTerm};
use crate::transform::{self, TransformError};

/// A numeral term: literal, variable, successor or sum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NumTerm {
    Lit(Numeral),
    Var(NumVar),
    Succ(Box<NumTerm>),
    Plus(Box<NumTerm>, Box<NumTerm>),
}

impl NumTerm {
    pub fn lit(n: u32) -> NumTerm {
        NumTerm::Lit(Numeral::new(n).expect("literal must be positive"))
    }

    pub fn var(name: impl Into<String>) -> NumTerm {
        NumTerm::Var(NumVar::new(name))
    }

    pub fn succ(t: NumTerm) -> NumTerm {
        NumTerm::Succ(Box::new(t))
    }

    pub fn plus(a: NumTerm, b: NumTerm) -> NumTerm {
        NumTerm::Plus(Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self, out: &mut BTreeSet<NumVar>) {
        match self {
            NumTerm::Lit(_) => {}
            NumTerm::Var(v) => {
                out.insert(v.clone());
            }
            NumTerm::Succ(t) => t.free_vars(out),
            NumTerm::Plus(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
        }
    }

    /// Value of a closed term.
    pub fn value(&self) -> Option<u32> {
        match self {
            NumTerm::Lit(n) => Some(n.value()),
            NumTerm::Var(_) => None,
            NumTerm::Succ(t) => t.value().map(|v| v + 1),
            NumTerm::Plus(a, b) => Some(a.value()? + b.value()?),
        }
    }

    /// Collapses closed subterms to literals; the canonical form of
    /// substitution instances.
    pub fn fold(self) -> NumTerm {
        match self {
            NumTerm::Lit(_) | NumTerm::Var(_) => self,
            NumTerm::Succ(t) => {
                let t = t.fold();
                match t {
                    NumTerm::Lit(n) => NumTerm::lit(n.value() + 1),
                    other => NumTerm::succ(other),
                }
            }
            NumTerm::Plus(a, b) => {
                let a = a.fold();
                let b = b.fold();
                match (&a, &b) {
                    (NumTerm::Lit(x), NumTerm::Lit(y)) => NumTerm::lit(x.value() + y.value()),
                    _ => NumTerm::plus(a, b),
                }
            }
        }
    }

    pub fn subst(&self, var: &NumVar, n: Numeral) -> NumTerm {
        match self {
            NumTerm::Lit(_) => self.clone(),
            NumTerm::Var(v) => {
                if v == var {
                    NumTerm::Lit(n)
                } else {
                    self.clone()
                }
            }
            NumTerm::Succ(t) => NumTerm::succ(t.subst(var, n)),
            NumTerm::Plus(a, b) => NumTerm::plus(a.subst(var, n), b.subst(var, n)),
        }
    }
}

impl fmt::Display for NumTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumTerm::Lit(n) => f.write_str(&n.strokes()),
            NumTerm::Var(v) => write!(f, "{v}"),
            NumTerm::Succ(t) => {
                if matches!(**t, NumTerm::Plus(..)) {
                    write!(f, "({t})'")
                } else {
                    write!(f, "{t}'")
                }
            }
            NumTerm::Plus(a, b) => {
                write!(f, "{a}+")?;
                if matches!(**b, NumTerm::Plus(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pred {
    Eq,
    Lt,
}

/// A prime formula of the calculus: a comparison of numeral terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeFormula {
    pub pred: Pred,
    pub lhs: NumTerm,
    pub rhs: NumTerm,
}

impl PrimeFormula {
    pub fn eq_of(lhs: NumTerm, rhs: NumTerm) -> PrimeFormula {
        PrimeFormula {
            pred: Pred::Eq,
            lhs,
            rhs,
        }
    }

    pub fn lt_of(lhs: NumTerm, rhs: NumTerm) -> PrimeFormula {
        PrimeFormula {
            pred: Pred::Lt,
            lhs,
            rhs,
        }
    }

    pub fn is_closed(&self) -> bool {
        let mut fv = BTreeSet::new();
        self.collect_free_vars(&mut fv);
        fv.is_empty()
    }
}

impl fmt::Display for PrimeFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.pred {
            Pred::Eq => "=",
            Pred::Lt => "<",
        };
        write!(f, "{} {op} {}", self.lhs, self.rhs)
    }
}

impl PrimeTerm for PrimeFormula {
    fn collect_free_vars(&self, out: &mut BTreeSet<NumVar>) {
        self.lhs.free_vars(out);
        self.rhs.free_vars(out);
    }

    fn subst_numeral(&self, var: &NumVar, n: Numeral) -> Self {
        PrimeFormula {
            pred: self.pred,
            lhs: self.lhs.subst(var, n).fold(),
            rhs: self.rhs.subst(var, n).fold(),
        }
    }

    fn lambda_binder() -> bool {
        false
    }
}

pub type NFormula = Formula<PrimeFormula>;
pub type NSequent = Sequent<PrimeFormula>;
pub type NDerivation = Derivation<PrimeFormula>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NError {
    #[error("free numeral variables in input")]
    Open,
    #[error("expected a prime sequent")]
    NotPrime,
    #[error("instance {0} exceeds bound {1}")]
    Bound(u32, u32),
    #[error("derivation shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("desk-scale cap: {0}")]
    Cap(String),
}

/// Truth value of a closed prime formula.
pub fn eval_prime(f: &PrimeFormula) -> Result<bool, NError> {
    let (Some(l), Some(r)) = (f.lhs.value(), f.rhs.value()) else {
        return Err(NError::Open);
    };
    Ok(match f.pred {
        Pred::Eq => l == r,
        Pred::Lt => l < r,
    })
}

/// The base system: entailment and markers by evaluation, free-variable
/// rule available.
#[derive(Debug, Clone, Copy, Default)]
pub struct NBase;

fn truth(p: &PrimeFormula) -> Option<bool> {
    eval_prime(p).ok()
}

impl BaseSystem for NBase {
    type P = PrimeFormula;

    fn entails(&self, a: &PrimeFormula, b: &PrimeFormula) -> bool {
        match (truth(a), truth(b)) {
            (Some(x), Some(y)) => !x || y,
            _ => false,
        }
    }

    fn is_true(&self, b: &PrimeFormula) -> bool {
        truth(b) == Some(true)
    }

    fn is_false(&self, a: &PrimeFormula) -> bool {
        truth(a) == Some(false)
    }

    fn allows_free_var(&self) -> bool {
        true
    }
}

/// Whether a prime sequent is a base relation.  The empty sequent is
/// accepted as input and is never a base relation; compound formulas are
/// rejected.
pub fn base_holds(s: &NSequent) -> Result<bool, NError> {
    for t in s.ante().iter().chain(s.succ()) {
        match t {
            Formula::Prime(p) => {
                if !p.is_closed() {
                    return Err(NError::Open);
                }
            }
            _ => return Err(NError::NotPrime),
        }
    }
    if s.ante().len() > 1 {
        return Err(NError::NotPrime);
    }
    Ok(calculus::base_sequent(&NBase, s))
}

// ---------------------------------------------------------------------
// concrete syntax

struct NParser<'a> {
    lx: &'a mut Lexer,
    scope: Vec<String>,
    used: BTreeSet<String>,
}

fn perr<T>(offset: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        offset,
        msg: msg.into(),
    })
}

impl<'a> NParser<'a> {
    fn new(lx: &'a mut Lexer) -> NParser<'a> {
        let used = lx
            .toks
            .iter()
            .filter_map(|(_, t)| match t {
                Tok::Ident(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        NParser {
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

    fn formula(&mut self) -> Result<NFormula, ParseError> {
        let first = self.unary()?;
        let mut parts = vec![first];
        while self.lx.peek() == Some(&Tok::Amp) {
            self.lx.next();
            parts.push(self.unary()?);
        }
        Ok(Formula::meet(parts))
    }

    /// `(x) PHI` only when `(x)` is not followed by a token that would
    /// continue a numeral term, so `(x) < 1` stays a comparison.
    fn quantifier_ahead(&self) -> bool {
        let at = |k: usize| self.lx.toks.get(self.lx.pos + k).map(|(_, t)| t);
        if at(0) != Some(&Tok::LParen) {
            return false;
        }
        if !matches!(at(1), Some(Tok::Ident(_))) {
            return false;
        }
        if at(2) != Some(&Tok::RParen) {
            return false;
        }
        !matches!(
            at(3),
            Some(Tok::Eq) | Some(Tok::Lt) | Some(Tok::Plus) | Some(Tok::Quote)
        )
    }

    fn unary(&mut self) -> Result<NFormula, ParseError> {
        let off = self.lx.offset();
        match self.lx.peek() {
            Some(Tok::Tilde) => {
                self.lx.next();
                Ok(Formula::neg(self.unary()?))
            }
            Some(Tok::LParen) if self.quantifier_ahead() => {
                self.lx.next();
                let name = match self.lx.next() {
                    Some(Tok::Ident(s)) => s,
                    _ => unreachable!(),
                };
                self.lx.expect(Tok::RParen, "`)` after binder variable")?;
                let bound = if self.scope.contains(&name) {
                    self.fresh(&name)
                } else {
                    name.clone()
                };
                self.scope.push(name.clone());
                let rename = bound != name;
                let body = self.formula()?;
                self.scope.pop();
                let body = if rename {
                    rename_nvar(&body, &NumVar::new(name), &NumVar::new(bound.clone()))
                } else {
                    body
                };
                Ok(Formula::omega(NumVar::new(bound), body))
            }
            Some(Tok::LParen) => {
                // backtrack between a parenthesized numeral term starting
                // a comparison and a parenthesized formula
                let save = self.lx.pos;
                match self.prime() {
                    Ok(p) => Ok(Formula::prime(p)),
                    Err(_) => {
                        self.lx.pos = save;
                        self.lx.next();
                        let t = self.formula()?;
                        self.lx.expect(Tok::RParen, "`)`")?;
                        Ok(t)
                    }
                }
            }
            Some(Tok::Num(_)) | Some(Tok::Ident(_)) => Ok(Formula::prime(self.prime()?)),
            _ => perr(off, "expected a formula"),
        }
    }

    fn prime(&mut self) -> Result<PrimeFormula, ParseError> {
        let lhs = self.num_term()?;
        let off = self.lx.offset();
        let pred = match self.lx.next() {
            Some(Tok::Eq) => Pred::Eq,
            Some(Tok::Lt) => Pred::Lt,
            _ => return perr(off, "expected `=` or `<`"),
        };
        let rhs = self.num_term()?;
        Ok(PrimeFormula { pred, lhs, rhs })
    }

    fn num_term(&mut self) -> Result<NumTerm, ParseError> {
        let mut t = self.atom()?;
        while self.lx.peek() == Some(&Tok::Plus) {
            self.lx.next();
            t = NumTerm::plus(t, self.atom()?);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<NumTerm, ParseError> {
        let mut t = self.primary()?;
        while self.lx.peek() == Some(&Tok::Quote) {
            self.lx.next();
            // keep literals canonical: 1'' is the numeral 3
            t = match t {
                NumTerm::Lit(n) => NumTerm::lit(n.value() + 1),
                other => NumTerm::succ(other),
            };
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<NumTerm, ParseError> {
        let off = self.lx.offset();
        match self.lx.next() {
            Some(Tok::Num(n)) => match Numeral::new(n) {
                Some(n) => Ok(NumTerm::Lit(n)),
                None => perr(off, "numerals start at 1"),
            },
            Some(Tok::Ident(v)) => Ok(NumTerm::Var(NumVar::new(v))),
            Some(Tok::LParen) => {
                let t = self.num_term()?;
                self.lx.expect(Tok::RParen, "`)` in numeral term")?;
                Ok(t)
            }
            _ => perr(off, "expected a numeral term"),
        }
    }
}

fn rename_nvar(f: &NFormula, from: &NumVar, to: &NumVar) -> NFormula {
    fn rename_term(t: &NumTerm, from: &NumVar, to: &NumVar) -> NumTerm {
        match t {
            NumTerm::Lit(_) => t.clone(),
            NumTerm::Var(v) => {
                if v == from {
                    NumTerm::Var(to.clone())
                } else {
                    t.clone()
                }
            }
            NumTerm::Succ(inner) => NumTerm::succ(rename_term(inner, from, to)),
            NumTerm::Plus(a, b) => {
                NumTerm::plus(rename_term(a, from, to), rename_term(b, from, to))
            }
        }
    }
    match f {
        Formula::Prime(p) => Formula::Prime(PrimeFormula {
            pred: p.pred,
            lhs: rename_term(&p.lhs, from, to),
            rhs: rename_term(&p.rhs, from, to),
        }),
        Formula::Meet(parts) => {
            Formula::Meet(parts.iter().map(|x| rename_nvar(x, from, to)).collect())
        }
        Formula::Neg(b) => Formula::neg(rename_nvar(b, from, to)),
        Formula::Omega { var, body } => {
            if var == from {
                f.clone()
            } else {
                Formula::omega(var.clone(), rename_nvar(body, from, to))
            }
        }
    }
}

/// Parses a number-theoretic formula, e.g. `~(1+1 = 1') & (x) 1 < x'`.
pub fn parse_nformula(text: &str) -> Result<NFormula, ParseError> {
    let mut lx = Lexer::new(text)?;
    let t = NParser::new(&mut lx).formula()?;
    if !lx.at_end() {
        return perr(lx.offset(), "trailing input after formula");
    }
    Ok(t)
}

/// Parses a number-theoretic sequent.  Free variables are admitted; they
/// arise in conclusions of the free-variable rule.
pub fn parse_nsequent(text: &str) -> Result<NSequent, ParseError> {
    let mut lx = Lexer::new(text)?;
    let mut ante = Vec::new();
    if !matches!(lx.peek(), Some(Tok::Turnstile)) {
        loop {
            ante.push(NParser::new(&mut lx).formula()?);
            match lx.peek() {
                Some(Tok::Comma) => {
                    lx.next();
                }
                Some(Tok::Turnstile) => break,
                _ => return perr(lx.offset(), "expected `,` or `|-`"),
            }
        }
    }
    lx.expect(Tok::Turnstile, "`|-`")?;
    let succ = if lx.at_end() {
        None
    } else {
        Some(NParser::new(&mut lx).formula()?)
    };
    if !lx.at_end() {
        return perr(lx.offset(), "trailing input after sequent");
    }
    Ok(Sequent::new(ante, succ))
}

// ---------------------------------------------------------------------
// checking, search, transformations

/// Checks a derivation against the rule templates at bound `bound`.
pub fn check_nderivation(bound: u32, d: &NDerivation) -> Result<(), CheckError> {
    calculus::check(&NBase, bound, d)
}

/// A reusable search engine whose memo table persists across queries.
pub type NProver = Engine<NBase>;

pub fn nprover(bound: u32) -> NProver {
    Engine::new(NBase, bound)
}

/// Whether the closed sequent `s` is derivable at bound `bound`.
pub fn decide_n(s: &NSequent, bound: u32) -> Result<bool, NError> {
    if !s.is_closed() {
        return Err(NError::Open);
    }
    Ok(nprover(bound).decide(s))
}

/// A checkable derivation of `s`, exactly when [`decide_n`] holds.
pub fn prove_n(s: &NSequent, bound: u32) -> Result<Option<NDerivation>, NError> {
    if !s.is_closed() {
        return Err(NError::Open);
    }
    Ok(nprover(bound).prove(s))
}

/// Cut for the number-theoretic calculus; free-variable families pass
/// through pointwise.
pub fn cut_n(bound: u32, d1: &NDerivation, d2: &NDerivation) -> Result<NDerivation, NError> {
    Ok(transform::cut(&NBase, bound, d1, d2)?)
}

/// Substitutes numeral `n` for the free variable `var`: a free-variable
/// node on `var` projects to its `n`-th family member, everything else is
/// substituted recursively.
pub fn specialize(
    d: &NDerivation,
    var: &NumVar,
    n: Numeral,
    bound: u32,
) -> Result<NDerivation, NError> {
    if n.value() > bound {
        return Err(NError::Bound(n.value(), bound));
    }
    subst_derivation(d, var, n)
}

fn subst_derivation(d: &NDerivation, var: &NumVar, n: Numeral) -> Result<NDerivation, NError> {
    if d.rule == Rule::FreeVar {
        if let Some(f) = &d.family {
            if f.var == *var {
                return f
                    .instances
                    .get(n.value() as usize - 1)
                    .cloned()
                    .ok_or_else(|| {
                        NError::Shape(format!("family has no instance {n}"))
                    });
            }
        }
    }
    let premisses = d
        .premisses
        .iter()
        .map(|p| subst_derivation(p, var, n))
        .collect::<Result<Vec<_>, _>>()?;
    let family = match &d.family {
        None => None,
        Some(f) => Some(Family {
            var: f.var.clone(),
            bound: f.bound,
            instances: f
                .instances
                .iter()
                .map(|p| subst_derivation(p, var, n))
                .collect::<Result<Vec<_>, _>>()?,
        }),
    };
    Ok(Derivation {
        rule: d.rule,
        conclusion: d.conclusion.subst(var, n),
        premisses,
        family,
        instance: d.instance,
    })
}

/// `A(v')`: replaces free occurrences of `v` by its successor.
pub fn shift_succ(f: &NFormula, v: &NumVar) -> NFormula {
    fn bump(t: &NumTerm, v: &NumVar) -> NumTerm {
        match t {
            NumTerm::Lit(_) => t.clone(),
            NumTerm::Var(w) => {
                if w == v {
                    NumTerm::succ(t.clone())
                } else {
                    t.clone()
                }
            }
            NumTerm::Succ(inner) => NumTerm::succ(bump(inner, v)),
            NumTerm::Plus(a, b) => NumTerm::plus(bump(a, v), bump(b, v)),
        }
    }
    match f {
        Formula::Prime(p) => Formula::Prime(PrimeFormula {
            pred: p.pred,
            lhs: bump(&p.lhs, v),
            rhs: bump(&p.rhs, v),
        }),
        Formula::Meet(parts) => Formula::Meet(parts.iter().map(|x| shift_succ(x, v)).collect()),
        Formula::Neg(b) => Formula::neg(shift_succ(b, v)),
        Formula::Omega { var, body } => {
            if var == v {
                f.clone()
            } else {
                Formula::omega(var.clone(), shift_succ(body, v))
            }
        }
    }
}

/// Double negation for a closed prime: a weakened true leaf, or the
/// refuting leaf under negation introduction then negation on the left.
pub fn derive_dne_prime(p: &PrimeFormula) -> Result<NDerivation, NError> {
    if !p.is_closed() {
        return Err(NError::Open);
    }
    // the prime case of the induction never consults the bound
    Ok(transform::derive_dne(&NBase, 1, &Formula::prime(p.clone()))?)
}

/// Double negation `~~A |- A` for a closed formula, by formula induction.
pub fn derive_dne_n(t: &NFormula, bound: u32) -> Result<NDerivation, NError> {
    if !t.is_closed() {
        return Err(NError::Open);
    }
    Ok(transform::derive_dne(&NBase, bound, t)?)
}

/// Complete induction: from a schema `A` over variable `v` and a
/// derivation `d` of `A(v) |- A(v')`, the family `A(1) |- A(m)` for
/// `m <= bound` assembled under the free-variable rule.  Each member is
/// built by cutting in one specialization of `d`.
pub fn derive_induction(
    a: &NFormula,
    v: &NumVar,
    d: &NDerivation,
    bound: u32,
) -> Result<NDerivation, NError> {
    if bound == 0 {
        return Err(NError::Cap("bound must be at least 1".into()));
    }
    let fv = a.free_vars();
    if !fv.is_empty() && fv != BTreeSet::from([v.clone()]) {
        return Err(NError::Shape(format!(
            "schema must be closed under `{v}`"
        )));
    }
    let want = Sequent::new([a.clone()], Some(shift_succ(a, v)));
    if d.conclusion != want {
        return Err(NError::Shape(format!("step must conclude `{want}`")));
    }
    if fv.is_empty() {
        // constant schema: the conclusion is closed reflexivity
        return Ok(transform::derive_refl(a, bound));
    }
    let one = Numeral::new(1).unwrap();
    let a1 = a.subst(v, one);
    let mut members = vec![transform::derive_refl(&a1, bound)];
    for m in 2..=bound {
        let prev = Numeral::new(m - 1).unwrap();
        let step = specialize(d, v, prev, bound)?;
        let next = cut_n(bound, members.last().unwrap(), &step)?;
        members.push(next);
    }
    let target = Sequent::new([a1], Some(a.clone()));
    for (i, mem) in members.iter().enumerate() {
        let n = Numeral::new(i as u32 + 1).unwrap();
        let want = target.subst(v, n);
        if mem.conclusion != want {
            return Err(NError::Shape(format!(
                "member {n} concludes `{}`, expected `{want}`",
                mem.conclusion
            )));
        }
    }
    Ok(Derivation::with_family(
        Rule::FreeVar,
        target,
        Family {
            var: v.clone(),
            bound,
            instances: members,
        },
    ))
}

// ---------------------------------------------------------------------
// consistency harness

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub bound: u32,
    pub formula_depth: u32,
    pub universe_size: usize,
    pub sequent_count: usize,
    pub derivable: usize,
    pub consistent: bool,
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "bound {}, formula depth {}: universe {} formulas, {} candidate sequents, {} derivable",
            self.bound, self.formula_depth, self.universe_size, self.sequent_count, self.derivable
        )?;
        write!(
            f,
            "empty sequent derivable: {} => {}",
            if self.consistent { "no" } else { "yes" },
            if self.consistent {
                "consistent"
            } else {
                "INCONSISTENT"
            }
        )
    }
}

/// The formula universe swept by the harness: a fixed set of closed primes
/// at depth 1; negations, an omega-meet `(x) 1 < x'` with its negation, a
/// sample meet and all instance subterms at depth 2.
pub fn consistency_universe(bound: u32, formula_depth: u32) -> BTreeSet<NFormula> {
    let tt = Formula::prime(PrimeFormula::eq_of(NumTerm::lit(1), NumTerm::lit(1)));
    let ff = Formula::prime(PrimeFormula::eq_of(NumTerm::lit(1), NumTerm::lit(3)));
    let lt = Formula::prime(PrimeFormula::lt_of(NumTerm::lit(1), NumTerm::lit(2)));
    let mut seed: Vec<NFormula> = vec![tt.clone(), ff.clone(), lt.clone()];
    if formula_depth >= 2 {
        seed.push(Formula::neg(tt.clone()));
        seed.push(Formula::neg(ff.clone()));
        seed.push(Formula::neg(lt));
        let omega = Formula::omega(
            NumVar::new("x"),
            Formula::prime(PrimeFormula::lt_of(
                NumTerm::lit(1),
                NumTerm::succ(NumTerm::var("x")),
            )),
        );
        seed.push(Formula::neg(omega.clone()));
        seed.push(omega);
        seed.push(Formula::meet(vec![ff, tt]));
    }
    let mut universe = BTreeSet::new();
    for t in seed {
        universe.extend(t.subterms(bound));
    }
    universe
}

/// Exhaustive forward sweep confirming the empty sequent is not derivable
/// over the harness universe.
pub fn consistency_check(
    bound: u32,
    formula_depth: u32,
    mode: ExecMode,
) -> Result<ConsistencyReport, NError> {
    consistency_check_with_leaf(bound, formula_depth, mode, &|s| {
        calculus::base_sequent(&NBase, s)
    })
}

/// As [`consistency_check`] with a replaceable leaf oracle; the harness
/// sanity test passes a corrupted oracle and expects the inconsistency to
/// be detected.
pub fn consistency_check_with_leaf(
    bound: u32,
    formula_depth: u32,
    mode: ExecMode,
    leaf_ok: &(dyn Fn(&NSequent) -> bool + Sync),
) -> Result<ConsistencyReport, NError> {
    if !(1..=5).contains(&bound) {
        return Err(NError::Cap(format!("bound {bound} outside 1..=5")));
    }
    if !(1..=2).contains(&formula_depth) {
        return Err(NError::Cap(format!(
            "formula depth {formula_depth} outside 1..=2"
        )));
    }
    let universe = consistency_universe(bound, formula_depth);
    let sequent_count = calculus::sequent_space(&universe).len();
    let derived = calculus::forward_derivable(&NBase, bound, &universe, 64, leaf_ok, mode);
    Ok(ConsistencyReport {
        bound,
        formula_depth,
        universe_size: universe.len(),
        sequent_count,
        derivable: derived.len(),
        consistent: !derived.contains(&Sequent::absurd()),
    })
}

/// Parses the derivation interchange format with number-theoretic
/// sequents.
pub fn nderivation_from_json(text: &str) -> Result<NDerivation, CheckError> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CheckError::Input(e.to_string()))?;
    Derivation::from_json(&v, &|s| parse_nsequent(s).map_err(|e| e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nf(text: &str) -> NFormula {
        parse_nformula(text).unwrap()
    }

    fn ns(text: &str) -> NSequent {
        parse_nsequent(text).unwrap()
    }

    #[test]
    fn eval_prime_examples() {
        assert_eq!(eval_prime(&PrimeFormula::eq_of(
            NumTerm::plus(NumTerm::lit(1), NumTerm::lit(1)),
            NumTerm::lit(2),
        )), Ok(true));
        assert_eq!(
            eval_prime(&PrimeFormula::eq_of(NumTerm::lit(1), NumTerm::lit(3))),
            Ok(false)
        );
        assert_eq!(
            eval_prime(&PrimeFormula::lt_of(NumTerm::lit(1), NumTerm::lit(1))),
            Ok(false)
        );
        assert_eq!(
            eval_prime(&PrimeFormula::lt_of(NumTerm::var("x"), NumTerm::lit(1))),
            Err(NError::Open)
        );
    }

    #[test]
    fn parse_matches_construction() {
        assert_eq!(
            nf("1+1 = 1'"),
            Formula::prime(PrimeFormula::eq_of(
                NumTerm::plus(NumTerm::lit(1), NumTerm::lit(1)),
                NumTerm::lit(2),
            ))
        );
        assert_eq!(
            nf("(x) 1 < x'"),
            Formula::omega(
                NumVar::new("x"),
                Formula::prime(PrimeFormula::lt_of(
                    NumTerm::lit(1),
                    NumTerm::succ(NumTerm::var("x")),
                )),
            )
        );
    }

    #[test]
    fn decimal_sugar_and_strokes_agree() {
        assert_eq!(nf("3 = 3"), nf("1'' = 1''"));
        assert_eq!(nf("3 < 4"), nf("1'' < 1'''"));
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "1+1 = 1'",
            "(1+1)' = 1''",
            "~(1 = 1'') & (x) 1 < x'",
            "(x) (1 < x' & ~(x = 1+x))",
            "x < x'",
        ] {
            let t = nf(text);
            let printed = crate::parse::print_formula(&t);
            assert_eq!(nf(&printed), t, "round trip of `{text}` via `{printed}`");
        }
    }

    #[test]
    fn parenthesized_term_not_mistaken_for_quantifier() {
        assert_eq!(nf("(x) < 1"), nf("x < 1"));
        assert_eq!(nf("(x)' = 1"), nf("x' = 1"));
    }

    #[test]
    fn base_holds_examples() {
        assert_eq!(base_holds(&ns("1=1 |- 1=1")), Ok(true));
        assert_eq!(base_holds(&ns("1=1'' |- 1<1")), Ok(true));
        assert_eq!(base_holds(&ns("1=1 |- 1<1")), Ok(false));
        assert_eq!(base_holds(&ns("|-")), Ok(false));
        assert!(base_holds(&ns("~(1=1) |- 1=1")).is_err());
    }

    #[test]
    fn decide_covers_projection_and_instantiation() {
        assert_eq!(decide_n(&ns("1=1 & 1<1' |- 1<1'"), 2), Ok(true));
        assert_eq!(decide_n(&ns("(x) 1 < x' |- 1 < 1''"), 2), Ok(true));
        assert_eq!(decide_n(&ns("|- (x) 1 < x'"), 3), Ok(true));
        assert_eq!(decide_n(&ns("|-"), 4), Ok(false));
        assert_eq!(decide_n(&ns("x < x' |-"), 2), Err(NError::Open));
    }

    #[test]
    fn conservativity_over_primes() {
        for text in ["1=1 |- 1<1", "1=1'' |- 1<1", "1<1' |- 1=1'", "|- 1+1 = 2"] {
            let s = ns(text);
            for b in 1..=3 {
                assert_eq!(decide_n(&s, b), base_holds(&s), "{text} at bound {b}");
            }
        }
    }

    #[test]
    fn dne_prime_true_shape() {
        let d = derive_dne_prime(&PrimeFormula::eq_of(NumTerm::lit(1), NumTerm::lit(1))).unwrap();
        check_nderivation(3, &d).unwrap();
        assert_eq!(d.conclusion, ns("~~(1=1) |- 1=1"));
        assert_eq!(d.rule, Rule::Weaken);
        assert_eq!(d.premisses[0].rule, Rule::Base);
        assert_eq!(d.premisses[0].conclusion, ns("|- 1=1"));
    }

    #[test]
    fn dne_prime_false_shape() {
        let d = derive_dne_prime(&PrimeFormula::eq_of(NumTerm::lit(1), NumTerm::lit(3))).unwrap();
        check_nderivation(3, &d).unwrap();
        assert_eq!(d.conclusion, ns("~~(1=1'') |- 1=1''"));
        assert_eq!(d.rule, Rule::NegLeft);
        assert_eq!(d.premisses[0].rule, Rule::NegIntro);
        assert_eq!(d.premisses[0].premisses[0].conclusion, ns("1=1'' |-"));
    }

    #[test]
    fn dne_compound_checks() {
        let bound = 3;
        for text in ["1=1 & 1=1''", "(x) 1 < x'", "~(1 = 1'')"] {
            let t = nf(text);
            let d = derive_dne_n(&t, bound).unwrap();
            check_nderivation(bound, &d).unwrap();
            assert_eq!(
                d.conclusion,
                Sequent::new([Formula::neg(Formula::neg(t.clone()))], Some(t))
            );
        }
    }

    fn induction_step(bound: u32) -> (NFormula, NumVar, NDerivation) {
        // A(x) = 1 < x'
        let v = NumVar::new("x");
        let a = nf("1 < x'");
        let concl = Sequent::new([a.clone()], Some(shift_succ(&a, &v)));
        let instances = (1..=bound)
            .map(|m| {
                let m = Numeral::new(m).unwrap();
                let goal = concl.subst(&v, m);
                prove_n(&goal, bound).unwrap().unwrap()
            })
            .collect();
        let d = Derivation::with_family(
            Rule::FreeVar,
            concl,
            Family {
                var: v.clone(),
                bound,
                instances,
            },
        );
        (a, v, d)
    }

    #[test]
    fn induction_on_strict_bound() {
        let bound = 4;
        let (a, v, d) = induction_step(bound);
        check_nderivation(bound, &d).unwrap();
        let out = derive_induction(&a, &v, &d, bound).unwrap();
        check_nderivation(bound, &out).unwrap();
        assert_eq!(out.rule, Rule::FreeVar);
        assert_eq!(out.conclusion, ns("1 < 1' |- 1 < x'"));
    }

    #[test]
    fn specialize_projects_free_var_families() {
        let bound = 3;
        let (a, v, d) = induction_step(bound);
        let out = derive_induction(&a, &v, &d, bound).unwrap();
        let two = Numeral::new(2).unwrap();
        let inst = specialize(&out, &v, two, bound).unwrap();
        assert_eq!(inst, out.family.as_ref().unwrap().instances[1]);
        check_nderivation(bound, &inst).unwrap();
        assert_eq!(
            specialize(&out, &v, Numeral::new(4).unwrap(), bound),
            Err(NError::Bound(4, 3))
        );
    }

    #[test]
    fn induction_constant_schema() {
        let v = NumVar::new("x");
        let a = nf("1 = 1");
        let d = prove_n(&ns("1=1 |- 1=1"), 2).unwrap().unwrap();
        let out = derive_induction(&a, &v, &d, 2).unwrap();
        check_nderivation(2, &out).unwrap();
        assert_eq!(out.conclusion, ns("1=1 |- 1=1"));
    }

    #[test]
    fn consistency_small() {
        let r = consistency_check(2, 1, ExecMode::Sequential).unwrap();
        assert!(r.consistent);
        assert!(r.derivable > 0);
        assert!(consistency_check(6, 1, ExecMode::Sequential).is_err());
    }

    #[test]
    fn corrupted_oracle_detected() {
        let leaf = |s: &NSequent| {
            calculus::base_sequent(&NBase, s) || *s == Sequent::absurd()
        };
        let r = consistency_check_with_leaf(2, 1, ExecMode::Sequential, &leaf).unwrap();
        assert!(!r.consistent);
    }

    #[test]
    fn json_round_trip_with_free_variable_family() {
        let bound = 2;
        let (a, v, d) = induction_step(bound);
        let out = derive_induction(&a, &v, &d, bound).unwrap();
        let text = out.to_json_string();
        let back = nderivation_from_json(&text).unwrap();
        assert_eq!(back, out);
        check_nderivation(bound, &back).unwrap();
    }
}
