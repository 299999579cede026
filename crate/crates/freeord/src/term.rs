//! Terms of the core language: prime generators, finite meets, negations
//! and numeral-parameterized omega-meets.
//!
//! The connective structure is shared between the order-algebraic calculus
//! (primes are generator symbols) and the number-theoretic calculus
//! (primes are decidable numeric formulas), so `Formula` is generic over
//! the prime type.

use std::collections::BTreeSet;
use std::fmt;

/// A positive integer written in stroke notation: value `n` denotes `1`
/// with `n - 1` successor strokes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Numeral(u32);

impl Numeral {
    pub fn new(value: u32) -> Option<Numeral> {
        if value >= 1 {
            Some(Numeral(value))
        } else {
            None
        }
    }

    pub fn value(self) -> u32 {
        self.0
    }

    /// Stroke rendering, e.g. `1''` for 3.
    pub fn strokes(self) -> String {
        let mut s = String::from("1");
        for _ in 1..self.0 {
            s.push('\'');
        }
        s
    }
}

impl fmt::Display for Numeral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A numeral variable, bound by an omega-meet binder or free in a
/// number-theoretic sequent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NumVar(pub String);

impl NumVar {
    pub fn new(name: impl Into<String>) -> NumVar {
        NumVar(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NumVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Prime payload of a formula.  Substitution replaces a numeral variable
/// by a concrete numeral; `connective_size` must be insensitive to it.
pub trait PrimeTerm: Clone + Ord + std::hash::Hash + fmt::Debug + fmt::Display {
    fn collect_free_vars(&self, out: &mut BTreeSet<NumVar>);
    fn subst_numeral(&self, var: &NumVar, n: Numeral) -> Self;

    /// Concrete syntax of the omega binder: `/\x. …` for the core
    /// language, `(x) …` for the number-theoretic one.
    fn lambda_binder() -> bool {
        true
    }
}

/// Index argument of a generator family, e.g. the `x` in `a(x)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    Var(NumVar),
    Num(Numeral),
}

/// A prime of the core language: a generator symbol, optionally indexed so
/// that omega-meet schemas can mention their binder (`/\x. a(x)`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeAtom {
    pub name: String,
    pub index: Option<Index>,
}

impl PrimeAtom {
    pub fn plain(name: impl Into<String>) -> PrimeAtom {
        PrimeAtom {
            name: name.into(),
            index: None,
        }
    }

    pub fn indexed_var(name: impl Into<String>, var: NumVar) -> PrimeAtom {
        PrimeAtom {
            name: name.into(),
            index: Some(Index::Var(var)),
        }
    }

    pub fn indexed_num(name: impl Into<String>, n: Numeral) -> PrimeAtom {
        PrimeAtom {
            name: name.into(),
            index: Some(Index::Num(n)),
        }
    }

    /// Symbol used for preorder lookup, e.g. `a` or `a(3)`.
    pub fn symbol(&self) -> String {
        self.to_string()
    }

    /// Family name without the index.
    pub fn base_name(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for PrimeAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.index {
            None => f.write_str(&self.name),
            Some(Index::Var(v)) => write!(f, "{}({})", self.name, v),
            Some(Index::Num(n)) => write!(f, "{}({})", self.name, n),
        }
    }
}

impl PrimeTerm for PrimeAtom {
    fn collect_free_vars(&self, out: &mut BTreeSet<NumVar>) {
        if let Some(Index::Var(v)) = &self.index {
            out.insert(v.clone());
        }
    }

    fn subst_numeral(&self, var: &NumVar, n: Numeral) -> Self {
        match &self.index {
            Some(Index::Var(v)) if v == var => PrimeAtom {
                name: self.name.clone(),
                index: Some(Index::Num(n)),
            },
            _ => self.clone(),
        }
    }
}

/// A formula over primes of type `P`: prime, finite meet (list length at
/// least 2), negation, or an omega-meet schema.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula<P: PrimeTerm> {
    Prime(P),
    Meet(Vec<Formula<P>>),
    Neg(Box<Formula<P>>),
    Omega {
        var: NumVar,
        body: Box<Formula<P>>,
    },
}

/// Core-language term: a formula over generator primes.
pub type Term = Formula<PrimeAtom>;

impl<P: PrimeTerm> Formula<P> {
    pub fn prime(p: P) -> Self {
        Formula::Prime(p)
    }

    /// Builds a meet, collapsing the singleton case.
    pub fn meet(mut parts: Vec<Formula<P>>) -> Self {
        assert!(!parts.is_empty(), "meet of zero terms");
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Meet(parts)
        }
    }

    pub fn neg(body: Formula<P>) -> Self {
        Formula::Neg(Box::new(body))
    }

    pub fn omega(var: NumVar, body: Formula<P>) -> Self {
        Formula::Omega {
            var,
            body: Box::new(body),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<NumVar> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<NumVar>) {
        match self {
            Formula::Prime(p) => p.collect_free_vars(out),
            Formula::Meet(parts) => {
                for t in parts {
                    t.collect_free(out);
                }
            }
            Formula::Neg(b) => b.collect_free(out),
            Formula::Omega { var, body } => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Substitutes numeral `n` for free occurrences of `var`.  Inner
    /// binders shadow; the parser renames binders apart, so capture cannot
    /// occur.
    pub fn subst(&self, var: &NumVar, n: Numeral) -> Self {
        match self {
            Formula::Prime(p) => Formula::Prime(p.subst_numeral(var, n)),
            Formula::Meet(parts) => Formula::Meet(parts.iter().map(|t| t.subst(var, n)).collect()),
            Formula::Neg(b) => Formula::neg(b.subst(var, n)),
            Formula::Omega { var: v, body } => {
                if v == var {
                    self.clone()
                } else {
                    Formula::omega(v.clone(), body.subst(var, n))
                }
            }
        }
    }

    /// Instance of an omega-meet body at numeral `n`; panics on non-omega.
    pub fn omega_instance(&self, n: Numeral) -> Formula<P> {
        match self {
            Formula::Omega { var, body } => body.subst(var, n),
            _ => panic!("omega_instance on non-omega term"),
        }
    }

    /// Number of connectives; the contents of a prime do not count, so a
    /// substitution instance never grows this measure.
    pub fn connective_size(&self) -> usize {
        match self {
            Formula::Prime(_) => 1,
            Formula::Meet(parts) => 1 + parts.iter().map(|t| t.connective_size()).sum::<usize>(),
            Formula::Neg(b) => 1 + b.connective_size(),
            Formula::Omega { body, .. } => 1 + body.connective_size(),
        }
    }

    /// Top-level meet factors; nested meets are flattened.  Antecedents of
    /// sequents are sets of factors, so meets never occur there.
    pub fn factors(&self) -> BTreeSet<Formula<P>> {
        let mut out = BTreeSet::new();
        self.push_factors(&mut out);
        out
    }

    fn push_factors(&self, out: &mut BTreeSet<Formula<P>>) {
        match self {
            Formula::Meet(parts) => {
                for t in parts {
                    t.push_factors(out);
                }
            }
            other => {
                out.insert(other.clone());
            }
        }
    }

    /// All subterms, with every omega-meet contributing its instances at
    /// numerals `1..=bound` (and their subterms) in addition to itself.
    pub fn subterms(&self, bound: u32) -> BTreeSet<Formula<P>> {
        let mut out = BTreeSet::new();
        self.push_subterms(bound, &mut out);
        out
    }

    fn push_subterms(&self, bound: u32, out: &mut BTreeSet<Formula<P>>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Formula::Prime(_) => {}
            Formula::Meet(parts) => {
                for t in parts {
                    t.push_subterms(bound, out);
                }
            }
            Formula::Neg(b) => b.push_subterms(bound, out),
            Formula::Omega { .. } => {
                for n in 1..=bound {
                    self.omega_instance(Numeral::new(n).unwrap())
                        .push_subterms(bound, out);
                }
            }
        }
    }

    /// Closed primes occurring anywhere in the term (omega bodies
    /// included, instantiated at 1 so the prime is closed).
    pub fn closed_primes(&self, bound: u32) -> BTreeSet<P> {
        let mut out = BTreeSet::new();
        for t in self.subterms(bound) {
            if let Formula::Prime(p) = t {
                let mut fv = BTreeSet::new();
                p.collect_free_vars(&mut fv);
                if fv.is_empty() {
                    out.insert(p);
                }
            }
        }
        out
    }
}
