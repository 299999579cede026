//! The order-algebraic calculus over a preordered generator set: base
//! system, derivation checking, decision and proof search, and the
//! forward brute-force oracle.  Derivability at bound `B` presents the
//! free pseudocomplemented omega-complete semilattice over the preorder
//! in bounded semantics.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::calculus::{self, BaseSystem, Engine};
use crate::derivation::{CheckError, Derivation};
use crate::preorder::{Preorder, PreorderError};
use crate::sequent::Sequent;
use crate::term::{Formula, PrimeAtom, Term};

/// Base relations read off a preorder closure.  A prime is looked up by
/// its full symbol (so `a(3)` can be declared directly); a prime whose
/// full symbol is undeclared but whose family name is declared is a
/// well-formed family member related to others only by reflexivity.
#[derive(Debug, Clone, Copy)]
pub struct KBase<'a> {
    preorder: &'a Preorder,
}

impl<'a> KBase<'a> {
    pub fn new(preorder: &'a Preorder) -> KBase<'a> {
        KBase { preorder }
    }

    pub fn declared(&self, p: &PrimeAtom) -> bool {
        self.preorder.is_declared(&p.symbol()) || self.preorder.is_declared(p.base_name())
    }
}

impl BaseSystem for KBase<'_> {
    type P = PrimeAtom;

    fn entails(&self, a: &PrimeAtom, b: &PrimeAtom) -> bool {
        a == b || self.preorder.holds(&a.symbol(), &b.symbol())
    }

    fn is_true(&self, b: &PrimeAtom) -> bool {
        self.preorder.is_top(&b.symbol())
    }

    fn is_false(&self, a: &PrimeAtom) -> bool {
        self.preorder.is_absurd(&a.symbol())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PscError {
    #[error(transparent)]
    Preorder(#[from] PreorderError),
    #[error("input has free numeral variables")]
    OpenSequent,
    #[error("universe too large: {0}")]
    Cap(String),
}

fn validate_sequent(p: &Preorder, s: &Sequent<PrimeAtom>, bound: u32) -> Result<(), PscError> {
    if !s.is_closed() {
        return Err(PscError::OpenSequent);
    }
    let base = KBase::new(p);
    // all primes reached through closed subterms are themselves closed
    for t in s.subterms(bound) {
        if let Formula::Prime(atom) = t {
            if !base.declared(&atom) {
                return Err(PreorderError::Undeclared(atom.symbol()).into());
            }
        }
    }
    Ok(())
}

/// Checks a derivation against the rule templates at bound `bound`.
pub fn check_derivation(
    p: &Preorder,
    bound: u32,
    d: &Derivation<PrimeAtom>,
) -> Result<(), CheckError> {
    calculus::check(&KBase::new(p), bound, d)
}

/// A reusable search engine whose memo table persists across queries.
pub type Prover<'a> = Engine<KBase<'a>>;

pub fn prover(p: &Preorder, bound: u32) -> Prover<'_> {
    Engine::new(KBase::new(p), bound)
}

/// Whether `s` is derivable at bound `bound`.
pub fn decide_psc(p: &Preorder, s: &Sequent<PrimeAtom>, bound: u32) -> Result<bool, PscError> {
    validate_sequent(p, s, bound)?;
    Ok(prover(p, bound).decide(s))
}

/// A checkable derivation of `s`, exactly when [`decide_psc`] holds.
pub fn prove_psc(
    p: &Preorder,
    s: &Sequent<PrimeAtom>,
    bound: u32,
) -> Result<Option<Derivation<PrimeAtom>>, PscError> {
    validate_sequent(p, s, bound)?;
    Ok(prover(p, bound).prove(s))
}

/// All sequents over the universe derivable by a tree of depth at most
/// `depth`.  The universe must be closed under subterms at `bound` and
/// small; an independent forward oracle for the backward search.
pub fn brute_force_derivations(
    p: &Preorder,
    universe: &BTreeSet<Term>,
    depth: usize,
    bound: u32,
) -> Result<BTreeSet<Sequent<PrimeAtom>>, PscError> {
    if universe.len() > 40 {
        return Err(PscError::Cap(format!("{} terms", universe.len())));
    }
    for t in universe {
        for sub in t.subterms(bound) {
            if !universe.contains(&sub) {
                return Err(PscError::Cap(format!(
                    "universe not subterm-closed at `{}`",
                    crate::parse::print_formula(&sub)
                )));
            }
        }
    }
    let base = KBase::new(p);
    let leaf = |s: &Sequent<PrimeAtom>| calculus::base_sequent(&base, s);
    Ok(calculus::forward_derivable(
        &base,
        bound,
        universe,
        depth,
        &leaf,
        crate::exec::ExecMode::Sequential,
    ))
}

/// Parses the derivation interchange format with core-language sequents.
pub fn derivation_from_json(text: &str) -> Result<Derivation<PrimeAtom>, CheckError> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CheckError::Input(e.to_string()))?;
    Derivation::from_json(&v, &|s| {
        crate::parse::parse_sequent(s).map_err(|e| e.to_string())
    })
}
