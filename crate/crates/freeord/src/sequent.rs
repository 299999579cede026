//! Sequents: a finite set of antecedent factors and an optional succedent.
//!
//! Antecedents are kept as sets, so the structural rules (contraction,
//! exchange, associativity) are identities of the representation.  Meets
//! are flattened into their factors on insertion; an element `a & b` on
//! the left is the same sequent as the two factors `a, b`.

use std::collections::BTreeSet;
use std::fmt;

use crate::term::{Formula, NumVar, Numeral, PrimeTerm};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent<P: PrimeTerm> {
    ante: BTreeSet<Formula<P>>,
    succ: Option<Formula<P>>,
}

impl<P: PrimeTerm> Sequent<P> {
    pub fn new(
        ante: impl IntoIterator<Item = Formula<P>>,
        succ: Option<Formula<P>>,
    ) -> Sequent<P> {
        let mut set = BTreeSet::new();
        for t in ante {
            t.factors().into_iter().for_each(|f| {
                set.insert(f);
            });
        }
        Sequent { ante: set, succ }
    }

    /// The absurd sequent `|-`.
    pub fn absurd() -> Sequent<P> {
        Sequent {
            ante: BTreeSet::new(),
            succ: None,
        }
    }

    pub fn ante(&self) -> &BTreeSet<Formula<P>> {
        &self.ante
    }

    pub fn succ(&self) -> Option<&Formula<P>> {
        self.succ.as_ref()
    }

    pub fn with_added(&self, extra: impl IntoIterator<Item = Formula<P>>) -> Sequent<P> {
        let mut s = self.clone();
        for t in extra {
            t.factors().into_iter().for_each(|f| {
                s.ante.insert(f);
            });
        }
        s
    }

    pub fn without(&self, t: &Formula<P>) -> Sequent<P> {
        let mut s = self.clone();
        s.ante.remove(t);
        s
    }

    pub fn with_succ(&self, succ: Option<Formula<P>>) -> Sequent<P> {
        Sequent {
            ante: self.ante.clone(),
            succ,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<NumVar> {
        let mut out = BTreeSet::new();
        for t in &self.ante {
            out.extend(t.free_vars());
        }
        if let Some(s) = &self.succ {
            out.extend(s.free_vars());
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn subst(&self, var: &NumVar, n: Numeral) -> Sequent<P> {
        Sequent::new(
            self.ante.iter().map(|t| t.subst(var, n)),
            self.succ.as_ref().map(|t| t.subst(var, n)),
        )
    }

    /// All subterms of both sides at the given omega bound.
    pub fn subterms(&self, bound: u32) -> BTreeSet<Formula<P>> {
        let mut out = BTreeSet::new();
        for t in &self.ante {
            out.extend(t.subterms(bound));
        }
        if let Some(s) = &self.succ {
            out.extend(s.subterms(bound));
        }
        out
    }
}

impl<P: PrimeTerm> fmt::Display for Sequent<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.ante {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}", crate::parse::print_formula(t))?;
        }
        if !first {
            f.write_str(" ")?;
        }
        f.write_str("|-")?;
        if let Some(s) = &self.succ {
            write!(f, " {}", crate::parse::print_formula(s))?;
        }
        Ok(())
    }
}
