//! Free ordered structures over a preordered set, presented as cut-free
//! deductive calculi.
//!
//! The crate builds the free meet-semilattice, the free distributive
//! lattice and the free pseudocomplemented omega-complete semilattice over
//! a preordered set of generators.  The last of these is a sequent
//! calculus with an explicit derivation-tree datatype, a checker, a
//! memoized backward proof search and a cut-elimination engine that
//! rewrites derivations.  A number-theoretic instance of the same calculus
//! over evaluated prime formulas gives a desk-scale consistency harness.

pub mod dlat;
pub mod exec;
pub mod models;
pub mod ntheory;
pub mod parse;
pub mod preorder;
pub mod psc;
pub mod semilattice;
pub mod sequent;
pub mod term;
pub mod transform;

mod calculus;
mod derivation;

pub use calculus::{BaseSystem, Engine};
pub use derivation::{CheckError, Derivation, Family, Rule};
pub use preorder::{Preorder, PreorderError};
pub use sequent::Sequent;
pub use term::{Formula, NumVar, Numeral, PrimeAtom, PrimeTerm, Term};
