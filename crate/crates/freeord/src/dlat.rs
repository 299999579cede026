//! The free distributive lattice over a preordered set, presented as a
//! multi-conclusion entailment relation between generator sets and
//! decided through clause normal forms.

use std::collections::BTreeSet;

use crate::parse::{Lexer, ParseError, Tok};
use crate::preorder::{Preorder, PreorderError};

/// Lattice term over generators: meets and joins, no negation, no omega.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DlTerm {
    Gen(String),
    Meet(Vec<DlTerm>),
    Join(Vec<DlTerm>),
}

impl DlTerm {
    pub fn gen(name: impl Into<String>) -> DlTerm {
        DlTerm::Gen(name.into())
    }

    pub fn meet(mut parts: Vec<DlTerm>) -> DlTerm {
        assert!(!parts.is_empty());
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            DlTerm::Meet(parts)
        }
    }

    pub fn join(mut parts: Vec<DlTerm>) -> DlTerm {
        assert!(!parts.is_empty());
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            DlTerm::Join(parts)
        }
    }

    pub fn generators(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            DlTerm::Gen(g) => {
                out.insert(g.clone());
            }
            DlTerm::Meet(parts) | DlTerm::Join(parts) => {
                parts.iter().for_each(|t| t.collect(out))
            }
        }
    }

    fn eval(&self, val: &dyn Fn(&str) -> bool) -> bool {
        match self {
            DlTerm::Gen(g) => val(g),
            DlTerm::Meet(parts) => parts.iter().all(|t| t.eval(val)),
            DlTerm::Join(parts) => parts.iter().any(|t| t.eval(val)),
        }
    }
}

/// A multi-conclusion entailment `A |- B`: conjunctive reading on the
/// left, disjunctive on the right; both sides may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entailment {
    pub left: BTreeSet<String>,
    pub right: BTreeSet<String>,
}

impl Entailment {
    pub fn new(
        left: impl IntoIterator<Item = String>,
        right: impl IntoIterator<Item = String>,
    ) -> Entailment {
        Entailment {
            left: left.into_iter().collect(),
            right: right.into_iter().collect(),
        }
    }
}

/// Decides the least entailment relation containing the preorder: some
/// left generator lies below some right generator, or a left generator is
/// absurd, or a right generator is top.
pub fn decide_ent(p: &Preorder, e: &Entailment) -> Result<bool, PreorderError> {
    for g in e.left.iter().chain(e.right.iter()) {
        if !p.is_declared(g) {
            return Err(PreorderError::Undeclared(g.clone()));
        }
    }
    Ok(e.left
        .iter()
        .any(|a| e.right.iter().any(|b| p.holds(a, b)) || p.is_absurd(a))
        || e.right.iter().any(|b| p.is_top(b)))
}

type Clause = BTreeSet<String>;

/// Disjunctive normal form: a set of meet-clauses, absorption applied.
fn dnf(t: &DlTerm) -> BTreeSet<Clause> {
    let clauses = match t {
        DlTerm::Gen(g) => BTreeSet::from([BTreeSet::from([g.clone()])]),
        DlTerm::Join(parts) => parts.iter().flat_map(dnf).collect(),
        DlTerm::Meet(parts) => {
            let mut acc: BTreeSet<Clause> = BTreeSet::from([BTreeSet::new()]);
            for part in parts {
                let mut next = BTreeSet::new();
                for c in &acc {
                    for d in dnf(part) {
                        let mut merged = c.clone();
                        merged.extend(d);
                        next.insert(merged);
                    }
                }
                acc = next;
            }
            acc
        }
    };
    absorb(clauses)
}

/// Conjunctive normal form: a set of join-clauses.
fn cnf(t: &DlTerm) -> BTreeSet<Clause> {
    let clauses = match t {
        DlTerm::Gen(g) => BTreeSet::from([BTreeSet::from([g.clone()])]),
        DlTerm::Meet(parts) => parts.iter().flat_map(cnf).collect(),
        DlTerm::Join(parts) => {
            let mut acc: BTreeSet<Clause> = BTreeSet::from([BTreeSet::new()]);
            for part in parts {
                let mut next = BTreeSet::new();
                for c in &acc {
                    for d in cnf(part) {
                        let mut merged = c.clone();
                        merged.extend(d);
                        next.insert(merged);
                    }
                }
                acc = next;
            }
            acc
        }
    };
    absorb(clauses)
}

/// Drops clauses that are supersets of another clause.
fn absorb(clauses: BTreeSet<Clause>) -> BTreeSet<Clause> {
    clauses
        .iter()
        .filter(|c| !clauses.iter().any(|d| d != *c && d.is_subset(c)))
        .cloned()
        .collect()
}

/// Decides `s <= t` in the free distributive lattice over `p`: every DNF
/// clause of `s` must entail every CNF clause of `t`.
pub fn decide_dl(p: &Preorder, s: &DlTerm, t: &DlTerm) -> Result<bool, PreorderError> {
    for g in s.generators().union(&t.generators()) {
        if !p.is_declared(g) {
            return Err(PreorderError::Undeclared(g.clone()));
        }
    }
    for cs in dnf(s) {
        for ct in cnf(t) {
            if !decide_ent(p, &Entailment::new(cs.clone(), ct))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Independent semantic oracle: `s <= t` holds iff every 0/1 valuation of
/// the generators respecting the preorder satisfies `eval(s) <= eval(t)`.
/// Capped at four generators.
pub fn oracle_dl(p: &Preorder, s: &DlTerm, t: &DlTerm) -> Result<bool, PreorderError> {
    let gens = p.generators();
    if gens.len() > 4 {
        return Err(PreorderError::Undeclared(format!(
            "oracle capped at 4 generators, got {}",
            gens.len()
        )));
    }
    for g in s.generators().union(&t.generators()) {
        if !p.is_declared(g) {
            return Err(PreorderError::Undeclared(g.clone()));
        }
    }
    'val: for mask in 0u32..(1 << gens.len()) {
        let val = |g: &str| -> bool {
            let i = gens.iter().position(|x| x == g).unwrap();
            mask & (1 << i) != 0
        };
        for a in gens {
            if p.is_absurd(a) && val(a) {
                continue 'val;
            }
            if p.is_top(a) && !val(a) {
                continue 'val;
            }
            for b in gens {
                if p.holds(a, b) && val(a) && !val(b) {
                    continue 'val;
                }
            }
        }
        if s.eval(&val) && !t.eval(&val) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Counts elements of the free distributive lattice as equivalence
/// classes of join-of-meet normal forms; brute force, capped at three
/// generators.
pub fn enumerate_free_dl(p: &Preorder) -> Result<usize, PreorderError> {
    let gens = p.generators();
    if gens.len() > 3 {
        return Err(PreorderError::Undeclared(format!(
            "enumeration capped at 3 generators, got {}",
            gens.len()
        )));
    }
    // all nonempty meet clauses over the generators
    let clauses: Vec<DlTerm> = (1u32..(1 << gens.len()))
        .map(|mask| {
            DlTerm::meet(
                gens.iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, g)| DlTerm::gen(g.clone()))
                    .collect(),
            )
        })
        .collect();
    let mut reps: Vec<DlTerm> = Vec::new();
    for mask in 1u64..(1 << clauses.len()) {
        let t = DlTerm::join(
            clauses
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, c)| c.clone())
                .collect(),
        );
        let known = reps.iter().any(|r| {
            decide_dl(p, r, &t).unwrap() && decide_dl(p, &t, r).unwrap()
        });
        if !known {
            reps.push(t);
        }
    }
    Ok(reps.len())
}

/// Parses a lattice term; the core grammar with `|` for join and without
/// negation or omega.  `&` binds tighter than `|`.
pub fn parse_dlterm(text: &str) -> Result<DlTerm, ParseError> {
    let mut lx = Lexer::new(text)?;
    let t = dl_join(&mut lx)?;
    if !lx.at_end() {
        return Err(ParseError {
            offset: lx.offset(),
            msg: "trailing input after lattice term".into(),
        });
    }
    Ok(t)
}

fn dl_join(lx: &mut Lexer) -> Result<DlTerm, ParseError> {
    let mut parts = vec![dl_meet(lx)?];
    while lx.peek() == Some(&Tok::Pipe) {
        lx.next();
        parts.push(dl_meet(lx)?);
    }
    Ok(DlTerm::join(parts))
}

fn dl_meet(lx: &mut Lexer) -> Result<DlTerm, ParseError> {
    let mut parts = vec![dl_atom(lx)?];
    while lx.peek() == Some(&Tok::Amp) {
        lx.next();
        parts.push(dl_atom(lx)?);
    }
    Ok(DlTerm::meet(parts))
}

fn dl_atom(lx: &mut Lexer) -> Result<DlTerm, ParseError> {
    let off = lx.offset();
    match lx.next() {
        Some(Tok::Ident(name)) => Ok(DlTerm::gen(name)),
        Some(Tok::LParen) => {
            let t = dl_join(lx)?;
            lx.expect(Tok::RParen, "`)`")?;
            Ok(t)
        }
        _ => Err(ParseError {
            offset: off,
            msg: "expected generator or `(`".into(),
        }),
    }
}

pub fn print_dlterm(t: &DlTerm) -> String {
    fn go(t: &DlTerm, out: &mut String, in_meet: bool) {
        match t {
            DlTerm::Gen(g) => out.push_str(g),
            DlTerm::Meet(parts) => {
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" & ");
                    }
                    let wrap = matches!(part, DlTerm::Meet(_));
                    if wrap {
                        out.push('(');
                    }
                    go(part, out, true);
                    if wrap {
                        out.push(')');
                    }
                }
            }
            DlTerm::Join(parts) => {
                let wrap = in_meet;
                if wrap {
                    out.push('(');
                }
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    let nested = matches!(part, DlTerm::Join(_));
                    if nested {
                        out.push('(');
                    }
                    go(part, out, false);
                    if nested {
                        out.push(')');
                    }
                }
                if wrap {
                    out.push(')');
                }
            }
        }
    }
    let mut s = String::new();
    go(t, &mut s, false);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(name: &str) -> DlTerm {
        DlTerm::gen(name)
    }

    #[test]
    fn entailment_reflexivity_and_weakening() {
        let p = Preorder::antichain(&["a", "b"]);
        assert!(decide_ent(
            &p,
            &Entailment::new(vec!["a".into()], vec!["a".into(), "b".into()])
        )
        .unwrap());
    }

    #[test]
    fn antichain_refutes() {
        let p = Preorder::antichain(&["a", "b"]);
        assert!(!decide_ent(&p, &Entailment::new(vec!["a".into()], vec!["b".into()])).unwrap());
    }

    #[test]
    fn base_relation_lifts() {
        let p = Preorder::parse("p <= q\nr\n").unwrap();
        assert!(decide_ent(
            &p,
            &Entailment::new(vec!["p".into(), "r".into()], vec!["q".into()])
        )
        .unwrap());
    }

    #[test]
    fn empty_sides() {
        let p = Preorder::parse("x <= .\n. <= t\na\n").unwrap();
        // absurd left generator proves anything, even the empty right
        assert!(decide_ent(&p, &Entailment::new(vec!["x".into()], vec![])).unwrap());
        assert!(decide_ent(&p, &Entailment::new(vec![], vec!["t".into()])).unwrap());
        assert!(!decide_ent(&p, &Entailment::new(vec![], vec!["a".into()])).unwrap());
        assert!(!decide_ent(&p, &Entailment::new(vec![], vec![])).unwrap());
    }

    #[test]
    fn distributivity_inequality() {
        let p = Preorder::antichain(&["a", "b", "c"]);
        let s = DlTerm::meet(vec![DlTerm::join(vec![g("a"), g("b")]), g("c")]);
        let t = DlTerm::join(vec![
            DlTerm::meet(vec![g("a"), g("c")]),
            DlTerm::meet(vec![g("b"), g("c")]),
        ]);
        assert!(decide_dl(&p, &s, &t).unwrap());
        assert!(oracle_dl(&p, &s, &t).unwrap());
        // and the converse, making it an equality
        assert!(decide_dl(&p, &t, &s).unwrap());
    }

    #[test]
    fn meet_below_join() {
        let p = Preorder::antichain(&["a", "b"]);
        let s = DlTerm::meet(vec![g("a"), g("b")]);
        let t = DlTerm::join(vec![g("a"), g("b")]);
        assert!(decide_dl(&p, &s, &t).unwrap());
    }

    #[test]
    fn join_not_below_meet_on_antichain() {
        let p = Preorder::antichain(&["a", "b"]);
        let s = DlTerm::join(vec![g("a"), g("b")]);
        let t = DlTerm::meet(vec![g("a"), g("b")]);
        assert!(!decide_dl(&p, &s, &t).unwrap());
        assert!(!oracle_dl(&p, &s, &t).unwrap());
    }

    /// Cut for the entailment relation, exhaustive over 4 generators.
    #[test]
    fn entailment_cut() {
        let p = Preorder::parse("p <= q\nr <= s\n").unwrap();
        let gens = p.generators().to_vec();
        let subsets: Vec<BTreeSet<String>> = (0u32..16)
            .map(|mask| {
                gens.iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, g)| g.clone())
                    .collect()
            })
            .collect();
        for a in &subsets {
            for b in &subsets {
                for a2 in &subsets {
                    for b2 in &subsets {
                        for c in &gens {
                            let mut bc = b.clone();
                            bc.insert(c.clone());
                            let mut ca2 = a2.clone();
                            ca2.insert(c.clone());
                            let left =
                                decide_ent(&p, &Entailment::new(a.clone(), bc)).unwrap();
                            let right =
                                decide_ent(&p, &Entailment::new(ca2, b2.clone())).unwrap();
                            if left && right {
                                let mut aa = a.clone();
                                aa.extend(a2.iter().cloned());
                                let mut bb = b.clone();
                                bb.extend(b2.iter().cloned());
                                assert!(
                                    decide_ent(&p, &Entailment::new(aa, bb)).unwrap(),
                                    "cut failed"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn parse_and_print_round_trip() {
        let t = parse_dlterm("(a | b) & c").unwrap();
        assert_eq!(
            t,
            DlTerm::meet(vec![DlTerm::join(vec![g("a"), g("b")]), g("c")])
        );
        assert_eq!(parse_dlterm(&print_dlterm(&t)).unwrap(), t);
    }

    #[test]
    fn enumerate_small_free_dl() {
        // free distributive lattice (no bounds) on 1 and 2 generators
        assert_eq!(enumerate_free_dl(&Preorder::antichain(&["a"])).unwrap(), 1);
        assert_eq!(
            enumerate_free_dl(&Preorder::antichain(&["a", "b"])).unwrap(),
            4
        );
        // chain collapses to the 2-element case
        assert_eq!(
            enumerate_free_dl(&Preorder::parse("p <= q\n").unwrap()).unwrap(),
            2
        );
    }
}
