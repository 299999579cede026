//! Generic calculus machinery shared by the order-algebraic instance and
//! the number-theoretic instance: the base-relation interface, the
//! derivation checker, memoized backward proof search and a forward
//! brute-force enumerator.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::derivation::{CheckError, Derivation, Family, Rule};
use crate::sequent::Sequent;
use crate::term::{Formula, Numeral, PrimeTerm};

/// Base relations of a calculus instance: when one closed prime entails
/// another, and which closed primes are outright true or false.  The
/// relation is expected to be reflexive, transitive and coherent with the
/// markers (an entailment from a true prime yields a true prime, one into
/// a false prime comes from a false prime); both instances in this crate
/// satisfy that by construction.
pub trait BaseSystem {
    type P: PrimeTerm;

    fn entails(&self, a: &Self::P, b: &Self::P) -> bool;
    fn is_true(&self, b: &Self::P) -> bool;
    fn is_false(&self, a: &Self::P) -> bool;

    /// Whether the free-variable rule is part of the calculus.
    fn allows_free_var(&self) -> bool {
        false
    }
}

/// Composite base entailment including the markers.
pub fn base_holds<S: BaseSystem>(sys: &S, a: &S::P, b: &S::P) -> bool {
    sys.entails(a, b) || sys.is_false(a) || sys.is_true(b)
}

/// Whether a sequent is a base relation: `p |- q`, `|- q`, `p |-`, never
/// the empty sequent.
pub fn base_sequent<S: BaseSystem>(sys: &S, s: &Sequent<S::P>) -> bool {
    if !s.is_closed() {
        return false;
    }
    match (s.ante().len(), s.succ()) {
        (1, Some(Formula::Prime(q))) => match s.ante().iter().next() {
            Some(Formula::Prime(p)) => base_holds(sys, p, q),
            _ => false,
        },
        (0, Some(Formula::Prime(q))) => sys.is_true(q),
        (1, None) => match s.ante().iter().next() {
            Some(Formula::Prime(p)) => sys.is_false(p),
            _ => false,
        },
        _ => false,
    }
}

fn node_err<P: PrimeTerm>(
    path: &str,
    sequent: &Sequent<P>,
    msg: impl Into<String>,
) -> CheckError {
    CheckError::Node {
        path: path.to_string(),
        sequent: sequent.to_string(),
        msg: msg.into(),
    }
}

/// Checks that every node of `d` instantiates its rule template at omega
/// bound `bound`.
pub fn check<S: BaseSystem>(sys: &S, bound: u32, d: &Derivation<S::P>) -> Result<(), CheckError> {
    check_at(sys, bound, d, "root")
}

fn check_at<S: BaseSystem>(
    sys: &S,
    bound: u32,
    d: &Derivation<S::P>,
    path: &str,
) -> Result<(), CheckError> {
    let concl = &d.conclusion;
    let fail = |msg: String| Err(node_err(path, concl, msg));
    let want_premisses = |n: usize| -> Result<(), CheckError> {
        if d.premisses.len() != n {
            return Err(node_err(
                path,
                concl,
                format!("expected {n} premisses, found {}", d.premisses.len()),
            ));
        }
        if d.family.is_some() {
            return Err(node_err(path, concl, "unexpected premiss family"));
        }
        Ok(())
    };
    match d.rule {
        Rule::Base => {
            want_premisses(0)?;
            if !base_sequent(sys, concl) {
                return fail("not a base relation".into());
            }
        }
        Rule::MeetIntro => {
            let Some(Formula::Meet(parts)) = concl.succ() else {
                return fail("meet introduction needs a meet succedent".into());
            };
            want_premisses(parts.len())?;
            for (i, (part, prem)) in parts.iter().zip(&d.premisses).enumerate() {
                let want = concl.with_succ(Some(part.clone()));
                if prem.conclusion != want {
                    return fail(format!("premiss {i} must conclude `{want}`"));
                }
            }
        }
        Rule::NegIntro => {
            want_premisses(1)?;
            let Some(Formula::Neg(a)) = concl.succ() else {
                return fail("negation introduction needs a negated succedent".into());
            };
            let want = concl.with_added([(**a).clone()]).with_succ(None);
            if d.premisses[0].conclusion != want {
                return fail(format!("premiss must conclude `{want}`"));
            }
        }
        Rule::OmegaIntro => {
            if !d.premisses.is_empty() {
                return fail("omega introduction premisses go in the family".into());
            }
            let Some(omega @ Formula::Omega { .. }) = concl.succ() else {
                return fail("omega introduction needs an omega succedent".into());
            };
            let Some(f) = &d.family else {
                return fail("missing premiss family".into());
            };
            if f.bound != bound {
                return fail(format!("family bound {} differs from {bound}", f.bound));
            }
            if f.instances.len() != bound as usize {
                return fail(format!(
                    "family has {} instances, expected {bound}",
                    f.instances.len()
                ));
            }
            for (i, prem) in f.instances.iter().enumerate() {
                let n = Numeral::new(i as u32 + 1).unwrap();
                let want = concl.with_succ(Some(omega.omega_instance(n)));
                if prem.conclusion != want {
                    return fail(format!("instance {n} must conclude `{want}`"));
                }
            }
        }
        Rule::Weaken => {
            want_premisses(1)?;
            let prem = &d.premisses[0].conclusion;
            if prem.succ() != concl.succ() {
                return fail("weakening must preserve the succedent".into());
            }
            if !prem.ante().is_subset(concl.ante()) {
                return fail("weakening premiss antecedent not contained".into());
            }
        }
        Rule::NegLeft => {
            want_premisses(1)?;
            let prem = &d.premisses[0].conclusion;
            let Some(b) = prem.succ() else {
                return fail("negation-left premiss needs a succedent".into());
            };
            let neg_b = Formula::neg(b.clone());
            if !concl.ante().contains(&neg_b) {
                return fail(format!(
                    "conclusion antecedent lacks `{}`",
                    crate::parse::print_formula(&neg_b)
                ));
            }
            let want = prem.with_added([neg_b]).ante().clone();
            if *concl.ante() != want {
                return fail("antecedent must be the premiss antecedent plus the negation".into());
            }
        }
        Rule::OmegaLeft => {
            want_premisses(1)?;
            let prem = &d.premisses[0].conclusion;
            if prem.succ() != concl.succ() {
                return fail("omega-left must preserve the succedent".into());
            }
            let Some(n) = d.instance else {
                return fail("omega-left must record its instance numeral".into());
            };
            if n.value() > bound {
                return fail(format!("instance {n} exceeds bound {bound}"));
            }
            let hit = concl.ante().iter().any(|t| {
                if !matches!(t, Formula::Omega { .. }) {
                    return false;
                }
                let inst = t.omega_instance(n);
                let dropped = concl.without(t).with_added([inst.clone()]);
                let kept = concl.with_added([inst]);
                *prem.ante() == *dropped.ante() || *prem.ante() == *kept.ante()
            });
            if !hit {
                return fail(format!(
                    "no omega antecedent instantiates at {n} to the premiss antecedent"
                ));
            }
        }
        Rule::FreeVar => {
            if !sys.allows_free_var() {
                return fail("free-variable rule not available in this calculus".into());
            }
            if !d.premisses.is_empty() {
                return fail("free-variable premisses go in the family".into());
            }
            let Some(f) = &d.family else {
                return fail("missing premiss family".into());
            };
            let free = concl.free_vars();
            if free.len() != 1 || !free.contains(&f.var) {
                return fail(format!(
                    "conclusion must have exactly the family variable `{}` free",
                    f.var
                ));
            }
            if f.bound != bound {
                return fail(format!("family bound {} differs from {bound}", f.bound));
            }
            if f.instances.len() != bound as usize {
                return fail(format!(
                    "family has {} instances, expected {bound}",
                    f.instances.len()
                ));
            }
            for (i, prem) in f.instances.iter().enumerate() {
                let n = Numeral::new(i as u32 + 1).unwrap();
                let want = concl.subst(&f.var, n);
                if prem.conclusion != want {
                    return fail(format!("instance {n} must conclude `{want}`"));
                }
            }
        }
    }
    for (i, prem) in d.premisses.iter().enumerate() {
        check_at(sys, bound, prem, &format!("{path}.{i}"))?;
    }
    if let Some(f) = &d.family {
        for (i, prem) in f.instances.iter().enumerate() {
            check_at(sys, bound, prem, &format!("{path}.n{}", i + 1))?;
        }
    }
    Ok(())
}

enum Outcome<P: PrimeTerm> {
    Proved(Derivation<P>),
    Failed { dependent: bool },
}

/// Memoized backward proof search.  The memo table persists across
/// queries on the same engine; goals currently on the search stack fail
/// any branch that revisits them (a cyclic branch cannot support a
/// well-founded tree), and failures that depended on such a cycle are not
/// cached because they may succeed in a different context.
pub struct Engine<S: BaseSystem> {
    sys: S,
    bound: u32,
    memo: HashMap<Sequent<S::P>, Option<Derivation<S::P>>>,
    in_progress: HashSet<Sequent<S::P>>,
}

impl<S: BaseSystem> Engine<S> {
    pub fn new(sys: S, bound: u32) -> Engine<S> {
        Engine {
            sys,
            bound,
            memo: HashMap::new(),
            in_progress: HashSet::new(),
        }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn decide(&mut self, goal: &Sequent<S::P>) -> bool {
        matches!(self.search(goal), Outcome::Proved(_))
    }

    pub fn prove(&mut self, goal: &Sequent<S::P>) -> Option<Derivation<S::P>> {
        match self.search(goal) {
            Outcome::Proved(d) => Some(d.simplify()),
            Outcome::Failed { .. } => None,
        }
    }

    /// Number of memoized goals; reported by the consistency harness.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn search(&mut self, goal: &Sequent<S::P>) -> Outcome<S::P> {
        if let Some(hit) = self.memo.get(goal) {
            return match hit {
                Some(d) => Outcome::Proved(d.clone()),
                None => Outcome::Failed { dependent: false },
            };
        }
        if self.in_progress.contains(goal) {
            return Outcome::Failed { dependent: true };
        }
        self.in_progress.insert(goal.clone());
        let mut dependent = false;
        let result = self.attack(goal, &mut dependent);
        self.in_progress.remove(goal);
        match result {
            Some(d) => {
                self.memo.insert(goal.clone(), Some(d.clone()));
                Outcome::Proved(d)
            }
            None => {
                if !dependent {
                    self.memo.insert(goal.clone(), None);
                }
                Outcome::Failed { dependent }
            }
        }
    }

    fn sub(&mut self, goal: &Sequent<S::P>, dependent: &mut bool) -> Option<Derivation<S::P>> {
        match self.search(goal) {
            Outcome::Proved(d) => Some(d),
            Outcome::Failed { dependent: dep } => {
                *dependent |= dep;
                None
            }
        }
    }

    fn attack(&mut self, goal: &Sequent<S::P>, dependent: &mut bool) -> Option<Derivation<S::P>> {
        if let Some(d) = self.base_match(goal) {
            return Some(d);
        }
        // right rules, driven by the succedent shape
        match goal.succ().cloned() {
            Some(Formula::Meet(parts)) => {
                let mut prems = Vec::with_capacity(parts.len());
                let mut all = true;
                for part in &parts {
                    match self.sub(&goal.with_succ(Some(part.clone())), dependent) {
                        Some(d) => prems.push(d),
                        None => {
                            all = false;
                            break;
                        }
                    }
                }
                if all {
                    return Some(Derivation::many(Rule::MeetIntro, goal.clone(), prems));
                }
            }
            Some(Formula::Neg(a)) => {
                let subgoal = goal.with_added([(*a).clone()]).with_succ(None);
                if let Some(d) = self.sub(&subgoal, dependent) {
                    return Some(Derivation::one(Rule::NegIntro, goal.clone(), d));
                }
            }
            Some(omega @ Formula::Omega { .. }) => {
                let Formula::Omega { var, .. } = &omega else {
                    unreachable!()
                };
                let mut prems = Vec::with_capacity(self.bound as usize);
                let mut all = true;
                for n in 1..=self.bound {
                    let n = Numeral::new(n).unwrap();
                    match self.sub(&goal.with_succ(Some(omega.omega_instance(n))), dependent) {
                        Some(d) => prems.push(d),
                        None => {
                            all = false;
                            break;
                        }
                    }
                }
                if all {
                    return Some(Derivation::with_family(
                        Rule::OmegaIntro,
                        goal.clone(),
                        Family {
                            var: var.clone(),
                            bound: self.bound,
                            instances: prems,
                        },
                    ));
                }
            }
            _ => {}
        }
        // left rules, each antecedent in turn
        let ante: Vec<Formula<S::P>> = goal.ante().iter().cloned().collect();
        for t in &ante {
            match t {
                Formula::Neg(b) => {
                    let subgoal = goal.with_succ(Some((**b).clone()));
                    if subgoal == *goal {
                        continue;
                    }
                    if let Some(d) = self.sub(&subgoal, dependent) {
                        // keep the premiss antecedent minimal when the
                        // found proof allows it, so the negation node does
                        // not depend on its own principal formula
                        let slim = goal.without(t);
                        let core = d.peel_weaken();
                        let prem = if core.conclusion.ante().is_subset(slim.ante()) {
                            core.clone()
                                .weaken_to(slim.with_succ(Some((**b).clone())))
                        } else {
                            d
                        };
                        return Some(Derivation::one(Rule::NegLeft, goal.clone(), prem));
                    }
                }
                Formula::Omega { .. } => {
                    for n in 1..=self.bound {
                        let n = Numeral::new(n).unwrap();
                        let subgoal = goal.with_added([t.omega_instance(n)]);
                        if subgoal == *goal {
                            continue;
                        }
                        if let Some(d) = self.sub(&subgoal, dependent) {
                            return Some(Derivation::omega_left(goal.clone(), d, n));
                        }
                    }
                }
                _ => {}
            }
        }
        None
    }

    /// Matches the goal against a base relation, absorbing weakening: any
    /// single antecedent prime related to the succedent suffices.
    fn base_match(&self, goal: &Sequent<S::P>) -> Option<Derivation<S::P>> {
        match goal.succ() {
            Some(Formula::Prime(q)) => {
                if self.sys.is_true(q) {
                    let leaf = Derivation::leaf(Sequent::new(
                        [],
                        Some(Formula::Prime(q.clone())),
                    ));
                    return Some(leaf.weaken_to(goal.clone()));
                }
                for t in goal.ante() {
                    if let Formula::Prime(p) = t {
                        if base_holds(&self.sys, p, q) {
                            let leaf = Derivation::leaf(Sequent::new(
                                [t.clone()],
                                Some(Formula::Prime(q.clone())),
                            ));
                            return Some(leaf.weaken_to(goal.clone()));
                        }
                    }
                }
                None
            }
            None => {
                for t in goal.ante() {
                    if let Formula::Prime(p) = t {
                        if self.sys.is_false(p) {
                            let leaf = Derivation::leaf(Sequent::new([t.clone()], None));
                            return Some(leaf.weaken_to(goal.clone()));
                        }
                    }
                }
                None
            }
            Some(_) => None,
        }
    }
}

/// Forward enumeration: all sequents over the given term universe
/// derivable by a tree of depth at most `depth`.  The universe must be
/// closed under subterms at the bound.  `leaf_ok` decides which sequents
/// count as base leaves; pass [`base_sequent`] for the calculus itself
/// (the consistency harness swaps in deliberately corrupted oracles).
pub fn forward_derivable<S: BaseSystem>(
    sys: &S,
    bound: u32,
    universe: &BTreeSet<Formula<S::P>>,
    depth: usize,
    leaf_ok: &(dyn Fn(&Sequent<S::P>) -> bool + Sync),
    mode: crate::exec::ExecMode,
) -> BTreeSet<Sequent<S::P>>
where
    S::P: Sync + Send,
{
    let _ = sys;
    let candidates = sequent_space(universe);
    let mut derived: BTreeSet<Sequent<S::P>> = BTreeSet::new();
    for _ in 0..depth {
        // index by succedent so the weakening scan only visits peers
        let mut by_succ: HashMap<Option<Formula<S::P>>, Vec<&Sequent<S::P>>> = HashMap::new();
        for s in &derived {
            by_succ.entry(s.succ().cloned()).or_default().push(s);
        }
        let snapshot = &derived;
        let index = &by_succ;
        let hits = mode.map((0..candidates.len()).collect(), |i| {
            let c = &candidates[i];
            !snapshot.contains(c) && (leaf_ok(c) || one_step(bound, c, snapshot, index))
        });
        let mut next = derived.clone();
        for (c, hit) in candidates.iter().zip(hits) {
            if hit {
                next.insert(c.clone());
            }
        }
        if next == derived {
            break;
        }
        derived = next;
    }
    derived
}

/// The full sequent space over a universe: antecedents are subsets of the
/// universe's factor set, succedents range over the universe or absent.
pub fn sequent_space<P: PrimeTerm>(universe: &BTreeSet<Formula<P>>) -> Vec<Sequent<P>> {
    let mut factors: BTreeSet<Formula<P>> = BTreeSet::new();
    for t in universe {
        factors.extend(t.factors());
    }
    let factors: Vec<Formula<P>> = factors.into_iter().collect();
    assert!(
        factors.len() <= 16,
        "sequent space too large: {} factors",
        factors.len()
    );
    let mut succs: Vec<Option<Formula<P>>> = vec![None];
    succs.extend(universe.iter().cloned().map(Some));
    let mut out = Vec::new();
    for mask in 0u32..(1 << factors.len()) {
        let ante: Vec<Formula<P>> = factors
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, t)| t.clone())
            .collect();
        for succ in &succs {
            out.push(Sequent::new(ante.clone(), succ.clone()));
        }
    }
    out
}

/// Whether `c` follows from `derived` by a single rule application.
fn one_step<P: PrimeTerm>(
    bound: u32,
    c: &Sequent<P>,
    derived: &BTreeSet<Sequent<P>>,
    by_succ: &HashMap<Option<Formula<P>>, Vec<&Sequent<P>>>,
) -> bool {
    // weakening
    if by_succ
        .get(&c.succ().cloned())
        .is_some_and(|peers| peers.iter().any(|s| s.ante().is_subset(c.ante()) && *s != c))
    {
        return true;
    }
    // right rules
    match c.succ() {
        Some(Formula::Meet(parts)) => {
            if parts
                .iter()
                .all(|part| derived.contains(&c.with_succ(Some(part.clone()))))
            {
                return true;
            }
        }
        Some(Formula::Neg(a)) => {
            if derived.contains(&c.with_added([(**a).clone()]).with_succ(None)) {
                return true;
            }
        }
        Some(omega @ Formula::Omega { .. }) => {
            if (1..=bound).all(|n| {
                let n = Numeral::new(n).unwrap();
                derived.contains(&c.with_succ(Some(omega.omega_instance(n))))
            }) {
                return true;
            }
        }
        _ => {}
    }
    // left rules
    for t in c.ante() {
        match t {
            Formula::Neg(b) => {
                let with = c.with_succ(Some((**b).clone()));
                let slim = c.without(t).with_succ(Some((**b).clone()));
                if derived.contains(&with) || derived.contains(&slim) {
                    return true;
                }
            }
            Formula::Omega { .. } => {
                for n in 1..=bound {
                    let n = Numeral::new(n).unwrap();
                    let inst = t.omega_instance(n);
                    let kept = c.with_added([inst.clone()]);
                    let dropped = c.without(t).with_added([inst]);
                    if (derived.contains(&kept) && kept != *c) || derived.contains(&dropped) {
                        return true;
                    }
                }
            }
            _ => {}
        }
    }
    false
}
