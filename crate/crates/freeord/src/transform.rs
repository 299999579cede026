//! Derivation transformations: reflexivity, the three inversions, ex
//! absurdo admissibility, double negation elimination and cut.
//!
//! Cut is a double induction implemented as plain structural recursion:
//! an outer descent on the cut formula and inner descents on the premiss
//! structure of the right (and, for prime cut formulas, the left)
//! derivation.  No ordinal bookkeeping is involved; termination rests on
//! the cut formula strictly shrinking whenever the recursion switches
//! formula, which the implementation verifies at run time and exposes
//! through [`cut_traced`].

use std::collections::BTreeSet;

use thiserror::Error;

use crate::calculus::{base_sequent, BaseSystem};
use crate::derivation::{Derivation, Family, Rule};
use crate::sequent::Sequent;
use crate::term::{Formula, Numeral, PrimeTerm};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("derivation shape: {0}")]
    Shape(String),
    #[error("free-variable nodes are not supported in this transformation")]
    FreeVar,
    #[error("base relation inconsistent at `{0}`")]
    InconsistentBase(String),
    #[error("prime `{0}` has no truth value in this base system")]
    Undecidable(String),
    #[error("cut formula failed to shrink (internal invariant)")]
    Measure,
}

type Res<P> = Result<Derivation<P>, TransformError>;

fn shape<P>(msg: impl Into<String>) -> Result<P, TransformError> {
    Err(TransformError::Shape(msg.into()))
}

/// Builds the canonical derivation of `factors(t) |- t` by formula
/// induction: base leaves for primes, weakenings under a meet
/// introduction for meets, a negation-left then negation-intro pair for
/// negations, and an instance family for omega-meets.
pub fn derive_refl<P: PrimeTerm>(t: &Formula<P>, bound: u32) -> Derivation<P> {
    let concl = Sequent::new([t.clone()], Some(t.clone()));
    match t {
        Formula::Prime(_) => Derivation::leaf(concl),
        Formula::Meet(parts) => {
            let prems = parts
                .iter()
                .map(|part| {
                    derive_refl(part, bound).weaken_to(concl.with_succ(Some(part.clone())))
                })
                .collect();
            Derivation::many(Rule::MeetIntro, concl, prems)
        }
        Formula::Neg(a) => {
            let inner = derive_refl(a, bound);
            let contra = Derivation::one(
                Rule::NegLeft,
                inner.conclusion.with_added([t.clone()]).with_succ(None),
                inner,
            );
            Derivation::one(Rule::NegIntro, concl, contra)
        }
        Formula::Omega { var, .. } => {
            let instances = (1..=bound)
                .map(|n| {
                    let n = Numeral::new(n).unwrap();
                    let inst = t.omega_instance(n);
                    Derivation::omega_left(
                        concl.with_succ(Some(inst.clone())),
                        derive_refl(&inst, bound),
                        n,
                    )
                })
                .collect();
            Derivation::with_family(
                Rule::OmegaIntro,
                concl,
                Family {
                    var: var.clone(),
                    bound,
                    instances,
                },
            )
        }
    }
}

/// From a derivation of `Γ |- A1 & … & Ak`, a derivation of `Γ |- Ai`.
/// Premiss induction: strips a final meet introduction and passes through
/// weakening and the left rules.
pub fn invert_meet<P: PrimeTerm>(d: &Derivation<P>, i: usize) -> Res<P> {
    let Some(Formula::Meet(parts)) = d.conclusion.succ() else {
        return shape("invert_meet needs a meet succedent");
    };
    let Some(part) = parts.get(i).cloned() else {
        return shape(format!("meet has no conjunct {i}"));
    };
    let target = d.conclusion.with_succ(Some(part));
    match d.rule {
        Rule::MeetIntro => Ok(d.premisses[i].clone()),
        Rule::Weaken => Ok(invert_meet(&d.premisses[0], i)?.weaken_to(target)),
        Rule::NegLeft => Ok(Derivation::one(
            Rule::NegLeft,
            target,
            d.premisses[0].clone(),
        )),
        Rule::OmegaLeft => {
            let inner = invert_meet(&d.premisses[0], i)?;
            Ok(Derivation::omega_left(target, inner, d.instance.unwrap()))
        }
        Rule::FreeVar => Err(TransformError::FreeVar),
        _ => shape("no rule of this shape can conclude a meet"),
    }
}

/// From a derivation of `Γ |- ~A`, a derivation of `Γ, A |-`.
pub fn invert_neg<P: PrimeTerm>(d: &Derivation<P>) -> Res<P> {
    let Some(Formula::Neg(a)) = d.conclusion.succ() else {
        return shape("invert_neg needs a negated succedent");
    };
    let a = (**a).clone();
    let target = d.conclusion.with_added([a.clone()]).with_succ(None);
    match d.rule {
        Rule::NegIntro => Ok(d.premisses[0].clone()),
        Rule::Weaken => Ok(invert_neg(&d.premisses[0])?.weaken_to(target)),
        Rule::NegLeft => {
            let prem = &d.premisses[0];
            let widened = prem
                .clone()
                .weaken_to(prem.conclusion.with_added([a.clone()]));
            Ok(Derivation::one(Rule::NegLeft, target, widened))
        }
        Rule::OmegaLeft => {
            let inner = invert_neg(&d.premisses[0])?;
            Ok(Derivation::omega_left(target, inner, d.instance.unwrap()))
        }
        Rule::FreeVar => Err(TransformError::FreeVar),
        _ => shape("no rule of this shape can conclude a negation"),
    }
}

/// From a derivation of `Γ |- /\x. A(x)` and `n <= bound`, a derivation
/// of `Γ |- A(n)`.
pub fn invert_omega<P: PrimeTerm>(d: &Derivation<P>, n: Numeral) -> Res<P> {
    let Some(omega @ Formula::Omega { .. }) = d.conclusion.succ() else {
        return shape("invert_omega needs an omega succedent");
    };
    let inst = omega.omega_instance(n);
    let target = d.conclusion.with_succ(Some(inst));
    match d.rule {
        Rule::OmegaIntro => {
            let f = d.family.as_ref().unwrap();
            f.instances
                .get(n.value() as usize - 1)
                .cloned()
                .ok_or_else(|| {
                    TransformError::Shape(format!("family has no instance {n}"))
                })
        }
        Rule::Weaken => Ok(invert_omega(&d.premisses[0], n)?.weaken_to(target)),
        Rule::NegLeft => Ok(Derivation::one(
            Rule::NegLeft,
            target,
            d.premisses[0].clone(),
        )),
        Rule::OmegaLeft => {
            let inner = invert_omega(&d.premisses[0], n)?;
            Ok(Derivation::omega_left(target, inner, d.instance.unwrap()))
        }
        Rule::FreeVar => Err(TransformError::FreeVar),
        _ => shape("no rule of this shape can conclude an omega-meet"),
    }
}

/// Ex absurdo is admissible: from `Γ |-` build `Γ |- c`.  Premiss
/// induction; at a base leaf `p |-` the succedent is rebuilt by formula
/// induction over an absurd antecedent.
pub fn from_absurd<P: PrimeTerm>(d: &Derivation<P>, c: &Formula<P>, bound: u32) -> Res<P> {
    if d.conclusion.succ().is_some() {
        return shape("from_absurd needs an empty succedent");
    }
    let target = d.conclusion.with_succ(Some(c.clone()));
    match d.rule {
        Rule::Base => Ok(absurd_prime_to(&d.conclusion, c, bound)),
        Rule::Weaken => Ok(from_absurd(&d.premisses[0], c, bound)?.weaken_to(target)),
        Rule::NegLeft => Ok(Derivation::one(
            Rule::NegLeft,
            target,
            d.premisses[0].clone(),
        )),
        Rule::OmegaLeft => {
            let inner = from_absurd(&d.premisses[0], c, bound)?;
            Ok(Derivation::omega_left(target, inner, d.instance.unwrap()))
        }
        Rule::FreeVar => Err(TransformError::FreeVar),
        _ => shape("no rule of this shape can conclude the empty succedent"),
    }
}

/// Formula induction: from the base leaf `p |-` build `p |- c`.
fn absurd_prime_to<P: PrimeTerm>(
    leaf: &Sequent<P>,
    c: &Formula<P>,
    bound: u32,
) -> Derivation<P> {
    let target = leaf.with_succ(Some(c.clone()));
    match c {
        Formula::Prime(_) => Derivation::leaf(target),
        Formula::Meet(parts) => {
            let prems = parts
                .iter()
                .map(|part| absurd_prime_to(leaf, part, bound))
                .collect();
            Derivation::many(Rule::MeetIntro, target, prems)
        }
        Formula::Neg(a) => {
            let widened = leaf.with_added([(**a).clone()]);
            let prem = Derivation::leaf(leaf.clone()).weaken_to(widened);
            Derivation::one(Rule::NegIntro, target, prem)
        }
        Formula::Omega { var, .. } => {
            let instances = (1..=bound)
                .map(|n| {
                    let n = Numeral::new(n).unwrap();
                    absurd_prime_to(leaf, &c.omega_instance(n), bound)
                })
                .collect();
            Derivation::with_family(
                Rule::OmegaIntro,
                target,
                Family {
                    var: var.clone(),
                    bound,
                    instances,
                },
            )
        }
    }
}

/// Retargets a derivation of `Γ |- b` with prime `b` to the succedent
/// `succ`, licensed by a base relation from `b`.  Premiss induction on
/// the left derivation: only base leaves, weakening and the left rules
/// can conclude a prime succedent.
fn retarget_prime<S: BaseSystem>(
    sys: &S,
    d: &Derivation<S::P>,
    succ: Option<Formula<S::P>>,
) -> Res<S::P> {
    let target = d.conclusion.with_succ(succ.clone());
    match d.rule {
        Rule::Base => {
            if base_sequent(sys, &target) {
                Ok(Derivation::leaf(target))
            } else {
                Err(TransformError::InconsistentBase(target.to_string()))
            }
        }
        Rule::Weaken => {
            Ok(retarget_prime(sys, &d.premisses[0], succ)?.weaken_to(target))
        }
        Rule::NegLeft => Ok(Derivation::one(
            Rule::NegLeft,
            target,
            d.premisses[0].clone(),
        )),
        Rule::OmegaLeft => {
            let inner = retarget_prime(sys, &d.premisses[0], succ)?;
            Ok(Derivation::omega_left(target, inner, d.instance.unwrap()))
        }
        Rule::FreeVar => Err(TransformError::FreeVar),
        _ => shape("no rule of this shape can conclude a prime"),
    }
}

/// The endsequent of cutting `b` out: the right antecedent minus the
/// factors of `b`, joined with the left antecedent.
fn cut_target<P: PrimeTerm>(
    left: &Sequent<P>,
    right: &Sequent<P>,
    b: &Formula<P>,
) -> Sequent<P> {
    let mut ante: BTreeSet<Formula<P>> = right.ante().clone();
    for f in b.factors() {
        ante.remove(&f);
    }
    Sequent::new(
        ante.into_iter().chain(left.ante().iter().cloned()),
        right.succ().cloned(),
    )
}

struct CutCtx<'a, S: BaseSystem> {
    sys: &'a S,
    bound: u32,
    /// Connective sizes of the nested cut formulas, outermost first;
    /// strictly decreasing by the induction measure.
    chain: Vec<usize>,
    deepest: Vec<usize>,
}

impl<'a, S: BaseSystem> CutCtx<'a, S> {
    fn enter(&mut self, b: &Formula<S::P>) -> Result<(), TransformError> {
        let sz = b.connective_size();
        if let Some(&last) = self.chain.last() {
            if sz >= last {
                return Err(TransformError::Measure);
            }
        }
        self.chain.push(sz);
        if self.chain.len() > self.deepest.len() {
            self.deepest = self.chain.clone();
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.chain.pop();
    }

    /// Cut with a formula strictly smaller than the current one.
    fn cut_smaller(
        &mut self,
        d1: &Derivation<S::P>,
        d2: &Derivation<S::P>,
        b: &Formula<S::P>,
    ) -> Res<S::P> {
        self.enter(b)?;
        let out = self.cut_on(d1, d2, b);
        self.leave();
        out
    }

    /// d1 concludes `Γ1 |- b`; result concludes
    /// `(ante(d2) \ factors(b)) ∪ Γ1 |- succ(d2)`.
    fn cut_on(
        &mut self,
        d1: &Derivation<S::P>,
        d2: &Derivation<S::P>,
        b: &Formula<S::P>,
    ) -> Res<S::P> {
        debug_assert_eq!(d1.conclusion.succ(), Some(b));
        let target = cut_target(&d1.conclusion, &d2.conclusion, b);

        // a meet cut formula decomposes into conjunct-wise cuts
        if let Formula::Meet(parts) = b {
            let mut e = d2.clone();
            for (i, part) in parts.iter().enumerate() {
                let d1i = invert_meet(d1, i)?;
                e = self.cut_smaller(&d1i, &e, part)?;
            }
            return Ok(e.weaken_to(target));
        }

        // the cut formula is absent on the right: a plain weakening
        if !d2.conclusion.ante().contains(b) {
            return Ok(d2.clone().weaken_to(target));
        }

        match d2.rule {
            Rule::Base => {
                // the right antecedent is the singleton prime b
                Ok(retarget_prime(self.sys, d1, d2.conclusion.succ().cloned())?
                    .weaken_to(target))
            }
            Rule::MeetIntro => {
                let prems = d2
                    .premisses
                    .iter()
                    .map(|p| self.cut_on(d1, p, b))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Derivation::many(Rule::MeetIntro, target, prems))
            }
            Rule::NegIntro => {
                let Some(Formula::Neg(a)) = d2.conclusion.succ() else {
                    return shape("negation introduction without negated succedent");
                };
                let e = self.cut_on(d1, &d2.premisses[0], b)?;
                let want = target.with_added([(**a).clone()]).with_succ(None);
                Ok(Derivation::one(Rule::NegIntro, target, e.weaken_to(want)))
            }
            Rule::OmegaIntro => {
                let f = d2.family.as_ref().unwrap();
                let instances = f
                    .instances
                    .iter()
                    .map(|p| self.cut_on(d1, p, b))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Derivation::with_family(
                    Rule::OmegaIntro,
                    target,
                    Family {
                        var: f.var.clone(),
                        bound: f.bound,
                        instances,
                    },
                ))
            }
            Rule::Weaken => {
                let prem = &d2.premisses[0];
                if prem.conclusion.ante().contains(b) {
                    Ok(self.cut_on(d1, prem, b)?.weaken_to(target))
                } else {
                    Ok(prem.clone().weaken_to(target))
                }
            }
            Rule::NegLeft => {
                let prem = &d2.premisses[0];
                let Some(b0) = prem.conclusion.succ().cloned() else {
                    return shape("negation-left premiss without succedent");
                };
                let neg_b0 = Formula::neg(b0.clone());
                if *b != neg_b0 {
                    // the cut formula sits in the side antecedent
                    let e = self.cut_on(d1, prem, b)?;
                    return Ok(Derivation::one(Rule::NegLeft, target, e));
                }
                // principal case: replace the negation by its refutation
                let e1_target = target.with_succ(Some(b0.clone()));
                let e1 = if prem.conclusion.ante().contains(b) {
                    self.cut_on(d1, prem, b)?.weaken_to(e1_target)
                } else {
                    prem.clone().weaken_to(e1_target)
                };
                let e2 = invert_neg(d1)?;
                let e3 = match target.succ() {
                    None => e2,
                    Some(c) => from_absurd(&e2, c, self.bound)?,
                };
                let e4 = self.cut_smaller(&e1, &e3, &b0)?;
                Ok(e4.weaken_to(target))
            }
            Rule::OmegaLeft => {
                let prem = &d2.premisses[0];
                let n = d2
                    .instance
                    .ok_or_else(|| TransformError::Shape("omega-left without instance".into()))?;
                let principal = principal_omega(&d2.conclusion, &prem.conclusion, n)
                    .ok_or_else(|| {
                        TransformError::Shape("omega-left principal formula not found".into())
                    })?;
                if *b != principal {
                    let inst = principal.omega_instance(n);
                    let e = if prem.conclusion.ante().contains(b) {
                        self.cut_on(d1, prem, b)?
                    } else {
                        prem.clone()
                    };
                    let want = target.with_added([inst]);
                    return Ok(Derivation::omega_left(target, e.weaken_to(want), n));
                }
                // principal case: cut the chosen instance instead
                let e1 = if prem.conclusion.ante().contains(b) {
                    self.cut_on(d1, prem, b)?
                } else {
                    prem.clone()
                };
                let inst = b.omega_instance(n);
                let e2 = invert_omega(d1, n)?;
                let e4 = self.cut_smaller(&e2, &e1, &inst)?;
                Ok(e4.weaken_to(target))
            }
            Rule::FreeVar => {
                // pointwise through the family; the cut pieces are closed
                let f = d2.family.as_ref().unwrap();
                let instances = f
                    .instances
                    .iter()
                    .map(|p| self.cut_on(d1, p, b))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Derivation::with_family(
                    Rule::FreeVar,
                    target,
                    Family {
                        var: f.var.clone(),
                        bound: f.bound,
                        instances,
                    },
                ))
            }
        }
    }
}

/// Which omega antecedent an omega-left node instantiates at `n`.
fn principal_omega<P: PrimeTerm>(
    concl: &Sequent<P>,
    prem: &Sequent<P>,
    n: Numeral,
) -> Option<Formula<P>> {
    concl
        .ante()
        .iter()
        .find(|t| {
            if !matches!(t, Formula::Omega { .. }) {
                return false;
            }
            let inst = t.omega_instance(n);
            let dropped = concl.without(t).with_added([inst.clone()]);
            let kept = concl.with_added([inst]);
            *prem.ante() == *dropped.ante() || *prem.ante() == *kept.ante()
        })
        .cloned()
}

/// Cut: from `d1 : Γ1 |- b` and `d2 : Δ |- C`, a cut-free derivation of
/// `(Δ \ factors(b)) ∪ Γ1 |- C`.
pub fn cut<S: BaseSystem>(
    sys: &S,
    bound: u32,
    d1: &Derivation<S::P>,
    d2: &Derivation<S::P>,
) -> Res<S::P> {
    Ok(cut_traced(sys, bound, d1, d2)?.0)
}

/// As [`cut`], also returning the deepest chain of nested cut-formula
/// sizes encountered; the chain is strictly decreasing, witnessing the
/// induction measure (the engine errors out otherwise).
pub fn cut_traced<S: BaseSystem>(
    sys: &S,
    bound: u32,
    d1: &Derivation<S::P>,
    d2: &Derivation<S::P>,
) -> Result<(Derivation<S::P>, Vec<usize>), TransformError> {
    let Some(b) = d1.conclusion.succ().cloned() else {
        return shape("left cut premiss needs a succedent");
    };
    let mut ctx = CutCtx {
        sys,
        bound,
        chain: Vec::new(),
        deepest: Vec::new(),
    };
    ctx.enter(&b)?;
    let out = ctx.cut_on(d1, d2, &b)?;
    ctx.leave();
    Ok((out.simplify(), ctx.deepest))
}

/// Transitivity as the special case of cut with a singleton right
/// antecedent: from `Γ |- b` and `{b} |- c`, derive `Γ |- c`.
pub fn transitivity<S: BaseSystem>(
    sys: &S,
    bound: u32,
    d1: &Derivation<S::P>,
    d2: &Derivation<S::P>,
) -> Res<S::P> {
    cut(sys, bound, d1, d2)
}

/// Double negation elimination `~~A |- A` by formula induction, available
/// whenever every closed prime has a truth value (the number-theoretic
/// base; an order-algebraic base is generally undecidable here and the
/// sequent is then underivable).
pub fn derive_dne<S: BaseSystem>(sys: &S, bound: u32, t: &Formula<S::P>) -> Res<S::P> {
    let nn = Formula::neg(Formula::neg(t.clone()));
    let goal = Sequent::new([nn.clone()], Some(t.clone()));
    match t {
        Formula::Prime(p) => {
            if sys.is_true(p) {
                let leaf = Derivation::leaf(Sequent::new([], Some(t.clone())));
                Ok(leaf.weaken_to(goal))
            } else if sys.is_false(p) {
                let refute = Derivation::leaf(Sequent::new([t.clone()], None));
                let neg = Derivation::one(
                    Rule::NegIntro,
                    Sequent::new([], Some(Formula::neg(t.clone()))),
                    refute,
                );
                Ok(Derivation::one(Rule::NegLeft, goal, neg))
            } else {
                Err(TransformError::Undecidable(format!("{p}")))
            }
        }
        Formula::Meet(parts) => {
            let prems = parts
                .iter()
                .enumerate()
                .map(|(i, part)| dne_component(sys, bound, t, &nn, part, ComponentAt::Meet(i)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Derivation::many(Rule::MeetIntro, goal, prems))
        }
        Formula::Omega { var, .. } => {
            let instances = (1..=bound)
                .map(|n| {
                    let n = Numeral::new(n).unwrap();
                    let inst = t.omega_instance(n);
                    dne_component(sys, bound, t, &nn, &inst, ComponentAt::Omega(n))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Derivation::with_family(
                Rule::OmegaIntro,
                goal,
                Family {
                    var: var.clone(),
                    bound,
                    instances,
                },
            ))
        }
        Formula::Neg(b) => {
            // triple negation needs no induction hypothesis
            let refl = derive_refl(b, bound);
            let u1 = Derivation::one(
                Rule::NegLeft,
                refl.conclusion.with_added([t.clone()]).with_succ(None),
                refl,
            );
            let nnb = Formula::neg(t.clone()); // ~~b up to the outer negation: ~(~b)
            let u2 = Derivation::one(
                Rule::NegIntro,
                u1.conclusion.without(t).with_succ(Some(nnb.clone())),
                u1,
            );
            let u3 = Derivation::one(
                Rule::NegLeft,
                u2.conclusion.with_added([nn.clone()]).with_succ(None),
                u2,
            );
            Ok(Derivation::one(Rule::NegIntro, goal, u3))
        }
    }
}

enum ComponentAt {
    Meet(usize),
    Omega(Numeral),
}

/// One conjunct of the inductive step: `~~t |- part` from the induction
/// hypothesis `~~part |- part`.
fn dne_component<S: BaseSystem>(
    sys: &S,
    bound: u32,
    t: &Formula<S::P>,
    nn: &Formula<S::P>,
    part: &Formula<S::P>,
    at: ComponentAt,
) -> Res<S::P> {
    let ih = derive_dne(sys, bound, part)?;
    let refl = derive_refl(t, bound);
    let proj = match at {
        ComponentAt::Meet(i) => invert_meet(&refl, i)?,
        ComponentAt::Omega(n) => invert_omega(&refl, n)?,
    };
    let neg_part = Formula::neg(part.clone());
    let s1 = Derivation::one(
        Rule::NegLeft,
        proj.conclusion.with_added([neg_part.clone()]).with_succ(None),
        proj,
    );
    let neg_t = Formula::neg(t.clone());
    let s2 = Derivation::one(
        Rule::NegIntro,
        Sequent::new([neg_part.clone()], Some(neg_t.clone())),
        s1,
    );
    let s3 = Derivation::one(
        Rule::NegLeft,
        s2.conclusion.with_added([nn.clone()]).with_succ(None),
        s2,
    );
    let s4 = Derivation::one(
        Rule::NegIntro,
        Sequent::new([nn.clone()], Some(Formula::neg(neg_part))),
        s3,
    );
    cut(sys, bound, &s4, &ih)
}
