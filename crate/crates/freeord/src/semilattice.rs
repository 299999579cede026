//! The free meet-semilattice over a preordered set, presented as a
//! single-conclusion entailment relation between generator meets.

use std::collections::BTreeSet;

use crate::preorder::{Preorder, PreorderError};

/// A query `a1 & … & an <= b1 & … & bm` between nonempty generator meets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlQuery {
    pub left: BTreeSet<String>,
    pub right: BTreeSet<String>,
}

impl SlQuery {
    pub fn new(
        left: impl IntoIterator<Item = String>,
        right: impl IntoIterator<Item = String>,
    ) -> SlQuery {
        SlQuery {
            left: left.into_iter().collect(),
            right: right.into_iter().collect(),
        }
    }
}

fn validate(p: &Preorder, gens: &BTreeSet<String>) -> Result<(), PreorderError> {
    for g in gens {
        if !p.is_declared(g) {
            return Err(PreorderError::Undeclared(g.clone()));
        }
    }
    Ok(())
}

/// Decides the free-semilattice order: the left meet lies below the right
/// meet iff every right conjunct is above some left conjunct.  Right-hand
/// meets decompose conjunct-wise by the universal property.
pub fn decide_sl(p: &Preorder, q: &SlQuery) -> Result<bool, PreorderError> {
    if q.left.is_empty() || q.right.is_empty() {
        return Err(PreorderError::Undeclared("(empty side)".into()));
    }
    validate(p, &q.left)?;
    validate(p, &q.right)?;
    Ok(q.right
        .iter()
        .all(|b| q.left.iter().any(|a| p.holds(a, b))))
}

/// Counts the elements of the free semilattice: equivalence classes of
/// nonempty generator meets under mutual [`decide_sl`].  Capped at five
/// generators.
pub fn enumerate_free_sl(p: &Preorder) -> Result<usize, PreorderError> {
    let gens = p.generators();
    if gens.len() > 5 {
        return Err(PreorderError::Undeclared(format!(
            "enumeration capped at 5 generators, got {}",
            gens.len()
        )));
    }
    let mut classes: Vec<BTreeSet<String>> = Vec::new();
    // all nonempty subsets
    for mask in 1u32..(1 << gens.len()) {
        let subset: BTreeSet<String> = gens
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, g)| g.clone())
            .collect();
        let equivalent = classes.iter().any(|rep| {
            decide_sl(p, &SlQuery::new(rep.clone(), subset.clone())).unwrap()
                && decide_sl(p, &SlQuery::new(subset.clone(), rep.clone())).unwrap()
        });
        if !equivalent {
            classes.push(subset);
        }
    }
    Ok(classes.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(left: &[&str], right: &[&str]) -> SlQuery {
        SlQuery::new(
            left.iter().map(|s| s.to_string()),
            right.iter().map(|s| s.to_string()),
        )
    }

    /// Oracle: decide by enumerating all monotone 0/1 valuations of the
    /// generators that respect the preorder; the query holds iff every
    /// such valuation sends the left meet below the right meet.  The
    /// 2-element semilattice is enough to separate free-semilattice
    /// elements.
    fn two_element_oracle(p: &Preorder, query: &SlQuery) -> bool {
        let gens = p.generators();
        let n = gens.len();
        'val: for mask in 0u32..(1 << n) {
            let val = |g: &str| -> bool {
                let i = gens.iter().position(|x| x == g).unwrap();
                mask & (1 << i) != 0
            };
            for a in gens {
                for b in gens {
                    if p.holds(a, b) && val(a) && !val(b) {
                        continue 'val;
                    }
                }
                if p.is_absurd(a) && val(a) {
                    continue 'val;
                }
                if p.is_top(a) && !val(a) {
                    continue 'val;
                }
            }
            let left = query.left.iter().all(|g| val(g));
            let right = query.right.iter().all(|g| val(g));
            if left && !right {
                return false;
            }
        }
        true
    }

    #[test]
    fn meet_below_own_conjunct() {
        let p = Preorder::antichain(&["a", "b"]);
        assert!(decide_sl(&p, &q(&["a", "b"], &["a"])).unwrap());
    }

    #[test]
    fn uses_base_relation() {
        let p = Preorder::parse("p <= q\nr\n").unwrap();
        let query = q(&["p", "r"], &["q", "r"]);
        assert!(decide_sl(&p, &query).unwrap());
        assert!(two_element_oracle(&p, &query));
    }

    #[test]
    fn antichain_counterexample() {
        let p = Preorder::antichain(&["a", "b"]);
        let query = q(&["a"], &["a", "b"]);
        assert!(!decide_sl(&p, &query).unwrap());
        // the 2-element counter-model a -> 1, b -> 0
        assert!(!two_element_oracle(&p, &query));
    }

    #[test]
    fn undeclared_generator_rejected() {
        let p = Preorder::antichain(&["a"]);
        assert!(decide_sl(&p, &q(&["a"], &["zz"])).is_err());
    }

    #[test]
    fn matches_two_element_oracle_exhaustively() {
        let p = Preorder::parse("p <= q\nq <= r\ns\n").unwrap();
        let gens: Vec<&str> = ["p", "q", "r", "s"].to_vec();
        for lmask in 1u32..16 {
            for rmask in 1u32..16 {
                let pick = |mask: u32| -> Vec<&str> {
                    gens.iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, g)| *g)
                        .collect()
                };
                let query = q(&pick(lmask), &pick(rmask));
                assert_eq!(
                    decide_sl(&p, &query).unwrap(),
                    two_element_oracle(&p, &query),
                    "mismatch on {query:?}"
                );
            }
        }
    }

    #[test]
    fn enumerate_antichain_of_three() {
        let p = Preorder::antichain(&["a", "b", "c"]);
        assert_eq!(enumerate_free_sl(&p).unwrap(), 7);
    }

    #[test]
    fn enumerate_chain_of_two() {
        let p = Preorder::parse("p <= q\n").unwrap();
        assert_eq!(enumerate_free_sl(&p).unwrap(), 2);
    }

    #[test]
    fn enumerate_single_generator() {
        let p = Preorder::antichain(&["a"]);
        assert_eq!(enumerate_free_sl(&p).unwrap(), 1);
    }

    #[test]
    fn enumeration_cap() {
        let p = Preorder::antichain(&["a", "b", "c", "d", "e", "f"]);
        assert!(enumerate_free_sl(&p).is_err());
    }

    /// Cut: Γ |- b and {b} ∪ Δ |- c give Γ ∪ Δ |- c, exhaustively over a
    /// 4-generator preorder with singleton right sides.
    #[test]
    fn cut_holds_exhaustively() {
        let p = Preorder::parse("p <= q\nr <= s\n").unwrap();
        let gens = p.generators().to_vec();
        let subsets: Vec<Vec<String>> = (1u32..16)
            .map(|mask| {
                gens.iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, g)| g.clone())
                    .collect()
            })
            .collect();
        for gamma in &subsets {
            for delta in &subsets {
                for b in &gens {
                    for c in &gens {
                        let first =
                            decide_sl(&p, &SlQuery::new(gamma.clone(), vec![b.clone()])).unwrap();
                        let mut bd = delta.clone();
                        bd.push(b.clone());
                        let second = decide_sl(&p, &SlQuery::new(bd, vec![c.clone()])).unwrap();
                        if first && second {
                            let mut gd = gamma.clone();
                            gd.extend(delta.iter().cloned());
                            assert!(
                                decide_sl(&p, &SlQuery::new(gd, vec![c.clone()])).unwrap(),
                                "cut failed"
                            );
                        }
                    }
                }
            }
        }
    }

    /// Conservativity: on generators the semilattice order is the
    /// preorder closure.
    #[test]
    fn conservative_over_generators() {
        let p = Preorder::parse("p <= q\nq <= r\ns\n").unwrap();
        for a in p.generators() {
            for b in p.generators() {
                assert_eq!(
                    decide_sl(&p, &SlQuery::new(vec![a.clone()], vec![b.clone()])).unwrap(),
                    p.holds(a, b)
                );
            }
        }
    }

    /// Operator equivariance: a generator map preserving base relations
    /// preserves entailment.
    #[test]
    fn equivariant_under_relation_preserving_maps() {
        let p = Preorder::parse("p <= q\nr <= s\n").unwrap();
        // x sends p->r, q->s, r->p, s->q; base pairs are preserved
        let x = |g: &str| -> String {
            match g {
                "p" => "r",
                "q" => "s",
                "r" => "p",
                "s" => "q",
                _ => unreachable!(),
            }
            .to_string()
        };
        let gens = p.generators().to_vec();
        let subsets: Vec<Vec<String>> = (1u32..16)
            .map(|mask| {
                gens.iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, g)| g.clone())
                    .collect()
            })
            .collect();
        for left in &subsets {
            for right in &subsets {
                let before = decide_sl(&p, &SlQuery::new(left.clone(), right.clone())).unwrap();
                if before {
                    let mapped = SlQuery::new(
                        left.iter().map(|g| x(g)),
                        right.iter().map(|g| x(g)),
                    );
                    assert!(decide_sl(&p, &mapped).unwrap(), "equivariance failed");
                }
            }
        }
    }
}
