//! End-to-end acceptance sweep: one test per criterion, each printing a
//! pass line (visible with `--nocapture`).

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use freeord::dlat::{decide_dl, oracle_dl, DlTerm};
use freeord::exec::ExecMode;
use freeord::models::{enumerate_psc, eval_sequent, Assignment, FinitePsc};
use freeord::ntheory::{
    self, check_nderivation, decide_n, derive_dne_n, derive_dne_prime, derive_induction,
    parse_nformula, parse_nsequent, prove_n, NDerivation, NFormula,
};
use freeord::parse::{parse_sequent, parse_term, print_formula};
use freeord::psc::{
    brute_force_derivations, check_derivation, decide_psc, derivation_from_json, prove_psc,
    prover,
};
use freeord::transform::{cut, cut_traced, derive_refl, invert_meet, invert_neg, invert_omega};
use freeord::{Derivation, Formula, NumVar, Numeral, Preorder, PrimeAtom, Rule, Sequent, Term};

fn pass(n: u32, what: &str, elapsed: Duration) {
    println!("acceptance {n} ({what}): pass in {:.1}s", elapsed.as_secs_f64());
}

fn random_preorder(rng: &mut ChaCha8Rng) -> Preorder {
    let names = ["a", "b", "c", "d", "e", "f"];
    let k = rng.gen_range(2..=6);
    let gens: Vec<String> = names[..k].iter().map(|s| s.to_string()).collect();
    let npairs = rng.gen_range(0..=10);
    let pairs: Vec<(String, String)> = (0..npairs)
        .map(|_| {
            (
                gens[rng.gen_range(0..k)].clone(),
                gens[rng.gen_range(0..k)].clone(),
            )
        })
        .collect();
    Preorder::new(gens, pairs, [], []).unwrap()
}

#[test]
fn acceptance_1_conservativity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let p = random_preorder(&mut rng);
        let gens = p.generators().to_vec();
        for x in &gens {
            for y in &gens {
                let s = Sequent::new(
                    [Term::prime(PrimeAtom::plain(x.clone()))],
                    Some(Term::prime(PrimeAtom::plain(y.clone()))),
                );
                assert_eq!(
                    decide_psc(&p, &s, 3).unwrap(),
                    p.holds(x, y),
                    "mismatch at {x} <= {y} in {p:?}"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60));
    pass(1, "conservativity over 200 random preorders", elapsed);
}

/// The shared exhaustive universe: generators `a <= b`, a bare family
/// `c`, terms of depth <= 2, omega bound 2.
fn small_universe() -> (Preorder, Vec<Term>) {
    let p = Preorder::new(
        ["a", "b", "c"].map(String::from),
        [("a".to_string(), "b".to_string())],
        [],
        [],
    )
    .unwrap();
    let seeds = ["a", "b", "a & b", "~a", "~b", "/\\x. c(x)"];
    let mut universe: BTreeSet<Term> = BTreeSet::new();
    for s in seeds {
        universe.extend(parse_term(s).unwrap().subterms(2));
    }
    (p, universe.into_iter().collect())
}

/// Every sequent over the universe's factors, and the derivable ones with
/// their proofs.
#[allow(clippy::type_complexity)]
fn universe_sequents() -> (
    Preorder,
    Vec<Term>,
    Vec<Sequent<PrimeAtom>>,
    Vec<(Sequent<PrimeAtom>, Derivation<PrimeAtom>)>,
) {
    let (p, universe) = small_universe();
    let mut factors: BTreeSet<Term> = BTreeSet::new();
    for t in &universe {
        factors.extend(t.factors());
    }
    let factors: Vec<Term> = factors.into_iter().collect();
    let mut succs: Vec<Option<Term>> = vec![None];
    succs.extend(universe.iter().cloned().map(Some));
    let mut all = Vec::new();
    for mask in 0u32..(1 << factors.len()) {
        let ante: Vec<Term> = factors
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, t)| t.clone())
            .collect();
        for succ in &succs {
            all.push(Sequent::new(ante.clone(), succ.clone()));
        }
    }
    all.sort();
    all.dedup();
    let mut engine = prover(&p, 2);
    let mut derivable = Vec::new();
    for s in &all {
        if let Some(d) = engine.prove(s) {
            check_derivation(&p, 2, &d).unwrap();
            derivable.push((s.clone(), d));
        }
    }
    (p, universe, all, derivable)
}

#[test]
fn acceptance_2_cut_admissibility() {
    let start = Instant::now();
    let (p, _, _, derivable) = universe_sequents();
    let sys = freeord::psc::KBase::new(&p);
    let with_succ: Vec<&(Sequent<PrimeAtom>, Derivation<PrimeAtom>)> = derivable
        .iter()
        .filter(|(s, _)| s.succ().is_some())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut done = 0;
    let mut attempts = 0;
    while done < 500 {
        attempts += 1;
        assert!(attempts < 50_000, "not enough cut problems found");
        let (s1, d1) = with_succ[rng.gen_range(0..with_succ.len())];
        let b = s1.succ().unwrap().clone();
        // bias toward right premisses that actually contain the cut formula
        let candidates: Vec<&(Sequent<PrimeAtom>, Derivation<PrimeAtom>)> = derivable
            .iter()
            .filter(|(s, _)| b.factors().iter().all(|f| s.ante().contains(f)))
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let (s2, d2) = candidates[rng.gen_range(0..candidates.len())];
        let (e, chain) = cut_traced(&sys, 2, d1, d2).unwrap();
        check_derivation(&p, 2, &e).unwrap();
        let mut want_ante: BTreeSet<Term> = s2.ante().clone();
        for f in b.factors() {
            want_ante.remove(&f);
        }
        want_ante.extend(s1.ante().iter().cloned());
        let want = Sequent::new(want_ante, s2.succ().cloned());
        assert_eq!(e.conclusion, want, "endsequent not contracted");
        assert!(!e.rules_used().contains(&Rule::FreeVar));
        assert!(chain.windows(2).all(|w| w[0] > w[1]), "measure: {chain:?}");
        done += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120));
    pass(2, "500 random cut problems", elapsed);
}

#[test]
fn acceptance_3_inversions() {
    let start = Instant::now();
    let (p, _, _, derivable) = universe_sequents();
    let mut applications = 0;
    for (s, d) in &derivable {
        match s.succ() {
            Some(Formula::Meet(parts)) => {
                for (i, part) in parts.iter().enumerate() {
                    let inv = invert_meet(d, i).unwrap();
                    check_derivation(&p, 2, &inv).unwrap();
                    assert_eq!(inv.conclusion, s.with_succ(Some(part.clone())));
                    applications += 1;
                }
            }
            Some(Formula::Neg(a)) => {
                let inv = invert_neg(d).unwrap();
                check_derivation(&p, 2, &inv).unwrap();
                assert_eq!(
                    inv.conclusion,
                    s.with_added([(**a).clone()]).with_succ(None)
                );
                applications += 1;
            }
            Some(omega @ Formula::Omega { .. }) => {
                for n in 1..=2u32 {
                    let n = Numeral::new(n).unwrap();
                    let inv = invert_omega(d, n).unwrap();
                    check_derivation(&p, 2, &inv).unwrap();
                    assert_eq!(inv.conclusion, s.with_succ(Some(omega.omega_instance(n))));
                    applications += 1;
                }
            }
            _ => {}
        }
    }
    assert!(applications > 100, "inversion sweep too small");
    pass(3, "exhaustive inversion suite", start.elapsed());
}

#[test]
fn acceptance_4_search_completeness() {
    let start = Instant::now();
    let (p, universe, all, derivable) = universe_sequents();
    let uni: BTreeSet<Term> = universe.into_iter().collect();
    let forward = brute_force_derivations(&p, &uni, 32, 2).unwrap();
    let backward: BTreeSet<Sequent<PrimeAtom>> =
        derivable.into_iter().map(|(s, _)| s).collect();
    for s in &all {
        assert_eq!(
            backward.contains(s),
            forward.contains(s),
            "search and fixpoint disagree at `{s}`"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120));
    pass(4, "search equals forward fixpoint", elapsed);
}

#[test]
fn acceptance_5_soundness_sweep() {
    let start = Instant::now();
    let (p, _, _, derivable) = universe_sequents();
    let models = enumerate_psc(4).unwrap();
    assert!(!models.is_empty());
    let mode = ExecMode::Parallel;
    let items: Vec<Sequent<PrimeAtom>> = derivable.into_iter().map(|(s, _)| s).collect();
    let sound = mode.all(items, |s| {
        models.iter().all(|m| {
            Assignment::all(&p, m)
                .iter()
                .all(|asg| eval_sequent(m, asg, &s, 2).unwrap())
        })
    });
    assert!(sound, "a derivable sequent was refuted by a finite model");
    pass(5, "soundness over enumerated models", start.elapsed());
}

#[test]
fn acceptance_6_canonical_refutation() {
    let start = Instant::now();
    let p = Preorder::new(["a".to_string()], [], [], []).unwrap();
    let dne = parse_sequent("~~a |- a").unwrap();
    assert_eq!(decide_psc(&p, &dne, 3), Ok(false));
    let chain = FinitePsc::three_chain();
    chain.validate().unwrap();
    let asg = Assignment::new(&p, &chain, [("a".to_string(), 1)]).unwrap();
    assert!(!eval_sequent(&chain, &asg, &dne, 3).unwrap());

    let intro = parse_sequent("a |- ~~a").unwrap();
    let d = prove_psc(&p, &intro, 3).unwrap().expect("a |- ~~a underivable");
    check_derivation(&p, 3, &d).unwrap();
    assert!(d.depth() <= 3, "depth {}", d.depth());
    pass(6, "double negation refuted and introduced", start.elapsed());
}

fn random_dlterm(rng: &mut ChaCha8Rng, depth: u32) -> DlTerm {
    let gens = ["a", "b", "c"];
    if depth == 0 || rng.gen_bool(0.3) {
        return DlTerm::gen(gens[rng.gen_range(0..3)]);
    }
    let parts: Vec<DlTerm> = (0..rng.gen_range(2..=3))
        .map(|_| random_dlterm(rng, depth - 1))
        .collect();
    if rng.gen_bool(0.5) {
        DlTerm::meet(parts)
    } else {
        DlTerm::join(parts)
    }
}

#[test]
fn acceptance_7_distributive_oracle() {
    let start = Instant::now();
    let p = Preorder::new(
        ["a", "b", "c"].map(String::from),
        [("a".to_string(), "b".to_string())],
        [],
        [],
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let pairs: Vec<(DlTerm, DlTerm)> = (0..10_000)
        .map(|_| (random_dlterm(&mut rng, 3), random_dlterm(&mut rng, 3)))
        .collect();
    let ok = ExecMode::Parallel.all(pairs, |(x, y)| {
        decide_dl(&p, &x, &y).unwrap() == oracle_dl(&p, &x, &y).unwrap()
    });
    assert!(ok, "decision and oracle disagree");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300));
    pass(7, "distributive decision vs oracle on 10000 pairs", elapsed);
}

/// Closed formula pool for the calculus-N sweeps.
fn n_pool() -> Vec<NFormula> {
    [
        "1=1",
        "1=1''",
        "1<1'",
        "1+1 = 2",
        "~(1=1'')",
        "~(1=1)",
        "1=1 & 1<1'",
        "1=1'' & 1<1'",
        "(x) 1 < x'",
        "~((x) 1 < x')",
    ]
    .iter()
    .map(|s| parse_nformula(s).unwrap())
    .collect()
}

fn induction_step(a: &NFormula, v: &NumVar, bound: u32) -> Option<NDerivation> {
    let concl = Sequent::new([a.clone()], Some(ntheory::shift_succ(a, v)));
    let instances = (1..=bound)
        .map(|m| {
            let goal = concl.subst(v, Numeral::new(m).unwrap());
            prove_n(&goal, bound).ok().flatten()
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Derivation::with_family(
        Rule::FreeVar,
        concl,
        freeord::Family {
            var: v.clone(),
            bound,
            instances,
        },
    ))
}

#[test]
fn acceptance_8_calculus_n() {
    let start = Instant::now();
    let bound = 4;

    // (a) consistency of the bounded calculus
    assert_eq!(decide_n(&parse_nsequent("|-").unwrap(), bound), Ok(false));
    let report = ntheory::consistency_check(bound, 2, ExecMode::Parallel).unwrap();
    assert!(report.consistent, "{report}");

    // (b) the two displayed double-negation trees for primes
    let d = derive_dne_prime(&match parse_nformula("1=1").unwrap() {
        Formula::Prime(p) => p,
        _ => unreachable!(),
    })
    .unwrap();
    check_nderivation(bound, &d).unwrap();
    assert_eq!(d.rule, Rule::Weaken);
    assert_eq!(d.premisses[0].rule, Rule::Base);
    assert_eq!(
        d.premisses[0].conclusion,
        parse_nsequent("|- 1=1").unwrap()
    );
    let d = derive_dne_prime(&match parse_nformula("1=1''").unwrap() {
        Formula::Prime(p) => p,
        _ => unreachable!(),
    })
    .unwrap();
    check_nderivation(bound, &d).unwrap();
    assert_eq!(d.rule, Rule::NegLeft);
    assert_eq!(d.premisses[0].rule, Rule::NegIntro);
    assert_eq!(
        d.premisses[0].premisses[0].conclusion,
        parse_nsequent("1=1'' |-").unwrap()
    );

    // (c) complete induction on A(x) = 1 < x'
    let v = NumVar::new("x");
    let a = parse_nformula("1 < x'").unwrap();
    let step = induction_step(&a, &v, bound).expect("induction step unprovable");
    check_nderivation(bound, &step).unwrap();
    let out = derive_induction(&a, &v, &step, bound).unwrap();
    check_nderivation(bound, &out).unwrap();
    assert_eq!(out.conclusion, parse_nsequent("1 < 1' |- 1 < x'").unwrap());

    // (d) admissible-rule operations on random instances
    let pool = n_pool();
    let mut engine = ntheory::nprover(bound);
    let mut provable: Vec<NDerivation> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut tries = 0;
    while provable.len() < 60 && tries < 4000 {
        tries += 1;
        let k = rng.gen_range(0..=2);
        let ante: Vec<NFormula> = (0..k)
            .map(|_| pool[rng.gen_range(0..pool.len())].clone())
            .collect();
        let succ = if rng.gen_bool(0.8) {
            Some(pool[rng.gen_range(0..pool.len())].clone())
        } else {
            None
        };
        let s = Sequent::new(ante, succ);
        if let Some(d) = engine.prove(&s) {
            check_nderivation(bound, &d).unwrap();
            provable.push(d);
        }
    }
    assert!(provable.len() >= 60, "only {} provable samples", provable.len());

    let mut instances = 0;
    // cut (rule k)
    let with_succ: Vec<&NDerivation> = provable
        .iter()
        .filter(|d| d.conclusion.succ().is_some())
        .collect();
    for _ in 0..25 {
        let d1 = with_succ[rng.gen_range(0..with_succ.len())];
        let d2 = &provable[rng.gen_range(0..provable.len())];
        let e = ntheory::cut_n(bound, d1, d2).unwrap();
        check_nderivation(bound, &e).unwrap();
        assert_eq!(decide_n(&e.conclusion, bound), Ok(true));
        instances += 1;
    }
    // inversions (rules l-o)
    for d in &provable {
        match d.conclusion.succ() {
            Some(Formula::Meet(parts)) => {
                for i in 0..parts.len() {
                    let inv = invert_meet(d, i).unwrap();
                    check_nderivation(bound, &inv).unwrap();
                    instances += 1;
                }
            }
            Some(Formula::Neg(_)) => {
                let inv = invert_neg(d).unwrap();
                check_nderivation(bound, &inv).unwrap();
                instances += 1;
            }
            Some(Formula::Omega { .. }) => {
                for n in 1..=bound {
                    let inv = invert_omega(d, Numeral::new(n).unwrap()).unwrap();
                    check_nderivation(bound, &inv).unwrap();
                    instances += 1;
                }
            }
            _ => {}
        }
    }
    // specialization (rule p) and induction (rule q)
    for text in ["1 < x'", "x < x'", "x = x"] {
        let a = parse_nformula(text).unwrap();
        let step = induction_step(&a, &v, bound).expect(text);
        let out = derive_induction(&a, &v, &step, bound).unwrap();
        check_nderivation(bound, &out).unwrap();
        for _ in 0..4 {
            let n = Numeral::new(rng.gen_range(1..=bound)).unwrap();
            let inst = ntheory::specialize(&out, &v, n, bound).unwrap();
            check_nderivation(bound, &inst).unwrap();
            assert_eq!(inst.conclusion, out.conclusion.subst(&v, n));
            instances += 2;
        }
    }
    // double negation for compound formulas rides on cut internally
    for t in &pool {
        let e = derive_dne_n(t, bound).unwrap();
        check_nderivation(bound, &e).unwrap();
        assert_eq!(decide_n(&e.conclusion, bound), Ok(true));
        instances += 1;
    }
    assert!(instances >= 100, "only {instances} admissible instances");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300));
    pass(8, "bounded calculus N harness", elapsed);
}

fn random_term(rng: &mut ChaCha8Rng, depth: u32) -> Term {
    if depth == 0 || rng.gen_bool(0.35) {
        let leaves = ["a", "b", "c", "d"];
        return match rng.gen_range(0..3) {
            0 | 1 => Term::prime(PrimeAtom::plain(leaves[rng.gen_range(0..4)])),
            _ => parse_term("/\\x. g(x)").unwrap(),
        };
    }
    match rng.gen_range(0..3) {
        0 => Formula::meet(
            (0..rng.gen_range(2..=3))
                .map(|_| random_term(rng, depth - 1))
                .collect(),
        ),
        1 => Formula::neg(random_term(rng, depth - 1)),
        _ => {
            // distinct binder name per level so printing never renames
            let var = NumVar::new(format!("y{depth}"));
            let body = random_term(rng, depth - 1);
            let schema = Term::prime(PrimeAtom::indexed_var("h", var.clone()));
            Formula::omega(var, Formula::meet(vec![body, schema]))
        }
    }
}

#[test]
fn acceptance_9_round_trips() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for i in 0..1000 {
        // alternate terms and sequents
        if i % 2 == 0 {
            let t = random_term(&mut rng, 3);
            let printed = print_formula(&t);
            assert_eq!(parse_term(&printed).unwrap(), t, "term `{printed}`");
        } else {
            let ante: Vec<Term> = (0..rng.gen_range(0..3))
                .map(|_| random_term(&mut rng, 2))
                .collect();
            let succ = if rng.gen_bool(0.7) {
                Some(random_term(&mut rng, 2))
            } else {
                None
            };
            let s = Sequent::new(ante, succ);
            let printed = s.to_string();
            assert_eq!(parse_sequent(&printed).unwrap(), s, "sequent `{printed}`");
        }
    }
    // derivation JSON is byte-stable and re-checks
    let (p, _, _, derivable) = universe_sequents();
    let mut checked = 0;
    for (_, d) in derivable.iter().take(200) {
        let text = d.to_json_string();
        let back = derivation_from_json(&text).unwrap();
        assert_eq!(&back, d);
        assert_eq!(back.to_json_string(), text, "serialization not byte-stable");
        check_derivation(&p, 2, &back).unwrap();
        checked += 1;
    }
    assert!(checked >= 100);
    pass(9, "parse/print and JSON round trips", start.elapsed());
}

#[test]
fn acceptance_extras_cut_after_reflexivity() {
    // spot check used by the CLI pipeline: cutting reflexivity into a
    // proof is the identity on conclusions
    let (p, _, _, derivable) = universe_sequents();
    let sys = freeord::psc::KBase::new(&p);
    for (s, d) in derivable.iter().take(50) {
        let Some(b) = s.succ() else { continue };
        let refl = derive_refl(b, 2);
        let e = cut(&sys, 2, d, &refl).unwrap();
        check_derivation(&p, 2, &e).unwrap();
        assert_eq!(&e.conclusion, s);
    }
}
