//! Finite pseudocomplemented meet-semilattice models: validation, term
//! evaluation, sequent evaluation and enumeration up to isomorphism.
//! These serve as refutation oracles and as the target of the soundness
//! sweep for the deductive calculus.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::preorder::Preorder;
use crate::sequent::Sequent;
use crate::term::{Formula, Numeral, PrimeAtom, Term};

/// A finite meet-semilattice with bottom, top and a pseudocomplement
/// table.  Elements are indices `0..size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePsc {
    pub size: usize,
    pub meet: Vec<Vec<usize>>,
    pub pcomp: Vec<usize>,
    pub bottom: usize,
    pub top: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("model invalid: {0:?}")]
    Invalid(Vec<String>),
    #[error("generator `{0}` has no assigned value")]
    Unassigned(String),
    #[error("assignment violates the preorder at ({0}, {1})")]
    NotMonotone(String, String),
    #[error("model file: {0}")]
    File(String),
    #[error("enumeration capped at size {0}")]
    Cap(usize),
}

impl FinitePsc {
    /// The 2-element boolean pair 0 < 1.
    pub fn boolean() -> FinitePsc {
        FinitePsc {
            size: 2,
            meet: vec![vec![0, 0], vec![0, 1]],
            pcomp: vec![1, 0],
            bottom: 0,
            top: 1,
        }
    }

    /// The 3-chain 0 < 1 < 2 with pcomp(0)=2, pcomp(1)=0, pcomp(2)=0;
    /// the standard refutation model for double negation elimination.
    pub fn three_chain() -> FinitePsc {
        FinitePsc {
            size: 3,
            meet: vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]],
            pcomp: vec![2, 0, 0],
            bottom: 0,
            top: 2,
        }
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.meet[x][y] == x
    }

    /// Checks every defining law pointwise; returns the list of
    /// violations with witnesses.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut bad = Vec::new();
        let n = self.size;
        if n == 0 {
            return Err(ModelError::Invalid(vec!["empty carrier".into()]));
        }
        let total = self.meet.len() == n
            && self.meet.iter().all(|row| row.iter().all(|&v| v < n) && row.len() == n)
            && self.pcomp.len() == n
            && self.pcomp.iter().all(|&v| v < n)
            && self.bottom < n
            && self.top < n;
        if !total {
            return Err(ModelError::Invalid(vec!["tables not total".into()]));
        }
        for a in 0..n {
            if self.meet[a][a] != a {
                bad.push(format!("meet not idempotent at {a}"));
            }
            if self.meet[a][self.bottom] != self.bottom {
                bad.push(format!("bottom not absorbing at {a}"));
            }
            if self.meet[a][self.top] != a {
                bad.push(format!("top not neutral at {a}"));
            }
            for b in 0..n {
                if self.meet[a][b] != self.meet[b][a] {
                    bad.push(format!("meet not commutative at ({a},{b})"));
                }
                for c in 0..n {
                    if self.meet[self.meet[a][b]][c] != self.meet[a][self.meet[b][c]] {
                        bad.push(format!("meet not associative at ({a},{b},{c})"));
                    }
                }
            }
        }
        // pseudocomplement law: a ∧ x = bottom  <=>  x <= pcomp(a)
        for a in 0..n {
            for x in 0..n {
                let zero = self.meet[a][x] == self.bottom;
                let below = self.leq(x, self.pcomp[a]);
                if zero != below {
                    bad.push(format!("pseudocomplement law fails at (a={a}, x={x})"));
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Invalid(bad))
        }
    }

    /// Plain-text format: `carrier N`, N meet-table rows, a pcomp row,
    /// `bottom i`, `top i`.
    pub fn parse(text: &str) -> Result<FinitePsc, ModelError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or(ModelError::File("empty file".into()))?;
        let size: usize = header
            .strip_prefix("carrier")
            .and_then(|s| s.trim().parse().ok())
            .ok_or(ModelError::File("expected `carrier N`".into()))?;
        let mut meet = Vec::new();
        for _ in 0..size {
            let row = lines
                .next()
                .ok_or(ModelError::File("missing meet row".into()))?;
            let vals: Vec<usize> = row
                .split_whitespace()
                .map(|w| w.parse().map_err(|_| ModelError::File(format!("bad entry `{w}`"))))
                .collect::<Result<_, _>>()?;
            meet.push(vals);
        }
        let prow = lines
            .next()
            .and_then(|l| l.strip_prefix("pcomp"))
            .ok_or(ModelError::File("expected `pcomp` row".into()))?;
        let pcomp: Vec<usize> = prow
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| ModelError::File(format!("bad entry `{w}`"))))
            .collect::<Result<_, _>>()?;
        let bottom = lines
            .next()
            .and_then(|l| l.strip_prefix("bottom"))
            .and_then(|s| s.trim().parse().ok())
            .ok_or(ModelError::File("expected `bottom i`".into()))?;
        let top = lines
            .next()
            .and_then(|l| l.strip_prefix("top"))
            .and_then(|s| s.trim().parse().ok())
            .ok_or(ModelError::File("expected `top i`".into()))?;
        let m = FinitePsc {
            size,
            meet,
            pcomp,
            bottom,
            top,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn render(&self) -> String {
        let mut s = format!("carrier {}\n", self.size);
        for row in &self.meet {
            let words: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&words.join(" "));
            s.push('\n');
        }
        let words: Vec<String> = self.pcomp.iter().map(|v| v.to_string()).collect();
        s.push_str(&format!("pcomp {}\n", words.join(" ")));
        s.push_str(&format!("bottom {}\ntop {}\n", self.bottom, self.top));
        s
    }
}

impl fmt::Display for FinitePsc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A map from generators to model elements, checked against the preorder
/// closure on construction.
#[derive(Debug, Clone)]
pub struct Assignment {
    vals: Vec<(String, usize)>,
}

impl Assignment {
    pub fn new(
        p: &Preorder,
        m: &FinitePsc,
        vals: impl IntoIterator<Item = (String, usize)>,
    ) -> Result<Assignment, ModelError> {
        let vals: Vec<(String, usize)> = vals.into_iter().collect();
        let get = |g: &str| vals.iter().find(|(n, _)| n == g).map(|(_, v)| *v);
        for (g, v) in &vals {
            if p.is_absurd(g) && *v != m.bottom {
                return Err(ModelError::NotMonotone(g.clone(), "(bottom)".into()));
            }
            if p.is_top(g) && *v != m.top {
                return Err(ModelError::NotMonotone(g.clone(), "(top)".into()));
            }
        }
        for (a, va) in &vals {
            for (b, vb) in &vals {
                if p.holds(a, b) && !m.leq(*va, *vb) {
                    return Err(ModelError::NotMonotone(a.clone(), b.clone()));
                }
            }
        }
        let _ = get;
        Ok(Assignment { vals })
    }

    pub fn get(&self, g: &str) -> Option<usize> {
        self.vals.iter().find(|(n, _)| n == g).map(|(_, v)| *v)
    }

    /// All assignments of the preorder's generators into `m` that respect
    /// the closure.
    pub fn all(p: &Preorder, m: &FinitePsc) -> Vec<Assignment> {
        let gens = p.generators();
        let mut out = Vec::new();
        let mut current = vec![0usize; gens.len()];
        loop {
            let vals: Vec<(String, usize)> = gens
                .iter()
                .cloned()
                .zip(current.iter().copied())
                .collect();
            if let Ok(a) = Assignment::new(p, m, vals) {
                out.push(a);
            }
            // odometer
            let mut i = 0;
            loop {
                if i == gens.len() {
                    return out;
                }
                current[i] += 1;
                if current[i] < m.size {
                    break;
                }
                current[i] = 0;
                i += 1;
            }
        }
    }
}

/// Evaluates a closed term; omega-meets are read as finite meets of their
/// instances at `1..=bound`.
pub fn eval(
    m: &FinitePsc,
    asg: &Assignment,
    t: &Term,
    bound: u32,
) -> Result<usize, ModelError> {
    match t {
        Formula::Prime(p) => lookup_prime(asg, p),
        Formula::Meet(parts) => {
            let mut acc = m.top;
            for part in parts {
                acc = m.meet[acc][eval(m, asg, part, bound)?];
            }
            Ok(acc)
        }
        Formula::Neg(b) => Ok(m.pcomp[eval(m, asg, b, bound)?]),
        Formula::Omega { .. } => {
            let mut acc = m.top;
            for n in 1..=bound {
                let inst = t.omega_instance(Numeral::new(n).unwrap());
                acc = m.meet[acc][eval(m, asg, &inst, bound)?];
            }
            Ok(acc)
        }
    }
}

fn lookup_prime(asg: &Assignment, p: &PrimeAtom) -> Result<usize, ModelError> {
    let sym = p.symbol();
    asg.get(&sym)
        .or_else(|| asg.get(p.base_name()))
        .ok_or(ModelError::Unassigned(sym))
}

/// Evaluates a sequent: the meet of the antecedent lies below the
/// succedent.  An absent succedent reads as bottom, an empty antecedent
/// as top.
pub fn eval_sequent(
    m: &FinitePsc,
    asg: &Assignment,
    s: &Sequent<PrimeAtom>,
    bound: u32,
) -> Result<bool, ModelError> {
    let mut left = m.top;
    for t in s.ante() {
        left = m.meet[left][eval(m, asg, t, bound)?];
    }
    let right = match s.succ() {
        Some(t) => eval(m, asg, t, bound)?,
        None => m.bottom,
    };
    Ok(m.leq(left, right))
}

/// Enumerates all valid models up to isomorphism on carriers of at most
/// `max_size` elements: meet-semilattices with bottom and top whose
/// maximal pseudocomplement exists.
pub fn enumerate_psc(max_size: usize) -> Result<Vec<FinitePsc>, ModelError> {
    if max_size > 4 {
        return Err(ModelError::Cap(4));
    }
    let mut out: Vec<FinitePsc> = Vec::new();
    for n in 1..=max_size {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        // enumerate partial orders as upper-triangular bit choices over a
        // fixed linear extension: i <= j only possible when i <= j as ints
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        'mask: for mask in 0u32..(1 << pairs.len()) {
            let mut le = vec![vec![false; n]; n];
            for i in 0..n {
                le[i][i] = true;
            }
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    le[i][j] = true;
                }
            }
            // transitivity must already hold (we do not close, we filter)
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if le[a][b] && le[b][c] && !le[a][c] {
                            continue 'mask;
                        }
                    }
                }
            }
            // bottom = 0, top = n-1 under the linear extension
            if (0..n).any(|x| !le[0][x] || !le[x][n - 1]) {
                continue;
            }
            // every pair needs a greatest lower bound
            let mut meet = vec![vec![0usize; n]; n];
            for a in 0..n {
                for b in 0..n {
                    let lower: Vec<usize> =
                        (0..n).filter(|&x| le[x][a] && le[x][b]).collect();
                    let glb = lower
                        .iter()
                        .copied()
                        .find(|&g| lower.iter().all(|&x| le[x][g]));
                    match glb {
                        Some(g) => meet[a][b] = g,
                        None => continue 'mask,
                    }
                }
            }
            // maximal pseudocomplement must exist for every element
            let mut pcomp = vec![0usize; n];
            for a in 0..n {
                let zeros: Vec<usize> = (0..n).filter(|&x| meet[a][x] == 0).collect();
                let max = zeros
                    .iter()
                    .copied()
                    .find(|&m0| zeros.iter().all(|&x| le[x][m0]));
                match max {
                    Some(m0) => pcomp[a] = m0,
                    None => continue 'mask,
                }
            }
            let model = FinitePsc {
                size: n,
                meet,
                pcomp,
                bottom: 0,
                top: n - 1,
            };
            if model.validate().is_err() {
                continue;
            }
            let canon = canonical_form(&model);
            if seen.insert(canon) {
                out.push(model);
            }
        }
    }
    Ok(out)
}

/// Canonical form under carrier permutations fixing nothing; used for
/// isomorphism reduction at size <= 4.
fn canonical_form(m: &FinitePsc) -> Vec<usize> {
    let n = m.size;
    let perms = permutations(n);
    let mut best: Option<Vec<usize>> = None;
    for perm in perms {
        // perm[i] = new name of element i; require order-compatible tables
        let mut flat = Vec::with_capacity(n * n + n + 2);
        let inv = {
            let mut inv = vec![0; n];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i;
            }
            inv
        };
        for a in 0..n {
            for b in 0..n {
                flat.push(perm[m.meet[inv[a]][inv[b]]]);
            }
        }
        for a in 0..n {
            flat.push(perm[m.pcomp[inv[a]]]);
        }
        flat.push(perm[m.bottom]);
        flat.push(perm[m.top]);
        if best.as_ref().is_none_or(|b| flat < *b) {
            best = Some(flat);
        }
    }
    best.unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}
