//! Preordered generator sets with computed reflexive-transitive closure
//! and absurd/top markers.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreorderError {
    #[error("undeclared generator `{0}`")]
    Undeclared(String),
    #[error("preorder file, line {line}: {msg}")]
    File { line: usize, msg: String },
}

/// A preorder presentation: generators, base relation pairs and markers
/// for generators below everything (`absurd`) or above everything
/// (`top`).  The closure is computed on construction and queried through
/// [`Preorder::holds`], [`Preorder::is_absurd`] and [`Preorder::is_top`].
#[derive(Debug, Clone)]
pub struct Preorder {
    gens: Vec<String>,
    index: BTreeMap<String, usize>,
    holds: Vec<Vec<bool>>,
    absurd: Vec<bool>,
    top: Vec<bool>,
}

impl Preorder {
    pub fn new(
        generators: impl IntoIterator<Item = String>,
        base_pairs: impl IntoIterator<Item = (String, String)>,
        absurd_gens: impl IntoIterator<Item = String>,
        top_gens: impl IntoIterator<Item = String>,
    ) -> Result<Preorder, PreorderError> {
        let mut gens: Vec<String> = Vec::new();
        let mut index = BTreeMap::new();
        for g in generators {
            if !index.contains_key(&g) {
                index.insert(g.clone(), gens.len());
                gens.push(g);
            }
        }
        let n = gens.len();
        let look = |name: &str, index: &BTreeMap<String, usize>| -> Result<usize, PreorderError> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| PreorderError::Undeclared(name.to_string()))
        };
        let mut holds = vec![vec![false; n]; n];
        for i in 0..n {
            holds[i][i] = true;
        }
        for (a, b) in base_pairs {
            let i = look(&a, &index)?;
            let j = look(&b, &index)?;
            holds[i][j] = true;
        }
        let mut absurd = vec![false; n];
        for g in absurd_gens {
            absurd[look(&g, &index)?] = true;
        }
        let mut top = vec![false; n];
        for g in top_gens {
            top[look(&g, &index)?] = true;
        }

        // Close under transitivity and marker propagation until stable.
        // Markers feed back into `holds` (absurd below everything, top
        // above everything), which can enable further propagation.
        loop {
            let mut changed = false;
            for k in 0..n {
                for i in 0..n {
                    if holds[i][k] {
                        for j in 0..n {
                            if holds[k][j] && !holds[i][j] {
                                holds[i][j] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if holds[i][j] {
                        if absurd[j] && !absurd[i] {
                            absurd[i] = true;
                            changed = true;
                        }
                        if top[i] && !top[j] {
                            top[j] = true;
                            changed = true;
                        }
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if (absurd[i] || top[j]) && !holds[i][j] {
                        holds[i][j] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        Ok(Preorder {
            gens,
            index,
            holds,
            absurd,
            top,
        })
    }

    /// Empty preorder over the named generators (antichain).
    pub fn antichain(gens: &[&str]) -> Preorder {
        Preorder::new(
            gens.iter().map(|s| s.to_string()),
            Vec::new(),
            Vec::new(),
            Vec::new(),
        )
        .unwrap()
    }

    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Whether `a <= b` holds in the closure.  Undeclared names never
    /// relate to anything.
    pub fn holds(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.holds[i][j],
            _ => false,
        }
    }

    pub fn is_absurd(&self, a: &str) -> bool {
        self.index.get(a).is_some_and(|&i| self.absurd[i])
    }

    pub fn is_top(&self, a: &str) -> bool {
        self.index.get(a).is_some_and(|&i| self.top[i])
    }

    /// Parses the plain-text format: one relation per line, `p <= q`,
    /// `p <= .` (absurd), `. <= p` (top), a bare name declares a
    /// generator, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Preorder, PreorderError> {
        let mut gens: Vec<String> = Vec::new();
        let mut seen = BTreeSet::new();
        let declare = |name: &str, gens: &mut Vec<String>, seen: &mut BTreeSet<String>| {
            if seen.insert(name.to_string()) {
                gens.push(name.to_string());
            }
        };
        let mut pairs = Vec::new();
        let mut absurd = Vec::new();
        let mut top = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| PreorderError::File {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            if let Some((l, r)) = line.split_once("<=") {
                let l = l.trim();
                let r = r.trim();
                if l.is_empty() || r.is_empty() {
                    return Err(bad("expected `NAME <= NAME`"));
                }
                match (l, r) {
                    (".", ".") => return Err(bad("`. <= .` is not a relation")),
                    (".", name) => {
                        check_name(name).map_err(|m| bad(&m))?;
                        declare(name, &mut gens, &mut seen);
                        top.push(name.to_string());
                    }
                    (name, ".") => {
                        check_name(name).map_err(|m| bad(&m))?;
                        declare(name, &mut gens, &mut seen);
                        absurd.push(name.to_string());
                    }
                    (a, b) => {
                        check_name(a).map_err(|m| bad(&m))?;
                        check_name(b).map_err(|m| bad(&m))?;
                        declare(a, &mut gens, &mut seen);
                        declare(b, &mut gens, &mut seen);
                        pairs.push((a.to_string(), b.to_string()));
                    }
                }
            } else {
                check_name(line).map_err(|m| bad(&m))?;
                declare(line, &mut gens, &mut seen);
            }
        }
        Preorder::new(gens, pairs, absurd, top)
    }
}

fn check_name(name: &str) -> Result<(), String> {
    let mut chars = name.chars();
    let ok_head = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
    let ok_tail = name.len() == 1
        || name[1..]
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '(' || c == ')');
    if ok_head && ok_tail && name.chars().filter(|&c| c == '(').count() <= 1 {
        Ok(())
    } else {
        Err(format!("invalid generator name `{name}`"))
    }
}
