//! Derivation trees: rule tags, tree structure, JSON interchange and
//! small structural helpers shared by the checker and the transformations.

use std::fmt;

use serde_json::{json, Value};

use crate::sequent::Sequent;
use crate::term::{NumVar, Numeral, PrimeTerm};

/// Rule vocabulary.  The short tags used in the interchange format follow
/// the calculus presentation order: `ra` meet introduction, `rb` negation
/// introduction, `rc` omega introduction, `rd` weakening, `re` negation on
/// the left, `rf` omega instantiation on the left, `j` the free-variable
/// rule of the number-theoretic calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Base,
    MeetIntro,
    NegIntro,
    OmegaIntro,
    Weaken,
    NegLeft,
    OmegaLeft,
    FreeVar,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::Base => "base",
            Rule::MeetIntro => "ra",
            Rule::NegIntro => "rb",
            Rule::OmegaIntro => "rc",
            Rule::Weaken => "rd",
            Rule::NegLeft => "re",
            Rule::OmegaLeft => "rf",
            Rule::FreeVar => "j",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Rule> {
        Some(match tag {
            "base" => Rule::Base,
            "ra" => Rule::MeetIntro,
            "rb" => Rule::NegIntro,
            "rc" => Rule::OmegaIntro,
            "rd" => Rule::Weaken,
            "re" => Rule::NegLeft,
            "rf" => Rule::OmegaLeft,
            "j" => Rule::FreeVar,
            _ => return None,
        })
    }

    /// Long name for text output.
    pub fn name(self) -> &'static str {
        match self {
            Rule::Base => "base",
            Rule::MeetIntro => "meet-intro",
            Rule::NegIntro => "neg-intro",
            Rule::OmegaIntro => "omega-intro",
            Rule::Weaken => "weaken",
            Rule::NegLeft => "neg-left",
            Rule::OmegaLeft => "omega-left",
            Rule::FreeVar => "free-var",
        }
    }
}

/// A numeral-indexed premiss family: instance `n` (1-based) is the
/// derivation at position `n - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family<P: PrimeTerm> {
    pub var: NumVar,
    pub bound: u32,
    pub instances: Vec<Derivation<P>>,
}

/// A derivation tree node.  `premisses` carries the finitely many direct
/// premisses; omega and free-variable introductions instead carry a
/// numeral-indexed `family`.  Omega instantiation on the left records the
/// chosen `instance` numeral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation<P: PrimeTerm> {
    pub rule: Rule,
    pub conclusion: Sequent<P>,
    pub premisses: Vec<Derivation<P>>,
    pub family: Option<Family<P>>,
    pub instance: Option<Numeral>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("at {path}, conclusion `{sequent}`: {msg}")]
    Node {
        path: String,
        sequent: String,
        msg: String,
    },
    #[error("derivation input: {0}")]
    Input(String),
}

impl<P: PrimeTerm> Derivation<P> {
    pub fn leaf(conclusion: Sequent<P>) -> Derivation<P> {
        Derivation {
            rule: Rule::Base,
            conclusion,
            premisses: Vec::new(),
            family: None,
            instance: None,
        }
    }

    pub fn one(rule: Rule, conclusion: Sequent<P>, premiss: Derivation<P>) -> Derivation<P> {
        Derivation {
            rule,
            conclusion,
            premisses: vec![premiss],
            family: None,
            instance: None,
        }
    }

    pub fn many(rule: Rule, conclusion: Sequent<P>, premisses: Vec<Derivation<P>>) -> Derivation<P> {
        Derivation {
            rule,
            conclusion,
            premisses,
            family: None,
            instance: None,
        }
    }

    pub fn omega_left(
        conclusion: Sequent<P>,
        premiss: Derivation<P>,
        n: Numeral,
    ) -> Derivation<P> {
        Derivation {
            rule: Rule::OmegaLeft,
            conclusion,
            premisses: vec![premiss],
            family: None,
            instance: Some(n),
        }
    }

    pub fn with_family(rule: Rule, conclusion: Sequent<P>, family: Family<P>) -> Derivation<P> {
        Derivation {
            rule,
            conclusion,
            premisses: Vec::new(),
            family: Some(family),
            instance: None,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premisses.iter().map(|d| d.size()).sum::<usize>()
            + self
                .family
                .as_ref()
                .map_or(0, |f| f.instances.iter().map(|d| d.size()).sum())
    }

    pub fn depth(&self) -> usize {
        1 + self
            .premisses
            .iter()
            .map(|d| d.depth())
            .chain(
                self.family
                    .iter()
                    .flat_map(|f| f.instances.iter().map(|d| d.depth())),
            )
            .max()
            .unwrap_or(0)
    }

    pub fn rules_used(&self) -> std::collections::BTreeSet<Rule> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_rules(&mut out);
        out
    }

    fn collect_rules(&self, out: &mut std::collections::BTreeSet<Rule>) {
        out.insert(self.rule);
        for d in &self.premisses {
            d.collect_rules(out);
        }
        if let Some(f) = &self.family {
            for d in &f.instances {
                d.collect_rules(out);
            }
        }
    }

    /// Wraps in a weakening node targeting `target`, or returns the tree
    /// unchanged when the conclusion already matches.  The caller must
    /// ensure the conclusion's antecedent is contained in the target's and
    /// the succedents agree.
    pub fn weaken_to(self, target: Sequent<P>) -> Derivation<P> {
        if self.conclusion == target {
            self
        } else {
            Derivation::one(Rule::Weaken, target, self)
        }
    }

    /// Strips top-level weakening nodes.
    pub fn peel_weaken(&self) -> &Derivation<P> {
        let mut d = self;
        while d.rule == Rule::Weaken {
            d = &d.premisses[0];
        }
        d
    }

    /// Collapses vacuous weakenings (conclusion equal to premiss) and
    /// merges stacked weakenings.
    pub fn simplify(self) -> Derivation<P> {
        let Derivation {
            rule,
            conclusion,
            premisses,
            family,
            instance,
        } = self;
        let premisses: Vec<Derivation<P>> =
            premisses.into_iter().map(|d| d.simplify()).collect();
        let family = family.map(|f| Family {
            var: f.var,
            bound: f.bound,
            instances: f.instances.into_iter().map(|d| d.simplify()).collect(),
        });
        if rule == Rule::Weaken {
            let inner = premisses.into_iter().next().unwrap();
            if inner.conclusion == conclusion {
                return inner;
            }
            if inner.rule == Rule::Weaken {
                return Derivation::one(
                    Rule::Weaken,
                    conclusion,
                    inner.premisses.into_iter().next().unwrap(),
                );
            }
            return Derivation::one(Rule::Weaken, conclusion, inner);
        }
        Derivation {
            rule,
            conclusion,
            premisses,
            family,
            instance,
        }
    }

    /// Interchange form.  Sequents are concrete-syntax strings; key order
    /// is fixed (alphabetical), so serialization is byte-stable.
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        if let Some(f) = &self.family {
            obj.insert(
                "family".into(),
                json!({
                    "bound": f.bound,
                    "instances": f.instances.iter().map(|d| d.to_json()).collect::<Vec<_>>(),
                    "var": f.var.name(),
                }),
            );
        }
        if let Some(n) = self.instance {
            obj.insert("instance".into(), json!(n.value()));
        }
        obj.insert(
            "premisses".into(),
            Value::Array(self.premisses.iter().map(|d| d.to_json()).collect()),
        );
        obj.insert("rule".into(), json!(self.rule.tag()));
        obj.insert("sequent".into(), json!(self.conclusion.to_string()));
        Value::Object(obj)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).unwrap()
    }

    /// Parses the interchange form; `parse_seq` supplies the
    /// calculus-specific sequent syntax.
    pub fn from_json(
        v: &Value,
        parse_seq: &impl Fn(&str) -> Result<Sequent<P>, String>,
    ) -> Result<Derivation<P>, CheckError> {
        let bad = |msg: String| CheckError::Input(msg);
        let obj = v
            .as_object()
            .ok_or_else(|| bad("expected an object".into()))?;
        let rule_tag = obj
            .get("rule")
            .and_then(|r| r.as_str())
            .ok_or_else(|| bad("missing `rule`".into()))?;
        let rule =
            Rule::from_tag(rule_tag).ok_or_else(|| bad(format!("unknown rule `{rule_tag}`")))?;
        let seq_text = obj
            .get("sequent")
            .and_then(|s| s.as_str())
            .ok_or_else(|| bad("missing `sequent`".into()))?;
        let conclusion = parse_seq(seq_text).map_err(|m| bad(format!("`{seq_text}`: {m}")))?;
        let premisses = match obj.get("premisses") {
            None => Vec::new(),
            Some(Value::Array(items)) => items
                .iter()
                .map(|p| Derivation::from_json(p, parse_seq))
                .collect::<Result<_, _>>()?,
            Some(_) => return Err(bad("`premisses` must be an array".into())),
        };
        let family = match obj.get("family") {
            None => None,
            Some(f) => {
                let fo = f
                    .as_object()
                    .ok_or_else(|| bad("`family` must be an object".into()))?;
                let var = fo
                    .get("var")
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| bad("family missing `var`".into()))?;
                let bound = fo
                    .get("bound")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| bad("family missing `bound`".into()))?;
                let instances = fo
                    .get("instances")
                    .and_then(|x| x.as_array())
                    .ok_or_else(|| bad("family missing `instances`".into()))?
                    .iter()
                    .map(|p| Derivation::from_json(p, parse_seq))
                    .collect::<Result<_, _>>()?;
                Some(Family {
                    var: NumVar::new(var),
                    bound: bound as u32,
                    instances,
                })
            }
        };
        let instance = match obj.get("instance") {
            None => None,
            Some(x) => {
                let n = x
                    .as_u64()
                    .and_then(|n| u32::try_from(n).ok())
                    .and_then(Numeral::new)
                    .ok_or_else(|| bad("`instance` must be a positive numeral".into()))?;
                Some(n)
            }
        };
        Ok(Derivation {
            rule,
            conclusion,
            premisses,
            family,
            instance,
        })
    }

    /// Indented text rendering of the tree, one node per line.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render(0, &mut out);
        out
    }

    fn render(&self, indent: usize, out: &mut String) {
        use std::fmt::Write as _;
        let _ = writeln!(
            out,
            "{}[{}] {}{}",
            "  ".repeat(indent),
            self.rule.name(),
            self.conclusion,
            match self.instance {
                Some(n) => format!("   (instance {n})"),
                None => String::new(),
            }
        );
        for d in &self.premisses {
            d.render(indent + 1, out);
        }
        if let Some(f) = &self.family {
            let _ = writeln!(
                out,
                "{}family over {} up to {}:",
                "  ".repeat(indent + 1),
                f.var,
                f.bound
            );
            for d in &f.instances {
                d.render(indent + 2, out);
            }
        }
    }
}

impl<P: PrimeTerm> fmt::Display for Derivation<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_sequent;
    use crate::term::PrimeAtom;

    fn seq(text: &str) -> Sequent<PrimeAtom> {
        parse_sequent(text).unwrap()
    }

    fn parse_back(text: &str) -> Result<Sequent<PrimeAtom>, String> {
        parse_sequent(text).map_err(|e| e.to_string())
    }

    #[test]
    fn rule_tags_round_trip() {
        for r in [
            Rule::Base,
            Rule::MeetIntro,
            Rule::NegIntro,
            Rule::OmegaIntro,
            Rule::Weaken,
            Rule::NegLeft,
            Rule::OmegaLeft,
            Rule::FreeVar,
        ] {
            assert_eq!(Rule::from_tag(r.tag()), Some(r));
        }
        assert_eq!(Rule::from_tag("zz"), None);
    }

    #[test]
    fn json_round_trip_and_stability() {
        let d = Derivation::one(
            Rule::Weaken,
            seq("a, b |- a"),
            Derivation::leaf(seq("a |- a")),
        );
        let text = d.to_json_string();
        let v: Value = serde_json::from_str(&text).unwrap();
        let back = Derivation::from_json(&v, &parse_back).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn simplify_collapses_weaken_chains() {
        let base = Derivation::leaf(seq("a |- a"));
        let w1 = Derivation::one(Rule::Weaken, seq("a |- a"), base.clone());
        let w2 = Derivation::one(Rule::Weaken, seq("a, b |- a"), w1);
        let s = w2.simplify();
        assert_eq!(s.size(), 2);
        assert_eq!(s.conclusion, seq("a, b |- a"));
        assert_eq!(s.premisses[0], base);
    }

    #[test]
    fn weaken_to_is_identity_on_match() {
        let d = Derivation::leaf(seq("a |- a"));
        assert_eq!(d.clone().weaken_to(seq("a |- a")).size(), 1);
        assert_eq!(d.weaken_to(seq("a, b |- a")).size(), 2);
    }
}
