//! Rule schemas and their instantiation over the (finite) Herbrand universe.
//!
//! A schema rule with variables stands for all of its ground instances. The
//! universe is the set of constants occurring anywhere in the schema theory.
//! Instance labels append the bracketed constant tuple, in order of first
//! variable occurrence, to the schema label: `r1[platypus]`. A superiority
//! pair between two schema labels relates every pair of instances that agree
//! on the variables the two rules share.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::theory::{Atom, Label, Literal, Rule, RuleKind, Theory, TheoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("empty Herbrand universe: the theory has variables but no constants")]
    EmptyUniverse,
    #[error("theory is not ground (variable `{0}`)")]
    NotGround(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    Var(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) | Term::Var(c) => f.write_str(c),
        }
    }
}

/// An atom whose arguments may be variables. Generated atoms (only reachable
/// through the generated-symbol parse mode) are carried as their ground form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AtomSchema {
    Pattern { name: String, args: Vec<Term> },
    Ground(Atom),
}

impl AtomSchema {
    fn variables(&self) -> impl Iterator<Item = &str> {
        let args: &[Term] = match self {
            AtomSchema::Pattern { args, .. } => args,
            AtomSchema::Ground(_) => &[],
        };
        args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }

    fn constants(&self) -> impl Iterator<Item = &str> {
        let (pattern, ground): (&[Term], &[String]) = match self {
            AtomSchema::Pattern { args, .. } => (args, &[]),
            AtomSchema::Ground(a) => (&[], a.args()),
        };
        pattern
            .iter()
            .filter_map(|t| match t {
                Term::Const(c) => Some(c.as_str()),
                Term::Var(_) => None,
            })
            .chain(ground.iter().map(String::as_str))
    }

    fn instantiate(&self, binding: &BTreeMap<&str, &str>) -> Atom {
        match self {
            AtomSchema::Ground(a) => a.clone(),
            AtomSchema::Pattern { name, args } => Atom::new(
                name.clone(),
                args.iter()
                    .map(|t| match t {
                        Term::Const(c) => c.clone(),
                        Term::Var(v) => binding[v.as_str()].to_string(),
                    })
                    .collect(),
            ),
        }
    }
}

impl From<&Atom> for AtomSchema {
    fn from(atom: &Atom) -> Self {
        if atom.is_generated() {
            AtomSchema::Ground(atom.clone())
        } else {
            AtomSchema::Pattern {
                name: atom.name().to_string(),
                args: atom.args().iter().cloned().map(Term::Const).collect(),
            }
        }
    }
}

impl fmt::Display for AtomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomSchema::Ground(a) => write!(f, "{a}"),
            AtomSchema::Pattern { name, args } => {
                f.write_str(name)?;
                if !args.is_empty() {
                    let args: Vec<String> = args.iter().map(Term::to_string).collect();
                    write!(f, "({})", args.join(","))?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiteralSchema {
    pub atom: AtomSchema,
    pub positive: bool,
}

impl LiteralSchema {
    fn instantiate(&self, binding: &BTreeMap<&str, &str>) -> Literal {
        Literal { atom: self.atom.instantiate(binding), positive: self.positive }
    }
}

impl From<&Literal> for LiteralSchema {
    fn from(l: &Literal) -> Self {
        LiteralSchema { atom: (&l.atom).into(), positive: l.positive }
    }
}

impl fmt::Display for LiteralSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSchema {
    pub label: Label,
    pub antecedent: Vec<LiteralSchema>,
    pub kind: RuleKind,
    pub head: LiteralSchema,
}

impl RuleSchema {
    /// Variables in order of first occurrence, antecedent first.
    pub fn variables(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for lit in self.antecedent.iter().chain(std::iter::once(&self.head)) {
            for v in lit.atom.variables() {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
        seen
    }

    fn instance_label(&self, vars: &[&str], binding: &BTreeMap<&str, &str>) -> Label {
        if vars.is_empty() {
            return self.label.clone();
        }
        let tuple: Vec<&str> = vars.iter().map(|v| binding[v]).collect();
        let spelling = format!("{}[{}]", self.label, tuple.join(","));
        if self.label.is_generated() {
            Label::generated(spelling)
        } else {
            Label::new(spelling)
        }
    }
}

impl From<&Rule> for RuleSchema {
    fn from(r: &Rule) -> Self {
        RuleSchema {
            label: r.label.clone(),
            antecedent: r.antecedent.iter().map(Into::into).collect(),
            kind: r.kind,
            head: (&r.head).into(),
        }
    }
}

impl fmt::Display for RuleSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.label)?;
        let body: Vec<String> = self.antecedent.iter().map(ToString::to_string).collect();
        if !body.is_empty() {
            write!(f, "{} ", body.join(", "))?;
        }
        write!(f, "{} {}.", self.kind.arrow(), self.head)
    }
}

/// A theory whose facts and rules may mention variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TheorySchema {
    pub facts: Vec<LiteralSchema>,
    pub rules: Vec<RuleSchema>,
    pub superiority: Vec<(Label, Label)>,
}

impl TheorySchema {
    pub fn is_ground(&self) -> bool {
        self.first_variable().is_none()
    }

    fn first_variable(&self) -> Option<&str> {
        self.facts
            .iter()
            .chain(self.rules.iter().flat_map(|r| r.antecedent.iter().chain(std::iter::once(&r.head))))
            .flat_map(|l| l.atom.variables())
            .next()
    }

    /// Constants occurring anywhere in the theory, sorted.
    pub fn universe(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self
            .facts
            .iter()
            .chain(self.rules.iter().flat_map(|r| r.antecedent.iter().chain(std::iter::once(&r.head))))
            .flat_map(|l| l.atom.constants())
            .collect();
        set.into_iter().collect()
    }

    /// Converts a variable-free schema directly.
    pub fn to_theory(&self) -> Result<Theory, GroundError> {
        if let Some(v) = self.first_variable() {
            return Err(GroundError::NotGround(v.to_string()));
        }
        ground(self)
    }
}

impl From<&Theory> for TheorySchema {
    fn from(t: &Theory) -> Self {
        TheorySchema {
            facts: t.facts().map(Into::into).collect(),
            rules: t.rules().map(Into::into).collect(),
            superiority: t.superiority().cloned().collect(),
        }
    }
}

impl fmt::Display for TheorySchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fact in &self.facts {
            writeln!(f, "{fact}.")?;
        }
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        let sorted: BTreeSet<&(Label, Label)> = self.superiority.iter().collect();
        for (a, b) in sorted {
            writeln!(f, "{a} > {b}.")?;
        }
        Ok(())
    }
}

/// All assignments of `universe` constants to `vars`, in lexicographic order.
fn assignments<'a>(vars: &[&'a str], universe: &[&'a str]) -> Vec<BTreeMap<&'a str, &'a str>> {
    let mut out = vec![BTreeMap::new()];
    for var in vars {
        out = out
            .into_iter()
            .flat_map(|partial| {
                universe.iter().map(move |c| {
                    let mut next = partial.clone();
                    next.insert(*var, *c);
                    next
                })
            })
            .collect();
    }
    out
}

/// Instantiates every schema rule and fact over the Herbrand universe.
pub fn ground(schema: &TheorySchema) -> Result<Theory, GroundError> {
    let universe = schema.universe();
    if !schema.is_ground() && universe.is_empty() {
        return Err(GroundError::EmptyUniverse);
    }

    let mut facts = Vec::new();
    for fact in &schema.facts {
        let vars: Vec<&str> = {
            let mut seen = Vec::new();
            for v in fact.atom.variables() {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
            seen
        };
        for binding in assignments(&vars, &universe) {
            facts.push(fact.instantiate(&binding));
        }
    }

    // schema label -> (variables, instances as (binding, instance label))
    let mut instances: BTreeMap<&Label, (Vec<&str>, Vec<(BTreeMap<&str, &str>, Label)>)> = BTreeMap::new();
    let mut rules = Vec::new();
    for rule in &schema.rules {
        let vars = rule.variables();
        let mut inst = Vec::new();
        for binding in assignments(&vars, &universe) {
            let label = rule.instance_label(&vars, &binding);
            rules.push(Rule::new(
                label.clone(),
                rule.antecedent.iter().map(|l| l.instantiate(&binding)),
                rule.kind,
                rule.head.instantiate(&binding),
            ));
            inst.push((binding, label));
        }
        instances.insert(&rule.label, (vars, inst));
    }

    let mut superiority = Vec::new();
    for (sup, inf) in &schema.superiority {
        let (Some((_, sup_inst)), Some((_, inf_inst))) = (instances.get(sup), instances.get(inf)) else {
            let missing = if instances.contains_key(sup) { inf } else { sup };
            return Err(TheoryError::UnknownLabel(missing.clone()).into());
        };
        for (b1, l1) in sup_inst {
            for (b2, l2) in inf_inst {
                let agree = b1.iter().all(|(v, c)| b2.get(v).is_none_or(|c2| c2 == c));
                if agree {
                    superiority.push((l1.clone(), l2.clone()));
                }
            }
        }
    }

    Ok(Theory::new(facts, rules, superiority)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(name: &str, args: &[&str]) -> LiteralSchema {
        let args = args
            .iter()
            .map(|a| {
                if a.starts_with(|c: char| c.is_ascii_uppercase()) {
                    Term::Var(a.to_string())
                } else {
                    Term::Const(a.to_string())
                }
            })
            .collect();
        LiteralSchema { atom: AtomSchema::Pattern { name: name.into(), args }, positive: true }
    }

    fn ground_lit(name: &str, args: &[&str]) -> Literal {
        Literal::pos(Atom::new(name, args.iter().map(|s| s.to_string()).collect()))
    }

    #[test]
    fn one_instance_per_constant() {
        let schema = TheorySchema {
            facts: vec![pat("p", &["a"]), pat("p", &["b"])],
            rules: vec![RuleSchema {
                label: Label::new("r"),
                antecedent: vec![pat("p", &["X"])],
                kind: RuleKind::Defeasible,
                head: pat("q", &["X"]),
            }],
            superiority: vec![],
        };
        let t = ground(&schema).unwrap();
        let labels: Vec<String> = t.rules().map(|r| r.label.to_string()).collect();
        assert_eq!(labels, ["r[a]", "r[b]"]);
        let r_b = t.rule(&Label::new("r[b]")).unwrap();
        assert_eq!(r_b.head, ground_lit("q", &["b"]));
        assert!(r_b.antecedent.contains(&ground_lit("p", &["b"])));
    }

    #[test]
    fn shared_variables_align_superiority_and_unshared_cross() {
        let schema = TheorySchema {
            facts: vec![pat("c", &["a"]), pat("c", &["b"])],
            rules: vec![
                RuleSchema {
                    label: Label::new("r"),
                    antecedent: vec![pat("c", &["X"])],
                    kind: RuleKind::Defeasible,
                    head: pat("q", &["X"]),
                },
                RuleSchema {
                    label: Label::new("s"),
                    antecedent: vec![pat("c", &["X"]), pat("c", &["Y"])],
                    kind: RuleKind::Defeasible,
                    head: LiteralSchema { positive: false, ..pat("q", &["X"]) },
                },
            ],
            superiority: vec![(Label::new("r"), Label::new("s"))],
        };
        let t = ground(&schema).unwrap();
        let pairs: Vec<String> = t.superiority().map(|(a, b)| format!("{a}>{b}")).collect();
        assert_eq!(pairs, ["r[a]>s[a,a]", "r[a]>s[a,b]", "r[b]>s[b,a]", "r[b]>s[b,b]"]);
    }

    #[test]
    fn empty_universe_is_an_error() {
        let schema = TheorySchema {
            facts: vec![],
            rules: vec![RuleSchema {
                label: Label::new("r"),
                antecedent: vec![pat("p", &["X"])],
                kind: RuleKind::Defeasible,
                head: pat("q", &["X"]),
            }],
            superiority: vec![],
        };
        assert_eq!(ground(&schema).unwrap_err(), GroundError::EmptyUniverse);
        assert!(matches!(schema.to_theory(), Err(GroundError::NotGround(v)) if v == "X"));
    }

    #[test]
    fn ground_input_passes_through_and_grounding_is_idempotent() {
        let schema = TheorySchema {
            facts: vec![pat("p", &["a"])],
            rules: vec![RuleSchema {
                label: Label::new("r"),
                antecedent: vec![pat("p", &["a"])],
                kind: RuleKind::Strict,
                head: pat("q", &[]),
            }],
            superiority: vec![],
        };
        let once = ground(&schema).unwrap();
        assert_eq!(TheorySchema::from(&once), schema);
        assert_eq!(ground(&TheorySchema::from(&once)).unwrap(), once);
    }
}
