//! Ground defeasible theories: atoms, literals, rules, the superiority
//! relation, and the structural checks (well-formedness and normal form).
//!
//! Transformation-introduced symbols live in a namespace of their own: every
//! generated atom name and every generated label contains the reserved
//! character [`GENERATED_PREFIX`], which the surface syntax never accepts in
//! user input. Freshness of generated names therefore holds by construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

/// Reserved character marking generated atoms and labels.
pub const GENERATED_PREFIX: char = '$';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("duplicate label `{0}`")]
    DuplicateLabel(Label),
    #[error("unknown label `{0}` in superiority relation")]
    UnknownLabel(Label),
    #[error("label `{0}` names different rules in the two theories")]
    ConflictingRule(Label),
}

/// A ground proposition, e.g. `flies(tweety)`.
///
/// Generated atoms carry their whole spelling (such as `$p(flies(tweety))`)
/// in `name` and have no arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    name: String,
    args: Vec<String>,
}

impl Atom {
    /// Builds a user atom.
    ///
    /// Panics if `name` is empty or contains the reserved generated-symbol
    /// character; the parser rejects such input before it gets here.
    pub fn new(name: impl Into<String>, args: Vec<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "atom name must be nonempty");
        assert!(
            !name.contains(GENERATED_PREFIX) && args.iter().all(|a| !a.contains(GENERATED_PREFIX)),
            "user atoms may not contain `{GENERATED_PREFIX}`"
        );
        Atom { name, args }
    }

    /// A nullary user atom.
    pub fn prop(name: impl Into<String>) -> Self {
        Atom::new(name, Vec::new())
    }

    /// Builds a generated atom from its full spelling.
    pub(crate) fn generated(spelling: String) -> Self {
        debug_assert!(spelling.starts_with(GENERATED_PREFIX));
        Atom { name: spelling, args: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn args(&self) -> &[String] {
        &self.args
    }

    pub fn is_generated(&self) -> bool {
        self.name.starts_with(GENERATED_PREFIX)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

/// A signed atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }

    /// The complementary literal `~q`.
    pub fn complement(&self) -> Literal {
        Literal { atom: self.atom.clone(), positive: !self.positive }
    }

    /// Maps the atom, keeping the polarity.
    pub fn map_atom(&self, f: impl FnOnce(&Atom) -> Atom) -> Literal {
        Literal { atom: f(&self.atom), positive: self.positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// The three arrow kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    Strict,
    Defeasible,
    Defeater,
}

impl RuleKind {
    pub const ALL: &'static [RuleKind] = &[RuleKind::Strict, RuleKind::Defeasible, RuleKind::Defeater];
    pub const SUPPORTIVE: &'static [RuleKind] = &[RuleKind::Strict, RuleKind::Defeasible];

    pub fn arrow(self) -> &'static str {
        match self {
            RuleKind::Strict => "->",
            RuleKind::Defeasible => "=>",
            RuleKind::Defeater => "~>",
        }
    }
}

/// A rule label. Generated labels contain [`GENERATED_PREFIX`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    /// Panics if `name` is empty or contains the reserved character.
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "label must be nonempty");
        assert!(!name.contains(GENERATED_PREFIX), "user labels may not contain `{GENERATED_PREFIX}`");
        Label(name)
    }

    pub(crate) fn generated(spelling: String) -> Self {
        debug_assert!(spelling.contains(GENERATED_PREFIX));
        Label(spelling)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_generated(&self) -> bool {
        self.0.contains(GENERATED_PREFIX)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub label: Label,
    pub antecedent: IndexSet<Literal>,
    pub kind: RuleKind,
    pub head: Literal,
}

impl Rule {
    pub fn new(
        label: Label,
        antecedent: impl IntoIterator<Item = Literal>,
        kind: RuleKind,
        head: Literal,
    ) -> Self {
        Rule { label, antecedent: antecedent.into_iter().collect(), kind, head }
    }

    pub fn is_generated(&self) -> bool {
        self.label.is_generated() || self.literals().any(|l| l.atom.is_generated())
    }

    /// Antecedent literals followed by the head.
    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.antecedent.iter().chain(std::iter::once(&self.head))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.label)?;
        for (i, lit) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{lit}")?;
        }
        if !self.antecedent.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "{} {}.", self.kind.arrow(), self.head)
    }
}

/// The language of a theory: its user atoms and user labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sigma {
    pub atoms: BTreeSet<Atom>,
    pub labels: BTreeSet<Label>,
}

impl Sigma {
    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        Sigma { atoms: atoms.into_iter().collect(), labels: BTreeSet::new() }
    }

    pub fn union(&self, other: &Sigma) -> Sigma {
        Sigma {
            atoms: self.atoms.union(&other.atoms).cloned().collect(),
            labels: self.labels.union(&other.labels).cloned().collect(),
        }
    }
}

/// A ground defeasible theory `(F, R, >)`.
///
/// Equality is structural and order-insensitive: two theories are equal when
/// they have the same facts, the same rules under the same labels, and the
/// same superiority pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Theory {
    facts: IndexSet<Literal>,
    rules: IndexMap<Label, Rule>,
    superiority: BTreeSet<(Label, Label)>,
}

impl Theory {
    pub fn new(
        facts: impl IntoIterator<Item = Literal>,
        rules: impl IntoIterator<Item = Rule>,
        superiority: impl IntoIterator<Item = (Label, Label)>,
    ) -> Result<Self, TheoryError> {
        let mut by_label = IndexMap::new();
        for rule in rules {
            if by_label.contains_key(&rule.label) {
                return Err(TheoryError::DuplicateLabel(rule.label));
            }
            by_label.insert(rule.label.clone(), rule);
        }
        let superiority: BTreeSet<(Label, Label)> = superiority.into_iter().collect();
        for (sup, inf) in &superiority {
            for label in [sup, inf] {
                if !by_label.contains_key(label) {
                    return Err(TheoryError::UnknownLabel(label.clone()));
                }
            }
        }
        Ok(Theory { facts: facts.into_iter().collect(), rules: by_label, superiority })
    }

    pub fn facts(&self) -> impl Iterator<Item = &Literal> {
        self.facts.iter()
    }

    /// Rules in stored order.
    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.values()
    }

    pub fn rule(&self, label: &Label) -> Option<&Rule> {
        self.rules.get(label)
    }

    /// Superiority pairs `(superior, inferior)` in lexicographic order.
    pub fn superiority(&self) -> impl Iterator<Item = &(Label, Label)> {
        self.superiority.iter()
    }

    pub fn is_superior(&self, sup: &Label, inf: &Label) -> bool {
        self.superiority.contains(&(sup.clone(), inf.clone()))
    }

    pub fn fact_count(&self) -> usize {
        self.facts.len()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn superiority_count(&self) -> usize {
        self.superiority.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty() && self.rules.is_empty() && self.superiority.is_empty()
    }

    pub fn has_defeaters(&self) -> bool {
        self.rules().any(|r| r.kind == RuleKind::Defeater)
    }

    /// `R[q]` restricted to the given kinds.
    pub fn rules_for(&self, q: &Literal, kinds: &[RuleKind]) -> Vec<&Rule> {
        self.rules().filter(|r| r.head == *q && kinds.contains(&r.kind)).collect()
    }

    /// Every atom occurring in facts or rules, generated ones included.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.facts
            .iter()
            .chain(self.rules().flat_map(|r| r.literals()))
            .map(|l| l.atom.clone())
            .collect()
    }

    pub fn sigma(&self) -> Sigma {
        Sigma {
            atoms: self.atoms().into_iter().filter(|a| !a.is_generated()).collect(),
            labels: self.rules.keys().filter(|l| !l.is_generated()).cloned().collect(),
        }
    }

    /// True when any atom or label was introduced by a transformation.
    pub fn has_generated_symbols(&self) -> bool {
        self.facts.iter().any(|l| l.atom.is_generated()) || self.rules().any(Rule::is_generated)
    }

    /// Set union of two theories. A label shared by both sides must name the
    /// same rule.
    pub fn union(&self, other: &Theory) -> Result<Theory, TheoryError> {
        let mut out = self.clone();
        out.facts.extend(other.facts.iter().cloned());
        for rule in other.rules() {
            match out.rules.get(&rule.label) {
                Some(existing) if existing != rule => {
                    return Err(TheoryError::ConflictingRule(rule.label.clone()))
                }
                Some(_) => {}
                None => {
                    out.rules.insert(rule.label.clone(), rule.clone());
                }
            }
        }
        out.superiority.extend(other.superiority.iter().cloned());
        Ok(out)
    }

    pub fn check_well_formed(&self) -> WellFormedReport {
        let non_complementary: Vec<(Label, Label)> = self
            .superiority
            .iter()
            .filter(|(a, b)| self.rules[a].head != self.rules[b].head.complement())
            .cloned()
            .collect();
        WellFormedReport { cycle: self.superiority_cycle(), non_complementary }
    }

    /// A cycle of the superiority relation, if one exists, as the list of
    /// labels along it.
    fn superiority_cycle(&self) -> Option<Vec<Label>> {
        let mut succ: BTreeMap<&Label, Vec<&Label>> = BTreeMap::new();
        for (a, b) in &self.superiority {
            succ.entry(a).or_default().push(b);
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: BTreeMap<&Label, u8> = BTreeMap::new();
        let mut path: Vec<&Label> = Vec::new();

        fn visit<'a>(
            node: &'a Label,
            succ: &BTreeMap<&'a Label, Vec<&'a Label>>,
            state: &mut BTreeMap<&'a Label, u8>,
            path: &mut Vec<&'a Label>,
        ) -> Option<Vec<Label>> {
            state.insert(node, 1);
            path.push(node);
            for &next in succ.get(node).into_iter().flatten() {
                match state.get(next).copied().unwrap_or(0) {
                    1 => {
                        let start = path.iter().position(|l| *l == next).unwrap();
                        return Some(path[start..].iter().map(|l| (*l).clone()).collect());
                    }
                    0 => {
                        if let Some(c) = visit(next, succ, state, path) {
                            return Some(c);
                        }
                    }
                    _ => {}
                }
            }
            path.pop();
            state.insert(node, 2);
            None
        }

        for &start in succ.keys() {
            if state.get(start).copied().unwrap_or(0) == 0 {
                if let Some(c) = visit(start, &succ, &mut state, &mut path) {
                    return Some(c);
                }
            }
        }
        None
    }

    pub fn check_normal(&self) -> NormalReport {
        let mut strict_count: IndexMap<&Literal, (usize, usize)> = IndexMap::new();
        for rule in self.rules() {
            let entry = strict_count.entry(&rule.head).or_default();
            if rule.kind == RuleKind::Strict {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
        let mixed_literals = strict_count
            .into_iter()
            .filter(|(_, (strict, other))| *other > 0 && *strict > 1)
            .map(|(l, _)| l.clone())
            .collect();
        let strict_in_superiority = self
            .superiority
            .iter()
            .flat_map(|(a, b)| [a, b])
            .filter(|l| self.rules[*l].kind == RuleKind::Strict)
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        NormalReport { mixed_literals, strict_in_superiority, fact_count: self.facts.len() }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fact in &self.facts {
            writeln!(f, "{fact}.")?;
        }
        for rule in self.rules() {
            writeln!(f, "{rule}")?;
        }
        for (a, b) in &self.superiority {
            writeln!(f, "{a} > {b}.")?;
        }
        Ok(())
    }
}

/// Renders a superiority cycle, repeating its first label at the end.
pub fn cycle_text(cycle: &[Label]) -> String {
    let mut names: Vec<&str> = cycle.iter().map(Label::as_str).collect();
    names.extend(cycle.first().map(Label::as_str));
    names.join(" > ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WellFormedReport {
    pub cycle: Option<Vec<Label>>,
    /// Superiority pairs whose rules do not have complementary heads.
    pub non_complementary: Vec<(Label, Label)>,
}

impl WellFormedReport {
    pub fn acyclic(&self) -> bool {
        self.cycle.is_none()
    }

    pub fn superiority_only_on_complementary_heads(&self) -> bool {
        self.non_complementary.is_empty()
    }

    pub fn is_well_formed(&self) -> bool {
        self.acyclic() && self.superiority_only_on_complementary_heads()
    }

    /// The cycle as `r1 > r2 > r1`.
    pub fn cycle_text(&self) -> Option<String> {
        self.cycle.as_ref().map(|c| cycle_text(c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalReport {
    /// Literals defined by non-strict rules together with more than one
    /// strict rule.
    pub mixed_literals: Vec<Literal>,
    pub strict_in_superiority: Vec<Label>,
    pub fact_count: usize,
}

impl NormalReport {
    pub fn literal_rule_condition(&self) -> bool {
        self.mixed_literals.is_empty()
    }

    pub fn no_strict_in_sup(&self) -> bool {
        self.strict_in_superiority.is_empty()
    }

    pub fn no_facts(&self) -> bool {
        self.fact_count == 0
    }

    pub fn is_normal(&self) -> bool {
        self.literal_rule_condition() && self.no_strict_in_sup() && self.no_facts()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> Literal {
        match s.strip_prefix('~') {
            Some(rest) => Literal::neg(Atom::prop(rest)),
            None => Literal::pos(Atom::prop(s)),
        }
    }

    fn rule(label: &str, body: &[&str], kind: RuleKind, head: &str) -> Rule {
        Rule::new(Label::new(label), body.iter().map(|b| lit(b)), kind, lit(head))
    }

    fn sup(a: &str, b: &str) -> (Label, Label) {
        (Label::new(a), Label::new(b))
    }

    #[test]
    fn complement_flips_polarity() {
        assert_eq!(lit("p").complement(), lit("~p"));
        assert_eq!(lit("~p").complement(), lit("p"));
        let flies = Literal::pos(Atom::new("flies", vec!["tweety".into()]));
        assert_eq!(flies.complement().complement(), flies);
    }

    #[test]
    fn rules_for_filters_by_head_and_kind() {
        use RuleKind::*;
        let t = Theory::new(
            [],
            [
                rule("r1", &["gap"], Strict, "p"),
                rule("r4", &["b"], Defeasible, "f"),
                rule("r6", &["gap"], Defeater, "f"),
            ],
            [],
        )
        .unwrap();
        let labels = |rs: Vec<&Rule>| rs.into_iter().map(|r| r.label.to_string()).collect::<Vec<_>>();
        assert_eq!(labels(t.rules_for(&lit("f"), RuleKind::SUPPORTIVE)), ["r4"]);
        assert_eq!(labels(t.rules_for(&lit("f"), RuleKind::ALL)), ["r4", "r6"]);
        assert!(t.rules_for(&lit("zzz"), RuleKind::ALL).is_empty());
    }

    #[test]
    fn duplicate_and_unknown_labels_rejected() {
        use RuleKind::*;
        let err = Theory::new([], [rule("r", &[], Strict, "p"), rule("r", &[], Defeasible, "q")], []);
        assert_eq!(err.unwrap_err(), TheoryError::DuplicateLabel(Label::new("r")));
        let err = Theory::new([], [rule("r", &[], Strict, "p")], [sup("r", "s")]);
        assert_eq!(err.unwrap_err(), TheoryError::UnknownLabel(Label::new("s")));
    }

    #[test]
    fn well_formedness_reports() {
        use RuleKind::*;
        let dd = Theory::new(
            [],
            [rule("r1", &[], Defeasible, "p"), rule("r2", &[], Defeasible, "~p")],
            [sup("r1", "r2"), sup("r2", "r1")],
        )
        .unwrap();
        let report = dd.check_well_formed();
        assert!(!report.acyclic());
        assert!(report.superiority_only_on_complementary_heads());

        let mismatched = Theory::new(
            [],
            [rule("r", &[], Defeasible, "p"), rule("s", &[], Defeasible, "q")],
            [sup("r", "s")],
        )
        .unwrap();
        let report = mismatched.check_well_formed();
        assert!(report.acyclic());
        assert!(!report.superiority_only_on_complementary_heads());

        let self_loop =
            Theory::new([], [rule("r", &[], Defeasible, "p")], [sup("r", "r")]).unwrap();
        assert!(!self_loop.check_well_formed().acyclic());
    }

    #[test]
    fn normal_form_conditions() {
        use RuleKind::*;
        assert!(Theory::default().check_normal().is_normal());

        let two_strict_plus_defeasible = Theory::new(
            [],
            [rule("a", &[], Strict, "p"), rule("b", &["q"], Strict, "p"), rule("c", &[], Defeasible, "p")],
            [],
        )
        .unwrap();
        let report = two_strict_plus_defeasible.check_normal();
        assert!(!report.literal_rule_condition());
        assert_eq!(report.mixed_literals, vec![lit("p")]);

        let only_strict =
            Theory::new([], [rule("a", &[], Strict, "p"), rule("b", &["q"], Strict, "p")], []).unwrap();
        assert!(only_strict.check_normal().is_normal());

        let strict_in_sup = Theory::new(
            [lit("e")],
            [rule("a", &[], Strict, "p"), rule("b", &[], Defeasible, "~p")],
            [sup("b", "a")],
        )
        .unwrap();
        let report = strict_in_sup.check_normal();
        assert!(!report.no_strict_in_sup());
        assert!(!report.no_facts());
    }

    #[test]
    fn union_merges_identical_rules_and_rejects_conflicts() {
        use RuleKind::*;
        let a = Theory::new([lit("x")], [rule("r", &[], Strict, "p")], []).unwrap();
        let b = Theory::new([], [rule("r", &[], Strict, "p"), rule("s", &[], Defeasible, "q")], []).unwrap();
        assert_eq!(a.union(&b).unwrap().rule_count(), 2);
        let c = Theory::new([], [rule("r", &[], Defeasible, "p")], []).unwrap();
        assert_eq!(a.union(&c).unwrap_err(), TheoryError::ConflictingRule(Label::new("r")));
    }

    #[test]
    fn sigma_excludes_generated_symbols() {
        use RuleKind::*;
        let gen = Atom::generated("$p(a)".into());
        let t = Theory::new(
            [],
            [
                Rule::new(Label::generated("r$p".into()), [Literal::pos(gen.clone())], Strict, lit("b")),
                rule("r", &["a"], Defeasible, "b"),
            ],
            [],
        )
        .unwrap();
        let sigma = t.sigma();
        assert_eq!(sigma.atoms, [Atom::prop("a"), Atom::prop("b")].into_iter().collect());
        assert_eq!(sigma.labels, [Label::new("r")].into_iter().collect());
        assert!(t.atoms().contains(&gen));
        assert!(t.has_generated_symbols());
    }
}
