//! The three conclusion-preserving transformations and their composition.
//!
//! - [`normal`] removes facts and separates definite from defeasible
//!   reasoning through primed copies of the strict part.
//! - [`elim_dft`] replaces defeaters by defeasible rules over two fresh
//!   atoms per proposition.
//! - [`elim_sup`] replaces the superiority relation by defeasible rules over
//!   two fresh atoms per rule.
//! - [`pipeline`] applies them in that order.
//!
//! All fresh symbols use the reserved `$` namespace, so they cannot clash
//! with user symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::theory::{cycle_text, Atom, Label, Literal, Rule, RuleKind, Theory, TheoryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("already transformed: input contains generated symbol `{0}`")]
    AlreadyTransformed(String),
    #[error("elim_sup requires normal form: {0}")]
    NotNormal(String),
    #[error("elim_sup requires acyclic superiority: cycle {}", cycle_text(.0))]
    CyclicSuperiority(Vec<Label>),
    #[error("elim_sup requires superiority only between rules with complementary heads: `{0} > {1}`")]
    NonComplementary(Label, Label),
    #[error("pipeline requires a well-formed theory: {0}")]
    NotWellFormed(String),
    #[error("elim_dft output violates normal form before elim_sup: {0}")]
    IntermediateNotNormal(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Normal,
    ElimDft,
    ElimSup,
    Pipeline,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Normal => "normal",
            Stage::ElimDft => "elim_dft",
            Stage::ElimSup => "elim_sup",
            Stage::Pipeline => "pipeline",
        }
    }
}

/// A symbol of the output theory.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Atom(Atom),
    Label(Label),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Atom(a) => a.fmt(f),
            Symbol::Label(l) => l.fmt(f),
        }
    }
}

/// The input item an output symbol was produced from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Fact(Literal),
    Rule(Label),
    Superiority(Label, Label),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub rules: usize,
    pub facts: usize,
    pub superiority: usize,
}

impl Counts {
    pub fn of(t: &Theory) -> Self {
        Counts { rules: t.rule_count(), facts: t.fact_count(), superiority: t.superiority_count() }
    }

    fn ratio(num: usize, den: usize) -> f64 {
        if den == 0 {
            if num == 0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            num as f64 / den as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformReport {
    pub stage: Stage,
    pub input: Counts,
    pub output: Counts,
    /// Every generated symbol of the output, with all items it came from.
    pub origins: BTreeMap<Symbol, BTreeSet<Origin>>,
    /// Per-stage reports when this is a pipeline report.
    pub stages: Vec<TransformReport>,
}

impl TransformReport {
    fn new(stage: Stage, input: &Theory) -> Self {
        TransformReport { stage, input: Counts::of(input), output: Counts::default(), origins: BTreeMap::new(), stages: Vec::new() }
    }

    /// Output rules over input rules plus facts (facts count as rules).
    pub fn growth_factor(&self) -> f64 {
        Counts::ratio(self.output.rules, self.input.rules + self.input.facts)
    }

    /// As [`growth_factor`](Self::growth_factor), with superiority pairs
    /// counted on both sides.
    pub fn size_factor(&self) -> f64 {
        let size = |c: &Counts| c.rules + c.facts + c.superiority;
        Counts::ratio(size(&self.output), size(&self.input))
    }

    fn record_rule(&mut self, rule: &Rule, origin: &Origin) {
        if rule.label.is_generated() {
            self.note(Symbol::Label(rule.label.clone()), origin);
        }
        for lit in rule.literals() {
            if lit.atom.is_generated() {
                self.note(Symbol::Atom(lit.atom.clone()), origin);
            }
        }
    }

    fn note(&mut self, symbol: Symbol, origin: &Origin) {
        self.origins.entry(symbol).or_default().insert(origin.clone());
    }

    fn finish(mut self, output: &Theory) -> Self {
        self.output = Counts::of(output);
        for fact in output.facts() {
            if fact.atom.is_generated() {
                self.note(Symbol::Atom(fact.atom.clone()), &Origin::Fact(fact.clone()));
            }
        }
        self
    }
}

impl fmt::Display for TransformReport {
    /// Comment lines, so the report can follow a theory in a `.dfl` stream.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts = |c: &Counts| format!("{} rules, {} facts, {} superiority pairs", c.rules, c.facts, c.superiority);
        writeln!(f, "% stage: {}", self.stage.name())?;
        writeln!(f, "% input: {}", counts(&self.input))?;
        writeln!(f, "% output: {}", counts(&self.output))?;
        writeln!(f, "% growth factor: {:.3}", self.growth_factor())?;
        writeln!(f, "% size factor: {:.3}", self.size_factor())?;
        writeln!(f, "% generated symbols: {}", self.origins.len())?;
        for stage in &self.stages {
            writeln!(
                f,
                "% {}: growth factor {:.3}, size factor {:.3}",
                stage.stage.name(),
                stage.growth_factor(),
                stage.size_factor()
            )?;
        }
        Ok(())
    }
}

fn generated_atom(tag: &str, inner: &impl fmt::Display) -> Atom {
    Atom::generated(format!("${tag}({inner})"))
}

fn suffixed(label: &Label, suffix: &str) -> Label {
    Label::generated(format!("{label}${suffix}"))
}

/// `p′`, extended to literals by keeping the polarity.
fn primed(l: &Literal) -> Literal {
    l.map_atom(|a| generated_atom("p", a))
}

/// `$pl(p)` / `$mi(p)` for the atom of `l`.
fn plus(l: &Literal) -> Atom {
    generated_atom("pl", &l.atom)
}

fn minus(l: &Literal) -> Atom {
    generated_atom("mi", &l.atom)
}

fn inf_plus(r: &Label) -> Atom {
    generated_atom("ip", r)
}

fn inf_minus(r: &Label) -> Atom {
    generated_atom("im", r)
}

fn first_generated(t: &Theory, pred: impl Fn(&Atom) -> bool) -> Option<String> {
    t.facts()
        .map(|f| &f.atom)
        .chain(t.rules().flat_map(|r| r.literals().map(|l| &l.atom)))
        .find(|a| pred(a))
        .map(Atom::to_string)
}

/// Removes facts and routes definite reasoning through primed atoms.
pub fn normal(t: &Theory) -> Result<(Theory, TransformReport), TransformError> {
    if let Some(sym) = first_generated(t, Atom::is_generated)
        .or_else(|| t.rules().find(|r| r.label.is_generated()).map(|r| r.label.to_string()))
    {
        return Err(TransformError::AlreadyTransformed(sym));
    }
    let mut report = TransformReport::new(Stage::Normal, t);
    let mut rules = Vec::new();
    let mut push = |rules: &mut Vec<Rule>, rule: Rule, origin: Origin| {
        report.record_rule(&rule, &origin);
        rules.push(rule);
    };
    // Literals needing a bridge rule, with what made them need one.
    let mut bridged: IndexSet<Literal> = t.facts().cloned().collect();
    let mut bridge_sources: BTreeMap<Literal, Vec<Origin>> = BTreeMap::new();
    for f in t.facts() {
        bridge_sources.entry(f.clone()).or_default().push(Origin::Fact(f.clone()));
    }

    for r in t.rules() {
        let origin = Origin::Rule(r.label.clone());
        if r.kind == RuleKind::Strict {
            let primed_rule =
                Rule::new(suffixed(&r.label, "p"), r.antecedent.iter().map(primed), RuleKind::Strict, primed(&r.head));
            push(&mut rules, primed_rule, origin.clone());
            push(&mut rules, Rule::new(r.label.clone(), r.antecedent.iter().cloned(), RuleKind::Defeasible, r.head.clone()), origin.clone());
            bridged.insert(r.head.clone());
            bridge_sources.entry(r.head.clone()).or_default().push(origin);
        } else {
            push(&mut rules, r.clone(), origin);
        }
    }
    for f in t.facts() {
        let rule = Rule::new(Label::generated(format!("$f({f})")), [], RuleKind::Strict, primed(f));
        push(&mut rules, rule, Origin::Fact(f.clone()));
    }
    for p in &bridged {
        let rule = Rule::new(Label::generated(format!("$b({p})")), [primed(p)], RuleKind::Strict, p.clone());
        for origin in &bridge_sources[p] {
            report.record_rule(&rule, origin);
        }
        rules.push(rule);
    }
    let out = Theory::new([], rules, t.superiority().cloned())?;
    let report = report.finish(&out);
    Ok((out, report))
}

/// Replaces defeaters using `$pl(p)` and `$mi(p)`.
pub fn elim_dft(t: &Theory) -> Result<(Theory, TransformReport), TransformError> {
    let reserved = |a: &Atom| a.name().starts_with("$pl(") || a.name().starts_with("$mi(");
    if let Some(sym) = first_generated(t, reserved) {
        return Err(TransformError::AlreadyTransformed(sym));
    }
    let mut report = TransformReport::new(Stage::ElimDft, t);
    let mut rules = Vec::new();
    let mut images: BTreeMap<&Label, Vec<(Label, Literal)>> = BTreeMap::new();
    for r in t.rules() {
        let origin = Origin::Rule(r.label.clone());
        let body = || r.antecedent.iter().cloned();
        let h = &r.head;
        let produced = match r.kind {
            RuleKind::Defeater if h.positive => {
                vec![Rule::new(r.label.clone(), body(), RuleKind::Defeasible, Literal::neg(minus(h)))]
            }
            RuleKind::Defeater => {
                vec![Rule::new(r.label.clone(), body(), RuleKind::Defeasible, Literal::neg(plus(h)))]
            }
            kind if h.positive => vec![
                Rule::new(suffixed(&r.label, "+"), body(), kind, Literal::pos(plus(h))),
                Rule::new(suffixed(&r.label, "-"), body(), kind, Literal::neg(minus(h))),
                Rule::new(r.label.clone(), [Literal::pos(plus(h))], kind, h.clone()),
            ],
            kind => vec![
                Rule::new(suffixed(&r.label, "-"), body(), kind, Literal::pos(minus(h))),
                Rule::new(suffixed(&r.label, "+"), body(), kind, Literal::neg(plus(h))),
                Rule::new(r.label.clone(), [Literal::pos(minus(h))], kind, h.clone()),
            ],
        };
        let image = images.entry(&r.label).or_default();
        for rule in produced {
            report.record_rule(&rule, &origin);
            image.push((rule.label.clone(), rule.head.clone()));
            rules.push(rule);
        }
    }
    let mut superiority = BTreeSet::new();
    for (r, s) in t.superiority() {
        for (r2, rh) in &images[r] {
            for (s2, sh) in &images[s] {
                if *rh == sh.complement() {
                    superiority.insert((r2.clone(), s2.clone()));
                }
            }
        }
    }
    let out = Theory::new(t.facts().cloned(), rules, superiority)?;
    let report = report.finish(&out);
    Ok((out, report))
}

/// Checks the preconditions of [`elim_sup`].
fn elim_sup_precondition(t: &Theory) -> Result<(), TransformError> {
    let normal = t.check_normal();
    if !normal.no_facts() {
        return Err(TransformError::NotNormal(format!("theory has {} facts", normal.fact_count)));
    }
    if let Some(l) = normal.mixed_literals.first() {
        return Err(TransformError::NotNormal(format!("`{l}` is defined by several strict rules and other rules")));
    }
    if let Some(l) = normal.strict_in_superiority.first() {
        return Err(TransformError::NotNormal(format!("strict rule `{l}` occurs in the superiority relation")));
    }
    let wf = t.check_well_formed();
    if let Some(cycle) = wf.cycle {
        return Err(TransformError::CyclicSuperiority(cycle));
    }
    if let Some((a, b)) = wf.non_complementary.into_iter().next() {
        return Err(TransformError::NonComplementary(a, b));
    }
    Ok(())
}

/// Replaces the superiority relation using `$ip(r)` and `$im(r)`.
pub fn elim_sup(t: &Theory) -> Result<(Theory, TransformReport), TransformError> {
    elim_sup_precondition(t)?;
    let reserved = |a: &Atom| a.name().starts_with("$ip(") || a.name().starts_with("$im(");
    if let Some(sym) = first_generated(t, reserved) {
        return Err(TransformError::AlreadyTransformed(sym));
    }
    let mut report = TransformReport::new(Stage::ElimSup, t);
    let mut rules = Vec::new();
    let mut push = |rules: &mut Vec<Rule>, rule: Rule, origin: &Origin| {
        report.record_rule(&rule, origin);
        rules.push(rule);
    };
    for r in t.rules() {
        let origin = Origin::Rule(r.label.clone());
        let body = || r.antecedent.iter().cloned();
        let not_ip = Literal::neg(inf_plus(&r.label));
        let not_im = Literal::neg(inf_minus(&r.label));
        match r.kind {
            RuleKind::Strict => push(&mut rules, r.clone(), &origin),
            RuleKind::Defeasible => {
                for rule in [
                    Rule::new(suffixed(&r.label, "a+"), body(), RuleKind::Defeasible, not_ip.clone()),
                    Rule::new(suffixed(&r.label, "b+"), [not_ip], RuleKind::Defeasible, r.head.clone()),
                    Rule::new(suffixed(&r.label, "a-"), body(), RuleKind::Defeasible, not_im.clone()),
                    Rule::new(suffixed(&r.label, "b-"), [not_im], RuleKind::Defeasible, r.head.clone()),
                ] {
                    push(&mut rules, rule, &origin);
                }
            }
            RuleKind::Defeater => {
                push(&mut rules, Rule::new(suffixed(&r.label, "a-"), body(), RuleKind::Defeasible, not_im.clone()), &origin);
                push(&mut rules, Rule::new(suffixed(&r.label, "b-"), [not_im], RuleKind::Defeater, r.head.clone()), &origin);
            }
        }
    }
    for (r1, r2) in t.superiority() {
        let origin = Origin::Superiority(r1.clone(), r2.clone());
        let plus_rule = Rule::new(
            Label::generated(format!("$s+({r1},{r2})")),
            [Literal::neg(inf_plus(r1))],
            RuleKind::Defeasible,
            Literal::pos(inf_plus(r2)),
        );
        let minus_rule = Rule::new(
            Label::generated(format!("$s-({r1},{r2})")),
            [Literal::neg(inf_minus(r1))],
            RuleKind::Defeasible,
            Literal::pos(inf_minus(r2)),
        );
        push(&mut rules, plus_rule, &origin);
        push(&mut rules, minus_rule, &origin);
    }
    let out = Theory::new([], rules, [])?;
    let report = report.finish(&out);
    Ok((out, report))
}

/// `normal`, then `elim_dft`, then `elim_sup`, on a well-formed theory.
///
/// The `elim_dft` output is re-validated before the last stage; a violation
/// is reported instead of being repaired.
pub fn pipeline(t: &Theory) -> Result<(Theory, TransformReport), TransformError> {
    let wf = t.check_well_formed();
    if let Some(cycle) = &wf.cycle {
        return Err(TransformError::NotWellFormed(format!("cyclic superiority {}", cycle_text(cycle))));
    }
    if let Some((a, b)) = wf.non_complementary.first() {
        return Err(TransformError::NotWellFormed(format!("`{a} > {b}` relates rules without complementary heads")));
    }
    let (t1, r1) = normal(t)?;
    let (t2, r2) = elim_dft(&t1)?;
    let wf2 = t2.check_well_formed();
    let n2 = t2.check_normal();
    if !n2.is_normal() || !wf2.is_well_formed() {
        return Err(TransformError::IntermediateNotNormal(format!("{n2:?} {wf2:?}")));
    }
    let (t3, r3) = elim_sup(&t2)?;
    let mut report = TransformReport::new(Stage::Pipeline, t);
    for stage in [&r1, &r2, &r3] {
        for (sym, origins) in &stage.origins {
            report.origins.entry(sym.clone()).or_default().extend(origins.iter().cloned());
        }
    }
    report.stages = vec![r1, r2, r3];
    let report = report.finish(&t3);
    Ok((t3, report))
}

/// Applies one stage by name.
pub fn apply(stage: Stage, t: &Theory) -> Result<(Theory, TransformReport), TransformError> {
    match stage {
        Stage::Normal => normal(t),
        Stage::ElimDft => elim_dft(t),
        Stage::ElimSup => elim_sup(t),
        Stage::Pipeline => pipeline(t),
    }
}
