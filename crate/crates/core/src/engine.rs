//! Conclusion engine: the least fixpoint of the four inference conditions
//! `+Δ`, `−Δ`, `+∂`, `−∂` over a ground theory.
//!
//! Every condition only asks whether tagged literals are already present, so
//! the one-step operator is monotone and its least fixpoint is exactly the
//! set of conclusions that have a derivation. Non-membership therefore means
//! "not provable", without any proof search.
//!
//! Evaluation is a worklist iteration: a literal is re-examined only when a
//! conclusion about a literal it depends on (through a rule body, itself, or
//! its complement) has just been added. Each pass over the current worklist
//! is one round.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::theory::{Atom, Label, Literal, RuleKind, Theory};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("reduced mode precondition: {0}")]
    ReducedPrecondition(&'static str),
    #[error("unknown atom `{0}`")]
    UnknownAtom(Atom),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    PlusDelta,
    MinusDelta,
    PlusPartial,
    MinusPartial,
}

impl Tag {
    pub const ALL: [Tag; 4] = [Tag::PlusDelta, Tag::MinusDelta, Tag::PlusPartial, Tag::MinusPartial];

    pub fn symbol(self) -> &'static str {
        match self {
            Tag::PlusDelta => "+D",
            Tag::MinusDelta => "-D",
            Tag::PlusPartial => "+d",
            Tag::MinusPartial => "-d",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Tag> {
        Tag::ALL.into_iter().find(|t| t.symbol() == s)
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaggedLiteral {
    pub tag: Tag,
    pub literal: Literal,
}

impl TaggedLiteral {
    pub fn new(tag: Tag, literal: Literal) -> Self {
        TaggedLiteral { tag, literal }
    }
}

impl fmt::Display for TaggedLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.tag.symbol(), self.literal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// The general conditions, consulting defeaters and superiority.
    Full,
    /// The simplified conditions for theories without facts, defeaters or
    /// superiority.
    Reduced,
}

/// The four conclusion sets `(+Δ, −Δ, +∂, −∂)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConclusionSet {
    pub plus_delta: BTreeSet<Literal>,
    pub minus_delta: BTreeSet<Literal>,
    pub plus_partial: BTreeSet<Literal>,
    pub minus_partial: BTreeSet<Literal>,
}

impl ConclusionSet {
    pub fn get(&self, tag: Tag) -> &BTreeSet<Literal> {
        match tag {
            Tag::PlusDelta => &self.plus_delta,
            Tag::MinusDelta => &self.minus_delta,
            Tag::PlusPartial => &self.plus_partial,
            Tag::MinusPartial => &self.minus_partial,
        }
    }

    fn get_mut(&mut self, tag: Tag) -> &mut BTreeSet<Literal> {
        match tag {
            Tag::PlusDelta => &mut self.plus_delta,
            Tag::MinusDelta => &mut self.minus_delta,
            Tag::PlusPartial => &mut self.plus_partial,
            Tag::MinusPartial => &mut self.minus_partial,
        }
    }

    pub fn contains(&self, tag: Tag, literal: &Literal) -> bool {
        self.get(tag).contains(literal)
    }

    pub fn holds(&self, goal: &TaggedLiteral) -> bool {
        self.contains(goal.tag, &goal.literal)
    }

    pub fn len(&self) -> usize {
        Tag::ALL.iter().map(|t| self.get(*t).len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Keeps only literals over the given atoms.
    pub fn restrict(&self, atoms: &BTreeSet<Atom>) -> ConclusionSet {
        let mut out = ConclusionSet::default();
        for tag in Tag::ALL {
            *out.get_mut(tag) = self.get(tag).iter().filter(|l| atoms.contains(&l.atom)).cloned().collect();
        }
        out
    }

    pub fn tagged(&self) -> impl Iterator<Item = TaggedLiteral> + '_ {
        Tag::ALL
            .into_iter()
            .flat_map(move |tag| self.get(tag).iter().map(move |l| TaggedLiteral::new(tag, l.clone())))
    }

    /// The five set relations every conclusion set satisfies.
    pub fn check_invariants(&self) -> Result<(), String> {
        if let Some(l) = self.plus_delta.difference(&self.plus_partial).next() {
            return Err(format!("+D {l} without +d {l}"));
        }
        if let Some(l) = self.minus_partial.difference(&self.minus_delta).next() {
            return Err(format!("-d {l} without -D {l}"));
        }
        let disjoint = [
            (Tag::PlusDelta, Tag::MinusDelta),
            (Tag::PlusPartial, Tag::MinusPartial),
            (Tag::PlusDelta, Tag::MinusPartial),
        ];
        for (a, b) in disjoint {
            if let Some(l) = self.get(a).intersection(self.get(b)).next() {
                return Err(format!("both {} {l} and {} {l}", a.symbol(), b.symbol()));
            }
        }
        Ok(())
    }

    /// One line per conclusion: grouped by tag in the order `+D -D +d -d`,
    /// literals sorted by atom with the positive literal first.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for tag in Tag::ALL {
            let mut lits: Vec<&Literal> = self.get(tag).iter().collect();
            lits.sort_by(|a, b| (&a.atom, !a.positive).cmp(&(&b.atom, !b.positive)));
            for lit in lits {
                out.push_str(tag.symbol());
                out.push(' ');
                out.push_str(&lit.to_string());
                out.push('\n');
            }
        }
        out
    }
}

/// Which clause of a condition a derivation line was obtained by. Labels
/// name the witnessing rule for existential clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clause {
    /// `+Δq`: `q` is a fact.
    Fact,
    /// `+Δq`: a strict rule for `q` with all antecedents `+Δ`.
    StrictRule(Label),
    /// `−Δq`: not a fact, every strict rule for `q` has a `−Δ` antecedent.
    NoStrictRule,
    /// `+∂q` from `+Δq`.
    Definite,
    /// `+∂q`: the named supporting rule applies and every attack on `q` is
    /// discarded or overridden.
    Team(Label),
    /// `−∂q`: every supporting rule for `q` has a `−∂` antecedent.
    NoSupport,
    /// `−∂q` from `+Δ∼q`.
    ComplementDefinite,
    /// `−∂q`: the named rule for `∼q` applies and no possibly applicable
    /// rule for `q` is superior to it.
    Unbeaten(Label),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub conclusion: TaggedLiteral,
    pub clause: Clause,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Derivation {
    pub lines: Vec<Line>,
}

impl Derivation {
    pub fn last(&self) -> Option<&TaggedLiteral> {
        self.lines.last().map(|l| &l.conclusion)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, line) in self.lines.iter().enumerate() {
            writeln!(f, "{:>4}. {}    [{:?}]", i + 1, line.conclusion, line.clause)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Proof {
    Provable(Derivation),
    NotProvable,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Passes over the worklist that added at least one conclusion.
    pub productive_rounds: usize,
    pub literals: usize,
    pub conclusions: usize,
}

type LitId = usize;

struct IndexedRule<'t> {
    label: &'t Label,
    kind: RuleKind,
    head: LitId,
    body: Vec<LitId>,
}

impl IndexedRule<'_> {
    fn supportive(&self) -> bool {
        self.kind != RuleKind::Defeater
    }
}

/// Integer view of a theory: literal `2a` is atom `a`, `2a + 1` its negation.
struct Index<'t> {
    atoms: Vec<Atom>,
    atom_ids: HashMap<Atom, usize>,
    facts: Vec<bool>,
    rules: Vec<IndexedRule<'t>>,
    rule_ids: HashMap<&'t Label, usize>,
    by_head: Vec<Vec<usize>>,
    /// `(superior, inferior)` pairs between rules with complementary heads.
    superior: HashSet<(usize, usize)>,
    /// Literals whose conditions mention a given literal.
    dependents: Vec<Vec<LitId>>,
}

fn complement(l: LitId) -> LitId {
    l ^ 1
}

impl<'t> Index<'t> {
    fn new<'a>(theory: &'t Theory, extra_atoms: impl IntoIterator<Item = &'a Atom>) -> Self {
        let mut atoms: Vec<Atom> = theory.atoms().into_iter().collect();
        let mut atom_ids: HashMap<Atom, usize> = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        for atom in extra_atoms {
            if !atom_ids.contains_key(atom) {
                atom_ids.insert(atom.clone(), atoms.len());
                atoms.push(atom.clone());
            }
        }
        let n = atoms.len() * 2;
        let lit = |l: &Literal| atom_ids[&l.atom] * 2 + usize::from(!l.positive);

        let mut facts = vec![false; n];
        for f in theory.facts() {
            facts[lit(f)] = true;
        }
        let mut rules = Vec::with_capacity(theory.rule_count());
        let mut rule_ids = HashMap::new();
        let mut by_head = vec![Vec::new(); n];
        for (i, r) in theory.rules().enumerate() {
            let head = lit(&r.head);
            by_head[head].push(i);
            rule_ids.insert(&r.label, i);
            rules.push(IndexedRule { label: &r.label, kind: r.kind, head, body: r.antecedent.iter().map(lit).collect() });
        }
        let superior = theory
            .superiority()
            .map(|(a, b)| (rule_ids[a], rule_ids[b]))
            .filter(|&(a, b)| rules[a].head == complement(rules[b].head))
            .collect();

        let mut dependents: Vec<Vec<LitId>> = (0..n).map(|l| vec![l, complement(l)]).collect();
        for r in &rules {
            for &b in &r.body {
                dependents[b].push(r.head);
                dependents[b].push(complement(r.head));
            }
        }
        for d in &mut dependents {
            d.sort_unstable();
            d.dedup();
        }
        Index { atoms, atom_ids, facts, rules, rule_ids, by_head, superior, dependents }
    }

    fn literal_count(&self) -> usize {
        self.atoms.len() * 2
    }

    fn literal(&self, l: LitId) -> Literal {
        Literal { atom: self.atoms[l / 2].clone(), positive: l % 2 == 0 }
    }

    fn lit_id(&self, l: &Literal) -> Option<LitId> {
        self.atom_ids.get(&l.atom).map(|a| a * 2 + usize::from(!l.positive))
    }

    fn rules_for(&self, q: LitId) -> impl Iterator<Item = (usize, &IndexedRule<'t>)> {
        self.by_head[q].iter().map(move |&i| (i, &self.rules[i]))
    }
}

/// Membership of the four tags per literal.
struct Known {
    sets: [Vec<bool>; 4],
}

impl Known {
    fn new(n: usize) -> Self {
        Known { sets: std::array::from_fn(|_| vec![false; n]) }
    }

    fn has(&self, tag: Tag, l: LitId) -> bool {
        self.sets[tag.index()][l]
    }

    fn all(&self, tag: Tag, body: &[LitId]) -> bool {
        body.iter().all(|&b| self.has(tag, b))
    }

    fn any(&self, tag: Tag, body: &[LitId]) -> bool {
        body.iter().any(|&b| self.has(tag, b))
    }
}

/// Checks the condition for `tag q` against `known`, returning the clause
/// that is satisfied.
fn evaluate(ix: &Index, known: &Known, mode: Mode, tag: Tag, q: LitId) -> Option<Clause> {
    use Tag::*;
    let nq = complement(q);
    match tag {
        PlusDelta => {
            if ix.facts[q] {
                return Some(Clause::Fact);
            }
            ix.rules_for(q)
                .find(|(_, r)| r.kind == RuleKind::Strict && known.all(PlusDelta, &r.body))
                .map(|(_, r)| Clause::StrictRule(r.label.clone()))
        }
        MinusDelta => {
            let refuted = !ix.facts[q]
                && ix.rules_for(q).all(|(_, r)| r.kind != RuleKind::Strict || known.any(MinusDelta, &r.body));
            refuted.then_some(Clause::NoStrictRule)
        }
        PlusPartial => {
            if known.has(PlusDelta, q) {
                return Some(Clause::Definite);
            }
            if !known.has(MinusDelta, nq) {
                return None;
            }
            let (support, _) = ix.rules_for(q).find(|(_, r)| r.supportive() && known.all(PlusPartial, &r.body))?;
            let attacks_fail = ix.rules_for(nq).all(|(s, attacker)| {
                known.any(MinusPartial, &attacker.body)
                    || match mode {
                        Mode::Reduced => false,
                        Mode::Full => ix.rules_for(q).any(|(t, r)| {
                            r.supportive() && known.all(PlusPartial, &r.body) && ix.superior.contains(&(t, s))
                        }),
                    }
            });
            attacks_fail.then(|| Clause::Team(ix.rules[support].label.clone()))
        }
        MinusPartial => {
            if !known.has(MinusDelta, q) {
                return None;
            }
            if ix.rules_for(q).all(|(_, r)| !r.supportive() || known.any(MinusPartial, &r.body)) {
                return Some(Clause::NoSupport);
            }
            if known.has(PlusDelta, nq) {
                return Some(Clause::ComplementDefinite);
            }
            ix.rules_for(nq)
                .find(|(s, attacker)| {
                    known.all(PlusPartial, &attacker.body)
                        && match mode {
                            Mode::Reduced => true,
                            Mode::Full => ix.rules_for(q).all(|(t, r)| {
                                !r.supportive() || known.any(MinusPartial, &r.body) || !ix.superior.contains(&(t, *s))
                            }),
                        }
                })
                .map(|(_, s)| Clause::Unbeaten(s.label.clone()))
        }
    }
}

struct Fixpoint {
    known: Known,
    /// Addition order, with the clause used.
    trace: Vec<((Tag, LitId), Clause)>,
    stats: Stats,
}

fn fixpoint(ix: &Index, mode: Mode, record: bool) -> Fixpoint {
    let n = ix.literal_count();
    let mut known = Known::new(n);
    let mut trace = Vec::new();
    let mut stats = Stats { literals: n, ..Stats::default() };
    let mut queued = vec![true; n];
    let mut queue: Vec<LitId> = (0..n).collect();

    while !queue.is_empty() {
        let mut next = Vec::new();
        let mut added_this_round = false;
        for &q in &queue {
            queued[q] = false;
        }
        for q in queue {
            let mut changed = false;
            // +Δ enables +∂ and −Δ enables −∂ on the same literal, so repeat
            // until this literal is stable.
            loop {
                let mut progress = false;
                for tag in Tag::ALL {
                    if known.has(tag, q) {
                        continue;
                    }
                    if let Some(clause) = evaluate(ix, &known, mode, tag, q) {
                        known.sets[tag.index()][q] = true;
                        stats.conclusions += 1;
                        if record {
                            trace.push(((tag, q), clause));
                        }
                        progress = true;
                    }
                }
                if !progress {
                    break;
                }
                changed = true;
            }
            if changed {
                added_this_round = true;
                for &d in &ix.dependents[q] {
                    if !queued[d] {
                        queued[d] = true;
                        next.push(d);
                    }
                }
            }
        }
        if added_this_round {
            stats.productive_rounds += 1;
        }
        queue = next;
    }
    debug_assert!(stats.productive_rounds <= 4 * n.max(1));
    Fixpoint { known, trace, stats }
}

fn check_mode(theory: &Theory, mode: Mode) -> Result<(), EngineError> {
    if mode == Mode::Reduced {
        if theory.fact_count() > 0 {
            return Err(EngineError::ReducedPrecondition("theory has facts"));
        }
        if theory.has_defeaters() {
            return Err(EngineError::ReducedPrecondition("theory has defeaters"));
        }
        if theory.superiority_count() > 0 {
            return Err(EngineError::ReducedPrecondition("theory has a superiority relation"));
        }
    }
    Ok(())
}

fn collect(ix: &Index, known: &Known) -> ConclusionSet {
    let mut out = ConclusionSet::default();
    for tag in Tag::ALL {
        *out.get_mut(tag) = (0..ix.literal_count()).filter(|&l| known.has(tag, l)).map(|l| ix.literal(l)).collect();
    }
    out
}

/// All conclusions over the atoms of `theory`.
pub fn conclusions(theory: &Theory, mode: Mode) -> Result<ConclusionSet, EngineError> {
    conclusions_with_atoms(theory, mode, std::iter::empty())
}

/// As [`conclusions`], with the candidate universe extended by `extra`
/// atoms (which then receive `−Δ` and `−∂` for both polarities).
pub fn conclusions_with_atoms<'a>(
    theory: &Theory,
    mode: Mode,
    extra: impl IntoIterator<Item = &'a Atom>,
) -> Result<ConclusionSet, EngineError> {
    conclusions_with_stats(theory, mode, extra).map(|(c, _)| c)
}

pub fn conclusions_with_stats<'a>(
    theory: &Theory,
    mode: Mode,
    extra: impl IntoIterator<Item = &'a Atom>,
) -> Result<(ConclusionSet, Stats), EngineError> {
    check_mode(theory, mode)?;
    let ix = Index::new(theory, extra);
    let fp = fixpoint(&ix, mode, false);
    let out = collect(&ix, &fp.known);
    debug_assert_eq!(out.check_invariants(), Ok(()));
    Ok((out, fp.stats))
}

/// Full-mode conclusions; total because full mode has no preconditions.
pub fn full_conclusions<'a>(theory: &Theory, extra: impl IntoIterator<Item = &'a Atom>) -> ConclusionSet {
    conclusions_with_atoms(theory, Mode::Full, extra).expect("full mode has no preconditions")
}

/// Searches for a derivation of `goal` (full mode).
///
/// The returned derivation is the part of the fixpoint trace the goal
/// depends on, in addition order, so it replays line by line.
pub fn prove(theory: &Theory, goal: &TaggedLiteral) -> Result<Proof, EngineError> {
    let ix = Index::new(theory, std::iter::empty());
    let q = ix.lit_id(&goal.literal).ok_or_else(|| EngineError::UnknownAtom(goal.literal.atom.clone()))?;
    let fp = fixpoint(&ix, Mode::Full, true);
    if !fp.known.has(goal.tag, q) {
        return Ok(Proof::NotProvable);
    }
    let position: HashMap<(Tag, LitId), usize> = fp.trace.iter().enumerate().map(|(i, (c, _))| (*c, i)).collect();
    let mut needed = BTreeSet::new();
    let mut stack = vec![position[&(goal.tag, q)]];
    while let Some(i) = stack.pop() {
        if !needed.insert(i) {
            continue;
        }
        let ((tag, lit), clause) = &fp.trace[i];
        let earlier = |t: Tag, l: LitId| position.get(&(t, l)).is_some_and(|&j| j < i);
        let premises = premises(&ix, *tag, *lit, clause, &earlier)
            .expect("every fixpoint addition is justified by earlier additions");
        stack.extend(premises.into_iter().map(|p| position[&p]));
    }
    let lines = needed
        .into_iter()
        .map(|i| {
            let ((tag, lit), clause) = &fp.trace[i];
            Line { conclusion: TaggedLiteral::new(*tag, ix.literal(*lit)), clause: clause.clone() }
        })
        .collect();
    Ok(Proof::Provable(Derivation { lines }))
}

/// Checks each line of `derivation` against the lines before it.
pub fn replay(theory: &Theory, derivation: &Derivation) -> bool {
    let extra: Vec<&Atom> = derivation.lines.iter().map(|l| &l.conclusion.literal.atom).collect();
    let ix = Index::new(theory, extra);
    let mut seen: HashSet<(Tag, LitId)> = HashSet::new();
    for line in &derivation.lines {
        let Some(q) = ix.lit_id(&line.conclusion.literal) else {
            return false;
        };
        let tag = line.conclusion.tag;
        let earlier = |t: Tag, l: LitId| seen.contains(&(t, l));
        if premises(&ix, tag, q, &line.clause, &earlier).is_none() {
            return false;
        }
        seen.insert((tag, q));
    }
    true
}

/// Verifies that `clause` establishes `tag q` given the `earlier`
/// conclusions, returning the earlier conclusions it relies on.
fn premises(
    ix: &Index,
    tag: Tag,
    q: LitId,
    clause: &Clause,
    earlier: &dyn Fn(Tag, LitId) -> bool,
) -> Option<Vec<(Tag, LitId)>> {
    use Tag::*;
    let nq = complement(q);
    let rule_named = |label: &Label| ix.rule_ids.get(label).map(|&i| (i, &ix.rules[i]));
    let all = |t: Tag, body: &[LitId]| body.iter().all(|&b| earlier(t, b));
    let witness = |t: Tag, body: &[LitId]| body.iter().copied().find(|&b| earlier(t, b));
    let mut used = Vec::new();
    match (tag, clause) {
        (PlusDelta, Clause::Fact) => ix.facts[q].then_some(used),
        (PlusDelta, Clause::StrictRule(label)) => {
            let (_, r) = rule_named(label)?;
            if r.kind != RuleKind::Strict || r.head != q || !all(PlusDelta, &r.body) {
                return None;
            }
            used.extend(r.body.iter().map(|&b| (PlusDelta, b)));
            Some(used)
        }
        (MinusDelta, Clause::NoStrictRule) => {
            if ix.facts[q] {
                return None;
            }
            for (_, r) in ix.rules_for(q).filter(|(_, r)| r.kind == RuleKind::Strict) {
                used.push((MinusDelta, witness(MinusDelta, &r.body)?));
            }
            Some(used)
        }
        (PlusPartial, Clause::Definite) => earlier(PlusDelta, q).then(|| vec![(PlusDelta, q)]),
        (PlusPartial, Clause::Team(label)) => {
            let (_, r) = rule_named(label)?;
            if !r.supportive() || r.head != q || !all(PlusPartial, &r.body) || !earlier(MinusDelta, nq) {
                return None;
            }
            used.extend(r.body.iter().map(|&b| (PlusPartial, b)));
            used.push((MinusDelta, nq));
            for (s, _) in ix.rules_for(nq) {
                if let Some(a) = witness(MinusPartial, &ix.rules[s].body) {
                    used.push((MinusPartial, a));
                    continue;
                }
                let (_, t) = ix
                    .rules_for(q)
                    .find(|(t, r)| r.supportive() && all(PlusPartial, &r.body) && ix.superior.contains(&(*t, s)))?;
                used.extend(t.body.iter().map(|&b| (PlusPartial, b)));
            }
            Some(used)
        }
        (MinusPartial, Clause::NoSupport) => {
            if !earlier(MinusDelta, q) {
                return None;
            }
            used.push((MinusDelta, q));
            for (_, r) in ix.rules_for(q).filter(|(_, r)| r.supportive()) {
                used.push((MinusPartial, witness(MinusPartial, &r.body)?));
            }
            Some(used)
        }
        (MinusPartial, Clause::ComplementDefinite) => {
            (earlier(MinusDelta, q) && earlier(PlusDelta, nq)).then(|| vec![(MinusDelta, q), (PlusDelta, nq)])
        }
        (MinusPartial, Clause::Unbeaten(label)) => {
            let (s, attacker) = rule_named(label)?;
            if attacker.head != nq || !earlier(MinusDelta, q) || !all(PlusPartial, &attacker.body) {
                return None;
            }
            used.push((MinusDelta, q));
            used.extend(attacker.body.iter().map(|&b| (PlusPartial, b)));
            for (t, r) in ix.rules_for(q).filter(|(_, r)| r.supportive()) {
                if !ix.superior.contains(&(t, s)) {
                    continue;
                }
                used.push((MinusPartial, witness(MinusPartial, &r.body)?));
            }
            Some(used)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_ground, ParseOptions};

    fn theory(src: &str) -> Theory {
        parse_ground(src, ParseOptions::generated()).unwrap()
    }

    fn lit(s: &str) -> Literal {
        match s.strip_prefix('~') {
            Some(rest) => Literal::neg(Atom::prop(rest)),
            None => Literal::pos(Atom::prop(s)),
        }
    }

    fn tl(tag: Tag, s: &str) -> TaggedLiteral {
        TaggedLiteral::new(tag, lit(s))
    }

    #[test]
    fn loop_proves_nothing_about_p() {
        let c = conclusions(&theory("r: p -> p."), Mode::Full).unwrap();
        let p = lit("p");
        for tag in Tag::ALL {
            assert!(!c.contains(tag, &p), "{tag:?}");
        }
    }

    #[test]
    fn empty_theory_over_declared_atom() {
        let p = Atom::prop("p");
        let c = conclusions_with_atoms(&Theory::default(), Mode::Full, [&p]).unwrap();
        assert_eq!(c.listing(), "-D p\n-D ~p\n-d p\n-d ~p\n");
    }

    #[test]
    fn defeasible_support_with_strict_loop() {
        let c = conclusions(&theory("r1: => p.\nr2: p -> p."), Mode::Full).unwrap();
        let p = lit("p");
        assert!(c.contains(Tag::PlusPartial, &p));
        assert!(!c.contains(Tag::PlusDelta, &p));
        assert!(!c.contains(Tag::MinusDelta, &p));
    }

    #[test]
    fn reduced_mode_precondition() {
        for src in ["p.", "r: ~> p.", "r: => p.\ns: => ~p.\nr > s."] {
            assert!(matches!(conclusions(&theory(src), Mode::Reduced), Err(EngineError::ReducedPrecondition(_))));
        }
        assert!(conclusions(&theory("r: => p."), Mode::Reduced).is_ok());
    }

    #[test]
    fn defeater_blocks_but_does_not_support() {
        let c = conclusions(&theory("r: ~> p.\ns: => ~p."), Mode::Full).unwrap();
        assert!(c.contains(Tag::MinusPartial, &lit("~p")));
        assert!(c.contains(Tag::MinusPartial, &lit("p")));
    }

    #[test]
    fn non_complementary_superiority_is_ignored() {
        let with = theory("r: => p.\ns: => ~p.\nt: => q.\nt > s.");
        let without = theory("r: => p.\ns: => ~p.\nt: => q.");
        assert_eq!(conclusions(&with, Mode::Full).unwrap(), conclusions(&without, Mode::Full).unwrap());
    }

    #[test]
    fn prove_single_strict_line() {
        let t = theory("r: -> p.");
        let Proof::Provable(d) = prove(&t, &tl(Tag::PlusDelta, "p")).unwrap() else {
            panic!("not provable")
        };
        assert_eq!(d.lines, vec![Line { conclusion: tl(Tag::PlusDelta, "p"), clause: Clause::StrictRule(Label::new("r")) }]);
        assert!(replay(&t, &d));
    }

    #[test]
    fn prove_reports_loops_and_unknown_atoms() {
        let t = theory("r: p -> p.");
        assert_eq!(prove(&t, &tl(Tag::MinusDelta, "p")).unwrap(), Proof::NotProvable);
        assert_eq!(prove(&t, &tl(Tag::PlusDelta, "q")).unwrap_err(), EngineError::UnknownAtom(Atom::prop("q")));
    }

    #[test]
    fn replay_rejects_unjustified_lines() {
        let t = theory("r: -> p.");
        let bogus = Derivation {
            lines: vec![Line { conclusion: tl(Tag::MinusDelta, "p"), clause: Clause::NoStrictRule }],
        };
        assert!(!replay(&t, &bogus));
        let wrong_clause =
            Derivation { lines: vec![Line { conclusion: tl(Tag::PlusDelta, "p"), clause: Clause::Fact }] };
        assert!(!replay(&t, &wrong_clause));
        let out_of_order = Derivation {
            lines: vec![
                Line { conclusion: tl(Tag::PlusPartial, "p"), clause: Clause::Definite },
                Line { conclusion: tl(Tag::PlusDelta, "p"), clause: Clause::StrictRule(Label::new("r")) },
            ],
        };
        assert!(!replay(&t, &out_of_order));
    }

    #[test]
    fn listing_orders_tags_then_atoms() {
        let c = conclusions(&theory("b.\nr: b => a."), Mode::Full).unwrap();
        let listing = c.listing();
        let lines: Vec<&str> = listing.lines().collect();
        assert_eq!(lines[0], "+D b");
        assert_eq!(&lines[1..5], ["-D a", "-D ~a", "-D ~b", "+d a"]);
    }
}
