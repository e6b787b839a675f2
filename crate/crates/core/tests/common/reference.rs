//! A deliberately naive reading of the four proof conditions, used as an
//! oracle for the engine. It works on `Theory` directly, re-evaluates every
//! condition against a frozen snapshot of the previous step, and stops when
//! a step adds nothing.

use std::collections::{BTreeSet, HashSet};

use deflog::theory::{Atom, Literal, Rule, RuleKind, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum T {
    PD,
    MD,
    PP,
    MP,
}

impl From<deflog::engine::Tag> for T {
    fn from(tag: deflog::engine::Tag) -> T {
        use deflog::engine::Tag;
        match tag {
            Tag::PlusDelta => T::PD,
            Tag::MinusDelta => T::MD,
            Tag::PlusPartial => T::PP,
            Tag::MinusPartial => T::MP,
        }
    }
}

pub type Proved = HashSet<(T, Literal)>;

fn applicable(p: &Proved, tag: T, r: &Rule) -> bool {
    r.antecedent.iter().all(|a| p.contains(&(tag, a.clone())))
}

fn discarded(p: &Proved, tag: T, r: &Rule) -> bool {
    r.antecedent.iter().any(|a| p.contains(&(tag, a.clone())))
}

fn holds(t: &Theory, p: &Proved, tag: T, q: &Literal) -> bool {
    let nq = q.complement();
    let strict = t.rules_for(q, &[RuleKind::Strict]);
    let supportive = t.rules_for(q, RuleKind::SUPPORTIVE);
    let attackers = t.rules_for(&nq, RuleKind::ALL);
    let is_fact = t.facts().any(|f| f == q);
    match tag {
        T::PD => is_fact || strict.iter().any(|r| applicable(p, T::PD, r)),
        T::MD => !is_fact && strict.iter().all(|r| discarded(p, T::MD, r)),
        T::PP => {
            p.contains(&(T::PD, q.clone()))
                || (supportive.iter().any(|r| applicable(p, T::PP, r))
                    && p.contains(&(T::MD, nq.clone()))
                    && attackers.iter().all(|s| {
                        discarded(p, T::MP, s)
                            || supportive
                                .iter()
                                .any(|tr| applicable(p, T::PP, tr) && t.is_superior(&tr.label, &s.label))
                    }))
        }
        T::MP => {
            p.contains(&(T::MD, q.clone()))
                && (supportive.iter().all(|r| discarded(p, T::MP, r))
                    || p.contains(&(T::PD, nq.clone()))
                    || attackers.iter().any(|s| {
                        applicable(p, T::PP, s)
                            && supportive
                                .iter()
                                .all(|tr| discarded(p, T::MP, tr) || !t.is_superior(&tr.label, &s.label))
                    }))
        }
    }
}

/// Everything provable over the atoms of `t` and `extra`.
pub fn proved(t: &Theory, extra: &BTreeSet<Atom>) -> Proved {
    let atoms: BTreeSet<Atom> = t.atoms().union(extra).cloned().collect();
    let lits: Vec<Literal> =
        atoms.iter().flat_map(|a| [Literal::pos(a.clone()), Literal::neg(a.clone())]).collect();
    let mut p = Proved::new();
    loop {
        let mut step = Vec::new();
        for q in &lits {
            for tag in [T::PD, T::MD, T::PP, T::MP] {
                if !p.contains(&(tag, q.clone())) && holds(t, &p, tag, q) {
                    step.push((tag, q.clone()));
                }
            }
        }
        if step.is_empty() {
            return p;
        }
        p.extend(step);
    }
}

/// The reduced conditions, for fact-, defeater- and superiority-free theories.
pub fn proved_reduced(t: &Theory) -> Proved {
    let atoms = t.atoms();
    let lits: Vec<Literal> =
        atoms.iter().flat_map(|a| [Literal::pos(a.clone()), Literal::neg(a.clone())]).collect();
    let mut p = Proved::new();
    loop {
        let mut step = Vec::new();
        for q in &lits {
            let nq = q.complement();
            let strict = t.rules_for(q, &[RuleKind::Strict]);
            let all = t.rules_for(q, RuleKind::ALL);
            let against = t.rules_for(&nq, RuleKind::ALL);
            let checks = [
                (T::PD, strict.iter().any(|r| applicable(&p, T::PD, r))),
                (T::MD, strict.iter().all(|r| discarded(&p, T::MD, r))),
                (
                    T::PP,
                    p.contains(&(T::PD, q.clone()))
                        || (all.iter().any(|r| applicable(&p, T::PP, r))
                            && p.contains(&(T::MD, nq.clone()))
                            && against.iter().all(|s| discarded(&p, T::MP, s))),
                ),
                (
                    T::MP,
                    p.contains(&(T::MD, q.clone()))
                        && (all.iter().all(|r| discarded(&p, T::MP, r))
                            || p.contains(&(T::PD, nq.clone()))
                            || against.iter().any(|s| applicable(&p, T::PP, s))),
                ),
            ];
            for (tag, ok) in checks {
                if ok && !p.contains(&(tag, q.clone())) {
                    step.push((tag, q.clone()));
                }
            }
        }
        if step.is_empty() {
            return p;
        }
        p.extend(step);
    }
}
