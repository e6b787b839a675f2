//! Outcome classification, the pairwise possibility table, conclusion
//! equivalence, and a seeded theory generator with a shrinker for property
//! checks.

use std::collections::BTreeSet;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{self, ConclusionSet, Mode, Tag};
use crate::parser;
use crate::theory::{Atom, Label, Literal, Rule, RuleKind, Sigma, Theory};
use crate::transform;

/// Environment variable naming the directory for failing-case dumps.
pub const FAIL_DIR_ENV: &str = "DEFLOG_FAIL_DIR";

/// The six ways a literal can fall in the four conclusion sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    /// Neither `−Δ` nor `+∂`.
    A,
    /// `+∂`, but neither `+Δ` nor `−Δ`.
    B,
    /// `+Δ`.
    C,
    /// `+∂` and `−Δ`.
    D,
    /// `−Δ`, but neither `+∂` nor `−∂`.
    E,
    /// `−∂`.
    F,
}

impl Outcome {
    pub const ALL: [Outcome; 6] = [Outcome::A, Outcome::B, Outcome::C, Outcome::D, Outcome::E, Outcome::F];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairStatus {
    Poss,
    /// Excluded by Property 1.
    NP1,
    /// Excluded by Property 2.
    NP2,
    /// Excluded for acyclic theories (Property 3).
    NP3,
}

impl fmt::Display for PairStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairVerdict {
    pub outcome_p: Outcome,
    pub outcome_not_p: Outcome,
    pub status: PairStatus,
}

/// Rows are the outcome of `p`, columns the outcome of `¬p`, both A–F.
pub const TABLE: [[PairStatus; 6]; 6] = {
    use PairStatus::*;
    [
        [Poss, NP1, Poss, NP1, Poss, Poss],
        [NP1, NP1, NP1, NP1, NP3, Poss],
        [Poss, NP1, Poss, NP1, NP2, Poss],
        [NP1, NP1, NP1, NP3, NP3, Poss],
        [Poss, NP3, NP2, NP3, Poss, Poss],
        [Poss, Poss, Poss, Poss, Poss, Poss],
    ]
};

pub fn pair_table(p: Outcome, not_p: Outcome) -> PairStatus {
    TABLE[p.index()][not_p.index()]
}

/// The outcome of `l` in `c`.
///
/// Panics if `c` places `l` in no outcome or in several, which would mean
/// `c` violates the basic set relations.
pub fn classify(c: &ConclusionSet, l: &Literal) -> Outcome {
    let pd = c.contains(Tag::PlusDelta, l);
    let md = c.contains(Tag::MinusDelta, l);
    let pp = c.contains(Tag::PlusPartial, l);
    let mp = c.contains(Tag::MinusPartial, l);
    let matches: Vec<Outcome> = [
        (Outcome::A, !md && !pp),
        (Outcome::B, pp && !pd && !md),
        (Outcome::C, pd),
        (Outcome::D, pp && md),
        (Outcome::E, md && !pp && !mp),
        (Outcome::F, mp),
    ]
    .into_iter()
    .filter_map(|(o, holds)| holds.then_some(o))
    .collect();
    assert_eq!(matches.len(), 1, "outcomes {matches:?} for {l}: not a partition");
    matches[0]
}

/// Outcomes of `p` and `¬p` and their table cell.
pub fn classify_pair(c: &ConclusionSet, atom: &Atom) -> PairVerdict {
    let outcome_p = classify(c, &Literal::pos(atom.clone()));
    let outcome_not_p = classify(c, &Literal::neg(atom.clone()));
    PairVerdict { outcome_p, outcome_not_p, status: pair_table(outcome_p, outcome_not_p) }
}

/// Full-mode conclusions of `t` over its atoms plus those of `sigma`,
/// restricted to `sigma`.
pub fn conclusions_over(t: &Theory, sigma: &Sigma) -> ConclusionSet {
    engine::full_conclusions(t, &sigma.atoms).restrict(&sigma.atoms)
}

/// `t1 ≡_Σ t2`: equal conclusion sets over the atoms of `sigma`.
pub fn equivalent(t1: &Theory, t2: &Theory, sigma: &Sigma) -> bool {
    equivalence_diff(t1, t2, sigma).is_none()
}

/// The first tagged literal over `sigma` on which the two theories differ.
pub fn equivalence_diff(t1: &Theory, t2: &Theory, sigma: &Sigma) -> Option<String> {
    let c1 = conclusions_over(t1, sigma);
    let c2 = conclusions_over(t2, sigma);
    for tag in Tag::ALL {
        if let Some(l) = c1.get(tag).symmetric_difference(c2.get(tag)).next() {
            let side = if c1.contains(tag, l) { "first" } else { "second" };
            return Some(format!("{} {l} holds only in the {side} theory", tag.symbol()));
        }
    }
    None
}

/// Checks the set relations and the derived properties the proof theory
/// guarantees for every conclusion set of `t`.
pub fn check_conclusions(t: &Theory, c: &ConclusionSet) -> Result<(), String> {
    c.check_invariants()?;
    let acyclic = t.check_well_formed().acyclic();
    for atom in t.atoms() {
        for p in [Literal::pos(atom.clone()), Literal::neg(atom.clone())] {
            let np = p.complement();
            let has = |tag, l: &Literal| c.contains(tag, l);
            if !has(Tag::MinusDelta, &np) && !has(Tag::PlusDelta, &p) && has(Tag::PlusPartial, &p) {
                return Err(format!("+d {p} without -D {np} or +D {p}"));
            }
            if has(Tag::PlusDelta, &np) && has(Tag::MinusDelta, &p) && !has(Tag::MinusPartial, &p) {
                return Err(format!("+D {np} and -D {p} without -d {p}"));
            }
            if acyclic {
                if has(Tag::PlusPartial, &p)
                    && has(Tag::PlusPartial, &np)
                    && !(has(Tag::PlusDelta, &p) && has(Tag::PlusDelta, &np))
                {
                    return Err(format!("acyclic theory proves +d {p} and +d {np} without both +D"));
                }
                if has(Tag::PlusPartial, &np) && has(Tag::MinusDelta, &p) && !has(Tag::MinusPartial, &p) {
                    return Err(format!("acyclic theory proves +d {np} and -D {p} without -d {p}"));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("the theory needs at least one atom")]
    NoAtoms,
    #[error("superiority pairs requested with fewer than two rules")]
    SuperiorityWithoutRules,
    #[error("{0} must lie in [0, 1]")]
    FractionOutOfRange(&'static str),
    #[error("strict and defeater fractions sum above 1")]
    FractionsExceedOne,
}

/// Shape of a generated theory.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub num_atoms: usize,
    pub num_rules: usize,
    /// Facts drawn (duplicates collapse, so the count is an upper bound).
    pub num_facts: usize,
    pub defeater_fraction: f64,
    pub strict_fraction: f64,
    /// Probability that a candidate pair enters the superiority relation.
    pub sup_density: f64,
    /// Largest antecedent size.
    pub max_body: usize,
    pub force_acyclic: bool,
    /// Implies acyclic; pairs only between rules with complementary heads.
    pub force_well_formed: bool,
    /// Applies `normal` to the generated theory.
    pub force_normalized: bool,
    pub label_prefix: String,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            num_atoms: 4,
            num_rules: 8,
            num_facts: 1,
            defeater_fraction: 0.15,
            strict_fraction: 0.25,
            sup_density: 0.3,
            max_body: 2,
            force_acyclic: false,
            force_well_formed: false,
            force_normalized: false,
            label_prefix: "r".into(),
        }
    }
}

const ALPHABET: &str = "abcdefghijklmnopqrstuvwxyz";

/// The `i`th atom of the generator alphabet: `a`..`z`, then `a1`..`z1`, ...
pub fn alphabet_atom(i: usize) -> Atom {
    let letter = ALPHABET.as_bytes()[i % 26] as char;
    match i / 26 {
        0 => Atom::prop(letter.to_string()),
        n => Atom::prop(format!("{letter}{n}")),
    }
}

/// A random ground theory; identical for identical seed and parameters.
pub fn gen_theory(seed: u64, params: &GenParams) -> Result<Theory, GenError> {
    if params.num_atoms == 0 {
        return Err(GenError::NoAtoms);
    }
    for (name, f) in [
        ("defeater_fraction", params.defeater_fraction),
        ("strict_fraction", params.strict_fraction),
        ("sup_density", params.sup_density),
    ] {
        if !(0.0..=1.0).contains(&f) {
            return Err(GenError::FractionOutOfRange(name));
        }
    }
    if params.defeater_fraction + params.strict_fraction > 1.0 {
        return Err(GenError::FractionsExceedOne);
    }
    if params.sup_density > 0.0 && params.num_rules < 2 {
        return Err(GenError::SuperiorityWithoutRules);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms: Vec<Atom> = (0..params.num_atoms).map(alphabet_atom).collect();
    let literal = |rng: &mut ChaCha8Rng| {
        let atom = atoms.choose(rng).expect("nonempty").clone();
        if rng.gen_bool(0.5) {
            Literal::pos(atom)
        } else {
            Literal::neg(atom)
        }
    };

    let facts: Vec<Literal> = (0..params.num_facts).map(|_| literal(&mut rng)).collect();
    let mut rules = Vec::with_capacity(params.num_rules);
    for i in 0..params.num_rules {
        let roll: f64 = rng.gen();
        let kind = if roll < params.strict_fraction {
            RuleKind::Strict
        } else if roll < params.strict_fraction + params.defeater_fraction {
            RuleKind::Defeater
        } else {
            RuleKind::Defeasible
        };
        let len = rng.gen_range(0..=params.max_body);
        let body: Vec<Literal> = (0..len).map(|_| literal(&mut rng)).collect();
        let head = literal(&mut rng);
        rules.push(Rule::new(Label::new(format!("{}{}", params.label_prefix, i + 1)), body, kind, head));
    }

    let acyclic = params.force_acyclic || params.force_well_formed;
    let mut rank: Vec<usize> = (0..rules.len()).collect();
    rank.shuffle(&mut rng);
    let mut superiority = Vec::new();
    for i in 0..rules.len() {
        for j in 0..rules.len() {
            if i == j || (acyclic && rank[i] <= rank[j]) {
                continue;
            }
            if params.force_well_formed && rules[i].head != rules[j].head.complement() {
                continue;
            }
            // Pairs between conflicting rules matter to inference, so they
            // are drawn at the given density; other pairs are rarer.
            let density = if rules[i].head == rules[j].head.complement() {
                params.sup_density
            } else {
                params.sup_density / 8.0
            };
            if rng.gen_bool(density) {
                superiority.push((rules[i].label.clone(), rules[j].label.clone()));
            }
        }
    }
    let t = Theory::new(facts, rules, superiority).expect("generated labels are distinct");
    if params.force_normalized {
        Ok(transform::normal(&t).expect("generated theories use user symbols only").0)
    } else {
        Ok(t)
    }
}

/// Parameters for the acceptance-scale theories: up to 12 atoms and 30
/// rules, sizes drawn from `seed`.
pub fn scaled_params(seed: u64, max_atoms: usize, max_rules: usize) -> GenParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
    GenParams {
        num_atoms: rng.gen_range(1..=max_atoms),
        num_rules: rng.gen_range(2..=max_rules),
        num_facts: rng.gen_range(0..=3),
        defeater_fraction: rng.gen_range(0.0..0.3),
        strict_fraction: rng.gen_range(0.0..0.4),
        sup_density: rng.gen_range(0.0..0.6),
        max_body: rng.gen_range(0..=3),
        ..GenParams::default()
    }
}

/// Greedily removes superiority pairs, rules, facts and antecedent literals
/// from `t` while `fails` keeps holding.
pub fn shrink(t: &Theory, fails: impl Fn(&Theory) -> bool) -> Theory {
    let mut current = t.clone();
    loop {
        let next = candidates(&current).into_iter().find(|c| fails(c));
        match next {
            Some(smaller) => current = smaller,
            None => return current,
        }
    }
}

/// One-step reductions of `t`, smallest change last.
fn candidates(t: &Theory) -> Vec<Theory> {
    let facts: Vec<Literal> = t.facts().cloned().collect();
    let rules: Vec<Rule> = t.rules().cloned().collect();
    let sup: Vec<(Label, Label)> = t.superiority().cloned().collect();
    let build = |facts: &[Literal], rules: &[Rule], sup: &[(Label, Label)]| {
        let labels: BTreeSet<&Label> = rules.iter().map(|r| &r.label).collect();
        let sup: Vec<(Label, Label)> =
            sup.iter().filter(|(a, b)| labels.contains(a) && labels.contains(b)).cloned().collect();
        Theory::new(facts.iter().cloned(), rules.iter().cloned(), sup).expect("sub-theory of a valid theory")
    };
    let mut out = Vec::new();
    for i in 0..rules.len() {
        let mut rs = rules.clone();
        rs.remove(i);
        out.push(build(&facts, &rs, &sup));
    }
    for i in 0..facts.len() {
        let mut fs = facts.clone();
        fs.remove(i);
        out.push(build(&fs, &rules, &sup));
    }
    for i in 0..sup.len() {
        let mut ss = sup.clone();
        ss.remove(i);
        out.push(build(&facts, &rules, &ss));
    }
    for (i, r) in rules.iter().enumerate() {
        for j in 0..r.antecedent.len() {
            let mut rs = rules.clone();
            let mut body: Vec<Literal> = r.antecedent.iter().cloned().collect();
            body.remove(j);
            rs[i] = Rule::new(r.label.clone(), body, r.kind, r.head.clone());
            out.push(build(&facts, &rs, &sup));
        }
    }
    out
}

/// The failing-case directory from [`FAIL_DIR_ENV`], if set.
pub fn fail_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(FAIL_DIR_ENV).map(PathBuf::from)
}

/// Writes `t` as `<dir>/<name>.dfl`, with `note` as a leading comment.
pub fn dump_witness(dir: &Path, name: &str, t: &Theory, note: &str) -> io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}.dfl"));
    let mut text = String::new();
    for line in note.lines() {
        text.push_str("% ");
        text.push_str(line);
        text.push('\n');
    }
    text.push_str(&parser::print(t));
    std::fs::write(&path, text)?;
    Ok(path)
}

/// A property violation, shrunk.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub seed: u64,
    pub message: String,
    pub theory: Theory,
    pub witness: Option<PathBuf>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seed {}: {}", self.seed, self.message)?;
        if let Some(path) = &self.witness {
            write!(f, " (witness {})", path.display())?;
        }
        Ok(())
    }
}

/// Checks `prop` on the theory generated for each seed. Failures are shrunk
/// and, when `fail_dir` is given, dumped as `<name>-<seed>.dfl`.
pub fn run_property(
    name: &str,
    seeds: impl IntoIterator<Item = u64>,
    generate: impl Fn(u64) -> Theory,
    prop: impl Fn(&Theory) -> Result<(), String>,
    fail_dir: Option<&Path>,
) -> Vec<Counterexample> {
    let mut failures = Vec::new();
    for seed in seeds {
        let t = generate(seed);
        if let Err(message) = prop(&t) {
            let theory = shrink(&t, |c| prop(c).is_err());
            let message = prop(&theory).err().unwrap_or(message);
            let witness = fail_dir.and_then(|dir| {
                dump_witness(dir, &format!("{name}-{seed}"), &theory, &format!("{name} fails: {message}")).ok()
            });
            failures.push(Counterexample { seed, message, theory, witness });
        }
    }
    failures
}

/// Named properties over single theories, shared by the CLI and the tests.
pub mod properties {
    use super::*;

    fn stage_equivalent(
        t: &Theory,
        stage: fn(&Theory) -> Result<(Theory, transform::TransformReport), transform::TransformError>,
    ) -> Result<Theory, String> {
        let (out, _) = stage(t).map_err(|e| e.to_string())?;
        match equivalence_diff(t, &out, &t.sigma()) {
            None => Ok(out),
            Some(diff) => Err(diff),
        }
    }

    /// Set relations and derived properties on the full-mode conclusions.
    pub fn invariants(t: &Theory) -> Result<(), String> {
        check_conclusions(t, &engine::full_conclusions(t, []))
    }

    pub fn normal_correct(t: &Theory) -> Result<(), String> {
        stage_equivalent(t, transform::normal).map(drop)
    }

    /// Holds on acyclic theories; a superiority cycle can break it.
    pub fn elim_dft_correct(t: &Theory) -> Result<(), String> {
        stage_equivalent(t, transform::elim_dft).map(drop)
    }

    /// Only meaningful on well-formed normalized theories; others fail the
    /// precondition.
    pub fn elim_sup_correct(t: &Theory) -> Result<(), String> {
        stage_equivalent(t, transform::elim_sup).map(drop)
    }

    pub fn pipeline_correct(t: &Theory) -> Result<(), String> {
        let out = stage_equivalent(t, transform::pipeline)?;
        if out.fact_count() > 0 || out.has_defeaters() || out.superiority_count() > 0 {
            return Err("pipeline output has facts, defeaters or superiority".into());
        }
        Ok(())
    }

    /// No acyclic theory realizes an excluded table cell.
    pub fn table_sound(t: &Theory) -> Result<(), String> {
        if !t.check_well_formed().acyclic() {
            return Err("theory is cyclic".into());
        }
        let c = engine::full_conclusions(t, []);
        check_conclusions(t, &c)?;
        for atom in t.atoms() {
            let v = classify_pair(&c, &atom);
            if v.status != PairStatus::Poss {
                return Err(format!("{atom}: {} / {} is {}", v.outcome_p, v.outcome_not_p, v.status));
            }
        }
        Ok(())
    }

    /// Full and reduced mode agree on the pipeline output of `t`.
    pub fn reduced_agrees(t: &Theory) -> Result<(), String> {
        let (out, _) = transform::pipeline(t).map_err(|e| e.to_string())?;
        let full = engine::conclusions(&out, Mode::Full).map_err(|e| e.to_string())?;
        let reduced = engine::conclusions(&out, Mode::Reduced).map_err(|e| e.to_string())?;
        check_conclusions(&out, &full)?;
        if full != reduced {
            return Err("full and reduced conclusions differ on the pipeline output".into());
        }
        Ok(())
    }

    /// Growth bounds: 3 for `normal` and `elim_dft` on any theory, 4 for
    /// `elim_sup` (size measure) on the normal form of a well-formed one.
    pub fn size_bounds(t: &Theory) -> Result<(), String> {
        let (n, rn) = transform::normal(t).map_err(|e| e.to_string())?;
        if rn.growth_factor() > 3.0 {
            return Err(format!("normal growth {}", rn.growth_factor()));
        }
        let (_, rd) = transform::elim_dft(t).map_err(|e| e.to_string())?;
        if rd.growth_factor() > 3.0 {
            return Err(format!("elim_dft growth {}", rd.growth_factor()));
        }
        if n.check_well_formed().is_well_formed() {
            let (_, rs) = transform::elim_sup(&n).map_err(|e| e.to_string())?;
            if rs.size_factor() > 4.0 {
                return Err(format!("elim_sup size factor {}", rs.size_factor()));
            }
        }
        Ok(())
    }

    pub const NAMES: [&str; 8] =
        ["invariants", "normal", "elim-dft", "elim-sup", "pipeline", "table", "reduced", "size"];

    pub fn by_name(name: &str) -> Option<fn(&Theory) -> Result<(), String>> {
        Some(match name {
            "invariants" => invariants,
            "normal" => normal_correct,
            "elim-dft" => elim_dft_correct,
            "elim-sup" => elim_sup_correct,
            "pipeline" => pipeline_correct,
            "table" => table_sound,
            "reduced" => reduced_agrees,
            "size" => size_bounds,
            _ => return None,
        })
    }
}
