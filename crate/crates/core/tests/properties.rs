//! Property tests over theories drawn by proptest itself, independent of
//! the crate's own generator.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use deflog::analysis::{check_conclusions, classify, equivalent, Outcome};
use deflog::engine;
use deflog::parser::{self, ParseOptions};
use deflog::theory::{Atom, Label, Literal, Rule, RuleKind, Theory};
use deflog::transform;

fn literal(atoms: usize) -> impl Strategy<Value = Literal> {
    (0..atoms, any::<bool>()).prop_map(|(i, pos)| {
        let atom = Atom::prop(["p", "q", "r", "s", "t"][i]);
        if pos {
            Literal::pos(atom)
        } else {
            Literal::neg(atom)
        }
    })
}

fn theory() -> impl Strategy<Value = Theory> {
    let kind = prop_oneof![Just(RuleKind::Strict), Just(RuleKind::Defeasible), Just(RuleKind::Defeater)];
    let rule = (proptest::collection::vec(literal(4), 0..3), kind, literal(4));
    (
        proptest::collection::vec(literal(4), 0..3),
        proptest::collection::vec(rule, 0..8),
        proptest::collection::vec((0..8usize, 0..8usize), 0..6),
    )
        .prop_map(|(facts, rules, pairs)| {
            let rules: Vec<Rule> = rules
                .into_iter()
                .enumerate()
                .map(|(i, (body, kind, head))| Rule::new(Label::new(format!("r{i}")), body, kind, head))
                .collect();
            let n = rules.len();
            let sup: Vec<(Label, Label)> = pairs
                .into_iter()
                .filter(|&(a, b)| a < n && b < n && a != b)
                .map(|(a, b)| (rules[a].label.clone(), rules[b].label.clone()))
                .collect();
            Theory::new(facts, rules, sup).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn engine_matches_reference(t in theory()) {
        let c = engine::full_conclusions(&t, []);
        let reference = common::reference::proved(&t, &BTreeSet::new());
        let ours: common::reference::Proved = c.tagged().map(|tl| (common::reference::T::from(tl.tag), tl.literal)).collect();
        prop_assert_eq!(ours, reference);
        check_conclusions(&t, &c).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn every_literal_has_exactly_one_outcome(t in theory()) {
        let c = engine::full_conclusions(&t, []);
        for a in t.atoms() {
            let o = classify(&c, &Literal::pos(a.clone()));
            prop_assert!(Outcome::ALL.contains(&o));
        }
    }

    #[test]
    fn print_parse_round_trip(t in theory()) {
        let text = parser::print(&t);
        let back = parser::parse_ground(&text, ParseOptions::default()).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(parser::print(&back), text);
    }

    #[test]
    fn generated_output_round_trips(t in theory()) {
        let (n, _) = transform::normal(&t).unwrap();
        let (d, _) = transform::elim_dft(&n).unwrap();
        for out in [n, d] {
            let back = parser::parse_ground(&parser::print(&out), ParseOptions::generated()).unwrap();
            prop_assert_eq!(back, out);
        }
    }

    #[test]
    fn normal_preserves_conclusions(t in theory()) {
        prop_assert!(equivalent(&t, &transform::normal(&t).unwrap().0, &t.sigma()));
    }

    #[test]
    fn elim_dft_preserves_conclusions_on_acyclic(t in theory()) {
        prop_assume!(t.check_well_formed().acyclic());
        prop_assert!(equivalent(&t, &transform::elim_dft(&t).unwrap().0, &t.sigma()));
    }

    #[test]
    fn pipeline_preserves_conclusions_on_well_formed(t in theory()) {
        prop_assume!(t.check_well_formed().is_well_formed());
        let (out, _) = transform::pipeline(&t).unwrap();
        prop_assert!(equivalent(&t, &out, &t.sigma()));
        prop_assert_eq!(
            engine::conclusions(&out, engine::Mode::Full).unwrap(),
            engine::conclusions(&out, engine::Mode::Reduced).unwrap()
        );
    }
}
