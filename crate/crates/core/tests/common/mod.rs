//! Helpers shared by the integration tests.
#![allow(dead_code)]

pub mod reference;

use deflog::parser::{parse_ground, ParseOptions};
use deflog::theory::{Atom, Literal, Theory};

pub fn user(src: &str) -> Theory {
    parse_ground(src, ParseOptions::default()).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

pub fn generated(src: &str) -> Theory {
    parse_ground(src, ParseOptions::generated()).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

pub fn golden(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// `p` or `~p` over a nullary atom.
pub fn lit(s: &str) -> Literal {
    match s.strip_prefix('~') {
        Some(rest) => Literal::neg(Atom::prop(rest)),
        None => Literal::pos(Atom::prop(s)),
    }
}
