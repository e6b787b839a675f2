//! Reader and printer for the `.dfl` text format.
//!
//! ```text
//! % comment
//! bird(tweety).                      fact
//! r4: bird(X) => flies(X).           defeasible rule
//! r5: heavy(X) ~> ~flies(X).         defeater
//! r1: -> gap.                        strict rule, empty antecedent
//! r5 > r4.                           superiority
//! ```
//!
//! User input may not contain `$`. Output of the transformations does, so a
//! separate mode ([`ParseOptions::allow_generated`]) reads the generated
//! spellings back.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::ground::{AtomSchema, LiteralSchema, RuleSchema, Term, TheorySchema};
use crate::theory::{Atom, Label, RuleKind, Theory, GENERATED_PREFIX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(Label),
    #[error("`$` is reserved for generated symbols")]
    GeneratedSymbol,
    #[error("unknown label `{0}`")]
    UnknownLabel(Label),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: {kind}")]
pub struct ParseError {
    pub position: Position,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept `$`-spelled generated atoms and labels.
    pub allow_generated: bool,
}

impl ParseOptions {
    pub fn generated() -> Self {
        ParseOptions { allow_generated: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatementKind {
    Fact,
    Rule,
    Superiority,
}

/// A parsed source together with where each statement came from.
#[derive(Debug, Clone)]
pub struct SourceTheory {
    pub origin: Option<PathBuf>,
    pub text: String,
    pub schema: TheorySchema,
    pub statements: Vec<(Position, StatementKind)>,
    pub label_positions: BTreeMap<Label, Position>,
}

impl SourceTheory {
    pub fn parse(text: impl Into<String>, origin: Option<PathBuf>, options: ParseOptions) -> Result<Self, ParseError> {
        let text = text.into();
        let mut parser = Parser::new(&text, options);
        let (schema, statements, label_positions) = parser.theory()?;
        Ok(SourceTheory { origin, text, schema, statements, label_positions })
    }
}

/// Parses user input (no generated symbols).
pub fn parse(text: &str) -> Result<TheorySchema, ParseError> {
    parse_with(text, ParseOptions::default())
}

pub fn parse_with(text: &str, options: ParseOptions) -> Result<TheorySchema, ParseError> {
    Parser::new(text, options).theory().map(|(schema, _, _)| schema)
}

/// Parses a theory that must already be ground.
pub fn parse_ground(text: &str, options: ParseOptions) -> Result<Theory, ParseError> {
    let schema = parse_with(text, options)?;
    schema.to_theory().map_err(|e| ParseError {
        position: Position { line: 1, column: 1 },
        kind: ParseErrorKind::Syntax(e.to_string()),
    })
}

/// Canonical serialization: facts, rules in stored order, then superiority
/// pairs sorted.
pub fn print(theory: &Theory) -> String {
    theory.to_string()
}

pub fn print_schema(schema: &TheorySchema) -> String {
    schema.to_string()
}

struct Parser {
    chars: Vec<char>,
    line_starts: Vec<usize>,
    pos: usize,
    options: ParseOptions,
}

type Parsed<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str, options: ParseOptions) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let line_starts = std::iter::once(0)
            .chain(chars.iter().enumerate().filter(|(_, c)| **c == '\n').map(|(i, _)| i + 1))
            .collect();
        Parser { chars, line_starts, pos: 0, options }
    }

    fn position_at(&self, pos: usize) -> Position {
        let line = self.line_starts.partition_point(|&start| start <= pos);
        Position { line, column: pos - self.line_starts[line - 1] + 1 }
    }

    fn error_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { position: self.position_at(pos), kind }
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Parsed<T> {
        Err(self.error_at(self.pos, ParseErrorKind::Syntax(msg.into())))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn looking_at(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '%' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: char) -> Parsed<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.syntax(format!("expected `{c}`, found `{found}`")),
                None => self.syntax(format!("expected `{c}`, found end of input")),
            }
        }
    }

    /// First `$` outside comments, for user-mode rejection.
    fn reserved_symbol(&self) -> Option<usize> {
        let mut in_comment = false;
        for (i, &c) in self.chars.iter().enumerate() {
            match c {
                '%' => in_comment = true,
                '\n' => in_comment = false,
                GENERATED_PREFIX if !in_comment => return Some(i),
                _ => {}
            }
        }
        None
    }

    fn theory(&mut self) -> Parsed<(TheorySchema, Vec<(Position, StatementKind)>, BTreeMap<Label, Position>)> {
        if !self.options.allow_generated {
            if let Some(at) = self.reserved_symbol() {
                return Err(self.error_at(at, ParseErrorKind::GeneratedSymbol));
            }
        }
        let mut schema = TheorySchema::default();
        let mut statements = Vec::new();
        let mut label_positions = BTreeMap::new();
        let mut sup_positions = Vec::new();
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
            let start = self.pos;
            let position = self.position_at(start);
            match self.statement()? {
                Statement::Fact(l) => {
                    schema.facts.push(l);
                    statements.push((position, StatementKind::Fact));
                }
                Statement::Rule(r) => {
                    if label_positions.contains_key(&r.label) {
                        return Err(self.error_at(start, ParseErrorKind::DuplicateLabel(r.label)));
                    }
                    label_positions.insert(r.label.clone(), position);
                    schema.rules.push(r);
                    statements.push((position, StatementKind::Rule));
                }
                Statement::Superiority(a, b) => {
                    sup_positions.push(start);
                    schema.superiority.push((a, b));
                    statements.push((position, StatementKind::Superiority));
                }
            }
        }
        let mut sorted = BTreeSet::new();
        for (pair, at) in schema.superiority.into_iter().zip(sup_positions) {
            for label in [&pair.0, &pair.1] {
                if !label_positions.contains_key(label) {
                    return Err(self.error_at(at, ParseErrorKind::UnknownLabel(label.clone())));
                }
            }
            sorted.insert(pair);
        }
        schema.superiority = sorted.into_iter().collect();
        let mut seen = HashSet::new();
        schema.facts.retain(|f| seen.insert(f.clone()));
        Ok((schema, statements, label_positions))
    }

    fn statement(&mut self) -> Parsed<Statement> {
        let start = self.pos;
        if self.peek() != Some('~') {
            if let Ok(label) = self.label() {
                self.skip_ws();
                match self.peek() {
                    Some(':') => {
                        self.pos += 1;
                        return self.rule_body(label);
                    }
                    Some('>') => {
                        self.pos += 1;
                        self.skip_ws();
                        let inferior = self.label()?;
                        self.expect('.')?;
                        return Ok(Statement::Superiority(label, inferior));
                    }
                    _ => {}
                }
            }
            self.pos = start;
        }
        let lit = self.literal()?;
        self.expect('.')?;
        Ok(Statement::Fact(lit))
    }

    fn arrow(&mut self) -> Option<RuleKind> {
        let kind = if self.looking_at("->") {
            RuleKind::Strict
        } else if self.looking_at("=>") {
            RuleKind::Defeasible
        } else if self.looking_at("~>") {
            RuleKind::Defeater
        } else {
            return None;
        };
        self.pos += 2;
        Some(kind)
    }

    fn rule_body(&mut self, label: Label) -> Parsed<Statement> {
        let mut antecedent: Vec<LiteralSchema> = Vec::new();
        self.skip_ws();
        let kind = match self.arrow() {
            Some(kind) => kind,
            None => loop {
                let lit = self.literal()?;
                if !antecedent.contains(&lit) {
                    antecedent.push(lit);
                }
                self.skip_ws();
                if self.peek() == Some(',') {
                    self.pos += 1;
                    continue;
                }
                match self.arrow() {
                    Some(kind) => break kind,
                    None => return self.syntax("expected `,`, `->`, `=>` or `~>`"),
                }
            },
        };
        let head = self.literal()?;
        self.expect('.')?;
        Ok(Statement::Rule(RuleSchema { label, antecedent, kind, head }))
    }

    fn ident(&mut self) -> Parsed<String> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return self.syntax("expected identifier");
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn literal(&mut self) -> Parsed<LiteralSchema> {
        self.skip_ws();
        let positive = if self.peek() == Some('~') && self.peek_at(1) != Some('>') {
            self.pos += 1;
            false
        } else {
            true
        };
        self.skip_ws();
        let atom = self.atom()?;
        Ok(LiteralSchema { atom, positive })
    }

    fn atom(&mut self) -> Parsed<AtomSchema> {
        self.skip_ws();
        if self.peek() == Some(GENERATED_PREFIX) {
            return self.generated_atom().map(AtomSchema::Ground);
        }
        let start = self.pos;
        let name = self.ident()?;
        if !name.starts_with(|c: char| c.is_ascii_lowercase()) {
            self.pos = start;
            return self.syntax(format!("atom `{name}` must start with a lowercase letter"));
        }
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                self.skip_ws();
                let term = self.ident()?;
                if term.starts_with(|c: char| c.is_ascii_uppercase()) {
                    args.push(Term::Var(term));
                } else if term.starts_with(|c: char| c.is_ascii_lowercase() || c.is_ascii_digit()) {
                    args.push(Term::Const(term));
                } else {
                    return self.syntax(format!("bad argument `{term}`"));
                }
                self.skip_ws();
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.syntax("expected `,` or `)` in argument list"),
                }
            }
        }
        Ok(AtomSchema::Pattern { name, args })
    }

    /// `$p(atom)`, `$pl(atom)`, `$mi(atom)`, `$ip(label)`, `$im(label)`.
    fn generated_atom(&mut self) -> Parsed<Atom> {
        self.pos += 1;
        let tag = self.ident()?;
        self.expect('(')?;
        let inner = match tag.as_str() {
            "p" | "pl" | "mi" => match self.atom()? {
                AtomSchema::Ground(a) => a.to_string(),
                AtomSchema::Pattern { name, args } => {
                    let mut consts = Vec::new();
                    for arg in args {
                        match arg {
                            Term::Const(c) => consts.push(c),
                            Term::Var(v) => return self.syntax(format!("variable `{v}` inside generated symbol")),
                        }
                    }
                    Atom::new(name, consts).to_string()
                }
            },
            "ip" | "im" => {
                self.skip_ws();
                self.label()?.to_string()
            }
            _ => return self.syntax(format!("unknown generated atom `${tag}`")),
        };
        self.expect(')')?;
        Ok(Atom::generated(format!("${tag}({inner})")))
    }

    fn label(&mut self) -> Parsed<Label> {
        let mut spelling = if self.peek() == Some(GENERATED_PREFIX) {
            self.generated_label_core()?
        } else {
            let mut s = self.ident()?;
            if self.peek() == Some('[') {
                self.pos += 1;
                let mut consts = Vec::new();
                loop {
                    self.skip_ws();
                    consts.push(self.ident()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(']') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return self.syntax("expected `,` or `]` in label"),
                    }
                }
                s = format!("{s}[{}]", consts.join(","));
            }
            s
        };
        while self.peek() == Some(GENERATED_PREFIX) {
            self.pos += 1;
            let suffix = match (self.peek(), self.peek_at(1)) {
                (Some(c @ ('a' | 'b')), Some(sign @ ('+' | '-'))) => {
                    self.pos += 2;
                    format!("{c}{sign}")
                }
                (Some(c @ ('p' | '+' | '-')), _) => {
                    self.pos += 1;
                    c.to_string()
                }
                _ => return self.syntax("unknown generated label suffix"),
            };
            spelling = format!("{spelling}${suffix}");
        }
        if spelling.contains(GENERATED_PREFIX) {
            Ok(Label::generated(spelling))
        } else {
            Ok(Label::new(spelling))
        }
    }

    /// `$f(literal)`, `$b(literal)`, `$s+(label,label)`, `$s-(label,label)`.
    fn generated_label_core(&mut self) -> Parsed<String> {
        self.pos += 1;
        let mut tag = self.ident()?;
        if tag == "s" {
            match self.peek() {
                Some(sign @ ('+' | '-')) => {
                    self.pos += 1;
                    tag.push(sign);
                }
                _ => return self.syntax("expected `+` or `-` after `$s`"),
            }
        }
        self.expect('(')?;
        let inner = match tag.as_str() {
            "f" | "b" => {
                let lit = self.literal()?;
                if matches!(&lit.atom, AtomSchema::Pattern { args, .. } if args.iter().any(|a| matches!(a, Term::Var(_)))) {
                    return self.syntax("variable inside generated symbol");
                }
                lit.to_string()
            }
            "s+" | "s-" => {
                self.skip_ws();
                let a = self.label()?;
                self.expect(',')?;
                self.skip_ws();
                let b = self.label()?;
                format!("{a},{b}")
            }
            _ => return self.syntax(format!("unknown generated label `${tag}`")),
        };
        self.expect(')')?;
        Ok(format!("${tag}({inner})"))
    }
}

enum Statement {
    Fact(LiteralSchema),
    Rule(RuleSchema),
    Superiority(Label, Label),
}
