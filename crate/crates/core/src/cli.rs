//! The `deflog` command line.
//!
//! Exit codes: 0 success or property holds, 1 property fails, 2 unreadable
//! or unparsable input, 3 precondition or semantic error.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::analysis::{self, GenParams};
use crate::engine::{self, Mode};
use crate::ground::{self, TheorySchema};
use crate::parser::{self, ParseOptions};
use crate::theory::{Atom, Sigma, Theory};
use crate::transform::{self, Stage};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "deflog", version, about = "Defeasible logic conclusions and transformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct InputArgs {
    /// Theory file, or `-` for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Instantiate rule schemas over the constants of the theory first.
    #[arg(long)]
    ground: bool,
    /// Accept `$` symbols, as found in transformation output.
    #[arg(long)]
    allow_generated: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print all conclusions.
    Conclusions {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Extra atoms to include, comma separated.
        #[arg(long, value_delimiter = ',')]
        atoms: Vec<String>,
    },
    /// Apply a transformation and print the result.
    Transform {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        stage: StageArg,
        /// Append size figures as comments.
        #[arg(long)]
        report: bool,
    },
    /// Check a structural property or equivalence with another theory.
    Check {
        #[command(flatten)]
        input: InputArgs,
        /// Second theory for `--what equiv` (`$` symbols allowed).
        other: Option<String>,
        #[arg(long, value_enum)]
        what: CheckArg,
        /// Atoms to compare on; defaults to the union of both languages.
        #[arg(long, value_delimiter = ',')]
        sigma: Vec<String>,
    },
    /// Outcomes of an atom and its negation, with the table verdict.
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        atom: String,
    },
    /// Generate random theories, or check a property on them.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 4)]
        atoms: usize,
        #[arg(long, default_value_t = 8)]
        rules: usize,
        #[arg(long, default_value_t = 1)]
        facts: usize,
        /// Fraction of defeaters.
        #[arg(long, default_value_t = 0.15)]
        defeaters: f64,
        /// Fraction of strict rules.
        #[arg(long, default_value_t = 0.25)]
        strict: f64,
        /// Superiority density.
        #[arg(long, default_value_t = 0.3)]
        sup: f64,
        #[arg(long, default_value_t = 2)]
        max_body: usize,
        #[arg(long)]
        acyclic: bool,
        #[arg(long)]
        well_formed: bool,
        #[arg(long)]
        normalized: bool,
        /// Property to check on every generated theory.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(analysis::properties::NAMES))]
        check: Option<String>,
        /// Where to write shrunk failing cases; defaults to $DEFLOG_FAIL_DIR.
        #[arg(long)]
        fail_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Reduced,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StageArg {
    Normal,
    ElimDft,
    ElimSup,
    Pipeline,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckArg {
    WellFormed,
    Normal,
    Equiv,
}

/// A failed invocation: exit code and message for stderr.
struct Failure(i32, String);

type CmdResult = Result<i32, Failure>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, input: &str) -> Result<String, Failure> {
        if input == "-" {
            let mut text = String::new();
            self.stdin.read_to_string(&mut text).map_err(|e| Failure(EXIT_PARSE, format!("stdin: {e}")))?;
            Ok(text)
        } else {
            std::fs::read_to_string(input).map_err(|e| Failure(EXIT_PARSE, format!("{input}: {e}")))
        }
    }

    fn theory(&mut self, args: &InputArgs) -> Result<Theory, Failure> {
        let opts = ParseOptions { allow_generated: args.allow_generated };
        self.theory_with(&args.input, opts, args.ground)
    }

    fn theory_with(&mut self, input: &str, opts: ParseOptions, ground: bool) -> Result<Theory, Failure> {
        let text = self.read(input)?;
        let schema = parser::parse_with(&text, opts).map_err(|e| Failure(EXIT_PARSE, format!("{input}:{e}")))?;
        to_theory(&schema, ground)
    }

    fn print(&mut self, text: &str) -> Result<(), Failure> {
        self.out.write_all(text.as_bytes()).map_err(|e| Failure(EXIT_PRECONDITION, format!("stdout: {e}")))
    }
}

fn to_theory(schema: &TheorySchema, ground: bool) -> Result<Theory, Failure> {
    let result = if ground { ground::ground(schema) } else { schema.to_theory() };
    result.map_err(|e| {
        let hint = if ground { "" } else { " (use --ground)" };
        Failure(EXIT_PRECONDITION, format!("{e}{hint}"))
    })
}

/// Parses `name` or `name(c1,c2)` into a user atom.
fn atom_arg(s: &str) -> Result<Atom, Failure> {
    let t = parser::parse_ground(&format!("{}.", s.trim()), ParseOptions::default())
        .map_err(|e| Failure(EXIT_PARSE, format!("atom `{s}`: {e}")))?;
    match t.facts().collect::<Vec<_>>().as_slice() {
        [l] if l.positive => Ok(l.atom.clone()),
        _ => Err(Failure(EXIT_PARSE, format!("`{s}` is not an atom"))),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let mut io = Io { stdin, out: stdout };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "deflog: {msg}");
            code
        }
    }
}

fn dispatch(command: Command, io: &mut Io) -> CmdResult {
    match command {
        Command::Conclusions { input, mode, atoms } => {
            let t = io.theory(&input)?;
            let extra = atoms.iter().map(|a| atom_arg(a)).collect::<Result<Vec<_>, _>>()?;
            let mode = match mode {
                ModeArg::Full => Mode::Full,
                ModeArg::Reduced => Mode::Reduced,
            };
            let c = engine::conclusions_with_atoms(&t, mode, &extra)
                .map_err(|e| Failure(EXIT_PRECONDITION, e.to_string()))?;
            io.print(&c.listing())?;
            Ok(EXIT_OK)
        }
        Command::Transform { input, stage, report } => {
            let t = io.theory(&input)?;
            let stage = match stage {
                StageArg::Normal => Stage::Normal,
                StageArg::ElimDft => Stage::ElimDft,
                StageArg::ElimSup => Stage::ElimSup,
                StageArg::Pipeline => Stage::Pipeline,
            };
            let (out, rep) = transform::apply(stage, &t).map_err(|e| Failure(EXIT_PRECONDITION, e.to_string()))?;
            io.print(&parser::print(&out))?;
            if report {
                io.print(&rep.to_string())?;
            }
            Ok(EXIT_OK)
        }
        Command::Check { input, other, what, sigma } => check(io, &input, other, what, &sigma),
        Command::Classify { input, atom } => {
            let t = io.theory(&input)?;
            let atom = atom_arg(&atom)?;
            if !t.atoms().contains(&atom) {
                return Err(Failure(EXIT_PRECONDITION, format!("unknown atom `{atom}`")));
            }
            let c = engine::full_conclusions(&t, []);
            let v = analysis::classify_pair(&c, &atom);
            io.print(&format!("{atom}: {}  ~{atom}: {}  pair: {}\n", v.outcome_p, v.outcome_not_p, v.status))?;
            Ok(EXIT_OK)
        }
        Command::Gen {
            seed,
            count,
            atoms,
            rules,
            facts,
            defeaters,
            strict,
            sup,
            max_body,
            acyclic,
            well_formed,
            normalized,
            check,
            fail_dir,
        } => {
            let params = GenParams {
                num_atoms: atoms,
                num_rules: rules,
                num_facts: facts,
                defeater_fraction: defeaters,
                strict_fraction: strict,
                sup_density: sup,
                max_body,
                force_acyclic: acyclic,
                force_well_formed: well_formed,
                force_normalized: normalized,
                ..GenParams::default()
            };
            analysis::gen_theory(seed, &params).map_err(|e| Failure(EXIT_PRECONDITION, e.to_string()))?;
            let seeds = seed..seed.saturating_add(count);
            let generate = |s| analysis::gen_theory(s, &params).expect("parameters validated above");
            match check {
                None => {
                    for s in seeds {
                        io.print(&format!("% seed {s}\n{}", parser::print(&generate(s))))?;
                    }
                    Ok(EXIT_OK)
                }
                Some(name) => {
                    let prop = analysis::properties::by_name(&name).expect("clap restricts the names");
                    let dir = fail_dir.or_else(analysis::fail_dir_from_env);
                    let failures = analysis::run_property(&name, seeds, generate, prop, dir.as_deref());
                    for f in &failures {
                        io.print(&format!("% FAIL {f}\n"))?;
                    }
                    io.print(&format!("% {name}: {} of {count} theories failed\n", failures.len()))?;
                    Ok(if failures.is_empty() { EXIT_OK } else { EXIT_FAILS })
                }
            }
        }
    }
}

fn check(io: &mut Io, input: &InputArgs, other: Option<String>, what: CheckArg, sigma: &[String]) -> CmdResult {
    let holds = match what {
        CheckArg::WellFormed => {
            let report = io.theory(input)?.check_well_formed();
            match report.cycle_text() {
                Some(cycle) => io.print(&format!("cyclic superiority: {cycle}\n"))?,
                None => io.print("acyclic superiority\n")?,
            }
            for (a, b) in &report.non_complementary {
                io.print(&format!("non-complementary superiority: {a} > {b}\n"))?;
            }
            report.is_well_formed()
        }
        CheckArg::Normal => {
            let report = io.theory(input)?.check_normal();
            let yes = |b: bool| if b { "yes" } else { "no" };
            io.print(&format!("literal rule condition: {}\n", yes(report.literal_rule_condition())))?;
            io.print(&format!("no strict rule in superiority: {}\n", yes(report.no_strict_in_sup())))?;
            io.print(&format!("no facts: {}\n", yes(report.no_facts())))?;
            report.is_normal()
        }
        CheckArg::Equiv => {
            let Some(other) = other else {
                return Err(Failure(EXIT_PRECONDITION, "--what equiv needs a second theory".into()));
            };
            let t1 = io.theory(input)?;
            let t2 = io.theory_with(&other, ParseOptions::generated(), input.ground)?;
            let sigma = if sigma.is_empty() {
                t1.sigma().union(&t2.sigma())
            } else {
                Sigma::from_atoms(sigma.iter().map(|a| atom_arg(a)).collect::<Result<Vec<_>, _>>()?)
            };
            let names: Vec<String> = sigma.atoms.iter().map(Atom::to_string).collect();
            match analysis::equivalence_diff(&t1, &t2, &sigma) {
                None => {
                    io.print(&format!("equivalent over {{{}}}\n", names.join(",")))?;
                    true
                }
                Some(diff) => {
                    io.print(&format!("not equivalent over {{{}}}: {diff}\n", names.join(",")))?;
                    false
                }
            }
        }
    };
    Ok(if holds { EXIT_OK } else { EXIT_FAILS })
}
