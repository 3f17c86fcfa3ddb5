//! Command-line front end: spec files, queries and exit codes.
//!
//! Exit codes: 0 yes or success, 1 no, 2 usage or validation error,
//! 3 width budget exceeded.

pub mod config;
pub mod spec;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use atomreach::automata::{nfa_to_json, orbit_count, validate, AutomataError, FoNfa, FoPds, FoSet, Violation};
use atomreach::logic::{LogicError, Theory, DEFAULT_MAX_WIDTH};
use atomreach::oracle::{cross_check, FiniteUniverse, OracleError};
use atomreach::reachability::Engine;
use atomreach::saturation::SaturationError;

use spec::{parse_spec, write_nfa, DiagnosticKind, SpecFile};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_WIDTH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "atomreach", version, about = "Backward reachability for pushdown systems over atoms")]
struct Cli {
    /// Largest number of variables a formula may be normalized over.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_WIDTH)]
    max_width: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Machines {
    file: PathBuf,
    #[arg(long)]
    pds: String,
    #[arg(long)]
    nfa: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a spec file and validate every NFA against its PDS.
    Check { file: PathBuf },
    /// Saturate an NFA under a PDS and print the result.
    Saturate {
        #[command(flatten)]
        m: Machines,
        #[arg(long)]
        json: bool,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Decide whether a configuration can reach the NFA's language.
    Member {
        #[command(flatten)]
        m: Machines,
        /// e.g. "lI | k(2) k(1) k(3)", stack top first.
        #[arg(long)]
        config: String,
    },
    /// Decide whether location `--to` is reachable from `--from` with one letter on the stack.
    Reach {
        file: PathBuf,
        #[arg(long)]
        pds: String,
        #[arg(long)]
        from: String,
        /// e.g. "k(any)" or "k(3)".
        #[arg(long)]
        bottom: String,
        #[arg(long)]
        to: String,
    },
    /// Decide whether some configuration accepted by `--c` reaches one accepted by `--b`.
    Decide {
        file: PathBuf,
        #[arg(long)]
        pds: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
    },
    /// Count orbits of a declared set or of all tuples of a width.
    Orbits {
        file: PathBuf,
        /// `<pds>.letters`, `<pds>.locations`, `<nfa>.states` or `<nfa>.finals`.
        #[arg(long, conflicts_with_all = ["atoms", "width"])]
        set: Option<String>,
        #[arg(long, requires = "width")]
        atoms: bool,
        #[arg(long, requires = "atoms")]
        width: Option<usize>,
    },
    /// Compare symbolic and explicit saturation over a finite universe.
    Oracle {
        #[command(flatten)]
        m: Machines,
        /// Comma-separated atoms; defaults to a backend-specific universe.
        #[arg(long)]
        universe: Option<String>,
        #[arg(long, default_value_t = 4)]
        stack_bound: usize,
        #[arg(long)]
        json: bool,
    },
}

/// A failed command: exit code and message for the error stream.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn logic_code(e: &LogicError) -> i32 {
    if matches!(e, LogicError::WidthExceeded { .. }) {
        EXIT_WIDTH
    } else {
        EXIT_USAGE
    }
}

fn violations_code(vs: &[Violation]) -> i32 {
    if !vs.is_empty() && vs.iter().all(|v| matches!(v, Violation::WidthBudget { .. })) {
        EXIT_WIDTH
    } else {
        EXIT_USAGE
    }
}

impl From<LogicError> for Failure {
    fn from(e: LogicError) -> Failure {
        Failure {
            code: logic_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<AutomataError> for Failure {
    fn from(e: AutomataError) -> Failure {
        let code = match &e {
            AutomataError::Logic(l) => logic_code(l),
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SaturationError> for Failure {
    fn from(e: SaturationError) -> Failure {
        match e {
            SaturationError::Automata(a) => a.into(),
            SaturationError::Invalid(ref vs) => Failure {
                code: violations_code(vs),
                message: e.to_string(),
            },
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Failure {
        match e {
            OracleError::Saturation(s) => s.into(),
            e => Failure::usage(e.to_string()),
        }
    }
}

struct Loaded {
    spec: SpecFile,
    engine: Engine,
}

fn load(path: &PathBuf, max_width: usize) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let spec = parse_spec(&text, max_width).map_err(|d| Failure {
        code: if d.kind == DiagnosticKind::WidthExceeded {
            EXIT_WIDTH
        } else {
            EXIT_USAGE
        },
        message: format!("{}:{d}", path.display()),
    })?;
    let engine = Engine::new(Theory::with_max_width(spec.atoms.clone(), max_width));
    Ok(Loaded { spec, engine })
}

impl Loaded {
    fn pds(&self, name: &str) -> Result<&FoPds, Failure> {
        self.spec
            .pds
            .get(name)
            .ok_or_else(|| Failure::usage(format!("no PDS named `{name}`")))
    }

    fn nfa(&self, name: &str) -> Result<&FoNfa, Failure> {
        self.spec
            .nfas
            .get(name)
            .map(|b| &b.nfa)
            .ok_or_else(|| Failure::usage(format!("no NFA named `{name}`")))
    }

    fn theory(&self) -> &Theory {
        self.engine.theory()
    }
}

fn yes_no(out: &mut String, answer: bool) -> i32 {
    out.push_str(if answer { "yes\n" } else { "no\n" });
    if answer {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

fn check(l: &Loaded, out: &mut String) -> Result<i32, Failure> {
    let mut all = Vec::new();
    for name in l.spec.pds.keys() {
        writeln!(out, "pds {name}: parsed").unwrap();
    }
    for (name, block) in &l.spec.nfas {
        let report = validate(l.theory(), &l.spec.pds[&block.pds], &block.nfa);
        if report.is_empty() {
            writeln!(out, "nfa {name} for {}: valid", block.pds).unwrap();
        } else {
            writeln!(out, "nfa {name} for {}: {} violation(s)", block.pds, report.len()).unwrap();
            for v in &report {
                writeln!(out, "  {v}").unwrap();
            }
        }
        all.extend(report);
    }
    Ok(if all.is_empty() { EXIT_YES } else { violations_code(&all) })
}

fn saturate_cmd(l: &Loaded, m: &Machines, json: bool, out: &mut String) -> Result<i32, Failure> {
    let (pds, nfa) = (l.pds(&m.pds)?, l.nfa(&m.nfa)?);
    let result = l.engine.saturate(pds, nfa)?;
    let theory = l.theory();
    let vocab = theory.vocabulary();
    if json {
        let added: Vec<_> = result
            .added
            .iter()
            .map(|((from, k, to), n)| json!({ "from": from, "letter": k, "to": to, "clauses": n }))
            .collect();
        let value = json!({
            "automaton": nfa_to_json(vocab, &result.automaton),
            "iterations": result.iterations,
            "added": added,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap()).unwrap();
        return Ok(EXIT_YES);
    }
    write_nfa(out, theory, &m.nfa, &m.pds, &result.automaton)?;
    writeln!(out, "iterations: {}", result.iterations).unwrap();
    for ((from, k, to), n) in &result.added {
        writeln!(out, "added on ({from}, {k}, {to}): {n} clause(s)").unwrap();
        let sat = &result.automaton.delta[&(from.clone(), k.clone(), to.clone())];
        let before = nfa.delta.get(&(from.clone(), k.clone(), to.clone()));
        let popped = pds.pop.get(&(from.clone(), k.clone(), to.clone()));
        let dims = [
            ("x", nfa.states.dim(from).unwrap_or(0)),
            ("y", nfa.alphabet.dim(k).unwrap_or(0)),
            ("p", nfa.states.dim(to).unwrap_or(0)),
        ];
        let vars: Vec<String> = dims.iter().flat_map(|&(p, n)| spec::names(p, n)).collect();
        for c in sat.clauses() {
            if !before.is_some_and(|d| d.contains(c)) && !popped.is_some_and(|d| d.contains(c)) {
                writeln!(out, "  {}", theory.render_clause(c, &vars)).unwrap();
            }
        }
    }
    Ok(EXIT_YES)
}

fn set_by_name(l: &Loaded, name: &str) -> Result<FoSet, Failure> {
    let (machine, part) = name
        .split_once('.')
        .ok_or_else(|| Failure::usage(format!("set `{name}` should have the form <machine>.<part>")))?;
    match part {
        "letters" => Ok(l.pds(machine)?.alphabet.clone()),
        "locations" => Ok(l.pds(machine)?.locations.clone()),
        "states" => Ok(l.nfa(machine)?.states.clone()),
        "finals" => {
            let mut set = FoSet::new();
            for (label, d) in &l.nfa(machine)?.finals {
                set.insert(label.clone(), d.width(), d.clone())?;
            }
            Ok(set)
        }
        _ => Err(Failure::usage(format!(
            "unknown part `{part}`; expected letters, locations, states or finals"
        ))),
    }
}

fn dispatch(cli: Cli, out: &mut String) -> Result<i32, Failure> {
    let max_width = cli.max_width;
    match cli.command {
        Command::Check { file } => check(&load(&file, max_width)?, out),
        Command::Saturate { m, json, output } => {
            let l = load(&m.file, max_width)?;
            match output {
                None => saturate_cmd(&l, &m, json, out),
                Some(path) => {
                    let mut text = String::new();
                    let code = saturate_cmd(&l, &m, json, &mut text)?;
                    std::fs::write(&path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
                    Ok(code)
                }
            }
        }
        Command::Member { m, config } => {
            let l = load(&m.file, max_width)?;
            let c = config::parse_configuration(&l.spec.atoms, &config).map_err(Failure::usage)?;
            let answer = l.engine.prestar_member(l.pds(&m.pds)?, l.nfa(&m.nfa)?, &c)?;
            Ok(yes_no(out, answer))
        }
        Command::Reach {
            file,
            pds,
            from,
            bottom,
            to,
        } => {
            let l = load(&file, max_width)?;
            let (letter, bottom) = config::parse_bottom(&l.spec.atoms, &bottom).map_err(Failure::usage)?;
            let answer = l.engine.reach_decision(l.pds(&pds)?, &from, &letter, &bottom, &to)?;
            Ok(yes_no(out, answer))
        }
        Command::Decide { file, pds, b, c } => {
            let l = load(&file, max_width)?;
            let answer = l.engine.decision_reachability(l.pds(&pds)?, l.nfa(&b)?, l.nfa(&c)?)?;
            Ok(yes_no(out, answer))
        }
        Command::Orbits { file, set, atoms, width } => {
            let l = load(&file, max_width)?;
            let count = match (set, atoms, width) {
                (Some(name), _, _) => orbit_count(&set_by_name(&l, &name)?),
                (None, true, Some(w)) => l.theory().legal_clauses(w)?.len(),
                _ => return Err(Failure::usage("give either --set <name> or --atoms --width <n>")),
            };
            writeln!(out, "{count}").unwrap();
            Ok(EXIT_YES)
        }
        Command::Oracle {
            m,
            universe,
            stack_bound,
            json,
        } => {
            let l = load(&m.file, max_width)?;
            let u = match universe {
                Some(text) => FiniteUniverse::parse(l.spec.atoms.clone(), &text)?,
                None => FiniteUniverse::default_for(&l.spec.atoms).ok_or_else(|| {
                    Failure::usage(format!("no default universe for `{}`; pass --universe", l.spec.atoms))
                })?,
            };
            let report = cross_check(l.theory(), &u, l.pds(&m.pds)?, l.nfa(&m.nfa)?, stack_bound)?;
            if json {
                let discrepancies: Vec<String> = report.discrepancies.iter().map(|d| d.to_string()).collect();
                let value = json!({
                    "exact": report.exact,
                    "configurations": report.configurations,
                    "explicit_members": report.explicit_members,
                    "symbolic_members": report.symbolic_members,
                    "explicit_transitions": report.explicit_transitions,
                    "discrepancies": discrepancies,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap()).unwrap();
            } else {
                write!(out, "{report}").unwrap();
            }
            Ok(if report.is_ok() { EXIT_YES } else { EXIT_NO })
        }
    }
}

/// Runs one command line, writing results to `out` and diagnostics to
/// `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_YES
            };
        }
    };
    let mut text = String::new();
    let code = match dispatch(cli, &mut text) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    };
    let _ = out.write_all(text.as_bytes());
    code
}
