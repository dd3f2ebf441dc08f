//! The `lq` command line.
//!
//! Reports go to stdout as JSON with sorted keys; one-line summaries go to
//! stderr. Exit codes: 0 success, 1 rejected (or a law verdict contradicting
//! `--expect`), 2 usage or parse error, 3 numeric or environment error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::calculus::{
    check_derivation_with_env, corpus, corpus_entry, make_ruleset, perp_dual_sequent, perp_prime_dual_sequent,
    star_dual, CalcError, ReplayReport,
};
use crate::evaluation::{evaluate, md_check, GradeEnv};
use crate::lattice::{self, check_laws, cross_validate, hasse_dot, FiniteLattice, LatticeError};
use crate::syntax::{parse_script, parse_sequent, render_sequent, DeclarationSet, SyntaxError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lq", version, about = "Proof checker, evaluator and lattice auditor for graded quantum sequents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every derivation in a script.
    Check {
        script: PathBuf,
        /// Ruleset such as `L2q` or `L2q+weakening`; defaults to each derivation's own.
        #[arg(long)]
        ruleset: Option<String>,
    },
    /// Evaluate a graded sequent under the bindings of an env file.
    Eval {
        sequent: String,
        #[arg(long)]
        env: PathBuf,
    },
    /// Dualize a sequent.
    Dual {
        sequent: String,
        #[arg(long, value_enum)]
        kind: DualKind,
        /// Declarations to parse with; defaults to atoms p0, p1, A, B, C and grades z0, z1.
        #[arg(long)]
        env: Option<PathBuf>,
    },
    /// Build a lattice and audit it.
    Lattice {
        #[arg(value_enum)]
        builder: Builder,
        #[arg(long)]
        env: Option<PathBuf>,
        /// Second environment (the primed pair of `l2q4`).
        #[arg(long)]
        env2: Option<PathBuf>,
        /// Audit the lattice laws.
        #[arg(long)]
        laws: bool,
        /// Write the Hasse diagram as Graphviz text.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Exit 1 unless every applicable law has this verdict.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Replay a built-in corpus entry, or `all`.
    Replay {
        target: String,
        #[arg(long)]
        ruleset: Option<String>,
    },
    /// List the built-in corpus.
    CorpusList,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DualKind {
    Star,
    Perp,
    Perpprime,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Builder {
    Proj2,
    #[value(name = "proj_closure")]
    ProjClosure,
    Benzene,
    Lq2,
    Lm2,
    L2q4,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum Expect {
    Pass,
    Fail,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, message: e.to_string() }
}

fn numeric(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_NUMERIC, message: e.to_string() }
}

impl From<SyntaxError> for Failure {
    fn from(e: SyntaxError) -> Self {
        usage(e)
    }
}

impl From<CalcError> for Failure {
    fn from(e: CalcError) -> Self {
        usage(e)
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        numeric(e)
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn json<T: Serialize>(&mut self, value: &T) -> Result<(), Failure> {
        let v = serde_json::to_value(value).map_err(numeric)?;
        let text = serde_json::to_string_pretty(&v).map_err(numeric)?;
        writeln!(self.out, "{text}").map_err(usage)
    }

    fn note(&mut self, line: impl std::fmt::Display) {
        let _ = writeln!(self.err, "{line}");
    }
}

/// Runs `lq` on `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(f) => {
            io.note(format_args!("error: {}", f.message));
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_decls(path: &Path) -> Result<DeclarationSet, Failure> {
    Ok(parse_script(&read(path)?)?.decls)
}

fn load_env(path: &Path) -> Result<GradeEnv, Failure> {
    GradeEnv::from_declarations(&load_decls(path)?).map_err(numeric)
}

fn default_decls() -> DeclarationSet {
    DeclarationSet::new().with_atoms(&["p0", "p1", "A", "B", "C"]).with_grades(&["z0", "z1"])
}

fn dispatch(cmd: Command, io: &mut Io) -> Result<i32, Failure> {
    match cmd {
        Command::Check { script, ruleset } => check(&script, ruleset.as_deref(), io),
        Command::Eval { sequent, env } => {
            let decls = load_decls(&env)?;
            let s = parse_sequent(&sequent, &decls)?;
            let env = GradeEnv::from_declarations(&decls).map_err(numeric)?;
            let value = evaluate(&s, &env).map_err(numeric)?;
            let md = md_check(&env).map_err(numeric)?;
            io.note(format_args!("{} = {value}", render_sequent(&s)));
            io.json(&serde_json::json!({ "sequent": render_sequent(&s), "value": value, "md": md }))?;
            Ok(EXIT_OK)
        }
        Command::Dual { sequent, kind, env } => {
            let decls = match env {
                Some(p) => load_decls(&p)?,
                None => default_decls(),
            };
            let s = parse_sequent(&sequent, &decls)?;
            let d = match kind {
                DualKind::Star => star_dual(&s),
                DualKind::Perp => perp_dual_sequent(&s),
                DualKind::Perpprime => perp_prime_dual_sequent(&s, &decls),
            }
            .map_err(usage)?;
            let kind = format!("{kind:?}").to_lowercase();
            io.note(format_args!("{} => {}", render_sequent(&s), render_sequent(&d)));
            io.json(&serde_json::json!({ "kind": kind, "input": render_sequent(&s), "dual": render_sequent(&d) }))?;
            Ok(EXIT_OK)
        }
        Command::Lattice { builder, env, env2, laws, dot, expect } => {
            let need = |p: &Option<PathBuf>, flag: &str| {
                p.as_deref()
                    .ok_or_else(|| usage(format!("{builder:?} needs --{flag}").to_lowercase()))
                    .and_then(load_env)
            };
            let l = match builder {
                Builder::Proj2 => lattice::proj2()?,
                Builder::ProjClosure => lattice::proj_closure_qubit()?,
                Builder::Benzene => lattice::benzene_default()?,
                Builder::Lq2 => lattice::lq2(&need(&env, "env")?)?,
                Builder::Lm2 => lattice::lm2(&need(&env, "env")?)?,
                Builder::L2q4 => lattice::l2q4(&need(&env, "env")?, &need(&env2, "env2")?)?,
            };
            audit(&l, laws, dot.as_deref(), expect, io)
        }
        Command::Replay { target, ruleset } => replay(&target, ruleset.as_deref(), io),
        Command::CorpusList => {
            let list: Vec<_> = corpus()
                .iter()
                .map(|e| serde_json::json!({ "name": e.name, "summary": e.summary, "expected": e.expected }))
                .collect();
            io.json(&list)?;
            Ok(EXIT_OK)
        }
    }
}

fn check(path: &Path, ruleset: Option<&str>, io: &mut Io) -> Result<i32, Failure> {
    let fixed = ruleset.map(make_ruleset).transpose()?;
    let script = parse_script(&read(path)?)?;
    if script.derivations.is_empty() {
        return Err(usage(format!("{}: no proof blocks", path.display())));
    }
    let env = if script.decls.bindings.is_empty() {
        None
    } else {
        Some(GradeEnv::from_declarations(&script.decls).map_err(numeric)?)
    };
    let mut reports = Vec::new();
    for d in &script.derivations {
        let rs = match &fixed {
            Some(rs) => rs.clone(),
            None => make_ruleset(&d.ruleset)?,
        };
        let r = check_derivation_with_env(&rs, d, env.as_ref());
        io.note(format_args!("{}: {:?} under {}", r.name, r.verdict, r.ruleset));
        reports.push(r);
    }
    let code = if reports.iter().all(|r| r.accepted()) { EXIT_OK } else { EXIT_REJECTED };
    if reports.len() == 1 {
        io.json(&reports[0])?;
    } else {
        io.json(&reports)?;
    }
    Ok(code)
}

fn replay(target: &str, ruleset: Option<&str>, io: &mut Io) -> Result<i32, Failure> {
    let rs = ruleset.map(make_ruleset).transpose()?;
    let entries: Vec<_> = if target == "all" { corpus().iter().collect() } else { vec![corpus_entry(target)?] };
    let mut reports: Vec<ReplayReport> = Vec::new();
    for e in entries {
        let r = match &rs {
            Some(rs) => e.replay_under(rs)?,
            None => e.replay()?,
        };
        io.note(format_args!(
            "{}: {} (expected {}){}",
            e.name,
            verdict_word(r.report.accepted()),
            verdict_word(r.expected == crate::calculus::Verdict::Accepted),
            if r.matches { "" } else { " MISMATCH" }
        ));
        reports.push(r);
    }
    let code = if reports.iter().all(|r| r.matches) { EXIT_OK } else { EXIT_REJECTED };
    if target == "all" {
        io.json(&reports)?;
    } else {
        io.json(&reports[0])?;
    }
    Ok(code)
}

fn verdict_word(accepted: bool) -> &'static str {
    if accepted {
        "accepted"
    } else {
        "rejected"
    }
}

fn audit(
    l: &FiniteLattice,
    laws: bool,
    dot: Option<&Path>,
    expect: Option<Expect>,
    io: &mut Io,
) -> Result<i32, Failure> {
    if let Some(p) = dot {
        std::fs::write(p, hasse_dot(l)).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    }
    let mut code = EXIT_OK;
    if laws || expect.is_some() {
        let report = check_laws(l);
        for (name, v) in &report.laws {
            let word = match (&v.note, v.pass) {
                (Some(n), _) => format!("n/a ({n})"),
                (None, true) => "pass".to_string(),
                (None, false) => format!("fail {:?}", v.witness_labels),
            };
            io.note(format_args!("{name}: {word}"));
        }
        if let Some(e) = expect {
            if report.laws.values().any(|v| v.note.is_none() && v.pass != (e == Expect::Pass)) {
                code = EXIT_REJECTED;
            }
        }
        io.json(&report)?;
    } else {
        let covers: Vec<[&str; 2]> = l.covers().into_iter().map(|(a, b)| [l.label(a), l.label(b)]).collect();
        let labels: Vec<&str> = l.elements().iter().map(|e| e.label.as_str()).collect();
        io.json(&serde_json::json!({
            "lattice": l.name(),
            "elements": labels,
            "covers": covers,
            "payload_checks": cross_validate(l),
        }))?;
    }
    Ok(code)
}
