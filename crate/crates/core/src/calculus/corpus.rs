use serde::Serialize;

use super::check::{check_derivation_with_env, CheckReport, Verdict};
use super::{make_ruleset, CalcError, RuleSet};
use crate::evaluation::GradeEnv;
use crate::syntax::{parse_script, Script};

#[derive(Debug, Clone, Copy)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub source: &'static str,
    pub expected: Verdict,
}

macro_rules! entry {
    ($name:literal, $expected:ident, $summary:literal) => {
        CorpusEntry {
            name: $name,
            summary: $summary,
            source: include_str!(concat!("../../corpus/", $name, ".lq")),
            expected: Verdict::$expected,
        }
    };
}

const CORPUS: &[CorpusEntry] = &[
    entry!("qubit_theorem", Accepted, "the graded conjunction of a balanced qubit has truth value 1"),
    entry!("at_noncommutativity_via_exchange", Rejected, "commuting @ needs right exchange"),
    entry!("at_commutative_perp", Accepted, "@ of a qubit with its negation commutes"),
    entry!("cut_over_entanglement", Accepted, "cut on an entangled pair then par formation"),
    entry!("epr_rule", Accepted, "EPR rule with a derived measurement premise"),
    entry!("at_idempotence_by_contraction", Rejected, "Q_A @ Q_A |- Q_A needs contraction"),
    entry!("at_idempotence_by_weakening", Rejected, "Q_A |- Q_A @ Q_A needs weakening"),
    entry!("epr_from_cut", Rejected, "simulating EPR with cut needs weakening, contraction and contexts"),
    entry!("cut_from_epr", Rejected, "simulating cut with EPR needs EPR under contexts"),
];

pub fn corpus() -> &'static [CorpusEntry] {
    CORPUS
}

pub fn corpus_entry(name: &str) -> Result<&'static CorpusEntry, CalcError> {
    CORPUS.iter().find(|e| e.name == name).ok_or_else(|| CalcError::UnknownEntry(name.to_string()))
}

impl CorpusEntry {
    pub fn script(&self) -> Result<Script, CalcError> {
        Ok(parse_script(self.source)?)
    }

    /// Checks the entry under its declared ruleset.
    pub fn replay(&self) -> Result<ReplayReport, CalcError> {
        let script = self.script()?;
        let d = &script.derivations[0];
        self.replay_under(&make_ruleset(&d.ruleset)?)
    }

    /// Checks the entry under an arbitrary ruleset.
    pub fn replay_under(&self, rs: &RuleSet) -> Result<ReplayReport, CalcError> {
        let script = self.script()?;
        let env = if script.decls.bindings.is_empty() { None } else { GradeEnv::from_declarations(&script.decls).ok() };
        let report = check_derivation_with_env(rs, &script.derivations[0], env.as_ref());
        Ok(ReplayReport { matches: report.verdict == self.expected, expected: self.expected, report })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    #[serde(flatten)]
    pub report: CheckReport,
    pub expected: Verdict,
    pub matches: bool,
}

pub fn replay_named(name: &str) -> Result<ReplayReport, CalcError> {
    corpus_entry(name)?.replay()
}

pub fn replay_all() -> Result<Vec<ReplayReport>, CalcError> {
    CORPUS.iter().map(CorpusEntry::replay).collect()
}
