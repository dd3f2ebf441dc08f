//! Abstract syntax for formulas, graded sequents and derivations.
//!
//! The concrete grammar is ASCII: `&[z0,z1]` and `v[z0*,z1*]` for the graded
//! connectives, `&`, `v`, `*`, `par`, `@`, `sect`, `->`, `<-` for the binary
//! ones, prefix `not`, postfix `^` for primitive negation of an atom. Sequent
//! labels are written `|-{z0+z1}` (grade) or `|-[0.5]` (evaluation).

mod lexer;
mod parser;
mod render;

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::RuleId;
use crate::evaluation::MdMode;

pub use parser::{parse_formula, parse_script, parse_sequent, Script};
pub use render::{render_derivation, render_formula, render_script, render_sequent};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SyntaxError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("operand of `{0}` is not a qubit formula: {1}")]
    NotQubit(&'static str, String),
    #[error("grade label on a two-sided sequent")]
    GradeOnTwoSided,
    #[error("grade label on a sequent with both sides empty")]
    GradeOnEmpty,
    #[error("evaluation label requires both sides non-empty")]
    EvalOnOneSided,
    #[error("evaluation {0} outside [0,1]")]
    EvalRange(f64),
    #[error("step {step} cites premise #{premise}, which is not an earlier step")]
    DanglingPremise { step: u32, premise: u32 },
    #[error("duplicate step id {0}")]
    DuplicateStep(u32),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("duplicate declaration `{0}`")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Atom {
    pub name: String,
    pub negated: bool,
}

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom { name: name.into(), negated: false }
    }

    pub fn negate(&self) -> Atom {
        Atom { name: self.name.clone(), negated: !self.negated }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GradeRef {
    pub symbol: String,
    pub conjugated: bool,
}

impl GradeRef {
    pub fn new(symbol: impl Into<String>) -> Self {
        GradeRef { symbol: symbol.into(), conjugated: false }
    }

    pub fn conj(symbol: impl Into<String>) -> Self {
        GradeRef { symbol: symbol.into(), conjugated: true }
    }

    pub fn toggled(&self) -> GradeRef {
        GradeRef { symbol: self.symbol.clone(), conjugated: !self.conjugated }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GradeTerm {
    pub sign: Sign,
    pub grade: GradeRef,
}

/// Formal signed sum of grade references, e.g. `z0*+z1*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GradeExpr {
    pub terms: Vec<GradeTerm>,
}

impl GradeExpr {
    pub fn single(g: GradeRef) -> Self {
        GradeExpr { terms: vec![GradeTerm { sign: Sign::Plus, grade: g }] }
    }

    pub fn sum(gs: impl IntoIterator<Item = GradeRef>) -> Self {
        GradeExpr { terms: gs.into_iter().map(|grade| GradeTerm { sign: Sign::Plus, grade }).collect() }
    }

    pub fn conjugated(&self) -> Self {
        GradeExpr { terms: self.terms.iter().map(|t| GradeTerm { sign: t.sign, grade: t.grade.toggled() }).collect() }
    }

    pub fn as_single(&self) -> Option<&GradeRef> {
        match self.terms.as_slice() {
            [GradeTerm { sign: Sign::Plus, grade }] => Some(grade),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BinOp {
    And,
    Or,
    Times,
    Par,
    Ent,
    EntDual,
    Implies,
    CoImplies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&",
            BinOp::Or => "v",
            BinOp::Times => "*",
            BinOp::Par => "par",
            BinOp::Ent => "@",
            BinOp::EntDual => "sect",
            BinOp::Implies => "->",
            BinOp::CoImplies => "<-",
        }
    }

    /// The symmetric connective under ⊥-duality.
    pub fn symmetric(self) -> BinOp {
        match self {
            BinOp::And => BinOp::Or,
            BinOp::Or => BinOp::And,
            BinOp::Times => BinOp::Par,
            BinOp::Par => BinOp::Times,
            BinOp::Ent => BinOp::EntDual,
            BinOp::EntDual => BinOp::Ent,
            BinOp::Implies => BinOp::CoImplies,
            BinOp::CoImplies => BinOp::Implies,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GradedOp {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Formula {
    Atom(Atom),
    Graded { op: GradedOp, left: Box<Formula>, right: Box<Formula>, g0: GradeRef, g1: GradeRef },
    Binary { op: BinOp, left: Box<Formula>, right: Box<Formula> },
    Not(Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Atom::new(name))
    }

    pub fn neg_atom(name: &str) -> Formula {
        Formula::Atom(Atom::new(name).negate())
    }

    pub fn bin(op: BinOp, left: Formula, right: Formula) -> Formula {
        Formula::Binary { op, left: Box::new(left), right: Box::new(right) }
    }

    pub fn graded(op: GradedOp, left: Formula, right: Formula, g0: GradeRef, g1: GradeRef) -> Formula {
        Formula::Graded { op, left: Box::new(left), right: Box::new(right), g0, g1 }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// `Q_a`, i.e. `a & a^`.
    pub fn qubit(a: &Atom) -> Formula {
        Formula::bin(BinOp::And, Formula::Atom(a.clone()), Formula::Atom(a.negate()))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    /// The atom `a` when `self` has the shape `a & a^`.
    pub fn qubit_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Binary { op: BinOp::And, left, right } => match (&**left, &**right) {
                (Formula::Atom(a), Formula::Atom(b)) if *b == a.negate() => Some(a),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_graded(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Graded { .. } => true,
            Formula::Binary { left, right, .. } => left.is_graded() || right.is_graded(),
            Formula::Not(f) => f.is_graded(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Graded { left, right, .. } | Formula::Binary { left, right, .. } => {
                1 + left.depth().max(right.depth())
            }
            Formula::Not(f) => 1 + f.depth(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

/// Operands of `@` and `sect` are qubit formulas; an atom is admitted on
/// one side for the measured form `A @ Q_B`.
pub(crate) fn check_ent_operands(op: BinOp, left: &Formula, right: &Formula) -> Result<(), SyntaxError> {
    let name = op.symbol();
    let lq = left.qubit_atom().is_some();
    let rq = right.qubit_atom().is_some();
    for (side, is_q) in [(left, lq), (right, rq)] {
        if !is_q && side.as_atom().is_none() {
            return Err(SyntaxError::NotQubit(name, render_formula(side)));
        }
    }
    if !lq && !rq {
        return Err(SyntaxError::NotQubit(name, render_formula(left)));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Label {
    Unlabelled,
    Grade(GradeExpr),
    Eval(f64),
}

impl Label {
    pub fn eval(&self) -> Option<f64> {
        match self {
            Label::Eval(v) => Some(*v),
            _ => None,
        }
    }

    pub fn grade(&self) -> Option<&GradeExpr> {
        match self {
            Label::Grade(g) => Some(g),
            _ => None,
        }
    }

    pub fn approx_eq(&self, other: &Label, tol: f64) -> bool {
        match (self, other) {
            (Label::Eval(a), Label::Eval(b)) => (a - b).abs() <= tol,
            _ => self == other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradedSequent {
    pub antecedent: Vec<Formula>,
    pub consequent: Vec<Formula>,
    pub label: Label,
}

impl GradedSequent {
    /// Builds a sequent, enforcing the label invariants.
    pub fn new(antecedent: Vec<Formula>, consequent: Vec<Formula>, label: Label) -> Result<Self, SyntaxError> {
        let s = GradedSequent { antecedent, consequent, label };
        s.validate(0.0)?;
        Ok(s)
    }

    pub fn unlabelled(antecedent: Vec<Formula>, consequent: Vec<Formula>) -> Self {
        GradedSequent { antecedent, consequent, label: Label::Unlabelled }
    }

    pub fn validate(&self, tol: f64) -> Result<(), SyntaxError> {
        let (a, c) = (self.antecedent.is_empty(), self.consequent.is_empty());
        match &self.label {
            Label::Unlabelled => Ok(()),
            Label::Grade(_) if a && c => Err(SyntaxError::GradeOnEmpty),
            Label::Grade(_) if !a && !c => Err(SyntaxError::GradeOnTwoSided),
            Label::Grade(_) => Ok(()),
            Label::Eval(_) if a || c => Err(SyntaxError::EvalOnOneSided),
            Label::Eval(v) if !(-tol..=1.0 + tol).contains(v) || v.is_nan() => Err(SyntaxError::EvalRange(*v)),
            Label::Eval(_) => Ok(()),
        }
    }

    pub fn approx_eq(&self, other: &GradedSequent, tol: f64) -> bool {
        self.antecedent == other.antecedent
            && self.consequent == other.consequent
            && self.label.approx_eq(&other.label, tol)
    }

    pub fn is_one_sided(&self) -> bool {
        self.antecedent.is_empty() != self.consequent.is_empty()
    }

    pub fn size(&self) -> usize {
        self.antecedent.iter().chain(&self.consequent).map(|f| f.depth() + 1).sum()
    }
}

impl fmt::Display for GradedSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_sequent(self))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub id: u32,
    pub conclusion: GradedSequent,
    pub rule: RuleId,
    pub premises: Vec<u32>,
}

/// A derivation as a list of numbered steps; the last step is the root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derivation {
    pub name: String,
    pub ruleset: String,
    pub steps: Vec<Step>,
}

impl Derivation {
    pub fn root(&self) -> Option<&Step> {
        self.steps.last()
    }

    pub fn step(&self, id: u32) -> Option<&Step> {
        self.steps.iter().find(|s| s.id == id)
    }

    /// Checks that every cited premise is an earlier step and ids are unique.
    pub fn validate_refs(&self) -> Result<(), SyntaxError> {
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.steps {
            for &p in &s.premises {
                if !seen.contains(&p) {
                    return Err(SyntaxError::DanglingPremise { step: s.id, premise: p });
                }
            }
            if !seen.insert(s.id) {
                return Err(SyntaxError::DuplicateStep(s.id));
            }
        }
        Ok(())
    }
}

/// Symbols declared in a script preamble, plus any grade bindings.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DeclarationSet {
    pub atoms: Vec<String>,
    pub grades: Vec<String>,
    /// Qubit abbreviations: name and the atom it abbreviates.
    pub qubits: Vec<(String, Atom)>,
    pub bindings: Vec<(String, Complex64)>,
    pub md: Option<MdMode>,
}

impl DeclarationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_atoms(mut self, names: &[&str]) -> Self {
        self.atoms.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn with_grades(mut self, names: &[&str]) -> Self {
        self.grades.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn with_qubit(mut self, name: &str, atom: Atom) -> Self {
        self.qubits.push((name.to_string(), atom));
        self
    }

    pub fn has_atom(&self, name: &str) -> bool {
        self.atoms.iter().any(|a| a == name)
    }

    pub fn has_grade(&self, name: &str) -> bool {
        self.grades.iter().any(|g| g == name)
    }

    pub fn qubit(&self, name: &str) -> Option<&Atom> {
        self.qubits.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }

    /// The partner of an atom under primitive negation in a two-atom
    /// language (`p0` and `p1`).
    pub fn atom_partner(&self, name: &str) -> Option<&str> {
        pair_partner(&self.atoms, name)
    }

    pub fn grade_partner(&self, name: &str) -> Option<&str> {
        pair_partner(&self.grades, name)
    }
}

fn pair_partner<'a>(list: &'a [String], name: &str) -> Option<&'a str> {
    match list {
        [a, b, ..] if a == name => Some(b),
        [a, b, ..] if b == name => Some(a),
        _ => None,
    }
}
