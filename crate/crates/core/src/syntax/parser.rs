use num_complex::Complex64;
use serde::Serialize;

use super::lexer::{lex, Spanned, Tok};
use super::{
    check_ent_operands, Atom, BinOp, DeclarationSet, Derivation, Formula, GradeExpr, GradeRef, GradeTerm, GradedOp,
    GradedSequent, Label, Sign, Step, SyntaxError,
};
use crate::calculus::RuleId;
use crate::evaluation::MdMode;

const KEYWORDS: &[&str] =
    &["v", "par", "sect", "not", "by", "in", "atom", "grade", "qubit", "bind", "md", "proof", "i"];

/// A parsed proof script.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Script {
    pub decls: DeclarationSet,
    pub derivations: Vec<Derivation>,
}

pub fn parse_formula(text: &str, decls: &DeclarationSet) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(text, decls)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

pub fn parse_sequent(text: &str, decls: &DeclarationSet) -> Result<GradedSequent, SyntaxError> {
    let mut p = Parser::new(text, decls)?;
    let s = p.sequent()?;
    p.expect_end()?;
    Ok(s)
}

pub fn parse_script(document: &str) -> Result<Script, SyntaxError> {
    let decls = DeclarationSet::new();
    let mut p = Parser::new(document, &decls)?;
    let mut decls = DeclarationSet::new();
    let mut derivations = Vec::new();
    while !p.at_end() {
        let kw = p.ident()?;
        match kw.as_str() {
            "atom" | "grade" => {
                for name in p.name_list()? {
                    if decls.has_atom(&name) || decls.has_grade(&name) || decls.qubit(&name).is_some() {
                        return Err(SyntaxError::Duplicate(name));
                    }
                    if kw == "atom" {
                        decls.atoms.push(name);
                    } else {
                        decls.grades.push(name);
                    }
                }
            }
            "qubit" => {
                let name = p.fresh_name()?;
                p.expect(&Tok::Eq)?;
                let atom_name = p.ident()?;
                if !decls.has_atom(&atom_name) {
                    return Err(SyntaxError::Undeclared(atom_name));
                }
                let mut atom = Atom::new(atom_name);
                while p.eat(&Tok::Caret) {
                    atom = atom.negate();
                }
                p.expect(&Tok::Semi)?;
                if decls.qubit(&name).is_some() || decls.has_atom(&name) {
                    return Err(SyntaxError::Duplicate(name));
                }
                decls.qubits.push((name, atom));
            }
            "bind" => {
                let name = p.ident()?;
                if !decls.has_grade(&name) {
                    return Err(SyntaxError::Undeclared(name));
                }
                p.expect(&Tok::Eq)?;
                let z = p.complex()?;
                p.expect(&Tok::Semi)?;
                match decls.bindings.iter_mut().find(|(n, _)| *n == name) {
                    Some(slot) => slot.1 = z,
                    None => decls.bindings.push((name, z)),
                }
            }
            "md" => {
                let mode = p.ident()?;
                decls.md = Some(match mode.as_str() {
                    "norm" => MdMode::Norm,
                    "strict" => MdMode::Strict,
                    "none" => MdMode::None,
                    other => return p.fail(format!("unknown md mode `{other}`")),
                });
                p.expect(&Tok::Semi)?;
            }
            "proof" => {
                p.decls = decls.clone();
                derivations.push(p.proof_block()?);
            }
            other => return p.fail_back(format!("expected a declaration or proof block, found `{other}`")),
        }
    }
    Ok(Script { decls, derivations })
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    decls: DeclarationSet,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str, decls: &DeclarationSet) -> Result<Self, SyntaxError> {
        let toks = lex(text)?;
        let lines = text.lines().count().max(1);
        let last_col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
        Ok(Parser { toks, pos: 0, decls: decls.clone(), end: (lines, last_col) })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.col))
    }

    fn fail<T>(&self, msg: String) -> Result<T, SyntaxError> {
        let (line, col) = self.here();
        Err(SyntaxError::Parse { line, col, msg })
    }

    fn fail_back<T>(&mut self, msg: String) -> Result<T, SyntaxError> {
        self.pos = self.pos.saturating_sub(1);
        self.fail(msg)
    }

    fn found(&self) -> String {
        self.peek().map_or("end of input".to_string(), Tok::describe)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_ident(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(x)) if x == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), SyntaxError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.fail(format!("expected {}, found {}", t.describe(), self.found()))
        }
    }

    fn expect_end(&self) -> Result<(), SyntaxError> {
        if self.at_end() {
            Ok(())
        } else {
            self.fail(format!("unexpected {}", self.found()))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail(format!("expected identifier, found {}", self.found())),
        }
    }

    fn fresh_name(&mut self) -> Result<String, SyntaxError> {
        let name = self.ident()?;
        if KEYWORDS.contains(&name.as_str()) {
            return self.fail_back(format!("`{name}` is reserved"));
        }
        Ok(name)
    }

    fn name_list(&mut self) -> Result<Vec<String>, SyntaxError> {
        let mut names = vec![self.fresh_name()?];
        while self.eat(&Tok::Comma) {
            names.push(self.fresh_name()?);
        }
        self.expect(&Tok::Semi)?;
        Ok(names)
    }

    fn number(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Number(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail(format!("expected number, found {}", self.found())),
        }
    }

    fn float(&mut self) -> Result<f64, SyntaxError> {
        let s = self.number()?;
        match s.parse::<f64>() {
            Ok(v) => Ok(v),
            Err(_) => self.fail_back(format!("malformed number `{s}`")),
        }
    }

    fn complex(&mut self) -> Result<Complex64, SyntaxError> {
        let neg = self.eat(&Tok::Minus);
        let first = self.float()?;
        let first = if neg { -first } else { first };
        if self.eat_ident("i") {
            return Ok(Complex64::new(0.0, first));
        }
        let sign = if self.eat(&Tok::Plus) {
            1.0
        } else if self.eat(&Tok::Minus) {
            -1.0
        } else {
            return Ok(Complex64::new(first, 0.0));
        };
        let im = self.float()?;
        if !self.eat_ident("i") {
            return self.fail(format!("expected `i` after imaginary part, found {}", self.found()));
        }
        Ok(Complex64::new(first, sign * im))
    }

    fn can_start_formula(&self) -> bool {
        match self.peek() {
            Some(Tok::LParen) => true,
            Some(Tok::Ident(s)) => !matches!(s.as_str(), "by" | "v" | "par" | "sect"),
            _ => false,
        }
    }

    fn peek_binop(&self) -> bool {
        match self.peek() {
            Some(Tok::Amp | Tok::Star | Tok::At | Tok::Arrow | Tok::BackArrow) => true,
            Some(Tok::Ident(s)) => matches!(s.as_str(), "v" | "par" | "sect"),
            _ => false,
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.unary()?;
        if !self.peek_binop() {
            return Ok(left);
        }
        let (l, c) = self.here();
        let tok = self.toks[self.pos].tok.clone();
        self.pos += 1;
        let graded = matches!(tok, Tok::Amp) || matches!(&tok, Tok::Ident(s) if s == "v");
        let f = if graded && self.peek() == Some(&Tok::LBracket) {
            self.pos += 1;
            let g0 = self.grade_ref()?;
            self.expect(&Tok::Comma)?;
            let g1 = self.grade_ref()?;
            self.expect(&Tok::RBracket)?;
            let right = self.unary()?;
            let op = if matches!(tok, Tok::Amp) { GradedOp::And } else { GradedOp::Or };
            Formula::graded(op, left, right, g0, g1)
        } else {
            let op = match &tok {
                Tok::Amp => BinOp::And,
                Tok::Star => BinOp::Times,
                Tok::At => BinOp::Ent,
                Tok::Arrow => BinOp::Implies,
                Tok::BackArrow => BinOp::CoImplies,
                Tok::Ident(s) if s == "v" => BinOp::Or,
                Tok::Ident(s) if s == "par" => BinOp::Par,
                _ => BinOp::EntDual,
            };
            let right = self.unary()?;
            if matches!(op, BinOp::Ent | BinOp::EntDual) {
                check_ent_operands(op, &left, &right).map_err(|e| SyntaxError::Parse {
                    line: l,
                    col: c,
                    msg: e.to_string(),
                })?;
            }
            Formula::bin(op, left, right)
        };
        if self.peek_binop() {
            return self.fail("chained connectives need parentheses".to_string());
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if self.eat_ident("not") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(&Tok::RParen)?;
            return Ok(f);
        }
        let name = self.ident()?;
        if KEYWORDS.contains(&name.as_str()) {
            return self.fail_back(format!("expected a formula, found `{name}`"));
        }
        if let Some(a) = self.decls.qubit(&name) {
            let f = Formula::qubit(a);
            if self.peek() == Some(&Tok::Caret) {
                return self.fail("primitive negation applies to atoms only".to_string());
            }
            return Ok(f);
        }
        if self.decls.has_atom(&name) {
            let mut a = Atom::new(name);
            while self.eat(&Tok::Caret) {
                a = a.negate();
            }
            return Ok(Formula::Atom(a));
        }
        if let Some(base) = name.strip_prefix("Q_") {
            if self.decls.has_atom(base) {
                if self.peek() == Some(&Tok::Caret) {
                    return self.fail("primitive negation applies to atoms only".to_string());
                }
                return Ok(Formula::qubit(&Atom::new(base)));
            }
        }
        Err(SyntaxError::Undeclared(name))
    }

    fn grade_ref(&mut self) -> Result<GradeRef, SyntaxError> {
        let name = self.ident()?;
        if !self.decls.has_grade(&name) {
            return Err(SyntaxError::Undeclared(name));
        }
        let conjugated = self.eat(&Tok::Star);
        Ok(GradeRef { symbol: name, conjugated })
    }

    fn grade_expr(&mut self) -> Result<GradeExpr, SyntaxError> {
        let mut terms = Vec::new();
        let mut sign = if self.eat(&Tok::Minus) {
            Sign::Minus
        } else {
            self.eat(&Tok::Plus);
            Sign::Plus
        };
        loop {
            terms.push(GradeTerm { sign, grade: self.grade_ref()? });
            sign = if self.eat(&Tok::Plus) {
                Sign::Plus
            } else if self.eat(&Tok::Minus) {
                Sign::Minus
            } else {
                break;
            };
        }
        Ok(GradeExpr { terms })
    }

    fn formula_list(&mut self) -> Result<Vec<Formula>, SyntaxError> {
        let mut out = Vec::new();
        if !self.can_start_formula() {
            return Ok(out);
        }
        out.push(self.formula()?);
        while self.eat(&Tok::Comma) {
            out.push(self.formula()?);
        }
        Ok(out)
    }

    fn sequent(&mut self) -> Result<GradedSequent, SyntaxError> {
        let antecedent = self.formula_list()?;
        let (line, col) = self.here();
        self.expect(&Tok::Turnstile)?;
        let label = if self.eat(&Tok::LBrace) {
            let g = self.grade_expr()?;
            self.expect(&Tok::RBrace)?;
            Label::Grade(g)
        } else if self.eat(&Tok::LBracket) {
            let v = self.float()?;
            self.expect(&Tok::RBracket)?;
            Label::Eval(v)
        } else {
            Label::Unlabelled
        };
        let consequent = self.formula_list()?;
        GradedSequent::new(antecedent, consequent, label).map_err(|e| SyntaxError::Parse {
            line,
            col,
            msg: e.to_string(),
        })
    }

    fn step_id(&mut self) -> Result<u32, SyntaxError> {
        self.eat(&Tok::Hash);
        let s = self.number()?;
        match s.parse::<u32>() {
            Ok(n) => Ok(n),
            Err(_) => self.fail_back(format!("step ids are non-negative integers, found `{s}`")),
        }
    }

    fn proof_block(&mut self) -> Result<Derivation, SyntaxError> {
        let name = self.fresh_name()?;
        if !self.eat_ident("in") {
            return self.fail(format!("expected `in`, found {}", self.found()));
        }
        let mut ruleset = self.ident()?;
        while self.eat(&Tok::Plus) {
            ruleset.push('+');
            ruleset.push_str(&self.ident()?);
        }
        self.expect(&Tok::LBrace)?;
        let mut steps = Vec::new();
        while !self.eat(&Tok::RBrace) {
            if self.at_end() {
                return self.fail("unterminated proof block".to_string());
            }
            let id = self.step_id()?;
            self.expect(&Tok::Colon)?;
            let conclusion = self.sequent()?;
            if !self.eat_ident("by") {
                return self.fail(format!("expected `by`, found {}", self.found()));
            }
            let (line, col) = self.here();
            let mut rule_name = self.ident()?;
            while self.peek() == Some(&Tok::Minus) && matches!(self.peek_at(1), Some(Tok::Ident(_))) {
                self.pos += 1;
                rule_name.push('-');
                rule_name.push_str(&self.ident()?);
            }
            let rule: RuleId = rule_name.parse().map_err(|_| SyntaxError::Parse {
                line,
                col,
                msg: SyntaxError::UnknownRule(rule_name.clone()).to_string(),
            })?;
            self.expect(&Tok::LParen)?;
            let mut premises = Vec::new();
            if !self.eat(&Tok::RParen) {
                premises.push(self.step_id()?);
                while self.eat(&Tok::Comma) {
                    premises.push(self.step_id()?);
                }
                self.expect(&Tok::RParen)?;
            }
            self.expect(&Tok::Semi)?;
            steps.push(Step { id, conclusion, rule, premises });
        }
        let d = Derivation { name, ruleset, steps };
        d.validate_refs()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decls() -> DeclarationSet {
        DeclarationSet::new().with_atoms(&["p0", "p1", "A", "B"]).with_grades(&["z0", "z1"])
    }

    #[test]
    fn graded_conjunction() {
        let f = parse_formula("p0 &[z0,z1] p1", &decls()).unwrap();
        assert_eq!(
            f,
            Formula::graded(
                GradedOp::And,
                Formula::atom("p0"),
                Formula::atom("p1"),
                GradeRef::new("z0"),
                GradeRef::new("z1")
            )
        );
    }

    #[test]
    fn grade_order_matters() {
        let a = parse_formula("p0 &[z0,z1] p1", &decls()).unwrap();
        let b = parse_formula("p0 &[z1,z0] p1", &decls()).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn bell_shape() {
        let f = parse_formula("(A par B) & (A^ par B^)", &decls()).unwrap();
        let expect = Formula::bin(
            BinOp::And,
            Formula::bin(BinOp::Par, Formula::atom("A"), Formula::atom("B")),
            Formula::bin(BinOp::Par, Formula::neg_atom("A"), Formula::neg_atom("B")),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn declared_qubit_abbreviations() {
        let d = decls().with_qubit("Q_A", Atom::new("A")).with_qubit("Q_B", Atom::new("B"));
        let f = parse_formula("Q_A @ Q_B", &d).unwrap();
        assert_eq!(f, Formula::bin(BinOp::Ent, Formula::qubit(&Atom::new("A")), Formula::qubit(&Atom::new("B"))));
    }

    #[test]
    fn ent_requires_qubit_operands() {
        let err = parse_formula("(A & B) @ Q_B", &decls()).unwrap_err();
        assert!(err.to_string().contains("not a qubit formula"), "{err}");
        assert!(parse_formula("A @ Q_B", &decls()).is_ok());
        assert!(parse_formula("A @ B", &decls()).is_err());
    }

    #[test]
    fn undeclared_symbols() {
        assert_eq!(parse_formula("q", &decls()), Err(SyntaxError::Undeclared("q".into())));
        assert_eq!(parse_formula("p0 &[z0,w] p1", &decls()), Err(SyntaxError::Undeclared("w".into())));
    }

    #[test]
    fn chained_connectives_are_rejected() {
        assert!(parse_formula("A & B & A", &decls()).is_err());
        assert!(parse_formula("A & (B & A)", &decls()).is_ok());
    }

    #[test]
    fn sequent_labels() {
        let s = parse_sequent("|-{z0} p0", &decls()).unwrap();
        assert_eq!(s.label, Label::Grade(GradeExpr::single(GradeRef::new("z0"))));
        assert!(s.antecedent.is_empty());
        let s = parse_sequent("p0 |-[0.5] p0", &decls()).unwrap();
        assert_eq!(s.label, Label::Eval(0.5));
        let s = parse_sequent("A, B |- A", &decls()).unwrap();
        assert_eq!(s.label, Label::Unlabelled);
        assert_eq!(s.antecedent.len(), 2);
        let s = parse_sequent("|-{z0*+z1*} p0, p1", &decls()).unwrap();
        assert_eq!(s.label, Label::Grade(GradeExpr::sum([GradeRef::conj("z0"), GradeRef::conj("z1")])));
    }

    #[test]
    fn grade_label_on_two_sided_sequent_is_an_error() {
        let err = parse_sequent("p0 |-{z0} p0", &decls()).unwrap_err();
        assert!(err.to_string().contains("two-sided"), "{err}");
        let err = parse_sequent("p0 |-[1.5] p0", &decls()).unwrap_err();
        assert!(err.to_string().contains("outside"), "{err}");
    }

    #[test]
    fn empty_document() {
        let s = parse_script("").unwrap();
        assert_eq!(s.decls, DeclarationSet::new());
        assert!(s.derivations.is_empty());
    }

    #[test]
    fn dangling_premise() {
        let doc = "atom p0; proof t in B { 1: p0 |- p0 by id-axiom(); 2: p0 |- p0 by id-axiom(); 3: p0 |- p0 by exch-l(#9); }";
        assert_eq!(parse_script(doc).unwrap_err(), SyntaxError::DanglingPremise { step: 3, premise: 9 });
    }

    #[test]
    fn unknown_rule() {
        let doc = "atom p0; proof t in B { 1: p0 |- p0 by magic(); }";
        let err = parse_script(doc).unwrap_err();
        assert!(err.to_string().contains("unknown rule `magic`"), "{err}");
    }

    #[test]
    fn bindings_and_md() {
        let doc = "grade z0, z1; bind z0 = 0.5+0.25i; bind z1 = -1-2i; md strict;";
        let s = parse_script(doc).unwrap();
        assert_eq!(s.decls.bindings[0].1, Complex64::new(0.5, 0.25));
        assert_eq!(s.decls.bindings[1].1, Complex64::new(-1.0, -2.0));
        assert_eq!(s.decls.md, Some(MdMode::Strict));
        let s = parse_script("grade z; bind z = 0.5i;").unwrap();
        assert_eq!(s.decls.bindings[0].1, Complex64::new(0.0, 0.5));
    }

    #[test]
    fn reserved_names() {
        assert!(parse_script("atom v;").is_err());
        assert!(parse_script("atom p0; atom p0;").is_err());
    }
}
