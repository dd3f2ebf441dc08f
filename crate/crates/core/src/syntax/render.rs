use std::fmt::Write;

use num_complex::Complex64;

use super::{DeclarationSet, Derivation, Formula, GradeExpr, GradeRef, GradedOp, GradedSequent, Label, Sign};
use crate::evaluation::MdMode;

pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Atom(a) => {
            out.push_str(&a.name);
            if a.negated {
                out.push('^');
            }
        }
        Formula::Graded { op, left, right, g0, g1 } => {
            write_operand(out, left);
            out.push_str(match op {
                GradedOp::And => " &[",
                GradedOp::Or => " v[",
            });
            write_grade_ref(out, g0);
            out.push(',');
            write_grade_ref(out, g1);
            out.push_str("] ");
            write_operand(out, right);
        }
        Formula::Binary { op, left, right } => {
            if let Some(a) = f.qubit_atom().filter(|a| !a.negated) {
                out.push_str("Q_");
                out.push_str(&a.name);
                return;
            }
            write_operand(out, left);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_operand(out, right);
        }
        Formula::Not(inner) => {
            out.push_str("not ");
            write_operand(out, inner);
        }
    }
}

fn is_bare(f: &Formula) -> bool {
    match f {
        Formula::Atom(_) | Formula::Not(_) => true,
        _ => f.qubit_atom().is_some_and(|a| !a.negated),
    }
}

fn write_operand(out: &mut String, f: &Formula) {
    if is_bare(f) {
        write_formula(out, f);
    } else {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    }
}

fn write_grade_ref(out: &mut String, g: &GradeRef) {
    out.push_str(&g.symbol);
    if g.conjugated {
        out.push('*');
    }
}

pub(crate) fn render_grade_expr(g: &GradeExpr) -> String {
    let mut out = String::new();
    for (i, t) in g.terms.iter().enumerate() {
        match (i, t.sign) {
            (_, Sign::Minus) => out.push('-'),
            (0, Sign::Plus) => {}
            (_, Sign::Plus) => out.push('+'),
        }
        write_grade_ref(&mut out, &t.grade);
    }
    out
}

fn write_list(out: &mut String, fs: &[Formula]) {
    for (i, f) in fs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_formula(out, f);
    }
}

pub fn render_sequent(s: &GradedSequent) -> String {
    let mut out = String::new();
    write_list(&mut out, &s.antecedent);
    if !s.antecedent.is_empty() {
        out.push(' ');
    }
    out.push_str("|-");
    match &s.label {
        Label::Unlabelled => {}
        Label::Grade(g) => {
            out.push('{');
            out.push_str(&render_grade_expr(g));
            out.push('}');
        }
        Label::Eval(v) => {
            let _ = write!(out, "[{v}]");
        }
    }
    if !s.consequent.is_empty() {
        out.push(' ');
        write_list(&mut out, &s.consequent);
    }
    out
}

pub fn render_derivation(d: &Derivation) -> String {
    let mut out = format!("proof {} in {} {{\n", d.name, d.ruleset);
    for s in &d.steps {
        let premises: Vec<String> = s.premises.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "  {}: {} by {}({});", s.id, render_sequent(&s.conclusion), s.rule, premises.join(", "));
    }
    out.push_str("}\n");
    out
}

pub(crate) fn render_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Renders a preamble followed by its proof blocks.
pub fn render_script(decls: &DeclarationSet, derivations: &[Derivation]) -> String {
    let mut out = String::new();
    if !decls.atoms.is_empty() {
        let _ = writeln!(out, "atom {};", decls.atoms.join(", "));
    }
    if !decls.grades.is_empty() {
        let _ = writeln!(out, "grade {};", decls.grades.join(", "));
    }
    for (name, atom) in &decls.qubits {
        let _ = writeln!(out, "qubit {name} = {}{};", atom.name, if atom.negated { "^" } else { "" });
    }
    for (name, z) in &decls.bindings {
        let _ = writeln!(out, "bind {name} = {};", render_complex(*z));
    }
    if let Some(md) = decls.md {
        let mode = match md {
            MdMode::Norm => "norm",
            MdMode::Strict => "strict",
            MdMode::None => "none",
        };
        let _ = writeln!(out, "md {mode};");
    }
    for d in derivations {
        out.push('\n');
        out.push_str(&render_derivation(d));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{parse_formula, parse_script, parse_sequent, Atom, BinOp};
    use super::*;

    fn decls() -> DeclarationSet {
        DeclarationSet::new().with_atoms(&["p0", "p1", "A", "B"]).with_grades(&["z0", "z1"])
    }

    #[test]
    fn canonical_spacing() {
        let f = parse_formula("p0&[z0,z1]p1", &decls()).unwrap();
        assert_eq!(render_formula(&f), "p0 &[z0,z1] p1");
    }

    #[test]
    fn ent_renders_with_abbreviations() {
        let f = Formula::bin(BinOp::Ent, Formula::qubit(&Atom::new("A")), Formula::qubit(&Atom::new("B")));
        assert_eq!(render_formula(&f), "Q_A @ Q_B");
        let g = Formula::bin(BinOp::Ent, Formula::qubit(&Atom::new("A")), Formula::qubit(&Atom::new("A").negate()));
        assert_eq!(render_formula(&g), "Q_A @ (A^ & A)");
        assert_eq!(parse_formula(&render_formula(&g), &decls()).unwrap(), g);
    }

    #[test]
    fn sequents() {
        for text in
            ["|-{z0} p0", "p0 |-[0.5] p0", "p0 |-{z0*}", "A & B |-", "|- A^ v B^", "A, B |- A, B", "|-{z0*+z1*-z0} p0"]
        {
            let s = parse_sequent(text, &decls()).unwrap();
            assert_eq!(render_sequent(&s), text);
        }
    }

    #[test]
    fn nested_negation_and_parentheses() {
        for text in ["not not A", "not (A & B)", "(A par B) & (A^ par B^)", "(A -> B) <- (not A)"] {
            let f = parse_formula(text, &decls()).unwrap();
            let again = parse_formula(&render_formula(&f), &decls()).unwrap();
            assert_eq!(f, again, "{text}");
        }
        let f = parse_formula("(A -> B) <- (not A)", &decls()).unwrap();
        assert_eq!(render_formula(&f), "(A -> B) <- not A");
    }

    #[test]
    fn complex_rendering_roundtrips() {
        for z in [
            Complex64::new(0.5, -0.25),
            Complex64::new(-1.0, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ] {
            let doc = format!("grade z; bind z = {};", render_complex(z));
            assert_eq!(parse_script(&doc).unwrap().decls.bindings[0].1, z);
        }
    }

    #[test]
    fn script_render_is_a_fixed_point() {
        let doc = "atom p0, p1;\natom A;\ngrade z0, z1;\nbind z0 = 1+0i;\nmd strict;\nproof t in Lq {\n 1: p0 |-[1] p0 by id-axiom();\n}\n";
        let s = parse_script(doc).unwrap();
        let once = render_script(&s.decls, &s.derivations);
        let s2 = parse_script(&once).unwrap();
        assert_eq!(s, s2);
        assert_eq!(render_script(&s2.decls, &s2.derivations), once);
        assert!(once.contains("atom p0, p1, A;"));
    }
}
