use super::{RuleError, RuleId, RuleSet};
use crate::evaluation::tolerance;
use crate::syntax::{check_ent_operands, Atom, BinOp, Formula, GradeExpr, GradeRef, GradedOp, GradedSequent, Label};

/// Information a rule cannot recover from its premises alone.
///
/// `principal` names the introduced formula (needed for graded connectives,
/// one-premise reflections, axioms and weakening), `index` selects a
/// position (exchange, contraction, weakening, axiom variant), `label` is the
/// conclusion label for axioms and graded negation, `cut_at` locates the cut
/// formula in both premises, and `sequent` is the assumed conclusion of `hyp`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RuleParams {
    pub principal: Option<Formula>,
    pub index: Option<usize>,
    pub label: Option<Label>,
    pub cut_at: Option<(usize, usize)>,
    pub sequent: Option<GradedSequent>,
}

impl RuleParams {
    pub fn principal(f: Formula) -> Self {
        RuleParams { principal: Some(f), ..Default::default() }
    }

    pub fn index(i: usize) -> Self {
        RuleParams { index: Some(i), ..Default::default() }
    }

    pub fn with_label(mut self, l: Label) -> Self {
        self.label = Some(l);
        self
    }

    pub fn with_index(mut self, i: usize) -> Self {
        self.index = Some(i);
        self
    }
}

/// Applies `rule` to `premises`, returning the unique conclusion.
pub fn apply_rule(
    rs: &RuleSet,
    rule: RuleId,
    premises: &[GradedSequent],
    params: &RuleParams,
) -> Result<GradedSequent, RuleError> {
    apply_traced(rs, rule, premises, params).map(|(s, _)| s)
}

type Traced = (GradedSequent, Vec<String>);

fn shape<T>(msg: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError::Shape(msg.into()))
}

fn arity(rule: RuleId, premises: &[GradedSequent], n: &[usize]) -> Result<(), RuleError> {
    if n.contains(&premises.len()) {
        Ok(())
    } else {
        shape(format!("{rule} takes {n:?} premises, got {}", premises.len()))
    }
}

fn seq(antecedent: Vec<Formula>, consequent: Vec<Formula>, label: Label) -> GradedSequent {
    GradedSequent { antecedent, consequent, label }
}

fn cat(parts: &[&[Formula]]) -> Vec<Formula> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

/// Active formulas first on the right, context after.
fn right_split<'a>(rs: &RuleSet, s: &'a GradedSequent, n: usize) -> Result<(&'a [Formula], &'a [Formula]), RuleError> {
    if s.consequent.len() < n {
        return shape(format!("expected {n} active formula(s) on the right of `{s}`"));
    }
    let (act, ctx) = s.consequent.split_at(n);
    if !ctx.is_empty() && !rs.contexts.right {
        return shape(format!("right context not allowed in `{s}`"));
    }
    Ok((act, ctx))
}

/// Context first on the left, active formulas last.
fn left_split<'a>(rs: &RuleSet, s: &'a GradedSequent, n: usize) -> Result<(&'a [Formula], &'a [Formula]), RuleError> {
    if s.antecedent.len() < n {
        return shape(format!("expected {n} active formula(s) on the left of `{s}`"));
    }
    let (ctx, act) = s.antecedent.split_at(s.antecedent.len() - n);
    if !ctx.is_empty() && !rs.contexts.left {
        return shape(format!("left context not allowed in `{s}`"));
    }
    Ok((act, ctx))
}

fn no_left_ctx(rs: &RuleSet, s: &GradedSequent) -> Result<(), RuleError> {
    if !s.antecedent.is_empty() && !rs.contexts.left {
        return shape(format!("left context not allowed in `{s}`"));
    }
    Ok(())
}

fn no_right_ctx(rs: &RuleSet, s: &GradedSequent) -> Result<(), RuleError> {
    if !s.consequent.is_empty() && !rs.contexts.right {
        return shape(format!("right context not allowed in `{s}`"));
    }
    Ok(())
}

fn common_label(premises: &[GradedSequent]) -> Result<Label, RuleError> {
    let Some(first) = premises.first() else {
        return Ok(Label::Unlabelled);
    };
    for p in &premises[1..] {
        if !p.label.approx_eq(&first.label, tolerance()) {
            return shape(format!("premise labels differ: `{first}` and `{p}`"));
        }
    }
    Ok(first.label.clone())
}

fn same(what: &str, a: &[Formula], b: &[Formula]) -> Result<(), RuleError> {
    if a == b {
        Ok(())
    } else {
        shape(format!("{what} differ between premises"))
    }
}

fn need_principal(rule: RuleId, p: &RuleParams) -> Result<Formula, RuleError> {
    p.principal.clone().ok_or_else(|| RuleError::Shape(format!("{rule} needs its principal formula")))
}

fn binary_parts(f: &Formula, want: BinOp) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Binary { op, left, right } if *op == want => Some((left, right)),
        _ => None,
    }
}

fn graded_parts(f: &Formula, want: GradedOp) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Graded { op, left, right, .. } if *op == want => Some((left, right)),
        _ => None,
    }
}

fn atom_of(f: &Formula) -> Result<&Atom, RuleError> {
    f.as_atom().ok_or_else(|| RuleError::Shape(format!("`{f}` is not an atom")))
}

fn q(a: &Atom) -> Formula {
    Formula::qubit(a)
}

fn eval_of(s: &GradedSequent) -> Result<f64, RuleError> {
    s.label.eval().ok_or_else(|| RuleError::Shape(format!("`{s}` carries no evaluation label")))
}

fn single_grade(l: &Label) -> Option<&GradeRef> {
    l.grade().and_then(GradeExpr::as_single)
}

pub(crate) fn apply_traced(
    rs: &RuleSet,
    rule: RuleId,
    premises: &[GradedSequent],
    params: &RuleParams,
) -> Result<Traced, RuleError> {
    if !rs.allows(rule) {
        return Err(RuleError::Absent { rule, ruleset: rs.name.clone() });
    }
    let p = premises;
    let plain = |s: GradedSequent| Ok((s, Vec::new()));
    match rule {
        RuleId::Hyp => {
            arity(rule, p, &[0])?;
            let s = params.sequent.clone().ok_or_else(|| RuleError::Shape("hyp needs its sequent".into()))?;
            plain(s)
        }
        RuleId::IdAxiom => {
            arity(rule, p, &[0])?;
            let a = need_principal(rule, params)?;
            let label = params.label.clone().unwrap_or(Label::Unlabelled);
            plain(seq(vec![a.clone()], vec![a], label))
        }
        RuleId::AtAxiom => {
            arity(rule, p, &[0])?;
            let f = need_principal(rule, params)?;
            let (l, r) = binary_parts(&f, BinOp::Ent).ok_or_else(|| RuleError::Shape(format!("`{f}` is not an @")))?;
            let (Some(a), Some(b)) = (l.qubit_atom(), r.qubit_atom()) else {
                return shape(format!("operands of `{f}` are not qubits"));
            };
            let cons = match params.index.unwrap_or(0) {
                0 => vec![Formula::Atom(a.clone()), Formula::Atom(b.clone())],
                1 => vec![Formula::Atom(a.negate()), Formula::Atom(b.negate())],
                i => return shape(format!("at-axiom has variants 0 and 1, not {i}")),
            };
            plain(seq(vec![f], cons, params.label.clone().unwrap_or(Label::Unlabelled)))
        }
        RuleId::GandAxiom | RuleId::GorAxiom => {
            arity(rule, p, &[0])?;
            let f = need_principal(rule, params)?;
            let want = if rule == RuleId::GandAxiom { GradedOp::And } else { GradedOp::Or };
            let (l, r) =
                graded_parts(&f, want).ok_or_else(|| RuleError::Shape(format!("`{f}` has the wrong connective")))?;
            let part = match params.index.unwrap_or(0) {
                0 => l.clone(),
                1 => r.clone(),
                i => return shape(format!("{rule} has variants 0 and 1, not {i}")),
            };
            let label = params.label.clone().unwrap_or(Label::Unlabelled);
            plain(if rule == RuleId::GandAxiom {
                seq(vec![f], vec![part], label)
            } else {
                seq(vec![part], vec![f], label)
            })
        }

        RuleId::AndForm => {
            arity(rule, p, &[2])?;
            let (a, d0) = right_split(rs, &p[0], 1)?;
            let (b, d1) = right_split(rs, &p[1], 1)?;
            same("antecedents", &p[0].antecedent, &p[1].antecedent)?;
            same("right contexts", d0, d1)?;
            let f = Formula::bin(BinOp::And, a[0].clone(), b[0].clone());
            plain(seq(p[0].antecedent.clone(), cat(&[&[f], d0]), common_label(p)?))
        }
        RuleId::OrForm => {
            arity(rule, p, &[2])?;
            let (a, c0) = left_split(rs, &p[0], 1)?;
            let (b, c1) = left_split(rs, &p[1], 1)?;
            same("consequents", &p[0].consequent, &p[1].consequent)?;
            same("left contexts", c0, c1)?;
            let f = Formula::bin(BinOp::Or, a[0].clone(), b[0].clone());
            plain(seq(cat(&[c0, &[f]]), p[0].consequent.clone(), common_label(p)?))
        }
        RuleId::AndRefl => {
            arity(rule, p, &[1, 2])?;
            if p.len() == 2 {
                let (a, c0) = left_split(rs, &p[0], 1)?;
                let (b, c1) = left_split(rs, &p[1], 1)?;
                same("consequents", &p[0].consequent, &p[1].consequent)?;
                same("left contexts", c0, c1)?;
                let f = Formula::bin(BinOp::And, a[0].clone(), b[0].clone());
                return plain(seq(cat(&[c0, &[f]]), p[0].consequent.clone(), common_label(p)?));
            }
            let f = need_principal(rule, params)?;
            let (l, r) = binary_parts(&f, BinOp::And).ok_or_else(|| RuleError::Shape(format!("`{f}` is not a &")))?;
            let (x, ctx) = left_split(rs, &p[0], 1)?;
            if x[0] != *l && x[0] != *r {
                return shape(format!("`{}` is not an operand of `{f}`", x[0]));
            }
            plain(seq(cat(&[ctx, std::slice::from_ref(&f)]), p[0].consequent.clone(), p[0].label.clone()))
        }
        RuleId::OrRefl => {
            arity(rule, p, &[1, 2])?;
            if p.len() == 2 {
                let (a, d0) = right_split(rs, &p[0], 1)?;
                let (b, d1) = right_split(rs, &p[1], 1)?;
                same("antecedents", &p[0].antecedent, &p[1].antecedent)?;
                same("right contexts", d0, d1)?;
                let f = Formula::bin(BinOp::Or, a[0].clone(), b[0].clone());
                return plain(seq(p[0].antecedent.clone(), cat(&[&[f], d0]), common_label(p)?));
            }
            let f = need_principal(rule, params)?;
            let (l, r) = binary_parts(&f, BinOp::Or).ok_or_else(|| RuleError::Shape(format!("`{f}` is not a v")))?;
            let (x, ctx) = right_split(rs, &p[0], 1)?;
            if x[0] != *l && x[0] != *r {
                return shape(format!("`{}` is not an operand of `{f}`", x[0]));
            }
            plain(seq(p[0].antecedent.clone(), cat(&[std::slice::from_ref(&f), ctx]), p[0].label.clone()))
        }
        RuleId::TimesForm => {
            arity(rule, p, &[1])?;
            let (ab, ctx) = left_split(rs, &p[0], 2)?;
            let f = Formula::bin(BinOp::Times, ab[0].clone(), ab[1].clone());
            plain(seq(cat(&[ctx, &[f]]), p[0].consequent.clone(), p[0].label.clone()))
        }
        RuleId::TimesRefl => {
            arity(rule, p, &[2])?;
            let (a, d0) = right_split(rs, &p[0], 1)?;
            let (b, d1) = right_split(rs, &p[1], 1)?;
            let f = Formula::bin(BinOp::Times, a[0].clone(), b[0].clone());
            plain(seq(cat(&[&p[0].antecedent, &p[1].antecedent]), cat(&[&[f], d0, d1]), common_label(p)?))
        }
        RuleId::ParForm => {
            arity(rule, p, &[1])?;
            let (ab, ctx) = right_split(rs, &p[0], 2)?;
            let f = Formula::bin(BinOp::Par, ab[0].clone(), ab[1].clone());
            plain(seq(p[0].antecedent.clone(), cat(&[&[f], ctx]), p[0].label.clone()))
        }
        RuleId::ParRefl => {
            arity(rule, p, &[2])?;
            let (a, c0) = left_split(rs, &p[0], 1)?;
            let (b, c1) = left_split(rs, &p[1], 1)?;
            let f = Formula::bin(BinOp::Par, a[0].clone(), b[0].clone());
            plain(seq(cat(&[c0, c1, &[f]]), cat(&[&p[0].consequent, &p[1].consequent]), common_label(p)?))
        }

        RuleId::AtForm => {
            arity(rule, p, &[1, 2])?;
            let (xy, d0) = right_split(rs, &p[0], 2)?;
            let f = if p.len() == 2 {
                let (neg, d1) = right_split(rs, &p[1], 2)?;
                same("antecedents", &p[0].antecedent, &p[1].antecedent)?;
                same("right contexts", d0, d1)?;
                let (a, b) = (atom_of(&xy[0])?, atom_of(&xy[1])?);
                if neg != [Formula::Atom(a.negate()), Formula::Atom(b.negate())] {
                    return shape(format!("second premise must assert `{}`, `{}`", a.negate().name, b.negate().name));
                }
                Formula::bin(BinOp::Ent, q(a), q(b))
            } else {
                if xy[0].qubit_atom().is_none() || xy[1].qubit_atom().is_none() {
                    return shape("one-premise at-form needs two qubit formulas");
                }
                Formula::bin(BinOp::Ent, xy[0].clone(), xy[1].clone())
            };
            plain(seq(p[0].antecedent.clone(), cat(&[&[f], d0]), common_label(p)?))
        }
        RuleId::AtRefl => {
            arity(rule, p, &[2, 4])?;
            if p.len() == 4 {
                let mut acts = Vec::new();
                for s in p {
                    let (x, ctx) = left_split(rs, s, 1)?;
                    if !ctx.is_empty() {
                        return shape("four-premise at-refl takes no left context");
                    }
                    acts.push(x[0].clone());
                }
                same("consequents of the first and third premise", &p[0].consequent, &p[2].consequent)?;
                same("consequents of the second and fourth premise", &p[1].consequent, &p[3].consequent)?;
                let (a, b) = (atom_of(&acts[0])?, atom_of(&acts[1])?);
                if acts[2] != Formula::Atom(a.negate()) || acts[3] != Formula::Atom(b.negate()) {
                    return shape("third and fourth premises must use the negated atoms");
                }
                let f = Formula::bin(BinOp::Ent, q(a), q(b));
                return plain(seq(vec![f], cat(&[&p[0].consequent, &p[1].consequent]), common_label(p)?));
            }
            let (x, c0) = left_split(rs, &p[0], 1)?;
            let (y, c1) = left_split(rs, &p[1], 1)?;
            let (x, y) = (&x[0], &y[0]);
            let f = match &params.principal {
                Some(f) => {
                    let (l, r) =
                        binary_parts(f, BinOp::Ent).ok_or_else(|| RuleError::Shape(format!("`{f}` is not an @")))?;
                    let fits = match (l.qubit_atom(), r.qubit_atom()) {
                        (Some(a), Some(b)) => {
                            let atoms = |a: Atom, b: Atom| (Formula::Atom(a), Formula::Atom(b));
                            let (x, y) = (x.clone(), y.clone());
                            (x.clone(), y.clone()) == atoms(a.clone(), b.clone())
                                || (x.clone(), y.clone()) == atoms(a.negate(), b.negate())
                                || (&x, &y) == (l, r)
                        }
                        _ => false,
                    };
                    if !fits {
                        return shape(format!("premises `{x}`, `{y}` do not explain `{f}`"));
                    }
                    f.clone()
                }
                None if x.qubit_atom().is_some() && y.qubit_atom().is_some() => {
                    Formula::bin(BinOp::Ent, x.clone(), y.clone())
                }
                None => Formula::bin(BinOp::Ent, q(atom_of(x)?), q(atom_of(y)?)),
            };
            plain(seq(cat(&[c0, c1, &[f]]), cat(&[&p[0].consequent, &p[1].consequent]), common_label(p)?))
        }
        RuleId::SectForm => {
            arity(rule, p, &[2])?;
            let (ab, c0) = left_split(rs, &p[0], 2)?;
            let (neg, c1) = left_split(rs, &p[1], 2)?;
            same("consequents", &p[0].consequent, &p[1].consequent)?;
            same("left contexts", c0, c1)?;
            let (a, b) = (atom_of(&ab[0])?, atom_of(&ab[1])?);
            if neg != [Formula::Atom(a.negate()), Formula::Atom(b.negate())] {
                return shape("second premise must use the negated atoms");
            }
            let f = Formula::bin(BinOp::EntDual, q(a), q(b));
            plain(seq(cat(&[c0, &[f]]), p[0].consequent.clone(), common_label(p)?))
        }
        RuleId::SectRefl => {
            arity(rule, p, &[4])?;
            let (a, d0) = right_split(rs, &p[0], 1)?;
            let (b, d1) = right_split(rs, &p[1], 1)?;
            let (na, d2) = right_split(rs, &p[2], 1)?;
            let (nb, d3) = right_split(rs, &p[3], 1)?;
            same("antecedents of the first and third premise", &p[0].antecedent, &p[2].antecedent)?;
            same("antecedents of the second and fourth premise", &p[1].antecedent, &p[3].antecedent)?;
            same("right contexts of the first and third premise", d0, d2)?;
            same("right contexts of the second and fourth premise", d1, d3)?;
            let (a, b) = (atom_of(&a[0])?, atom_of(&b[0])?);
            if na[0] != Formula::Atom(a.negate()) || nb[0] != Formula::Atom(b.negate()) {
                return shape("third and fourth premises must use the negated atoms");
            }
            let f = Formula::bin(BinOp::EntDual, q(a), q(b));
            plain(seq(cat(&[&p[0].antecedent, &p[1].antecedent]), cat(&[&[f], d0, d1]), common_label(p)?))
        }

        RuleId::NegForm | RuleId::NegRefl if p.len() == 1 && p[0].label.grade().is_some() => {
            graded_neg(rule, &p[0], params)
        }
        RuleId::NegForm => {
            arity(rule, p, &[1])?;
            let (x, ctx) = left_split(rs, &p[0], 1)?;
            no_right_ctx(rs, &p[0])?;
            let f = Formula::not(x[0].clone());
            plain(seq(ctx.to_vec(), cat(&[&[f], &p[0].consequent]), p[0].label.clone()))
        }
        RuleId::NegRefl => {
            arity(rule, p, &[1])?;
            let (x, ctx) = right_split(rs, &p[0], 1)?;
            no_left_ctx(rs, &p[0])?;
            let f = Formula::not(x[0].clone());
            plain(seq(cat(&[&p[0].antecedent, &[f]]), ctx.to_vec(), p[0].label.clone()))
        }

        RuleId::GandForm | RuleId::GorForm => {
            arity(rule, p, &[2])?;
            let f = need_principal(rule, params)?;
            let want = if rule == RuleId::GandForm { GradedOp::And } else { GradedOp::Or };
            let (l, r) =
                graded_parts(&f, want).ok_or_else(|| RuleError::Shape(format!("`{f}` has the wrong connective")))?;
            let (x, y, ctx) = if rule == RuleId::GandForm {
                let (x, d0) = right_split(rs, &p[0], 1)?;
                let (y, d1) = right_split(rs, &p[1], 1)?;
                same("antecedents", &p[0].antecedent, &p[1].antecedent)?;
                same("right contexts", d0, d1)?;
                (&x[0], &y[0], d0)
            } else {
                let (x, c0) = left_split(rs, &p[0], 1)?;
                let (y, c1) = left_split(rs, &p[1], 1)?;
                same("consequents", &p[0].consequent, &p[1].consequent)?;
                same("left contexts", c0, c1)?;
                (&x[0], &y[0], c0)
            };
            if x != l || y != r {
                return shape(format!("premises assert `{x}`, `{y}`, not the operands of `{f}`"));
            }
            let (v0, v1) = (eval_of(&p[0])?, eval_of(&p[1])?);
            let v = v0 + v1;
            if (v - 1.0).abs() > tolerance() {
                return Err(RuleError::SideCondition(format!("MD requires v0+v1 = 1, got {v0}+{v1} = {v}")));
            }
            let label = Label::Eval(v);
            let s = if rule == RuleId::GandForm {
                seq(p[0].antecedent.clone(), cat(&[&[f], ctx]), label)
            } else {
                seq(cat(&[ctx, &[f]]), p[0].consequent.clone(), label)
            };
            Ok((s, vec![format!("MD: v0+v1 = {v0}+{v1} = 1")]))
        }
        RuleId::GandRefl => {
            arity(rule, p, &[1])?;
            let f = need_principal(rule, params)?;
            let (l, r) =
                graded_parts(&f, GradedOp::And).ok_or_else(|| RuleError::Shape(format!("`{f}` is not a graded &")))?;
            let (x, ctx) = left_split(rs, &p[0], 1)?;
            if x[0] != *l && x[0] != *r {
                return shape(format!("`{}` is not an operand of `{f}`", x[0]));
            }
            plain(seq(cat(&[ctx, std::slice::from_ref(&f)]), p[0].consequent.clone(), p[0].label.clone()))
        }
        RuleId::GorRefl => {
            arity(rule, p, &[1])?;
            let f = need_principal(rule, params)?;
            let (l, r) =
                graded_parts(&f, GradedOp::Or).ok_or_else(|| RuleError::Shape(format!("`{f}` is not a graded v")))?;
            let (x, ctx) = right_split(rs, &p[0], 1)?;
            if x[0] != *l && x[0] != *r {
                return shape(format!("`{}` is not an operand of `{f}`", x[0]));
            }
            plain(seq(p[0].antecedent.clone(), cat(&[std::slice::from_ref(&f), ctx]), p[0].label.clone()))
        }

        RuleId::Cut | RuleId::QCut => {
            arity(rule, p, &[2])?;
            let (i, j) = params.cut_at.unwrap_or((0, 0));
            let (a, b) = (&p[0], &p[1]);
            let (Some(x), Some(y)) = (a.consequent.get(i), b.antecedent.get(j)) else {
                return shape(format!("cut position ({i}, {j}) out of range"));
            };
            if x != y {
                return shape(format!("cut formulas differ: `{x}` and `{y}`"));
            }
            let (da, db) = (&a.consequent[..i], &a.consequent[i + 1..]);
            let (gc, gd) = (&b.antecedent[..j], &b.antecedent[j + 1..]);
            if !(da.is_empty() && db.is_empty()) && !rs.contexts.right {
                return shape("cut with a right context needs right contexts");
            }
            if !(gc.is_empty() && gd.is_empty()) && !rs.contexts.left {
                return shape("cut with a left context needs left contexts");
            }
            let mut notes = Vec::new();
            let label = if rule == RuleId::QCut {
                let (v, w) = (eval_of(a)?, eval_of(b)?);
                if (v - w).abs() > tolerance() {
                    return Err(RuleError::SideCondition(format!(
                        "quantum cut needs equal evaluations, got {v} and {w}"
                    )));
                }
                notes.push(format!("equal evaluations {v}"));
                a.label.clone()
            } else {
                common_label(p)?
            };
            let s = seq(cat(&[gc, &a.antecedent, gd]), cat(&[da, &b.consequent, db]), label);
            Ok((s, notes))
        }
        RuleId::Epr => {
            arity(rule, p, &[2])?;
            let (a, b) = (&p[0], &p[1]);
            let [ent] = a.consequent.as_slice() else {
                return shape(format!("EPR needs a single @ on the right of `{a}`"));
            };
            let (l, r) =
                binary_parts(ent, BinOp::Ent).ok_or_else(|| RuleError::Shape(format!("`{ent}` is not an @")))?;
            if b.antecedent.as_slice() != [l.clone()] {
                return shape(format!("EPR needs `{l} |- ...` with no context, got `{b}`"));
            }
            let [y] = b.consequent.as_slice() else {
                return shape(format!("EPR needs a single formula on the right of `{b}`"));
            };
            check_ent_operands(BinOp::Ent, y, r).map_err(|e| RuleError::Shape(e.to_string()))?;
            let f = Formula::bin(BinOp::Ent, y.clone(), (*r).clone());
            plain(seq(a.antecedent.clone(), vec![f], common_label(p)?))
        }

        RuleId::ExchL | RuleId::ExchR => {
            arity(rule, p, &[1])?;
            let mut s = p[0].clone();
            let side = if rule == RuleId::ExchL { &mut s.antecedent } else { &mut s.consequent };
            let i = params.index.unwrap_or(0);
            if i + 1 >= side.len() {
                return shape(format!("no adjacent pair at position {i}"));
            }
            side.swap(i, i + 1);
            plain(s)
        }
        RuleId::WeakL | RuleId::WeakR => {
            arity(rule, p, &[1])?;
            let f = need_principal(rule, params)?;
            let mut s = p[0].clone();
            let side = if rule == RuleId::WeakL { &mut s.antecedent } else { &mut s.consequent };
            let i = params.index.unwrap_or(side.len());
            if i > side.len() {
                return shape(format!("weakening position {i} out of range"));
            }
            side.insert(i, f);
            plain(s)
        }
        RuleId::ContrL | RuleId::ContrR => {
            arity(rule, p, &[1])?;
            let mut s = p[0].clone();
            let side = if rule == RuleId::ContrL { &mut s.antecedent } else { &mut s.consequent };
            let i = params.index.unwrap_or(0);
            if i + 1 >= side.len() || side[i] != side[i + 1] {
                return shape(format!("no adjacent duplicate at position {i}"));
            }
            side.remove(i + 1);
            plain(s)
        }
    }
}

/// `p_i |-{z_i*}` gives `|-{z_j} not p_i`; `|-{z_i} p_i` gives `not p_i |-{z_j*}`.
fn graded_neg(rule: RuleId, p: &GradedSequent, params: &RuleParams) -> Result<Traced, RuleError> {
    let g = single_grade(&p.label).ok_or_else(|| RuleError::Shape("graded negation needs a single grade".into()))?;
    let want_conj = rule == RuleId::NegForm;
    if g.conjugated != want_conj {
        return shape(format!("premise grade `{}` has the wrong conjugation", g.symbol));
    }
    let x = match (rule, p.antecedent.as_slice(), p.consequent.as_slice()) {
        (RuleId::NegForm, [x], []) | (RuleId::NegRefl, [], [x]) => x,
        _ => return shape(format!("`{p}` is not an atomic one-sided sequent of the right side")),
    };
    atom_of(x)?;
    let out = params
        .label
        .as_ref()
        .and_then(single_grade)
        .ok_or_else(|| RuleError::Shape("graded negation needs its conclusion grade".into()))?;
    if out.conjugated == want_conj || out.symbol == g.symbol {
        return shape(format!("conclusion grade must be the partner of `{}` with opposite conjugation", g.symbol));
    }
    let label = Label::Grade(GradeExpr::single(out.clone()));
    let f = Formula::not(x.clone());
    let s = if rule == RuleId::NegForm { seq(vec![], vec![f], label) } else { seq(vec![f], vec![], label) };
    Ok((s, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::super::make_ruleset;
    use super::*;
    use crate::syntax::{parse_formula, parse_sequent, DeclarationSet};

    fn decls() -> DeclarationSet {
        DeclarationSet::new().with_atoms(&["p0", "p1", "A", "B", "C", "D"]).with_grades(&["z0", "z1"])
    }

    fn s(t: &str) -> GradedSequent {
        parse_sequent(t, &decls()).unwrap()
    }

    fn f(t: &str) -> Formula {
        parse_formula(t, &decls()).unwrap()
    }

    fn go(rs: &str, rule: RuleId, ps: &[&str], params: RuleParams) -> Result<GradedSequent, RuleError> {
        let prem: Vec<GradedSequent> = ps.iter().map(|t| s(t)).collect();
        apply_rule(&make_ruleset(rs).unwrap(), rule, &prem, &params)
    }

    fn ok(rs: &str, rule: RuleId, ps: &[&str], params: RuleParams, want: &str) {
        let got = go(rs, rule, ps, params).unwrap_or_else(|e| panic!("{rule}: {e}"));
        assert!(got.approx_eq(&s(want), 1e-12), "{rule}: got `{got}`, want `{want}`");
    }

    fn is_shape(r: Result<GradedSequent, RuleError>) -> bool {
        matches!(r, Err(RuleError::Shape(_)))
    }

    #[test]
    fn gand_form_sums_evaluations() {
        let g = f("p0 &[z0,z1] p1");
        ok(
            "Lq",
            RuleId::GandForm,
            &["C |-[0.3] p0", "C |-[0.7] p1"],
            RuleParams::principal(g.clone()),
            "C |-[1] p0 &[z0,z1] p1",
        );
        let r = go("Lq", RuleId::GandForm, &["C |-[0.3] p0", "C |-[0.6] p1"], RuleParams::principal(g));
        assert!(matches!(r, Err(RuleError::SideCondition(_))));
    }

    #[test]
    fn gor_form_and_reflections() {
        let g = f("p0 v[z0*,z1*] p1");
        ok(
            "Lq",
            RuleId::GorForm,
            &["p0 |-[0.25] C", "p1 |-[0.75] C"],
            RuleParams::principal(g.clone()),
            "p0 v[z0*,z1*] p1 |-[1] C",
        );
        ok("Lq", RuleId::GorRefl, &["C |-[0.25] p1"], RuleParams::principal(g.clone()), "C |-[0.25] p0 v[z0*,z1*] p1");
        assert!(is_shape(go("Lq", RuleId::GorRefl, &["C |-[0.25] A"], RuleParams::principal(g))));
        let a = f("p0 &[z0,z1] p1");
        ok("Lq", RuleId::GandRefl, &["p0 |-[0.5] p0"], RuleParams::principal(a), "p0 &[z0,z1] p1 |-[0.5] p0");
    }

    #[test]
    fn graded_negation() {
        let out = RuleParams::default().with_label(s("|-{z1} p0").label);
        ok("Lq", RuleId::NegForm, &["p0 |-{z0*}"], out.clone(), "|-{z1} not p0");
        assert!(is_shape(go("Lq", RuleId::NegForm, &["p0 |-{z0}"], out)));
        let out = RuleParams::default().with_label(s("p0 |-{z1*}").label);
        ok("Lq", RuleId::NegRefl, &["|-{z0} p0"], out, "not p0 |-{z1*}");
    }

    #[test]
    fn quantum_cut_keeps_the_shared_evaluation() {
        ok("Lq", RuleId::QCut, &["C |-[0.4] p0", "p0 |-[0.4] D"], RuleParams::default(), "C |-[0.4] D");
        let r = go("Lq", RuleId::QCut, &["C |-[0.4] p0", "p0 |-[0.5] D"], RuleParams::default());
        assert!(matches!(r, Err(RuleError::SideCondition(_))));
        assert!(matches!(
            go("L2q", RuleId::QCut, &["C |-[0.4] p0", "p0 |-[0.4] D"], RuleParams::default()),
            Err(RuleError::Absent { .. })
        ));
    }

    #[test]
    fn basic_connectives() {
        ok("B", RuleId::AndForm, &["C |- A", "C |- B"], RuleParams::default(), "C |- A & B");
        ok("B", RuleId::AndRefl, &["A |- C", "B |- C"], RuleParams::default(), "A & B |- C");
        ok("B", RuleId::AndRefl, &["A |- C"], RuleParams::principal(f("A & B")), "A & B |- C");
        ok("B", RuleId::OrForm, &["A |- C", "B |- C"], RuleParams::default(), "A v B |- C");
        ok("B", RuleId::OrRefl, &["C |- B"], RuleParams::principal(f("A v B")), "C |- A v B");
        ok("B", RuleId::TimesForm, &["A, B |- C"], RuleParams::default(), "A * B |- C");
        ok("B", RuleId::TimesRefl, &["C |- A", "D |- B"], RuleParams::default(), "C, D |- A * B");
        ok("B", RuleId::ParForm, &["C |- A, B"], RuleParams::default(), "C |- A par B");
        ok("B", RuleId::ParRefl, &["A |- C", "B |- D"], RuleParams::default(), "A par B |- C, D");
        ok("B", RuleId::NegForm, &["A |-"], RuleParams::default(), "|- not A");
        ok("B", RuleId::NegRefl, &["|- A"], RuleParams::default(), "not A |-");
        ok("B", RuleId::IdAxiom, &[], RuleParams::principal(f("A")), "A |- A");
    }

    #[test]
    fn visibility_rejects_contexts() {
        assert!(is_shape(go("B", RuleId::AndForm, &["C |- A, D", "C |- B, D"], RuleParams::default())));
        ok("BR", RuleId::AndForm, &["C |- A, D", "C |- B, D"], RuleParams::default(), "C |- A & B, D");
        assert!(is_shape(go("B", RuleId::OrForm, &["D, A |- C", "D, B |- C"], RuleParams::default())));
        ok("BL", RuleId::OrForm, &["D, A |- C", "D, B |- C"], RuleParams::default(), "D, A v B |- C");
        assert!(is_shape(go("B", RuleId::NegForm, &["A |- C"], RuleParams::default())));
    }

    #[test]
    fn entanglement_rules() {
        ok("L2q", RuleId::AtForm, &["C |- A, B", "C |- A^, B^"], RuleParams::default(), "C |- Q_A @ Q_B");
        assert!(is_shape(go("L2q", RuleId::AtForm, &["C |- A, B", "C |- A^, B"], RuleParams::default())));
        ok("L2q", RuleId::AtForm, &["Q_A |- Q_A, Q_A"], RuleParams::default(), "Q_A |- Q_A @ Q_A");
        ok("L2q", RuleId::AtRefl, &["A |- C", "B |- D"], RuleParams::default(), "Q_A @ Q_B |- C, D");
        ok("L2q", RuleId::AtRefl, &["A^ |- C", "B^ |- D"], RuleParams::principal(f("Q_A @ Q_B")), "Q_A @ Q_B |- C, D");
        ok(
            "L2q",
            RuleId::AtRefl,
            &["A |- C", "B |- D", "A^ |- C", "B^ |- D"],
            RuleParams::default(),
            "Q_A @ Q_B |- C, D",
        );
        ok("L2q", RuleId::AtRefl, &["Q_A |- Q_A", "Q_A |- Q_A"], RuleParams::default(), "Q_A @ Q_A |- Q_A, Q_A");
        ok("L2q", RuleId::AtAxiom, &[], RuleParams::principal(f("Q_A @ Q_B")).with_index(1), "Q_A @ Q_B |- A^, B^");
        ok("L2q", RuleId::SectForm, &["A, B |- C", "A^, B^ |- C"], RuleParams::default(), "Q_A sect Q_B |- C");
        ok(
            "L2q",
            RuleId::SectRefl,
            &["C |- A", "D |- B", "C |- A^", "D |- B^"],
            RuleParams::default(),
            "C, D |- Q_A sect Q_B",
        );
    }

    #[test]
    fn epr_and_cut() {
        ok("L2q", RuleId::Epr, &["C |- Q_A @ Q_B", "Q_A |- A"], RuleParams::default(), "C |- A @ Q_B");
        assert!(is_shape(go("L2q", RuleId::Epr, &["C |- Q_A @ Q_B", "Q_A @ Q_B, Q_A |- A, B"], RuleParams::default())));
        ok("L2q", RuleId::Cut, &["C |- Q_A @ Q_B", "Q_A @ Q_B |- A, B"], RuleParams::default(), "C |- A, B");
        let at = RuleParams { cut_at: Some((1, 0)), ..Default::default() };
        assert!(is_shape(go("L2q", RuleId::Cut, &["C |- A, Q_A, B", "Q_A |- A"], at.clone())));
        ok("L2q+right", RuleId::Cut, &["C |- A, Q_A, B", "Q_A |- A"], at, "C |- A, A, B");
    }

    #[test]
    fn structural_rules_need_their_flags() {
        let r = go("L2q", RuleId::WeakL, &["A |- A"], RuleParams::principal(f("B")));
        assert!(matches!(r, Err(RuleError::Absent { .. })));
        assert_eq!(r.unwrap_err().to_string(), "rule weak-l not in ruleset L2q");
        ok("L2q+weakening", RuleId::WeakL, &["A |- A"], RuleParams::principal(f("B")).with_index(0), "B, A |- A");
        ok("B", RuleId::ExchR, &["C |- A, B"], RuleParams::index(0), "C |- B, A");
        ok("L2q+contraction", RuleId::ContrR, &["C |- A, A"], RuleParams::index(0), "C |- A");
        assert!(is_shape(go("L2q+contraction", RuleId::ContrR, &["C |- A, B"], RuleParams::index(0))));
    }
}
