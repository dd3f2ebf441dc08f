use crate::syntax::{DeclarationSet, Formula, GradeExpr, GradeRef, GradedOp, GradedSequent, Label};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DualityError {
    #[error("*-duality needs a grade-labelled one-sided sequent")]
    NotGradedOneSided,
    #[error("⊥-duality is undefined on graded formulas and grade labels")]
    Graded,
    #[error("⊥′-duality is undefined on `{0}`")]
    OutsideDomain(String),
    #[error("no partner declared for `{0}`")]
    NoPartner(String),
}

/// `|-{f} A` becomes `A |-{f*}` and back.
pub fn star_dual(s: &GradedSequent) -> Result<GradedSequent, DualityError> {
    let Label::Grade(g) = &s.label else {
        return Err(DualityError::NotGradedOneSided);
    };
    if !s.is_one_sided() {
        return Err(DualityError::NotGradedOneSided);
    }
    Ok(GradedSequent {
        antecedent: s.consequent.clone(),
        consequent: s.antecedent.clone(),
        label: Label::Grade(g.conjugated()),
    })
}

/// Symmetric connective with primitively negated atoms; operands of `@`
/// and `sect` are kept.
pub fn perp_dual(f: &Formula) -> Result<Formula, DualityError> {
    Ok(match f {
        Formula::Atom(a) => Formula::Atom(a.negate()),
        Formula::Graded { .. } => return Err(DualityError::Graded),
        Formula::Binary { op, left, right } => {
            let op = op.symmetric();
            if matches!(op, crate::syntax::BinOp::Ent | crate::syntax::BinOp::EntDual) {
                Formula::bin(op, (**left).clone(), (**right).clone())
            } else {
                Formula::bin(op, perp_dual(left)?, perp_dual(right)?)
            }
        }
        Formula::Not(inner) => Formula::not(perp_dual(inner)?),
    })
}

/// Swaps the sides of a sequent and dualises every formula.
pub fn perp_dual_sequent(s: &GradedSequent) -> Result<GradedSequent, DualityError> {
    if matches!(s.label, Label::Grade(_)) {
        return Err(DualityError::Graded);
    }
    let side = |fs: &[Formula]| fs.iter().map(perp_dual).collect::<Result<Vec<_>, _>>();
    Ok(GradedSequent { antecedent: side(&s.consequent)?, consequent: side(&s.antecedent)?, label: s.label.clone() })
}

/// Exchanges the graded connectives, conjugating both grades.
pub fn perp_prime_dual(f: &Formula) -> Result<Formula, DualityError> {
    match f {
        Formula::Graded { op, left, right, g0, g1 } if left.as_atom().is_some() && right.as_atom().is_some() => {
            let op = match op {
                GradedOp::And => GradedOp::Or,
                GradedOp::Or => GradedOp::And,
            };
            Ok(Formula::graded(op, (**left).clone(), (**right).clone(), g0.toggled(), g1.toggled()))
        }
        other => Err(DualityError::OutsideDomain(other.to_string())),
    }
}

/// On atomic graded sequents the atom and grade are replaced by their
/// partners and the sides swapped; on an unlabelled one-sided sequent with
/// a single graded formula the formula is dualised and the sides swapped.
pub fn perp_prime_dual_sequent(s: &GradedSequent, decls: &DeclarationSet) -> Result<GradedSequent, DualityError> {
    let outside = || DualityError::OutsideDomain(s.to_string());
    let (formula, on_right) = match (s.antecedent.as_slice(), s.consequent.as_slice()) {
        ([], [f]) => (f, true),
        ([f], []) => (f, false),
        _ => return Err(outside()),
    };
    match &s.label {
        Label::Grade(g) => {
            let g = g.as_single().ok_or_else(outside)?;
            let a = formula.as_atom().ok_or_else(outside)?;
            let partner = decls.atom_partner(&a.name).ok_or_else(|| DualityError::NoPartner(a.name.clone()))?;
            let grade = decls.grade_partner(&g.symbol).ok_or_else(|| DualityError::NoPartner(g.symbol.clone()))?;
            let atom = Formula::Atom(crate::syntax::Atom { name: partner.to_string(), negated: a.negated });
            let label =
                Label::Grade(GradeExpr::single(GradeRef { symbol: grade.to_string(), conjugated: !g.conjugated }));
            Ok(swap(atom, on_right, label))
        }
        Label::Unlabelled => Ok(swap(perp_prime_dual(formula)?, on_right, Label::Unlabelled)),
        Label::Eval(_) => Err(outside()),
    }
}

fn swap(f: Formula, was_right: bool, label: Label) -> GradedSequent {
    if was_right {
        GradedSequent { antecedent: vec![f], consequent: vec![], label }
    } else {
        GradedSequent { antecedent: vec![], consequent: vec![f], label }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_sequent, render_sequent};

    fn decls() -> DeclarationSet {
        DeclarationSet::new().with_atoms(&["p0", "p1", "A", "B"]).with_grades(&["z0", "z1"])
    }

    fn s(t: &str) -> GradedSequent {
        parse_sequent(t, &decls()).unwrap()
    }

    #[test]
    fn star_conjugates_and_swaps() {
        assert_eq!(render_sequent(&star_dual(&s("|-{z0} p0")).unwrap()), "p0 |-{z0*}");
        assert_eq!(render_sequent(&star_dual(&s("p0 |-{z0*}")).unwrap()), "|-{z0} p0");
        assert_eq!(star_dual(&s("p0 |- p0")), Err(DualityError::NotGradedOneSided));
    }

    #[test]
    fn perp_on_basic_formulas() {
        assert_eq!(render_sequent(&perp_dual_sequent(&s("A & B |-")).unwrap()), "|- A^ v B^");
        assert_eq!(render_sequent(&perp_dual_sequent(&s("A * B |- A par B")).unwrap()), "A^ * B^ |- A^ par B^");
        assert_eq!(render_sequent(&perp_dual_sequent(&s("|- Q_A @ Q_B")).unwrap()), "Q_A sect Q_B |-");
        assert_eq!(perp_dual_sequent(&s("|- p0 &[z0,z1] p1")), Err(DualityError::Graded));
    }

    #[test]
    fn perp_prime_on_graded_sequents() {
        let d = decls();
        let out = perp_prime_dual_sequent(&s("|- p0 &[z0,z1] p1"), &d).unwrap();
        assert_eq!(render_sequent(&out), "p0 v[z0*,z1*] p1 |-");
        let out = perp_prime_dual_sequent(&s("|-{z1} p1"), &d).unwrap();
        assert_eq!(out, star_dual(&s("|-{z0} p0")).unwrap());
        assert!(perp_prime_dual_sequent(&s("A, B |- A"), &d).is_err());
    }
}
