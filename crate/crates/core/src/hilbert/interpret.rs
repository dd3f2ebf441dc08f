use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{bell, BellKind, HilbertError, Operator, OperatorKind, StateVector};
use crate::evaluation::{md_check, EvalError, GradeEnv, MdMode};
use crate::syntax::{Atom, BinOp, Formula, GradedOp};

fn atom_index(env: &GradeEnv, a: &Atom, f: &Formula) -> Result<usize, HilbertError> {
    match env.index_of_atom(&a.name) {
        Some(i) if i < 2 && !a.negated => Ok(i),
        _ => Err(HilbertError::Uninterpreted(f.to_string())),
    }
}

fn projector_index(i: usize) -> Result<Operator, HilbertError> {
    Operator::projector(2, i)
}

/// `p_i ↦ λ_i P_i`; `p0 &[z0,z1] p1 ↦ λ0 P0 + λ1 P1`.
pub fn interpret_operator(f: &Formula, env: &GradeEnv) -> Result<Operator, HilbertError> {
    match f {
        Formula::Atom(a) => {
            let i = atom_index(env, a, f)?;
            Operator::weak(env.lambda(i)?, &projector_index(i)?)
        }
        Formula::Graded { op: GradedOp::And, left, right, g0, g1 } => {
            let (Some(a), Some(b)) = (left.as_atom(), right.as_atom()) else {
                return Err(HilbertError::Uninterpreted(f.to_string()));
            };
            let (i, j) = (atom_index(env, a, f)?, atom_index(env, b, f)?);
            if i == j {
                return Err(HilbertError::Uninterpreted(f.to_string()));
            }
            let m: DMatrix<Complex64> =
                projector_index(i)?.matrix() * env.eval_ref(g0)? + projector_index(j)?.matrix() * env.eval_ref(g1)?;
            Operator::new(m, OperatorKind::General)
        }
        _ => Err(HilbertError::Uninterpreted(f.to_string())),
    }
}

/// The graded conjunction becomes `λ0|0⟩ + λ1|1⟩`; entangled pairs become
/// Bell states, `Φ+` when both qubits have the same polarity and `Ψ+`
/// otherwise.
pub fn interpret_state(f: &Formula, env: &GradeEnv) -> Result<StateVector, HilbertError> {
    let no = || HilbertError::Uninterpreted(f.to_string());
    match f {
        Formula::Graded { op: GradedOp::And, left, right, g0, g1 } => {
            let (Some(a), Some(b)) = (left.as_atom(), right.as_atom()) else { return Err(no()) };
            let (i, j) = (atom_index(env, a, f)?, atom_index(env, b, f)?);
            if i == j {
                return Err(no());
            }
            let mut v = vec![Complex64::new(0.0, 0.0); 2];
            v[i] = env.eval_ref(g0)?;
            v[j] = env.eval_ref(g1)?;
            let r = md_check(&env.clone().with_md(MdMode::Norm))?;
            if !r.norm_pass {
                return Err(EvalError::MdViolation {
                    mode: MdMode::Norm,
                    norm: r.norm_residual,
                    cross: r.cross_residual,
                }
                .into());
            }
            StateVector::new(v)
        }
        Formula::Binary { op: BinOp::Ent, left, right } => {
            let (Some(a), Some(b)) = (left.qubit_atom(), right.qubit_atom()) else { return Err(no()) };
            Ok(bell_for(a, b))
        }
        Formula::Binary { op: BinOp::And, left, right } => {
            let (Some((x1, y1)), Some((x2, y2))) = (par_atoms(left), par_atoms(right)) else { return Err(no()) };
            if *x2 != x1.negate() || *y2 != y1.negate() || x1.name == y1.name {
                return Err(no());
            }
            Ok(bell_for(x1, y1))
        }
        _ => Err(no()),
    }
}

fn bell_for(a: &Atom, b: &Atom) -> StateVector {
    if a.negated == b.negated {
        bell(BellKind::Phi, true)
    } else {
        bell(BellKind::Psi, true)
    }
}

fn par_atoms(f: &Formula) -> Option<(&Atom, &Atom)> {
    match f {
        Formula::Binary { op: BinOp::Par, left, right } => Some((left.as_atom()?, right.as_atom()?)),
        _ => None,
    }
}

/// `⟨ψ_i|O_i† O_i|ψ_i⟩` with `O_i = λ_i P_i`, computed from the matrices.
pub fn weak_expectation(i: usize, env: &GradeEnv) -> Result<f64, HilbertError> {
    let o = Operator::weak(env.lambda(i)?, &projector_index(i)?)?;
    let psi = StateVector::basis(2, i)?;
    let v = o.apply(&psi)?;
    Ok(v.dotc(&v).re)
}

/// Probability of the quantum cut on `p_i`: the expectation of
/// `|λ_i|² P_i` on `|ψ_i⟩`. Requires the normalisation half of MD.
pub fn cut_probability(i: usize, env: &GradeEnv) -> Result<f64, HilbertError> {
    let r = md_check(&env.clone().with_md(MdMode::Norm))?;
    if !r.norm_pass {
        return Err(
            EvalError::MdViolation { mode: MdMode::Norm, norm: r.norm_residual, cross: r.cross_residual }.into()
        );
    }
    let w = env.lambda(i)?.norm_sqr();
    let pi = projector_index(i)?.matrix() * Complex64::new(w, 0.0);
    let psi = StateVector::basis(2, i)?;
    Ok(psi.vector().dotc(&(pi * psi.vector())).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::measure;
    use crate::syntax::{parse_formula, DeclarationSet};

    const T: f64 = 1e-12;
    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn f(t: &str) -> Formula {
        parse_formula(t, &DeclarationSet::new().with_atoms(&["p0", "p1", "A", "B"]).with_grades(&["z0", "z1"])).unwrap()
    }

    #[test]
    fn atoms_become_weak_operators() {
        let env = GradeEnv::qubit(c(H, 0.0), c(H, 0.0), MdMode::Norm);
        let o = interpret_operator(&f("p0"), &env).unwrap();
        assert_eq!(o.kind(), OperatorKind::Weak);
        assert!((o.matrix()[(0, 0)] - c(H, 0.0)).norm() < T);
        let env1 = GradeEnv::qubit(c(1.0, 0.0), c(0.0, 0.0), MdMode::Norm);
        assert_eq!(interpret_operator(&f("p0"), &env1).unwrap(), Operator::projector(2, 0).unwrap());
        let unity = interpret_operator(&f("p0 &[z0,z1] p1"), &env).unwrap();
        let sum = Operator::new(
            interpret_operator(&f("p0"), &env).unwrap().matrix() + interpret_operator(&f("p1"), &env).unwrap().matrix(),
            OperatorKind::General,
        )
        .unwrap();
        assert!(unity.approx_eq(&sum, T));
        assert!(interpret_operator(&f("A"), &env).is_err());
    }

    #[test]
    fn states() {
        let env = GradeEnv::qubit(c(H, 0.0), c(H, 0.0), MdMode::Norm);
        assert!(interpret_state(&f("p0 &[z0,z1] p1"), &env).unwrap().approx_eq(&StateVector::cat(), T));
        let basis = GradeEnv::qubit(c(1.0, 0.0), c(0.0, 0.0), MdMode::Norm);
        assert!(interpret_state(&f("p0 &[z0,z1] p1"), &basis)
            .unwrap()
            .approx_eq(&StateVector::basis(2, 0).unwrap(), T));
        let bad = GradeEnv::qubit(c(0.5, 0.0), c(0.5, 0.0), MdMode::Norm);
        assert!(interpret_state(&f("p0 &[z0,z1] p1"), &bad).is_err());
        assert_eq!(interpret_state(&f("Q_A @ Q_B"), &env).unwrap(), bell(BellKind::Phi, true));
        assert_eq!(interpret_state(&f("(A par B) & (A^ par B^)"), &env).unwrap(), bell(BellKind::Phi, true));
        assert_eq!(interpret_state(&f("(A par B^) & (A^ par B)"), &env).unwrap(), bell(BellKind::Psi, true));
        assert_eq!(interpret_state(&f("Q_A @ (B^ & B)"), &env).unwrap(), bell(BellKind::Psi, true));
        assert!(interpret_state(&f("Q_A sect Q_B"), &env).is_err());
    }

    #[test]
    fn weak_expectations() {
        let env = GradeEnv::qubit(c(H, 0.0), c(0.0, H), MdMode::Norm);
        assert!((weak_expectation(0, &env).unwrap() - 0.5).abs() < T);
        let env1 = GradeEnv::qubit(c(1.0, 0.0), c(0.0, 0.0), MdMode::Norm);
        assert!((weak_expectation(0, &env1).unwrap() - 1.0).abs() < T);
        let o0 = interpret_operator(&f("p0"), &env).unwrap();
        assert!(o0.apply(&StateVector::basis(2, 1).unwrap()).unwrap().norm() < T);
    }

    #[test]
    fn cut_probabilities_match_measurement() {
        for (z0, z1, i, want) in [(H, H, 0, 0.5), (1.0, 0.0, 1, 0.0), (0.6, 0.8, 1, 0.64)] {
            let env = GradeEnv::qubit(c(z0, 0.0), c(z1, 0.0), MdMode::Norm);
            let p = cut_probability(i, &env).unwrap();
            assert!((p - want).abs() < T);
            let s = interpret_state(&f("p0 &[z0,z1] p1"), &env).unwrap();
            let m = measure(&s, i).map(|(p, _)| p).unwrap_or(0.0);
            assert!((p - m).abs() < 1e-9);
        }
    }
}
