//! Grade environments, the Meta Data constraint, gluing and sequent
//! evaluation, plus the H-combination and three reference T-norms.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::syntax::{DeclarationSet, Formula, GradeExpr, GradeRef, GradedOp, GradedSequent, Sign};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Numeric tolerance, overridable through `LQ_TOLERANCE`.
pub fn tolerance() -> f64 {
    static TOL: OnceLock<f64> = OnceLock::new();
    *TOL.get_or_init(|| {
        std::env::var("LQ_TOLERANCE")
            .ok()
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t > 0.0)
            .unwrap_or(DEFAULT_TOLERANCE)
    })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound grade symbol `{0}`")]
    Unbound(String),
    #[error("atom `{0}` has no associated grade")]
    NoGradeForAtom(String),
    #[error("sequent shape is not evaluated: {0}")]
    Shape(String),
    #[error("value {0} outside [0,1]")]
    OutOfRange(f64),
    #[error("negative input {0}")]
    Negative(f64),
    #[error("environment violates Meta Data ({mode:?}): norm residual {norm}, cross residual {cross}")]
    MdViolation { mode: MdMode, norm: f64, cross: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MdMode {
    #[default]
    Norm,
    Strict,
    None,
}

/// Binding of grade symbols to complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct GradeEnv {
    bindings: BTreeMap<String, Complex64>,
    order: Vec<String>,
    atoms: Vec<(String, String)>,
    pub md: MdMode,
}

impl GradeEnv {
    /// An environment over grades in the given order; the k-th atom is
    /// graded by the k-th grade.
    pub fn new(grades: &[(&str, Complex64)], atoms: &[&str], md: MdMode) -> Self {
        let order: Vec<String> = grades.iter().map(|(g, _)| g.to_string()).collect();
        GradeEnv {
            bindings: grades.iter().map(|(g, z)| (g.to_string(), *z)).collect(),
            atoms: atoms.iter().zip(&order).map(|(a, g)| (a.to_string(), g.clone())).collect(),
            order,
            md,
        }
    }

    /// The two-atom language `p0, p1` graded by `z0, z1`.
    pub fn qubit(z0: Complex64, z1: Complex64, md: MdMode) -> Self {
        GradeEnv::new(&[("z0", z0), ("z1", z1)], &["p0", "p1"], md)
    }

    pub fn from_declarations(d: &DeclarationSet) -> Result<Self, EvalError> {
        let bound: BTreeMap<String, Complex64> = d.bindings.iter().cloned().collect();
        for g in &d.grades {
            if !bound.contains_key(g) {
                return Err(EvalError::Unbound(g.clone()));
            }
        }
        Ok(GradeEnv {
            order: d.grades.clone(),
            atoms: d.atoms.iter().zip(&d.grades).map(|(a, g)| (a.clone(), g.clone())).collect(),
            bindings: bound,
            md: d.md.unwrap_or_default(),
        })
    }

    pub fn with_md(mut self, md: MdMode) -> Self {
        self.md = md;
        self
    }

    pub fn grades(&self) -> &[String] {
        &self.order
    }

    pub fn value(&self, symbol: &str) -> Result<Complex64, EvalError> {
        self.bindings.get(symbol).copied().ok_or_else(|| EvalError::Unbound(symbol.to_string()))
    }

    /// The amplitude of the i-th grade in declaration order.
    pub fn lambda(&self, i: usize) -> Result<Complex64, EvalError> {
        let sym = self.order.get(i).ok_or_else(|| EvalError::Unbound(format!("grade #{i}")))?;
        self.value(sym)
    }

    pub fn grade_of_atom(&self, atom: &str) -> Option<&str> {
        self.atoms.iter().find(|(a, _)| a == atom).map(|(_, g)| g.as_str())
    }

    /// Index of an atom's grade in declaration order.
    pub fn index_of_atom(&self, atom: &str) -> Option<usize> {
        self.atoms.iter().position(|(a, _)| a == atom)
    }

    pub fn eval_ref(&self, g: &GradeRef) -> Result<Complex64, EvalError> {
        let z = self.value(&g.symbol)?;
        Ok(if g.conjugated { z.conj() } else { z })
    }

    pub fn eval_expr(&self, e: &GradeExpr) -> Result<Complex64, EvalError> {
        e.terms.iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| {
            let z = self.eval_ref(&t.grade)?;
            Ok(match t.sign {
                Sign::Plus => acc + z,
                Sign::Minus => acc - z,
            })
        })
    }

    /// Every grade multiplied by the unit phase `e^{i phi}`.
    pub fn rephased(&self, phi: f64) -> Self {
        let w = Complex64::from_polar(1.0, phi);
        let mut out = self.clone();
        for z in out.bindings.values_mut() {
            *z *= w;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MdReport {
    pub mode: MdMode,
    /// `|Σ z_i* z_i − 1|`.
    pub norm_residual: f64,
    /// `|Σ_{i≠j} z_i* z_j|`.
    pub cross_residual: f64,
    pub norm_pass: bool,
    pub strict_pass: bool,
    pub pass: bool,
}

pub fn md_check(env: &GradeEnv) -> Result<MdReport, EvalError> {
    let zs: Vec<Complex64> = env.order.iter().map(|g| env.value(g)).collect::<Result<_, _>>()?;
    let norm: f64 = zs.iter().map(|z| z.norm_sqr()).sum();
    let mut cross = Complex64::new(0.0, 0.0);
    for (i, zi) in zs.iter().enumerate() {
        for (j, zj) in zs.iter().enumerate() {
            if i != j {
                cross += zi.conj() * zj;
            }
        }
    }
    let tol = tolerance();
    let norm_residual = (norm - 1.0).abs();
    let cross_residual = cross.norm();
    let norm_pass = norm_residual <= tol;
    let strict_pass = norm_pass && cross_residual <= tol;
    let pass = match env.md {
        MdMode::Norm => norm_pass,
        MdMode::Strict => strict_pass,
        MdMode::None => true,
    };
    Ok(MdReport { mode: env.md, norm_residual, cross_residual, norm_pass, strict_pass, pass })
}

/// The gluing `f ∘ g`, evaluated as the ordinary product of the two sums.
pub fn glue(f: &GradeExpr, g: &GradeExpr, env: &GradeEnv) -> Result<Complex64, EvalError> {
    Ok(env.eval_expr(f)? * env.eval_expr(g)?)
}

/// The grade expression asserting one side of an evaluated sequent.
pub fn side_expr(side: &[Formula], env: &GradeEnv) -> Result<GradeExpr, EvalError> {
    let atom_grade = |f: &Formula| -> Result<GradeRef, EvalError> {
        match f {
            Formula::Atom(a) if !a.negated => {
                env.grade_of_atom(&a.name).map(GradeRef::new).ok_or_else(|| EvalError::NoGradeForAtom(a.name.clone()))
            }
            other => Err(EvalError::Shape(format!("`{other}` is not an atomic proposition"))),
        }
    };
    match side {
        [f @ Formula::Atom(_)] => Ok(GradeExpr::single(atom_grade(f)?)),
        [Formula::Graded { op: GradedOp::And, left, right, g0, g1 }] => {
            atom_grade(left)?;
            atom_grade(right)?;
            Ok(GradeExpr::sum([g0.clone(), g1.clone()]))
        }
        list if list.len() > 1 && list.len() == env.atoms.len() => {
            let mut refs = Vec::new();
            for (f, (atom, _)) in list.iter().zip(&env.atoms) {
                match f {
                    Formula::Atom(a) if !a.negated && a.name == *atom => refs.push(atom_grade(f)?),
                    _ => return Err(EvalError::Shape("list is not the full atom list".into())),
                }
            }
            Ok(GradeExpr::sum(refs))
        }
        _ => Err(EvalError::Shape(format!("{} formulas on one side", side.len()))),
    }
}

/// Truth value `|f* ∘ g|` of a two-sided sequent whose sides are atomic,
/// a graded conjunction of atoms, or the full atom list.
pub fn evaluate(s: &GradedSequent, env: &GradeEnv) -> Result<f64, EvalError> {
    if s.antecedent.is_empty() || s.consequent.is_empty() {
        return Err(EvalError::Shape("one-sided sequents carry grades, not evaluations".into()));
    }
    let f = side_expr(&s.antecedent, env)?.conjugated();
    let g = side_expr(&s.consequent, env)?;
    let v = glue(&f, &g, env)?.norm();
    if env.md != MdMode::None {
        let md = md_check(env)?;
        if !md.pass {
            return Err(EvalError::MdViolation { mode: env.md, norm: md.norm_residual, cross: md.cross_residual });
        }
        if v > 1.0 + tolerance() {
            return Err(EvalError::OutOfRange(v));
        }
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TNorm {
    Lukasiewicz,
    Goedel,
    Product,
}

impl TNorm {
    pub const ALL: [TNorm; 3] = [TNorm::Lukasiewicz, TNorm::Goedel, TNorm::Product];
}

pub fn t_norm(kind: TNorm, x: f64, y: f64) -> Result<f64, EvalError> {
    for v in [x, y] {
        if !(0.0..=1.0).contains(&v) {
            return Err(EvalError::OutOfRange(v));
        }
    }
    Ok(match kind {
        TNorm::Lukasiewicz => (x + y - 1.0).max(0.0),
        TNorm::Goedel => x.min(y),
        TNorm::Product => x * y,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Qumix,
    Qubit,
    Outside,
}

/// `1 − max(1 − (v0 + v1), 0)`, with the regime read off `v0 + v1`.
pub fn h_combine(v0: f64, v1: f64) -> Result<(f64, Regime), EvalError> {
    for v in [v0, v1] {
        if v < 0.0 || v.is_nan() {
            return Err(EvalError::Negative(v));
        }
    }
    let s = v0 + v1;
    let value = 1.0 - (1.0 - s).max(0.0);
    let tol = tolerance();
    let regime = if (s - 1.0).abs() <= tol {
        Regime::Qubit
    } else if s < 1.0 {
        Regime::Qumix
    } else {
        Regime::Outside
    };
    Ok((value, regime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_sequent;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn decls() -> DeclarationSet {
        DeclarationSet::new().with_atoms(&["p0", "p1"]).with_grades(&["z0", "z1"])
    }

    fn seq(s: &str) -> GradedSequent {
        parse_sequent(s, &decls()).unwrap()
    }

    #[test]
    fn md_examples() {
        let r = md_check(&GradeEnv::qubit(c(1.0, 0.0), c(0.0, 0.0), MdMode::Strict)).unwrap();
        assert!(r.pass && r.norm_residual == 0.0 && r.cross_residual == 0.0);

        let r = md_check(&GradeEnv::qubit(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2), MdMode::Strict)).unwrap();
        assert!(r.pass, "{r:?}");

        let cat = GradeEnv::qubit(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), MdMode::Norm);
        let r = md_check(&cat).unwrap();
        assert!(r.pass && r.norm_pass && !r.strict_pass);
        assert!((r.cross_residual - 1.0).abs() < 1e-12);
        assert!(!md_check(&cat.with_md(MdMode::Strict)).unwrap().pass);
    }

    #[test]
    fn unbound_symbol() {
        let d = decls();
        assert_eq!(GradeEnv::from_declarations(&d), Err(EvalError::Unbound("z0".into())));
        let env = GradeEnv::qubit(c(1.0, 0.0), c(0.0, 0.0), MdMode::Norm);
        assert_eq!(env.value("w"), Err(EvalError::Unbound("w".into())));
    }

    #[test]
    fn glue_of_full_lists_is_one_under_strict_md() {
        let env = GradeEnv::qubit(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2), MdMode::Strict);
        let f = GradeExpr::sum([GradeRef::conj("z0"), GradeRef::conj("z1")]);
        let g = GradeExpr::sum([GradeRef::new("z0"), GradeRef::new("z1")]);
        let v = glue(&f, &g, &env).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn glue_of_single_grades_is_v_i() {
        let env = GradeEnv::qubit(c(0.6, 0.0), c(0.0, 0.8), MdMode::Strict);
        let v1 = glue(&GradeExpr::single(GradeRef::conj("z1")), &GradeExpr::single(GradeRef::new("z1")), &env).unwrap();
        assert!((v1 - c(0.64, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn glue_against_one_atom_is_a_literal_product() {
        let basis = GradeEnv::qubit(c(1.0, 0.0), c(0.0, 0.0), MdMode::Strict);
        let f = GradeExpr::sum([GradeRef::conj("z0"), GradeRef::conj("z1")]);
        let g = GradeExpr::single(GradeRef::new("z0"));
        assert!((glue(&f, &g, &basis).unwrap() - c(1.0, 0.0)).norm() < 1e-12);

        // (z0* + z1*) z0 keeps the mixed product z1* z0.
        let env = GradeEnv::qubit(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2), MdMode::Strict);
        let v = glue(&f, &g, &env).unwrap();
        assert!((v - c(0.5, -0.5)).norm() < 1e-12);
    }

    #[test]
    fn evaluate_examples() {
        let cat = GradeEnv::qubit(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), MdMode::Norm);
        assert!((evaluate(&seq("p0 |- p0"), &cat).unwrap() - 0.5).abs() < 1e-12);

        let strict = GradeEnv::qubit(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2), MdMode::Strict);
        let gamma = evaluate(&seq("p0 &[z0,z1] p1 |- p0 &[z0,z1] p1"), &strict).unwrap();
        assert!((gamma - 1.0).abs() < 1e-12);
        let list = evaluate(&seq("p0, p1 |- p0, p1"), &strict).unwrap();
        assert!((list - 1.0).abs() < 1e-12);

        let basis = GradeEnv::qubit(c(1.0, 0.0), c(0.0, 0.0), MdMode::Strict);
        assert_eq!(evaluate(&seq("p0 |- p0"), &basis).unwrap(), 1.0);
    }

    #[test]
    fn cat_state_full_list_exceeds_one() {
        let cat = GradeEnv::qubit(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), MdMode::Norm);
        let err = evaluate(&seq("p0 &[z0,z1] p1 |- p0 &[z0,z1] p1"), &cat).unwrap_err();
        assert!(matches!(err, EvalError::OutOfRange(v) if (v - 2.0).abs() < 1e-9));
        let v = evaluate(&seq("p0 &[z0,z1] p1 |- p0 &[z0,z1] p1"), &cat.with_md(MdMode::None)).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn unevaluated_shapes() {
        let env = GradeEnv::qubit(c(1.0, 0.0), c(0.0, 0.0), MdMode::Norm);
        assert!(matches!(evaluate(&seq("|-{z0} p0"), &env), Err(EvalError::Shape(_))));
        assert!(matches!(evaluate(&seq("p0 v[z0*,z1*] p1 |- p0"), &env), Err(EvalError::Shape(_))));
        assert!(matches!(evaluate(&seq("p0^ |- p0"), &env), Err(EvalError::Shape(_))));
    }

    #[test]
    fn phase_invariance_on_a_fixed_env() {
        let env = GradeEnv::qubit(c(0.6, 0.0), c(0.0, 0.8), MdMode::Strict);
        for s in ["p0 |- p0", "p1 |- p1", "p0 &[z0,z1] p1 |- p0 &[z0,z1] p1", "p0 &[z0,z1] p1 |- p1"] {
            let a = evaluate(&seq(s), &env).unwrap();
            let b = evaluate(&seq(s), &env.rephased(1.234)).unwrap();
            assert!((a - b).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn t_norm_examples() {
        assert_eq!(t_norm(TNorm::Lukasiewicz, 0.5, 0.5).unwrap(), 0.0);
        assert_eq!(t_norm(TNorm::Goedel, 0.3, 0.7).unwrap(), 0.3);
        for x in [0.0, 0.25, 0.9, 1.0] {
            assert_eq!(t_norm(TNorm::Product, 1.0, x).unwrap(), x);
        }
        assert_eq!(t_norm(TNorm::Product, 1.5, 0.2), Err(EvalError::OutOfRange(1.5)));
    }

    #[test]
    fn h_combine_examples() {
        assert_eq!(h_combine(0.5, 0.5).unwrap(), (1.0, Regime::Qubit));
        let (v, r) = h_combine(0.3, 0.3).unwrap();
        assert!((v - 0.6).abs() < 1e-15 && r == Regime::Qumix);
        assert_eq!(h_combine(0.0, 0.0).unwrap(), (0.0, Regime::Qumix));
        assert_eq!(h_combine(0.8, 0.7).unwrap(), (1.0, Regime::Outside));
        assert_eq!(h_combine(-0.1, 0.2), Err(EvalError::Negative(-0.1)));
    }
}
