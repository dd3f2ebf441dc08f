use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{FiniteLattice, LatticeError};
use crate::evaluation::{md_check, tolerance, GradeEnv};
use crate::hilbert::{Operator, OperatorKind};

const MAX_CLOSURE: usize = 64;

fn zero(dim: usize) -> Result<Operator, LatticeError> {
    Ok(Operator::new(DMatrix::zeros(dim, dim), OperatorKind::General)?)
}

fn leq_projector(a: &Operator, b: &Operator) -> bool {
    (a.matrix() * b.matrix() - a.matrix()).norm() <= tolerance()
}

fn ortho_projector(p: &Operator) -> Result<Operator, LatticeError> {
    let n = p.dim();
    Ok(Operator::new(DMatrix::identity(n, n) - p.matrix(), OperatorKind::Projector)?)
}

/// Projector onto the column space of `m`.
fn range_projector(m: DMatrix<Complex64>) -> Result<Operator, LatticeError> {
    let n = m.nrows();
    let svd = m.svd(true, false);
    let u = svd.u.expect("left singular vectors were requested");
    let mut p = DMatrix::<Complex64>::zeros(n, n);
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s > tolerance().sqrt() {
            let col = u.column(k);
            p += col * col.adjoint();
        }
    }
    Ok(Operator::new(p, OperatorKind::Projector)?)
}

fn span(a: &Operator, b: &Operator) -> Result<Operator, LatticeError> {
    let n = a.dim();
    let mut m = DMatrix::<Complex64>::zeros(n, 2 * n);
    m.columns_mut(0, n).copy_from(a.matrix());
    m.columns_mut(n, n).copy_from(b.matrix());
    range_projector(m)
}

fn intersection(a: &Operator, b: &Operator) -> Result<Operator, LatticeError> {
    ortho_projector(&span(&ortho_projector(a)?, &ortho_projector(b)?)?)
}

/// Orders labelled projectors by range inclusion and pairs each with
/// `I - P` when that is also present.
fn projector_lattice(name: &str, els: Vec<(String, Operator)>) -> Result<FiniteLattice, LatticeError> {
    let n = els.len();
    let leq = (0..n).map(|i| (0..n).map(|j| leq_projector(&els[i].1, &els[j].1)).collect()).collect();
    let mut ortho = Vec::with_capacity(n);
    for (_, p) in &els {
        let q = ortho_projector(p)?;
        match els.iter().position(|(_, x)| x.approx_eq(&q, tolerance())) {
            Some(k) => ortho.push(k),
            None => {
                ortho.clear();
                break;
            }
        }
    }
    let ortho = (ortho.len() == n).then_some(ortho);
    FiniteLattice::new(name, els.into_iter().map(|(l, p)| (l, Some(p))).collect(), leq, ortho)
}

/// `{0, P0, P1, I}` on a qubit.
pub fn proj2() -> Result<FiniteLattice, LatticeError> {
    projector_lattice(
        "proj2",
        vec![
            ("0".into(), Operator::new(DMatrix::zeros(2, 2), OperatorKind::Projector)?),
            ("P0".into(), Operator::projector(2, 0)?),
            ("P1".into(), Operator::projector(2, 1)?),
            ("I".into(), Operator::identity(2)?),
        ],
    )
}

/// Closes a set of projectors under subspace intersection, span and
/// orthocomplement. New elements are labelled `(a & b)`, `(a v b)` and `a^`.
pub fn proj_closure(name: &str, gens: &[(&str, Operator)]) -> Result<FiniteLattice, LatticeError> {
    let Some((_, first)) = gens.first() else {
        return Err(LatticeError::Input("no generators".into()));
    };
    let dim = first.dim();
    let mut els: Vec<(String, Operator)> =
        vec![("0".into(), Operator::new(DMatrix::zeros(dim, dim), OperatorKind::Projector)?)];
    let push = |els: &mut Vec<(String, Operator)>, l: String, p: Operator| -> Result<(), LatticeError> {
        if !els.iter().any(|(_, x)| x.approx_eq(&p, tolerance())) {
            if els.len() >= MAX_CLOSURE {
                return Err(LatticeError::Input(format!("closure exceeds {MAX_CLOSURE} elements")));
            }
            els.push((l, p));
        }
        Ok(())
    };
    for (l, p) in gens {
        if p.dim() != dim || Operator::new(p.matrix().clone(), OperatorKind::Projector).is_err() {
            return Err(LatticeError::Input(format!("generator `{l}` is not a projector on C^{dim}")));
        }
        push(&mut els, l.to_string(), p.clone())?;
    }
    push(&mut els, "I".into(), Operator::identity(dim)?)?;
    let mut seen = 0;
    while seen < els.len() {
        let upto = els.len();
        for i in 0..upto {
            for j in seen.max(i)..upto {
                let (a, b) = (els[i].clone(), els[j].clone());
                push(&mut els, format!("({} & {})", a.0, b.0), intersection(&a.1, &b.1)?)?;
                push(&mut els, format!("({} v {})", a.0, b.0), span(&a.1, &b.1)?)?;
            }
        }
        for i in seen..upto {
            let a = els[i].clone();
            push(&mut els, format!("{}^", a.0), ortho_projector(&a.1)?)?;
        }
        seen = upto;
    }
    let top = els.iter().position(|(l, _)| l == "I").expect("identity was added");
    let i = els.remove(top);
    els.push(i);
    projector_lattice(name, els)
}

/// The closure of `{P0, P1, P+}` on a qubit: `{0, P0, P1, P+, P-, I}`.
pub fn proj_closure_qubit() -> Result<FiniteLattice, LatticeError> {
    let h = Complex64::new(0.5, 0.0);
    let plus = Operator::new(DMatrix::from_element(2, 2, h), OperatorKind::Projector)?;
    let l = proj_closure(
        "proj_closure",
        &[("P0", Operator::projector(2, 0)?), ("P1", Operator::projector(2, 1)?), ("P+", plus)],
    )?;
    let els = l
        .elements()
        .iter()
        .map(|e| {
            (
                if e.label == "P+^" { "P-".to_string() } else { e.label.clone() },
                e.payload.clone().expect("projector payload"),
            )
        })
        .collect();
    projector_lattice("proj_closure", els)
}

/// The benzene-ring hexagon `{0, P, Q, Q^, P^, I}` for orthogonal
/// projectors `P` and `Q`.
pub fn benzene(p: &Operator, q: &Operator) -> Result<FiniteLattice, LatticeError> {
    let tol = tolerance();
    if p.dim() != q.dim() {
        return Err(LatticeError::Input("P and Q act on different spaces".into()));
    }
    for (l, x) in [("P", p), ("Q", q)] {
        Operator::new(x.matrix().clone(), OperatorKind::Projector)
            .map_err(|_| LatticeError::Input(format!("{l} is not a projector")))?;
        if x.matrix().norm() <= tol {
            return Err(LatticeError::Input(format!("{l} is zero")));
        }
    }
    if (p.matrix() * q.matrix()).norm() > tol {
        return Err(LatticeError::Input("PQ is not zero".into()));
    }
    let n = p.dim();
    if (p.matrix() + q.matrix() - DMatrix::<Complex64>::identity(n, n)).norm() <= tol {
        return Err(LatticeError::Input("P + Q = I collapses the hexagon".into()));
    }
    projector_lattice(
        "benzene",
        vec![
            ("0".into(), Operator::new(DMatrix::zeros(n, n), OperatorKind::Projector)?),
            ("P".into(), p.clone()),
            ("Q".into(), q.clone()),
            ("Q^".into(), ortho_projector(q)?),
            ("P^".into(), ortho_projector(p)?),
            ("I".into(), Operator::identity(n)?),
        ],
    )
}

/// `benzene` with `P = diag(1,0,0,0)` and `Q = diag(0,1,0,0)`.
pub fn benzene_default() -> Result<FiniteLattice, LatticeError> {
    benzene(&Operator::projector(4, 0)?, &Operator::projector(4, 1)?)
}

fn checked_env(env: &GradeEnv) -> Result<(Complex64, Complex64), LatticeError> {
    let r = md_check(env)?;
    if !r.pass {
        return Err(crate::evaluation::EvalError::MdViolation {
            mode: r.mode,
            norm: r.norm_residual,
            cross: r.cross_residual,
        }
        .into());
    }
    Ok((env.lambda(0)?, env.lambda(1)?))
}

fn weak_ops(env: &GradeEnv) -> Result<[Operator; 2], LatticeError> {
    let (l0, l1) = checked_env(env)?;
    Ok([Operator::weak(l0, &Operator::projector(2, 0)?)?, Operator::weak(l1, &Operator::projector(2, 1)?)?])
}

/// `O_i ∧ O_j = O_i O_j / (√λ_i √λ_j)` with principal square roots.
pub fn weak_meet(env: &GradeEnv, i: usize, j: usize) -> Result<Operator, LatticeError> {
    if i > 1 || j > 1 {
        return Err(LatticeError::Input(format!("weak operator index out of range: {i}, {j}")));
    }
    let (li, lj) = (env.lambda(i)?, env.lambda(j)?);
    if li.norm() <= tolerance() || lj.norm() <= tolerance() {
        return Err(LatticeError::Input("weak meet undefined for a zero grade".into()));
    }
    let oi = Operator::weak(li, &Operator::projector(2, i)?)?;
    let oj = Operator::weak(lj, &Operator::projector(2, j)?)?;
    let m = oi.matrix() * oj.matrix() / (li.sqrt() * lj.sqrt());
    Ok(Operator::new(m, OperatorKind::General)?)
}

/// `O_i ∨ O_j = O_i + O_j - O_i ∧ O_j`.
pub fn weak_join(env: &GradeEnv, i: usize, j: usize) -> Result<Operator, LatticeError> {
    let meet = weak_meet(env, i, j)?;
    let oi = Operator::weak(env.lambda(i)?, &Operator::projector(2, i)?)?;
    let oj = Operator::weak(env.lambda(j)?, &Operator::projector(2, j)?)?;
    Ok(Operator::new(oi.matrix() + oj.matrix() - meet.matrix(), OperatorKind::General)?)
}

fn nonzero(env: &GradeEnv) -> Result<(), LatticeError> {
    for i in 0..2 {
        if env.lambda(i)?.norm() <= tolerance() {
            return Err(LatticeError::Input(format!("grade of O{i} is zero")));
        }
    }
    Ok(())
}

/// `{0, O0, O1, Î}` with `O_i = λ_i P_i` and `Î = O0 + O1`.
pub fn lq2(env: &GradeEnv) -> Result<FiniteLattice, LatticeError> {
    nonzero(env)?;
    let [o0, o1] = weak_ops(env)?;
    let hat = Operator::new(o0.matrix() + o1.matrix(), OperatorKind::General)?;
    let els = vec![
        ("0".to_string(), Some(zero(2)?)),
        ("O0".to_string(), Some(o0)),
        ("O1".to_string(), Some(o1)),
        ("Î".to_string(), Some(hat)),
    ];
    FiniteLattice::from_pairs(
        "lq2",
        els,
        &[("0", "O0"), ("0", "O1"), ("O0", "Î"), ("O1", "Î")],
        Some(&[("0", "Î"), ("O0", "O1")]),
    )
}

fn proper_fraction(env: &GradeEnv) -> Result<(), LatticeError> {
    for i in 0..2 {
        let w = env.lambda(i)?.norm_sqr();
        if w <= tolerance() || w >= 1.0 - tolerance() {
            return Err(LatticeError::Input(format!("|λ{i}|² = {w} must lie strictly between 0 and 1")));
        }
    }
    Ok(())
}

/// `{0, O0, O1, P0, P1, I}` with each weak operator strictly below its
/// projector and the two branches incomparable.
pub fn lm2(env: &GradeEnv) -> Result<FiniteLattice, LatticeError> {
    proper_fraction(env)?;
    let [o0, o1] = weak_ops(env)?;
    let els = vec![
        ("0".to_string(), Some(zero(2)?)),
        ("O0".to_string(), Some(o0)),
        ("O1".to_string(), Some(o1)),
        ("P0".to_string(), Some(Operator::projector(2, 0)?)),
        ("P1".to_string(), Some(Operator::projector(2, 1)?)),
        ("I".to_string(), Some(Operator::identity(2)?)),
    ];
    FiniteLattice::from_pairs(
        "lm2",
        els,
        &[("0", "O0"), ("0", "O1"), ("O0", "P0"), ("O1", "P1"), ("P0", "I"), ("P1", "I")],
        None,
    )
}

/// Two weak qubit pairs from `env` and `env2` ordered by `|λ|²`:
/// `O0' <= O0` and `O1 <= O1'` when `|λ0'|² < |λ0|²`; equal weights leave
/// the pairs incomparable.
pub fn l2q4(env: &GradeEnv, env2: &GradeEnv) -> Result<FiniteLattice, LatticeError> {
    let (l0, l1) = checked_env(env)?;
    let (m0, m1) = checked_env(env2)?;
    proper_fraction(env)?;
    proper_fraction(env2)?;
    let tol = tolerance();
    let (w0, w1, v0, v1) = (l0.norm_sqr(), l1.norm_sqr(), m0.norm_sqr(), m1.norm_sqr());
    if v0 > w0 + tol {
        return Err(LatticeError::Input(format!("|λ0'|² = {v0} exceeds |λ0|² = {w0}")));
    }
    let mut pairs = vec![("0", "O0'"), ("0", "O1"), ("O0", "I"), ("O1'", "I")];
    pairs.push(if v0 < w0 - tol { ("O0'", "O0") } else { ("0", "O0") });
    pairs.push(if w1 < v1 - tol { ("O1", "O1'") } else { ("0", "O1'") });
    pairs.extend([("O0'", "I"), ("O1", "I")]);
    let els = ["0", "O0", "O0'", "O1'", "O1"]
        .iter()
        .map(|l| Ok((l.to_string(), if *l == "0" { Some(zero(4)?) } else { None })))
        .chain(std::iter::once(Ok(("I".to_string(), Some(Operator::identity(4)?)))))
        .collect::<Result<Vec<_>, LatticeError>>()?;
    FiniteLattice::from_pairs("l2q4", els, &pairs, Some(&[("0", "I"), ("O0", "O1"), ("O0'", "O1'")]))
}

/// One meet whose operands and result all carry matrices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayloadCheck {
    pub a: String,
    pub b: String,
    pub meet: String,
    pub residual: f64,
    pub ok: bool,
}

/// Compares each lattice meet of two non-bound elements with the matrix
/// composition of their payloads: the weak meet for two weak operators,
/// subspace intersection for two projectors and the ordinary product
/// otherwise.
pub fn cross_validate(l: &FiniteLattice) -> Vec<PayloadCheck> {
    let mut out = Vec::new();
    let bounds = [l.bottom(), l.top()];
    for a in 0..l.len() {
        for b in a..l.len() {
            if bounds.contains(&a) || bounds.contains(&b) {
                continue;
            }
            let m = l.meet(a, b);
            let (Some(pa), Some(pb), Some(pm)) =
                (&l.elements()[a].payload, &l.elements()[b].payload, &l.elements()[m].payload)
            else {
                continue;
            };
            let prod = pa.matrix() * pb.matrix();
            let composed = match (pa.kind(), pb.kind(), pa.weak_lambda(), pb.weak_lambda()) {
                (OperatorKind::Weak, OperatorKind::Weak, Some(x), Some(y)) => prod / (x.sqrt() * y.sqrt()),
                (OperatorKind::Projector, OperatorKind::Projector, _, _) => match intersection(pa, pb) {
                    Ok(p) => p.matrix().clone(),
                    Err(_) => prod,
                },
                _ => prod,
            };
            let residual = (composed - pm.matrix()).norm();
            out.push(PayloadCheck {
                a: l.label(a).to_string(),
                b: l.label(b).to_string(),
                meet: l.label(m).to_string(),
                residual,
                ok: residual <= tolerance(),
            });
        }
    }
    out
}
