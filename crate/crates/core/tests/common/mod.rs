#![allow(dead_code)]

use lq::evaluation::{GradeEnv, MdMode};
use lq::syntax::{
    Atom, BinOp, DeclarationSet, Formula, GradeExpr, GradeRef, GradeTerm, GradedOp, GradedSequent, Label, Sign,
};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

pub const ATOMS: [&str; 4] = ["A", "B", "p0", "p1"];

pub fn decls() -> DeclarationSet {
    DeclarationSet::new().with_atoms(&["p0", "p1", "A", "B"]).with_grades(&["z0", "z1"])
}

pub fn arb_atom() -> impl Strategy<Value = Atom> {
    (prop::sample::select(&ATOMS[..]), any::<bool>()).prop_map(|(n, negated)| Atom { name: n.to_string(), negated })
}

pub fn arb_grade_ref() -> impl Strategy<Value = GradeRef> {
    (prop::sample::select(&["z0", "z1"][..]), any::<bool>())
        .prop_map(|(s, conjugated)| GradeRef { symbol: s.to_string(), conjugated })
}

pub fn arb_grade_expr() -> impl Strategy<Value = GradeExpr> {
    prop::collection::vec((any::<bool>(), arb_grade_ref()), 1..4).prop_map(|ts| GradeExpr {
        terms: ts
            .into_iter()
            .map(|(minus, grade)| GradeTerm { sign: if minus { Sign::Minus } else { Sign::Plus }, grade })
            .collect(),
    })
}

fn ent_operand() -> impl Strategy<Value = Formula> {
    prop_oneof![arb_atom().prop_map(|a| Formula::qubit(&a)), arb_atom().prop_map(Formula::Atom)]
}

/// `@`/`sect` with operands the parser admits: atoms or qubits, at least one qubit.
fn arb_ent() -> impl Strategy<Value = Formula> {
    (any::<bool>(), ent_operand(), ent_operand()).prop_map(|(dual, l, r)| {
        let l = match (&l, l.qubit_atom().is_some() || r.qubit_atom().is_some()) {
            (Formula::Atom(a), false) => Formula::qubit(a),
            _ => l,
        };
        Formula::bin(if dual { BinOp::EntDual } else { BinOp::Ent }, l, r)
    })
}

const PLAIN_OPS: [BinOp; 6] = [BinOp::And, BinOp::Or, BinOp::Times, BinOp::Par, BinOp::Implies, BinOp::CoImplies];

/// Formulas of depth at most 6 over `A, B, p0, p1` and grades `z0, z1`.
pub fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![3 => arb_atom().prop_map(Formula::Atom), 1 => arb_ent()];
    leaf.prop_recursive(4, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (prop::sample::select(&PLAIN_OPS[..]), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Formula::bin(op, l, r)),
            (any::<bool>(), inner.clone(), inner, arb_grade_ref(), arb_grade_ref()).prop_map(|(or, l, r, g0, g1)| {
                Formula::graded(if or { GradedOp::Or } else { GradedOp::And }, l, r, g0, g1)
            }),
        ]
    })
}

/// Ungraded formulas, the domain of the ⊥ duality.
pub fn arb_plain_formula() -> impl Strategy<Value = Formula> {
    arb_formula().prop_filter("ungraded", |f| !f.is_graded())
}

pub fn arb_sequent() -> impl Strategy<Value = GradedSequent> {
    let side = || prop::collection::vec(arb_formula(), 0..3);
    (side(), side(), arb_grade_expr(), 0u32..=1000, 0u8..3).prop_map(|(a, c, g, v, pick)| {
        let label = match (a.is_empty(), c.is_empty(), pick) {
            (true, false, 1) | (false, true, 1) => Label::Grade(g),
            (false, false, 2) => Label::Eval(f64::from(v) / 1000.0),
            _ => Label::Unlabelled,
        };
        GradedSequent { antecedent: a, consequent: c, label }
    })
}

/// Deterministic samples of a strategy, for criteria that need a fixed count.
pub fn samples<S: Strategy>(s: S, n: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..n).map(|_| s.new_tree(&mut runner).expect("strategy generates").current()).collect()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn unit_phase() -> impl Strategy<Value = Complex64> {
    (0.0..std::f64::consts::TAU).prop_map(Complex64::cis)
}

/// Qubit amplitudes with `|z0|² + |z1|² = 1`.
pub fn arb_norm_pair() -> impl Strategy<Value = (Complex64, Complex64)> {
    (0.0..=std::f64::consts::FRAC_PI_2, unit_phase(), unit_phase()).prop_map(|(t, a, b)| (a * t.cos(), b * t.sin()))
}

/// Qubit amplitudes that additionally have vanishing cross terms.
pub fn arb_strict_pair() -> impl Strategy<Value = (Complex64, Complex64)> {
    (0.0..=std::f64::consts::FRAC_PI_2, unit_phase(), any::<bool>()).prop_map(|(t, a, up)| {
        let quarter = if up { c(0.0, 1.0) } else { c(0.0, -1.0) };
        (a * t.cos(), a * quarter * t.sin())
    })
}

pub fn env(pair: (Complex64, Complex64), md: MdMode) -> GradeEnv {
    GradeEnv::qubit(pair.0, pair.1, md)
}
