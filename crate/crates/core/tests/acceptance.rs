//! The acceptance criteria, one PASS/FAIL line each.
//!
//! `cargo test --test acceptance -- --nocapture`

mod common;

use common::{arb_formula, arb_norm_pair, arb_strict_pair, c, decls, env, samples, unit_phase};
use lq::calculus::{bounded_search, corpus, corpus_entry, make_ruleset, RuleId, SearchOutcome, Verdict};
use lq::evaluation::{evaluate, h_combine, t_norm, GradeEnv, MdMode, TNorm};
use lq::hilbert::{
    cut_probability, from_bloch, interpret_state, measure, not_gate, sqrt_not_gate, to_bloch, ExactComplex, GateScalar,
    StateVector,
};
use lq::lattice::{check_laws, l2q4, lm2, lq2, proj2, proj_closure_qubit, FiniteLattice, Law};
use lq::syntax::{parse_formula, parse_script, parse_sequent, render_formula, render_script};
use num_rational::Ratio;
use proptest::prelude::*;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if $cond {
        } else {
            return Err(format!($($msg)*));
        }
    };
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

const N: usize = 1000;
const TOL: f64 = 1e-9;

fn qubit_theorem() -> Outcome {
    let r = corpus_entry("qubit_theorem").map_err(err)?.replay().map_err(err)?;
    ensure!(r.report.verdict == Verdict::Accepted, "rejected: {:?}", r.report.nodes);
    ensure!(r.report.ruleset == "Lq", "checked under {}", r.report.ruleset);
    let v = r.report.root_evaluation.ok_or("no root evaluation")?;
    ensure!((v - 1.0).abs() <= TOL, "root evaluates to {v}");
    Ok(())
}

fn no_weakening_variants() -> Vec<String> {
    let flags = ["exchange", "contraction", "left", "right"];
    (0..1u32 << flags.len())
        .map(|mask| {
            let mut name = "L2q".to_string();
            for (i, f) in flags.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    name.push('+');
                    name.push_str(f);
                }
            }
            name
        })
        .collect()
}

fn negative_corpus() -> Outcome {
    for (name, rule, flag) in [
        ("at_idempotence_by_contraction", RuleId::ContrR, "L2q+contraction"),
        ("at_idempotence_by_weakening", RuleId::WeakR, "L2q+weakening"),
    ] {
        let e = corpus_entry(name).map_err(err)?;
        let r = e.replay_under(&make_ruleset("L2q").map_err(err)?).map_err(err)?;
        ensure!(!r.report.accepted(), "{name} accepted under L2q");
        ensure!(r.report.first_failing_rule() == Some(rule), "{name} failed at {:?}", r.report.first_failing_rule());
        let r = e.replay_under(&make_ruleset(flag).map_err(err)?).map_err(err)?;
        ensure!(r.report.accepted(), "{name} rejected under {flag}: {:?}", r.report.nodes);
    }
    let mut rulesets = no_weakening_variants();
    rulesets.extend(["B", "BL", "BR", "BLR"].map(String::from));
    for name in ["epr_from_cut", "cut_from_epr"] {
        let e = corpus_entry(name).map_err(err)?;
        for rs in &rulesets {
            let r = e.replay_under(&make_ruleset(rs).map_err(err)?).map_err(err)?;
            ensure!(!r.report.accepted(), "{name} accepted under {rs}");
        }
    }
    Ok(())
}

fn at_commutativity() -> Outcome {
    let l2q = make_ruleset("L2q").map_err(err)?;
    let perp = corpus_entry("at_commutative_perp").map_err(err)?.replay_under(&l2q).map_err(err)?;
    ensure!(perp.report.accepted(), "perp case rejected: {:?}", perp.report.nodes);
    let e = corpus_entry("at_noncommutativity_via_exchange").map_err(err)?;
    ensure!(!e.replay_under(&l2q).map_err(err)?.report.accepted(), "general case accepted under L2q");
    let ex = make_ruleset("L2q+exchange").map_err(err)?;
    ensure!(e.replay_under(&ex).map_err(err)?.report.accepted(), "general case rejected under L2q+exchange");
    Ok(())
}

fn gluing_normalisation() -> Outcome {
    let d = decls();
    let sequents = ["p0 &[z0,z1] p1 |- p0 &[z0,z1] p1", "p0, p1 |- p0, p1"]
        .map(|t| parse_sequent(t, &d).expect("fixed sequent parses"));
    for (pair, phase) in samples((arb_strict_pair(), unit_phase()), N) {
        let e = env(pair, MdMode::Strict);
        let rotated = GradeEnv::qubit(pair.0 * phase, pair.1 * phase, MdMode::Strict);
        for s in &sequents {
            let v = evaluate(s, &e).map_err(err)?;
            let w = evaluate(s, &rotated).map_err(err)?;
            ensure!((v - 1.0).abs() <= TOL, "{s} evaluates to {v} at {pair:?}");
            ensure!((v - w).abs() <= TOL, "phase {phase} moves {s} from {v} to {w}");
        }
    }
    Ok(())
}

fn cut_is_measurement() -> Outcome {
    let q = parse_formula("p0 &[z0,z1] p1", &decls()).map_err(err)?;
    for pair in samples(arb_norm_pair(), N) {
        let e = env(pair, MdMode::Norm);
        let state = interpret_state(&q, &e).map_err(err)?;
        for i in 0..2 {
            let cut = cut_probability(i, &e).map_err(err)?;
            let m = match measure(&state, i) {
                Ok((p, _)) => p,
                Err(lq::hilbert::HilbertError::ZeroProbability(_)) => 0.0,
                Err(x) => return Err(err(x)),
            };
            ensure!((cut - m).abs() <= TOL, "outcome {i} at {pair:?}: cut {cut}, measurement {m}");
        }
    }
    Ok(())
}

fn first(l: &FiniteLattice, law: Law) -> Result<(Vec<String>, String, String), String> {
    let r = check_laws(l);
    let v = r.get(law);
    ensure!(!v.pass, "{} passes {}", l.name(), law.name());
    let ce = v.first.as_ref().ok_or("no witness")?;
    Ok((ce.labels.clone(), ce.lhs.clone().unwrap_or_default(), ce.rhs.clone().unwrap_or_default()))
}

fn lattice_laws() -> Outcome {
    let p2 = proj2().map_err(err)?;
    let r = check_laws(&p2);
    ensure!(Law::ALL.iter().all(|&l| r.passes(l)), "proj2 fails a law");

    let pc = proj_closure_qubit().map_err(err)?;
    let (_, lhs, rhs) = first(&pc, Law::Distributive)?;
    ensure!(lhs == "P0" && rhs == "0", "proj_closure sides {lhs} vs {rhs}");
    let r = check_laws(&pc);
    let mirrored = r.get(Law::Distributive).counterexamples.iter().any(|ce| ce.labels == ["P0", "P+", "P-"]);
    ensure!(mirrored, "P0 & (P+ v P-) is not among the counterexamples");

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cat = GradeEnv::qubit(c(h, 0.0), c(h, 0.0), MdMode::Norm);
    let r = check_laws(&lq2(&cat).map_err(err)?);
    for law in [Law::Orthomodular, Law::Modular, Law::Distributive] {
        ensure!(r.passes(law), "lq2 fails {}", law.name());
    }

    let (w, lhs, rhs) = first(&lm2(&cat).map_err(err)?, Law::Distributive)?;
    ensure!(w == ["P0", "O0", "O1"] && lhs == "P0" && rhs == "O0", "lm2 witness {w:?}: {lhs} vs {rhs}");

    let wide = GradeEnv::qubit(c(0.8, 0.0), c(0.6, 0.0), MdMode::Norm);
    let narrow = GradeEnv::qubit(c(0.6, 0.0), c(0.8, 0.0), MdMode::Norm);
    let (w, lhs, rhs) = first(&l2q4(&wide, &narrow).map_err(err)?, Law::Distributive)?;
    ensure!(w == ["O0", "O0'", "O1'"] && lhs == "O0" && rhs == "O0'", "l2q4 witness {w:?}: {lhs} vs {rhs}");
    Ok(())
}

fn exact(re: i64, im: i64) -> ExactComplex {
    ExactComplex::new(Ratio::from_integer(re), Ratio::from_integer(im))
}

fn gates() -> Outcome {
    for n in 1..=3u32 {
        for i in 0..1usize << n {
            let mut e = vec![exact(0, 0); 1 << n];
            e[i] = exact(1, 0);
            let twice = sqrt_not_gate(&sqrt_not_gate(&e).map_err(err)?).map_err(err)?;
            ensure!(twice == not_gate(&e).map_err(err)?, "n = {n}, basis {i}");
        }
    }
    let half = sqrt_not_gate(&[exact(1, 0), exact(0, 0)]).map_err(err)?;
    let want =
        [ExactComplex::new(Ratio::new(1, 2), Ratio::new(1, 2)), ExactComplex::new(Ratio::new(1, 2), Ratio::new(-1, 2))];
    ensure!(half == want, "sqrt(NOT)|0> = {half:?}");
    ensure!(half == [ExactComplex::half_one_plus_i(), ExactComplex::half_one_minus_i()], "scalar constants");
    Ok(())
}

fn t_norm_exclusion() -> Outcome {
    for k in TNorm::ALL {
        let v = t_norm(k, 0.5, 0.5).map_err(err)?;
        ensure!((v - 1.0).abs() > TOL, "{k:?} gives {v}");
    }
    let (h, _) = h_combine(0.5, 0.5).map_err(err)?;
    ensure!((h - 1.0).abs() <= TOL, "h gives {h}");
    Ok(())
}

fn bounded_search_evidence() -> Outcome {
    let d = decls();
    let l2q = make_ruleset("L2q").map_err(err)?;
    for goal in ["Q_A @ Q_A |- Q_A", "Q_A |- Q_A @ Q_A"] {
        let g = parse_sequent(goal, &d).map_err(err)?;
        let out = bounded_search(&l2q, &g, 8);
        ensure!(out == SearchOutcome::Exhausted(8), "{goal}: {out:?}");
    }
    let g = parse_sequent("Q_A |- Q_A @ Q_A", &d).map_err(err)?;
    let wc = make_ruleset("L2q+weakening+contraction").map_err(err)?;
    ensure!(matches!(bounded_search(&wc, &g, 8), SearchOutcome::Found(_)), "not found under weakening+contraction");
    Ok(())
}

fn bloch_roundtrip() -> Outcome {
    for (a, b) in samples(arb_norm_pair(), N) {
        let s = StateVector::qubit(a, b).map_err(err)?;
        let back = from_bloch(to_bloch(&s).map_err(err)?);
        ensure!(back.eq_up_to_phase(&s, TOL), "{a} {b}");
    }
    Ok(())
}

fn parser_roundtrip() -> Outcome {
    let d = decls();
    for f in samples(arb_formula().prop_filter("depth", |f| f.depth() <= 6), N) {
        let text = render_formula(&f);
        let back = parse_formula(&text, &d).map_err(|e| format!("`{text}`: {e}"))?;
        ensure!(back == f, "`{text}` reparses differently");
    }
    for e in corpus() {
        let s = parse_script(e.source).map_err(err)?;
        let once = render_script(&s.decls, &s.derivations);
        let again = parse_script(&once).map_err(err)?;
        ensure!(render_script(&again.decls, &again.derivations) == once, "{} is not stable", e.name);
        ensure!(once == e.source, "{} is not stored in rendered form", e.name);
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("qubit theorem", qubit_theorem),
        ("negative corpus", negative_corpus),
        ("@-commutativity", at_commutativity),
        ("gluing normalisation and phase invariance", gluing_normalisation),
        ("cut = measurement", cut_is_measurement),
        ("lattice law matrix", lattice_laws),
        ("gates", gates),
        ("T-norm exclusion", t_norm_exclusion),
        ("bounded search", bounded_search_evidence),
        ("Bloch roundtrip", bloch_roundtrip),
        ("parser roundtrip", parser_roundtrip),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(()) => println!("criterion {:>2} PASS {name}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
