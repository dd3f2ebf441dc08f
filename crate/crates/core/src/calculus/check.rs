use std::collections::BTreeMap;

use serde::Serialize;

use super::rules::{apply_traced, RuleParams};
use super::{RuleError, RuleId, RuleSet};
use crate::evaluation::{evaluate, md_check, tolerance, EvalError, GradeEnv};
use crate::syntax::{Derivation, GradedSequent, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeStatus {
    Ok,
    RuleAbsent,
    ShapeMismatch,
    SideCondition,
    PremiseMissing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeReport {
    pub id: u32,
    pub rule: RuleId,
    pub status: NodeStatus,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub ruleset: String,
    pub verdict: Verdict,
    pub nodes: Vec<NodeReport>,
    pub first_failure: Option<u32>,
    pub root: Option<String>,
    pub root_evaluation: Option<f64>,
}

impl CheckReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accepted
    }

    pub fn failures(&self) -> impl Iterator<Item = &NodeReport> {
        self.nodes.iter().filter(|n| n.status != NodeStatus::Ok)
    }

    /// The rule named at the first failing node.
    pub fn first_failing_rule(&self) -> Option<RuleId> {
        let id = self.first_failure?;
        self.nodes.iter().find(|n| n.id == id).map(|n| n.rule)
    }
}

/// Replays every step of `d` under `rs`.
pub fn check_derivation(rs: &RuleSet, d: &Derivation) -> CheckReport {
    check_derivation_with_env(rs, d, None)
}

/// Like [`check_derivation`], additionally verifying axiom evaluations and
/// MD against `env` and reporting the root evaluation.
pub fn check_derivation_with_env(rs: &RuleSet, d: &Derivation, env: Option<&GradeEnv>) -> CheckReport {
    let mut by_id: BTreeMap<u32, &GradedSequent> = BTreeMap::new();
    let mut nodes = Vec::with_capacity(d.steps.len());
    for step in &d.steps {
        let premises: Option<Vec<GradedSequent>> =
            step.premises.iter().map(|p| by_id.get(p).map(|s| (*s).clone())).collect();
        let (status, message) = match premises {
            None => (NodeStatus::PremiseMissing, "cites a premise that is not an earlier step".to_string()),
            Some(premises) => check_node(rs, step.rule, &premises, &step.conclusion, env),
        };
        nodes.push(NodeReport { id: step.id, rule: step.rule, status, message });
        by_id.insert(step.id, &step.conclusion);
    }
    let first_failure = nodes.iter().find(|n| n.status != NodeStatus::Ok).map(|n| n.id);
    let root = d.root().map(|s| &s.conclusion);
    let root_evaluation = root.and_then(|r| match env {
        Some(env) => evaluate(r, env).ok(),
        None => r.label.eval(),
    });
    CheckReport {
        name: d.name.clone(),
        ruleset: rs.name.clone(),
        verdict: if first_failure.is_none() && !nodes.is_empty() { Verdict::Accepted } else { Verdict::Rejected },
        nodes,
        first_failure,
        root: root.map(ToString::to_string),
        root_evaluation,
    }
}

fn check_node(
    rs: &RuleSet,
    rule: RuleId,
    premises: &[GradedSequent],
    concl: &GradedSequent,
    env: Option<&GradeEnv>,
) -> (NodeStatus, String) {
    if !rs.allows(rule) {
        return (NodeStatus::RuleAbsent, RuleError::Absent { rule, ruleset: rs.name.clone() }.to_string());
    }
    let tol = tolerance();
    let mut mismatch: Option<String> = None;
    let mut side: Option<String> = None;
    let mut shape: Option<String> = None;
    for params in candidates(rule, premises, concl) {
        match apply_traced(rs, rule, premises, &params) {
            Ok((got, notes)) if got.approx_eq(concl, tol) => {
                return match env_check(rule, concl, env) {
                    Ok(extra) => (NodeStatus::Ok, notes.into_iter().chain(extra).collect::<Vec<_>>().join("; ")),
                    Err(msg) => (NodeStatus::SideCondition, msg),
                };
            }
            Ok((got, _)) => {
                mismatch.get_or_insert_with(|| format!("rule yields `{got}`, step states `{concl}`"));
            }
            Err(RuleError::SideCondition(m)) => {
                side.get_or_insert(m);
            }
            Err(e) => {
                shape.get_or_insert_with(|| e.to_string());
            }
        }
    }
    if let Some(m) = side {
        (NodeStatus::SideCondition, m)
    } else {
        (NodeStatus::ShapeMismatch, mismatch.or(shape).unwrap_or_else(|| "no applicable instance".into()))
    }
}

fn env_check(rule: RuleId, concl: &GradedSequent, env: Option<&GradeEnv>) -> Result<Vec<String>, String> {
    let Some(env) = env else { return Ok(Vec::new()) };
    match rule {
        RuleId::IdAxiom | RuleId::GandAxiom | RuleId::GorAxiom => {
            let Label::Eval(v) = concl.label else { return Ok(Vec::new()) };
            match evaluate(concl, env) {
                Ok(w) if (v - w).abs() <= tolerance() => Ok(vec![format!("evaluation {w} matches")]),
                Ok(w) => Err(format!("label {v} but the environment evaluates `{concl}` to {w}")),
                Err(EvalError::Shape(_)) => Ok(vec!["label not checked: side shape outside the evaluator".into()]),
                Err(e) => Err(e.to_string()),
            }
        }
        RuleId::GandForm | RuleId::GorForm => match md_check(env) {
            Ok(r) if r.pass => Ok(vec![format!("MD holds in the environment ({:?})", r.mode).to_lowercase()]),
            Ok(r) => Err(format!(
                "MD fails in the environment: norm residual {}, cross residual {}",
                r.norm_residual, r.cross_residual
            )),
            Err(e) => Err(e.to_string()),
        },
        _ => Ok(Vec::new()),
    }
}

/// Parameter guesses recovered from the stated conclusion.
fn candidates(rule: RuleId, premises: &[GradedSequent], concl: &GradedSequent) -> Vec<RuleParams> {
    let base = RuleParams { label: Some(concl.label.clone()), ..Default::default() };
    let with = |f: Option<&crate::syntax::Formula>| RuleParams { principal: f.cloned(), ..base.clone() };
    let (ante, cons) = (&concl.antecedent, &concl.consequent);
    match rule {
        RuleId::Hyp => vec![RuleParams { sequent: Some(concl.clone()), ..base }],
        RuleId::IdAxiom | RuleId::GandAxiom | RuleId::AtAxiom | RuleId::GorAxiom => {
            let mut out = Vec::new();
            for f in [ante.first(), cons.first()] {
                for i in 0..2 {
                    out.push(RuleParams { index: Some(i), ..with(f) });
                }
            }
            out
        }
        RuleId::Cut | RuleId::QCut => {
            let mut out = Vec::new();
            if let [a, b] = premises {
                for (i, x) in a.consequent.iter().enumerate() {
                    for (j, y) in b.antecedent.iter().enumerate() {
                        if x == y {
                            out.push(RuleParams { cut_at: Some((i, j)), ..base.clone() });
                        }
                    }
                }
            }
            if out.is_empty() {
                out.push(base);
            }
            out
        }
        RuleId::ExchL | RuleId::ExchR | RuleId::ContrL | RuleId::ContrR => {
            let len = premises
                .first()
                .map(|p| {
                    if matches!(rule, RuleId::ExchL | RuleId::ContrL) {
                        p.antecedent.len()
                    } else {
                        p.consequent.len()
                    }
                })
                .unwrap_or(0);
            (0..len.max(1)).map(|i| RuleParams { index: Some(i), ..base.clone() }).collect()
        }
        RuleId::WeakL | RuleId::WeakR => {
            let side = if rule == RuleId::WeakL { ante } else { cons };
            side.iter().enumerate().map(|(i, f)| RuleParams { index: Some(i), ..with(Some(f)) }).collect()
        }
        _ => vec![with(None), with(ante.last()), with(cons.first())],
    }
}

#[cfg(test)]
mod tests {
    use super::super::make_ruleset;
    use super::*;
    use crate::syntax::parse_script;

    const NON_IDEM: &str = "atom A;\nproof t in L2q {\n 1: Q_A |- Q_A by id-axiom();\n 2: Q_A @ Q_A |- Q_A, Q_A by at-refl(1, 1);\n 3: Q_A @ Q_A |- Q_A by contr-r(2);\n}\n";

    #[test]
    fn absent_rule_is_its_own_status() {
        let d = &parse_script(NON_IDEM).unwrap().derivations[0];
        let r = check_derivation(&make_ruleset("L2q").unwrap(), d);
        assert_eq!(r.verdict, Verdict::Rejected);
        assert_eq!(r.first_failure, Some(3));
        assert_eq!(r.nodes[2].status, NodeStatus::RuleAbsent);
        assert_eq!(r.first_failing_rule(), Some(RuleId::ContrR));
        assert!(check_derivation(&make_ruleset("L2q+contraction").unwrap(), d).accepted());
    }

    #[test]
    fn every_failure_is_listed() {
        let doc = "atom A, B;\nproof t in B {\n 1: A |- A by id-axiom();\n 2: A |- B by id-axiom();\n 3: A |- A, A by weak-r(1);\n}\n";
        let d = &parse_script(doc).unwrap().derivations[0];
        let r = check_derivation(&make_ruleset("B").unwrap(), d);
        let bad: Vec<(u32, NodeStatus)> = r.failures().map(|n| (n.id, n.status)).collect();
        assert_eq!(bad, vec![(2, NodeStatus::ShapeMismatch), (3, NodeStatus::RuleAbsent)]);
    }

    #[test]
    fn misstated_conclusion_is_a_shape_mismatch() {
        let doc = "atom A, B;\nproof t in B {\n 1: A |- A by id-axiom();\n 2: B |- B by id-axiom();\n 3: A & B |- A by and-refl(1, 2);\n}\n";
        let d = &parse_script(doc).unwrap().derivations[0];
        let r = check_derivation(&make_ruleset("B").unwrap(), d);
        assert_eq!(r.nodes[2].status, NodeStatus::ShapeMismatch);
    }

    #[test]
    fn environment_checks_axiom_labels() {
        let doc = "atom p0, p1;\ngrade z0, z1;\nbind z0 = 0.6+0i;\nbind z1 = 0+0.8i;\nmd strict;\nproof t in Lq {\n 1: p0 |-[0.36] p0 by id-axiom();\n 2: p1 |-[0.5] p1 by id-axiom();\n}\n";
        let s = parse_script(doc).unwrap();
        let env = GradeEnv::from_declarations(&s.decls).unwrap();
        let r = check_derivation_with_env(&make_ruleset("Lq").unwrap(), &s.derivations[0], Some(&env));
        assert_eq!(r.nodes[0].status, NodeStatus::Ok);
        assert_eq!(r.nodes[1].status, NodeStatus::SideCondition);
    }

    #[test]
    fn report_serializes_with_the_documented_keys() {
        let d = &parse_script(NON_IDEM).unwrap().derivations[0];
        let v = serde_json::to_value(check_derivation(&make_ruleset("L2q").unwrap(), d)).unwrap();
        for key in ["name", "ruleset", "verdict", "nodes"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "rejected");
        assert_eq!(v["nodes"][2]["status"], "rule-absent");
        assert_eq!(v["nodes"][2]["rule"], "contr-r");
    }
}
