use std::collections::HashMap;

use super::check::check_derivation;
use super::rules::{apply_rule, RuleParams};
use super::{RuleId, RuleSet};
use crate::syntax::{Atom, BinOp, Derivation, Formula, GradedSequent, Label, Step};

pub const MAX_SEARCH_DEPTH: u32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(Derivation),
    Exhausted(u32),
}

#[derive(Debug, Clone)]
enum Tree {
    Node { rule: RuleId, conclusion: GradedSequent, children: Vec<Tree> },
}

struct Searcher<'a> {
    rs: &'a RuleSet,
    failed: HashMap<String, u32>,
}

/// Iterative-deepening backward search over the cut-free, ungraded rules of
/// `rs`. Heights count rule applications, so an axiom has height 1.
pub fn bounded_search(rs: &RuleSet, goal: &GradedSequent, depth: u32) -> SearchOutcome {
    let depth = depth.min(MAX_SEARCH_DEPTH);
    let goal = GradedSequent { label: Label::Unlabelled, ..goal.clone() };
    let mut s = Searcher { rs, failed: HashMap::new() };
    for d in 1..=depth {
        if let Some(tree) = s.prove(&goal, d) {
            let derivation = flatten(tree, &rs.name);
            debug_assert!(check_derivation(rs, &derivation).accepted());
            return SearchOutcome::Found(derivation);
        }
    }
    SearchOutcome::Exhausted(depth)
}

fn flatten(tree: Tree, ruleset: &str) -> Derivation {
    fn go(t: Tree, steps: &mut Vec<Step>) -> u32 {
        let Tree::Node { rule, conclusion, children } = t;
        let premises = children.into_iter().map(|c| go(c, steps)).collect();
        let id = steps.len() as u32 + 1;
        steps.push(Step { id, conclusion, rule, premises });
        id
    }
    let mut steps = Vec::new();
    go(tree, &mut steps);
    Derivation { name: "search".into(), ruleset: ruleset.to_string(), steps }
}

type Candidate = (RuleId, Vec<GradedSequent>, RuleParams);

impl Searcher<'_> {
    fn prove(&mut self, goal: &GradedSequent, d: u32) -> Option<Tree> {
        if d == 0 {
            return None;
        }
        let key = goal.to_string();
        if self.failed.get(&key).is_some_and(|&f| f >= d) {
            return None;
        }
        for (rule, premises, params) in self.expand(goal) {
            if !apply_rule(self.rs, rule, &premises, &params).is_ok_and(|c| c == *goal) {
                continue;
            }
            let mut children = Vec::with_capacity(premises.len());
            for p in &premises {
                match self.prove(p, d - 1) {
                    Some(t) => children.push(t),
                    None => break,
                }
            }
            if children.len() == premises.len() {
                return Some(Tree::Node { rule, conclusion: goal.clone(), children });
            }
        }
        let e = self.failed.entry(key).or_insert(0);
        *e = (*e).max(d);
        None
    }

    fn allowed(&self, r: RuleId) -> bool {
        self.rs.allows(r)
    }

    fn expand(&self, goal: &GradedSequent) -> Vec<Candidate> {
        let mut out: Vec<Candidate> = Vec::new();
        let (ante, cons) = (&goal.antecedent, &goal.consequent);
        let un = |a: Vec<Formula>, c: Vec<Formula>| GradedSequent::unlabelled(a, c);
        let none = RuleParams::default;

        if let ([a], [b]) = (ante.as_slice(), cons.as_slice()) {
            if a == b {
                out.push((RuleId::IdAxiom, vec![], RuleParams::principal(a.clone())));
            }
        }
        if let [f] = ante.as_slice() {
            for i in 0..2 {
                out.push((RuleId::AtAxiom, vec![], RuleParams::principal(f.clone()).with_index(i)));
            }
        }

        // Principal on the right, in first position.
        if let Some((f, dc)) = cons.split_first() {
            let with = |x: &[Formula]| [x, dc].concat();
            if let Formula::Binary { op, left, right } = f {
                let (l, r) = ((**left).clone(), (**right).clone());
                match op {
                    BinOp::And => {
                        out.push((
                            RuleId::AndForm,
                            vec![
                                un(ante.clone(), with(std::slice::from_ref(&l))),
                                un(ante.clone(), with(std::slice::from_ref(&r))),
                            ],
                            none(),
                        ));
                    }
                    BinOp::Or => {
                        for x in [&l, &r] {
                            out.push((
                                RuleId::OrRefl,
                                vec![un(ante.clone(), with(std::slice::from_ref(x)))],
                                RuleParams::principal(f.clone()),
                            ));
                        }
                    }
                    BinOp::Par => {
                        out.push((RuleId::ParForm, vec![un(ante.clone(), with(&[l.clone(), r.clone()]))], none()))
                    }
                    BinOp::Ent => {
                        if let (Some(a), Some(b)) = (l.qubit_atom(), r.qubit_atom()) {
                            let atoms = |a: Atom, b: Atom| with(&[Formula::Atom(a), Formula::Atom(b)]);
                            out.push((
                                RuleId::AtForm,
                                vec![
                                    un(ante.clone(), atoms(a.clone(), b.clone())),
                                    un(ante.clone(), atoms(a.negate(), b.negate())),
                                ],
                                none(),
                            ));
                            out.push((RuleId::AtForm, vec![un(ante.clone(), with(&[l.clone(), r.clone()]))], none()));
                        }
                    }
                    BinOp::Times => {
                        for (g1, g2) in splits(ante) {
                            for (d1, d2) in splits(dc) {
                                out.push((
                                    RuleId::TimesRefl,
                                    vec![
                                        un(g1.clone(), [&[l.clone()][..], &d1].concat()),
                                        un(g2.clone(), [&[r.clone()][..], &d2].concat()),
                                    ],
                                    none(),
                                ));
                            }
                        }
                    }
                    BinOp::EntDual => {
                        if let (Some(a), Some(b)) = (l.qubit_atom(), r.qubit_atom()) {
                            for (g1, g2) in splits(ante) {
                                for (d1, d2) in splits(dc) {
                                    let one = |g: &Vec<Formula>, x: Atom, d: &Vec<Formula>| {
                                        un(g.clone(), [&[Formula::Atom(x)][..], d].concat())
                                    };
                                    out.push((
                                        RuleId::SectRefl,
                                        vec![
                                            one(&g1, a.clone(), &d1),
                                            one(&g2, b.clone(), &d2),
                                            one(&g1, a.negate(), &d1),
                                            one(&g2, b.negate(), &d2),
                                        ],
                                        none(),
                                    ));
                                }
                            }
                        }
                    }
                    BinOp::Implies | BinOp::CoImplies => {}
                }
            }
            if let Formula::Not(x) = f {
                out.push((
                    RuleId::NegForm,
                    vec![un([ante.as_slice(), &[(**x).clone()]].concat(), dc.to_vec())],
                    none(),
                ));
            }
        }

        // Principal on the left, in last position.
        if let Some((f, gc)) = ante.split_last() {
            let with = |x: &[Formula]| [gc, x].concat();
            if let Formula::Binary { op, left, right } = f {
                let (l, r) = ((**left).clone(), (**right).clone());
                match op {
                    BinOp::And => {
                        for x in [&l, &r] {
                            out.push((
                                RuleId::AndRefl,
                                vec![un(with(std::slice::from_ref(x)), cons.clone())],
                                RuleParams::principal(f.clone()),
                            ));
                        }
                    }
                    BinOp::Or => {
                        out.push((
                            RuleId::OrForm,
                            vec![
                                un(with(std::slice::from_ref(&l)), cons.clone()),
                                un(with(std::slice::from_ref(&r)), cons.clone()),
                            ],
                            none(),
                        ));
                    }
                    BinOp::Times => {
                        out.push((RuleId::TimesForm, vec![un(with(&[l.clone(), r.clone()]), cons.clone())], none()))
                    }
                    BinOp::Par => {
                        for (g1, g2) in splits(gc) {
                            for (d1, d2) in splits(cons) {
                                out.push((
                                    RuleId::ParRefl,
                                    vec![
                                        un([&g1[..], std::slice::from_ref(&l)].concat(), d1),
                                        un([&g2[..], std::slice::from_ref(&r)].concat(), d2),
                                    ],
                                    none(),
                                ));
                            }
                        }
                    }
                    BinOp::Ent => {
                        if let (Some(a), Some(b)) = (l.qubit_atom(), r.qubit_atom()) {
                            let pairs = [
                                (Formula::Atom(a.clone()), Formula::Atom(b.clone())),
                                (Formula::Atom(a.negate()), Formula::Atom(b.negate())),
                                (l.clone(), r.clone()),
                            ];
                            for (x, y) in pairs {
                                for (g1, g2) in splits(gc) {
                                    for (d1, d2) in splits(cons) {
                                        out.push((
                                            RuleId::AtRefl,
                                            vec![
                                                un([&g1[..], std::slice::from_ref(&x)].concat(), d1),
                                                un([&g2[..], std::slice::from_ref(&y)].concat(), d2),
                                            ],
                                            RuleParams::principal(f.clone()),
                                        ));
                                    }
                                }
                            }
                        }
                    }
                    BinOp::EntDual => {
                        if let (Some(a), Some(b)) = (l.qubit_atom(), r.qubit_atom()) {
                            let pair = |a: Atom, b: Atom| with(&[Formula::Atom(a), Formula::Atom(b)]);
                            out.push((
                                RuleId::SectForm,
                                vec![
                                    un(pair(a.clone(), b.clone()), cons.clone()),
                                    un(pair(a.negate(), b.negate()), cons.clone()),
                                ],
                                none(),
                            ));
                        }
                    }
                    BinOp::Implies | BinOp::CoImplies => {}
                }
            }
            if let Formula::Not(x) = f {
                out.push((RuleId::NegRefl, vec![un(gc.to_vec(), [&[(**x).clone()][..], cons].concat())], none()));
            }
        }

        // Structural rules, read backwards.
        for (left, side) in [(true, ante), (false, cons)] {
            let put = |v: Vec<Formula>| if left { un(v, cons.clone()) } else { un(ante.clone(), v) };
            let (exch, weak, contr) = if left {
                (RuleId::ExchL, RuleId::WeakL, RuleId::ContrL)
            } else {
                (RuleId::ExchR, RuleId::WeakR, RuleId::ContrR)
            };
            for i in 0..side.len() {
                if self.allowed(contr) {
                    let mut v = side.clone();
                    v.insert(i, side[i].clone());
                    out.push((contr, vec![put(v)], RuleParams::index(i)));
                }
                if self.allowed(weak) {
                    let mut v = side.clone();
                    let f = v.remove(i);
                    out.push((weak, vec![put(v)], RuleParams::principal(f).with_index(i)));
                }
                if self.allowed(exch) && i + 1 < side.len() && side[i] != side[i + 1] {
                    let mut v = side.clone();
                    v.swap(i, i + 1);
                    out.push((exch, vec![put(v)], RuleParams::index(i)));
                }
            }
        }

        out.retain(|(r, _, _)| self.allowed(*r));
        out
    }
}

fn splits(xs: &[Formula]) -> Vec<(Vec<Formula>, Vec<Formula>)> {
    (0..=xs.len()).map(|k| (xs[..k].to_vec(), xs[k..].to_vec())).collect()
}
