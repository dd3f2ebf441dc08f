//! Finite bounded lattices given by an explicit order, with law auditing
//! and Hasse diagram export.

mod builders;

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::evaluation::EvalError;
use crate::hilbert::{HilbertError, Operator};

pub use builders::{
    benzene, benzene_default, cross_validate, l2q4, lm2, lq2, proj2, proj_closure, proj_closure_qubit, weak_join,
    weak_meet, PayloadCheck,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("order is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("order is not antisymmetric on `{0}`, `{1}`")]
    NotAntisymmetric(String, String),
    #[error("order is not transitive on `{0}`, `{1}`, `{2}`")]
    NotTransitive(String, String, String),
    #[error("`{0}` and `{1}` have no greatest lower bound")]
    NoMeet(String, String),
    #[error("`{0}` and `{1}` have no least upper bound")]
    NoJoin(String, String),
    #[error("orthocomplement is not {0} at `{1}`")]
    BadOrtho(&'static str, String),
    #[error("invalid builder input: {0}")]
    Input(String),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: usize,
    pub label: String,
    pub payload: Option<Operator>,
}

/// A validated finite lattice with precomputed meet and join tables.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLattice {
    name: String,
    elements: Vec<Element>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
    ortho: Option<Vec<usize>>,
}

impl FiniteLattice {
    /// Validates a partial order given as a full relation matrix.
    pub fn new(
        name: &str,
        elements: Vec<(String, Option<Operator>)>,
        leq: Vec<Vec<bool>>,
        ortho: Option<Vec<usize>>,
    ) -> Result<Self, LatticeError> {
        let n = elements.len();
        let elements: Vec<Element> =
            elements.into_iter().enumerate().map(|(id, (label, payload))| Element { id, label, payload }).collect();
        let lab = |i: usize| elements[i].label.clone();
        if n == 0 || leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Input("order matrix does not match the element list".into()));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(LatticeError::NotReflexive(lab(i)));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(LatticeError::NotAntisymmetric(lab(i), lab(j)));
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(LatticeError::NotTransitive(lab(i), lab(j), lab(k)));
                    }
                }
            }
        }
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&x| leq[x][a] && leq[x][b]).collect();
                meet[a][b] = *lower
                    .iter()
                    .find(|&&g| lower.iter().all(|&x| leq[x][g]))
                    .ok_or_else(|| LatticeError::NoMeet(lab(a), lab(b)))?;
                let upper: Vec<usize> = (0..n).filter(|&x| leq[a][x] && leq[b][x]).collect();
                join[a][b] = *upper
                    .iter()
                    .find(|&&l| upper.iter().all(|&x| leq[l][x]))
                    .ok_or_else(|| LatticeError::NoJoin(lab(a), lab(b)))?;
            }
        }
        let bottom = (0..n).find(|&x| (0..n).all(|y| leq[x][y])).expect("finite lattice has a bottom");
        let top = (0..n).find(|&x| (0..n).all(|y| leq[y][x])).expect("finite lattice has a top");
        if let Some(o) = &ortho {
            if o.len() != n || o.iter().any(|&x| x >= n) {
                return Err(LatticeError::Input("orthocomplement table does not match the element list".into()));
            }
            for a in 0..n {
                if o[o[a]] != a {
                    return Err(LatticeError::BadOrtho("involutive", lab(a)));
                }
                for b in 0..n {
                    if leq[a][b] && !leq[o[b]][o[a]] {
                        return Err(LatticeError::BadOrtho("order-reversing", lab(a)));
                    }
                }
            }
        }
        Ok(FiniteLattice { name: name.to_string(), elements, leq, meet, join, bottom, top, ortho })
    }

    /// Builds the order as the reflexive-transitive closure of `pairs`
    /// (`(a, b)` meaning `a <= b`), looked up by label.
    pub fn from_pairs(
        name: &str,
        elements: Vec<(String, Option<Operator>)>,
        pairs: &[(&str, &str)],
        ortho: Option<&[(&str, &str)]>,
    ) -> Result<Self, LatticeError> {
        let n = elements.len();
        let idx = |l: &str| {
            elements
                .iter()
                .position(|(x, _)| x == l)
                .ok_or_else(|| LatticeError::Input(format!("unknown element `{l}`")))
        };
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            leq[idx(a)?][idx(b)?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        let ortho = match ortho {
            None => None,
            Some(map) => {
                let mut o: Vec<Option<usize>> = vec![None; n];
                for (a, b) in map {
                    let (a, b) = (idx(a)?, idx(b)?);
                    o[a] = Some(b);
                    o[b] = Some(a);
                }
                let o: Option<Vec<usize>> = o.into_iter().collect();
                Some(o.ok_or_else(|| LatticeError::Input("orthocomplement must be total".into()))?)
            }
        };
        Self::new(name, elements, leq, ortho)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn label(&self, id: usize) -> &str {
        &self.elements[id].label
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e.label == label)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a][b]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a][b]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn ortho(&self, a: usize) -> Option<usize> {
        self.ortho.as_ref().map(|o| o[a])
    }

    pub fn has_ortho(&self) -> bool {
        self.ortho.is_some()
    }

    /// Pairs `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq[a][b] && !(0..n).any(|c| c != a && c != b && self.leq[a][c] && self.leq[c][b]) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    Complemented,
    Orthocomplemented,
    Modular,
    Orthomodular,
    Distributive,
}

impl Law {
    pub const ALL: [Law; 5] =
        [Law::Complemented, Law::Orthocomplemented, Law::Modular, Law::Orthomodular, Law::Distributive];

    pub fn name(self) -> &'static str {
        match self {
            Law::Complemented => "complemented",
            Law::Orthocomplemented => "orthocomplemented",
            Law::Modular => "modular",
            Law::Orthomodular => "orthomodular",
            Law::Distributive => "distributive",
        }
    }
}

/// A failing instance of a law: the element ids substituted, the two sides
/// it compares (when it is an equation) and which form failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub witness: Vec<usize>,
    pub labels: Vec<String>,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub form: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawVerdict {
    pub pass: bool,
    /// Ids of the first counterexample in enumeration order.
    #[serde(skip)]
    pub witness: Vec<usize>,
    /// Labels of the same elements; these are what reports show.
    #[serde(rename = "witness")]
    pub witness_labels: Vec<String>,
    pub first: Option<Counterexample>,
    pub counterexample_count: usize,
    #[serde(skip)]
    pub counterexamples: Vec<Counterexample>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    pub lattice: String,
    pub laws: BTreeMap<&'static str, LawVerdict>,
}

impl LawReport {
    pub fn get(&self, law: Law) -> &LawVerdict {
        &self.laws[law.name()]
    }

    pub fn passes(&self, law: Law) -> bool {
        self.get(law).pass
    }
}

fn verdict(list: Vec<Counterexample>, note: Option<String>) -> LawVerdict {
    LawVerdict {
        pass: list.is_empty() && note.is_none(),
        witness: list.first().map(|c| c.witness.clone()).unwrap_or_default(),
        witness_labels: list.first().map(|c| c.labels.clone()).unwrap_or_default(),
        first: list.first().cloned(),
        counterexample_count: list.len(),
        counterexamples: list,
        note,
    }
}

/// Exhaustively audits the five lattice laws.
pub fn check_laws(l: &FiniteLattice) -> LawReport {
    let n = l.len();
    let (m, j) = (|a, b| l.meet(a, b), |a, b| l.join(a, b));
    let (bot, top) = (l.bottom(), l.top());
    let ce = |ids: &[usize], lhs: Option<usize>, rhs: Option<usize>, form: &'static str| Counterexample {
        witness: ids.to_vec(),
        labels: ids.iter().map(|&i| l.label(i).to_string()).collect(),
        lhs: lhs.map(|x| l.label(x).to_string()),
        rhs: rhs.map(|x| l.label(x).to_string()),
        form,
    };
    let no_ortho = || Some("no orthocomplementation on this lattice".to_string());
    let mut laws = BTreeMap::new();

    let complemented: Vec<Counterexample> = (0..n)
        .filter(|&a| !(0..n).any(|b| m(a, b) == bot && j(a, b) == top))
        .map(|a| ce(&[a], None, None, "a has no complement"))
        .collect();
    laws.insert(Law::Complemented.name(), verdict(complemented, None));

    let ortho = match l.ortho.as_ref() {
        None => verdict(Vec::new(), no_ortho()),
        Some(o) => verdict(
            (0..n)
                .filter_map(|a| {
                    if m(a, o[a]) != bot {
                        Some(ce(&[a], Some(m(a, o[a])), Some(bot), "a & a' = 0"))
                    } else if j(a, o[a]) != top {
                        Some(ce(&[a], Some(j(a, o[a])), Some(top), "a v a' = 1"))
                    } else {
                        None
                    }
                })
                .collect(),
            None,
        ),
    };
    laws.insert(Law::Orthocomplemented.name(), ortho);

    let mut modular = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if l.leq(a, c) {
                    let (lhs, rhs) = (j(a, m(b, c)), m(j(a, b), c));
                    if lhs != rhs {
                        modular.push(ce(&[a, b, c], Some(lhs), Some(rhs), "a <= c => a v (b & c) = (a v b) & c"));
                    }
                }
            }
        }
    }
    laws.insert(Law::Modular.name(), verdict(modular, None));

    let om = match l.ortho.as_ref() {
        None => verdict(Vec::new(), no_ortho()),
        Some(o) => {
            let mut v = Vec::new();
            for (a, &oa) in o.iter().enumerate() {
                for c in 0..n {
                    if l.leq(a, c) {
                        let lhs = j(a, m(oa, c));
                        if lhs != c {
                            v.push(ce(&[a, c], Some(lhs), Some(c), "a <= c => a v (a' & c) = c"));
                        }
                    }
                }
            }
            verdict(v, None)
        }
    };
    laws.insert(Law::Orthomodular.name(), om);

    let mut dist = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (lhs, rhs) = (m(a, j(b, c)), j(m(a, b), m(a, c)));
                if lhs != rhs {
                    dist.push(ce(&[a, b, c], Some(lhs), Some(rhs), "a & (b v c) = (a & b) v (a & c)"));
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (lhs, rhs) = (j(a, m(b, c)), m(j(a, b), j(a, c)));
                if lhs != rhs {
                    dist.push(ce(&[a, b, c], Some(lhs), Some(rhs), "a v (b & c) = (a v b) & (a v c)"));
                }
            }
        }
    }
    laws.insert(Law::Distributive.name(), verdict(dist, None));

    LawReport { lattice: l.name().to_string(), laws }
}

/// Re-evaluates a counterexample and reports whether its two sides differ.
pub fn witness_fails(l: &FiniteLattice, law: Law, w: &[usize]) -> bool {
    let (m, j) = (|a, b| l.meet(a, b), |a, b| l.join(a, b));
    match (law, w) {
        (Law::Complemented, [a]) => !(0..l.len()).any(|b| m(*a, b) == l.bottom() && j(*a, b) == l.top()),
        (Law::Orthocomplemented, [a]) => match l.ortho(*a) {
            Some(o) => m(*a, o) != l.bottom() || j(*a, o) != l.top(),
            None => true,
        },
        (Law::Modular, [a, b, c]) => l.leq(*a, *c) && j(*a, m(*b, *c)) != m(j(*a, *b), *c),
        (Law::Orthomodular, [a, c]) => match l.ortho(*a) {
            Some(o) => l.leq(*a, *c) && j(*a, m(o, *c)) != *c,
            None => true,
        },
        (Law::Distributive, [a, b, c]) => {
            m(*a, j(*b, *c)) != j(m(*a, *b), m(*a, *c)) || j(*a, m(*b, *c)) != m(j(*a, *b), j(*a, *c))
        }
        _ => false,
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz text of the cover relation, edges pointing upward.
pub fn hasse_dot(l: &FiniteLattice) -> String {
    let mut ids: Vec<usize> = (0..l.len()).collect();
    ids.sort_by(|&a, &b| l.label(a).cmp(l.label(b)));
    let mut edges: Vec<(&str, &str)> = l.covers().into_iter().map(|(a, b)| (l.label(a), l.label(b))).collect();
    edges.sort();
    let mut out = format!("digraph {} {{\n  rankdir=BT;\n  node [shape=plaintext];\n", quote(l.name()));
    for i in ids {
        let _ = writeln!(out, "  {};", quote(l.label(i)));
    }
    for (a, b) in edges {
        let _ = writeln!(out, "  {} -> {};", quote(a), quote(b));
    }
    let _ = writeln!(out, "  {{ rank=min; {}; }}", quote(l.label(l.bottom())));
    let _ = writeln!(out, "  {{ rank=max; {}; }}", quote(l.label(l.top())));
    out.push_str("}\n");
    out
}
