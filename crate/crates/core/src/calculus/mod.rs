//! Rulesets, the rule kernel, derivation checking, dualities, bounded
//! backward search and the built-in corpus.

mod check;
mod corpus;
mod duality;
mod rules;
mod search;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use check::{check_derivation, check_derivation_with_env, CheckReport, NodeReport, NodeStatus, Verdict};
pub use corpus::{corpus, corpus_entry, replay_all, replay_named, CorpusEntry, ReplayReport};
pub use duality::{perp_dual, perp_dual_sequent, perp_prime_dual, perp_prime_dual_sequent, star_dual, DualityError};
pub use rules::{apply_rule, RuleParams};
pub use search::{bounded_search, SearchOutcome, MAX_SEARCH_DEPTH};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalcError {
    #[error("unknown ruleset `{0}`")]
    UnknownPreset(String),
    #[error("unknown ruleset flag `{0}`")]
    UnknownFlag(String),
    #[error("unknown corpus entry `{0}`")]
    UnknownEntry(String),
    #[error(transparent)]
    Syntax(#[from] crate::syntax::SyntaxError),
}

/// Why a single rule application failed.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RuleError {
    #[error("rule {rule} not in ruleset {ruleset}")]
    Absent { rule: RuleId, ruleset: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("side condition failed: {0}")]
    SideCondition(String),
}

macro_rules! rule_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum RuleId { $($variant),* }

        impl RuleId {
            pub const ALL: &'static [RuleId] = &[$(RuleId::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(RuleId::$variant => $name),* }
            }
        }

        impl FromStr for RuleId {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok(RuleId::$variant),)*
                    other => Err(other.to_string()),
                }
            }
        }
    };
}

rule_ids! {
    GandForm => "gand-form",
    GandRefl => "gand-refl",
    GorForm => "gor-form",
    GorRefl => "gor-refl",
    NegForm => "neg-form",
    NegRefl => "neg-refl",
    AndForm => "and-form",
    AndRefl => "and-refl",
    OrForm => "or-form",
    OrRefl => "or-refl",
    TimesForm => "times-form",
    TimesRefl => "times-refl",
    ParForm => "par-form",
    ParRefl => "par-refl",
    AtForm => "at-form",
    AtRefl => "at-refl",
    SectForm => "sect-form",
    SectRefl => "sect-refl",
    IdAxiom => "id-axiom",
    GandAxiom => "gand-axiom",
    GorAxiom => "gor-axiom",
    AtAxiom => "at-axiom",
    QCut => "qcut",
    Cut => "cut",
    Epr => "epr",
    ExchL => "exch-l",
    ExchR => "exch-r",
    WeakL => "weak-l",
    WeakR => "weak-r",
    ContrL => "contr-l",
    ContrR => "contr-r",
    Hyp => "hyp",
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetaRule {
    QuantumCut,
    Cut,
    Epr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Structural {
    pub exchange: bool,
    pub weakening: bool,
    pub contraction: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Contexts {
    pub left: bool,
    pub right: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleSet {
    pub name: String,
    pub rules: BTreeSet<RuleId>,
    pub structural: Structural,
    pub contexts: Contexts,
    pub meta: BTreeSet<MetaRule>,
}

const BASIC: &[RuleId] = &[
    RuleId::AndForm,
    RuleId::AndRefl,
    RuleId::OrForm,
    RuleId::OrRefl,
    RuleId::NegForm,
    RuleId::NegRefl,
    RuleId::TimesForm,
    RuleId::TimesRefl,
    RuleId::ParForm,
    RuleId::ParRefl,
    RuleId::IdAxiom,
];

const ONE_QUBIT: &[RuleId] = &[
    RuleId::GandForm,
    RuleId::GandRefl,
    RuleId::GorForm,
    RuleId::GorRefl,
    RuleId::NegForm,
    RuleId::NegRefl,
    RuleId::IdAxiom,
    RuleId::GandAxiom,
    RuleId::GorAxiom,
];

const TWO_QUBIT_EXTRA: &[RuleId] =
    &[RuleId::AtForm, RuleId::AtRefl, RuleId::AtAxiom, RuleId::SectForm, RuleId::SectRefl];

impl RuleSet {
    fn base(name: &str, rules: &[RuleId], meta: &[MetaRule]) -> Self {
        RuleSet {
            name: name.to_string(),
            rules: rules.iter().copied().collect(),
            structural: Structural::default(),
            contexts: Contexts::default(),
            meta: meta.iter().copied().collect(),
        }
    }

    /// Whether `rule` may be applied at all under this ruleset.
    pub fn allows(&self, rule: RuleId) -> bool {
        match rule {
            RuleId::Hyp => true,
            RuleId::ExchL | RuleId::ExchR => self.structural.exchange,
            RuleId::WeakL | RuleId::WeakR => self.structural.weakening,
            RuleId::ContrL | RuleId::ContrR => self.structural.contraction,
            RuleId::QCut => self.meta.contains(&MetaRule::QuantumCut),
            RuleId::Cut => self.meta.contains(&MetaRule::Cut),
            RuleId::Epr => self.meta.contains(&MetaRule::Epr),
            other => self.rules.contains(&other),
        }
    }

    /// Applies a `+flag` modifier.
    pub fn with_flag(mut self, flag: &str) -> Result<Self, CalcError> {
        match flag {
            "exchange" => self.structural.exchange = true,
            "weakening" => self.structural.weakening = true,
            "contraction" => self.structural.contraction = true,
            "structural" => {
                self.structural.weakening = true;
                self.structural.contraction = true;
            }
            "left" => self.contexts.left = true,
            "right" => self.contexts.right = true,
            "cut" => {
                self.meta.insert(MetaRule::Cut);
            }
            "qcut" => {
                self.meta.insert(MetaRule::QuantumCut);
            }
            "epr" => {
                self.meta.insert(MetaRule::Epr);
            }
            other => return Err(CalcError::UnknownFlag(other.to_string())),
        }
        self.name = format!("{}+{flag}", self.name);
        Ok(self)
    }
}

fn preset(name: &str) -> Option<RuleSet> {
    let b = || {
        let mut rs = RuleSet::base("B", BASIC, &[MetaRule::Cut]);
        rs.structural.exchange = true;
        rs
    };
    let cube = |name: &str, s: bool, l: bool, r: bool| {
        let mut rs = b();
        rs.name = name.to_string();
        rs.structural.weakening = s;
        rs.structural.contraction = s;
        rs.contexts = Contexts { left: l, right: r };
        rs
    };
    Some(match name {
        "B" => b(),
        "BL" => cube("BL", false, true, false),
        "BR" => cube("BR", false, false, true),
        "BLR" => cube("BLR", false, true, true),
        "BS" => cube("BS", true, false, false),
        "BSL" => cube("BSL", true, true, false),
        "BSR" => cube("BSR", true, false, true),
        "BSRL" | "BSLR" => cube(name, true, true, true),
        "Lq" => RuleSet::base("Lq", ONE_QUBIT, &[MetaRule::QuantumCut]),
        "L2q" => {
            let rules: Vec<RuleId> = BASIC.iter().chain(TWO_QUBIT_EXTRA).copied().collect();
            RuleSet::base("L2q", &rules, &[MetaRule::Cut, MetaRule::Epr])
        }
        _ => return None,
    })
}

/// Builds a ruleset from a preset name optionally followed by `+flag`
/// modifiers, e.g. `L2q+exchange` or `B+weakening+contraction`.
pub fn make_ruleset(spec: &str) -> Result<RuleSet, CalcError> {
    let mut parts = spec.split('+').map(str::trim);
    let head = parts.next().unwrap_or_default();
    let mut rs = preset(head).ok_or_else(|| CalcError::UnknownPreset(spec.to_string()))?;
    for flag in parts {
        rs = rs.with_flag(flag)?;
    }
    Ok(rs)
}

pub const PRESETS: &[&str] = &["B", "BL", "BR", "BLR", "BS", "BSL", "BSR", "BSRL", "Lq", "L2q"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_names_roundtrip() {
        for &r in RuleId::ALL {
            assert_eq!(r.name().parse::<RuleId>(), Ok(r));
        }
        assert!("nope".parse::<RuleId>().is_err());
    }

    #[test]
    fn lq_has_quantum_cut_and_no_structure() {
        let rs = make_ruleset("Lq").unwrap();
        assert!(rs.allows(RuleId::QCut));
        assert!(!rs.allows(RuleId::Cut));
        assert_eq!(rs.structural, Structural::default());
        assert!(!rs.allows(RuleId::ExchL));
    }

    #[test]
    fn basic_logic_has_exchange_only() {
        let rs = make_ruleset("B").unwrap();
        assert_eq!(rs.structural, Structural { exchange: true, weakening: false, contraction: false });
        assert_eq!(rs.contexts, Contexts::default());
        assert!(rs.allows(RuleId::Cut));
    }

    #[test]
    fn flags_give_cube_variants() {
        let bs = make_ruleset("B+weakening+contraction").unwrap();
        let preset_bs = make_ruleset("BS").unwrap();
        assert_eq!(bs.structural, preset_bs.structural);
        assert_eq!(bs.rules, preset_bs.rules);
        assert_eq!(make_ruleset("BSRL").unwrap().contexts, Contexts { left: true, right: true });
    }

    #[test]
    fn l2q_has_cut_and_epr() {
        let rs = make_ruleset("L2q").unwrap();
        assert!(rs.allows(RuleId::Cut) && rs.allows(RuleId::Epr) && rs.allows(RuleId::AtForm));
        assert!(!rs.allows(RuleId::WeakL) && !rs.allows(RuleId::ExchR));
        assert!(make_ruleset("L2q+exchange").unwrap().allows(RuleId::ExchR));
    }

    #[test]
    fn unknown_presets_and_flags() {
        assert_eq!(make_ruleset("NoSuchLogic"), Err(CalcError::UnknownPreset("NoSuchLogic".into())));
        assert_eq!(make_ruleset("Lq+sparkle"), Err(CalcError::UnknownFlag("sparkle".into())));
    }
}
