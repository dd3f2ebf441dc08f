//! Proof kernel, evaluator and lattice auditor for graded quantum sequent
//! calculi.
//!
//! * [`syntax`]: formulas, graded sequents, derivations and the `.lq` script format.
//! * [`calculus`]: rulesets, rule application, derivation checking, dualities and search.
//! * [`evaluation`]: grade environments, gluing and truth values.
//! * [`hilbert`]: qubit and two-qubit states, measurement, weak values and gates.
//! * [`lattice`]: finite lattices built from projectors and their law audits.
//! * [`cli`]: the `lq` command line.

pub mod calculus;
pub mod cli;
pub mod evaluation;
pub mod hilbert;
pub mod lattice;
pub mod syntax;
